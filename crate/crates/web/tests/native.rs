use pfcft_web::{cfft_view_native, decompositions_text, transform_text};

#[test]
fn decompositions_rank_best_first() {
    let text = decompositions_text(255, 0).unwrap();
    assert!(
        text.lines().next().unwrap().starts_with("255 = 3 x 85"),
        "{text}"
    );
    assert!(text.contains("total=15366"));
    assert!(decompositions_text(16, 0).is_err());
}

#[test]
fn view_of_15() {
    let v = cfft_view_native(15, 4).unwrap();
    assert_eq!(v.field(), "GF(2^4)/prim_poly=13");
    let a = v.matrix("a");
    assert_eq!(a.lines().count(), 15);
    assert!(a.lines().all(|r| r.len() == v.matrix("q").lines().count()));
    assert!(v.add(1) > 0 && v.add(2) > 0);
    assert!(cfft_view_native(511, 9).is_err());
}

#[test]
fn transform_delta_is_all_ones() {
    let out = transform_text(15, 4, "1").unwrap();
    assert!(out.contains("matches direct DFT"), "{out}");
    let values: Vec<&str> = out
        .lines()
        .skip(1)
        .flat_map(|l| l.split_whitespace())
        .collect();
    assert_eq!(values, vec!["1"; 15]);
    assert!(transform_text(15, 4, "1 2 zz").is_err());
    assert!(transform_text(15, 4, "10").is_err());
}

#[test]
fn prime_length_transform() {
    let out = transform_text(31, 5, "1 2 3").unwrap();
    assert!(out.starts_with("31 = 31"), "{out}");
    assert!(out.contains("matches direct DFT"));
}
