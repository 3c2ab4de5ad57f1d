//! Small worked examples across modules, checked end to end.

use inqkit::bisim::{bisim_check, char_formula, DEFAULT_CHAR_CAP};
use inqkit::fo::{env_of, eval_fo, parse_fo, standard_translation, Target};
use inqkit::formula::parse;
use inqkit::model::{supports, truth, InfoState};
use inqkit::relational::{decode, encode, encode_unchecked, validate_relational, EncodingFlavor};
use inqkit::samples;
use inqkit::transform::{disjoint_union, is_k_rich, rich_cover};

#[test]
fn question_and_modalities_on_m1() {
    let m1 = samples::m1();
    let q = parse("?p", m1.sig()).unwrap();
    assert!(!supports(&m1, m1.all(), &q));
    assert!(supports(&m1, InfoState::singleton(0), &q));
    let boxed = parse("[a]?p", m1.sig()).unwrap();
    let window = parse("[+a]?p", m1.sig()).unwrap();
    assert!(!truth(&m1, 0, &boxed));
    assert!(truth(&m1, 0, &window));
}

#[test]
fn m0_m1_split_at_depth_one() {
    let (m0, m1) = (samples::m0(), samples::m1());
    assert!(bisim_check(&m0, 0, &m1, 0, Some(0)).bisimilar);
    assert!(!bisim_check(&m0, 0, &m1, 0, Some(1)).bisimilar);
    let chi = char_formula(&m1, m1.sig(), 0, 1, DEFAULT_CHAR_CAP).unwrap();
    assert!(!truth(&m0, 0, &chi));
}

#[test]
fn encoding_sizes_and_round_trip() {
    let m1 = samples::m1();
    let lf = encode(&m1, EncodingFlavor::LocallyFull, None).unwrap();
    assert_eq!(lf.states.len(), 4);
    assert!(validate_relational(&lf).is_ok());
    let full = encode(&m1, EncodingFlavor::Full, None).unwrap();
    assert_eq!(decode(&full).unwrap(), m1);
    // violates factivity on purpose
    let m3 = samples::three_world_illustration();
    assert!(encode(&m3, EncodingFlavor::Minimal, None).is_err());
    let sizes: Vec<usize> = [EncodingFlavor::Minimal, EncodingFlavor::LocallyFull, EncodingFlavor::Full]
        .into_iter()
        .map(|f| encode_unchecked(&m3, f, None, 16).unwrap().states.len())
        .collect();
    assert_eq!(sizes, [3, 4, 8]);
}

#[test]
fn translation_agrees_on_the_encoding() {
    let m1 = samples::m1();
    let a = encode(&m1, EncodingFlavor::LocallyFull, None).unwrap().to_structure();
    let some_full = parse_fo("(exists s S (forall x W (in x s)))").unwrap();
    assert!(eval_fo(&a, &some_full, &Default::default()).unwrap());
    let f = parse("[a]?p", m1.sig()).unwrap();
    let tr = standard_translation(&f, Target::World, "w");
    for (i, w) in m1.worlds().iter().enumerate() {
        let env = env_of(&a, &[("w", w)]).unwrap();
        assert_eq!(eval_fo(&a, &tr, &env).unwrap(), truth(&m1, i, &f));
    }
}

#[test]
fn covers_and_unions_preserve_the_point() {
    let m1 = samples::m1();
    let u = disjoint_union(&m1, &samples::m0()).unwrap();
    assert!(bisim_check(&u, 0, &m1, 0, None).bisimilar);
    assert!(!is_k_rich(&m1, 2));
    assert!(is_k_rich(&rich_cover(&m1, 3).unwrap().source, 3));
}
