mod common;

use common::{test_corpus, Sweep};
use inqkit::formula::count_formulas;

// The compositional class sweep must reproduce the direct computation
// formula by formula on everything small enough to enumerate.
#[test]
fn classes_match_direct_enumeration() {
    for m in test_corpus().iter().take(12) {
        let mut sw = Sweep::new(m);
        let dp = sw.classes(2, 5);
        let direct = sw.direct_classes(2, 5);
        for n in 1..=5 {
            assert_eq!(dp[n], direct[n], "size {n} on {m:?}");
        }
    }
}

#[test]
fn class_counts_cover_every_formula() {
    let m = &test_corpus()[0];
    let mut sw = Sweep::new(m);
    let t = std::time::Instant::now();
    let dp = sw.classes(2, 9);
    let total: u128 = dp.iter().flat_map(|c| c.values()).sum();
    assert_eq!(total, count_formulas(m.sig(), 2, 9));
    eprintln!("{} worlds: {} keys, {:?}", m.len(), dp.iter().map(|c| c.len()).sum::<usize>(), t.elapsed());
}
