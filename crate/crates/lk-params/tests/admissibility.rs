mod common {
    pub mod fixtures;
}

use std::collections::BTreeSet;

use ajk_lk::check_admissible;
use common::fixtures::fixtures;

#[test]
fn fixtures_are_classified_exactly() {
    let all = fixtures();
    assert!(all.len() >= 12);
    for f in all {
        let report = check_admissible(&f.params);
        let got: BTreeSet<&str> = report.failures().map(|x| x.clause).collect();
        let want: BTreeSet<&str> = f.fails.iter().copied().collect();
        assert_eq!(got, want, "{}:\n{report}", f.name);
        assert_eq!(report.passed(), f.fails.is_empty(), "{}", f.name);
    }
}
