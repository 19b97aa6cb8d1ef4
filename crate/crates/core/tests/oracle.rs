mod common;

use common::{coord_count, naive_local_maps, naive_rc_maps, naive_root_linear_count, oracle_domains};
use rckit::opspace::Ambient;
use rckit::rcmaps::{local_space, rc_solution_space, root_linear_forms};
use rckit::{make_field, Caps, OperatorSpace};

fn rc_dim_by_oracle(s: &OperatorSpace) -> usize {
    let count = naive_rc_maps(s).len();
    let p = s.field().characteristic() as usize;
    let mut d = 0;
    while p.pow(d) < count {
        d += 1;
    }
    assert_eq!(p.pow(d), count, "RC set size is not a power of p");
    d as usize
}

#[test]
fn oracle_reproduces_known_small_dimensions() {
    let f2 = make_field(2, 1).unwrap();
    let f3 = make_field(3, 1).unwrap();
    let cases = [
        (Ambient::sym(&f2, 2, 0), 3),
        (Ambient::alt(&f2, 3, 0), 3),
        (Ambient::sym(&f3, 2, 0), 2),
    ];
    for (amb, want) in cases {
        assert_eq!(rc_dim_by_oracle(&OperatorSpace::full(&amb)), want, "{}", amb.describe());
    }
}

#[test]
fn oracle_root_linear_counts() {
    assert_eq!(naive_root_linear_count(&make_field(2, 1).unwrap()), 2);
    assert_eq!(naive_root_linear_count(&make_field(2, 2).unwrap()), 4);
    assert_eq!(naive_root_linear_count(&make_field(2, 3).unwrap()), 8);
    for k in 1..=3 {
        let f = make_field(2, k).unwrap();
        assert_eq!(1usize << root_linear_forms(&f).len(), naive_root_linear_count(&f));
    }
}

#[test]
fn solver_matches_oracle_on_full_ambients() {
    for s in oracle_domains().into_iter().filter(|s| s.codim() == 0) {
        assert!(coord_count(&s) <= 12);
        let rc = rc_solution_space(&s, &Caps::default()).unwrap();
        let naive = naive_rc_maps(&s);
        let p = s.field().characteristic() as usize;
        assert_eq!(p.pow(rc.dim() as u32), naive.len(), "{}", s.ambient().describe());
        assert!(naive.iter().all(|u| rc.basis().member(u)));
        let local = naive_local_maps(&s);
        assert_eq!(p.pow(local_space(&s).dim() as u32), local.len());
    }
}
