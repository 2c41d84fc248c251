mod common;

use flipdist::acyclic::is_acyclic;
use flipdist::blowup::{self, ConflictGraph};
use flipdist::reduction::{
    build_reduction, canonical_witness, max2sat_bruteforce, reduction_equivalence_check, verify_gadget_conflicts,
    Clause, GadgetError, Max2SatInstance, ReductionOutput, Role, Side,
};

fn conflicts(out: &ReductionOutput) -> ConflictGraph {
    blowup::conflict_graph(&blowup::blow_up(&out.t1, &out.t2, 1))
}

fn assignments(w: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << w).map(move |bits| (0..w).map(|v| bits >> v & 1 == 1).collect())
}

#[test]
fn family_is_exhaustive_and_small() {
    let family = common::instance_family(3, 3);
    // w = 1: 1; w = 2: 1 + 2 + 3 + 4; w = 3: all 84 multisets of 6 kinds
    // minus none (same-side clauses over three variables never interleave)
    assert_eq!(family.len(), 1 + 10 + 84);
}

#[test]
fn gamma_size_counts_blocks_and_clause_pairs() {
    for phi in common::instance_family(3, 3) {
        let out = build_reduction(&phi).unwrap();
        assert_eq!(out.pairs.len(), 2 * phi.w * (phi.m() + 1) + 2 * phi.m());
        assert_eq!(out.roles.len(), out.pairs.len());
    }
}

#[test]
fn canonical_witnesses_are_acyclic_and_sized() {
    for phi in common::instance_family(3, 2) {
        let out = build_reduction(&phi).unwrap();
        let h = conflicts(&out);
        for a in assignments(phi.w) {
            let s = canonical_witness(&out, &a);
            let sat = phi.clauses.iter().filter(|c| c.satisfied(&a)).count();
            assert_eq!(s.len(), phi.w * (phi.m() + 1) + sat);
            assert!(is_acyclic(&h, &s), "{phi:?} {a:?}");
        }
    }
}

#[test]
fn equivalence_on_a_few_instances() {
    let phi = Max2SatInstance::from_literals(3, &[(1, 2), (-1, -2), (2, 3), (-2, -3)], None).unwrap();
    let r = reduction_equivalence_check(&phi).unwrap();
    assert_eq!(r.optimum, max2sat_bruteforce(&phi).unwrap());
    assert_eq!(r.ac.size, 3 * 5 + 4);
}

#[test]
fn dropping_a_required_double_conflict_is_caught() {
    let phi = Max2SatInstance::new(2, vec![Clause { side: Side::Positive, i: 1, j: 2 }], None).unwrap();
    let out = build_reduction(&phi).unwrap();
    let h = conflicts(&out);
    assert!(verify_gadget_conflicts(&out, &h).is_ok());
    let c1 = out.index_of(Role::PosFirst { clause: 0 }).unwrap();
    let nx = out.index_of(Role::NegLiteral { var: 1, copy: 0 }).unwrap();
    let mut cut = h.clone();
    cut.edges.remove(&(c1, nx));
    assert!(matches!(verify_gadget_conflicts(&out, &cut), Err(GadgetError::MissingDoubleConflict(..))));
}

#[test]
fn stray_conflicts_are_caught() {
    let phi = Max2SatInstance::new(2, vec![Clause { side: Side::Positive, i: 1, j: 2 }], None).unwrap();
    let out = build_reduction(&phi).unwrap();
    let h = conflicts(&out);
    let x1 = out.index_of(Role::Literal { var: 1, copy: 0 }).unwrap();
    let x2 = out.index_of(Role::Literal { var: 2, copy: 0 }).unwrap();
    // x1 and x2 are compatible, so a right-to-left edge is not allowed
    let mut extra = h.clone();
    extra.edges.insert((x2, x1));
    let err = verify_gadget_conflicts(&out, &extra).unwrap_err();
    assert!(matches!(err, GadgetError::UnexpectedDirectedConflict(..) | GadgetError::UnexpectedDoubleConflict(..)));
    let mut both = h.clone();
    both.edges.insert((x1, x2));
    both.edges.insert((x2, x1));
    assert!(matches!(verify_gadget_conflicts(&out, &both), Err(GadgetError::UnexpectedDoubleConflict(..))));
}

#[test]
fn mixed_signs_are_rejected() {
    assert!(Max2SatInstance::from_literals(2, &[(1, -2)], None).is_err());
}

#[test]
fn moving_an_apex_breaks_the_inventory() {
    let phi = Max2SatInstance::new(2, vec![Clause { side: Side::Positive, i: 1, j: 2 }], None).unwrap();
    let out = build_reduction(&phi).unwrap();
    assert_eq!(blowup::conflicts_of_pairs(&out.pairs), conflicts(&out));
    let x = out.index_of(Role::Literal { var: 1, copy: 0 }).unwrap();
    let mut pairs = out.pairs.clone();
    // pull the apex into the negated block, as if the x block started there
    pairs[x].apex_t = out.pairs[out.index_of(Role::NegLiteral { var: 1, copy: 0 }).unwrap()].spine.b + 1;
    assert!(verify_gadget_conflicts(&out, &blowup::conflicts_of_pairs(&pairs)).is_err());
}

#[test]
fn canonical_witnesses_meet_the_type_premises() {
    for phi in common::instance_family(3, 3) {
        let out = build_reduction(&phi).unwrap();
        let h = conflicts(&out);
        let types: Vec<_> = out.pairs.iter().map(blowup::classify_pair).collect();
        for a in assignments(phi.w) {
            let s = canonical_witness(&out, &a);
            assert_eq!(blowup::check_acyclic_premises(&h, &types, &s), Ok(()), "{phi:?} {a:?}");
        }
    }
}
