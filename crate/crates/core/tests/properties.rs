//! Randomised cross-module invariants.
//!
//! Each property here ties at least two modules together: the canonical form
//! of the representation ring against fixed-point dimensions, the generator
//! against the validator, the decomposition against the chain-level oracle,
//! and the replayed obstruction records against the vanishing machinery.

use proptest::prelude::*;

use equitree_core::decomp::{canonical_eq, decompose, underlying_betti};
use equitree_core::geom::{filtration_steps, FiltrationStep};
use equitree_core::mackey::{decomposition_homology, LevelGroup};
use equitree_core::obstruct::replay;
use equitree_core::rep_ring::VirtualRep;
use equitree_core::tree::{generate_random, parse, reorient, validate, AdmissibleTree, TreeType};
use equitree_core::vanish::{criterion_vanishes, verdict_for};

/// Odd orders exercised throughout: primes, prime powers and one mixed order.
const ORDERS: [u64; 7] = [3, 5, 7, 9, 15, 25, 27];

fn orders() -> impl Strategy<Value = u64> {
    prop::sample::select(ORDERS.to_vec())
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

// Virtual representation over C_m with a few random characters, multiplicities
// in [-3, 3] so negative (virtual) parts are common.
fn rep_over(m: u64) -> impl Strategy<Value = VirtualRep> {
    (prop::collection::vec((0..m as i64, -3i64..=3), 0..4), -3i64..=3).prop_map(
        move |(terms, triv)| {
            let mut v = VirtualRep::zero(m);
            for (k, c) in terms {
                v.add_lambda(k, c);
            }
            v.add_trivial(triv);
            v
        },
    )
}

fn reps() -> impl Strategy<Value = VirtualRep> {
    orders().prop_flat_map(rep_over)
}

fn rep_pairs() -> impl Strategy<Value = (VirtualRep, VirtualRep)> {
    orders().prop_flat_map(|m| (rep_over(m), rep_over(m)))
}

fn trees() -> impl Strategy<Value = AdmissibleTree> {
    (orders(), 0u64..5000).prop_map(|(m, seed)| generate_random(m, 3, 8, seed))
}

proptest! {
    #[test]
    fn canonical_form_preserves_fixed_dimensions(alpha in reps()) {
        let hz = alpha.hz_canonical();
        for d in divisors(alpha.order()) {
            prop_assert_eq!(hz.fixed_dim(d).unwrap(), alpha.fixed_dim(d).unwrap());
        }
        prop_assert_eq!(alpha.fixed_dim(1).unwrap(), alpha.dim());
        prop_assert_eq!(hz.hz_canonical(), hz.clone());
    }

    #[test]
    fn dimension_counts_are_additive(pair in rep_pairs()) {
        let (alpha, beta) = pair;
        let sum = &alpha + &beta;
        prop_assert_eq!(sum.dim(), alpha.dim() + beta.dim());
        for d in divisors(alpha.order()) {
            prop_assert_eq!(
                sum.fixed_dim(d).unwrap(),
                alpha.fixed_dim(d).unwrap() + beta.fixed_dim(d).unwrap()
            );
        }
    }

    #[test]
    fn the_criterion_sees_only_the_canonical_form(alpha in reps()) {
        prop_assert_eq!(criterion_vanishes(&alpha), criterion_vanishes(&alpha.hz_canonical()));
    }

    #[test]
    fn display_and_parse_are_inverse(alpha in reps()) {
        let parsed = VirtualRep::parse(&alpha.to_string(), alpha.order()).unwrap();
        prop_assert_eq!(parsed, alpha);
    }

    #[test]
    fn generated_trees_validate_and_stabilisers_divide_upward(t in trees()) {
        let revalidated = validate(&t.to_raw()).expect("generated trees are admissible");
        prop_assert_eq!(revalidated.orbits().len(), t.orbits().len());
        prop_assert_eq!(revalidated.n_t(), t.n_t());
        for o in t.orbits() {
            if let Some(p) = o.parent {
                prop_assert_eq!(t.orbit(p).stab % o.stab, 0, "child stab must divide parent stab");
            }
        }
    }

    #[test]
    fn filtration_shape_matches_the_tree(t in trees()) {
        let steps = filtration_steps(&t);
        let extra = if t.tree_type() == TreeType::I { 1 } else { 0 };
        prop_assert_eq!(steps.len(), 1 + t.orbits().len() + extra);
        prop_assert_eq!(&steps[0], &FiltrationStep::BaseCell);
        let mut attached: Vec<u64> = steps
            .iter()
            .filter_map(|s| match s {
                FiltrationStep::OrbitAttach { stab, .. } => Some(*stab),
                _ => None,
            })
            .collect();
        attached.sort_unstable();
        let mut expected: Vec<u64> =
            t.orbits().iter().filter(|o| o.parent.is_some()).map(|o| o.stab).collect();
        expected.sort_unstable();
        prop_assert_eq!(attached, expected);
    }

}

// The remaining properties run a decomposition, a replay or a chain-level
// homology computation per case, so they get a smaller case budget.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_is_relabeling_invariant(
        t in trees(),
        stride in 1u64..5,
        offset in 0u64..8,
    ) {
        let Ok(dec) = decompose(&t) else { return Ok(()) };
        let mut raw = t.to_raw();
        for o in &mut raw.orbits {
            o.id = o.id * stride + offset;
            o.parent = o.parent.map(|p| p * stride + offset);
        }
        let relabeled = validate(&raw).expect("relabeling preserves admissibility");
        let dec2 = decompose(&relabeled).expect("relabeling preserves the dispatched statement");
        prop_assert!(canonical_eq(&dec, &dec2));
        // The replays agree record for record once orbit ids are masked out.
        let key = |t: &AdmissibleTree| {
            replay(t)
                .expect("a decomposable tree replays")
                .into_iter()
                .map(|r| (r.step, r.beta, r.gamma, r.level, r.alpha, r.verdict))
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(key(&t), key(&relabeled));
    }

    #[test]
    fn level_one_homology_is_that_of_the_underlying_manifold(t in trees()) {
        let Ok(dec) = decompose(&t) else { return Ok(()) };
        let (b0, b2, b4) = underlying_betti(&dec, &t);
        let h = decomposition_homology(&dec, 1).unwrap();
        let expected = vec![
            LevelGroup::free(b0),
            LevelGroup::zero(),
            LevelGroup::free(b2),
            LevelGroup::zero(),
            LevelGroup::free(b4),
        ];
        prop_assert_eq!(h, expected);
    }

    #[test]
    fn replay_records_are_odd_and_recomputable(t in trees()) {
        let Ok(records) = replay(&t) else { return Ok(()) };
        for r in &records {
            prop_assert_eq!(r.alpha.dim().rem_euclid(2), 1, "connecting maps live in odd degree");
            let alpha = &(&r.beta.restrict(r.level).unwrap() - &r.gamma.restrict(r.level).unwrap())
                - &VirtualRep::trivial(r.level, 1);
            prop_assert_eq!(&alpha, &r.alpha);
            prop_assert_eq!(&verdict_for(&alpha), &r.verdict);
        }
    }

    #[test]
    fn reorienting_there_and_back_restores_the_decomposition(
        m in prop::sample::select(vec![3u64, 5, 7, 9, 25, 27]),
        seed in 0u64..5000,
    ) {
        let t = generate_random(m, 3, 6, seed);
        if t.tree_type() != TreeType::I {
            return Ok(());
        }
        let p = (2..=m).find(|d| m % d == 0).unwrap();
        let target = t
            .orbits()
            .iter()
            .find(|o| o.parent.is_some() && o.stab == m && o.weight.diff() % p == 0);
        let Some(v) = target else { return Ok(()) };
        let Ok(t2) = reorient(&t, v.id) else { return Ok(()) };
        prop_assert_eq!(t2.root().id, v.id);
        prop_assert_eq!(t2.orbits().len(), t.orbits().len());
        prop_assert_eq!(t2.n_t(), t.n_t());
        let mut stabs: Vec<u64> = t.orbits().iter().map(|o| o.stab).collect();
        let mut stabs2: Vec<u64> = t2.orbits().iter().map(|o| o.stab).collect();
        stabs.sort_unstable();
        stabs2.sort_unstable();
        prop_assert_eq!(stabs, stabs2);
        let Ok(back) = reorient(&t2, t.root().id) else { return Ok(()) };
        prop_assert_eq!(back.root().id, t.root().id);
        let (dec, dec2) = (decompose(&t).unwrap(), decompose(&back).unwrap());
        prop_assert!(canonical_eq(&dec, &dec2));
    }

    #[test]
    fn parse_validate_roundtrip_through_json(t in trees()) {
        let json = serde_json::to_string(&t.to_raw()).unwrap();
        let raw = parse(&json).expect("serialized trees parse");
        let back = validate(&raw).expect("serialized trees validate");
        prop_assert_eq!(serde_json::to_string(&back.to_raw()).unwrap(), json);
    }
}
