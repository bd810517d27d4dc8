//! Local equivariant geometry of the vertex manifolds.
//!
//! A vertex of weight $(a, b; m_v)$ carries $\mathbb{CP}^2$ with the
//! $C_{m_v}$-action $[x : y : z] \mapsto [g^a x : g^b y : z]$ (or $S^4 =
//! S(\lambda^a \oplus \lambda^b \oplus \mathbb{R})$ at a type II root). This
//! module computes the data the gluing construction consumes: tangential
//! representations at fixed points, which neighbouring weights admit an
//! equivariant connected sum (at a fixed point, or along a fixed circle for a
//! subgroup), fixed-point censuses of restricted actions, and the cellular
//! filtration of the glued manifold that drives both the formal decomposition
//! and the chain-level oracle.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::rep_ring::{gcd, VirtualRep};
use crate::tree::{AdmissibleTree, TreeType, Weight};

/// Which standard block a census refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// $\mathbb{CP}^2$ with the weight action (three fixed points).
    Cp2,
    /// $S^4 = S(\lambda^a \oplus \lambda^b \oplus \mathbb{R})$ (two poles).
    S4,
}

/// Fixed-point set of a restricted action on a block, up to homeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedCensus {
    /// Number of isolated fixed points.
    pub isolated_points: u64,
    /// Number of 2-sphere components.
    pub sphere_components: u64,
    /// The whole block is fixed (trivial restricted action).
    pub whole_space: bool,
}

impl FixedCensus {
    /// Euler characteristic of the fixed set inside the given block.
    pub fn euler(&self, block: Block) -> u64 {
        if self.whole_space {
            match block {
                Block::Cp2 => 3,
                Block::S4 => 2,
            }
        } else {
            self.isolated_points + 2 * self.sphere_components
        }
    }
}

/// Tangential representations of $C_{m_v}$ at the three fixed points of the
/// weighted $\mathbb{CP}^2$: $\lambda^{b-a} + \lambda^{-a}$,
/// $\lambda^{a-b} + \lambda^{-b}$, $\lambda^{a} + \lambda^{b}$.
pub fn tangential_reps(w: &Weight) -> [VirtualRep; 3] {
    let m = w.modulus();
    let (a, b) = (w.a() as i64, w.b() as i64);
    let pair = |x: i64, y: i64| {
        let mut r = VirtualRep::zero(m);
        r.add_lambda(x, 1);
        r.add_lambda(y, 1);
        r
    };
    [pair(b - a, -a), pair(a - b, -b), pair(a, b)]
}

/// Whether two vertices with the same stabiliser admit an equivariant
/// connected sum at a fixed point.
///
/// `w2` is expanded into its orbit under swap, global sign, and the
/// orientation move $(a, b) \mapsto (a-b, -b)$; the sum exists exactly when
/// that orbit meets $\{(a_1, -b_1), (a_1-b_1, b_1), (a_1, b_1-a_1)\}$
/// (a tangential representation of one matches an inverse of the other).
/// The relation is symmetric.
pub fn compatible_same_group(w1: &Weight, w2: &Weight) -> bool {
    if w1.modulus() != w2.modulus() {
        return false;
    }
    let m = w2.modulus() as i64;
    let reduce = |(x, y): (i64, i64)| (x.rem_euclid(m) as u64, y.rem_euclid(m) as u64);
    let mut orbit = vec![reduce((w2.a() as i64, w2.b() as i64))];
    let mut i = 0;
    while i < orbit.len() {
        let (x, y) = (orbit[i].0 as i64, orbit[i].1 as i64);
        for next in [reduce((y, x)), reduce((-x, -y)), reduce((x - y, -y))] {
            if !orbit.contains(&next) {
                orbit.push(next);
            }
        }
        i += 1;
    }
    let (a, b) = (w1.a() as i64, w1.b() as i64);
    [(a, -b), (a - b, b), (a, b - a)].into_iter().any(|t| orbit.contains(&reduce(t)))
}

/// Whether a vertex of weight `child` with a strictly smaller stabiliser can
/// be glued along an invariant circle of the `parent` vertex.
///
/// Requires: the child stabiliser order $m'$ arises as $\gcd(x, m_v)$ for one
/// of the circle parameters $x \in \{a, b, a-b\}$ of the parent; the child
/// weight is primitive, has one entry $\equiv 0 \bmod m'$, and its other
/// entry is $\pm$ one of the parent's circle parameters mod $m'$ and not
/// divisible by $m'$.
pub fn compatible_subgroup(parent: &Weight, child: &Weight) -> bool {
    let mv = parent.modulus();
    let mu = child.modulus();
    if mu >= mv || mv % mu != 0 {
        return false;
    }
    let entries = |w: &Weight| {
        let (a, b) = (w.a() as i64, w.b() as i64);
        [a, b, a - b]
    };
    if !entries(parent).iter().any(|&x| gcd(x.rem_euclid(mv as i64) as u64, mv) == mu) {
        return false;
    }
    if gcd(gcd(child.a(), child.b()), mu) != 1 {
        return false;
    }
    let t = if child.b() == 0 {
        child.a()
    } else if child.a() == 0 {
        child.b()
    } else {
        return false;
    };
    if mu == 1 {
        return true;
    }
    t % mu != 0
        && entries(parent).iter().any(|&x| {
            let xm = x.rem_euclid(mu as i64) as u64;
            xm == t || (mu - xm) % mu == t
        })
}

/// Fixed-point census of the $C_d$-restricted action on a block,
/// for $C_d \subseteq C_{m_v}$.
///
/// For $\mathbb{CP}^2$ the coordinate exponents are $\{a, b, 0\}$ mod $d$:
/// three distinct residues give three isolated points; exactly two equal give
/// an invariant line ($S^2$) plus a point; all equal (so $d = 1$ for a
/// primitive weight) fixes everything. For $S^4$ the poles are always fixed;
/// $d \mid a$ or $d \mid b$ opens up a fixed $S^2$ through them.
pub fn fixed_census_block(w: &Weight, d: u64, block: Block) -> FixedCensus {
    assert!(d >= 1 && w.modulus() % d == 0, "census level must divide the stabiliser order");
    let (a, b) = (w.a() % d.max(1), w.b() % d.max(1));
    match block {
        Block::Cp2 => {
            if a == 0 && b == 0 {
                FixedCensus { isolated_points: 0, sphere_components: 0, whole_space: true }
            } else if a == b || a == 0 || b == 0 {
                FixedCensus { isolated_points: 1, sphere_components: 1, whole_space: false }
            } else {
                FixedCensus { isolated_points: 3, sphere_components: 0, whole_space: false }
            }
        }
        Block::S4 => {
            let da = a == 0;
            let db = b == 0;
            if da && db {
                FixedCensus { isolated_points: 0, sphere_components: 0, whole_space: true }
            } else if da || db {
                FixedCensus { isolated_points: 0, sphere_components: 1, whole_space: false }
            } else {
                FixedCensus { isolated_points: 2, sphere_components: 0, whole_space: false }
            }
        }
    }
}

/// One step of the equivariant cellular filtration of $X(T)$.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiltrationStep {
    /// The fixed base 0-cell.
    BaseCell,
    /// Attachment of the cells of a non-root orbit: one $D(\lambda^{a-b})$
    /// over $C_{m_v}$ per vertex, induced up to $C_m$.
    OrbitAttach {
        /// Orbit id in the tree.
        orbit: u64,
        /// Stabiliser order of the orbit.
        stab: u64,
        /// Cell grading $\lambda^{(a-b) \bmod m_v}$ over $C_{m_v}$.
        grading: VirtualRep,
    },
    /// The root's middle cell $D(\lambda^{a_0-b_0})$ (type I only).
    RootMiddleCell {
        /// Cell grading over $C_m$.
        grading: VirtualRep,
    },
    /// The root's top cell $D(\lambda^{a_0} + \lambda^{b_0})$.
    RootTopCell {
        /// Cell grading over $C_m$.
        grading: VirtualRep,
    },
}

impl Serialize for FiltrationStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            FiltrationStep::BaseCell => {
                let mut s = serializer.serialize_struct("FiltrationStep", 1)?;
                s.serialize_field("kind", "base")?;
                s.end()
            }
            FiltrationStep::OrbitAttach { stab, grading, .. } => {
                let mut s = serializer.serialize_struct("FiltrationStep", 3)?;
                s.serialize_field("kind", "orbit")?;
                s.serialize_field("stab", stab)?;
                s.serialize_field("grading", &grading.to_string())?;
                s.end()
            }
            FiltrationStep::RootMiddleCell { grading } => {
                let mut s = serializer.serialize_struct("FiltrationStep", 2)?;
                s.serialize_field("kind", "middle")?;
                s.serialize_field("grading", &grading.to_string())?;
                s.end()
            }
            FiltrationStep::RootTopCell { grading } => {
                let mut s = serializer.serialize_struct("FiltrationStep", 2)?;
                s.serialize_field("kind", "top")?;
                s.serialize_field("grading", &grading.to_string())?;
                s.end()
            }
        }
    }
}

/// The cellular filtration of $X(T)$: base cell, then the root's middle cell
/// (type I) and top cell, then each non-root orbit by increasing level, ids
/// ascending within a level.
///
/// The root block comes first because the decomposition statements induct on
/// the number of levels by splitting off the deepest one: each stage is a
/// subcomplex of the next, and a block attaches onto the stage containing
/// everything nearer the root.
pub fn filtration_steps(t: &AdmissibleTree) -> Vec<FiltrationStep> {
    let mut steps = vec![FiltrationStep::BaseCell];
    let root = t.root();
    let m = t.order();
    if t.tree_type() == TreeType::I {
        steps.push(FiltrationStep::RootMiddleCell {
            grading: VirtualRep::lambda(m, root.weight.diff() as i64),
        });
    }
    let mut top = VirtualRep::zero(m);
    top.add_lambda(root.weight.a() as i64, 1);
    top.add_lambda(root.weight.b() as i64, 1);
    steps.push(FiltrationStep::RootTopCell { grading: top });
    let mut non_root: Vec<_> = t.orbits().iter().filter(|o| o.parent.is_some()).collect();
    non_root.sort_by_key(|o| (o.level, o.id));
    for o in non_root {
        steps.push(FiltrationStep::OrbitAttach {
            orbit: o.id,
            stab: o.stab,
            grading: VirtualRep::lambda(o.stab, o.weight.diff() as i64),
        });
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep_ring::gcd;
    use crate::tree::{parse, validate};

    fn w(a: i64, b: i64, m: u64) -> Weight {
        Weight::new(a, b, m)
    }

    fn tree(json: &str) -> AdmissibleTree {
        validate(&parse(json).unwrap()).unwrap()
    }

    #[test]
    fn tangential_reps_of_a_weighted_cp2() {
        let reps = tangential_reps(&w(1, 2, 5));
        assert_eq!(reps[0].to_string(), "l^1+l^4");
        assert_eq!(reps[1].to_string(), "l^3+l^4");
        assert_eq!(reps[2].to_string(), "l^1+l^2");
    }

    #[test]
    fn orientation_move_permutes_tangential_reps() {
        for (a, b, m) in [(1, 2, 5), (3, 1, 9), (1, 5, 15), (4, 11, 15)] {
            let orig = tangential_reps(&w(a, b, m));
            let moved = tangential_reps(&w(a - b, -b, m));
            let mut xs: Vec<String> = orig.iter().map(|r| r.to_string()).collect();
            let mut ys: Vec<String> = moved.iter().map(|r| r.to_string()).collect();
            xs.sort();
            ys.sort();
            assert_eq!(xs, ys);
        }
    }

    #[test]
    fn same_group_compatibility_examples() {
        assert!(compatible_same_group(&w(1, 2, 5), &w(1, 3, 5)));
        assert!(compatible_same_group(&w(1, 2, 5), &w(2, 4, 5)));
        assert!(!compatible_same_group(&w(1, 2, 5), &w(1, 2, 5)));
        assert!(!compatible_same_group(&w(1, 2, 5), &w(1, 2, 15)));
    }

    #[test]
    fn same_group_compatibility_is_symmetric() {
        let weights: Vec<Weight> = (0..5)
            .flat_map(|a| (0..5).map(move |b| w(a, b, 5)))
            .filter(|x| gcd(gcd(x.a(), x.b()), 5) == 1)
            .collect();
        for x in &weights {
            for y in &weights {
                assert_eq!(
                    compatible_same_group(x, y),
                    compatible_same_group(y, x),
                    "asymmetry at {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn subgroup_compatibility_examples() {
        assert!(compatible_subgroup(&w(1, 5, 15), &w(4, 0, 5)));
        for t in 0..5 {
            assert!(!compatible_subgroup(&w(1, 2, 15), &w(t, 0, 5)));
        }
        assert!(!compatible_subgroup(&w(1, 5, 15), &w(0, 0, 5)));
        // Swapped zero entry is accepted.
        assert!(compatible_subgroup(&w(1, 5, 15), &w(0, 4, 5)));
        // Free circle: any primitive parent with a unit parameter.
        assert!(compatible_subgroup(&w(1, 5, 15), &w(0, 0, 1)));
    }

    #[test]
    fn census_on_cp2() {
        assert_eq!(
            fixed_census_block(&w(1, 2, 5), 5, Block::Cp2),
            FixedCensus { isolated_points: 3, sphere_components: 0, whole_space: false }
        );
        assert_eq!(
            fixed_census_block(&w(1, 1, 3), 3, Block::Cp2),
            FixedCensus { isolated_points: 1, sphere_components: 1, whole_space: false }
        );
        assert_eq!(
            fixed_census_block(&w(1, 5, 15), 5, Block::Cp2),
            FixedCensus { isolated_points: 1, sphere_components: 1, whole_space: false }
        );
        assert_eq!(
            fixed_census_block(&w(1, 2, 15), 1, Block::Cp2),
            FixedCensus { isolated_points: 0, sphere_components: 0, whole_space: true }
        );
    }

    #[test]
    fn census_on_s4() {
        assert_eq!(
            fixed_census_block(&w(1, 2, 15), 3, Block::S4),
            FixedCensus { isolated_points: 2, sphere_components: 0, whole_space: false }
        );
        assert_eq!(
            fixed_census_block(&w(1, 5, 15), 5, Block::S4),
            FixedCensus { isolated_points: 0, sphere_components: 1, whole_space: false }
        );
        assert_eq!(
            fixed_census_block(&w(5, 0, 15), 5, Block::S4),
            FixedCensus { isolated_points: 0, sphere_components: 0, whole_space: true }
        );
    }

    #[test]
    fn census_euler_characteristic_is_block_invariant() {
        for a in 0..15 {
            for b in 0..15 {
                for d in [1, 3, 5, 15] {
                    let weight = w(a, b, 15);
                    assert_eq!(fixed_census_block(&weight, d, Block::Cp2).euler(Block::Cp2), 3);
                    assert_eq!(fixed_census_block(&weight, d, Block::S4).euler(Block::S4), 2);
                }
            }
        }
    }

    #[test]
    fn filtration_of_the_two_orbit_tree() {
        let t = tree(
            r#"{"order":15,"type":"I","orbits":[
                {"id":0,"parent":null,"a":1,"b":5,"stab":15},
                {"id":1,"parent":0,"a":4,"b":0,"stab":5}]}"#,
        );
        let steps = filtration_steps(&t);
        assert_eq!(steps.len(), 4);
        assert_eq!(steps[0], FiltrationStep::BaseCell);
        assert_eq!(
            serde_json::to_string(&steps[1]).unwrap(),
            r#"{"kind":"middle","grading":"l^11"}"#
        );
        assert_eq!(
            serde_json::to_string(&steps[2]).unwrap(),
            r#"{"kind":"top","grading":"l^1+l^5"}"#
        );
        assert_eq!(
            serde_json::to_string(&steps[3]).unwrap(),
            r#"{"kind":"orbit","stab":5,"grading":"l^4"}"#
        );
    }

    #[test]
    fn filtration_counts_and_order() {
        // Type II single root: base + top only.
        let t = tree(r#"{"order":15,"type":"II","orbits":[{"id":0,"parent":null,"a":1,"b":2,"stab":15}]}"#);
        let steps = filtration_steps(&t);
        assert_eq!(steps.len(), 2);
        assert!(matches!(steps[1], FiltrationStep::RootTopCell { .. }));

        // Levels ascend, ids ascend within a level, root cells first.
        let t = tree(
            r#"{"order":9,"type":"I","orbits":[
                {"id":0,"parent":null,"a":3,"b":1,"stab":9},
                {"id":1,"parent":0,"a":1,"b":2,"stab":9},
                {"id":2,"parent":1,"a":8,"b":2,"stab":9},
                {"id":3,"parent":0,"a":2,"b":0,"stab":3}]}"#,
        );
        let steps = filtration_steps(&t);
        let ids: Vec<u64> = steps
            .iter()
            .filter_map(|s| match s {
                FiltrationStep::OrbitAttach { orbit, .. } => Some(*orbit),
                _ => None,
            })
            .collect();
        assert_eq!(ids, vec![1, 3, 2]);
        assert!(matches!(steps[1], FiltrationStep::RootMiddleCell { .. }));
        assert_eq!(steps.len(), 1 + 3 + 1 + 1);
    }
}
