//! Chain-level Bredon homology with constant $\underline{\mathbb{Z}}$ coefficients.
//!
//! This module is the independent oracle for the wedge decompositions: it
//! never looks at the homotopy-theoretic route.  Each summand is modelled by
//! an explicit finite $C_m$-CW chain complex; for a divisor $\ell \mid m$ the
//! level-$\ell$ chain group is free on the $C_\ell$-orbit classes of cells,
//! and the covariant (transfer) structure of $\underline{\mathbb{Z}}$ makes the
//! differential entry from a class with cell stabilizer $C_{s_c}$ into an
//! incident class with stabilizer $C_{s_e}$ (necessarily $s_c \mid s_e$)
//! carry the index weight $\gcd(s_e, \ell) / \gcd(s_c, \ell)$ times the
//! signed incidence sum.  Homology is then exact integer linear algebra via
//! Smith normal form.
//!
//! The representation sphere $S^{\lambda^k}$ gets the reduced cell structure
//! with one fixed $0$-cell $x_0$, one free-of-rank-$m/g$ orbit of arcs
//! $a_j$ and one of discs $e_j$, $g = \gcd(k, m)$, with $\partial a_j = x_0$
//! and $\partial e_j = a_{j+1} - a_j$; the group generator shifts the index
//! by $k/g$.  Multi-character spheres are smash products, i.e. tensor
//! products of reduced complexes with Koszul signs, and induced summands
//! replicate a $C_d$-complex $m/d$ times with the generator cycling the
//! copies.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::decomp::{Decomposition, Summand};
use crate::rep_ring::{gcd, VirtualRep};
use crate::snf::{composes_to_zero, quotient_homology, IntMatrix};
use crate::vanish::{pi_cp, MackeyName, VanishError};

/// A finite equivariant CW chain complex over $C_m$ with explicit cells.
///
/// Degree `k` has `stabs[k].len()` cells; `stabs[k][i]` is the order of the
/// stabilizer of cell `i`, `perms[k]` is the permutation action of the group
/// generator, and `boundaries[k][i]` lists the signed incidences of
/// $\partial(\text{cell } i)$ in degree `k - 1`.
#[derive(Clone, Debug)]
pub struct MackeyChainComplex {
    order: u64,
    stabs: Vec<Vec<u64>>,
    perms: Vec<Vec<usize>>,
    boundaries: Vec<Vec<Vec<(usize, i64)>>>,
}

/// One homology group at a fixed level: free rank plus torsion coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelGroup {
    /// Rank of the free part.
    pub free: u64,
    /// Torsion coefficients, each greater than one, sorted ascending.
    pub torsion: Vec<u64>,
}

impl LevelGroup {
    /// The zero group.
    pub fn zero() -> LevelGroup {
        LevelGroup { free: 0, torsion: Vec::new() }
    }

    /// Free abelian group of the given rank.
    pub fn free(rank: u64) -> LevelGroup {
        LevelGroup { free: rank, torsion: Vec::new() }
    }

    /// Is this the zero group?
    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }

    fn add(&mut self, other: &LevelGroup) {
        self.free += other.free;
        self.torsion.extend(other.torsion.iter().copied());
        self.torsion.sort_unstable();
    }
}

/// Oracle errors.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MackeyError {
    /// The requested level does not divide the group order.
    #[error("level {level} does not divide the order {order}")]
    LevelNotADivisor { level: u64, order: u64 },
    /// A homotopy-table value disagrees with the chain-level computation.
    #[error(
        "table mismatch for S^({rep}) in degree {degree} at level {level}: \
         expected {expected:?}, chain level gives {got:?}"
    )]
    TableMismatch { rep: String, degree: usize, level: u64, expected: LevelGroup, got: LevelGroup },
    /// Underlying error from the homotopy-table side.
    #[error(transparent)]
    Vanish(#[from] VanishError),
}

impl MackeyChainComplex {
    /// Order of the acting group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of chain degrees (top degree plus one).
    pub fn degrees(&self) -> usize {
        self.stabs.len()
    }

    /// Number of cells in degree `k` (zero above the top degree).
    pub fn cells(&self, k: usize) -> usize {
        self.stabs.get(k).map_or(0, Vec::len)
    }

    /// Checks $\partial^2 = 0$ and equivariance of every boundary; an
    /// invariant check for tests and debugging, not needed in normal use.
    pub fn validate_complex(&self) {
        for k in 0..self.degrees() {
            for i in 0..self.cells(k) {
                // d(pi c) = pi(d c)
                let mut lhs: BTreeMap<usize, i64> = BTreeMap::new();
                for &(t, c) in &self.boundaries[k][self.perms[k][i]] {
                    *lhs.entry(t).or_insert(0) += c;
                }
                let mut rhs: BTreeMap<usize, i64> = BTreeMap::new();
                for &(t, c) in &self.boundaries[k][i] {
                    *rhs.entry(self.perms[k - 1][t]).or_insert(0) += c;
                }
                lhs.retain(|_, c| *c != 0);
                rhs.retain(|_, c| *c != 0);
                assert_eq!(lhs, rhs, "boundary is not equivariant in degree {k}");
                // d(d c) = 0
                if k >= 2 {
                    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                    for &(t, c) in &self.boundaries[k][i] {
                        for &(u, c2) in &self.boundaries[k - 1][t] {
                            *acc.entry(u).or_insert(0) += c * c2;
                        }
                    }
                    acc.retain(|_, c| *c != 0);
                    assert!(acc.is_empty(), "boundary does not square to zero in degree {k}");
                }
            }
        }
    }
}

/// The reduced point complex $S^0$: a single fixed cell in degree zero.
pub fn point_complex(order: u64) -> MackeyChainComplex {
    MackeyChainComplex {
        order,
        stabs: vec![vec![order]],
        perms: vec![vec![0]],
        boundaries: vec![vec![vec![]]],
    }
}

// Single fixed cell in degree t: the reduced model of a trivial t-sphere.
fn trivial_complex(order: u64, t: usize) -> MackeyChainComplex {
    let mut stabs = vec![Vec::new(); t];
    let mut perms = vec![Vec::new(); t];
    let mut boundaries = vec![Vec::new(); t];
    stabs.push(vec![order]);
    perms.push(vec![0]);
    boundaries.push(vec![vec![]]);
    MackeyChainComplex { order, stabs, perms, boundaries }
}

// Reduced complex of S^{lambda^k}, k not divisible by m.
fn lambda_complex(order: u64, k: u64) -> MackeyChainComplex {
    let k = k % order;
    assert!(k != 0, "exponent 0 is a trivial factor, not a rotation");
    let g = gcd(k, order);
    let n = (order / g) as usize;
    let shift = (k / g) as usize;
    let arcs: Vec<usize> = (0..n).map(|j| (j + shift) % n).collect();
    MackeyChainComplex {
        order,
        stabs: vec![vec![order], vec![g; n], vec![g; n]],
        perms: vec![vec![0], arcs.clone(), arcs],
        boundaries: vec![
            vec![vec![]],
            (0..n).map(|_| vec![(0, 1)]).collect(),
            (0..n).map(|j| vec![((j + 1) % n, 1), (j, -1)]).collect(),
        ],
    }
}

/// Tensor product of two complexes over the same group, with Koszul signs;
/// the chain model of the smash product.
pub fn tensor(a: &MackeyChainComplex, b: &MackeyChainComplex) -> MackeyChainComplex {
    assert_eq!(a.order, b.order, "smash product across different group orders");
    let da = a.degrees();
    let db = b.degrees();
    let degrees = da + db - 1;
    // pos[k] maps (degree in a, cell in a, cell in b) to the product cell's
    // position in degree k.
    let mut pos: Vec<BTreeMap<(usize, usize, usize), usize>> = vec![BTreeMap::new(); degrees];
    let mut stabs = vec![Vec::new(); degrees];
    for kk in 0..degrees {
        for u in 0..da.min(kk + 1) {
            let v = kk - u;
            if v >= db {
                continue;
            }
            for i in 0..a.cells(u) {
                for j in 0..b.cells(v) {
                    pos[kk].insert((u, i, j), stabs[kk].len());
                    stabs[kk].push(gcd(a.stabs[u][i], b.stabs[v][j]));
                }
            }
        }
    }
    let mut perms: Vec<Vec<usize>> = (0..degrees).map(|kk| vec![0; stabs[kk].len()]).collect();
    let mut boundaries: Vec<Vec<Vec<(usize, i64)>>> =
        (0..degrees).map(|kk| vec![Vec::new(); stabs[kk].len()]).collect();
    for kk in 0..degrees {
        for (&(u, i, j), &idx) in &pos[kk] {
            let v = kk - u;
            perms[kk][idx] = pos[kk][&(u, a.perms[u][i], b.perms[v][j])];
            let sign = if u % 2 == 0 { 1 } else { -1 };
            for &(t, c) in &a.boundaries[u][i] {
                boundaries[kk][idx].push((pos[kk - 1][&(u - 1, t, j)], c));
            }
            for &(t, c) in &b.boundaries[v][j] {
                boundaries[kk][idx].push((pos[kk - 1][&(u, i, t)], sign * c));
            }
        }
    }
    MackeyChainComplex { order: a.order, stabs, perms, boundaries }
}

/// The reduced chain model of the representation sphere $S^V$ for an actual
/// representation `rep`: the tensor product of one trivial suspension and one
/// rotation complex per $\lambda$-factor.
pub fn sphere_complex(rep: &VirtualRep) -> MackeyChainComplex {
    assert!(rep.is_actual(), "representation sphere of a virtual representation");
    let m = rep.order();
    let mut c = trivial_complex(m, rep.trivial_mult() as usize);
    for (k, mult) in rep.chars() {
        for _ in 0..mult {
            c = tensor(&c, &lambda_complex(m, k));
        }
    }
    c
}

/// Induces a $C_d$-complex up to $C_m$: every cell is replicated $m/d$
/// times, the generator cycles the copies and applies the $C_d$-generator on
/// wrap-around, and boundaries act within each copy.
pub fn induce_complex(c: &MackeyChainComplex, order: u64) -> MackeyChainComplex {
    let d = c.order;
    assert!(order % d == 0, "induction requires a subgroup inclusion");
    let copies = (order / d) as usize;
    let mut stabs = Vec::with_capacity(c.degrees());
    let mut perms = Vec::with_capacity(c.degrees());
    let mut boundaries = Vec::with_capacity(c.degrees());
    for k in 0..c.degrees() {
        let n = c.cells(k);
        let mut st = Vec::with_capacity(copies * n);
        let mut pe = vec![0; copies * n];
        let mut bd = Vec::with_capacity(copies * n);
        for r in 0..copies {
            for i in 0..n {
                st.push(c.stabs[k][i]);
                let target = if r + 1 < copies { (r + 1, i) } else { (0, c.perms[k][i]) };
                pe[r * n + i] = target.0 * n + target.1;
                bd.push(
                    c.boundaries[k][i].iter().map(|&(t, co)| (r * c.cells(k - 1) + t, co)).collect(),
                );
            }
        }
        stabs.push(st);
        perms.push(pe);
        boundaries.push(bd);
    }
    MackeyChainComplex { order, stabs, perms, boundaries }
}

// Orbit classes of the cells of degree k under C_level; returns the class
// index of every cell and a representative cell per class.
fn level_classes(perm: &[usize], step: usize) -> (Vec<usize>, Vec<usize>) {
    // Permutation action of the subgroup generator = step-fold composite.
    let n = perm.len();
    let mut sub = (0..n).collect::<Vec<usize>>();
    for _ in 0..step {
        sub = sub.iter().map(|&i| perm[i]).collect();
    }
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(i);
        let mut j = i;
        loop {
            class_of[j] = c;
            j = sub[j];
            if j == i {
                break;
            }
        }
    }
    (class_of, reps)
}

/// Homology of `c` at level $\ell \mid m$, one [`LevelGroup`] per degree from
/// zero up to the top degree of the complex.
pub fn level_homology(c: &MackeyChainComplex, level: u64) -> Result<Vec<LevelGroup>, MackeyError> {
    let m = c.order;
    if level == 0 || m % level != 0 {
        return Err(MackeyError::LevelNotADivisor { level, order: m });
    }
    let step = (m / level) as usize;
    let classes: Vec<(Vec<usize>, Vec<usize>)> =
        (0..c.degrees()).map(|k| level_classes(&c.perms[k], step)).collect();
    // Boundary matrix per degree k >= 1 on the class bases.
    let mut mats: Vec<IntMatrix> = Vec::with_capacity(c.degrees() + 1);
    mats.push(IntMatrix::zero(0, classes[0].1.len()));
    for k in 1..c.degrees() {
        let (ref class_below, ref reps_below) = classes[k - 1];
        let (_, ref reps) = classes[k];
        let mut mat = IntMatrix::zero(reps_below.len(), reps.len());
        for (col, &rep) in reps.iter().enumerate() {
            let s_c = gcd(c.stabs[k][rep], level);
            for &(t, coef) in &c.boundaries[k][rep] {
                let s_e = gcd(c.stabs[k - 1][t], level);
                assert!(s_e % s_c == 0, "boundary raises the stabilizer");
                mat.add_to(class_below[t], col, coef * (s_e / s_c) as i64);
            }
        }
        mats.push(mat);
    }
    mats.push(IntMatrix::zero(classes[c.degrees() - 1].1.len(), 0));
    let mut out = Vec::with_capacity(c.degrees());
    for k in 0..c.degrees() {
        let (free, torsion) = quotient_homology(&mats[k], &mats[k + 1]);
        let torsion = torsion
            .into_iter()
            .map(|d| u64::try_from(&d).expect("desk-scale torsion coefficient"))
            .collect();
        out.push(LevelGroup { free: free as u64, torsion });
    }
    Ok(out)
}

/// Number of level-$\ell$ chain classes per degree; the rank of each level
/// chain group.
pub fn level_ranks(c: &MackeyChainComplex, level: u64) -> Result<Vec<usize>, MackeyError> {
    let m = c.order;
    if level == 0 || m % level != 0 {
        return Err(MackeyError::LevelNotADivisor { level, order: m });
    }
    let step = (m / level) as usize;
    Ok((0..c.degrees()).map(|k| level_classes(&c.perms[k], step).1.len()).collect())
}

/// Checks that consecutive level boundary matrices compose to zero at the
/// given level; used by the invariant suites.
pub fn level_boundaries_compose_to_zero(
    c: &MackeyChainComplex,
    level: u64,
) -> Result<bool, MackeyError> {
    let m = c.order;
    if level == 0 || m % level != 0 {
        return Err(MackeyError::LevelNotADivisor { level, order: m });
    }
    let step = (m / level) as usize;
    let classes: Vec<(Vec<usize>, Vec<usize>)> =
        (0..c.degrees()).map(|k| level_classes(&c.perms[k], step)).collect();
    let mut prev: Option<IntMatrix> = None;
    for k in 1..c.degrees() {
        let (ref class_below, ref reps_below) = classes[k - 1];
        let (_, ref reps) = classes[k];
        let mut mat = IntMatrix::zero(reps_below.len(), reps.len());
        for (col, &rep) in reps.iter().enumerate() {
            let s_c = gcd(c.stabs[k][rep], level);
            for &(t, coef) in &c.boundaries[k][rep] {
                let s_e = gcd(c.stabs[k - 1][t], level);
                mat.add_to(class_below[t], col, coef * (s_e / s_c) as i64);
            }
        }
        if let Some(p) = prev.take() {
            if !composes_to_zero(&p, &mat) {
                return Ok(false);
            }
        }
        prev = Some(mat);
    }
    Ok(true)
}

// Chain model of one decomposition summand.
fn summand_complex(order: u64, s: &Summand) -> MackeyChainComplex {
    match s {
        Summand::Unit => point_complex(order),
        Summand::Sphere(v) => sphere_complex(v),
        Summand::Induced(d, v) => {
            debug_assert_eq!(v.order(), *d);
            induce_complex(&sphere_complex(v), order)
        }
    }
}

/// Level-$\ell$ homology of a whole decomposition: the direct sum over the
/// summand complexes, padded to degrees $0$ through $4$.
pub fn decomposition_homology(
    dec: &Decomposition,
    level: u64,
) -> Result<Vec<LevelGroup>, MackeyError> {
    let m = dec.order();
    if level == 0 || m % level != 0 {
        return Err(MackeyError::LevelNotADivisor { level, order: m });
    }
    let mut total = vec![LevelGroup::zero(); 5];
    for s in dec.summands() {
        let h = level_homology(&summand_complex(m, s), level)?;
        if h.len() > total.len() {
            total.resize(h.len(), LevelGroup::zero());
        }
        for (k, g) in h.iter().enumerate() {
            total[k].add(g);
        }
    }
    Ok(total)
}

// Expected level value of the named homotopy Mackey functor.  The constant
// and dual functors are both free of rank one at every level; the level data
// cannot tell them apart.
fn expected_level_group(name: &MackeyName, level: u64, p: u64) -> LevelGroup {
    match name {
        MackeyName::ConstantZ | MackeyName::DualZStar => LevelGroup::free(1),
        MackeyName::BracketZModP(q) => {
            if level == p {
                LevelGroup { free: 0, torsion: vec![*q] }
            } else {
                LevelGroup::zero()
            }
        }
        MackeyName::Zero => LevelGroup::zero(),
    }
}

/// Verifies the homotopy table for $C_p$ against the chain oracle: for every
/// actual $V \in \{\lambda^k\} \cup \{\lambda^j + \lambda^k\}$ with
/// $1 \le j, k \le p - 1$ and every degree $0 \le n \le 4$, the table value of
/// $\pi_0$ at $\alpha = n - V$ must equal $H_n(S^V)$ at both levels $1$ and
/// $p$.  Returns the number of comparisons made.
pub fn verify_table(p: u64) -> Result<usize, MackeyError> {
    let mut reps: Vec<VirtualRep> = Vec::new();
    for k in 1..p {
        reps.push(VirtualRep::lambda(p, k as i64));
        for j in 1..p {
            let mut v = VirtualRep::lambda(p, j as i64);
            v.add_lambda(k as i64, 1);
            reps.push(v);
        }
    }
    let mut checked = 0;
    for v in &reps {
        let h = [level_homology(&sphere_complex(v), 1)?, level_homology(&sphere_complex(v), p)?];
        for n in 0..=4usize {
            let mut alpha = VirtualRep::trivial(p, n as i64);
            alpha = &alpha - v;
            let name = pi_cp(&alpha)?;
            for (idx, level) in [1u64, p].into_iter().enumerate() {
                let expected = expected_level_group(&name, level, p);
                let got = h[idx].get(n).cloned().unwrap_or_else(LevelGroup::zero);
                if expected != got {
                    return Err(MackeyError::TableMismatch {
                        rep: v.to_string(),
                        degree: n,
                        level,
                        expected,
                        got,
                    });
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}
