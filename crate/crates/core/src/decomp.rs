//! Wedge decompositions of $H\underline{\mathbb{Z}} \wedge X(T)_+$.
//!
//! After smashing with the Eilenberg--MacLane spectrum of the constant Mackey
//! functor $\underline{\mathbb{Z}}$, every tree manifold covered by one of the
//! decomposition statements splits into a wedge of three kinds of pieces: the
//! unit $H\underline{\mathbb{Z}}$ split off by the base point, suspensions
//! $H\underline{\mathbb{Z}} \wedge S^V$ by actual representations $V$ of $C_m$, and induced
//! pieces $H\underline{\mathbb{Z}} \wedge C_m/C_{d\,+} \wedge S^{\lambda^k}$ contributed by
//! orbits with proper stabilizer $C_d$.  Which shape applies is decided by
//! arithmetic of the root weight $(a_0, b_0)$ and of the differences
//! $a_v - b_v$ at fixed vertices.
//!
//! The dispatcher tries the statements from most to least specific.  For
//! prime-power order $p^n$ the summand multiplicities are governed by the
//! counting functions $\varphi, \psi, \tau, Z(i), W(i)$, keyed on the $p$-adic
//! valuation of $a_v - b_v$ over fixed vertices $v$ (a difference of $0$
//! counts as divisible by $p^n$).  For composite order with at least two prime
//! factors a fixed vertex whose difference shares a factor with $m$ defeats
//! every hypothesis; that outcome is reported as an error value rather than
//! guessed around.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rep_ring::{gcd, VirtualRep};
use crate::tree::{normalize_root, AdmissibleTree, OrbitNode, TreeType, Weight};

/// One wedge summand of $H\underline{\mathbb{Z}} \wedge X(T)_+$.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand {
    /// The unit copy of $H\underline{\mathbb{Z}}$ split off by the base point.
    Unit,
    /// $H\underline{\mathbb{Z}} \wedge S^V$ for an actual representation $V$ of $C_m$.
    Sphere(VirtualRep),
    /// $H\underline{\mathbb{Z}} \wedge C_m/C_{d\,+} \wedge S^V$ for $V$ a representation of the
    /// stabilizer $C_d$; `Induced(1, ..)` is a free orbit of plain $2$-spheres.
    Induced(u64, VirtualRep),
}

impl Summand {
    // Sort class: unit, the four-dimensional sphere, two-dimensional
    // spheres, induced summands.
    fn class(&self) -> u8 {
        match self {
            Summand::Unit => 0,
            Summand::Sphere(v) if v.dim() == 4 => 1,
            Summand::Sphere(_) => 2,
            Summand::Induced(..) => 3,
        }
    }

    fn sort_key(&self) -> (u8, String) {
        (self.class(), self.to_string())
    }

    /// The same summand with every representation replaced by its
    /// $H\underline{\mathbb{Z}}$-canonical form $\lambda^k \mapsto \lambda^{\gcd(k, m)}$.
    pub fn hz_canonical(&self) -> Summand {
        match self {
            Summand::Unit => Summand::Unit,
            Summand::Sphere(v) => Summand::Sphere(v.hz_canonical()),
            Summand::Induced(d, v) => Summand::Induced(*d, v.hz_canonical()),
        }
    }

    // Contribution to the Betti numbers (b0, b2, b4) of the underlying space,
    // given the ambient order m.
    fn betti(&self, m: u64) -> (u64, u64, u64) {
        match self {
            Summand::Unit => (1, 0, 0),
            Summand::Sphere(v) => match v.dim() {
                2 => (0, 1, 0),
                4 => (0, 0, 1),
                d => panic!("sphere summand of unexpected dimension {d}"),
            },
            Summand::Induced(d, v) => {
                assert_eq!(v.dim(), 2, "induced summand of unexpected dimension");
                (0, m / d, 0)
            }
        }
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Unit => write!(f, "1"),
            Summand::Sphere(v) => write!(f, "S({v})"),
            Summand::Induced(d, v) => write!(f, "Ind({d};{v})"),
        }
    }
}

/// A complete wedge decomposition, together with the label of the statement
/// that produced it and a plain-text record of the hypotheses used.
///
/// Serializes as `{"theorem": "...", "summands": ["1", "S(l^1+2)", ...]}` with
/// the summands in their canonical sort order.
#[derive(Clone, Debug)]
pub struct Decomposition {
    order: u64,
    theorem: &'static str,
    trace: String,
    summands: Vec<Summand>,
}

impl Decomposition {
    fn new(
        order: u64,
        theorem: &'static str,
        trace: String,
        mut summands: Vec<Summand>,
    ) -> Decomposition {
        summands.sort_by_key(|s| s.sort_key());
        Decomposition { order, theorem, trace, summands }
    }

    /// Order of the acting group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Label of the statement that produced this decomposition; one of
    /// `4.3-I`, `4.3-II`, `4.5`, `5.2`, `5.3-eq`, `5.4`.
    pub fn theorem(&self) -> &str {
        self.theorem
    }

    /// Plain-text record of the dispatch hypotheses that were verified.
    pub fn hypothesis_trace(&self) -> &str {
        &self.trace
    }

    /// The summands, sorted: unit, top sphere, two-dimensional spheres,
    /// induced pieces.
    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// The summands rendered as display strings, in sorted order.
    pub fn summand_strings(&self) -> Vec<String> {
        self.summands.iter().map(Summand::to_string).collect()
    }

    fn canonical_sorted(&self) -> Vec<Summand> {
        let mut v: Vec<Summand> = self.summands.iter().map(Summand::hz_canonical).collect();
        v.sort_by_key(|s| s.sort_key());
        v
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Decomposition", 2)?;
        st.serialize_field("theorem", self.theorem)?;
        st.serialize_field("summands", &self.summand_strings())?;
        st.end()
    }
}

/// Multiset equality of $H\underline{\mathbb{Z}}$-canonical summands, ignoring the
/// statement labels.
///
/// Two wedges agree here exactly when each summand class appears with the same
/// multiplicity after rewriting every exponent $k$ to $\gcd(k, m)$, i.e. when
/// they present the same $H\underline{\mathbb{Z}}$-module.
pub fn canonical_eq(d1: &Decomposition, d2: &Decomposition) -> bool {
    d1.order == d2.order && d1.canonical_sorted() == d2.canonical_sorted()
}

/// Counting functions over the fixed vertices $v \in T_0$ for prime-power
/// order, keyed on the valuation $\nu_p(a_v - b_v)$.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counters {
    /// Fixed vertices whose weight difference is coprime to $p$.
    pub phi: u64,
    /// Fixed vertices whose weight difference is divisible by $p$.
    pub psi: u64,
    /// Largest $i$ with $p^i \mid a_v - b_v$ for some fixed $v$.
    pub tau: u32,
    /// `z[i]` counts fixed vertices with $\gcd(a_v - b_v, p^n) = p^i$; zero
    /// counts are omitted.
    pub z: BTreeMap<u32, u64>,
    /// `w[0] = z[0] + 1`, `w[tau] = z[tau] - 1`, otherwise `w[i] = z[i]`.
    pub w: BTreeMap<u32, u64>,
}

/// Decomposition failures.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    /// The group order is not a power of the requested prime.
    #[error("order {order} is not a power of {p}")]
    NotAPrimePower { order: u64, p: u64 },
    /// No decomposition statement covers the tree: the order has at least two
    /// distinct prime factors, neither root entry vanishes, and the listed
    /// fixed orbits carry weight differences sharing a factor with the order.
    #[error(
        "no decomposition theorem applies: order {order} has at least two distinct \
         prime factors and fixed orbits {offending:?} have weight differences not \
         coprime to it"
    )]
    NoTheoremApplies { order: u64, offending: Vec<u64> },
}

// Exponent n with m = p^n, if one exists.
fn prime_power_exponent(m: u64, p: u64) -> Option<u32> {
    if p < 2 {
        return None;
    }
    let mut rest = m;
    let mut n = 0u32;
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    (rest == 1 && n >= 1).then_some(n)
}

// (p, n) with m = p^n for a prime p, if m is a prime power.
pub(crate) fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            return prime_power_exponent(m, p).map(|n| (p, n));
        }
        p += 1;
    }
    Some((m, 1))
}

// nu_p of a residue mod p^n, read off gcd(r, p^n) = p^nu; nu(0) = n.
pub(crate) fn valuation(residue: u64, m: u64, p: u64) -> u32 {
    let mut g = gcd(residue, m);
    let mut i = 0u32;
    while g % p == 0 {
        g /= p;
        i += 1;
    }
    i
}

/// Counting functions over the fixed vertices of `t` for order $p^n$.
pub fn counters(t: &AdmissibleTree, p: u64) -> Result<Counters, DecompError> {
    let m = t.order();
    prime_power_exponent(m, p).ok_or(DecompError::NotAPrimePower { order: m, p })?;
    let mut phi = 0u64;
    let mut psi = 0u64;
    let mut tau = 0u32;
    let mut z: BTreeMap<u32, u64> = BTreeMap::new();
    for o in t.orbits() {
        if o.stab != m {
            continue;
        }
        let i = valuation(o.weight.diff(), m, p);
        if i == 0 {
            phi += 1;
        } else {
            psi += 1;
        }
        *z.entry(i).or_insert(0) += 1;
        tau = tau.max(i);
    }
    // The root is always fixed, so z has an entry at tau and w never
    // underflows.
    let mut w = z.clone();
    *w.entry(0).or_insert(0) += 1;
    *w.entry(tau).or_insert(0) -= 1;
    Ok(Counters { phi, psi, tau, z, w })
}

// lambda^a + lambda^b over C_m for the root weight; exponent 0 folds to two
// trivial summands.
fn top_sphere(m: u64, w: &Weight) -> Summand {
    let mut v = VirtualRep::lambda(m, w.a() as i64);
    v.add_lambda(w.b() as i64, 1);
    Summand::Sphere(v)
}

// lambda + 2 over C_m.
fn lambda_plus_two(m: u64) -> Summand {
    let mut v = VirtualRep::lambda(m, 1);
    v.add_trivial(2);
    Summand::Sphere(v)
}

// Induced summand of an orbit with proper stabilizer d: the canonical
// lambda^gcd(a-b, d) over C_d, or a trivial 2-sphere rep for a free orbit.
fn induced_summand(o: &OrbitNode) -> Summand {
    let d = o.stab;
    if d == 1 {
        Summand::Induced(1, VirtualRep::trivial(1, 2))
    } else {
        let g = gcd(o.weight.diff(), d);
        Summand::Induced(d, VirtualRep::lambda(d, g as i64))
    }
}

// Fixed orbits whose weight difference shares a factor with m, in id order.
fn offending_fixed(t: &AdmissibleTree) -> Vec<u64> {
    let m = t.order();
    t.orbits()
        .iter()
        .filter(|o| o.stab == m && gcd(o.weight.diff(), m) > 1)
        .map(|o| o.id)
        .collect()
}

// Type II: unit, top sphere, and one induced piece per (necessarily
// non-fixed) non-root orbit.
fn arm_type_ii(t: &AdmissibleTree) -> Decomposition {
    let m = t.order();
    let w = &t.root().weight;
    let mut summands = vec![Summand::Unit, top_sphere(m, w)];
    for o in t.orbits().iter().filter(|o| o.parent.is_some()) {
        debug_assert!(o.stab < m, "type II trees have no non-root fixed orbits");
        summands.push(induced_summand(o));
    }
    let trace = format!("type II; root weight ({},{}) mod {}", w.a(), w.b(), m);
    Decomposition::new(m, "4.3-II", trace, summands)
}

// Type I with a root entry congruent to zero: unit, lambda + 2, and one
// sphere or induced summand with exponent a - b per orbit including the root.
fn arm_one_zero(t: &AdmissibleTree) -> Decomposition {
    let m = t.order();
    let mut summands = vec![Summand::Unit, lambda_plus_two(m)];
    for o in t.orbits() {
        if o.stab == m {
            let g = gcd(o.weight.diff(), m);
            summands.push(Summand::Sphere(VirtualRep::lambda(m, g as i64)));
        } else {
            summands.push(induced_summand(o));
        }
    }
    let w = &t.root().weight;
    let trace = format!("type I; root weight ({},{}) has a zero entry mod {}", w.a(), w.b(), m);
    Decomposition::new(m, "4.5", trace, summands)
}

// Type I with every fixed difference coprime to m: unit, top sphere, one
// lambda-sphere per fixed vertex, one induced piece per non-fixed orbit.
fn arm_generic_type_i(t: &AdmissibleTree) -> Decomposition {
    let m = t.order();
    let w = &t.root().weight;
    let mut summands = vec![Summand::Unit, top_sphere(m, w)];
    for o in t.orbits() {
        if o.stab == m {
            summands.push(Summand::Sphere(VirtualRep::lambda(m, 1)));
        } else {
            summands.push(induced_summand(o));
        }
    }
    let trace = format!(
        "type I; root weight ({},{}) mod {}; all fixed differences coprime to {}",
        w.a(),
        w.b(),
        m,
        m
    );
    Decomposition::new(m, "4.3-I", trace, summands)
}

// Order p with some fixed difference divisible by p: multiplicities phi + 1
// and psi - 1, plus a free 2-sphere orbit per free tree orbit.
fn arm_prime_order(t: &AdmissibleTree, p: u64) -> Decomposition {
    let m = t.order();
    let tn = normalize_root(t, p);
    let c = counters(&tn, p).expect("order is p");
    debug_assert!(c.psi >= 1, "dispatch requires a divisible fixed difference");
    let mut summands = vec![Summand::Unit, lambda_plus_two(m)];
    for _ in 0..c.phi + 1 {
        summands.push(Summand::Sphere(VirtualRep::lambda(m, 1)));
    }
    for _ in 0..c.psi - 1 {
        summands.push(Summand::Sphere(VirtualRep::trivial(m, 2)));
    }
    for o in tn.orbits().iter().filter(|o| o.stab == 1) {
        summands.push(induced_summand(o));
    }
    let trace = format!("order {p}; phi = {}, psi = {} after root normalization", c.phi, c.psi);
    Decomposition::new(m, "5.2", trace, summands)
}

// Order p^n with p^tau dividing a root entry: top sphere with the literal
// root exponents and Z(i) spheres lambda^{p^i}.
fn arm_valuation_split(t: &AdmissibleTree, p: u64, c: &Counters) -> Decomposition {
    let m = t.order();
    let w = &t.root().weight;
    let mut summands = vec![Summand::Unit, top_sphere(m, w)];
    for (&i, &count) in &c.z {
        for _ in 0..count {
            summands.push(Summand::Sphere(VirtualRep::lambda(m, p.pow(i) as i64)));
        }
    }
    for o in t.orbits().iter().filter(|o| o.stab < m) {
        summands.push(induced_summand(o));
    }
    let trace = format!(
        "order {}^{}; tau = {} and {}^tau divides a root entry",
        p,
        prime_power_exponent(m, p).expect("order is a power of p"),
        c.tau,
        p
    );
    Decomposition::new(m, "5.3-eq", trace, summands)
}

// Order p^n, root entries coprime to p after normalization: top sphere
// lambda + lambda^{p^tau} and W(i) spheres lambda^{p^i}.
fn arm_prime_power(t: &AdmissibleTree, p: u64) -> Decomposition {
    let m = t.order();
    let tn = normalize_root(t, p);
    let c = counters(&tn, p).expect("order is a power of p");
    assert!(c.tau > 0, "root normalization cannot remove every divisible fixed difference");
    let mut top = VirtualRep::lambda(m, 1);
    top.add_lambda(p.pow(c.tau) as i64, 1);
    let mut summands = vec![Summand::Unit, Summand::Sphere(top)];
    for (&i, &count) in &c.w {
        for _ in 0..count {
            summands.push(Summand::Sphere(VirtualRep::lambda(m, p.pow(i) as i64)));
        }
    }
    for o in tn.orbits().iter().filter(|o| o.stab < m) {
        summands.push(induced_summand(o));
    }
    let trace = format!(
        "order {}^{}; tau = {} after root normalization",
        p,
        prime_power_exponent(m, p).expect("order is a power of p"),
        c.tau
    );
    Decomposition::new(m, "5.4", trace, summands)
}

/// Dispatches the applicable decomposition statement for `t`, most specific
/// first.  Where the hypotheses of several statements hold at once the
/// results are asserted canonically equal rather than chosen between
/// silently.
pub fn decompose(t: &AdmissibleTree) -> Result<Decomposition, DecompError> {
    let m = t.order();
    let root = t.root();
    let (a0, b0) = (root.weight.a(), root.weight.b());
    let dec = match t.tree_type() {
        TreeType::II => arm_type_ii(t),
        TreeType::I if a0 == 0 || b0 == 0 => {
            let dec = arm_one_zero(t);
            if offending_fixed(t).is_empty() {
                assert!(
                    canonical_eq(&dec, &arm_generic_type_i(t)),
                    "overlapping statements disagree on a zero-entry tree of order {m}"
                );
            } else if let Some((p, _)) = prime_power(m) {
                let c = counters(t, p).expect("order is a power of p");
                let pt = p.pow(c.tau);
                if c.tau > 0 && (a0 % pt == 0 || b0 % pt == 0) {
                    assert!(
                        canonical_eq(&dec, &arm_valuation_split(t, p, &c)),
                        "overlapping statements disagree on a zero-entry tree of order {m}"
                    );
                }
            }
            dec
        }
        TreeType::I => {
            let offending = offending_fixed(t);
            if offending.is_empty() {
                arm_generic_type_i(t)
            } else if let Some((p, n)) = prime_power(m) {
                if n == 1 {
                    arm_prime_order(t, p)
                } else {
                    let c = counters(t, p).expect("order is a power of p");
                    debug_assert!(c.tau > 0, "a non-coprime difference forces tau > 0");
                    let pt = p.pow(c.tau);
                    if a0 % pt == 0 || b0 % pt == 0 {
                        arm_valuation_split(t, p, &c)
                    } else {
                        arm_prime_power(t, p)
                    }
                }
            } else {
                return Err(DecompError::NoTheoremApplies { order: m, offending });
            }
        }
    };
    underlying_betti(&dec, t);
    Ok(dec)
}

/// Betti numbers $(b_0, b_2, b_4)$ of the underlying manifold read off the
/// summands: every two-dimensional sphere contributes one to $b_2$ and an
/// induced piece over $C_d$ contributes $m/d$.  Asserts the rank bookkeeping
/// $(1, n(T), 1)$; a failure is an internal invariant violation.
pub fn underlying_betti(dec: &Decomposition, t: &AdmissibleTree) -> (u64, u64, u64) {
    assert_eq!(dec.order, t.order(), "decomposition and tree have different orders");
    let (mut b0, mut b2, mut b4) = (0, 0, 0);
    for s in &dec.summands {
        let (x, y, z) = s.betti(dec.order);
        b0 += x;
        b2 += y;
        b4 += z;
    }
    assert_eq!(
        (b0, b2, b4),
        (1, t.n_t(), 1),
        "rank bookkeeping violated by a {} decomposition",
        dec.theorem
    );
    (b0, b2, b4)
}
