//! Admissible weighted trees for $C_m$, $m$ odd, in orbit-level form.
//!
//! A weighted tree encodes a plumbing-style construction of a closed
//! $C_m$-manifold: each vertex carries a copy of $\mathbb{CP}^2$ (or $S^4$ at
//! the root of a type II tree) with a linear action recorded by a weight
//! $(a, b; m_v)$, where $C_{m_v}$ is the stabiliser and $a, b$ are rotation
//! numbers mod $m_v$; edges record equivariant connected sums along invariant
//! discs. Since weights are constant on $C_m$-orbits of vertices, a tree is
//! stored one node per orbit: an orbit with stabiliser $C_s$ under a parent
//! orbit with stabiliser $C_{s'}$ stands for $m/s$ vertices, $s'/s$ of them
//! under each parent vertex.
//!
//! Admissibility is a local condition at each edge: which weights may appear
//! on children of a vertex of weight $(a, b; m_v)$ is dictated by the fixed
//! circles and fixed points of the corresponding linear sphere. The clause
//! numbering used in [`Violation`] follows the definition of an admissible
//! weighted tree; weights are always compared in canonical form (up to
//! swapping the two rotation numbers and a global sign).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rep_ring::gcd;

/// Tree type: the root vertex manifold is $\mathbb{CP}^2$ (I) or $S^4$ (II).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeType {
    /// Root carries $\mathbb{CP}^2$ with three fixed points.
    I,
    /// Root carries $S^4$ with two fixed points.
    II,
}

impl fmt::Display for TreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeType::I => write!(f, "I"),
            TreeType::II => write!(f, "II"),
        }
    }
}

/// A vertex weight $(a, b; m_v)$: rotation numbers stored reduced mod $m_v$.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Weight {
    a: u64,
    b: u64,
    modulus: u64,
}

impl Weight {
    /// Builds a weight, reducing both entries mod `modulus` (which must be
    /// positive).
    pub fn new(a: i64, b: i64, modulus: u64) -> Weight {
        assert!(modulus >= 1, "weight modulus must be positive");
        let m = modulus as i64;
        Weight { a: a.rem_euclid(m) as u64, b: b.rem_euclid(m) as u64, modulus }
    }

    /// First rotation number, in $[0, m_v)$.
    pub fn a(&self) -> u64 {
        self.a
    }

    /// Second rotation number, in $[0, m_v)$.
    pub fn b(&self) -> u64 {
        self.b
    }

    /// The modulus $m_v$ (order of the stabiliser).
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// $(a - b) \bmod m_v$.
    pub fn diff(&self) -> u64 {
        (self.a + self.modulus - self.b) % self.modulus
    }

    /// Canonical form: the lexicographically least of $(a,b)$, $(b,a)$,
    /// $(-a,-b)$, $(-b,-a)$ mod $m_v$.
    pub fn canonical(&self) -> (u64, u64) {
        let m = self.modulus;
        let neg = |x: u64| (m - x) % m;
        [
            (self.a, self.b),
            (self.b, self.a),
            (neg(self.a), neg(self.b)),
            (neg(self.b), neg(self.a)),
        ]
        .into_iter()
        .min()
        .unwrap()
    }

    /// Whether two weights agree up to swap and global sign (and modulus).
    pub fn canonical_eq(&self, other: &Weight) -> bool {
        self.modulus == other.modulus && self.canonical() == other.canonical()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{})", self.a, self.b, self.modulus)
    }
}

/// One orbit of vertices in an admissible weighted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitNode {
    /// Stable identifier from the input file.
    pub id: u64,
    /// Parent orbit id, `None` for the root.
    pub parent: Option<u64>,
    /// The weight $(a, b; m_v)$.
    pub weight: Weight,
    /// Order of the stabiliser $C_{m_v}$ (equals the weight modulus).
    pub stab: u64,
    /// Distance from the root orbit.
    pub level: u32,
}

/// Serialised orbit record as it appears in tree JSON files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawOrbit {
    /// Orbit id, unique within the file.
    pub id: u64,
    /// Parent orbit id, `null` for the root.
    pub parent: Option<u64>,
    /// First rotation number (any integer; reduced mod `stab`).
    pub a: i64,
    /// Second rotation number.
    pub b: i64,
    /// Order of the stabiliser.
    pub stab: u64,
}

/// Serialised tree as it appears in JSON files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawTree {
    /// Group order $m$ (odd).
    pub order: u64,
    /// `"I"` or `"II"`.
    #[serde(rename = "type")]
    pub tree_type: String,
    /// Orbit records.
    pub orbits: Vec<RawOrbit>,
}

/// Structural errors detected before any admissibility checking.
#[derive(Debug, Error)]
pub enum ParseError {
    /// The input is not valid JSON of the expected shape.
    #[error("invalid tree JSON: {0}")]
    Json(String),
    /// Two orbit records share an id.
    #[error("duplicate orbit id {0}")]
    DuplicateId(u64),
    /// A parent reference points nowhere.
    #[error("orbit {orbit} references unknown parent {parent}")]
    UnknownParent {
        /// The referencing orbit.
        orbit: u64,
        /// The missing id.
        parent: u64,
    },
    /// No root, several roots, or a parent cycle.
    #[error("not a tree")]
    NotATree,
    /// Unrecognised tree type string.
    #[error("type must be \"I\" or \"II\", got {0:?}")]
    BadType(String),
    /// Group order of even parity is outside the domain of the theory.
    #[error("group order must be odd, got {0}")]
    EvenOrder(u64),
}

/// A single admissibility violation: the clause that failed and the orbits
/// involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    /// Clause tag: `"1"`, `"3"`, `"5"`, `"6"`, `"7a"` or `"7b"`.
    pub clause: String,
    /// Ids of the offending orbits, ascending.
    pub orbits: Vec<u64>,
}

/// Errors from [`reorient`].
#[derive(Debug, Error)]
pub enum ReorientError {
    /// The target id does not name an orbit.
    #[error("orbit {0} not found")]
    UnknownTarget(u64),
    /// The target must be fixed by the whole group.
    #[error("target orbit {id} has stabilizer {stab}, expected the full group {order}")]
    NotFixed {
        /// Target orbit id.
        id: u64,
        /// Its stabiliser order.
        stab: u64,
        /// The group order.
        order: u64,
    },
    /// Only type I trees can be reoriented.
    #[error("reorientation requires a type I tree")]
    TypeII,
    /// No sign assignment along the path yields an admissible tree.
    #[error("no sign assignment yields an admissible reorientation")]
    NoValidOrientation,
}

/// Stratification of the vertex set by stabiliser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strata {
    /// Orbits fixed by the whole group, ascending by id.
    pub t0: Vec<u64>,
    /// For each proper divisor $d$ of $m$, the orbits with stabiliser $C_d$.
    pub td: BTreeMap<u64, Vec<u64>>,
    /// $n(T) = \sum_v m/m_v - [\text{type II}]$, the middle Betti number of
    /// the underlying manifold.
    pub n_t: u64,
    /// Tree type.
    pub tree_type: TreeType,
}

/// A validated admissible weighted tree.
///
/// Can only be obtained from [`validate`], [`generate_random`], [`reorient`]
/// or [`normalize_root`], so holders may rely on all admissibility clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleTree {
    order: u64,
    tree_type: TreeType,
    orbits: Vec<OrbitNode>,
    index: HashMap<u64, usize>,
    children: HashMap<u64, Vec<u64>>,
}

impl AdmissibleTree {
    /// Group order $m$.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Tree type.
    pub fn tree_type(&self) -> TreeType {
        self.tree_type
    }

    /// All orbits, ascending by id.
    pub fn orbits(&self) -> &[OrbitNode] {
        &self.orbits
    }

    /// The orbit with the given id. Panics if absent.
    pub fn orbit(&self, id: u64) -> &OrbitNode {
        &self.orbits[self.index[&id]]
    }

    /// Whether an orbit with this id exists.
    pub fn has_orbit(&self, id: u64) -> bool {
        self.index.contains_key(&id)
    }

    /// The root orbit.
    pub fn root(&self) -> &OrbitNode {
        self.orbits.iter().find(|o| o.parent.is_none()).expect("validated tree has a root")
    }

    /// Child orbit ids of `id`, ascending.
    pub fn children(&self, id: u64) -> &[u64] {
        self.children.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether the orbit is fixed by the whole group.
    pub fn is_fixed(&self, id: u64) -> bool {
        self.orbit(id).stab == self.order
    }

    /// Number of vertices in the orbit, $m / m_v$.
    pub fn multiplicity(&self, id: u64) -> u64 {
        self.order / self.orbit(id).stab
    }

    /// Ids on the path from the root to `id`, inclusive.
    pub fn path_from_root(&self, id: u64) -> Vec<u64> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.orbit(cur).parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Stratification by stabiliser and the invariant $n(T)$.
    pub fn strata(&self) -> Strata {
        let m = self.order;
        let mut t0 = Vec::new();
        let mut td: BTreeMap<u64, Vec<u64>> =
            (1..m).filter(|d| m % d == 0).map(|d| (d, Vec::new())).collect();
        for o in &self.orbits {
            if o.stab == m {
                t0.push(o.id);
            } else {
                td.get_mut(&o.stab).expect("stab divides order").push(o.id);
            }
        }
        Strata { t0, td, n_t: self.n_t(), tree_type: self.tree_type }
    }

    /// $n(T) = \sum_v m/m_v - [\text{type II}]$.
    pub fn n_t(&self) -> u64 {
        let sum: u64 = self.orbits.iter().map(|o| self.order / o.stab).sum();
        sum - if self.tree_type == TreeType::II { 1 } else { 0 }
    }

    /// Back to the serialisable raw form (orbits ascending by id).
    pub fn to_raw(&self) -> RawTree {
        RawTree {
            order: self.order,
            tree_type: self.tree_type.to_string(),
            orbits: self
                .orbits
                .iter()
                .map(|o| RawOrbit {
                    id: o.id,
                    parent: o.parent,
                    a: o.weight.a() as i64,
                    b: o.weight.b() as i64,
                    stab: o.stab,
                })
                .collect(),
        }
    }
}

/// Parses tree JSON and checks structure only: shape, id uniqueness, parent
/// resolution, single root, acyclicity, type string, odd order. Admissibility
/// is deferred to [`validate`].
pub fn parse(input: &str) -> Result<RawTree, ParseError> {
    let raw: RawTree = serde_json::from_str(input).map_err(|e| ParseError::Json(e.to_string()))?;
    check_structure(&raw)?;
    Ok(raw)
}

/// Structural checks shared by [`parse`] and [`validate`].
fn check_structure(raw: &RawTree) -> Result<(), ParseError> {
    if raw.order % 2 == 0 {
        return Err(ParseError::EvenOrder(raw.order));
    }
    if raw.tree_type != "I" && raw.tree_type != "II" {
        return Err(ParseError::BadType(raw.tree_type.clone()));
    }
    let mut seen = BTreeSet::new();
    for o in &raw.orbits {
        if !seen.insert(o.id) {
            return Err(ParseError::DuplicateId(o.id));
        }
    }
    let mut roots = 0;
    for o in &raw.orbits {
        match o.parent {
            None => roots += 1,
            Some(p) => {
                if !seen.contains(&p) {
                    return Err(ParseError::UnknownParent { orbit: o.id, parent: p });
                }
            }
        }
    }
    if roots != 1 {
        return Err(ParseError::NotATree);
    }
    // Cycle check: every orbit must reach the root.
    let parent: BTreeMap<u64, Option<u64>> = raw.orbits.iter().map(|o| (o.id, o.parent)).collect();
    for o in &raw.orbits {
        let mut cur = o.id;
        let mut steps = 0;
        while let Some(&Some(p)) = parent.get(&cur) {
            cur = p;
            steps += 1;
            if steps > raw.orbits.len() {
                return Err(ParseError::NotATree);
            }
        }
    }
    Ok(())
}

/// The six weights allowed (up to swap) on a full-stabiliser child of a type I
/// root of weight $(a_0, b_0)$: $\pm(a_0, -b_0)$, $\pm(a_0, b_0-a_0)$,
/// $\pm(b_0, a_0-b_0)$.
pub(crate) fn clause5_set(w: &Weight) -> Vec<(i64, i64)> {
    let (a, b) = (w.a() as i64, w.b() as i64);
    vec![(a, -b), (-a, b), (a, b - a), (-a, a - b), (b, a - b), (-b, b - a)]
}

/// The weights allowed (up to swap and sign) on a same-stabiliser child of a
/// non-root vertex of weight $(a_v, b_v)$: $\pm(a_v, b_v-a_v)$,
/// $\pm(a_v-b_v, b_v)$.
pub(crate) fn clause7a_set(w: &Weight) -> Vec<(i64, i64)> {
    let (a, b) = (w.a() as i64, w.b() as i64);
    vec![(a, b - a), (a - b, b), (-a, a - b), (b - a, -b)]
}

/// The three circle parameters $a_v$, $b_v$, $a_v - b_v$ of a vertex weight.
fn circle_entries(w: &Weight) -> [i64; 3] {
    let (a, b) = (w.a() as i64, w.b() as i64);
    [a, b, a - b]
}

fn canonical_of(a: i64, b: i64, modulus: u64) -> (u64, u64) {
    Weight::new(a, b, modulus).canonical()
}

/// Checks every admissibility clause on a structurally valid raw tree and,
/// on success, freezes it into an [`AdmissibleTree`].
///
/// Violations are reported per clause with the orbit ids involved, sorted.
pub fn validate(raw: &RawTree) -> Result<AdmissibleTree, Vec<Violation>> {
    check_structure(raw).expect("validate requires a structurally valid tree");
    let m = raw.order;
    let tree_type = if raw.tree_type == "I" { TreeType::I } else { TreeType::II };
    let mut violations: Vec<Violation> = Vec::new();
    let mut push = |clause: &str, orbits: Vec<u64>| {
        violations.push(Violation { clause: clause.to_string(), orbits });
    };

    // Clause 3 per orbit: stabiliser sanity and primitivity of the weight.
    let mut stab_ok: BTreeMap<u64, bool> = BTreeMap::new();
    for o in &raw.orbits {
        let mut ok = o.stab >= 1 && m % o.stab.max(1) == 0;
        if o.parent.is_none() && o.stab != m {
            ok = false;
        }
        if ok {
            let w = Weight::new(o.a, o.b, o.stab);
            if gcd(gcd(w.a(), w.b()), o.stab) != 1 {
                ok = false;
            }
        }
        if !ok {
            push("3", vec![o.id]);
        }
        stab_ok.insert(o.id, ok);
    }

    // Clause 1: a type II tree has no full-stabiliser orbit besides the root.
    if tree_type == TreeType::II {
        for o in &raw.orbits {
            if o.parent.is_some() && o.stab == m {
                push("1", vec![o.id]);
            }
        }
    }

    let weight_of: BTreeMap<u64, Weight> = raw
        .orbits
        .iter()
        .map(|o| (o.id, Weight::new(o.a, o.b, o.stab.max(1))))
        .collect();
    let stab_of: BTreeMap<u64, u64> = raw.orbits.iter().map(|o| (o.id, o.stab)).collect();
    let root_id = raw.orbits.iter().find(|o| o.parent.is_none()).unwrap().id;

    // Clause 6: sibling orbits carry pairwise distinct weights in canonical
    // form. Grouped per parent (the root's children form one sibling set).
    let mut siblings: BTreeMap<Option<u64>, Vec<u64>> = BTreeMap::new();
    for o in &raw.orbits {
        if o.parent.is_some() {
            siblings.entry(o.parent).or_default().push(o.id);
        }
    }
    for ids in siblings.values() {
        let mut by_canon: BTreeMap<(u64, u64, u64), Vec<u64>> = BTreeMap::new();
        for &id in ids {
            let w = weight_of[&id];
            let (ca, cb) = w.canonical();
            by_canon.entry((ca, cb, stab_of[&id])).or_default().push(id);
        }
        for group in by_canon.values() {
            if group.len() > 1 {
                push("6", group.clone());
            }
        }
    }

    // Clauses 5, 7a, 7b: each edge in turn.
    for o in &raw.orbits {
        let Some(parent_id) = o.parent else { continue };
        if !stab_ok[&o.id] || !stab_ok[&parent_id] {
            continue; // already reported under clause 3
        }
        let wv = weight_of[&parent_id];
        let sv = stab_of[&parent_id];
        let wu = weight_of[&o.id];
        let su = stab_of[&o.id];
        if su == sv {
            if su == m && tree_type == TreeType::II {
                continue; // already reported under clause 1
            }
            let allowed =
                if parent_id == root_id && su == m { clause5_set(&wv) } else { clause7a_set(&wv) };
            let tag = if parent_id == root_id && su == m { "5" } else { "7a" };
            let ok = allowed.iter().any(|&(x, y)| canonical_of(x, y, sv) == wu.canonical());
            if !ok {
                push(tag, vec![o.id]);
            }
        } else {
            // Clause 7b: the child stabiliser must cut out a fixed circle of
            // the parent sphere, and the child weight must record the residual
            // rotation along it.
            let mut ok = su >= 1 && sv % su == 0;
            if ok {
                ok = circle_entries(&wv)
                    .iter()
                    .any(|&x| gcd(x.rem_euclid(sv as i64) as u64, sv) == su);
            }
            if ok {
                // One entry must vanish mod m_u; the other must be one of the
                // parent's circle parameters up to sign, and a unit is not 0.
                let (z, t) = if wu.b() == 0 {
                    (true, wu.a())
                } else if wu.a() == 0 {
                    (true, wu.b())
                } else {
                    (false, 0)
                };
                ok = z;
                if ok && su > 1 {
                    let t_ok = t % su != 0
                        && circle_entries(&wv).iter().any(|&x| {
                            let xm = x.rem_euclid(su as i64) as u64;
                            xm == t || (su - xm) % su == t
                        });
                    ok = t_ok;
                }
            }
            if !ok {
                push("7b", vec![o.id]);
            }
        }
    }

    if !violations.is_empty() {
        violations.sort();
        violations.dedup();
        return Err(violations);
    }

    Ok(freeze(raw))
}

// Freeze a structurally valid raw tree: compute levels, sort by id, build
// indices.  Clause checks are the caller's business.
fn freeze(raw: &RawTree) -> AdmissibleTree {
    let m = raw.order;
    let tree_type = if raw.tree_type == "I" { TreeType::I } else { TreeType::II };
    let parent: BTreeMap<u64, Option<u64>> = raw.orbits.iter().map(|o| (o.id, o.parent)).collect();
    let level_of = |mut id: u64| -> u32 {
        let mut l = 0;
        while let Some(&Some(p)) = parent.get(&id) {
            id = p;
            l += 1;
        }
        l
    };
    let mut orbits: Vec<OrbitNode> = raw
        .orbits
        .iter()
        .map(|o| OrbitNode {
            id: o.id,
            parent: o.parent,
            weight: Weight::new(o.a, o.b, o.stab),
            stab: o.stab,
            level: level_of(o.id),
        })
        .collect();
    orbits.sort_by_key(|o| o.id);
    let index: HashMap<u64, usize> = orbits.iter().enumerate().map(|(i, o)| (o.id, i)).collect();
    let mut children: HashMap<u64, Vec<u64>> = HashMap::new();
    for o in &orbits {
        if let Some(p) = o.parent {
            children.entry(p).or_default().push(o.id);
        }
    }
    for c in children.values_mut() {
        c.sort_unstable();
    }
    AdmissibleTree { order: m, tree_type, orbits, index, children }
}

/// Moves the root of a type I tree to a fixed vertex, rewriting the weights
/// along the path so that the result is again admissible.
///
/// The target (and hence the whole path) must be fixed by the full group. The
/// new root receives $(a_\ell - b_\ell, -b_\ell)$; each other path vertex
/// receives $\pm(a, -b)$ of the weight of its former child on the path, with
/// signs resolved by depth-first search (plus tried first) until the whole
/// tree validates. Off-path orbits keep their weights and parents.
pub fn reorient(t: &AdmissibleTree, target: u64) -> Result<AdmissibleTree, ReorientError> {
    if !t.has_orbit(target) {
        return Err(ReorientError::UnknownTarget(target));
    }
    if t.tree_type() != TreeType::I {
        return Err(ReorientError::TypeII);
    }
    let node = t.orbit(target);
    if node.stab != t.order() {
        return Err(ReorientError::NotFixed { id: target, stab: node.stab, order: t.order() });
    }
    let path = t.path_from_root(target);
    if path.len() == 1 {
        return Ok(t.clone());
    }
    let l = path.len() - 1;
    for mask in 0..(1u64 << l) {
        if let Ok(res) = validate(&reoriented_raw(t, &path, mask)) {
            return Ok(res);
        }
    }
    Err(ReorientError::NoValidOrientation)
}

// The reoriented raw tree for one sign assignment: parent links along the
// path are reversed, the new root gets $(a_\ell - b_\ell, -b_\ell)$, and each
// other path vertex gets the sign-adjusted $(a, -b)$ of its former child on
// the path.
fn reoriented_raw(t: &AdmissibleTree, path: &[u64], mask: u64) -> RawTree {
    let l = path.len() - 1;
    let m = t.order() as i64;
    let w = |j: usize| {
        let wt = t.orbit(path[j]).weight;
        (wt.a() as i64, wt.b() as i64)
    };
    let (al, bl) = w(l);
    let mut raw = t.to_raw();
    for o in raw.orbits.iter_mut() {
        if o.id == path[l] {
            o.parent = None;
            o.a = (al - bl).rem_euclid(m);
            o.b = (-bl).rem_euclid(m);
        } else if let Some(j) = path[..l].iter().position(|&p| p == o.id) {
            o.parent = Some(path[j + 1]);
            // New distance from the new root is i = l - j; the weight comes
            // from the former child path[j + 1].
            let i = l - j;
            let sign = if (mask >> (l - i)) & 1 == 0 { 1 } else { -1 };
            let (a, b) = w(j + 1);
            o.a = (sign * a).rem_euclid(m);
            o.b = (sign * -b).rem_euclid(m);
        }
    }
    raw
}

// Reorientation that never fails on a fixed target. A sibling of the old root
// can collide with every sign-adjusted rewrite of its weight, leaving no
// admissible description rooted at the target; the all-plus assignment is then
// frozen without clause checks. Gradings read off a description depend on the
// rotation numbers only through $\lambda^k \cong \lambda^{-k}$, so the forced
// signs change nothing downstream.
pub(crate) fn reorient_relaxed(
    t: &AdmissibleTree,
    target: u64,
) -> Result<AdmissibleTree, ReorientError> {
    match reorient(t, target) {
        Err(ReorientError::NoValidOrientation) => {
            let path = t.path_from_root(target);
            Ok(freeze(&reoriented_raw(t, &path, 0)))
        }
        other => other,
    }
}

/// Replaces the root weight by an equivalent orientation with both rotation
/// numbers prime to `p`, if the current one has not.
///
/// The candidates $(a_0, b_0)$, $(a_0-b_0, -b_0)$, $(b_0-a_0, -a_0)$ are the
/// three orientations of the root $\mathbb{CP}^2$; since $p$ divides at most
/// one of $a_0$, $b_0$, $a_0-b_0$, one of them always qualifies. All child
/// constraints are invariant under this move, so no revalidation is needed.
pub fn normalize_root(t: &AdmissibleTree, p: u64) -> AdmissibleTree {
    validate(&normalized_raw(t, p)).expect("root normalization preserves admissibility")
}

// Root normalization that tolerates a non-admissible input (as produced by
// `reorient_relaxed`): when the rewritten tree no longer validates, it is
// frozen as is. The move still only touches the root weight.
pub(crate) fn normalize_root_relaxed(t: &AdmissibleTree, p: u64) -> AdmissibleTree {
    let raw = normalized_raw(t, p);
    validate(&raw).unwrap_or_else(|_| freeze(&raw))
}

fn normalized_raw(t: &AdmissibleTree, p: u64) -> RawTree {
    assert!(p >= 3 && t.order() % p == 0, "normalize_root needs an odd prime dividing the order");
    let root = t.root().clone();
    let (a, b) = (root.weight.a() as i64, root.weight.b() as i64);
    let candidates = [(a, b), (a - b, -b), (b - a, -a)];
    let pick = candidates
        .into_iter()
        .find(|&(x, y)| {
            x.rem_euclid(p as i64) != 0 && y.rem_euclid(p as i64) != 0
        })
        .unwrap_or((a, b));
    let mut raw = t.to_raw();
    let m = t.order() as i64;
    for o in raw.orbits.iter_mut() {
        if o.id == root.id {
            o.a = pick.0.rem_euclid(m);
            o.b = pick.1.rem_euclid(m);
        }
    }
    raw
}

/// Generates a random admissible tree over $C_m$, deterministically from the
/// seed: child weights are sampled from the exact allowed sets of each clause,
/// and the result always validates.
pub fn generate_random(order: u64, max_level: u32, max_orbits: usize, seed: u64) -> AdmissibleTree {
    assert!(order >= 3 && order % 2 == 1, "order must be odd and at least 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let raw = try_generate(&mut rng, order, max_level, max_orbits.max(1));
        if let Ok(t) = validate(&raw) {
            return t;
        }
    }
    // Unreachable in practice; a one-vertex type I tree is always admissible.
    let raw = RawTree {
        order,
        tree_type: "I".into(),
        orbits: vec![RawOrbit { id: 0, parent: None, a: 1, b: order as i64 - 1, stab: order }],
    };
    validate(&raw).expect("one-vertex tree is admissible")
}

fn try_generate(rng: &mut ChaCha8Rng, m: u64, max_level: u32, max_orbits: usize) -> RawTree {
    let tree_type = if rng.gen_ratio(1, 4) { "II" } else { "I" };
    // Root weight: any primitive pair mod m.
    let (a0, b0) = loop {
        let a = rng.gen_range(0..m);
        let b = rng.gen_range(0..m);
        if gcd(gcd(a, b), m) == 1 {
            break (a, b);
        }
    };
    let mut orbits =
        vec![RawOrbit { id: 0, parent: None, a: a0 as i64, b: b0 as i64, stab: m }];
    let mut levels = vec![0u32];
    let target = rng.gen_range(1..=max_orbits);
    'grow: while orbits.len() < target {
        for _ in 0..8 {
            let pi = rng.gen_range(0..orbits.len());
            if levels[pi] >= max_level {
                continue;
            }
            let parent = orbits[pi].clone();
            let wv = Weight::new(parent.a, parent.b, parent.stab);
            let used: Vec<(u64, u64, u64)> = orbits
                .iter()
                .filter(|o| o.parent == Some(parent.id))
                .map(|o| {
                    let w = Weight::new(o.a, o.b, o.stab);
                    (w.canonical().0, w.canonical().1, o.stab)
                })
                .collect();
            let mut options: Vec<(i64, i64, u64)> = Vec::new();
            // Same-stabiliser children: the root's fixed children (type I
            // only) draw from the clause 5 set, others from the clause 7a set.
            if parent.stab < m {
                options.extend(clause7a_set(&wv).iter().map(|&(x, y)| (x, y, parent.stab)));
            } else if tree_type == "I" {
                let set = if parent.parent.is_none() { clause5_set(&wv) } else { clause7a_set(&wv) };
                options.extend(set.iter().map(|&(x, y)| (x, y, m)));
            }
            // Smaller-stabiliser children along the parent's invariant circles.
            for x in circle_entries(&wv) {
                let su = gcd(x.rem_euclid(parent.stab as i64) as u64, parent.stab);
                if su == parent.stab {
                    continue;
                }
                if su == 1 {
                    options.push((0, 0, 1));
                    continue;
                }
                for y in circle_entries(&wv) {
                    for t in [y, -y] {
                        let tm = t.rem_euclid(su as i64) as u64;
                        if gcd(tm, su) == 1 {
                            options.push((tm as i64, 0, su));
                        }
                    }
                }
            }
            options.retain(|&(x, y, s)| {
                let w = Weight::new(x, y, s);
                let key = (w.canonical().0, w.canonical().1, s);
                !used.contains(&key) && gcd(gcd(w.a(), w.b()), s) == 1
            });
            if options.is_empty() {
                continue;
            }
            let (x, y, s) = options[rng.gen_range(0..options.len())];
            let w = Weight::new(x, y, s);
            let id = orbits.len() as u64;
            orbits.push(RawOrbit {
                id,
                parent: Some(parent.id),
                a: w.a() as i64,
                b: w.b() as i64,
                stab: s,
            });
            levels.push(levels[pi] + 1);
            continue 'grow;
        }
        break; // no parent admitted a child; stop early
    }
    RawTree { order: m, tree_type: tree_type.into(), orbits }
}
