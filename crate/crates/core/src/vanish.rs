//! Vanishing tests for $RO(C_m)$-graded homotopy of $H\underline{\mathbb{Z}}$.
//!
//! The connecting maps measured in this crate live in groups of the form
//! $\pi_\alpha^{C_d}(H\underline{\mathbb{Z}})$ for a virtual representation
//! $\alpha$ of $C_d$. Three regimes are implemented:
//!
//!  - $d = 1$: non-equivariantly $\pi_\alpha(H\mathbb{Z})$ is $\mathbb{Z}$ when
//!    $|\alpha| = 0$ and zero otherwise;
//!  - $d = p$ an odd prime: the group is known exactly as a Mackey functor
//!    ([`pi_cp`]);
//!  - general odd $d$: a sufficient criterion ([`criterion_vanishes`]) in terms
//!    of the fixed-point dimension function certifies vanishing; when it does
//!    not apply the answer here is *inconclusive*, never a claimed nonzero.

use std::fmt;

use thiserror::Error;

use crate::rep_ring::{RepError, VirtualRep};

/// Errors for the exact odd-primary computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VanishError {
    /// [`pi_cp`] is only defined over groups of odd prime order.
    #[error("order {order} is not an odd prime")]
    NotAnOddPrime {
        /// The offending group order.
        order: u64,
    },
    /// Invalid subgroup level.
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Name of a Mackey functor over $C_p$ arising as $\pi_\alpha(H\underline{\mathbb{Z}})$.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MackeyName {
    /// The constant Mackey functor $\underline{\mathbb{Z}}$.
    ConstantZ,
    /// Its dual $\underline{\mathbb{Z}}^*$ (restriction $p$, transfer $1$).
    DualZStar,
    /// The zero-restriction, zero-transfer functor $\langle \mathbb{Z}/p \rangle$.
    BracketZModP(u64),
    /// The zero Mackey functor.
    Zero,
}

impl fmt::Display for MackeyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MackeyName::ConstantZ => write!(f, "Z"),
            MackeyName::DualZStar => write!(f, "Z*"),
            MackeyName::BracketZModP(p) => write!(f, "Z/{p}"),
            MackeyName::Zero => write!(f, "0"),
        }
    }
}

/// Outcome of an obstruction-group computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// The group is provably zero.
    Vanishes,
    /// The sufficient criterion does not apply; no conclusion.
    Inconclusive,
    /// The group is provably nonzero, with its exact Mackey-functor name.
    NonzeroGroup(MackeyName),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Vanishes => write!(f, "vanishes"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
            Verdict::NonzeroGroup(name) => write!(f, "nonzero:{name}"),
        }
    }
}

/// Sufficient vanishing criterion for $\pi_\alpha^{C_m}(H\underline{\mathbb{Z}})$.
///
/// Returns `true` when $|\alpha|$ is odd and for every pair of subgroups
/// $C_h \subseteq C_k$ of $C_m$, $|\alpha^{C_h}| > -1$ implies
/// $|\alpha^{C_k}| \ge -1$. A `true` certifies the group is zero; `false`
/// certifies nothing.
pub fn criterion_vanishes(alpha: &VirtualRep) -> bool {
    if alpha.dim() % 2 == 0 {
        return false;
    }
    let m = alpha.order();
    let divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    for &h in &divisors {
        if alpha.fixed_dim(h).unwrap() > -1 {
            for &k in &divisors {
                if k % h == 0 && alpha.fixed_dim(k).unwrap() < -1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Exact value of $\pi_\alpha^{C_p}(H\underline{\mathbb{Z}})$ for odd prime $p$.
///
/// The answer depends only on $|\alpha|$ and $|\alpha^{C_p}|$:
/// $\underline{\mathbb{Z}}$ or $\underline{\mathbb{Z}}^*$ on the
/// zero-dimensional line, $\langle \mathbb{Z}/p \rangle$ in two wedge-shaped
/// regions, zero elsewhere.
pub fn pi_cp(alpha: &VirtualRep) -> Result<MackeyName, VanishError> {
    let p = alpha.order();
    if !is_odd_prime(p) {
        return Err(VanishError::NotAnOddPrime { order: p });
    }
    let dim = alpha.dim();
    let fixed = alpha.fixed_dim(p)?;
    Ok(if dim == 0 && fixed >= 0 {
        MackeyName::ConstantZ
    } else if dim == 0 && fixed < 0 {
        MackeyName::DualZStar
    } else if (dim < 0 && fixed >= 0 && dim % 2 == 0) || (dim > 0 && fixed < -1 && dim % 2 != 0) {
        // the two wedge-shaped torsion regions
        MackeyName::BracketZModP(p)
    } else {
        MackeyName::Zero
    })
}

/// Verdict for a virtual grading $\alpha$ over the group it is defined over.
///
/// Dispatches on the order: trivial group (exact), odd prime (exact via
/// [`pi_cp`]), composite (sufficient criterion only).
pub fn verdict_for(alpha: &VirtualRep) -> Verdict {
    let d = alpha.order();
    if d == 1 {
        return if alpha.dim() == 0 {
            Verdict::NonzeroGroup(MackeyName::ConstantZ)
        } else {
            Verdict::Vanishes
        };
    }
    if is_odd_prime(d) {
        return match pi_cp(alpha).expect("order checked prime") {
            MackeyName::Zero => Verdict::Vanishes,
            name => Verdict::NonzeroGroup(name),
        };
    }
    if criterion_vanishes(alpha) {
        Verdict::Vanishes
    } else {
        Verdict::Inconclusive
    }
}

/// Obstruction grading and verdict for a connecting map.
///
/// A summand $S^\beta$ maps into the suspended cell $S^{\gamma+1}$; the
/// obstruction to triviality lies in $\pi_0$ of maps in grading
/// $\alpha = \beta - \gamma - 1$, computed over the subgroup $C_d$ acting on
/// both sides. Returns the restricted grading together with its verdict.
pub fn obstruction_verdict(
    beta: &VirtualRep,
    gamma: &VirtualRep,
    level: u64,
) -> Result<(VirtualRep, Verdict), RepError> {
    let m = beta.order();
    let alpha = &(beta - gamma) - &VirtualRep::trivial(m, 1);
    let alpha = alpha.restrict(level)?;
    let verdict = verdict_for(&alpha);
    Ok((alpha, verdict))
}

/// Primality test for the small odd orders in play.
pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
