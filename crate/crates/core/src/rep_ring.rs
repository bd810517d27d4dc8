//! Virtual real representations of the cyclic group $C_m$, $m$ odd.
//!
//! For odd $m$ the irreducible real representations of $C_m$ are the trivial
//! one-dimensional representation and the two-dimensional rotations
//! $\lambda^k$ (the generator acts on $\mathbb{R}^2$ by the angle $2\pi k/m$),
//! for $k \not\equiv 0 \pmod m$. A [`VirtualRep`] is an integer combination of
//! these; $\lambda^0$ is identified with two trivial summands at construction,
//! so the stored exponents always lie in $\{1, \dots, m-1\}$.
//!
//! Note $\lambda^k$ and $\lambda^{m-k}$ are isomorphic as representations but
//! are kept distinct here: gradings read off cell structures carry oriented
//! exponents, and every derived quantity in this crate (dimension, fixed-point
//! dimension, restriction, the $H\underline{\mathbb{Z}}$ grading collapse)
//! depends only on $\gcd(k, m)$, hence is insensitive to the distinction.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

/// Error for representation-ring operations with invalid subgroup data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    /// The requested level does not correspond to a subgroup of $C_m$.
    #[error("{divisor} does not divide the group order {order}")]
    NotASubgroup {
        /// Requested subgroup order.
        divisor: u64,
        /// Ambient group order.
        order: u64,
    },
}

/// Parse failure for the textual representation grammar, with byte position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseRepError {
    /// Byte offset into the input at which the error was detected.
    pub offset: usize,
    /// Human-readable description of the problem.
    pub message: String,
}

/// A virtual real representation of $C_m$.
///
/// Stored as the multiplicity of the trivial representation plus a sparse map
/// from exponents $k \in \{1,\dots,m-1\}$ to the (possibly negative)
/// multiplicity of $\lambda^k$. Zero multiplicities are never stored, so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VirtualRep {
    order: u64,
    trivial: i64,
    chars: BTreeMap<u64, i64>,
}

impl VirtualRep {
    /// The zero virtual representation of $C_m$.
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1 && order % 2 == 1, "group order must be odd");
        VirtualRep { order, trivial: 0, chars: BTreeMap::new() }
    }

    /// `n` copies of the one-dimensional trivial representation.
    pub fn trivial(order: u64, n: i64) -> Self {
        let mut r = Self::zero(order);
        r.trivial = n;
        r
    }

    /// The rotation $\lambda^k$; `k` is reduced mod $m$ and $\lambda^0$ folds
    /// to two trivial summands.
    pub fn lambda(order: u64, k: i64) -> Self {
        let mut r = Self::zero(order);
        r.add_lambda(k, 1);
        r
    }

    /// Adds `mult` copies of $\lambda^k$ in place, folding $k \equiv 0$.
    pub fn add_lambda(&mut self, k: i64, mult: i64) {
        let k = k.rem_euclid(self.order as i64) as u64;
        if k == 0 {
            self.trivial += 2 * mult;
        } else {
            let e = self.chars.entry(k).or_insert(0);
            *e += mult;
            if *e == 0 {
                self.chars.remove(&k);
            }
        }
    }

    /// Adds `mult` trivial summands in place.
    pub fn add_trivial(&mut self, mult: i64) {
        self.trivial += mult;
    }

    /// Order $m$ of the group this representation lives over.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Multiplicity of the trivial summand.
    pub fn trivial_mult(&self) -> i64 {
        self.trivial
    }

    /// Multiplicity of $\lambda^k$ (zero if absent; `k` reduced mod $m$,
    /// with $k \equiv 0$ reporting none — that mass lives in the trivial part).
    pub fn lambda_mult(&self, k: i64) -> i64 {
        let k = k.rem_euclid(self.order as i64) as u64;
        if k == 0 { 0 } else { *self.chars.get(&k).unwrap_or(&0) }
    }

    /// Iterator over `(exponent, multiplicity)` pairs, ascending exponent.
    pub fn chars(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.chars.iter().map(|(&k, &c)| (k, c))
    }

    /// Virtual real dimension: trivial multiplicity plus twice the rotation
    /// multiplicities.
    pub fn dim(&self) -> i64 {
        self.trivial + 2 * self.chars.values().sum::<i64>()
    }

    /// Dimension of the $C_d$-fixed subrepresentation: $\lambda^k$ is
    /// $C_d$-fixed exactly when $d \mid k$.
    pub fn fixed_dim(&self, d: u64) -> Result<i64, RepError> {
        if d == 0 || self.order % d != 0 {
            return Err(RepError::NotASubgroup { divisor: d, order: self.order });
        }
        let rot: i64 = self
            .chars
            .iter()
            .filter(|(&k, _)| k % d == 0)
            .map(|(_, &c)| c)
            .sum();
        Ok(self.trivial + 2 * rot)
    }

    /// Restriction to the subgroup $C_d$: exponents are reduced mod $d$ and
    /// $\lambda^0$ folds to two trivial summands.
    pub fn restrict(&self, d: u64) -> Result<VirtualRep, RepError> {
        if d == 0 || self.order % d != 0 {
            return Err(RepError::NotASubgroup { divisor: d, order: self.order });
        }
        let mut r = VirtualRep::zero(d);
        r.trivial = self.trivial;
        for (&k, &c) in &self.chars {
            r.add_lambda((k % d) as i64, c);
        }
        Ok(r)
    }

    /// Canonical grading of the Eilenberg–MacLane module on this sphere:
    /// as an $H\underline{\mathbb{Z}}$-module, $H\underline{\mathbb{Z}} \wedge
    /// S^{\lambda^k}$ depends only on the kernel of $\lambda^k$, so every
    /// exponent is replaced by $\gcd(k, m)$.
    pub fn hz_canonical(&self) -> VirtualRep {
        let mut r = VirtualRep::zero(self.order);
        r.trivial = self.trivial;
        for (&k, &c) in &self.chars {
            r.add_lambda(gcd(k, self.order) as i64, c);
        }
        r
    }

    /// Whether this is an actual (not merely virtual) representation.
    pub fn is_actual(&self) -> bool {
        self.trivial >= 0 && self.chars.values().all(|&c| c >= 0)
    }

    /// Whether this is the zero representation.
    pub fn is_zero(&self) -> bool {
        self.trivial == 0 && self.chars.is_empty()
    }

    /// Parses the textual grammar, e.g. `l^1 + l^2 - l^14 - 1` or `2*l^1 - 3`.
    ///
    /// Whitespace is insignificant; exponents are reduced mod `order`. Errors
    /// report the byte offset of the offending character.
    pub fn parse(input: &str, order: u64) -> Result<VirtualRep, ParseRepError> {
        Parser { input: input.as_bytes(), pos: 0 }.parse(order)
    }
}

fn assert_same_order(a: &VirtualRep, b: &VirtualRep) {
    assert_eq!(
        a.order, b.order,
        "representation arithmetic across different group orders"
    );
}

impl Add for &VirtualRep {
    type Output = VirtualRep;
    fn add(self, rhs: &VirtualRep) -> VirtualRep {
        assert_same_order(self, rhs);
        let mut r = self.clone();
        r.trivial += rhs.trivial;
        for (&k, &c) in &rhs.chars {
            r.add_lambda(k as i64, c);
        }
        r
    }
}

impl Sub for &VirtualRep {
    type Output = VirtualRep;
    fn sub(self, rhs: &VirtualRep) -> VirtualRep {
        assert_same_order(self, rhs);
        self + &(-rhs)
    }
}

impl Neg for &VirtualRep {
    type Output = VirtualRep;
    fn neg(self) -> VirtualRep {
        let mut r = VirtualRep::zero(self.order);
        r.trivial = -self.trivial;
        r.chars = self.chars.iter().map(|(&k, &c)| (k, -c)).collect();
        r
    }
}

impl Add for VirtualRep {
    type Output = VirtualRep;
    fn add(self, rhs: VirtualRep) -> VirtualRep {
        &self + &rhs
    }
}

impl Sub for VirtualRep {
    type Output = VirtualRep;
    fn sub(self, rhs: VirtualRep) -> VirtualRep {
        &self - &rhs
    }
}

impl Neg for VirtualRep {
    type Output = VirtualRep;
    fn neg(self) -> VirtualRep {
        -&self
    }
}

impl fmt::Display for VirtualRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, coeff: i64, body: Option<u64>| {
            let sign = if coeff < 0 { "-" } else if first { "" } else { "+" };
            let mag = coeff.unsigned_abs();
            first = false;
            match body {
                Some(k) if mag == 1 => write!(f, "{sign}l^{k}"),
                Some(k) => write!(f, "{sign}{mag}*l^{k}"),
                None => write!(f, "{sign}{mag}"),
            }
        };
        for (&k, &c) in &self.chars {
            term(f, c, Some(k))?;
        }
        if self.trivial != 0 {
            term(f, self.trivial, None)?;
        }
        Ok(())
    }
}

/// Greatest common divisor on `u64` (with `gcd(0, n) = n`).
pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Least common multiple on `u64`.
pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseRepError> {
        Err(ParseRepError { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<i64, ParseRepError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .map_err(|_| ParseRepError { offset: start, message: "number too large".into() })
    }

    // term := [int '*'] 'l' '^' int | int
    fn term(&mut self, rep: &mut VirtualRep, sign: i64) -> Result<(), ParseRepError> {
        self.skip_ws();
        let mut coeff = 1i64;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.number()?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                if self.peek() != Some(b'l') {
                    return self.err("expected 'l' after '*'");
                }
            } else if self.peek() != Some(b'l') {
                // plain integer term
                rep.add_trivial(sign * coeff);
                return Ok(());
            }
        }
        match self.peek() {
            Some(b'l') => {
                self.pos += 1;
                self.skip_ws();
                if self.peek() != Some(b'^') {
                    return self.err("expected '^' after 'l'");
                }
                self.pos += 1;
                self.skip_ws();
                let k = self.number()?;
                rep.add_lambda(k, sign * coeff);
                Ok(())
            }
            _ => self.err("expected a term"),
        }
    }

    fn parse(mut self, order: u64) -> Result<VirtualRep, ParseRepError> {
        let mut rep = VirtualRep::zero(order);
        self.skip_ws();
        if self.pos == self.input.len() {
            return self.err("empty input");
        }
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            sign = -1;
            self.pos += 1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        self.term(&mut rep, sign)?;
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(rep),
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(_) => return self.err("expected '+', '-' or end of input"),
            }
            self.pos += 1;
            self.term(&mut rep, sign)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(s: &str, m: u64) -> VirtualRep {
        VirtualRep::parse(s, m).unwrap()
    }

    #[test]
    fn lambda_zero_folds_to_two_trivials() {
        assert_eq!(VirtualRep::lambda(9, 0), VirtualRep::trivial(9, 2));
        assert_eq!(VirtualRep::lambda(9, 9), VirtualRep::trivial(9, 2));
        assert_eq!(VirtualRep::lambda(9, -9), VirtualRep::trivial(9, 2));
    }

    #[test]
    fn negative_exponents_reduce_mod_order() {
        assert_eq!(VirtualRep::lambda(15, -1), VirtualRep::lambda(15, 14));
    }

    #[test]
    fn dim_and_fixed_dim() {
        // l^1 + l^2 over C_15: dim 4, no fixed part under any nontrivial
        // subgroup except where the exponent is divisible.
        let v = rep("l^1+l^2", 15);
        assert_eq!(v.dim(), 4);
        assert_eq!(v.fixed_dim(1).unwrap(), 4);
        assert_eq!(v.fixed_dim(3).unwrap(), 0);
        assert_eq!(v.fixed_dim(5).unwrap(), 0);
        assert_eq!(v.fixed_dim(15).unwrap(), 0);

        let w = rep("l^3+1", 9);
        assert_eq!(w.dim(), 3);
        assert_eq!(w.fixed_dim(3).unwrap(), 3);
        assert_eq!(w.fixed_dim(9).unwrap(), 1);

        assert_eq!(
            w.fixed_dim(2),
            Err(RepError::NotASubgroup { divisor: 2, order: 9 })
        );
    }

    #[test]
    fn restrict_folds_divisible_exponents() {
        let v = rep("l^3+l^5-1", 15);
        let r = v.restrict(5).unwrap();
        // l^3 stays as l^3 mod 5, l^5 folds to +2 trivial.
        assert_eq!(r, rep("l^3+1", 5));
        assert_eq!(v.restrict(1).unwrap(), VirtualRep::trivial(1, 3));
    }

    #[test]
    fn hz_canonical_is_gcd_of_exponents() {
        let v = rep("l^1+l^2", 15);
        assert_eq!(v.hz_canonical(), rep("2*l^1", 15));
        let w = rep("l^6+l^10", 15);
        assert_eq!(w.hz_canonical(), rep("l^3+l^5", 15));
        // Exponent 9 over C_27 has gcd 9; exponent 14 over C_15 has gcd 1.
        assert_eq!(rep("l^9", 27).hz_canonical(), rep("l^9", 27));
        assert_eq!(rep("l^14", 15).hz_canonical(), rep("l^1", 15));
    }

    #[test]
    fn arithmetic_and_display() {
        let m = 15;
        let beta = rep("l^1+l^2", m);
        let gamma = rep("l^1", m);
        let alpha = &(&beta - &gamma) - &VirtualRep::trivial(m, 1);
        assert_eq!(alpha.to_string(), "l^2-1");
        assert_eq!(rep("2*l^1 - 3", 3).to_string(), "2*l^1-3");
        assert_eq!(rep("l^1 + l^2 - l^14 - 1", 15).to_string(), "l^1+l^2-l^14-1");
        assert_eq!((&beta - &beta).to_string(), "0");
        assert_eq!(rep("-l^2+3", 9).to_string(), "-l^2+3");
        assert_eq!(VirtualRep::trivial(3, 2).to_string(), "2");
    }

    #[test]
    fn display_roundtrip() {
        for s in ["l^1+l^2-l^14-1", "2*l^1-3", "0", "-3*l^4+2*l^7", "l^2+2"] {
            let v = rep(s, 15);
            assert_eq!(VirtualRep::parse(&v.to_string(), 15).unwrap(), v);
        }
    }

    #[test]
    fn parse_errors_carry_byte_offsets() {
        let e = VirtualRep::parse("l^", 15).unwrap_err();
        assert_eq!(e.offset, 2);
        let e = VirtualRep::parse("l5", 15).unwrap_err();
        assert_eq!(e.offset, 1);
        let e = VirtualRep::parse("2*x", 15).unwrap_err();
        assert_eq!(e.offset, 2);
        let e = VirtualRep::parse("l^1 ? 2", 15).unwrap_err();
        assert_eq!(e.offset, 4);
        let e = VirtualRep::parse("   ", 15).unwrap_err();
        assert_eq!(e.offset, 3);
    }

    #[test]
    fn parse_is_whitespace_insensitive() {
        assert_eq!(rep(" l^1 +  l^2-l^14- 1 ", 15), rep("l^1+l^2-l^14-1", 15));
    }

    #[test]
    #[should_panic(expected = "different group orders")]
    fn mismatched_orders_panic() {
        let _ = VirtualRep::lambda(3, 1) + VirtualRep::lambda(5, 1);
    }
}
