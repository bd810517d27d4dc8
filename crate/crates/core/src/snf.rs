//! Smith normal form over $\mathbb{Z}$.
//!
//! The level chain complexes have integer boundary matrices, and each
//! homology group $\ker \partial_k / \operatorname{im} \partial_{k+1}$ is a
//! finitely generated abelian group.  Diagonalizing a boundary matrix by
//! unimodular row and column operations, $A \mapsto UAV$ with invariant
//! factors $d_1 \mid d_2 \mid \dots$, reads off the free rank and the torsion
//! coefficients directly.
//!
//! Arithmetic is exact and arbitrary precision: naive reduction can grow
//! intermediate entries far beyond machine range even on small matrices, and
//! a silent overflow here would corrupt every downstream cross-check.  The
//! matrices are desk scale (at most a few hundred rows), so no modular or
//! blocked techniques are needed; pivots are chosen of minimal absolute
//! value, which takes the ubiquitous $\pm 1$ incidence entries first and
//! keeps growth tame in practice.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix with explicit dimensions (rows may be zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    /// The zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    /// Builds a matrix from machine-integer rows; all rows must have equal
    /// length.  An empty list yields the 0 x 0 matrix.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.data[i][j] = BigInt::from(v);
            }
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    /// Adds `v` to the entry at `(i, j)`.
    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        let w = &self.data[i][j] + BigInt::from(v);
        self.data[i][j] = w;
    }

    /// True when every entry vanishes.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other.data[k][j].is_zero() {
                        continue;
                    }
                    let v = &out.data[i][j] + &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] = v;
                }
            }
        }
        out
    }

    /// The transposed matrix.
    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j][i] = self.data[i][j].clone();
            }
        }
        out
    }
}

/// Diagonal data of the Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Number of nonzero invariant factors.
    pub rank: usize,
    /// The nonzero invariant factors, positive and in divisibility order
    /// $d_1 \mid d_2 \mid \dots \mid d_r$.
    pub invariants: Vec<BigInt>,
}

// Position of a nonzero entry of minimal absolute value in the submatrix
// with both indices >= t.
fn min_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], x: usize, y: usize) {
    if x != y {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
    }
}

/// Computes the Smith normal form diagonal of `m`.
// Index loops update two rows or two columns at once.
#[allow(clippy::needless_range_loop)]
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.data.clone();
    let rows = m.rows;
    let cols = m.cols;
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_nonzero(&a, t) else {
            break;
        };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut clean = true;
            // Clear the pivot column by row operations; a nonzero remainder
            // becomes the new, strictly smaller pivot.
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..cols {
                        if a[t][j].is_zero() {
                            continue;
                        }
                        let v = &a[i][j] - &q * &a[t][j];
                        a[i][j] = v;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Clear the pivot row by column operations.
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for i in t..rows {
                        if a[i][t].is_zero() {
                            continue;
                        }
                        let v = &a[i][j] - &q * &a[i][t];
                        a[i][j] = v;
                    }
                }
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, t, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    // Repair divisibility: replace pairs by gcd and lcm.  After the i-th
    // outer pass d_i divides every later entry and never changes again.
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            if (&diag[j] % &diag[i]).is_zero() {
                continue;
            }
            let g = gcd_big(&diag[i], &diag[j]);
            let l = &diag[i] / &g * &diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    SmithForm { rank: diag.len(), invariants: diag }
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x = a.abs();
    let mut y = b.abs();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

/// Homology $\ker(\text{out}) / \operatorname{im}(\text{inn})$ of consecutive
/// integer boundary maps, as free rank plus torsion coefficients (each
/// greater than one, in divisibility order).
///
/// `out` maps the chain group in question outward (its columns index that
/// group) and `inn` maps into it (its rows index the same group).
pub fn quotient_homology(out: &IntMatrix, inn: &IntMatrix) -> (usize, Vec<BigInt>) {
    assert_eq!(out.cols(), inn.rows(), "boundary maps are not consecutive");
    let rank_out = smith_normal_form(out).rank;
    let inn_form = smith_normal_form(inn);
    let free = out
        .cols()
        .checked_sub(rank_out + inn_form.rank)
        .expect("rank bookkeeping requires a chain complex");
    let one = BigInt::one();
    let torsion = inn_form.invariants.into_iter().filter(|d| *d > one).collect();
    (free, torsion)
}

/// True when `out * inn = 0`, i.e. the two maps compose as consecutive
/// boundaries of a chain complex.
pub fn composes_to_zero(out: &IntMatrix, inn: &IntMatrix) -> bool {
    out.mul(inn).is_zero()
}
