//! Rigorous assembly of approximate inverses and their finite defects.
//!
//! Every linear operator handled here has the preconditioned form
//!
//! ```text
//! K = I + P · Conv(V) · Q,
//! ```
//!
//! where `P` and `Q` are diagonal Fourier multipliers, `Conv(V)` is the
//! convolution by an even sequence `V` supported on modes `|n| ≤ N`, and `K`
//! is optionally bordered by one extra row and column (used for eigenpair
//! enclosures). The approximate inverse is
//!
//! ```text
//! B = B^N π^N + π_N 𝕎,
//! ```
//!
//! with `B^N` the floating-point inverse of the finite block of `K` and `𝕎`
//! either the identity or the convolution by a sequence `W` approximating
//! the reciprocal of the high-frequency limit of `K`.
//!
//! Operators act either on cosine coefficients (weighted by `α_n`) or on
//! full exponential coefficients, see [`Basis`].

use nalgebra::DMatrix;

use crate::approx::invert;
use crate::error::{Error, Result};
use crate::rigor::{weighted_norm2_upper, IMatrix, Interval};

/// Coordinate system of a coefficient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Cosine modes `n ≥ 0` with weights `α_n`.
    Cosine,
    /// Exponential modes `k ∈ ℤ` with unit weights.
    Exp,
}

impl Basis {
    /// Modes with `lo ≤ |n| ≤ hi`, in increasing order.
    pub fn band(self, lo: usize, hi: usize) -> Vec<i64> {
        let (lo, hi) = (lo as i64, hi as i64);
        if lo > hi {
            return Vec::new();
        }
        match self {
            Basis::Cosine => (lo..=hi).collect(),
            Basis::Exp if lo == 0 => (-hi..=hi).collect(),
            Basis::Exp => (-hi..=-lo).chain(lo..=hi).collect(),
        }
    }

    /// Square root of the norm weight of mode `n`.
    pub fn sqrt_weight(self, n: i64) -> Interval {
        match self {
            Basis::Cosine if n != 0 => Interval::sqrt2(),
            _ => Interval::ONE,
        }
    }

    /// Square-root weights of a mode list.
    pub fn weights(self, modes: &[i64]) -> Vec<Interval> {
        modes.iter().map(|&n| self.sqrt_weight(n)).collect()
    }

    /// Entry `(n, k)` of the convolution by the even sequence with cosine
    /// coefficients `u`.
    pub fn conv_entry(self, u: &[Interval], n: i64, k: i64) -> Interval {
        let get = |j: u64| u.get(j as usize).copied().unwrap_or(Interval::ZERO);
        match self {
            Basis::Cosine if k == 0 => get(n.unsigned_abs()),
            Basis::Cosine => get(n.abs_diff(k)) + get((n + k).unsigned_abs()),
            Basis::Exp => get(n.abs_diff(k)),
        }
    }

    /// Matrix of the convolution by `u` between two mode lists.
    pub fn conv_matrix(self, u: &[Interval], rows: &[i64], cols: &[i64]) -> IMatrix {
        IMatrix::from_fn(rows.len(), cols.len(), |i, j| self.conv_entry(u, rows[i], cols[j]))
    }

    /// Weighted `ℓ²` operator-norm bound of a matrix between mode lists.
    pub fn op_norm(self, m: &IMatrix, rows: &[i64], cols: &[i64]) -> Result<Interval> {
        weighted_norm2_upper(m, &self.weights(rows), &self.weights(cols))
    }

    /// `ℓ¹` norm `Σ_{k∈ℤ} |u_{|k|}|` of an even sequence given by its cosine
    /// coefficients; identical in both bases.
    pub fn even_norm1(u: &[Interval]) -> Interval {
        u.iter()
            .enumerate()
            .map(|(n, x)| x.abs() * if n == 0 { 1.0 } else { 2.0 })
            .sum()
    }
}

/// The operator `K = I + P Conv(V) Q`, optionally bordered.
///
/// With a border vector `ψ` (exponential basis only) the finite block is
///
/// ```text
/// [  0        -(Qψ)ᵀ ]
/// [ -ψ     I + P Conv(V) Q ],
/// ```
///
/// the first coordinate being a scalar with unit weight.
#[derive(Debug, Clone)]
pub struct LinearizedOp {
    /// Coordinate system.
    pub basis: Basis,
    /// Truncation order `N`.
    pub n: usize,
    /// Cosine coefficients of the even convolution sequence `V`.
    pub v: Vec<Interval>,
    /// Left multiplier `P(|n|)` for `|n| ≤ 3N`.
    pub left: Vec<Interval>,
    /// Right multiplier `Q(|k|)` for `|k| ≤ 2N`.
    pub right: Vec<Interval>,
    /// Border values `ψ_{-N..N}`.
    pub border: Option<Vec<Interval>>,
}

/// Coordinates of the finite block: modes `|n| ≤ N`, preceded by the border
/// scalar when present. The scalar is encoded as `None`.
pub type FiniteCoord = Option<i64>;

impl LinearizedOp {
    /// Validates shapes.
    pub fn new(basis: Basis, n: usize, v: Vec<Interval>, left: Vec<Interval>, right: Vec<Interval>, border: Option<Vec<Interval>>) -> Result<Self> {
        if v.len() > n + 1 || left.len() < 2 * n + 1 || right.len() < 2 * n + 1 {
            return Err(Error::DimensionMismatch("linearized operator data has the wrong length".into()));
        }
        if let Some(b) = &border {
            if basis != Basis::Exp || b.len() != 2 * n + 1 {
                return Err(Error::DimensionMismatch("border must be an exponential vector on -N..N".into()));
            }
        }
        Ok(LinearizedOp { basis, n, v, left, right, border })
    }

    /// Coordinates of the finite block.
    pub fn finite_coords(&self) -> Vec<FiniteCoord> {
        let mut out: Vec<FiniteCoord> = Vec::new();
        if self.border.is_some() {
            out.push(None);
        }
        out.extend(self.basis.band(0, self.n).into_iter().map(Some));
        out
    }

    /// Square-root weights of the finite coordinates.
    pub fn finite_weights(&self) -> Vec<Interval> {
        self.finite_coords()
            .iter()
            .map(|c| c.map_or(Interval::ONE, |n| self.basis.sqrt_weight(n)))
            .collect()
    }

    fn border_at(&self, n: i64) -> Interval {
        match &self.border {
            Some(b) if n.unsigned_abs() as usize <= self.n => b[(n + self.n as i64) as usize],
            _ => Interval::ZERO,
        }
    }

    /// Entry `(n, k)` of `P Conv(V) Q` (without the identity).
    pub fn perturbation(&self, n: i64, k: i64) -> Interval {
        let c = self.basis.conv_entry(&self.v, n, k);
        if c.lo() == 0.0 && c.hi() == 0.0 {
            return Interval::ZERO;
        }
        self.left[n.unsigned_abs() as usize] * c * self.right[k.unsigned_abs() as usize]
    }

    /// Entry of the bordered operator between a row coordinate and a column
    /// coordinate.
    pub fn entry(&self, row: FiniteCoord, col: FiniteCoord) -> Interval {
        match (row, col) {
            (None, None) => Interval::ZERO,
            (None, Some(k)) => -(self.border_at(k) * self.right[k.unsigned_abs() as usize]),
            (Some(n), None) => -self.border_at(n),
            (Some(n), Some(k)) => {
                let id = if n == k { Interval::ONE } else { Interval::ZERO };
                id + self.perturbation(n, k)
            }
        }
    }

    /// The finite block of `K` on the finite coordinates.
    pub fn finite_block(&self) -> IMatrix {
        let c = self.finite_coords();
        IMatrix::from_fn(c.len(), c.len(), |i, j| self.entry(c[i], c[j]))
    }

    /// Columns of `K` on the finite coordinates, restricted to the rows
    /// `|n| ≤ 2N` (listed as `band(0, N)` followed by `band(N+1, 2N)`).
    pub fn columns(&self) -> (Vec<i64>, IMatrix) {
        let mut rows = self.basis.band(0, self.n);
        rows.extend(self.basis.band(self.n + 1, 2 * self.n));
        let cols = self.finite_coords();
        let m = IMatrix::from_fn(rows.len(), cols.len(), |i, j| self.entry(Some(rows[i]), cols[j]));
        (rows, m)
    }

    /// Block of `K` with finite-coordinate rows and columns `N < |k| ≤ 2N`.
    pub fn offdiag_block(&self) -> (Vec<i64>, IMatrix) {
        let rows = self.finite_coords();
        let cols = self.basis.band(self.n + 1, 2 * self.n);
        let m = IMatrix::from_fn(rows.len(), cols.len(), |i, j| match rows[i] {
            None => Interval::ZERO,
            Some(n) => self.perturbation(n, cols[j]),
        });
        (cols, m)
    }
}

/// Approximate inverse `B = B^N π^N + π_N 𝕎` with its certified norm data.
#[derive(Debug, Clone)]
pub struct ApproxInverse {
    /// Finite block `B^N` (a point matrix).
    pub bn: IMatrix,
    /// Cosine coefficients of `W` (absent when `𝕎 = I`).
    pub w: Option<Vec<Interval>>,
    /// Bound on `‖B^N‖`.
    pub norm_bn: Interval,
    /// Bound on `‖W‖₁` (equal to 1 when `𝕎 = I`).
    pub norm_w1: Interval,
    /// Bound on `‖π_N 𝕎 π^N‖`.
    pub norm_w_offdiag: Interval,
    /// Bound on `‖B‖`, at least 1.
    pub norm_b: Interval,
}

impl ApproxInverse {
    /// Inverts the finite block of `op` in floating point and certifies the
    /// norm of the resulting operator.
    pub fn assemble(op: &LinearizedOp, w: Option<Vec<f64>>) -> Result<Self> {
        let block = op.finite_block();
        let bn_mid: DMatrix<f64> = invert(block.mid())?;
        let bn = IMatrix::from_point(bn_mid);
        let fw = op.finite_weights();
        let norm_bn = weighted_norm2_upper(&bn, &fw, &fw)?;
        let (w, norm_w1, norm_w_offdiag) = match w {
            None => (None, Interval::ONE, Interval::ZERO),
            Some(w) => {
                if w.len() > op.n + 1 {
                    return Err(Error::DimensionMismatch("W has more than N + 1 modes".into()));
                }
                let w: Vec<Interval> = w.into_iter().map(Interval::point).collect();
                let rows = op.basis.band(op.n + 1, 2 * op.n);
                let cols = op.basis.band(0, op.n);
                let off = op.basis.conv_matrix(&w, &rows, &cols);
                let norm_off = op.basis.op_norm(&off, &rows, &cols)?;
                let n1 = Basis::even_norm1(&w);
                (Some(w), n1, norm_off)
            }
        };
        let norm_b = Interval::new(0.0, (norm_bn.hi().max(norm_w1.hi()) + norm_w_offdiag).hi().max(1.0));
        Ok(ApproxInverse { bn, w, norm_bn, norm_w1, norm_w_offdiag, norm_b })
    }
}

/// Finite parts of the defect `‖I - B K‖`.
#[derive(Debug, Clone, Copy)]
pub struct FiniteDefect {
    /// `‖π^N (I - B^N K) π^N‖` on the finite coordinates.
    pub z11_top: Interval,
    /// `‖π_N 𝕎 K π^N‖`.
    pub z11_tail: Interval,
    /// `‖B^N π^N K π_N‖`.
    pub z12: Interval,
}

impl FiniteDefect {
    /// `(z11_top² + z11_tail² + z12²)^{1/2}`.
    pub fn combined(&self) -> Interval {
        (self.z11_top.sqr() + self.z11_tail.sqr() + self.z12.sqr()).sqrt_nonneg().unwrap_or(Interval::ENTIRE)
    }
}

/// Computes the finite parts of `‖I - B K‖` in the weighted norm of the basis.
pub fn finite_defect(op: &LinearizedOp, inv: &ApproxInverse) -> Result<FiniteDefect> {
    let fw = op.finite_weights();
    let block = op.finite_block();
    let dim = block.nrows();
    let top = IMatrix::identity(dim).sub(&inv.bn.mul(&block)?)?;
    let z11_top = weighted_norm2_upper(&top, &fw, &fw)?;

    let z11_tail = match &inv.w {
        None => {
            let (rows_all, cols) = op.columns();
            let head = op.basis.band(0, op.n).len();
            let tail_rows = &rows_all[head..];
            if tail_rows.is_empty() {
                Interval::ZERO
            } else {
                let tail = cols.block(head, 0, tail_rows.len(), cols.ncols());
                weighted_norm2_upper(&tail, &op.basis.weights(tail_rows), &fw)?
            }
        }
        Some(w) => {
            let (rows_all, cols) = op.columns();
            let tail_rows = op.basis.band(op.n + 1, 3 * op.n);
            let cw = op.basis.conv_matrix(w, &tail_rows, &rows_all);
            let prod = cw.mul(&cols)?;
            weighted_norm2_upper(&prod, &op.basis.weights(&tail_rows), &fw)?
        }
    };

    let (off_cols, off) = op.offdiag_block();
    let z12 = if off_cols.is_empty() {
        Interval::ZERO
    } else {
        let prod = inv.bn.mul(&off)?;
        weighted_norm2_upper(&prod, &fw, &op.basis.weights(&off_cols))?
    };
    Ok(FiniteDefect { z11_top, z11_tail, z12 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_op(basis: Basis) -> LinearizedOp {
        let n = 6;
        let v = vec![Interval::point(0.1), Interval::point(0.05), Interval::point(0.01)];
        let left = vec![Interval::point(2.0); 3 * n + 1];
        let right: Vec<Interval> = (0..=2 * n).map(|k| Interval::point(-1.0 / (1.0 + k as f64))).collect();
        LinearizedOp::new(basis, n, v, left, right, None).unwrap()
    }

    #[test]
    fn exact_inverse_has_tiny_top_defect() {
        for basis in [Basis::Cosine, Basis::Exp] {
            let op = small_op(basis);
            let inv = ApproxInverse::assemble(&op, None).unwrap();
            let d = finite_defect(&op, &inv).unwrap();
            assert!(d.z11_top.hi() < 1e-12, "{basis:?} {:?}", d.z11_top);
            assert!(d.z12.hi() > 0.0 && d.z12.hi() < 1.0);
            assert!(inv.norm_b.hi() >= 1.0);
        }
    }

    #[test]
    fn bands_partition_modes() {
        assert_eq!(Basis::Exp.band(0, 2), vec![-2, -1, 0, 1, 2]);
        assert_eq!(Basis::Exp.band(3, 4), vec![-4, -3, 3, 4]);
        assert_eq!(Basis::Cosine.band(3, 4), vec![3, 4]);
    }

    #[test]
    fn cosine_and_exp_norms_agree_on_even_operators() {
        let c = small_op(Basis::Cosine);
        let e = small_op(Basis::Exp);
        let nc = ApproxInverse::assemble(&c, None).unwrap().norm_bn.hi();
        let ne = ApproxInverse::assemble(&e, None).unwrap().norm_bn.hi();
        assert!(ne >= nc * (1.0 - 1e-9), "{nc} {ne}");
    }
}
