//! Fourier coefficient sequences on the half-period `(-d, d)`.
//!
//! [`CosineSeq`] holds the coefficients `u_0, …, u_N` of an even function
//!
//! ```text
//! u(x) = 1_{(-d,d)}(x) (u_0 + 2 Σ_{n≥1} u_n cos(nπx/d)),
//! ```
//!
//! with the weights `α_0 = 1`, `α_n = 2`, so that `‖U‖₂² = Σ α_n |u_n|²` and
//! `‖u‖²_{L²(-d,d)} = 2d ‖U‖₂²`. [`ExpSeq`] holds the full exponential
//! coefficients `k = -N..N` of a real function that is either even (real
//! coefficients) or odd (purely imaginary coefficients).
//!
//! Convolutions are computed directly in interval arithmetic; no FFT is used.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub mod physical;

pub use physical::{boundary_energy_upper, cosh_energy_cosine, cosh_energy_exp, cosh_energy_upper, TrigPoly};

use crate::error::{Error, Result};
use crate::rigor::Interval;
use crate::strip::StripData;
use crate::symbols::{grid_freq, l_nu, l_sym, m_t, SymbolParams};

/// Weight `α_n` of cosine mode `n`.
pub fn alpha(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2.0
    }
}

/// Even cosine coefficient sequence `u_0, …, u_N` on `(-d, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSeq {
    /// Half-period.
    pub d: f64,
    /// Coefficients `u_0, …, u_N`.
    pub coeffs: Vec<Interval>,
}

/// Whether the stored real numbers `w_k` are the coefficients themselves or
/// the coefficients divided by `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// Coefficient is `w_k`.
    Real,
    /// Coefficient is `i w_k`.
    Imag,
}

impl Phase {
    fn times(self, other: Phase) -> (Phase, bool) {
        match (self, other) {
            (Phase::Real, Phase::Real) => (Phase::Real, false),
            (Phase::Real, Phase::Imag) | (Phase::Imag, Phase::Real) => (Phase::Imag, false),
            (Phase::Imag, Phase::Imag) => (Phase::Real, true),
        }
    }
}

/// Exponential coefficient sequence indexed by `k = -N..N` (stored at `k + N`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSeq {
    /// Half-period.
    pub d: f64,
    /// Phase of the stored values.
    pub phase: Phase,
    /// Values `w_{-N}, …, w_N`.
    pub coeffs: Vec<Interval>,
}

fn check_d(a: f64, b: f64) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("half-periods {a} and {b} differ")));
    }
    Ok(())
}

impl CosineSeq {
    /// Builds a sequence from interval coefficients.
    pub fn new(d: f64, coeffs: Vec<Interval>) -> Self {
        CosineSeq { d, coeffs }
    }

    /// Thin-interval promotion of floating-point coefficients.
    pub fn from_f64(d: f64, coeffs: &[f64]) -> Self {
        CosineSeq { d, coeffs: coeffs.iter().map(|&x| Interval::point(x)).collect() }
    }

    /// All-zero sequence with `n + 1` coefficients.
    pub fn zeros(d: f64, n: usize) -> Self {
        CosineSeq { d, coeffs: vec![Interval::ZERO; n + 1] }
    }

    /// The unit `e_0` of the convolution algebra.
    pub fn e0(d: f64, n: usize) -> Self {
        let mut s = Self::zeros(d, n);
        s.coeffs[0] = Interval::ONE;
        s
    }

    /// Highest stored mode `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Midpoints of the coefficients.
    pub fn mids(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.mid()).collect()
    }

    /// Coefficient `u_n`, zero beyond the stored range.
    pub fn get(&self, n: usize) -> Interval {
        self.coeffs.get(n).copied().unwrap_or(Interval::ZERO)
    }

    /// Copy padded with zeros or truncated to highest mode `n`.
    pub fn resized(&self, n: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(n + 1, Interval::ZERO);
        CosineSeq { d: self.d, coeffs: c }
    }

    /// Coefficients of modes `lo..=hi`, all others set to zero.
    pub fn band(&self, lo: usize, hi: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if n >= lo && n <= hi { *c } else { Interval::ZERO })
            .collect();
        CosineSeq { d: self.d, coeffs }
    }

    /// Entrywise sum, padding the shorter operand.
    pub fn add(&self, other: &CosineSeq) -> Result<CosineSeq> {
        check_d(self.d, other.d)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(CosineSeq { d: self.d, coeffs: (0..n).map(|k| self.get(k) + other.get(k)).collect() })
    }

    /// Entrywise difference, padding the shorter operand.
    pub fn sub(&self, other: &CosineSeq) -> Result<CosineSeq> {
        check_d(self.d, other.d)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(CosineSeq { d: self.d, coeffs: (0..n).map(|k| self.get(k) - other.get(k)).collect() })
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, s: Interval) -> CosineSeq {
        CosineSeq { d: self.d, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    /// Entrywise multiplication by `f(n)`.
    pub fn map_modes<F: Fn(usize) -> Interval + Sync>(&self, f: F) -> CosineSeq {
        CosineSeq { d: self.d, coeffs: self.coeffs.par_iter().enumerate().map(|(n, c)| *c * f(n)).collect() }
    }

    /// Weighted norm `‖U‖₂ = (Σ α_n |u_n|²)^{1/2}`.
    pub fn norm2(&self) -> Interval {
        inner(self, self).and_then(|v| v.sqrt_nonneg()).expect("nonnegative squared norm")
    }

    /// Weighted norm `‖U‖₁ = Σ α_n |u_n|`, an upper bound for `sup |u|`.
    pub fn norm1(&self) -> Interval {
        self.coeffs.iter().enumerate().map(|(n, c)| c.abs() * alpha(n)).sum()
    }

    /// Full symmetric exponential representation `(u_{|k|})_{k=-N..N}`.
    pub fn to_exp(&self) -> ExpSeq {
        let n = self.order() as i64;
        ExpSeq {
            d: self.d,
            phase: Phase::Real,
            coeffs: (-n..=n).map(|k| self.coeffs[k.unsigned_abs() as usize]).collect(),
        }
    }

    /// Derivative as an odd exponential sequence: `(∂u)_k = i(πk/d) u_{|k|}`.
    pub fn derivative(&self) -> ExpSeq {
        self.to_exp().derivative()
    }

    /// Second derivative: `(u'')_n = -(nπ/d)² u_n`.
    pub fn second_derivative(&self) -> CosineSeq {
        let d = self.d;
        self.map_modes(|n| -grid_freq(n as i64, d).sqr())
    }

    /// Enclosure of the function value `u(x)` for `|x| ≤ d`.
    pub fn eval(&self, x: f64) -> Interval {
        let pi = Interval::pi();
        let xi = Interval::point(x);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| *c * alpha(n) * (pi * (n as f64) * xi / self.d).cos())
            .sum()
    }
}

impl ExpSeq {
    /// Builds a sequence from its values `w_{-N..N}`.
    pub fn new(d: f64, phase: Phase, coeffs: Vec<Interval>) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::DimensionMismatch("exponential sequence needs odd length".into()));
        }
        Ok(ExpSeq { d, phase, coeffs })
    }

    /// Thin-interval promotion of floating-point values.
    pub fn from_f64(d: f64, phase: Phase, w: &[f64]) -> Result<Self> {
        Self::new(d, phase, w.iter().map(|&x| Interval::point(x)).collect())
    }

    /// Highest stored frequency index `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Value at index `k`, zero beyond the stored range.
    pub fn get(&self, k: i64) -> Interval {
        let n = self.order() as i64;
        if k.abs() > n {
            Interval::ZERO
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Midpoints of the stored values.
    pub fn mids(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.mid()).collect()
    }

    /// Derivative; flips the phase.
    pub fn derivative(&self) -> ExpSeq {
        let n = self.order() as i64;
        let sign = match self.phase {
            Phase::Real => 1.0,
            Phase::Imag => -1.0,
        };
        let coeffs = (-n..=n)
            .map(|k| self.get(k) * grid_freq(k, self.d) * sign)
            .collect();
        ExpSeq {
            d: self.d,
            phase: match self.phase {
                Phase::Real => Phase::Imag,
                Phase::Imag => Phase::Real,
            },
            coeffs,
        }
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, s: Interval) -> ExpSeq {
        ExpSeq { d: self.d, phase: self.phase, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    /// Entrywise multiplication by `f(k)`.
    pub fn map_modes<F: Fn(i64) -> Interval + Sync>(&self, f: F) -> ExpSeq {
        let n = self.order() as i64;
        ExpSeq {
            d: self.d,
            phase: self.phase,
            coeffs: self.coeffs.par_iter().enumerate().map(|(j, c)| *c * f(j as i64 - n)).collect(),
        }
    }

    /// Unweighted `ℓ²` norm.
    pub fn norm2(&self) -> Interval {
        let s: Interval = self.coeffs.iter().map(|c| c.sqr()).sum();
        Interval::new(s.lo().max(0.0), s.hi()).sqrt().expect("nonnegative")
    }

    /// Unweighted `ℓ¹` norm.
    pub fn norm1(&self) -> Interval {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Difference of two sequences of the same phase.
    pub fn sub(&self, other: &ExpSeq) -> Result<ExpSeq> {
        check_d(self.d, other.d)?;
        if self.phase != other.phase {
            return Err(Error::DimensionMismatch("phases differ".into()));
        }
        let n = self.order().max(other.order()) as i64;
        Ok(ExpSeq { d: self.d, phase: self.phase, coeffs: (-n..=n).map(|k| self.get(k) - other.get(k)).collect() })
    }

    /// Enclosure of `ψ(x)` for `|x| ≤ d`.
    pub fn eval(&self, x: f64) -> Interval {
        let n = self.order() as i64;
        let pi = Interval::pi();
        let xi = Interval::point(x);
        (-n..=n)
            .map(|k| {
                let arg = pi * (k as f64) * xi / self.d;
                match self.phase {
                    Phase::Real => self.get(k) * arg.cos(),
                    Phase::Imag => -(self.get(k) * arg.sin()),
                }
            })
            .sum()
    }
}

/// Discrete convolution of full exponential value arrays.
fn conv_full(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let na = a.len() as i64 / 2;
    let nb = b.len() as i64 / 2;
    let n = na + nb;
    (-n..=n)
        .into_par_iter()
        .map(|k| {
            let lo = (-na).max(k - nb);
            let hi = na.min(k + nb);
            let mut acc = Interval::ZERO;
            for j in lo..=hi {
                acc += a[(j + na) as usize] * b[(k - j + nb) as usize];
            }
            acc
        })
        .collect()
}

/// Convolution `U * V` of two cosine sequences: the coefficients of the
/// pointwise product on `(-d, d)`, kept on all `|U| + |V| - 1` modes.
pub fn conv_even(u: &CosineSeq, v: &CosineSeq) -> Result<CosineSeq> {
    check_d(u.d, v.d)?;
    let full = conv_full(&u.to_exp().coeffs, &v.to_exp().coeffs);
    let n = full.len() / 2;
    Ok(CosineSeq { d: u.d, coeffs: full[n..].to_vec() })
}

/// Convolution of two exponential sequences; phases multiply.
pub fn conv_exp(u: &ExpSeq, v: &ExpSeq) -> Result<ExpSeq> {
    check_d(u.d, v.d)?;
    let (phase, negate) = u.phase.times(v.phase);
    let mut coeffs = conv_full(&u.coeffs, &v.coeffs);
    if negate {
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    Ok(ExpSeq { d: u.d, phase, coeffs })
}

/// Weighted inner product `Σ α_n u_n v_n` of two cosine sequences.
pub fn inner(u: &CosineSeq, v: &CosineSeq) -> Result<Interval> {
    check_d(u.d, v.d)?;
    let n = u.coeffs.len().min(v.coeffs.len());
    Ok((0..n).map(|k| u.coeffs[k] * v.coeffs[k] * alpha(k)).sum())
}

/// Weighted inner product `Σ α_n u_n v_n w_n` with extra weights `w_n`
/// (for example `|l(ξ_n)|²`).
pub fn inner_weighted<F: Fn(usize) -> Interval>(u: &CosineSeq, v: &CosineSeq, w: F) -> Result<Interval> {
    check_d(u.d, v.d)?;
    let n = u.coeffs.len().min(v.coeffs.len());
    Ok((0..n).map(|k| u.coeffs[k] * v.coeffs[k] * w(k) * alpha(k)).sum())
}

/// `ℓ²` inner product of two exponential sequences of the same phase.
pub fn inner_exp(u: &ExpSeq, v: &ExpSeq) -> Result<Interval> {
    check_d(u.d, v.d)?;
    if u.phase != v.phase {
        return Err(Error::DimensionMismatch("inner product of sequences with different phases".into()));
    }
    let n = u.order().min(v.order()) as i64;
    Ok((-n..=n).map(|k| u.get(k) * v.get(k)).sum())
}

/// Scaled cosine coefficients of `1_{(-d,d)} cosh(2βx)`.
///
/// Returns `Ê_n = β(-1)^n (1 - e^{-4βd}) / (d(4β² + (nπ/d)²))` for
/// `n = 0..=n_max`, so that `e^{2βd} Ê_n` are the exact coefficients. The
/// large factor is kept out of the enclosure to avoid overflow.
pub fn cosh_coeffs(beta: Interval, d: f64, n_max: usize) -> CosineSeq {
    let di = Interval::point(d);
    let num = beta * (1.0 - (-(beta * di * 4.0)).exp()) / di;
    let b2 = beta.sqr() * 4.0;
    let coeffs = (0..=n_max)
        .map(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            num * s / (b2 + grid_freq(n as i64, d).sqr())
        })
        .collect();
    CosineSeq { d, coeffs }
}

/// Quadratic form `Σ_{j,k} w_j Ê_{|j-k|} w_k` over full exponential values,
/// which equals `(V, Ê * V)` for the sequence `V` the values represent.
pub fn cosh_quadratic_form(w: &[Interval], e: &CosineSeq) -> Result<Interval> {
    let n = w.len();
    if e.coeffs.len() < n {
        return Err(Error::DimensionMismatch("cosh coefficients too short for quadratic form".into()));
    }
    let partial: Vec<Interval> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = Interval::ZERO;
            for k in 0..n {
                acc += e.coeffs[j.abs_diff(k)] * w[k];
            }
            acc * w[j]
        })
        .collect();
    Ok(partial.into_iter().sum())
}

/// Fourier multiplier selector for [`apply_multiplier`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `l(ξ) = (m_T - c) l_ν`.
    L,
    /// `1/l(ξ)`; needs a strip certificate.
    LInv,
    /// `m_T(ξ)`.
    MT,
    /// `l_ν(ξ)`.
    LNu,
    /// `l_ν(ξ)²`.
    LNu2,
    /// Derivative, exponential sequences only.
    D,
    /// `1/(m_T - c)`; needs a strip certificate.
    MMinusCInv,
    /// Shifted spectral symbol `l_λ`.
    LLambda(f64),
    /// `1/l_λ`; needs a strip certificate and `λ < σ0`.
    LLambdaInv(f64),
}

/// Spectral symbol `l_λ(ξ)`: `c - λ - m_T(ξ)` when `T = 0`, `m_T(ξ) - c - λ`
/// when `T > 0`.
pub fn l_lambda(p: &SymbolParams, lambda: f64, xi: Interval) -> Interval {
    let m = m_t(p, xi);
    if p.is_gravity() {
        (p.c - m) - lambda
    } else {
        (m - p.c) - lambda
    }
}

fn symbol_value(m: Multiplier, p: &SymbolParams, strip: Option<&StripData>, xi: Interval) -> Result<Interval> {
    let certified = |s: Option<&StripData>| -> Result<()> {
        match s {
            Some(s) if s.verified && s.t == p.t && s.c == p.c => Ok(()),
            _ => Err(Error::MissingStripCertificate),
        }
    };
    let nonzero = |v: Interval| -> Result<Interval> { v.recip() };
    Ok(match m {
        Multiplier::L => l_sym(p, xi),
        Multiplier::LInv => {
            certified(strip)?;
            nonzero(l_sym(p, xi))?
        }
        Multiplier::MT => m_t(p, xi),
        Multiplier::LNu => l_nu(p, xi),
        Multiplier::LNu2 => l_nu(p, xi).sqr(),
        Multiplier::D => return Err(Error::Domain("derivative needs an exponential sequence".into())),
        Multiplier::MMinusCInv => {
            certified(strip)?;
            nonzero(m_t(p, xi) - p.c)?
        }
        Multiplier::LLambda(l) => l_lambda(p, l, xi),
        Multiplier::LLambdaInv(l) => {
            certified(strip)?;
            if !(l < strip.map_or(f64::NEG_INFINITY, |s| s.sigma0)) {
                return Err(Error::Domain(format!("shift {l} is not below σ0")));
            }
            nonzero(l_lambda(p, l, xi))?
        }
    })
}

/// Applies a Fourier multiplier to a cosine sequence, entrywise at `ξ_n = nπ/d`.
pub fn apply_multiplier(m: Multiplier, p: &SymbolParams, strip: Option<&StripData>, u: &CosineSeq) -> Result<CosineSeq> {
    let vals: Vec<Interval> = (0..u.coeffs.len())
        .map(|n| symbol_value(m, p, strip, grid_freq(n as i64, u.d)))
        .collect::<Result<_>>()?;
    Ok(CosineSeq { d: u.d, coeffs: u.coeffs.iter().zip(vals).map(|(c, s)| *c * s).collect() })
}

/// Applies a Fourier multiplier to an exponential sequence.
pub fn apply_multiplier_exp(m: Multiplier, p: &SymbolParams, strip: Option<&StripData>, u: &ExpSeq) -> Result<ExpSeq> {
    if m == Multiplier::D {
        return Ok(u.derivative());
    }
    let n = u.order() as i64;
    let vals: Vec<Interval> = (-n..=n)
        .map(|k| symbol_value(m, p, strip, grid_freq(k, u.d)))
        .collect::<Result<_>>()?;
    Ok(ExpSeq { d: u.d, phase: u.phase, coeffs: u.coeffs.iter().zip(vals).map(|(c, s)| *c * s).collect() })
}

/// Gaussian elimination with partial pivoting on a small interval system.
fn solve_small(mut g: Vec<Vec<Interval>>, mut b: Vec<Interval>) -> Result<Vec<Interval>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| g[i][col].mig().total_cmp(&g[j][col].mig()))
            .expect("nonempty");
        if g[piv][col].contains_zero() {
            return Err(Error::SingularTraceGram);
        }
        g.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = g[row][col] / g[col][col];
            for k in col..n {
                let t = g[col][k];
                g[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![Interval::ZERO; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= g[i][k] * x[k];
        }
        x[i] = s.checked_div(&g[i][i]).map_err(|_| Error::SingularTraceGram)?;
    }
    Ok(x)
}

/// Trace functional `𝒯_j(U) = Σ α_n u_n (-1)^n (nπ/d)^j` of a cosine sequence.
pub fn trace_functional(u: &CosineSeq, j: u32) -> Interval {
    u.coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            *c * (alpha(n) * s) * grid_freq(n as i64, u.d).powi(j)
        })
        .sum()
}

/// Projects `Ũ` onto the null space of the traces of orders 0 and 2:
/// `U = Ũ - D𝒯*(𝒯D𝒯*)⁻¹𝒯Ũ` with `D = diag(1/l(ξ_n))`.
///
/// The result represents a function whose extension by zero outside
/// `(-d, d)` is `H⁴` on the real line.
pub fn trace_project(u: &CosineSeq, p: &SymbolParams) -> Result<CosineSeq> {
    let d = u.d;
    let n = u.coeffs.len();
    let dinv: Vec<Interval> = (0..n)
        .map(|k| l_sym(p, grid_freq(k as i64, d)).recip())
        .collect::<Result<_>>()
        .map_err(|_| Error::SingularTraceGram)?;
    let orders = [0u32, 2];
    let tau = |j: u32, k: usize| -> Interval {
        let s = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        grid_freq(k as i64, d).powi(j) * s
    };
    let g: Vec<Vec<Interval>> = orders
        .iter()
        .map(|&i| {
            orders
                .iter()
                .map(|&j| (0..n).map(|k| tau(i, k) * tau(j, k) * dinv[k] * alpha(k)).sum())
                .collect()
        })
        .collect();
    let rhs: Vec<Interval> = orders.iter().map(|&j| trace_functional(u, j)).collect();
    let y = solve_small(g, rhs)?;
    let coeffs = (0..n)
        .map(|k| {
            let corr: Interval = orders.iter().zip(&y).map(|(&j, yj)| tau(j, k) * *yj).sum();
            u.coeffs[k] - dinv[k] * corr
        })
        .collect();
    Ok(CosineSeq { d, coeffs })
}

/// Trace functional of order `j` of an exponential sequence, returned as the
/// real factor of `ψ^{(j)}(d)` (the imaginary unit implied by the phase and
/// by `i^j` is dropped).
pub fn trace_functional_exp(u: &ExpSeq, j: u32) -> Interval {
    let n = u.order() as i64;
    (-n..=n)
        .map(|k| {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            u.get(k) * s * grid_freq(k, u.d).powi(j)
        })
        .sum()
}

/// Exponential analogue of [`trace_project`]: removes the traces of orders
/// 0 to 3 with the diagonal weight `D = diag(dinv_k)`.
///
/// Even (real-phase) sequences only carry the even orders and odd
/// (imaginary-phase) sequences only the odd ones, so two conditions are
/// imposed in each case.
pub fn trace_project_exp(u: &ExpSeq, dinv: &[Interval]) -> Result<ExpSeq> {
    let n = u.order() as i64;
    if dinv.len() != u.coeffs.len() {
        return Err(Error::DimensionMismatch("weight length".into()));
    }
    let orders: [u32; 2] = match u.phase {
        Phase::Real => [0, 2],
        Phase::Imag => [1, 3],
    };
    let d = u.d;
    let tau = |j: u32, k: i64| -> Interval {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        grid_freq(k, d).powi(j) * s
    };
    let g: Vec<Vec<Interval>> = orders
        .iter()
        .map(|&i| {
            orders
                .iter()
                .map(|&j| (-n..=n).map(|k| tau(i, k) * tau(j, k) * dinv[(k + n) as usize]).sum())
                .collect()
        })
        .collect();
    let rhs: Vec<Interval> = orders.iter().map(|&j| trace_functional_exp(u, j)).collect();
    let y = solve_small(g, rhs)?;
    let coeffs = (-n..=n)
        .map(|k| {
            let corr: Interval = orders.iter().zip(&y).map(|(&j, yj)| tau(j, k) * *yj).sum();
            u.get(k) - dinv[(k + n) as usize] * corr
        })
        .collect();
    Ok(ExpSeq { d, phase: u.phase, coeffs })
}

/// Exact `∫_{d-1}^{d} |v'(x)|² dx` for the derivative of an even cosine
/// series `v`, using product-to-sum closed forms.
///
/// With `v'(x) = -2 Σ_{n≥1} ξ_n v_n sin(ξ_n x)`, the integral of
/// `sin(ξ_n x) sin(ξ_m x)` over `[d - 1, d]` is evaluated in closed form.
pub fn boundary_energy(v: &CosineSeq) -> Interval {
    let d = v.d;
    let n = v.order();
    let b: Vec<Interval> = (0..=n).map(|k| v.coeffs[k] * grid_freq(k as i64, d) * 2.0).collect();
    let pi = Interval::pi();
    let lo = Interval::point(d - 1.0);
    let hi = Interval::point(d);
    // ∫ cos(ωx) over [d-1, d], with ω = kπ/d; equals 1 for ω = 0.
    let cos_int = |k: usize| -> Interval {
        if k == 0 {
            return Interval::ONE;
        }
        let w = pi * (k as f64) / d;
        ((w * hi).sin() - (w * lo).sin()) / w
    };
    let ci: Vec<Interval> = (0..=2 * n).map(cos_int).collect();
    let rows: Vec<Interval> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Interval::ZERO;
            for j in 1..=n {
                // sin a sin b = (cos(a-b) - cos(a+b))/2
                let term = (ci[i.abs_diff(j)] - ci[i + j]) * 0.5;
                acc += b[j] * term;
            }
            acc * b[i]
        })
        .collect();
    let s: Interval = rows.into_iter().sum();
    Interval::new(s.lo().max(0.0), s.hi().max(0.0))
}

/// Same as [`boundary_energy`] for a real function given by an exponential
/// sequence, `∫_{d-1}^{d} |ψ'(x)|² dx`.
pub fn boundary_energy_exp(v: &ExpSeq) -> Interval {
    match v.phase {
        Phase::Real => {
            let n = v.order();
            let sym = CosineSeq {
                d: v.d,
                coeffs: (0..=n as i64).map(|k| (v.get(k) + v.get(-k)) * 0.5).collect(),
            };
            let anti = ExpSeq {
                d: v.d,
                phase: Phase::Real,
                coeffs: (-(n as i64)..=n as i64).map(|k| (v.get(k) - v.get(-k)) * 0.5).collect(),
            };
            let e_sym = boundary_energy(&sym);
            if anti.coeffs.iter().all(|c| c.mag() == 0.0) {
                e_sym
            } else {
                mixed_energy(e_sym, boundary_energy_odd(&anti))
            }
        }
        Phase::Imag => {
            let n = v.order() as i64;
            let odd = ExpSeq {
                d: v.d,
                phase: Phase::Imag,
                coeffs: (-n..=n).map(|k| (v.get(k) - v.get(-k)) * 0.5).collect(),
            };
            let even = CosineSeq {
                d: v.d,
                coeffs: (0..=n).map(|k| (v.get(k) + v.get(-k)) * 0.5).collect(),
            };
            let e_odd = boundary_energy_odd(&odd);
            if even.coeffs.iter().all(|c| c.mag() == 0.0) {
                e_odd
            } else {
                mixed_energy(e_odd, boundary_energy(&even))
            }
        }
    }
}

/// Enclosure of `‖f + g‖²` from enclosures of `‖f‖²` and `‖g‖²` by the
/// triangle inequality in both directions.
fn mixed_energy(a: Interval, b: Interval) -> Interval {
    let ra = Interval::new(a.lo().max(0.0), a.hi().max(0.0)).sqrt().unwrap_or(Interval::ENTIRE);
    let rb = Interval::new(b.lo().max(0.0), b.hi().max(0.0)).sqrt().unwrap_or(Interval::ENTIRE);
    let upper = (Interval::point(ra.hi()) + rb.hi()).sqr().hi();
    let gap = (Interval::point(ra.lo()) - rb.hi()).lo().max(0.0);
    Interval::new(Interval::point(gap).sqr().lo(), upper)
}

/// `∫_{d-1}^{d} |ψ'|²` for an odd function given by antisymmetric values
/// `w_k`, up to a unimodular phase.
fn boundary_energy_odd(v: &ExpSeq) -> Interval {
    // ψ(x) = -2 Σ_{k≥1} w_k sin(ξ_k x), ψ'(x) = -2 Σ ξ_k w_k cos(ξ_k x).
    let d = v.d;
    let n = v.order();
    let b: Vec<Interval> = (0..=n).map(|k| v.get(k as i64) * grid_freq(k as i64, d) * 2.0).collect();
    let pi = Interval::pi();
    let lo = Interval::point(d - 1.0);
    let hi = Interval::point(d);
    let cos_int = |k: usize| -> Interval {
        if k == 0 {
            return Interval::ONE;
        }
        let w = pi * (k as f64) / d;
        ((w * hi).sin() - (w * lo).sin()) / w
    };
    let ci: Vec<Interval> = (0..=2 * n).map(cos_int).collect();
    let rows: Vec<Interval> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Interval::ZERO;
            for j in 1..=n {
                // cos a cos b = (cos(a-b) + cos(a+b))/2
                let term = (ci[i.abs_diff(j)] + ci[i + j]) * 0.5;
                acc += b[j] * term;
            }
            acc * b[i]
        })
        .collect();
    let s: Interval = rows.into_iter().sum();
    Interval::new(s.lo().max(0.0), s.hi().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_neutral() {
        let u = CosineSeq::from_f64(2.0, &[0.3, -0.2, 0.1]);
        let e = CosineSeq::e0(2.0, 0);
        let w = conv_even(&e, &u).unwrap();
        for n in 0..3 {
            assert!(w.coeffs[n].contains(u.coeffs[n].mid()));
        }
    }

    #[test]
    fn square_of_two_modes() {
        let u = CosineSeq::from_f64(1.0, &[1.5, 0.5]);
        let w = conv_even(&u, &u).unwrap();
        assert!(w.coeffs[0].contains(1.5 * 1.5 + 2.0 * 0.25));
        assert!(w.coeffs[1].contains(2.0 * 1.5 * 0.5));
        assert!(w.coeffs[2].contains(0.25));
    }

    #[test]
    fn norms() {
        let u = CosineSeq::from_f64(1.0, &[1.0, 1.0]);
        assert!(inner(&u, &u).unwrap().contains(3.0));
        let e = CosineSeq::e0(1.0, 3);
        assert!(inner(&e, &e).unwrap().contains(1.0));
    }

    #[test]
    fn cosh_coefficient_zero() {
        let e = cosh_coeffs(Interval::ONE, 1.0, 4);
        let scaled = e.coeffs[0] * Interval::point(2.0).exp();
        assert!(scaled.contains(2f64.sinh() / 2.0) || (scaled.mid() - 2f64.sinh() / 2.0).abs() < 1e-14);
        assert!(e.coeffs[1].hi() < 0.0 && e.coeffs[2].lo() > 0.0);
    }

    #[test]
    fn trace_projection_kills_traces() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        let mut c = vec![0.0; 12];
        c[0] = 1.0;
        c[1] = 1.0;
        let u = CosineSeq::from_f64(std::f64::consts::PI, &c);
        let v = trace_project(&u, &p).unwrap();
        assert!(trace_functional(&v, 0).mag() < 1e-12);
        assert!(trace_functional(&v, 2).mag() < 1e-12);
        let w = trace_project(&v, &p).unwrap();
        for n in 0..12 {
            assert!((w.coeffs[n].mid() - v.coeffs[n].mid()).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplier_inverse_requires_certificate() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        let u = CosineSeq::e0(10.0, 4);
        assert_eq!(apply_multiplier(Multiplier::LInv, &p, None, &u), Err(Error::MissingStripCertificate));
        let l = apply_multiplier(Multiplier::L, &p, None, &u).unwrap();
        assert!(l.coeffs[0].contains(1.0 - 1.1));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let u = CosineSeq::from_f64(3.0, &[2.0]);
        let du = u.derivative();
        assert!(du.coeffs.iter().all(|c| c.mag() == 0.0));
        assert_eq!(du.phase, Phase::Imag);
    }

    #[test]
    fn boundary_energy_of_cosine() {
        // v = 2 v_1 cos(πx/d), v' = -2 v_1 (π/d) sin(πx/d)
        let d = 3.0;
        let v = CosineSeq::from_f64(d, &[0.0, 0.5]);
        let e = boundary_energy(&v);
        let w = std::f64::consts::PI / d;
        let exact = w * w * (0.5 - ((2.0 * w * d).sin() - (2.0 * w * (d - 1.0)).sin()) / (4.0 * w));
        assert!((e.mid() - exact).abs() < 1e-12, "{e:?} vs {exact}");
    }
}
