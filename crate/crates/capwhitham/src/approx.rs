//! Floating-point construction of the approximate objects entering the proofs.
//!
//! Nothing in this module is rigorous. It produces the approximate solution
//! `U0` by Newton's method from a KdV seed, the approximate inverses used as
//! preconditioners, the multiplication-operator inverse `W0`, and approximate
//! eigenpairs of the linearization. Every object produced here is later fed
//! into interval arithmetic, where its quality is measured rather than
//! trusted.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Phase;
use crate::symbols::{l_nu_f64, m_t_f64, SymbolParams};

/// Settings for the Newton solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Bond number.
    pub t: f64,
    /// Wave speed.
    pub c: f64,
    /// Half-period of the computational domain.
    pub d: f64,
    /// Highest cosine mode kept.
    pub n: usize,
    /// Stopping tolerance on the weighted residual norm.
    pub tol: f64,
    /// Maximum number of Newton iterations per solve.
    pub max_iter: usize,
    /// Maximum number of step halvings during speed continuation.
    pub max_halvings: usize,
}

impl SolveConfig {
    /// Defaults for the given parameters and discretization.
    pub fn new(t: f64, c: f64, d: f64, n: usize) -> Self {
        SolveConfig { t, c, d, n, tol: 1e-13, max_iter: 40, max_halvings: 12 }
    }
}

/// Approximate solution in cosine coefficients `u_0, …, u_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxSolution {
    /// Bond number.
    pub t: f64,
    /// Wave speed.
    pub c: f64,
    /// Half-period.
    pub d: f64,
    /// Cosine coefficients.
    pub coeffs: Vec<f64>,
    /// Weighted `ℓ²` norm of the final residual.
    pub residual: f64,
    /// Newton iterations spent in the final solve.
    pub iterations: usize,
}

/// Approximate eigenpair of the linearization on full exponential modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxEigenpair {
    /// Approximate eigenvalue.
    pub value: f64,
    /// Parity of the eigenvector: `Real` for even, `Imag` for odd.
    pub phase: Phase,
    /// Values `w_{-N..N}` normalized to unit `ℓ²` norm.
    pub vector: Vec<f64>,
}

fn freq(n: usize, d: f64) -> f64 {
    n as f64 * std::f64::consts::PI / d
}

/// Cosine weights `α_n` as floats.
fn alpha_f64(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2.0
    }
}

/// Weighted `ℓ²` norm `(Σ α_n u_n²)^{1/2}`.
pub fn weighted_norm(u: &[f64]) -> f64 {
    u.iter().enumerate().map(|(n, x)| alpha_f64(n) * x * x).sum::<f64>().sqrt()
}

/// Cosine coefficients of the KdV soliton approximating the wave.
///
/// The long-wave limit gives `u(x) = A sech²(Bx)` with
/// `β = (T - 1/3)/2`, `B² = (1 - c)/(4β)`, `A = -6βB²`, whose cosine
/// coefficients on `(-d, d)` are approximated by the Fourier transform
/// `û(ξ) = Aπξ / (B² sinh(πξ/(2B)))` divided by `2d`.
pub fn kdv_seed(t: f64, c: f64, d: f64, n: usize) -> Result<Vec<f64>> {
    let beta = (t - 1.0 / 3.0) / 2.0;
    if beta == 0.0 {
        return Err(Error::Config("no KdV seed at T = 1/3".into()));
    }
    let b2 = (1.0 - c) / (4.0 * beta);
    if !(b2 > 0.0) {
        return Err(Error::Config(format!("no KdV soliton for T={t}, c={c}")));
    }
    let b = b2.sqrt();
    let amp = -6.0 * beta * b2;
    let pi = std::f64::consts::PI;
    Ok((0..=n)
        .map(|k| {
            if k == 0 {
                amp * 2.0 / b / (2.0 * d)
            } else {
                let xi = freq(k, d);
                let arg = pi * xi / (2.0 * b);
                if arg > 700.0 {
                    0.0
                } else {
                    amp * pi * xi / (b2 * arg.sinh()) / (2.0 * d)
                }
            }
        })
        .collect())
}

/// Matrix of `V ↦ U * V` on cosine modes: rows `0..rows`, columns `0..cols`.
///
/// Entry `(n, 0)` is `u_n` and entry `(n, k)` for `k ≥ 1` is
/// `u_{|n-k|} + u_{n+k}`.
pub fn conv_matrix_f64(u: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    let get = |j: usize| u.get(j).copied().unwrap_or(0.0);
    DMatrix::from_fn(rows, cols, |n, k| if k == 0 { get(n) } else { get(n.abs_diff(k)) + get(n + k) })
}

/// Cosine coefficients of `U * V`, truncated to `U`'s length.
fn conv_trunc(u: &[f64], v: &[f64]) -> Vec<f64> {
    let m = conv_matrix_f64(u, u.len(), v.len());
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// Residual `F(U) = LU + L_ν(U * U)` on the modes of `U`.
pub fn residual_f64(p: &SymbolParams, d: f64, u: &[f64]) -> Vec<f64> {
    let nu = p.nu_f64();
    let uu = conv_trunc(u, u);
    (0..u.len())
        .map(|n| {
            let xi = freq(n, d);
            let lnu = l_nu_f64(nu, xi);
            (m_t_f64(p.t, xi) - p.c) * lnu * u[n] + lnu * uu[n]
        })
        .collect()
}

/// Jacobian `diag(l) + 2 diag(l_ν) Conv(U)` of [`residual_f64`].
pub fn jacobian_f64(p: &SymbolParams, d: f64, u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let nu = p.nu_f64();
    let mut j = conv_matrix_f64(u, n, n);
    for r in 0..n {
        let xi = freq(r, d);
        let lnu = l_nu_f64(nu, xi);
        j.row_mut(r).scale_mut(2.0 * lnu);
        j[(r, r)] += (m_t_f64(p.t, xi) - p.c) * lnu;
    }
    j
}

/// Runs Newton's method from `u` until the weighted residual drops below
/// `tol` or stops improving. Returns the iterate, its residual and the
/// number of iterations.
pub fn newton_refine(p: &SymbolParams, d: f64, mut u: Vec<f64>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64, usize)> {
    let mut res = weighted_norm(&residual_f64(p, d, &u));
    let mut stalled = 0;
    for it in 0..max_iter {
        if res < tol {
            return Ok((u, res, it));
        }
        let f = DVector::from_vec(residual_f64(p, d, &u));
        let step = jacobian_f64(p, d, &u).lu().solve(&f).ok_or(Error::SingularJacobian)?;
        let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a - b).collect();
        let new_res = weighted_norm(&residual_f64(p, d, &cand));
        if !new_res.is_finite() {
            return Err(Error::NoConvergence { iterations: it + 1, residual: new_res });
        }
        if new_res >= res {
            stalled += 1;
            if stalled >= 3 || res < 1e3 * tol {
                break;
            }
        } else {
            stalled = 0;
        }
        u = cand;
        res = new_res;
    }
    if res < 1e3 * tol {
        Ok((u, res, max_iter))
    } else {
        Err(Error::NoConvergence { iterations: max_iter, residual: res })
    }
}

/// Solves for the approximate wave: KdV seed, Newton, and on failure a speed
/// continuation from halfway between the critical speed `1` and `c`, halving
/// the step whenever Newton fails.
pub fn solve(cfg: &SolveConfig) -> Result<ApproxSolution> {
    let p = SymbolParams::new(cfg.t, cfg.c)?;
    let seed = kdv_seed(cfg.t, cfg.c, cfg.d, cfg.n)?;
    let (coeffs, residual, iterations) = match newton_refine(&p, cfg.d, seed, cfg.tol, cfg.max_iter) {
        Ok(r) => r,
        Err(_) => continuation(cfg)?,
    };
    if coeffs.iter().all(|x| x.abs() < 1e-12) {
        return Err(Error::NoConvergence { iterations, residual });
    }
    Ok(ApproxSolution { t: cfg.t, c: cfg.c, d: cfg.d, coeffs, residual, iterations })
}

fn continuation(cfg: &SolveConfig) -> Result<(Vec<f64>, f64, usize)> {
    let c0 = 1.0 + 0.5 * (cfg.c - 1.0);
    let p0 = SymbolParams::new(cfg.t, c0)?;
    let (mut u, _, _) = newton_refine(&p0, cfg.d, kdv_seed(cfg.t, c0, cfg.d, cfg.n)?, cfg.tol, cfg.max_iter)?;
    let mut c = c0;
    let mut step = (cfg.c - c0) / 4.0;
    let mut halvings = 0;
    loop {
        let next = if (cfg.c - c).abs() <= step.abs() { cfg.c } else { c + step };
        let p = SymbolParams::new(cfg.t, next)?;
        match newton_refine(&p, cfg.d, u.clone(), cfg.tol, cfg.max_iter) {
            Ok((v, res, it)) => {
                u = v;
                c = next;
                if c == cfg.c {
                    return Ok((u, res, it));
                }
            }
            Err(e) => {
                halvings += 1;
                if halvings > cfg.max_halvings {
                    return Err(e);
                }
                step /= 2.0;
            }
        }
    }
}

/// Cosine coefficients of `w = 1/(1 - 2u/s)` on modes `0..=n_out`, sampled
/// on a uniform grid of `(-d, d)` padded to eight points per mode.
///
/// Fails with [`Error::AssumptionViolated`] when `max u ≥ s/2`, where the
/// reciprocal does not exist.
pub fn build_w0(u: &[f64], s: f64, d: f64, n_out: usize) -> Result<Vec<f64>> {
    let modes = u.len().max(n_out + 1);
    let grid = (8 * modes).max(64);
    let xs: Vec<f64> = (0..grid).map(|j| -d + 2.0 * d * j as f64 / grid as f64).collect();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| {
            u.iter()
                .enumerate()
                .map(|(n, c)| alpha_f64(n) * c * (freq(n, d) * x).cos())
                .sum::<f64>()
        })
        .collect();
    let umax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(umax < s / 2.0) {
        return Err(Error::AssumptionViolated(format!("max u0 = {umax} is not below (c - λ)/2 = {}", s / 2.0)));
    }
    let w: Vec<f64> = vals.iter().map(|v| 1.0 / (1.0 - 2.0 * v / s)).collect();
    Ok((0..=n_out)
        .map(|n| {
            let xi = freq(n, d);
            xs.iter().zip(&w).map(|(x, wv)| wv * (xi * x).cos()).sum::<f64>() / grid as f64
        })
        .collect())
}

/// Floating-point inverse of a square matrix by LU decomposition.
pub fn invert(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().lu().try_inverse().ok_or(Error::SingularJacobian)
}

/// The approximate inverse `A^N ≈ J⁻¹` of the Jacobian on `N + 1` modes.
pub fn build_ant(p: &SymbolParams, d: f64, u: &[f64]) -> Result<DMatrix<f64>> {
    invert(&jacobian_f64(p, d, u))
}

/// Floating-point symbol of the self-adjoint linearization.
///
/// For `T = 0` the operator is `c - M_T - 2u0`, for `T > 0` it is
/// `M_T - c + 2u0`. This returns the diagonal part `l̃(ξ)` and the sign of
/// the multiplication part.
pub fn spectral_symbol_f64(p: &SymbolParams, xi: f64) -> (f64, f64) {
    let m = m_t_f64(p.t, xi);
    if p.is_gravity() {
        (p.c - m, -1.0)
    } else {
        (m - p.c, 1.0)
    }
}

/// Matrix of the linearization `L̃ ± 2u0` on exponential modes `-N..N`.
pub fn spectral_matrix_f64(p: &SymbolParams, d: f64, u: &[f64], n: usize) -> DMatrix<f64> {
    let size = 2 * n + 1;
    let get = |j: usize| u.get(j).copied().unwrap_or(0.0);
    let mut m = DMatrix::from_fn(size, size, |i, j| get(i.abs_diff(j)));
    for i in 0..size {
        let k = i as i64 - n as i64;
        let (diag, sign) = spectral_symbol_f64(p, k.unsigned_abs() as f64 * std::f64::consts::PI / d);
        m.row_mut(i).scale_mut(2.0 * sign);
        m[(i, i)] += diag;
    }
    m
}

/// Approximate eigenpairs of the linearization on modes `-N..N`, sorted by
/// increasing eigenvalue, limited to the `count` smallest.
pub fn approx_eigs(p: &SymbolParams, d: f64, u: &[f64], n: usize, count: usize) -> Vec<ApproxEigenpair> {
    let m = spectral_matrix_f64(p, d, u, n);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let size = 2 * n + 1;
    order
        .into_iter()
        .take(count)
        .map(|i| {
            let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let even: f64 = (0..size).map(|j| (v[j] + v[size - 1 - j]).powi(2)).sum();
            let odd: f64 = (0..size).map(|j| (v[j] - v[size - 1 - j]).powi(2)).sum();
            let phase = if even >= odd { Phase::Real } else { Phase::Imag };
            let mut w: Vec<f64> = (0..size)
                .map(|j| match phase {
                    Phase::Real => 0.5 * (v[j] + v[size - 1 - j]),
                    Phase::Imag => 0.5 * (v[j] - v[size - 1 - j]),
                })
                .collect();
            let pivot = w
                .iter()
                .cloned()
                .enumerate()
                .skip(n)
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(_, x)| x)
                .unwrap_or(1.0);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = pivot.signum() / norm;
            w.iter_mut().for_each(|x| *x *= s);
            ApproxEigenpair { value: eig.eigenvalues[i], phase, vector: w }
        })
        .collect()
}

/// Writes a coefficient file: `#`-prefixed `key=value` header lines followed
/// by one coefficient per line in round-trip precision.
pub fn write_coeffs(path: &Path, sol: &ApproxSolution) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# T={:e}", sol.t);
    let _ = writeln!(s, "# c={:e}", sol.c);
    let _ = writeln!(s, "# d={:e}", sol.d);
    let _ = writeln!(s, "# N={}", sol.coeffs.len() - 1);
    let _ = writeln!(s, "# residual={:e}", sol.residual);
    for x in &sol.coeffs {
        let _ = writeln!(s, "{x:e}");
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Reads a coefficient file written by [`write_coeffs`].
pub fn read_coeffs(path: &Path) -> Result<ApproxSolution> {
    let text = std::fs::read_to_string(path)?;
    let mut t = None;
    let mut c = None;
    let mut d = None;
    let mut residual = f64::NAN;
    let mut coeffs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.trim().split_once('=') {
                let parse = |v: &str| {
                    v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))
                };
                match k.trim() {
                    "T" => t = Some(parse(v)?),
                    "c" => c = Some(parse(v)?),
                    "d" => d = Some(parse(v)?),
                    "residual" => residual = parse(v)?,
                    _ => {}
                }
            }
            continue;
        }
        coeffs.push(line.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?);
    }
    let missing = |k: &str| Error::Parse(format!("coefficient file lacks header `{k}`"));
    if coeffs.is_empty() {
        return Err(Error::Parse("coefficient file has no coefficients".into()));
    }
    Ok(ApproxSolution {
        t: t.ok_or_else(|| missing("T"))?,
        c: c.ok_or_else(|| missing("c"))?,
        d: d.ok_or_else(|| missing("d"))?,
        coeffs,
        residual,
        iterations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_converges_for_gravity_wave() {
        let sol = solve(&SolveConfig::new(0.0, 1.1, 30.0, 120)).unwrap();
        assert!(sol.residual < 1e-12);
        let peak: f64 = sol.coeffs.iter().enumerate().map(|(n, c)| alpha_f64(n) * c).sum();
        assert!(peak > 0.1 && peak < 0.55, "peak {peak}");
    }

    #[test]
    fn w0_rejects_large_wave() {
        let u = vec![0.4, 0.1];
        assert!(matches!(build_w0(&u, 1.1, 5.0, 4), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn w0_of_zero_is_unit() {
        let w = build_w0(&[0.0; 3], 1.1, 5.0, 3).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && w[1..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn coefficient_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("capwhitham-approx-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("u0.txt");
        let sol = ApproxSolution { t: 0.5, c: 0.8, d: 40.0, coeffs: vec![0.1, -1e-300, 3.0], residual: 1e-14, iterations: 3 };
        write_coeffs(&path, &sol).unwrap();
        let back = read_coeffs(&path).unwrap();
        assert_eq!(back.coeffs, sol.coeffs);
        assert_eq!((back.t, back.c, back.d), (0.5, 0.8, 40.0));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
