//! Eigenvalue enclosures for the self-adjoint linearization, the
//! injectivity sweep over the negative axis, and the stability verdict.
//!
//! The linearization around the proven solution `ũ` is
//!
//! ```text
//! DF̃(ũ) = L̃ + 2s ũ,   L̃ = c - M_T, s = -1   (T = 0),
//!                     L̃ = M_T - c, s = +1   (T > 0),
//! ```
//!
//! a self-adjoint operator on `L²(ℝ)` whose spectrum below `λ_max` consists
//! of eigenvalues of finite multiplicity. Stability follows from three
//! facts: a simple negative eigenvalue `λ⁻` (P1), no other negative
//! eigenvalue (P2) and a simple zero eigenvalue (P3).
//!
//! Eigenpairs are enclosed with the augmented map
//!
//! ```text
//! F̄(ν, U) = (2d (Ψ0 - U, Ψ0), DF̃(U0) U - ν U),
//! ```
//!
//! preconditioned by `L_λ0 = L̃ - λ0`. In the scaled coordinates
//! `Ĥ = √(2d) L_λ0 H` the finite block becomes the bordered operator
//! `[[0, -(Ψ̂/l_λ0)ᵀ], [-Ψ̂, I + 2s Conv(U0) L_λ0⁻¹]]` with `Ψ̂ = √(2d) Ψ0`,
//! which is handled by [`crate::inverse`]. All sequences use full
//! exponential modes, so every parity is covered at once.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{approx_eigs, build_w0, ApproxEigenpair};
use crate::bounds::{boundary_form, c1_of_d, c_of_d, cosh_form};
use crate::certify::{admissible_radii, ExistenceProof};
use crate::error::{Error, Result};
use crate::fourier::{conv_exp, l_lambda, trace_project_exp, CosineSeq, ExpSeq};
use crate::inverse::{finite_defect, ApproxInverse, Basis, FiniteDefect, LinearizedOp};
use crate::rigor::{IMatrix, Interval};
use crate::strip::{decay_constants, verify_sigma1, verify_strip_auto, DecayConstants, StripData};
use crate::symbols::{grid_freq, l_nu, m_t, SymbolParams};

/// Data of a completed existence proof needed by the spectral stage.
#[derive(Debug, Clone)]
pub struct SpectralSetup {
    /// Model parameters.
    pub p: SymbolParams,
    /// Trace-projected approximate solution.
    pub u0: CosineSeq,
    /// Existence radius `r0` in the `H^l` norm.
    pub r0: f64,
    /// Strip of the existence proof.
    pub strip: StripData,
    /// Decay constants of the existence proof.
    pub decay: DecayConstants,
    /// Shrink factor for the strips verified at shifted speeds.
    pub safety: f64,
    /// Initial subdivision of those strips.
    pub strip_grid: usize,
}

impl SpectralSetup {
    /// Collects the spectral inputs from an existence proof.
    pub fn from_proof(proof: &ExistenceProof) -> Result<Self> {
        Ok(SpectralSetup {
            p: SymbolParams::new(proof.config.t, proof.config.c)?,
            u0: proof.u0.clone(),
            r0: proof.radii.r,
            strip: proof.strip.clone(),
            decay: proof.decay.clone(),
            safety: proof.config.safety,
            strip_grid: proof.config.strip_grid,
        })
    }

    /// Half-period.
    pub fn d(&self) -> f64 {
        self.u0.d
    }

    /// Truncation order.
    pub fn n(&self) -> usize {
        self.u0.order()
    }

    /// Sign `s` of the multiplication part of `DF̃`.
    pub fn sign(&self) -> f64 {
        if self.p.is_gravity() {
            -1.0
        } else {
            1.0
        }
    }

    /// Lower bound `σ` on `inf_ξ |m_T(ξ) - c|` over the real line: the strip
    /// level, improved to `c - 1` for `T = 0` where `m_0 ≤ 1`.
    pub fn sigma(&self) -> Interval {
        let s0 = self.strip.sigma0;
        let lo = if self.p.is_gravity() { s0.max((Interval::point(self.p.c) - 1.0).lo()) } else { s0 };
        Interval::point(lo)
    }

    /// Bound `‖U0‖₁ + sup_embed r0` on `sup |ũ|`.
    pub fn u_sup(&self) -> Interval {
        self.u0.norm1() + self.decay.sup_embed * self.r0
    }

    /// Speed at which the shifted symbol `l_λ` has the form of `l`:
    /// `c - λ` for `T = 0`, `c + λ` for `T > 0`.
    pub fn shifted_speed(&self, lambda: f64) -> f64 {
        if self.p.is_gravity() {
            self.p.c - lambda
        } else {
            self.p.c + lambda
        }
    }
}

/// The windows `λ_max` (below which the spectrum is discrete) and `λ_min`
/// (below which there is no spectrum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Windows {
    /// `min{σ, c - 2 sup|ũ|}` for `T = 0`, `σ` for `T > 0`.
    pub lambda_max: Interval,
    /// `σ - 2 sup|ũ|`.
    pub lambda_min: Interval,
}

/// Computes `λ_max` and `λ_min` from the existence data.
pub fn lambda_windows(s: &SpectralSetup) -> Windows {
    let sigma = s.sigma();
    let two_sup = s.u_sup() * 2.0;
    let lambda_max = if s.p.is_gravity() { sigma.min(&(Interval::point(s.p.c) - two_sup)) } else { sigma };
    Windows { lambda_max, lambda_min: sigma - two_sup }
}

/// The constant `C_λ = C_2` of the `(M_T - c')⁻¹` kernel at the shifted
/// speed `c'`, from a fresh strip verification with the same half-width.
pub fn shifted_kernel_constant(s: &SpectralSetup, lambda: f64) -> Result<Interval> {
    let p = s.p.with_speed(s.shifted_speed(lambda));
    let strip = verify_sigma1(&p, &verify_strip_auto(&p, s.strip.a, s.safety, s.strip_grid)?)?;
    Ok(decay_constants(&p, &strip)?.c_2)
}

/// Unbounded-domain defect of the shifted inverse acting on `v`:
/// `(2d C_λ² (V, Ê_a * V)(2/a + C1(d)) + 8 C_λ² ln2 ∫_{d-1}^{d} |v'|²)^{1/2}`.
pub fn zu_lambda(s: &SpectralSetup, v: &ExpSeq, c_lambda: Interval) -> Result<Interval> {
    let d = s.d();
    let a = s.strip.a_ival();
    let c2 = c_lambda.sqr();
    let q = cosh_form(v, a)?;
    let outer = Interval::point(2.0 * d) * c2 * q * (2.0 / a + c1_of_d(d, a)?);
    let inner = 8.0 * c2 * Interval::ln2() * boundary_form(v)?;
    (outer + inner).sqrt_nonneg()
}

/// Values `1/l_λ(ξ_k)` for `|k| ≤ kmax`, indexed by `|k|`.
fn inv_l_lambda(s: &SpectralSetup, lambda: f64, kmax: usize) -> Result<Vec<Interval>> {
    let d = s.d();
    (0..=kmax).map(|k| l_lambda(&s.p, lambda, grid_freq(k as i64, d)).recip()).collect()
}

/// The preconditioned operator `I + 2s Conv(U0) L_λ⁻¹` on exponential
/// modes, optionally bordered by `Ψ̂`.
pub fn shifted_operator(s: &SpectralSetup, lambda: f64, border: Option<Vec<Interval>>) -> Result<LinearizedOp> {
    let n = s.n();
    let left = vec![Interval::point(2.0 * s.sign()); 3 * n + 1];
    let right = inv_l_lambda(s, lambda, 2 * n)?;
    LinearizedOp::new(Basis::Exp, n, s.u0.coeffs.clone(), left, right, border)
}

/// Approximate inverse of the shifted operator; for `T = 0` the tail uses
/// `W ≈ 1/(1 - 2u0/(c - λ))`.
fn shifted_inverse(s: &SpectralSetup, lambda: f64, op: &LinearizedOp) -> Result<ApproxInverse> {
    let w = if s.p.is_gravity() { Some(build_w0(&s.u0.mids(), s.p.c - lambda, s.d(), s.n())?) } else { None };
    ApproxInverse::assemble(op, w)
}

/// Tail defects beyond the truncation, mirroring the existence bounds with
/// `V2 = 2U0` and no derivative terms.
///
/// For `T > 0`, `Z13 = ‖2U0‖₁ / inf_{ξ ≥ ξ_(N+1)} l_λ(ξ)` with the monotone
/// envelope `m_T(ξ) ≥ √(tanh(X) T X)`. For `T = 0`, with `c' = c - λ`,
/// `Z13 = ‖W * 2U0‖₁ m_0(X)/(c'(c' - m_0(X)))` and
/// `Z14 = ‖e0 - W * (e0 - 2U0/c')‖₁`.
pub fn tail_defect(s: &SpectralSetup, lambda: f64, inv: &ApproxInverse) -> Result<(Interval, Interval)> {
    let d = s.d();
    let n = s.n();
    let x = grid_freq(n as i64 + 1, d);
    let v2 = s.u0.scale(Interval::point(2.0));
    match &inv.w {
        None => {
            let gap = (x.tanh() * s.p.t * x).sqrt()? - s.p.c - lambda;
            if !gap.is_pos() {
                return Err(Error::TailMinimumUnverified(format!("shifted symbol gap {gap:?} at ξ_(N+1)")));
            }
            Ok((v2.norm1() / gap, Interval::ZERO))
        }
        Some(w) => {
            let cp = Interval::point(s.p.c) - lambda;
            let m = m_t(&s.p, x);
            let gap = cp - m;
            if !gap.is_pos() {
                return Err(Error::TailMinimumUnverified(format!("shifted symbol gap {gap:?} at ξ_(N+1)")));
            }
            let w = CosineSeq::new(d, w.clone());
            let z13 = crate::fourier::conv_even(&w, &v2)?.norm1() * m / (cp * gap);
            let e0 = CosineSeq::e0(d, 0);
            let inner = e0.sub(&v2.scale(cp.recip()?))?;
            let z14 = e0.sub(&crate::fourier::conv_even(&w, &inner)?)?.norm1();
            Ok((z13, z14))
        }
    }
}

/// `‖I - A_λ(DF̃(U0) - λ)‖` on the periodic problem, from the finite
/// defects and the tail defects.
fn periodic_defect(defect: &FiniteDefect, z13: Interval, z14: Interval) -> Result<Interval> {
    (defect.z11_top.sqr() + defect.z11_tail.sqr() + defect.z12.sqr() + (z13 + z14).sqr()).sqrt_nonneg()
}

/// Bounds of an eigenpair enclosure with their main components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBounds {
    /// Residual of the periodic augmented problem.
    pub y0_periodic: Interval,
    /// Unbounded-domain part of the residual.
    pub y0_tail: Interval,
    /// Contribution of `‖ũ - u0‖` to the residual.
    pub y0_distance: Interval,
    /// `Y0`.
    pub y0: Interval,
    /// Periodic part of `Z1`.
    pub z1_periodic: Interval,
    /// Unbounded-domain part of `Z1`.
    pub z1_tail: Interval,
    /// Contribution of `‖ũ - u0‖_∞` to `Z1`.
    pub z1_distance: Interval,
    /// `Z1`.
    pub z1: Interval,
    /// `Z2 = ‖B̄‖ max{1, 1/(σ - λ0)}`.
    pub z2: Interval,
    /// Bound on `‖B̄‖`.
    pub norm_b: Interval,
    /// Kernel constant `C_λ0` at the shifted speed.
    pub c_lambda: Interval,
}

/// A certified eigenpair of `DF̃(ũ)` near `(λ0, Ψ0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEnclosure {
    /// Approximate eigenvalue, at most zero.
    pub lambda0: f64,
    /// Radius of the ball in `ℝ × H^l_λ0` containing the eigenpair; in
    /// particular `|λ̃ - λ0| ≤ r`.
    pub r: f64,
    /// Exclusion radius: `λ̃` is the only eigenvalue in
    /// `(λ0 - R, λ0 + R) ∩ (λ0 - R, λ_max)`. Zero when not simple.
    pub big_r: f64,
    /// Whether simplicity and exclusion were certified.
    pub simple: bool,
    /// Trace-projected approximate eigenvector, normalized so that
    /// `2d ‖Ψ0‖² ≈ 1`.
    pub psi0: ExpSeq,
    /// The bounds.
    pub bounds: EigenBounds,
}

impl EigenEnclosure {
    /// Certified enclosure of the eigenvalue.
    pub fn eigenvalue(&self) -> Interval {
        Interval::point(self.lambda0) + Interval::symmetric(self.r)
    }
}

/// Normalizes a floating-point eigenvector to `2d ‖Ψ0‖² = 1` and projects
/// it onto the trace-free subspace with the weight `1/l_λ0`.
fn approximate_eigenvector(s: &SpectralSetup, pair: &ApproxEigenpair, lambda0: f64) -> Result<ExpSeq> {
    let n = s.n();
    if pair.vector.len() != 2 * n + 1 {
        return Err(Error::DimensionMismatch(format!("eigenvector has {} entries, expected {}", pair.vector.len(), 2 * n + 1)));
    }
    let norm = pair.vector.iter().map(|x| x * x).sum::<f64>().sqrt() * (2.0 * s.d()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::EnclosureFailed("zero eigenvector".into()));
    }
    let w: Vec<f64> = pair.vector.iter().map(|x| x / norm).collect();
    let raw = ExpSeq::from_f64(s.d(), pair.phase, &w)?;
    let inv = inv_l_lambda(s, lambda0, n)?;
    let dinv: Vec<Interval> = (-(n as i64)..=n as i64).map(|k| inv[k.unsigned_abs() as usize]).collect();
    trace_project_exp(&raw, &dinv)
}

/// `(DF̃(U0) - λ0) Ψ0 = L_λ0 Ψ0 + 2s U0 * Ψ0` on modes `|k| ≤ 2N`.
fn eigen_residual(s: &SpectralSetup, psi: &ExpSeq, lambda0: f64) -> Result<ExpSeq> {
    let d = s.d();
    let conv = conv_exp(&s.u0.to_exp(), psi)?;
    let m = conv.order() as i64;
    let coeffs = (-m..=m)
        .map(|k| psi.get(k) * l_lambda(&s.p, lambda0, grid_freq(k, d)) + conv.get(k) * (2.0 * s.sign()))
        .collect();
    ExpSeq::new(d, psi.phase, coeffs)
}

/// Enclosure of `‖B̄ (0, Ĝ)‖` for a scaled residual `Ĝ` on `|k| ≤ 2N`.
fn apply_bordered_inverse_norm(s: &SpectralSetup, inv: &ApproxInverse, g: &ExpSeq) -> Result<Interval> {
    let n = s.n() as i64;
    let dim = 2 * n as usize + 2;
    let col = IMatrix::from_fn(dim, 1, |i, _| if i == 0 { Interval::ZERO } else { g.get(i as i64 - 1 - n) });
    let head = inv.bn.mul(&col)?;
    let head_sq: Interval = (0..dim).map(|i| head.get(i, 0).sqr()).sum();
    let tail_sq: Interval = match &inv.w {
        None => (n + 1..=2 * n).map(|k| g.get(k).sqr() + g.get(-k).sqr()).sum(),
        Some(w) => {
            let wg = conv_exp(&CosineSeq::new(g.d, w.clone()).to_exp(), g)?;
            let m = wg.order() as i64;
            (n + 1..=m).map(|k| wg.get(k).sqr() + wg.get(-k).sqr()).sum()
        }
    };
    (head_sq + tail_sq).sqrt_nonneg()
}

/// Encloses the eigenpair of `DF̃(ũ)` near an approximate eigenpair.
///
/// On success with the strict extra conditions the eigenvalue is certified
/// simple and isolated, with exclusion radius `R`.
pub fn enclose_eig(s: &SpectralSetup, pair: &ApproxEigenpair, windows: &Windows) -> Result<EigenEnclosure> {
    let d = s.d();
    let two_d = Interval::point(2.0 * d);
    let sqrt_2d = two_d.sqrt()?;
    let lambda0 = pair.value.min(0.0);
    let gap = s.sigma() - lambda0;
    if !gap.is_pos() {
        return Err(Error::EnclosureFailed(format!("λ0 = {lambda0} is not below σ")));
    }
    let psi0 = approximate_eigenvector(s, pair, lambda0)?;
    let border: Vec<Interval> = psi0.coeffs.iter().map(|c| *c * sqrt_2d).collect();
    let op = shifted_operator(s, lambda0, Some(border))?;
    let inv = shifted_inverse(s, lambda0, &op)?;
    let nb = inv.norm_b;

    let g = eigen_residual(s, &psi0, lambda0)?.scale(sqrt_2d);
    let y0_periodic = sqrt_2d * apply_bordered_inverse_norm(s, &inv, &g)?;
    let h = psi0.map_modes(|k| l_nu(&s.p, grid_freq(k, d)));
    let a0 = s.decay.a0;
    let yq = cosh_form(&h, a0)?;
    let y0_tail = two_d * s.decay.c_y0 * (yq * (1.0 + (1.0 + c_of_d(d, a0)) * nb.sqr())).sqrt_nonneg()?;
    let y0_distance = 2.0 * Interval::point(s.r0) / s.sigma() * nb * psi0.norm1();
    let y0 = y0_periodic + y0_tail + y0_distance;

    let defect = finite_defect(&op, &inv)?;
    let (z13, z14) = tail_defect(s, lambda0, &inv)?;
    let z1_periodic = periodic_defect(&defect, z13, z14)?;
    let c_lambda = shifted_kernel_constant(s, lambda0)?;
    let zu_u = zu_lambda(s, &s.u0.to_exp(), c_lambda)?;
    let zu_psi = zu_lambda(s, &psi0, c_lambda)?;
    let z1_tail = (zu_u * 2.0).max(&(sqrt_2d * zu_psi)) * nb;
    let z1_distance = 2.0 * s.decay.sup_embed * s.r0 * nb / gap;
    let z1 = z1_periodic + z1_tail + z1_distance;
    let z2 = nb * Interval::ONE.max(&gap.recip()?);

    let bounds = EigenBounds { y0_periodic, y0_tail, y0_distance, y0, z1_periodic, z1_tail, z1_distance, z1, z2, norm_b: nb, c_lambda };
    let radii = admissible_radii(y0, z1, z2).map_err(|e| Error::EnclosureFailed(format!("{e} (Y0 {:e}, Z1 {:e}, Z2 {:e})", y0.hi(), z1.hi(), z2.hi())))?;
    let r = radii.r;

    let margin = 1.0 - Interval::point(z1.hi()) - Interval::point(r) * nb.hi() / gap.sqr();
    let below_max = (Interval::point(lambda0) + r).hi() < windows.lambda_max.lo();
    let (simple, big_r) = if margin.is_pos() && below_max {
        let big_r = (gap * margin / nb.hi()).lo();
        (big_r > 0.0, big_r.max(0.0))
    } else {
        (false, 0.0)
    };
    Ok(EigenEnclosure { lambda0, r, big_r, simple, psi0, bounds })
}

/// Certified lower bound `C` on `‖(DF̃(ũ) - λ*) u‖ / ‖u‖`, which makes
/// `DF̃(ũ) - λ` injective for `|λ - λ*| < C`.
///
/// `C = ((1 - ‖B‖ Z_λu - Z_λ1)/‖B‖)(σ - λ*) - 2 sup_embed r0` with
/// `Z_λu = 2 Zu_λ(u0)`.
pub fn inverse_floor(s: &SpectralSetup, shift: f64) -> Result<Interval> {
    if !(shift <= 0.0) {
        return Err(Error::Domain(format!("shift {shift} must be non-positive")));
    }
    let op = shifted_operator(s, shift, None)?;
    let inv = shifted_inverse(s, shift, &op)?;
    let defect = finite_defect(&op, &inv)?;
    let (z13, z14) = tail_defect(s, shift, &inv)?;
    let z_lambda1 = periodic_defect(&defect, z13, z14)?;
    let c_lambda = shifted_kernel_constant(s, shift)?;
    let z_lambda_u = zu_lambda(s, &s.u0.to_exp(), c_lambda)? * 2.0;
    let nb = Interval::point(inv.norm_b.hi());
    let c = (1.0 - nb * z_lambda_u - z_lambda1) / nb * (s.sigma() - shift) - 2.0 * s.decay.sup_embed * s.r0;
    if !c.is_pos() {
        return Err(Error::FloorNonpositive { shift, floor: c.hi() });
    }
    Ok(c)
}

/// One evaluated shift of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    /// The shift `λ*`.
    pub shift: f64,
    /// Lower end of the floor enclosure.
    pub c_lo: f64,
    /// Upper end of the floor enclosure.
    pub c_hi: f64,
}

/// Accepted shifts of a sweep, in increasing order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepLog {
    /// The target segments `[lo, hi]`.
    pub segments: Vec<(f64, f64)>,
    /// Accepted shifts.
    pub entries: Vec<SweepEntry>,
}

impl SweepLog {
    /// Checks from the endpoints alone that the open intervals
    /// `(λ* - C, λ* + C)` cover every segment.
    pub fn covers(&self) -> bool {
        self.segments.iter().all(|&(lo, hi)| covers_segment(&self.entries, lo, hi))
    }

    /// CSV rendering with header `shift,c_lo,c_hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("shift,c_lo,c_hi\n");
        for e in &self.entries {
            out.push_str(&format!("{:e},{:e},{:e}\n", e.shift, e.c_lo, e.c_hi));
        }
        out
    }
}

/// Whether the open intervals of `entries` cover `[lo, hi]`; empty segments
/// (`lo > hi`) are covered trivially.
pub fn covers_segment(entries: &[SweepEntry], lo: f64, hi: f64) -> bool {
    if lo > hi {
        return true;
    }
    let mut ivs: Vec<(f64, f64)> = entries
        .iter()
        .map(|e| ((Interval::point(e.shift) - e.c_lo).hi(), (Interval::point(e.shift) + e.c_lo).lo()))
        .collect();
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut frontier = lo;
    for (left, right) in ivs {
        if left >= frontier {
            return false;
        }
        if right > frontier {
            frontier = right;
        }
        if frontier > hi {
            return true;
        }
    }
    false
}

/// Settings of the injectivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Ratio between consecutive shift distances and the floor (below 2).
    pub stride: f64,
    /// Smallest floor accepted before the sweep reports a stall.
    pub min_floor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { stride: 1.9, min_floor: 1e-7 }
    }
}

/// Greedy cover of one segment. Each new shift sits `(stride/2) C_prev`
/// beyond the covered frontier, that is `stride · C` after the previous
/// shift when consecutive floors agree.
fn sweep_segment(s: &SpectralSetup, lo: f64, hi: f64, cfg: &SweepConfig) -> Result<Vec<SweepEntry>> {
    let mut out = Vec::new();
    if lo > hi {
        return Ok(out);
    }
    let half = cfg.stride - 1.0;
    let mut frontier = lo;
    let mut estimate = (hi - lo).max(cfg.min_floor);
    loop {
        let shift = (frontier + half * estimate).min(hi);
        let floor = match inverse_floor(s, shift) {
            Ok(c) => Some(c),
            Err(Error::FloorNonpositive { .. }) => None,
            Err(e) => return Err(e),
        };
        match floor {
            Some(c) if (Interval::point(shift) - c.lo()).hi() < frontier => {
                out.push(SweepEntry { shift, c_lo: c.lo(), c_hi: c.hi() });
                frontier = (Interval::point(shift) + c.lo()).lo();
                estimate = c.lo();
                if frontier > hi {
                    return Ok(out);
                }
            }
            Some(c) => estimate = c.lo().min(estimate * 0.5),
            None => estimate *= 0.25,
        }
        if estimate < cfg.min_floor {
            return Err(Error::CoverageStalled { lo: frontier, hi });
        }
    }
}

/// Proves injectivity of `DF̃(ũ) - λ` on each segment by a greedy cover of
/// shifts with positive floors. Segments run in parallel; the log lists the
/// entries in segment order.
pub fn sweep(s: &SpectralSetup, segments: &[(f64, f64)], cfg: &SweepConfig) -> Result<SweepLog> {
    let parts: Vec<Result<Vec<SweepEntry>>> = segments.par_iter().map(|&(lo, hi)| sweep_segment(s, lo, hi, cfg)).collect();
    let mut entries = Vec::new();
    for p in parts {
        entries.extend(p?);
    }
    Ok(SweepLog { segments: segments.to_vec(), entries })
}

/// Outcome of the stability analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// A simple negative eigenvalue is certified.
    pub p1: bool,
    /// No other negative eigenvalue exists.
    pub p2: bool,
    /// Zero is a simple eigenvalue.
    pub p3: bool,
    /// Enclosures of the negative eigenvalues found.
    pub negative: Vec<EigenEnclosure>,
    /// Enclosure of the zero eigenvalue.
    pub zero: Option<EigenEnclosure>,
    /// `λ_max`.
    pub lambda_max: Interval,
    /// `λ_min`.
    pub lambda_min: Interval,
    /// Sweep log, when the sweep ran.
    pub sweep: Option<SweepLog>,
    /// Uncovered interval when the sweep stalled.
    pub gap: Option<(f64, f64)>,
    /// `p1 ∧ p2 ∧ p3`.
    pub stable: bool,
}

/// Segments the sweep must cover: `[λ_min, λ⁻ - R1] ∪ [λ⁻ + R1, -R0]`.
pub fn sweep_targets(windows: &Windows, negative: &EigenEnclosure, zero: &EigenEnclosure) -> Vec<(f64, f64)> {
    let r0 = zero_exclusion(zero);
    let left_hi = (Interval::point(negative.lambda0) - negative.big_r).hi();
    let right_lo = (Interval::point(negative.lambda0) + negative.big_r).lo();
    vec![(windows.lambda_min.lo(), left_hi), (right_lo, -r0)]
}

/// `R0 = R + λ0` for the zero mode: zero is the only eigenvalue in
/// `(-R0, 0]`. Non-positive when the enclosure does not reach zero.
pub fn zero_exclusion(zero: &EigenEnclosure) -> f64 {
    (Interval::point(zero.big_r) + zero.lambda0).lo()
}

/// Combines the enclosures and the sweep into the verdict.
pub fn verdict(windows: &Windows, negative: Vec<EigenEnclosure>, zero: Option<EigenEnclosure>, sweep_result: Option<Result<SweepLog>>) -> StabilityVerdict {
    let p1 = negative.len() == 1 && negative[0].simple && negative[0].eigenvalue().is_neg();
    let p3 = zero.as_ref().is_some_and(|z| {
        z.simple && z.eigenvalue().contains(0.0) && zero_exclusion(z) > 0.0 && windows.lambda_max.is_pos()
    });
    let (sweep_log, gap) = match sweep_result {
        Some(Ok(log)) => (Some(log), None),
        Some(Err(Error::CoverageStalled { lo, hi })) => (None, Some((lo, hi))),
        _ => (None, None),
    };
    let p2 = p1
        && p3
        && match (&sweep_log, &zero) {
            (Some(log), Some(z)) => {
                let targets = sweep_targets(windows, &negative[0], z);
                log.covers() && log.segments == targets && log.entries.iter().all(|e| e.shift <= 0.0 && e.shift >= windows.lambda_min.lo())
            }
            _ => false,
        };
    StabilityVerdict {
        p1,
        p2,
        p3,
        negative,
        zero,
        lambda_max: windows.lambda_max,
        lambda_min: windows.lambda_min,
        sweep: sweep_log,
        gap,
        stable: p1 && p2 && p3,
    }
}

/// Settings of the full stability analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Number of smallest approximate eigenvalues inspected.
    pub eig_count: usize,
    /// Approximate eigenvalues within this distance of zero are treated as
    /// the zero mode.
    pub zero_tol: f64,
    /// Sweep settings.
    pub sweep: SweepConfig,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { eig_count: 4, zero_tol: 1e-6, sweep: SweepConfig::default() }
    }
}

/// Approximate eigenpairs of the linearization at `U0` on modes `-N..N`.
pub fn candidate_pairs(s: &SpectralSetup, count: usize) -> Vec<ApproxEigenpair> {
    approx_eigs(&s.p, s.d(), &s.u0.mids(), s.n(), count)
}

/// Runs the full stability analysis: encloses the negative and zero modes,
/// sweeps the remaining negative axis and returns the verdict.
pub fn prove_stability(s: &SpectralSetup, cfg: &StabilityConfig) -> Result<StabilityVerdict> {
    let windows = lambda_windows(s);
    let pairs = candidate_pairs(s, cfg.eig_count);
    let zero_pair = pairs
        .iter()
        .filter(|e| e.value.abs() < cfg.zero_tol)
        .min_by(|a, b| a.value.abs().total_cmp(&b.value.abs()));
    let negative_pairs: Vec<&ApproxEigenpair> = pairs.iter().filter(|e| e.value <= -cfg.zero_tol).collect();
    let negative: Vec<EigenEnclosure> = negative_pairs.iter().map(|e| enclose_eig(s, e, &windows)).collect::<Result<_>>()?;
    let zero = zero_pair.map(|e| enclose_eig(s, e, &windows)).transpose()?;
    let ready = negative.len() == 1 && negative[0].simple && zero.as_ref().is_some_and(|z| z.simple && zero_exclusion(z) > 0.0);
    let sweep_result = if ready {
        let targets = sweep_targets(&windows, &negative[0], zero.as_ref().expect("checked"));
        Some(sweep(s, &targets, &cfg.sweep))
    } else {
        None
    };
    if let Some(Err(e)) = &sweep_result {
        if !matches!(e, Error::CoverageStalled { .. }) {
            return Err(e.clone());
        }
    }
    Ok(verdict(&windows, negative, zero, sweep_result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::spectral_matrix_f64;

    fn entry(shift: f64, c: f64) -> SweepEntry {
        SweepEntry { shift, c_lo: c, c_hi: c }
    }

    fn trivial_setup(t: f64, c: f64, d: f64, n: usize, a: f64) -> SpectralSetup {
        let p = SymbolParams::new(t, c).unwrap();
        let strip = verify_sigma1(&p, &verify_strip_auto(&p, a, 0.99, 64).unwrap()).unwrap();
        let decay = decay_constants(&p, &strip).unwrap();
        SpectralSetup { p, u0: CosineSeq::zeros(d, n), r0: 0.0, strip, decay, safety: 0.99, strip_grid: 64 }
    }

    #[test]
    fn overlapping_intervals_cover_a_segment() {
        let entries = [entry(-0.9, 0.2), entry(-0.6, 0.15), entry(-0.35, 0.12)];
        assert!(covers_segment(&entries, -1.0, -0.3));
        assert!(!covers_segment(&entries, -1.2, -0.3));
        assert!(!covers_segment(&entries, -1.0, -0.2));
        assert!(covers_segment(&[], 1.0, 0.0));
    }

    #[test]
    fn touching_open_intervals_leave_a_hole() {
        let entries = [entry(-1.0, 0.5), entry(0.0, 0.5)];
        assert!(!covers_segment(&entries, -1.2, 0.2));
    }

    #[test]
    fn spectral_matrix_is_symmetric_with_shifted_symbol_diagonal() {
        for (t, c) in [(0.0, 1.1), (0.5, 0.8)] {
            let p = SymbolParams::new(t, c).unwrap();
            let d = 10.0;
            let n = 8;
            let u = [0.05, 0.02, -0.01, 0.004];
            let m = spectral_matrix_f64(&p, d, &u, n);
            assert!((&m - m.transpose()).amax() < 1e-14);
            let m0 = spectral_matrix_f64(&p, d, &[], n);
            for i in 0..=2 * n {
                let k = i as i64 - n as i64;
                assert!((l_lambda(&p, 0.0, grid_freq(k, d)).mid() - m0[(i, i)]).abs() < 1e-13);
            }
            let sign = if p.is_gravity() { -1.0 } else { 1.0 };
            assert!((m[(n, n + 1)] - 2.0 * sign * u[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn floor_of_the_bare_symbol_matches_the_distance_to_sigma() {
        let s = trivial_setup(0.5, 0.8, 8.0, 16, 0.45);
        let sigma = s.sigma().lo();
        let c = inverse_floor(&s, -0.1).unwrap();
        assert!(c.lo() > 0.0);
        assert!(c.hi() <= sigma + 0.1 + 1e-9);
        assert!(c.lo() > 0.5 * (sigma + 0.1));
    }

    #[test]
    fn bare_symbol_has_no_negative_spectrum() {
        let s = trivial_setup(0.0, 1.1, 8.0, 16, 0.45);
        let w = lambda_windows(&s);
        assert!((w.lambda_min.lo() - s.sigma().lo()).abs() < 1e-15);
        assert!(candidate_pairs(&s, 3).iter().all(|e| e.value > 0.0));
        let log = sweep(&s, &[(-0.3, -0.01)], &SweepConfig::default()).unwrap();
        assert!(log.covers());
    }

    #[test]
    fn two_negative_modes_fail_p2() {
        let s = trivial_setup(0.0, 1.1, 8.0, 8, 0.45);
        let psi0 = ExpSeq::from_f64(8.0, crate::fourier::Phase::Real, &[0.0; 17]).unwrap();
        let bounds = EigenBounds {
            y0_periodic: Interval::ZERO,
            y0_tail: Interval::ZERO,
            y0_distance: Interval::ZERO,
            y0: Interval::ZERO,
            z1_periodic: Interval::ZERO,
            z1_tail: Interval::ZERO,
            z1_distance: Interval::ZERO,
            z1: Interval::ZERO,
            z2: Interval::ONE,
            norm_b: Interval::ONE,
            c_lambda: Interval::ONE,
        };
        let enc = |l: f64| EigenEnclosure { lambda0: l, r: 1e-6, big_r: 0.01, simple: true, psi0: psi0.clone(), bounds };
        let v = verdict(&lambda_windows(&s), vec![enc(-0.2), enc(-0.1)], Some(enc(0.0)), None);
        assert!(!v.p1 && !v.p2 && v.p3 && !v.stable);
    }
}
