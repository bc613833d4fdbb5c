//! The residual and contraction bounds `Y0`, `Z1`, `Z2` of the existence
//! proof.
//!
//! The zero-finding map is `F(U) = LU + L_ν(U * U)` on cosine sequences, with
//! derivative `DF(U0) L⁻¹ = I + 2 L_ν Conv(U0) L⁻¹`. Each bound splits into a
//! periodic part, computed from finite interval matrices and sequences, and
//! an unbounded-domain part controlled by the kernel decay constants of
//! [`crate::strip::DecayConstants`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{
    boundary_energy_exp, boundary_energy_upper, conv_even, conv_exp, cosh_coeffs, cosh_energy_exp, cosh_quadratic_form,
    CosineSeq, ExpSeq, TrigPoly,
};
use crate::inverse::{finite_defect, ApproxInverse, Basis, FiniteDefect, LinearizedOp};
use crate::rigor::{IMatrix, Interval};
use crate::strip::{DecayConstants, StripData};
use crate::symbols::{grid_freq, l_nu, l_sym, m_t, SymbolParams};

/// All existence bounds, with their components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofBounds {
    /// Periodic part of `Y0`.
    pub y0_periodic: Interval,
    /// Unbounded-domain correction of `Y0`.
    pub y0_tail: Interval,
    /// `Y0 = y0_periodic + y0_tail`.
    pub y0: Interval,
    /// `‖I - B^N DF L⁻¹‖` on the finite block.
    pub z11_top: Interval,
    /// `‖π_N W DF L⁻¹ π^N‖`.
    pub z11_tail: Interval,
    /// Off-diagonal defect `‖B^N DF L⁻¹ π_N‖`.
    pub z12: Interval,
    /// Tail defect from the symbol minima beyond `N`.
    pub z13: Interval,
    /// Defect of `W` as a reciprocal (zero for `T > 0`).
    pub z14: Interval,
    /// Periodic part of `Z1`.
    pub z1_periodic: Interval,
    /// The three unbounded-domain components (squared bounds).
    pub zu_components: [Interval; 3],
    /// `Zu = ‖B‖ Σ_k √component_k`.
    pub zu: Interval,
    /// `Z1 = z1_periodic + zu`.
    pub z1: Interval,
    /// `Z2 = 2κ‖B‖`.
    pub z2: Interval,
    /// Bound on `‖B‖`.
    pub norm_b: Interval,
}

/// Everything the bounds depend on.
pub struct ExistenceSetup<'a> {
    /// Model parameters.
    pub p: &'a SymbolParams,
    /// Verified strip.
    pub strip: &'a StripData,
    /// Decay constants of the strip.
    pub dc: &'a DecayConstants,
    /// Approximate solution, trace-projected, on modes `0..=N`.
    pub u0: &'a CosineSeq,
    /// Preconditioned derivative `DF(U0) L⁻¹`.
    pub op: &'a LinearizedOp,
    /// Approximate inverse.
    pub inv: &'a ApproxInverse,
}

/// Values `l(ξ_n)` for `n = 0..=nmax`.
pub fn l_values(p: &SymbolParams, d: f64, nmax: usize) -> Vec<Interval> {
    (0..=nmax).map(|n| l_sym(p, grid_freq(n as i64, d))).collect()
}

/// Values `l_ν(ξ_n)` for `n = 0..=nmax`.
pub fn l_nu_values(p: &SymbolParams, d: f64, nmax: usize) -> Vec<Interval> {
    (0..=nmax).map(|n| l_nu(p, grid_freq(n as i64, d))).collect()
}

/// Builds `DF(U0) L⁻¹ = I + 2 L_ν Conv(U0) L⁻¹` on cosine modes.
pub fn existence_operator(p: &SymbolParams, u0: &CosineSeq) -> Result<LinearizedOp> {
    let n = u0.order();
    let d = u0.d;
    let left: Vec<Interval> = l_nu_values(p, d, 3 * n).into_iter().map(|x| x * 2.0).collect();
    let right: Vec<Interval> = l_values(p, d, 2 * n).into_iter().map(|x| x.recip()).collect::<Result<_>>()?;
    LinearizedOp::new(Basis::Cosine, n, u0.coeffs.clone(), left, right, None)
}

/// `F(U0) = LU0 + L_ν(U0 * U0)` on modes `0..=2N`, exactly.
pub fn residual(p: &SymbolParams, u0: &CosineSeq) -> Result<CosineSeq> {
    let uu = conv_even(u0, u0)?;
    let n2 = uu.order();
    let d = u0.d;
    let l = l_values(p, d, n2);
    let lnu = l_nu_values(p, d, n2);
    Ok(CosineSeq::new(d, (0..=n2).map(|k| l[k] * u0.get(k) + lnu[k] * uu.coeffs[k]).collect()))
}

/// `C(d; β) = e^{-2βd}(4d + 4e^{-βd}/(β(1 - e^{-3βd/2})) + 2/(β(1 - e^{-2βd})))`.
pub fn c_of_d(d: f64, beta: Interval) -> Interval {
    let di = Interval::point(d);
    let e = |k: f64| (-(beta * di * k)).exp();
    e(2.0) * (di * 4.0 + 4.0 * e(1.0) / (beta * (1.0 - e(1.5))) + 2.0 / (beta * (1.0 - e(2.0))))
}

/// `C1(d) = 2√π e^{-2ad}/(√(4ad)(1 - e^{-2ad})) + 4e^{-2ad}/(1 - e^{-2ad})`.
pub fn c1_of_d(d: f64, a: Interval) -> Result<Interval> {
    let di = Interval::point(d);
    let e2 = (-(a * di * 2.0)).exp();
    let pi = Interval::pi();
    Ok(2.0 * pi.sqrt()? * e2 / ((a * di * 4.0).sqrt()? * (1.0 - e2)) + 4.0 * e2 / (1.0 - e2))
}

/// Applies a point matrix to the first rows of a cosine sequence.
fn apply_block(m: &IMatrix, u: &CosineSeq) -> Result<CosineSeq> {
    let k = m.ncols();
    let col = IMatrix::from_fn(k, 1, |i, _| u.get(i));
    let r = m.mul(&col)?;
    Ok(CosineSeq::new(u.d, (0..r.nrows()).map(|i| r.get(i, 0)).collect()))
}

/// Periodic part `√(2d)(‖B^N π^N F‖² + ‖π_N 𝕎 F‖²)^{1/2}` of `Y0`.
pub fn bound_y0_periodic(s: &ExistenceSetup) -> Result<Interval> {
    let n = s.op.n;
    let f = residual(s.p, s.u0)?;
    let head = apply_block(&s.inv.bn, &f.resized(n))?.norm2();
    let tail = match &s.inv.w {
        None => f.band(n + 1, f.order()).norm2(),
        Some(w) => {
            let wf = conv_even(&CosineSeq::new(f.d, w.clone()), &f)?;
            wf.band(n + 1, wf.order()).norm2()
        }
    };
    let two_d = Interval::point(2.0 * f.d);
    Ok(two_d.sqrt()? * (head.sqr() + tail.sqr()).sqrt_nonneg()?)
}

/// Enclosure of `(V, Ê_β * V)`: the coefficient-space quadratic form
/// intersected with the physical-space bound, both rigorous.
pub fn cosh_form(v: &ExpSeq, beta: Interval) -> Result<Interval> {
    let e = cosh_coeffs(beta, v.d, 2 * v.order());
    let coeff = cosh_quadratic_form(&v.coeffs, &e)?;
    let phys = cosh_energy_exp(v, beta);
    let q = coeff.intersect(&phys);
    if q.is_empty() {
        return Err(Error::VerificationFailed(format!("weighted energy enclosures {coeff:?} and {phys:?} are disjoint")));
    }
    Ok(Interval::new(q.lo().max(0.0), q.hi()))
}

/// Enclosure of `∫_{d-1}^{d} |v'|²` from the closed form and the
/// physical-space bound.
pub fn boundary_form(v: &ExpSeq) -> Result<Interval> {
    let closed = boundary_energy_exp(v);
    let phys = boundary_energy_upper(&TrigPoly::parts_of_exp(v));
    let q = closed.intersect(&phys);
    if q.is_empty() {
        return Err(Error::VerificationFailed(format!("boundary energy enclosures {closed:?} and {phys:?} are disjoint")));
    }
    Ok(Interval::new(q.lo().max(0.0), q.hi()))
}

/// Unbounded-domain part of `Y0`:
/// `2d C_Y0 ((H, Ê*H)(1 + ‖B‖²(1 + C(d; a0))))^{1/2}` with `H = L_ν² U0` and
/// `Ê` the scaled `cosh(2a0 x)` coefficients.
pub fn bound_y0_tail(s: &ExistenceSetup) -> Result<Interval> {
    let d = s.u0.d;
    let n = s.u0.order();
    let lnu = l_nu_values(s.p, d, n);
    let h = CosineSeq::new(d, (0..=n).map(|k| s.u0.coeffs[k] * lnu[k].sqr()).collect());
    let q = cosh_form(&h.to_exp(), s.dc.a0)?;
    let nb = s.inv.norm_b;
    let inner = q * (1.0 + nb.sqr() * (1.0 + c_of_d(d, s.dc.a0)));
    Ok(Interval::point(2.0 * d) * s.dc.c_y0 * inner.sqrt_nonneg()?)
}

/// Certified tail bounds on the symbol beyond the truncation.
#[derive(Debug, Clone, Copy)]
pub struct TailSymbols {
    /// `sup_{|ξ| ≥ ξ_{N+1}} 1/|l(ξ)|`.
    pub inv_l: Interval,
    /// `sup_{|ξ| ≥ ξ_{N+1}} |ξ|/|l(ξ)|`.
    pub xi_over_l: Interval,
    /// `sup 1/|m_T - c|` for `T > 0`, `sup m_T/(c|m_T - c|)` for `T = 0`.
    pub v2_factor: Interval,
}

/// Bounds the symbol over `|ξ| ≥ X = ξ_{N+1}` by monotone envelopes.
///
/// For `T = 0`, `m_T` is decreasing, so `c - m_T(ξ) ≥ c - m_T(X)`. For
/// `T > 0`, `m_T(ξ) ≥ √(tanh(X) T ξ)` for `ξ ≥ X`, which must exceed `c` at
/// `X`. In both cases `ξ/l_ν(ξ)` is decreasing once `X ≥ 1/√ν`.
pub fn tail_symbols(p: &SymbolParams, d: f64, n: usize) -> Result<TailSymbols> {
    let x = grid_freq(n as i64 + 1, d);
    let lnu_x = l_nu(p, x);
    if !((x.sqr() * p.nu).lo() >= 1.0) {
        return Err(Error::TailMinimumUnverified(format!("ξ_(N+1) = {} is below 1/√ν", x.lo())));
    }
    let gap = if p.is_gravity() {
        p.c - m_t(p, x)
    } else {
        (x.tanh() * p.t * x).sqrt()? - p.c
    };
    if !gap.is_pos() {
        return Err(Error::TailMinimumUnverified(format!("symbol gap {:?} at ξ_(N+1) is not positive", gap)));
    }
    let inv_l = 1.0 / (gap * lnu_x);
    let xi_over_l = x / (gap * lnu_x);
    let v2_factor = if p.is_gravity() { m_t(p, x) / (p.c * gap) } else { 1.0 / gap };
    Ok(TailSymbols { inv_l, xi_over_l, v2_factor })
}

/// The sequences `V0 = -2ν U0''`, `V1 = -4ν U0'` and `V2 = 2U0` of the
/// product-rule splitting `2L_ν(u0 v) = v2 L_ν v + v0 v + v1 v'`.
pub fn split_sequences(p: &SymbolParams, u0: &CosineSeq) -> (CosineSeq, ExpSeq, CosineSeq) {
    let v0 = u0.second_derivative().scale(p.nu * (-2.0));
    let v1 = u0.derivative().scale(p.nu * (-4.0));
    let v2 = u0.scale(Interval::point(2.0));
    (v0, v1, v2)
}

/// Tail defects `Z13` and `Z14`.
///
/// `Z13 = ‖W*V0‖₁ sup 1/|l| + ‖W*V1‖₁ sup |ξ/l| + ‖W*V2‖₁ v2_factor`, and for
/// `T = 0`, `Z14 = ‖e0 - W*(e0 - V2/c)‖₁`.
pub fn bound_z13_z14(s: &ExistenceSetup) -> Result<(Interval, Interval)> {
    let d = s.u0.d;
    let n = s.u0.order();
    let ts = tail_symbols(s.p, d, n)?;
    let (v0, v1, v2) = split_sequences(s.p, s.u0);
    match &s.inv.w {
        None => {
            let z13 = v0.norm1() * ts.inv_l + v1.norm1() * ts.xi_over_l + v2.norm1() * ts.v2_factor;
            Ok((z13, Interval::ZERO))
        }
        Some(w) => {
            let w = CosineSeq::new(d, w.clone());
            let wv0 = conv_even(&w, &v0)?.norm1();
            let wv1 = conv_exp(&w.to_exp(), &v1)?.norm1();
            let wv2 = conv_even(&w, &v2)?.norm1();
            let z13 = wv0 * ts.inv_l + wv1 * ts.xi_over_l + wv2 * ts.v2_factor;
            let e0 = CosineSeq::e0(d, 0);
            let inner = e0.sub(&v2.scale(Interval::ONE / s.p.c))?;
            let z14 = e0.sub(&conv_even(&w, &inner)?)?.norm1();
            Ok((z13, z14))
        }
    }
}

/// The three unbounded-domain components of `Z1`, each a bound on the sum of
/// squares of the outer and inner kernel truncation errors.
pub fn bound_zu_components(s: &ExistenceSetup) -> Result<[Interval; 3]> {
    let d = s.u0.d;
    let a = s.strip.a_ival();
    let two_d = Interval::point(2.0 * d);
    let (v0, v1, v2) = split_sequences(s.p, s.u0);
    let q0 = cosh_form(&v0.to_exp(), a)?;
    let q1 = cosh_form(&v1, a)?;
    let q2 = cosh_form(&v2.to_exp(), a)?;
    let cd = 2.0 / a + c_of_d(d, a);
    let c1d = 2.0 / a + c1_of_d(d, a)?;
    let k0 = two_d * s.dc.c_0.sqr() * q0 * cd;
    let k1 = two_d * s.dc.c_1.sqr() * q1 * cd;
    let k2 = two_d * s.dc.c_2.sqr() * q2 * c1d + 8.0 * s.dc.c_2.sqr() * Interval::ln2() * boundary_form(&v2.to_exp())?;
    Ok([k0, k1, k2])
}

/// `Z2 = 2κ‖B‖`.
pub fn bound_z2(dc: &DecayConstants, inv: &ApproxInverse) -> Interval {
    dc.kappa * inv.norm_b * 2.0
}

/// Evaluates every existence bound.
pub fn compute_bounds(s: &ExistenceSetup) -> Result<ProofBounds> {
    if !s.strip.verified {
        return Err(Error::MissingStripCertificate);
    }
    let y0_periodic = bound_y0_periodic(s)?;
    let y0_tail = bound_y0_tail(s)?;
    let FiniteDefect { z11_top, z11_tail, z12 } = finite_defect(s.op, s.inv)?;
    let (z13, z14) = bound_z13_z14(s)?;
    let z1_periodic = (z11_top.sqr() + z11_tail.sqr() + z12.sqr() + (z13 + z14).sqr()).sqrt_nonneg()?;
    let zu_components = bound_zu_components(s)?;
    let roots: Interval = zu_components.iter().map(|c| c.sqrt_nonneg()).collect::<Result<Vec<_>>>()?.into_iter().sum();
    let zu = s.inv.norm_b * roots;
    Ok(ProofBounds {
        y0_periodic,
        y0_tail,
        y0: y0_periodic + y0_tail,
        z11_top,
        z11_tail,
        z12,
        z13,
        z14,
        z1_periodic,
        zu_components,
        zu,
        z1: z1_periodic + zu,
        z2: bound_z2(s.dc, s.inv),
        norm_b: s.inv.norm_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_of_d_is_small_for_large_domains() {
        let c = c_of_d(50.0, Interval::point(1.0));
        assert!(c.hi() < 1e-40 && c.lo() > 0.0);
        let c1 = c1_of_d(50.0, Interval::point(0.25)).unwrap();
        assert!(c1.hi() < 1e-9 && c1.lo() > 0.0);
    }

    #[test]
    fn tail_symbols_need_large_truncation() {
        let p = SymbolParams::new(0.5, 0.8).unwrap();
        assert!(matches!(tail_symbols(&p, 40.0, 2), Err(Error::TailMinimumUnverified(_))));
        let t = tail_symbols(&p, 40.0, 800).unwrap();
        assert!(t.inv_l.hi() > 0.0 && t.inv_l.hi() < 1e-3);
    }

    #[test]
    fn gravity_tail_factor() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        let t = tail_symbols(&p, 50.0, 800).unwrap();
        let x = 801.0 * std::f64::consts::PI / 50.0;
        let m = (x.tanh() / x).sqrt();
        assert!(t.v2_factor.contains(m / (1.1 * (1.1 - m))));
    }
}
