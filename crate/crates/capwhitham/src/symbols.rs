//! Enclosures of the Fourier symbols of the capillary-gravity Whitham problem.
//!
//! All functions take the angular frequency `ξ` directly:
//!
//! ```text
//! m_T(ξ) = √(tanh(ξ)(1 + Tξ²)/ξ),   l_ν(ξ) = 1 + νξ²,   l(ξ) = (m_T(ξ) - c) l_ν(ξ).
//! ```
//!
//! On the half-period grid of `(-d, d)` the frequency of mode `n` is
//! `ξ_n = nπ/d`, see [`grid_freq`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigor::{cbox_sqrt, ComplexBox, Interval};

/// Model parameters: Bond number `T`, speed `c` and regularization weight `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolParams {
    /// Bond number, `T ≥ 0`.
    pub t: f64,
    /// Wave speed.
    pub c: f64,
    /// Regularization weight: `T` when `T > 0`, `4/π²` when `T = 0`.
    pub nu: Interval,
}

impl SymbolParams {
    /// Builds the parameter set, deriving `ν` from `T`.
    ///
    /// Only finiteness and `T ≥ 0` are enforced here; whether `c` lies in the
    /// admissible range is decided by strip verification.
    pub fn new(t: f64, c: f64) -> Result<Self> {
        if !(t.is_finite() && c.is_finite()) || t < 0.0 {
            return Err(Error::Config(format!("invalid parameters T={t}, c={c}")));
        }
        let nu = if t > 0.0 {
            Interval::point(t)
        } else {
            Interval::point(4.0) / Interval::pi().sqr()
        };
        Ok(SymbolParams { t, c, nu })
    }

    /// True for the purely gravitational case `T = 0`.
    pub fn is_gravity(&self) -> bool {
        self.t == 0.0
    }

    /// Returns a copy with a different speed, keeping `T` and `ν`.
    pub fn with_speed(&self, c: f64) -> Self {
        SymbolParams { c, ..*self }
    }

    /// Floating-point value of `ν`.
    pub fn nu_f64(&self) -> f64 {
        self.nu.mid()
    }
}

/// Frequency `nπ/d` of cosine mode `n` on the half-period `d`.
pub fn grid_freq(n: i64, d: f64) -> Interval {
    Interval::point(n as f64) * Interval::pi() / Interval::point(d)
}

/// Enclosure of `tanh(x)/x` at a nonnegative point `x`.
fn tanhc_point(x: f64) -> Interval {
    if x <= 1e-3 {
        let p = Interval::point(x);
        let p2 = p.sqr();
        let p4 = p2.sqr();
        let p6 = p4 * p2;
        let rem = Interval::new(-(p6 * (17.0 / 315.0)).hi() * (1.0 + 1e-12), 0.0);
        Interval::ONE - p2 / 3.0 + p4 * 2.0 / 15.0 + rem
    } else {
        let p = Interval::point(x);
        p.tanh() / p
    }
}

/// Enclosure of `tanh(ξ)/ξ`, extended by `1` at `ξ = 0`.
///
/// The function is even and decreasing in `|ξ|`, so the range over an
/// interval is fixed by the endpoint closest to and farthest from zero.
pub fn tanhc(xi: Interval) -> Interval {
    let a = xi.mig();
    let b = xi.mag();
    let lo = if b.is_infinite() { 0.0 } else { tanhc_point(b).lo().max(0.0) };
    let hi = tanhc_point(a).hi().min(1.0);
    Interval::new(lo, hi)
}

/// Enclosure of `m_T(ξ)` over a real interval.
pub fn m_t(p: &SymbolParams, xi: Interval) -> Interval {
    let radicand = tanhc(xi) * (1.0 + p.t * xi.sqr());
    Interval::new(radicand.lo().max(0.0), radicand.hi())
        .sqrt()
        .expect("nonnegative radicand")
}

/// Enclosure of `tanh(z)/z` on a complex box.
///
/// Near the origin the partial-fraction expansion
/// `tanh z / z = Σ_k 2/(z² + ω_k²)`, `ω_k = (k - 1/2)π`, is truncated after
/// four terms with the geometric tail bound `2.001 (4/π²) q⁴/(1 - q)`,
/// `q = (2|z|/π)²`. Away from the origin the quotient is formed directly.
pub fn tanhc_complex(z: ComplexBox) -> Result<ComplexBox> {
    let mag = z.abs().hi();
    let straddles = z.re.contains_zero() && z.im.contains_zero();
    if !straddles && mag >= 0.1 {
        return z.tanh()?.checked_div(&z).map_err(|_| Error::SubdivideRequest);
    }
    if mag > 0.5 {
        return Err(Error::SubdivideRequest);
    }
    let z2 = z * z;
    let z4 = z2 * z2;
    let z6 = z4 * z2;
    let series = ComplexBox::real(Interval::ONE) - z2.scale(Interval::ONE / 3.0)
        + z4.scale(Interval::point(2.0) / 15.0)
        - z6.scale(Interval::point(17.0) / 315.0);
    let pi = Interval::pi();
    let q = (Interval::point(2.0 * mag) / pi).sqr();
    let tail = (Interval::point(2.001) * 4.0 / pi.sqr()) * q.powi(4) / (1.0 - q);
    let e = Interval::symmetric(tail.hi());
    Ok(ComplexBox::new(series.re + e, series.im + e))
}

/// Enclosure of `m_T(z)` on a box inside the strip `|Im z| < min{1/√ν, π/2}`.
///
/// Boxes whose radicand meets the branch cut, or where `tanh` has a pole
/// nearby, yield [`Error::SubdivideRequest`].
pub fn m_t_complex(p: &SymbolParams, z: ComplexBox) -> Result<ComplexBox> {
    let ymax = z.im.mag();
    let limit = (1.0 / p.nu.hi().sqrt()).min(std::f64::consts::FRAC_PI_2);
    if !(ymax < limit) {
        return Err(Error::Domain(format!("imaginary part {ymax} outside the analyticity strip")));
    }
    let poly = ComplexBox::real(Interval::ONE) + (z * z).scale(Interval::point(p.t));
    let radicand = tanhc_complex(z)? * poly;
    cbox_sqrt(radicand).map_err(|e| match e {
        Error::BranchCut => Error::SubdivideRequest,
        other => other,
    })
}

/// Enclosure of `l_ν(ξ) = 1 + νξ²`.
pub fn l_nu(p: &SymbolParams, xi: Interval) -> Interval {
    1.0 + p.nu * xi.sqr()
}

/// Enclosure of `l(ξ) = (m_T(ξ) - c)(1 + νξ²)`.
pub fn l_sym(p: &SymbolParams, xi: Interval) -> Interval {
    (m_t(p, xi) - p.c) * l_nu(p, xi)
}

/// Floating-point `m_T(ξ)`, for non-rigorous construction only.
pub fn m_t_f64(t: f64, xi: f64) -> f64 {
    let x = xi.abs();
    let tc = if x < 1e-4 { 1.0 - x * x / 3.0 } else { x.tanh() / x };
    (tc * (1.0 + t * xi * xi)).sqrt()
}

/// Floating-point `l_ν(ξ)`.
pub fn l_nu_f64(nu: f64, xi: f64) -> f64 {
    1.0 + nu * xi * xi
}

/// Floating-point `l(ξ)`.
pub fn l_sym_f64(p: &SymbolParams, xi: f64) -> f64 {
    (m_t_f64(p.t, xi) - p.c) * l_nu_f64(p.nu_f64(), xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_at_zero_is_one() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        assert!(m_t(&p, Interval::ZERO).contains(1.0));
        let p = SymbolParams::new(0.5, 0.8).unwrap();
        assert!(m_t(&p, Interval::ZERO).contains(1.0));
    }

    #[test]
    fn gravity_tail_is_small() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        let m = m_t(&p, Interval::point(100.0));
        assert!(m.lo() > 0.0 && m.hi() < 0.11);
    }

    #[test]
    fn l_at_zero() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        let l = l_sym(&p, Interval::ZERO);
        assert!(l.contains(1.0 - 1.1));
        assert!(l_nu(&p, Interval::ZERO).contains(1.0));
    }

    #[test]
    fn complex_agrees_on_real_axis() {
        let p = SymbolParams::new(0.5, 0.8).unwrap();
        for &x in &[0.1, 0.5, 2.0, 7.0] {
            let r = m_t(&p, Interval::point(x));
            let z = m_t_complex(&p, ComplexBox::real(Interval::point(x))).unwrap();
            assert!(z.re.intersect(&r).lo() <= z.re.intersect(&r).hi(), "x={x}");
            assert!(z.re.width() < 1e-6 && z.im.mag() < 1e-6);
        }
    }

    #[test]
    fn complex_rejects_outside_strip() {
        let p = SymbolParams::new(0.5, 0.8).unwrap();
        let z = ComplexBox::new(Interval::ONE, Interval::point(1.6));
        assert!(matches!(m_t_complex(&p, z), Err(Error::Domain(_))));
    }

    #[test]
    fn tanhc_series_matches_direct() {
        for &x in &[0.01, 0.1, 0.24, 0.26] {
            let e = tanhc(Interval::point(x));
            assert!(e.contains(x.tanh() / x), "x={x} {e:?}");
        }
    }
}
