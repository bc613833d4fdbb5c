//! Verified analyticity strip of `1/(m_T - c)` and the kernel decay constants.
//!
//! [`verify_strip`] certifies, for a strip half-width `a` and a level `σ0`,
//! that `|m_T(z) - c| > 0` on `|Im z| ≤ a` and `|m_T - c| ≥ σ0` on the lines
//! `Im z = 0` and `Im z = a`. The region `|Re z| > x` is handled by an
//! analytic threshold on `x`; the compact part is covered by interval boxes
//! refined breadth-first. [`verify_sigma1`] certifies the growth level `σ1`
//! used for `T > 0`, and [`decay_constants`] evaluates the exponential decay
//! constants of the kernels of `L⁻¹`, `∂L⁻¹`, `(M_T - c)⁻¹` and `M_T L_ν⁻¹`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigor::{ComplexBox, Interval};
use crate::symbols::{m_t, m_t_complex, SymbolParams};

/// Maximum bisection depth of the box cover.
pub const MAX_DEPTH: u32 = 20;
/// Maximum number of boxes examined by one cover.
pub const BOX_BUDGET: usize = 1_000_000;

/// Certified strip data for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripData {
    /// Bond number the data was verified for.
    pub t: f64,
    /// Speed the data was verified for.
    pub c: f64,
    /// Strip half-width.
    pub a: f64,
    /// Lower bound of `|m_T - c|` on the real line and on `Im z = a`.
    pub sigma0: f64,
    /// Lower bound of `|m_T(ξ + ia) - c| / √(T|ξ|)` (only for `T > 0`).
    pub sigma1: Option<f64>,
    /// Real cutoff of the box cover.
    pub x: f64,
    /// Real cutoff used for the `σ1` verification.
    pub x_sigma1: Option<f64>,
    /// Number of initial subintervals along the real direction.
    pub grid: usize,
    /// Total number of boxes examined.
    pub boxes: usize,
    /// Set once the strip cover succeeded.
    pub verified: bool,
    /// Set once `σ1` has been verified (always false for `T = 0`).
    pub sigma1_verified: bool,
}

impl StripData {
    /// Strip half-width as an interval.
    pub fn a_ival(&self) -> Interval {
        Interval::point(self.a)
    }

    /// `σ0` as an interval.
    pub fn sigma0_ival(&self) -> Interval {
        Interval::point(self.sigma0)
    }
}

/// Upper bounds on the kernel decay and embedding constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    /// Decay rate of the kernel of `M_T L_ν⁻¹`.
    pub a0: Interval,
    /// Tail threshold used by `K1` and `K2`.
    pub xi0: f64,
    /// `C_a = (1 + |cos 2a|)/(1 - |cos 2a|)`.
    pub c_a: Interval,
    /// Envelope constant of the kernel of `M_T L_ν⁻¹`.
    pub c_y0: Interval,
    /// Envelope constant of the kernel of `L⁻¹`.
    pub c_0: Interval,
    /// Envelope constant of the kernel of `∂L⁻¹`.
    pub c_1: Interval,
    /// First auxiliary constant of the `(M_T - c)⁻¹` kernel.
    pub k_1: Interval,
    /// Second auxiliary constant of the `(M_T - c)⁻¹` kernel.
    pub k_2: Interval,
    /// Envelope constant `max{K2, K1 e^a}` of the `(M_T - c)⁻¹` kernel.
    pub c_2: Interval,
    /// Banach-algebra constant: `‖uv‖_l ≤ κ ‖u‖_l ‖v‖_l`.
    pub kappa: Interval,
    /// Embedding constant: `‖u‖_∞ ≤ sup_embed ‖u‖_l`.
    pub sup_embed: Interval,
}

fn check_domain(p: &SymbolParams, a: f64, sigma0: f64) -> Result<()> {
    if !(a > 0.0 && a < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("strip half-width a={a} must lie in (0, π/2)")));
    }
    if !((Interval::point(a).sqr() * p.nu).hi() < 1.0) {
        return Err(Error::Domain(format!("strip half-width a={a} must be below 1/√ν")));
    }
    if !(sigma0 > 0.0) {
        return Err(Error::Domain(format!("σ0={sigma0} must be positive")));
    }
    if p.is_gravity() && !(sigma0 < p.c) {
        return Err(Error::Domain(format!("σ0={sigma0} must be below c={}", p.c)));
    }
    Ok(())
}

/// `(cosh 2x - 1)/(cosh 2x + 1) = tanh² x`.
fn tanh_sq(x: Interval) -> Interval {
    x.tanh().sqr()
}

/// Finds a real cutoff `x` beyond which `|m_T - c| ≥ σ0` holds analytically
/// on the whole strip.
fn strip_cutoff(p: &SymbolParams, a: f64, sigma0: f64) -> Result<f64> {
    let ai = Interval::point(a);
    let k = (ai * 2.0).cos().abs();
    let mut x = 0.5;
    for _ in 0..60 {
        let xi = Interval::point(x);
        let ok = if p.is_gravity() {
            let r = k / (xi * 2.0).cosh();
            let rhs = (1.0 + r) / ((p.c - Interval::point(sigma0)).powi(4) * (1.0 - r));
            (1.0 - r).lo() > 0.0 && xi.sqr().lo() > rhs.hi()
        } else {
            let lhs = tanh_sq(xi) * (Interval::point(p.t).sqr() * xi.powi(4)) / (xi.sqr() + ai.sqr());
            lhs.lo() > (Interval::point(p.c.abs()) + sigma0).powi(4).hi()
        };
        if ok {
            return Ok(x);
        }
        x *= 1.25;
    }
    Err(Error::VerificationFailed(format!("no real cutoff found for a={a}, σ0={sigma0}")))
}

/// Lower bound of `|w|²` over a complex box.
fn modulus_sq_lower(w: &ComplexBox) -> f64 {
    let r = w.re.mig();
    let i = w.im.mig();
    (Interval::point(r).sqr() + Interval::point(i).sqr()).lo().max(0.0)
}

/// Breadth-first cover of a family of cells. `check` returns `Ok(true)` when
/// a cell is certified, `Ok(false)` or [`Error::SubdivideRequest`] when it must
/// be split, and other errors abort. Returns the number of cells examined.
fn cover<C, F, S>(initial: Vec<C>, check: F, split: S, what: &str) -> Result<usize>
where
    C: Copy + Send + Sync + std::fmt::Debug,
    F: Fn(&C) -> Result<bool> + Sync,
    S: Fn(&C) -> [C; 2] + Sync,
{
    let mut level = initial;
    let mut examined = 0usize;
    for depth in 0..=MAX_DEPTH {
        if level.is_empty() {
            return Ok(examined);
        }
        examined += level.len();
        if examined > BOX_BUDGET {
            return Err(Error::VerificationFailed(format!("{what}: box budget exhausted")));
        }
        let outcomes: Vec<Result<bool>> = level.par_iter().map(&check).collect();
        let mut next = Vec::new();
        for (cell, outcome) in level.iter().zip(outcomes) {
            match outcome {
                Ok(true) => {}
                Ok(false) | Err(Error::SubdivideRequest) => {
                    if depth == MAX_DEPTH {
                        return Err(Error::VerificationFailed(format!("{what}: cell {cell:?} not certified")));
                    }
                    next.extend(split(cell));
                }
                Err(e) => return Err(e),
            }
        }
        level = next;
    }
    Err(Error::VerificationFailed(format!("{what}: depth limit reached")))
}

fn split_interval(i: &Interval) -> [Interval; 2] {
    let m = i.mid();
    [Interval::new(i.lo(), m), Interval::new(m, i.hi())]
}

fn uniform_pieces(lo: f64, hi: f64, n: usize) -> Vec<Interval> {
    let n = n.max(1);
    let step = (hi - lo) / n as f64;
    (0..n)
        .map(|k| {
            let a = if k == 0 { lo } else { lo + step * k as f64 };
            let b = if k + 1 == n { hi } else { lo + step * (k + 1) as f64 };
            Interval::new(a, b)
        })
        .collect()
}

/// Certifies the strip `|Im z| ≤ a` and the level `σ0` for `m_T - c`.
///
/// `grid` is the number of initial pieces of the real cutoff interval
/// `[0, x]`; cells are bisected as needed.
pub fn verify_strip(p: &SymbolParams, a: f64, sigma0: f64, grid: usize) -> Result<StripData> {
    check_domain(p, a, sigma0)?;
    let x = strip_cutoff(p, a, sigma0)?;
    let c = Interval::point(p.c);
    let s0 = sigma0 * sigma0;
    let ai = Interval::point(a);

    let real = cover(
        uniform_pieces(0.0, x, grid),
        |i| Ok(((m_t(p, *i) - c).mig()) >= sigma0),
        split_interval,
        "real line",
    )?;
    let top = cover(
        uniform_pieces(0.0, x, grid),
        |i| {
            let w = m_t_complex(p, ComplexBox::new(*i, ai))? - c;
            Ok(modulus_sq_lower(&w) >= s0 * (1.0 + 1e-15) + f64::MIN_POSITIVE)
        },
        split_interval,
        "upper boundary line",
    )?;
    let cells: Vec<ComplexBox> = uniform_pieces(0.0, x, grid)
        .into_iter()
        .flat_map(|re| uniform_pieces(0.0, a, 4).into_iter().map(move |im| ComplexBox::new(re, im)))
        .collect();
    let interior = cover(
        cells,
        |z| {
            let w = m_t_complex(p, *z)? - c;
            Ok(!(w.re.contains_zero() && w.im.contains_zero()))
        },
        |z| {
            let wr = z.re.width();
            let wi = z.im.width();
            if wr >= wi {
                let [l, r] = split_interval(&z.re);
                [ComplexBox::new(l, z.im), ComplexBox::new(r, z.im)]
            } else {
                let [l, r] = split_interval(&z.im);
                [ComplexBox::new(z.re, l), ComplexBox::new(z.re, r)]
            }
        },
        "strip interior",
    )?;
    Ok(StripData {
        t: p.t,
        c: p.c,
        a,
        sigma0,
        sigma1: None,
        x,
        x_sigma1: None,
        grid,
        boxes: real + top + interior,
        verified: true,
        sigma1_verified: false,
    })
}

/// Floating-point estimate of `min |m_T - c|` over the real line and the line
/// `Im z = a`, scanned on `[0, xmax]`.
pub fn scan_sigma0(p: &SymbolParams, a: f64, xmax: f64, samples: usize) -> f64 {
    let ai = Interval::point(a);
    let mut best = f64::INFINITY;
    for k in 0..=samples {
        let xi = xmax * k as f64 / samples as f64;
        let r = (m_t(p, Interval::point(xi)).mid() - p.c).abs();
        best = best.min(r);
        if let Ok(m) = m_t_complex(p, ComplexBox::new(Interval::point(xi), ai)) {
            let w = ((m.re.mid() - p.c).powi(2) + m.im.mid().powi(2)).sqrt();
            best = best.min(w);
        }
    }
    if p.is_gravity() {
        best.min(p.c)
    } else {
        best
    }
}

/// Scans for `σ0`, shrinks it by `safety` and verifies the strip.
pub fn verify_strip_auto(p: &SymbolParams, a: f64, safety: f64, grid: usize) -> Result<StripData> {
    let est = scan_sigma0(p, a, 40.0, 8000);
    let mut sigma0 = est * safety;
    if p.is_gravity() {
        sigma0 = sigma0.min(0.999 * p.c);
    }
    verify_strip(p, a, sigma0, grid)
}

/// Certifies `|m_T(ξ + ia) - c| ≥ σ1 √(T|ξ|)` for all real `ξ`.
///
/// For `T = 0` the data is returned unchanged. The level `σ1` is chosen from
/// a floating-point scan, capped by the analytic tail bound
/// `(tanh²(x)/32)^{1/4}`, then certified on `[0, x]` by subdivision.
pub fn verify_sigma1(p: &SymbolParams, s: &StripData) -> Result<StripData> {
    if p.is_gravity() {
        return Ok(s.clone());
    }
    if !s.verified {
        return Err(Error::MissingStripCertificate);
    }
    let ai = s.a_ival();
    let t = Interval::point(p.t);
    let c = Interval::point(p.c);
    let mut x = s.a.max(1.0);
    let mut found = None;
    for _ in 0..60 {
        let xi = Interval::point(x);
        let g = tanh_sq(xi) * t.sqr() * xi.powi(4) / (xi.sqr() + ai.sqr());
        let lhs = g.sqrt()?.sqrt()? * 0.5 - p.c.abs();
        if lhs.lo() >= 0.0 {
            found = Some(x);
            break;
        }
        x *= 1.25;
    }
    let x = found.ok_or_else(|| Error::VerificationFailed("no cutoff for σ1".into()))?;
    let cap = (tanh_sq(Interval::point(x)) / 32.0).sqrt()?.sqrt()?.lo();

    let mut est = f64::INFINITY;
    for k in 1..=4000 {
        let xi = x * k as f64 / 4000.0;
        if let Ok(m) = m_t_complex(p, ComplexBox::new(Interval::point(xi), ai)) {
            let w = ((m.re.mid() - p.c).powi(2) + m.im.mid().powi(2)).sqrt();
            est = est.min(w / (p.t * xi).sqrt());
        }
    }
    let sigma1 = (0.9 * est).min(cap);
    if !(sigma1 > 0.0) {
        return Err(Error::VerificationFailed("σ1 scan produced a nonpositive level".into()));
    }
    let n = cover(
        uniform_pieces(0.0, x, s.grid.max(16)),
        |i| {
            let w = m_t_complex(p, ComplexBox::new(*i, ai))? - c;
            let rhs = Interval::point(sigma1) * (t * i.hi()).sqrt()?;
            let lower = Interval::point(modulus_sq_lower(&w)).sqrt()?.lo();
            Ok(lower >= rhs.hi())
        },
        split_interval,
        "σ1 line",
    )?;
    let mut out = s.clone();
    out.sigma1 = Some(sigma1);
    out.x_sigma1 = Some(x);
    out.sigma1_verified = true;
    out.boxes += n;
    Ok(out)
}

/// Certified upper bound on `max_{s>0} min{2√s + √2, √2/(1 - e^{-πs})}`.
///
/// The first branch increases and the second decreases, so on a cell
/// `[s_i, s_{i+1}]` the minimum is at most `min{f(s_{i+1}), g(s_i)}`.
pub fn y0_shape_constant() -> Interval {
    let sqrt2 = Interval::sqrt2();
    let pi = Interval::pi();
    let f = |s: f64| Interval::point(s).sqrt().expect("s ≥ 0") * 2.0 + sqrt2;
    let g = |s: f64| sqrt2 / (1.0 - (-(pi * s)).exp());
    let (s_lo, s_hi, n) = (0.01, 3.0, 3000);
    let nodes: Vec<f64> = (0..=n).map(|k| s_lo + (s_hi - s_lo) * k as f64 / n as f64).collect();
    let mut best = f(s_lo).hi().max(g(s_hi).hi());
    for w in nodes.windows(2) {
        best = best.max(f(w[1]).hi().min(g(w[0]).hi()));
    }
    Interval::new(0.0, best)
}

/// `C_a = (1 + |cos 2a|)/(1 - |cos 2a|)`.
pub fn c_a(a: Interval) -> Interval {
    let k = (a * 2.0).cos().abs();
    (1.0 + k) / (1.0 - k)
}

fn xi0_conditions(p: &SymbolParams, xi0: f64, ca: Interval) -> bool {
    let t = Interval::point(p.t);
    let x = Interval::point(xi0);
    let c = p.c.abs();
    let th = x.tanh();
    let c1 = match (th * t * x).sqrt() {
        Ok(v) => (v * 0.5).lo() >= c,
        Err(_) => false,
    };
    let c2 = xi0 >= 1.0 && (x.sqr() * t).lo() >= 1.0;
    let c3 = (th * x * 2.0 / (t * 3.0)).lo() >= 1.0;
    let c4 = match ((t * x).sqrt(), ca.recip().and_then(|r| r.sqrt())) {
        (Ok(v), Ok(r)) => (v * r * 0.5).lo() >= c,
        _ => false,
    };
    c1 && c2 && c3 && c4
}

fn k1_bound(p: &SymbolParams, s: &StripData, xi0: f64) -> Interval {
    let pi = Interval::pi();
    let s0 = s.sigma0_ival();
    let c = Interval::point(p.c.abs());
    let x = Interval::point(xi0);
    let sx = x.sqrt().expect("ξ0 > 0");
    let ln = x.ln().expect("ξ0 > 0");
    if p.is_gravity() {
        let c3 = c.powi(3);
        let m = c3.min(&Interval::ONE);
        (2.0 + 4.0 * (-(x * 2.0)).exp()) / (pi * m * sx * s0)
            + 1.0 / (pi * s0 * c)
            + 2.0 / (pi * c.sqr())
            + (2.0 + 3.0 * ln) / (pi * c3)
            + 1.0 / (c.sqr() * (pi * 2.0).sqrt().expect("2π > 0"))
    } else {
        let t = Interval::point(p.t);
        let st = t.sqrt().expect("T > 0");
        let t32 = t * st;
        2.0 * x / (pi * s0)
            + 2.0 * sx * (1.0 + c) / (pi * s0 * st)
            + 2.0 * (1.0 / (3.0 * t) + c / (4.0 * t32) + 2.0 * c.sqr() / t)
                / (pi * (x.tanh() * t).sqrt().expect("positive") * sx)
            + c / (t * pi) * (2.0 + 3.0 * ln)
            + 1.0 / (pi * t * 2.0).sqrt().expect("positive")
    }
}

/// Evaluates every decay and embedding constant for a verified strip.
///
/// For `T > 0` the tail threshold `ξ0` is the smallest value on the ladder
/// `1, 2, 4, …` satisfying all side conditions; for `T = 0` every `ξ0 ≥ 1` is
/// admissible and the ladder value with the smallest `K1` is kept.
pub fn decay_constants(p: &SymbolParams, s: &StripData) -> Result<DecayConstants> {
    if !s.verified {
        return Err(Error::MissingStripCertificate);
    }
    if s.t != p.t || s.c != p.c {
        return Err(Error::DimensionMismatch("strip data was verified for different parameters".into()));
    }
    let pi = Interval::pi();
    let a = s.a_ival();
    let s0 = s.sigma0_ival();
    let nu = p.nu;
    let c = Interval::point(p.c.abs());
    let ca = c_a(a);
    let one_m_nua2 = 1.0 - nu * a.sqr();
    let nu14 = nu.sqrt()?.sqrt()?;

    let (a0, xi0) = if p.is_gravity() {
        let mut best: Option<(f64, f64)> = None;
        for k in 0..7 {
            let x = f64::powi(2.0, k);
            let v = k1_bound(p, s, x).hi();
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((x, v));
            }
        }
        (Interval::ONE, best.expect("nonempty ladder").0)
    } else {
        let t = Interval::point(p.t);
        let a0 = (pi * 0.5).min(&t.sqrt()?.recip()?);
        let mut xi0 = None;
        for k in 0..40 {
            let x = f64::powi(2.0, k);
            if xi0_conditions(p, x, ca) {
                xi0 = Some(x);
                break;
            }
        }
        let xi0 = xi0.ok_or_else(|| Error::ThresholdUnsatisfied("no ξ0 on the ladder satisfies the side conditions".into()))?;
        (a0, xi0)
    };

    let shape = y0_shape_constant();
    let c_y0 = if p.is_gravity() {
        shape
    } else {
        let t = Interval::point(p.t);
        let st = t.sqrt()?;
        shape / (pi.sqrt()? * st.sqrt()?)
            * (2.0 / (1.0 + a0 * st).sqrt()? + 1.0 / Interval::sqrt2())
    };

    let c_0 = 1.0 / (pi * s0 * one_m_nua2) + 1.0 / (pi * nu * s0);

    let c_1 = if p.is_gravity() {
        1.0 / (2.0 * c * nu)
            + (1.0 + a.sqrt()?) * ca.sqrt()?.sqrt()? / (pi * c * s0) * (1.0 / one_m_nua2 + 2.0 / nu)
    } else {
        let s1 = Interval::point(s.sigma1.filter(|_| s.sigma1_verified).ok_or(Error::MissingStripCertificate)?);
        let st = Interval::point(p.t).sqrt()?;
        (2.0 * (1.0 + a) / (s0 * one_m_nua2) + 4.0 * (1.0 + a) / (s1 * st * nu)) / (2.0 * pi)
    };

    let k_1 = k1_bound(p, s, xi0);

    let k_2 = if p.is_gravity() {
        let k = (a * 2.0).cos().abs();
        ca.sqrt()?.sqrt()? / pi
            * (1.0 / (2.0 * s0.sqr()) * (1.0 / (a * a.sqrt()?) + 2.0)
                + 1.0 / (4.0 * s0.sqr() * (1.0 - k).sqr() * a.sqrt()?))
    } else {
        let t = Interval::point(p.t);
        let x = Interval::point(xi0);
        let r = (x.sqr() + a.sqr()).sqrt()?;
        ca * r / (2.0 * pi * s0.sqr() * (1.0 - t * a.sqr()).sqr())
            * ((1.0 + t * a.sqr() + a * ca) / a.sqr() + ca * t * r)
            + 2.0 * ca.sqr() / pi
                * (2.0 * (1.0 + t) / (t * x).sqrt()? + (2.0 + a) / 2.0 * (-(x * 2.0)).exp())
    };

    let k1ea = k_1 * a.exp();
    let c_2 = k_2.max(&k1ea);

    let kappa = 2.0 / (s0.sqr() * nu14);
    let sup_embed = 1.0 / (2.0 * nu14 * s0);

    let all = [c_y0, c_0, c_1, k_1, k_2, c_2, kappa, sup_embed];
    if all.iter().any(|v| !(v.hi() > 0.0 && v.hi().is_finite())) {
        return Err(Error::ThresholdUnsatisfied("a decay constant is not finite and positive".into()));
    }
    Ok(DecayConstants { a0, xi0, c_a: ca, c_y0, c_0, c_1, k_1, k_2, c_2, kappa, sup_embed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gravity_strip_verifies() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        let s = verify_strip(&p, 0.1, 0.09, 32).unwrap();
        assert!(s.verified);
        let dc = decay_constants(&p, &s).unwrap();
        assert!(dc.c_2.hi() >= dc.k_2.hi());
    }

    #[test]
    fn wide_strip_rejected() {
        let p = SymbolParams::new(0.0, 1.1).unwrap();
        assert!(matches!(verify_strip(&p, 1.6, 0.09, 32), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_speed_fails() {
        let p = SymbolParams::new(0.0, 1.0).unwrap();
        assert!(matches!(verify_strip(&p, 0.1, 0.01, 32), Err(Error::VerificationFailed(_))));
    }

    #[test]
    fn capillary_sigma1() {
        let p = SymbolParams::new(0.5, 0.8).unwrap();
        let s = verify_strip_auto(&p, 0.4, 0.95, 64).unwrap();
        let s = verify_sigma1(&p, &s).unwrap();
        let s1 = s.sigma1.unwrap();
        assert!(s1 > 0.0 && s1 <= 0.4);
        let dc = decay_constants(&p, &s).unwrap();
        assert!(dc.a0.contains(1.0 / 0.5f64.sqrt()));
    }

    #[test]
    fn shape_constant_range() {
        let s = y0_shape_constant();
        assert!(s.hi() > 2.4 && s.hi() < 2.5, "{s:?}");
    }
}
