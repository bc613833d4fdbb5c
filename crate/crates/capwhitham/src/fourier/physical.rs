//! Physical-space bounds on weighted energies of trigonometric polynomials.
//!
//! Quadratic forms such as `(V, Ê * V)` with `Ê` the coefficients of a weight
//! concentrated near `x = ±d` are tiny when `v` has decayed there, yet their
//! coefficient-space evaluation cancels terms of size `‖V‖²` and cannot
//! resolve anything below the rounding floor. Here the same integrals are
//! bounded cell by cell: on each cell `|v|` is enclosed by a Taylor expansion
//! around the cell centre whose remainder uses the global derivative bound
//! `G_K = Σ |ξ_n|^K (|a_n| + |b_n|)`.

use rayon::prelude::*;

use super::{alpha, CosineSeq, ExpSeq, Phase};
use crate::rigor::Interval;
use crate::symbols::grid_freq;

/// Highest Taylor order used in cell enclosures.
const MAX_ORDER: usize = 20;

/// A real trigonometric polynomial `f(x) = Σ_{n=0}^{N} a_n cos(ξ_n x) + b_n sin(ξ_n x)`
/// with `ξ_n = nπ/d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    /// Half-period.
    pub d: f64,
    /// Cosine coefficients.
    pub a: Vec<Interval>,
    /// Sine coefficients.
    pub b: Vec<Interval>,
}

impl TrigPoly {
    /// The function represented by a cosine sequence.
    pub fn from_cosine(u: &CosineSeq) -> TrigPoly {
        let a = u.coeffs.iter().enumerate().map(|(n, c)| *c * alpha(n)).collect::<Vec<_>>();
        let b = vec![Interval::ZERO; a.len()];
        TrigPoly { d: u.d, a, b }
    }

    /// Real and imaginary parts of the function represented by an
    /// exponential sequence.
    pub fn parts_of_exp(v: &ExpSeq) -> [TrigPoly; 2] {
        let n = v.order() as i64;
        let sym: Vec<Interval> =
            (0..=n).map(|k| if k == 0 { v.get(0) } else { v.get(k) + v.get(-k) }).collect();
        let anti: Vec<Interval> =
            (0..=n).map(|k| if k == 0 { Interval::ZERO } else { v.get(k) - v.get(-k) }).collect();
        let d = v.d;
        match v.phase {
            Phase::Real => [
                TrigPoly { d, a: sym, b: vec![Interval::ZERO; n as usize + 1] },
                TrigPoly { d, a: vec![Interval::ZERO; n as usize + 1], b: anti },
            ],
            Phase::Imag => [
                TrigPoly { d, a: vec![Interval::ZERO; n as usize + 1], b: anti.iter().map(|x| -*x).collect() },
                TrigPoly { d, a: sym, b: vec![Interval::ZERO; n as usize + 1] },
            ],
        }
    }

    /// Highest frequency index.
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// Derivative `f'`.
    pub fn derivative(&self) -> TrigPoly {
        let xi = |n: usize| grid_freq(n as i64, self.d);
        TrigPoly {
            d: self.d,
            a: self.b.iter().enumerate().map(|(n, b)| *b * xi(n)).collect(),
            b: self.a.iter().enumerate().map(|(n, a)| -(*a * xi(n))).collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|c| c.mag() == 0.0)
    }

    /// Whether `f²` is even, so integrals over `(-d, d)` can be folded.
    fn square_is_even(&self) -> bool {
        self.a.iter().all(|c| c.mag() == 0.0) || self.b.iter().all(|c| c.mag() == 0.0)
    }

    /// Upper bounds `G_k = Σ ξ_n^k (|a_n| + |b_n|)` for `k = 0..=MAX_ORDER`.
    fn derivative_bounds(&self) -> Vec<f64> {
        let mut g = vec![Interval::ZERO; MAX_ORDER + 1];
        for n in 0..=self.order() {
            let c = self.a[n].abs() + self.b[n].abs();
            let xi = grid_freq(n as i64, self.d);
            let mut p = c;
            for gk in g.iter_mut() {
                *gk += p;
                p *= xi;
            }
        }
        g.iter().map(|x| x.hi()).collect()
    }

    /// Upper bound on `|f|` over the cell `[x_m - r, x_m + r]` with centre
    /// `x_m = m d / (2q)` and `r = d / (2q)`.
    fn cell_sup(&self, m: i64, q: u64, g: &[f64], rad: Interval) -> f64 {
        let period = 4 * q as i64;
        let pi = Interval::pi();
        let mut even = vec![Interval::ZERO; MAX_ORDER];
        let mut odd = vec![Interval::ZERO; MAX_ORDER];
        for n in 0..=self.order() {
            if self.a[n].mag() == 0.0 && self.b[n].mag() == 0.0 {
                continue;
            }
            // ξ_n x_m = π (n m mod 4q) / (2q), reduced exactly in integers.
            let k = ((n as i64 * m) % period + period) % period;
            let theta = pi * (k as f64) / (2.0 * q as f64);
            let (c, s) = (theta.cos(), theta.sin());
            let t0 = self.a[n] * c + self.b[n] * s;
            let t1 = self.b[n] * c - self.a[n] * s;
            let xi = grid_freq(n as i64, self.d);
            let mut p = Interval::ONE;
            for j in 0..MAX_ORDER {
                if j % 2 == 0 {
                    even[j] += p * t0;
                } else {
                    odd[j] += p * t1;
                }
                p *= xi;
            }
        }
        let mut best = f64::INFINITY;
        let mut partial = Interval::ZERO;
        let mut fac = Interval::ONE;
        for k in 0..MAX_ORDER {
            let dk = if k % 2 == 0 { even[k] } else { odd[k] };
            partial += dk.abs() * rad.powi(k as u32) / fac;
            fac = fac * ((k + 1) as f64);
            let rem = Interval::point(g[k + 1]) * rad.powi(k as u32 + 1) / fac;
            best = best.min((partial + rem).hi());
        }
        best
    }

    /// Upper bound on `∫ f(x)² w(x) dx` over the union of cells of index
    /// `m ∈ ms` (odd integers), where `weight(cell)` bounds `∫_cell w` for a
    /// cell given as an enclosing interval.
    fn square_integral<W>(&self, ms: &[i64], q: u64, weight: W) -> f64
    where
        W: Fn(Interval) -> Interval + Sync,
    {
        if self.is_zero() {
            return 0.0;
        }
        let g = self.derivative_bounds();
        let rad = Interval::point(self.d) / (2.0 * q as f64);
        let parts: Vec<Interval> = ms
            .par_iter()
            .map(|&m| {
                let s = self.cell_sup(m, q, &g, rad);
                let x0 = Interval::point(self.d) * (m - 1) as f64 / (2.0 * q as f64);
                let x1 = Interval::point(self.d) * (m + 1) as f64 / (2.0 * q as f64);
                Interval::point(s).sqr() * weight(Interval::new(x0.lo(), x1.hi()))
            })
            .collect();
        parts.into_iter().sum::<Interval>().hi()
    }

    /// Number of half-cells per half-period so that each cell radius `r`
    /// satisfies `r ξ_N ≤ 1/2`.
    fn resolution(&self) -> u64 {
        let xi_n = std::f64::consts::PI * self.order().max(1) as f64 / self.d;
        (self.d * xi_n).ceil().max(1.0) as u64
    }
}

/// Upper bound on `(1/2d) ∫_{-d}^{d} Σ_p f_p(x)² e^{-2βd} cosh(2βx) dx`, which
/// equals the quadratic form `Σ_{j,k} w_j Ê_{|j-k|} w_k` of [`super::cosh_quadratic_form`]
/// with `Ê = cosh_coeffs(β, d, ·)`.
pub fn cosh_energy_upper(parts: &[TrigPoly], beta: Interval) -> Interval {
    let mut total = Interval::ZERO;
    for f in parts {
        let d = f.d;
        let q = f.resolution();
        let di = Interval::point(d);
        let scale = (-(beta * di * 2.0)).exp();
        let weight = |cell: Interval| Interval::point(cell.width()) * scale * (beta * cell.mag() * 2.0).cosh();
        let (ms, fold): (Vec<i64>, f64) = if f.square_is_even() {
            ((0..q as i64).map(|i| 2 * i + 1).collect(), 2.0)
        } else {
            ((-(q as i64)..q as i64).map(|i| 2 * i + 1).collect(), 1.0)
        };
        let s = f.square_integral(&ms, q, weight);
        total += Interval::point(s) * fold / (di * 2.0);
    }
    Interval::new(0.0, total.hi())
}

/// Even-function convenience wrapper for [`cosh_energy_upper`].
pub fn cosh_energy_cosine(u: &CosineSeq, beta: Interval) -> Interval {
    cosh_energy_upper(&[TrigPoly::from_cosine(u)], beta)
}

/// Exponential-sequence convenience wrapper for [`cosh_energy_upper`].
pub fn cosh_energy_exp(v: &ExpSeq, beta: Interval) -> Interval {
    cosh_energy_upper(&TrigPoly::parts_of_exp(v), beta)
}

/// Upper bound on `∫_{d-1}^{d} Σ_p |f_p'(x)|² dx`.
pub fn boundary_energy_upper(parts: &[TrigPoly]) -> Interval {
    let mut total = Interval::ZERO;
    for f in parts {
        let fp = f.derivative();
        let d = f.d;
        let q = fp.resolution();
        // Cells of radius d/(2q) overlapping [d - 1, d].
        let first = (((d - 1.0) * 2.0 * q as f64 / d).floor() as i64).max(0);
        let first = if first % 2 == 0 { first + 1 } else { first };
        let ms: Vec<i64> = (first..2 * q as i64).step_by(2).collect();
        let s = fp.square_integral(&ms, q, |cell| Interval::point(cell.width()));
        total += Interval::point(s);
    }
    Interval::new(0.0, total.hi())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        (0..m).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    fn sample() -> ExpSeq {
        let w: Vec<f64> = (-6i64..=6).map(|k| 0.3 / (1.0 + (k * k) as f64) * if k < 0 { -1.0 } else { 1.0 }).collect();
        ExpSeq::from_f64(4.0, Phase::Imag, &w).unwrap()
    }

    #[test]
    fn boundary_energy_bounds_the_integral() {
        let v = sample();
        let dv = v.derivative();
        let exact = midpoint(|x| dv.eval(x).mid().powi(2), 3.0, 4.0, 20000);
        let upper = boundary_energy_upper(&TrigPoly::parts_of_exp(&v)).hi();
        assert!(upper >= exact);
        assert!(upper <= 1.5 * exact);
    }

    #[test]
    fn cosh_energy_bounds_the_weighted_integral() {
        let v = sample();
        let beta = Interval::point(0.3);
        let d = v.d;
        let weight = |x: f64| (-2.0 * 0.3 * d).exp() * (2.0 * 0.3 * x).cosh();
        let exact = midpoint(|x| v.eval(x).mid().powi(2) * weight(x), -d, d, 40000) / (2.0 * d);
        let upper = cosh_energy_exp(&v, beta).hi();
        assert!(upper >= exact);
        assert!(upper <= 5.0 * exact);
    }

    #[test]
    fn even_wrapper_matches_the_exponential_form() {
        let u = CosineSeq::from_f64(3.0, &[0.2, 0.1, -0.05, 0.01]);
        let beta = Interval::point(0.2);
        let a = cosh_energy_cosine(&u, beta).hi();
        let b = cosh_energy_exp(&u.to_exp(), beta).hi();
        assert!((a - b).abs() <= 1e-12 * a.max(b));
    }
}
