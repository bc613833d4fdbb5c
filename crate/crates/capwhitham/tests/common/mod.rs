//! Independent oracles shared by the property suites and the acceptance
//! harness. Each suite runs a number of seeded random cases and reports the
//! first failing case.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use capwhitham::fourier::{conv_even, cosh_coeffs, CosineSeq};
use capwhitham::rigor::{mat_norm2_upper, IMatrix, Interval};
use capwhitham::strip::{decay_constants, verify_sigma1, verify_strip_auto};
use capwhitham::symbols::{m_t_f64, SymbolParams};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of a suite: number of cases checked, or the first failure.
pub type SuiteResult = Result<usize, String>;

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn encloses(iv: Interval, v: &BigFloat) -> bool {
    big(iv.lo()) <= *v && *v <= big(iv.hi())
}

fn random_interval(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Interval {
    let a = r.gen_range(lo..hi);
    let w = if r.gen_bool(0.3) { 0.0 } else { r.gen_range(0.0..1.0) * (hi - lo) * 1e-3 };
    Interval::new(a, (a + w).min(hi))
}

/// Interval arithmetic and elementary functions contain the 256-bit value at
/// both endpoints and the midpoint of random argument intervals.
pub fn interval_containment(cases: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    let mut cc = Consts::new().map_err(|e| format!("{e:?}"))?;
    for case in 0..cases {
        let x = random_interval(&mut r, -40.0, 40.0);
        let y = random_interval(&mut r, -40.0, 40.0);
        let pos = random_interval(&mut r, 1e-3, 1e3);
        for (xi, yi, pi) in [(x.lo(), y.lo(), pos.lo()), (x.mid(), y.hi(), pos.mid()), (x.hi(), y.mid(), pos.hi())] {
            let (bx, by, bp) = (big(xi), big(yi), big(pi));
            let checks: Vec<(&str, Interval, BigFloat)> = vec![
                ("add", x + y, bx.add(&by, PREC, RM)),
                ("sub", x - y, bx.sub(&by, PREC, RM)),
                ("mul", x * y, bx.mul(&by, PREC, RM)),
                ("div", x / pos, bx.div(&bp, PREC, RM)),
                ("sqr", x.sqr(), bx.mul(&bx, PREC, RM)),
                ("sqrt", pos.sqrt().map_err(|e| e.to_string())?, bp.sqrt(PREC, RM)),
                ("exp", x.exp(), bx.exp(PREC, RM, &mut cc)),
                ("ln", pos.ln().map_err(|e| e.to_string())?, bp.ln(PREC, RM, &mut cc)),
                ("tanh", x.tanh(), bx.tanh(PREC, RM, &mut cc)),
                ("sinh", x.sinh(), bx.sinh(PREC, RM, &mut cc)),
                ("cosh", x.cosh(), bx.cosh(PREC, RM, &mut cc)),
                ("sin", x.sin(), bx.sin(PREC, RM, &mut cc)),
                ("cos", x.cos(), bx.cos(PREC, RM, &mut cc)),
                ("atan", x.atan(), bx.atan(PREC, RM, &mut cc)),
            ];
            for (name, iv, v) in checks {
                if !encloses(iv, &v) {
                    return Err(format!("case {case}: {name} misses the exact value; x={x:?} y={y:?} p={pos:?} -> {iv:?}"));
                }
            }
        }
    }
    Ok(cases)
}

fn random_cosine(r: &mut ChaCha8Rng, d: f64, n: usize) -> CosineSeq {
    let c: Vec<f64> = (0..=n).map(|k| r.gen_range(-1.0..1.0) / (1.0 + k as f64)).collect();
    CosineSeq::from_f64(d, &c)
}

fn eval_cos(u: &[f64], d: f64, x: f64) -> f64 {
    u.iter()
        .enumerate()
        .map(|(n, c)| if n == 0 { *c } else { 2.0 * c * (n as f64 * std::f64::consts::PI * x / d).cos() })
        .sum()
}

/// Coefficients of a product agree with the trapezoid rule applied to the
/// pointwise product, which is exact for trigonometric polynomials.
pub fn conv_vs_quadrature(cases: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    for case in 0..cases {
        let d = r.gen_range(1.0..30.0);
        let n = r.gen_range(1..12);
        let u = random_cosine(&mut r, d, n);
        let v = random_cosine(&mut r, d, n);
        let w = conv_even(&u, &v).map_err(|e| e.to_string())?;
        let (um, vm) = (u.mids(), v.mids());
        let m = 8 * n + 8;
        let xs: Vec<f64> = (0..m).map(|j| -d + 2.0 * d * j as f64 / m as f64).collect();
        let prod: Vec<f64> = xs.iter().map(|&x| eval_cos(&um, d, x) * eval_cos(&vm, d, x)).collect();
        for k in 0..=2 * n {
            let oracle: f64 = xs
                .iter()
                .zip(&prod)
                .map(|(x, p)| p * (k as f64 * std::f64::consts::PI * x / d).cos())
                .sum::<f64>()
                / m as f64;
            let got = w.get(k);
            if (got.mid() - oracle).abs() > got.rad() + 1e-12 {
                return Err(format!("case {case}: mode {k} has {got:?}, quadrature {oracle:e}"));
            }
        }
    }
    Ok(cases)
}

/// The certified spectral-norm bound dominates power-iteration estimates
/// for the centre and for random point matrices inside the interval matrix.
pub fn norm_vs_power_iteration(cases: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    for case in 0..cases {
        let (rows, cols) = (r.gen_range(1..14), r.gen_range(1..14));
        let mid = DMatrix::from_fn(rows, cols, |_, _| r.gen_range(-2.0..2.0));
        let rad = DMatrix::from_fn(rows, cols, |_, _| if r.gen_bool(0.5) { 0.0 } else { r.gen_range(0.0..1e-3) });
        let m = IMatrix::from_mid_rad(mid.clone(), rad.clone()).map_err(|e| e.to_string())?;
        let bound = mat_norm2_upper(&m).hi();
        for t in 0..3 {
            let p = if t == 0 { mid.clone() } else { DMatrix::from_fn(rows, cols, |i, j| mid[(i, j)] + rad[(i, j)] * r.gen_range(-1.0..1.0)) };
            let g = p.transpose() * &p;
            let mut x = nalgebra::DVector::from_fn(cols, |_, _| r.gen_range(-1.0..1.0));
            let mut est = 0.0;
            for _ in 0..300 {
                let y = &g * &x;
                let ny = y.norm();
                if ny == 0.0 {
                    break;
                }
                est = (ny / x.norm()).sqrt();
                x = y / ny;
            }
            if est > bound * (1.0 + 1e-12) {
                return Err(format!("case {case}: power iteration {est:e} exceeds bound {bound:e}"));
            }
        }
    }
    Ok(cases)
}

/// `∫_{-d}^{d} u² = 2d ‖U‖₂²` for random cosine polynomials.
pub fn parseval(cases: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    for case in 0..cases {
        let d = r.gen_range(0.5..50.0);
        let n = r.gen_range(0..20);
        let u = random_cosine(&mut r, d, n);
        let um = u.mids();
        let m = 4 * n + 8;
        let integral: f64 = (0..m).map(|j| eval_cos(&um, d, -d + 2.0 * d * j as f64 / m as f64).powi(2)).sum::<f64>() * 2.0 * d / m as f64;
        let lhs = u.norm2().sqr() * (2.0 * d);
        if (lhs.mid() - integral).abs() > lhs.rad() + 1e-11 * integral.max(1.0) {
            return Err(format!("case {case}: 2d‖U‖² = {lhs:?}, ∫u² = {integral:e}"));
        }
    }
    Ok(cases)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let m = m + m % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `e^{2βd} Ê_n` equals `(1/2d) ∫ cosh(2βx) cos(ξ_n x) dx` by direct
/// quadrature.
pub fn cosh_vs_quadrature(cases: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    for case in 0..cases {
        let beta = r.gen_range(0.02..1.0);
        let d = r.gen_range(1.0..15.0);
        let n = r.gen_range(0..25usize);
        let e = cosh_coeffs(Interval::point(beta), d, n);
        let scale = (2.0 * beta * d).exp();
        let xi = n as f64 * std::f64::consts::PI / d;
        let oracle = simpson(|x| (2.0 * beta * x).cosh() * (xi * x).cos(), -d, d, 4000 + 400 * n) / (2.0 * d);
        let got = e.get(n).mid() * scale;
        let tol = 1e-8 * (2.0 * beta * d).cosh();
        if (got - oracle).abs() > tol {
            return Err(format!("case {case}: β={beta} d={d} n={n}: {got:e} vs quadrature {oracle:e}"));
        }
    }
    Ok(cases)
}

/// `(1/2π) ∫ g(ξ) e^{iξx} dξ` for an even (`odd = false`) or odd real
/// symbol, by Simpson panels over half periods of the oscillation and
/// repeated averaging of the alternating partial sums.
fn inverse_fourier(g: impl Fn(f64) -> f64, x: f64, odd: bool) -> f64 {
    let half = std::f64::consts::PI / x;
    let trig = |xi: f64| if odd { (xi * x).sin() } else { (xi * x).cos() };
    let mut partial = Vec::new();
    let mut acc = simpson(|xi| g(xi) * trig(xi), 0.0, half, 4000);
    for k in 1..6000 {
        let (a, b) = (k as f64 * half, (k + 1) as f64 * half);
        acc += simpson(|xi| g(xi) * trig(xi), a, b, 64);
        partial.push(acc);
    }
    let mut s = partial.split_off(partial.len() - 40);
    for _ in 0..20 {
        s = s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    s[s.len() - 1] / std::f64::consts::PI
}

/// Kernel envelopes `|f_0| ≤ C_0 e^{-a|x|}`, `|f_1| ≤ C_1 e^{-a|x|}` and
/// `|f_2| ≤ C_2 e^{-a|x|}/√|x|` at `x ∈ {1, 3, 10}`, with 10% slack on the
/// quadrature.
pub fn decay_envelopes() -> SuiteResult {
    let mut checked = 0;
    for (t, c, a) in [(0.0, 1.1, 0.25), (0.0, 1.1, 0.45), (0.5, 0.8, 0.45)] {
        let p = SymbolParams::new(t, c).map_err(|e| e.to_string())?;
        let strip = verify_sigma1(&p, &verify_strip_auto(&p, a, 0.99, 64).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let dc = decay_constants(&p, &strip).map_err(|e| e.to_string())?;
        let nu = p.nu_f64();
        let l = |xi: f64| (m_t_f64(t, xi) - c) * (1.0 + nu * xi * xi);
        let g2 = |xi: f64| {
            let mc = m_t_f64(t, xi) - c;
            if t == 0.0 {
                1.0 / mc + 1.0 / c
            } else {
                1.0 / mc
            }
        };
        for x in [1.0, 3.0, 10.0] {
            let f0 = inverse_fourier(|xi| 1.0 / l(xi), x, false).abs();
            let f1 = inverse_fourier(|xi| xi / l(xi), x, true).abs();
            let f2 = inverse_fourier(g2, x, false).abs();
            let env = (-strip.a * x).exp();
            let checks = [("f0", f0, dc.c_0.hi() * env), ("f1", f1, dc.c_1.hi() * env), ("f2", f2, dc.c_2.hi() * env / x.sqrt())];
            for (name, val, bound) in checks {
                if !(val <= 1.1 * bound) {
                    return Err(format!("T={t} c={c} a={a} x={x}: |{name}| = {val:e} exceeds envelope {bound:e}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}
