//! Outward-rounded interval arithmetic over `f64`.
//!
//! Every operation returns an enclosure of the exact real (or complex)
//! result. Rounding is realized without touching the floating-point
//! environment: a correctly rounded result is widened by one ulp with
//! [`f64::next_down`] / [`f64::next_up`], and results of the platform
//! transcendental functions are widened by [`TRANSCENDENTAL_GUARD_ULPS`].
//! All types are plain `Copy` values or owned matrices, so the module is
//! safe to use from many threads at once.
//!
//! Besides [`Interval`] and [`ComplexBox`], the module provides [`IMatrix`],
//! an interval matrix in midpoint-radius form with a rigorous product, and
//! [`mat_norm2_upper`], a certified upper bound on the spectral norm.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of ulps added on each side of a libm transcendental result.
pub const TRANSCENDENTAL_GUARD_ULPS: u32 = 4;

/// Unit roundoff of binary64.
const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[inline]
fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

#[inline]
fn dn(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

#[inline]
fn up_k(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = up(x);
    }
    x
}

#[inline]
fn dn_k(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = dn(x);
    }
    x
}

/// Product with the convention `0 * inf = 0`, used for endpoint products.
#[inline]
fn emul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Upward-rounded sum of two numbers.
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    up(a + b)
}

/// Upward-rounded product of two numbers.
#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = emul(a, b);
    if p == 0.0 && a != 0.0 && b != 0.0 {
        f64::MIN_POSITIVE
    } else {
        up(p)
    }
}

/// Upward-rounded square root of a nonnegative number.
#[inline]
pub fn sqrt_up(a: f64) -> f64 {
    up(a.max(0.0).sqrt())
}

/// Upward-rounded sum of nonnegative terms.
pub fn sum_up<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().fold(0.0, |s, t| up(s + t))
}

/// γ_n = n u / (1 - n u), rounded upward.
pub fn gamma(n: usize) -> f64 {
    let nu = (n as f64) * UNIT_ROUNDOFF;
    up(up(nu) / dn(1.0 - nu))
}

/// A closed real interval `[lo, hi]` with `f64` endpoints.
///
/// Infinite endpoints are allowed; NaN endpoints are not. The empty set is
/// represented by the sentinel [`Interval::EMPTY`].
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// The whole real line.
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    /// The empty set.
    pub const EMPTY: Interval = Interval { lo: f64::INFINITY, hi: f64::NEG_INFINITY };
    /// The point interval `[0, 0]`.
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    /// The point interval `[1, 1]`.
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`, panicking on NaN endpoints or `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).expect("invalid interval endpoints")
    }

    /// Builds `[lo, hi]`, reporting NaN endpoints or `lo > hi` as a domain error.
    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("NaN interval endpoint".into()));
        }
        if lo > hi {
            return Err(Error::Domain(format!("interval lower endpoint {lo} exceeds upper endpoint {hi}")));
        }
        Ok(Interval { lo, hi })
    }

    /// The point interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// Interval `[x - r, x + r]` rounded outward.
    pub fn mid_rad(x: f64, r: f64) -> Self {
        Self::new(dn(x - r), up(x + r))
    }

    /// The interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        Self::new(-r, r)
    }

    /// Lower endpoint.
    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Upper endpoint.
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// True for the empty sentinel.
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Floating-point midpoint (not an enclosure).
    pub fn mid(&self) -> f64 {
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            0.0
        } else if self.lo == f64::NEG_INFINITY {
            f64::MIN
        } else if self.hi == f64::INFINITY {
            f64::MAX
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Upper bound on the radius about [`Interval::mid`].
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        up(m - self.lo).max(up(self.hi - m))
    }

    /// Upper bound on the width.
    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    /// Magnitude `max |x|`.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Mignitude `min |x|`.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// True when `x` lies in the interval.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when the interval contains zero.
    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// True when `self ⊆ other`.
    pub fn subset(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    /// True when every element is strictly positive.
    pub fn is_pos(&self) -> bool {
        self.lo > 0.0
    }

    /// True when every element is strictly negative.
    pub fn is_neg(&self) -> bool {
        self.hi < 0.0
    }

    /// Convex hull of two intervals.
    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Intersection, possibly [`Interval::EMPTY`].
    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    /// Enclosure of `x²` (tight for intervals containing zero).
    pub fn sqr(&self) -> Interval {
        let a = self.mig();
        let b = self.mag();
        Interval::new(if a == 0.0 { 0.0 } else { dn(a * a).max(0.0) }, up(b * b))
    }

    /// Enclosure of `|x|`.
    pub fn abs(&self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }

    /// Elementwise maximum.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Elementwise minimum.
    pub fn min(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    /// Enclosure of `x^n` for a nonnegative integer power.
    pub fn powi(&self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => *self,
            _ => {
                let half = self.powi(n / 2).sqr();
                if n.is_multiple_of(2) {
                    half
                } else {
                    half * *self
                }
            }
        }
    }

    /// Enclosure of `1/x`; errors when the interval contains zero.
    pub fn recip(&self) -> Result<Interval> {
        Interval::ONE.checked_div(self)
    }

    /// Division that reports a divisor containing zero.
    pub fn checked_div(&self, rhs: &Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::Domain("division by an interval containing zero".into()));
        }
        if self.lo == 0.0 && self.hi == 0.0 {
            return Ok(Interval::ZERO);
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = q.iter().cloned().filter(|x| !x.is_nan()).fold(f64::INFINITY, f64::min);
        let hi = q.iter().cloned().filter(|x| !x.is_nan()).fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval::new(dn(lo), up(hi)))
    }

    /// Enclosure of `√x`; errors when `lo < 0`.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::Domain(format!("sqrt of interval with lower endpoint {}", self.lo)));
        }
        let lo = if self.lo == 0.0 { 0.0 } else { dn(self.lo.sqrt()).max(0.0) };
        Ok(Interval::new(lo, up(self.hi.sqrt())))
    }

    /// Square root of a quantity known to be nonnegative, such as a squared
    /// norm whose enclosure dips below zero through rounding.
    pub fn sqrt_nonneg(&self) -> Result<Interval> {
        if self.hi < 0.0 {
            return Err(Error::Domain(format!("sqrt of negative interval with upper endpoint {}", self.hi)));
        }
        Interval::new(self.lo.max(0.0), self.hi).sqrt()
    }

    /// Enclosure of `e^x`.
    pub fn exp(&self) -> Interval {
        let g = TRANSCENDENTAL_GUARD_ULPS;
        Interval::new(dn_k(self.lo.exp(), g).max(0.0), up_k(self.hi.exp(), g))
    }

    /// Enclosure of `ln x`; errors when `lo <= 0`.
    pub fn ln(&self) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(Error::Domain(format!("ln of interval with lower endpoint {}", self.lo)));
        }
        let g = TRANSCENDENTAL_GUARD_ULPS;
        Ok(Interval::new(dn_k(self.lo.ln(), g), up_k(self.hi.ln(), g)))
    }

    /// Enclosure of `tanh x`.
    pub fn tanh(&self) -> Interval {
        let g = TRANSCENDENTAL_GUARD_ULPS;
        Interval::new(
            dn_k(self.lo.tanh(), g).max(-1.0),
            up_k(self.hi.tanh(), g).min(1.0),
        )
    }

    /// Enclosure of `sinh x`.
    pub fn sinh(&self) -> Interval {
        let g = TRANSCENDENTAL_GUARD_ULPS;
        Interval::new(dn_k(self.lo.sinh(), g), up_k(self.hi.sinh(), g))
    }

    /// Enclosure of `cosh x`.
    pub fn cosh(&self) -> Interval {
        let g = TRANSCENDENTAL_GUARD_ULPS;
        let a = self.mig();
        let b = self.mag();
        Interval::new(dn_k(a.cosh(), g).max(1.0), up_k(b.cosh(), g))
    }

    /// Enclosure of `1/cosh x`, well defined for every real argument.
    pub fn sech(&self) -> Interval {
        let c = self.cosh();
        let lo = if c.hi.is_infinite() { 0.0 } else { dn(1.0 / c.hi).max(0.0) };
        Interval::new(lo, up(1.0 / c.lo).min(1.0))
    }

    /// Enclosure of `atan x`.
    pub fn atan(&self) -> Interval {
        let g = TRANSCENDENTAL_GUARD_ULPS;
        let h = PI_HI / 2.0;
        Interval::new(dn_k(self.lo.atan(), g).max(-up(h)), up_k(self.hi.atan(), g).min(up(h)))
    }

    /// Enclosure of `cos x`.
    pub fn cos(&self) -> Interval {
        self.trig(f64::cos, Interval::ZERO)
    }

    /// Enclosure of `sin x`.
    pub fn sin(&self) -> Interval {
        self.trig(f64::sin, Interval::point(0.5))
    }

    /// Shared range computation for `cos` and `sin`: the extrema of the
    /// function sit at `x = π(k + shift)`, maxima for even `k`.
    fn trig(&self, f: fn(f64) -> f64, shift: Interval) -> Interval {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.hi - self.lo >= 6.0 {
            return Interval::new(-1.0, 1.0);
        }
        let q = *self / Interval::pi() - shift;
        let kmin = q.lo.ceil();
        let kmax = q.hi.floor();
        let mut has_max = false;
        let mut has_min = false;
        let mut k = kmin;
        while k <= kmax {
            if (k as i64).rem_euclid(2) == 0 {
                has_max = true;
            } else {
                has_min = true;
            }
            k += 1.0;
        }
        let g = TRANSCENDENTAL_GUARD_ULPS;
        let (fa, fb) = (f(self.lo), f(self.hi));
        let lo = if has_min { -1.0 } else { dn_k(fa.min(fb), g).max(-1.0) };
        let hi = if has_max { 1.0 } else { up_k(fa.max(fb), g).min(1.0) };
        Interval::new(lo, hi)
    }

    /// Enclosure of π.
    pub fn pi() -> Interval {
        Interval { lo: PI_LO, hi: PI_HI }
    }

    /// Enclosure of √2.
    pub fn sqrt2() -> Interval {
        Interval::point(2.0).sqrt().expect("sqrt of 2")
    }

    /// Enclosure of ln 2.
    pub fn ln2() -> Interval {
        Interval::point(2.0).ln().expect("ln of 2")
    }
}

const PI_LO: f64 = std::f64::consts::PI;
const PI_HI: f64 = 3.1415926535897936;

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]", self.lo, self.hi)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::new(dn(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(dn(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if (self.lo == 0.0 && self.hi == 0.0) || (rhs.lo == 0.0 && rhs.hi == 0.0) {
            return Interval::ZERO;
        }
        let p = [
            emul(self.lo, rhs.lo),
            emul(self.lo, rhs.hi),
            emul(self.hi, rhs.lo),
            emul(self.hi, rhs.hi),
        ];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(dn(lo), up(hi))
    }
}

impl Div for Interval {
    type Output = Interval;
    /// Division; a divisor containing zero yields [`Interval::ENTIRE`].
    fn div(self, rhs: Interval) -> Interval {
        self.checked_div(&rhs).unwrap_or(Interval::ENTIRE)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            fn $m(self, rhs: f64) -> Interval { $tr::$m(self, Interval::point(rhs)) }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval { $tr::$m(Interval::point(self), rhs) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign for Interval {
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl MulAssign for Interval {
    fn mul_assign(&mut self, rhs: Interval) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr { lo: self.lo.to_string(), hi: self.hi.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        let lo: f64 = r.lo.parse().map_err(serde::de::Error::custom)?;
        let hi: f64 = r.hi.parse().map_err(serde::de::Error::custom)?;
        Interval::try_new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Tag selecting an elementary function for [`ival_elem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elem {
    Sqrt,
    Exp,
    Ln,
    Tanh,
    Cosh,
    Sinh,
    Cos,
    Sin,
    Atan,
}

/// Evaluates the elementary function `f` on `x` with an outward-rounded result.
pub fn ival_elem(f: Elem, x: Interval) -> Result<Interval> {
    Ok(match f {
        Elem::Sqrt => x.sqrt()?,
        Elem::Exp => x.exp(),
        Elem::Ln => x.ln()?,
        Elem::Tanh => x.tanh(),
        Elem::Cosh => x.cosh(),
        Elem::Sinh => x.sinh(),
        Elem::Cos => x.cos(),
        Elem::Sin => x.sin(),
        Elem::Atan => x.atan(),
    })
}

/// A rectangle `re + i·im` in the complex plane.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexBox {
    pub re: Interval,
    pub im: Interval,
}

impl fmt::Debug for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

impl ComplexBox {
    /// Builds the box `re + i·im`.
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexBox { re, im }
    }

    /// A real box `x + i·0`.
    pub fn real(re: Interval) -> Self {
        ComplexBox { re, im: Interval::ZERO }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexBox { re: self.re, im: -self.im }
    }

    /// Multiplication by a real interval.
    pub fn scale(&self, s: Interval) -> Self {
        ComplexBox { re: self.re * s, im: self.im * s }
    }

    /// Enclosure of `|z|²`.
    pub fn norm_sqr(&self) -> Interval {
        let n = self.re.sqr() + self.im.sqr();
        Interval::new(n.lo.max(0.0), n.hi)
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self) -> Interval {
        let n = self.norm_sqr();
        Interval::new(n.lo.max(0.0), n.hi).sqrt().expect("nonnegative modulus")
    }

    /// Division; errors when the divisor box contains zero.
    pub fn checked_div(&self, rhs: &ComplexBox) -> Result<ComplexBox> {
        let den = rhs.norm_sqr();
        let num = *self * rhs.conj();
        Ok(ComplexBox { re: num.re.checked_div(&den)?, im: num.im.checked_div(&den)? })
    }

    /// Enclosure of the argument of every point in the box, or
    /// [`Error::BranchCut`] when the box meets `(-∞, 0]`.
    pub fn arg(&self) -> Result<Interval> {
        let pi = Interval::pi();
        if self.re.lo > 0.0 {
            Ok((self.im / self.re).atan())
        } else if self.im.lo > 0.0 {
            Ok(pi * 0.5 - (self.re / self.im).atan())
        } else if self.im.hi < 0.0 {
            Ok(-(pi * 0.5) - (self.re / self.im).atan())
        } else {
            Err(Error::BranchCut)
        }
    }

    /// Enclosure of the principal square root via a polar enclosure.
    pub fn sqrt(&self) -> Result<ComplexBox> {
        cbox_sqrt(*self)
    }

    /// Enclosure of `tanh z` from the real identity
    /// `tanh(x+iy) = (tanh 2x + i sin 2y · sech 2x) / (1 + cos 2y · sech 2x)`.
    pub fn tanh(&self) -> Result<ComplexBox> {
        let x2 = self.re * 2.0;
        let y2 = self.im * 2.0;
        let s = x2.sech();
        let den = 1.0 + y2.cos() * s;
        if den.contains_zero() {
            return Err(Error::SubdivideRequest);
        }
        Ok(ComplexBox { re: x2.tanh() / den, im: (y2.sin() * s) / den })
    }
}

/// Principal square root of a complex box.
///
/// The modulus and argument are enclosed separately, then
/// `√z = √|z| (cos(θ/2) + i sin(θ/2))`. Boxes meeting `(-∞, 0]` are rejected
/// with [`Error::BranchCut`].
pub fn cbox_sqrt(z: ComplexBox) -> Result<ComplexBox> {
    if z.im.is_empty() || z.re.is_empty() {
        return Err(Error::Domain("empty complex box".into()));
    }
    if z.im == Interval::ZERO && z.re.lo >= 0.0 {
        return Ok(ComplexBox::real(z.re.sqrt()?));
    }
    let theta = z.arg()?;
    let half = theta * 0.5;
    let r = z.abs().sqrt()?;
    Ok(ComplexBox { re: r * half.cos(), im: r * half.sin() })
}

impl Add for ComplexBox {
    type Output = ComplexBox;
    fn add(self, rhs: ComplexBox) -> ComplexBox {
        ComplexBox { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for ComplexBox {
    type Output = ComplexBox;
    fn sub(self, rhs: ComplexBox) -> ComplexBox {
        ComplexBox { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for ComplexBox {
    type Output = ComplexBox;
    fn mul(self, rhs: ComplexBox) -> ComplexBox {
        ComplexBox {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Neg for ComplexBox {
    type Output = ComplexBox;
    fn neg(self) -> ComplexBox {
        ComplexBox { re: -self.re, im: -self.im }
    }
}

impl Add<Interval> for ComplexBox {
    type Output = ComplexBox;
    fn add(self, rhs: Interval) -> ComplexBox {
        ComplexBox { re: self.re + rhs, im: self.im }
    }
}

impl Sub<Interval> for ComplexBox {
    type Output = ComplexBox;
    fn sub(self, rhs: Interval) -> ComplexBox {
        ComplexBox { re: self.re - rhs, im: self.im }
    }
}

/// An interval matrix stored as a floating-point midpoint matrix and a
/// nonnegative radius matrix. Entry `(i, j)` encloses
/// `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IMatrix {
    mid: DMatrix<f64>,
    rad: DMatrix<f64>,
}

impl IMatrix {
    /// Point matrix with zero radius.
    pub fn from_point(mid: DMatrix<f64>) -> Self {
        let rad = DMatrix::zeros(mid.nrows(), mid.ncols());
        IMatrix { mid, rad }
    }

    /// Builds from explicit midpoint and radius matrices.
    pub fn from_mid_rad(mid: DMatrix<f64>, rad: DMatrix<f64>) -> Result<Self> {
        if mid.shape() != rad.shape() {
            return Err(Error::DimensionMismatch("midpoint and radius shapes differ".into()));
        }
        if rad.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::Domain("radius entries must be nonnegative".into()));
        }
        Ok(IMatrix { mid, rad })
    }

    /// Builds from an interval-valued generator.
    pub fn from_fn<F: FnMut(usize, usize) -> Interval>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut mid = DMatrix::zeros(rows, cols);
        let mut rad = DMatrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                let x = f(i, j);
                let m = x.mid();
                mid[(i, j)] = m;
                rad[(i, j)] = x.rad();
            }
        }
        IMatrix { mid, rad }
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMatrix::from_point(DMatrix::zeros(rows, cols))
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        IMatrix::from_point(DMatrix::identity(n, n))
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.mid.nrows()
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.mid.ncols()
    }

    /// Midpoint matrix.
    pub fn mid(&self) -> &DMatrix<f64> {
        &self.mid
    }

    /// Radius matrix.
    pub fn rad(&self) -> &DMatrix<f64> {
        &self.rad
    }

    /// Interval enclosure of entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Interval {
        Interval::mid_rad(self.mid[(i, j)], self.rad[(i, j)])
    }

    /// Overwrites entry `(i, j)` with an enclosure of `x`.
    pub fn set(&mut self, i: usize, j: usize, x: Interval) {
        self.mid[(i, j)] = x.mid();
        self.rad[(i, j)] = x.rad();
    }

    /// Transpose.
    pub fn transpose(&self) -> IMatrix {
        IMatrix { mid: self.mid.transpose(), rad: self.rad.transpose() }
    }

    /// Copy of the block starting at `(r0, c0)` with the given shape.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> IMatrix {
        IMatrix {
            mid: self.mid.view((r0, c0), (nr, nc)).clone_owned(),
            rad: self.rad.view((r0, c0), (nr, nc)).clone_owned(),
        }
    }

    /// Writes `b` into the block starting at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &IMatrix) {
        self.mid.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(&b.mid);
        self.rad.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(&b.rad);
    }

    fn check_same_shape(&self, rhs: &IMatrix) -> Result<()> {
        if self.mid.shape() != rhs.mid.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.mid.shape(),
                rhs.mid.shape()
            )));
        }
        Ok(())
    }

    fn combine(&self, rhs: &IMatrix, sign: f64) -> Result<IMatrix> {
        self.check_same_shape(rhs)?;
        let mut mid = self.mid.clone();
        let mut rad = self.rad.clone();
        for ((m, r), (bm, br)) in mid.iter_mut().zip(rad.iter_mut()).zip(rhs.mid.iter().zip(rhs.rad.iter())) {
            let s = *m + sign * *bm;
            *r = up(up(*r + *br) + up(s.abs() * UNIT_ROUNDOFF));
            *m = s;
        }
        Ok(IMatrix { mid, rad })
    }

    /// Rigorous entrywise sum.
    pub fn add(&self, rhs: &IMatrix) -> Result<IMatrix> {
        self.combine(rhs, 1.0)
    }

    /// Rigorous entrywise difference.
    pub fn sub(&self, rhs: &IMatrix) -> Result<IMatrix> {
        self.combine(rhs, -1.0)
    }

    /// Rigorous product. The midpoint is the floating-point product of the
    /// midpoints; the radius collects the propagated radii and an a priori
    /// bound `γ_n |A_c||B_c|` on the rounding error of the midpoint product,
    /// all inflated to absorb the rounding of the radius computation itself.
    pub fn mul(&self, rhs: &IMatrix) -> Result<IMatrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.nrows(),
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let n = self.ncols();
        let mid = &self.mid * &rhs.mid;
        let abs_a = self.mid.abs();
        let abs_b = rhs.mid.abs();
        let mut rad = &abs_a * &abs_b;
        let gn = gamma(n);
        rad *= gn;
        if rhs.rad.iter().any(|&r| r > 0.0) {
            rad += &abs_a * &rhs.rad;
        }
        if self.rad.iter().any(|&r| r > 0.0) {
            let b_abs_total = &abs_b + &rhs.rad;
            rad += &self.rad * b_abs_total;
        }
        let inflate = 1.0 + 4.0 * gamma(n + 4);
        let floor = (n as f64 + 1.0) * f64::MIN_POSITIVE;
        rad.apply(|r| *r = up(up(*r * inflate) + floor));
        Ok(IMatrix { mid, rad })
    }

    /// Rigorous scaling of row `i` by `s[i]`.
    pub fn scale_rows(&self, s: &[Interval]) -> Result<IMatrix> {
        if s.len() != self.nrows() {
            return Err(Error::DimensionMismatch("row scale length".into()));
        }
        let mut out = self.clone();
        for j in 0..self.ncols() {
            for (i, si) in s.iter().enumerate() {
                let (m, r) = scale_entry(self.mid[(i, j)], self.rad[(i, j)], si);
                out.mid[(i, j)] = m;
                out.rad[(i, j)] = r;
            }
        }
        Ok(out)
    }

    /// Rigorous scaling of column `j` by `s[j]`.
    pub fn scale_cols(&self, s: &[Interval]) -> Result<IMatrix> {
        if s.len() != self.ncols() {
            return Err(Error::DimensionMismatch("column scale length".into()));
        }
        let mut out = self.clone();
        for (j, sj) in s.iter().enumerate() {
            for i in 0..self.nrows() {
                let (m, r) = scale_entry(self.mid[(i, j)], self.rad[(i, j)], sj);
                out.mid[(i, j)] = m;
                out.rad[(i, j)] = r;
            }
        }
        Ok(out)
    }

    /// Upper bound on `|M|` entrywise, as a point matrix.
    pub fn abs_upper(&self) -> DMatrix<f64> {
        self.mid.zip_map(&self.rad, |m, r| up(m.abs() + r))
    }

    /// Upper bound on the induced 1-norm (maximum column sum).
    pub fn norm1_upper(&self) -> f64 {
        let a = self.abs_upper();
        (0..a.ncols()).map(|j| sum_up(a.column(j).iter().cloned())).fold(0.0, f64::max)
    }

    /// Upper bound on the induced ∞-norm (maximum row sum).
    pub fn norm_inf_upper(&self) -> f64 {
        let a = self.abs_upper();
        (0..a.nrows()).map(|i| sum_up(a.row(i).iter().cloned())).fold(0.0, f64::max)
    }

    /// Upper bound on the Frobenius norm.
    pub fn norm_frob_upper(&self) -> f64 {
        let a = self.abs_upper();
        sqrt_up(sum_up(a.iter().map(|x| mul_up(*x, *x))))
    }

    /// Upper bound on `max_i (|M_ii| + Σ_{j≠i} |M_ij|)`, the Gershgorin bound
    /// on the largest eigenvalue of any symmetric member.
    pub fn gershgorin_upper(&self) -> f64 {
        let a = self.abs_upper();
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.nrows() {
            let diag_hi = up(self.mid[(i, i)] + self.rad[(i, i)]);
            let off = sum_up((0..self.ncols()).filter(|&j| j != i).map(|j| a[(i, j)]));
            best = best.max(up(diag_hi + off));
        }
        best
    }
}

fn scale_entry(m: f64, r: f64, s: &Interval) -> (f64, f64) {
    let sm = s.mid();
    let sr = s.rad();
    let p = m * sm;
    let rad = up(up(up(m.abs() * sr) + up(r * up(sm.abs() + sr))) + up(p.abs() * UNIT_ROUNDOFF));
    (p, up(rad + f64::MIN_POSITIVE))
}

/// Crude spectral norm bound `min{√(‖M‖₁‖M‖∞), ‖M‖_F}`.
pub fn mat_norm2_upper_crude(m: &IMatrix) -> f64 {
    let prod = sqrt_up(mul_up(m.norm1_upper(), m.norm_inf_upper()));
    prod.min(m.norm_frob_upper())
}

/// Certified upper bound on `‖M̃‖₂` for every point matrix `M̃ ∈ M`.
///
/// The result is the minimum of the crude bound `√(‖M‖₁‖M‖∞)` (and the
/// Frobenius norm) and a sharper bound obtained by approximately
/// diagonalizing `M_cᵀM_c` and applying a certified Gershgorin argument to
/// the transformed matrix. Returned as the interval `[0, bound]`.
pub fn mat_norm2_upper(m: &IMatrix) -> Interval {
    let crude = mat_norm2_upper_crude(m);
    if m.nrows() == 0 || m.ncols() == 0 {
        return Interval::ZERO;
    }
    let sharp = sharp_norm2_upper(m).unwrap_or(f64::INFINITY);
    Interval::new(0.0, crude.min(sharp))
}

fn sharp_norm2_upper(m: &IMatrix) -> Option<f64> {
    let a = if m.ncols() <= m.nrows() { m.mid.clone() } else { m.mid.transpose() };
    let inner = a.nrows();
    let k = a.ncols();
    let s = a.tr_mul(&a);
    let sym = DMatrix::from_fn(k, k, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let abs_a = a.abs();
    let f = abs_a.tr_mul(&abs_a);
    let g = gamma(inner + 2);
    let err = DMatrix::from_fn(k, k, |i, j| {
        up((g * f[(i, j)] + 2.0 * UNIT_ROUNDOFF * sym[(i, j)].abs()) * 1.01 + (inner as f64 + 2.0) * f64::MIN_POSITIVE)
    });
    let err_frob = sqrt_up(sum_up(err.iter().map(|x| mul_up(*x, *x))));

    let eig = SymmetricEigen::new(sym.clone());
    let q = IMatrix::from_point(eig.eigenvectors);
    let qt = q.transpose();
    let p = qt.mul(&IMatrix::from_point(sym)).ok()?.mul(&q).ok()?;
    let lam_p = p.gershgorin_upper().max(0.0);
    let qtq = qt.mul(&q).ok()?.sub(&IMatrix::identity(k)).ok()?;
    let delta = qtq.norm_frob_upper();
    if !(delta < 0.5) {
        return None;
    }
    let lam_s = up(lam_p / dn(1.0 - delta));
    let lam_g = up(lam_s + err_frob);
    let center = sqrt_up(lam_g);
    let rad_part = {
        let r = IMatrix::from_point(m.rad.clone());
        if m.rad.iter().all(|&x| x == 0.0) {
            0.0
        } else {
            mat_norm2_upper_crude(&r)
        }
    };
    let bound = up(center + rad_part);
    if bound.is_finite() {
        Some(bound)
    } else {
        None
    }
}

/// Certified `ℓ²` operator-norm bound of `S M S'^{-1}` where the row and
/// column weights are given as intervals (for example `√α_n`).
pub fn weighted_norm2_upper(m: &IMatrix, row_w: &[Interval], col_w: &[Interval]) -> Result<Interval> {
    let inv: Vec<Interval> = col_w.iter().map(|w| w.recip()).collect::<Result<_>>()?;
    let scaled = m.scale_rows(row_w)?.scale_cols(&inv)?;
    Ok(mat_norm2_upper(&scaled))
}

/// Solves the `2×2` interval system `G x = b` by Cramer's rule.
pub fn solve2(g: [[Interval; 2]; 2], b: [Interval; 2]) -> Result<[Interval; 2]> {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det.contains_zero() {
        return Err(Error::Domain("singular 2x2 interval system".into()));
    }
    Ok([
        (b[0] * g[1][1] - g[0][1] * b[1]) / det,
        (g[0][0] * b[1] - g[1][0] * b[0]) / det,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_exact_square() {
        let s = Interval::point(4.0).sqrt().unwrap();
        assert!(s.contains(2.0));
        assert!(s.width() < 1e-15);
    }

    #[test]
    fn tanh_at_zero() {
        let t = Interval::ZERO.tanh();
        assert!(t.contains(0.0));
        assert!(t.mag() < 1e-300);
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert!(matches!(Interval::new(-1.0, 2.0).ln(), Err(Error::Domain(_))));
        assert!(matches!(Interval::new(-1.0, 2.0).sqrt(), Err(Error::Domain(_))));
    }

    #[test]
    fn cos_and_sin_critical_points() {
        let c = Interval::new(-0.1, 0.1).cos();
        assert_eq!(c.hi(), 1.0);
        let s = Interval::new(1.5, 1.7).sin();
        assert_eq!(s.hi(), 1.0);
        let c = Interval::new(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
        let s = Interval::new(0.2, 0.3).sin();
        assert!(s.contains(0.25f64.sin()));
        assert!(s.lo() > 0.19 && s.hi() < 0.3);
    }

    #[test]
    fn cbox_sqrt_examples() {
        let one = cbox_sqrt(ComplexBox::real(Interval::ONE)).unwrap();
        assert!(one.re.contains(1.0) && one.im.contains(0.0));
        let z = cbox_sqrt(ComplexBox::new(Interval::ZERO, Interval::point(4.0))).unwrap();
        let s2 = 2f64.sqrt();
        assert!(z.re.contains(s2) && z.im.contains(s2));
        assert!(z.re.width() < 1e-14);
        assert_eq!(
            cbox_sqrt(ComplexBox::new(Interval::point(-1.0), Interval::ZERO)),
            Err(Error::BranchCut)
        );
    }

    #[test]
    fn norm_of_identity_and_ones() {
        let id = IMatrix::identity(3);
        let b = mat_norm2_upper(&id).hi();
        assert!((1.0..1.0 + 1e-12).contains(&b));
        let ones = IMatrix::from_point(DMatrix::from_element(2, 2, 1.0));
        let b = mat_norm2_upper(&ones).hi();
        assert!((2.0..2.0 + 1e-12).contains(&b));
    }

    #[test]
    fn interval_product_encloses() {
        let a = IMatrix::from_fn(2, 2, |i, j| Interval::new(i as f64, i as f64 + 0.5 + j as f64));
        let b = IMatrix::from_point(DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]));
        let p = a.mul(&b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let direct = a.get(i, 0) * b.get(0, j) + a.get(i, 1) * b.get(1, j);
                assert!(direct.lo() >= p.get(i, j).lo() - 1e-12);
                assert!(direct.hi() <= p.get(i, j).hi() + 1e-12);
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let x = Interval::new(0.1, 0.30000000000000004);
        let s = serde_json::to_string(&x).unwrap();
        let y: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
