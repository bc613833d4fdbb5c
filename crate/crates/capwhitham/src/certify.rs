//! The radii polynomial, the regularity criterion, and proof certificates.
//!
//! With bounds `Y0`, `Z1`, `Z2`, a radius `r > 0` is admissible when
//!
//! ```text
//! Z2 r² - (1 - Z1) r + Y0 < 0,
//! ```
//!
//! in which case a unique zero of `F` lies in the closed ball of radius `r`
//! around `u0` in the `H^l` norm. A certificate records the inputs and the
//! outcome as JSON together with SHA-256 digests that [`recheck`] verifies.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::approx::build_w0;
use crate::bounds::{compute_bounds, existence_operator, ExistenceSetup, ProofBounds};
use crate::error::{Error, Result};
use crate::fourier::{trace_project, CosineSeq};
use crate::inverse::ApproxInverse;
use crate::rigor::Interval;
use crate::spectral::StabilityVerdict;
use crate::strip::{decay_constants, verify_sigma1, verify_strip, verify_strip_auto, DecayConstants, StripData};
use crate::symbols::SymbolParams;

/// Certified range of admissible radii and the radius selected from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    /// Upper bound on the smaller root of the radii polynomial.
    pub r_min: f64,
    /// Lower bound on the larger root.
    pub r_max: f64,
    /// Selected radius, certified admissible.
    pub r: f64,
    /// Enclosure of the polynomial at `r` (strictly negative).
    pub value: Interval,
}

/// Outcome of the regularity check for `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    /// Margin `ε` with `‖U0‖₁ + ε < c/2`.
    pub epsilon: f64,
    /// `sup_embed · r`, a bound on `‖ũ - u0‖_∞`.
    pub sup_distance: f64,
}

/// Replaces each bound by the point interval at its upper endpoint, which is
/// the value the radii polynomial is monotone in.
fn upper(b: Interval) -> Interval {
    Interval::point(b.hi())
}

/// Evaluates `Z2 r² - (1 - Z1) r + Y0` at the upper endpoints of the bounds
/// and returns it when it is certainly negative.
pub fn check_radii(y0: Interval, z1: Interval, z2: Interval, r: f64) -> Result<Interval> {
    let (y0, z1, z2) = (upper(y0), upper(z1), upper(z2));
    if !(r > 0.0) {
        return Err(Error::NoAdmissibleRadius(format!("radius {r} is not positive")));
    }
    let ri = Interval::point(r);
    let v = z2 * ri.sqr() - (1.0 - z1) * ri + y0;
    if v.is_neg() {
        Ok(v)
    } else {
        Err(Error::NoAdmissibleRadius(format!("radii polynomial at r = {r:e} is {v:?}")))
    }
}

/// Certifies the interval of admissible radii and picks a radius just above
/// the smaller root.
pub fn admissible_radii(y0: Interval, z1: Interval, z2: Interval) -> Result<Radii> {
    let (y0, z1, z2) = (upper(y0), upper(z1), upper(z2));
    if !z2.is_pos() {
        return Err(Error::NoAdmissibleRadius("Z2 must be positive".into()));
    }
    let gap = 1.0 - z1;
    if !gap.is_pos() {
        return Err(Error::NoAdmissibleRadius(format!("Z1 = {:e} is not below 1", z1.hi())));
    }
    let disc = gap.sqr() - 4.0 * z2 * y0;
    if !disc.is_pos() {
        return Err(Error::NoAdmissibleRadius("radii polynomial has no real roots".into()));
    }
    let sq = disc.sqrt()?;
    // The smaller root is written as 2Y0/(gap + √disc) to avoid cancellation.
    let r_minus = 2.0 * y0 / (gap + sq);
    let r_plus = (gap + sq) / (2.0 * z2);
    let (r_min, r_max) = (r_minus.hi(), r_plus.lo());
    if !(r_min < r_max) {
        return Err(Error::NoAdmissibleRadius("root enclosures overlap".into()));
    }
    let mut r = (r_min * 1.1).min(0.5 * (r_min + r_max));
    for _ in 0..60 {
        if let Ok(value) = check_radii(y0, z1, z2, r) {
            return Ok(Radii { r_min, r_max, r, value });
        }
        r = 0.5 * (r + r_max);
    }
    Err(Error::NoAdmissibleRadius("no radius in the root interval could be certified".into()))
}

/// Regularity for `T = 0`: with `ε = c/2 - ‖U0‖₁` shrunk by a relative
/// margin, the proof gives a smooth solution when `sup_embed · r ≤ ε`.
pub fn check_regularity_t0(p: &SymbolParams, u0: &CosineSeq, r: f64, sup_embed: Interval) -> Result<Regularity> {
    let room = Interval::point(p.c) / 2.0 - u0.norm1();
    if !room.is_pos() {
        return Err(Error::RegularityUnverified(format!("‖U0‖₁ reaches c/2 (room {:?})", room)));
    }
    let epsilon = room.lo() * (1.0 - 1e-9);
    let dist = (sup_embed * r).hi();
    if dist <= epsilon {
        Ok(Regularity { epsilon, sup_distance: dist })
    } else {
        Err(Error::RegularityUnverified(format!("sup-distance {dist:e} exceeds ε = {epsilon:e}")))
    }
}

/// Configuration of one existence proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceConfig {
    /// Bond number.
    pub t: f64,
    /// Wave speed.
    pub c: f64,
    /// Half-period.
    pub d: f64,
    /// Truncation order.
    pub n: usize,
    /// Strip half-width.
    pub a: f64,
    /// Strip level; scanned and shrunk by `safety` when absent.
    pub sigma0: Option<f64>,
    /// Shrink factor applied to the scanned `σ0`.
    pub safety: f64,
    /// Initial subdivision of the strip cover.
    pub strip_grid: usize,
}

/// A completed existence proof.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExistenceProof {
    /// Configuration used.
    pub config: ExistenceConfig,
    /// Verified strip.
    pub strip: StripData,
    /// Kernel decay constants.
    pub decay: DecayConstants,
    /// Trace-projected approximate solution.
    pub u0: CosineSeq,
    /// All bounds.
    pub bounds: ProofBounds,
    /// Admissible radii.
    pub radii: Radii,
    /// Regularity outcome (only for `T = 0`).
    pub regularity: Option<Regularity>,
}

/// Verifies the strip described by the configuration.
pub fn certify_strip(p: &SymbolParams, cfg: &ExistenceConfig) -> Result<StripData> {
    let s = match cfg.sigma0 {
        Some(s0) => verify_strip(p, cfg.a, s0, cfg.strip_grid)?,
        None => verify_strip_auto(p, cfg.a, cfg.safety, cfg.strip_grid)?,
    };
    verify_sigma1(p, &s)
}

/// Inputs and bounds of an existence proof before the radius is chosen.
#[derive(Debug, Clone)]
pub struct ExistenceBounds {
    /// Verified strip.
    pub strip: StripData,
    /// Kernel decay constants.
    pub decay: DecayConstants,
    /// Trace-projected approximate solution.
    pub u0: CosineSeq,
    /// All bounds.
    pub bounds: ProofBounds,
}

/// Verifies the strip, projects the coefficients onto the trace-free
/// subspace and computes `Y0`, `Z1` and `Z2`.
pub fn existence_bounds(cfg: &ExistenceConfig, coeffs: &[f64]) -> Result<ExistenceBounds> {
    if coeffs.len() != cfg.n + 1 {
        return Err(Error::DimensionMismatch(format!("expected {} coefficients, got {}", cfg.n + 1, coeffs.len())));
    }
    let p = SymbolParams::new(cfg.t, cfg.c)?;
    let strip = certify_strip(&p, cfg)?;
    let decay = decay_constants(&p, &strip)?;
    let u0 = trace_project(&CosineSeq::from_f64(cfg.d, coeffs), &p)?;
    let op = existence_operator(&p, &u0)?;
    let w = if p.is_gravity() { Some(build_w0(&u0.mids(), p.c, cfg.d, cfg.n)?) } else { None };
    let inv = ApproxInverse::assemble(&op, w)?;
    let setup = ExistenceSetup { p: &p, strip: &strip, dc: &decay, u0: &u0, op: &op, inv: &inv };
    let bounds = compute_bounds(&setup)?;
    Ok(ExistenceBounds { strip, decay, u0, bounds })
}

/// Runs the full existence proof from floating-point cosine coefficients.
pub fn prove_existence(cfg: &ExistenceConfig, coeffs: &[f64]) -> Result<ExistenceProof> {
    let p = SymbolParams::new(cfg.t, cfg.c)?;
    let ExistenceBounds { strip, decay, u0, bounds } = existence_bounds(cfg, coeffs)?;
    let radii = admissible_radii(bounds.y0, bounds.z1, bounds.z2)?;
    let regularity = if p.is_gravity() { Some(check_regularity_t0(&p, &u0, radii.r, decay.sup_embed)?) } else { None };
    Ok(ExistenceProof { config: cfg.clone(), strip, decay, u0, bounds, radii, regularity })
}

/// A serialized proof with integrity digests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    /// Version of the library that produced the certificate.
    pub version: String,
    /// Creation time in seconds since the Unix epoch.
    pub created_unix: u64,
    /// SHA-256 of the input coefficient file, when the proof started from one.
    pub input_digest: Option<String>,
    /// The proof data.
    pub proof: ExistenceProof,
    /// SHA-256 of the JSON encoding of the approximate solution.
    pub u0_digest: String,
    /// SHA-256 of the JSON encoding of the bounds and radii.
    pub bounds_digest: String,
    /// Stability verdict, appended by the spectral stage.
    pub stability: Option<StabilityVerdict>,
}

fn digest<T: Serialize>(v: &T) -> Result<String> {
    let bytes = serde_json::to_vec(v)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Builds a certificate; refuses proofs whose strip was not verified.
pub fn certificate(proof: &ExistenceProof) -> Result<Certificate> {
    if !proof.strip.verified {
        return Err(Error::MissingStripCertificate);
    }
    if proof.strip.t > 0.0 && !proof.strip.sigma1_verified {
        return Err(Error::MissingStripCertificate);
    }
    let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|t| t.as_secs()).unwrap_or(0);
    Ok(Certificate {
        version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix,
        input_digest: None,
        proof: proof.clone(),
        u0_digest: digest(&proof.u0)?,
        bounds_digest: digest(&(&proof.bounds, &proof.radii))?,
        stability: None,
    })
}

/// SHA-256 of a file's bytes, in hex.
pub fn file_digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

/// Writes a certificate as pretty-printed JSON.
pub fn write_certificate(cert: &Certificate, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(cert)?)?;
    Ok(())
}

/// Builds a certificate for the proof and writes it as pretty-printed JSON.
pub fn emit(proof: &ExistenceProof, path: &Path) -> Result<Certificate> {
    let cert = certificate(proof)?;
    write_certificate(&cert, path)?;
    Ok(cert)
}

/// Reloads a certificate, checks both digests and re-verifies the radii
/// polynomial and (for `T = 0`) the regularity margin.
pub fn recheck(path: &Path) -> Result<Certificate> {
    let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if digest(&cert.proof.u0)? != cert.u0_digest {
        return Err(Error::VerificationFailed("approximate-solution digest mismatch".into()));
    }
    if digest(&(&cert.proof.bounds, &cert.proof.radii))? != cert.bounds_digest {
        return Err(Error::VerificationFailed("bounds digest mismatch".into()));
    }
    if !cert.proof.strip.verified {
        return Err(Error::MissingStripCertificate);
    }
    let b = &cert.proof.bounds;
    check_radii(b.y0, b.z1, b.z2, cert.proof.radii.r)?;
    if let Some(reg) = cert.proof.regularity {
        let p = SymbolParams::new(cert.proof.config.t, cert.proof.config.c)?;
        let again = check_regularity_t0(&p, &cert.proof.u0, cert.proof.radii.r, cert.proof.decay.sup_embed)?;
        if again.epsilon < reg.epsilon * (1.0 - 1e-12) {
            return Err(Error::VerificationFailed("regularity margin changed".into()));
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(x: f64) -> Interval {
        Interval::point(x)
    }

    #[test]
    fn radii_for_a_contracting_case() {
        let r = admissible_radii(iv(1e-9), iv(0.1), iv(1000.0)).unwrap();
        assert!(r.r_min < r.r && r.r < r.r_max);
        assert!(check_radii(iv(1e-9), iv(0.1), iv(1000.0), r.r).is_ok());
    }

    #[test]
    fn radii_fail_when_z1_too_large() {
        assert!(matches!(admissible_radii(iv(1e-9), iv(1.0), iv(10.0)), Err(Error::NoAdmissibleRadius(_))));
        assert!(matches!(admissible_radii(iv(1.0), iv(0.0), iv(1.0)), Err(Error::NoAdmissibleRadius(_))));
    }
}
