//! Batch front-end: flat `key = value` configuration, presets and the
//! pipeline stages `solve → prove → spectrum → stability`, plus `constants`,
//! `recheck` and `export`.
//!
//! Every stage reads the artifacts of the previous one from disk, so a run
//! can be resumed or audited stage by stage. Failures map to the exit codes
//! of [`Error::exit_code`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::approx::{read_coeffs, solve, write_coeffs, SolveConfig};
use crate::certify::{certificate, file_digest, prove_existence, recheck, write_certificate, Certificate, ExistenceConfig};
use crate::error::{Error, Result};
use crate::spectral::{candidate_pairs, enclose_eig, lambda_windows, prove_stability, SpectralSetup, StabilityConfig, SweepConfig};
use crate::strip::decay_constants;
use crate::symbols::SymbolParams;

/// Pipeline stage to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Newton solve; writes the coefficient file.
    Solve,
    /// Strip verification and decay constants.
    Constants,
    /// Existence proof; writes the certificate.
    Prove,
    /// Enclosures of the negative and zero eigenvalues.
    Spectrum,
    /// Full stability proof; appends the verdict to the certificate.
    Stability,
    /// Independent re-check of a certificate.
    Recheck,
    /// CSV profile `x, u_lo, u_hi` of the certified solution.
    Export,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "solve" => Mode::Solve,
            "constants" => Mode::Constants,
            "prove" => Mode::Prove,
            "spectrum" => Mode::Spectrum,
            "stability" => Mode::Stability,
            "recheck" => Mode::Recheck,
            "export" => Mode::Export,
            other => return Err(Error::Config(format!("unknown mode '{other}'"))),
        })
    }
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Stage to run.
    pub mode: Mode,
    /// Bond number.
    pub t: f64,
    /// Wave speed.
    pub c: f64,
    /// Half-period.
    pub d: f64,
    /// Truncation order.
    pub n: usize,
    /// Requested strip half-width.
    pub a: f64,
    /// Fixed strip level, or `None` to scan for it.
    pub sigma0: Option<f64>,
    /// Shrink factor applied to the scanned strip level.
    pub safety: f64,
    /// Initial subdivision of the strip verification.
    pub strip_grid: usize,
    /// Newton tolerance.
    pub newton_tol: f64,
    /// Newton iteration cap.
    pub newton_max_iter: usize,
    /// Coefficient file written by `solve` and read by `prove`.
    pub coeffs: PathBuf,
    /// Certificate file written by `prove` and read by later stages.
    pub certificate: PathBuf,
    /// Sweep log written by `stability`.
    pub sweep_csv: PathBuf,
    /// Profile written by `export`.
    pub profile_csv: PathBuf,
    /// Number of profile points on `[0, d]`.
    pub profile_points: usize,
    /// Sweep stride factor.
    pub sweep_stride: f64,
    /// Smallest floor the sweep accepts before stalling.
    pub sweep_min_floor: f64,
    /// Number of approximate eigenvalues inspected.
    pub eig_count: usize,
    /// Worker threads, or `None` for the rayon default.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Prove,
            t: 0.0,
            c: 1.1,
            d: 30.0,
            n: 300,
            a: 0.45,
            sigma0: None,
            safety: 0.99,
            strip_grid: 64,
            newton_tol: 1e-13,
            newton_max_iter: 60,
            coeffs: PathBuf::from("u0_coeffs.txt"),
            certificate: PathBuf::from("certificate.json"),
            sweep_csv: PathBuf::from("sweep.csv"),
            profile_csv: PathBuf::from("profile.csv"),
            profile_points: 1001,
            sweep_stride: SweepConfig::default().stride,
            sweep_min_floor: SweepConfig::default().min_floor,
            eig_count: StabilityConfig::default().eig_count,
            threads: None,
        }
    }
}

/// Names of the shipped presets.
pub const PRESETS: [&str; 3] = ["whitham-small", "thm-T0", "thm-T05"];

/// Key-value text of a preset.
pub fn preset_text(name: &str) -> Result<&'static str> {
    match name {
        "whitham-small" => Ok("T = 0\nc = 1.1\nd = 30\nN = 300\na = 0.45\n"),
        "thm-T0" => Ok("T = 0\nc = 1.1\nd = 50\nN = 800\na = 0.25\n"),
        "thm-T05" => Ok("T = 0.5\nc = 0.8\nd = 40\nN = 800\na = 0.45\n"),
        other => Err(Error::Config(format!("unknown preset '{other}', expected one of {PRESETS:?}"))),
    }
}

/// Parses flat `key = value` text. Blank lines and `#` comments are
/// ignored; a repeated key keeps its last value.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("invalid value '{v}' for key '{key}'")))
}

impl RunConfig {
    /// Applies parsed key-value pairs on top of `self`.
    pub fn apply(&mut self, kv: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in kv {
            match k.as_str() {
                "mode" => self.mode = v.parse()?,
                "T" => self.t = parse_value(k, v)?,
                "c" => self.c = parse_value(k, v)?,
                "d" => self.d = parse_value(k, v)?,
                "N" => self.n = parse_value(k, v)?,
                "a" => self.a = parse_value(k, v)?,
                "sigma0" => self.sigma0 = if v == "auto" { None } else { Some(parse_value(k, v)?) },
                "safety" => self.safety = parse_value(k, v)?,
                "strip_grid" => self.strip_grid = parse_value(k, v)?,
                "newton_tol" => self.newton_tol = parse_value(k, v)?,
                "newton_max_iter" => self.newton_max_iter = parse_value(k, v)?,
                "coeffs" => self.coeffs = PathBuf::from(v),
                "certificate" => self.certificate = PathBuf::from(v),
                "sweep_csv" => self.sweep_csv = PathBuf::from(v),
                "profile_csv" => self.profile_csv = PathBuf::from(v),
                "profile_points" => self.profile_points = parse_value(k, v)?,
                "sweep_stride" => self.sweep_stride = parse_value(k, v)?,
                "sweep_min_floor" => self.sweep_min_floor = parse_value(k, v)?,
                "eig_count" => self.eig_count = parse_value(k, v)?,
                "threads" => self.threads = Some(parse_value(k, v)?),
                other => return Err(Error::Config(format!("unknown key '{other}'"))),
            }
        }
        self.validate()
    }

    /// Checks ranges that the library would otherwise reject deep inside a run.
    pub fn validate(&self) -> Result<()> {
        if !(self.d > 1.0) || self.n < 4 {
            return Err(Error::Config("need d > 1 and N ≥ 4".into()));
        }
        if !(self.a > 0.0) || !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::Config("need a > 0 and 0 < safety ≤ 1".into()));
        }
        if !(self.sweep_stride > 1.0 && self.sweep_stride < 2.0) {
            return Err(Error::Config("sweep_stride must lie in (1, 2)".into()));
        }
        if self.profile_points < 2 {
            return Err(Error::Config("profile_points must be at least 2".into()));
        }
        Ok(())
    }

    /// Existence settings derived from the run configuration.
    pub fn existence(&self) -> ExistenceConfig {
        ExistenceConfig {
            t: self.t,
            c: self.c,
            d: self.d,
            n: self.n,
            a: self.a,
            sigma0: self.sigma0,
            safety: self.safety,
            strip_grid: self.strip_grid,
        }
    }

    /// Stability settings derived from the run configuration.
    pub fn stability(&self) -> StabilityConfig {
        StabilityConfig {
            eig_count: self.eig_count,
            sweep: SweepConfig { stride: self.sweep_stride, min_floor: self.sweep_min_floor },
            ..StabilityConfig::default()
        }
    }
}

/// Builds the run configuration from an optional preset, an optional
/// config file and an optional mode override, in that order of precedence
/// (later wins).
pub fn load_config(preset: Option<&str>, config: Option<&Path>, mode: Option<&str>, threads: Option<usize>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = preset {
        cfg.apply(&parse_kv(preset_text(p)?)?)?;
    }
    if let Some(path) = config {
        cfg.apply(&parse_kv(&std::fs::read_to_string(path)?)?)?;
    }
    if let Some(m) = mode {
        cfg.mode = m.parse()?;
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    Ok(cfg)
}

/// Runs the configured stage and returns the report printed on success.
pub fn run(cfg: &RunConfig) -> Result<String> {
    match cfg.mode {
        Mode::Solve => run_solve(cfg),
        Mode::Constants => run_constants(cfg),
        Mode::Prove => run_prove(cfg),
        Mode::Spectrum => run_spectrum(cfg),
        Mode::Stability => run_stability(cfg),
        Mode::Recheck => run_recheck(cfg),
        Mode::Export => run_export(cfg),
    }
}

fn run_solve(cfg: &RunConfig) -> Result<String> {
    let mut sc = SolveConfig::new(cfg.t, cfg.c, cfg.d, cfg.n);
    sc.tol = cfg.newton_tol;
    sc.max_iter = cfg.newton_max_iter;
    let sol = solve(&sc)?;
    write_coeffs(&cfg.coeffs, &sol)?;
    Ok(format!(
        "solve: T={} c={} d={} N={} iterations={} residual={:e}\nwrote {}\n",
        cfg.t,
        cfg.c,
        cfg.d,
        cfg.n,
        sol.iterations,
        sol.residual,
        cfg.coeffs.display()
    ))
}

fn run_constants(cfg: &RunConfig) -> Result<String> {
    let p = SymbolParams::new(cfg.t, cfg.c)?;
    let strip = crate::certify::certify_strip(&p, &cfg.existence())?;
    let dc = decay_constants(&p, &strip)?;
    let mut out = String::new();
    writeln!(out, "strip: a={} sigma0={:e} sigma1={:?} boxes={}", strip.a, strip.sigma0, strip.sigma1, strip.boxes).ok();
    for (name, v) in [
        ("a0", dc.a0),
        ("C_a", dc.c_a),
        ("C_Y0", dc.c_y0),
        ("C_0", dc.c_0),
        ("C_1", dc.c_1),
        ("K_1", dc.k_1),
        ("K_2", dc.k_2),
        ("C_2", dc.c_2),
        ("kappa", dc.kappa),
        ("sup_embed", dc.sup_embed),
    ] {
        writeln!(out, "{name:>10} = [{:e}, {:e}]", v.lo(), v.hi()).ok();
    }
    Ok(out)
}

/// Human-readable table of the existence bounds.
pub fn bound_table(cert: &Certificate) -> String {
    let pf = &cert.proof;
    let b = &pf.bounds;
    let mut out = String::new();
    writeln!(out, "existence: T={} c={} d={} N={}", pf.config.t, pf.config.c, pf.config.d, pf.config.n).ok();
    for (name, v) in [
        ("Y0 periodic", b.y0_periodic),
        ("Y0 tail", b.y0_tail),
        ("Y0", b.y0),
        ("Z11 top", b.z11_top),
        ("Z11 tail", b.z11_tail),
        ("Z12", b.z12),
        ("Z13", b.z13),
        ("Z14", b.z14),
        ("Zu", b.zu),
        ("Z1", b.z1),
        ("Z2", b.z2),
        ("|B|", b.norm_b),
    ] {
        writeln!(out, "{name:>12} ≤ {:e}", v.hi()).ok();
    }
    writeln!(out, "{:>12} = {:e}  (admissible ({:e}, {:e}))", "r", pf.radii.r, pf.radii.r_min, pf.radii.r_max).ok();
    if let Some(reg) = pf.regularity {
        writeln!(out, "{:>12} = {:.4}  (sup-distance {:e})", "epsilon", reg.epsilon, reg.sup_distance).ok();
    }
    out
}

fn run_prove(cfg: &RunConfig) -> Result<String> {
    if !cfg.coeffs.exists() {
        return Err(Error::Io(format!("coefficient file {} not found; run mode=solve first", cfg.coeffs.display())));
    }
    let sol = read_coeffs(&cfg.coeffs)?;
    if sol.t != cfg.t || sol.c != cfg.c || sol.d != cfg.d || sol.coeffs.len() != cfg.n + 1 {
        return Err(Error::Config("coefficient file does not match T, c, d, N of the configuration".into()));
    }
    let proof = prove_existence(&cfg.existence(), &sol.coeffs)?;
    let mut cert = certificate(&proof)?;
    cert.input_digest = Some(file_digest(&cfg.coeffs)?);
    write_certificate(&cert, &cfg.certificate)?;
    Ok(format!("{}wrote {}\n", bound_table(&cert), cfg.certificate.display()))
}

fn load_checked(cfg: &RunConfig) -> Result<Certificate> {
    if !cfg.certificate.exists() {
        return Err(Error::Io(format!("certificate {} not found; run mode=prove first", cfg.certificate.display())));
    }
    recheck(&cfg.certificate)
}

fn run_spectrum(cfg: &RunConfig) -> Result<String> {
    let cert = load_checked(cfg)?;
    let s = SpectralSetup::from_proof(&cert.proof)?;
    let w = lambda_windows(&s);
    let mut out = String::new();
    writeln!(out, "lambda_max ≥ {:e}, lambda_min ≤ {:e}", w.lambda_max.lo(), w.lambda_min.lo()).ok();
    for pair in candidate_pairs(&s, cfg.eig_count).iter().filter(|e| e.value < w.lambda_max.lo()) {
        match enclose_eig(&s, pair, &w) {
            Ok(e) => writeln!(out, "eigenvalue {:+.6e} ± {:.3e}  simple={} R={:.3e}", e.lambda0, e.r, e.simple, e.big_r).ok(),
            Err(err) => writeln!(out, "eigenvalue {:+.6e}: {err}", pair.value).ok(),
        };
    }
    Ok(out)
}

fn run_stability(cfg: &RunConfig) -> Result<String> {
    let mut cert = load_checked(cfg)?;
    let s = SpectralSetup::from_proof(&cert.proof)?;
    let v = prove_stability(&s, &cfg.stability())?;
    let mut out = String::new();
    for e in v.negative.iter().chain(&v.zero) {
        writeln!(out, "eigenvalue {:+.6e} ± {:.3e}  simple={} R={:.3e}", e.lambda0, e.r, e.simple, e.big_r).ok();
    }
    if let Some(log) = &v.sweep {
        std::fs::write(&cfg.sweep_csv, log.to_csv())?;
        writeln!(out, "sweep: {} shifts, wrote {}", log.entries.len(), cfg.sweep_csv.display()).ok();
    }
    if let Some((lo, hi)) = v.gap {
        writeln!(out, "sweep stalled on [{lo:e}, {hi:e}]").ok();
    }
    writeln!(out, "P1={} P2={} P3={} verdict={}", v.p1, v.p2, v.p3, if v.stable { "stable" } else { "undetermined" }).ok();
    let stable = v.stable;
    cert.stability = Some(v);
    write_certificate(&cert, &cfg.certificate)?;
    if stable {
        Ok(out)
    } else {
        Err(Error::VerificationFailed(format!("stability undetermined\n{out}")))
    }
}

fn run_recheck(cfg: &RunConfig) -> Result<String> {
    let cert = load_checked(cfg)?;
    Ok(format!("{}recheck: ok\n", bound_table(&cert)))
}

fn run_export(cfg: &RunConfig) -> Result<String> {
    let cert = load_checked(cfg)?;
    let csv = profile_csv(&cert, cfg.profile_points);
    std::fs::write(&cfg.profile_csv, csv)?;
    Ok(format!("wrote {}\n", cfg.profile_csv.display()))
}

/// CSV `x,u_lo,u_hi` on `[0, d]`: the enclosure of `u0(x)` widened by the
/// certified sup-distance `sup_embed · r`.
pub fn profile_csv(cert: &Certificate, points: usize) -> String {
    let pf = &cert.proof;
    let dist = (pf.decay.sup_embed * pf.radii.r).hi();
    let d = pf.u0.d;
    let mut out = String::from("x,u_lo,u_hi\n");
    for i in 0..points {
        let x = d * i as f64 / (points - 1) as f64;
        let u = pf.u0.eval(x);
        let lo = (u - dist).lo();
        let hi = (u + dist).hi();
        writeln!(out, "{x:e},{lo:e},{hi:e}").ok();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for p in PRESETS {
            let cfg = load_config(Some(p), None, Some("solve"), None).unwrap();
            assert_eq!(cfg.mode, Mode::Solve);
        }
        let cfg = load_config(Some("thm-T05"), None, None, Some(3)).unwrap();
        assert_eq!((cfg.t, cfg.c, cfg.d, cfg.n, cfg.threads), (0.5, 0.8, 40.0, 800, Some(3)));
    }

    #[test]
    fn kv_parsing_handles_comments_and_rejects_junk() {
        let kv = parse_kv("# run\nT = 0.5 # bond\n\nc=0.8\n").unwrap();
        assert_eq!(kv["T"], "0.5");
        assert_eq!(kv["c"], "0.8");
        assert!(parse_kv("no equals sign").is_err());
        let mut cfg = RunConfig::default();
        assert!(matches!(cfg.apply(&parse_kv("colour = red").unwrap()), Err(Error::Config(_))));
        assert!(matches!(cfg.apply(&parse_kv("mode = dance").unwrap()), Err(Error::Config(_))));
        assert!(matches!(cfg.apply(&parse_kv("sweep_stride = 2.5").unwrap()), Err(Error::Config(_))));
    }
}
