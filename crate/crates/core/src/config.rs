//! Flat `key = value` simulation config.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; missing
//! keys take the defaults of [`SimConfig::default`]. Unknown or repeated keys
//! are errors.
//!
//! | key | values | default |
//! |-----|--------|---------|
//! | `circuit` | `baseline`, `optimized` | `baseline` |
//! | `g_over_kappa`, `kappa_s_over_kappa`, `gamma_over_kappa` | `>= 0` | `2.5`, `0.05`, `0.1` |
//! | `xi1`, `xi2` | `[-1, 1]` | `0` |
//! | `cpbs{1..4}_tau_r`, `cpbs{1..4}_tau_l` | `[0, 1]` | `0` |
//! | `sw{1,2}_t12`, `_t21`, `_r11`, `_r22` | `[0, 1]` | `1` |
//! | `cloner_fidelity` | `[0.5, 1]` | `1` |
//! | `ensemble` | `calibration`, `basis4`, `superposition4`, `haar_product` | `calibration` |
//! | `ensemble_size` | `>= 1`, used by `haar_product` | `1000` |
//! | `seed` | unsigned integer | `0` |
//! | `branch_convention` | `heralded`, `unrenormalized`, `renormalized` | `heralded` |
//! | `error_mode` | `fixed`, `jitter` | `fixed` |
//! | `execution` | `parallel`, `serial` | `parallel` |
//! | `sweep_axis{1,2}` | `kappa_s_over_kappa`, `g_over_kappa`, `err`, `p_sw` | `kappa_s_over_kappa`, `g_over_kappa` |
//! | `sweep_axis{1,2}_lo`, `_hi`, `_points`, `_scale` | range, count `>= 2`, `linear`/`log` | per axis kind |
//! | `output` | path | none |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::cavity::CavityParams;
use crate::circuits::{Circuit, DeviceErrorConfig};
use crate::devices::{ClonerConfig, CpbsError, HwpError, SwitchCoeffs};
use crate::error::{Error, Result};
use crate::fidelity::{BranchConvention, EnsembleKind, InputEnsemble, CALIBRATION_ENSEMBLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleChoice {
    Calibration,
    Basis4,
    Superposition4,
    HaarProduct,
}

impl EnsembleChoice {
    fn name(self) -> &'static str {
        match self {
            EnsembleChoice::Calibration => "calibration",
            EnsembleChoice::Basis4 => "basis4",
            EnsembleChoice::Superposition4 => "superposition4",
            EnsembleChoice::HaarProduct => "haar_product",
        }
    }

    fn parse(s: &str) -> Option<EnsembleChoice> {
        Some(match s {
            "calibration" => EnsembleChoice::Calibration,
            "basis4" => EnsembleChoice::Basis4,
            "superposition4" => EnsembleChoice::Superposition4,
            "haar_product" => EnsembleChoice::HaarProduct,
            _ => return None,
        })
    }
}

/// How the nominal device errors are applied at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMode {
    /// Every error exactly at its nominal value.
    #[default]
    Fixed,
    /// Every error drawn uniformly from `[0.5, 1.5] x nominal`, seeded per point.
    Jitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    KappaSOverKappa,
    GOverKappa,
    /// All HWP and CPBS errors at once.
    Err,
    /// All switch coefficients at once.
    PSw,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::KappaSOverKappa => "kappa_s_over_kappa",
            AxisKind::GOverKappa => "g_over_kappa",
            AxisKind::Err => "err",
            AxisKind::PSw => "p_sw",
        }
    }

    fn parse(s: &str) -> Option<AxisKind> {
        Some(match s {
            "kappa_s_over_kappa" => AxisKind::KappaSOverKappa,
            "g_over_kappa" => AxisKind::GOverKappa,
            "err" => AxisKind::Err,
            "p_sw" => AxisKind::PSw,
            _ => return None,
        })
    }

    /// The canonical axis for this kind.
    pub fn default_axis(self) -> Axis {
        let (lo, hi, points, scale) = match self {
            AxisKind::KappaSOverKappa => (0.0, 2.0, 41, Scale::Linear),
            AxisKind::GOverKappa => (0.0, 3.0, 61, Scale::Linear),
            AxisKind::Err => (1e-4, 1e-1, 31, Scale::Log),
            AxisKind::PSw => (0.6, 1.0, 41, Scale::Linear),
        };
        Axis {
            kind: self,
            lo,
            hi,
            points,
            scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(format!("need lo < hi, got [{}, {}]", self.lo, self.hi));
        }
        if self.points < 2 {
            return Err(format!("need at least 2 points, got {}", self.points));
        }
        if self.scale == Scale::Log && self.lo <= 0.0 {
            return Err(format!("log scale needs lo > 0, got {}", self.lo));
        }
        Ok(())
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == n - 1 {
                    return self.hi;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.lo + f * (self.hi - self.lo),
                    Scale::Log => (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Axis,
}

impl SweepGrid {
    /// `kappa_s/kappa` (outer) by `g/kappa`.
    pub fn coupling() -> SweepGrid {
        SweepGrid {
            axis1: AxisKind::KappaSOverKappa.default_axis(),
            axis2: AxisKind::GOverKappa.default_axis(),
        }
    }

    /// `E_rr` (outer) by `P_SW`.
    pub fn err_psw() -> SweepGrid {
        SweepGrid {
            axis1: AxisKind::Err.default_axis(),
            axis2: AxisKind::PSw.default_axis(),
        }
    }

    pub fn len(&self) -> usize {
        self.axis1.points * self.axis2.points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid::coupling()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub circuit: Circuit,
    pub g_over_kappa: f64,
    pub kappa_s_over_kappa: f64,
    pub gamma_over_kappa: f64,
    pub errors: DeviceErrorConfig,
    pub ensemble: EnsembleChoice,
    pub ensemble_size: usize,
    pub seed: u64,
    pub branch_convention: BranchConvention,
    pub error_mode: ErrorMode,
    pub execution: Execution,
    pub grid: SweepGrid,
    pub output: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        let strong = CavityParams::strong_coupling();
        SimConfig {
            circuit: Circuit::Baseline,
            g_over_kappa: strong.g,
            kappa_s_over_kappa: strong.kappa_s,
            gamma_over_kappa: strong.gamma,
            errors: DeviceErrorConfig::ideal(),
            ensemble: EnsembleChoice::Calibration,
            ensemble_size: 1000,
            seed: 0,
            branch_convention: BranchConvention::Heralded,
            error_mode: ErrorMode::Fixed,
            execution: Execution::Parallel,
            grid: SweepGrid::coupling(),
            output: None,
        }
    }
}

fn value_err(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigValue {
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| value_err(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(value_err(key, format!("`{v}` is not finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| value_err(key, format!("`{v}` is not a non-negative integer")))
}

/// Turn a component domain error into one that names the config key.
fn in_range<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Domain {
            value, constraint, ..
        } => value_err(key, format!("{value} violates {constraint}")),
        other => other,
    })
}

impl SimConfig {
    pub fn cavity(&self) -> Result<CavityParams> {
        CavityParams::from_ratios(
            self.g_over_kappa,
            self.kappa_s_over_kappa,
            self.gamma_over_kappa,
        )
    }

    pub fn ensemble_kind(&self) -> EnsembleKind {
        match self.ensemble {
            EnsembleChoice::Calibration => CALIBRATION_ENSEMBLE,
            EnsembleChoice::Basis4 => EnsembleKind::Basis4,
            EnsembleChoice::Superposition4 => EnsembleKind::Superposition4,
            EnsembleChoice::HaarProduct => EnsembleKind::HaarProduct {
                n: self.ensemble_size,
                seed: self.seed,
            },
        }
    }

    pub fn input_ensemble(&self) -> Result<InputEnsemble> {
        InputEnsemble::new(self.ensemble_kind())
    }

    pub fn parse(text: &str) -> Result<SimConfig> {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut cfg = SimConfig::default();
        let mut axes = [AxisOverrides::default(), AxisOverrides::default()];
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(Error::Config {
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            if let Some(first) = seen.insert(key.to_string(), line_no) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("key `{key}` already set on line {first}"),
                });
            }
            cfg.set(key, value, &mut axes)?;
        }
        for (n, ov) in axes.iter().enumerate() {
            let axis = ov.resolve(if n == 0 {
                cfg.grid.axis1.kind
            } else {
                cfg.grid.axis2.kind
            });
            let key = format!("sweep_axis{}", n + 1);
            axis.validate().map_err(|m| value_err(&key, m))?;
            if n == 0 {
                cfg.grid.axis1 = axis;
            } else {
                cfg.grid.axis2 = axis;
            }
        }
        if cfg.ensemble == EnsembleChoice::HaarProduct && cfg.ensemble_size == 0 {
            return Err(value_err(
                "ensemble_size",
                "haar_product needs at least one input",
            ));
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str, axes: &mut [AxisOverrides; 2]) -> Result<()> {
        let e = &mut self.errors;
        match key {
            "circuit" => self.circuit = v.parse().map_err(|m: String| value_err(key, m))?,
            "g_over_kappa" => self.g_over_kappa = nonneg(key, v)?,
            "kappa_s_over_kappa" => self.kappa_s_over_kappa = nonneg(key, v)?,
            "gamma_over_kappa" => self.gamma_over_kappa = nonneg(key, v)?,
            "xi1" => e.xi1 = in_range(key, HwpError::new(parse_f64(key, v)?))?,
            "xi2" => e.xi2 = in_range(key, HwpError::new(parse_f64(key, v)?))?,
            "cloner_fidelity" => e.cloner = in_range(key, ClonerConfig::new(parse_f64(key, v)?))?,
            "ensemble" => {
                self.ensemble = EnsembleChoice::parse(v).ok_or_else(|| {
                    value_err(key, format!("unknown ensemble `{v}` (calibration, basis4, superposition4, haar_product)"))
                })?
            }
            "ensemble_size" => self.ensemble_size = parse_usize(key, v)?,
            "seed" => self.seed = v.parse().map_err(|_| value_err(key, format!("`{v}` is not an unsigned integer")))?,
            "branch_convention" => self.branch_convention = v.parse().map_err(|m: String| value_err(key, m))?,
            "error_mode" => {
                self.error_mode = match v {
                    "fixed" => ErrorMode::Fixed,
                    "jitter" => ErrorMode::Jitter,
                    _ => return Err(value_err(key, format!("unknown error mode `{v}` (fixed, jitter)"))),
                }
            }
            "execution" => {
                self.execution = match v {
                    "parallel" => Execution::Parallel,
                    "serial" => Execution::Serial,
                    _ => return Err(value_err(key, format!("unknown execution `{v}` (parallel, serial)"))),
                }
            }
            "output" => self.output = Some(PathBuf::from(v)),
            _ => {
                if let Some((n, field)) = cpbs_key(key) {
                    let c = &mut e.cpbs[n];
                    let x = parse_f64(key, v)?;
                    *c = in_range(
                        key,
                        if field == "tau_r" { CpbsError::new(x, c.tau_l()) } else { CpbsError::new(c.tau_r(), x) },
                    )?;
                } else if let Some((n, field)) = switch_key(key) {
                    let sw = if n == 0 { &mut e.sw1 } else { &mut e.sw2 };
                    let x = parse_f64(key, v)?;
                    let mut next = *sw;
                    match field {
                        "t12" => next.t12 = x,
                        "t21" => next.t21 = x,
                        "r11" => next.r11 = x,
                        _ => next.r22 = x,
                    }
                    in_range(key, next.validate())?;
                    *sw = next;
                } else if let Some((n, field)) = axis_key(key) {
                    let ov = &mut axes[n];
                    match field {
                        "" => {
                            let kind = AxisKind::parse(v).ok_or_else(|| {
                                value_err(key, format!("unknown axis `{v}` (kappa_s_over_kappa, g_over_kappa, err, p_sw)"))
                            })?;
                            if n == 0 {
                                self.grid.axis1.kind = kind;
                            } else {
                                self.grid.axis2.kind = kind;
                            }
                        }
                        "lo" => ov.lo = Some(parse_f64(key, v)?),
                        "hi" => ov.hi = Some(parse_f64(key, v)?),
                        "points" => ov.points = Some(parse_usize(key, v)?),
                        _ => {
                            ov.scale = Some(match v {
                                "linear" => Scale::Linear,
                                "log" => Scale::Log,
                                _ => return Err(value_err(key, format!("unknown scale `{v}` (linear, log)"))),
                            })
                        }
                    }
                } else {
                    return Err(value_err(key, "unknown key"));
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SimConfig> {
        SimConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Every key, in a fixed order. Floats use the shortest representation
    /// that parses back to the same bits.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let e = &self.errors;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("circuit", self.circuit.name().into());
        kv("g_over_kappa", self.g_over_kappa.to_string());
        kv("kappa_s_over_kappa", self.kappa_s_over_kappa.to_string());
        kv("gamma_over_kappa", self.gamma_over_kappa.to_string());
        kv("xi1", e.xi1.xi().to_string());
        kv("xi2", e.xi2.xi().to_string());
        for (i, c) in e.cpbs.iter().enumerate() {
            kv(&format!("cpbs{}_tau_r", i + 1), c.tau_r().to_string());
            kv(&format!("cpbs{}_tau_l", i + 1), c.tau_l().to_string());
        }
        for (i, sw) in [e.sw1, e.sw2].iter().enumerate() {
            kv(&format!("sw{}_t12", i + 1), sw.t12.to_string());
            kv(&format!("sw{}_t21", i + 1), sw.t21.to_string());
            kv(&format!("sw{}_r11", i + 1), sw.r11.to_string());
            kv(&format!("sw{}_r22", i + 1), sw.r22.to_string());
        }
        kv("cloner_fidelity", e.cloner.fidelity().to_string());
        kv("ensemble", self.ensemble.name().into());
        kv("ensemble_size", self.ensemble_size.to_string());
        kv("seed", self.seed.to_string());
        kv("branch_convention", self.branch_convention.name().into());
        kv(
            "error_mode",
            match self.error_mode {
                ErrorMode::Fixed => "fixed",
                ErrorMode::Jitter => "jitter",
            }
            .into(),
        );
        kv(
            "execution",
            match self.execution {
                Execution::Parallel => "parallel",
                Execution::Serial => "serial",
            }
            .into(),
        );
        for (i, a) in [self.grid.axis1, self.grid.axis2].iter().enumerate() {
            let p = format!("sweep_axis{}", i + 1);
            kv(&p, a.kind.name().into());
            kv(&format!("{p}_lo"), a.lo.to_string());
            kv(&format!("{p}_hi"), a.hi.to_string());
            kv(&format!("{p}_points"), a.points.to_string());
            kv(
                &format!("{p}_scale"),
                match a.scale {
                    Scale::Linear => "linear",
                    Scale::Log => "log",
                }
                .into(),
            );
        }
        if let Some(out) = &self.output {
            kv("output", out.display().to_string());
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_config_string())?;
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    SimConfig::load(path)
}

fn nonneg(key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(key, v)?;
    if x < 0.0 {
        return Err(value_err(key, format!("{x} violates >= 0")));
    }
    Ok(x)
}

#[derive(Debug, Default)]
struct AxisOverrides {
    lo: Option<f64>,
    hi: Option<f64>,
    points: Option<usize>,
    scale: Option<Scale>,
}

impl AxisOverrides {
    fn resolve(&self, kind: AxisKind) -> Axis {
        let d = kind.default_axis();
        Axis {
            kind,
            lo: self.lo.unwrap_or(d.lo),
            hi: self.hi.unwrap_or(d.hi),
            points: self.points.unwrap_or(d.points),
            scale: self.scale.unwrap_or(d.scale),
        }
    }
}

fn indexed<'a>(key: &'a str, prefix: &str, max: usize) -> Option<(usize, &'a str)> {
    let rest = key.strip_prefix(prefix)?;
    let digit = rest.chars().next()?.to_digit(10)? as usize;
    if digit == 0 || digit > max {
        return None;
    }
    Some((digit - 1, &rest[1..]))
}

fn cpbs_key(key: &str) -> Option<(usize, &str)> {
    let (n, rest) = indexed(key, "cpbs", 4)?;
    match rest {
        "_tau_r" => Some((n, "tau_r")),
        "_tau_l" => Some((n, "tau_l")),
        _ => None,
    }
}

fn switch_key(key: &str) -> Option<(usize, &str)> {
    let (n, rest) = indexed(key, "sw", 2)?;
    let field = rest.strip_prefix('_')?;
    matches!(field, "t12" | "t21" | "r11" | "r22").then_some((n, field))
}

fn axis_key(key: &str) -> Option<(usize, &str)> {
    let (n, rest) = indexed(key, "sweep_axis", 2)?;
    if rest.is_empty() {
        return Some((n, ""));
    }
    let field = rest.strip_prefix('_')?;
    matches!(field, "lo" | "hi" | "points" | "scale").then_some((n, field))
}

/// The configuration used by the strong-coupling examples: optimized
/// circuit, realistic switches and cloner, every error at `1e-2`.
pub fn strong_coupling_realistic() -> SimConfig {
    let errors = DeviceErrorConfig::uniform(1e-2)
        .expect("1e-2 is a valid error")
        .with_switches(
            SwitchCoeffs::new(0.899, 1.0, 1.0, 0.65).expect("valid switch"),
            SwitchCoeffs::new(0.956, 1.0, 0.648, 1.0).expect("valid switch"),
        )
        .with_cloner(ClonerConfig::new(0.82).expect("valid cloner"));
    SimConfig {
        circuit: Circuit::Optimized,
        errors,
        ..SimConfig::default()
    }
}
