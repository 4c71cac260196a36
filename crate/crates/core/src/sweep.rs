//! Two-dimensional parameter sweeps and their CSV form.
//!
//! Rows come out in grid order, axis 1 outer. A point whose evaluation
//! fails still gets a row: its numeric columns are `nan` and `status`
//! carries the error.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cavity::{cavity_coeffs, CavityParams};
use crate::circuits::{Circuit, DeviceErrorConfig};
use crate::config::{AxisKind, ErrorMode, Execution, SimConfig, SweepGrid};
use crate::devices::{ClonerConfig, CpbsError, HwpError, SwitchCoeffs};
use crate::error::{Error, Result};
use crate::fidelity::{average_fidelity_with_coeffs, InputEnsemble};
use crate::state::Spin;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x1: f64,
    pub x2: f64,
    pub f_up: f64,
    pub f_down: f64,
    pub f_both: f64,
    pub p_up: f64,
    pub p_down: f64,
    /// `ok`, or the error met at this point.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis1: AxisKind,
    pub axis2: AxisKind,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn header(&self) -> [&str; 8] {
        [
            self.axis1.name(),
            self.axis2.name(),
            "f_up",
            "f_down",
            "f_both",
            "p_up",
            "p_down",
            "status",
        ]
    }

    /// Row at the grid point closest to `(x1, x2)`.
    pub fn nearest(&self, x1: f64, x2: f64) -> Option<&SweepRow> {
        self.rows.iter().min_by(|a, b| {
            let da = (a.x1 - x1).abs() + (a.x2 - x2).abs();
            let db = (b.x1 - x1).abs() + (b.x2 - x2).abs();
            da.total_cmp(&db)
        })
    }
}

/// Apply an axis value to a copy of the point's parameters.
fn apply_axis(
    kind: AxisKind,
    x: f64,
    cav: &mut CavityParams,
    err: &mut DeviceErrorConfig,
) -> Result<()> {
    match kind {
        AxisKind::KappaSOverKappa => cav.kappa_s = x,
        AxisKind::GOverKappa => cav.g = x,
        AxisKind::Err => {
            let u = DeviceErrorConfig::uniform(x)?;
            err.xi1 = u.xi1;
            err.xi2 = u.xi2;
            err.cpbs = u.cpbs;
        }
        AxisKind::PSw => {
            err.sw1 = SwitchCoeffs::uniform(x)?;
            err.sw2 = SwitchCoeffs::uniform(x)?;
        }
    }
    Ok(())
}

/// Scale every HWP and CPBS error by an independent factor in `[0.5, 1.5]`.
fn jitter(err: &DeviceErrorConfig, seed: u64, index: u64) -> Result<DeviceErrorConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut f = |x: f64| x * rng.random_range(0.5..1.5);
    let mut out = *err;
    out.xi1 = HwpError::new(f(err.xi1.xi()))?;
    out.xi2 = HwpError::new(f(err.xi2.xi()))?;
    for c in out.cpbs.iter_mut() {
        *c = CpbsError::new(f(c.tau_r()).min(1.0), f(c.tau_l()).min(1.0))?;
    }
    Ok(out)
}

fn evaluate(
    cfg: &SimConfig,
    ensemble: &InputEnsemble,
    x1: f64,
    x2: f64,
    index: usize,
) -> Result<SweepRow> {
    let mut cav = cfg.cavity()?;
    let mut err = cfg.errors;
    apply_axis(cfg.grid.axis1.kind, x1, &mut cav, &mut err)?;
    apply_axis(cfg.grid.axis2.kind, x2, &mut cav, &mut err)?;
    if cfg.error_mode == ErrorMode::Jitter {
        err = jitter(&err, cfg.seed, index as u64)?;
    }
    let coeffs = cavity_coeffs(&cav)?;
    let r = average_fidelity_with_coeffs(cfg.circuit, &coeffs, &err, ensemble)?;
    Ok(SweepRow {
        x1,
        x2,
        f_up: r.branch(Spin::Up, cfg.branch_convention),
        f_down: r.branch(Spin::Down, cfg.branch_convention),
        f_both: r.both,
        p_up: r.success[0],
        p_down: r.success[1],
        status: "ok".into(),
    })
}

fn failed(x1: f64, x2: f64, e: &Error) -> SweepRow {
    SweepRow {
        x1,
        x2,
        f_up: f64::NAN,
        f_down: f64::NAN,
        f_both: f64::NAN,
        p_up: f64::NAN,
        p_down: f64::NAN,
        status: format!("error: {e}"),
    }
}

/// Evaluate `cfg` on every point of `cfg.grid`.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepTable> {
    let ensemble = cfg.input_ensemble()?;
    let xs1 = cfg.grid.axis1.values();
    let xs2 = cfg.grid.axis2.values();
    let points: Vec<(f64, f64)> = xs1
        .iter()
        .flat_map(|&a| xs2.iter().map(move |&b| (a, b)))
        .collect();
    let eval = |(i, &(a, b)): (usize, &(f64, f64))| {
        evaluate(cfg, &ensemble, a, b, i).unwrap_or_else(|e| failed(a, b, &e))
    };
    let rows = match cfg.execution {
        Execution::Parallel => points.par_iter().enumerate().map(eval).collect(),
        Execution::Serial => points.iter().enumerate().map(eval).collect(),
    };
    Ok(SweepTable {
        axis1: cfg.grid.axis1.kind,
        axis2: cfg.grid.axis2.kind,
        rows,
    })
}

fn is_kinds(grid: &SweepGrid, a: AxisKind, b: AxisKind) -> bool {
    grid.axis1.kind == a && grid.axis2.kind == b
}

/// Fidelity over `kappa_s/kappa` x `g/kappa`. A config whose grid is not a
/// coupling grid gets the canonical one.
pub fn sweep_coupling(cfg: &SimConfig) -> Result<SweepTable> {
    let mut cfg = cfg.clone();
    if !is_kinds(&cfg.grid, AxisKind::KappaSOverKappa, AxisKind::GOverKappa) {
        cfg.grid = SweepGrid::coupling();
    }
    run_sweep(&cfg)
}

/// Optimized-circuit fidelity over `E_rr` x `P_SW` at strong coupling with
/// the optimal universal cloner.
pub fn sweep_err_psw(cfg: &SimConfig) -> Result<SweepTable> {
    let mut cfg = cfg.clone();
    if !is_kinds(&cfg.grid, AxisKind::Err, AxisKind::PSw) {
        cfg.grid = SweepGrid::err_psw();
    }
    let strong = CavityParams::strong_coupling();
    cfg.circuit = Circuit::Optimized;
    cfg.g_over_kappa = strong.g;
    cfg.kappa_s_over_kappa = strong.kappa_s;
    cfg.gamma_over_kappa = strong.gamma;
    cfg.errors.cloner = ClonerConfig::universal_optimal();
    run_sweep(&cfg)
}

/// Ten significant digits, plain decimal notation; `nan` for non-finite.
pub fn format_sig10(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0.000000000".into();
    }
    let sci = format!("{x:.9e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (9 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv_to<W: Write>(table: &SweepTable, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(table.header())?;
    for r in &table.rows {
        let nums = [r.x1, r.x2, r.f_up, r.f_down, r.f_both, r.p_up, r.p_down].map(format_sig10);
        out.write_record(nums.iter().map(String::as_str).chain([r.status.as_str()]))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(table: &SweepTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::EmptyState);
    }
    let file = std::fs::File::create(path)?;
    write_csv_to(table, std::io::BufWriter::new(file))
}
