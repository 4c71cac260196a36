//! Named reproduction targets and anchor checks.
//!
//! Each anchor is evaluated on the calibration ensemble. An anchor outside
//! its tolerance is re-evaluated on every other ensemble: if one of them
//! meets it, the calibration is wrong and the anchor fails; if none does,
//! the miss is documented with the closest ensemble and its residual.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::cavity::{cavity_coeffs, CavityParams};
use crate::circuits::{eta1_as_printed, eta1_closed_form, Circuit, CnotInputs, DeviceErrorConfig};
use crate::config::{strong_coupling_realistic, Execution, SimConfig, SweepGrid};
use crate::devices::{ClonerConfig, F_UC};
use crate::error::{Error, Result};
use crate::fidelity::{
    average_fidelity_with_coeffs, BranchConvention, EnsembleKind, FidelityReport, InputEnsemble,
    CALIBRATION_ENSEMBLE,
};
use crate::sweep::{format_sig10, sweep_coupling, sweep_err_psw, write_csv, SweepTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    TableAnchors,
}

pub const TARGETS: [&str; 5] = ["fig3a", "fig3b", "fig4a", "fig4b", "table_anchors"];

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Fig3a => "fig3a",
            Target::Fig3b => "fig3b",
            Target::Fig4a => "fig4a",
            Target::Fig4b => "fig4b",
            Target::TableAnchors => "table_anchors",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Target> {
        Ok(match s {
            "fig3a" => Target::Fig3a,
            "fig3b" => Target::Fig3b,
            "fig4a" => Target::Fig4a,
            "fig4b" => Target::Fig4b,
            "table_anchors" => Target::TableAnchors,
            other => {
                return Err(Error::UnknownTarget {
                    given: other.to_string(),
                    valid: TARGETS.join(", "),
                })
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Larger of the two heralded branch fidelities.
    BestBranch,
    /// Fidelity of the full output.
    Both,
    /// Larger of the two branch weights.
    BestBranchSuccess,
}

impl Metric {
    fn of(self, r: &FidelityReport) -> f64 {
        match self {
            Metric::BestBranch => r.best_branch(BranchConvention::Heralded),
            Metric::Both => r.both,
            Metric::BestBranchSuccess => r.success[0].max(r.success[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSpec {
    pub name: &'static str,
    pub description: &'static str,
    /// Target value as a fraction.
    pub reference: f64,
    /// Tolerance in percentage points.
    pub tolerance_pp: f64,
    pub circuit: Circuit,
    pub cavity: CavityParams,
    pub errors: DeviceErrorConfig,
    pub metric: Metric,
}

fn uniform(err: f64) -> DeviceErrorConfig {
    DeviceErrorConfig::uniform(err).expect("anchor errors are in range")
}

pub fn anchor_specs() -> Vec<AnchorSpec> {
    let strong = CavityParams::strong_coupling();
    let weak = CavityParams::weak_coupling();
    let baseline = |name, description, reference, tolerance_pp, cavity, errors| AnchorSpec {
        name,
        description,
        reference,
        tolerance_pp,
        circuit: Circuit::Baseline,
        cavity,
        errors,
        metric: Metric::BestBranch,
    };
    vec![
        baseline(
            "baseline_strong_ideal_devices",
            "baseline, strong coupling, no device errors, best branch",
            0.9374,
            1.0,
            strong,
            DeviceErrorConfig::ideal(),
        ),
        baseline(
            "baseline_weak_ideal_devices",
            "baseline, weak coupling, no device errors, best branch",
            0.3234,
            1.0,
            weak,
            DeviceErrorConfig::ideal(),
        ),
        baseline(
            "baseline_strong_errors_1e-2",
            "baseline, strong coupling, all xi and tau = 1e-2, best branch",
            0.8789,
            1.5,
            strong,
            uniform(1e-2),
        ),
        baseline(
            "baseline_weak_errors_1e-2",
            "baseline, weak coupling, all xi and tau = 1e-2, best branch",
            0.3002,
            1.5,
            weak,
            uniform(1e-2),
        ),
        AnchorSpec {
            metric: Metric::BestBranchSuccess,
            ..baseline(
                "baseline_branch_success",
                "baseline, strong coupling, no device errors, success probability of one branch",
                0.47,
                1.5,
                strong,
                DeviceErrorConfig::ideal(),
            )
        },
        AnchorSpec {
            name: "optimized_realistic_switches",
            description:
                "optimized, strong coupling, measured switches, F_cloner = 0.82, errors 1e-2",
            reference: 0.2627,
            tolerance_pp: 1.5,
            circuit: Circuit::Optimized,
            cavity: strong,
            errors: strong_coupling_realistic().errors,
            metric: Metric::Both,
        },
        AnchorSpec {
            name: "optimized_best_case",
            description: "optimized, strong coupling, E_rr = 1e-4, P_SW = 1, F_cloner = 5/6",
            reference: 0.78,
            tolerance_pp: 1.0,
            circuit: Circuit::Optimized,
            cavity: strong,
            errors: uniform(1e-4).with_cloner(ClonerConfig::universal_optimal()),
            metric: Metric::Both,
        },
    ]
}

/// Every ensemble the calibration considers, calibration ensemble first.
pub fn candidate_ensembles() -> Vec<EnsembleKind> {
    let mut v = vec![CALIBRATION_ENSEMBLE];
    for k in [
        EnsembleKind::Basis4,
        EnsembleKind::Superposition4,
        EnsembleKind::HaarProduct { n: 1000, seed: 0 },
    ] {
        if !v.contains(&k) {
            v.push(k);
        }
    }
    v
}

pub fn evaluate_anchor(spec: &AnchorSpec, ensemble: &InputEnsemble) -> Result<f64> {
    let coeffs = cavity_coeffs(&spec.cavity)?;
    let r = average_fidelity_with_coeffs(spec.circuit, &coeffs, &spec.errors, ensemble)?;
    Ok(spec.metric.of(&r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorStatus {
    Pass,
    /// Outside tolerance on every ensemble; residual reported.
    DocumentedMiss,
    /// Outside tolerance on the calibration ensemble although another
    /// ensemble meets it.
    Fail,
}

impl AnchorStatus {
    pub fn label(self) -> &'static str {
        match self {
            AnchorStatus::Pass => "PASS",
            AnchorStatus::DocumentedMiss => "MISS (documented)",
            AnchorStatus::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorCheck {
    pub spec: AnchorSpec,
    pub simulated: f64,
    pub ensemble: EnsembleKind,
    /// Closest ensemble and its value, when the calibration ensemble misses.
    pub best_alternative: Option<(EnsembleKind, f64)>,
    pub status: AnchorStatus,
}

impl AnchorCheck {
    pub fn residual_pp(&self) -> f64 {
        (self.simulated - self.spec.reference) * 100.0
    }
}

fn within(spec: &AnchorSpec, v: f64) -> bool {
    ((v - spec.reference) * 100.0).abs() <= spec.tolerance_pp
}

pub fn check_anchor(spec: &AnchorSpec) -> Result<AnchorCheck> {
    let calibration = InputEnsemble::calibration();
    let simulated = evaluate_anchor(spec, &calibration)?;
    if within(spec, simulated) {
        return Ok(AnchorCheck {
            spec: spec.clone(),
            simulated,
            ensemble: CALIBRATION_ENSEMBLE,
            best_alternative: None,
            status: AnchorStatus::Pass,
        });
    }
    let mut best: Option<(EnsembleKind, f64)> = None;
    let mut any_meets = false;
    for kind in candidate_ensembles() {
        let v = if kind == CALIBRATION_ENSEMBLE {
            simulated
        } else {
            evaluate_anchor(spec, &InputEnsemble::new(kind)?)?
        };
        any_meets |= within(spec, v);
        if best.is_none_or(|(_, b)| (v - spec.reference).abs() < (b - spec.reference).abs()) {
            best = Some((kind, v));
        }
    }
    Ok(AnchorCheck {
        spec: spec.clone(),
        simulated,
        ensemble: CALIBRATION_ENSEMBLE,
        best_alternative: best,
        status: if any_meets {
            AnchorStatus::Fail
        } else {
            AnchorStatus::DocumentedMiss
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

fn value_of(checks: &[AnchorCheck], name: &str) -> f64 {
    checks
        .iter()
        .find(|c| c.spec.name == name)
        .map_or(f64::NAN, |c| c.simulated)
}

/// The qualitative statements that must hold whatever the residuals.
pub fn qualitative_claims(checks: &[AnchorCheck]) -> Vec<Claim> {
    let strong = value_of(checks, "baseline_strong_ideal_devices");
    let weak = value_of(checks, "baseline_weak_ideal_devices");
    let best = value_of(checks, "optimized_best_case");
    let realistic = value_of(checks, "optimized_realistic_switches");
    vec![
        Claim {
            name: "strong coupling far above weak coupling",
            holds: strong > 2.0 * weak,
            detail: format!("{strong:.4} vs {weak:.4}"),
        },
        Claim {
            name: "optimized best case close to F_UC",
            holds: best <= F_UC && F_UC - best <= 0.1,
            detail: format!("{best:.4} vs F_UC = {F_UC:.4}"),
        },
        Claim {
            name: "realistic switches collapse the optimized fidelity",
            holds: realistic < 0.5 * best,
            detail: format!("{realistic:.4} vs best case {best:.4}"),
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub ensemble: EnsembleKind,
    pub convention: BranchConvention,
    pub strong: f64,
    pub weak: f64,
    pub meets: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
    /// First row meeting both zero-error anchors.
    pub chosen: Option<(EnsembleKind, BranchConvention)>,
}

/// Evaluate the zero-error strong and weak anchors for every ensemble and
/// branch convention.
pub fn calibrate() -> Result<CalibrationTable> {
    let specs = anchor_specs();
    let strong = &specs[0];
    let weak = &specs[1];
    let ideal = DeviceErrorConfig::ideal();
    let cs = cavity_coeffs(&strong.cavity)?;
    let cw = cavity_coeffs(&weak.cavity)?;
    let mut rows = Vec::new();
    for kind in candidate_ensembles() {
        let ens = InputEnsemble::new(kind)?;
        let rs = average_fidelity_with_coeffs(Circuit::Baseline, &cs, &ideal, &ens)?;
        let rw = average_fidelity_with_coeffs(Circuit::Baseline, &cw, &ideal, &ens)?;
        for convention in [
            BranchConvention::Heralded,
            BranchConvention::Unrenormalized,
            BranchConvention::Renormalized,
        ] {
            let (s, w) = (rs.best_branch(convention), rw.best_branch(convention));
            rows.push(CalibrationRow {
                ensemble: kind,
                convention,
                strong: s,
                weak: w,
                meets: within(strong, s) && within(weak, w),
            });
        }
    }
    let chosen = rows
        .iter()
        .find(|r| r.meets)
        .map(|r| (r.ensemble, r.convention));
    Ok(CalibrationTable { rows, chosen })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eta1Discrepancy {
    pub inputs: CnotInputs,
    pub closed_form: num_complex::Complex64,
    pub as_printed: num_complex::Complex64,
    pub compositional: num_complex::Complex64,
}

/// `eta_1` three ways at strong coupling with every error at `1e-2`.
pub fn eta1_discrepancy() -> Result<Eta1Discrepancy> {
    let inputs = CnotInputs::real(0.6, 0.8, 0.28, 0.96)?;
    let coeffs = cavity_coeffs(&CavityParams::strong_coupling())?;
    let err = uniform(1e-2);
    let out = Circuit::Baseline.run(&inputs, &coeffs, &err)?;
    Ok(Eta1Discrepancy {
        inputs,
        closed_form: eta1_closed_form(&inputs, &coeffs, &err),
        as_printed: eta1_as_printed(&inputs, &coeffs, &err),
        compositional: crate::circuits::compositional_eta(&out)[0],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproduceReport {
    pub target: Target,
    pub anchors: Vec<AnchorCheck>,
    pub claims: Vec<Claim>,
    pub calibration: Option<CalibrationTable>,
    pub eta1: Option<Eta1Discrepancy>,
    pub notes: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl ReproduceReport {
    /// No anchor failed and every qualitative claim holds.
    pub fn passed(&self) -> bool {
        self.anchors.iter().all(|a| a.status != AnchorStatus::Fail)
            && self.claims.iter().all(|c| c.holds)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target: {}", self.target.name());
        let _ = writeln!(
            s,
            "calibration ensemble: {CALIBRATION_ENSEMBLE}, branch convention: heralded"
        );
        if !self.anchors.is_empty() {
            let _ = writeln!(s, "\nanchors (percent):");
            for a in &self.anchors {
                let _ = writeln!(
                    s,
                    "  {:<32} reference {:>6.2}  sim {:>7.3}  residual {:>+6.2} pp  tol {:.1}  {}",
                    a.spec.name,
                    a.spec.reference * 100.0,
                    a.simulated * 100.0,
                    a.residual_pp(),
                    a.spec.tolerance_pp,
                    a.status.label()
                );
                if let Some((k, v)) = a.best_alternative {
                    let _ = writeln!(
                        s,
                        "  {:<32} closest ensemble {k}: {:.3} (residual {:+.2} pp)",
                        "",
                        v * 100.0,
                        (v - a.spec.reference) * 100.0
                    );
                }
            }
        }
        if !self.claims.is_empty() {
            let _ = writeln!(s, "\nqualitative claims:");
            for c in &self.claims {
                let _ = writeln!(
                    s,
                    "  {:<52} {}  ({})",
                    c.name,
                    if c.holds { "holds" } else { "VIOLATED" },
                    c.detail
                );
            }
        }
        if let Some(t) = &self.calibration {
            let _ = writeln!(s, "\ncalibration (best branch, percent; strong / weak):");
            for r in &t.rows {
                let _ = writeln!(
                    s,
                    "  {:<32} {:<15} {:>7.3} / {:>7.3}  {}",
                    r.ensemble.to_string(),
                    r.convention.name(),
                    r.strong * 100.0,
                    r.weak * 100.0,
                    if r.meets { "meets" } else { "-" }
                );
            }
            match t.chosen {
                Some((k, c)) => {
                    let _ = writeln!(s, "  chosen: {k}, {}", c.name());
                }
                None => {
                    let _ = writeln!(s, "  chosen: none meets both anchors");
                }
            }
        }
        if let Some(e) = &self.eta1 {
            let _ = writeln!(
                s,
                "\neta_1 at strong coupling, all errors 1e-2, inputs (0.6, 0.8, 0.28, 0.96):"
            );
            let _ = writeln!(s, "  compositional     {:.12}", e.compositional);
            let _ = writeln!(s, "  closed form       {:.12}", e.closed_form);
            let _ = writeln!(
                s,
                "  as printed        {:.12}  (differs by {:.3e})",
                e.as_printed,
                (e.as_printed - e.closed_form).norm()
            );
            let _ = writeln!(
                s,
                "  the printed a2', a2'' use tau_L instead of sqrt(tau_L), and a2'', a4'' use (r1 + r0) instead of (r1 - r0)"
            );
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\nnotes:");
            for n in &self.notes {
                let _ = writeln!(s, "  {n}");
            }
        }
        let _ = writeln!(
            s,
            "\nresult: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

fn anchors_named(names: &[&str]) -> Result<Vec<AnchorCheck>> {
    anchor_specs()
        .iter()
        .filter(|s| names.contains(&s.name))
        .map(check_anchor)
        .collect()
}

fn grid_note(
    table: &SweepTable,
    spec: &AnchorSpec,
    check: &AnchorCheck,
    x1: f64,
    x2: f64,
    value: fn(&crate::sweep::SweepRow) -> f64,
) -> String {
    match table.nearest(x1, x2) {
        Some(r) => format!(
            "{}: grid point ({}, {}) gives {} (direct evaluation {})",
            spec.name,
            format_sig10(r.x1),
            format_sig10(r.x2),
            format_sig10(value(r)),
            format_sig10(check.simulated)
        ),
        None => format!("{}: grid is empty", spec.name),
    }
}

fn best_branch_row(r: &crate::sweep::SweepRow) -> f64 {
    r.f_up.max(r.f_down)
}

fn both_row(r: &crate::sweep::SweepRow) -> f64 {
    r.f_both
}

/// Canonical config for a figure target.
pub fn target_config(target: Target) -> SimConfig {
    match target {
        Target::Fig3a | Target::Fig3b | Target::TableAnchors => SimConfig {
            errors: uniform(1e-2),
            grid: SweepGrid::coupling(),
            ..SimConfig::default()
        },
        Target::Fig4a => SimConfig {
            grid: SweepGrid::coupling(),
            ..strong_coupling_realistic()
        },
        Target::Fig4b => SimConfig {
            circuit: Circuit::Optimized,
            errors: DeviceErrorConfig::ideal().with_cloner(ClonerConfig::universal_optimal()),
            grid: SweepGrid::err_psw(),
            ..SimConfig::default()
        },
    }
}

fn write_table_csv(checks: &[AnchorCheck], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record([
        "anchor",
        "reference",
        "tolerance_pp",
        "simulated",
        "residual_pp",
        "ensemble",
        "status",
    ])?;
    for c in checks {
        w.write_record([
            c.spec.name.to_string(),
            format_sig10(c.spec.reference),
            format_sig10(c.spec.tolerance_pp),
            format_sig10(c.simulated),
            format_sig10(c.residual_pp()),
            c.ensemble.to_string(),
            c.status.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Run `target`, writing `<target>.csv`, `<target>.cfg` and
/// `<target>_summary.txt` into `out_dir`.
pub fn reproduce(target: Target, out_dir: &Path, execution: Execution) -> Result<ReproduceReport> {
    std::fs::create_dir_all(out_dir)?;
    let mut cfg = target_config(target);
    cfg.execution = execution;
    let csv_path = out_dir.join(format!("{}.csv", target.name()));
    let mut report = ReproduceReport {
        target,
        anchors: Vec::new(),
        claims: Vec::new(),
        calibration: None,
        eta1: None,
        notes: Vec::new(),
        files: Vec::new(),
    };
    match target {
        Target::Fig3a | Target::Fig3b => {
            let table = sweep_coupling(&cfg)?;
            write_csv(&table, &csv_path)?;
            report.anchors = anchors_named(&[
                "baseline_strong_ideal_devices",
                "baseline_weak_ideal_devices",
                "baseline_strong_errors_1e-2",
                "baseline_weak_errors_1e-2",
            ])?;
            for (i, (x1, x2)) in [(0.05, 2.5), (1.0, 0.45)].into_iter().enumerate() {
                let a = &report.anchors[2 + i];
                report
                    .notes
                    .push(grid_note(&table, &a.spec, a, x1, x2, best_branch_row));
            }
            let branch = if target == Target::Fig3a {
                "f_up"
            } else {
                "f_down"
            };
            report.notes.push(format!(
                "surface column for this panel: {branch}; errors fixed at 1e-2"
            ));
        }
        Target::Fig4a => {
            let table = sweep_coupling(&cfg)?;
            write_csv(&table, &csv_path)?;
            report.anchors = anchors_named(&["optimized_realistic_switches"])?;
            let a = &report.anchors[0];
            report
                .notes
                .push(grid_note(&table, &a.spec, a, 0.05, 2.5, both_row));
            if let Some(r) = table
                .rows
                .iter()
                .filter(|r| r.is_ok())
                .max_by(|a, b| a.f_both.total_cmp(&b.f_both))
            {
                report.notes.push(format!(
                    "grid maximum f_both = {} at kappa_s/kappa = {}, g/kappa = {}",
                    format_sig10(r.f_both),
                    format_sig10(r.x1),
                    format_sig10(r.x2)
                ));
            }
        }
        Target::Fig4b => {
            let table = sweep_err_psw(&cfg)?;
            write_csv(&table, &csv_path)?;
            report.anchors = anchors_named(&["optimized_best_case"])?;
            let a = &report.anchors[0];
            report
                .notes
                .push(grid_note(&table, &a.spec, a, 1e-4, 1.0, both_row));
        }
        Target::TableAnchors => {
            report.anchors = anchor_specs()
                .iter()
                .map(check_anchor)
                .collect::<Result<_>>()?;
            report.claims = qualitative_claims(&report.anchors);
            report.calibration = Some(calibrate()?);
            report.eta1 = Some(eta1_discrepancy()?);
            write_table_csv(&report.anchors, &csv_path)?;
        }
    }
    report.files.push(csv_path);
    let cfg_path = out_dir.join(format!("{}.cfg", target.name()));
    cfg.save(&cfg_path)?;
    report.files.push(cfg_path);
    let summary_path = out_dir.join(format!("{}_summary.txt", target.name()));
    std::fs::write(&summary_path, report.summary())?;
    report.files.push(summary_path);
    Ok(report)
}
