//! Input ensembles, per-input fidelity and ensemble averages.
//!
//! Branch fidelities compare the unrenormalized spin branch of the output
//! with `CNOT|psi> (x) |s>`. Three normalizations are reported:
//!
//! * `unrenormalized`: the raw overlap, at most the branch weight;
//! * `heralded`: the raw overlap divided by the branch weight an ideal
//!   device would produce for the same input (1/2 here), so a perfect gate
//!   scores 1 and lost amplitude still counts against the gate;
//! * `renormalized`: the overlap of the normalized branch, which ignores
//!   losses entirely.
//!
//! The `Both` mode compares the full output, weight included, with the
//! output of the ideal optimized circuit.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cavity::{cavity_coeffs, CavityCoeffs, CavityParams};
use crate::circuits::{Circuit, CnotInputs, DeviceErrorConfig};
use crate::error::{Error, Result};
use crate::state::{Amplitude, BasisLabel, JointState, Pol, Spin};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// `|RR>, |RL>, |LR>, |LL>`.
    Basis4,
    /// Products of `(|R> +- |L>)/sqrt2` on both photons.
    Superposition4,
    /// Haar-random product inputs.
    HaarProduct { n: usize, seed: u64 },
}

/// The ensemble against which the anchor fidelities are calibrated.
pub const CALIBRATION_ENSEMBLE: EnsembleKind = EnsembleKind::Basis4;

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnsembleKind::Basis4 => write!(f, "basis4"),
            EnsembleKind::Superposition4 => write!(f, "superposition4"),
            EnsembleKind::HaarProduct { n, seed } => write!(f, "haar_product(n={n}, seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputEnsemble {
    kind: EnsembleKind,
    states: Vec<CnotInputs>,
}

fn c(x: f64) -> Amplitude {
    Amplitude::new(x, 0.0)
}

/// Uniformly random qubit: normalized pair of complex Gaussians.
fn haar_qubit(rng: &mut ChaCha8Rng) -> (Amplitude, Amplitude) {
    loop {
        let mut draw = || {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        };
        let (a, b) = (draw(), draw());
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-12 {
            return (a / n, b / n);
        }
    }
}

impl InputEnsemble {
    pub fn new(kind: EnsembleKind) -> Result<InputEnsemble> {
        let states = match kind {
            EnsembleKind::Basis4 => [
                (Pol::R, Pol::R),
                (Pol::R, Pol::L),
                (Pol::L, Pol::R),
                (Pol::L, Pol::L),
            ]
            .into_iter()
            .map(|(a, b)| CnotInputs::basis(a, b))
            .collect(),
            EnsembleKind::Superposition4 => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut v = Vec::new();
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        v.push(CnotInputs::new(c(h), c(s1 * h), c(h), c(s2 * h))?);
                    }
                }
                v
            }
            EnsembleKind::HaarProduct { n, seed } => {
                if n == 0 {
                    return Err(Error::EmptyEnsemble);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let (a, b) = haar_qubit(&mut rng);
                    let (d, g) = haar_qubit(&mut rng);
                    v.push(CnotInputs::new(a, b, d, g)?);
                }
                v
            }
        };
        Ok(InputEnsemble { kind, states })
    }

    pub fn basis4() -> InputEnsemble {
        InputEnsemble::new(EnsembleKind::Basis4).expect("basis inputs are normalized")
    }

    pub fn superposition4() -> InputEnsemble {
        InputEnsemble::new(EnsembleKind::Superposition4)
            .expect("superposition inputs are normalized")
    }

    pub fn haar_product(n: usize, seed: u64) -> Result<InputEnsemble> {
        InputEnsemble::new(EnsembleKind::HaarProduct { n, seed })
    }

    pub fn calibration() -> InputEnsemble {
        InputEnsemble::new(CALIBRATION_ENSEMBLE).expect("calibration ensemble is valid")
    }

    /// Explicit inputs; `kind` is only a label for reports.
    pub fn from_states(kind: EnsembleKind, states: Vec<CnotInputs>) -> Result<InputEnsemble> {
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(InputEnsemble { kind, states })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn states(&self) -> &[CnotInputs] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMode {
    BranchUp,
    BranchDown,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchConvention {
    Unrenormalized,
    #[default]
    Heralded,
    Renormalized,
}

impl BranchConvention {
    pub fn name(self) -> &'static str {
        match self {
            BranchConvention::Unrenormalized => "unrenormalized",
            BranchConvention::Heralded => "heralded",
            BranchConvention::Renormalized => "renormalized",
        }
    }
}

impl std::str::FromStr for BranchConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unrenormalized" => Ok(BranchConvention::Unrenormalized),
            "heralded" => Ok(BranchConvention::Heralded),
            "renormalized" => Ok(BranchConvention::Renormalized),
            other => Err(format!(
                "unknown branch convention `{other}` (expected unrenormalized, heralded or renormalized)"
            )),
        }
    }
}

/// `CNOT|psi> (x) spin` on the circuit factors (photons, empty clone, spin).
pub fn cnot_target(inputs: &CnotInputs, spin: (Amplitude, Amplitude)) -> Result<JointState> {
    let mut rows = Vec::with_capacity(8);
    for ((p1, p2), a) in inputs.cnot_amplitudes() {
        rows.push((BasisLabel::circuit(p1, p2, Spin::Up), a * spin.0));
        rows.push((BasisLabel::circuit(p1, p2, Spin::Down), a * spin.1));
    }
    let s = JointState::new(rows)?;
    if s.is_empty() {
        return Err(Error::EmptyState);
    }
    Ok(s)
}

fn branch_ket(s: Spin) -> (Amplitude, Amplitude) {
    match s {
        Spin::Up => (c(1.0), c(0.0)),
        Spin::Down => (c(0.0), c(1.0)),
    }
}

/// Spin state left behind by the ideal optimized circuit for this spin
/// preparation, read off the `|RR>` input.
pub fn ideal_spin_ket(inputs: &CnotInputs) -> Result<(Amplitude, Amplitude)> {
    let probe =
        CnotInputs::basis(Pol::R, Pol::R).with_spin_init(inputs.spin_init.0, inputs.spin_init.1)?;
    let out = Circuit::Optimized.run(&probe, &CavityCoeffs::IDEAL, &DeviceErrorConfig::ideal())?;
    let up = out.amplitude(&BasisLabel::circuit(Pol::R, Pol::R, Spin::Up));
    let down = out.amplitude(&BasisLabel::circuit(Pol::R, Pol::R, Spin::Down));
    let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
    if n == 0.0 {
        return Err(Error::EmptyState);
    }
    Ok((up / n, down / n))
}

/// Raw fidelity of one output: `|<CNOT psi (x) s | out_s>|^2` for a branch,
/// or `|<ideal | out>|^2` for `Both`. Global weights are included.
pub fn fidelity_single(out: &JointState, inputs: &CnotInputs, mode: FidelityMode) -> Result<f64> {
    let (state, ket) = match mode {
        FidelityMode::BranchUp => (out.project_spin(Spin::Up)?.0, branch_ket(Spin::Up)),
        FidelityMode::BranchDown => (out.project_spin(Spin::Down)?.0, branch_ket(Spin::Down)),
        FidelityMode::Both => {
            out.project_spin(Spin::Up)?;
            (out.clone(), ideal_spin_ket(inputs)?)
        }
    };
    Ok(cnot_target(inputs, ket)?.inner_product(&state)?.norm_sqr())
}

/// Weighted squared norm of the output, or of one spin branch.
pub fn success_probability(out: &JointState, branch: Option<Spin>) -> Result<f64> {
    match branch {
        Some(s) => Ok(out.project_spin(s)?.1),
        None => Ok(out.weighted_norm_sqr()),
    }
}

/// Per-input quantities; averaged into a [`FidelityReport`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Sample {
    raw: [f64; 2],
    both: f64,
    success: [f64; 2],
    ideal_success: [f64; 2],
}

impl Sample {
    fn add(&mut self, o: &Sample) {
        for i in 0..2 {
            self.raw[i] += o.raw[i];
            self.success[i] += o.success[i];
            self.ideal_success[i] += o.ideal_success[i];
        }
        self.both += o.both;
    }
}

fn sample(
    circuit: Circuit,
    inputs: &CnotInputs,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
) -> Result<Sample> {
    let out = circuit.run(inputs, coeffs, err)?;
    let ideal = circuit.run(inputs, &CavityCoeffs::IDEAL, &DeviceErrorConfig::ideal())?;
    let mut s = Sample::default();
    for (i, (branch, mode)) in [
        (Spin::Up, FidelityMode::BranchUp),
        (Spin::Down, FidelityMode::BranchDown),
    ]
    .into_iter()
    .enumerate()
    {
        s.raw[i] = fidelity_single(&out, inputs, mode)?;
        s.success[i] = success_probability(&out, Some(branch))?;
        s.ideal_success[i] = success_probability(&ideal, Some(branch))?;
    }
    s.both = fidelity_single(&out, inputs, FidelityMode::Both)?;
    Ok(s)
}

/// Ensemble averages for one circuit and parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub circuit: Circuit,
    pub ensemble: EnsembleKind,
    pub samples: usize,
    /// Raw branch fidelities `[up, down]`.
    pub unrenormalized: [f64; 2],
    pub heralded: [f64; 2],
    pub renormalized: [f64; 2],
    /// Raw fidelity of the whole output, both spin branches kept.
    pub both: f64,
    /// Mean branch weights `[up, down]`.
    pub success: [f64; 2],
    pub ideal_success: [f64; 2],
}

fn idx(s: Spin) -> usize {
    match s {
        Spin::Up => 0,
        Spin::Down => 1,
    }
}

impl FidelityReport {
    pub fn branch(&self, spin: Spin, convention: BranchConvention) -> f64 {
        let i = idx(spin);
        match convention {
            BranchConvention::Unrenormalized => self.unrenormalized[i],
            BranchConvention::Heralded => self.heralded[i],
            BranchConvention::Renormalized => self.renormalized[i],
        }
    }

    /// Larger of the two branch fidelities.
    pub fn best_branch(&self, convention: BranchConvention) -> f64 {
        self.branch(Spin::Up, convention)
            .max(self.branch(Spin::Down, convention))
    }

    pub fn total_success(&self) -> f64 {
        self.success[0] + self.success[1]
    }

    /// The figure of merit for `mode`: a branch under `convention`, or the
    /// full-output fidelity.
    pub fn value(&self, mode: FidelityMode, convention: BranchConvention) -> f64 {
        match mode {
            FidelityMode::BranchUp => self.branch(Spin::Up, convention),
            FidelityMode::BranchDown => self.branch(Spin::Down, convention),
            FidelityMode::Both => self.both,
        }
    }
}

impl std::fmt::Display for FidelityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "circuit            {}", self.circuit.name())?;
        writeln!(
            f,
            "ensemble           {} ({} inputs)",
            self.ensemble, self.samples
        )?;
        writeln!(f, "fidelity (both)    {:.6}", self.both)?;
        for (name, v) in [
            ("heralded", self.heralded),
            ("unrenormalized", self.unrenormalized),
            ("renormalized", self.renormalized),
        ] {
            writeln!(f, "{:<18} up {:.6}  down {:.6}", name, v[0], v[1])?;
        }
        writeln!(
            f,
            "success            up {:.6}  down {:.6}  total {:.6}",
            self.success[0],
            self.success[1],
            self.total_success()
        )
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Average over the ensemble. Inputs are evaluated in parallel and summed in
/// ensemble order, so the result does not depend on the thread count.
pub fn average_fidelity_with_coeffs(
    circuit: Circuit,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
    ensemble: &InputEnsemble,
) -> Result<FidelityReport> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let samples: Vec<Sample> = if ensemble.len() > 16 {
        ensemble
            .states()
            .par_iter()
            .map(|i| sample(circuit, i, coeffs, err))
            .collect::<Result<_>>()?
    } else {
        ensemble
            .states()
            .iter()
            .map(|i| sample(circuit, i, coeffs, err))
            .collect::<Result<_>>()?
    };
    let n = samples.len() as f64;
    let mut sum = Sample::default();
    let mut herald = [0.0; 2];
    let mut renorm = [0.0; 2];
    for s in &samples {
        sum.add(s);
        for i in 0..2 {
            herald[i] += ratio(s.raw[i], s.ideal_success[i]);
            renorm[i] += ratio(s.raw[i], s.success[i]);
        }
    }
    let mean = |v: [f64; 2]| [v[0] / n, v[1] / n];
    Ok(FidelityReport {
        circuit,
        ensemble: ensemble.kind(),
        samples: samples.len(),
        unrenormalized: mean(sum.raw),
        heralded: mean(herald),
        renormalized: mean(renorm),
        both: sum.both / n,
        success: mean(sum.success),
        ideal_success: mean(sum.ideal_success),
    })
}

pub fn average_fidelity(
    circuit: Circuit,
    cav: &CavityParams,
    err: &DeviceErrorConfig,
    ensemble: &InputEnsemble,
) -> Result<FidelityReport> {
    average_fidelity_with_coeffs(circuit, &cavity_coeffs(cav)?, err, ensemble)
}
