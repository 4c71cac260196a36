//! Python bindings for the `qdcnot` simulator.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use qdcnot::config::Execution;
use qdcnot::{BranchConvention, Circuit, EnsembleKind, InputEnsemble, Pol, Spin};

fn err(e: qdcnot::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn pol_name(p: Pol) -> &'static str {
    match p {
        Pol::R => "R",
        Pol::L => "L",
        Pol::H => "H",
        Pol::V => "V",
    }
}

fn spin_name(s: Spin) -> &'static str {
    match s {
        Spin::Up => "up",
        Spin::Down => "down",
    }
}

#[pyclass(name = "CavityParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCavityParams(qdcnot::CavityParams);

#[pymethods]
impl PyCavityParams {
    /// Rates `g`, `kappa`, `kappa_s`, `gamma`.
    #[new]
    fn new(g: f64, kappa: f64, kappa_s: f64, gamma: f64) -> PyResult<Self> {
        qdcnot::CavityParams::new(g, kappa, kappa_s, gamma)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (g_over_kappa, kappa_s_over_kappa, gamma_over_kappa = 0.1))]
    fn from_ratios(
        g_over_kappa: f64,
        kappa_s_over_kappa: f64,
        gamma_over_kappa: f64,
    ) -> PyResult<Self> {
        qdcnot::CavityParams::from_ratios(g_over_kappa, kappa_s_over_kappa, gamma_over_kappa)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn strong_coupling() -> Self {
        Self(qdcnot::CavityParams::strong_coupling())
    }

    #[staticmethod]
    fn weak_coupling() -> Self {
        Self(qdcnot::CavityParams::weak_coupling())
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn kappa_s(&self) -> f64 {
        self.0.kappa_s
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    fn is_strong_coupling(&self) -> bool {
        qdcnot::is_strong_coupling(&self.0)
    }

    /// `(t1, r1, t0, r0)` at resonance.
    fn coeffs(&self) -> PyResult<(f64, f64, f64, f64)> {
        let k = qdcnot::cavity_coeffs(&self.0).map_err(err)?;
        Ok((k.t1, k.r1, k.t0, k.r0))
    }

    fn __repr__(&self) -> String {
        format!(
            "CavityParams(g={}, kappa={}, kappa_s={}, gamma={})",
            self.0.g, self.0.kappa, self.0.kappa_s, self.0.gamma
        )
    }
}

#[pyclass(name = "DeviceErrors", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDeviceErrors(qdcnot::DeviceErrorConfig);

fn switch(c: (f64, f64, f64, f64)) -> PyResult<qdcnot::SwitchCoeffs> {
    qdcnot::SwitchCoeffs::new(c.0, c.1, c.2, c.3).map_err(err)
}

#[pymethods]
impl PyDeviceErrors {
    /// `cpbs` holds four `(tau_r, tau_l)` pairs; switches are
    /// `(t12, t21, r11, r22)`.
    #[new]
    #[pyo3(signature = (
        xi1 = 0.0,
        xi2 = 0.0,
        cpbs = [(0.0, 0.0); 4],
        sw1 = (1.0, 1.0, 1.0, 1.0),
        sw2 = (1.0, 1.0, 1.0, 1.0),
        cloner_fidelity = 1.0
    ))]
    fn new(
        xi1: f64,
        xi2: f64,
        cpbs: [(f64, f64); 4],
        sw1: (f64, f64, f64, f64),
        sw2: (f64, f64, f64, f64),
        cloner_fidelity: f64,
    ) -> PyResult<Self> {
        let mut pairs = [qdcnot::CpbsError::IDEAL; 4];
        for (slot, (r, l)) in pairs.iter_mut().zip(cpbs) {
            *slot = qdcnot::CpbsError::new(r, l).map_err(err)?;
        }
        Ok(Self(qdcnot::DeviceErrorConfig {
            xi1: qdcnot::HwpError::new(xi1).map_err(err)?,
            xi2: qdcnot::HwpError::new(xi2).map_err(err)?,
            cpbs: pairs,
            sw1: switch(sw1)?,
            sw2: switch(sw2)?,
            cloner: qdcnot::ClonerConfig::new(cloner_fidelity).map_err(err)?,
        }))
    }

    /// Every HWP and CPBS error set to `err`.
    #[staticmethod]
    fn uniform(e: f64) -> PyResult<Self> {
        qdcnot::DeviceErrorConfig::uniform(e).map(Self).map_err(err)
    }

    #[staticmethod]
    fn ideal() -> Self {
        Self(qdcnot::DeviceErrorConfig::ideal())
    }

    fn with_switches(
        &self,
        sw1: (f64, f64, f64, f64),
        sw2: (f64, f64, f64, f64),
    ) -> PyResult<Self> {
        Ok(Self(self.0.with_switches(switch(sw1)?, switch(sw2)?)))
    }

    fn with_cloner(&self, fidelity: f64) -> PyResult<Self> {
        Ok(Self(self.0.with_cloner(
            qdcnot::ClonerConfig::new(fidelity).map_err(err)?,
        )))
    }

    fn prefactor(&self) -> f64 {
        self.0.prefactor()
    }

    fn theta(&self) -> f64 {
        self.0.theta()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "CnotInputs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCnotInputs(qdcnot::CnotInputs);

#[pymethods]
impl PyCnotInputs {
    /// Control `alpha R + beta L`, target `delta R + gamma L`.
    #[new]
    fn new(
        alpha: Complex64,
        beta: Complex64,
        delta: Complex64,
        gamma: Complex64,
    ) -> PyResult<Self> {
        qdcnot::CnotInputs::new(alpha, beta, delta, gamma)
            .map(Self)
            .map_err(err)
    }

    /// Basis input from polarization letters, e.g. `basis("L", "R")`.
    #[staticmethod]
    fn basis(control: &str, target: &str) -> PyResult<Self> {
        let p = |s: &str| match s {
            "R" => Ok(Pol::R),
            "L" => Ok(Pol::L),
            _ => Err(PyValueError::new_err(format!(
                "polarization must be R or L, got {s:?}"
            ))),
        };
        Ok(Self(qdcnot::CnotInputs::basis(p(control)?, p(target)?)))
    }

    /// Ideal CNOT amplitudes keyed by `(control, target)`.
    fn cnot_amplitudes(&self) -> BTreeMap<(String, String), Complex64> {
        self.0
            .cnot_amplitudes()
            .into_iter()
            .map(|((a, b), v)| ((pol_name(a).into(), pol_name(b).into()), v))
            .collect()
    }
}

type Amplitudes = BTreeMap<(String, String, String), Complex64>;

fn parse_circuit(name: &str) -> PyResult<Circuit> {
    name.parse().map_err(PyValueError::new_err)
}

/// Output of a circuit run: amplitudes keyed by `(photon1, photon2, spin)`
/// and the global success weight.
#[pyfunction]
fn run_circuit(
    circuit: &str,
    inputs: &PyCnotInputs,
    cavity: &PyCavityParams,
    errors: &PyDeviceErrors,
) -> PyResult<(Amplitudes, f64)> {
    let c = parse_circuit(circuit)?;
    let coeffs = qdcnot::cavity_coeffs(&cavity.0).map_err(err)?;
    let out = c.run(&inputs.0, &coeffs, &errors.0).map_err(err)?;
    let mut amps = BTreeMap::new();
    for (l, a) in out.entries() {
        let (Some(p1), Some(p2), Some(s)) = (l.photon1, l.photon2, l.spin) else {
            continue;
        };
        amps.insert(
            (
                pol_name(p1.pol).into(),
                pol_name(p2.pol).into(),
                spin_name(s).into(),
            ),
            *a,
        );
    }
    Ok((amps, out.global_weight()))
}

/// Ensemble-averaged fidelity. `ensemble` is `basis4`, `superposition4` or
/// `haar_product` (uses `n` and `seed`).
#[pyfunction]
#[pyo3(signature = (circuit, cavity, errors, ensemble = "basis4", n = 1000, seed = 0, convention = "heralded"))]
fn average_fidelity(
    circuit: &str,
    cavity: &PyCavityParams,
    errors: &PyDeviceErrors,
    ensemble: &str,
    n: usize,
    seed: u64,
    convention: &str,
) -> PyResult<BTreeMap<&'static str, f64>> {
    let kind = match ensemble {
        "basis4" | "calibration" => EnsembleKind::Basis4,
        "superposition4" => EnsembleKind::Superposition4,
        "haar_product" => EnsembleKind::HaarProduct { n, seed },
        other => return Err(PyValueError::new_err(format!("unknown ensemble {other:?}"))),
    };
    let conv: BranchConvention = convention.parse().map_err(PyValueError::new_err)?;
    let ens = InputEnsemble::new(kind).map_err(err)?;
    let r = qdcnot::average_fidelity(parse_circuit(circuit)?, &cavity.0, &errors.0, &ens)
        .map_err(err)?;
    let [up, down] = [Spin::Up, Spin::Down].map(|s| r.branch(s, conv));
    Ok(BTreeMap::from([
        ("up", up),
        ("down", down),
        ("both", r.both),
        ("success_up", r.success[0]),
        ("success_down", r.success[1]),
        ("success_total", r.total_success()),
    ]))
}

/// `(t1, r1, t0, r0)` for rates in units of kappa.
#[pyfunction]
#[pyo3(signature = (g, ks, gamma = 0.1))]
fn cavity_coeffs(g: f64, ks: f64, gamma: f64) -> PyResult<(f64, f64, f64, f64)> {
    PyCavityParams::from_ratios(g, ks, gamma)?.coeffs()
}

/// Simulate a config file; returns the printed report.
#[pyfunction]
fn simulate(config: PathBuf) -> PyResult<String> {
    let cfg = qdcnot::load_config(&config).map_err(err)?;
    let r = qdcnot::average_fidelity(
        cfg.circuit,
        &cfg.cavity().map_err(err)?,
        &cfg.errors,
        &cfg.input_ensemble().map_err(err)?,
    )
    .map_err(err)?;
    Ok(r.to_string())
}

/// Sweep a config file's grid into `out` (CSV). Returns the row count.
#[pyfunction]
fn sweep(config: PathBuf, out: PathBuf) -> PyResult<usize> {
    let cfg = qdcnot::load_config(&config).map_err(err)?;
    let table = qdcnot::run_sweep(&cfg).map_err(err)?;
    qdcnot::write_csv(&table, &out).map_err(err)?;
    Ok(table.rows.len())
}

/// Run a reproduction target. Returns `(passed, summary, files)`.
#[pyfunction]
#[pyo3(signature = (target, out_dir, serial = false))]
fn reproduce(
    target: &str,
    out_dir: PathBuf,
    serial: bool,
) -> PyResult<(bool, String, Vec<PathBuf>)> {
    let t: qdcnot::Target = target.parse().map_err(err)?;
    let exec = if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let r = qdcnot::reproduce(t, &out_dir, exec).map_err(err)?;
    Ok((r.passed(), r.summary(), r.files))
}

#[pymodule]
fn pyqdcnot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCavityParams>()?;
    m.add_class::<PyDeviceErrors>()?;
    m.add_class::<PyCnotInputs>()?;
    m.add_function(wrap_pyfunction!(run_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(average_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(cavity_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add("F_UC", qdcnot::F_UC)?;
    Ok(())
}
