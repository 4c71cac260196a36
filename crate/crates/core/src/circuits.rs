//! The baseline spin-heralded CNOT and the cloner-assisted CNOT.
//!
//! # Wiring
//!
//! Both photons reach the cavity through the same beam splitter, CPBS1, which
//! closes a loop around the two cavity sides. The transmitted port feeds the
//! top side (photon moving down), the reflected port feeds the bottom side
//! (photon moving up). On the way back the photon hits CPBS1 again and the
//! output port collects
//!
//! * photons returning upward through the transmitted arm with the reflect
//!   amplitudes (`L`: `sqrt(1 - tau_L)`, `R`: `sqrt(tau_R)`), and
//! * photons returning downward through the reflected arm with the transmit
//!   amplitudes (`R`: `sqrt(1 - tau_R)`, `L`: `sqrt(tau_L)`).
//!
//! Whatever CPBS1 sends back towards the source is lost, so the loop is
//! lossy whenever `tau != 0`.
//!
//! Baseline order: HWP1 -> CPBS1 loop (photon 1) -> HWP2, spin Hadamard,
//! CPBS1 loop (photon 2), spin Hadamard. With an ideal cavity and ideal
//! devices the output is
//!
//! ```text
//! [(ad RR + ag RL - bd LL - bg LR) |up> + (ad RR + ag RL + bd LL + bg LR) |down>] / sqrt2
//! ```
//!
//! The optimized circuit first clones photon 1 into the clone mode, runs the
//! same two photons through the switches and the baseline pipeline, then
//! sends the clone through QWP1, the cavity (which writes the spin onto its
//! polarization), CPBS4 and HWP3. A clone surviving CPBS4 is only present on
//! the spin-up branch and triggers a sign flip on `|L1>` through CPBS2 and
//! CPBS3. The amplitude of that conditional flip is
//! `theta = -sqrt((1 - tau_L2)(1 - tau_L3)(1 - tau_R4))`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::cavity::{cavity_coeffs, qd_interaction_map, CavityCoeffs, CavityParams};
use crate::devices::{
    clone_photon, hwp_map, qwp_basis_swap, spin_hadamard, switch_amplitude, ClonerConfig,
    CpbsError, HwpError, SwitchCoeffs, SwitchPath,
};
use crate::error::{Error, Result};
use crate::state::{
    empty_clone, photon_state, spin_state, Amplitude, BasisLabel, CloneSlot, Dir, Factor,
    FactorSet, JointState, ModeMap, Photon, Pol, Spin,
};

/// Input amplitudes `a|R1> + b|L1>`, `d|R2> + g|L2>` and the initial spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnotInputs {
    pub alpha: Amplitude,
    pub beta: Amplitude,
    pub delta: Amplitude,
    pub gamma: Amplitude,
    pub spin_init: (Amplitude, Amplitude),
}

/// `(|up> - |down>)/sqrt2`.
pub const DEFAULT_SPIN_INIT: (Amplitude, Amplitude) = (
    Amplitude::new(FRAC_1_SQRT_2, 0.0),
    Amplitude::new(-FRAC_1_SQRT_2, 0.0),
);

const NORM_TOL: f64 = 1e-9;

fn check_norm(a: Amplitude, b: Amplitude, what: &'static str) -> Result<()> {
    if (a.norm_sqr() + b.norm_sqr() - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(what));
    }
    Ok(())
}

impl CnotInputs {
    pub fn new(
        alpha: Amplitude,
        beta: Amplitude,
        delta: Amplitude,
        gamma: Amplitude,
    ) -> Result<CnotInputs> {
        check_norm(alpha, beta, "|alpha|^2 + |beta|^2 != 1")?;
        check_norm(delta, gamma, "|delta|^2 + |gamma|^2 != 1")?;
        Ok(CnotInputs {
            alpha,
            beta,
            delta,
            gamma,
            spin_init: DEFAULT_SPIN_INIT,
        })
    }

    pub fn real(alpha: f64, beta: f64, delta: f64, gamma: f64) -> Result<CnotInputs> {
        let c = |x| Amplitude::new(x, 0.0);
        CnotInputs::new(c(alpha), c(beta), c(delta), c(gamma))
    }

    /// Computational basis input `|p1 p2>`.
    pub fn basis(p1: Pol, p2: Pol) -> CnotInputs {
        let one = Amplitude::new(1.0, 0.0);
        let zero = Amplitude::default();
        let pick = |p| {
            if p == Pol::R {
                (one, zero)
            } else {
                (zero, one)
            }
        };
        let (alpha, beta) = pick(p1);
        let (delta, gamma) = pick(p2);
        CnotInputs {
            alpha,
            beta,
            delta,
            gamma,
            spin_init: DEFAULT_SPIN_INIT,
        }
    }

    pub fn with_spin_init(mut self, up: Amplitude, down: Amplitude) -> Result<CnotInputs> {
        check_norm(up, down, "spin amplitudes not normalized")?;
        self.spin_init = (up, down);
        Ok(self)
    }

    /// `photon1 (x) photon2 (x) empty clone mode (x) spin`.
    pub fn initial_state(&self) -> Result<JointState> {
        photon_state(Factor::Photon1, self.alpha, self.beta)?
            .tensor(&photon_state(Factor::Photon2, self.delta, self.gamma)?)?
            .tensor(&empty_clone())?
            .tensor(&spin_state(self.spin_init.0, self.spin_init.1)?)
    }

    /// Two-photon amplitudes after an ideal CNOT (control photon 1, `L`
    /// flips the target).
    pub fn cnot_amplitudes(&self) -> [((Pol, Pol), Amplitude); 4] {
        [
            ((Pol::R, Pol::R), self.alpha * self.delta),
            ((Pol::R, Pol::L), self.alpha * self.gamma),
            ((Pol::L, Pol::L), self.beta * self.delta),
            ((Pol::L, Pol::R), self.beta * self.gamma),
        ]
    }
}

/// Every imperfection of the optimized circuit. The baseline circuit reads
/// only `xi1`, `xi2` and `cpbs[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeviceErrorConfig {
    pub xi1: HwpError,
    pub xi2: HwpError,
    /// CPBS1..CPBS4.
    pub cpbs: [CpbsError; 4],
    pub sw1: SwitchCoeffs,
    pub sw2: SwitchCoeffs,
    pub cloner: ClonerConfig,
}

impl DeviceErrorConfig {
    pub fn ideal() -> DeviceErrorConfig {
        DeviceErrorConfig::default()
    }

    /// Every HWP and CPBS error set to `err`; switches and cloner ideal.
    pub fn uniform(err: f64) -> Result<DeviceErrorConfig> {
        let cpbs = CpbsError::new(err, err)?;
        Ok(DeviceErrorConfig {
            xi1: HwpError::new(err)?,
            xi2: HwpError::new(err)?,
            cpbs: [cpbs; 4],
            ..DeviceErrorConfig::default()
        })
    }

    pub fn with_switches(mut self, sw1: SwitchCoeffs, sw2: SwitchCoeffs) -> DeviceErrorConfig {
        self.sw1 = sw1;
        self.sw2 = sw2;
        self
    }

    pub fn with_cloner(mut self, cloner: ClonerConfig) -> DeviceErrorConfig {
        self.cloner = cloner;
        self
    }

    /// Success amplitude `sqrt(T1_12 R1_22 T2_12 R2_11 F_cloner)`.
    pub fn prefactor(&self) -> f64 {
        self.switch_legs().iter().product::<f64>() * self.cloner.success_amplitude()
    }

    fn switch_legs(&self) -> [f64; 4] {
        [
            switch_amplitude(&self.sw1, SwitchPath::I1ToO2),
            switch_amplitude(&self.sw1, SwitchPath::I2ToO2),
            switch_amplitude(&self.sw2, SwitchPath::I1ToO2),
            switch_amplitude(&self.sw2, SwitchPath::I1ToO1),
        ]
    }

    /// Amplitude of the conditional sign flip on `|L1>`.
    pub fn theta(&self) -> f64 {
        -self.cpbs[1].reflect_amplitude(Pol::L)
            * self.cpbs[2].reflect_amplitude(Pol::L)
            * self.cpbs[3].transmit_amplitude(Pol::R)
    }
}

fn moving(on: Factor, pol: Pol, dir: Option<Dir>) -> BasisLabel {
    let p = Photon { pol, dir };
    match on {
        Factor::Photon1 => BasisLabel::empty().with_photon1(p),
        _ => BasisLabel::empty().with_photon2(p),
    }
}

/// CPBS1 on the way in: the transmitted port enters the cavity moving down,
/// the reflected port moving up.
fn cpbs_inbound(err: CpbsError, on: Factor) -> Result<ModeMap> {
    let mut map = ModeMap::new(FactorSet::of(&[on]));
    for pol in [Pol::R, Pol::L] {
        map.insert(
            moving(on, pol, None),
            [
                (
                    moving(on, pol, Some(Dir::Down)),
                    Amplitude::new(err.transmit_amplitude(pol), 0.0),
                ),
                (
                    moving(on, pol, Some(Dir::Up)),
                    Amplitude::new(err.reflect_amplitude(pol), 0.0),
                ),
            ],
        )?;
    }
    Ok(map)
}

/// CPBS1 on the way out, into the common output port.
fn cpbs_outbound(err: CpbsError, on: Factor) -> Result<ModeMap> {
    let mut map = ModeMap::new(FactorSet::of(&[on]));
    for pol in [Pol::R, Pol::L] {
        map.insert(
            moving(on, pol, Some(Dir::Up)),
            [(
                moving(on, pol, None),
                Amplitude::new(err.reflect_amplitude(pol), 0.0),
            )],
        )?;
        map.insert(
            moving(on, pol, Some(Dir::Down)),
            [(
                moving(on, pol, None),
                Amplitude::new(err.transmit_amplitude(pol), 0.0),
            )],
        )?;
    }
    Ok(map)
}

fn cavity_loop(
    state: &JointState,
    on: Factor,
    cpbs: CpbsError,
    coeffs: &CavityCoeffs,
) -> Result<JointState> {
    state
        .apply(&cpbs_inbound(cpbs, on)?)?
        .apply(&qd_interaction_map(coeffs, on)?)?
        .apply(&cpbs_outbound(cpbs, on)?)
}

fn two_photon_pipeline(
    state: JointState,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
    switched: bool,
) -> Result<JointState> {
    let h = spin_hadamard();
    let mut s = state.apply(&hwp_map(err.xi1, Factor::Photon1)?)?;
    s = cavity_loop(&s, Factor::Photon1, err.cpbs[0], coeffs)?;
    s = s.apply(&hwp_map(err.xi2, Factor::Photon1)?)?;
    s = s.apply(&h)?;
    if switched {
        // SW1 injects photon 2 and releases photon 1.
        let legs = err.switch_legs();
        s = s.scale_weight(legs[0] * legs[1])?;
    }
    s = cavity_loop(&s, Factor::Photon2, err.cpbs[0], coeffs)?;
    s = s.apply(&h)?;
    if switched {
        let legs = err.switch_legs();
        s = s.scale_weight(legs[2] * legs[3])?;
    }
    Ok(s)
}

pub fn baseline_cnot(
    inputs: &CnotInputs,
    cav: &CavityParams,
    err: &DeviceErrorConfig,
) -> Result<JointState> {
    baseline_cnot_with_coeffs(inputs, &cavity_coeffs(cav)?, err)
}

pub fn baseline_cnot_with_coeffs(
    inputs: &CnotInputs,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
) -> Result<JointState> {
    two_photon_pipeline(inputs.initial_state()?, coeffs, err, false)
}

pub fn optimized_cnot(
    inputs: &CnotInputs,
    cav: &CavityParams,
    err: &DeviceErrorConfig,
) -> Result<JointState> {
    optimized_cnot_with_coeffs(inputs, &cavity_coeffs(cav)?, err)
}

pub fn optimized_cnot_with_coeffs(
    inputs: &CnotInputs,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
) -> Result<JointState> {
    // The 50:50 BS that separates photon 1 from its clone is ideal.
    let s = clone_photon(
        &inputs.initial_state()?,
        (inputs.alpha, inputs.beta),
        err.cloner,
    )?;
    let s = two_photon_pipeline(s, coeffs, err, true)?;
    // DL3 holds the clone until both photons have left the cavity.
    let s = s.apply(&qwp_basis_swap(Factor::Clone)?)?;
    let s = s.apply(&spin_to_photon_transfer((inputs.alpha, inputs.beta))?)?;
    let s = s.apply(&clone_herald())?;
    s.apply(&controlled_sigma_z(err.theta())?)
}

/// Cavity readout of the spin onto the clone photon, followed by QWP2:
/// `|c, up> -> conj(ref_c) |R, up>`, `|c, down> -> conj(ref_c) |L, down>` for
/// `c` in `{H, V}`. `reference` is the clone's own `(H, V)` amplitudes, so a
/// clone in that state emerges as `mu|R> + nu|L>` correlated with the spin
/// `mu|up> + nu|down>`. An empty clone mode is not covered and is an error.
pub fn spin_to_photon_transfer(reference: (Amplitude, Amplitude)) -> Result<ModeMap> {
    let label = |c: CloneSlot, s: Spin| BasisLabel::empty().with_clone(c).with_spin(s);
    let mut map = ModeMap::new(FactorSet::of(&[Factor::Clone, Factor::Spin]));
    for (pol, r) in [(Pol::H, reference.0), (Pol::V, reference.1)] {
        map.insert(
            label(CloneSlot::Present(pol), Spin::Up),
            [(label(CloneSlot::Present(Pol::R), Spin::Up), r.conj())],
        )?;
        map.insert(
            label(CloneSlot::Present(pol), Spin::Down),
            [(label(CloneSlot::Present(Pol::L), Spin::Down), r.conj())],
        )?;
    }
    Ok(map)
}

/// CPBS4 followed by HWP3 on the clone: `R` is transmitted and flipped into
/// the control mode `L`, `L` is discarded. The CPBS4 transmission amplitude
/// is carried by `theta` rather than by the clone.
pub fn clone_herald() -> ModeMap {
    let c = |slot| BasisLabel::empty().with_clone(slot);
    let one = Amplitude::new(1.0, 0.0);
    ModeMap::from_rules(
        FactorSet::of(&[Factor::Clone]),
        [
            (
                c(CloneSlot::Present(Pol::R)),
                vec![(c(CloneSlot::Present(Pol::L)), one)],
            ),
            (
                c(CloneSlot::Present(Pol::L)),
                vec![(c(CloneSlot::Absent), one)],
            ),
            (c(CloneSlot::Absent), vec![(c(CloneSlot::Absent), one)]),
        ],
    )
    .expect("clone labels are well formed")
}

/// CPBS2/CPBS3 controlled-sigma_z: a control clone in `L` multiplies `|L1>`
/// by `theta` and leaves `|R1>` alone. The clone is absorbed either way.
pub fn controlled_sigma_z(theta: f64) -> Result<ModeMap> {
    let l = |p1, c| {
        BasisLabel::empty()
            .with_photon1(Photon::free(p1))
            .with_clone(c)
    };
    let one = Amplitude::new(1.0, 0.0);
    ModeMap::from_rules(
        FactorSet::of(&[Factor::Photon1, Factor::Clone]),
        [
            (
                l(Pol::R, CloneSlot::Present(Pol::L)),
                [(l(Pol::R, CloneSlot::Absent), one)],
            ),
            (
                l(Pol::L, CloneSlot::Present(Pol::L)),
                [(l(Pol::L, CloneSlot::Absent), Amplitude::new(theta, 0.0))],
            ),
            (
                l(Pol::R, CloneSlot::Absent),
                [(l(Pol::R, CloneSlot::Absent), one)],
            ),
            (
                l(Pol::L, CloneSlot::Absent),
                [(l(Pol::L, CloneSlot::Absent), one)],
            ),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Circuit {
    Baseline,
    Optimized,
}

impl Circuit {
    pub fn run(
        self,
        inputs: &CnotInputs,
        coeffs: &CavityCoeffs,
        err: &DeviceErrorConfig,
    ) -> Result<JointState> {
        match self {
            Circuit::Baseline => baseline_cnot_with_coeffs(inputs, coeffs, err),
            Circuit::Optimized => optimized_cnot_with_coeffs(inputs, coeffs, err),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Circuit::Baseline => "baseline",
            Circuit::Optimized => "optimized",
        }
    }
}

impl std::str::FromStr for Circuit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Circuit::Baseline),
            "optimized" => Ok(Circuit::Optimized),
            other => Err(format!(
                "unknown circuit `{other}` (expected baseline or optimized)"
            )),
        }
    }
}

/// Output labels in the order `eta_1 .. eta_8`.
pub const ETA_LABELS: [(Pol, Pol, Spin); 8] = [
    (Pol::R, Pol::R, Spin::Up),
    (Pol::R, Pol::L, Spin::Up),
    (Pol::L, Pol::L, Spin::Up),
    (Pol::L, Pol::R, Spin::Up),
    (Pol::R, Pol::R, Spin::Down),
    (Pol::R, Pol::L, Spin::Down),
    (Pol::L, Pol::L, Spin::Down),
    (Pol::L, Pol::R, Spin::Down),
];

/// Output coefficients with the overall success amplitude factored out, in
/// the unnormalized convention where the ideal gate has `eta = (ad, ag, bd,
/// bg, ad, ag, bd, bg)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaCoefficients {
    pub eta: [Amplitude; 8],
    pub theta: f64,
    pub prefactor: f64,
}

/// Read `eta_1..eta_8` off a circuit output: the entries times `sqrt2`,
/// without the global weight.
pub fn compositional_eta(out: &JointState) -> [Amplitude; 8] {
    ETA_LABELS.map(|(p1, p2, s)| out.amplitude(&BasisLabel::circuit(p1, p2, s)) * SQRT_2)
}

struct Eta1Terms {
    a: [Amplitude; 4],
    primed: [f64; 4],
    double_primed: [f64; 4],
    delta_p: f64,
    gamma_p: f64,
    delta_pp: f64,
    gamma_pp: f64,
}

fn eta1_terms(
    inputs: &CnotInputs,
    c: &CavityCoeffs,
    err: &DeviceErrorConfig,
    as_printed: bool,
) -> Eta1Terms {
    let (tr, tl) = (err.cpbs[0].tau_r(), err.cpbs[0].tau_l());
    let xi1 = err.xi1.xi();
    let (t0, t1, r0, r1) = (c.t0, c.t1, c.r0, c.r1);
    let (sum, diff) = (inputs.alpha + inputs.beta, inputs.alpha - inputs.beta);
    let a = [
        sum * ((1.0 - tr) * (1.0 - xi1) / 2.0).sqrt(),
        sum * (tr * (1.0 - xi1) / 2.0).sqrt(),
        diff * ((1.0 - tl) * (1.0 + xi1) / 2.0).sqrt(),
        diff * (tl * (1.0 + xi1) / 2.0).sqrt(),
    ];
    let (str_, stl) = (tr.sqrt(), tl.sqrt());
    let (ctr, ctl) = ((1.0 - tr).sqrt(), (1.0 - tl).sqrt());
    // The printed a2', a2'' carry tau_L without a square root, and a2'', a4''
    // carry (r1 + r0) where the loop gives (r1 - r0).
    let (tl_a2, r_a2pp, r_a4pp) = if as_printed {
        (tl, r1 + r0, r1 + r0)
    } else {
        (stl, r1 - r0, r1 - r0)
    };
    let primed = [
        ctr * (t0 + t1) + ctl * (r0 + r1),
        str_ * (t0 + t1) + tl_a2 * (r0 + r1),
        ctr * (r0 + r1) + ctl * (t0 + t1),
        str_ * (r0 + r1) + stl * (t0 + t1),
    ];
    let double_primed = [
        ctr * (t0 - t1) + ctl * (r0 - r1),
        str_ * (t1 - t0) + tl_a2 * r_a2pp,
        ctr * (r0 - r1) + ctl * (t0 - t1),
        str_ * r_a4pp + stl * (t1 - t0),
    ];
    Eta1Terms {
        a,
        primed,
        double_primed,
        delta_p: t1 * tr - t0 * (1.0 - tr),
        gamma_p: r1 * (tr * tl).sqrt() - r0 * ((1.0 - tr) * (1.0 - tl)).sqrt(),
        delta_pp: t1 * (1.0 - tr) - t0 * tr,
        gamma_pp: r1 * ((1.0 - tr) * (1.0 - tl)).sqrt() - r0 * (tr * tl).sqrt(),
    }
}

fn eta1_from_terms(inputs: &CnotInputs, err: &DeviceErrorConfig, k: &Eta1Terms) -> Amplitude {
    let combine = |w: &[f64; 4]| k.a[1] * w[1] + k.a[3] * w[3] - k.a[0] * w[0] - k.a[2] * w[2];
    let photon2_p = inputs.delta * k.delta_p + inputs.gamma * k.gamma_p;
    let photon2_pp = inputs.delta * k.delta_pp + inputs.gamma * k.gamma_pp;
    let pre = (1.0 - err.xi2.xi()).sqrt() / (2.0 * SQRT_2);
    (combine(&k.primed) * photon2_p + combine(&k.double_primed) * photon2_pp) * pre
}

/// Closed-form `eta_1` (coefficient of `|R1 R2, up>`), with the loop
/// amplitudes `sqrt(tau_L)` and `(r1 - r0)` in `a2'`, `a2''`, `a4''`.
pub fn eta1_closed_form(
    inputs: &CnotInputs,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
) -> Amplitude {
    eta1_from_terms(inputs, err, &eta1_terms(inputs, coeffs, err, false))
}

/// `eta_1` with the coefficient expressions exactly as originally printed.
/// Differs from [`eta1_closed_form`] whenever `tau_R1` or `tau_L1` is nonzero.
pub fn eta1_as_printed(
    inputs: &CnotInputs,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
) -> Amplitude {
    eta1_from_terms(inputs, err, &eta1_terms(inputs, coeffs, err, true))
}

/// `eta_1` from the closed form; `eta_2..eta_8` from the optimized circuit.
pub fn eta_closed_form(
    inputs: &CnotInputs,
    coeffs: &CavityCoeffs,
    err: &DeviceErrorConfig,
) -> Result<EtaCoefficients> {
    let out = optimized_cnot_with_coeffs(inputs, coeffs, err)?;
    let mut eta = compositional_eta(&out);
    eta[0] = eta1_closed_form(inputs, coeffs, err);
    Ok(EtaCoefficients {
        eta,
        theta: err.theta(),
        prefactor: err.prefactor(),
    })
}
