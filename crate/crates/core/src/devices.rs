//! Imperfect linear-optical components and the single-photon switch.
//!
//! Wave plates and beam splitters are returned as [`ModeMap`]s over one
//! photon-like factor (`Photon1`, `Photon2` or the `Clone` mode). The QWPs,
//! the 50:50 BS and the delay lines are ideal; delay lines only fix the order
//! in which photons meet the cavity and have no map of their own.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{check_range, Error, Result};
use crate::state::{
    Amplitude, BasisLabel, CloneSlot, Factor, FactorSet, JointState, ModeMap, Photon, Pol, Spin,
};

/// Optimal fidelity of the universal 1 -> 2 qubit cloner.
pub const F_UC: f64 = 5.0 / 6.0;

/// HWP imperfection `xi`, `|xi| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HwpError(f64);

impl HwpError {
    pub const IDEAL: HwpError = HwpError(0.0);

    pub fn new(xi: f64) -> Result<HwpError> {
        check_range("xi", xi, -1.0, 1.0, "|xi| <= 1").map(HwpError)
    }

    pub fn xi(self) -> f64 {
        self.0
    }
}

/// Leakage errors of a circular polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpbsError {
    tau_r: f64,
    tau_l: f64,
}

impl CpbsError {
    pub const IDEAL: CpbsError = CpbsError {
        tau_r: 0.0,
        tau_l: 0.0,
    };

    pub fn new(tau_r: f64, tau_l: f64) -> Result<CpbsError> {
        Ok(CpbsError {
            tau_r: check_range("tau_r", tau_r, 0.0, 1.0, "0 <= tau_r <= 1")?,
            tau_l: check_range("tau_l", tau_l, 0.0, 1.0, "0 <= tau_l <= 1")?,
        })
    }

    pub fn tau_r(self) -> f64 {
        self.tau_r
    }

    pub fn tau_l(self) -> f64 {
        self.tau_l
    }

    /// Amplitude factor for `pol` leaving through the transmitted port.
    pub fn transmit_amplitude(self, pol: Pol) -> f64 {
        match pol {
            Pol::R => (1.0 - self.tau_r).sqrt(),
            Pol::L => self.tau_l.sqrt(),
            Pol::H | Pol::V => 0.0,
        }
    }

    /// Amplitude factor for `pol` leaving through the reflected port.
    pub fn reflect_amplitude(self, pol: Pol) -> f64 {
        match pol {
            Pol::R => self.tau_r.sqrt(),
            Pol::L => (1.0 - self.tau_l).sqrt(),
            Pol::H | Pol::V => 0.0,
        }
    }
}

/// The basis label for a free photon of polarization `pol` on `on`.
pub(crate) fn pol_label(on: Factor, pol: Pol) -> Result<BasisLabel> {
    let empty = BasisLabel::empty();
    match on {
        Factor::Photon1 => Ok(empty.with_photon1(Photon::free(pol))),
        Factor::Photon2 => Ok(empty.with_photon2(Photon::free(pol))),
        Factor::Clone => Ok(empty.with_clone(CloneSlot::Present(pol))),
        Factor::Spin => Err(Error::MissingFactor("photon")),
    }
}

/// A real-coefficient polarization map on one photon-like factor.
pub fn polarization_map(on: Factor, rows: &[(Pol, &[(Pol, f64)])]) -> Result<ModeMap> {
    let mut map = ModeMap::new(FactorSet::of(&[on]));
    for (input, outputs) in rows {
        let outs = outputs
            .iter()
            .map(|(p, c)| Ok((pol_label(on, *p)?, Amplitude::new(*c, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        map.insert(pol_label(on, *input)?, outs)?;
    }
    Ok(map)
}

/// Half-wave plate with error `xi`:
/// `R -> a R + b L`, `L -> a R - b L` with `a = sqrt((1-xi)/2)`, `b = sqrt((1+xi)/2)`.
///
/// For `xi != 0` both images keep unit norm but overlap by `-xi`, so the map
/// is not unitary.
pub fn hwp_map(err: HwpError, on: Factor) -> Result<ModeMap> {
    let a = ((1.0 - err.xi()) / 2.0).sqrt();
    let b = ((1.0 + err.xi()) / 2.0).sqrt();
    polarization_map(
        on,
        &[
            (Pol::R, &[(Pol::R, a), (Pol::L, b)]),
            (Pol::L, &[(Pol::R, a), (Pol::L, -b)]),
        ],
    )
}

/// `(transmit, reflect)` port maps of a CPBS. Each polarization keeps its
/// label; only the amplitude depends on the port.
pub fn cpbs_maps(err: CpbsError, on: Factor) -> Result<(ModeMap, ModeMap)> {
    let port = |amp: fn(CpbsError, Pol) -> f64| {
        polarization_map(
            on,
            &[
                (Pol::R, &[(Pol::R, amp(err, Pol::R))]),
                (Pol::L, &[(Pol::L, amp(err, Pol::L))]),
            ],
        )
    };
    Ok((
        port(CpbsError::transmit_amplitude)?,
        port(CpbsError::reflect_amplitude)?,
    ))
}

/// Ideal QWP relabeling between the circular and linear bases,
/// `R <-> H`, `L <-> V`.
pub fn qwp_basis_swap(on: Factor) -> Result<ModeMap> {
    polarization_map(
        on,
        &[
            (Pol::R, &[(Pol::H, 1.0)]),
            (Pol::L, &[(Pol::V, 1.0)]),
            (Pol::H, &[(Pol::R, 1.0)]),
            (Pol::V, &[(Pol::L, 1.0)]),
        ],
    )
}

/// Ideal polarization flip `R <-> L` (the HWP that turns the transmitted
/// clone into the control mode).
pub fn polarization_flip(on: Factor) -> Result<ModeMap> {
    polarization_map(
        on,
        &[(Pol::R, &[(Pol::L, 1.0)]), (Pol::L, &[(Pol::R, 1.0)])],
    )
}

/// Spin Hadamard: `up -> (up + down)/sqrt2`, `down -> (up - down)/sqrt2`.
pub fn spin_hadamard() -> ModeMap {
    let s = |spin| BasisLabel::empty().with_spin(spin);
    let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    ModeMap::from_rules(
        FactorSet::of(&[Factor::Spin]),
        [
            (s(Spin::Up), [(s(Spin::Up), h), (s(Spin::Down), h)]),
            (s(Spin::Down), [(s(Spin::Up), h), (s(Spin::Down), -h)]),
        ],
    )
    .expect("spin labels are well formed")
}

/// Port probabilities of one single-photon switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchCoeffs {
    pub t12: f64,
    pub t21: f64,
    pub r11: f64,
    pub r22: f64,
}

impl SwitchCoeffs {
    pub const IDEAL: SwitchCoeffs = SwitchCoeffs {
        t12: 1.0,
        t21: 1.0,
        r11: 1.0,
        r22: 1.0,
    };

    pub fn new(t12: f64, t21: f64, r11: f64, r22: f64) -> Result<SwitchCoeffs> {
        Ok(SwitchCoeffs {
            t12: check_range("t12", t12, 0.0, 1.0, "0 <= T12 <= 1")?,
            t21: check_range("t21", t21, 0.0, 1.0, "0 <= T21 <= 1")?,
            r11: check_range("r11", r11, 0.0, 1.0, "0 <= R11 <= 1")?,
            r22: check_range("r22", r22, 0.0, 1.0, "0 <= R22 <= 1")?,
        })
    }

    /// All four coefficients equal to `p`.
    pub fn uniform(p: f64) -> Result<SwitchCoeffs> {
        SwitchCoeffs::new(p, p, p, p)
    }

    pub fn validate(&self) -> Result<()> {
        SwitchCoeffs::new(self.t12, self.t21, self.r11, self.r22).map(|_| ())
    }
}

impl Default for SwitchCoeffs {
    fn default() -> Self {
        SwitchCoeffs::IDEAL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchPath {
    I1ToO2,
    I2ToO1,
    I1ToO1,
    I2ToO2,
}

/// Amplitude factor `sqrt(coefficient)` of one routing leg.
pub fn switch_amplitude(coeffs: &SwitchCoeffs, path: SwitchPath) -> f64 {
    match path {
        SwitchPath::I1ToO2 => coeffs.t12,
        SwitchPath::I2ToO1 => coeffs.t21,
        SwitchPath::I1ToO1 => coeffs.r11,
        SwitchPath::I2ToO2 => coeffs.r22,
    }
    .sqrt()
}

/// Zeeman sublevel of the switch atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchAtomState {
    MinusOne,
    PlusOne,
}

impl SwitchAtomState {
    fn toggled(self) -> SwitchAtomState {
        match self {
            SwitchAtomState::MinusOne => SwitchAtomState::PlusOne,
            SwitchAtomState::PlusOne => SwitchAtomState::MinusOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputPort {
    I1,
    I2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputPort {
    O1,
    O2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonMode {
    SigmaPlus,
    SigmaMinus,
}

impl PhotonMode {
    fn flipped(self) -> PhotonMode {
        match self {
            PhotonMode::SigmaPlus => PhotonMode::SigmaMinus,
            PhotonMode::SigmaMinus => PhotonMode::SigmaPlus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteOutcome {
    pub output: OutputPort,
    pub atom: SwitchAtomState,
    pub photon: PhotonMode,
    pub toggled: bool,
}

/// Lambda-atom routing. The atom in `m_F = -1` drives the sigma+ transition
/// and `m_F = +1` the sigma- one. A photon on the driven transition is
/// reflected back to its own side (I1 -> O1, I2 -> O2), leaves with the
/// opposite helicity and flips the atom; any other photon is transmitted
/// (I1 -> O2, I2 -> O1) and leaves everything unchanged.
pub fn switch_route(atom: SwitchAtomState, input: InputPort, photon: PhotonMode) -> RouteOutcome {
    let driven = matches!(
        (atom, photon),
        (SwitchAtomState::MinusOne, PhotonMode::SigmaPlus)
            | (SwitchAtomState::PlusOne, PhotonMode::SigmaMinus)
    );
    let output = match (input, driven) {
        (InputPort::I1, true) | (InputPort::I2, false) => OutputPort::O1,
        (InputPort::I2, true) | (InputPort::I1, false) => OutputPort::O2,
    };
    if driven {
        RouteOutcome {
            output,
            atom: atom.toggled(),
            photon: photon.flipped(),
            toggled: true,
        }
    } else {
        RouteOutcome {
            output,
            atom,
            photon,
            toggled: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerConfig {
    fidelity: f64,
}

impl ClonerConfig {
    pub const IDEAL: ClonerConfig = ClonerConfig { fidelity: 1.0 };

    pub fn new(fidelity: f64) -> Result<ClonerConfig> {
        check_range(
            "cloner fidelity",
            fidelity,
            0.5,
            1.0,
            "0.5 <= F_cloner <= 1",
        )
        .map(|fidelity| ClonerConfig { fidelity })
    }

    /// The optimal universal cloner, `F = 5/6`.
    pub fn universal_optimal() -> ClonerConfig {
        ClonerConfig { fidelity: F_UC }
    }

    pub fn fidelity(self) -> f64 {
        self.fidelity
    }

    /// Success amplitude `sqrt(F)` carried by the global weight.
    pub fn success_amplitude(self) -> f64 {
        self.fidelity.sqrt()
    }

    /// Reduced density matrix of one output of a universal cloner for the
    /// input `a|R> + b|L>`: `F |psi><psi| + (1 - F) |psi_perp><psi_perp|`,
    /// rows and columns ordered (R, L). Not used by the circuit pipelines,
    /// which carry the cloner as a scalar success amplitude.
    pub fn clone_density_matrix(self, a: Amplitude, b: Amplitude) -> [[Amplitude; 2]; 2] {
        let f = self.fidelity;
        let psi = [a, b];
        let perp = [-b.conj(), a.conj()];
        let mut rho = [[Amplitude::default(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] = psi[i] * psi[j].conj() * f + perp[i] * perp[j].conj() * (1.0 - f);
            }
        }
        rho
    }
}

impl Default for ClonerConfig {
    fn default() -> Self {
        ClonerConfig::IDEAL
    }
}

/// Populate the empty clone mode with a copy `a|R> + b|L>` of the control
/// photon and multiply the global weight by `sqrt(F_cloner)`.
pub fn clone_photon(
    state: &JointState,
    control: (Amplitude, Amplitude),
    cfg: ClonerConfig,
) -> Result<JointState> {
    if !state.factors().contains(Factor::Clone) {
        return Err(Error::MissingFactor("clone"));
    }
    if state
        .entries()
        .any(|(l, _)| l.clone != Some(CloneSlot::Absent))
    {
        return Err(Error::CloneAlreadyPresent);
    }
    let mut map = ModeMap::new(FactorSet::of(&[Factor::Clone]));
    map.insert(
        BasisLabel::empty().with_clone(CloneSlot::Absent),
        [
            (pol_label(Factor::Clone, Pol::R)?, control.0),
            (pol_label(Factor::Clone, Pol::L)?, control.1),
        ],
    )?;
    state.apply(&map)?.scale_weight(cfg.success_amplitude())
}
