//! Quantum-dot spin in a double-sided microcavity at exact resonance.
//!
//! Rates are expressed in units of the cavity decay rate `kappa`. The
//! transmission coefficient is
//!
//! ```text
//! t = -2 gamma kappa / (gamma (2 kappa + kappa_s) + 4 g^2),    r = 1 + t
//! ```
//!
//! and the uncoupled cavity (`t0`, `r0`) is the same expression at `g = 0`.

use crate::error::{check_range, Error, Result};
use crate::state::{Amplitude, BasisLabel, Dir, Factor, FactorSet, ModeMap, Photon, Pol, Spin};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub g: f64,
    pub kappa: f64,
    pub kappa_s: f64,
    pub gamma: f64,
}

impl CavityParams {
    pub fn new(g: f64, kappa: f64, kappa_s: f64, gamma: f64) -> Result<CavityParams> {
        let p = CavityParams {
            g,
            kappa,
            kappa_s,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in units of `kappa` (`kappa = 1`).
    pub fn from_ratios(
        g_over_kappa: f64,
        kappa_s_over_kappa: f64,
        gamma_over_kappa: f64,
    ) -> Result<CavityParams> {
        CavityParams::new(g_over_kappa, 1.0, kappa_s_over_kappa, gamma_over_kappa)
    }

    /// `g = 2.5 kappa`, `kappa_s = 0.05 kappa`, `gamma = 0.1 kappa`.
    pub fn strong_coupling() -> CavityParams {
        CavityParams {
            g: 2.5,
            kappa: 1.0,
            kappa_s: 0.05,
            gamma: 0.1,
        }
    }

    /// `g = 0.45 kappa`, `kappa_s = 1.0 kappa`, `gamma = 0.1 kappa`.
    pub fn weak_coupling() -> CavityParams {
        CavityParams {
            g: 0.45,
            kappa: 1.0,
            kappa_s: 1.0,
            gamma: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let inf = f64::INFINITY;
        check_range("g", self.g, 0.0, inf, "g >= 0")?;
        check_range("kappa_s", self.kappa_s, 0.0, inf, "kappa_s >= 0")?;
        check_range("gamma", self.gamma, 0.0, inf, "gamma >= 0")?;
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::Domain {
                name: "kappa",
                value: self.kappa,
                constraint: "kappa > 0",
            });
        }
        Ok(())
    }
}

/// Signed resonant coefficients; `r = 1 + t` and `r0 = 1 + t0` hold exactly
/// by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedCoeffs {
    pub t: f64,
    pub r: f64,
    pub t0: f64,
    pub r0: f64,
}

/// Magnitudes used by the interaction table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityCoeffs {
    pub t1: f64,
    pub r1: f64,
    pub t0: f64,
    pub r0: f64,
}

impl CavityCoeffs {
    /// Perfect spin-dependent routing: `t0 = r1 = 1`, `r0 = t1 = 0`.
    pub const IDEAL: CavityCoeffs = CavityCoeffs {
        t1: 0.0,
        r1: 1.0,
        t0: 1.0,
        r0: 0.0,
    };
}

fn transmission(g: f64, p: &CavityParams) -> Result<f64> {
    let denom = p.gamma * (2.0 * p.kappa + p.kappa_s) + 4.0 * g * g;
    if denom <= 0.0 {
        return Err(Error::DegenerateCavity(
            "gamma (2 kappa + kappa_s) + 4 g^2 must be positive",
        ));
    }
    Ok(-2.0 * p.gamma * p.kappa / denom)
}

pub fn signed_coeffs(p: &CavityParams) -> Result<SignedCoeffs> {
    p.validate()?;
    let t = transmission(p.g, p)?;
    let t0 = transmission(0.0, p)?;
    Ok(SignedCoeffs {
        t,
        r: 1.0 + t,
        t0,
        r0: 1.0 + t0,
    })
}

pub fn cavity_coeffs(p: &CavityParams) -> Result<CavityCoeffs> {
    let s = signed_coeffs(p)?;
    Ok(CavityCoeffs {
        t1: s.t.abs(),
        r1: s.r.abs(),
        t0: s.t0.abs(),
        r0: s.r0.abs(),
    })
}

/// `g > (kappa_s + kappa) / 4`.
pub fn is_strong_coupling(p: &CavityParams) -> bool {
    p.g > (p.kappa_s + p.kappa) / 4.0
}

/// Whether the photon mode `(pol, dir)` drives the dipole transition for
/// this spin. Coupled photons are reflected with `r1` (polarization and
/// direction flip) or transmitted with `t1`; uncoupled ones see the empty
/// cavity, `-t0` transmitted and `-r0` reflected.
fn is_coupled(pol: Pol, dir: Dir, spin: Spin) -> bool {
    matches!(
        (spin, pol, dir),
        (Spin::Up, Pol::R, Dir::Up)
            | (Spin::Up, Pol::L, Dir::Down)
            | (Spin::Down, Pol::R, Dir::Down)
            | (Spin::Down, Pol::L, Dir::Up)
    )
}

/// One photon–spin scattering event. The spin never flips; the photon's
/// polarization flips exactly when its direction does.
pub fn qd_interact(
    photon: Photon,
    spin: Spin,
    coeffs: &CavityCoeffs,
) -> Result<Vec<(Photon, Spin, f64)>> {
    let dir = photon.dir.ok_or(Error::UndefinedDirection)?;
    if !matches!(photon.pol, Pol::R | Pol::L) {
        return Err(Error::UndefinedDirection);
    }
    let same = photon;
    let flipped = Photon::moving(photon.pol.flipped(), dir.flipped());
    Ok(if is_coupled(photon.pol, dir, spin) {
        vec![(flipped, spin, coeffs.r1), (same, spin, coeffs.t1)]
    } else {
        vec![(same, spin, -coeffs.t0), (flipped, spin, -coeffs.r0)]
    })
}

/// The interaction table as a map on `(photon, spin)` for photon factor `on`.
pub fn qd_interaction_map(coeffs: &CavityCoeffs, on: Factor) -> Result<ModeMap> {
    let label = |p: Photon, s: Spin| -> Result<BasisLabel> {
        let l = BasisLabel::empty().with_spin(s);
        match on {
            Factor::Photon1 => Ok(l.with_photon1(p)),
            Factor::Photon2 => Ok(l.with_photon2(p)),
            _ => Err(Error::MissingFactor("photon")),
        }
    };
    let mut map = ModeMap::new(FactorSet::of(&[on, Factor::Spin]));
    for pol in [Pol::R, Pol::L] {
        for dir in [Dir::Down, Dir::Up] {
            for spin in Spin::BOTH {
                let photon = Photon::moving(pol, dir);
                let outs = qd_interact(photon, spin, coeffs)?
                    .into_iter()
                    .map(|(p, s, a)| Ok((label(p, s)?, Amplitude::new(a, 0.0))))
                    .collect::<Result<Vec<_>>>()?;
                map.insert(label(photon, spin)?, outs)?;
            }
        }
    }
    Ok(map)
}
