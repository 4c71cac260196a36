mod common;

use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use qdcnot::cavity::{cavity_coeffs, qd_interaction_map, signed_coeffs, CavityCoeffs};
use qdcnot::circuits::{baseline_cnot_with_coeffs, compositional_eta, optimized_cnot_with_coeffs};
use qdcnot::devices::{hwp_map, spin_hadamard};
use qdcnot::fidelity::{average_fidelity_with_coeffs, fidelity_single};
use qdcnot::state::{photon_state, spin_state};
use qdcnot::*;

fn amp() -> impl Strategy<Value = C> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C::new(re, im))
}

fn qubit() -> impl Strategy<Value = (C, C)> {
    (amp(), amp()).prop_filter_map("non-zero", |(a, b)| {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        (n > 1e-3).then(|| (a / n, b / n))
    })
}

fn inputs() -> impl Strategy<Value = CnotInputs> {
    (qubit(), qubit()).prop_map(|((a, b), (d, g))| CnotInputs::new(a, b, d, g).unwrap())
}

fn cavity() -> impl Strategy<Value = CavityParams> {
    (0.0f64..3.0, 0.0f64..2.0, 0.01f64..1.0)
        .prop_map(|(g, ks, gm)| CavityParams::from_ratios(g, ks, gm).unwrap())
}

fn errors(max: f64) -> impl Strategy<Value = DeviceErrorConfig> {
    (
        proptest::array::uniform2(0.0..=max),
        proptest::array::uniform8(0.0..=max),
        proptest::array::uniform8(0.0f64..=1.0),
        0.5f64..=1.0,
    )
        .prop_map(|(xi, tau, sw, f)| DeviceErrorConfig {
            xi1: HwpError::new(xi[0]).unwrap(),
            xi2: HwpError::new(xi[1]).unwrap(),
            cpbs: std::array::from_fn(|i| CpbsError::new(tau[2 * i], tau[2 * i + 1]).unwrap()),
            sw1: SwitchCoeffs::new(sw[0], sw[1], sw[2], sw[3]).unwrap(),
            sw2: SwitchCoeffs::new(sw[4], sw[5], sw[6], sw[7]).unwrap(),
            cloner: ClonerConfig::new(f).unwrap(),
        })
}

fn two_photon_spin(inp: &CnotInputs) -> JointState {
    inp.initial_state().unwrap()
}

fn assert_states_close(
    a: &JointState,
    b: &JointState,
    tol: f64,
) -> std::result::Result<(), TestCaseError> {
    let labels: std::collections::BTreeSet<_> =
        a.entries().chain(b.entries()).map(|(l, _)| *l).collect();
    for l in labels {
        let (x, y) = (
            a.amplitude(&l) * a.global_weight(),
            b.amplitude(&l) * b.global_weight(),
        );
        prop_assert!((x - y).norm() < tol, "{l}: {x} vs {y}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_are_linear(x in inputs(), y in inputs(), a in amp(), b in amp(), xi in -1.0f64..1.0, cav in cavity()) {
        let k = cavity_coeffs(&cav).unwrap();
        let (sx, sy) = (two_photon_spin(&x), two_photon_spin(&y));
        let lhs = sx.scaled(a).superpose(&sy.scaled(b)).unwrap();
        let run = |s: &JointState| {
            s.apply(&hwp_map(HwpError::new(xi).unwrap(), Factor::Photon1).unwrap())
                .unwrap()
                .apply(&spin_hadamard())
                .unwrap()
        };
        let out = run(&lhs);
        let expect = run(&sx).scaled(a).superpose(&run(&sy).scaled(b)).unwrap();
        assert_states_close(&out, &expect, 1e-12)?;
        // The cavity table is linear on moving photons as well.
        let moving = JointState::new([
            (BasisLabel::empty().with_photon1(Photon::moving(Pol::R, Dir::Down)), a),
            (BasisLabel::empty().with_photon1(Photon::moving(Pol::L, Dir::Up)), b),
        ])
        .unwrap()
        .tensor(&spin_state(c(0.6), c(0.8)).unwrap())
        .unwrap();
        let m = qd_interaction_map(&k, Factor::Photon1).unwrap();
        let whole = moving.apply(&m).unwrap();
        let up = moving.project_spin(Spin::Up).unwrap().0.apply(&m).unwrap();
        let down = moving.project_spin(Spin::Down).unwrap().0.apply(&m).unwrap();
        assert_states_close(&whole, &up.superpose(&down).unwrap(), 1e-12)?;
    }

    #[test]
    fn branch_weights_add_up(x in inputs(), cav in cavity(), err in errors(0.1)) {
        let k = cavity_coeffs(&cav).unwrap();
        for out in [baseline_cnot_with_coeffs(&x, &k, &err).unwrap(), optimized_cnot_with_coeffs(&x, &k, &err).unwrap()] {
            let (_, wu) = out.project_spin(Spin::Up).unwrap();
            let (_, wd) = out.project_spin(Spin::Down).unwrap();
            prop_assert!((wu + wd - out.weighted_norm_sqr()).abs() < 1e-12);
            prop_assert!(out.weighted_norm_sqr() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn weight_scales_fidelity_quadratically(x in inputs(), cav in cavity(), w in 0.01f64..1.0) {
        let k = cavity_coeffs(&cav).unwrap();
        let out = optimized_cnot_with_coeffs(&x, &k, &DeviceErrorConfig::ideal()).unwrap();
        let scaled = out.clone().scale_weight(w).unwrap();
        for mode in [FidelityMode::BranchUp, FidelityMode::BranchDown, FidelityMode::Both] {
            let f = fidelity_single(&out, &x, mode).unwrap();
            let g = fidelity_single(&scaled, &x, mode).unwrap();
            prop_assert!((g - w * w * f).abs() < 1e-12);
        }
    }

    #[test]
    fn global_phase_does_not_change_fidelity(x in inputs(), cav in cavity(), err in errors(0.1), phi in 0.0f64..std::f64::consts::TAU) {
        let k = cavity_coeffs(&cav).unwrap();
        let out = optimized_cnot_with_coeffs(&x, &k, &err).unwrap();
        let rotated = out.scaled(C::from_polar(1.0, phi));
        for mode in [FidelityMode::BranchUp, FidelityMode::BranchDown, FidelityMode::Both] {
            let f = fidelity_single(&out, &x, mode).unwrap();
            let g = fidelity_single(&rotated, &x, mode).unwrap();
            prop_assert!((f - g).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_commutes_with_tensor(x in inputs(), s in qubit(), p in qubit()) {
        let spin_part = photon_state(Factor::Photon1, x.alpha, x.beta).unwrap().tensor(&spin_state(s.0, s.1).unwrap()).unwrap();
        let other = photon_state(Factor::Photon2, p.0, p.1).unwrap();
        for b in Spin::BOTH {
            let (lhs, wl) = spin_part.tensor(&other).unwrap().project_spin(b).unwrap();
            let (proj, wp) = spin_part.project_spin(b).unwrap();
            let rhs = proj.tensor(&other).unwrap();
            assert_states_close(&lhs, &rhs, 1e-14)?;
            prop_assert!((wl - wp * other.weighted_norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_identity(cav in cavity()) {
        let s = signed_coeffs(&cav).unwrap();
        prop_assert!((s.r - 1.0 - s.t).abs() <= 1e-12);
        prop_assert!((s.r0 - 1.0 - s.t0).abs() <= 1e-12);
        let k = cavity_coeffs(&cav).unwrap();
        for v in [k.t0, k.r0, k.t1, k.r1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn interaction_matches_literal_table(cav in cavity()) {
        let k = cavity_coeffs(&cav).unwrap();
        let map = qd_interaction_map(&k, Factor::Photon2).unwrap();
        let pol = [(R_DN, Pol::R, Dir::Down), (R_UP, Pol::R, Dir::Up), (L_DN, Pol::L, Dir::Down), (L_UP, Pol::L, Dir::Up)];
        let to_label = |mode: usize, s: usize| {
            let (_, p, d) = pol.iter().find(|x| x.0 == mode).unwrap();
            BasisLabel::empty()
                .with_photon2(Photon::moving(*p, *d))
                .with_spin(if s == UP { Spin::Up } else { Spin::Down })
        };
        let mut oracle = [[0.0f64; 8]; 8];
        let flat = |m: usize, s: usize| (m - 2) * 2 + s;
        for ((pm, ps), outs) in interaction_rules(&k) {
            for ((qm, qs), a) in outs {
                oracle[flat(qm, qs)][flat(pm, ps)] += a;
            }
        }
        for (pm, _, _) in pol {
            for ps in [UP, DOWN] {
                for (qm, _, _) in pol {
                    for qs in [UP, DOWN] {
                        let e = map.element(&to_label(qm, qs), &to_label(pm, ps));
                        prop_assert_eq!(e, c(oracle[flat(qm, qs)][flat(pm, ps)]));
                    }
                }
            }
        }
    }

    #[test]
    fn baseline_matches_dense_oracle(x in inputs(), cav in cavity(), xi in proptest::array::uniform2(-0.2f64..0.2), tau in proptest::array::uniform2(0.0f64..0.2)) {
        let k = cavity_coeffs(&cav).unwrap();
        let err = DeviceErrorConfig {
            xi1: HwpError::new(xi[0]).unwrap(),
            xi2: HwpError::new(xi[1]).unwrap(),
            cpbs: [CpbsError::new(tau[0], tau[1]).unwrap(); 4],
            ..DeviceErrorConfig::ideal()
        };
        let out = baseline_cnot_with_coeffs(&x, &k, &err).unwrap();
        let dense = dense_baseline(&x, &k, xi[0], xi[1], tau[0], tau[1]);
        prop_assert!(max_diff(&to_dense(&out), &dense) < 1e-12);
    }

    #[test]
    fn prefactor_is_independent_of_input(x in inputs(), y in inputs(), cav in cavity(), err in errors(0.1)) {
        let k = cavity_coeffs(&cav).unwrap();
        let wx = optimized_cnot_with_coeffs(&x, &k, &err).unwrap().global_weight();
        let wy = optimized_cnot_with_coeffs(&y, &k, &err).unwrap().global_weight();
        let expect = (err.sw1.t12 * err.sw1.r22 * err.sw2.t12 * err.sw2.r11 * err.cloner.fidelity()).sqrt();
        prop_assert!((wx - expect).abs() < 1e-12);
        prop_assert!((wy - expect).abs() < 1e-12);
    }

    #[test]
    fn theta_only_touches_up_branch_control_l(x in inputs(), cav in cavity(), err in errors(0.1)) {
        let k = cavity_coeffs(&cav).unwrap();
        let base = compositional_eta(&baseline_cnot_with_coeffs(&x, &k, &err).unwrap());
        let opt = compositional_eta(&optimized_cnot_with_coeffs(&x, &k, &err).unwrap());
        let theta = err.theta();
        for i in 0..8 {
            let factor = if i == 2 || i == 3 { theta } else { 1.0 };
            prop_assert!((opt[i] - base[i] * factor).norm() < 1e-12, "eta_{} {} vs {}", i + 1, opt[i], base[i]);
        }
    }
}

#[test]
fn strong_coupling_down_branch_rr_amplitude() {
    // Zero device errors: the R1 R2 amplitude of the down branch is alpha (t0 delta + r0 gamma) / sqrt2.
    let k = cavity_coeffs(&CavityParams::strong_coupling()).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let x = random_inputs(&mut r);
        let out = baseline_cnot_with_coeffs(&x, &k, &DeviceErrorConfig::ideal()).unwrap();
        let got = out.amplitude(&label(Pol::R, Pol::R, Spin::Down));
        let expect = x.alpha * (x.delta * k.t0 + x.gamma * k.r0) / 2f64.sqrt();
        assert!((got - expect).norm() < 1e-12);
        let dense = dense_baseline(&x, &k, 0.0, 0.0, 0.0, 0.0);
        assert!((dense[index(FREE_R, FREE_R, DOWN)] - got).norm() < 1e-12);
    }
}

#[test]
fn fidelities_stay_in_unit_interval_on_sweep_grids() {
    // Coarse versions of the canonical grids, both circuits, errors at 1e-2 and 1e-1.
    let ens = InputEnsemble::calibration();
    for circuit in [Circuit::Baseline, Circuit::Optimized] {
        for e in [1e-2, 1e-1] {
            let err = DeviceErrorConfig::uniform(e).unwrap();
            for i in 0..=10 {
                for j in 0..=12 {
                    let cav =
                        CavityParams::from_ratios(0.25 * j as f64, 0.2 * i as f64, 0.1).unwrap();
                    let r = average_fidelity(circuit, &cav, &err, &ens).unwrap();
                    for v in [
                        r.heralded[0],
                        r.heralded[1],
                        r.unrenormalized[0],
                        r.renormalized[1],
                        r.both,
                    ] {
                        assert!(
                            (-1e-12..=1.0 + 1e-12).contains(&v),
                            "{circuit:?} {e} {i} {j}: {v}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn fidelity_degrades_along_error_ladder() {
    let ladder = [0.0, 1e-3, 1e-2, 5e-2, 1e-1];
    let ens = InputEnsemble::calibration();
    for cav in [
        CavityParams::strong_coupling(),
        CavityParams::weak_coupling(),
    ] {
        let k = cavity_coeffs(&cav).unwrap();
        let mut last = f64::INFINITY;
        for e in ladder {
            let err = DeviceErrorConfig::uniform(e).unwrap();
            let f = average_fidelity_with_coeffs(Circuit::Optimized, &k, &err, &ens)
                .unwrap()
                .both;
            assert!(f <= last + 1e-12, "{e}: {f} > {last}");
            last = f;
        }
    }
}

#[test]
fn basis_ensemble_is_blind_to_the_sign() {
    let ideal = DeviceErrorConfig::ideal();
    let b = average_fidelity_with_coeffs(
        Circuit::Baseline,
        &CavityCoeffs::IDEAL,
        &ideal,
        &InputEnsemble::basis4(),
    )
    .unwrap();
    let s = average_fidelity_with_coeffs(
        Circuit::Baseline,
        &CavityCoeffs::IDEAL,
        &ideal,
        &InputEnsemble::superposition4(),
    )
    .unwrap();
    assert!((b.heralded[0] - 1.0).abs() < 1e-12);
    assert!(s.heralded[0] < 1.0 - 1e-6);
}

#[test]
fn plus_control_up_branch_overlap() {
    // ((R + L)/sqrt2) x R through the ideal baseline: the up branch is
    // (RR - LL)/2 against a target (RR + LL)/2, so the overlap vanishes.
    let x = CnotInputs::real(0.5f64.sqrt(), 0.5f64.sqrt(), 1.0, 0.0).unwrap();
    let out =
        baseline_cnot_with_coeffs(&x, &CavityCoeffs::IDEAL, &DeviceErrorConfig::ideal()).unwrap();
    let hand = {
        let t = [(Pol::R, Pol::R, 0.5), (Pol::L, Pol::L, 0.5)];
        let o = [(Pol::R, Pol::R, 0.5), (Pol::L, Pol::L, -0.5)];
        let inner: f64 = t.iter().zip(&o).map(|(a, b)| a.2 * b.2).sum();
        inner * inner
    };
    let f = fidelity_single(&out, &x, FidelityMode::BranchUp).unwrap();
    assert!((f - hand).abs() < 1e-15);
    assert_eq!(hand, 0.0);
    assert!((fidelity_single(&out, &x, FidelityMode::BranchDown).unwrap() - 0.5).abs() < 1e-12);
}
