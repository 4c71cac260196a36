#![allow(dead_code, clippy::needless_range_loop, clippy::type_complexity)]

use num_complex::Complex64 as C;
use qdcnot::cavity::CavityCoeffs;
use qdcnot::{BasisLabel, CloneSlot, CnotInputs, JointState, Photon, Pol, Spin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_qubit(r: &mut ChaCha8Rng) -> (C, C) {
    let v: [f64; 4] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
    let (a, b) = (C::new(v[0], v[1]), C::new(v[2], v[3]));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

pub fn random_inputs(r: &mut ChaCha8Rng) -> CnotInputs {
    let (a, b) = random_qubit(r);
    let (d, g) = random_qubit(r);
    CnotInputs::new(a, b, d, g).unwrap()
}

// Photon modes: free R, free L, R moving down, R moving up, L moving down, L moving up.
pub const FREE_R: usize = 0;
pub const FREE_L: usize = 1;
pub const R_DN: usize = 2;
pub const R_UP: usize = 3;
pub const L_DN: usize = 4;
pub const L_UP: usize = 5;
pub const DIM: usize = 72;

pub fn index(m1: usize, m2: usize, s: usize) -> usize {
    (m1 * 6 + m2) * 2 + s
}

pub type Mat = Vec<Vec<C>>;

fn zeros(n: usize) -> Mat {
    vec![vec![C::default(); n]; n]
}

fn eye(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0);
    }
    m
}

fn matvec(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Lift a 6x6 photon operator onto photon 1 or 2.
fn on_photon(op: &Mat, which: usize) -> Mat {
    let mut m = zeros(DIM);
    for a1 in 0..6 {
        for a2 in 0..6 {
            for s in 0..2 {
                let i = index(a1, a2, s);
                for b in 0..6 {
                    let (j, coeff) = if which == 1 {
                        (index(b, a2, s), op[a1][b])
                    } else {
                        (index(a1, b, s), op[a2][b])
                    };
                    m[i][j] += coeff;
                }
            }
        }
    }
    m
}

fn on_spin(op: &[[C; 2]; 2]) -> Mat {
    let mut m = zeros(DIM);
    for a1 in 0..6 {
        for a2 in 0..6 {
            for s in 0..2 {
                for t in 0..2 {
                    m[index(a1, a2, s)][index(a1, a2, t)] += op[s][t];
                }
            }
        }
    }
    m
}

/// Lift a (photon mode, spin) operator, indexed `mode * 2 + spin`.
fn on_photon_spin(op: &Mat, which: usize) -> Mat {
    let mut m = zeros(DIM);
    for a1 in 0..6 {
        for a2 in 0..6 {
            for s in 0..2 {
                let a = if which == 1 { a1 } else { a2 };
                for b in 0..6 {
                    for t in 0..2 {
                        let j = if which == 1 {
                            index(b, a2, t)
                        } else {
                            index(a1, b, t)
                        };
                        m[index(a1, a2, s)][j] += op[a * 2 + s][b * 2 + t];
                    }
                }
            }
        }
    }
    m
}

pub fn hwp(xi: f64) -> Mat {
    let mut m = eye(6);
    let (p, q) = (((1.0 - xi) / 2.0).sqrt(), ((1.0 + xi) / 2.0).sqrt());
    m[FREE_R][FREE_R] = c(p);
    m[FREE_L][FREE_R] = c(q);
    m[FREE_R][FREE_L] = c(p);
    m[FREE_L][FREE_L] = c(-q);
    m
}

pub fn cpbs_in(tau_r: f64, tau_l: f64) -> Mat {
    let mut m = zeros(6);
    m[R_DN][FREE_R] = c((1.0 - tau_r).sqrt());
    m[R_UP][FREE_R] = c(tau_r.sqrt());
    m[L_UP][FREE_L] = c((1.0 - tau_l).sqrt());
    m[L_DN][FREE_L] = c(tau_l.sqrt());
    m
}

pub fn cpbs_out(tau_r: f64, tau_l: f64) -> Mat {
    let mut m = zeros(6);
    m[FREE_R][R_UP] = c(tau_r.sqrt());
    m[FREE_L][L_UP] = c((1.0 - tau_l).sqrt());
    m[FREE_R][R_DN] = c((1.0 - tau_r).sqrt());
    m[FREE_L][L_DN] = c(tau_l.sqrt());
    m
}

pub const UP: usize = 0;
pub const DOWN: usize = 1;

/// The eight scattering rules, typed in row by row.
pub fn interaction_rules(k: &CavityCoeffs) -> Vec<((usize, usize), [((usize, usize), f64); 2])> {
    let (t0, r0, t1, r1) = (k.t0, k.r0, k.t1, k.r1);
    vec![
        ((R_DN, UP), [((R_DN, UP), -t0), ((L_UP, UP), -r0)]),
        ((R_DN, DOWN), [((L_UP, DOWN), r1), ((R_DN, DOWN), t1)]),
        ((R_UP, UP), [((L_DN, UP), r1), ((R_UP, UP), t1)]),
        ((R_UP, DOWN), [((R_UP, DOWN), -t0), ((L_DN, DOWN), -r0)]),
        ((L_DN, UP), [((R_UP, UP), r1), ((L_DN, UP), t1)]),
        ((L_DN, DOWN), [((L_DN, DOWN), -t0), ((R_UP, DOWN), -r0)]),
        ((L_UP, UP), [((L_UP, UP), -t0), ((R_DN, UP), -r0)]),
        ((L_UP, DOWN), [((R_DN, DOWN), r1), ((L_UP, DOWN), t1)]),
    ]
}

pub fn interaction(k: &CavityCoeffs) -> Mat {
    let mut m = zeros(12);
    for i in 0..12 {
        if i / 2 < 2 {
            m[i][i] = c(1.0);
        }
    }
    for ((pm, ps), outs) in interaction_rules(k) {
        for ((qm, qs), a) in outs {
            m[qm * 2 + qs][pm * 2 + ps] += c(a);
        }
    }
    m
}

pub fn hadamard() -> [[C; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h), c(h)], [c(h), c(-h)]]
}

/// Baseline pipeline as dense 72x72 matrices.
pub fn dense_baseline(
    inp: &CnotInputs,
    k: &CavityCoeffs,
    xi1: f64,
    xi2: f64,
    tau_r: f64,
    tau_l: f64,
) -> Vec<C> {
    let mut v = vec![C::default(); DIM];
    for (m1, a) in [(FREE_R, inp.alpha), (FREE_L, inp.beta)] {
        for (m2, b) in [(FREE_R, inp.delta), (FREE_L, inp.gamma)] {
            v[index(m1, m2, UP)] += a * b * inp.spin_init.0;
            v[index(m1, m2, DOWN)] += a * b * inp.spin_init.1;
        }
    }
    let steps = [
        on_photon(&hwp(xi1), 1),
        on_photon(&cpbs_in(tau_r, tau_l), 1),
        on_photon_spin(&interaction(k), 1),
        on_photon(&cpbs_out(tau_r, tau_l), 1),
        on_photon(&hwp(xi2), 1),
        on_spin(&hadamard()),
        on_photon(&cpbs_in(tau_r, tau_l), 2),
        on_photon_spin(&interaction(k), 2),
        on_photon(&cpbs_out(tau_r, tau_l), 2),
        on_spin(&hadamard()),
    ];
    for m in &steps {
        v = matvec(m, &v);
    }
    v
}

fn mode_of(p: Photon) -> usize {
    use qdcnot::Dir;
    match (p.pol, p.dir) {
        (Pol::R, None) => FREE_R,
        (Pol::L, None) => FREE_L,
        (Pol::R, Some(Dir::Down)) => R_DN,
        (Pol::R, Some(Dir::Up)) => R_UP,
        (Pol::L, Some(Dir::Down)) => L_DN,
        (Pol::L, Some(Dir::Up)) => L_UP,
        _ => panic!("unexpected photon {p:?}"),
    }
}

/// Engine output as a dense vector (entries times the global weight).
pub fn to_dense(s: &JointState) -> Vec<C> {
    let mut v = vec![C::default(); DIM];
    for (l, a) in s.entries() {
        assert_eq!(l.clone, Some(CloneSlot::Absent), "{l}");
        let sp = if l.spin == Some(Spin::Up) { UP } else { DOWN };
        v[index(mode_of(l.photon1.unwrap()), mode_of(l.photon2.unwrap()), sp)] +=
            a * s.global_weight();
    }
    v
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn label(p1: Pol, p2: Pol, s: Spin) -> BasisLabel {
    BasisLabel::circuit(p1, p2, s)
}
