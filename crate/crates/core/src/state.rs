//! Sparse complex-amplitude states over a labeled tensor basis.
//!
//! A [`JointState`] is a map from [`BasisLabel`] to [`Amplitude`] plus a
//! non-negative scalar `global_weight` that accumulates success amplitudes
//! (switch legs, the cloner) without touching the entries. States are never
//! renormalized: lossy device maps shrink the norm and that loss is visible
//! to every downstream overlap.
//!
//! Every label in a state populates the same [`FactorSet`]. Maps act on a
//! subset of factors and are keyed by the restriction of a label to that
//! subset, so a photon map does not need to know anything about the spin.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Entries whose modulus falls below this are dropped after each operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    R,
    L,
    H,
    V,
}

impl Pol {
    /// R <-> L, H <-> V.
    pub fn flipped(self) -> Pol {
        match self {
            Pol::R => Pol::L,
            Pol::L => Pol::R,
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }
}

/// Propagation direction of a photon inside the cavity stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flipped(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Photon {
    pub pol: Pol,
    /// `Some` only while the photon is between the cavity-stage beam splitter
    /// and the cavity.
    pub dir: Option<Dir>,
}

impl Photon {
    pub fn free(pol: Pol) -> Photon {
        Photon { pol, dir: None }
    }

    pub fn moving(pol: Pol, dir: Dir) -> Photon {
        Photon {
            pol,
            dir: Some(dir),
        }
    }
}

/// Occupation of the clone mode (photon 1').
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CloneSlot {
    Present(Pol),
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Photon1,
    Photon2,
    Clone,
    Spin,
}

impl Factor {
    pub const ALL: [Factor; 4] = [
        Factor::Photon1,
        Factor::Photon2,
        Factor::Clone,
        Factor::Spin,
    ];

    fn bit(self) -> u8 {
        match self {
            Factor::Photon1 => 1,
            Factor::Photon2 => 2,
            Factor::Clone => 4,
            Factor::Spin => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Factor::Photon1 => "photon1",
            Factor::Photon2 => "photon2",
            Factor::Clone => "clone",
            Factor::Spin => "spin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FactorSet(u8);

impl FactorSet {
    pub const EMPTY: FactorSet = FactorSet(0);
    pub const ALL: FactorSet = FactorSet(15);

    pub fn of(factors: &[Factor]) -> FactorSet {
        FactorSet(factors.iter().fold(0, |acc, f| acc | f.bit()))
    }

    pub fn contains(self, f: Factor) -> bool {
        self.0 & f.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: FactorSet) -> FactorSet {
        FactorSet(self.0 | other.0)
    }

    pub fn intersection(self, other: FactorSet) -> FactorSet {
        FactorSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: FactorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Factor> {
        Factor::ALL.into_iter().filter(move |f| self.contains(*f))
    }
}

impl fmt::Display for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(Factor::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// One basis ket of the joint photon–clone–spin space. A `None` field means
/// the factor is not part of the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisLabel {
    pub photon1: Option<Photon>,
    pub photon2: Option<Photon>,
    pub clone: Option<CloneSlot>,
    pub spin: Option<Spin>,
}

impl BasisLabel {
    pub fn empty() -> BasisLabel {
        BasisLabel::default()
    }

    /// Two free photons, an empty clone mode and a spin: the label shape
    /// used at the input and output of both circuits.
    pub fn circuit(p1: Pol, p2: Pol, spin: Spin) -> BasisLabel {
        BasisLabel {
            photon1: Some(Photon::free(p1)),
            photon2: Some(Photon::free(p2)),
            clone: Some(CloneSlot::Absent),
            spin: Some(spin),
        }
    }

    pub fn with_photon1(mut self, p: Photon) -> Self {
        self.photon1 = Some(p);
        self
    }

    pub fn with_photon2(mut self, p: Photon) -> Self {
        self.photon2 = Some(p);
        self
    }

    pub fn with_clone(mut self, c: CloneSlot) -> Self {
        self.clone = Some(c);
        self
    }

    pub fn with_spin(mut self, s: Spin) -> Self {
        self.spin = Some(s);
        self
    }

    pub fn photon(&self, f: Factor) -> Option<Photon> {
        match f {
            Factor::Photon1 => self.photon1,
            Factor::Photon2 => self.photon2,
            _ => None,
        }
    }

    pub fn factors(&self) -> FactorSet {
        let mut bits = FactorSet::EMPTY;
        if self.photon1.is_some() {
            bits = bits.union(FactorSet::of(&[Factor::Photon1]));
        }
        if self.photon2.is_some() {
            bits = bits.union(FactorSet::of(&[Factor::Photon2]));
        }
        if self.clone.is_some() {
            bits = bits.union(FactorSet::of(&[Factor::Clone]));
        }
        if self.spin.is_some() {
            bits = bits.union(FactorSet::of(&[Factor::Spin]));
        }
        bits
    }

    /// Keep only the factors in `set`.
    pub fn restrict(&self, set: FactorSet) -> BasisLabel {
        BasisLabel {
            photon1: self.photon1.filter(|_| set.contains(Factor::Photon1)),
            photon2: self.photon2.filter(|_| set.contains(Factor::Photon2)),
            clone: self.clone.filter(|_| set.contains(Factor::Clone)),
            spin: self.spin.filter(|_| set.contains(Factor::Spin)),
        }
    }

    /// Fields populated in `other` replace those in `self`.
    pub fn overlay(&self, other: &BasisLabel) -> BasisLabel {
        BasisLabel {
            photon1: other.photon1.or(self.photon1),
            photon2: other.photon2.or(self.photon2),
            clone: other.clone.or(self.clone),
            spin: other.spin.or(self.spin),
        }
    }
}

fn fmt_photon(f: &mut fmt::Formatter<'_>, p: Photon, idx: &str) -> fmt::Result {
    write!(f, "{:?}{}", p.pol, idx)?;
    match p.dir {
        Some(Dir::Down) => write!(f, "v"),
        Some(Dir::Up) => write!(f, "^"),
        None => Ok(()),
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !std::mem::take(&mut first) {
                write!(f, " ")?;
            }
            Ok(())
        };
        if let Some(p) = self.photon1 {
            sep(f)?;
            fmt_photon(f, p, "1")?;
        }
        if let Some(p) = self.photon2 {
            sep(f)?;
            fmt_photon(f, p, "2")?;
        }
        if let Some(c) = self.clone {
            sep(f)?;
            match c {
                CloneSlot::Present(p) => write!(f, "{p:?}1'")?,
                CloneSlot::Absent => write!(f, "0_1'")?,
            }
        }
        if let Some(s) = self.spin {
            sep(f)?;
            match s {
                Spin::Up => write!(f, "up_s")?,
                Spin::Down => write!(f, "down_s")?,
            }
        }
        write!(f, ">")
    }
}

/// A linear map acting on the factors in `factors()`, given row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    factors: FactorSet,
    rules: BTreeMap<BasisLabel, Vec<(BasisLabel, Amplitude)>>,
}

impl ModeMap {
    pub fn new(factors: FactorSet) -> ModeMap {
        ModeMap {
            factors,
            rules: BTreeMap::new(),
        }
    }

    /// Build a map from `(input, outputs)` rows. Every label must populate
    /// exactly `factors`.
    pub fn from_rules<I, O>(factors: FactorSet, rows: I) -> Result<ModeMap>
    where
        I: IntoIterator<Item = (BasisLabel, O)>,
        O: IntoIterator<Item = (BasisLabel, Amplitude)>,
    {
        let mut map = ModeMap::new(factors);
        for (input, outputs) in rows {
            map.insert(input, outputs)?;
        }
        Ok(map)
    }

    pub fn insert<O>(&mut self, input: BasisLabel, outputs: O) -> Result<()>
    where
        O: IntoIterator<Item = (BasisLabel, Amplitude)>,
    {
        self.check_label(&input)?;
        let outputs: Vec<_> = outputs.into_iter().collect();
        for (out, _) in &outputs {
            self.check_label(out)?;
        }
        if self.rules.insert(input, outputs).is_some() {
            return Err(Error::DuplicateLabel(input));
        }
        Ok(())
    }

    fn check_label(&self, label: &BasisLabel) -> Result<()> {
        if label.factors() != self.factors {
            return Err(Error::FactorMismatch {
                label: *label,
                expected: self.factors,
            });
        }
        Ok(())
    }

    /// The identity on the given labels.
    pub fn identity<I: IntoIterator<Item = BasisLabel>>(
        factors: FactorSet,
        labels: I,
    ) -> Result<ModeMap> {
        ModeMap::from_rules(
            factors,
            labels
                .into_iter()
                .map(|l| (l, [(l, Amplitude::new(1.0, 0.0))])),
        )
    }

    pub fn factors(&self) -> FactorSet {
        self.factors
    }

    pub fn row(&self, input: &BasisLabel) -> Option<&[(BasisLabel, Amplitude)]> {
        self.rules.get(input).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&BasisLabel, &[(BasisLabel, Amplitude)])> {
        self.rules.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Matrix element `<output| M |input>`.
    pub fn element(&self, output: &BasisLabel, input: &BasisLabel) -> Amplitude {
        self.row(input)
            .into_iter()
            .flatten()
            .filter(|(l, _)| l == output)
            .map(|(_, a)| *a)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    factors: FactorSet,
    entries: BTreeMap<BasisLabel, Amplitude>,
    global_weight: f64,
}

fn prune(entries: &mut BTreeMap<BasisLabel, Amplitude>) {
    entries.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
}

impl JointState {
    /// A state with exactly the given entries and unit global weight.
    pub fn new<I>(assignments: I) -> Result<JointState>
    where
        I: IntoIterator<Item = (BasisLabel, Amplitude)>,
    {
        let mut iter = assignments.into_iter().peekable();
        let factors = iter.peek().ok_or(Error::EmptyState)?.0.factors();
        let mut entries = BTreeMap::new();
        for (label, amp) in iter {
            if label.factors() != factors {
                return Err(Error::FactorMismatch {
                    label,
                    expected: factors,
                });
            }
            if !amp.is_finite() {
                return Err(Error::NonFinite(label));
            }
            if entries.insert(label, amp).is_some() {
                return Err(Error::DuplicateLabel(label));
            }
        }
        prune(&mut entries);
        Ok(JointState {
            factors,
            entries,
            global_weight: 1.0,
        })
    }

    /// The unit of `tensor`: no factors, one entry of amplitude 1.
    pub fn scalar() -> JointState {
        JointState {
            factors: FactorSet::EMPTY,
            entries: BTreeMap::from([(BasisLabel::empty(), Amplitude::new(1.0, 0.0))]),
            global_weight: 1.0,
        }
    }

    pub fn factors(&self) -> FactorSet {
        self.factors
    }

    pub fn global_weight(&self) -> f64 {
        self.global_weight
    }

    /// Multiply the global weight by a non-negative factor.
    pub fn scale_weight(mut self, factor: f64) -> Result<JointState> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::Domain {
                name: "weight factor",
                value: factor,
                constraint: "finite and >= 0",
            });
        }
        self.global_weight *= factor;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisLabel, &Amplitude)> {
        self.entries.iter()
    }

    /// Amplitude of `label`, not including the global weight.
    pub fn amplitude(&self, label: &BasisLabel) -> Amplitude {
        self.entries.get(label).copied().unwrap_or_default()
    }

    /// Sum of squared moduli of the entries, not including the global weight.
    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    /// `norm_sqr() * global_weight^2`.
    pub fn weighted_norm_sqr(&self) -> f64 {
        self.norm_sqr() * self.global_weight * self.global_weight
    }

    /// Apply `map` to the factors it acts on. Amplitudes landing on the same
    /// label add coherently.
    pub fn apply(&self, map: &ModeMap) -> Result<JointState> {
        if !map.factors().is_subset_of(self.factors) {
            return Err(Error::StructureMismatch {
                left: self.factors,
                right: map.factors(),
            });
        }
        let mut out: BTreeMap<BasisLabel, Amplitude> = BTreeMap::new();
        for (label, amp) in &self.entries {
            let key = label.restrict(map.factors());
            let row = map.row(&key).ok_or(Error::UncoveredLabel(key))?;
            for (image, coeff) in row {
                let target = label.overlay(image);
                let contrib = amp * coeff;
                out.entry(target)
                    .and_modify(|a| *a += contrib)
                    .or_insert(contrib);
            }
        }
        if let Some((label, _)) = out.iter().find(|(_, a)| !a.is_finite()) {
            return Err(Error::NonFinite(*label));
        }
        prune(&mut out);
        Ok(JointState {
            factors: self.factors,
            entries: out,
            global_weight: self.global_weight,
        })
    }

    pub fn tensor(&self, other: &JointState) -> Result<JointState> {
        let shared = self.factors.intersection(other.factors);
        if !shared.is_empty() {
            return Err(Error::OverlappingFactors(shared));
        }
        let mut entries = BTreeMap::new();
        for (la, aa) in &self.entries {
            for (lb, ab) in &other.entries {
                entries.insert(la.overlay(lb), aa * ab);
            }
        }
        prune(&mut entries);
        Ok(JointState {
            factors: self.factors.union(other.factors),
            entries,
            global_weight: self.global_weight * other.global_weight,
        })
    }

    /// The unrenormalized `branch` component and its weighted squared norm.
    pub fn project_spin(&self, branch: Spin) -> Result<(JointState, f64)> {
        if !self.factors.contains(Factor::Spin) {
            return Err(Error::MissingFactor("spin"));
        }
        let entries: BTreeMap<_, _> = self
            .entries
            .iter()
            .filter(|(l, _)| l.spin == Some(branch))
            .map(|(l, a)| (*l, *a))
            .collect();
        let projected = JointState {
            factors: self.factors,
            entries,
            global_weight: self.global_weight,
        };
        let weight = projected.weighted_norm_sqr();
        Ok((projected, weight))
    }

    /// `<self|other>`, conjugate-linear in `self`, including both global weights.
    pub fn inner_product(&self, other: &JointState) -> Result<Amplitude> {
        if self.factors != other.factors {
            return Err(Error::StructureMismatch {
                left: self.factors,
                right: other.factors,
            });
        }
        let (small, large, conj_small) = if self.entries.len() <= other.entries.len() {
            (&self.entries, &other.entries, true)
        } else {
            (&other.entries, &self.entries, false)
        };
        let mut acc = Amplitude::new(0.0, 0.0);
        for (label, a) in small {
            if let Some(b) = large.get(label) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc * (self.global_weight * other.global_weight))
    }

    /// Multiply every entry by `c`.
    pub fn scaled(&self, c: Amplitude) -> JointState {
        let mut entries: BTreeMap<_, _> = self.entries.iter().map(|(l, a)| (*l, a * c)).collect();
        prune(&mut entries);
        JointState {
            factors: self.factors,
            entries,
            global_weight: self.global_weight,
        }
    }

    /// Fold the global weight into the entries, leaving weight 1.
    pub fn absorb_weight(&self) -> JointState {
        let w = self.global_weight;
        let mut s = self.scaled(Amplitude::new(w, 0.0));
        s.global_weight = 1.0;
        s
    }

    /// Vector sum of two states over the same factors. Global weights are
    /// absorbed into the entries first.
    pub fn superpose(&self, other: &JointState) -> Result<JointState> {
        if self.factors != other.factors {
            return Err(Error::StructureMismatch {
                left: self.factors,
                right: other.factors,
            });
        }
        let mut out = self.absorb_weight();
        for (l, a) in &other.absorb_weight().entries {
            *out.entries.entry(*l).or_default() += a;
        }
        prune(&mut out.entries);
        Ok(out)
    }
}

pub fn make_state<I>(assignments: I) -> Result<JointState>
where
    I: IntoIterator<Item = (BasisLabel, Amplitude)>,
{
    JointState::new(assignments)
}

pub fn apply_mode_map(state: &JointState, map: &ModeMap) -> Result<JointState> {
    state.apply(map)
}

pub fn tensor(a: &JointState, b: &JointState) -> Result<JointState> {
    a.tensor(b)
}

pub fn project_spin(state: &JointState, branch: Spin) -> Result<(JointState, f64)> {
    state.project_spin(branch)
}

pub fn inner_product(a: &JointState, b: &JointState) -> Result<Amplitude> {
    a.inner_product(b)
}

/// Single-photon state `a|R> + b|L>` on `factor` (a photon or the clone mode).
pub fn photon_state(factor: Factor, a: Amplitude, b: Amplitude) -> Result<JointState> {
    let label = |pol| -> Result<BasisLabel> {
        Ok(match factor {
            Factor::Photon1 => BasisLabel::empty().with_photon1(Photon::free(pol)),
            Factor::Photon2 => BasisLabel::empty().with_photon2(Photon::free(pol)),
            Factor::Clone => BasisLabel::empty().with_clone(CloneSlot::Present(pol)),
            Factor::Spin => return Err(Error::MissingFactor("photon")),
        })
    };
    JointState::new([(label(Pol::R)?, a), (label(Pol::L)?, b)])
}

/// Spin state `up|up> + down|down>`.
pub fn spin_state(up: Amplitude, down: Amplitude) -> Result<JointState> {
    JointState::new([
        (BasisLabel::empty().with_spin(Spin::Up), up),
        (BasisLabel::empty().with_spin(Spin::Down), down),
    ])
}

/// The clone mode with no photon in it.
pub fn empty_clone() -> JointState {
    JointState {
        factors: FactorSet::of(&[Factor::Clone]),
        entries: BTreeMap::from([(
            BasisLabel::empty().with_clone(CloneSlot::Absent),
            Amplitude::new(1.0, 0.0),
        )]),
        global_weight: 1.0,
    }
}
