//! Dense pure-state representation of labeled polarization qubits.
//!
//! A [`PureState`] stores one complex amplitude per computational basis
//! state of `n` named modes, with the fixed encoding H = 0, V = 1.
//! Bit `i` of a basis index holds the polarization of `modes[i]`, so the
//! first mode in the list is the least-significant bit. Operations address
//! qubits by [`ModeId`], never by raw bit position, which keeps circuit
//! code readable when ancillas are added and removed mid-computation.
//!
//! States are allowed to be sub-normalized: a lossy element such as
//! [`PureState::pdl_filter`] shrinks the norm, and the squared norm of the
//! surviving branch is exactly the post-selection success probability.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateMatrix;

/// Global tolerance for amplitude and probability comparisons.
pub const TOL: f64 = 1e-12;

/// Hard cap on the number of simultaneously simulated qubits.
pub const MAX_QUBITS: usize = 22;

/// Amplitudes below this are hidden when pretty-printing a state.
/// Display-only; computation never truncates.
const PRINT_EPS: f64 = 1e-14;

/// Photon polarization, doubling as the computational basis of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn bit(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }

    pub fn letter(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            other => Err(Error::InvalidParameter(format!(
                "polarization must be H or V, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Label of one spatial mode (one photon / one qubit).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeId(String);

impl ModeId {
    pub fn new(label: impl Into<String>) -> Self {
        ModeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ModeId {
    fn from(label: &str) -> Self {
        ModeId(label.to_owned())
    }
}

impl From<String> for ModeId {
    fn from(label: String) -> Self {
        ModeId(label)
    }
}

impl From<usize> for ModeId {
    fn from(index: usize) -> Self {
        ModeId(index.to_string())
    }
}

/// One branch of a projective polarization measurement.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub mode: ModeId,
    pub outcome: Polarization,
    /// Probability of this branch relative to the pre-measurement norm.
    pub probability: f64,
    /// Renormalized post-measurement state. Zero-probability branches
    /// carry an all-zero amplitude vector.
    pub post_state: PureState,
}

/// Dense pure state over a list of named modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct PureState {
    modes: Vec<ModeId>,
    amps: Vec<Complex64>,
}

/// On-disk form: mode labels plus `[re, im]` pairs in basis-index order.
#[derive(Serialize, Deserialize)]
struct StateRepr {
    modes: Vec<ModeId>,
    amplitudes: Vec<[f64; 2]>,
}

impl From<PureState> for StateRepr {
    fn from(state: PureState) -> Self {
        StateRepr {
            modes: state.modes,
            amplitudes: state.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<StateRepr> for PureState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        let amps = repr
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        PureState::from_amplitudes(repr.modes, amps).map_err(|e| match e {
            Error::InvalidState(_) => e,
            other => Error::InvalidState(other.to_string()),
        })
    }
}

impl PureState {
    /// Builds a state from raw amplitudes. The vector length must be
    /// `2^modes.len()` and the labels must be unique.
    pub fn from_amplitudes(modes: Vec<ModeId>, amps: Vec<Complex64>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if modes.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(modes.len()));
        }
        let mut seen = HashSet::new();
        for mode in &modes {
            if !seen.insert(mode.clone()) {
                return Err(Error::DuplicateMode(mode.clone()));
            }
        }
        if amps.len() != 1 << modes.len() {
            return Err(Error::InvalidState(format!(
                "{} modes need {} amplitudes, got {}",
                modes.len(),
                1usize << modes.len(),
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(PureState { modes, amps })
    }

    /// Product state with every listed mode in a definite polarization.
    pub fn basis_state(assignments: &[(ModeId, Polarization)]) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if assignments.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(assignments.len()));
        }
        let modes: Vec<ModeId> = assignments.iter().map(|(m, _)| m.clone()).collect();
        let mut index = 0usize;
        for (i, (_, pol)) in assignments.iter().enumerate() {
            index |= pol.bit() << i;
        }
        let mut amps = vec![Complex64::ZERO; 1usize << modes.len()];
        amps[index] = Complex64::ONE;
        Self::from_amplitudes(modes, amps)
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of one basis assignment, addressed by polarization per mode
    /// in mode-list order.
    pub fn amplitude(&self, assignment: &[Polarization]) -> Result<Complex64> {
        if assignment.len() != self.modes.len() {
            return Err(Error::ModeSetMismatch);
        }
        let mut index = 0usize;
        for (i, pol) in assignment.iter().enumerate() {
            index |= pol.bit() << i;
        }
        Ok(self.amps[index])
    }

    fn mode_position(&self, mode: &ModeId) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == mode)
            .ok_or_else(|| Error::UnknownMode(mode.clone()))
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Scales the state back to unit norm; the prior squared norm is the
    /// post-selection probability of whatever filtering produced it.
    pub fn renormalize(&mut self) -> Result<f64> {
        let n2 = self.norm_squared();
        if n2 <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / n2.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(n2)
    }

    /// Applies a single-qubit gate to one mode.
    pub fn apply_1q(&mut self, gate: &GateMatrix, mode: &ModeId) -> Result<()> {
        if gate.dim() != 2 {
            return Err(Error::GateDimension {
                expected: 2,
                got: gate.dim(),
            });
        }
        let bit = 1usize << self.mode_position(mode)?;
        let m = gate.entries();
        for index in 0..self.amps.len() {
            if index & bit != 0 {
                continue;
            }
            let lo = self.amps[index];
            let hi = self.amps[index | bit];
            self.amps[index] = m[0] * lo + m[1] * hi;
            self.amps[index | bit] = m[2] * lo + m[3] * hi;
        }
        Ok(())
    }

    /// Applies a two-qubit gate. `mode_a` is the gate's first tensor
    /// factor, i.e. the most significant bit of the 4x4 matrix index.
    pub fn apply_2q(&mut self, gate: &GateMatrix, mode_a: &ModeId, mode_b: &ModeId) -> Result<()> {
        if gate.dim() != 4 {
            return Err(Error::GateDimension {
                expected: 4,
                got: gate.dim(),
            });
        }
        if mode_a == mode_b {
            return Err(Error::ModesNotDistinct(mode_a.clone()));
        }
        let bit_a = 1usize << self.mode_position(mode_a)?;
        let bit_b = 1usize << self.mode_position(mode_b)?;
        let m = gate.entries();
        for index in 0..self.amps.len() {
            if index & (bit_a | bit_b) != 0 {
                continue;
            }
            let rows = [index, index | bit_b, index | bit_a, index | bit_a | bit_b];
            let v = [
                self.amps[rows[0]],
                self.amps[rows[1]],
                self.amps[rows[2]],
                self.amps[rows[3]],
            ];
            for (r, &target) in rows.iter().enumerate() {
                self.amps[target] =
                    m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
            }
        }
        Ok(())
    }

    /// Polarization-dependent loss element on each listed mode: V
    /// amplitudes are damped by 1/sqrt(2), H amplitudes pass untouched.
    /// The state is deliberately left sub-normalized so the caller can
    /// read off the success probability as [`PureState::norm_squared`].
    pub fn pdl_filter(&mut self, modes: &[ModeId]) -> Result<()> {
        let mut mask = 0usize;
        let mut seen = HashSet::new();
        for mode in modes {
            if !seen.insert(mode.clone()) {
                return Err(Error::DuplicateMode(mode.clone()));
            }
            mask |= 1usize << self.mode_position(mode)?;
        }
        let damp = std::f64::consts::FRAC_1_SQRT_2;
        for (index, a) in self.amps.iter_mut().enumerate() {
            let v_count = (index & mask).count_ones();
            if v_count > 0 {
                *a *= damp.powi(v_count as i32);
            }
        }
        Ok(())
    }

    /// Probability of finding `mode` in `outcome`, relative to the current
    /// (possibly sub-unit) norm.
    pub fn probability(&self, mode: &ModeId, outcome: Polarization) -> Result<f64> {
        let bit = 1usize << self.mode_position(mode)?;
        let want = if outcome == Polarization::V { bit } else { 0 };
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of one mode, returning both branches as
    /// `(H record, V record)`. With `remove` the measured mode is dropped
    /// from the post-states. The input must have nonzero norm; branch
    /// probabilities then sum to the pre-measurement squared norm.
    pub fn measure(&self, mode: &ModeId, remove: bool) -> Result<(MeasurementRecord, MeasurementRecord)> {
        let pos = self.mode_position(mode)?;
        if self.norm_squared() <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let branch = |outcome: Polarization| -> MeasurementRecord {
            let bit = 1usize << pos;
            let want = if outcome == Polarization::V { bit } else { 0 };
            let mut probability = 0.0;
            let (modes, mut amps) = if remove {
                let modes: Vec<ModeId> = self
                    .modes
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != pos)
                    .map(|(_, m)| m.clone())
                    .collect();
                (modes, vec![Complex64::ZERO; self.amps.len() / 2])
            } else {
                (self.modes.clone(), vec![Complex64::ZERO; self.amps.len()])
            };
            for (index, &a) in self.amps.iter().enumerate() {
                if index & bit != want {
                    continue;
                }
                probability += a.norm_sqr();
                let target = if remove {
                    (index & (bit - 1)) | ((index >> (pos + 1)) << pos)
                } else {
                    index
                };
                amps[target] = a;
            }
            if probability > 0.0 {
                let scale = 1.0 / probability.sqrt();
                for a in &mut amps {
                    *a *= scale;
                }
            }
            MeasurementRecord {
                mode: mode.clone(),
                outcome,
                probability,
                post_state: PureState { modes, amps },
            }
        };
        Ok((branch(Polarization::H), branch(Polarization::V)))
    }

    /// Squared overlap |<target|self>|^2 with both states scaled to unit
    /// norm first, so global phase and normalization never matter. The
    /// states must live on the same mode set; amplitudes are aligned by
    /// label, not by storage order.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        if self.modes.len() != target.modes.len() {
            return Err(Error::ModeSetMismatch);
        }
        let mut perm = Vec::with_capacity(self.modes.len());
        for mode in &self.modes {
            perm.push(target.mode_position(mode).map_err(|_| Error::ModeSetMismatch)?);
        }
        let n2_self = self.norm_squared();
        let n2_target = target.norm_squared();
        if n2_self <= 0.0 || n2_target <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let mut overlap = Complex64::ZERO;
        for (index, &a) in self.amps.iter().enumerate() {
            let mut t_index = 0usize;
            for (i, &j) in perm.iter().enumerate() {
                t_index |= ((index >> i) & 1) << j;
            }
            overlap += target.amps[t_index].conj() * a;
        }
        Ok((overlap.norm_sqr() / (n2_self * n2_target)).clamp(0.0, 1.0))
    }

    /// Tensor product; mode labels of the two factors must be disjoint.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut modes = self.modes.clone();
        for mode in &other.modes {
            if self.modes.contains(mode) {
                return Err(Error::DuplicateMode(mode.clone()));
            }
            modes.push(mode.clone());
        }
        if modes.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(modes.len()));
        }
        let mut amps = vec![Complex64::ZERO; 1 << modes.len()];
        let low_bits = self.modes.len();
        for (hi, &b) in other.amps.iter().enumerate() {
            if b == Complex64::ZERO {
                continue;
            }
            for (lo, &a) in self.amps.iter().enumerate() {
                amps[(hi << low_bits) | lo] = a * b;
            }
        }
        PureState::from_amplitudes(modes, amps)
    }

    /// Returns the same state with its modes stored in the given order.
    pub fn reordered(&self, order: &[ModeId]) -> Result<PureState> {
        if order.len() != self.modes.len() {
            return Err(Error::ModeSetMismatch);
        }
        let mut perm = Vec::with_capacity(order.len());
        for mode in order {
            perm.push(self.mode_position(mode).map_err(|_| Error::ModeSetMismatch)?);
        }
        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            let mut old_index = 0usize;
            for (i, &j) in perm.iter().enumerate() {
                old_index |= ((new_index >> i) & 1) << j;
            }
            *slot = self.amps[old_index];
        }
        PureState::from_amplitudes(order.to_vec(), amps)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Display for PureState {
    /// Renders e.g. `(0.707107)|HV> + (0.707107)|VH>` with basis letters
    /// in mode-list order (first mode leftmost).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (index, a) in self.amps.iter().enumerate() {
            if a.norm() <= PRINT_EPS {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if a.im.abs() <= PRINT_EPS {
                format!("{:.6}", a.re)
            } else if a.re.abs() <= PRINT_EPS {
                format!("{:.6}i", a.im)
            } else {
                format!("{:.6}{:+.6}i", a.re, a.im)
            };
            let letters: String = (0..self.modes.len())
                .map(|i| Polarization::from_bit(index >> i).letter())
                .collect();
            write!(f, "({coeff})|{letters}>")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
