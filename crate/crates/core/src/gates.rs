//! Gate matrices for the expansion circuit.
//!
//! Single-qubit gates are expressed through the half-wave-plate family
//! `hwp(theta)` wherever an optical realization exists: `hwp(pi/8)` is the
//! Hadamard, `hwp(pi/16)` the intermediate rotation F used to build a
//! controlled Hadamard, `hwp(0)` equals Z. Two-qubit matrices carry a
//! [`ControlSlot`] tag recording which tensor factor is the control, since
//! the controlled Hadamard here acts on its *first* slot conditioned on
//! the second.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::state::{ModeId, PureState};

/// Which tensor factor of a two-qubit gate is the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlSlot {
    First,
    Second,
}

/// A named 2x2 or 4x4 unitary, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    name: String,
    dim: usize,
    entries: Vec<Complex64>,
    control: Option<ControlSlot>,
}

impl GateMatrix {
    pub fn single(name: impl Into<String>, rows: [[f64; 2]; 2]) -> Self {
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        GateMatrix {
            name: name.into(),
            dim: 2,
            entries,
            control: None,
        }
    }

    pub fn two_qubit(
        name: impl Into<String>,
        rows: [[f64; 4]; 4],
        control: Option<ControlSlot>,
    ) -> Self {
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        GateMatrix {
            name: name.into(),
            dim: 4,
            entries,
            control,
        }
    }

    fn from_entries(
        name: impl Into<String>,
        dim: usize,
        entries: Vec<Complex64>,
        control: Option<ControlSlot>,
    ) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        GateMatrix {
            name: name.into(),
            dim,
            entries,
            control,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn control(&self) -> Option<ControlSlot> {
        self.control
    }

    /// Row-major entries, `dim * dim` of them.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateMatrix, name: impl Into<String>) -> Result<GateMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                a: self.dim,
                b: rhs.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![Complex64::ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = Complex64::ZERO;
                for k in 0..d {
                    acc += self.entries[r * d + k] * rhs.entries[k * d + c];
                }
                entries[r * d + c] = acc;
            }
        }
        Ok(GateMatrix::from_entries(name, d, entries, None))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim;
        for r in 0..d {
            for c in 0..d {
                let mut acc = Complex64::ZERO;
                for k in 0..d {
                    acc += self.entries[k * d + r].conj() * self.entries[k * d + c];
                }
                let expect = if r == c { Complex64::ONE } else { Complex64::ZERO };
                if (acc - expect).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Polarization flip, the X of the H/V basis.
pub fn x() -> GateMatrix {
    GateMatrix::single("X", [[0.0, 1.0], [1.0, 0.0]])
}

pub fn z() -> GateMatrix {
    GateMatrix::single("Z", [[1.0, 0.0], [0.0, -1.0]])
}

/// Half-wave plate at angle `theta` to the H axis:
/// `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`. Real, symmetric, involutive.
pub fn hwp(theta: f64) -> GateMatrix {
    let (s, c) = (2.0 * theta).sin_cos();
    GateMatrix::single(format!("HWP({theta})"), [[c, s], [s, -c]])
}

/// Hadamard, realized as a half-wave plate at pi/8.
pub fn hadamard() -> GateMatrix {
    let r = FRAC_1_SQRT_2;
    GateMatrix::single("H", [[r, r], [r, -r]])
}

/// Half-wave plate at pi/16; two of these sandwiching a CNOT turn it into
/// a controlled Hadamard (see [`ch_decomposed`]).
pub fn f_gate() -> GateMatrix {
    let (s, c) = (PI / 8.0).sin_cos();
    GateMatrix::single("F", [[c, s], [s, -c]])
}

/// CNOT with the control on the first slot.
pub fn cnot() -> GateMatrix {
    GateMatrix::two_qubit(
        "CNOT",
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ],
        Some(ControlSlot::First),
    )
}

pub fn cz() -> GateMatrix {
    GateMatrix::two_qubit(
        "CZ",
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ],
        Some(ControlSlot::First),
    )
}

/// Controlled Hadamard acting on the first slot, controlled by the second.
///
/// Columns, with basis index = 2*(first-slot bit) + (second-slot bit):
/// control H leaves the target alone, control V sends the target through
/// a Hadamard. This is the slot convention the expansion block wants: the
/// freshly injected ancilla is the target, the W-state qubit the control.
pub fn ch_direct() -> GateMatrix {
    let r = FRAC_1_SQRT_2;
    GateMatrix::two_qubit(
        "CH",
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, r, 0.0, r],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, r, 0.0, -r],
        ],
        Some(ControlSlot::Second),
    )
}

/// Every named gate this crate knows about.
pub fn registry() -> Vec<GateMatrix> {
    vec![x(), z(), hadamard(), f_gate(), cnot(), cz(), ch_direct()]
}

pub fn lookup(name: &str) -> Result<GateMatrix> {
    registry()
        .into_iter()
        .find(|g| g.name() == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown gate `{name}`")))
}

/// JSON document mapping each registry gate to its matrix, for external
/// cross-checks against other simulators.
pub fn registry_json() -> Value {
    let mut doc = serde_json::Map::new();
    for gate in registry() {
        let matrix: Vec<Vec<[f64; 2]>> = (0..gate.dim())
            .map(|r| {
                (0..gate.dim())
                    .map(|c| {
                        let e = gate.entry(r, c);
                        [e.re, e.im]
                    })
                    .collect()
            })
            .collect();
        let control = match gate.control() {
            Some(ControlSlot::First) => json!("first"),
            Some(ControlSlot::Second) => json!("second"),
            None => Value::Null,
        };
        doc.insert(
            gate.name().to_owned(),
            json!({ "dim": gate.dim(), "control_slot": control, "matrix": matrix }),
        );
    }
    Value::Object(doc)
}

/// True when `a = e^(i phi) b` entrywise for some single phase `phi`.
pub fn equivalent_up_to_phase(a: &GateMatrix, b: &GateMatrix, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { a: a.dim(), b: b.dim() });
    }
    let pivot = (0..b.entries.len()).max_by(|&i, &j| {
        b.entries[i]
            .norm()
            .partial_cmp(&b.entries[j].norm())
            .expect("finite entries")
    });
    let Some(pivot) = pivot else {
        return Ok(true);
    };
    if b.entries[pivot].norm() <= tol {
        // b is numerically zero; a must be too.
        return Ok(a.entries.iter().all(|e| e.norm() <= tol));
    }
    let ratio = a.entries[pivot] / b.entries[pivot];
    if (ratio.norm() - 1.0).abs() > tol {
        return Ok(false);
    }
    let phase = ratio / ratio.norm();
    Ok(a
        .entries
        .iter()
        .zip(&b.entries)
        .all(|(ea, eb)| (ea - phase * eb).norm() <= tol))
}

/// One gate of a decomposed two-qubit circuit, with the register slots
/// (0 or 1) it acts on. For a two-qubit step, `slots[0]` receives the
/// gate's first tensor factor.
#[derive(Debug, Clone)]
pub struct DecompStep {
    pub gate: GateMatrix,
    pub slots: Vec<usize>,
}

/// A short gate sequence on a two-qubit register, applied left to right.
#[derive(Debug, Clone)]
pub struct DecomposedCircuit {
    steps: Vec<DecompStep>,
}

impl DecomposedCircuit {
    pub fn new(steps: Vec<DecompStep>) -> Self {
        DecomposedCircuit { steps }
    }

    pub fn steps(&self) -> &[DecompStep] {
        &self.steps
    }

    pub fn single_qubit_count(&self) -> usize {
        self.steps.iter().filter(|s| s.gate.dim() == 2).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.steps.iter().filter(|s| s.gate.dim() == 4).count()
    }

    /// Multiplies the steps out into one 4x4 matrix.
    pub fn compose(&self, name: impl Into<String>) -> Result<GateMatrix> {
        let mut acc = GateMatrix::two_qubit(
            "I",
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            None,
        );
        for step in &self.steps {
            acc = embed(step)?.compose(&acc, "")?;
        }
        acc.name = name.into();
        Ok(acc)
    }

    /// Runs the sequence on a state, with `slot_modes[i]` standing in for
    /// register slot `i`.
    pub fn apply(&self, state: &mut PureState, slot_modes: [&ModeId; 2]) -> Result<()> {
        for step in &self.steps {
            match (step.gate.dim(), step.slots.as_slice()) {
                (2, &[s]) => state.apply_1q(&step.gate, slot_modes[s])?,
                (4, &[a, b]) => state.apply_2q(&step.gate, slot_modes[a], slot_modes[b])?,
                (dim, slots) => {
                    return Err(Error::InvalidParameter(format!(
                        "step `{}` has dim {dim} but {} slots",
                        step.gate.name(),
                        slots.len()
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Lifts one step to the full 4x4 register matrix. Slot 0 is the most
/// significant bit of the register index, matching `apply_2q`.
fn embed(step: &DecompStep) -> Result<GateMatrix> {
    let bit_of = |index: usize, slot: usize| (index >> (1 - slot)) & 1;
    match (step.gate.dim(), step.slots.as_slice()) {
        (2, &[s]) => {
            let mut entries = vec![Complex64::ZERO; 16];
            for row in 0..4 {
                for col in 0..4 {
                    if bit_of(row, 1 - s) != bit_of(col, 1 - s) {
                        continue;
                    }
                    entries[row * 4 + col] = step.gate.entry(bit_of(row, s), bit_of(col, s));
                }
            }
            Ok(GateMatrix::from_entries("", 4, entries, None))
        }
        (4, &[a, b]) if a != b && a < 2 && b < 2 => {
            let mut entries = vec![Complex64::ZERO; 16];
            for row in 0..4 {
                for col in 0..4 {
                    let g_row = bit_of(row, a) * 2 + bit_of(row, b);
                    let g_col = bit_of(col, a) * 2 + bit_of(col, b);
                    entries[row * 4 + col] = step.gate.entry(g_row, g_col);
                }
            }
            Ok(GateMatrix::from_entries("", 4, entries, None))
        }
        (dim, slots) => Err(Error::InvalidParameter(format!(
            "cannot embed dim-{dim} gate on slots {slots:?}"
        ))),
    }
}

/// Controlled Hadamard as an optics-friendly sequence: half-wave plates at
/// pi/16 and pi/8 on the target, one CNOT controlled by slot 1, and the
/// same plates again. Composes to [`ch_direct`] exactly, with no leftover
/// phase: on control H the plates cancel pairwise, on control V the
/// conjugation `F (H X H) F = F Z F` is itself a Hadamard.
pub fn ch_decomposed() -> DecomposedCircuit {
    DecomposedCircuit::new(vec![
        DecompStep { gate: f_gate(), slots: vec![0] },
        DecompStep { gate: hadamard(), slots: vec![0] },
        DecompStep { gate: cnot(), slots: vec![1, 0] },
        DecompStep { gate: hadamard(), slots: vec![0] },
        DecompStep { gate: f_gate(), slots: vec![0] },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Polarization, TOL};

    #[test]
    fn registry_gates_are_unitary() {
        for gate in registry() {
            assert!(gate.is_unitary(TOL), "{} is not unitary", gate.name());
        }
    }

    #[test]
    fn hwp_special_angles_hit_named_gates() {
        let h = hwp(PI / 8.0);
        let f = hwp(PI / 16.0);
        let z_plate = hwp(0.0);
        for (plate, named) in [(h, hadamard()), (f, f_gate()), (z_plate, z())] {
            for i in 0..4 {
                assert!(
                    (plate.entries()[i] - named.entries()[i]).norm() < TOL,
                    "HWP mismatch against {}",
                    named.name()
                );
            }
        }
    }

    #[test]
    fn hwp_is_involutive_at_any_angle() {
        for theta in [0.0, 0.3, PI / 7.0, 1.2, -0.8] {
            let plate = hwp(theta);
            let square = plate.compose(&plate, "HWP^2").unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!((square.entry(r, c).re - expect).abs() < TOL);
                    assert!(square.entry(r, c).im.abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn ch_acts_trivially_on_control_h() {
        let ch = ch_direct();
        // Columns 0 and 2 have the control (second slot) in H.
        assert_eq!(ch.entry(0, 0), Complex64::ONE);
        assert_eq!(ch.entry(2, 2), Complex64::ONE);
        assert_eq!(ch.entry(1, 0), Complex64::ZERO);
        assert_eq!(ch.entry(3, 2), Complex64::ZERO);
    }

    #[test]
    fn ch_applies_hadamard_on_control_v() {
        use crate::state::ModeId;
        let target = ModeId::from("t");
        let control = ModeId::from("c");
        let mut s = PureState::basis_state(&[
            (target.clone(), Polarization::H),
            (control.clone(), Polarization::V),
        ])
        .unwrap();
        s.apply_2q(&ch_direct(), &target, &control).unwrap();
        let r = FRAC_1_SQRT_2;
        let plus_v = s
            .amplitude(&[Polarization::H, Polarization::V])
            .unwrap();
        let minus_v = s
            .amplitude(&[Polarization::V, Polarization::V])
            .unwrap();
        assert!((plus_v.re - r).abs() < TOL);
        assert!((minus_v.re - r).abs() < TOL);
    }

    #[test]
    fn ch_decomposition_composes_to_ch_exactly() {
        let circuit = ch_decomposed();
        let composed = circuit.compose("CH?").unwrap();
        let direct = ch_direct();
        for i in 0..16 {
            assert!(
                (composed.entries()[i] - direct.entries()[i]).norm() < TOL,
                "entry {i}: {} vs {}",
                composed.entries()[i],
                direct.entries()[i]
            );
        }
    }

    #[test]
    fn ch_decomposition_uses_one_entangling_gate() {
        let circuit = ch_decomposed();
        assert_eq!(circuit.two_qubit_count(), 1);
        assert_eq!(circuit.single_qubit_count(), 4);
    }

    #[test]
    fn ch_decomposition_applies_like_the_direct_matrix() {
        use crate::state::ModeId;
        let a = ModeId::from("anc");
        let w = ModeId::from("w");
        let prep = |pols: [Polarization; 2]| {
            let mut s = PureState::basis_state(&[
                (a.clone(), pols[0]),
                (w.clone(), pols[1]),
            ])
            .unwrap();
            s.apply_1q(&hadamard(), &w).unwrap();
            s
        };
        for pols in [
            [Polarization::H, Polarization::H],
            [Polarization::H, Polarization::V],
            [Polarization::V, Polarization::H],
            [Polarization::V, Polarization::V],
        ] {
            let mut direct = prep(pols);
            direct.apply_2q(&ch_direct(), &a, &w).unwrap();
            let mut stepped = prep(pols);
            ch_decomposed().apply(&mut stepped, [&a, &w]).unwrap();
            assert!((direct.fidelity(&stepped).unwrap() - 1.0).abs() < TOL);
            // Fidelity forgives a global phase; the entries must agree too.
            for i in 0..4 {
                assert!((direct.amplitudes()[i] - stepped.amplitudes()[i]).norm() < TOL);
            }
        }
    }

    #[test]
    fn phase_equivalence_detects_matches_and_rejects_impostors() {
        let r = FRAC_1_SQRT_2;
        let minus_h = GateMatrix::single("-H", [[-r, -r], [-r, r]]);
        assert!(equivalent_up_to_phase(&hadamard(), &minus_h, TOL).unwrap());
        let mut phased = hadamard();
        for e in &mut phased.entries {
            *e *= Complex64::from_polar(1.0, 0.7);
        }
        assert!(equivalent_up_to_phase(&hadamard(), &phased, TOL).unwrap());
        assert!(!equivalent_up_to_phase(&hadamard(), &z(), TOL).unwrap());
        assert!(matches!(
            equivalent_up_to_phase(&hadamard(), &cnot(), TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cnot_truth_table() {
        let gate = cnot();
        // control V flips the target: columns 2 and 3 swap.
        assert_eq!(gate.entry(3, 2), Complex64::ONE);
        assert_eq!(gate.entry(2, 3), Complex64::ONE);
        assert_eq!(gate.entry(0, 0), Complex64::ONE);
        assert_eq!(gate.entry(1, 1), Complex64::ONE);
    }

    #[test]
    fn registry_json_lists_every_gate_with_its_shape() {
        let doc = registry_json();
        let obj = doc.as_object().unwrap();
        assert_eq!(obj.len(), registry().len());
        assert_eq!(obj["CH"]["control_slot"], "second");
        assert_eq!(obj["CNOT"]["control_slot"], "first");
        assert_eq!(obj["H"]["dim"], 2);
        assert_eq!(obj["CH"]["matrix"][0][0][0], 1.0);
    }

    #[test]
    fn lookup_finds_registry_gates() {
        assert_eq!(lookup("CH").unwrap().dim(), 4);
        assert!(lookup("Q").is_err());
    }
}
