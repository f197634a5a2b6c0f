//! Expansion schemes that grow a W state one or many qubits at a time.
//!
//! The primitive is a two-qubit block acting on one W-state qubit (the
//! "input") and one fresh horizontally polarized ancilla: a controlled
//! Hadamard on the ancilla, controlled by the input, followed by a CNOT
//! on the input, controlled by the ancilla. On |HH> the block is the
//! identity; on input V it spreads the excitation across both photons,
//! leaving amplitude imbalance that a polarization-dependent-loss (PDL)
//! element on the remaining qubits equalizes. Post-selecting on no loss
//! yields the next W state, and the squared norm after the PDL step is
//! exactly the success probability.
//!
//! Schemes differ in where blocks are placed and which modes pass
//! through PDL: [`cascade_step`] grows by one qubit, [`parallel_double`]
//! doubles deterministically, [`parallel_partial`] covers sizes in
//! between, and [`odd_add_one`] / [`odd_project`] bridge even and odd
//! sizes. [`verify_back`] runs the doubling circuit in reverse to test
//! whether a state is a faithfully expanded W state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates;
use crate::state::{ModeId, Polarization, PureState, MAX_QUBITS};

/// Acceptance tolerance for [`verify_back`]: ancilla leakage above this,
/// or residual infidelity above this, rejects the candidate.
pub const VERIFY_TOL: f64 = 1e-9;

/// An ordered, duplicate-free list of mode labels carrying (or about to
/// carry) a W state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WSpec {
    modes: Vec<ModeId>,
}

impl WSpec {
    pub fn new(modes: Vec<ModeId>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let mut seen = std::collections::HashSet::new();
        for mode in &modes {
            if !seen.insert(mode.clone()) {
                return Err(Error::DuplicateMode(mode.clone()));
            }
        }
        Ok(WSpec { modes })
    }

    /// Modes labeled "1" through "n".
    pub fn numbered(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("a W state needs n >= 1".into()));
        }
        WSpec::new((1..=n).map(ModeId::from).collect())
    }

    pub fn n(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }
}

/// Result of running one expansion scheme.
#[derive(Debug, Clone)]
pub struct ExpansionOutcome {
    /// Renormalized post-selected state.
    pub state: PureState,
    /// Probability that the post-selection succeeds.
    pub success_probability: f64,
    /// Modes of the expanded state.
    pub target: WSpec,
    /// Fidelity of `state` against the ideal W state on `target`.
    pub fidelity: f64,
}

/// The uniform-superposition W state on the given modes: each basis term
/// has exactly one V, amplitude 1/sqrt(n). For n = 1 this is just |V>.
pub fn ideal_w(spec: &WSpec) -> Result<PureState> {
    let n = spec.n();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::ZERO; 1 << n];
    for i in 0..n {
        amps[1 << i] = amp;
    }
    PureState::from_amplitudes(spec.modes().to_vec(), amps)
}

/// Applies the expansion block in place: CH with the ancilla as target
/// and the input as control, then CNOT with the ancilla as control.
/// Sends |H H> to itself, and input V with ancilla H to the Bell state
/// (|HV> + |VH>)/sqrt(2) across (ancilla, input).
pub fn expansion_block(state: &mut PureState, ancilla: &ModeId, input: &ModeId) -> Result<()> {
    state.apply_2q(&gates::ch_direct(), ancilla, input)?;
    state.apply_2q(&gates::cnot(), ancilla, input)
}

fn fresh_ancilla(input: &ModeId, taken: &[ModeId]) -> ModeId {
    let mut label = format!("{input}a");
    while taken.iter().any(|m| m.as_str() == label) {
        label.push('a');
    }
    ModeId::new(label)
}

fn check_input(w: &PureState, spec: &WSpec) -> Result<()> {
    if w.modes() != spec.modes() {
        return Err(Error::ModeSetMismatch);
    }
    let n2 = w.norm_squared();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm_sq: n2 });
    }
    Ok(())
}

fn finish(mut state: PureState) -> Result<ExpansionOutcome> {
    let success_probability = state.renormalize()?;
    let target = WSpec::new(state.modes().to_vec())?;
    let fidelity = state.fidelity(&ideal_w(&target)?)?;
    Ok(ExpansionOutcome {
        state,
        success_probability,
        target,
        fidelity,
    })
}

/// Grows W_n to W_(n+1): one block on the first mode with a fresh
/// ancilla, then PDL on the n-1 untouched modes. Succeeds with
/// probability (n+1)/(2n); the new mode list is the old one plus the
/// ancilla.
pub fn cascade_step(w: PureState, spec: &WSpec) -> Result<ExpansionOutcome> {
    check_input(&w, spec)?;
    let input = spec.modes()[0].clone();
    let ancilla = fresh_ancilla(&input, w.modes());
    let mut state = w.tensor(&PureState::basis_state(&[(
        ancilla.clone(),
        Polarization::H,
    )])?)?;
    expansion_block(&mut state, &ancilla, &input)?;
    state.pdl_filter(&spec.modes()[1..])?;
    finish(state)
}

/// Repeats [`cascade_step`] `steps` times starting from the ideal W state
/// of size `start_n`, multiplying the per-step success probabilities.
pub fn cascade_expand(start_n: usize, steps: usize) -> Result<ExpansionOutcome> {
    if steps == 0 {
        return Err(Error::InvalidParameter("cascade needs at least one step".into()));
    }
    if start_n + steps > MAX_QUBITS {
        return Err(Error::TooManyQubits(start_n + steps));
    }
    let mut spec = WSpec::numbered(start_n)?;
    let mut state = ideal_w(&spec)?;
    let mut cumulative = 1.0;
    let mut outcome = None;
    for _ in 0..steps {
        let step = cascade_step(state, &spec)?;
        cumulative *= step.success_probability;
        spec = step.target.clone();
        state = step.state.clone();
        outcome = Some(step);
    }
    let mut outcome = outcome.expect("steps >= 1");
    outcome.success_probability = cumulative;
    Ok(outcome)
}

/// Pairing of W-state modes with fresh ancillas; `untouched` modes get no
/// block and go through PDL instead.
#[derive(Debug, Clone)]
pub struct ParallelLayout {
    pairs: Vec<(ModeId, ModeId)>,
    untouched: Vec<ModeId>,
}

impl ParallelLayout {
    pub fn new(pairs: Vec<(ModeId, ModeId)>, untouched: Vec<ModeId>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidLayout("at least one block is required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let all = pairs
            .iter()
            .flat_map(|(i, a)| [i, a])
            .chain(untouched.iter());
        for mode in all {
            if !seen.insert(mode.clone()) {
                return Err(Error::InvalidLayout(format!(
                    "mode `{mode}` appears twice in the layout"
                )));
            }
        }
        Ok(ParallelLayout { pairs, untouched })
    }

    /// Every spec mode gets a block; ancilla labels derive from inputs.
    pub fn full(spec: &WSpec) -> Self {
        let mut taken = spec.modes().to_vec();
        let mut pairs = Vec::with_capacity(spec.n());
        for input in spec.modes() {
            let ancilla = fresh_ancilla(input, &taken);
            taken.push(ancilla.clone());
            pairs.push((input.clone(), ancilla));
        }
        ParallelLayout { pairs, untouched: Vec::new() }
    }

    /// Blocks on the first `k` spec modes, the rest untouched. Requires
    /// 1 <= k <= n; k = n is the same as [`ParallelLayout::full`].
    pub fn leading(spec: &WSpec, k: usize) -> Result<Self> {
        if k == 0 || k > spec.n() {
            return Err(Error::InvalidLayout(format!(
                "k must be in 1..={}, got {k}",
                spec.n()
            )));
        }
        let mut layout = ParallelLayout::full(spec);
        layout.untouched = layout.pairs.split_off(k).into_iter().map(|(i, _)| i).collect();
        Ok(layout)
    }

    pub fn pairs(&self) -> &[(ModeId, ModeId)] {
        &self.pairs
    }

    pub fn untouched(&self) -> &[ModeId] {
        &self.untouched
    }

    fn check_against(&self, spec: &WSpec) -> Result<()> {
        let mut covered: Vec<&ModeId> = self
            .pairs
            .iter()
            .map(|(input, _)| input)
            .chain(self.untouched.iter())
            .collect();
        covered.sort();
        let mut expected: Vec<&ModeId> = spec.modes().iter().collect();
        expected.sort();
        if covered != expected {
            return Err(Error::InvalidLayout(
                "layout inputs and untouched modes must partition the W-state modes".into(),
            ));
        }
        for (_, ancilla) in &self.pairs {
            if spec.modes().contains(ancilla) {
                return Err(Error::InvalidLayout(format!(
                    "ancilla `{ancilla}` is already a W-state mode"
                )));
            }
        }
        Ok(())
    }
}

fn run_blocks(w: PureState, layout: &ParallelLayout) -> Result<PureState> {
    let mut state = w;
    for (input, ancilla) in layout.pairs() {
        state = state.tensor(&PureState::basis_state(&[(
            ancilla.clone(),
            Polarization::H,
        )])?)?;
        expansion_block(&mut state, ancilla, input)?;
    }
    Ok(state)
}

/// Doubles W_n to W_2n with one block per mode and no PDL at all. The
/// amplitude imbalance cancels globally, so this succeeds with
/// probability 1.
pub fn parallel_double(w: PureState, spec: &WSpec, layout: &ParallelLayout) -> Result<ExpansionOutcome> {
    check_input(&w, spec)?;
    layout.check_against(spec)?;
    if !layout.untouched().is_empty() {
        return Err(Error::InvalidLayout(
            "doubling requires a block on every mode; use parallel_partial otherwise".into(),
        ));
    }
    finish(run_blocks(w, layout)?)
}

/// Expands W_n to W_(n+k) with blocks on `k < n` modes and PDL on the
/// remaining n-k. Succeeds with probability (n+k)/(2n).
pub fn parallel_partial(w: PureState, spec: &WSpec, layout: &ParallelLayout) -> Result<ExpansionOutcome> {
    check_input(&w, spec)?;
    layout.check_against(spec)?;
    if layout.untouched().is_empty() {
        return Err(Error::InvalidLayout(
            "no untouched modes; use parallel_double for a full layout".into(),
        ));
    }
    let mut state = run_blocks(w, layout)?;
    state.pdl_filter(layout.untouched())?;
    finish(state)
}

/// Takes an even-sized W_2N to W_(2N+1) by a single cascade step, with
/// success probability 1/2 + 1/(4N).
pub fn odd_add_one(w: PureState, spec: &WSpec) -> Result<ExpansionOutcome> {
    if !spec.n().is_multiple_of(2) {
        return Err(Error::OddModeCount(spec.n()));
    }
    cascade_step(w, spec)
}

/// Takes an even-sized W_(2N+2) to W_(2N+1) by measuring the last mode.
/// Finding H succeeds with probability 1 - 1/(2N+2) and leaves the W
/// state on the remaining modes; finding V collapses the rest to a
/// product state, returned as the failure branch.
pub fn odd_project(w: PureState, spec: &WSpec) -> Result<(ExpansionOutcome, PureState)> {
    check_input(&w, spec)?;
    if !spec.n().is_multiple_of(2) {
        return Err(Error::OddModeCount(spec.n()));
    }
    if spec.n() < 2 {
        return Err(Error::InvalidParameter(
            "projection needs at least two modes".into(),
        ));
    }
    let measured = spec.modes().last().expect("n >= 2").clone();
    let (h_branch, v_branch) = w.measure(&measured, true)?;
    let target = WSpec::new(h_branch.post_state.modes().to_vec())?;
    let fidelity = h_branch.post_state.fidelity(&ideal_w(&target)?)?;
    Ok((
        ExpansionOutcome {
            state: h_branch.post_state,
            success_probability: h_branch.probability,
            target,
            fidelity,
        },
        v_branch.post_state,
    ))
}

/// Checks whether `candidate` is a W state produced by doubling: the
/// first half of `spec` is read as original modes, the second half as
/// their ancillas in order. Each block is inverted (CNOT, then CH), the
/// ancillas must then all be H up to probability leakage `tol`, and
/// after projecting them out the residue must match the ideal W state on
/// the original modes with infidelity at most `tol`.
pub fn verify_back(candidate: &PureState, spec: &WSpec, tol: f64) -> Result<bool> {
    if candidate.modes() != spec.modes() {
        return Err(Error::ModeSetMismatch);
    }
    if !spec.n().is_multiple_of(2) {
        return Err(Error::OddModeCount(spec.n()));
    }
    let n = spec.n() / 2;
    let inputs = &spec.modes()[..n];
    let ancillas = &spec.modes()[n..];
    let mut work = candidate.clone();
    let n2 = work.norm_squared();
    if (n2 - 1.0).abs() > tol {
        return Err(Error::NotNormalized { norm_sq: n2 });
    }
    for (input, ancilla) in inputs.iter().zip(ancillas) {
        work.apply_2q(&gates::cnot(), ancilla, input)?;
        work.apply_2q(&gates::ch_direct(), ancilla, input)?;
    }
    for ancilla in ancillas {
        if work.probability(ancilla, Polarization::V)? > tol {
            return Ok(false);
        }
        let (h_branch, _) = work.measure(ancilla, true)?;
        work = h_branch.post_state;
    }
    let residual_target = ideal_w(&WSpec::new(inputs.to_vec())?)?;
    Ok(work.fidelity(&residual_target)? >= 1.0 - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::TOL;

    fn m(label: &str) -> ModeId {
        ModeId::from(label)
    }

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < TOL, "{a} != {b}");
    }

    #[test]
    fn ideal_w_is_uniform_single_excitation() {
        let spec = WSpec::numbered(3).unwrap();
        let w = ideal_w(&spec).unwrap();
        assert_close(w.norm_squared(), 1.0);
        let amp = 1.0 / 3f64.sqrt();
        for (index, a) in w.amplitudes().iter().enumerate() {
            if index.count_ones() == 1 {
                assert_close(a.re, amp);
            } else {
                assert!(a.norm() < TOL);
            }
        }
    }

    #[test]
    fn ideal_w_of_one_mode_is_v() {
        let spec = WSpec::numbered(1).unwrap();
        let w = ideal_w(&spec).unwrap();
        assert_eq!(w.amplitudes()[1], Complex64::ONE);
    }

    #[test]
    fn expansion_block_truth_table() {
        let anc = m("anc");
        let inp = m("inp");
        let run = |a: Polarization, b: Polarization| {
            let mut s = PureState::basis_state(&[(anc.clone(), a), (inp.clone(), b)]).unwrap();
            expansion_block(&mut s, &anc, &inp).unwrap();
            s
        };
        use Polarization::{H, V};
        // H ancilla, H input: untouched.
        let s = run(H, H);
        assert_close(s.amplitude(&[H, H]).unwrap().re, 1.0);
        // H ancilla, V input: symmetric Bell state.
        let s = run(H, V);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(s.amplitude(&[H, V]).unwrap().re, r);
        assert_close(s.amplitude(&[V, H]).unwrap().re, r);
        // V ancilla, H input: both flip to V.
        let s = run(V, H);
        assert_close(s.amplitude(&[V, V]).unwrap().re, 1.0);
        // V ancilla, V input: antisymmetric Bell state.
        let s = run(V, V);
        assert_close(s.amplitude(&[H, V]).unwrap().re, r);
        assert_close(s.amplitude(&[V, H]).unwrap().re, -r);
    }

    #[test]
    fn cascade_step_w2_to_w3() {
        let spec = WSpec::numbered(2).unwrap();
        let out = cascade_step(ideal_w(&spec).unwrap(), &spec).unwrap();
        assert_close(out.success_probability, 0.75);
        assert_close(out.fidelity, 1.0);
        assert_eq!(out.target.modes(), &[m("1"), m("2"), m("1a")]);
        assert_close(out.state.fidelity(&ideal_w(&out.target).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn cascade_step_probability_follows_closed_form() {
        for n in 1..=6 {
            let spec = WSpec::numbered(n).unwrap();
            let out = cascade_step(ideal_w(&spec).unwrap(), &spec).unwrap();
            let expect = (n as f64 + 1.0) / (2.0 * n as f64);
            assert_close(out.success_probability, expect);
            assert_close(out.fidelity, 1.0);
        }
    }

    #[test]
    fn cascade_reuses_the_first_mode_and_never_collides_labels() {
        let out = cascade_expand(1, 3).unwrap();
        assert_eq!(
            out.target.modes(),
            &[m("1"), m("1a"), m("1aa"), m("1aaa")]
        );
        assert_close(out.fidelity, 1.0);
    }

    #[test]
    fn cascade_from_single_photon_matches_closed_form() {
        // Success of k steps from W_1 telescopes to (k+1)/2^k.
        for k in 1..=5 {
            let out = cascade_expand(1, k).unwrap();
            let expect = (k as f64 + 1.0) / 2f64.powi(k as i32);
            assert_close(out.success_probability, expect);
        }
    }

    #[test]
    fn cascade_rejects_zero_steps_and_oversize_targets() {
        assert!(matches!(
            cascade_expand(2, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            cascade_expand(20, 5),
            Err(Error::TooManyQubits(_))
        ));
    }

    #[test]
    fn cascade_step_rejects_unnormalized_input() {
        let spec = WSpec::numbered(2).unwrap();
        let mut w = ideal_w(&spec).unwrap();
        w.pdl_filter(&[m("1")]).unwrap();
        assert!(matches!(
            cascade_step(w, &spec),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn parallel_double_is_deterministic() {
        for n in 1..=5 {
            let spec = WSpec::numbered(n).unwrap();
            let layout = ParallelLayout::full(&spec);
            let out = parallel_double(ideal_w(&spec).unwrap(), &spec, &layout).unwrap();
            assert_close(out.success_probability, 1.0);
            assert_close(out.fidelity, 1.0);
            assert_eq!(out.target.n(), 2 * n);
        }
    }

    #[test]
    fn parallel_partial_probability_follows_closed_form() {
        for n in 2..=5 {
            for k in 1..n {
                let spec = WSpec::numbered(n).unwrap();
                let layout = ParallelLayout::leading(&spec, k).unwrap();
                let out = parallel_partial(ideal_w(&spec).unwrap(), &spec, &layout).unwrap();
                let expect = (n + k) as f64 / (2.0 * n as f64);
                assert_close(out.success_probability, expect);
                assert_close(out.fidelity, 1.0);
                assert_eq!(out.target.n(), n + k);
            }
        }
    }

    #[test]
    fn layout_validation_catches_overlaps_and_gaps() {
        let spec = WSpec::numbered(3).unwrap();
        let w = || ideal_w(&spec).unwrap();
        // Ancilla colliding with a W mode.
        let bad = ParallelLayout::new(
            vec![(m("1"), m("2"))],
            vec![(m("3"))],
        );
        assert!(bad.is_err() || parallel_partial(w(), &spec, &bad.unwrap()).is_err());
        // Missing mode "3".
        let gap = ParallelLayout::new(vec![(m("1"), m("1a")), (m("2"), m("2a"))], vec![]).unwrap();
        assert!(matches!(
            parallel_double(w(), &spec, &gap),
            Err(Error::InvalidLayout(_))
        ));
        // Full layout passed to the partial scheme.
        let full = ParallelLayout::full(&spec);
        assert!(matches!(
            parallel_partial(w(), &spec, &full),
            Err(Error::InvalidLayout(_))
        ));
    }

    #[test]
    fn odd_add_one_matches_closed_form() {
        for half in 1..=4 {
            let spec = WSpec::numbered(2 * half).unwrap();
            let out = odd_add_one(ideal_w(&spec).unwrap(), &spec).unwrap();
            let expect = 0.5 + 1.0 / (4.0 * half as f64);
            assert_close(out.success_probability, expect);
            assert_close(out.fidelity, 1.0);
            assert_eq!(out.target.n(), 2 * half + 1);
        }
        let spec = WSpec::numbered(3).unwrap();
        assert!(matches!(
            odd_add_one(ideal_w(&spec).unwrap(), &spec),
            Err(Error::OddModeCount(3))
        ));
    }

    #[test]
    fn odd_project_matches_closed_form() {
        for half in 1..=4 {
            let size = 2 * half + 2;
            let spec = WSpec::numbered(size).unwrap();
            let (out, failure) = odd_project(ideal_w(&spec).unwrap(), &spec).unwrap();
            let expect = 1.0 - 1.0 / (2.0 * (half as f64 + 1.0));
            assert_close(out.success_probability, expect);
            assert_close(out.fidelity, 1.0);
            assert_eq!(out.target.n(), size - 1);
            // The failure branch is the all-H product state on the rest.
            let all_h: Vec<(ModeId, Polarization)> = out
                .target
                .modes()
                .iter()
                .map(|mode| (mode.clone(), Polarization::H))
                .collect();
            let product = PureState::basis_state(&all_h).unwrap();
            assert_close(failure.fidelity(&product).unwrap(), 1.0);
        }
    }

    #[test]
    fn verify_back_accepts_doubled_w_states() {
        for n in 1..=4 {
            let spec = WSpec::numbered(n).unwrap();
            let layout = ParallelLayout::full(&spec);
            let out = parallel_double(ideal_w(&spec).unwrap(), &spec, &layout).unwrap();
            assert!(verify_back(&out.state, &out.target, VERIFY_TOL).unwrap());
        }
    }

    #[test]
    fn verify_back_rejects_non_w_states() {
        // A uniform product of Bell pairs is not a doubled W state.
        let spec = WSpec::new(vec![m("1"), m("2"), m("1a"), m("2a")]).unwrap();
        let mut s = PureState::basis_state(&[
            (m("1"), Polarization::H),
            (m("2"), Polarization::H),
            (m("1a"), Polarization::H),
            (m("2a"), Polarization::H),
        ])
        .unwrap();
        s.apply_1q(&gates::hadamard(), &m("1")).unwrap();
        s.apply_2q(&gates::cnot(), &m("1"), &m("1a")).unwrap();
        assert!(!verify_back(&s, &spec, VERIFY_TOL).unwrap());

        // GHZ on four modes: survives the ancilla check differently but
        // must still be rejected by one gate or the other.
        let mut ghz = PureState::basis_state(&[
            (m("1"), Polarization::H),
            (m("2"), Polarization::H),
            (m("1a"), Polarization::H),
            (m("2a"), Polarization::H),
        ])
        .unwrap();
        ghz.apply_1q(&gates::hadamard(), &m("1")).unwrap();
        for target in [m("2"), m("1a"), m("2a")] {
            ghz.apply_2q(&gates::cnot(), &m("1"), &target).unwrap();
        }
        assert!(!verify_back(&ghz, &spec, VERIFY_TOL).unwrap());
    }

    #[test]
    fn verify_back_requires_even_mode_count() {
        let spec = WSpec::numbered(3).unwrap();
        let w = ideal_w(&spec).unwrap();
        assert!(matches!(
            verify_back(&w, &spec, VERIFY_TOL),
            Err(Error::OddModeCount(3))
        ));
    }

    #[test]
    fn doubling_then_projecting_round_trips() {
        // W_3 -> W_6 by doubling, then W_6 -> W_5 by projection.
        let spec = WSpec::numbered(3).unwrap();
        let layout = ParallelLayout::full(&spec);
        let doubled = parallel_double(ideal_w(&spec).unwrap(), &spec, &layout).unwrap();
        assert_close(doubled.success_probability, 1.0);
        let (out, _) = odd_project(doubled.state, &doubled.target).unwrap();
        assert_close(out.success_probability, 1.0 - 1.0 / 6.0);
        assert_close(out.fidelity, 1.0);
        assert_eq!(out.target.n(), 5);
    }

    #[test]
    fn pre_pdl_cascade_amplitudes_are_the_weighted_w_state() {
        // Before equalization the new state has n-1 amplitudes 1/sqrt(n)
        // and two amplitudes 1/sqrt(2n).
        for n in 2..=5 {
            let spec = WSpec::numbered(n).unwrap();
            let w = ideal_w(&spec).unwrap();
            let input = spec.modes()[0].clone();
            let ancilla = m(&format!("{input}a"));
            let mut state = w
                .tensor(&PureState::basis_state(&[(ancilla.clone(), Polarization::H)]).unwrap())
                .unwrap();
            expansion_block(&mut state, &ancilla, &input).unwrap();
            let mut big = 0;
            let mut small = 0;
            for a in state.amplitudes() {
                if a.norm() < TOL {
                    continue;
                }
                if (a.norm() - 1.0 / (n as f64).sqrt()).abs() < TOL {
                    big += 1;
                } else if (a.norm() - 1.0 / (2.0 * n as f64).sqrt()).abs() < TOL {
                    small += 1;
                } else {
                    panic!("unexpected amplitude {a}");
                }
            }
            assert_eq!((big, small), (n - 1, 2));
        }
    }
}
