//! State-vector simulator for parameterized circuits built from single-qubit
//! rotations and CNOTs.
//!
//! Rotations follow `R_P(θ) = exp(−iθP/2)` for `P ∈ {X, Y, Z}`. Circuits are
//! organized in repeated blocks: a rotation layer (RX, then RY, then RZ on
//! every qubit, each with a fresh parameter) followed by a nearest-neighbour
//! CNOT ladder. Qubit 0 is the most significant bit of the basis index, so
//! ancilla qubits appended at the end occupy the least significant bits.

use rayon::prelude::*;

use crate::error::CircuitError;
use crate::linalg::{herm_eig, partial_trace, ComplexVector, DensityMatrix, PureState, C64};

/// One gate: a parameterized rotation or a CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Rx { qubit: usize, param: usize },
    Ry { qubit: usize, param: usize },
    Rz { qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "RX",
            Gate::Ry { .. } => "RY",
            Gate::Rz { .. } => "RZ",
            Gate::Cnot { .. } => "CNOT",
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => qubit,
            Gate::Cnot { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cnot { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn param_index(&self) -> Option<usize> {
        match *self {
            Gate::Rx { param, .. } | Gate::Ry { param, .. } | Gate::Rz { param, .. } => {
                Some(param)
            }
            Gate::Cnot { .. } => None,
        }
    }

    /// The gate with its parameter index cleared; blocks must agree on this
    /// shape gate-for-gate.
    fn shape(&self) -> Gate {
        match *self {
            Gate::Rx { qubit, .. } => Gate::Rx { qubit, param: 0 },
            Gate::Ry { qubit, .. } => Gate::Ry { qubit, param: 0 },
            Gate::Rz { qubit, .. } => Gate::Rz { qubit, param: 0 },
            g => g,
        }
    }
}

/// Ordered gate list with block structure.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitLayout {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
    /// Index into `gates` where each repeated block starts.
    pub block_starts: Vec<usize>,
}

impl CircuitLayout {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n_qubits == 0 {
            return Err(CircuitError::BadGate("circuit needs at least one qubit".into()));
        }
        let mut used = vec![false; self.n_params];
        for g in &self.gates {
            if g.target() >= self.n_qubits {
                return Err(CircuitError::BadGate(format!(
                    "qubit {} out of range for width {}",
                    g.target(),
                    self.n_qubits
                )));
            }
            if let Some(c) = g.control() {
                if c >= self.n_qubits {
                    return Err(CircuitError::BadGate(format!(
                        "control {} out of range for width {}",
                        c, self.n_qubits
                    )));
                }
                if c == g.target() {
                    return Err(CircuitError::BadGate(format!(
                        "CNOT control equals target ({c})"
                    )));
                }
            }
            if let Some(p) = g.param_index() {
                if p >= self.n_params {
                    return Err(CircuitError::ParamIndexOutOfRange {
                        index: p,
                        len: self.n_params,
                    });
                }
                if used[p] {
                    return Err(CircuitError::BadGate(format!("parameter {p} used twice")));
                }
                used[p] = true;
            }
        }
        if let Some(unused) = used.iter().position(|&u| !u) {
            return Err(CircuitError::BadGate(format!("parameter {unused} never used")));
        }
        self.validate_blocks()
    }

    /// Blocks must carry an identical gate arrangement (same kinds on the
    /// same qubits, parameter indices aside).
    fn validate_blocks(&self) -> Result<(), CircuitError> {
        if self.block_starts.is_empty() {
            return if self.gates.is_empty() {
                Ok(())
            } else {
                Err(CircuitError::BadGate("gates present but no blocks declared".into()))
            };
        }
        if self.block_starts[0] != 0 {
            return Err(CircuitError::BadGate("first block must start at gate 0".into()));
        }
        let mut bounds = self.block_starts.clone();
        bounds.push(self.gates.len());
        let first: Vec<Gate> = self.gates[bounds[0]..bounds[1]].iter().map(Gate::shape).collect();
        for w in bounds.windows(2).skip(1) {
            let block: Vec<Gate> = self.gates[w[0]..w[1]].iter().map(Gate::shape).collect();
            if block != first {
                return Err(CircuitError::BadGate(
                    "blocks do not share an identical gate arrangement".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.param_index().is_some()).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.len() - self.rotation_count()
    }

    /// Line-oriented text form: one gate per line, preceded by a small
    /// header. `block` lines delimit the repeated blocks.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("qubits {}\n", self.n_qubits));
        out.push_str(&format!("params {}\n", self.n_params));
        let mut bounds = self.block_starts.clone();
        bounds.push(self.gates.len());
        for w in bounds.windows(2) {
            out.push_str("block\n");
            for g in &self.gates[w[0]..w[1]] {
                match *g {
                    Gate::Cnot { control, target } => {
                        out.push_str(&format!("CNOT {control} {target}\n"));
                    }
                    _ => {
                        out.push_str(&format!(
                            "{} {} {}\n",
                            g.kind(),
                            g.target(),
                            g.param_index().unwrap()
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut n_qubits = None;
        let mut n_params = None;
        let mut gates = Vec::new();
        let mut block_starts = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = ln + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_usize = |s: &str, what: &str| {
                s.parse::<usize>().map_err(|_| CircuitError::Parse {
                    line: lineno,
                    msg: format!("bad {what}: {s:?}"),
                })
            };
            match fields[0] {
                "qubits" if fields.len() == 2 => {
                    n_qubits = Some(parse_usize(fields[1], "qubit count")?)
                }
                "params" if fields.len() == 2 => {
                    n_params = Some(parse_usize(fields[1], "param count")?)
                }
                "block" if fields.len() == 1 => block_starts.push(gates.len()),
                "CNOT" if fields.len() == 3 => gates.push(Gate::Cnot {
                    control: parse_usize(fields[1], "control")?,
                    target: parse_usize(fields[2], "target")?,
                }),
                kind @ ("RX" | "RY" | "RZ") if fields.len() == 3 => {
                    let qubit = parse_usize(fields[1], "qubit")?;
                    let param = parse_usize(fields[2], "param index")?;
                    gates.push(match kind {
                        "RX" => Gate::Rx { qubit, param },
                        "RY" => Gate::Ry { qubit, param },
                        _ => Gate::Rz { qubit, param },
                    });
                }
                other => {
                    return Err(CircuitError::Parse {
                        line: lineno,
                        msg: format!("unrecognized line starting with {other:?}"),
                    })
                }
            }
        }
        let layout = CircuitLayout {
            n_qubits: n_qubits.ok_or(CircuitError::Parse {
                line: 0,
                msg: "missing qubits header".into(),
            })?,
            n_params: n_params.ok_or(CircuitError::Parse {
                line: 0,
                msg: "missing params header".into(),
            })?,
            gates,
            block_starts,
        };
        layout.validate()?;
        Ok(layout)
    }
}

/// Ordered real rotation angles in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector {
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self, CircuitError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CircuitError::BadGate(format!("non-finite angle at index {i}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: usize) -> Result<f64, CircuitError> {
        self.values.get(index).copied().ok_or(CircuitError::ParamIndexOutOfRange {
            index,
            len: self.values.len(),
        })
    }

    /// A copy with `values[index] += delta`.
    pub fn shifted(&self, index: usize, delta: f64) -> Result<Self, CircuitError> {
        if index >= self.values.len() {
            return Err(CircuitError::ParamIndexOutOfRange {
                index,
                len: self.values.len(),
            });
        }
        let mut values = self.values.clone();
        values[index] += delta;
        Ok(Self { values })
    }
}

fn apply_gate(amps: &mut [C64], gate: &Gate, params: &ParameterVector, n_qubits: usize) {
    match *gate {
        Gate::Cnot { control, target } => {
            let cbit = 1usize << (n_qubits - 1 - control);
            let tbit = 1usize << (n_qubits - 1 - target);
            for i in 0..amps.len() {
                if i & cbit != 0 && i & tbit == 0 {
                    amps.swap(i, i | tbit);
                }
            }
        }
        _ => {
            let qubit = gate.target();
            let theta = params.values[gate.param_index().unwrap()];
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let (m00, m01, m10, m11) = match gate {
                Gate::Rx { .. } => (
                    C64::new(c, 0.0),
                    C64::new(0.0, -s),
                    C64::new(0.0, -s),
                    C64::new(c, 0.0),
                ),
                Gate::Ry { .. } => (
                    C64::new(c, 0.0),
                    C64::new(-s, 0.0),
                    C64::new(s, 0.0),
                    C64::new(c, 0.0),
                ),
                Gate::Rz { .. } => (
                    C64::new(c, -s),
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(c, s),
                ),
                Gate::Cnot { .. } => unreachable!(),
            };
            let bit = 1usize << (n_qubits - 1 - qubit);
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let j = i | bit;
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = m00 * a + m01 * b;
                    amps[j] = m10 * a + m11 * b;
                }
            }
        }
    }
}

/// Applies the circuit gate by gate; the output stays normalized because
/// every gate is unitary.
pub fn apply_circuit(
    layout: &CircuitLayout,
    params: &ParameterVector,
    input: &PureState,
) -> Result<PureState, CircuitError> {
    if input.n_qubits() != layout.n_qubits {
        return Err(CircuitError::WidthMismatch {
            expected: layout.n_qubits,
            got: input.n_qubits(),
        });
    }
    if params.len() != layout.n_params {
        return Err(CircuitError::ParamCountMismatch {
            expected: layout.n_params,
            got: params.len(),
        });
    }
    let mut amps: Vec<C64> = input.amplitudes().iter().copied().collect();
    for gate in &layout.gates {
        apply_gate(&mut amps, gate, params, layout.n_qubits);
    }
    Ok(PureState::new_unchecked(ComplexVector::from_vec(amps)))
}

/// Runs `|0…0⟩` through the circuit and traces out the trailing ancilla
/// qubits, producing the generated mixed state on the data register.
pub fn generated_state(
    layout: &CircuitLayout,
    theta: &ParameterVector,
    n_data: usize,
    n_ancilla: usize,
) -> Result<DensityMatrix, crate::Error> {
    if layout.n_qubits != n_data + n_ancilla {
        return Err(CircuitError::WidthMismatch {
            expected: n_data + n_ancilla,
            got: layout.n_qubits,
        }
        .into());
    }
    let out = apply_circuit(layout, theta, &PureState::basis_state(layout.n_qubits, 0))?;
    if n_ancilla == 0 {
        return Ok(out.density());
    }
    Ok(partial_trace(&out.density(), &[n_data, n_ancilla], 0)?)
}

/// Probability that the discriminator's ancilla measures 0 when the pure
/// input `psi` (on the data register) enters with the ancilla in `|0⟩`.
pub fn discriminator_accept_prob_pure(
    layout: &CircuitLayout,
    gamma: &ParameterVector,
    psi: &PureState,
) -> Result<f64, CircuitError> {
    if layout.n_qubits != psi.n_qubits() + 1 {
        return Err(CircuitError::WidthMismatch {
            expected: psi.n_qubits() + 1,
            got: layout.n_qubits,
        });
    }
    if gamma.len() != layout.n_params {
        return Err(CircuitError::ParamCountMismatch {
            expected: layout.n_params,
            got: gamma.len(),
        });
    }
    let dim = psi.dim();
    let mut amps = vec![C64::new(0.0, 0.0); 2 * dim];
    for (i, a) in psi.amplitudes().iter().enumerate() {
        amps[2 * i] = *a; // ancilla is the least significant bit
    }
    for gate in &layout.gates {
        apply_gate(&mut amps, gate, gamma, layout.n_qubits);
    }
    Ok(amps.iter().step_by(2).map(|a| a.norm_sqr()).sum::<f64>().clamp(0.0, 1.0))
}

/// Ancilla-0 probability for a mixed input: the input is decomposed into
/// pure eigencomponents, each run through the circuit, and the outcomes
/// averaged by eigenvalue. Identical to evaluating the measurement operator
/// on `input ⊗ |0⟩⟨0|` directly, without forming the larger matrix.
pub fn discriminator_accept_prob(
    layout: &CircuitLayout,
    gamma: &ParameterVector,
    input: &DensityMatrix,
) -> Result<f64, crate::Error> {
    if layout.n_qubits != input.n_qubits() + 1 {
        return Err(CircuitError::WidthMismatch {
            expected: input.n_qubits() + 1,
            got: layout.n_qubits,
        }
        .into());
    }
    let (eigs, vecs) = herm_eig(input.hermitian());
    let mut acc = 0.0;
    for (k, &w) in eigs.iter().enumerate() {
        if w <= 1e-14 {
            continue;
        }
        let psi = PureState::new_unchecked(vecs.column(k).clone_owned());
        acc += w * discriminator_accept_prob_pure(layout, gamma, &psi)?;
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// Problem instance for adversarial circuit training.
#[derive(Clone, Debug)]
pub struct GanProblem {
    pub target: DensityMatrix,
    pub n_ancilla_gen: usize,
    /// `(P(G), P(R))`: priors on presenting the generated and the real state.
    pub priors: (f64, f64),
}

impl GanProblem {
    /// Equal priors; `n_ancilla_gen` must be 0 for pure targets and at most
    /// the data-qubit count otherwise.
    pub fn new(target: DensityMatrix, n_ancilla_gen: usize) -> Result<Self, CircuitError> {
        let p = Self {
            target,
            n_ancilla_gen,
            priors: (0.5, 0.5),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n_ancilla_gen > self.target.n_qubits() {
            return Err(CircuitError::BadRestriction(format!(
                "{} ancillas exceed {} data qubits",
                self.n_ancilla_gen,
                self.target.n_qubits()
            )));
        }
        let purity = crate::linalg::trace_inner(self.target.hermitian(), self.target.hermitian())
            .map_err(|e| CircuitError::BadGate(e.to_string()))?;
        if self.n_ancilla_gen > 0 && purity > 1.0 - 1e-9 {
            return Err(CircuitError::BadRestriction(
                "pure targets take zero generator ancillas".into(),
            ));
        }
        let (pg, pr) = self.priors;
        if !(0.0..=1.0).contains(&pg) || !(0.0..=1.0).contains(&pr) || (pg + pr - 1.0).abs() > 1e-12
        {
            return Err(CircuitError::BadGate(format!("priors ({pg}, {pr}) must sum to 1")));
        }
        Ok(())
    }

    pub fn n_data(&self) -> usize {
        self.target.n_qubits()
    }

    pub fn gen_width(&self) -> usize {
        self.n_data() + self.n_ancilla_gen
    }
}

/// Adversarial loss
/// `P(R)·Tr(M_D(ρ⊗|0⟩⟨0|)) + P(G)·Tr((I−M_D)(σ_G⊗|0⟩⟨0|))`:
/// the prior-weighted probability of accepting the target plus that of
/// rejecting the generated state. Always in [0, 1], and exactly ½ for every
/// discriminator once the generator reproduces the target.
pub fn qugan_loss(
    gen_layout: &CircuitLayout,
    theta: &ParameterVector,
    disc_layout: &CircuitLayout,
    gamma: &ParameterVector,
    problem: &GanProblem,
) -> Result<f64, crate::Error> {
    let accept_target = discriminator_accept_prob(disc_layout, gamma, &problem.target)?;
    let accept_generated = if problem.n_ancilla_gen == 0 {
        let psi =
            apply_circuit(gen_layout, theta, &PureState::basis_state(gen_layout.n_qubits, 0))?;
        discriminator_accept_prob_pure(disc_layout, gamma, &psi)?
    } else {
        let sigma_g = generated_state(gen_layout, theta, problem.n_data(), problem.n_ancilla_gen)?;
        discriminator_accept_prob(disc_layout, gamma, &sigma_g)?
    };
    let (pg, pr) = problem.priors;
    Ok((pr * accept_target + pg * (1.0 - accept_generated)).clamp(0.0, 1.0))
}

/// Exact gradient of a loss in one rotation angle via evaluations at
/// ±π/2 shifts: `(L(θᵢ+π/2) − L(θᵢ−π/2))/2`.
pub fn parameter_shift_gradient<F>(
    loss_evaluator: F,
    params: &ParameterVector,
    index: usize,
) -> Result<f64, crate::Error>
where
    F: Fn(&ParameterVector) -> Result<f64, crate::Error>,
{
    let plus = loss_evaluator(&params.shifted(index, std::f64::consts::FRAC_PI_2)?)?;
    let minus = loss_evaluator(&params.shifted(index, -std::f64::consts::FRAC_PI_2)?)?;
    Ok((plus - minus) / 2.0)
}

/// Full parameter-shift gradient; the per-index evaluations are independent
/// and run in parallel.
pub fn parameter_shift_gradient_all<F>(
    loss_evaluator: F,
    params: &ParameterVector,
) -> Result<Vec<f64>, crate::Error>
where
    F: Fn(&ParameterVector) -> Result<f64, crate::Error> + Sync,
{
    (0..params.len())
        .into_par_iter()
        .map(|i| parameter_shift_gradient(&loss_evaluator, params, i))
        .collect()
}

/// CNOT connectivity restriction for generator layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnotRestriction {
    /// Single nearest-neighbour ladder spanning all qubits.
    None,
    /// Two independent ladders confined to the leading `n_a` and trailing
    /// `n_b` qubits; no CNOT crosses the cut.
    Bipartite { n_a: usize, n_b: usize },
}

/// Builds the generator ansatz: each block is a rotation layer over every
/// qubit followed by the CNOT entangling layer the restriction allows.
pub fn build_generator_layout(
    n_data: usize,
    n_ancilla: usize,
    blocks: usize,
    restriction: CnotRestriction,
) -> Result<CircuitLayout, CircuitError> {
    let width = n_data + n_ancilla;
    if width == 0 {
        return Err(CircuitError::BadGate("generator needs at least one qubit".into()));
    }
    let ladders: Vec<(usize, usize)> = match restriction {
        CnotRestriction::None => vec![(0, width)],
        CnotRestriction::Bipartite { n_a, n_b } => {
            if n_a == 0 || n_b == 0 {
                return Err(CircuitError::BadRestriction(
                    "both sides of the bipartition need at least one qubit".into(),
                ));
            }
            if n_ancilla != 0 {
                return Err(CircuitError::BadRestriction(
                    "bipartite restriction applies to ancilla-free generators".into(),
                ));
            }
            if n_a + n_b != n_data {
                return Err(CircuitError::BadRestriction(format!(
                    "bipartition {n_a}+{n_b} does not cover {n_data} qubits"
                )));
            }
            vec![(0, n_a), (n_a, n_a + n_b)]
        }
    };
    let mut gates = Vec::new();
    let mut block_starts = Vec::new();
    let mut param = 0;
    for _ in 0..blocks {
        block_starts.push(gates.len());
        for qubit in 0..width {
            gates.push(Gate::Rx { qubit, param });
            gates.push(Gate::Ry { qubit, param: param + 1 });
            gates.push(Gate::Rz { qubit, param: param + 2 });
            param += 3;
        }
        for &(lo, hi) in &ladders {
            for q in lo..hi.saturating_sub(1) {
                gates.push(Gate::Cnot { control: q, target: q + 1 });
            }
        }
    }
    let layout = CircuitLayout {
        n_qubits: width,
        gates,
        n_params: param,
        block_starts,
    };
    layout.validate()?;
    Ok(layout)
}

/// Builds the discriminator ansatz on `n_data + 1` qubits (the extra qubit
/// is the measured ancilla): rotation layer over the full width, then a
/// CNOT ladder whose last gate targets the ancilla.
pub fn build_discriminator_layout(
    n_data: usize,
    blocks: usize,
) -> Result<CircuitLayout, CircuitError> {
    build_generator_layout(n_data + 1, 0, blocks, CnotRestriction::None)
}
