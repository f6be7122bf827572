"""Statevector simulation with lossy LP gates.

A lossy gate is non-trace-preserving: each basis block |ab> of the gate's
qubit pair survives with probability p_ab and picks up the LP phase
theta_ab.  Shots that lose population are discarded; survivors are
renormalized.  Two equivalent implementations are provided, a direct
renormalized-loss update and an ancilla-rotation construction that only
uses unitaries plus a projective measurement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .circuit import CompilationError, CompiledCircuit, apply_matrix
from .physics import LPChannel, PhysicsContext, haar_mean_loss


@dataclass(frozen=True)
class RngSpec:
    seed: int = 0
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(self.stream,)))


@dataclass
class ShotOutcome:
    survived: bool
    state: np.ndarray | None = None
    lost_at: int | None = None

    def __post_init__(self):
        if self.survived == (self.state is None):
            raise ValueError("a surviving shot carries a state, a lost one does not")


def num_qubits(state: np.ndarray) -> int:
    q = int(round(math.log2(state.size)))
    if 2**q != state.size:
        raise ValueError("state length is not a power of two")
    return q


def haar_random_state(q: int, rng: np.random.Generator) -> np.ndarray:
    if q < 1:
        raise ValueError("need at least one qubit")
    z = rng.standard_normal(2**q) + 1j * rng.standard_normal(2**q)
    return z / np.linalg.norm(z)


def _check_pair(pair, q):
    i, j = pair
    if i == j or not (0 <= i < q and 0 <= j < q):
        raise ValueError(f"invalid qubit pair {pair} for {q} qubits")


def _pair_view(state: np.ndarray, pair) -> tuple[np.ndarray, int]:
    """State as array of shape (4, rest) with the pair's block index first."""
    q = num_qubits(state)
    _check_pair(pair, q)
    psi = np.moveaxis(state.reshape((2,) * q), list(pair), [0, 1])
    return psi.reshape(4, -1), q


def _from_pair_view(blocks: np.ndarray, pair, q: int) -> np.ndarray:
    psi = blocks.reshape((2,) * q)
    return np.moveaxis(psi, [0, 1], list(pair)).reshape(-1)


def loss_probability(state: np.ndarray, pair, channel: LPChannel) -> float:
    blocks, _ = _pair_view(state, pair)
    w = np.sum(np.abs(blocks) ** 2, axis=1)
    return float(min(max(0.0, w @ (1.0 - channel.survival)), 1.0))


def survive_branch(state: np.ndarray, pair, channel: LPChannel) -> tuple[float, np.ndarray | None]:
    """Survival probability and the renormalized surviving state."""
    blocks, q = _pair_view(state, pair)
    w = np.sum(np.abs(blocks) ** 2, axis=1)
    surv = float(w @ channel.survival)
    if surv <= 0:
        return 0.0, None
    amp = np.sqrt(channel.survival) * np.exp(1j * channel.phases)
    out = _from_pair_view(blocks * amp[:, None], pair, q) / math.sqrt(surv)
    return min(surv, 1.0), out


def apply_lp_noisy(
    state: np.ndarray, pair, channel: LPChannel, rng: np.random.Generator, gate_index: int | None = None
) -> ShotOutcome:
    surv, out = survive_branch(state, pair, channel)
    if rng.random() < 1.0 - surv:
        return ShotOutcome(False, lost_at=gate_index)
    return ShotOutcome(True, out)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def loss_unitary(channel: LPChannel) -> np.ndarray:
    """8x8 unitary on (pair, ancilla): LP phases then controlled y-rotations.

    The rotation angle is 2*arccos(sqrt(p_ab)) in the half-angle convention,
    so the ancilla-|0> branch of block ab carries amplitude sqrt(p_ab).
    """
    u = np.zeros((8, 8), dtype=complex)
    for ab in range(4):
        omega = math.acos(min(1.0, math.sqrt(channel.survival[ab])))
        u[2 * ab : 2 * ab + 2, 2 * ab : 2 * ab + 2] = np.exp(1j * channel.phases[ab]) * ry(2 * omega)
    return u


def ancilla_branch(state: np.ndarray, pair, channel: LPChannel) -> tuple[float, np.ndarray | None]:
    """Pr(ancilla = 0) and the post-measurement system state, via U_loss."""
    q = num_qubits(state)
    _check_pair(pair, q)
    ext = np.kron(state, np.array([1.0, 0.0]))
    ext = apply_matrix(ext, loss_unitary(channel), (*pair, q), q + 1)
    branch0 = ext.reshape(-1, 2)[:, 0]
    p0 = float(np.vdot(branch0, branch0).real)
    if p0 <= 0:
        return 0.0, None
    return min(p0, 1.0), branch0 / math.sqrt(p0)


def apply_lp_ancilla(
    state: np.ndarray, pair, channel: LPChannel, rng: np.random.Generator, gate_index: int | None = None
) -> ShotOutcome:
    p0, out = ancilla_branch(state, pair, channel)
    if rng.random() < 1.0 - p0:
        return ShotOutcome(False, lost_at=gate_index)
    return ShotOutcome(True, out)


@dataclass(frozen=True)
class LossEstimate:
    mean: float
    stderr: float
    samples: int
    haar_mean: float


def estimate_avg_loss(channel: LPChannel, samples: int = 10_000, rng: np.random.Generator | None = None) -> LossEstimate:
    """Monte Carlo average of the two-qubit loss probability over Haar states."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = rng if rng is not None else RngSpec().generator()
    z = rng.standard_normal((samples, 4)) + 1j * rng.standard_normal((samples, 4))
    w = np.abs(z) ** 2
    w /= w.sum(axis=1, keepdims=True)
    losses = np.clip(w @ (1.0 - channel.survival), 0.0, 1.0)
    se = float(losses.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return LossEstimate(float(losses.mean()), se, samples, haar_mean_loss(channel))


# --------------------------------------------------------------------------
# circuits
# --------------------------------------------------------------------------


@dataclass
class RunResult:
    shots: int
    survived: int
    distribution: np.ndarray  # over logical outcomes, conditioned on survival
    exact_survival: float | None = None
    records: list[dict] = field(default_factory=list, repr=False)

    @property
    def survival_fraction(self) -> float:
        if self.shots == 0:
            return float(self.exact_survival)
        return self.survived / self.shots


def _logical_probs(state: np.ndarray, compiled: CompiledCircuit) -> np.ndarray:
    q = num_qubits(state)
    probs = (np.abs(state) ** 2).reshape((2,) * q)
    used = compiled.final_layout
    others = [s for s in range(q) if s not in used]
    if others:
        probs = probs.sum(axis=tuple(others))
    # remaining axes are the used sites in increasing order
    order = sorted(used)
    probs = np.transpose(probs, [order.index(s) for s in used])
    return probs.reshape(-1)


def _check_compiled(compiled: CompiledCircuit):
    for k, g in enumerate(compiled.circuit.gates):
        if len(g.qubits) == 2 and (g.name != "cz" or not g.annotated):
            raise CompilationError(f"gate {k} ({g.name} on {g.qubits}) is not an annotated CZ")


def _initial(compiled: CompiledCircuit, initial_state):
    n = compiled.circuit.num_qubits
    if initial_state is not None:
        return np.asarray(initial_state, dtype=complex).copy()
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    return psi


def run_exact(compiled: CompiledCircuit, ctx: PhysicsContext, initial_state=None) -> tuple[float, np.ndarray]:
    """Survival probability and surviving logical distribution, no sampling."""
    _check_compiled(compiled)
    if ctx.noise.delta_mode != "deterministic":
        raise ValueError("exact evaluation needs a deterministic field bias")
    n = compiled.circuit.num_qubits
    psi = _initial(compiled, initial_state)
    surv = 1.0
    for g in compiled.circuit.gates:
        if g.name == "cz":
            s, psi = survive_branch(psi, g.qubits, ctx.cz_channel(g.level))
            surv *= s * (1.0 - ctx.p_scat)
            if psi is None:
                return 0.0, np.zeros(2**compiled.num_logical)
        else:
            psi = apply_matrix(psi, g.unitary_1q(), g.qubits, n)
    return surv, _logical_probs(psi, compiled)


def run_circuit(
    compiled: CompiledCircuit,
    ctx: PhysicsContext,
    rng: np.random.Generator,
    shots: int,
    method: str = "direct",
    initial_state=None,
    log_shots: bool = False,
) -> RunResult:
    """Shot-by-shot simulation; single-qubit gates are ideal.

    ``method`` is ``"direct"`` (renormalized loss) or ``"ancilla"``.
    In deterministic-field mode the exact survival is attached as well.
    """
    _check_compiled(compiled)
    apply = {"direct": apply_lp_noisy, "ancilla": apply_lp_ancilla}[method]
    n = compiled.circuit.num_qubits
    psi0 = _initial(compiled, initial_state)
    counts = np.zeros(2**compiled.num_logical)
    survived = 0
    records = []
    for shot in range(shots):
        psi = psi0
        lost_at = None
        for k, g in enumerate(compiled.circuit.gates):
            if g.name != "cz":
                psi = apply_matrix(psi, g.unitary_1q(), g.qubits, n)
                continue
            if ctx.p_scat > 0 and rng.random() < ctx.p_scat:
                lost_at = k
                break
            out = apply(psi, g.qubits, ctx.sample_cz_channel(g.level, rng), rng, k)
            if not out.survived:
                lost_at = k
                break
            psi = out.state
        bits = None
        if lost_at is None:
            survived += 1
            p = _logical_probs(psi, compiled)
            outcome = int(rng.choice(p.size, p=p / p.sum()))
            counts[outcome] += 1
            bits = format(outcome, f"0{compiled.num_logical}b")
        if log_shots:
            records.append({"shot": shot, "survived": lost_at is None, "lost_at_gate": lost_at, "outcome_bits": bits})
    dist = counts / survived if survived else counts
    exact = None
    if ctx.noise.delta_mode == "deterministic":
        exact = run_exact(compiled, ctx, initial_state)[0]
    return RunResult(shots, survived, dist, exact, records)


def write_shot_log(records: list[dict], fh: IO[str]) -> None:
    for rec in records:
        fh.write(json.dumps(rec) + "\n")
