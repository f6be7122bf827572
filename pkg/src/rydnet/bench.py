"""Benchmark circuits (QFT, QPE, ripple-carry adder), CZ basis reduction,
lattice mapping with swap routing, and success-probability estimation."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from typing import IO, Sequence

import numpy as np
from scipy import stats

from .circuit import H, Circuit, CompilationError, CompiledCircuit, Gate, gate_matrix, phase_gate
from .physics import PhysicsContext
from .router import LatticeSpec, LevelStrategy, build_graph, strategy_from_name, synthesize_cz
from .simulator import RngSpec, run_circuit, run_exact

FAMILIES = ("qft", "qpe", "adder")
T = math.pi / 4


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------


def gen_qft(q: int, swaps: bool = True) -> Circuit:
    """QFT on ``q`` qubits (qubit 0 = most significant), bit reversal as swaps."""
    if q < 1:
        raise ValueError("q must be >= 1")
    c = Circuit(q)
    for j in range(q):
        c.add("h", j)
        for k in range(j + 1, q):
            c.add("cp", k, j, params=(math.pi / 2 ** (k - j),))
    if swaps:
        for j in range(q // 2):
            c.add("swap", j, q - 1 - j)
    return c


def _qft_on(c: Circuit, qubits: Sequence[int], inverse: bool = False) -> None:
    sub = gen_qft(len(qubits))
    if inverse:
        sub = sub.inverse()
    for g in sub.gates:
        c.gates.append(Gate(g.name, tuple(qubits[i] for i in g.qubits), g.params))


def gen_qpe(t: int, theta: float) -> Circuit:
    """Phase estimation of the eigenphase 2*pi*theta of P(2*pi*theta) on |1>.

    Qubits 0..t-1 form the counting register (MSB first); qubit t is the target.
    """
    if t < 1 or not 0 <= theta < 1:
        raise ValueError("need t >= 1 and theta in [0, 1)")
    c = Circuit(t + 1)
    c.add("x", t)
    for k in range(t):
        c.add("h", k)
    for k in range(t):
        c.add("cp", k, t, params=(2 * math.pi * theta * 2 ** (t - 1 - k),))
    _qft_on(c, list(range(t)), inverse=True)
    return c


def qpe_expected(t: int, theta: float) -> int:
    return int(round(theta * 2**t)) % 2**t


@dataclass(frozen=True)
class AdderLayout:
    bits: int

    @property
    def num_qubits(self) -> int:
        return 2 * self.bits + 2

    carry_in = 0

    def a(self, i: int) -> int:
        return 1 + 2 * i

    def b(self, i: int) -> int:
        return 2 + 2 * i

    @property
    def z(self) -> int:
        return 2 * self.bits + 1

    @property
    def output(self) -> list[int]:
        """Sum register, most significant first."""
        return [self.z] + [self.b(i) for i in reversed(range(self.bits))]


def gen_adder(bits: int, a_in: int, b_in: int) -> Circuit:
    """Cuccaro ripple-carry adder writing a+b into (z, b) with inputs prepared by X."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if not (0 <= a_in < 2**bits and 0 <= b_in < 2**bits):
        raise ValueError(f"operands must lie in [0, {2**bits})")
    lay = AdderLayout(bits)
    c = Circuit(lay.num_qubits)
    for i in range(bits):
        if a_in >> i & 1:
            c.add("x", lay.a(i))
        if b_in >> i & 1:
            c.add("x", lay.b(i))

    def maj(x, y, w):
        c.add("cx", w, y).add("cx", w, x).add("ccx", x, y, w)

    def uma(x, y, w):
        c.add("ccx", x, y, w).add("cx", w, x).add("cx", x, y)

    carries = [lay.carry_in] + [lay.a(i) for i in range(bits - 1)]
    for i in range(bits):
        maj(carries[i], lay.b(i), lay.a(i))
    c.add("cx", lay.a(bits - 1), lay.z)
    for i in reversed(range(bits)):
        uma(carries[i], lay.b(i), lay.a(i))
    return c


# --------------------------------------------------------------------------
# basis reduction
# --------------------------------------------------------------------------


def _toffoli(a, b, t):
    td = -T
    return [
        ("h", (t,), ()), ("cx", (b, t), ()), ("p", (t,), (td,)), ("cx", (a, t), ()),
        ("p", (t,), (T,)), ("cx", (b, t), ()), ("p", (t,), (td,)), ("cx", (a, t), ()),
        ("p", (b,), (T,)), ("p", (t,), (T,)), ("h", (t,), ()), ("cx", (a, b), ()),
        ("p", (a,), (T,)), ("p", (b,), (td,)), ("cx", (a, b), ()),
    ]  # fmt: skip


def _expand(g: Gate):
    """Rewrite one gate into 1q gates, cx and cz."""
    q = g.qubits
    if g.name == "cp":
        lam = g.params[0]
        c, t = q
        return [("p", (c,), (lam / 2,)), ("p", (t,), (lam / 2,)), ("cx", (c, t), ()),
                ("p", (t,), (-lam / 2,)), ("cx", (c, t), ())]  # fmt: skip
    if g.name == "swap":
        a, b = q
        return [("cx", (a, b), ()), ("cx", (b, a), ()), ("cx", (a, b), ())]
    if g.name == "ccx":
        return _toffoli(*q)
    return [(g.name, q, g.params)]


def basis_reduce(circ: Circuit) -> Circuit:
    """Equivalent circuit made of CZs and (merged) single-qubit unitaries."""
    out = Circuit(circ.num_qubits)
    pending: dict[int, np.ndarray] = {}

    def push(qb, m):
        pending[qb] = m @ pending.get(qb, np.eye(2, dtype=complex))

    def flush(qb):
        m = pending.pop(qb, None)
        if m is not None and not np.allclose(m, np.eye(2), atol=1e-14):
            out.gates.append(Gate("u", (qb,), matrix=m))

    for g in circ.gates:
        if g.name not in ("h", "x", "p", "u", "cx", "cz", "cp", "swap", "ccx"):
            raise CompilationError(f"unsupported gate {g.name!r}")
        for name, qs, params in _expand(g):
            if len(qs) == 1:
                m = g.matrix if name == "u" else gate_matrix(Gate(name, qs, params))
                push(qs[0], m)
                continue
            if name == "cx":
                push(qs[1], H)
            for qb in qs:
                flush(qb)
            out.gates.append(Gate("cz", qs))
            if name == "cx":
                push(qs[1], H)
    for qb in sorted(pending):
        flush(qb)
    return out


# --------------------------------------------------------------------------
# mapping and routing
# --------------------------------------------------------------------------


def _is_reduced(circ: Circuit) -> bool:
    return all(g.name in ("u", "cz") for g in circ.gates)


def map_and_route(
    circ: Circuit,
    lattice: LatticeSpec,
    r_max: float,
    strategy: LevelStrategy,
    ctx: PhysicsContext,
    layout: Sequence[int] | None = None,
) -> CompiledCircuit:
    """Place logical qubits row-major and insert swap chains for long CZs.

    Routing is greedy per gate: the CZ's first qubit is swapped along the
    loss-optimal route to a site adjacent to the second one.
    """
    if circ.num_qubits > lattice.size:
        raise CompilationError(f"{circ.num_qubits} qubits do not fit a {lattice.width}x{lattice.height} lattice")
    reduced = circ if _is_reduced(circ) else basis_reduce(circ)
    graph = build_graph(lattice, r_max, strategy, ctx)
    l2p = list(layout) if layout is not None else list(range(circ.num_qubits))
    p2l = [-1] * lattice.size
    for l, p in enumerate(l2p):
        p2l[p] = l
    initial = list(l2p)
    out = Circuit(lattice.size)

    def cz(u, v, tag=""):
        e = graph.edge(u, v)
        out.gates.append(Gate("cz", (u, v), radius=e.radius, level=e.n, tag=tag))

    def swap(u, v):
        for a, b in ((u, v), (v, u), (u, v)):
            out.gates.append(Gate("u", (b,), matrix=H))
            cz(a, b, "swap")
            out.gates.append(Gate("u", (b,), matrix=H))
        p2l[u], p2l[v] = p2l[v], p2l[u]
        for p in (u, v):
            if p2l[p] >= 0:
                l2p[p2l[p]] = p

    for g in reduced.gates:
        if g.name == "u":
            out.gates.append(Gate("u", (l2p[g.qubits[0]],), matrix=g.matrix))
            continue
        p1, p2 = l2p[g.qubits[0]], l2p[g.qubits[1]]
        if any(e.v == p2 for e in graph.adjacency[p1]):
            cz(p1, p2)
            continue
        plan = synthesize_cz(graph, p1, p2)
        for a, b in zip(plan.route, plan.route[1:]):
            swap(a, b)
        cz(plan.route[-1], p2)
    return CompiledCircuit(
        out, initial, list(l2p), circ.num_qubits,
        cz_pre=reduced.count("cz"), r_max=r_max, strategy=getattr(strategy, "name", ""),
    )  # fmt: skip


# --------------------------------------------------------------------------
# success probability
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    """A benchmark circuit with the register that holds its answer."""

    circuit: Circuit
    output: tuple[int, ...]  # logical qubits, most significant first
    expected: int


def random_instance(family: str, width: int, rng: np.random.Generator) -> Instance:
    if family == "qft":
        # prepare QFT^dagger|x> with ideal 1q gates so the QFT returns |x>
        x = int(rng.integers(2**width))
        c = Circuit(width)
        for k in range(width):
            c.add("h", k).add("p", k, params=(-2 * math.pi * x / 2 ** (k + 1),))
        c.extend(gen_qft(width))
        return Instance(c, tuple(range(width)), x)
    if family == "qpe":
        t = width - 1
        k = int(rng.integers(2**t))
        return Instance(gen_qpe(t, k / 2**t), tuple(range(t)), k)
    if family == "adder":
        bits = (width - 2) // 2
        if 2 * bits + 2 != width or bits < 1:
            raise ValueError("adder width must be even and >= 4")
        a, b = (int(v) for v in rng.integers(2**bits, size=2))
        return Instance(gen_adder(bits, a, b), tuple(AdderLayout(bits).output), a + b)
    raise ValueError(f"unknown circuit family {family!r}")


def marginal_probability(dist: np.ndarray, num_logical: int, output: Sequence[int], value: int) -> float:
    probs = dist.reshape((2,) * num_logical)
    others = tuple(q for q in range(num_logical) if q not in output)
    if others:
        probs = probs.sum(axis=others)
    keep = sorted(output)
    probs = np.transpose(probs, [keep.index(q) for q in output]).reshape(-1)
    return float(probs[value])


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(successes, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class BenchmarkResult:
    family: str
    width: int
    r_max_over_a: float
    strategy: str
    tau_scat_us: float
    p_success: float
    ci_low: float
    ci_high: float
    survival: float
    cz_pre: int
    cz_post: int
    shots: int = 0

    @property
    def sigma(self) -> float:
        p = self.p_success
        return math.sqrt(max(p * (1 - p), 1e-12) / self.shots)

    def row(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "shots"}


CSV_FIELDS = [f.name for f in fields(BenchmarkResult) if f.name != "shots"]


def exact_success(compiled: CompiledCircuit, ctx: PhysicsContext, inst: Instance) -> tuple[float, float]:
    """(success probability, survival probability) without sampling."""
    surv, dist = run_exact(compiled, ctx)
    if surv == 0:
        return 0.0, 0.0
    return surv * marginal_probability(dist, compiled.num_logical, inst.output, inst.expected), surv


def success_probability(
    compiled: CompiledCircuit,
    ctx: PhysicsContext,
    shots: int,
    inst: Instance,
    rng: np.random.Generator,
    method: str = "exact",
) -> tuple[int, float]:
    """Number of successful shots and the survival fraction.

    ``method="exact"`` draws the shot count from the exact per-shot success
    probability; ``"direct"``/``"ancilla"`` simulate every shot.
    """
    if method == "exact":
        p, surv = exact_success(compiled, ctx, inst)
        return int(rng.binomial(shots, min(max(p, 0.0), 1.0))), surv
    res = run_circuit(compiled, ctx, rng, shots, method=method)
    p_ok = marginal_probability(res.distribution, compiled.num_logical, inst.output, inst.expected) if res.survived else 0.0
    return int(round(p_ok * res.survived)), res.survival_fraction


def run_benchmark(
    family: str,
    width: int,
    r_max_over_a: float,
    ctx: PhysicsContext,
    strategy: LevelStrategy | str = "graded",
    lattice: LatticeSpec | None = None,
    inputs: int = 30,
    shots: int = 2000,
    seed: int = 0,
    method: str = "exact",
) -> BenchmarkResult:
    """Average success over ``inputs`` random inputs, ``shots`` shots each."""
    if isinstance(strategy, str):
        strategy = strategy_from_name(strategy)
    lattice = lattice or LatticeSpec.fitting(width)
    # inputs depend on the seed only, so every r_max sees the same inputs
    in_rng = RngSpec(seed, 0).generator()
    shot_rng = RngSpec(seed, 1).generator()
    ok = 0
    surv_sum = 0.0
    cz_pre = cz_post = 0
    for _ in range(inputs):
        inst = random_instance(family, width, in_rng)
        compiled = map_and_route(inst.circuit, lattice, r_max_over_a * lattice.spacing, strategy, ctx)
        k, s = success_probability(compiled, ctx, shots, inst, shot_rng, method)
        ok += k
        surv_sum += s
        cz_pre, cz_post = compiled.cz_pre, compiled.cz_post
    total = inputs * shots
    lo, hi = wilson_interval(ok, total)
    return BenchmarkResult(
        family, width, r_max_over_a, strategy.name, ctx.noise.tau_scat,
        ok / total, lo, hi, surv_sum / inputs, cz_pre, cz_post, total,
    )  # fmt: skip


def write_results(results: Sequence[BenchmarkResult], fh: IO[str]) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in results:
        row = r.row()
        for k in ("r_max_over_a", "tau_scat_us", "p_success", "ci_low", "ci_high", "survival"):
            row[k] = f"{row[k]:.10g}"
        w.writerow(row)
