"""Gate-list circuits shared by the simulator and the benchmark pipeline.

Qubit 0 is the most significant bit of a basis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def phase_gate(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


ONE_QUBIT = {"h": lambda p: H, "x": lambda p: X, "p": lambda p: phase_gate(p[0])}
TWO_QUBIT = {"cx", "cz", "cp", "swap"}
GENERATORS = set(ONE_QUBIT) | TWO_QUBIT | {"ccx", "u"}


class CompilationError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    # set on physical CZs by the router
    radius: float | None = None
    level: int | None = None
    tag: str = ""

    def unitary_1q(self) -> np.ndarray:
        if self.name == "u":
            return self.matrix
        return ONE_QUBIT[self.name](self.params)

    @property
    def annotated(self) -> bool:
        return self.radius is not None and self.level is not None


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def add(self, name: str, *qubits: int, params=(), matrix=None, **kw) -> "Circuit":
        if name not in GENERATORS:
            raise ValueError(f"unsupported gate {name!r}")
        if any(not 0 <= q < self.num_qubits for q in qubits) or len(set(qubits)) != len(qubits):
            raise ValueError(f"bad qubits {qubits} for {self.num_qubits}-qubit circuit")
        if matrix is not None:
            matrix = np.asarray(matrix, dtype=complex)
            if not np.allclose(matrix.conj().T @ matrix, I2, atol=1e-10):
                raise ValueError("single-qubit matrix is not unitary")
        self.gates.append(Gate(name, tuple(qubits), tuple(params), matrix, **kw))
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        self.gates.extend(other.gates)
        return self

    def count(self, name: str) -> int:
        return sum(g.name == name for g in self.gates)

    def inverse(self) -> "Circuit":
        out = Circuit(self.num_qubits)
        for g in reversed(self.gates):
            if g.name in ("h", "x", "cx", "cz", "swap", "ccx"):
                out.gates.append(g)
            elif g.name in ("p", "cp"):
                out.gates.append(Gate(g.name, g.qubits, (-g.params[0],)))
            elif g.name == "u":
                out.gates.append(Gate("u", g.qubits, matrix=g.matrix.conj().T))
            else:
                raise ValueError(f"cannot invert {g.name}")
        return out


def apply_matrix(state: np.ndarray, mat: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Apply a k-qubit matrix to ``qubits`` of an n-qubit state vector."""
    k = len(qubits)
    psi = state.reshape((2,) * n)
    psi = np.tensordot(mat.reshape((2,) * (2 * k)), psi, axes=(list(range(k, 2 * k)), list(qubits)))
    psi = np.moveaxis(psi, list(range(k)), list(qubits))
    return psi.reshape(-1)


def _controlled(target: np.ndarray, controls: int) -> np.ndarray:
    d = 2 ** (controls + 1)
    m = np.eye(d, dtype=complex)
    m[d - 2 :, d - 2 :] = target
    return m


SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def gate_matrix(g: Gate) -> np.ndarray:
    if len(g.qubits) == 1:
        return g.unitary_1q()
    if g.name == "cx":
        return _controlled(X, 1)
    if g.name == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if g.name == "cp":
        return np.diag([1, 1, 1, np.exp(1j * g.params[0])])
    if g.name == "swap":
        return SWAP
    if g.name == "ccx":
        return _controlled(X, 2)
    raise ValueError(f"no matrix for gate {g.name!r}")


def apply_gate(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    return apply_matrix(state, gate_matrix(g), g.qubits, n)


def dense_unitary(circ: Circuit) -> np.ndarray:
    n = circ.num_qubits
    dim = 2**n
    cols = np.eye(dim, dtype=complex)
    out = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        psi = cols[:, j]
        for g in circ.gates:
            psi = apply_gate(psi, g, n)
        out[:, j] = psi
    return out


def simulate(circ: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    n = circ.num_qubits
    if state is None:
        state = np.zeros(2**n, dtype=complex)
        state[0] = 1
    for g in circ.gates:
        state = apply_gate(state, g, n)
    return state


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-8) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < 1e-14:
        return False
    ph = b[idx] / a[idx]
    ph /= abs(ph)
    return bool(np.allclose(a * ph, b, atol=atol))


@dataclass
class CompiledCircuit:
    """Physical circuit on lattice sites; CZs carry radius and Rydberg level."""

    circuit: Circuit
    initial_layout: list[int]  # logical -> physical site
    final_layout: list[int]
    num_logical: int
    cz_pre: int = 0
    r_max: float | None = None
    strategy: str = ""

    def __post_init__(self):
        for lay in (self.initial_layout, self.final_layout):
            if len(set(lay)) != len(lay) or len(lay) != self.num_logical:
                raise CompilationError("layout is not a bijection onto distinct sites")

    @property
    def cz_post(self) -> int:
        return self.circuit.count("cz")


def _embed_index(bits: int, layout: list[int], num_logical: int, n: int) -> int:
    idx = 0
    for l, p in enumerate(layout):
        if bits >> (num_logical - 1 - l) & 1:
            idx |= 1 << (n - 1 - p)
    return idx


def logical_unitary(compiled: CompiledCircuit) -> np.ndarray:
    """Ideal action of a compiled circuit on the logical register.

    Logical inputs are placed by the initial layout (spare sites in |0>) and
    read back through the final layout.  Raises if amplitude leaks onto
    spare sites, which would mean the routing corrupted the register.
    """
    n, q = compiled.circuit.num_qubits, compiled.num_logical
    reads = [_embed_index(b, compiled.final_layout, q, n) for b in range(2**q)]
    out = np.empty((2**q, 2**q), dtype=complex)
    for j in range(2**q):
        psi = np.zeros(2**n, dtype=complex)
        psi[_embed_index(j, compiled.initial_layout, q, n)] = 1
        psi = simulate(compiled.circuit, psi)
        out[:, j] = psi[reads]
        if abs(np.vdot(out[:, j], out[:, j]) - 1) > 1e-8:
            raise CompilationError("compiled circuit leaks amplitude outside the logical register")
    return out
