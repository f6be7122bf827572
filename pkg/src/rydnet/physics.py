"""Rydberg-level data, blockade geometry, Stark detuning and the Levine-Pichler gate.

Units throughout: angular frequency in rad/us, time in us, length in um,
electric field in V/cm, C6 in rad/us um^6, polarizability in rad/us per
(V/cm)^2, hbar = 1.  Nothing in this module converts units implicitly.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import optimize

DATA_ENV_VAR = "RYDNET_DATA"
TABLE_HEADER = ("n", "c6_rad_us_um6", "alpha_rad_us_per_Vcm2")
DEFAULT_OMEGA = 2 * math.pi  # 1 MHz linear Rabi frequency


class MissingLevelError(LookupError):
    def __init__(self, n):
        super().__init__(f"Rydberg level n={n} is not in the atomic table")
        self.n = n


class UnreachableRadiusError(ValueError):
    def __init__(self, r, largest):
        super().__init__(
            f"no available Rydberg level supports r={r:.6g} um "
            f"(largest available r_max is {largest:.6g} um)"
        )
        self.r = r
        self.largest = largest


class ConvergenceError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# atomic data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RydbergLevel:
    n: int
    c6: float
    alpha: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not math.isfinite(self.c6) or self.c6 == 0:
            raise ValueError(f"c6 must be finite and nonzero for n={self.n}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive for n={self.n}")


@dataclass(frozen=True)
class TableModel:
    """Tabulated atomic data, one :class:`RydbergLevel` per principal number."""

    levels: tuple[RydbergLevel, ...]

    def __post_init__(self):
        ns = [lv.n for lv in self.levels]
        if not ns:
            raise ValueError("atomic table is empty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("table n values must be strictly increasing")

    @cached_property
    def _by_n(self) -> dict[int, RydbergLevel]:
        return {lv.n: lv for lv in self.levels}

    @property
    def available_n(self) -> list[int]:
        return [lv.n for lv in self.levels]

    def level(self, n: int) -> RydbergLevel:
        try:
            return self._by_n[n]
        except KeyError:
            raise MissingLevelError(n) from None

    def c6(self, n: int) -> float:
        return self.level(n).c6

    def alpha(self, n: int) -> float:
        return self.level(n).alpha


@dataclass(frozen=True)
class PowerLawModel:
    """C6 ~ n^c6_exponent and alpha ~ n^alpha_exponent anchored at ``n_ref``.

    ``n_min``/``n_max`` bound the levels offered to level-selection strategies.
    """

    n_ref: int
    c6_ref: float
    alpha_ref: float
    c6_exponent: float = 12.0
    alpha_exponent: float = 7.0
    n_min: int = 50
    n_max: int = 110

    def __post_init__(self):
        if self.n_ref < 1 or self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError("invalid n range for power-law model")

    @property
    def available_n(self) -> list[int]:
        return list(range(self.n_min, self.n_max + 1))

    def c6(self, n: int) -> float:
        if n < 1:
            raise MissingLevelError(n)
        if n == self.n_ref:
            return self.c6_ref
        return self.c6_ref * (n / self.n_ref) ** self.c6_exponent

    def alpha(self, n: int) -> float:
        if n < 1:
            raise MissingLevelError(n)
        if n == self.n_ref:
            return self.alpha_ref
        return self.alpha_ref * (n / self.n_ref) ** self.alpha_exponent

    def level(self, n: int) -> RydbergLevel:
        return RydbergLevel(n, self.c6(n), self.alpha(n))

    @classmethod
    def calibrated(cls, table: TableModel, n_ref: int = 70, **kw) -> "PowerLawModel":
        """Power law passing through ``table`` at ``n_ref``."""
        lv = table.level(n_ref)
        ns = table.available_n
        kw.setdefault("n_min", ns[0])
        kw.setdefault("n_max", ns[-1])
        return cls(n_ref=n_ref, c6_ref=abs(lv.c6), alpha_ref=lv.alpha, **kw)


AtomicModel = TableModel | PowerLawModel


def c6_of(model: AtomicModel, n: int) -> float:
    return model.c6(n)


def polarizability_of(model: AtomicModel, n: int) -> float:
    return model.alpha(n)


def default_table_path() -> Path:
    env = os.environ.get(DATA_ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("rydnet") / "data" / "rb87_ns.csv"))


def load_table(path: str | os.PathLike | None = None) -> TableModel:
    """Read an atomic data CSV (``n,c6_rad_us_um6,alpha_rad_us_per_Vcm2``)."""
    path = Path(path) if path is not None else default_table_path()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(h.strip() for h in next(reader))
        if header != TABLE_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        levels = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                n, c6, alpha = int(row[0]), float(row[1]), float(row[2])
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: bad row {row!r}") from exc
            levels.append(RydbergLevel(n, c6, alpha))
    return TableModel(tuple(levels))


# --------------------------------------------------------------------------
# blockade geometry and field sensitivity
# --------------------------------------------------------------------------


def blockade_radius(c6: float, omega: float) -> float:
    if omega <= 0:
        raise ValueError("omega must be positive")
    if c6 == 0:
        raise ValueError("c6 must be nonzero")
    return (abs(c6) / omega) ** (1.0 / 6.0)


def r_max(c6: float, omega: float, k_margin: float) -> float:
    """Largest separation at which the blockade shift still exceeds k*Omega."""
    if k_margin < 1:
        raise ValueError("k_margin must be >= 1")
    return blockade_radius(c6, k_margin * omega)


def stark_detuning(alpha: float, e_field: float) -> float:
    if e_field < 0:
        raise ValueError("e_field must be non-negative")
    return 0.5 * alpha * e_field**2


def scattering_prob(gate_time: float, tau_scat: float) -> float:
    """Probability of at least one scattering event during ``gate_time``."""
    if gate_time < 0 or not tau_scat > 0:
        raise ValueError("need gate_time >= 0 and tau_scat > 0")
    return -math.expm1(-gate_time / tau_scat)


# --------------------------------------------------------------------------
# Levine-Pichler gate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GateDrive:
    omega: float = DEFAULT_OMEGA

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class LPGateParams:
    delta: float
    tau: float
    xi: float
    phi: float


@dataclass(frozen=True)
class NoiseConfig:
    e_field: float = 0.01
    tau_scat: float = 50.0
    k_margin: float = 10.0
    delta_mode: str = "deterministic"
    sigma: float = 0.0

    def __post_init__(self):
        if self.e_field < 0:
            raise ValueError("e_field must be >= 0")
        if not self.tau_scat > 0:
            raise ValueError("tau_scat must be > 0 (use inf to disable scattering)")
        if not self.k_margin > 1:
            raise ValueError("k_margin must be > 1")
        if self.delta_mode not in ("deterministic", "gaussian"):
            raise ValueError(f"unknown delta_mode {self.delta_mode!r}")


@dataclass(frozen=True)
class LPChannel:
    p01: float
    p10: float
    p11: float
    phi: float
    varphi: float

    @classmethod
    def ideal(cls, phi: float = 0.0) -> "LPChannel":
        return cls(1.0, 1.0, 1.0, phi, 2 * phi - math.pi)

    def phase_corrected(self, phi0: float) -> "LPChannel":
        """Channel followed by ideal P(-phi0) on both qubits, turning the ideal
        LP gate into an exact CZ."""
        return replace(self, phi=self.phi - phi0, varphi=self.varphi - 2 * phi0)

    @property
    def survival(self) -> np.ndarray:
        """Survival probabilities indexed by the basis state ``2a + b``."""
        return np.array([1.0, self.p01, self.p10, self.p11])

    @property
    def phases(self) -> np.ndarray:
        return np.array([0.0, self.phi, self.phi, self.varphi])


def pulse_propagator(omega: float, detuning: float, duration: float, phase: float = 0.0) -> np.ndarray:
    """Exact propagator of one constant two-level pulse, basis (ground, excited).

    H = [[0, omega/2 e^{-i phase}], [omega/2 e^{i phase}, -detuning]].
    """
    w = math.hypot(omega, detuning)
    half = 0.5 * w * duration
    c, s = math.cos(half), math.sin(half)
    glob = np.exp(0.5j * detuning * duration)
    if w == 0:
        return glob * np.eye(2, dtype=complex)
    nz = detuning / w
    off = -1j * (omega / w) * s
    return glob * np.array(
        [
            [c - 1j * nz * s, off * np.exp(-1j * phase)],
            [off * np.exp(1j * phase), c + 1j * nz * s],
        ]
    )


def _xi_from_eq(y: float, s: float) -> float:
    root = math.sqrt(y * y + 1)
    arg = 0.5 * s * root
    num = 1j * y * math.sin(arg) - root * math.cos(arg)
    den = 1j * y * math.sin(arg) + root * math.cos(arg)
    return float((-np.angle(num / den)) % (2 * math.pi))


def _ground_amplitude(omega_eff, detuning, tau, xi) -> complex:
    u1 = pulse_propagator(omega_eff, detuning, tau, 0.0)
    u2 = pulse_propagator(omega_eff, detuning, tau, xi)
    return complex((u2 @ u1)[0, 0])


def _cz_residual(y: float) -> float:
    """Wrapped mismatch phi_11 - (2 phi_01 - pi) for Omega = 1, Delta = y."""
    tau = 2 * math.pi / math.sqrt(2 + y * y)
    xi = _xi_from_eq(y, tau)
    a01 = _ground_amplitude(1.0, y, tau, xi)
    a11 = _ground_amplitude(math.sqrt(2), y, tau, xi)
    return float(np.angle(a11 * np.conj(a01) ** 2 * np.exp(-1j * math.pi)))


def _params_for(omega: float, delta: float) -> LPGateParams:
    tau = 2 * math.pi / math.sqrt(2 * omega**2 + delta**2)
    xi = _xi_from_eq(delta / omega, omega * tau)
    a01 = _ground_amplitude(omega, delta, tau, xi)
    return LPGateParams(delta=delta, tau=tau, xi=xi, phi=float(np.angle(a01)))


_Y_BRACKET = (0.01, 1.0)


def solve_lp_params(drive: GateDrive, xtol: float = 1e-12, maxiter: int = 200) -> LPGateParams:
    """Detuning, pulse length and inter-pulse phase of the ideal LP CZ gate.

    The CZ phase condition only depends on Delta/Omega, so the root is found
    once in reduced units by bisection and then rescaled.
    """
    try:
        y, info = optimize.bisect(
            _cz_residual, *_Y_BRACKET, xtol=xtol, maxiter=maxiter, full_output=True, disp=False
        )
    except ValueError as exc:
        raise ConvergenceError(f"CZ phase condition not bracketed: {exc}") from exc
    resid = _cz_residual(y)
    if not info.converged or abs(resid) > 1e-8:
        raise ConvergenceError(f"LP detuning solve failed, residual {resid:.3e}")
    return _params_for(drive.omega, y * drive.omega)


def evolve_two_pulse(
    omega_eff: float, delta_nominal: float, delta_error: float, params: LPGateParams
) -> tuple[float, float]:
    """Population and phase of the ground component after both LP pulses."""
    amp = _ground_amplitude(omega_eff, delta_nominal + delta_error, params.tau, params.xi)
    return abs(amp) ** 2, float(np.angle(amp))


def lp_channel(drive: GateDrive, params: LPGateParams, delta_error: float) -> LPChannel:
    p01, phi = evolve_two_pulse(drive.omega, params.delta, delta_error, params)
    p11, varphi = evolve_two_pulse(math.sqrt(2) * drive.omega, params.delta, delta_error, params)
    return LPChannel(p01=p01, p10=p01, p11=p11, phi=phi, varphi=varphi)


def generalized_rabi(omega: float, delta: float, delta_error: float = 0.0) -> float:
    return math.sqrt(2 * omega**2 + (delta + delta_error) ** 2)


def p_loss_taylor(omega: float, delta_nominal: float, delta_error: float) -> float:
    """Leading-order |11> loss of a single detuned pulse (diagnostic only)."""
    w0 = generalized_rabi(omega, delta_nominal)
    return 2 * math.pi**2 * omega**2 * delta_error**2 * delta_nominal**2 / w0**6


def p_loss_single_pulse(omega: float, delta_nominal: float, delta_error: float) -> float:
    """Exact Rydberg population left by one |11> pulse of length 2pi/W(0)."""
    w0 = generalized_rabi(omega, delta_nominal)
    w = generalized_rabi(omega, delta_nominal, delta_error)
    tau = 2 * math.pi / w0
    return 2 * omega**2 / w**2 * math.sin(0.5 * w * tau) ** 2


def haar_mean_loss(channel: LPChannel) -> float:
    """Loss averaged over Haar-random two-qubit states (E|c_ab|^2 = 1/4)."""
    return 1.0 - (1.0 + channel.p01 + channel.p10 + channel.p11) / 4.0


# --------------------------------------------------------------------------
# bundled physics context
# --------------------------------------------------------------------------


@dataclass
class PhysicsContext:
    """Atomic model, drive and noise with per-level channels cached."""

    model: AtomicModel
    drive: GateDrive = field(default_factory=GateDrive)
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        self._channels: dict[int, LPChannel] = {}

    @cached_property
    def params(self) -> LPGateParams:
        return solve_lp_params(self.drive)

    @property
    def gate_time(self) -> float:
        return 2 * self.params.tau

    @cached_property
    def p_scat(self) -> float:
        if math.isinf(self.noise.tau_scat):
            return 0.0
        return scattering_prob(self.gate_time, self.noise.tau_scat)

    def r_max_of(self, n: int) -> float:
        return r_max(self.model.c6(n), self.drive.omega, self.noise.k_margin)

    def detuning_error(self, n: int, e_field: float | None = None) -> float:
        e = self.noise.e_field if e_field is None else e_field
        return stark_detuning(self.model.alpha(n), e)

    def channel(self, n: int) -> LPChannel:
        """Deterministic-bias channel for level ``n``."""
        ch = self._channels.get(n)
        if ch is None:
            ch = lp_channel(self.drive, self.params, self.detuning_error(n))
            self._channels[n] = ch
        return ch

    def cz_channel(self, n: int) -> LPChannel:
        """:meth:`channel` with the nominal single-qubit phase undone."""
        return self.channel(n).phase_corrected(self.params.phi)

    def sample_cz_channel(self, n: int, rng: np.random.Generator) -> LPChannel:
        """Phase-corrected channel with the field drawn per gate in Gaussian mode."""
        if self.noise.delta_mode == "deterministic":
            return self.cz_channel(n)
        e = self.noise.e_field * abs(1.0 + self.noise.sigma * rng.standard_normal())
        ch = lp_channel(self.drive, self.params, self.detuning_error(n, e))
        return ch.phase_corrected(self.params.phi)

    def p_cz(self, n: int) -> float:
        """State-averaged field-induced loss of one LP gate at level ``n``."""
        return haar_mean_loss(self.channel(n))

    def gate_survival(self, n: int) -> float:
        """Survival of one physical CZ including scattering."""
        return (1.0 - self.p_cz(n)) * (1.0 - self.p_scat)


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    if np.ptp(lx) == 0:
        raise ValueError("degenerate abscissa for slope fit")
    return float(np.polyfit(lx, ly, 1)[0])
