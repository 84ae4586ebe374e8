"""Secular master equation for the chain coupled to two end baths.

Spins 1 and 3 each couple through sx to an independent thermal bath.
Within the Born-Markov and rotating-wave approximations the reduced
state obeys

    drho/dt = -i [H, rho] + L1(rho) + L3(rho)

with, per bath j and per positive transition frequency w,

    Lj(rho) = gamma_j (1 + n_j(w)) (2 A rho A+ - {rho, A+ A})
            + gamma_j n_j(w)       (2 A+ rho A - {rho, A A+})

where A = A_j(w) lowers the chain energy by w, n_j(w) is the Planck
occupation of bath j and the decay rate gamma_j is flat in frequency.
Operators are stored in the computational basis.

Two constructions of the jump operators are available.  The generic
mode projects sx_j onto the energy eigenbasis and groups the 64 level
pairs by their energy difference (tolerance 1e-9), which automatically
merges colliding frequencies into a single coherent operator.  The
analytic mode instantiates the closed forms at the three frequencies

    w1 = 2h - k - B,  w2 = 2h - k + B,  w3 = 2(h + k)

and then canonicalizes signs.  Both modes reject transitions at
frequencies below OMEGA_MIN, where the flat-rate secular equation is
unphysical.  The closed forms keep w2 and w3 apart, so at k = 1 (where
B = 3 makes them equal) the analytic mode refuses and the generic mode
is authoritative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateFrequencyError,
    IntegrationError,
    InvalidParameterError,
    NonUniqueSteadyStateError,
    StepSizeError,
)
from .spectrum import (
    ChainParams,
    SIGMA_X,
    Spectrum,
    analytic_eigensystem,
    build_hamiltonian,
    site_operator,
)

__all__ = [
    "OMEGA_MIN",
    "BathSpec",
    "JumpOperator",
    "JumpOperatorSet",
    "planck_occupation",
    "build_jump_operators",
    "dissipator",
    "liouvillian_apply",
    "liouvillian_matrix",
    "evolve_rk4",
    "steady_state",
    "occupation_probabilities",
]

# Below this frequency a transition is treated as degenerate: the
# Planck occupation diverges and the secular grouping is meaningless.
OMEGA_MIN = 1e-9

# Frequencies closer than this are one secular bucket.
_FREQ_TOL = 1e-9

# Eigenbasis amplitudes below this are structural zeros.
_AMP_TOL = 1e-13


@dataclass(frozen=True)
class BathSpec:
    """Temperatures and flat decay rates of the two end baths.

    t1 and t3 are the bath temperatures at spins 1 and 3 (k_B = 1,
    units of J).  gamma is the common flat rate; gamma1/gamma3 override
    it per bath when set.  Strictly positive temperatures are required
    unless zero_temperature is set, in which case occupations are
    pinned to zero.
    """

    t1: float
    t3: float
    gamma: float = 0.01
    gamma1: float | None = None
    gamma3: float | None = None
    zero_temperature: bool = False

    def __post_init__(self):
        for name in ("t1", "t3", "gamma"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise InvalidParameterError(f"bath parameter {name} must be finite, got {value!r}")
        if not self.zero_temperature and (self.t1 <= 0 or self.t3 <= 0):
            raise InvalidParameterError(
                "bath temperatures must be strictly positive "
                "(set zero_temperature=True for the T = 0 limit)"
            )
        if self.zero_temperature and (self.t1 < 0 or self.t3 < 0):
            raise InvalidParameterError("bath temperatures cannot be negative")
        for g in (self.gamma, self.gamma1, self.gamma3):
            if g is not None and g <= 0:
                raise InvalidParameterError("decay rates must be strictly positive")

    def temperature(self, j: int) -> float:
        return {1: self.t1, 3: self.t3}[j]

    def rate(self, j: int) -> float:
        override = {1: self.gamma1, 3: self.gamma3}[j]
        return self.gamma if override is None else override


@dataclass(frozen=True)
class JumpOperator:
    """One secular channel: a lowering operator at positive frequency."""

    omega: float
    lowering: np.ndarray
    raising: np.ndarray = field(repr=False)
    lower_sq: np.ndarray = field(repr=False)  # A+ A
    raise_sq: np.ndarray = field(repr=False)  # A A+

    @classmethod
    def from_lowering(cls, omega: float, lowering: np.ndarray) -> "JumpOperator":
        lowering = np.ascontiguousarray(lowering)
        raising = lowering.conj().T.copy()
        op = cls(
            omega=omega,
            lowering=lowering,
            raising=raising,
            lower_sq=raising @ lowering,
            raise_sq=lowering @ raising,
        )
        for arr in (op.lowering, op.raising, op.lower_sq, op.raise_sq):
            arr.setflags(write=False)
        return op


@dataclass(frozen=True)
class JumpOperatorSet:
    """Canonicalized jump operators for baths 1 and 3."""

    bath1: tuple[JumpOperator, ...]
    bath3: tuple[JumpOperator, ...]
    mode: str

    def bath(self, j: int) -> tuple[JumpOperator, ...]:
        if j not in (1, 3):
            raise InvalidParameterError(f"bath index must be 1 or 3, got {j}")
        return self.bath1 if j == 1 else self.bath3


def planck_occupation(omega: float, temperature: float, zero_temperature: bool = False) -> float:
    """Mean thermal occupation 1/(exp(omega/T) - 1) of a bath mode.

    Frequencies at or below OMEGA_MIN are rejected: the occupation
    diverges there and the secular treatment is invalid.
    """
    if omega <= OMEGA_MIN:
        raise DegenerateFrequencyError(
            f"transition frequency {omega:.3e} is below the secular cutoff {OMEGA_MIN:.0e}"
        )
    if zero_temperature:
        return 0.0
    if temperature <= 0:
        raise InvalidParameterError("temperature must be positive unless zero_temperature is set")
    x = omega / temperature
    if x > 700.0:  # exp would overflow; the occupation is numerically zero
        return 0.0
    return 1.0 / math.expm1(x)


def _merge_buckets(entries: list[tuple[float, np.ndarray]]) -> list[JumpOperator]:
    """Sum operators whose frequencies agree within _FREQ_TOL."""
    entries.sort(key=lambda e: e[0])
    merged: list[JumpOperator] = []
    i = 0
    while i < len(entries):
        omega_sum, count = entries[i][0], 1
        op = entries[i][1].astype(complex, copy=True)
        while i + count < len(entries) and entries[i + count][0] - entries[i][0] <= _FREQ_TOL:
            omega_sum += entries[i + count][0]
            op += entries[i + count][1]
            count += 1
        merged.append(JumpOperator.from_lowering(omega_sum / count, op))
        i += count
    return merged


def _generic_bath_operators(spectrum: Spectrum, site: int) -> list[JumpOperator]:
    sx = site_operator(SIGMA_X, site)
    amp = spectrum.states.conj().T @ sx @ spectrum.states
    energies = spectrum.energies
    entries: list[tuple[float, np.ndarray]] = []
    for l in range(8):
        for lp in range(8):
            a = amp[l, lp]
            if abs(a) <= _AMP_TOL:
                continue
            omega = energies[lp] - energies[l]  # energy lost by |l><lp|
            if abs(omega) <= OMEGA_MIN:
                raise DegenerateFrequencyError(
                    f"levels {l + 1} and {lp + 1} are degenerate within {OMEGA_MIN:.0e} "
                    f"but coupled through spin {site}; the secular equation is invalid here"
                )
            if omega > 0:
                entries.append(
                    (omega, a * np.outer(spectrum.states[:, l], spectrum.states[:, lp].conj()))
                )
    return _merge_buckets(entries)


def _analytic_bath_operators(spectrum: Spectrum, j: int) -> list[JumpOperator]:
    ang = spectrum.angles
    energies = spectrum.energies
    # Recover (h, k) in units of J from the label-ordered energies.
    h = energies[1] / 3.0
    k = (energies[3] + h) / 2.0
    if abs(k - 1.0) < 1e-6:
        raise DegenerateFrequencyError(
            "the second and third transition frequencies coincide near k = 1; "
            "the closed forms cannot separate them, use the generic construction"
        )
    w1 = 2 * h - k - ang.b
    w2 = 2 * h - k + ang.b
    w3 = 2 * (h + k)

    def outer(l: int, lp: int) -> np.ndarray:
        return np.outer(spectrum.states[:, l - 1], spectrum.states[:, lp - 1].conj())

    s2 = 1.0 / math.sqrt(2.0)
    if j == 1:
        raising_ops = [
            (w1, s2 * (ang.sin_a1 * outer(2, 8) - ang.cos_a2 * outer(6, 4)
                       - ang.cos_a2 * outer(3, 7) + ang.sin_a1 * outer(5, 1))),
            (w2, s2 * (ang.sin_a2 * outer(2, 6) - ang.cos_a1 * outer(8, 4)
                       - ang.cos_a1 * outer(3, 5) + ang.sin_a2 * outer(7, 1))),
            (w3, s2 * (outer(2, 3) - ang.sin_diff * outer(6, 5)
                       + ang.sin_diff * outer(8, 7) - outer(4, 1))),
        ]
    else:
        raising_ops = [
            (w1, s2 * (ang.sin_a1 * outer(2, 8) + ang.cos_a2 * outer(6, 4)
                       + ang.cos_a2 * outer(3, 7) + ang.sin_a1 * outer(5, 1))),
            (w2, s2 * (ang.sin_a2 * outer(2, 6) + ang.cos_a1 * outer(8, 4)
                       + ang.cos_a1 * outer(3, 5) + ang.sin_a2 * outer(7, 1))),
            # The w3 weights on |6><5| and |8><7| follow from projecting
            # sx_3 onto the eigenbasis: +sin(a1 - a2) and -sin(a1 - a2).
            (w3, -s2 * (outer(2, 3) + ang.sin_diff * outer(6, 5)
                        - ang.sin_diff * outer(8, 7) - outer(4, 1))),
        ]
    entries: list[tuple[float, np.ndarray]] = []
    for omega, a_dag in raising_ops:
        if abs(omega) <= OMEGA_MIN:
            raise DegenerateFrequencyError(
                f"transition frequency {omega:.3e} for bath {j} is below the "
                f"secular cutoff {OMEGA_MIN:.0e}"
            )
        if omega > 0:
            entries.append((omega, a_dag.conj().T))
        else:
            # a_dag raises by a negative amount, i.e. it already lowers.
            entries.append((-omega, a_dag))
    return _merge_buckets(entries)


def build_jump_operators(spectrum: Spectrum, mode: str = "generic") -> JumpOperatorSet:
    """Construct the per-bath secular jump operators.

    mode "generic" buckets all eigenpair differences of the projected
    coupling; mode "analytic" instantiates the closed forms.  Stored
    entries are lowering operators at strictly positive frequencies,
    pairwise distinct beyond 1e-9 after merging, sorted ascending.
    """
    if mode == "generic":
        bath1 = _generic_bath_operators(spectrum, 1)
        bath3 = _generic_bath_operators(spectrum, 3)
    elif mode == "analytic":
        bath1 = _analytic_bath_operators(spectrum, 1)
        bath3 = _analytic_bath_operators(spectrum, 3)
    else:
        raise InvalidParameterError(f"unknown jump-operator mode {mode!r}")
    return JumpOperatorSet(bath1=tuple(bath1), bath3=tuple(bath3), mode=mode)


def _thermal_weights(entry: JumpOperator, bath: BathSpec, j: int) -> tuple[float, float]:
    """Rates (down, up) = gamma (1 + n), gamma n for one channel."""
    g = bath.rate(j)
    if entry.omega < 10.0 * g:
        warnings.warn(
            f"transition frequency {entry.omega:.3e} is within 10x the decay rate "
            f"{g:.3e}; the secular approximation is marginal here",
            stacklevel=3,
        )
    n = planck_occupation(entry.omega, bath.temperature(j), bath.zero_temperature)
    return g * (1.0 + n), g * n


def dissipator(rho: np.ndarray, j: int, ops: JumpOperatorSet, bath: BathSpec) -> np.ndarray:
    """Apply the dissipative term of bath j to a state.

    Trace-free and Hermiticity-preserving by construction.
    """
    out = np.zeros((8, 8), dtype=complex)
    for entry in ops.bath(j):
        down, up = _thermal_weights(entry, bath, j)
        a, ad = entry.lowering, entry.raising
        ada, aad = entry.lower_sq, entry.raise_sq
        out += down * (2.0 * (a @ rho @ ad) - ada @ rho - rho @ ada)
        out += up * (2.0 * (ad @ rho @ a) - aad @ rho - rho @ aad)
    return out


def liouvillian_apply(
    rho: np.ndarray, params: ChainParams, baths: BathSpec, ops: JumpOperatorSet
) -> np.ndarray:
    """Right-hand side -i[H, rho] + L1(rho) + L3(rho)."""
    h = build_hamiltonian(params)
    out = -1j * (h @ rho - rho @ h)
    out += dissipator(rho, 1, ops, baths)
    out += dissipator(rho, 3, ops, baths)
    return out


def liouvillian_matrix(
    params: ChainParams,
    baths: BathSpec,
    ops: JumpOperatorSet,
    order: str = "F",
) -> np.ndarray:
    """Matrix M with vec(drho/dt) = M vec(rho).

    order "F" (default) uses column-major vectorization, order "C"
    row-major; the two are permutation-equivalent and agree with
    :func:`liouvillian_apply` under the matching reshape.
    """
    if order not in ("F", "C"):
        raise InvalidParameterError(f"order must be 'F' or 'C', got {order!r}")
    eye = np.eye(8, dtype=complex)

    def left_right(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # Superoperator of rho -> a rho b for the chosen vec ordering.
        if order == "F":
            return np.kron(b.T, a)
        return np.kron(a, b.T)

    h = build_hamiltonian(params).astype(complex)
    m = -1j * (left_right(h, eye) - left_right(eye, h))
    for j in (1, 3):
        for entry in ops.bath(j):
            down, up = _thermal_weights(entry, baths, j)
            a, ad = entry.lowering, entry.raising
            m += down * (
                2.0 * left_right(a, ad) - left_right(entry.lower_sq, eye) - left_right(eye, entry.lower_sq)
            )
            m += up * (
                2.0 * left_right(ad, a) - left_right(entry.raise_sq, eye) - left_right(eye, entry.raise_sq)
            )
    return m


def _spectral_radius(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def _default_dt(spectral_radius: float) -> float:
    return 0.01 / max(1.0, spectral_radius)


def _rk4_propagator(m: np.ndarray, dt: float) -> np.ndarray:
    """One classic RK4 step of the linear system v' = M v as a matrix.

    For an autonomous linear right-hand side the four-stage update is
    exactly the degree-4 Taylor polynomial of exp(dt M).
    """
    eye = np.eye(m.shape[0], dtype=complex)
    mdt = dt * m
    p = eye + mdt
    term = mdt
    for divisor in (2.0, 3.0, 4.0):
        term = term @ mdt / divisor
        p += term
    return p


def _hygiene(v: np.ndarray) -> None:
    """Re-Hermitize and renormalize the trace of a row-major state vector."""
    mat = v.reshape(8, 8)
    mat += mat.conj().T.copy()
    mat *= 0.5
    tr = mat.trace().real
    mat /= tr


def evolve_rk4(
    rho0: np.ndarray,
    params: ChainParams,
    baths: BathSpec,
    ops: JumpOperatorSet | None = None,
    dt: float | None = None,
    steps: int = 1000,
    sample_every: int = 1,
) -> list[tuple[float, np.ndarray]]:
    """Propagate a state with classic fourth-order Runge-Kutta steps.

    After every step the state is re-Hermitized, (rho + rho+)/2, and
    trace-renormalized.  Samples (t, rho) are collected every
    sample_every steps, including the initial state at t = 0.  The step
    must satisfy dt * max|eig(M)| < 0.1; the error message suggests the
    default 0.01 / max(1, spectral radius) otherwise.
    """
    if ops is None:
        ops = build_jump_operators(analytic_eigensystem(params))
    if steps < 1 or sample_every < 1:
        raise InvalidParameterError("steps and sample_every must be positive integers")
    m = liouvillian_matrix(params, baths, ops, order="C")
    radius = _spectral_radius(m)
    if dt is None:
        dt = _default_dt(radius)
    if dt <= 0:
        raise InvalidParameterError("dt must be positive")
    if dt * radius >= 0.1:
        raise StepSizeError(
            f"dt * spectral_radius = {dt * radius:.3g} violates the stability guard 0.1; "
            f"suggested dt = {_default_dt(radius):.3e}"
        )
    prop = _rk4_propagator(m, dt)
    v = np.asarray(rho0, dtype=complex).reshape(-1).copy()
    samples = [(0.0, v.reshape(8, 8).copy())]
    for step in range(1, steps + 1):
        v = prop @ v
        _hygiene(v)
        if step % sample_every == 0 or step == steps:
            rho = v.reshape(8, 8).copy()
            min_eig = float(np.linalg.eigvalsh(rho)[0])
            if min_eig < -1e-6:
                raise IntegrationError(
                    f"state lost positivity at step {step}: min eigenvalue {min_eig:.3e}"
                )
            samples.append((step * dt, rho))
    return samples


def steady_state(
    params: ChainParams,
    baths: BathSpec,
    method: str = "nullspace",
    ops: JumpOperatorSet | None = None,
    rho0: np.ndarray | None = None,
    dt: float | None = None,
    t_max: float | None = None,
) -> np.ndarray:
    """Solve for the stationary state of the master equation.

    "nullspace" takes the singular vector of the vectorized Liouvillian
    at its smallest singular value (residual target 1e-10);
    "rk4" integrates from rho0 (default maximally mixed) until
    ||drho/dt||_F < 1e-12 (residual target 1e-8), with Runge-Kutta
    steps composed in blocks of 64 for speed.  The default horizon
    covers both 50 / gamma and 40 / (slowest Liouvillian decay rate).
    """
    if ops is None:
        ops = build_jump_operators(analytic_eigensystem(params))
    if method == "nullspace":
        m = liouvillian_matrix(params, baths, ops, order="F")
        _, s, vh = np.linalg.svd(m)
        if s[-2] < 1e-9:
            raise NonUniqueSteadyStateError(
                f"two smallest singular values {s[-1]:.3e}, {s[-2]:.3e}: "
                "the steady manifold is degenerate within 1e-9"
            )
        rho = vh[-1].conj().reshape((8, 8), order="F")
        residual_tol = 1e-10
    elif method == "rk4":
        m = liouvillian_matrix(params, baths, ops, order="C")
        eigvals = np.linalg.eigvals(m)
        radius = float(np.max(np.abs(eigvals)))
        if dt is None:
            dt = _default_dt(radius)
        if dt * radius >= 0.1:
            raise StepSizeError(
                f"dt * spectral_radius = {dt * radius:.3g} violates the stability guard 0.1; "
                f"suggested dt = {_default_dt(radius):.3e}"
            )
        if t_max is None:
            # 50 / gamma undershoots badly when the slowest decay mode is
            # much smaller than gamma (small mixing amplitudes), so size
            # the horizon from the actual Liouvillian gap.
            nonzero = np.abs(eigvals.real[np.abs(eigvals) > 1e-9])
            gap = float(np.min(nonzero)) if nonzero.size else math.inf
            t_max = max(
                50.0 / min(baths.rate(1), baths.rate(3)),
                40.0 / gap if gap > 0 else 0.0,
            )
        prop = _rk4_propagator(m, dt)
        if rho0 is None:
            rho0 = np.eye(8, dtype=complex) / 8.0
        v = np.asarray(rho0, dtype=complex).reshape(-1).copy()
        # Compose whole blocks of RK4 steps into one matrix; hygiene and
        # the residual check run at block boundaries.
        block = 512
        prop_block = np.linalg.matrix_power(prop, block)
        max_steps = max(1, int(math.ceil(t_max / dt)))
        converged = False
        residual = math.inf
        steps_done = 0
        while steps_done < max_steps:
            if max_steps - steps_done >= block:
                v = prop_block @ v
                steps_done += block
            else:
                v = prop @ v
                steps_done += 1
            _hygiene(v)
            residual = float(np.linalg.norm(m @ v))
            if residual < 1e-12:
                converged = True
                break
        if not converged:
            raise ConvergenceError(
                f"rk4 steady-state solve did not converge by t = {t_max:.3g}; "
                f"residual {residual:.3e}"
            )
        rho = v.reshape(8, 8)
        residual_tol = 1e-8
    else:
        raise InvalidParameterError(f"unknown steady-state method {method!r}")

    rho = 0.5 * (rho + rho.conj().T)
    rho /= rho.trace().real
    eigvals, eigvecs = np.linalg.eigh(rho)
    if eigvals[0] < -1e-9:
        raise ConvergenceError(
            f"steady-state candidate has eigenvalue {eigvals[0]:.3e} below -1e-9"
        )
    if eigvals[0] < 0.0:
        clipped = np.clip(eigvals, 0.0, None)
        rho = (eigvecs * clipped) @ eigvecs.conj().T
        rho /= rho.trace().real
    residual = float(np.linalg.norm(liouvillian_apply(rho, params, baths, ops)))
    if residual > residual_tol:
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.0e} ({method})"
        )
    return rho


def occupation_probabilities(rho: np.ndarray, spectrum: Spectrum) -> np.ndarray:
    """Diagonal of the state in the labelled eigenbasis, P_1..P_8."""
    return np.einsum("il,ij,jl->l", spectrum.states.conj(), rho, spectrum.states).real
