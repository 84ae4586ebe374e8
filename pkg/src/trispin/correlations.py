"""Two-spin reduced states and their correlation measures.

A pair of spins is cut out of the three-spin register by a partial
trace; on the resulting two-qubit state this module evaluates the von
Neumann entropy, quantum mutual information, Wootters concurrence,
measured conditional entropy, quantum discord and classical
correlation.  All entropies use base-2 logarithms, so a maximally
entangled pair carries mutual information 2 and discord 1.

Discord and classical correlation need the best local projective
measurement on one side.  The projector pair is parametrized by a
polar angle theta and a phase phi through

    |m1> = cos(theta) |0> + exp(+i phi) sin(theta) |1>
    |m2> = sin(theta) exp(-i phi) |0> - cos(theta) |1>

and the search runs over theta in [0, pi/2], phi in [0, 2 pi); the
projector pair is invariant under theta -> theta + pi/2 up to
relabelling, so the reduced range is exhaustive.  The optimizer is a
deterministic coarse grid (48 x 96) whose three best well-separated
cells each seed a zoom refinement: the window shrinks by a factor of 4
per round around the running optimum for at least five rounds, then
until the value improves by less than 1e-10 (ten rounds at most).
Ties break toward smaller theta, then smaller phi.  By default the
measurement acts on subsystem B, the second spin of the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, InvalidStateError
from .spectrum import mixing_angles

__all__ = [
    "SpinPair",
    "MeasurementAngles",
    "CorrelationRecord",
    "partial_trace",
    "von_neumann_entropy",
    "mutual_information",
    "concurrence",
    "conditional_entropy_measured",
    "classical_correlation",
    "quantum_discord",
    "correlation_record",
    "pure_state_pair_correlations",
    "trace_distance",
]

_PAIR_TO_DROP = {"12": 3, "13": 2, "23": 1}

# Einsum contractions tracing out one spin of rho reshaped to
# (n1, n2, n3, m1, m2, m3); kept spins stay in ascending site order.
_TRACE_SPEC = {1: "abcaef->bcef", 2: "abcdbf->acdf", 3: "abcdec->abde"}


@dataclass(frozen=True)
class SpinPair:
    """A studied pair of spins, identified by its label "12", "13" or "23"."""

    label: str

    def __post_init__(self):
        if self.label not in _PAIR_TO_DROP:
            raise InvalidParameterError(
                f"pair label must be one of {sorted(_PAIR_TO_DROP)}, got {self.label!r}"
            )

    @property
    def keep(self) -> tuple[int, int]:
        return int(self.label[0]), int(self.label[1])

    @property
    def drop(self) -> int:
        return _PAIR_TO_DROP[self.label]


@dataclass(frozen=True)
class MeasurementAngles:
    """Projector-pair angles, normalized to theta in [0, pi), phi in [0, 2 pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", self.theta % math.pi)
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))


@dataclass(frozen=True)
class CorrelationRecord:
    """All correlation measures of one two-spin state."""

    discord: float
    classical_correlation: float
    mutual_information: float
    concurrence: float
    theta_opt: float
    phi_opt: float


def _as_pair(pair: "SpinPair | str") -> SpinPair:
    return pair if isinstance(pair, SpinPair) else SpinPair(str(pair))


def partial_trace(rho: np.ndarray, pair: "SpinPair | str") -> np.ndarray:
    """Reduce the 8x8 chain state to the 4x4 state of a spin pair.

    The result is ordered first kept spin (x) second kept spin.
    """
    pair = _as_pair(pair)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise InvalidStateError(f"expected an 8x8 state, got shape {rho.shape}")
    reduced = np.einsum(_TRACE_SPEC[pair.drop], rho.reshape(2, 2, 2, 2, 2, 2))
    return reduced.reshape(4, 4)


def _clamped_eigvals(rho: np.ndarray) -> np.ndarray:
    vals = np.linalg.eigvalsh(rho)
    low = float(vals[0])
    if low < -1e-6:
        raise InvalidStateError(f"state eigenvalue {low:.3e} is below -1e-6")
    return np.clip(vals, 0.0, None)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -sum(p log2 p) in bits; eigenvalues in [-1e-6, 0) clamp to 0."""
    vals = _clamped_eigvals(np.asarray(rho, dtype=complex))
    nz = vals[vals > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def _marginal_a(rho4: np.ndarray) -> np.ndarray:
    return np.einsum("abcb->ac", rho4.reshape(2, 2, 2, 2))


def _marginal_b(rho4: np.ndarray) -> np.ndarray:
    return np.einsum("abac->bc", rho4.reshape(2, 2, 2, 2))


def mutual_information(rho_ab: np.ndarray) -> float:
    """I = S(A) + S(B) - S(AB) of a two-qubit state."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    return (
        von_neumann_entropy(_marginal_a(rho_ab))
        + von_neumann_entropy(_marginal_b(rho_ab))
        - von_neumann_entropy(rho_ab)
    )


_SY_SY = np.kron(
    np.array([[0.0, 1.0j], [-1.0j, 0.0]]), np.array([[0.0, 1.0j], [-1.0j, 0.0]])
)


def concurrence(rho_ab: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state.

    Eigenvalues of rho (sy x sy) rho* (sy x sy) are clamped at zero
    before the square roots; the result lies in [0, 1].
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    flipped = _SY_SY @ rho_ab.conj() @ _SY_SY
    lam = np.linalg.eigvals(rho_ab @ flipped)
    roots = np.sqrt(np.clip(lam.real, 0.0, None))
    roots.sort()
    return float(max(0.0, roots[3] - roots[2] - roots[1] - roots[0]))


def _measurement_kets(theta, phi):
    """Orthonormal kets (m1, m2) for arrays of angles; last axis is the qubit."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    m1 = np.stack([np.cos(theta) + 0j, np.exp(1j * phi) * np.sin(theta)], axis=-1)
    m2 = np.stack([np.exp(-1j * phi) * np.sin(theta), -np.cos(theta) + 0j], axis=-1)
    return m1, m2


def conditional_entropy_measured(
    rho_ab: np.ndarray, angles: "MeasurementAngles | tuple[float, float]"
) -> float:
    """Average entropy of A after projecting B with the angle pair.

    Builds the projectors explicitly, applies them from both sides and
    traces out B; outcomes with probability below 1e-14 contribute 0.
    """
    if not isinstance(angles, MeasurementAngles):
        angles = MeasurementAngles(*angles)
    rho_ab = np.asarray(rho_ab, dtype=complex)
    m1, m2 = _measurement_kets(angles.theta, angles.phi)
    eye = np.eye(2, dtype=complex)
    total = 0.0
    for ket in (m1, m2):
        proj = np.kron(eye, np.outer(ket, ket.conj()))
        post = proj @ rho_ab @ proj
        prob = post.trace().real
        if prob < 1e-14:
            continue
        rho_a = _marginal_a(post) / prob
        total += prob * von_neumann_entropy(rho_a)
    return float(total)


def _xlog2x(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    mask = x > 0.0
    out[mask] = x[mask] * np.log2(x[mask])
    return out


def _measured_entropy_grid(
    rho_t: np.ndarray, rho_a: np.ndarray, theta: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Measured conditional entropy on a (theta, phi) grid, vectorized.

    rho_t is the state reshaped to (2, 2, 2, 2).  For each outcome ket v
    the unnormalized post-measurement state of A is
    K(v)[a, c] = sum_{b, d} conj(v_b) rho[a, b, c, d] v_d; the second
    outcome satisfies K2 = rho_A - K1 by completeness.
    """
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    m1, _ = _measurement_kets(tt.ravel(), pp.ravel())
    k1 = np.einsum("nb,abcd,nd->nac", m1.conj(), rho_t, m1, optimize=True)
    k2 = rho_a[None, :, :] - k1
    total = np.zeros(k1.shape[0])
    for k in (k1, k2):
        q = (k[:, 0, 0] + k[:, 1, 1]).real
        half_gap = np.sqrt(
            0.25 * (k[:, 0, 0] - k[:, 1, 1]).real ** 2 + np.abs(k[:, 0, 1]) ** 2
        )
        lam_hi = np.clip(0.5 * q + half_gap, 0.0, None)
        lam_lo = np.clip(0.5 * q - half_gap, 0.0, None)
        # q * S(K/q) = q log2 q - lam_hi log2 lam_hi - lam_lo log2 lam_lo
        term = _xlog2x(q) - _xlog2x(lam_hi) - _xlog2x(lam_lo)
        term[q < 1e-14] = 0.0
        total += term
    return total.reshape(len(theta), len(phi))


def _swap_sides(rho_ab: np.ndarray) -> np.ndarray:
    return rho_ab.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)


def _zoom(rho_t, rho_a, start_theta, start_phi, start_value) -> tuple[float, float, float]:
    """Shrink a 25x25 window by 4 per round around the running optimum.

    Five rounds always run (a coarse round that fails to beat the
    incumbent is not convergence); afterwards rounds continue until the
    value improves by less than 1e-10, up to ten rounds total.
    """
    best, best_theta, best_phi = start_value, start_theta, start_phi
    theta_span, phi_span = 0.5 * math.pi, 2.0 * math.pi
    previous = math.inf
    for round_index in range(10):
        theta_span /= 4.0
        phi_span /= 4.0
        lo = min(max(best_theta - 0.5 * theta_span, 0.0), 0.5 * math.pi - theta_span)
        theta = np.linspace(lo, lo + theta_span, 25)
        phi = np.linspace(best_phi - 0.5 * phi_span, best_phi + 0.5 * phi_span, 25)
        grid = _measured_entropy_grid(rho_t, rho_a, theta, phi)
        flat = int(np.argmin(grid))
        value = float(grid.ravel()[flat])
        if value < best:
            best = value
            best_theta = float(theta[flat // len(phi)])
            best_phi = float(phi[flat % len(phi)])
        if round_index >= 4 and previous - best < 1e-10:
            break
        previous = best
    return best, best_theta, best_phi


def _best_measurement(rho_ab: np.ndarray) -> tuple[float, float, float]:
    """Maximize S(A) - S_meas over projector pairs on B.

    Returns (best value, theta, phi).  The coarse 48 x 96 grid seeds
    zoom refinements from its three best well-separated cells, which
    covers near-degenerate basins; everything is deterministic with
    ties broken toward smaller theta, then smaller phi.
    """
    rho_t = rho_ab.reshape(2, 2, 2, 2)
    rho_a = _marginal_a(rho_ab)
    s_a = von_neumann_entropy(rho_a)

    n_theta, n_phi = 48, 96
    theta = np.linspace(0.0, 0.5 * math.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    grid = _measured_entropy_grid(rho_t, rho_a, theta, phi)

    order = np.argsort(grid, axis=None, kind="stable")
    starts: list[tuple[float, float, float]] = []
    for flat in order:
        ti, pi_ = int(flat) // n_phi, int(flat) % n_phi
        separated = all(
            abs(ti - prev_ti) > 3 or min((pi_ - prev_pi) % n_phi, (prev_pi - pi_) % n_phi) > 3
            for _, prev_ti, prev_pi in starts
        )
        if separated:
            starts.append((float(grid[ti, pi_]), ti, pi_))
        if len(starts) == 3:
            break

    best = (math.inf, math.inf, math.inf)
    for value, ti, pi_ in starts:
        candidate = _zoom(rho_t, rho_a, float(theta[ti]), float(phi[pi_]), value)
        if candidate < best:
            best = candidate
    return s_a - best[0], best[1], best[2] % (2.0 * math.pi)


def _validated(rho_ab: np.ndarray) -> np.ndarray:
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape != (4, 4):
        raise InvalidStateError(f"expected a 4x4 state, got shape {rho_ab.shape}")
    if np.max(np.abs(rho_ab - rho_ab.conj().T)) > 1e-10:
        raise InvalidStateError("state is not Hermitian to 1e-10")
    if abs(rho_ab.trace().real - 1.0) > 1e-10:
        raise InvalidStateError("state trace differs from 1 beyond 1e-10")
    return rho_ab


def classical_correlation(rho_ab: np.ndarray, measured: str = "B") -> float:
    """Maximal measured correlation max_Pi [S(A) - S_meas(A|B)]."""
    rho_ab = _validated(rho_ab)
    if measured == "A":
        rho_ab = _swap_sides(rho_ab)
    elif measured != "B":
        raise InvalidParameterError(f"measured side must be 'A' or 'B', got {measured!r}")
    value, _, _ = _best_measurement(rho_ab)
    return value


def quantum_discord(rho_ab: np.ndarray, measured: str = "B") -> tuple[float, float, float]:
    """Quantum discord and the optimal measurement angles.

    D = I(A:B) - max_Pi [S(A) - S_meas(A|B)], measurement on the given
    side (default B).  Returns (discord, theta_opt, phi_opt).
    """
    rho_ab = _validated(rho_ab)
    work = _swap_sides(rho_ab) if measured == "A" else rho_ab
    if measured not in ("A", "B"):
        raise InvalidParameterError(f"measured side must be 'A' or 'B', got {measured!r}")
    value, theta, phi = _best_measurement(work)
    return mutual_information(rho_ab) - value, theta, phi


def correlation_record(rho_ab: np.ndarray, measured: str = "B") -> CorrelationRecord:
    """Bundle mutual information, discord, classical correlation and concurrence.

    The decomposition D + C_cl = I holds by construction because both
    terms come from one optimizer run.
    """
    rho_ab = _validated(rho_ab)
    work = _swap_sides(rho_ab) if measured == "A" else rho_ab
    if measured not in ("A", "B"):
        raise InvalidParameterError(f"measured side must be 'A' or 'B', got {measured!r}")
    value, theta, phi = _best_measurement(work)
    info = mutual_information(rho_ab)
    return CorrelationRecord(
        discord=info - value,
        classical_correlation=value,
        mutual_information=info,
        concurrence=concurrence(rho_ab),
        theta_opt=theta,
        phi_opt=phi,
    )


def pure_state_pair_correlations(k: float, pair: "SpinPair | str") -> CorrelationRecord:
    """Correlation record of a spin pair inside the symmetric one-flip ground state.

    The state sin(a1)/sqrt(2) (|100> + |001>) + cos(a1) |010> depends on
    the interaction strength only, so no field argument is needed.
    """
    ang = mixing_angles(k)
    amp = np.zeros(8, dtype=complex)
    amp[4] = ang.sin_a1 / math.sqrt(2.0)  # |100>
    amp[2] = ang.cos_a1                   # |010>
    amp[1] = ang.sin_a1 / math.sqrt(2.0)  # |001>
    rho = np.outer(amp, amp.conj())
    return correlation_record(partial_trace(rho, pair))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance 0.5 ||a - b||_1 between two Hermitian matrices."""
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
