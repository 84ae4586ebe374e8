"""Hamiltonian and exact eigensystem of the three-spin chain.

The chain couples three spin-1/2 sites with an XX nearest-neighbour
exchange of strength J, places every site in a homogeneous magnetic
field h along z, and adds a three-site interaction of strength k that
exchanges the two end spins through the middle one:

    H = J * (sx1 sx2 + sy1 sy2 + sx2 sx3 + sy2 sy3)
        + h * (sz1 + sz2 + sz3)
        + k * (sx1 sz2 sx3 + sy1 sz2 sy3)

States live in the computational basis |n1 n2 n3> with n in {0, 1},
where |1> is the sz = +1 state and n1 is the most significant bit
(basis index = 4*n1 + 2*n2 + n3).  With that convention the matrix of
sz is diag(-1, +1) on a single site.

The eight eigenpairs have closed forms.  Levels are labelled 1..8 in a
fixed order (not sorted by energy) so that occupations, the level-3 to
level-5 gap and the |phi5> ground-state references stay unambiguous:

    e1 = -3h          |phi1> = |000>
    e2 = +3h          |phi2> = |111>
    e3 = h - 2k       |phi3> = (-|110> + |011>)/sqrt(2)
    e4 = -h + 2k      |phi4> = (-|100> + |001>)/sqrt(2)
    e5 = -h - k - B   |phi5> = sin(a1)/sqrt(2) (|100> + |001>) + cos(a1)|010>
    e6 = h + k - B    |phi6> = sin(a2)/sqrt(2) (|110> + |011>) - cos(a2)|101>
    e7 = -h - k + B   |phi7> = sin(a2)/sqrt(2) (|100> + |001>) + cos(a2)|010>
    e8 = h + k + B    |phi8> = sin(a1)/sqrt(2) (|110> + |011>) - cos(a1)|101>

with B = sqrt(8 + k^2) and the mixing coefficients of
:func:`mixing_angles`.  The closed forms are written for J = 1; general
J is handled exactly through H(J, h, k) = J * H(1, h/J, k/J), which
leaves the eigenvectors unchanged and scales energies by J.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, NonHermitianError

__all__ = [
    "ChainParams",
    "MixingAngles",
    "Spectrum",
    "EigenSystem",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "site_operator",
    "build_hamiltonian",
    "mixing_angles",
    "analytic_eigensystem",
    "numeric_eigensystem",
    "transition_frequencies",
    "energy_gap_35",
]

# Single-site Pauli matrices in the (|0>, |1>) ordering used here,
# i.e. basis index 0 is the sz = -1 state.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of the chain, in units of the exchange J.

    All shipped sweep presets keep the convention J = 1; negative h or
    k are accepted but flagged because they fall outside the regime the
    sweeps were validated on.
    """

    h: float
    k: float
    J: float = 1.0

    def __post_init__(self):
        for name in ("h", "k", "J"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise InvalidParameterError(
                    f"chain parameter {name} must be a finite real number, got {value!r}"
                )
        if self.h < 0 or self.k < 0:
            warnings.warn(
                "negative h or k lies outside the validated sweep regime",
                stacklevel=2,
            )


@dataclass(frozen=True)
class MixingAngles:
    """Mixing coefficients of the symmetric one- and two-flip eigenstates.

    b is the energy scale sqrt(8 + k^2); the (sin, cos) pairs each lie
    on the unit circle.  They depend on k only.
    """

    b: float
    sin_a1: float
    cos_a1: float
    sin_a2: float
    cos_a2: float

    @property
    def sin_sum(self) -> float:
        """sin(a1 + a2)."""
        return self.sin_a1 * self.cos_a2 + self.cos_a1 * self.sin_a2

    @property
    def sin_diff(self) -> float:
        """sin(a1 - a2)."""
        return self.sin_a1 * self.cos_a2 - self.cos_a1 * self.sin_a2


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues and eigenvectors of the chain in label order.

    energies[l] and states[:, l] hold level l+1 (labels are 1-based in
    formulas and output files).  The arrays are frozen after
    construction and safe to share between workers.
    """

    energies: np.ndarray
    states: np.ndarray
    angles: MixingAngles

    def __post_init__(self):
        self.energies.setflags(write=False)
        self.states.setflags(write=False)

    def state(self, label: int) -> np.ndarray:
        """Return eigenvector |phi_label> for a 1-based label."""
        if not 1 <= label <= 8:
            raise InvalidParameterError(f"level label must be 1..8, got {label}")
        return self.states[:, label - 1]


class EigenSystem(NamedTuple):
    """Ascending eigenpairs from a numerical diagonalization."""

    energies: np.ndarray
    states: np.ndarray


def site_operator(op: np.ndarray, site: int) -> np.ndarray:
    """Embed a single-site operator at a 1-based site of the 3-site register."""
    if site not in (1, 2, 3):
        raise InvalidParameterError(f"site must be 1, 2 or 3, got {site}")
    factors = [_ID2, _ID2, _ID2]
    factors[site - 1] = op
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def build_hamiltonian(p: ChainParams) -> np.ndarray:
    """Assemble the 8x8 chain Hamiltonian in the computational basis.

    Returns a real-symmetric matrix; every term of the model has real
    matrix elements in this basis.
    """
    h = np.zeros((8, 8), dtype=complex)
    for i in (1, 2):
        h += p.J * (
            site_operator(SIGMA_X, i) @ site_operator(SIGMA_X, i + 1)
            + site_operator(SIGMA_Y, i) @ site_operator(SIGMA_Y, i + 1)
        )
    for i in (1, 2, 3):
        h += p.h * site_operator(SIGMA_Z, i)
    sx1, sz2, sx3 = (
        site_operator(SIGMA_X, 1),
        site_operator(SIGMA_Z, 2),
        site_operator(SIGMA_X, 3),
    )
    sy1, sy3 = site_operator(SIGMA_Y, 1), site_operator(SIGMA_Y, 3)
    h += p.k * (sx1 @ sz2 @ sx3 + sy1 @ sz2 @ sy3)
    if np.max(np.abs(h.imag)) > 1e-14:
        raise NonHermitianError("hamiltonian assembly produced imaginary parts")
    return np.ascontiguousarray(h.real)


def mixing_angles(k: float) -> MixingAngles:
    """Mixing coefficients at interaction strength k (J = 1 units).

    B = sqrt(8 + k^2) exceeds |k|, so neither denominator can vanish.
    """
    if not math.isfinite(k):
        raise InvalidParameterError(f"k must be finite, got {k!r}")
    b = math.sqrt(8.0 + k * k)
    d1 = math.sqrt(8.0 + (k - b) ** 2)
    d2 = math.sqrt(8.0 + (k + b) ** 2)
    root8 = 2.0 * math.sqrt(2.0)
    return MixingAngles(
        b=b,
        sin_a1=root8 / d1,
        cos_a1=(k - b) / d1,
        sin_a2=root8 / d2,
        cos_a2=(k + b) / d2,
    )


def _basis_ket(n1: int, n2: int, n3: int) -> np.ndarray:
    ket = np.zeros(8, dtype=complex)
    ket[4 * n1 + 2 * n2 + n3] = 1.0
    return ket


def analytic_eigensystem(p: ChainParams) -> Spectrum:
    """Closed-form eigensystem in label order 1..8.

    Signs and normalization follow the closed forms quoted in the
    module docstring.  For J != 1 the reduced parameters (h/J, k/J)
    enter the state coefficients and energies are rescaled by J.
    """
    if p.J == 0:
        # Degenerate exchange: fall back to the J = 1 forms scaled to zero
        # coupling is ill-defined (B collapses); treat as invalid.
        raise InvalidParameterError("J must be nonzero for the closed-form eigensystem")
    hr, kr = p.h / p.J, p.k / p.J
    ang = mixing_angles(kr)
    b = ang.b
    energies = p.J * np.array(
        [
            -3 * hr,
            3 * hr,
            hr - 2 * kr,
            -hr + 2 * kr,
            -hr - kr - b,
            hr + kr - b,
            -hr - kr + b,
            hr + kr + b,
        ]
    )
    s2 = 1.0 / math.sqrt(2.0)
    states = np.zeros((8, 8), dtype=complex)
    states[:, 0] = _basis_ket(0, 0, 0)
    states[:, 1] = _basis_ket(1, 1, 1)
    states[:, 2] = s2 * (-_basis_ket(1, 1, 0) + _basis_ket(0, 1, 1))
    states[:, 3] = s2 * (-_basis_ket(1, 0, 0) + _basis_ket(0, 0, 1))
    states[:, 4] = (
        s2 * ang.sin_a1 * (_basis_ket(1, 0, 0) + _basis_ket(0, 0, 1))
        + ang.cos_a1 * _basis_ket(0, 1, 0)
    )
    states[:, 5] = (
        s2 * ang.sin_a2 * (_basis_ket(1, 1, 0) + _basis_ket(0, 1, 1))
        - ang.cos_a2 * _basis_ket(1, 0, 1)
    )
    states[:, 6] = (
        s2 * ang.sin_a2 * (_basis_ket(1, 0, 0) + _basis_ket(0, 0, 1))
        + ang.cos_a2 * _basis_ket(0, 1, 0)
    )
    states[:, 7] = (
        s2 * ang.sin_a1 * (_basis_ket(1, 1, 0) + _basis_ket(0, 1, 1))
        - ang.cos_a1 * _basis_ket(1, 0, 1)
    )
    return Spectrum(energies=energies, states=states, angles=ang)


def numeric_eigensystem(h: np.ndarray) -> EigenSystem:
    """Diagonalize a Hermitian matrix; eigenvalues ascending.

    Serves as the independent cross-check of the closed forms and as a
    fallback; it never feeds the closed-form path.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise NonHermitianError("matrix is not Hermitian to 1e-12")
    energies, states = np.linalg.eigh(h)
    return EigenSystem(energies=energies, states=states)


def transition_frequencies(p: ChainParams) -> tuple[float, float, float]:
    """Raw signed transition frequencies (w1, w2, w3).

    w1 = 2h - k - B, w2 = 2h - k + B, w3 = 2(h + k), in units of J.
    Signs are left untouched; the jump-operator builder canonicalizes
    them to positive lowering frequencies.
    """
    hr, kr = p.h / p.J, p.k / p.J
    b = math.sqrt(8.0 + kr * kr)
    return (
        p.J * (2 * hr - kr - b),
        p.J * (2 * hr - kr + b),
        p.J * 2 * (hr + kr),
    )


def energy_gap_35(p: ChainParams) -> float:
    """Gap e3 - e5 = 2h + (B - k) between levels 3 and 5.

    Linear in h with slope exactly 2; the offset B - k decays toward 0
    as k grows, which is what pins the gap to about 2h at strong
    interaction.
    """
    hr, kr = p.h / p.J, p.k / p.J
    b = math.sqrt(8.0 + kr * kr)
    return p.J * (2 * hr + b - kr)
