"""Independent reference implementations used only by the tests.

Everything here recomputes expected values through a different route
than the library: the Hamiltonian from explicit bit rules instead of
Kronecker products, thermal states from the matrix exponential, and
the best projective measurement from a dense angle grid instead of the
zoom search.  Nothing in this module imports from trispin.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def rule_hamiltonian(h: float, k: float, j: float = 1.0) -> np.ndarray:
    """Chain Hamiltonian assembled by acting on basis states bit by bit.

    Basis index 4*n1 + 2*n2 + n3 with n = 1 the up state.  The XX bond
    hops a single flipped spin between neighbours with weight 2J, the
    field counts up minus down spins, and the three-site term swaps the
    states of the end spins through the middle one with weight 2k times
    the sign of the middle spin.
    """
    dim = 8
    out = np.zeros((dim, dim))

    def bits(state):
        return (state >> 2) & 1, (state >> 1) & 1, state & 1

    for state in range(dim):
        n1, n2, n3 = bits(state)
        out[state, state] += h * ((2 * n1 - 1) + (2 * n2 - 1) + (2 * n3 - 1))
        # sx sx + sy sy on bond (1,2): exchanges unequal neighbours.
        if n1 != n2:
            flipped = state ^ 0b110
            out[flipped, state] += 2.0 * j
        if n2 != n3:
            flipped = state ^ 0b011
            out[flipped, state] += 2.0 * j
        # three-site term: flips both end spins when they differ,
        # weight 2k times sz of the middle spin.
        if n1 != n3:
            flipped = state ^ 0b101
            out[flipped, state] += 2.0 * k * (2 * n2 - 1)
    return out


def gibbs_state(hamiltonian: np.ndarray, temperature: float) -> np.ndarray:
    """Thermal state exp(-H/T) / Z."""
    rho = expm(-np.asarray(hamiltonian, dtype=complex) / temperature)
    return rho / np.trace(rho).real


def bell_state(which: int = 0) -> np.ndarray:
    """Density matrix of one of the four Bell states (0: Phi+, 1: Phi-, 2: Psi+, 3: Psi-)."""
    s = 1.0 / np.sqrt(2.0)
    kets = {
        0: np.array([s, 0, 0, s]),
        1: np.array([s, 0, 0, -s]),
        2: np.array([0, s, s, 0]),
        3: np.array([0, s, -s, 0]),
    }
    ket = kets[which].astype(complex)
    return np.outer(ket, ket.conj())


def werner_state(p: float) -> np.ndarray:
    """p |Psi-><Psi-| + (1 - p) I/4."""
    return p * bell_state(3) + (1.0 - p) * np.eye(4) / 4.0


def random_density_matrix(dim: int, rng: np.random.RandomState, rank: int | None = None) -> np.ndarray:
    """Wishart-style random mixed state of the given rank."""
    rank = dim if rank is None else rank
    a = rng.randn(dim, rank) + 1j * rng.randn(dim, rank)
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.RandomState) -> np.ndarray:
    a = rng.randn(dim, dim) + 1j * rng.randn(dim, dim)
    q, r = np.linalg.qr(a)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _entropy_bits(vals: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vals)
    mask = vals > 0.0
    out[mask] = vals[mask] * np.log2(vals[mask])
    return out


def brute_force_classical_correlation_many(
    states: list[np.ndarray], n_theta: int = 1000, n_phi: int = 2000
) -> np.ndarray:
    """Dense-grid maximum of S(A) - S_meas(A|B) for a batch of states.

    Evaluates every (theta, phi) on the grid for every state; the grid
    kets are built once per phi chunk and shared across states.
    """
    thetas = np.linspace(0.0, 0.5 * np.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)

    tensors = [np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2) for rho in states]
    marg_a = [np.einsum("abcb->ac", t) for t in tensors]
    s_a = np.empty(len(states))
    for idx, ma in enumerate(marg_a):
        vals = np.clip(np.linalg.eigvalsh(ma), 0.0, None)
        s_a[idx] = -_entropy_bits(vals).sum()

    best = np.full(len(states), np.inf)
    for chunk in np.array_split(phis, 10):
        tt, pp = np.meshgrid(thetas, chunk, indexing="ij")
        tt, pp = tt.ravel(), pp.ravel()
        v1 = np.stack([np.cos(tt) + 0j, np.exp(1j * pp) * np.sin(tt)], axis=-1)
        v2 = np.stack([np.exp(-1j * pp) * np.sin(tt), -np.cos(tt) + 0j], axis=-1)
        for idx, rho_t in enumerate(tensors):
            total = np.zeros(v1.shape[0])
            for v in (v1, v2):
                kmat = np.einsum("nb,abcd,nd->nac", v.conj(), rho_t, v, optimize=True)
                q = (kmat[:, 0, 0] + kmat[:, 1, 1]).real
                mean = 0.5 * q
                det = (
                    kmat[:, 0, 0].real * kmat[:, 1, 1].real
                    - np.abs(kmat[:, 0, 1]) ** 2
                )
                root = np.sqrt(np.clip(mean * mean - det, 0.0, None))
                lam_hi = np.clip(mean + root, 0.0, None)
                lam_lo = np.clip(mean - root, 0.0, None)
                term = _entropy_bits(q) - _entropy_bits(lam_hi) - _entropy_bits(lam_lo)
                term[q < 1e-14] = 0.0
                total += term
            best[idx] = min(best[idx], float(total.min()))
    return s_a - best


def brute_force_classical_correlation(
    rho: np.ndarray, n_theta: int = 1000, n_phi: int = 2000
) -> float:
    return float(brute_force_classical_correlation_many([rho], n_theta, n_phi)[0])
