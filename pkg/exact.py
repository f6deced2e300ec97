# exact.py
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from app_config import Config
from errors import ConfigError, EigensolverError, ParityMixingError
from models import ModelParams, make_series
from utils import setup_logger

logger = setup_logger(__name__)

# Basis ordering: index 2n is |down, n>, index 2n+1 is |up, n>
DOWN, UP = 0, 1
RESIDUAL_TOL = 1e-10
ORTHO_TOL = 1e-10
PARITY_TOL = 1e-8
PARITY_MIXED = 1e-6


def basis_index(spin_up, n):
    return 2 * n + (UP if spin_up else DOWN)


def spin_diagonal(n_cut):
    """sigma_z on the product basis."""
    return np.tile([-1.0, 1.0], n_cut + 1)


def parity_operator(n_cut):
    """Diagonal of sigma_z (-1)^{a^dagger a}."""
    n = np.repeat(np.arange(n_cut + 1), 2)
    return spin_diagonal(n_cut) * np.where(n % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray
    n_cut: int
    params: ModelParams

    @property
    def dimension(self):
        return self.entries.shape[0]

    @property
    def norm(self):
        return float(np.linalg.norm(self.entries, 2))


@dataclass(frozen=True, eq=False)
class ExactEigensystem:
    energies: np.ndarray
    vectors: np.ndarray
    residual_norm: float
    orthogonality_error: float
    n_cut: int
    params: ModelParams

    @property
    def dimension(self):
        return len(self.energies)

    @property
    def ground_energy(self):
        return float(self.energies[0])


def build_hamiltonian(params, n_cut):
    """
    H = Delta/2 sigma_z + a^dagger a + g (a^dagger + a) sigma_x on Fock states 0..n_cut.
    """
    if int(n_cut) != n_cut or n_cut < 0:
        raise ConfigError(f"Fock truncation must be a non-negative integer, got {n_cut}")
    n_cut = int(n_cut)
    dimension = 2 * (n_cut + 1)
    entries = np.zeros((dimension, dimension))

    n = np.repeat(np.arange(n_cut + 1, dtype=float), 2)
    np.fill_diagonal(entries, spin_diagonal(n_cut) * params.delta_atom / 2.0 + n)

    lower = np.arange(n_cut)
    coupling = params.g * np.sqrt(lower + 1.0)
    # |down,n> <-> |up,n+1> and |up,n> <-> |down,n+1>
    for source, target in ((2 * lower + DOWN, 2 * (lower + 1) + UP), (2 * lower + UP, 2 * (lower + 1) + DOWN)):
        entries[source, target] = coupling
        entries[target, source] = coupling

    logger.debug(f"Assembled Hamiltonian: g={params.g}, n_cut={n_cut}, dimension={dimension}")
    return HamiltonianMatrix(entries=entries, n_cut=n_cut, params=params)


def _degenerate_clusters(energies, tolerance):
    clusters, start = [], 0
    for i in range(1, len(energies) + 1):
        if i == len(energies) or energies[i] - energies[i - 1] > tolerance:
            if i - start > 1:
                clusters.append(np.arange(start, i))
            start = i
    return clusters


def _resolve_parity(energies, vectors, parity, tolerance):
    """Rotate each degenerate cluster onto parity eigenvectors (odd first)."""
    vectors = vectors.copy()
    clusters = _degenerate_clusters(energies, tolerance)
    for cluster in clusters:
        block = vectors[:, cluster]
        projected = block.T @ (parity[:, None] * block)
        _, rotation = np.linalg.eigh((projected + projected.T) / 2.0)
        vectors[:, cluster] = block @ rotation
    if clusters:
        logger.debug(f"Parity-resolved {len(clusters)} degenerate clusters")
    return vectors


def _fix_signs(vectors):
    # Largest component positive, so repeated runs give identical vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def parity_expectations(vectors, n_cut):
    return parity_operator(n_cut) @ (vectors ** 2)


def _finalize(hamiltonian, energies, vectors):
    entries = hamiltonian.entries
    scale = max(1.0, float(np.max(np.abs(energies))))
    parity = parity_operator(hamiltonian.n_cut)

    vectors = _resolve_parity(energies, vectors, parity, 1e-9 * scale)
    labels = parity_expectations(vectors, hamiltonian.n_cut)
    if np.any(np.abs(np.abs(labels) - 1.0) > PARITY_MIXED):
        logger.warning("Parity mixing after eigensolve; re-orthogonalizing with a wider degeneracy window")
        vectors = _resolve_parity(energies, vectors, parity, 1e-6 * scale)
    vectors = _fix_signs(vectors)

    residual = float(np.max(np.linalg.norm(entries @ vectors - vectors * energies, axis=0)))
    orthogonality = float(np.max(np.abs(vectors.T @ vectors - np.eye(len(energies)))))
    h_norm = float(np.max(np.abs(energies)))
    logger.debug(f"Eigensystem dimension={len(energies)} residual={residual:.2e} orthogonality={orthogonality:.2e}")

    if residual > RESIDUAL_TOL * max(1.0, h_norm):
        raise EigensolverError(f"Eigen-residual {residual:.3e} exceeds tolerance", residual=residual)
    if orthogonality > ORTHO_TOL:
        raise EigensolverError(f"Eigenvectors not orthonormal: {orthogonality:.3e}", residual=residual)

    energies = energies.copy()
    energies.setflags(write=False)
    vectors.setflags(write=False)
    return ExactEigensystem(
        energies=energies,
        vectors=vectors,
        residual_norm=residual,
        orthogonality_error=orthogonality,
        n_cut=hamiltonian.n_cut,
        params=hamiltonian.params,
    )


def diagonalize(hamiltonian):
    """Dense symmetric eigendecomposition with residual and orthonormality checks."""
    entries = hamiltonian.entries
    if not np.array_equal(entries, entries.T):
        raise ConfigError("Hamiltonian must be symmetric")
    try:
        energies, vectors = scipy.linalg.eigh(entries)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"Eigensolver did not converge: {e}") from e
    return _finalize(hamiltonian, energies, vectors)


def diagonalize_parity_blocks(hamiltonian):
    """Diagonalize the two parity sectors separately and merge them in ascending order."""
    parity = parity_operator(hamiltonian.n_cut)
    dimension = hamiltonian.dimension
    energies, vectors = [], []
    for sector in (-1.0, 1.0):
        indices = np.flatnonzero(parity == sector)
        block = hamiltonian.entries[np.ix_(indices, indices)]
        try:
            block_energies, block_vectors = scipy.linalg.eigh(block)
        except np.linalg.LinAlgError as e:
            raise EigensolverError(f"Eigensolver did not converge in parity sector {sector:+.0f}: {e}") from e
        embedded = np.zeros((dimension, len(indices)))
        embedded[indices, :] = block_vectors
        energies.append(block_energies)
        vectors.append(embedded)

    energies = np.concatenate(energies)
    vectors = np.concatenate(vectors, axis=1)
    order = np.argsort(energies, kind='stable')
    return _finalize(hamiltonian, energies[order], vectors[:, order])


def parity_labels(eigensystem, n_cut=None):
    """
    Parity eigenvalue (+1 or -1) of every eigenvector, checked against PARITY_TOL.
    """
    n_cut = eigensystem.n_cut if n_cut is None else n_cut
    expectations = parity_expectations(eigensystem.vectors, n_cut)
    deviation = np.abs(np.abs(expectations) - 1.0)
    worst = float(deviation.max())
    if worst > PARITY_MIXED:
        raise ParityMixingError(f"Eigenvector {int(deviation.argmax())} mixes parity sectors (|<P>| off by {worst:.2e})")
    if worst > PARITY_TOL:
        logger.warning(f"Parity expectation off by {worst:.2e}")
    return np.where(expectations > 0, 1, -1)


def match_level(eigensystem, k, n):
    """
    Exact eigenvalue paired with CRWA level (k, n).

    Level (k, n) contains |up, n>, so it lives in the parity sector (-1)^n. Within that
    sector the ascending index is n + k - 1; the ground state takes index 0 of the odd sector.
    """
    labels = parity_labels(eigensystem)
    sector = 1 if n % 2 == 0 else -1
    sector_energies = eigensystem.energies[labels == sector]
    index = n + k - 1
    if index >= len(sector_energies):
        raise ConfigError(f"Level (k={k}, n={n}) lies beyond the truncated basis (n_cut={eigensystem.n_cut})")
    return float(sector_energies[index])


def initial_state(field, n_cut):
    """|up> x |alpha>, embedded without renormalization."""
    if field.n_cut > n_cut:
        raise ConfigError(f"Field truncation {field.n_cut} exceeds the Hamiltonian truncation {n_cut}")
    psi = np.zeros(2 * (n_cut + 1))
    psi[2 * field.photon_numbers + UP] = field.betas
    return psi


def propagate(eigensystem, psi0, times, chunk_size=None):
    """
    psi(t) = V exp(-iEt) V^T psi0 for each t.

    Returns an array of shape (dimension, len(times)).
    """
    chunk_size = chunk_size or Config.CHUNK_SIZE
    times = np.asarray(times, dtype=float)
    overlaps = eigensystem.vectors.T @ psi0
    states = np.empty((eigensystem.dimension, len(times)), dtype=complex)
    for start in range(0, len(times), chunk_size):
        block = times[start:start + chunk_size]
        phases = np.exp(-1j * np.outer(eigensystem.energies, block))
        states[:, start:start + chunk_size] = eigensystem.vectors @ (overlaps[:, None] * phases)
    return states


def energy_expectation(eigensystem, psi0, times):
    """<psi(t)|H|psi(t)>; constant in t for exact propagation."""
    states = propagate(eigensystem, psi0, times)
    rotated = eigensystem.vectors.T @ states
    return np.sum(np.abs(rotated) ** 2 * eigensystem.energies[:, None], axis=0)


def exact_inversion(eigensystem, field, grid, chunk_size=None):
    """
    W(t) = sum_{j,l} p_j p_l (sigma_z)_{jl} cos((E_j - E_l) t).

    The matrix p_j p_l (sigma_z)_{jl} is built once; each time chunk evaluates u^H M u
    with u = exp(-iEt).
    """
    chunk_size = chunk_size or Config.CHUNK_SIZE
    psi0 = initial_state(field, eigensystem.n_cut)
    overlaps = eigensystem.vectors.T @ psi0
    norm = float(overlaps @ overlaps)
    if norm < 1.0 - 1e-10:
        logger.warning(f"Initial state keeps only {norm:.12f} of its norm in the truncated basis")

    vectors = eigensystem.vectors
    sigma_z = vectors.T @ (spin_diagonal(eigensystem.n_cut)[:, None] * vectors)
    weights = np.outer(overlaps, overlaps) * sigma_z

    times = grid.times
    values = np.empty(len(times))
    for start in range(0, len(times), chunk_size):
        phases = np.exp(-1j * np.outer(eigensystem.energies, times[start:start + chunk_size]))
        values[start:start + chunk_size] = np.real(np.sum(np.conj(phases) * (weights @ phases), axis=0))
    return make_series(grid, values, 'W_exact')


def exact_eigensystem(g, n_cut, delta_atom=1.0, method='dense'):
    """Convenience: assemble and diagonalize in one call."""
    hamiltonian = build_hamiltonian(ModelParams(g=g, delta_atom=delta_atom), n_cut)
    if method == 'parity':
        return diagonalize_parity_blocks(hamiltonian)
    if method != 'dense':
        raise ConfigError(f"Unknown diagonalization method '{method}'")
    return diagonalize(hamiltonian)


def exact_n_cut(field, pad=None):
    pad = Config.EXACT_N_CUT_PAD if pad is None else pad
    return field.n_cut + pad
