"""Zero-mean Gaussian states in the covariance-matrix picture.

Quadratures are interleaved per mode, (x_1, p_1, x_2, p_2, ...), with
x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)) and
sigma_ij = <X_i X_j + X_j X_i>, so the vacuum is the identity matrix.
Modes are numbered from 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .bogoliubov import BogoliubovSet
from .errors import DomainError

SYMMETRY_RTOL = 1e-12
PHYSICALITY_TOL = 1e-10

_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal form with 2x2 blocks [[0, -1], [1, 0]] (= -i sigma_y)."""
    return np.kron(np.eye(n_modes), _J2)


def _quad_index(modes):
    return [i for k in modes for i in (2 * (k - 1), 2 * (k - 1) + 1)]


@dataclass(frozen=True)
class CovarianceState:
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise DomainError(f"covariance matrix must be 2N x 2N, got shape {mat.shape}")
        scale = max(1.0, np.max(np.abs(mat)))
        if np.max(np.abs(mat - mat.T)) > SYMMETRY_RTOL * scale:
            raise DomainError("covariance matrix is not symmetric")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0] // 2

    def physicality_margin(self) -> float:
        """Smallest eigenvalue of sigma + i*Omega; negative means unphysical."""
        herm = self.matrix + 1j * symplectic_form(self.mode_count)
        return float(np.linalg.eigvalsh(herm)[0])

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        scale = max(1.0, np.max(np.abs(self.matrix)))
        return self.physicality_margin() >= -tol * scale


def vacuum(n_modes: int) -> CovarianceState:
    return CovarianceState(np.eye(2 * n_modes))


def two_mode_squeezed(r: float, mode_a: int, mode_b: int, n_modes: int) -> CovarianceState:
    """Two-mode squeezed vacuum on (mode_a, mode_b), every other mode in vacuum.

    The pair carries diagonal blocks cosh(2r) I and cross blocks
    sinh(2r) diag(1, -1).
    """
    if mode_a == mode_b:
        raise DomainError(f"two-mode squeezing needs distinct modes, got {mode_a} twice")
    for k in (mode_a, mode_b):
        if not 1 <= k <= n_modes:
            raise DomainError(f"mode {k} outside 1..{n_modes}")
    sigma = np.eye(2 * n_modes)
    ia, ib = 2 * (mode_a - 1), 2 * (mode_b - 1)
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    sigma[ia : ia + 2, ia : ia + 2] = ch * np.eye(2)
    sigma[ib : ib + 2, ib : ib + 2] = ch * np.eye(2)
    cross = sh * np.diag([1.0, -1.0])
    sigma[ia : ia + 2, ib : ib + 2] = cross
    sigma[ib : ib + 2, ia : ia + 2] = cross
    return CovarianceState(sigma)


def symplectic_from_bogoliubov(bset: BogoliubovSet) -> np.ndarray:
    """Real 2N x 2N matrix whose (m, n) block is
    [[Re(a - b), Im(a + b)], [-Im(a - b), Re(a + b)]] with a = alpha_mn, b = beta_mn.

    Built from first-order coefficients this is symplectic only up to
    O(eps^2); see :func:`complete_symplectic`.
    """
    a, b = bset.alpha, bset.beta
    n = a.shape[0]
    blocks = np.empty((n, n, 2, 2))
    blocks[..., 0, 0] = (a - b).real
    blocks[..., 0, 1] = (a + b).imag
    blocks[..., 1, 0] = -(a - b).imag
    blocks[..., 1, 1] = (a + b).real
    return blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)


def complete_symplectic(S: np.ndarray) -> np.ndarray:
    """Exactly symplectic transform expm(S - I) agreeing with ``S`` to first order.

    For first-order coefficients (alpha - I anti-Hermitian, beta symmetric)
    the generator S - I is Hamiltonian, so the exponential is symplectic to
    machine precision. The O(eps^2) terms it adds are the ones any genuine
    Bogoliubov transformation must carry; states built with the truncated
    ``S`` violate the uncertainty principle at the same order at which the
    fidelity route measures information.
    """
    return expm(S - np.eye(S.shape[0]))


def symplecticity_defect(S: np.ndarray) -> float:
    """max |S Omega S^T - Omega|."""
    om = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S @ om @ S.T - om)))


def transform(state: CovarianceState, S: np.ndarray) -> CovarianceState:
    """S sigma S^T, re-symmetrized to suppress rounding drift."""
    S = np.asarray(S, dtype=float)
    if S.shape != state.matrix.shape:
        raise DomainError(f"transform shape {S.shape} does not match state {state.matrix.shape}")
    out = S @ state.matrix @ S.T
    return CovarianceState(0.5 * (out + out.T))


def reduce(state: CovarianceState, modes: Sequence[int]) -> CovarianceState:
    """Covariance matrix of ``modes`` only (rows/columns of the others deleted)."""
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise DomainError(f"modes must be distinct, got {modes}")
    for k in modes:
        if not 1 <= k <= state.mode_count:
            raise DomainError(f"mode {k} outside 1..{state.mode_count}")
    idx = _quad_index(modes)
    return CovarianceState(state.matrix[np.ix_(idx, idx)])
