"""Brute-force cross-checks for the closed forms used elsewhere in the package.

Nothing here is called on production paths; the test-suite pairs each closed
form with the counterpart listed in :data:`COUNTERPARTS`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gaussian import CovarianceState, symplectic_form

PURITY_TOL = 1e-10

#: closed form -> the independent route that validates it
COUNTERPARTS = {
    "bogoliubov.oscillatory_integral": "oracle.quad_oscillatory",
    "bogoliubov.resonant_coefficients": "bogoliubov.time_dependent_coefficients",
    "metrology.fidelity": "oracle.pure_fidelity_oracle",
    "metrology.qfi_closed_general": "metrology.qfi_fidelity_fd",
    "metrology.qfi_resonant": "metrology.qfi_fidelity_fd",
    "metrology.qfi_fidelity_fd": "oracle.mixed_state_qfi",
}


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-12
    max_subdivisions: int = 2_000_000
    panels_per_period: int = 16

    def __post_init__(self):
        if not 0 < self.relative_tolerance <= 1e-6:
            raise DomainError("relative_tolerance must lie in (0, 1e-6]")
        if self.panels_per_period < 8:
            raise DomainError("panels_per_period must be at least 8")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    converged: bool
    panels: int


_LO = np.polynomial.legendre.leggauss(10)
_HI = np.polynomial.legendre.leggauss(20)


def _panel_sums(f, a, b, rule):
    x, w = rule
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    s = mid[:, None] + half[:, None] * x[None, :]
    return half * (f(s) @ w)


def _csum(z):
    return complex(math.fsum(z.real), math.fsum(z.imag))


def quad_oscillatory(omega: float, drive: float, t: float, spec: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """Adaptive Gauss-Legendre evaluation of int_0^t exp(-i omega s) sin(drive s) ds.

    The interval is first cut into panels of ``1/panels_per_period`` of the
    faster of the two periods; panels whose 10- and 20-point rules disagree
    beyond tolerance are bisected until converged or the subdivision budget
    is spent (in which case the best estimate is returned with a warning).
    """
    if t < 0:
        raise DomainError("integration time t must be non-negative")
    if t == 0:
        return QuadResult(0j, 0.0, True, 0)

    def f(s):
        return np.exp(-1j * omega * s) * np.sin(drive * s)

    fastest = max(abs(omega), abs(drive))
    width = 2 * math.pi / fastest / spec.panels_per_period if fastest > 0 else t
    n0 = max(1, math.ceil(t / width))
    if n0 > spec.max_subdivisions:
        raise DomainError(
            f"t = {t:g} needs {n0} initial panels, above max_subdivisions = {spec.max_subdivisions}"
        )
    edges = np.linspace(0.0, t, n0 + 1)
    a, b = edges[:-1], edges[1:]

    done = []
    done_err = 0.0
    total_panels = n0
    converged = False
    while True:
        lo = _panel_sums(f, a, b, _LO)
        hi = _panel_sums(f, a, b, _HI)
        err = np.abs(hi - lo)
        estimate = abs(_csum(hi) + sum(done, 0j))
        # per-panel budget proportional to width keeps the total within tolerance
        budget = spec.relative_tolerance * max(estimate, np.finfo(float).tiny) * (b - a) / t
        # |f| <= 1 and its phase carries a rounding error ~ eps * fastest * s, so
        # rule differences below this floor are noise rather than truncation
        floor = 64 * np.finfo(float).eps * (1.0 + fastest * b) * (b - a)
        bad = err > np.maximum(budget, floor)
        done.append(_csum(hi[~bad]))
        done_err += float(np.sum(err[~bad]))
        if not bad.any():
            converged = True
            break
        if total_panels + bad.sum() > spec.max_subdivisions:
            done.append(_csum(hi[bad]))
            done_err += float(np.sum(err[bad]))
            warnings.warn(
                f"quad_oscillatory did not converge within {spec.max_subdivisions} panels",
                RuntimeWarning,
                stacklevel=2,
            )
            break
        ab, bb = a[bad], b[bad]
        mid = 0.5 * (ab + bb)
        a = np.concatenate([ab, mid])
        b = np.concatenate([mid, bb])
        total_panels += int(bad.sum())
    value = complex(math.fsum(z.real for z in done), math.fsum(z.imag for z in done))
    return QuadResult(value, done_err, converged, total_panels)


@dataclass(frozen=True)
class SymplecticSpectrum:
    values: np.ndarray  # one symplectic eigenvalue per mode, ascending
    pure: bool


def purity_check(state: CovarianceState, tol: float = PURITY_TOL) -> SymplecticSpectrum:
    """Symplectic eigenvalues: the moduli of the eigenvalues of i*Omega*sigma, paired."""
    om = symplectic_form(state.mode_count)
    w, v = np.linalg.eigh(state.matrix)
    if w[0] <= 0:
        raise DomainError("covariance matrix is not positive definite")
    root = (v * np.sqrt(w)) @ v.T
    # sqrt(sigma) i*Omega sqrt(sigma) is Hermitian and similar to i*Omega*sigma
    ev = np.sort(np.abs(np.linalg.eigvalsh(root @ (1j * om) @ root)))
    paired = ev.reshape(-1, 2)
    if np.max(np.abs(paired[:, 0] - paired[:, 1])) > 1e-8 * max(1.0, ev[-1]):
        raise DomainError("eigenvalues of i*Omega*sigma are not paired; state is not valid")
    values = paired.mean(axis=1)
    return SymplecticSpectrum(values, bool(np.all(np.abs(values - 1.0) <= tol)))


def pure_fidelity_oracle(a: CovarianceState, b: CovarianceState) -> float:
    """Overlap |<psi_a|psi_b>|^2 = det((sigma_a + sigma_b)/2)^(-1/2) for pure states."""
    if a.mode_count != b.mode_count:
        raise DomainError("states have different mode counts")
    for s in (a, b):
        if not purity_check(s).pure:
            raise DomainError("pure_fidelity_oracle refuses mixed states")
    return float(1.0 / math.sqrt(np.linalg.det(0.5 * (a.matrix + b.matrix))))


def mixed_state_qfi(state: CovarianceState, dsigma) -> float:
    """QFI of a zero-mean Gaussian state from its covariance derivative.

    H = 1/2 vec(dsigma)^T (sigma x sigma - Omega x Omega)^-1 vec(dsigma), which
    needs no fidelity at all. The matrix is singular for pure states, so states
    with a symplectic eigenvalue within ``PURITY_TOL`` of 1 are refused.
    """
    dsigma = np.asarray(dsigma, dtype=float)
    if dsigma.shape != state.matrix.shape:
        raise DomainError(f"dsigma shape {dsigma.shape} does not match state {state.matrix.shape}")
    spec = purity_check(state)
    if np.min(spec.values) - 1.0 <= PURITY_TOL:
        raise DomainError("mixed_state_qfi needs every symplectic eigenvalue above 1")
    om = symplectic_form(state.mode_count)
    m = np.kron(state.matrix, state.matrix) - np.kron(om, om)
    v = dsigma.reshape(-1)
    return float(0.5 * v @ np.linalg.solve(m, v))
