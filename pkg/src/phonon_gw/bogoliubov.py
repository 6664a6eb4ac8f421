"""First-order Bogoliubov coefficients for a cavity driven by h_+(t) = eps*sin(Omega*t).

All matrices are indexed ``[m - 1, n - 1]`` for cavity modes ``m, n`` in
``1..max_mode``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cavity import CavityConfig, mode_frequency, resonant_drive_frequency
from .errors import DomainError, GateError, RegimeWarning

AMPLITUDE_LIMIT = 0.1
AMPLITUDE_ADVISORY = 1e-3
#: omega_1 * t below which the resonant long-time approximation is not trusted
LONG_TIME_GATE = 100.0
RESONANCE_RTOL = 1e-9

METHOD_TAGS = ("discrete", "exact_integral", "resonant")


@dataclass(frozen=True)
class WaveParams:
    """Sinusoidal strain h_+(t) = amplitude * sin(drive_frequency * t) of given duration."""

    amplitude: float
    drive_frequency: float  # rad/s
    duration: float  # s

    def __post_init__(self):
        if not 0 <= self.amplitude < AMPLITUDE_LIMIT:
            raise DomainError(
                f"amplitude must lie in [0, {AMPLITUDE_LIMIT}) for first-order validity, "
                f"got {self.amplitude}"
            )
        if self.amplitude > AMPLITUDE_ADVISORY:
            warnings.warn(
                f"amplitude {self.amplitude} > {AMPLITUDE_ADVISORY}: second-order terms "
                "may not be negligible",
                RegimeWarning,
                stacklevel=3,
            )
        if not self.drive_frequency > 0:
            raise DomainError(f"drive_frequency must be positive, got {self.drive_frequency}")
        if not self.duration >= 0:
            raise DomainError(f"duration must be non-negative, got {self.duration}")

    def with_amplitude(self, amplitude: float) -> "WaveParams":
        return WaveParams(amplitude, self.drive_frequency, self.duration)


@dataclass(frozen=True)
class BogoliubovSet:
    """Truncated alpha/beta matrices together with how they were obtained.

    ``epsilon`` is the perturbation amplitude the matrices were evaluated at;
    it equals ``wave.amplitude`` whenever a wave is attached.
    """

    alpha: np.ndarray
    beta: np.ndarray
    method_tag: str
    cavity: CavityConfig
    epsilon: float
    wave: Optional[WaveParams] = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.cavity.max_mode
        for name in ("alpha", "beta"):
            mat = np.array(getattr(self, name), dtype=complex)
            if mat.shape != (n, n):
                raise DomainError(f"{name} must be {n}x{n}, got {mat.shape}")
            mat.flags.writeable = False
            object.__setattr__(self, name, mat)
        if self.method_tag not in METHOD_TAGS:
            raise DomainError(f"unknown method_tag {self.method_tag!r}")

    @property
    def max_mode(self) -> int:
        return self.cavity.max_mode

    def alpha_mn(self, m: int, n: int) -> complex:
        return complex(self.alpha[m - 1, n - 1])

    def beta_mn(self, m: int, n: int) -> complex:
        return complex(self.beta[m - 1, n - 1])

    def bogoliubov_identity(self) -> np.ndarray:
        """Column sums sum_m |alpha_mn|^2 - |beta_mn|^2, one entry per mode n."""
        return np.sum(np.abs(self.alpha) ** 2 - np.abs(self.beta) ** 2, axis=0)


def _mode_grid(cfg):
    idx = np.arange(1, cfg.max_mode + 1, dtype=float)
    return idx[:, None], idx[None, :]


def _discrete_matrices(epsilon, cfg):
    m, n = _mode_grid(cfg)
    sign = np.where((m + n) % 2 == 0, 1.0, -1.0)
    root = np.sqrt(m * n)
    off = m != n
    beta = np.where(off, -sign * root / (2.0 * (m + n)) * epsilon, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(off, sign * root / (2.0 * (m - n)) * epsilon, 1.0)
    return alpha, beta


def discrete_coefficients(epsilon: float, cfg: CavityConfig) -> BogoliubovSet:
    """Coefficients for an instantaneous jump of the metric by ``epsilon``, to first order.

    beta_mn = -(-1)^(m+n) sqrt(mn) / (2(m+n)) * eps and
    alpha_mn = (-1)^(m+n) sqrt(mn) / (2(m-n)) * eps off the diagonal;
    alpha_nn = 1 and beta_nn = 0.
    """
    if not abs(epsilon) < AMPLITUDE_LIMIT:
        raise DomainError(f"|epsilon| must be < {AMPLITUDE_LIMIT}, got {epsilon}")
    alpha, beta = _discrete_matrices(epsilon, cfg)
    return BogoliubovSet(alpha, beta, "discrete", cfg, epsilon)


def _phase_integral(a, t):
    # int_0^t exp(i a s) ds, written with sinc so a -> 0 is regular
    return t * np.exp(0.5j * a * t) * np.sinc(a * t / (2.0 * np.pi))


def oscillatory_integral(omega, drive, t):
    """Kernel int_0^t exp(-i*omega*s) * sin(drive*s) ds.

    Algebraically equal to
    [drive - e^{-i omega t}(drive cos(drive t) + i omega sin(drive t))] / (drive^2 - omega^2),
    but evaluated as a difference of two sinc-weighted phase integrals, which
    has no removable singularity at omega = +-drive. No branch switch is needed
    and the result is accurate uniformly across resonance. Broadcasts over
    array arguments.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("integration time t must be non-negative")
    omega = np.asarray(omega, dtype=float)
    drive = np.asarray(drive, dtype=float)
    val = (_phase_integral(drive - omega, t) - _phase_integral(-(drive + omega), t)) / 2j
    return val[()] if val.ndim == 0 else val


def generic_kernel(omega, drive, t):
    """Textbook closed form of :func:`oscillatory_integral`; singular at omega = +-drive."""
    return (drive - np.exp(-1j * omega * t) * (drive * np.cos(drive * t) + 1j * omega * np.sin(drive * t))) / (
        drive**2 - omega**2
    )


def resonant_kernel(drive, t):
    """Exact :func:`oscillatory_integral` at omega = drive: t/(2i) - (e^{-2i drive t} - 1)/(4 drive)."""
    return t / 2j - (np.exp(-2j * drive * t) - 1.0) / (4.0 * drive)


def time_dependent_coefficients(wave: WaveParams, cfg: CavityConfig) -> BogoliubovSet:
    """Coefficients after the sinusoidal wave has acted for ``wave.duration``.

    beta_mn(t) = i (w_m + w_n) beta_mn * K(w_m + w_n) and
    alpha_mn(t) = i (w_m - w_n) alpha_mn * K(w_m - w_n) with K the
    :func:`oscillatory_integral` kernel and the discrete coefficients at
    amplitude ``wave.amplitude``. The diagonal is left unperturbed
    (alpha_nn = 1, beta_nn = 0).
    """
    a_disc, b_disc = _discrete_matrices(wave.amplitude, cfg)
    m, n = _mode_grid(cfg)
    w1 = cfg.fundamental
    w_sum = (m + n) * w1
    w_diff = (m - n) * w1
    beta = 1j * w_sum * b_disc * oscillatory_integral(w_sum, wave.drive_frequency, wave.duration)
    alpha = 1j * w_diff * a_disc * oscillatory_integral(w_diff, wave.drive_frequency, wave.duration)
    np.fill_diagonal(alpha, 1.0)
    np.fill_diagonal(beta, 0.0)
    return BogoliubovSet(alpha, beta, "exact_integral", cfg, wave.amplitude, wave)


def is_resonant(m: int, n: int, wave: WaveParams, cfg: CavityConfig) -> bool:
    target = resonant_drive_frequency(m, n, cfg)
    return abs(wave.drive_frequency - target) <= RESONANCE_RTOL * target


def check_long_time(wave: WaveParams, cfg: CavityConfig) -> float:
    """Return omega_1 * t and warn when it is below :data:`LONG_TIME_GATE`."""
    w1t = cfg.fundamental * wave.duration
    if w1t < LONG_TIME_GATE:
        warnings.warn(
            f"omega_1 * t = {w1t:.3g} < {LONG_TIME_GATE}: the resonant long-time "
            "approximation is not reliable here",
            RegimeWarning,
            stacklevel=3,
        )
    return w1t


def resonant_coefficients(
    m: int, n: int, wave: WaveParams, cfg: CavityConfig, paper_prefactor: bool = False
) -> BogoliubovSet:
    """Secularly growing part of beta at the resonance drive = w_m + w_n.

    Every pair (j, k) with j + k = m + n is resonant and receives
    beta_jk = (eps/4) sqrt(jk) (pi c_s / L) t, which reduces to
    (eps/4) sqrt(n/m) w_m t for (j, k) = (n, m). With ``paper_prefactor`` all
    resonant pairs instead share the (n, m) magnitude. alpha is the identity.
    """
    resonant_drive_frequency(m, n, cfg)  # parity / distinctness gate
    if not is_resonant(m, n, wave, cfg):
        raise GateError(
            f"drive {wave.drive_frequency:.12g} rad/s is off the ({m}, {n}) resonance "
            f"{resonant_drive_frequency(m, n, cfg):.12g} rad/s; use time_dependent_coefficients"
        )
    check_long_time(wave, cfg)
    jj, kk = _mode_grid(cfg)
    on = (jj + kk) == (m + n)
    eps, t = wave.amplitude, wave.duration
    if paper_prefactor:
        mag = 0.25 * eps * math.sqrt(n / m) * mode_frequency(m, cfg) * t
        beta = np.where(on, mag, 0.0)
    else:
        beta = np.where(on, 0.25 * eps * np.sqrt(jj * kk) * cfg.fundamental * t, 0.0)
    alpha = np.eye(cfg.max_mode)
    notes = {"prefactor": "paper" if paper_prefactor else "per_pair", "pair": (m, n)}
    return BogoliubovSet(alpha, beta, "resonant", cfg, eps, wave, notes)


def particle_number(bset: BogoliubovSet, n: int) -> float:
    """Expected number of phonons created in mode ``n``: sum_m |beta_mn|^2."""
    if not 1 <= n <= bset.max_mode:
        raise DomainError(f"mode index {n} outside 1..{bset.max_mode}")
    return float(np.sum(np.abs(bset.beta[:, n - 1]) ** 2))
