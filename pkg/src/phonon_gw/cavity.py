"""Phonon spectrum of a 1-D hard-wall condensate trap."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .constants import BOLTZMANN_K, HBAR
from .errors import ConfigurationError, DomainError, GateError, RegimeWarning

#: ratio hbar*k / (m*c_s) above which the linear dispersion is flagged
REGIME_THRESHOLD = 0.01


@dataclass(frozen=True)
class CavityConfig:
    """Trap geometry and condensate parameters.

    Attributes:
        length: cavity length in metres.
        sound_speed: speed of sound in m/s.
        max_mode: truncation of all mode sums (modes are 1..max_mode).
        atom_mass: atomic mass in kg; only needed for the regime check.
    """

    length: float
    sound_speed: float
    max_mode: int
    atom_mass: Optional[float] = None

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"length must be positive, got {self.length}")
        if not self.sound_speed > 0:
            raise DomainError(f"sound_speed must be positive, got {self.sound_speed}")
        if int(self.max_mode) != self.max_mode or self.max_mode < 2:
            raise DomainError(f"max_mode must be an integer >= 2, got {self.max_mode}")
        if self.atom_mass is not None and not self.atom_mass > 0:
            raise DomainError(f"atom_mass must be positive, got {self.atom_mass}")

    @property
    def fundamental(self) -> float:
        """Angular frequency of mode 1, pi*c_s/L."""
        return math.pi * self.sound_speed / self.length


def _check_mode(n, cfg):
    if int(n) != n or not 1 <= n <= cfg.max_mode:
        raise DomainError(f"mode index {n} outside 1..{cfg.max_mode} (max_mode truncation)")


def mode_frequency(n: int, cfg: CavityConfig) -> float:
    """Angular frequency omega_n = n*pi*c_s/L of cavity mode ``n`` in rad/s.

    Computed as ``n * omega_1`` so that omega_n == n * omega_1 holds bit for bit.
    """
    _check_mode(n, cfg)
    return n * cfg.fundamental


def resonant_drive_frequency(m: int, n: int, cfg: CavityConfig) -> float:
    """Drive frequency omega_m + omega_n that resonantly creates pairs in (m, n).

    Raises:
        GateError: if ``m == n`` or ``m + n`` is even; the first-order resonant
            pair-creation coefficient is only defined for odd ``m + n``.
    """
    _check_mode(m, cfg)
    _check_mode(n, cfg)
    if m == n:
        raise GateError(f"resonant pair needs distinct modes, got m = n = {m}")
    if (m + n) % 2 == 0:
        raise GateError(
            f"m + n = {m + n} is even: the first-order resonant beta coefficient "
            "vanishes for even m + n, only odd sums give a creation resonance"
        )
    return mode_frequency(m, cfg) + mode_frequency(n, cfg)


@dataclass(frozen=True)
class RegimeCheck:
    ratio: float
    advisory: bool


def check_phonon_regime(n: int, cfg: CavityConfig, warn: bool = True) -> RegimeCheck:
    """Ratio hbar*k_n / (m*c_s) for the linear (phonon) dispersion to hold.

    The advisory flag is raised above :data:`REGIME_THRESHOLD`; it is never an
    error.
    """
    if cfg.atom_mass is None:
        raise ConfigurationError("check_phonon_regime needs cavity atom_mass")
    _check_mode(n, cfg)
    k = n * math.pi / cfg.length
    ratio = HBAR * k / (cfg.atom_mass * cfg.sound_speed)
    advisory = ratio > REGIME_THRESHOLD
    if advisory and warn:
        warnings.warn(
            f"mode {n}: hbar*k/(m*c_s) = {ratio:.3g} exceeds {REGIME_THRESHOLD}",
            RegimeWarning,
            stacklevel=2,
        )
    return RegimeCheck(ratio, advisory)


@dataclass(frozen=True)
class Occupation:
    """Bose-Einstein occupation; ``log10`` is authoritative, ``linear`` may underflow."""

    linear: float
    log10: float
    ln: float


def thermal_occupation(frequency_hz: float, temperature_k: float) -> Occupation:
    """Mean thermal phonon number 1/(exp(h f / k_B T) - 1) at cyclic frequency ``f``.

    Evaluated as exp(-x)/(1 - exp(-x)) in log space, so occupations far below
    the double-precision range (1e-625 and smaller) keep an exact log10.
    """
    if not frequency_hz > 0:
        raise DomainError(f"frequency_hz must be positive, got {frequency_hz}")
    if not temperature_k > 0:
        raise DomainError(f"temperature_k must be positive, got {temperature_k}")
    x = HBAR * 2.0 * math.pi * frequency_hz / (BOLTZMANN_K * temperature_k)
    # ln n = -x - ln(1 - e^-x); -expm1(-x) keeps the small-x limit accurate
    ln = -x - math.log(-math.expm1(-x))
    return Occupation(linear=math.exp(ln), log10=ln / math.log(10.0), ln=ln)
