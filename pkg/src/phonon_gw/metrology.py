"""Fidelity, quantum Fisher information and the resulting strain sensitivity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import mpmath
import numpy as np

from .bogoliubov import (
    LONG_TIME_GATE,
    BogoliubovSet,
    WaveParams,
    is_resonant,
    time_dependent_coefficients,
)
from .cavity import CavityConfig, mode_frequency, resonant_drive_frequency
from .errors import DomainError, GateError
from .gaussian import (
    CovarianceState,
    complete_symplectic,
    reduce,
    symplectic_form,
    symplectic_from_bogoliubov,
    transform,
    two_mode_squeezed,
)

DET_IMAG_TOL = 1e-10
FIDELITY_TOL = 1e-10
DEFAULT_D_EPS = 1e-5
MIN_D_EPS = 1e-8
FD_DISCREPANCY_TARGET = 1e-3
#: working precision (decimal digits) of the fidelity determinants
FIDELITY_DPS = 40

QFI_METHODS = ("fidelity_fd", "closed_derived", "closed_paper")
METHOD_TAGS = {
    "fidelity_fd": "fidelity_fd",
    "closed_derived": "closed_form_derived",
    "closed_paper": "closed_form_paper",
}
#: alternative prefactor n/(4m) over derived n/(16m)
PAPER_TO_DERIVED = 4.0


@dataclass(frozen=True)
class EstimationInput:
    """Everything needed to bound the precision on the wave amplitude.

    ``mode_pair`` is the probed pair (n, m) prepared in a two-mode squeezed
    state with squeezing ``squeezing``; ``probes`` is the number of
    independent repetitions M.
    """

    mode_pair: Tuple[int, int]
    squeezing: float
    wave: WaveParams
    cavity: CavityConfig
    probes: float = 1

    def __post_init__(self):
        if not self.probes >= 1:
            raise DomainError(f"probes must be >= 1, got {self.probes}")
        n, m = self.mode_pair
        if n == m:
            raise DomainError("mode_pair needs two distinct modes")
        for k in (n, m):
            if not 1 <= k <= self.cavity.max_mode:
                raise DomainError(f"mode {k} outside 1..{self.cavity.max_mode}")


@dataclass(frozen=True)
class SensitivityRecord:
    qfi: float
    delta_epsilon: float
    strain_sensitivity: float
    method_tag: str
    inputs: EstimationInput


def _real(z, what):
    if abs(z.imag) > DET_IMAG_TOL * max(1, abs(z)):
        raise ArithmeticError(f"{what} expected real, imaginary residue {float(z.imag):.3g}")
    return z.real


def _mp_terms(a, b):
    om = mpmath.matrix(symplectic_form(2).tolist())
    one = mpmath.eye(4)
    sa, sb = mpmath.matrix(a.matrix.tolist()), mpmath.matrix(b.matrix.tolist())
    ioa, iob = 1j * om * sa, 1j * om * sb
    gamma = _real(mpmath.det(ioa * iob + one), "Gamma") / 16
    lam = _real(mpmath.det(ioa + one) * mpmath.det(iob + one), "Lambda") / 16
    delta = mpmath.det(sa + sb) / 16
    return gamma, lam, delta


def fidelity_terms(a: CovarianceState, b: CovarianceState) -> Tuple[float, float, float]:
    """(Gamma, Lambda, Delta) of the two-mode fidelity formula."""
    with mpmath.workdps(FIDELITY_DPS):
        return tuple(float(v) for v in _mp_terms(a, b))


def _fidelity_mp(a, b):
    for s in (a, b):
        if s.mode_count != 2:
            raise DomainError(f"fidelity is defined for two-mode states, got {s.mode_count} modes")
        if not s.is_physical():
            raise DomainError(f"unphysical state (margin {s.physicality_margin():.3g})")
    gamma, lam, delta = _mp_terms(a, b)
    # Lambda vanishes for pure states and may come out marginally negative
    x = mpmath.sqrt(max(gamma, 0)) + mpmath.sqrt(max(lam, 0))
    f = (x + mpmath.sqrt(max(x * x - delta, 0))) / delta
    if not -FIDELITY_TOL <= f <= 1 + FIDELITY_TOL:
        raise ArithmeticError(f"fidelity {float(f)!r} outside [0, 1]")
    return min(max(f, mpmath.mpf(0)), mpmath.mpf(1))


def fidelity(a: CovarianceState, b: CovarianceState) -> float:
    """Uhlmann fidelity between two zero-mean two-mode Gaussian states.

    F = 1 / (sqrt(L) + sqrt(G) - sqrt((sqrt(L) + sqrt(G))^2 - D)), evaluated
    in the rationalised form (x + sqrt(x^2 - D)) / D with x = sqrt(L) + sqrt(G).
    x^2 - D vanishes for pure states, where its square root would turn double
    rounding noise into ~1e-8 errors, so the determinants are taken in
    extended precision from the (exact) float inputs.
    """
    with mpmath.workdps(FIDELITY_DPS):
        return float(_fidelity_mp(a, b))


def probe_state(inp: EstimationInput, epsilon: float) -> CovarianceState:
    """Reduced state of the probed pair after a wave of amplitude ``epsilon``."""
    cfg = inp.cavity
    n, m = inp.mode_pair
    sigma0 = two_mode_squeezed(inp.squeezing, n, m, cfg.max_mode)
    bset = time_dependent_coefficients(inp.wave.with_amplitude(epsilon), cfg)
    S = complete_symplectic(symplectic_from_bogoliubov(bset))
    return reduce(transform(sigma0, S), [n, m])


@dataclass(frozen=True)
class FiniteDifferenceQFI:
    qfi: float  # Richardson-extrapolated
    qfi_step: float  # at d_eps
    qfi_half_step: float  # at d_eps / 2
    discrepancy: float  # |qfi_step - qfi_half_step| / |qfi|
    d_eps: float


def _bures_qfi(s0, s1, d):
    # 1 - sqrt(F) ~ H d^2 / 8 can sit below double resolution; keep it in mpmath
    with mpmath.workdps(FIDELITY_DPS):
        return float(8 * (1 - mpmath.sqrt(_fidelity_mp(s0, s1))) / mpmath.mpf(d) ** 2)


def _fd_pass(inp, base, eps, d):
    h1 = _bures_qfi(base, probe_state(inp, eps + d), d)
    h2 = _bures_qfi(base, probe_state(inp, eps + 0.5 * d), 0.5 * d)
    rich = (4.0 * h2 - h1) / 3.0
    disc = abs(h1 - h2) / abs(rich) if rich else 0.0
    return FiniteDifferenceQFI(rich, h1, h2, disc, d)


def qfi_fidelity_fd(
    inp: EstimationInput, d_eps: float = DEFAULT_D_EPS, refine: bool = True
) -> FiniteDifferenceQFI:
    """QFI from the fidelity between the states at eps and eps + d_eps.

    H = 8 (1 - sqrt(F)) / d_eps^2, computed at ``d_eps`` and ``d_eps / 2`` and
    combined by Richardson extrapolation to cancel the O(d_eps^2) bias. Strong
    squeezing or long durations make the state vary fast with eps; with
    ``refine`` the step is then shrunk by 4 until the two estimates agree to
    :data:`FD_DISCREPANCY_TARGET` or the step reaches :data:`MIN_D_EPS`.
    The step actually used is reported.
    """
    if not MIN_D_EPS <= d_eps <= 1e-3:
        raise DomainError(f"d_eps must lie in [{MIN_D_EPS}, 1e-3], got {d_eps}")
    if inp.wave.duration == 0:
        # the state does not depend on eps at all
        return FiniteDifferenceQFI(0.0, 0.0, 0.0, 0.0, d_eps)
    eps = inp.wave.amplitude
    base = probe_state(inp, eps)
    res = _fd_pass(inp, base, eps, d_eps)
    while refine and res.discrepancy > FD_DISCREPANCY_TARGET and res.d_eps / 4 >= MIN_D_EPS:
        res = _fd_pass(inp, base, eps, res.d_eps / 4)
    return res


@dataclass(frozen=True)
class ClosedGeneralQFI:
    qfi: float
    terms: dict


def qfi_closed_general(bset: BogoliubovSet, n: int, m: int, r: float) -> ClosedGeneralQFI:
    """Closed-form QFI for a two-mode squeezed probe in terms of general coefficients.

    Mirrors the standard printed combination term by term, including its
    doubled G term; each term (before the eps^-2 normalisation) is returned
    in ``terms`` for inspection. Only the fidelity route is authoritative.
    """
    eps = bset.epsilon
    if eps == 0:
        raise DomainError("coefficient set evaluated at epsilon = 0 cannot be normalised")
    a, b = bset.alpha, bset.beta
    rest = [k for k in range(bset.max_mode) if k not in (n - 1, m - 1)]
    f_a = {i: 0.5 * np.sum(np.abs(a[rest, i - 1]) ** 2) for i in (n, m)}
    f_b = {i: 0.5 * np.sum(np.abs(b[rest, i - 1]) ** 2) for i in (n, m)}
    g_nm = np.sum(a[rest, n - 1] * np.conj(b[rest, m - 1]))
    al, be = a[n - 1, m - 1], b[n - 1, m - 1]
    ch, sh = math.cosh(r), math.sinh(r)
    terms = {
        "f_sum": 4 * ch * (f_a[n] + f_b[n] + f_a[m] + f_b[m]),
        "cosh2": 4 * ch**2 * (2 * abs(be) ** 2 - f_a[n] + f_b[n] - f_a[m] + f_b[m]),
        "sinh2": 4 * sh**2 * (f_a[n] - f_b[n] + f_a[m] - f_b[m] - 2 * be**2 + 2 * al**2),
        "g_cross": 4 * sh * (g_nm + g_nm).real,
        "cosh4": -4 * ch**4 * abs(be) ** 2,
        "sinh2_2r": -0.5 * math.sinh(2 * r) ** 2 * (2 * abs(al) ** 2 - 3 * abs(be) ** 2 - be**2),
    }
    total = sum(complex(v) for v in terms.values())
    return ClosedGeneralQFI(total.real / eps**2, {k: complex(v) for k, v in terms.items()})


def squeezing_bracket(r: float) -> float:
    """8 - 4 cosh^4 r + 2 sinh^2 2r, evaluated as the equivalent 4 (1 + sinh^4 r)."""
    return 4.0 * (1.0 + math.sinh(r) ** 4)


@dataclass(frozen=True)
class ResonantQFI:
    derived: float
    paper: float
    log10_derived: float
    omega1_t: float

    @property
    def ratio(self) -> float:
        return self.paper / self.derived if self.derived else PAPER_TO_DERIVED

    def value(self, method: str) -> float:
        return self.paper if method == "closed_paper" else self.derived


def check_resonant_gate(inp: EstimationInput) -> float:
    """Raise :class:`GateError` unless the wave drives the probed pair at resonance
    for long enough; return omega_1 * t."""
    n, m = inp.mode_pair
    resonant_drive_frequency(m, n, inp.cavity)
    if not is_resonant(m, n, inp.wave, inp.cavity):
        raise GateError(
            f"drive {inp.wave.drive_frequency:.12g} rad/s is off the ({m}, {n}) resonance"
        )
    w1t = inp.cavity.fundamental * inp.wave.duration
    if w1t < LONG_TIME_GATE:
        raise GateError(f"omega_1 * t = {w1t:.4g} is below the long-time gate {LONG_TIME_GATE}")
    return w1t


def qfi_resonant(inp: EstimationInput) -> ResonantQFI:
    """Resonant-limit QFI (n / 16m) w_m^2 t^2 (8 - 4 cosh^4 r + 2 sinh^2 2r).

    ``paper`` carries the alternative prefactor n / 4m, exactly four times the
    value obtained by inserting the resonant beta_nm into the general
    formula (``derived``).
    """
    w1t = check_resonant_gate(inp)
    n, m = inp.mode_pair
    wm_t = mode_frequency(m, inp.cavity) * inp.wave.duration
    r = inp.squeezing
    derived = n / (16.0 * m) * wm_t**2 * squeezing_bracket(r)
    # log-space copy survives r where sinh^4 overflows
    log_sinh4 = 4.0 * (r + math.log1p(-math.exp(-2.0 * r)) - math.log(2.0)) if r > 0 else -math.inf
    log_h = math.log(n / (16.0 * m)) + 2.0 * math.log(wm_t) + math.log(4.0) + np.logaddexp(0.0, log_sinh4)
    return ResonantQFI(derived, PAPER_TO_DERIVED * derived, log_h / math.log(10.0), w1t)


def cramer_rao(qfi: float, probes: float) -> float:
    """Smallest achievable standard deviation 1 / sqrt(M H) on the amplitude."""
    if not qfi > 0:
        raise DomainError(f"QFI must be positive for a finite bound, got {qfi}")
    if not probes >= 1:
        raise DomainError(f"probe count must be >= 1, got {probes}")
    return 1.0 / math.sqrt(probes * qfi)


def strain_sensitivity(
    delta_eps: float, drive: float, form: str = "sqrt_omega", frequency_unit: str = "angular"
) -> float:
    """Figure of merit delta_eps / sqrt(Omega) (``form="omega"``: delta_eps / Omega).

    ``drive`` is the angular drive frequency in rad/s. With the default
    ``frequency_unit="angular"`` its numerical value is used as s^-1;
    ``"cyclic"`` divides by 2 pi first.
    """
    if not drive > 0:
        raise DomainError(f"drive frequency must be positive, got {drive}")
    if frequency_unit == "angular":
        nu = drive
    elif frequency_unit == "cyclic":
        nu = drive / (2.0 * math.pi)
    else:
        raise DomainError(f"unknown frequency_unit {frequency_unit!r}")
    if form == "sqrt_omega":
        return delta_eps / math.sqrt(nu)
    if form == "omega":
        return delta_eps / nu
    raise DomainError(f"unknown figure of merit {form!r}")


def evaluate(
    inp: EstimationInput,
    method: str = "closed_derived",
    d_eps: float = DEFAULT_D_EPS,
    form: str = "sqrt_omega",
    frequency_unit: str = "angular",
    qfi_override: Optional[float] = None,
) -> SensitivityRecord:
    """QFI, Cramer-Rao bound and strain sensitivity for one operating point.

    A zero QFI gives an infinite bound rather than an error.
    """
    if method not in QFI_METHODS:
        raise DomainError(f"unknown qfi method {method!r}; choose from {QFI_METHODS}")
    if qfi_override is not None:
        h = qfi_override
    elif method == "fidelity_fd":
        h = qfi_fidelity_fd(inp, d_eps).qfi
    else:
        h = qfi_resonant(inp).value(method)
    if h > 0:
        de = cramer_rao(h, inp.probes)
        ss = strain_sensitivity(de, inp.wave.drive_frequency, form, frequency_unit)
    else:
        de = ss = math.inf
    return SensitivityRecord(h, de, ss, METHOD_TAGS[method], inp)
