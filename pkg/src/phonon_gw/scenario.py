"""Scenario files: an INI grammar describing one operating point or a sweep.

::

    [cavity]
    length_m = 1e-6
    sound_speed_m_per_s = 1e-2
    max_mode = 24
    atom_mass_kg = 1.44316e-25      # optional

    [wave]
    amplitude = 0
    duration_s = 1000
    resonant_pair = 10, 11          # or: frequency_hz = 105000

    [state]
    mode_pair = 11, 10
    squeezing_r = 10

    [estimation]
    num_probes = 1e14
    qfi_method = closed_derived     # fidelity_fd | closed_derived | closed_paper
    figure_of_merit = sqrt_omega    # sqrt_omega | omega
    frequency_unit = angular        # optional: angular | cyclic
    d_eps = 1e-5                    # optional

    [sweep]                         # optional; [sweep2] adds a second axis for sweep-grid
    variable = duration_s           # duration_s | squeezing_r | num_probes
    from = 100
    to = 2000
    points = 20
    scale = linear                  # linear | log

    [output]
    format = csv                    # csv | json
    path = fig2a.csv

Physical quantities have no defaults; only numerical policy (``d_eps``,
``frequency_unit``) does.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .bogoliubov import WaveParams
from .cavity import CavityConfig, resonant_drive_frequency
from .errors import ConfigurationError
from .metrology import DEFAULT_D_EPS, MIN_D_EPS, QFI_METHODS, EstimationInput

SWEEP_VARIABLES = ("duration_s", "squeezing_r", "num_probes")


class ScenarioError(ConfigurationError):
    """A scenario file failed to parse; the message carries file, line and field."""


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def values(self) -> List[float]:
        if self.points == 1:
            return [float(self.start)]
        if self.scale == "log":
            vals = np.logspace(math.log10(self.start), math.log10(self.stop), self.points)
        else:
            vals = np.linspace(self.start, self.stop, self.points)
        vals[0], vals[-1] = self.start, self.stop
        return [float(v) for v in vals]


@dataclass(frozen=True)
class Scenario:
    length_m: float
    sound_speed_m_per_s: float
    max_mode: int
    atom_mass_kg: Optional[float]
    amplitude: float
    duration_s: float
    frequency_hz: Optional[float]
    resonant_pair: Optional[Tuple[int, int]]
    mode_pair: Tuple[int, int]
    squeezing_r: float
    num_probes: float
    qfi_method: str
    figure_of_merit: str
    frequency_unit: str = "angular"
    d_eps: float = DEFAULT_D_EPS
    sweep: Optional[Sweep] = None
    sweep2: Optional[Sweep] = None
    output_format: str = "csv"
    output_path: Optional[str] = None
    source: str = "<memory>"

    def cavity(self) -> CavityConfig:
        return CavityConfig(self.length_m, self.sound_speed_m_per_s, self.max_mode, self.atom_mass_kg)

    def drive_frequency(self) -> float:
        """Angular drive frequency in rad/s."""
        if self.resonant_pair is not None:
            m, n = self.resonant_pair
            return resonant_drive_frequency(m, n, self.cavity())
        return 2.0 * math.pi * self.frequency_hz

    def with_value(self, variable: str, value: float) -> "Scenario":
        if variable not in SWEEP_VARIABLES:
            raise ConfigurationError(f"cannot sweep {variable!r}")
        return replace(self, **{variable: value})

    def estimation_input(self) -> EstimationInput:
        wave = WaveParams(self.amplitude, self.drive_frequency(), self.duration_s)
        return EstimationInput(self.mode_pair, self.squeezing_r, wave, self.cavity(), self.num_probes)

    def metadata(self) -> dict:
        """Every resolved parameter, enough to re-run any single point."""
        meta = {
            "scenario": self.source,
            "length_m": self.length_m,
            "sound_speed_m_per_s": self.sound_speed_m_per_s,
            "max_mode": self.max_mode,
            "atom_mass_kg": self.atom_mass_kg,
            "amplitude": self.amplitude,
            "duration_s": self.duration_s,
            "frequency_hz": self.frequency_hz,
            "resonant_pair": list(self.resonant_pair) if self.resonant_pair else None,
            "drive_frequency_rad_s": self.drive_frequency(),
            "mode_pair": list(self.mode_pair),
            "squeezing_r": self.squeezing_r,
            "num_probes": self.num_probes,
            "qfi_method": self.qfi_method,
            "d_eps": self.d_eps,
            "figure_of_merit": self.figure_of_merit,
            "frequency_unit": self.frequency_unit,
        }
        for key, sw in (("sweep", self.sweep), ("sweep2", self.sweep2)):
            if sw is not None:
                meta[key] = {
                    "variable": sw.variable,
                    "from": sw.start,
                    "to": sw.stop,
                    "points": sw.points,
                    "scale": sw.scale,
                }
        return meta


def _line_of(text, section, key):
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        head = re.match(r"\[([^\]]+)\]", stripped)
        if head:
            current = head.group(1).strip()
            if current == section and key is None:
                return i
        elif current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
            return i
    return None


class _Reader:
    def __init__(self, parser, text, source):
        self.parser = parser
        self.text = text
        self.source = source

    def fail(self, section, key, msg):
        line = _line_of(self.text, section, key)
        where = f"{self.source}:{line}" if line else self.source
        field = f"[{section}] {key}" if key else f"[{section}]"
        raise ScenarioError(f"{where}: {field}: {msg}")

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def raw(self, section, key, required=True):
        if not self.parser.has_section(section):
            if required:
                raise ScenarioError(f"{self.source}: missing section [{section}]")
            return None
        if not self.parser.has_option(section, key):
            if required:
                self.fail(section, None, f"missing required field '{key}'")
            return None
        return self.parser.get(section, key).strip()

    def number(self, section, key, required=True, kind=float, check=None, what=""):
        raw = self.raw(section, key, required)
        if raw is None:
            return None
        try:
            val = kind(float(raw)) if kind is int else kind(raw)
        except ValueError:
            self.fail(section, key, f"expected a number, got {raw!r}")
        if kind is int and float(raw) != int(float(raw)):
            self.fail(section, key, f"expected an integer, got {raw!r}")
        if not math.isfinite(val):
            self.fail(section, key, f"must be finite, got {raw!r}")
        if check is not None and not check(val):
            self.fail(section, key, f"must be {what}, got {raw!r}")
        return val

    def pair(self, section, key, required=True):
        raw = self.raw(section, key, required)
        if raw is None:
            return None
        parts = [p for p in re.split(r"[,\s]+", raw) if p]
        try:
            vals = tuple(int(p) for p in parts)
        except ValueError:
            self.fail(section, key, f"expected two integers 'a, b', got {raw!r}")
        if len(vals) != 2 or min(vals) < 1:
            self.fail(section, key, f"expected two positive integers 'a, b', got {raw!r}")
        return vals

    def choice(self, section, key, options, required=True, default=None):
        raw = self.raw(section, key, required)
        if raw is None:
            return default
        if raw not in options:
            self.fail(section, key, f"must be one of {', '.join(options)}; got {raw!r}")
        return raw

    def sweep(self, section):
        if not self.parser.has_section(section):
            return None
        variable = self.choice(section, "variable", SWEEP_VARIABLES)
        scale = self.choice(section, "scale", ("linear", "log"))
        start = self.number(section, "from", check=lambda v: v >= 0, what="non-negative")
        stop = self.number(section, "to", check=lambda v: v >= 0, what="non-negative")
        points = self.number(section, "points", kind=int, check=lambda v: v >= 1, what=">= 1")
        if stop < start:
            self.fail(section, "to", f"sweep bounds must be ordered, from = {start} > to = {stop}")
        if scale == "log" and start <= 0:
            self.fail(section, "from", "log sweeps need a positive lower bound")
        if variable == "num_probes" and start < 1:
            self.fail(section, "from", "num_probes sweeps must start at >= 1")
        return Sweep(variable, start, stop, points, scale)


_KNOWN = {
    "cavity": {"length_m", "sound_speed_m_per_s", "max_mode", "atom_mass_kg"},
    "wave": {"amplitude", "duration_s", "frequency_hz", "resonant_pair"},
    "state": {"mode_pair", "squeezing_r"},
    "estimation": {"num_probes", "qfi_method", "d_eps", "figure_of_merit", "frequency_unit"},
    "sweep": {"variable", "from", "to", "points", "scale"},
    "sweep2": {"variable", "from", "to", "points", "scale"},
    "output": {"format", "path"},
}


def parse_scenario(text: str, source: str = "<memory>") -> Scenario:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ScenarioError(f"{source}: {exc}") from None
    rd = _Reader(parser, text, source)
    for section in parser.sections():
        if section not in _KNOWN:
            rd.fail(section, None, f"unknown section; expected one of {', '.join(_KNOWN)}")
        for key in parser.options(section):
            if key not in _KNOWN[section]:
                rd.fail(section, key, "unknown field")

    positive = dict(check=lambda v: v > 0, what="positive")
    length = rd.number("cavity", "length_m", **positive)
    cs = rd.number("cavity", "sound_speed_m_per_s", **positive)
    max_mode = rd.number("cavity", "max_mode", kind=int, check=lambda v: v >= 2, what=">= 2")
    mass = rd.number("cavity", "atom_mass_kg", required=False, **positive)

    amplitude = rd.number("wave", "amplitude", check=lambda v: 0 <= v < 0.1, what="in [0, 0.1)")
    duration = rd.number("wave", "duration_s", check=lambda v: v >= 0, what="non-negative")
    has_f, has_pair = rd.has("wave", "frequency_hz"), rd.has("wave", "resonant_pair")
    if has_f == has_pair:
        rd.fail("wave", None, "give exactly one of frequency_hz or resonant_pair")
    freq = rd.number("wave", "frequency_hz", required=False, **positive)
    rpair = rd.pair("wave", "resonant_pair", required=False)
    if rpair is not None:
        if rpair[0] == rpair[1]:
            rd.fail("wave", "resonant_pair", "resonant pair needs two distinct modes")
        if sum(rpair) % 2 == 0:
            rd.fail(
                "wave",
                "resonant_pair",
                f"m + n = {sum(rpair)} is even; the first-order resonant beta vanishes, use odd m + n",
            )
        if max(rpair) > max_mode:
            rd.fail("wave", "resonant_pair", f"mode exceeds max_mode = {max_mode}")

    mode_pair = rd.pair("state", "mode_pair")
    if mode_pair[0] == mode_pair[1]:
        rd.fail("state", "mode_pair", "needs two distinct modes")
    if max(mode_pair) > max_mode:
        rd.fail("state", "mode_pair", f"mode exceeds max_mode = {max_mode}")
    r = rd.number("state", "squeezing_r", check=lambda v: v >= 0, what="non-negative")

    probes = rd.number("estimation", "num_probes", check=lambda v: v >= 1, what=">= 1")
    method = rd.choice("estimation", "qfi_method", QFI_METHODS)
    fom = rd.choice("estimation", "figure_of_merit", ("sqrt_omega", "omega"))
    unit = rd.choice("estimation", "frequency_unit", ("angular", "cyclic"), required=False, default="angular")
    d_eps = rd.number(
        "estimation", "d_eps", required=False, check=lambda v: MIN_D_EPS <= v <= 1e-3, what=f"in [{MIN_D_EPS}, 1e-3]"
    )

    sweep = rd.sweep("sweep")
    sweep2 = rd.sweep("sweep2")
    if sweep2 is not None and sweep is None:
        rd.fail("sweep2", None, "[sweep2] needs a [sweep] section")
    if sweep and sweep2 and sweep.variable == sweep2.variable:
        rd.fail("sweep2", "variable", "must differ from [sweep] variable")
    fmt = rd.choice("output", "format", ("csv", "json"), required=False, default="csv")
    path = rd.raw("output", "path", required=False)

    return Scenario(
        length_m=length,
        sound_speed_m_per_s=cs,
        max_mode=max_mode,
        atom_mass_kg=mass,
        amplitude=amplitude,
        duration_s=duration,
        frequency_hz=freq,
        resonant_pair=rpair,
        mode_pair=mode_pair,
        squeezing_r=r,
        num_probes=probes,
        qfi_method=method,
        figure_of_merit=fom,
        frequency_unit=unit,
        d_eps=d_eps if d_eps is not None else DEFAULT_D_EPS,
        sweep=sweep,
        sweep2=sweep2,
        output_format=fmt,
        output_path=path,
        source=source,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario ({exc.strerror})") from None
    return parse_scenario(text, str(path))
