"""Command-line front end: ``phonon-gw run|validate|sweep-grid <scenario>``."""

from __future__ import annotations

import argparse
import io
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .bogoliubov import LONG_TIME_GATE, is_resonant
from .cavity import check_phonon_regime, mode_frequency, resonant_drive_frequency
from .constants import TABLE
from .errors import ConfigurationError, DomainError, GateError
from .metrology import METHOD_TAGS, QFI_METHODS, evaluate
from .scenario import Scenario, ScenarioError, load_scenario

COLUMNS = ("sweep_variable", "value", "qfi", "delta_epsilon", "strain_sensitivity_hz_m12", "method_tag")
GRID_COLUMNS = COLUMNS[:2] + ("sweep_variable_2", "value_2") + COLUMNS[2:]
#: above this squeezing the finite-difference fidelity route is poorly conditioned
FD_CONDITIONING_R = 2.0

EXIT_OK, EXIT_CONFIG, EXIT_GATE = 0, 1, 3


def _resonance_problem(scn: Scenario):
    """Why the closed resonant QFI cannot be used for this point, or None."""
    cfg = scn.cavity()
    n, m = scn.mode_pair
    inp = scn.estimation_input()
    try:
        resonant_drive_frequency(m, n, cfg)
    except GateError as exc:
        return str(exc)
    if not is_resonant(m, n, inp.wave, cfg):
        return (
            f"drive {inp.wave.drive_frequency:.12g} rad/s is off the mode_pair ({n}, {m}) "
            f"resonance {resonant_drive_frequency(m, n, cfg):.12g} rad/s"
        )
    return None


def evaluate_point(scn: Scenario) -> dict:
    """One sweep point. Closed methods below the long-time gate switch to the
    fidelity route; off-resonance points are reported, not extrapolated."""
    method = scn.qfi_method
    note = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            inp = scn.estimation_input()
            if method != "fidelity_fd":
                problem = _resonance_problem(scn)
                if problem is not None:
                    return {"qfi": math.nan, "delta_epsilon": math.nan, "strain": math.nan,
                            "method_tag": "gate_violation", "note": problem}
                if inp.cavity.fundamental * inp.wave.duration < LONG_TIME_GATE:
                    note = f"switched {METHOD_TAGS[method]} -> fidelity_fd (omega_1 t below {LONG_TIME_GATE:g})"
                    method = "fidelity_fd"
            rec = evaluate(inp, method, scn.d_eps, scn.figure_of_merit, scn.frequency_unit)
        except (DomainError, ArithmeticError, ValueError) as exc:
            return {"qfi": math.nan, "delta_epsilon": math.nan, "strain": math.nan,
                    "method_tag": "numerical_failure", "note": f"{type(exc).__name__}: {exc}"}
    return {"qfi": rec.qfi, "delta_epsilon": rec.delta_epsilon, "strain": rec.strain_sensitivity,
            "method_tag": rec.method_tag, "note": note}


def _points(scn: Scenario, grid: bool):
    if grid:
        if scn.sweep is None or scn.sweep2 is None:
            raise ConfigurationError(f"{scn.source}: sweep-grid needs both [sweep] and [sweep2] sections")
        for v1, v2 in itertools.product(scn.sweep.values(), scn.sweep2.values()):
            yield (scn.sweep.variable, v1, scn.sweep2.variable, v2), scn.with_value(
                scn.sweep.variable, v1
            ).with_value(scn.sweep2.variable, v2)
    elif scn.sweep is not None:
        for v in scn.sweep.values():
            yield (scn.sweep.variable, v), scn.with_value(scn.sweep.variable, v)
    else:
        yield ("none", None), scn


def run_points(scn: Scenario, grid: bool = False, workers: int = 1):
    keys, scenarios = [], []
    for key, point in _points(scn, grid):
        keys.append(key)
        scenarios.append(point)
    if workers > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate_point, scenarios, chunksize=1))
    else:
        results = [evaluate_point(s) for s in scenarios]
    # results are collected in declaration order before anything is written
    return list(zip(keys, results))


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x))


def _json_num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _metadata(scn: Scenario, rows, grid):
    meta = scn.metadata()
    meta.update(
        {
            "package_version": __version__,
            "constants": TABLE,
            "mode": "sweep-grid" if grid else "run",
            "qfi_prefactor": {
                "closed_derived": "n/(16m) * w_m^2 t^2 * (8 - 4cosh^4 r + 2sinh^2 2r)",
                "closed_paper": "n/(4m) * w_m^2 t^2 * (8 - 4cosh^4 r + 2sinh^2 2r)",
                "paper_over_derived": 4.0,
                "selected": scn.qfi_method,
            },
            "strain_sensitivity": f"delta_eps/{'sqrt(Omega)' if scn.figure_of_merit == 'sqrt_omega' else 'Omega'}"
            f" with Omega {'in rad/s taken as s^-1' if scn.frequency_unit == 'angular' else 'as cyclic Hz'}",
            "notes": [f"point {i}: {r['note']}" for i, (_, r) in enumerate(rows) if r["note"]],
        }
    )
    return meta


def render(scn: Scenario, rows, fmt: str, grid: bool = False) -> str:
    meta = _metadata(scn, rows, grid)
    cols = GRID_COLUMNS if grid else COLUMNS
    records = []
    for key, res in rows:
        rec = {"sweep_variable": key[0], "value": key[1]}
        if grid:
            rec["sweep_variable_2"], rec["value_2"] = key[2], key[3]
        rec.update(
            {
                "qfi": res["qfi"],
                "delta_epsilon": res["delta_epsilon"],
                "strain_sensitivity_hz_m12": res["strain"],
                "method_tag": res["method_tag"],
            }
        )
        records.append(rec)
    if fmt == "json":
        out = {
            "metadata": meta,
            "columns": list(cols),
            "records": [{k: (v if isinstance(v, str) else _json_num(v)) for k, v in r.items()} for r in records],
        }
        return json.dumps(out, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
    buf.write(",".join(cols) + "\n")
    for r in records:
        buf.write(",".join(_fmt(r[c]) for c in cols) + "\n")
    return buf.getvalue()


def validate_report(scn: Scenario):
    """Dry run: resolved frequencies, regime ratios, gates and advisories.

    Returns (lines, errors).
    """
    cfg = scn.cavity()
    lines, errors = [], []
    w1 = cfg.fundamental
    drive = scn.drive_frequency()
    n, m = scn.mode_pair
    lines.append(f"scenario: {scn.source}")
    lines.append(f"omega_1 = {w1:.10g} rad/s ({w1 / (2 * math.pi):.10g} Hz)")
    for k in sorted({n, m} - {1}):
        wk = mode_frequency(k, cfg)
        lines.append(f"omega_{k} = {wk:.10g} rad/s ({wk / (2 * math.pi):.10g} Hz)")
    source = f"resonant_pair {scn.resonant_pair}" if scn.resonant_pair else f"frequency_hz {scn.frequency_hz}"
    lines.append(f"Omega = {drive:.10g} rad/s ({drive / (2 * math.pi):.10g} Hz) from {source}")

    if cfg.atom_mass is not None:
        modes = sorted({n, m} | set(scn.resonant_pair or ()))
        for k in modes:
            chk = check_phonon_regime(k, cfg, warn=False)
            flag = "ADVISORY: above 0.01" if chk.advisory else "ok"
            lines.append(f"regime hbar*k/(m*c_s) for mode {k} = {chk.ratio:.4g} [{flag}]")
    else:
        lines.append("regime check skipped: no atom_mass_kg in [cavity]")

    if scn.qfi_method != "fidelity_fd":
        problem = _resonance_problem(scn)
        if problem is not None:
            errors.append(f"gate: {problem}")
    durations = [scn.duration_s]
    squeezings = [scn.squeezing_r]
    for sw in (scn.sweep, scn.sweep2):
        if sw is not None and sw.variable == "duration_s":
            durations = sw.values()
        if sw is not None and sw.variable == "squeezing_r":
            squeezings = sw.values()
    gated = [t for t in durations if w1 * t < LONG_TIME_GATE]
    lines.append(
        f"long-time gate omega_1*t >= {LONG_TIME_GATE:g}: "
        + (f"{len(gated)} of {len(durations)} durations below (closed methods switch to fidelity_fd)"
           if gated else f"satisfied (min omega_1*t = {w1 * min(durations):.4g})")
    )
    # t = 0 is exact on every route, so it never needs the advisory
    fd_used = scn.qfi_method == "fidelity_fd" or any(t > 0 for t in gated)
    if fd_used and max(squeezings) > FD_CONDITIONING_R:
        lines.append(
            f"ADVISORY: squeezing_r up to {max(squeezings):g} with the fidelity route, which is poorly "
            f"conditioned above r = {FD_CONDITIONING_R:g}: the state varies fast with eps and the "
            "finite-difference step may hit its lower limit"
        )
    for e in errors:
        lines.append(f"ERROR {e}")
    return lines, errors


def _check_seedless():
    # nothing in the package draws random numbers; make sure that stays true
    mods = [mod for name, mod in sys.modules.items() if name.startswith("phonon_gw")]
    for mod in mods:
        for val in vars(mod).values():
            if getattr(val, "__name__", "") in ("random", "numpy.random"):
                raise RuntimeError(f"{mod.__name__} links a random number generator")


def build_parser():
    p = argparse.ArgumentParser(prog="phonon-gw", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "evaluate a scenario (single point or [sweep])"),
        ("validate", "dry-run: report frequencies, gates and advisories"),
        ("sweep-grid", "cartesian sweep over [sweep] x [sweep2]"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scenario", type=Path)
        if name != "validate":
            sp.add_argument("--workers", type=int, default=1, help="parallel worker processes")
            sp.add_argument("--output", type=Path, help="output path (overrides [output] path; '-' for stdout)")
            sp.add_argument("--qfi-method", choices=QFI_METHODS, help="override [estimation] qfi_method")
            sp.add_argument("--format", choices=("csv", "json"), help="override [output] format")
            sp.add_argument("--seed-less", action="store_true", help="assert that no RNG is linked")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.scenario)
        if args.command == "validate":
            lines, errors = validate_report(scn)
            print("\n".join(lines))
            return EXIT_GATE if errors else EXIT_OK
        if args.seed_less:
            _check_seedless()
        if args.workers < 1:
            raise ConfigurationError("--workers must be >= 1")
        if args.qfi_method:
            scn = scn.__class__(**{**scn.__dict__, "qfi_method": args.qfi_method})
        grid = args.command == "sweep-grid"
        rows = run_points(scn, grid=grid, workers=args.workers)
    except (ScenarioError, ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    fmt = args.format or scn.output_format
    text = render(scn, rows, fmt, grid)
    target = args.output if args.output is not None else (Path(scn.output_path) if scn.output_path else None)
    if target is None or str(target) == "-":
        sys.stdout.write(text)
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    failed = 0
    for i, (key, res) in enumerate(rows):
        if res["note"]:
            print(f"point {i} ({key[0]}={key[1]}): {res['note']}", file=sys.stderr)
        if res["method_tag"] in ("gate_violation", "numerical_failure"):
            failed += 1
    return EXIT_GATE if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
