"""Scenario-driven command-line front end.

Ten subcommands (``orlicz-norm``, ``simulate``, ``adm``, ``weiss``, ``sqfct``,
``counterexample``, ``iss``, ``iiss``, ``shift-demo``, ``probe-boundedness``)
each read one JSON scenario file, run the matching computation, and write a
JSON report plus flat CSV plot data into the output directory.  Exit codes:
0 success, 1 configuration error (bad flags, malformed or schema-invalid
scenario, inconsistent cross-references), 2 certificate violation or numeric
non-convergence (a dump file is written alongside the report).

Reports are reproducible byte for byte: sorted keys, no timestamps, the
scenario content hash and package version embedded, all randomness behind the
mandatory seed.  Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from ._quad import QuadratureError
from .admissibility import (
    AdmissibilityError,
    CertificateViolation,
    InputOperator,
    linfty_bounds,
    trajectory,
    zero_class_profile,
)
from .certify import (
    CertifyError,
    boundedness_probe,
    counterexample_run,
    iiss_certificate,
    iss_certificate,
    shift_demo,
    sqfct_constants,
    weiss_check,
)
from .orlicz import (
    BracketError,
    OrliczError,
    SampledFunction,
    luxemburg_norm,
    modular,
    power_young,
    young_from_json,
)
from .signals import PiecewiseSignal, SignalError, random_signal
from .spectral import (
    DiagonalGenerator,
    SpectralError,
    SpectralVector,
    generator_from_json,
    space_norm,
)

COMMANDS = (
    "orlicz-norm",
    "simulate",
    "adm",
    "weiss",
    "sqfct",
    "counterexample",
    "iss",
    "iiss",
    "shift-demo",
    "probe-boundedness",
)
_SEEDED = {"adm", "iss", "iiss"}


class ConfigError(Exception):
    """Scenario or flag problem: exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit 1
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# Scenario loading
# ---------------------------------------------------------------------------


def _load_schema() -> dict:
    text = resources.files("admlab").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


def load_scenario(path: str) -> tuple[dict, str]:
    """Parse + schema-validate a scenario file; returns (dict, sha256 hash)."""
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        scn = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from exc
    validator = jsonschema.Draft202012Validator(_load_schema())
    errors = sorted(validator.iter_errors(scn), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(part) for part in e.absolute_path)
        raise ConfigError(f"scenario schema violation at {pointer!r}: {e.message}")
    if not isinstance(scn, dict):
        raise ConfigError("scenario must be a JSON object")
    return scn, digest


def _need(scn: dict, key: str, command: str):
    if key not in scn:
        raise ConfigError(f"scenario key '{key}' is required for {command}")
    return scn[key]


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v), 0.0)


def _cvec(vs) -> np.ndarray:
    return np.array([_complex(v) for v in vs], dtype=complex)


def _generator(scn: dict, command: str, modes: int | None) -> DiagonalGenerator:
    obj = dict(_need(scn, "generator", command))
    if modes is not None:
        if obj.get("kind") == "ray":
            obj["count"] = modes
        else:
            eig = obj.get("eigenvalues", [])
            if modes > len(eig):
                raise ConfigError(
                    f"--modes {modes} exceeds the {len(eig)} listed eigenvalues"
                )
            obj["eigenvalues"] = eig[:modes]
            if "weights" in obj:
                obj["weights"] = obj["weights"][:modes]
    return generator_from_json(obj)


def _input_operator(scn: dict, A: DiagonalGenerator, command: str) -> InputOperator:
    obj = _need(scn, "input_operator", command)
    kind = obj["kind"]
    if kind == "columns":
        if "matrix" not in obj:
            raise ConfigError("input_operator kind 'columns' needs key 'matrix'")
        rows = [[_complex(v) for v in row] for row in obj["matrix"]]
        mat = np.array(rows, dtype=complex)
        if mat.shape[0] != A.n_modes:
            raise ConfigError(
                f"input_operator 'matrix' has {mat.shape[0]} rows for "
                f"{A.n_modes} modes"
            )
        return InputOperator.columns(mat)
    if kind == "aminus_x0":
        if "x0" not in obj:
            raise ConfigError("input_operator kind 'aminus_x0' needs key 'x0'")
        x0 = _cvec(obj["x0"])
        if len(x0) != A.n_modes:
            raise ConfigError(
                f"input_operator 'x0' has {len(x0)} entries for {A.n_modes} modes"
            )
        return InputOperator.aminus_x0(x0)
    return InputOperator.aminus_full()


def _young(scn: dict, command: str, key: str = "young"):
    obj = _need(scn, key, command)
    if "power" in obj:
        return power_young(float(obj["power"]), float(obj.get("scale", 1.0)))
    return young_from_json(obj)


def _profile(scn: dict, command: str):
    obj = _need(scn, "profile", command)
    if obj["kind"] == "samples":
        return SampledFunction(obj["edges"], obj["values"], obj.get("tail_rate"))
    return {"kind": "power", "coeff": obj["coeff"], "exponent": obj["exponent"]}


def _signal(scn: dict, command: str, seed: int | None, n_channels: int) -> PiecewiseSignal:
    obj = _need(scn, "signal", command)
    kind = obj.get("kind", "piecewise")
    if kind == "probe":
        return PiecewiseSignal(
            [0.0, float(obj["horizon"])],
            [_complex(obj["amplitude"])],
            "probe",
            probe_mu=_complex(obj.get("mu", 0.0)),
        )
    if kind == "random":
        if seed is None:
            raise ConfigError("a random signal needs a seed (--seed or scenario key)")
        horizon = float(obj.get("horizon", scn.get("horizon", 1.0)))
        return random_signal(
            np.random.default_rng(seed),
            horizon,
            int(obj["n_pieces"]),
            n_channels=int(obj.get("channels", n_channels)),
            amplitude=float(obj.get("amplitude", 1.0)),
        )
    vals = obj["values"]
    if vals and isinstance(vals[0], list) and vals[0] and isinstance(vals[0][0], list):
        values = np.array([[_complex(v) for v in row] for row in vals], dtype=complex)
    else:
        values = _cvec(vals)
    return PiecewiseSignal(obj["breakpoints"], values)


# ---------------------------------------------------------------------------
# Artifact writing
# ---------------------------------------------------------------------------


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"while writing {path}: {exc}") from exc


def emit_plotdata(outdir: Path, jobs: list[tuple[str, str, list[tuple]]]) -> list[Path]:
    """Write one CSV per curve: (filename, header, rows).  Empty rows still
    produce the header line, so downstream plotting sees a well-formed file."""
    paths = []
    for name, header, rows in jobs:
        lines = [header]
        lines.extend(",".join(str(cell) for cell in row) for row in rows)
        path = outdir / name
        _write_atomic(path, "\n".join(lines) + "\n")
        paths.append(path)
    return paths


def _json_ready(value):
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_ready(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _report_text(command, scenario_hash, seed, results) -> str:
    envelope = {
        "command": command,
        "scenario_hash": scenario_hash,
        "version": __version__,
        "seed": seed,
        "results": _json_ready(results),
    }
    return json.dumps(envelope, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Command handlers: each returns (results, csv_jobs, summary_lines)
# ---------------------------------------------------------------------------


def _repr_row(*cells):
    return tuple(repr(float(c)) if isinstance(c, (int, float, np.floating)) else c
                 for c in cells)


def _cmd_orlicz_norm(scn, seed, modes):
    phi = _young(scn, "orlicz-norm")
    f = _profile(scn, "orlicz-norm")
    if not isinstance(f, SampledFunction):
        raise ConfigError("orlicz-norm expects a sampled profile")
    norm = luxemburg_norm(phi, f)
    results = {
        "luxemburg_norm": norm,
        "modular_at_norm": modular(phi, f, norm) if norm > 0.0 else 0.0,
    }
    return results, [], [f"orlicz-norm: ||f|| = {norm:.12g}"]


def _cmd_simulate(scn, seed, modes):
    A = _generator(scn, "simulate", modes)
    B = _input_operator(scn, A, "simulate")
    u = _signal(scn, "simulate", seed, B.n_inputs(A))
    horizon = float(scn.get("horizon", u.horizon))
    if horizon > u.horizon:
        raise ConfigError("scenario horizon exceeds the signal window")
    if "initial_state" in scn:
        x0c = _cvec(scn["initial_state"])
        if len(x0c) != A.n_modes:
            raise ConfigError(
                f"initial_state has {len(x0c)} entries for {A.n_modes} modes"
            )
    else:
        x0c = np.zeros(A.n_modes, dtype=complex)
    x0 = SpectralVector(x0c, "X")
    n = int(scn.get("n_time_samples", 33))
    ts = np.linspace(0.0, horizon, n)
    norms = [space_norm(A, x0)]
    for t in ts[1:]:
        norms.append(space_norm(A, trajectory(A, B, x0, u, float(t))))
    rows = [_repr_row(t, v) for t, v in zip(ts, norms)]
    results = {
        "horizon": horizon,
        "n_time_samples": n,
        "initial_norm": norms[0],
        "final_norm": norms[-1],
        "peak_norm": max(norms),
    }
    jobs = [("trajectory.csv", "t,state_norm", rows)]
    return results, jobs, [
        f"simulate: ||x({horizon:g})|| = {norms[-1]:.12g} (peak {max(norms):.12g})"
    ]


def _cmd_adm(scn, seed, modes):
    A = _generator(scn, "adm", modes)
    B = _input_operator(scn, A, "adm")
    horizons = sorted(float(t) for t in _need(scn, "horizons", "adm"))
    n_pieces = int(scn.get("n_pieces", 16))
    reports = [
        linfty_bounds(A, B, t, n_pieces=n_pieces, seed=seed) for t in horizons
    ]
    rows = [
        _repr_row(r.t, r.space, r.lower, r.upper, r.route) for r in reports
    ]
    jobs = [("admissibility.csv", "t,Z,lower,upper,route", rows)]
    lines = [
        f"adm: t={r.t:g} lower={r.lower:.6g} upper={r.upper:.6g} route={r.route}"
        for r in reports
    ]
    results = {"reports": [r.to_json() for r in reports]}
    if scn.get("zero_class"):
        zreports, flags = zero_class_profile(A, B, horizons, seed=seed)
        results["zero_class"] = flags
        jobs.append(
            (
                "zero_class.csv",
                "t,lower",
                [_repr_row(r.t, r.lower) for r in zreports],
            )
        )
        lines.append(
            "adm: zero-class plausible={zero_class_plausible} "
            "obstructed={obstructed}".format(**flags)
        )
    return results, jobs, lines


def _cmd_weiss(scn, seed, modes):
    A = _generator(scn, "weiss", modes)
    B = _input_operator(scn, A, "weiss")
    p = scn.get("p", "inf")
    p = math.inf if p == "inf" else float(p)
    rep = weiss_check(A, B, p)
    return (
        rep.to_json(),
        [],
        [
            f"weiss: p={scn.get('p', 'inf')} value={rep.value:.12g} "
            f"closed-form={rep.closed_form:.12g}"
        ],
    )


def _cmd_sqfct(scn, seed, modes):
    A = _generator(scn, "sqfct", modes)
    rep = sqfct_constants(A)
    rows = [_repr_row(float(n), v) for n, v in enumerate(rep.per_mode)]
    results = rep.to_json()
    results["per_mode"] = results["per_mode"][:16]  # full table lives in the CSV
    jobs = [("sqfct.csv", "mode,integral", rows)]
    line = (
        f"sqfct: k={rep.k_lower:.12g} K={rep.K_upper:.12g} "
        f"(quad err {rep.quad_max_rel_err:.2e})"
    )
    return results, jobs, [line]


def _cmd_counterexample(scn, seed, modes):
    M = int(_need(scn, "M", "counterexample"))
    if modes is not None:
        M = modes
    k = float(scn.get("k_bound", 0.0))
    res = counterexample_run(k, M, scn.get("checkpoints"))
    rows = res.pop("rows")
    div_rows = [
        _repr_row(float(m), s, th)
        for m, s, th in zip(rows["m"], rows["S_m"], rows["theory"])
    ]
    int_rows = [_repr_row(float(m), a, b) for m, a, b in res.pop("intervals_head")]
    jobs = [
        ("divergence.csv", "M,S_M,theory", div_rows),
        ("intervals.csv", "m,a,b", int_rows),
    ]
    s_final = float(rows["S_m"][-1])
    res["S_final"] = s_final
    line = (
        f"counterexample: M={M} S_M={s_final:.12g} theory={M * res['sigma']:.12g} "
        f"per-column={res['per_column_upper']:.6g} weiss={res['weiss']['value']:.6g}"
    )
    return res, jobs, [line]


def _cmd_iss(scn, seed, modes):
    A = _generator(scn, "iss", modes)
    B = _input_operator(scn, A, "iss")
    res = iss_certificate(
        A,
        B,
        n_trials=int(scn.get("trials", 100)),
        horizon=scn.get("horizon"),
        seed=seed,
        adm_bound_override=scn.get("adm_bound_override"),
    )
    line = (
        f"iss: trials={res['n_trials']} max_ratio={res['max_ratio']:.6g} "
        f"violations={len(res['violations'])} mu_slope={res['bundle']['mu_slope']:.6g}"
    )
    return res, [], [line]


def _cmd_iiss(scn, seed, modes):
    A = _generator(scn, "iiss", modes)
    x0 = _cvec(_need(scn, "x0", "iiss"))
    if len(x0) != A.n_modes:
        raise ConfigError(f"x0 has {len(x0)} entries for {A.n_modes} modes")
    psi = _young(scn, "iiss")
    res = iiss_certificate(
        A,
        x0,
        psi,
        n_trials=int(scn.get("trials", 50)),
        horizon=scn.get("horizon"),
        seed=seed,
    )
    line = (
        f"iiss: trials={res['n_trials']} max_ratio={res['max_ratio']:.6g} "
        f"violations={len(res['violations'])} C={res['bundle']['C']:.6g}"
    )
    return res, [], [line]


def _cmd_shift_demo(scn, seed, modes):
    phi = _young(scn, "shift-demo")
    f = _profile(scn, "shift-demo")
    res = shift_demo(f, phi)
    mod = res["modular"]
    line = (
        f"shift-demo: l1={res['l1']:.12g} "
        f"modular={'inf' if math.isinf(mod) else format(mod, '.12g')} "
        f"diverged={res['diverged']}"
    )
    return res, [], [line]


def _cmd_probe(scn, seed, modes):
    rule = _need(scn, "probe_rule", "probe-boundedness")
    Ns = [int(n) for n in _need(scn, "Ns", "probe-boundedness")]
    if modes is not None:
        Ns = [n for n in Ns if n <= modes] or [modes]
    t_grid = [float(t) for t in _need(scn, "t_grid", "probe-boundedness")]
    res = boundedness_probe(rule, Ns, t_grid)
    rows = [
        _repr_row(float(r["N"]), r["t"], r["value"], str(r["scale_matched"]))
        for r in res["rows"]
    ]
    jobs = [("probe.csv", "N,t,value,scale_matched", rows)]
    line = (
        f"probe-boundedness: uniform_floor={res['uniform_floor']} "
        f"degrades={res['zero_class_degrades']}"
    )
    return res, jobs, [line]


_HANDLERS = {
    "orlicz-norm": _cmd_orlicz_norm,
    "simulate": _cmd_simulate,
    "adm": _cmd_adm,
    "weiss": _cmd_weiss,
    "sqfct": _cmd_sqfct,
    "counterexample": _cmd_counterexample,
    "iss": _cmd_iss,
    "iiss": _cmd_iiss,
    "shift-demo": _cmd_shift_demo,
    "probe-boundedness": _cmd_probe,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="admlab",
        description="Orlicz-space admissibility laboratory for diagonal systems",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        cp = sub.add_parser(name, help=f"run the {name} computation")
        cp.add_argument("--scenario", required=True, help="scenario JSON path")
        cp.add_argument("--out", default=None, help="output directory")
        cp.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
        cp.add_argument(
            "--modes", type=int, default=None, help="override the mode count"
        )
        cp.add_argument("--quiet", action="store_true", help="suppress summaries")
    return parser


def run(command: str, scenario_path: str, out=None, seed=None, modes=None,
        quiet=False) -> int:
    """Dispatch one command against one scenario; returns the exit code."""
    if command not in _HANDLERS:
        raise ConfigError(
            f"unknown command {command!r} (choose from {', '.join(COMMANDS)})"
        )
    scn, digest = load_scenario(scenario_path)
    if seed is None:
        seed = scn.get("seed")
    if seed is None and command in _SEEDED:
        raise ConfigError(
            f"{command} is randomized: provide --seed or a scenario 'seed' key"
        )
    if modes is not None and modes < 1:
        raise ConfigError("--modes must be a positive integer")
    outdir = Path(out or scn.get("out") or os.environ.get("ADMLAB_OUT") or "admlab-out")
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        results, jobs, lines = _HANDLERS[command](scn, seed, modes)
    except (CertificateViolation, QuadratureError, BracketError) as exc:
        dump = {
            "command": command,
            "scenario_hash": digest,
            "version": __version__,
            "seed": seed,
            "error": str(exc),
            "dump": _json_ready(getattr(exc, "dump", {})),
        }
        _write_atomic(
            outdir / "violation.dump.json",
            json.dumps(dump, sort_keys=True, indent=2) + "\n",
        )
        print(f"{command}: VIOLATION: {exc}", file=sys.stderr)
        print(f"dump written to {outdir / 'violation.dump.json'}", file=sys.stderr)
        return 2
    _write_atomic(
        outdir / f"{command}.report.json", _report_text(command, digest, seed, results)
    )
    emit_plotdata(outdir, jobs)
    if not quiet:
        for line in lines:
            print(line)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ConfigError("no command given (try `admlab --help`)")
        return run(
            args.command,
            args.scenario,
            out=args.out,
            seed=args.seed,
            modes=args.modes,
            quiet=args.quiet,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        SpectralError,
        SignalError,
        OrliczError,
        AdmissibilityError,
        CertifyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
