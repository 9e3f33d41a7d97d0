"""Batch command line front end.

Every subcommand evaluates a deterministic experiment grid and emits one
table, as CSV (meta in ``# key=value`` header lines) or JSON
(``{"meta": .., "columns": .., "rows": ..}``). Options may come from a
``key = value`` config file (``--config``); explicit flags win over the
file, built-in defaults fill the rest. List-valued options take comma
separated values and expand as a Cartesian grid. ``--jobs`` parallelizes
over grid points without changing results or row order.

Exit codes: 0 success, 1 invalid configuration or inputs, 2 a numeric
invariant failed mid-run.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

import numpy as np

from . import __version__
from .collision import (
    dilation_unitary,
    extract_m,
    kraus_from_dilation,
    kraus_step,
    thermal_weights,
    verify_dilation,
)
from .grover import GroverInstance, ideal_success_series, grover_operator, optimal_iterations
from .linalg import InvariantViolation, trace_distance
from .markov import MarkovNoiseParams, history_oracle, markov_evolve
from .measures import n_blp, n_cp
from .noise import SingleQubitUnitary, build_chi, noise_spec, noise_unitary, noisy_grover, single_qubit_unitary


class ConfigError(ValueError):
    """Bad command line, config file, or option value."""


@dataclass
class ResultTable:
    """What every subcommand produces: ordered meta, column names, rows."""

    meta: dict
    columns: list[str]
    rows: list[list]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def emit(table: ResultTable, fmt: str, stream: TextIO) -> None:
    """Write ``table`` to ``stream`` as csv or json (LF line endings)."""
    if fmt == "csv":
        for key, value in table.meta.items():
            stream.write(f"# {key}={_fmt(value)}\n")
        stream.write(",".join(table.columns) + "\n")
        for row in table.rows:
            stream.write(",".join(_fmt(v) for v in row) + "\n")
    elif fmt == "json":
        payload = {"meta": table.meta, "columns": table.columns, "rows": table.rows}
        json.dump(payload, stream, indent=2)
        stream.write("\n")
    else:
        raise ConfigError(f"unknown format {fmt!r}; expected csv or json")


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; route through ConfigError
    # instead so main() can map it to exit code 1.
    def error(self, message: str):  # noqa: D102
        raise ConfigError(message)


def _parse_int(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{name}: {text!r} is not an integer") from None


def _parse_float(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{name}: {text!r} is not a number") from None


def _parse_int_list(text: str, name: str) -> tuple[int, ...]:
    return tuple(_parse_int(part.strip(), name) for part in str(text).split(","))


def _parse_float_list(text: str, name: str) -> tuple[float, ...]:
    return tuple(_parse_float(part.strip(), name) for part in str(text).split(","))


def _parse_noise(text: str) -> SingleQubitUnitary:
    """Preset name, or ``custom:A,B,THETA`` with complex literals A and B."""
    text = str(text).strip()
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(",")
        if len(parts) != 3:
            raise ConfigError(f"custom noise needs a,b,theta, got {text!r}")
        try:
            a = complex(parts[0])
            b = complex(parts[1])
            theta = float(parts[2])
        except ValueError as exc:
            raise ConfigError(f"cannot parse custom noise {text!r}: {exc}") from None
        try:
            return single_qubit_unitary(a, b, theta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        return noise_unitary(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str) -> dict[str, str]:
    """Read a ``key = value`` file; ``#`` starts a comment, blanks ignored."""
    entries: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                if not key:
                    raise ConfigError(f"{path}:{lineno}: empty key")
                entries[key.replace("-", "_")] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return entries


# Option inventory. Each entry: (flag, dest, help). Values stay strings
# until the handlers convert them, so config-file and flag inputs take the
# same path.
_COMMON = (
    ("--config", "config", "key = value option file; explicit flags override it"),
    ("--format", "format", "output format: csv or json (default csv)"),
    ("--output", "output", "output path, - for stdout (default -)"),
    ("--jobs", "jobs", "worker processes for grid points (default 1)"),
)

_SUBCOMMANDS: dict[str, dict] = {
    "ideal": {
        "help": "noiseless success probability series",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--steps", "steps", "iterations to evolve (default 25)"),
        ),
        "defaults": {"marked": "0", "steps": "25"},
    },
    "noisy": {
        "help": "success series under correlated noise, over a parameter grid",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "preset (identity,x,y,z,hadamard) or custom:a,b,theta"),
            ("--m", "m", "comma list of noisy-qubit counts (default 1)"),
            ("--positions", "positions", "explicit comma list of noisy positions (overrides --m)"),
            ("--p", "p", "comma list of fault probabilities (default 0.5)"),
            ("--mu", "mu", "comma list of memory parameters (default 0)"),
            ("--temperature", "temperature", "ancilla temperature, 0 for pure (default 0)"),
            ("--steps", "steps", "collisions to evolve (default 25)"),
        ),
        "defaults": {
            "marked": "0", "noise": "x", "m": "1", "p": "0.5", "mu": "0",
            "temperature": "0", "steps": "25",
        },
    },
    "invariance": {
        "help": "position-independence deviation over every position subset",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--p", "p", "fault probability (default 0.5)"),
            ("--mu", "mu", "memory parameter (default 0)"),
            ("--steps", "steps", "collisions to evolve (default 25)"),
        ),
        "defaults": {"marked": "0", "noise": "x", "p": "0.5", "mu": "0", "steps": "25"},
    },
    "firstmax": {
        "help": "location and height of the first success maximum on a grid",
        "options": (
            ("--n", "n", "comma list of qubit counts"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--m", "m", "noisy-qubit count (default 1)"),
            ("--p", "p", "comma list of fault probabilities"),
            ("--mu", "mu", "comma list of memory parameters"),
            ("--steps", "steps", "search horizon (default 25)"),
        ),
        "defaults": {"marked": "0", "noise": "x", "m": "1", "p": "0.5", "mu": "0", "steps": "25"},
    },
    "blp": {
        "help": "trace-distance backflow witness over a (p, mu) grid",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--m", "m", "noisy-qubit count (default 1)"),
            ("--p", "p", "comma list of fault probabilities"),
            ("--mu", "mu", "comma list of memory parameters"),
            ("--temperature", "temperature", "ancilla temperature, 0 for pure (default 0)"),
            ("--steps", "steps", "horizon (default 45)"),
        ),
        "defaults": {
            "marked": "0", "noise": "x", "m": "1", "p": "0.5", "mu": "0.9",
            "temperature": "0", "steps": "45",
        },
    },
    "cpdiv": {
        "help": "CP-divisibility witness over a (p, mu) grid",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--m", "m", "noisy-qubit count (default 1)"),
            ("--p", "p", "comma list of fault probabilities"),
            ("--mu", "mu", "comma list of memory parameters"),
            ("--steps", "steps", "horizon (default 20)"),
        ),
        "defaults": {"marked": "0", "noise": "x", "m": "1", "p": "0.5", "mu": "0.9", "steps": "20"},
    },
    "thermal": {
        "help": "backflow witness over a (temperature, p, mu) grid",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--m", "m", "noisy-qubit count (default 1)"),
            ("--p", "p", "comma list of fault probabilities"),
            ("--mu", "mu", "comma list of memory parameters"),
            ("--temps", "temps", "comma list of temperatures (default 0.5,1,2)"),
            ("--steps", "steps", "horizon (default 45)"),
        ),
        "defaults": {
            "marked": "0", "noise": "x", "m": "1", "p": "0.5", "mu": "0.9",
            "temps": "0.5,1,2", "steps": "45",
        },
    },
    "dilation-check": {
        "help": "verify the collision unitaries against the Kraus step on a grid",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--m", "m", "noisy-qubit count (default 1)"),
            ("--p", "p", "comma list of fault probabilities"),
            ("--mu", "mu", "comma list of memory parameters"),
            ("--trials", "trials", "random states per point (default 20)"),
            ("--seed", "seed", "base RNG seed (default 1234)"),
        ),
        "defaults": {
            "marked": "0", "noise": "x", "m": "1", "p": "0.1,0.5,0.9",
            "mu": "0,0.5,1", "trials": "20", "seed": "1234",
        },
    },
    "oracle-check": {
        "help": "compare the collision evolution to the explicit history sum",
        "options": (
            ("--n", "n", "qubit count"),
            ("--marked", "marked", "marked basis index (default 0)"),
            ("--noise", "noise", "noise unitary (default x)"),
            ("--m", "m", "noisy-qubit count (default 1)"),
            ("--p", "p", "fault probability (default 0.5)"),
            ("--mu", "mu", "memory parameter (default 0.5)"),
            ("--steps", "steps", "horizon, at most 12 (default 8)"),
        ),
        "defaults": {"marked": "0", "noise": "x", "m": "1", "p": "0.5", "mu": "0.5", "steps": "8"},
    },
}


def build_parser() -> _Parser:
    parser = _Parser(prog="noisygrover", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", metavar="command")
    for name, info in _SUBCOMMANDS.items():
        sub = subs.add_parser(name, help=info["help"])
        for flag, dest, help_text in info["options"] + _COMMON:
            sub.add_argument(flag, dest=dest, default=None, help=help_text)
    return parser


def _resolve_options(ns: argparse.Namespace) -> dict[str, str]:
    """Merge flags > config file > defaults into one string-valued dict."""
    info = _SUBCOMMANDS[ns.command]
    known = {dest for _, dest, _ in info["options"] + _COMMON}
    resolved: dict[str, Optional[str]] = {
        dest: getattr(ns, dest, None) for dest in known
    }
    if resolved.get("config"):
        for key, value in load_config(resolved["config"]).items():
            if key not in known:
                raise ConfigError(
                    f"config key {key!r} is not an option of {ns.command!r}"
                )
            if resolved[key] is None:
                resolved[key] = value
    for key, value in info["defaults"].items():
        if resolved[key] is None:
            resolved[key] = value
    resolved.setdefault("format", None)
    if resolved["format"] is None:
        resolved["format"] = "csv"
    if resolved["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {resolved['format']!r}")
    if resolved.get("output") is None:
        resolved["output"] = "-"
    resolved["jobs"] = resolved.get("jobs") or "1"
    return {k: v for k, v in resolved.items() if v is not None}


def _require(opts: dict, key: str, command: str) -> str:
    if key not in opts:
        raise ConfigError(f"{command}: --{key} is required")
    return opts[key]


# ------------------------------------------------------- grid workers
# Top-level functions so ProcessPoolExecutor can pickle them. Each takes
# one plain-data tuple and returns plain data; row order is the point
# order, independent of --jobs.

def _series_point(point) -> np.ndarray:
    n, marked, u, m, positions, p, mu, temperature, steps = point
    inst = GroverInstance(n, marked)
    spec = noise_spec(u, m, n, positions)
    bath = thermal_weights(temperature) if temperature > 0.0 else None
    params = MarkovNoiseParams(p, mu)
    return markov_evolve(inst, spec, params, steps, bath=bath).probabilities


def _firstmax_point(point):
    series = _series_point(point)
    for t in range(1, len(series) - 1):
        if series[t] >= series[t - 1] and series[t] >= series[t + 1]:
            return t, float(series[t])
    t = int(np.argmax(series))
    return t, float(series[t])


def _blp_point(point) -> float:
    n, marked, u, m, p, mu, temperature, steps = point
    inst = GroverInstance(n, marked)
    spec = noise_spec(u, m, n)
    bath = thermal_weights(temperature) if temperature > 0.0 else None
    return n_blp(inst, spec, MarkovNoiseParams(p, mu), steps, bath=bath).value


def _cpdiv_point(point) -> float:
    n, marked, u, m, p, mu, steps = point
    inst = GroverInstance(n, marked)
    spec = noise_spec(u, m, n)
    return n_cp(inst, spec, MarkovNoiseParams(p, mu), steps).value


def _dilation_point(point):
    n, marked, u, m, p, mu, trials, seed = point
    inst = GroverInstance(n, marked)
    g = grover_operator(inst)
    chi = build_chi(n, noise_spec(u, m, n))
    gp = noisy_grover(g, chi)
    params = MarkovNoiseParams(p, mu)
    row = [p, mu]
    for kind in ("initial", "steady"):
        dil = dilation_unitary(kind, params, g, gp)
        ks = kraus_step(kind, params, g, gp)
        extracted = kraus_from_dilation(dil)
        kraus_defect = max(
            float(np.max(np.abs(a - b))) for a, b in zip(ks.ops, extracted.ops)
        )
        rep = verify_dilation(dil, ks, trials=trials, seed=seed)
        row += [dil.unitarity_defect(), kraus_defect, rep.max_deviation]
    fact = extract_m(dil, chi, g)  # steady-kind factorization
    row += [fact.residual, fact.unitary_defect, fact.control_value]
    return row


def _run_grid(worker, points, jobs: int) -> list:
    if jobs <= 1 or len(points) <= 1:
        return [worker(pt) for pt in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, points))


# ----------------------------------------------------------- handlers

def _meta(command: str, opts: dict, skip=("config", "format", "output", "jobs")) -> dict:
    meta = {"command": command, "version": __version__}
    for key in sorted(opts):
        if key not in skip:
            meta[key] = opts[key]
    return meta


def _label(**kv) -> str:
    # Column labels stay comma-free so the CSV header parses cleanly.
    return "P[" + ";".join(f"{k}={_fmt(v)}" for k, v in kv.items()) + "]"


def _handle_ideal(opts: dict) -> ResultTable:
    n = _parse_int(_require(opts, "n", "ideal"), "n")
    marked = _parse_int(opts["marked"], "marked")
    steps = _parse_int(opts["steps"], "steps")
    inst = GroverInstance(n, marked)
    series = ideal_success_series(inst, steps)
    meta = _meta("ideal", opts)
    meta["optimal_iterations"] = optimal_iterations(inst.N) if inst.N >= 4 else 0
    rows = [[t, float(p)] for t, p in enumerate(series)]
    return ResultTable(meta, ["t", "P"], rows)


def _noisy_grid(opts: dict, command: str):
    n = _parse_int(_require(opts, "n", command), "n")
    marked = _parse_int(opts["marked"], "marked")
    u = _parse_noise(opts["noise"])
    ps = _parse_float_list(opts["p"], "p")
    mus = _parse_float_list(opts["mu"], "mu")
    steps = _parse_int(opts["steps"], "steps")
    return n, marked, u, ps, mus, steps


def _handle_noisy(opts: dict) -> ResultTable:
    n, marked, u, ps, mus, steps = _noisy_grid(opts, "noisy")
    temperature = _parse_float(opts["temperature"], "temperature")
    if "positions" in opts:
        position_sets = [_parse_int_list(opts["positions"], "positions")]
        ms = [len(position_sets[0])]
    else:
        ms = list(_parse_int_list(opts["m"], "m"))
        position_sets = [None] * len(ms)
    jobs = _parse_int(opts["jobs"], "jobs")
    points, labels = [], []
    for (m, positions), p, mu in itertools.product(
        zip(ms, position_sets), ps, mus
    ):
        points.append((n, marked, u, m, positions, p, mu, temperature, steps))
        labels.append(_label(m=m, p=p, mu=mu))
    all_series = _run_grid(_series_point, points, jobs)
    rows = [
        [t] + [float(series[t]) for series in all_series] for t in range(steps + 1)
    ]
    return ResultTable(_meta("noisy", opts), ["t"] + labels, rows)


def _handle_invariance(opts: dict) -> ResultTable:
    n = _parse_int(_require(opts, "n", "invariance"), "n")
    marked = _parse_int(opts["marked"], "marked")
    u = _parse_noise(opts["noise"])
    p = _parse_float(opts["p"], "p")
    mu = _parse_float(opts["mu"], "mu")
    steps = _parse_int(opts["steps"], "steps")
    jobs = _parse_int(opts["jobs"], "jobs")
    points = []
    for m in range(1, n + 1):
        for positions in itertools.combinations(range(n), m):
            points.append((n, marked, u, m, positions, p, mu, 0.0, steps))
    all_series = _run_grid(_series_point, points, jobs)
    reference = all_series[0]  # m=1, position (0,)
    deviations = np.max(
        np.abs(np.stack(all_series) - reference[None, :]), axis=0
    )
    meta = _meta("invariance", opts)
    meta["subsets"] = len(points)
    rows = [
        [t, float(reference[t]), float(deviations[t])] for t in range(steps + 1)
    ]
    return ResultTable(meta, ["t", "P", "max_dev"], rows)


def _handle_firstmax(opts: dict) -> ResultTable:
    ns_list = _parse_int_list(_require(opts, "n", "firstmax"), "n")
    marked = _parse_int(opts["marked"], "marked")
    u = _parse_noise(opts["noise"])
    m = _parse_int(opts["m"], "m")
    ps = _parse_float_list(opts["p"], "p")
    mus = _parse_float_list(opts["mu"], "mu")
    steps = _parse_int(opts["steps"], "steps")
    jobs = _parse_int(opts["jobs"], "jobs")
    points = [
        (n, marked, u, m, None, p, mu, 0.0, steps)
        for n, p, mu in itertools.product(ns_list, ps, mus)
    ]
    results = _run_grid(_firstmax_point, points, jobs)
    rows = [
        [pt[0], pt[5], pt[6], t_star, p_star]
        for pt, (t_star, p_star) in zip(points, results)
    ]
    return ResultTable(_meta("firstmax", opts), ["n", "p", "mu", "t_star", "P_star"], rows)


def _handle_blp(opts: dict) -> ResultTable:
    n, marked, u, ps, mus, steps = _noisy_grid(opts, "blp")
    temperature = _parse_float(opts["temperature"], "temperature")
    m = _parse_int(opts["m"], "m")
    jobs = _parse_int(opts["jobs"], "jobs")
    points = [
        (n, marked, u, m, p, mu, temperature, steps)
        for p, mu in itertools.product(ps, mus)
    ]
    values = _run_grid(_blp_point, points, jobs)
    meta = _meta("blp", opts)
    meta["witness_only"] = "true"
    rows = [[pt[4], pt[5], float(v)] for pt, v in zip(points, values)]
    return ResultTable(meta, ["p", "mu", "N_backflow"], rows)


def _handle_cpdiv(opts: dict) -> ResultTable:
    n, marked, u, ps, mus, steps = _noisy_grid(opts, "cpdiv")
    m = _parse_int(opts["m"], "m")
    jobs = _parse_int(opts["jobs"], "jobs")
    points = [
        (n, marked, u, m, p, mu, steps) for p, mu in itertools.product(ps, mus)
    ]
    values = _run_grid(_cpdiv_point, points, jobs)
    meta = _meta("cpdiv", opts)
    meta["witness_only"] = "true"
    rows = [[pt[4], pt[5], float(v)] for pt, v in zip(points, values)]
    return ResultTable(meta, ["p", "mu", "N_cpdiv"], rows)


def _handle_thermal(opts: dict) -> ResultTable:
    n, marked, u, ps, mus, steps = _noisy_grid(opts, "thermal")
    m = _parse_int(opts["m"], "m")
    temps = _parse_float_list(opts["temps"], "temps")
    if any(t <= 0.0 for t in temps):
        raise ConfigError(f"temps must be positive, got {opts['temps']!r}")
    jobs = _parse_int(opts["jobs"], "jobs")
    points = [
        (n, marked, u, m, p, mu, temp, steps)
        for temp, p, mu in itertools.product(temps, ps, mus)
    ]
    values = _run_grid(_blp_point, points, jobs)
    meta = _meta("thermal", opts)
    meta["witness_only"] = "true"
    rows = [[pt[6], pt[4], pt[5], float(v)] for pt, v in zip(points, values)]
    return ResultTable(meta, ["temperature", "p", "mu", "N_backflow"], rows)


_DILATION_COLUMNS = [
    "p", "mu",
    "unitarity_initial", "kraus_defect_initial", "dilation_dev_initial",
    "unitarity_steady", "kraus_defect_steady", "dilation_dev_steady",
    "m_residual", "m_unitary_defect", "m_control",
]

_DILATION_TOLS = {
    "unitarity_initial": 1e-10, "unitarity_steady": 1e-10,
    "kraus_defect_initial": 0.0, "kraus_defect_steady": 0.0,
    "dilation_dev_initial": 1e-12, "dilation_dev_steady": 1e-12,
    "m_residual": 1e-8, "m_unitary_defect": 1e-8,
}


def _handle_dilation_check(opts: dict) -> ResultTable:
    n = _parse_int(_require(opts, "n", "dilation-check"), "n")
    marked = _parse_int(opts["marked"], "marked")
    u = _parse_noise(opts["noise"])
    m = _parse_int(opts["m"], "m")
    ps = _parse_float_list(opts["p"], "p")
    mus = _parse_float_list(opts["mu"], "mu")
    trials = _parse_int(opts["trials"], "trials")
    seed = _parse_int(opts["seed"], "seed")
    jobs = _parse_int(opts["jobs"], "jobs")
    points = [
        (n, marked, u, m, p, mu, trials, seed)
        for p, mu in itertools.product(ps, mus)
    ]
    rows = _run_grid(_dilation_point, points, jobs)
    for row in rows:
        for name, tol in _DILATION_TOLS.items():
            value = row[_DILATION_COLUMNS.index(name)]
            if value > tol:
                raise InvariantViolation(
                    f"dilation check failed at p={row[0]} mu={row[1]}: "
                    f"{name}={value:.3e} exceeds {tol:.1e}"
                )
    meta = _meta("dilation-check", opts)
    meta["all_within_tolerance"] = "true"
    return ResultTable(meta, list(_DILATION_COLUMNS), rows)


def _handle_oracle_check(opts: dict) -> ResultTable:
    n = _parse_int(_require(opts, "n", "oracle-check"), "n")
    marked = _parse_int(opts["marked"], "marked")
    u = _parse_noise(opts["noise"])
    m = _parse_int(opts["m"], "m")
    p = _parse_float(opts["p"], "p")
    mu = _parse_float(opts["mu"], "mu")
    steps = _parse_int(opts["steps"], "steps")
    if steps > 12:
        raise ConfigError(f"oracle-check is exponential in steps; {steps} > 12")
    inst = GroverInstance(n, marked)
    spec = noise_spec(u, m, n)
    params = MarkovNoiseParams(p, mu)
    evolved = markov_evolve(inst, spec, params, steps, keep_states=True)
    reference = history_oracle(inst, spec, params, steps)
    rows = []
    worst = 0.0
    for t in range(steps + 1):
        dist = trace_distance(evolved.states[t], reference.states[t])
        prob_dev = abs(evolved.probabilities[t] - reference.probabilities[t])
        worst = max(worst, dist)
        rows.append([t, float(dist), float(prob_dev)])
    if worst > 1e-10:
        raise InvariantViolation(
            f"collision evolution deviates from the history sum by {worst:.3e}"
        )
    meta = _meta("oracle-check", opts)
    meta["max_trace_distance"] = worst
    return ResultTable(meta, ["t", "trace_distance", "prob_deviation"], rows)


_HANDLERS = {
    "ideal": _handle_ideal,
    "noisy": _handle_noisy,
    "invariance": _handle_invariance,
    "firstmax": _handle_firstmax,
    "blp": _handle_blp,
    "cpdiv": _handle_cpdiv,
    "thermal": _handle_thermal,
    "dilation-check": _handle_dilation_check,
    "oracle-check": _handle_oracle_check,
}


def run(options) -> ResultTable:
    """Programmatic entry point: a parsed namespace (or dict) to a table."""
    if isinstance(options, dict):
        options = argparse.Namespace(**options)
    if not getattr(options, "command", None):
        raise ConfigError("no command given; see --help")
    if options.command not in _HANDLERS:
        raise ConfigError(f"unknown command {options.command!r}")
    opts = _resolve_options(options)
    try:
        return _HANDLERS[options.command](opts)
    except ValueError as exc:
        # Domain validation (bad ranges etc.) is a configuration problem.
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
        ns = parser.parse_args(argv)
        table = run(ns)
        opts = _resolve_options(ns)
        if opts["output"] == "-":
            emit(table, opts["format"], sys.stdout)
        else:
            with open(opts["output"], "w", encoding="utf-8", newline="\n") as fh:
                emit(table, opts["format"], fh)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
