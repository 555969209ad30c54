"""``capres <experiment> --config <path> [--out <dir>] [--seed <n>]``.

The configuration is an INI file::

    [quadrature]
    abs_tol = 1e-10
    rel_tol = 1e-10

    [run]
    k_max = 16
    lambda_cutoff = auto
    L = 4.5
    p = 2
    seed = 0

    [resonance-scan]
    f0_halfwidth = 1.0
    f1_halfwidth = zero

Results go to ``<out>/<experiment>.csv`` and ``<out>/<experiment>.json``.
Exit status: 0 when every record passes, 1 on a failed record, 2 on a
configuration error.  ``CAPRES_THREADS`` caps the BLAS/OpenMP worker count.
Runtimes are written only with ``--timing`` so that repeated runs give
byte-identical tables.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

EXPERIMENT_NAMES = ("mellin-check", "o11-resonance", "o11-rep", "weil-check", "sl2-model", "sl2-endtoend",
                    "capelli-check", "resonance-scan")
CSV_COLUMNS = ("name", "computed_re", "computed_im", "expected_re", "expected_im", "abs_err", "rel_err",
               "runtime_ms", "provenance")
THREAD_VARIABLES = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")
SL2_EXPERIMENTS = ("sl2-endtoend", "capelli-check")

log = logging.getLogger("capres")


class ConfigProblem(Exception):
    """Raised for anything that should end the run with exit status 2."""


def thread_cap(environ=os.environ) -> int | None:
    raw = environ.get("CAPRES_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigProblem(f"CAPRES_THREADS={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigProblem("CAPRES_THREADS must be at least 1")
    return n


def _number(section: dict, name: str, key: str, default, kind):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError:
        raise ConfigProblem(f"[{name}] {key} = {raw!r} is not a valid {kind.__name__}") from None


def load_config(experiment: str, path: str | None, out: str | None = None, seed: int | None = None):
    """Parse and validate the INI file into an :class:`~capres.experiments.ExperimentConfig`."""
    from .experiments import ExperimentConfig
    from .numerics import QuadratureConfig

    if experiment not in EXPERIMENT_NAMES:
        raise ConfigProblem(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENT_NAMES)}")
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if path is not None:
        if not Path(path).is_file():
            raise ConfigProblem(f"config file {path!r} does not exist")
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigProblem(f"cannot parse {path!r}: {exc}") from None
    known = {"quadrature", "run", *EXPERIMENT_NAMES}
    unknown = [s for s in parser.sections() if s not in known]
    if unknown:
        raise ConfigProblem(f"unknown config sections {unknown}")

    quad = dict(parser["quadrature"]) if parser.has_section("quadrature") else {}
    run = dict(parser["run"]) if parser.has_section("run") else {}
    try:
        quadrature = QuadratureConfig(
            abs_tol=_number(quad, "quadrature", "abs_tol", 1e-10, float),
            rel_tol=_number(quad, "quadrature", "rel_tol", 1e-10, float),
            max_subdivisions=_number(quad, "quadrature", "max_subdivisions", 4000, int),
            unbounded_cutoff=_number(quad, "quadrature", "unbounded_cutoff", 1e3, float),
        )
    except ValueError as exc:
        raise ConfigProblem(f"[quadrature]: {exc}") from None

    raw_cutoff = run.get("lambda_cutoff", "auto")
    if str(raw_cutoff).strip().lower() == "auto":
        lambda_cutoff = None
    else:
        lambda_cutoff = _number(run, "run", "lambda_cutoff", None, float)
        if not lambda_cutoff > 0:
            raise ConfigProblem("lambda_cutoff must be positive or 'auto'")
    k_max = _number(run, "run", "k_max", 16, int)
    if k_max < 1:
        raise ConfigProblem("k_max must be at least 1")
    shift = _number(run, "run", "L", 4.5, float)
    if experiment in ("sl2-model", "resonance-scan"):
        if not shift > 0 or abs(shift - round(shift)) < 1e-9:
            raise ConfigProblem(f"L = {shift:g} must be a positive non-integer: an integer contour height "
                                "passes through a resonance")
    p = _number(run, "run", "p", 2, int)
    if experiment in SL2_EXPERIMENTS and p < 2:
        raise ConfigProblem(f"p = {p}: the SL2 experiments need p >= 2")
    config_seed = _number(run, "run", "seed", 0, int)
    options = dict(parser[experiment]) if parser.has_section(experiment) else {}
    return ExperimentConfig(experiment, quadrature, k_max, lambda_cutoff, shift, p, out or ".",
                            config_seed if seed is None else seed, options)


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "n/a"
    return repr(float(x))


def write_tables(records, experiment: str, out_dir: str, timing: bool) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / f"{experiment}.csv", out / f"{experiment}.json"
    rows = []
    for r in records:
        runtime = r.runtime_ms if timing else 0
        rows.append({
            "name": r.name,
            "computed_re": _fmt(r.computed.real),
            "computed_im": _fmt(r.computed.imag),
            "expected_re": "n/a" if r.expected is None else _fmt(r.expected.real),
            "expected_im": "n/a" if r.expected is None else _fmt(r.expected.imag),
            "abs_err": _fmt(r.abs_err),
            "rel_err": _fmt(r.rel_err),
            "runtime_ms": str(runtime),
            "provenance": r.provenance,
        })
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    payload = {
        "experiment": experiment,
        "passed": all(r.passed for r in records),
        "records": [
            {**row, "atol": r.atol, "rtol": r.rtol, "passed": r.passed, "note": r.note}
            for row, r in zip(rows, records)
        ],
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capres", description="Run one verification experiment.")
    parser.add_argument("experiment", help=" | ".join(EXPERIMENT_NAMES))
    parser.add_argument("--config", required=True, help="INI configuration file")
    parser.add_argument("--out", default=".", help="directory for the CSV and JSON tables")
    parser.add_argument("--seed", type=int, default=None, help="seed for random sample points")
    parser.add_argument("--timing", action="store_true", help="write measured runtimes into the tables")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        threads = thread_cap()
        if threads is not None:
            for var in THREAD_VARIABLES:
                os.environ[var] = str(threads)
        config = load_config(args.experiment, args.config, args.out, args.seed)
    except ConfigProblem as exc:
        print(f"capres: configuration error: {exc}", file=sys.stderr)
        return 2

    from .errors import ConfigError
    from .experiments import EXPERIMENTS

    try:
        records = EXPERIMENTS[config.experiment](config)
    except ConfigError as exc:
        print(f"capres: configuration error: {exc}", file=sys.stderr)
        return 2
    csv_path, json_path = write_tables(records, config.experiment, config.output_path, args.timing)
    failed = [r for r in records if not r.passed]
    for r in records:
        status = "ok  " if r.passed else "FAIL"
        print(f"{status} {r.name}: computed {r.computed:.10g}, expected "
              f"{'n/a' if r.expected is None else format(r.expected, '.10g')}, abs_err {r.abs_err:.3g} "
              f"[{r.provenance}] {r.runtime_ms} ms{(' (' + r.note + ')') if r.note else ''}", file=sys.stderr)
    print(f"capres: {len(records) - len(failed)}/{len(records)} records passed; tables in {csv_path} and "
          f"{json_path}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
