"""Command line: ``rieszprob verify`` and ``rieszprob converge``.

Exit codes: 0 everything held, 1 an identity or tolerance failed,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, integer, load_config
from .experiments import EXPERIMENTS, run_experiment
from .serialize import process_from_json
from .verify import DEFAULT_TRIALS, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _process_descriptor(raw: dict) -> dict:
    """Turn a flat config section into a process descriptor."""
    if "base" in raw:
        return raw

    def listed(key):
        value = raw[key]
        return value if isinstance(value, list) else [v.strip() for v in str(value).split(",")]

    exact = str(raw.get("exact", "true")).strip().lower() not in ("0", "false", "no")
    return {
        "base": {"exact": exact, "weights": listed("weights")},
        "block_of": [int(b) for b in listed("block_of")],
        "f": listed("f"),
        "n": raw["n"],
        "representation": str(raw.get("representation", "full")).strip(),
    }


def _build_processes(cfg: dict) -> list:
    procs = []
    for k, raw in enumerate(cfg["processes"]):
        name = str(raw.get("name", f"process{k}"))
        try:
            procs.append((name, process_from_json(_process_descriptor(raw))))
        except (KeyError, TypeError, ValueError) as exc:
            detail = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
            raise ConfigError(f"process {name!r}: {detail}") from exc
    return procs


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    section = cfg["verify"]
    seed = args.seed if args.seed is not None else integer(section.get("seed", 0), "seed")
    trials = args.trials if args.trials is not None else integer(section.get("trials", DEFAULT_TRIALS), "trials")
    if trials < 1:
        raise ConfigError("trials must be positive")
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    processes = _build_processes(cfg)
    report = run_suite(seed, trials, processes)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if report["all_passed"] else EXIT_FAIL


def cmd_converge(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    params = dict(cfg["converge"])
    name = args.experiment or params.get("experiment")
    if not name:
        raise ConfigError("no experiment given; pass --experiment or set it in the config")
    result = run_experiment(str(name).strip(), params)
    out_dir = Path(args.out or params.get("out", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{result.experiment}.csv"
    csv_path.write_text(result.to_csv())
    print(f"{result.experiment}: {len(result.rows)} rows -> {csv_path}")
    for note in result.notes:
        print(f"note: {note}")
    if result.failures:
        print(f"{result.experiment}: {len(result.failures)} failing rows", file=sys.stderr)
        for line in result.failures:
            print(f"  {line}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{result.experiment}: all assertions hold")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rieszprob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the exact identity battery and print a JSON report")
    v.add_argument("--config", help="INI or JSON config file")
    v.add_argument("--seed", type=int, help="64-bit seed for the randomized instances")
    v.add_argument("--trials", type=int, help="instances per check")
    v.add_argument("--report", help="also write the JSON report to this path")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("converge", help="run a convergence experiment and write a CSV table")
    c.add_argument("--experiment", choices=EXPERIMENTS)
    c.add_argument("--config", help="INI or JSON config file")
    c.add_argument("--out", help="output directory for the CSV (default: current directory)")
    c.set_defaults(func=cmd_converge)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
