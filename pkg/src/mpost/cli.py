"""Command line front end.

Subcommands:

* ``run``      execute one experiment and write results.csv, manifest.json,
               and (with ``--dump-members``) samples.csv under the out dir
* ``list``     print the registered experiment names
* ``validate`` resolve a config file against its schema and print it

Exit codes: 0 success, 2 configuration problem, 3 numerical failure.
Rerunning with an identical config and seed reproduces results.csv
byte for byte; manifest.json additionally records wall-clock time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from numpy.linalg import LinAlgError

from .errors import ConfigError, NumericalError
from .experiments import EXPERIMENTS, resolve_config, run_experiment

__all__ = ["cli_main", "main"]

_CSV_COLUMNS = (
    "experiment",
    "n",
    "delta_n",
    "cap_n",
    "k",
    "metric",
    "index",
    "value",
    "std_error",
)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return loaded


def _pick_experiment(arg: str | None, overrides: dict) -> str:
    name = arg or overrides.get("experiment")
    if not name:
        raise ConfigError(
            "no experiment named; pass --experiment or set 'experiment' in the config"
        )
    if not isinstance(name, str):
        raise ConfigError(f"experiment name must be a string, got {name!r}")
    return name


def _config_digest(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def _sort_key(row: dict):
    def col(name):
        v = row[name]
        return -1 if v is None else v

    return (
        row["metric"],
        col("index"),
        col("n"),
        col("delta_n"),
        col("cap_n"),
        col("k"),
    )


def _write_results(path: Path, rows: list[dict]) -> None:
    ordered = sorted(rows, key=_sort_key)
    lines = [",".join(_CSV_COLUMNS)]
    for row in ordered:
        lines.append(",".join(_fmt(row[c]) for c in _CSV_COLUMNS))
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def _write_samples(path: Path, dumped: list) -> None:
    lines = ["ensemble,chain,coord,value"]
    for name, members in dumped:
        for chain in range(members.shape[0]):
            for coord in range(members.shape[1]):
                lines.append(
                    f"{name},{chain},{coord},{format(members[chain, coord], '.17g')}"
                )
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def _cmd_run(args: argparse.Namespace) -> int:
    overrides = _load_config(args.config) if args.config else {}
    experiment = _pick_experiment(args.experiment, overrides)
    if not 0 <= args.seed < 2**64:
        raise ConfigError(f"seed must fit in 64 unsigned bits, got {args.seed}")
    resolved = resolve_config(experiment, overrides)

    started = time.perf_counter()
    dump: list | None = [] if args.dump_members else None
    rows = run_experiment(experiment, resolved, args.seed, dump)
    wall = time.perf_counter() - started

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_results(out / "results.csv", rows)
    if dump is not None:
        _write_samples(out / "samples.csv", dump)

    from . import __version__

    manifest = {
        "experiment": experiment,
        "seed": args.seed,
        "version": __version__,
        "config": resolved,
        "config_sha256": _config_digest(resolved),
        "row_count": len(rows),
        "wall_seconds": wall,
        "results": sorted(rows, key=_sort_key),
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(rows)} rows to {out / 'results.csv'}")
    return 0


def _cmd_list(_args: argparse.Namespace) -> int:
    for name in sorted(EXPERIMENTS):
        doc = (EXPERIMENTS[name].__doc__ or "").strip().splitlines()
        note = doc[0] if doc else ""
        print(f"{name:16s} {note}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    overrides = _load_config(args.config)
    experiment = _pick_experiment(args.experiment, overrides)
    resolved = resolve_config(experiment, overrides)
    print(json.dumps({"experiment": experiment, **resolved}, indent=2, sort_keys=True))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpost",
        description="Reproducible chain-resampling uncertainty experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment and write result files")
    run_p.add_argument("--experiment", default=None, help="experiment name")
    run_p.add_argument("--config", default=None, help="JSON config file with overrides")
    run_p.add_argument("--seed", type=int, default=0, help="base seed (u64)")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument(
        "--dump-members",
        action="store_true",
        help="also write raw ensemble members to samples.csv",
    )
    run_p.set_defaults(handler=_cmd_run)

    list_p = sub.add_parser("list", help="print registered experiment names")
    list_p.set_defaults(handler=_cmd_list)

    val_p = sub.add_parser("validate", help="check a config file against its schema")
    val_p.add_argument("--config", required=True, help="JSON config file")
    val_p.add_argument("--experiment", default=None, help="experiment name override")
    val_p.set_defaults(handler=_cmd_validate)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (NumericalError, FloatingPointError, LinAlgError) as exc:
        # LinAlgError subclasses ValueError, so this arm must come first
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
