"""Command-line driver for the experiments.

Options can also come from ``--config FILE`` holding ``key = value`` lines
(keys are the long option names); flags on the command line win. When
several ``--m`` values are given, the i-th one runs with seed ``seed + i``.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .fixtures import fig2_walkthrough
from .graph import ftn_graph_props
from .keyspace import SchemeConfig
from .simulator import (
    Metrics,
    SimConfig,
    aggregate,
    chord_repetition,
    load_balance_repetition,
    lookup_perf_repetition,
    routing_table_repetition,
)

OUTPUT_DIR_ENV = "TRANSNET_OUTPUT_DIR"

CSV_HEADER = [
    "experiment", "scheme", "n", "m", "K", "seed", "repetition", "algorithm",
    "mean_hops", "p95_hops", "max_hops", "success_rate",
    "mean_distinct_entries", "load_metric_A", "jump_rate",
]

COMMANDS = ("lookup-perf", "table-size", "load-balance", "graph-props", "fixture")

DEFAULTS = {
    "scheme": "B",
    "n": 7,
    "m": "100",
    "K": None,
    "seed": 42,
    "algorithm": "greedy",
    "baseline": "none",
    "repetitions": 40,
    "initiators": 100,
    "lookups": 100,
    "output": None,
}


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    command: str
    scheme: str = "B"
    n: int = 7
    m: list = field(default_factory=lambda: [100])
    K: Optional[int] = None
    seed: int = 42
    algorithm: str = "greedy"
    baseline: str = "none"
    repetitions: int = 40
    initiators: int = 100
    lookups: int = 100
    output: Optional[Path] = None
    name: Optional[str] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command == "fixture":
            if self.name != "fig2":
                raise UsageError(f"unknown fixture {self.name!r} (available: fig2)")
            return
        if self.scheme not in ("A", "B"):
            raise UsageError("--scheme must be A or B")
        if self.K is not None and self.scheme != "B":
            raise UsageError("--K only applies to scheme B")
        if self.K is not None and self.K < 1:
            raise UsageError("--K must be >= 1")
        if not 3 <= self.n <= 25:
            raise UsageError("--n must be in [3, 25]")
        if self.command == "graph-props":
            return
        limit = math.factorial(self.n)
        for m in self.m:
            if not 1 <= m <= limit:
                raise UsageError(f"m={m} must be in [1, {self.n}!={limit}]")
        if self.command == "load-balance" and min(self.m) < 2:
            raise UsageError("load-balance needs at least 2 identifiers")
        if self.algorithm not in ("greedy", "heuristic"):
            raise UsageError("--algorithm must be greedy or heuristic")
        if self.baseline not in ("none", "chord"):
            raise UsageError("--baseline must be none or chord")
        for name in ("repetitions", "initiators", "lookups"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name} must be >= 1")

    @property
    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(self.scheme, self.n, self.K or 1)

    def default_output(self) -> Path:
        return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{self.command}.csv"


def read_config(path: Path) -> dict:
    out = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown option {key!r}")
        out[key] = value
    return out


def _int_list(text) -> list:
    if isinstance(text, list):
        return text
    try:
        return [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, experiment=True):
        p.add_argument("--config", type=Path, help="key = value file; flags override it")
        p.add_argument("--n", type=int, help="permutation arity")
        if not experiment:
            return
        p.add_argument("--scheme", choices=("A", "B"))
        p.add_argument("--K", type=int, help="keys per identifier (scheme B)")
        p.add_argument("--seed", type=int)
        p.add_argument("--repetitions", type=int)
        p.add_argument("--output", type=Path, help=f"CSV path (default ${OUTPUT_DIR_ENV}/<command>.csv)")

    p = sub.add_parser("lookup-perf", help="mean hops of random lookups")
    common(p)
    p.add_argument("--m", help="node counts, comma separated")
    p.add_argument("--algorithm", choices=("greedy", "heuristic"))
    p.add_argument("--baseline", choices=("none", "chord"))
    p.add_argument("--initiators", type=int)
    p.add_argument("--lookups", type=int, help="lookups per initiator")

    p = sub.add_parser("table-size", help="distinct routing-table entries per node")
    common(p)
    p.add_argument("--m", help="node counts, comma separated")

    p = sub.add_parser("load-balance", help="adjacent-gap deviation of random identifiers")
    common(p)
    p.add_argument("--m", "--count", dest="m", help="identifier counts, comma separated")

    p = sub.add_parser("graph-props", help="degree, diameter, connectivity of the complete graph")
    common(p, experiment=False)

    p = sub.add_parser("fixture", help="print a scripted routing scenario")
    p.add_argument("name", help="fixture name (fig2)")
    return parser


def parse_spec(argv=None) -> RunSpec:
    args = build_parser().parse_args(argv)
    given = {k: v for k, v in vars(args).items() if v is not None}
    config = getattr(args, "config", None)
    merged = dict(DEFAULTS)
    if config is not None:
        merged.update(read_config(config))
    merged.update({k: v for k, v in given.items() if k in DEFAULTS})
    try:
        spec = RunSpec(
            command=args.command,
            scheme=str(merged["scheme"]),
            n=int(merged["n"]),
            m=_int_list(merged["m"]),
            K=None if merged["K"] in (None, "") else int(merged["K"]),
            seed=int(merged["seed"]),
            algorithm=str(merged["algorithm"]),
            baseline=str(merged["baseline"]),
            repetitions=int(merged["repetitions"]),
            initiators=int(merged["initiators"]),
            lookups=int(merged["lookups"]),
            output=None if merged["output"] in (None, "") else Path(merged["output"]),
            name=getattr(args, "name", None),
        )
    except ValueError as e:
        raise UsageError(str(e))
    spec.validate()
    return spec


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.6f}"


def _row(experiment, spec: RunSpec, m, seed, rep, algorithm, metrics: Metrics, transnet=True):
    return [
        experiment,
        spec.scheme if transnet else "",
        spec.n if transnet else "",
        m,
        (spec.K or 1) if transnet and spec.scheme == "B" else "",
        seed,
        rep,
        algorithm,
        _fmt(metrics.mean_hops),
        _fmt(metrics.p95_hops),
        _fmt(metrics.max_hops),
        _fmt(metrics.success_rate),
        _fmt(metrics.mean_distinct_table_entries),
        _fmt(metrics.load_metric_A_mean),
        _fmt(metrics.jump_rate),
    ]


def run(spec: RunSpec, out=sys.stdout) -> int:
    """Execute ``spec``; returns the process exit status."""
    if spec.command == "fixture":
        for line in fig2_walkthrough():
            print(line, file=out)
        return 0
    if spec.command == "graph-props":
        print(ftn_graph_props(spec.n).summary(), file=out)
        return 0

    rows = []
    for i, m in enumerate(spec.m):
        seed = spec.seed + i
        cfg = SimConfig(
            scheme=spec.scheme_config,
            m=m if spec.command != "load-balance" else 1,
            seed=seed,
            algorithm=spec.algorithm,
            initiators=spec.initiators,
            lookups_per_initiator=spec.lookups,
            repetitions=spec.repetitions,
        )
        per_rep = []
        for r in range(spec.repetitions):
            if spec.command == "lookup-perf":
                metrics = lookup_perf_repetition(cfg, r)
                algorithm = spec.algorithm
            elif spec.command == "table-size":
                metrics = routing_table_repetition(cfg, r)
                algorithm = ""
            else:
                metrics = load_balance_repetition(cfg, m, r)
                algorithm = ""
            per_rep.append(metrics)
            rows.append(_row(spec.command, spec, m, seed, r, algorithm, metrics))
        summary = aggregate(per_rep)
        line = f"{spec.command} scheme={spec.scheme} n={spec.n} m={m} seed={seed}: "
        line += ", ".join(
            f"{k}={_fmt(v)}" for k, v in vars(summary).items() if v is not None
        )
        print(line, file=out)

        if spec.command == "lookup-perf" and spec.baseline == "chord":
            chord = []
            for r in range(spec.repetitions):
                metrics = chord_repetition(m, seed, r, spec.initiators * spec.lookups, spec.initiators)
                chord.append(metrics)
                rows.append(_row(spec.command, spec, m, seed, r, "chord", metrics, transnet=False))
            print(
                f"chord m={m} seed={seed}: mean_hops={_fmt(aggregate(chord).mean_hops)}",
                file=out,
            )

    path = spec.output or spec.default_output()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {path}", file=out)
    return 0


def main(argv=None) -> int:
    try:
        spec = parse_spec(argv)
        return run(spec)
    except UsageError as e:
        print(f"transnet: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"transnet: I/O error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
