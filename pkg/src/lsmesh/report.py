"""Strategy comparison tables and their JSON / CSV / Markdown serializations."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .circuit import Circuit
from .mapping import Mapping, Strategy, map_circuit
from .scheduler import ResourceReport, schedule
from .topology import ArchSpec, build_network

METRICS = ("executed_gates", "epr_pairs", "magic_state_travel", "cycles", "traffic_bits")
METRIC_LABELS = {
    "executed_gates": "Executed Gates",
    "epr_pairs": "EPR Pairs",
    "magic_state_travel": "Magic State Travel",
    "cycles": "Cycles",
    "traffic_bits": "Traffic(bits)",
}
STRATEGY_ORDER = (Strategy.PARTITION_QAPFA, Strategy.PARTITION, Strategy.RANDOM)
STRATEGY_LABELS = {
    Strategy.PARTITION_QAPFA: "Part.+ QAPFA",
    Strategy.PARTITION: "Part.",
    Strategy.RANDOM: "Random",
}


@dataclass
class ComparisonTable:
    config_summary: str
    seeds: list[int]
    rows: dict[str, dict[str, float]]  # metric -> strategy value -> mean
    per_seed: dict[str, list[dict]] = field(default_factory=dict)  # strategy -> per-seed reports
    aggregation: str = "mean"

    def to_dict(self) -> dict:
        return {
            "config": self.config_summary,
            "seeds": list(self.seeds),
            "aggregation": self.aggregation,
            "strategies": [s.value for s in STRATEGY_ORDER],
            "rows": {m: {s.value: self.rows[m][s.value] for s in STRATEGY_ORDER} for m in METRICS},
            "per_seed": {s.value: self.per_seed.get(s.value, []) for s in STRATEGY_ORDER},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonTable":
        return cls(d["config"], list(d["seeds"]), d["rows"], d.get("per_seed", {}), d.get("aggregation", "mean"))


def _mean(values: Sequence[int]) -> float:
    # exact rational mean, rounded once
    return float(Fraction(sum(values), len(values)))


def run_one(circuit: Circuit, spec: ArchSpec, strategy: Strategy | str, seed: int,
            partition: Sequence[int] | None = None) -> tuple[Mapping, ResourceReport]:
    """Map and schedule once; the schedule itself is dropped."""
    net = build_network(spec)
    mapping = map_circuit(circuit, spec, strategy, seed=seed, partition=partition, net=net)
    _, report = schedule(circuit, mapping, net, seed=seed)
    return mapping, report


def _job(args) -> dict:
    circuit, spec, strategy, seed, partition = args
    return run_one(circuit, spec, strategy, seed, partition)[1].to_dict()


def describe(spec: ArchSpec, circuit: Circuit, label: str = "") -> str:
    parts = [label or f"{len(circuit)} Gate Circuit",
             f"{spec.mesh_rows}x{spec.mesh_cols} Mesh",
             f"{spec.core_size}x{spec.core_size} Core Size",
             f"Code Distance {spec.code_distance}",
             f"{circuit.num_qubits} Logical Qubits"]
    return " | ".join(parts)


def compare_strategies(circuit: Circuit, spec: ArchSpec, seeds: Sequence[int], label: str = "",
                       partition: Sequence[int] | None = None, jobs: int = 1) -> ComparisonTable:
    """Run all three strategies for every seed and average the metrics.

    Runs are independent; with ``jobs > 1`` they fan out over processes and
    are folded back in (seed, strategy) order, so output does not depend on ``jobs``.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("at least one seed required")
    tasks = [(circuit, spec, s.value, seed, partition) for seed in seeds for s in STRATEGY_ORDER]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job, tasks))
    else:
        results = [_job(t) for t in tasks]
    per_seed: dict[str, list[dict]] = {s.value: [] for s in STRATEGY_ORDER}
    for (_, _, strat, _, _), rep in zip(tasks, results):
        per_seed[strat].append(rep)
    rows = {m: {s: _mean([r[m] for r in reps]) for s, reps in per_seed.items()} for m in METRICS}
    return ComparisonTable(describe(spec, circuit, label), seeds, rows, per_seed)


# --------------------------------------------------------------------------
# serialization

def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.1f}"


def to_json(obj: ComparisonTable | ResourceReport) -> str:
    return json.dumps(obj.to_dict(), indent=2) + "\n"


def to_csv(obj: ComparisonTable | ResourceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "strategy", "value"])
    if isinstance(obj, ComparisonTable):
        for m in METRICS:
            for s in STRATEGY_ORDER:
                w.writerow([m, s.value, obj.rows[m][s.value]])
    else:
        for m in METRICS:
            w.writerow([m, "", getattr(obj, m)])
    return buf.getvalue()


def to_markdown(obj: ComparisonTable | ResourceReport) -> str:
    if isinstance(obj, ResourceReport):
        lines = ["| Stats | Value |", "|---|---|"]
        lines += [f"| {METRIC_LABELS[m]} | {getattr(obj, m)} |" for m in METRICS]
        return "\n".join(lines) + "\n"
    head = "| Stats-Mapping | " + " | ".join(STRATEGY_LABELS[s] for s in STRATEGY_ORDER) + " |"
    lines = [f"**{obj.config_summary}** (mean over seeds {', '.join(map(str, obj.seeds))})", "",
             head, "|---|---|---|---|"]
    for m in METRICS:
        vals = " | ".join(_fmt(obj.rows[m][s.value]) for s in STRATEGY_ORDER)
        lines.append(f"| {METRIC_LABELS[m]} | {vals} |")
    return "\n".join(lines) + "\n"


_WRITERS = {"json": to_json, "csv": to_csv, "markdown": to_markdown, "md": to_markdown}


def emit(obj: ComparisonTable | ResourceReport, fmt: str, destination: str | Path | io.TextIOBase) -> None:
    if isinstance(obj, ComparisonTable) and not obj.seeds:
        raise ValueError("at least one seed required")
    try:
        text = _WRITERS[fmt](obj)
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}; choose json, csv or markdown") from None
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text)
    else:
        destination.write(text)
