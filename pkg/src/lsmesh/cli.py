"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 infeasible input (the
circuit or partition does not fit the architecture), 3 a produced schedule
failed its own validation (an internal bug, never expected).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .circuit import Circuit, CircuitError, ClusteredMix, generate_cuccaro_adder, generate_random_circuit, mix_profile, parse_circuit
from .mapping import CapacityError, InfeasiblePartition, Strategy, load_partition, map_circuit, save_partition
from .report import compare_strategies, describe, emit
from .scheduler import schedule, validate_schedule
from .topology import ArchSpec, CostModel, build_network, measured_counts, structural_counts


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    name: str = "run"
    circuit: dict = field(default_factory=lambda: {"generator": "random", "num_qubits": 468,
                                                   "num_gates": 10000, "mix": "60/40", "seed": 0})
    mesh: str = "6x6"
    core: int = 5
    distance: int = 3
    cost_model: dict = field(default_factory=dict)
    strategy: str = "part-qapfa"
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    out: str = "out"
    partition_file: str | None = None
    jobs: int = 1

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def arch(self) -> ArchSpec:
        rows, cols = parse_mesh(self.mesh)
        return ArchSpec(rows, cols, self.core, self.distance, CostModel(**self.cost_model))

    def load_circuit(self) -> Circuit:
        return circuit_from_source(self.circuit)


def parse_mesh(text: str) -> tuple[int, int]:
    try:
        rows, cols = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"mesh must look like RxC (rows x cols), got {text!r}") from None
    return rows, cols


def _mix(spec):
    if isinstance(spec, dict) and "clustered" in spec:
        a, b = spec["clustered"]
        return ClusteredMix(_mix(a), _mix(b))
    if isinstance(spec, str):
        if spec.startswith("clustered:"):
            a, b = spec.split(":", 1)[1].split(",")
            return ClusteredMix(mix_profile(a), mix_profile(b))
        return mix_profile(spec)
    return dict(spec)


def circuit_from_source(src: dict) -> Circuit:
    if "file" in src:
        path = Path(src["file"])
        if not path.exists():
            raise UsageError(f"circuit file {path} does not exist")
        return parse_circuit(path.read_text())
    gen = src.get("generator")
    if gen == "random":
        return generate_random_circuit(int(src["num_qubits"]), int(src["num_gates"]),
                                       _mix(src.get("mix", "60/40")), int(src.get("seed", 0)))
    if gen == "cuccaro":
        return generate_cuccaro_adder(int(src["bits"]))
    raise UsageError(f"circuit source needs 'file' or generator random|cuccaro, got {src!r}")


def _common(p: argparse.ArgumentParser, circuit: bool = True, run: bool = True):
    p.add_argument("--config", help="JSON run configuration; flags override its fields")
    p.add_argument("--name", help="run name used for output files (default: run)")
    p.add_argument("--mesh", help="mesh as RxC, rows x cols (default: 6x6)")
    p.add_argument("--core", type=int, help="core side length c, odd (default: 5)")
    p.add_argument("--distance", type=int, help="code distance d (default: 3)")
    if circuit:
        g = p.add_argument_group("circuit source")
        g.add_argument("--circuit", help="circuit file (line format or OpenQASM 2 subset)")
        g.add_argument("--qubits", type=int, help="random circuit: number of qubits (default: 468)")
        g.add_argument("--gates", type=int, help="random circuit: number of gates (default: 10000)")
        g.add_argument("--mix", help="random circuit mix: '60/40', 'uniform' or 'clustered:80/20,20/80'")
        g.add_argument("--circuit-seed", type=int, help="random circuit seed (default: 0)")
        g.add_argument("--adder", type=int, metavar="BITS", help="use a BITS-wide ripple-carry adder")
    if run:
        p.add_argument("--strategy", choices=[s.value for s in Strategy], help="mapping strategy (default: part-qapfa)")
        p.add_argument("--seeds", help="comma-separated seeds (default: 0,1,2,3,4)")
        p.add_argument("--epr-per-hop", type=int, help="EPR pairs per inter-core or factory hop (default: d^2)")
        p.add_argument("--distill-latency", type=int, help="magic-state distillation latency in cycles (default: d)")
        p.add_argument("--t-correction", choices=["prob", "always", "never"], help="T-gate S-correction model (default: prob)")
        p.add_argument("--partition-file", help="qubit-to-core partition, one core index per line")
        p.add_argument("--jobs", type=int, help="worker processes for compare (default: 1)")
    p.add_argument("--out", help="output directory (default: out)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lsmesh", description="Map and schedule lattice-surgery circuits on a mesh of cores.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    _common(sub.add_parser("gen", help="write a generated circuit to a file"), run=False)
    _common(sub.add_parser("map", help="compute and export a mapping"))
    _common(sub.add_parser("run", help="map, schedule and report one strategy"))
    _common(sub.add_parser("compare", help="all three strategies over several seeds"))
    _common(sub.add_parser("counts", help="print structural counts of an architecture"), circuit=False, run=False)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file {path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
        unknown = set(data) - set(cfg.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for k, v in data.items():
            setattr(cfg, k, v)
    for key in ("name", "mesh", "core", "distance", "strategy", "out", "partition_file", "jobs"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if getattr(args, "seeds", None):
        try:
            cfg.seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"--seeds must be comma-separated integers, got {args.seeds!r}") from None
    cm = dict(cfg.cost_model)
    for flag, key in (("epr_per_hop", "epr_per_hop"), ("distill_latency", "distill_latency"),
                      ("t_correction", "t_gate_correction")):
        v = getattr(args, flag, None)
        if v is not None:
            cm[key] = v
    cfg.cost_model = cm

    if getattr(args, "circuit", None):
        cfg.circuit = {"file": args.circuit}
    elif getattr(args, "adder", None) is not None:
        cfg.circuit = {"generator": "cuccaro", "bits": args.adder}
    else:
        overrides = {k: getattr(args, a, None) for k, a in
                     (("num_qubits", "qubits"), ("num_gates", "gates"), ("mix", "mix"), ("seed", "circuit_seed"))}
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if overrides:
            base = cfg.circuit if cfg.circuit.get("generator") == "random" else RunConfig().circuit
            cfg.circuit = {**base, **overrides}
    if cfg.partition_file and not Path(cfg.partition_file).exists():
        raise UsageError(f"partition file {cfg.partition_file} does not exist")
    return cfg


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_config(cfg: RunConfig, out: Path):
    (out / f"{cfg.name}.config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")


def cmd_counts(cfg: RunConfig) -> int:
    spec = cfg.arch()
    counts = structural_counts(spec)
    measured = measured_counts(build_network(spec))
    for k, v in counts.items():
        print(f"{k}={v}")
    mismatch = [k for k, v in measured.items() if counts[k] != v]
    if mismatch:
        print(f"warning: closed form disagrees with enumeration on {', '.join(mismatch)}", file=sys.stderr)
    return 0


def cmd_gen(cfg: RunConfig) -> int:
    circ = cfg.load_circuit()
    out = _outdir(cfg)
    path = out / f"{cfg.name}.circuit.txt"
    path.write_text(circ.to_text())
    cfg.circuit = {"file": str(path)}
    _write_config(cfg, out)
    print(f"wrote {path} ({circ.num_qubits} qubits, {len(circ)} gates)")
    return 0


def _partition(cfg: RunConfig):
    return load_partition(cfg.partition_file) if cfg.partition_file else None


def cmd_map(cfg: RunConfig) -> int:
    spec, circ = cfg.arch(), cfg.load_circuit()
    mapping = map_circuit(circ, spec, cfg.strategy, seed=cfg.seeds[0], partition=_partition(cfg))
    out = _outdir(cfg)
    (out / f"{cfg.name}.mapping.json").write_text(mapping.to_json() + "\n")
    save_partition(out / f"{cfg.name}.partition.txt", mapping.core_of_qubit)
    _write_config(cfg, out)
    print(f"wrote {out / (cfg.name + '.mapping.json')}")
    return 0


def cmd_run(cfg: RunConfig) -> int:
    spec, circ = cfg.arch(), cfg.load_circuit()
    net = build_network(spec)
    seed = cfg.seeds[0]
    mapping = map_circuit(circ, spec, cfg.strategy, seed=seed, partition=_partition(cfg), net=net)
    sched, report = schedule(circ, mapping, net, seed=seed)
    check = validate_schedule(sched, circ, mapping, net, report)
    if not check:
        print(f"internal error: schedule failed validation check {check.check}: {check.message}", file=sys.stderr)
        return 3
    out = _outdir(cfg)
    base = out / cfg.name
    for fmt, ext in (("json", "report.json"), ("csv", "report.csv"), ("markdown", "report.md")):
        emit(report, fmt, f"{base}.{ext}")
    Path(f"{base}.schedule.jsonl").write_text(sched.to_jsonl())
    Path(f"{base}.mapping.json").write_text(mapping.to_json() + "\n")
    _write_config(cfg, out)
    print(f"{describe(spec, circ)} | {cfg.strategy} | seed {seed}")
    for k in ("executed_gates", "epr_pairs", "magic_state_travel", "cycles", "traffic_bits"):
        print(f"{k}={getattr(report, k)}")
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    spec, circ = cfg.arch(), cfg.load_circuit()
    if not cfg.seeds:
        raise UsageError("at least one seed required")
    table = compare_strategies(circ, spec, cfg.seeds, partition=_partition(cfg), jobs=cfg.jobs)
    out = _outdir(cfg)
    base = out / cfg.name
    emit(table, "json", f"{base}.report.json")
    emit(table, "csv", f"{base}.csv")
    emit(table, "markdown", f"{base}.md")
    _write_config(cfg, out)
    emit(table, "markdown", sys.stdout)
    return 0


COMMANDS = {"counts": cmd_counts, "gen": cmd_gen, "map": cmd_map, "run": cmd_run, "compare": cmd_compare}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand; choose one of " + ", ".join(COMMANDS))
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CapacityError, InfeasiblePartition) as exc:
        print(f"error: infeasible input: {exc}", file=sys.stderr)
        return 2
    except (CircuitError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
