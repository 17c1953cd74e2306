"""Lattice-surgery list scheduler over the ancilla network.

Gates are issued in program order. Each patch carries a scalar
``next_free`` cycle; an operation on a set of patches starts no earlier than
all of their ``next_free`` values and no gap before it is ever backfilled.

Routing uses a time-dependent Dijkstra: the label of a node is the cycle at
which a state hopping into it lands there,
``label(v) = max(label(u), next_free(v)) + d``. Arrival times are FIFO in
departure time, so the first target popped is optimal.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit
from .mapping import Mapping
from .topology import FACTORY, PatchNetwork

JOINT_KINDS = ("JointZZ", "JointXX", "JointZX")
HOP_KINDS = ("TeleportHop", "InterCoreHop", "FactoryInject")
OP_KINDS = JOINT_KINDS + HOP_KINDS + ("PauliFrame",)


class RouteError(RuntimeError):
    """No ancilla path between the requested endpoints."""


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class ScheduledOp:
    kind: str
    patches: tuple[int, ...]
    gate_seq: int
    start: int
    end: int
    holder: str | None = None  # "magic" or "routing" on hops

    def to_dict(self) -> dict:
        return {"kind": self.kind, "patches": list(self.patches), "gate_seq": self.gate_seq,
                "start": self.start, "end": self.end, "holder": self.holder}


@dataclass
class Schedule:
    ops: list[ScheduledOp] = field(default_factory=list)

    @property
    def makespan(self) -> int:
        return max((op.end for op in self.ops), default=0)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(op.to_dict()) + "\n" for op in self.ops)

    @classmethod
    def from_jsonl(cls, text: str) -> "Schedule":
        ops = []
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                ops.append(ScheduledOp(d["kind"], tuple(d["patches"]), d["gate_seq"], d["start"],
                                       d["end"], d.get("holder")))
        return cls(ops)


@dataclass
class ResourceReport:
    executed_gates: int = 0
    epr_pairs: int = 0
    magic_state_travel: int = 0
    cycles: int = 0
    traffic_bits: int = 0
    breakdown: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceReport":
        return cls(**d)


@dataclass
class PatchState:
    next_free: list[int]
    holder: list[tuple[str, int] | None]

    @classmethod
    def empty(cls, num_nodes: int) -> "PatchState":
        return cls([0] * num_nodes, [None] * num_nodes)


@dataclass(frozen=True)
class Route:
    path: tuple[int, ...]  # source first, target last
    times: tuple[int, ...]  # times[k] = cycle the state is available at path[k]

    @property
    def arrival(self) -> int:
        return self.times[-1]

    @property
    def hops(self) -> int:
        return len(self.path) - 1


def earliest_route(adj: Sequence[Sequence[int]], next_free: Sequence[int], starts: dict[int, int],
                   targets: Iterable[int], hop: int) -> Route:
    """Multi-source time-dependent Dijkstra.

    ``starts`` maps each source node to the cycle its state is ready there.
    Ties on arrival go to the smallest node id.
    """
    targets = set(targets)
    inf = float("inf")
    best: dict[int, int] = {}
    pred: dict[int, int] = {}
    done: set[int] = set()
    heap = []
    for v, t in starts.items():
        if t < best.get(v, inf):
            best[v] = t
    heap = [(t, v) for v, t in best.items()]
    heapq.heapify(heap)
    while heap:
        t, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v in targets:
            path = [v]
            while path[-1] in pred:
                path.append(pred[path[-1]])
            path.reverse()
            return Route(tuple(path), tuple(best[u] for u in path))
        for u in adj[v]:
            if u in done:
                continue
            nf = next_free[u]
            nt = (t if t > nf else nf) + hop
            if nt < best.get(u, inf):
                best[u] = nt
                pred[u] = v
                heapq.heappush(heap, (nt, u))
    raise RouteError(f"no ancilla route from {sorted(starts)} to {sorted(targets)}")


def find_route(network, state: PatchState, sources: Iterable[int], targets: Iterable[int],
               depart_after: int = 0) -> Route:
    """Earliest-arrival route from any source ancilla to any target ancilla.

    A source's state is ready at ``max(depart_after, next_free(source))``.
    ``network`` needs ``ancilla_adj`` and ``hop_cycles``; the state is not mutated.
    """
    sources = list(sources)
    targets = list(targets)
    if not sources or not targets:
        raise ValueError("sources and targets must be nonempty")
    nf = state.next_free
    starts = {s: max(depart_after, nf[s]) for s in sources}
    return earliest_route(network.ancilla_adj, nf, starts, targets, network.hop_cycles)


class _Run:
    def __init__(self, network: PatchNetwork, mapping: Mapping, seed: int):
        self.net = network
        self.spec = network.spec
        self.cm = network.spec.cost_model
        self.d = network.spec.code_distance
        self.state = PatchState.empty(network.num_nodes)
        self.patch_of = mapping.patch_of_qubit
        self.ops: list[ScheduledOp] = []
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.t_corrections = 0

    def emit(self, kind, patches, seq, start, end, holder=None):
        self.ops.append(ScheduledOp(kind, tuple(patches), seq, start, end, holder))

    def hop_kind(self, a: int, b: int) -> str:
        if a == FACTORY:
            return "FactoryInject"
        core = self.net.core_of_patch
        return "InterCoreHop" if core[a] != core[b] else "TeleportHop"

    def emit_chain(self, route: Route, seq: int, holder: str):
        """Hops along ``route``; each intermediate node stays held until its outgoing hop ends."""
        nf = self.state.next_free
        for k in range(route.hops):
            a, b = route.path[k], route.path[k + 1]
            end = route.times[k + 1]
            kind = self.hop_kind(a, b)
            patches = (b,) if kind == "FactoryInject" else (a, b)
            self.emit(kind, patches, seq, end - self.d, end, holder)
            if a != FACTORY:
                nf[a] = end
            self.state.holder[b] = (holder, seq)

    def pauli(self, seq: int, q: int):
        dp = self.patch_of[q]
        t = self.state.next_free[dp]
        self.emit("PauliFrame", (dp,), seq, t, t)

    def hadamard(self, seq: int, q: int):
        nf = self.state.next_free
        dp = self.patch_of[q]
        start, a = min((max(nf[dp], nf[a]), a) for a in self.net.adjacent_ancillas[dp])
        end = start + self.d
        self.emit("JointZX", (dp, a), seq, start, end)
        nf[dp] = nf[a] = end
        self.state.holder[a] = None

    def magic(self, seq: int, q: int):
        """Distill, route and consume one magic state at an ancilla next to ``q``."""
        nf = self.state.next_free
        dp = self.patch_of[q]
        ready = nf[dp] + self.cm.distill_latency
        route = earliest_route(self.net.ancilla_adj, nf, {FACTORY: ready},
                               self.net.adjacent_ancillas[dp], self.d)
        self.emit_chain(route, seq, "magic")
        a = route.path[-1]
        start = max(route.arrival, nf[dp])
        end = start + self.d
        self.emit("JointZZ", (dp, a), seq, start, end)
        nf[dp] = nf[a] = end
        self.state.holder[a] = None

    def t_gate(self, seq: int, q: int):
        self.magic(seq, q)
        mode = self.cm.t_gate_correction
        if mode == "always" or (mode == "prob" and self.rng.random() < self.cm.t_correction_probability):
            self.t_corrections += 1
            self.magic(seq, q)

    def cnot(self, seq: int, c: int, t: int):
        nf = self.state.next_free
        d = self.d
        dc, dt = self.patch_of[c], self.patch_of[t]
        starts = {a: max(nf[dc], nf[a]) + d for a in self.net.adjacent_ancillas[dc]}
        route = earliest_route(self.net.ancilla_adj, nf, starts, self.net.adjacent_ancillas[dt], d)
        a1, a2 = route.path[0], route.path[-1]
        xx_start = max(route.arrival, nf[dt])
        # the joint-Z measurement ends exactly when the ancilla state departs
        zz_end = route.times[1] - d if route.hops else xx_start
        self.emit("JointZZ", (dc, a1), seq, zz_end - d, zz_end)
        self.emit_chain(route, seq, "routing")
        xx_end = xx_start + d
        self.emit("JointXX", (a2, dt), seq, xx_start, xx_end)
        nf[dc] = nf[dt] = nf[a2] = xx_end
        if not route.hops:
            nf[a1] = xx_end
        self.state.holder[a2] = None


def schedule(circuit: Circuit, mapping: Mapping, network: PatchNetwork, seed: int = 0) -> tuple[Schedule, ResourceReport]:
    """List-schedule ``circuit`` under ``mapping``; returns the schedule and its resource ledger."""
    if len(mapping.patch_of_qubit) < circuit.num_qubits:
        raise ScheduleError(
            f"mapping covers {len(mapping.patch_of_qubit)} qubits, circuit has {circuit.num_qubits}")
    data = set(network.data_patches)
    bad = [q for q, p in enumerate(mapping.patch_of_qubit) if p not in data]
    if bad:
        raise ScheduleError(f"qubit {bad[0]} is mapped to non-data patch {mapping.patch_of_qubit[bad[0]]}")
    if len(set(mapping.patch_of_qubit)) != len(mapping.patch_of_qubit):
        raise ScheduleError("two qubits share a data patch")

    run = _Run(network, mapping, seed)
    for g in circuit.gates:
        if g.kind == "cnot":
            run.cnot(g.seq, *g.qubits)
        elif g.kind == "h":
            run.hadamard(g.seq, g.qubits[0])
        elif g.kind == "s":
            run.magic(g.seq, g.qubits[0])
        elif g.kind == "t":
            run.t_gate(g.seq, g.qubits[0])
        else:
            run.pauli(g.seq, g.qubits[0])
    sched = Schedule(run.ops)
    report = summarize(sched, network)
    report.breakdown["logical_gates"] = len(circuit.gates)
    report.breakdown["t_corrections"] = run.t_corrections
    return sched, report


def summarize(sched: Schedule, network: PatchNetwork) -> ResourceReport:
    """Resource ledger recomputed from the operation list alone."""
    cm = network.spec.cost_model
    core = network.core_of_patch
    kinds = Counter(op.kind for op in sched.ops)
    cross_joints = sum(1 for op in sched.ops if op.kind in JOINT_KINDS and core[op.patches[0]] != core[op.patches[1]])
    epr_events = kinds["InterCoreHop"] + (kinds["FactoryInject"] if cm.factory_inject_epr else 0)
    traffic_events = kinds["InterCoreHop"] + kinds["FactoryInject"] + cross_joints
    breakdown = {k: kinds.get(k, 0) for k in OP_KINDS}
    breakdown["magic_hops"] = sum(1 for op in sched.ops if op.holder == "magic")
    breakdown["routing_hops"] = sum(1 for op in sched.ops if op.holder == "routing")
    return ResourceReport(
        executed_gates=sum(n for k, n in kinds.items() if k != "PauliFrame"),
        epr_pairs=epr_events * cm.epr_per_hop,
        magic_state_travel=breakdown["magic_hops"],
        cycles=sched.makespan,
        traffic_bits=traffic_events * (cm.meas_bits_per_intercore_op + cm.instr_bits_per_intercore_op),
        breakdown=breakdown,
    )


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    check: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(check: int, message: str) -> ValidityReport:
    return ValidityReport(False, check, message)


def validate_schedule(sched: Schedule, circuit: Circuit, mapping: Mapping, network: PatchNetwork,
                      report: ResourceReport | None = None) -> ValidityReport:
    """Check a schedule against the circuit, mapping and network; never raises.

    Checks, in order: (1) per-patch interval disjointness, (2) per-qubit
    program order, (3) CNOT joint/hop sequencing, (4) hop chains follow the
    ancilla graph, (5) resource ledger identities.
    """
    try:
        return _validate(sched, circuit, mapping, network, report)
    except Exception as exc:  # malformed input is a failed validation, not a crash
        return _fail(0, f"malformed schedule: {exc!r}")


def _validate(sched, circuit, mapping, network, report) -> ValidityReport:
    by_patch: dict[int, list[ScheduledOp]] = {}
    for op in sched.ops:
        if op.kind not in OP_KINDS:
            return _fail(1, f"unknown op kind {op.kind!r}")
        if op.end < op.start:
            return _fail(1, f"op ends before it starts: {op}")
        if op.end > op.start:
            for p in op.patches:
                by_patch.setdefault(p, []).append(op)
    for p, ops in by_patch.items():
        ops.sort(key=lambda o: (o.start, o.end))
        for x, y in zip(ops, ops[1:]):
            if y.start < x.end:
                return _fail(1, f"patch {p}: {x.kind}[{x.start},{x.end}) overlaps {y.kind}[{y.start},{y.end})")

    per_gate: dict[int, list[ScheduledOp]] = {}
    for op in sched.ops:
        per_gate.setdefault(op.gate_seq, []).append(op)

    # (2) program order on every qubit
    ready = {}
    for g in circuit.gates:
        ops = per_gate.get(g.seq)
        if not ops:
            return _fail(2, f"gate {g.seq} ({g.kind}) has no scheduled ops")
        closing = [o.end for o in ops if o.kind in JOINT_KINDS or o.kind == "PauliFrame"]
        if not closing:
            return _fail(2, f"gate {g.seq} has no joint measurement")
        gate_end = max(closing)
        for q in g.qubits:
            dp = mapping.patch_of_qubit[q]
            touching = [o.start for o in ops if dp in o.patches]
            if not touching:
                return _fail(2, f"gate {g.seq} never touches qubit {q}")
            if min(touching) < ready.get(q, 0):
                return _fail(2, f"gate {g.seq} starts on qubit {q} at {min(touching)} before its predecessor ends at {ready[q]}")
            ready[q] = gate_end

    # (3) + (4) per-gate sequencing and hop chains
    for g in circuit.gates:
        ops = per_gate[g.seq]
        if g.kind == "cnot":
            bad = _check_cnot(ops, network)
        elif g.kind in ("s", "t"):
            bad = _check_magic(ops, network)
        else:
            bad = None
        if bad is not None:
            return bad

    # (5) ledger
    ledger = summarize(sched, network)
    cm = network.spec.cost_model
    k = ledger.breakdown
    epr_events = k["InterCoreHop"] + (k["FactoryInject"] if cm.factory_inject_epr else 0)
    if ledger.epr_pairs != cm.epr_per_hop * epr_events:
        return _fail(5, "epr_pairs identity violated")
    if ledger.executed_gates != len(sched.ops) - k["PauliFrame"]:
        return _fail(5, "executed_gates identity violated")
    if report is not None:
        for name in ("executed_gates", "epr_pairs", "magic_state_travel", "cycles", "traffic_bits"):
            if getattr(report, name) != getattr(ledger, name):
                return _fail(5, f"report {name}={getattr(report, name)} but schedule implies {getattr(ledger, name)}")
    return ValidityReport(True)


def _check_chain(hops: list[ScheduledOp], start: int | None, end: int, network: PatchNetwork) -> ValidityReport | None:
    """``start`` is the ancilla the chain leaves (None when it leaves the factory)."""
    core = network.core_of_patch
    at = start
    for h in hops:
        if h.kind == "FactoryInject":
            if at is not None or h.patches[0] not in network.factory_ports:
                return _fail(4, f"factory injection into non-port {h.patches}")
            at = h.patches[0]
            continue
        a, b = h.patches
        if a != at:
            return _fail(4, f"hop {a}->{b} does not continue from {at}")
        if not network.is_edge(a, b):
            return _fail(4, f"hop {a}->{b} is not an ancilla-graph edge")
        if (h.kind == "InterCoreHop") != (core[a] != core[b]):
            return _fail(4, f"hop {a}->{b} mislabelled {h.kind}")
        at = b
    if at != end:
        return _fail(4, f"hop chain ends at {at}, joint measurement uses {end}")
    for x, y in zip(hops, hops[1:]):
        if y.start < x.end:
            return _fail(3, f"hop into {y.patches[-1]} starts before previous hop ends")
    return None


def _check_cnot(ops: list[ScheduledOp], network: PatchNetwork) -> ValidityReport | None:
    zz = [o for o in ops if o.kind == "JointZZ"]
    xx = [o for o in ops if o.kind == "JointXX"]
    hops = [o for o in ops if o.kind in HOP_KINDS]
    if len(zz) != 1 or len(xx) != 1:
        return _fail(3, f"CNOT {ops[0].gate_seq} needs one JointZZ and one JointXX")
    zz, xx = zz[0], xx[0]
    first = hops[0].start if hops else xx.start
    if zz.end != first:
        return _fail(3, f"CNOT {zz.gate_seq}: JointZZ ends at {zz.end}, routing departs at {first}")
    if hops and hops[-1].end > xx.start:
        return _fail(3, f"CNOT {zz.gate_seq}: JointXX starts before the ancilla arrives")
    return _check_chain(hops, zz.patches[1], xx.patches[0], network)


def _check_magic(ops: list[ScheduledOp], network: PatchNetwork) -> ValidityReport | None:
    chain: list[ScheduledOp] = []
    for o in ops:
        if o.kind in HOP_KINDS:
            chain.append(o)
        elif o.kind == "JointZZ":
            if not chain or chain[0].kind != "FactoryInject":
                return _fail(4, f"gate {o.gate_seq}: magic state does not come from the factory")
            if chain[-1].end > o.start:
                return _fail(3, f"gate {o.gate_seq}: state consumed before it arrives")
            bad = _check_chain(chain, None, o.patches[1], network)
            if bad is not None:
                return bad
            chain = []
    return None
