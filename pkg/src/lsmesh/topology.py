"""Mesh-of-cores patch network, ancilla routing graph and mesh distances.

Every core is a ``c x c`` checkerboard of surface-code patches. Cells with
even ``row + col`` hold logical data qubits (so all four corners are data);
odd cells are logical ancillas. The magic-state factory sits west of mesh
column 0 and is wired to the west-edge ancillas of every column-0 core.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

FACTORY = 0  # node id of the magic-state factory


@dataclass(frozen=True)
class CostModel:
    """Resource accounting knobs. ``None`` means "derive from code distance"."""

    epr_per_hop: int | None = None  # default d**2
    distill_latency: int | None = None  # default d
    meas_bits_per_intercore_op: int | None = None  # default 2 * d**2
    instr_bits_per_intercore_op: int = 32
    t_gate_correction: Literal["prob", "always", "never"] = "prob"
    t_correction_probability: float = 0.5
    factory_inject_epr: bool = True

    def resolved(self, d: int) -> "CostModel":
        return CostModel(
            epr_per_hop=d * d if self.epr_per_hop is None else self.epr_per_hop,
            distill_latency=d if self.distill_latency is None else self.distill_latency,
            meas_bits_per_intercore_op=(
                2 * d * d if self.meas_bits_per_intercore_op is None else self.meas_bits_per_intercore_op
            ),
            instr_bits_per_intercore_op=self.instr_bits_per_intercore_op,
            t_gate_correction=self.t_gate_correction,
            t_correction_probability=self.t_correction_probability,
            factory_inject_epr=self.factory_inject_epr,
        )


@dataclass(frozen=True)
class ArchSpec:
    mesh_rows: int
    mesh_cols: int
    core_size: int
    code_distance: int = 3
    cost_model: CostModel = field(default_factory=CostModel)

    def __post_init__(self):
        if self.mesh_rows < 1 or self.mesh_cols < 1:
            raise ValueError("mesh must have at least one core")
        if self.core_size < 3 or self.core_size % 2 == 0:
            raise ValueError(f"core_size must be odd and >= 3, got {self.core_size}")
        if self.code_distance < 1:
            raise ValueError("code_distance must be >= 1")
        cm = self.cost_model.resolved(self.code_distance)
        for name in ("epr_per_hop", "distill_latency", "meas_bits_per_intercore_op",
                     "instr_bits_per_intercore_op"):
            if getattr(cm, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 <= cm.t_correction_probability <= 1.0:
            raise ValueError("t_correction_probability must lie in [0, 1]")
        if cm.t_gate_correction not in ("prob", "always", "never"):
            raise ValueError(f"unknown t_gate_correction {cm.t_gate_correction!r}")
        object.__setattr__(self, "cost_model", cm)

    @property
    def num_cores(self) -> int:
        return self.mesh_rows * self.mesh_cols

    @property
    def data_per_core(self) -> int:
        return (self.core_size ** 2 + 1) // 2

    @property
    def capacity(self) -> int:
        return self.num_cores * self.data_per_core

    def core_coord(self, core: int) -> tuple[int, int]:
        """Mesh (row, col) of row-major core index ``core``."""
        return divmod(core, self.mesh_cols)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ArchSpec":
        d = dict(d)
        cm = CostModel(**d.pop("cost_model", {}))
        return cls(cost_model=cm, **d)


@dataclass(frozen=True)
class Patch:
    id: int
    core: tuple[int, int]
    local: tuple[int, int]
    kind: Literal["data", "ancilla"]
    edge_ancilla: bool


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    kind: Literal["data_adjacent", "intra_diagonal", "inter_core", "factory"]


class PatchNetwork:
    """Patch graph for one ArchSpec. Treat as immutable once built."""

    def __init__(self, spec: ArchSpec, patches: list[Patch], edges: list[Edge]):
        self.spec = spec
        self.patches = patches  # index i holds patch id i + 1
        self.edges = edges
        n = len(patches) + 1
        self.num_nodes = n
        self.factory_ports = sorted(e.b for e in edges if e.kind == "factory")
        # ancilla routing graph; the factory is source-only (no incoming arcs)
        adj: list[list[int]] = [[] for _ in range(n)]
        data_adj: list[list[int]] = [[] for _ in range(n)]
        for e in edges:
            if e.kind == "data_adjacent":
                data_adj[e.a].append(e.b)
                data_adj[e.b].append(e.a)
            elif e.kind == "factory":
                adj[FACTORY].append(e.b)
            else:
                adj[e.a].append(e.b)
                adj[e.b].append(e.a)
        self.ancilla_adj = [tuple(sorted(x)) for x in adj]
        self.adjacent_ancillas = [tuple(sorted(x)) for x in data_adj]
        self.hop_cycles = spec.code_distance
        self.core_of_patch = [-1] + [p.core[0] * spec.mesh_cols + p.core[1] for p in patches]

    def patch(self, pid: int) -> Patch:
        return self.patches[pid - 1]

    def patch_id(self, core: int, r: int, q: int) -> int:
        c = self.spec.core_size
        return 1 + core * c * c + r * c + q

    @cached_property
    def data_patches(self) -> list[int]:
        return [p.id for p in self.patches if p.kind == "data"]

    @cached_property
    def ancilla_patches(self) -> list[int]:
        return [p.id for p in self.patches if p.kind == "ancilla"]

    def data_patches_of_core(self, core: int) -> list[int]:
        c = self.spec.core_size
        return [self.patch_id(core, r, q) for r in range(c) for q in range(c) if (r + q) % 2 == 0]

    def is_edge(self, a: int, b: int) -> bool:
        """Arc a -> b of the ancilla routing graph."""
        return b in self.ancilla_adj[a]

    def to_json(self) -> str:
        nodes = [{"id": FACTORY, "kind": "factory"}] + [
            {"id": p.id, "core": list(p.core), "local": list(p.local), "kind": p.kind,
             "edge_ancilla": p.edge_ancilla}
            for p in self.patches
        ]
        edges = [{"a": e.a, "b": e.b, "kind": e.kind} for e in self.edges]
        return json.dumps({"nodes": nodes, "edges": edges}, indent=1)


def build_network(spec: ArchSpec) -> PatchNetwork:
    c = spec.core_size
    rows, cols = spec.mesh_rows, spec.mesh_cols
    patches: list[Patch] = []
    edges: list[Edge] = []

    def pid(core_r: int, core_c: int, r: int, q: int) -> int:
        return 1 + (core_r * cols + core_c) * c * c + r * c + q

    for cr in range(rows):
        for cc in range(cols):
            for r in range(c):
                for q in range(c):
                    anc = (r + q) % 2 == 1
                    on_edge = r in (0, c - 1) or q in (0, c - 1)
                    patches.append(Patch(pid(cr, cc, r, q), (cr, cc), (r, q),
                                         "ancilla" if anc else "data", anc and on_edge))
            for r in range(c):
                for q in range(c):
                    me = pid(cr, cc, r, q)
                    if q + 1 < c:
                        edges.append(Edge(me, pid(cr, cc, r, q + 1), "data_adjacent"))
                    if r + 1 < c:
                        edges.append(Edge(me, pid(cr, cc, r + 1, q), "data_adjacent"))
                    if (r + q) % 2 == 1 and r + 1 < c:
                        if q + 1 < c:
                            edges.append(Edge(me, pid(cr, cc, r + 1, q + 1), "intra_diagonal"))
                        if q >= 1:
                            edges.append(Edge(me, pid(cr, cc, r + 1, q - 1), "intra_diagonal"))
            # facing edge ancillas sit at odd positions along every side
            for k in range(1, c, 2):
                if cc + 1 < cols:
                    edges.append(Edge(pid(cr, cc, k, c - 1), pid(cr, cc + 1, k, 0), "inter_core"))
                if cr + 1 < rows:
                    edges.append(Edge(pid(cr, cc, c - 1, k), pid(cr + 1, cc, 0, k), "inter_core"))
                if cc == 0:
                    edges.append(Edge(FACTORY, pid(cr, 0, k, 0), "factory"))
    return PatchNetwork(spec, patches, edges)


def structural_counts(spec: ArchSpec) -> dict[str, int]:
    """Closed-form structure counts.

    ``inter_core_plus_factory_edges`` uses rows*(cols-1) + (rows-1)*cols
    boundaries plus ``rows`` factory sides; ``paper_inter_core_plus_factory_edges``
    evaluates (mx*my + mx*(my-1)) * (c-1)/2 with mx = cols, my = rows.
    """
    c, rows, cols = spec.core_size, spec.mesh_rows, spec.mesh_cols
    side = (c - 1) // 2
    boundaries = rows * (cols - 1) + (rows - 1) * cols + rows
    mx, my = cols, rows
    return {
        "data_per_core": (c * c + 1) // 2,
        "ancilla_per_core": (c * c - 1) // 2,
        "edge_ancilla_per_side": side,
        "edge_ancilla_per_core": 2 * c - 2,
        "intra_core_edges": 2 * c * (c - 1) + (c - 1) ** 2,
        "inter_core_plus_factory_edges": boundaries * side,
        "paper_inter_core_plus_factory_edges": (mx * my + mx * (my - 1)) * side,
        "factory_adjacent_cores": rows,
        "total_qubits": rows * cols * (c * c + 1) // 2,  # logical data qubits
        "total_patches": rows * cols * c * c,
    }


def measured_counts(net: PatchNetwork) -> dict[str, int]:
    """The same record as structural_counts, measured on a built network."""
    spec = net.spec
    c = spec.core_size
    per_core: dict[tuple[int, int], dict[str, int]] = {}
    for p in net.patches:
        rec = per_core.setdefault(p.core, {"data": 0, "ancilla": 0, "edge": 0, "west": 0})
        rec[p.kind] += 1
        rec["edge"] += p.edge_ancilla
        rec["west"] += p.edge_ancilla and p.local[1] == 0
    kinds: dict[str, int] = {}
    for e in net.edges:
        kinds[e.kind] = kinds.get(e.kind, 0) + 1
    first = per_core[(0, 0)]
    intra = (kinds.get("data_adjacent", 0) + kinds.get("intra_diagonal", 0)) // spec.num_cores
    return {
        "data_per_core": first["data"],
        "ancilla_per_core": first["ancilla"],
        "edge_ancilla_per_side": first["west"],
        "edge_ancilla_per_core": first["edge"],
        "intra_core_edges": intra,
        "inter_core_plus_factory_edges": kinds.get("inter_core", 0) + kinds.get("factory", 0),
        "factory_adjacent_cores": len({net.patch(p).core for p in net.factory_ports}),
        "total_qubits": len(net.data_patches),
        "total_patches": len(net.patches),
    }


@dataclass(frozen=True)
class DistanceMatrix:
    dist: np.ndarray  # (n_sites, n_sites), site 0 = factory

    @property
    def n_sites(self) -> int:
        return self.dist.shape[0]


def mesh_distances(spec: ArchSpec) -> DistanceMatrix:
    """Manhattan distances between mesh sites; site ``k + 1`` is core ``k``.

    The factory is a virtual column west of column 0, so its distance to a
    core is ``1 + col``.
    """
    n = spec.num_cores
    rc = np.array([spec.core_coord(k) for k in range(n)]).reshape(n, 2)
    dist = np.zeros((n + 1, n + 1), dtype=np.int64)
    dist[1:, 1:] = np.abs(rc[:, None, :] - rc[None, :, :]).sum(axis=2)
    dist[0, 1:] = dist[1:, 0] = 1 + rc[:, 1]
    return DistanceMatrix(dist)
