"""Three-stage mapping: qubits to cores, cores to mesh sites, qubits to patches."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from ..circuit import Circuit
from ..topology import ArchSpec, DistanceMatrix, PatchNetwork, build_network, mesh_distances
from .partition import InfeasiblePartition, partition_graph
from .qap import TabuParams, qap_objective, solve_qapfa_exact, solve_qapfa_tabu

EXACT_CORE_LIMIT = 10  # exact QAPFA below this many cores, tabu search otherwise


class Strategy(str, Enum):
    RANDOM = "random"
    PARTITION = "part"
    PARTITION_QAPFA = "part-qapfa"


class CapacityError(ValueError):
    """The circuit does not fit the architecture."""


@dataclass
class InteractionProfile:
    num_qubits: int
    cnot_weight: dict[tuple[int, int], int] = field(default_factory=dict)  # keys (i, j), i < j
    magic_weight: np.ndarray = None

    def __post_init__(self):
        if self.magic_weight is None:
            self.magic_weight = np.zeros(self.num_qubits)

    def matrix(self) -> np.ndarray:
        w = np.zeros((self.num_qubits, self.num_qubits))
        for (i, j), c in self.cnot_weight.items():
            w[i, j] = w[j, i] = c
        return w

    @property
    def total_cnots(self) -> int:
        return sum(self.cnot_weight.values())


def build_interaction_profile(circuit: Circuit, weight_constant: float = 1.0) -> InteractionProfile:
    """CNOT multiplicities per qubit pair; S adds w and T adds 1.5 w to the qubit."""
    prof = InteractionProfile(circuit.num_qubits)
    for g in circuit.gates:
        if g.kind == "cnot":
            key = (min(g.qubits), max(g.qubits))
            prof.cnot_weight[key] = prof.cnot_weight.get(key, 0) + 1
        elif g.kind == "s":
            prof.magic_weight[g.qubits[0]] += weight_constant
        elif g.kind == "t":
            prof.magic_weight[g.qubits[0]] += 1.5 * weight_constant
    return prof


def partition_qubits(
    profile: InteractionProfile,
    num_cores: int,
    capacity: int,
    seed: int = 0,
    starts: int = 4,
) -> list[int]:
    """Balanced min-cut assignment of qubits to ``num_cores`` parts."""
    n = profile.num_qubits
    if n > num_cores * capacity:
        raise CapacityError(f"{n} qubits need more than {num_cores} cores x {capacity} data patches")
    if n == 0:
        return []
    return partition_graph(profile.matrix(), num_cores, seed=seed, starts=starts)


def build_flow_matrix(core_of_qubit: Sequence[int], profile: InteractionProfile, num_cores: int) -> np.ndarray:
    """Facility 0 is the factory, facility ``k + 1`` is core ``k``."""
    flow = np.zeros((num_cores + 1, num_cores + 1))
    for (i, j), c in profile.cnot_weight.items():
        a, b = core_of_qubit[i], core_of_qubit[j]
        if a != b:
            flow[a + 1, b + 1] += c
            flow[b + 1, a + 1] += c
    for q, w in enumerate(profile.magic_weight):
        flow[0, core_of_qubit[q] + 1] += w
    flow[1:, 0] = flow[0, 1:]
    return flow


def _patches_by_msf_distance(net: PatchNetwork, mesh_core: int) -> list[int]:
    # distance to the west side is the local column; ties row-major
    pids = net.data_patches_of_core(mesh_core)
    return sorted(pids, key=lambda p: (net.patch(p).local[1], net.patch(p).local[0]))


def place_qubits_in_core(
    core_of_qubit: Sequence[int],
    magic_weight: Sequence[float],
    spec: ArchSpec,
    site_of_core: Sequence[int],
    net: PatchNetwork | None = None,
) -> list[int]:
    """Heaviest magic-state consumers take the westmost data patches of their core."""
    net = net or build_network(spec)
    members: dict[int, list[int]] = {}
    for q, k in enumerate(core_of_qubit):
        members.setdefault(k, []).append(q)
    patch_of_qubit = [0] * len(core_of_qubit)
    for k, qs in members.items():
        slots = _patches_by_msf_distance(net, site_of_core[k] - 1)
        if len(qs) > len(slots):
            raise CapacityError(f"core {k} holds {len(qs)} qubits but has {len(slots)} data patches")
        qs = sorted(qs, key=lambda q: (-magic_weight[q], q))
        for q, p in zip(qs, slots):
            patch_of_qubit[q] = p
    return patch_of_qubit


@dataclass
class Mapping:
    core_of_qubit: list[int]
    site_of_core: list[int]  # core k sits on mesh site site_of_core[k] (site 0 is the factory)
    patch_of_qubit: list[int]
    strategy: str = ""

    @property
    def permutation(self) -> tuple[int, ...]:
        return (0, *self.site_of_core)

    def to_dict(self) -> dict:
        return {
            "core_of_qubit": list(self.core_of_qubit),
            "site_of_core": list(self.site_of_core),
            "patch_of_qubit": list(self.patch_of_qubit),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Mapping":
        return cls(list(d["core_of_qubit"]), list(d["site_of_core"]), list(d["patch_of_qubit"]))


def placement_objective(mapping: Mapping, profile: InteractionProfile, spec: ArchSpec,
                        dist: DistanceMatrix | None = None) -> float:
    """Flow-weighted mesh distance of a mapping's core placement."""
    dist = dist or mesh_distances(spec)
    flow = build_flow_matrix(mapping.core_of_qubit, profile, spec.num_cores)
    return qap_objective(flow, dist.dist, mapping.permutation)


def solve_core_placement(flow: np.ndarray, dist: DistanceMatrix, seed: int = 0,
                         tabu: TabuParams | None = None) -> tuple[tuple[int, ...], float]:
    """Exact below EXACT_CORE_LIMIT cores, tabu otherwise; never worse than identity."""
    n = flow.shape[0]
    if n - 1 < EXACT_CORE_LIMIT:
        return solve_qapfa_exact(flow, dist.dist)
    perm, obj = solve_qapfa_tabu(flow, dist.dist, tabu, seed=seed)
    ident = tuple(range(n))
    ident_obj = qap_objective(flow, dist.dist, ident)
    if ident_obj < obj:
        return ident, ident_obj
    return perm, obj


def map_circuit(
    circuit: Circuit,
    spec: ArchSpec,
    strategy: Strategy | str = Strategy.PARTITION_QAPFA,
    seed: int = 0,
    partition: Sequence[int] | None = None,
    weight_constant: float = 1.0,
    tabu: TabuParams | None = None,
    net: PatchNetwork | None = None,
) -> Mapping:
    strategy = Strategy(strategy)
    net = net or build_network(spec)
    n = circuit.num_qubits
    if n > spec.capacity:
        raise CapacityError(
            f"circuit needs {n} logical data qubits but the {spec.mesh_rows}x{spec.mesh_cols} mesh "
            f"of {spec.core_size}x{spec.core_size} cores offers {spec.capacity}"
        )
    identity_sites = list(range(1, spec.num_cores + 1))

    if strategy is Strategy.RANDOM:
        rng = np.random.Generator(np.random.PCG64(seed))
        data = net.data_patches
        chosen = [data[i] for i in rng.permutation(len(data))[:n]]
        cores = [net.core_of_patch[p] for p in chosen]
        return Mapping(cores, identity_sites, chosen, strategy.value)

    profile = build_interaction_profile(circuit, weight_constant)
    if partition is None:
        core_of_qubit = partition_qubits(profile, spec.num_cores, spec.data_per_core, seed)
    else:
        core_of_qubit = _check_partition(partition, n, spec)

    site_of_core = identity_sites
    if strategy is Strategy.PARTITION_QAPFA:
        flow = build_flow_matrix(core_of_qubit, profile, spec.num_cores)
        perm, _ = solve_core_placement(flow, mesh_distances(spec), seed, tabu)
        site_of_core = list(perm[1:])
    patches = place_qubits_in_core(core_of_qubit, profile.magic_weight, spec, site_of_core, net)
    return Mapping(list(core_of_qubit), site_of_core, patches, strategy.value)


def _check_partition(partition: Sequence[int], n: int, spec: ArchSpec) -> list[int]:
    part = [int(x) for x in partition]
    if len(part) != n:
        raise InfeasiblePartition(f"partition lists {len(part)} qubits, circuit has {n}")
    counts = np.bincount(part, minlength=spec.num_cores) if part else np.zeros(spec.num_cores, int)
    if part and (min(part) < 0 or max(part) >= spec.num_cores):
        raise InfeasiblePartition(f"core indices must lie in [0, {spec.num_cores})")
    if counts.max(initial=0) > spec.data_per_core:
        raise InfeasiblePartition(
            f"partition puts {int(counts.max())} qubits on one core; capacity is {spec.data_per_core}"
        )
    return part
