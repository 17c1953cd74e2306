from .mapper import (
    CapacityError,
    InteractionProfile,
    Mapping,
    Strategy,
    build_flow_matrix,
    build_interaction_profile,
    map_circuit,
    partition_qubits,
    place_qubits_in_core,
    placement_objective,
    solve_core_placement,
)
from .partition import InfeasiblePartition, cut_weight, load_partition, part_sizes, save_partition
from .qap import QAPError, TabuParams, qap_objective, solve_qapfa_exact, solve_qapfa_tabu

__all__ = [
    "CapacityError",
    "InfeasiblePartition",
    "InteractionProfile",
    "Mapping",
    "QAPError",
    "Strategy",
    "TabuParams",
    "build_flow_matrix",
    "build_interaction_profile",
    "cut_weight",
    "load_partition",
    "map_circuit",
    "part_sizes",
    "partition_qubits",
    "place_qubits_in_core",
    "placement_objective",
    "qap_objective",
    "save_partition",
    "solve_core_placement",
    "solve_qapfa_exact",
    "solve_qapfa_tabu",
]
