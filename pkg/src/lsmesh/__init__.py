"""Mapping, scheduling and resource accounting of lattice-surgery circuits on a mesh of surface-code cores."""

from .circuit import Circuit, CircuitError, Gate, decompose_to_gateset, generate_cuccaro_adder, generate_random_circuit, parse_circuit
from .mapping import Mapping, Strategy, map_circuit
from .report import ComparisonTable, compare_strategies, emit
from .scheduler import ResourceReport, Schedule, ScheduledOp, find_route, schedule, validate_schedule
from .topology import ArchSpec, CostModel, PatchNetwork, build_network, mesh_distances, structural_counts

__version__ = "0.1.0"
