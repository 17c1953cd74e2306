import json

import numpy as np
import pytest

from lsmesh.topology import FACTORY, ArchSpec, CostModel, build_network, measured_counts, mesh_distances, structural_counts


@pytest.mark.parametrize("c", [3, 5, 7, 9])
@pytest.mark.parametrize("mesh", [(1, 1), (2, 3), (3, 2)])
def test_closed_form_matches_enumeration(c, mesh):
    spec = ArchSpec(*mesh, c)
    counts = structural_counts(spec)
    measured = measured_counts(build_network(spec))
    for key, value in measured.items():
        assert counts[key] == value, key


def test_paper_edge_formula_agrees_with_enumeration():
    for rows, cols, c in [(6, 6, 5), (8, 12, 3), (12, 8, 3), (2, 5, 7)]:
        counts = structural_counts(ArchSpec(rows, cols, c))
        assert counts["paper_inter_core_plus_factory_edges"] == counts["inter_core_plus_factory_edges"]


def test_c5_counts():
    counts = structural_counts(ArchSpec(6, 6, 5))
    assert counts["data_per_core"] == 13
    assert counts["ancilla_per_core"] == 12
    assert counts["edge_ancilla_per_side"] == 2
    assert counts["edge_ancilla_per_core"] == 8
    assert counts["total_qubits"] == 468


def test_c3_intra_core_edges():
    assert structural_counts(ArchSpec(1, 1, 3))["intra_core_edges"] == 16


@pytest.mark.parametrize("mesh", [(12, 8), (8, 12)])
def test_480_qubit_meshes(mesh):
    net = build_network(ArchSpec(*mesh, 3))
    assert len(net.data_patches) == 480


def test_single_core():
    net = build_network(ArchSpec(1, 1, 3))
    kinds = [p.kind for p in net.patches]
    assert kinds.count("data") == 5 and kinds.count("ancilla") == 4
    assert not [e for e in net.edges if e.kind == "inter_core"]
    assert len({net.patch(p).core for p in net.factory_ports}) == 1
    assert structural_counts(ArchSpec(1, 1, 3))["inter_core_plus_factory_edges"] == 1
    assert len([e for e in net.edges if e.kind == "factory"]) == 1


@pytest.mark.parametrize("c", [3, 5, 7])
def test_network_invariants(c):
    spec = ArchSpec(2, 3, c)
    net = build_network(spec)
    by_id = {p.id: p for p in net.patches}
    for p in net.patches:
        r, q = p.local
        assert p.kind == ("data" if (r + q) % 2 == 0 else "ancilla")
    for e in net.edges:
        if e.kind == "factory":
            assert e.a == FACTORY
            port = by_id[e.b]
            assert port.edge_ancilla and port.local[1] == 0 and port.core[1] == 0
            continue
        a, b = by_id[e.a], by_id[e.b]
        if e.kind == "data_adjacent":
            assert {a.kind, b.kind} == {"data", "ancilla"} and a.core == b.core
            assert abs(a.local[0] - b.local[0]) + abs(a.local[1] - b.local[1]) == 1
        elif e.kind == "intra_diagonal":
            assert a.kind == b.kind == "ancilla" and a.core == b.core
            assert abs(a.local[0] - b.local[0]) == abs(a.local[1] - b.local[1]) == 1
        else:
            assert e.kind == "inter_core"
            assert a.edge_ancilla and b.edge_ancilla
            assert abs(a.core[0] - b.core[0]) + abs(a.core[1] - b.core[1]) == 1
            assert a.kind == b.kind == "ancilla"


@pytest.mark.parametrize("c", [3, 5, 7, 9])
def test_facing_cells_have_equal_kind(c):
    for k in range(c):
        # east column of one core faces west column of the next
        assert (k + c - 1) % 2 == k % 2


def test_intercore_edges_per_boundary():
    spec = ArchSpec(3, 4, 5)
    net = build_network(spec)
    per_pair = {}
    for e in net.edges:
        if e.kind == "inter_core":
            key = tuple(sorted((net.patch(e.a).core, net.patch(e.b).core)))
            per_pair[key] = per_pair.get(key, 0) + 1
    assert set(per_pair.values()) == {2}
    assert len(per_pair) == 3 * 3 + 2 * 4


def test_rebuild_is_identical():
    spec = ArchSpec(3, 3, 5)
    a, b = build_network(spec), build_network(spec)
    assert a.to_json() == b.to_json()
    assert a.ancilla_adj == b.ancilla_adj


def test_json_dump():
    net = build_network(ArchSpec(1, 2, 3))
    data = json.loads(net.to_json())
    assert data["nodes"][0] == {"id": 0, "kind": "factory"}
    assert len(data["nodes"]) == 1 + 18
    assert len(data["edges"]) == len(net.edges)


def test_ancilla_graph_connected():
    net = build_network(ArchSpec(3, 3, 5))
    seen = {FACTORY}
    stack = [FACTORY]
    while stack:
        v = stack.pop()
        for u in net.ancilla_adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    assert seen == {FACTORY, *net.ancilla_patches}


def test_invalid_specs():
    with pytest.raises(ValueError):
        ArchSpec(2, 2, 4)
    with pytest.raises(ValueError):
        ArchSpec(0, 2, 3)
    with pytest.raises(ValueError):
        ArchSpec(1, 1, 3, cost_model=CostModel(t_correction_probability=1.5))


def test_cost_model_defaults_follow_distance():
    cm = ArchSpec(1, 1, 3, code_distance=5).cost_model
    assert (cm.epr_per_hop, cm.distill_latency, cm.meas_bits_per_intercore_op) == (25, 5, 50)
    cm = ArchSpec(1, 1, 3, 5, CostModel(epr_per_hop=7)).cost_model
    assert cm.epr_per_hop == 7


def test_spec_dict_roundtrip():
    spec = ArchSpec(2, 3, 5, 3, CostModel(distill_latency=10))
    assert ArchSpec.from_dict(spec.to_dict()) == spec


# ---------------------------------------------------------------- distances

def test_distance_examples():
    spec = ArchSpec(3, 4, 3)
    d = mesh_distances(spec).dist
    site = lambda r, c: 1 + r * 4 + c
    assert d[site(0, 0), site(0, 1)] == 1
    assert d[site(0, 0), site(2, 3)] == 5
    assert d[0, site(1, 0)] == 1
    spec6 = ArchSpec(6, 6, 5)
    d6 = mesh_distances(spec6).dist
    assert d6.shape == (37, 37)
    assert (np.diag(d6) == 0).all()
    assert d6[0, 1 + 4] == 5


def test_factory_distance_grows_along_rows():
    d = mesh_distances(ArchSpec(6, 6, 5)).dist
    for r in range(6):
        row = [d[0, 1 + r * 6 + c] for c in range(6)]
        assert row == list(range(1, 7))


@pytest.mark.parametrize("rows, cols", [(r, c) for r in range(1, 7) for c in range(1, 7)])
def test_distance_metric(rows, cols):
    d = mesh_distances(ArchSpec(rows, cols, 3)).dist
    assert (d == d.T).all() and (np.diag(d) == 0).all() and (d >= 0).all()
    # triangle inequality over core-to-core entries; the factory row is a
    # virtual column and is only required to grow with column index
    m = d[1:, 1:]
    assert (m[:, None, :] <= m[:, :, None] + m[None, :, :]).all()
