"""MILP construction, writers, and the cross-module consistency theorem."""

from dataclasses import replace

import numpy as np
import pytest

from peerplan import (
    Arc,
    Behavior,
    CapacityBounds,
    InfeasibleS,
    ModelParams,
    Node,
    Partition,
    SinkUnwritable,
    SocialNetwork,
    TieStrength,
    assignment_point,
    build_milp,
    evaluate_partition,
    export_instance,
    network_hash,
    objective_value,
    point_violations,
    write_lp,
    write_mps,
)
from conftest import pair_network, random_network
from oracles import all_partitions, expected_milp_counts, ordered_triple_count, parse_lp


def _params(lo=2, hi=4, facilitator=True):
    return ModelParams(capacity=CapacityBounds(lo, hi), include_facilitator=facilitator)


def test_variable_and_constraint_counts():
    rng = np.random.default_rng(211)
    for n in (2, 3, 4, 5):
        network = random_network(rng, n)
        model = build_milp(network, _params(lo=1, hi=n), s=1)
        expected = expected_milp_counts(n)
        assert len(model.variables) == expected["variables"]
        assert len(model.constraints) == expected["constraints"]
        model.check()


def test_transitivity_rows_cover_all_ordered_triples():
    rng = np.random.default_rng(223)
    network = random_network(rng, 4)
    model = build_milp(network, _params(lo=2, hi=2), s=2)
    triangles = [row for row in model.constraints if row.name.startswith("tri_")]
    assert len(triangles) == ordered_triple_count(4) == 24
    for row in triangles:
        assert row.sense == "<="
        assert row.rhs == 1.0
        assert sorted(row.coeffs.values()) == [-1.0, 1.0, 1.0]


def test_all_nonuser_objective_is_the_node_count():
    nodes = tuple(Node(f"q{k}", Behavior.NON_USER) for k in range(4))
    network = SocialNetwork(nodes, ())
    model = build_milp(network, _params(lo=2, hi=2, facilitator=False), s=2)
    assert model.objective == {}
    assert model.objective_constant == 4.0


def test_two_node_model_names_and_pair_objective():
    network = pair_network()
    params = _params(lo=1, hi=2, facilitator=False)
    model = build_milp(network, params, s=1)
    names = {v.name for v in model.variables}
    assert names == {
        "z_u_v", "l_u", "l_v",
        "xs_u_v", "xs_v_u", "xw_u_v", "xw_v_u",
        "xn_u_v", "xn_v_u", "w_u_v", "w_v_u",
        "qs_u_u_v", "qw_u_u_v", "qs_v_v_u", "qw_v_v_u",
    }
    # S=1 forces the pair together; the optimum matches evaluate_partition.
    point = assignment_point(model, network, Partition({"u": 0, "v": 0}), params)
    assert point_violations(model, point) == []
    value = objective_value(model, point)
    evaluation = evaluate_partition(network, Partition({"u": 0, "v": 0}), params)
    assert value == pytest.approx(evaluation.expected_nonusers, abs=1e-12)
    assert value == pytest.approx(0.8, abs=1e-12)


def test_every_feasible_partition_induces_a_feasible_point():
    rng = np.random.default_rng(229)
    for case in range(4):
        n = int(rng.integers(4, 7))
        network = random_network(rng, n)
        params = _params(facilitator=bool(case % 2))
        ids = sorted(network.node_ids())
        for blocks in all_partitions(ids, 2, 4):
            s = len(blocks)
            model = build_milp(network, params, s)
            partition = Partition({m: g for g, block in enumerate(blocks) for m in block})
            point = assignment_point(model, network, partition, params)
            assert point_violations(model, point, tol=1e-9) == []
            # Exported models never carry facilitator terms, whatever the flag.
            bare = replace(params, include_facilitator=False)
            want = evaluate_partition(network, partition, bare).expected_nonusers
            assert objective_value(model, point) == pytest.approx(want, abs=1e-9)


def test_point_violations_flags_broken_points():
    network = pair_network()
    params = _params(lo=1, hi=2, facilitator=False)
    model = build_milp(network, params, s=1)
    point = assignment_point(model, network, Partition({"u": 0, "v": 0}), params)
    bad = dict(point)
    bad["z_u_v"] = 0.5
    assert any("z_u_v" in v for v in point_violations(model, bad))
    bad = dict(point)
    bad["w_u_v"] = 2.0
    assert point_violations(model, bad) != []


def test_infeasible_group_count_is_rejected():
    rng = np.random.default_rng(233)
    network = random_network(rng, 6)
    with pytest.raises(InfeasibleS):
        build_milp(network, _params(lo=2, hi=2), s=5)


def test_metadata_pins_the_instance():
    rng = np.random.default_rng(239)
    network = random_network(rng, 4)
    params = _params()
    model = build_milp(network, params, s=2)
    assert model.metadata["instance_hash"] == network_hash(network)
    assert model.metadata["s"] == 2
    assert model.metadata["params"]["capacity"] == {"lo": 2, "hi": 4}


def test_lp_round_trip(tmp_path):
    rng = np.random.default_rng(241)
    network = random_network(rng, 4)
    model = build_milp(network, _params(), s=2)
    path = tmp_path / "model.lp"
    write_lp(model, path)
    parsed = parse_lp(path.read_text())
    assert parsed["sense"] == "maximize"
    assert parsed["objective_constant"] == pytest.approx(model.objective_constant)
    assert set(parsed["objective"]) == set(model.objective)
    for name, value in model.objective.items():
        assert parsed["objective"][name] == pytest.approx(value, abs=1e-15)
    assert set(parsed["constraints"]) == {row.name for row in model.constraints}
    for row in model.constraints:
        coeffs, sense, rhs = parsed["constraints"][row.name]
        assert sense == row.sense
        assert rhs == pytest.approx(row.rhs)
        assert coeffs == {k: pytest.approx(v) for k, v in row.coeffs.items() if v != 0.0}
    assert parsed["binaries"] == {v.name for v in model.variables if v.kind == "binary"}
    continuous = {v.name for v in model.variables if v.kind == "continuous"}
    assert set(parsed["bounds"]) == continuous


def test_lp_output_is_byte_identical_across_calls(tmp_path):
    rng = np.random.default_rng(251)
    network = random_network(rng, 5)
    model = build_milp(network, _params(), s=2)
    first, second = tmp_path / "a.lp", tmp_path / "b.lp"
    write_lp(model, first)
    write_lp(build_milp(network, _params(), s=2), second)
    assert first.read_bytes() == second.read_bytes()


def test_lp_uses_full_float_precision(tmp_path):
    rng = np.random.default_rng(257)
    network = random_network(rng, 3)
    params = ModelParams(capacity=CapacityBounds(1, 3), flip_to_nonuser=0.8)
    model = build_milp(network, params, s=1)
    path = tmp_path / "prec.lp"
    write_lp(model, path)
    text = path.read_text()
    # 0.8 has no exact double; 17 significant digits expose that.
    assert "0.80000000000000004" in text
    for line in text.splitlines():
        assert len(line) <= 200


def test_lp_wraps_long_rows(tmp_path):
    rng = np.random.default_rng(263)
    network = random_network(rng, 8)
    model = build_milp(network, ModelParams(capacity=CapacityBounds(2, 8)), s=2)
    path = tmp_path / "wide.lp"
    write_lp(model, path)
    lines = path.read_text().splitlines()
    assert all(len(line) <= 200 for line in lines)
    parsed = parse_lp(path.read_text())
    assert len(parsed["constraints"]) == len(model.constraints)


def test_unsafe_ids_fall_back_to_positional_names():
    network = SocialNetwork(
        (Node("a b", Behavior.USER), Node("c-d", Behavior.NON_USER)),
        (Arc("a b", "c-d", TieStrength.STRONG),),
    )
    model = build_milp(network, _params(lo=1, hi=2, facilitator=False), s=1)
    names = {v.name for v in model.variables}
    assert "z_v0_v1" in names
    assert model.metadata["node_names"] == {"a b": "v0", "c-d": "v1"}


def test_mps_writer_emits_a_complete_file(tmp_path):
    rng = np.random.default_rng(269)
    network = random_network(rng, 4)
    model = build_milp(network, _params(), s=2)
    path = tmp_path / "model.mps"
    write_mps(model, path)
    text = path.read_text()
    for section in ("OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"):
        assert section in text
    assert "MARKER" in text and "INTORG" in text and "INTEND" in text
    # The objective constant rides on the obj row's RHS, negated.
    assert f"rhs obj {-model.objective_constant:.17g}" in " ".join(text.split())


def test_export_instance_writes_one_file_per_group_count(tmp_path):
    rng = np.random.default_rng(271)
    network = random_network(rng, 8)
    params = _params(lo=2, hi=4)
    paths = export_instance(network, params, tmp_path, "inst")
    assert [p.name for p in paths] == ["inst.2.lp", "inst.3.lp", "inst.4.lp"]
    for path in paths:
        assert path.exists()
        parse_lp(path.read_text())


def test_export_instance_honors_explicit_s_and_mps(tmp_path):
    rng = np.random.default_rng(277)
    network = random_network(rng, 8)
    paths = export_instance(network, _params(), tmp_path, "x", s_values=[3], mps=True)
    assert [p.name for p in paths] == ["x.3.mps"]


def test_unwritable_sink_raises(tmp_path):
    rng = np.random.default_rng(281)
    network = random_network(rng, 4)
    model = build_milp(network, _params(), s=2)
    missing = tmp_path / "no" / "such" / "dir" / "model.lp"
    with pytest.raises(SinkUnwritable):
        write_lp(model, missing)
    with pytest.raises(SinkUnwritable):
        write_mps(model, missing)


def test_capacity_rows_fold_the_self_pair():
    # z_jj == 1 is folded into the rows: sum over others lies in [lo-1, hi-1].
    rng = np.random.default_rng(283)
    network = random_network(rng, 5)
    model = build_milp(network, _params(lo=2, hi=3), s=2)
    lo_rows = [r for r in model.constraints if r.name.startswith("cap_lo_")]
    hi_rows = [r for r in model.constraints if r.name.startswith("cap_hi_")]
    assert len(lo_rows) == len(hi_rows) == 5
    for row in lo_rows:
        assert row.sense == ">=" and row.rhs == 1.0 and len(row.coeffs) == 4
    for row in hi_rows:
        assert row.sense == "<=" and row.rhs == 2.0 and len(row.coeffs) == 4
