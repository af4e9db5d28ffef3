import pytest

from conftest import make_vsrs
from cfnplace.errors import InputError
from cfnplace.milp import (BINARY, INTEGER, check_solution, complete_values,
                           formulate)
from cfnplace.power import COUNT_TWICE
from cfnplace.solver import solve_exact_enumeration


class TestFormulate:
    def test_assignment_variable_count(self, default_topology):
        # 23 processing nodes: 1 pinned binary + 2 free VMs x 23 candidates
        vsrs = make_vsrs(default_topology, 1, seed=4)
        model = formulate(default_topology, vsrs)
        assigns = [v for v in model.variables if v.name.startswith("delta_")]
        assert len(default_topology.processing_nodes()) == 23
        assert len(assigns) == 1 + 2 * 23

    def test_one_pinning_constraint_per_vsr(self, default_topology):
        vsrs = make_vsrs(default_topology, 3, seed=4)
        model = formulate(default_topology, vsrs)
        pins = [c for c in model.constraints if c.name.startswith("pin_")]
        assert len(pins) == 3
        for c in pins:
            assert c.sense == "=" and c.rhs == 1.0
            assert len(c.terms) == 1

    def test_one_assignment_constraint_per_free_vm(self, default_topology):
        vsrs = make_vsrs(default_topology, 2, seed=4)
        model = formulate(default_topology, vsrs)
        rows = [c for c in model.constraints if c.name.startswith("assign_")]
        assert len(rows) == 4
        for c in rows:
            assert len(c.terms) == 23 and c.sense == "=" and c.rhs == 1.0

    def test_zero_vsrs(self, default_topology):
        model = formulate(default_topology, [])
        assert model.variables == []
        assert model.constraints == []
        assert model.objective == []

    def test_network_activation_big_m(self, default_topology):
        vsrs = make_vsrs(default_topology, 1, seed=4)
        model = formulate(default_topology, vsrs)
        c = next(c for c in model.constraints if c.name == "netcap_olt")
        coefs = dict((var, coef) for coef, var in c.terms)
        assert coefs["beta_olt"] == -8600.0  # M equals the device capacity

    def test_variable_kinds(self, default_topology):
        vsrs = make_vsrs(default_topology, 1, seed=4)
        model = formulate(default_topology, vsrs)
        kinds = {v.name: v.kind for v in model.variables}
        assert kinds["beta_olt"] == BINARY
        assert kinds["nsrv_cdc"] == INTEGER
        assert kinds["phi_af"] == BINARY

    def test_deterministic(self, default_topology):
        vsrs = make_vsrs(default_topology, 2, seed=9)
        a = formulate(default_topology, vsrs)
        b = formulate(default_topology, vsrs)
        assert [v.name for v in a.variables] == [v.name for v in b.variables]
        assert a.constraints == b.constraints
        assert a.objective == b.objective

    def test_unknown_mode(self, default_topology):
        with pytest.raises(InputError):
            formulate(default_topology, [], mode="sometimes")


class TestCheckSolution:
    def test_feasible_matches_evaluator(self, small_topology):
        vsrs = make_vsrs(small_topology, 2, seed=6)
        sol = solve_exact_enumeration(small_topology, vsrs)
        model = formulate(small_topology, vsrs)
        report = check_solution(model, sol.placement.assign)
        assert report.feasible
        assert max(report.residuals.values()) <= 1e-6
        assert report.objective == pytest.approx(sol.objective, abs=1e-6)

    def test_count_twice_mode_consistent(self, small_topology):
        from cfnplace.power import evaluate_placement
        vsrs = make_vsrs(small_topology, 2, seed=6)
        sol = solve_exact_enumeration(small_topology, vsrs, mode=COUNT_TWICE)
        model = formulate(small_topology, vsrs, mode=COUNT_TWICE)
        report = check_solution(model, sol.placement.assign)
        assert report.feasible
        assert report.objective == pytest.approx(sol.objective, abs=1e-6)

    def test_unassigned_vm_is_infeasible(self, small_topology):
        vsrs = make_vsrs(small_topology, 1, seed=6)
        model = formulate(small_topology, vsrs)
        assign = {(0, 0): "iot_00"}  # free VMs missing
        report = check_solution(model, assign)
        assert not report.feasible
        assert any(name.startswith("assign_") for name, _ in report.violations)

    def test_input_off_source_is_infeasible(self, small_topology):
        vsrs = make_vsrs(small_topology, 1, seed=6)
        model = formulate(small_topology, vsrs)
        assign = {(0, 0): "cdc", (0, 1): "cdc", (0, 2): "cdc"}
        report = check_solution(model, assign)
        assert not report.feasible
        assert any(name.startswith("pin_") for name, _ in report.violations)

    def test_complete_values_integrality(self, small_topology):
        vsrs = make_vsrs(small_topology, 2, seed=8)
        sol = solve_exact_enumeration(small_topology, vsrs)
        model = formulate(small_topology, vsrs)
        values = complete_values(model, sol.placement.assign)
        for v in model.variables:
            if v.kind in (BINARY, INTEGER):
                assert values[v.name] == round(values[v.name])
