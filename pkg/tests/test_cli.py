import json

import pytest

from conftest import make_vsrs
from cfnplace.cli import main
from cfnplace.topology import save_topology
from cfnplace.workload import VirtualLink, VmNode, Vsr, save_vsrs


@pytest.fixture()
def files(tmp_path, small_topology):
    topo = tmp_path / "topo.json"
    save_topology(small_topology, topo)
    vsrs = tmp_path / "vsrs.json"
    save_vsrs(make_vsrs(small_topology, 2, seed=5), vsrs)
    return tmp_path, topo, vsrs


class TestValidate:
    def test_topology_ok(self, files, capsys):
        _, topo, _ = files
        assert main(["validate", str(topo)]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_vsrs_ok(self, files, capsys):
        _, _, vsrs = files
        assert main(["validate", str(vsrs)]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_invalid_vsrs(self, tmp_path, capsys):
        vms = (VmNode(0, 0.5, is_input=True), VmNode(1, 4.0))
        bad = Vsr(0, vms, (), "iot_00")  # disconnected VM graph
        path = tmp_path / "bad.json"
        save_vsrs([bad], path)
        assert main(["validate", str(path)]) == 1
        assert "not connected" in capsys.readouterr().err

    def test_unrecognized_document(self, tmp_path, capsys):
        path = tmp_path / "odd.json"
        path.write_text('{"hello": 1}')
        assert main(["validate", str(path)]) == 2

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        assert main(["validate", str(path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "absent.json")]) == 1


class TestSolve:
    def test_solve_json_output(self, files, capsys):
        _, topo, vsrs = files
        assert main(["solve", str(topo), str(vsrs), "--strategy", "cfn"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["status"] == "optimal"
        assert out["objective_w"] > 0
        assert out["assignment"]

    def test_infeasible_exit(self, tmp_path, small_topology, capsys):
        topo = tmp_path / "topo.json"
        save_topology(small_topology, topo)
        vms = (VmNode(0, 0.5, is_input=True), VmNode(1, 1.0e6))
        huge = Vsr(0, vms, (VirtualLink(0, 1, 10.0),), "iot_00")
        vsrs = tmp_path / "huge.json"
        save_vsrs([huge], vsrs)
        assert main(["solve", str(topo), str(vsrs), "--strategy", "af"]) == 1
        assert "infeasible" in capsys.readouterr().err

    def test_unknown_strategy_rejected(self, files):
        _, topo, vsrs = files
        with pytest.raises(SystemExit):
            main(["solve", str(topo), str(vsrs), "--strategy", "psychic"])


class TestExportLp:
    def test_writes_lp(self, files, capsys):
        tmp, topo, vsrs = files
        out = tmp / "model.lp"
        assert main(["export-lp", str(topo), str(vsrs), str(out)]) == 0
        assert out.read_text().startswith("Minimize")
        assert "variables" in capsys.readouterr().out


class TestSweep:
    def test_sweep_writes_csv_and_summary(self, tmp_path, capsys):
        scenario = {
            "topology": {"iot_count": 3, "zone_count": 1},
            "sweep": {"from": 1, "to": 2},
            "strategies": ["CFN", "CDC"],
            "base_seed": 7,
            "bnb_node_limit": 2000,
            "output": str(tmp_path / "results.csv"),
        }
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(scenario))
        assert main(["sweep", str(path)]) == 0
        out = capsys.readouterr().out
        assert "CFN vs CDC savings: avg=" in out
        lines = (tmp_path / "results.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 2

    def test_output_override(self, tmp_path):
        scenario = {
            "topology": {"iot_count": 3, "zone_count": 1},
            "sweep": {"from": 1, "to": 1},
            "strategies": ["CDC"],
            "output": str(tmp_path / "a.csv"),
        }
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(scenario))
        override = tmp_path / "b.csv"
        assert main(["sweep", str(path), "--output", str(override)]) == 0
        assert override.exists()
