import math

import pytest

from cfnplace.errors import CapacityExceededError, InputError
from cfnplace.power import (COUNT_ONCE, COUNT_TWICE, Placement,
                            aggregate_traffic, build_placement,
                            evaluate_placement, network_power,
                            processing_power, servers_required)
from cfnplace.topology import (CDC, IOT, OLT, ONU, CfnTopology, DeviceProfile,
                               LanProfile, Node, energy_per_bit)
from cfnplace.workload import VirtualLink, VmNode, Vsr

IOT_SERVER = DeviceProfile("rpi4-b-4gb", 7.3, 2.56, 13.5)
CDC_SERVER = DeviceProfile("xeon-e5-2640", 298.0, 58.7, 428.0)
ONU_DEVICE = DeviceProfile("onu", 15.0, 9.0, 10.0, shared=False)
OLT_DEVICE = DeviceProfile("olt", 1940.0, 60.0, 8600.0, shared=True)


def tiny_topology(mid_device=ONU_DEVICE, mid_kind=ONU, delta=0.03,
                  cdc_pue=1.12, cdc_lan=None):
    """iot 'a' -- network 'mid' -- cdc 'c'."""
    nodes = [
        Node("a", IOT, server=IOT_SERVER, server_count_max=1),
        Node("mid", mid_kind, device=mid_device),
        Node("c", CDC, server=CDC_SERVER, server_count_max=1000,
             lan=cdc_lan, pue_pr=cdc_pue),
    ]
    return CfnTopology(nodes=nodes, links=[("a", "mid"), ("mid", "c")],
                       idle_share_delta=delta)


def one_vsr(free_flops=10.0, mbps=1000.0, input_flops=0.5):
    vms = (VmNode(0, input_flops, is_input=True), VmNode(1, free_flops))
    return Vsr(0, vms, (VirtualLink(0, 1, mbps),), "a")


def place(topology, vsrs, node_of_free):
    assign = {(v.id, 0): "a" for v in vsrs}
    assign.update({(v.id, 1): node_of_free for v in vsrs})
    return build_placement(assign, vsrs, topology)


class TestNetworkPower:
    def test_onu_worked_example(self):
        # 1 Gbps through a non-shared ONU: 0.6 W/Gbps * 1 + 9 W idle = 9.6 W
        t = tiny_topology(ONU_DEVICE, ONU)
        vsrs = [one_vsr(mbps=1000.0)]
        total, detail = network_power(place(t, vsrs, "c"), vsrs, t)
        assert total == pytest.approx(9.6)
        assert detail["per_node"]["mid"] == {"lambda_n": 1.0, "beta": 1}

    def test_olt_worked_example(self):
        # 1 Gbps through the shared OLT: 0.2186 * 1 + 0.03 * 60 = 2.0186 W
        t = tiny_topology(OLT_DEVICE, OLT)
        vsrs = [one_vsr(mbps=1000.0)]
        total, _ = network_power(place(t, vsrs, "c"), vsrs, t)
        assert total == pytest.approx(0.2186046511627907 + 1.8)

    def test_full_idle_share(self):
        # delta = 1: the shared node pays its full 60 W idle
        t = tiny_topology(OLT_DEVICE, OLT, delta=1.0)
        vsrs = [one_vsr(mbps=1000.0)]
        total, _ = network_power(place(t, vsrs, "c"), vsrs, t)
        assert total == pytest.approx(0.2186046511627907 + 60.0)

    def test_no_traffic_means_zero(self):
        # co-located VMs: the network node stays off (beta = 0)
        t = tiny_topology()
        vsrs = [one_vsr(free_flops=5.0)]
        total, detail = network_power(place(t, vsrs, "a"), vsrs, t)
        assert total == 0.0
        assert detail["per_node"]["mid"]["beta"] == 0

    def test_count_twice_doubles_proportional(self):
        t = tiny_topology()
        vsrs = [one_vsr(mbps=2000.0)]
        pl = place(t, vsrs, "c")
        _, once = network_power(pl, vsrs, t, COUNT_ONCE)
        _, twice = network_power(pl, vsrs, t, COUNT_TWICE)
        assert twice["net_proportional"] == pytest.approx(
            2 * once["net_proportional"])
        assert twice["net_idle"] == once["net_idle"]

    def test_pue_scales_network_power(self):
        t1 = tiny_topology()
        nodes = [n if n.id != "mid" else
                 Node("mid", ONU, device=ONU_DEVICE, pue_net=2.0)
                 for n in t1.nodes]
        t2 = CfnTopology(nodes=nodes, links=list(t1.links))
        vsrs = [one_vsr(mbps=1000.0)]
        total1, _ = network_power(place(t1, vsrs, "c"), vsrs, t1)
        total2, _ = network_power(place(t2, vsrs, "c"), vsrs, t2)
        assert total2 == pytest.approx(2 * total1)

    def test_capacity_exceeded(self):
        t = tiny_topology(DeviceProfile("thin", 15.0, 9.0, 0.5), ONU)
        vsrs = [one_vsr(mbps=1000.0)]
        with pytest.raises(CapacityExceededError):
            network_power(place(t, vsrs, "c"), vsrs, t)

    def test_unknown_mode(self):
        t = tiny_topology()
        vsrs = [one_vsr()]
        with pytest.raises(InputError):
            network_power(place(t, vsrs, "c"), vsrs, t, "twice-on-sundays")


class TestProcessingPower:
    def test_iot_worked_example(self):
        # 10 GFLOPS on one Pi: 0.35111 * 10 + 2.56 = 6.0711 W
        t = tiny_topology()
        vsrs = [one_vsr(free_flops=9.5, input_flops=0.5)]
        total, detail = processing_power(place(t, vsrs, "a"), vsrs, t)
        assert total == pytest.approx(6.0711, abs=1e-3)
        assert detail["per_node"]["a"]["n_servers"] == 1

    def test_cdc_worked_example(self):
        # 10 GFLOPS at the CDC: 1.12 * (0.55911 * 10 + 58.7) = 72.01 W
        t = tiny_topology()
        vsrs = [one_vsr(free_flops=10.0, input_flops=0.5)]
        total, _ = processing_power(place(t, vsrs, "c"), vsrs, t)
        iot_part = energy_per_bit(IOT_SERVER) * 0.5 + 2.56
        assert total - iot_part == pytest.approx(72.01, abs=0.01)

    def test_lan_terms(self):
        # remote traffic is charged to both endpoint LANs (theta) when present
        lan = LanProfile(30.0, 27.0, 40.0)
        t = tiny_topology(cdc_lan=lan)
        vsrs = [one_vsr(free_flops=10.0, mbps=1000.0)]
        total, detail = processing_power(place(t, vsrs, "c"), vsrs, t)
        assert detail["per_node"]["c"]["theta_p"] == pytest.approx(1.0)
        assert detail["lan_proportional"] == pytest.approx(
            1.12 * energy_per_bit(lan) * 1.0)
        assert detail["lan_idle"] == pytest.approx(1.12 * 27.0)

    def test_inactive_node_costs_nothing(self):
        t = tiny_topology()
        vsrs = [one_vsr(free_flops=5.0)]
        _, detail = processing_power(place(t, vsrs, "a"), vsrs, t)
        assert detail["per_node"]["c"] == {"omega_p": 0.0, "theta_p": 0.0,
                                           "n_servers": 0, "phi": 0}

    def test_unassigned_vm(self):
        t = tiny_topology()
        vsrs = [one_vsr()]
        with pytest.raises(InputError):
            processing_power(Placement(assign={(0, 0): "a"}), vsrs, t)

    def test_input_pinning_enforced(self):
        t = tiny_topology()
        vsrs = [one_vsr()]
        pl = Placement(assign={(0, 0): "c", (0, 1): "c"})
        with pytest.raises(InputError):
            processing_power(pl, vsrs, t)

    def test_non_processing_target(self):
        t = tiny_topology()
        vsrs = [one_vsr()]
        pl = Placement(assign={(0, 0): "a", (0, 1): "mid"})
        with pytest.raises(InputError):
            processing_power(pl, vsrs, t)

    def test_server_capacity_exceeded(self):
        t = tiny_topology()
        vsrs = [one_vsr(free_flops=14.0)]  # > 13.5 on the single-Pi node
        pl = Placement(assign={(0, 0): "a", (0, 1): "a"})
        with pytest.raises(CapacityExceededError):
            processing_power(pl, vsrs, t)


class TestServersRequired:
    def test_worked_example(self):
        assert servers_required(30.0, IOT_SERVER, 5) == 3

    def test_zero_workload(self):
        assert servers_required(0.0, IOT_SERVER, 5) == 0

    def test_exact_multiple(self):
        assert servers_required(27.0, IOT_SERVER, 2) == 2

    def test_exceeds_deployable(self):
        with pytest.raises(CapacityExceededError):
            servers_required(500.0, CDC_SERVER, 1)


class TestAggregateTraffic:
    def test_colocated_excluded(self):
        t = tiny_topology()
        vsrs = [one_vsr()]
        pl = Placement(assign={(0, 0): "a", (0, 1): "a"})
        assert aggregate_traffic(pl, vsrs) == {}

    def test_additive_over_vsrs(self):
        t = tiny_topology()
        a = one_vsr(mbps=100.0)
        b = Vsr(1, a.vms, a.vlinks, "a")
        pl = Placement(assign={(0, 0): "a", (0, 1): "c",
                               (1, 0): "a", (1, 1): "c"})
        assert aggregate_traffic(pl, [a, b]) == {("a", "c"): 200.0}


class TestEvaluatePlacement:
    def test_terms_sum_to_total(self, default_topology):
        from conftest import make_vsrs
        vsrs = make_vsrs(default_topology, 4, seed=11)
        pl = place_default(default_topology, vsrs)
        b = evaluate_placement(pl, vsrs, default_topology)
        assert math.fsum(b.terms().values()) == pytest.approx(b.total, abs=1e-9)

    def test_per_node_recomputation(self, default_topology):
        from conftest import make_vsrs
        t = default_topology
        vsrs = make_vsrs(t, 6, seed=5)
        pl = place_default(t, vsrs)
        b = evaluate_placement(pl, vsrs, t)
        total = 0.0
        for nid, row in b.per_node.items():
            n = t.node(nid)
            if n.is_network and not n.is_processing:
                total += n.pue_net * (energy_per_bit(n.device) * row["lambda_n"]
                                      + row["beta"] * t.prorated_idle(n))
            else:
                total += n.pue_pr * (energy_per_bit(n.server) * row["omega_p"]
                                     + row["n_servers"] * n.server.idle_power)
                if n.lan is not None:
                    total += n.pue_pr * (energy_per_bit(n.lan) * row["theta_p"]
                                         + row["phi"] * n.lan.idle_power)
        assert total == pytest.approx(b.total, abs=1e-9)

    def test_published_server_efficiencies(self, default_topology):
        t = default_topology
        expected = {"iot_00": 0.35, "af": 0.67, "mf": 0.67, "cdc": 0.55}
        for nid, e in expected.items():
            assert energy_per_bit(t.node(nid).server) == pytest.approx(e, abs=0.01)


def place_default(topology, vsrs):
    """Spread free VMs across CDC and MF for mixed traffic and LAN terms."""
    assign = {}
    for v in vsrs:
        assign[(v.id, v.input_vm().id)] = v.source_iot
        for i, vm in enumerate(v.free_vms()):
            assign[(v.id, vm.id)] = "cdc" if (v.id + i) % 2 else "mf"
    return build_placement(assign, vsrs, topology)
