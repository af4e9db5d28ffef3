"""Power evaluation of a concrete placement.

Total power = network power (per-node traffic times energy-per-bit plus gated
idle power, PUE-weighted) + processing power (server load, activated-server
idle, internal LAN traffic and LAN idle, PUE-weighted).  Two traffic metering
modes exist because the published aggregation formula is ambiguous:

* ``count-once`` (default): a network node meters traffic entering it once.
  This is the mode consistent with the worked per-node figures used in tests.
* ``count-twice``: a transit node meters traffic on both entry and exit,
  reproducing the published expression verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CapacityExceededError, InputError, NoPathError
from .topology import CfnTopology, Node, energy_per_bit, min_power_path
from .workload import Vsr

COUNT_ONCE = "count-once"
COUNT_TWICE = "count-twice"
TRAFFIC_MODES = (COUNT_ONCE, COUNT_TWICE)

WATT_TOL = 1e-9
_CAP_EPS = 1e-9


@dataclass
class Placement:
    """Assignment of every VM to a processing node plus derived routing.

    ``assign`` maps (vsr_id, vm_id) to a node id; ``routes`` maps an ordered
    processing-node pair to the full physical path used for its traffic.
    """

    assign: dict[tuple[int, int], str]
    routes: dict[tuple[str, str], list[str]] = field(default_factory=dict)


@dataclass
class PowerBreakdown:
    net_proportional: float
    net_idle: float
    pr_proportional: float
    pr_idle: float
    lan_proportional: float
    lan_idle: float
    total: float
    per_node: dict[str, dict]

    def terms(self) -> dict[str, float]:
        return {
            "net_proportional": self.net_proportional,
            "net_idle": self.net_idle,
            "pr_proportional": self.pr_proportional,
            "pr_idle": self.pr_idle,
            "lan_proportional": self.lan_proportional,
            "lan_idle": self.lan_idle,
        }

    def to_dict(self) -> dict:
        return dict(self.terms(), total=self.total, per_node=self.per_node)


def aggregate_traffic(placement: Placement, vsrs: list[Vsr]) -> dict[tuple[str, str], float]:
    """Inter-node traffic in Mbps, summed over all embedded virtual links.

    Co-located links (both endpoints on one node) are excluded here; they are
    charged to that node's LAN during processing-power evaluation.
    """
    agg: dict[tuple[str, str], float] = {}
    for v in vsrs:
        for l in v.vlinks:
            try:
                b = placement.assign[(v.id, l.src)]
                e = placement.assign[(v.id, l.dst)]
            except KeyError as exc:
                raise InputError(f"VSR {v.id}: VM {exc.args[0][1]} unassigned") from None
            if b != e:
                agg[(b, e)] = agg.get((b, e), 0.0) + l.bitrate_mbps
    return agg


def servers_required(omega: float, server, ns_max: int) -> int:
    """Activated server count for a workload of ``omega`` GFLOPS."""
    if omega <= 0:
        return 0
    n = math.ceil(omega / server.capacity - _CAP_EPS)
    n = max(n, 1)
    if n > ns_max:
        raise CapacityExceededError(
            None, f"{omega:g} GFLOPS needs {n} servers, only {ns_max} deployable")
    return n


def check_assignments(placement: Placement, vsrs: list[Vsr]) -> None:
    for v in vsrs:
        for vm in v.vms:
            node = placement.assign.get((v.id, vm.id))
            if node is None:
                raise InputError(f"VSR {v.id}: VM {vm.id} unassigned")
            if vm.is_input and node != v.source_iot:
                raise InputError(
                    f"VSR {v.id}: input VM must stay on {v.source_iot}, got {node}")


def derive_routes(topology: CfnTopology, pairs) -> dict[tuple[str, str], list[str]]:
    """Minimum-power route for every requested (b, e) pair."""
    return {(b, e): min_power_path(topology, b, e) for b, e in pairs}


def build_placement(assign: dict[tuple[int, int], str], vsrs: list[Vsr],
                    topology: CfnTopology) -> Placement:
    """Placement from a bare assignment, with min-power routing filled in."""
    placement = Placement(assign=dict(assign))
    placement.routes = derive_routes(topology, aggregate_traffic(placement, vsrs))
    return placement


def _node_traffic(topology: CfnTopology, agg, routes, mode: str) -> dict[str, float]:
    """Per-network-node metered traffic (Gbps) under the chosen mode."""
    lam: dict[str, float] = {}
    for (b, e), mbps in agg.items():
        route = routes.get((b, e))
        if route is None:
            raise NoPathError(f"no route supplied for traffic pair ({b}, {e})")
        if route and (route[0] != b or route[-1] != e):
            raise InputError(f"route for ({b}, {e}) has wrong endpoints")
        gbps = mbps / 1000.0
        for nid in route:
            node = topology.node(nid)
            if node.is_processing or node.device is None:
                continue
            weight = 2.0 if mode == COUNT_TWICE else 1.0
            lam[nid] = lam.get(nid, 0.0) + weight * gbps
    return lam


def network_power(placement: Placement, vsrs: list[Vsr], topology: CfnTopology,
                  mode: str = COUNT_ONCE) -> tuple[float, dict[str, dict]]:
    """Evaluate the network side: returns (watts, per-node lambda/beta table)."""
    if mode not in TRAFFIC_MODES:
        raise InputError(f"unknown traffic mode {mode!r}")
    agg = aggregate_traffic(placement, vsrs)
    lam = _node_traffic(topology, agg, placement.routes, mode)
    per_node: dict[str, dict] = {}
    prop_terms: list[float] = []
    idle_terms: list[float] = []
    for n in topology.network_nodes():
        traffic = lam.get(n.id, 0.0)
        if traffic > n.device.capacity * (1 + _CAP_EPS):
            raise CapacityExceededError(
                n.id, f"node {n.id}: {traffic:g} Gbps exceeds {n.device.capacity:g} Gbps")
        beta = 1 if traffic > 0 else 0
        prop_terms.append(n.pue_net * energy_per_bit(n.device) * traffic)
        idle_terms.append(n.pue_net * beta * topology.prorated_idle(n))
        per_node[n.id] = {"lambda_n": traffic, "beta": beta}
    prop = math.fsum(prop_terms)
    idle = math.fsum(idle_terms)
    return prop + idle, {"net_proportional": prop, "net_idle": idle,
                         "per_node": per_node}


def processing_power(placement: Placement, vsrs: list[Vsr],
                     topology: CfnTopology) -> tuple[float, dict[str, dict]]:
    """Evaluate the processing side: servers, server idle, LAN, LAN idle."""
    check_assignments(placement, vsrs)
    omega: dict[str, float] = {}
    theta_mbps: dict[str, float] = {}
    for v in vsrs:
        for vm in v.vms:
            p = placement.assign[(v.id, vm.id)]
            omega[p] = omega.get(p, 0.0) + vm.flops_demand
        for l in v.vlinks:
            b = placement.assign[(v.id, l.src)]
            e = placement.assign[(v.id, l.dst)]
            theta_mbps[b] = theta_mbps.get(b, 0.0) + l.bitrate_mbps
            if e != b:
                theta_mbps[e] = theta_mbps.get(e, 0.0) + l.bitrate_mbps

    per_node: dict[str, dict] = {}
    pr_prop: list[float] = []
    pr_idle: list[float] = []
    lan_prop: list[float] = []
    lan_idle: list[float] = []
    for p in topology.processing_nodes():
        w = omega.get(p.id, 0.0)
        th = theta_mbps.get(p.id, 0.0) / 1000.0
        try:
            n_srv = servers_required(w, p.server, p.server_count_max)
        except CapacityExceededError as exc:
            raise CapacityExceededError(p.id, f"node {p.id}: {exc}") from None
        phi = 1 if (w > 0 or th > 0) else 0
        pr_prop.append(p.pue_pr * energy_per_bit(p.server) * w)
        pr_idle.append(p.pue_pr * n_srv * p.server.idle_power)
        if p.lan is not None:
            if th > p.lan.capacity * (1 + _CAP_EPS):
                raise CapacityExceededError(
                    p.id, f"node {p.id}: LAN traffic {th:g} Gbps exceeds "
                          f"{p.lan.capacity:g} Gbps")
            lan_prop.append(p.pue_pr * energy_per_bit(p.lan) * th)
            lan_idle.append(p.pue_pr * phi * p.lan.idle_power)
        per_node[p.id] = {"omega_p": w, "theta_p": th,
                          "n_servers": n_srv, "phi": phi}
    for nid, w in omega.items():
        if not topology.node(nid).is_processing:
            raise InputError(f"node {nid} cannot process VMs")
    terms = {"pr_proportional": math.fsum(pr_prop),
             "pr_idle": math.fsum(pr_idle),
             "lan_proportional": math.fsum(lan_prop),
             "lan_idle": math.fsum(lan_idle)}
    total = math.fsum(terms.values())
    return total, dict(terms, per_node=per_node)


def evaluate_placement(placement: Placement, vsrs: list[Vsr],
                       topology: CfnTopology, mode: str = COUNT_ONCE) -> PowerBreakdown:
    """Full power accounting of a placement; deterministic and pure."""
    net_total, net = network_power(placement, vsrs, topology, mode)
    pr_total, pr = processing_power(placement, vsrs, topology)
    per_node: dict[str, dict] = {}
    for nid, row in net["per_node"].items():
        per_node.setdefault(nid, {"lambda_n": 0.0, "omega_p": 0.0, "theta_p": 0.0,
                                  "n_servers": 0, "beta": 0, "phi": 0}).update(row)
    for nid, row in pr["per_node"].items():
        per_node.setdefault(nid, {"lambda_n": 0.0, "omega_p": 0.0, "theta_p": 0.0,
                                  "n_servers": 0, "beta": 0, "phi": 0}).update(row)
    return PowerBreakdown(
        net_proportional=net["net_proportional"],
        net_idle=net["net_idle"],
        pr_proportional=pr["pr_proportional"],
        pr_idle=pr["pr_idle"],
        lan_proportional=pr["lan_proportional"],
        lan_idle=pr["lan_idle"],
        total=net_total + pr_total,
        per_node=per_node,
    )
