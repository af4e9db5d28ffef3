"""Physical cloud-fog network graph: device profiles, builder, queries.

The topology is a small undirected graph.  Node kinds follow the four-layer
hierarchy (IoT devices behind per-zone ONUs, a PON OLT, an access fog behind
a low-end access router, a metro fog behind the metro router/switch pair, and
a cloud data center one core hop past an IP/WDM path).  Values are immutable
after construction; every query here is pure.
"""

from __future__ import annotations

import heapq
import json
import math
import random
from dataclasses import dataclass, field, replace

from .errors import ConfigurationError, NoPathError

IOT = "IoT"
ONU = "ONU"
OLT = "OLT"
ACCESS_ROUTER = "AccessRouter"
METRO_ROUTER = "MetroRouter"
METRO_SWITCH = "MetroSwitch"
CORE_IP_WDM = "CoreIpWdm"
AF = "AF"
MF = "MF"
CDC = "CDC"

NODE_KINDS = (IOT, ONU, OLT, ACCESS_ROUTER, METRO_ROUTER, METRO_SWITCH,
              CORE_IP_WDM, AF, MF, CDC)
PROCESSING_KINDS = (IOT, AF, MF, CDC)


@dataclass(frozen=True)
class DeviceProfile:
    """Power/capacity profile of a network device or a single server.

    Capacity is Gbps for network devices and GFLOPS for servers.  ``shared``
    marks high-capacity aggregation gear whose idle power is prorated by the
    topology's idle-share fraction.
    """

    name: str
    max_power: float
    idle_power: float
    capacity: float
    shared: bool = False

    def validate(self):
        if not (self.max_power >= self.idle_power >= 0):
            raise ConfigurationError(
                f"profile {self.name!r}: need max_power >= idle_power >= 0")
        if self.capacity <= 0:
            raise ConfigurationError(f"profile {self.name!r}: capacity must be > 0")


@dataclass(frozen=True)
class LanProfile:
    """Internal LAN of a multi-server processing node (Gbps capacity)."""

    max_power: float
    idle_power: float
    capacity: float

    def validate(self):
        if not (self.max_power >= self.idle_power >= 0):
            raise ConfigurationError("LAN profile: need max_power >= idle_power >= 0")
        if self.capacity <= 0:
            raise ConfigurationError("LAN profile: capacity must be > 0")


def energy_per_bit(profile) -> float:
    """(max - idle) / capacity, in W per Gbps (or W per GFLOPS for servers)."""
    return (profile.max_power - profile.idle_power) / profile.capacity


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    device: DeviceProfile | None = None
    server: DeviceProfile | None = None
    server_count_max: int = 0
    lan: LanProfile | None = None
    pue_net: float = 1.0
    pue_pr: float = 1.0
    zone: int | None = None

    @property
    def is_processing(self) -> bool:
        return self.server is not None

    @property
    def is_network(self) -> bool:
        return self.device is not None


# Default device profiles (published equipment figures).
IOT_SERVER = DeviceProfile("rpi4-b-4gb", 7.3, 2.56, 13.5)
AF_SERVER = DeviceProfile("intel-i5-3427u", 37.2, 13.8, 34.5)
MF_SERVER = DeviceProfile("intel-i5-3427u", 37.2, 13.8, 34.5)
CDC_SERVER = DeviceProfile("xeon-e5-2640", 298.0, 58.7, 428.0)

ONU_DEVICE = DeviceProfile("onu-ap-wifi", 15.0, 9.0, 10.0, shared=False)
OLT_DEVICE = DeviceProfile("olt", 1940.0, 60.0, 8600.0, shared=True)
METRO_ROUTER_DEVICE = DeviceProfile("metro-router-port", 30.0, 27.0, 40.0, shared=True)
METRO_SWITCH_DEVICE = DeviceProfile("metro-switch", 470.0, 423.0, 600.0, shared=True)
# The published IP/WDM row gives 0.14 W/Gbps efficiency; capacity is derived
# from it so that (max - idle) / capacity reproduces that figure.
CORE_DEVICE = DeviceProfile("ip-wdm-node", 878.0, 790.0,
                            (878.0 - 790.0) / 0.14, shared=True)
# The access fog hangs off a low-end router; no published figures exist for
# it, so the metro router port profile is reused (dedicated, so not shared).
ACCESS_ROUTER_DEVICE = DeviceProfile("access-router", 30.0, 27.0, 40.0, shared=False)

# Fog nodes keep a standard metro-switch LAN; the data center gets a small
# per-application LAN share so its fixed cost stays subordinate to servers.
AF_LAN = LanProfile(470.0, 423.0, 600.0)
MF_LAN = LanProfile(470.0, 423.0, 600.0)
CDC_LAN = LanProfile(30.0, 27.0, 40.0)


@dataclass
class CfnTopology:
    nodes: list[Node]
    links: list[tuple[str, str]]
    idle_share_delta: float = 0.03

    def __post_init__(self):
        self._by_id = {n.id: n for n in self.nodes}
        adj: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for a, b in self.links:
            if a in adj and b in adj:
                adj[a].append(b)
                adj[b].append(a)
        for nbrs in adj.values():
            nbrs.sort()
        self._adj = adj

    def node(self, node_id: str) -> Node:
        return self._by_id[node_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    def neighbors(self, node_id: str) -> list[str]:
        return self._adj[node_id]

    def processing_nodes(self) -> list[Node]:
        return [n for n in self.nodes if n.is_processing]

    def network_nodes(self) -> list[Node]:
        """Pure network nodes: carry a device profile and no servers."""
        return [n for n in self.nodes if n.is_network and not n.is_processing]

    def prorated_idle(self, node: Node) -> float:
        """Idle power of a network device after the shared-equipment share."""
        idle = node.device.idle_power
        return self.idle_share_delta * idle if node.device.shared else idle


@dataclass(frozen=True)
class DefaultTopologyConfig:
    iot_count: int = 20
    zone_count: int = 4
    seed: int = 7
    core_count: int = 2
    idle_share_delta: float = 0.03
    ns_iot: int = 1
    ns_af: int = 5
    ns_mf: int = 10
    ns_cdc: int = 1000
    pue_af: float = 1.25
    pue_mf: float = 1.35
    pue_cdc: float = 1.12
    pue_core: float = 1.5
    device_overrides: dict = field(default_factory=dict)
    lan_overrides: dict = field(default_factory=dict)


def build_default_cfn(config: DefaultTopologyConfig | None = None) -> CfnTopology:
    """Construct the default four-layer hierarchy.

    IoT devices are dealt across zones with a seeded shuffle so every zone is
    populated; one ONU per zone feeds the OLT; the access fog hangs off a
    low-end access router at the OLT; the metro fog hangs off the metro
    router/switch pair; the data center sits one hop past a short IP/WDM path.
    """
    cfg = config or DefaultTopologyConfig()
    if cfg.iot_count < 1 or cfg.zone_count < 1 or cfg.core_count < 1:
        raise ConfigurationError("iot_count, zone_count and core_count must be >= 1")
    if cfg.iot_count < cfg.zone_count:
        raise ConfigurationError("need at least one IoT device per zone")

    dev = {
        ONU: ONU_DEVICE, OLT: OLT_DEVICE, ACCESS_ROUTER: ACCESS_ROUTER_DEVICE,
        METRO_ROUTER: METRO_ROUTER_DEVICE, METRO_SWITCH: METRO_SWITCH_DEVICE,
        CORE_IP_WDM: CORE_DEVICE,
    }
    dev.update(cfg.device_overrides)
    lan = {AF: AF_LAN, MF: MF_LAN, CDC: CDC_LAN}
    lan.update(cfg.lan_overrides)

    # Seeded zone assignment: balanced deal, then shuffle.
    zones = [(i % cfg.zone_count) + 1 for i in range(cfg.iot_count)]
    random.Random(cfg.seed).shuffle(zones)

    width = max(2, len(str(cfg.iot_count - 1)))
    nodes: list[Node] = []
    links: list[tuple[str, str]] = []

    for i in range(cfg.iot_count):
        nid = f"iot_{i:0{width}d}"
        nodes.append(Node(nid, IOT, server=IOT_SERVER,
                          server_count_max=cfg.ns_iot, zone=zones[i]))
        links.append((nid, f"onu_{zones[i]}"))
    for z in range(1, cfg.zone_count + 1):
        nodes.append(Node(f"onu_{z}", ONU, device=dev[ONU], zone=z))
        links.append((f"onu_{z}", "olt"))
    nodes.append(Node("olt", OLT, device=dev[OLT]))
    nodes.append(Node("access_router", ACCESS_ROUTER, device=dev[ACCESS_ROUTER]))
    links.append(("olt", "access_router"))
    nodes.append(Node("af", AF, server=AF_SERVER, server_count_max=cfg.ns_af,
                      lan=lan[AF], pue_pr=cfg.pue_af))
    links.append(("access_router", "af"))
    nodes.append(Node("metro_router", METRO_ROUTER, device=dev[METRO_ROUTER]))
    links.append(("olt", "metro_router"))
    nodes.append(Node("metro_switch", METRO_SWITCH, device=dev[METRO_SWITCH]))
    links.append(("metro_router", "metro_switch"))
    nodes.append(Node("mf", MF, server=MF_SERVER, server_count_max=cfg.ns_mf,
                      lan=lan[MF], pue_pr=cfg.pue_mf))
    links.append(("metro_switch", "mf"))
    for c in range(1, cfg.core_count + 1):
        nodes.append(Node(f"core_{c}", CORE_IP_WDM, device=dev[CORE_IP_WDM],
                          pue_net=cfg.pue_core))
        links.append((f"core_{c - 1}" if c > 1 else "metro_switch", f"core_{c}"))
    nodes.append(Node("cdc", CDC, server=CDC_SERVER, server_count_max=cfg.ns_cdc,
                      lan=lan[CDC], pue_pr=cfg.pue_cdc))
    links.append((f"core_{cfg.core_count}", "cdc"))

    return CfnTopology(nodes=nodes, links=links,
                       idle_share_delta=cfg.idle_share_delta)


def validate_topology(t: CfnTopology) -> list[str]:
    """Return a list of invariant violations; empty means valid."""
    report: list[str] = []
    seen: set[str] = set()
    for n in t.nodes:
        if n.id in seen:
            report.append(f"duplicate id: {n.id}")
        seen.add(n.id)
        if n.kind not in NODE_KINDS:
            report.append(f"unknown kind {n.kind!r} on node {n.id}")
        if n.is_processing:
            if n.kind not in PROCESSING_KINDS:
                report.append(f"node {n.id}: kind {n.kind} cannot carry servers")
            if n.server_count_max < 1:
                report.append(f"node {n.id}: processing node needs server_count_max >= 1")
        elif n.kind in PROCESSING_KINDS:
            report.append(f"node {n.id}: kind {n.kind} must carry a server profile")
        if n.pue_net < 1 or n.pue_pr < 1:
            report.append(f"node {n.id}: PUE factors must be >= 1")
        for prof in (n.device, n.server):
            if prof is not None:
                try:
                    prof.validate()
                except ConfigurationError as exc:
                    report.append(f"node {n.id}: {exc}")
        if n.lan is not None:
            try:
                n.lan.validate()
            except ConfigurationError as exc:
                report.append(f"node {n.id}: {exc}")
    if not (0 <= t.idle_share_delta <= 1):
        report.append("idle_share_delta must lie in [0, 1]")
    for a, b in t.links:
        if a == b:
            report.append(f"self-loop at {a}")
        for end in (a, b):
            if end not in seen:
                report.append(f"link ({a}, {b}): unknown endpoint {end}")
    if t.nodes:
        start = t.nodes[0].id
        reached = {start}
        stack = [start]
        while stack:
            for nbr in t.neighbors(stack.pop()):
                if nbr not in reached:
                    reached.add(nbr)
                    stack.append(nbr)
        missing = sorted(set(n.id for n in t.nodes) - reached)
        if missing:
            report.append("disconnected: unreachable nodes " + ", ".join(missing))
    return report


def node_transit_cost(t: CfnTopology, node: Node) -> float:
    """Per-Gbps metering cost of carrying traffic through a network node."""
    if node.is_processing or node.device is None:
        return 0.0
    return node.pue_net * energy_per_bit(node.device)


def min_power_path(t: CfnTopology, b: str, e: str) -> list[str]:
    """Cheapest path from b to e under per-node PUE-weighted energy per bit.

    Returns the full node sequence including the endpoints (processing nodes
    cost nothing); ties break on the lexicographically smallest id sequence.
    Returns [] when b == e.
    """
    if not t.has_node(b) or not t.has_node(e):
        raise NoPathError(f"unknown endpoint: {b if not t.has_node(b) else e}")
    if b == e:
        return []
    costs = {n.id: node_transit_cost(t, n) for n in t.nodes}
    start_cost = costs[b]
    best: dict[str, tuple[float, tuple[str, ...]]] = {}
    heap: list[tuple[float, tuple[str, ...]]] = [(start_cost, (b,))]
    while heap:
        cost, path = heapq.heappop(heap)
        tail = path[-1]
        if tail in best and best[tail] <= (cost, path):
            continue
        best[tail] = (cost, path)
        if tail == e:
            return list(path)
        for nbr in t.neighbors(tail):
            if nbr in path:
                continue
            cand = (cost + costs[nbr], path + (nbr,))
            if nbr not in best or cand < best[nbr]:
                heapq.heappush(heap, cand)
    raise NoPathError(f"no path between {b} and {e}")


def path_cost(t: CfnTopology, path: list[str]) -> float:
    """Sum of transit costs over the nodes of a path (W per Gbps)."""
    return math.fsum(node_transit_cost(t, t.node(nid)) for nid in path)


# ---------------------------------------------------------------------------
# Serialization (JSON shape mandated by the external interface)

def _profile_to_dict(p: DeviceProfile) -> dict:
    return {"name": p.name, "max_power": p.max_power,
            "idle_power": p.idle_power, "capacity": p.capacity}


def topology_to_dict(t: CfnTopology) -> dict:
    nodes = []
    for n in t.nodes:
        d: dict = {"id": n.id, "kind": n.kind}
        if n.device is not None:
            d["device"] = _profile_to_dict(n.device)
        if n.server is not None:
            d["server"] = dict(_profile_to_dict(n.server),
                               count_max=n.server_count_max)
        if n.lan is not None:
            d["lan"] = {"max_power": n.lan.max_power,
                        "idle_power": n.lan.idle_power,
                        "capacity": n.lan.capacity}
        d["pue_net"] = n.pue_net
        d["pue_pr"] = n.pue_pr
        d["zone"] = n.zone
        d["shared"] = bool(n.device.shared) if n.device is not None else False
        nodes.append(d)
    return {"nodes": nodes, "links": [list(l) for l in t.links],
            "idle_share_delta": t.idle_share_delta}


def topology_from_dict(data: dict) -> CfnTopology:
    nodes = []
    for d in data["nodes"]:
        device = None
        if "device" in d:
            dd = d["device"]
            device = DeviceProfile(dd["name"], dd["max_power"], dd["idle_power"],
                                   dd["capacity"], shared=bool(d.get("shared", False)))
        server = None
        count_max = 0
        if "server" in d:
            sd = d["server"]
            server = DeviceProfile(sd["name"], sd["max_power"], sd["idle_power"],
                                   sd["capacity"])
            count_max = int(sd.get("count_max", 1))
        lan = None
        if "lan" in d:
            ld = d["lan"]
            lan = LanProfile(ld["max_power"], ld["idle_power"], ld["capacity"])
        nodes.append(Node(d["id"], d["kind"], device=device, server=server,
                          server_count_max=count_max, lan=lan,
                          pue_net=d.get("pue_net", 1.0),
                          pue_pr=d.get("pue_pr", 1.0),
                          zone=d.get("zone")))
    links = [tuple(l) for l in data["links"]]
    return CfnTopology(nodes=nodes, links=links,
                       idle_share_delta=data.get("idle_share_delta", 0.03))


def save_topology(t: CfnTopology, path) -> None:
    with open(path, "w") as fh:
        json.dump(topology_to_dict(t), fh, indent=2)
        fh.write("\n")


def load_topology(path) -> CfnTopology:
    with open(path) as fh:
        return topology_from_dict(json.load(fh))
