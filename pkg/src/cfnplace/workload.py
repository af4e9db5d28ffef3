"""Virtual service requests: directed VM graphs with seeded random generation.

Each VSR models an inference pipeline: one input VM pinned to the IoT device
where requests originate, plus downstream VMs joined by virtual links that
carry a fixed bitrate.  Generation is a pure function of its spec.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .topology import IOT, CfnTopology


@dataclass(frozen=True)
class VmNode:
    id: int
    flops_demand: float
    is_input: bool = False


@dataclass(frozen=True)
class VirtualLink:
    src: int
    dst: int
    bitrate_mbps: float


@dataclass(frozen=True)
class Vsr:
    id: int
    vms: tuple[VmNode, ...]
    vlinks: tuple[VirtualLink, ...]
    source_iot: str

    def input_vm(self) -> VmNode:
        return next(vm for vm in self.vms if vm.is_input)

    def free_vms(self) -> list[VmNode]:
        return [vm for vm in self.vms if not vm.is_input]


PATTERNS = ("chain", "star", "random-connected")


@dataclass(frozen=True)
class WorkloadSpec:
    vsr_count: int
    source_iot: str
    seed: int = 0
    vms_per_vsr: int = 3
    flops_range: tuple[float, float] = (3.0, 10.0)
    input_flops_range: tuple[float, float] = (0.1, 1.0)
    # The source material gives no inter-VM bitrates; this default is a small
    # Mbps-scale assumption, declared rather than derived.
    bitrate_range: tuple[float, float] = (1.0, 50.0)
    vlink_pattern: str = "chain"

    def validate(self, topology: CfnTopology | None = None):
        if self.vsr_count < 0:
            raise ConfigurationError("vsr_count must be >= 0")
        if self.vms_per_vsr < 1:
            raise ConfigurationError("vms_per_vsr must be >= 1")
        if self.vlink_pattern not in PATTERNS:
            raise ConfigurationError(f"unknown vlink_pattern {self.vlink_pattern!r}")
        for lo, hi, positive in ((*self.flops_range, True),
                                 (*self.input_flops_range, True),
                                 (*self.bitrate_range, False)):
            if lo > hi or (positive and lo <= 0) or lo < 0:
                raise ConfigurationError("invalid range in workload spec")
        if topology is not None:
            if not topology.has_node(self.source_iot):
                raise ConfigurationError(f"source_iot {self.source_iot!r} not in topology")
            if topology.node(self.source_iot).kind != IOT:
                raise ConfigurationError(f"source_iot {self.source_iot!r} is not an IoT node")


def _vlinks(pattern: str, count: int, rng: random.Random, rates) -> list[VirtualLink]:
    links: list[VirtualLink] = []
    if pattern == "chain":
        edges = [(i, i + 1) for i in range(count - 1)]
    elif pattern == "star":
        edges = [(0, i) for i in range(1, count)]
    else:  # random-connected: random spanning arborescence rooted at the input
        edges = [(rng.randrange(i), i) for i in range(1, count)]
    for s, d in edges:
        links.append(VirtualLink(s, d, rng.uniform(*rates)))
    return links


def generate_vsrs(spec: WorkloadSpec, topology: CfnTopology | None = None) -> list[Vsr]:
    """Generate spec.vsr_count seeded random VSRs; VM 0 is always the input."""
    spec.validate(topology)
    rng = random.Random(spec.seed)
    vsrs: list[Vsr] = []
    for r in range(spec.vsr_count):
        vms = [VmNode(0, rng.uniform(*spec.input_flops_range), is_input=True)]
        for s in range(1, spec.vms_per_vsr):
            vms.append(VmNode(s, rng.uniform(*spec.flops_range)))
        vlinks = _vlinks(spec.vlink_pattern, spec.vms_per_vsr, rng, spec.bitrate_range)
        vsrs.append(Vsr(r, tuple(vms), tuple(vlinks), spec.source_iot))
    return vsrs


def validate_vsr(v: Vsr, topology: CfnTopology | None = None) -> list[str]:
    """Return invariant violations for one VSR; empty means valid."""
    report: list[str] = []
    ids = [vm.id for vm in v.vms]
    if len(set(ids)) != len(ids):
        report.append("duplicate VM ids")
    inputs = [vm for vm in v.vms if vm.is_input]
    if len(inputs) == 0:
        report.append("no input VM")
    elif len(inputs) > 1:
        report.append("multiple input VMs")
    for vm in v.vms:
        if vm.flops_demand <= 0:
            report.append(f"VM {vm.id}: flops_demand must be > 0")
    known = set(ids)
    for l in v.vlinks:
        if l.src == l.dst:
            report.append(f"vlink {l.src}->{l.dst}: self-loop")
        if l.src not in known or l.dst not in known:
            report.append(f"vlink {l.src}->{l.dst}: unknown endpoint")
        if l.bitrate_mbps < 0:
            report.append(f"vlink {l.src}->{l.dst}: negative bitrate")
    # weak connectivity
    if v.vms:
        adj: dict[int, set[int]] = {i: set() for i in known}
        for l in v.vlinks:
            if l.src in adj and l.dst in adj:
                adj[l.src].add(l.dst)
                adj[l.dst].add(l.src)
        start = ids[0]
        reached = {start}
        stack = [start]
        while stack:
            for nbr in adj[stack.pop()]:
                if nbr not in reached:
                    reached.add(nbr)
                    stack.append(nbr)
        if reached != known:
            report.append("not connected: VMs " +
                          ", ".join(str(i) for i in sorted(known - reached)))
    if topology is not None:
        if not topology.has_node(v.source_iot) or topology.node(v.source_iot).kind != IOT:
            report.append(f"source_iot {v.source_iot!r} is not an IoT node")
    return report


def total_demand(vsrs: list[Vsr]) -> tuple[float, float]:
    """(total GFLOPS, total Mbps) over a VSR batch."""
    gflops = sum(vm.flops_demand for v in vsrs for vm in v.vms)
    mbps = sum(l.bitrate_mbps for v in vsrs for l in v.vlinks)
    return gflops, mbps


# ---------------------------------------------------------------------------
# Serialization

def vsrs_to_dict(vsrs: list[Vsr]) -> dict:
    return {"vsrs": [{
        "id": v.id,
        "source_iot": v.source_iot,
        "vms": [{"id": vm.id, "flops": vm.flops_demand, "is_input": vm.is_input}
                for vm in v.vms],
        "vlinks": [{"src": l.src, "dst": l.dst, "mbps": l.bitrate_mbps}
                   for l in v.vlinks],
    } for v in vsrs]}


def vsrs_from_dict(data: dict) -> list[Vsr]:
    out = []
    for d in data["vsrs"]:
        vms = tuple(VmNode(vm["id"], vm["flops"], bool(vm.get("is_input", False)))
                    for vm in d["vms"])
        vlinks = tuple(VirtualLink(l["src"], l["dst"], l["mbps"]) for l in d["vlinks"])
        out.append(Vsr(d["id"], vms, vlinks, d["source_iot"]))
    return out


def save_vsrs(vsrs: list[Vsr], path) -> None:
    with open(path, "w") as fh:
        json.dump(vsrs_to_dict(vsrs), fh, indent=2)
        fh.write("\n")


def load_vsrs(path) -> list[Vsr]:
    with open(path) as fh:
        return vsrs_from_dict(json.load(fh))
