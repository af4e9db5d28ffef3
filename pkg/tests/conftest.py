"""Shared fixtures: the default topology and a small 6-candidate variant."""

import pytest

from cfnplace.topology import DefaultTopologyConfig, build_default_cfn
from cfnplace.workload import WorkloadSpec, generate_vsrs


@pytest.fixture(scope="session")
def default_topology():
    return build_default_cfn()


@pytest.fixture(scope="session")
def small_topology():
    """3 IoT devices in one zone: 6 processing nodes, 13 nodes total."""
    return build_default_cfn(DefaultTopologyConfig(iot_count=3, zone_count=1))


def make_vsrs(topology, count, seed, vms_per_vsr=3, source="iot_00", **kw):
    spec = WorkloadSpec(vsr_count=count, source_iot=source, seed=seed,
                        vms_per_vsr=vms_per_vsr, **kw)
    return generate_vsrs(spec, topology)


# (vsr_count, vms_per_vsr) cycle for the oracle-equivalence corpus; every
# instance has at most 6 free VMs on the 6-candidate small topology
CORPUS_SHAPES = [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2),
                 (1, 2), (2, 2), (3, 2), (2, 3), (3, 3)]


def corpus_instance(topology, i):
    count, vms = CORPUS_SHAPES[i % len(CORPUS_SHAPES)]
    return make_vsrs(topology, count, seed=100 + i, vms_per_vsr=vms)
