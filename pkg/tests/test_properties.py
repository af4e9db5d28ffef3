import math

from hypothesis import given, settings, strategies as st

from cfnplace.power import servers_required
from cfnplace.topology import DeviceProfile, build_default_cfn, energy_per_bit
from cfnplace.workload import WorkloadSpec, generate_vsrs, vsrs_to_dict

TOPO = build_default_cfn()

finite = st.floats(min_value=0.0, max_value=1e6, allow_nan=False,
                   allow_infinity=False)


@given(idle=finite, extra=finite,
       cap=st.floats(min_value=1e-3, max_value=1e6))
def test_energy_per_bit_nonnegative(idle, extra, cap):
    profile = DeviceProfile("p", idle + extra, idle, cap)
    profile.validate()
    e = energy_per_bit(profile)
    assert e >= 0.0
    assert abs(e * cap - extra) < 1e-6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), count=st.integers(0, 8),
       vms=st.integers(1, 6))
def test_generator_deterministic_and_in_range(seed, count, vms):
    spec = WorkloadSpec(vsr_count=count, source_iot="iot_00", seed=seed,
                        vms_per_vsr=vms)
    a = generate_vsrs(spec, TOPO)
    b = generate_vsrs(spec, TOPO)
    assert vsrs_to_dict(a) == vsrs_to_dict(b)
    assert len(a) == count
    for v in a:
        assert 0.1 <= v.input_vm().flops_demand <= 1.0
        for vm in v.free_vms():
            assert 3.0 <= vm.flops_demand <= 10.0
        for l in v.vlinks:
            assert 1.0 <= l.bitrate_mbps <= 50.0


@settings(max_examples=100, deadline=None)
@given(omega=st.floats(min_value=1e-6, max_value=1e4),
       cap=st.floats(min_value=0.5, max_value=500.0))
def test_servers_required_covers_workload(omega, cap):
    server = DeviceProfile("s", 10.0, 1.0, cap)
    ns_max = int(math.ceil(omega / cap)) + 1
    n = servers_required(omega, server, ns_max)
    assert 1 <= n <= ns_max
    assert n * cap >= omega - 1e-6
    # one fewer server would not suffice (up to the rounding guard)
    assert (n - 1) * cap < omega + 1e-6 * cap
