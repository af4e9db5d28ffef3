"""cfnplace: power-minimizing embedding of VM service graphs on a cloud-fog
network, with an exact MILP formulation, exact and heuristic solvers, LP
export, and an experiment harness."""

from .errors import (CapacityExceededError, CfnError, ConfigurationError,
                     InfeasibleError, InputError, NoPathError)
from .power import (COUNT_ONCE, COUNT_TWICE, Placement, PowerBreakdown,
                    aggregate_traffic, evaluate_placement, network_power,
                    processing_power, servers_required, build_placement)
from .topology import (CfnTopology, DefaultTopologyConfig, DeviceProfile,
                       LanProfile, Node, build_default_cfn, energy_per_bit,
                       min_power_path, validate_topology)
from .workload import (VirtualLink, VmNode, Vsr, WorkloadSpec, generate_vsrs,
                       total_demand, validate_vsr)
from .milp import MilpModel, SolutionCheckReport, check_solution, formulate
from .lp_format import export_lp, parse_lp, write_lp
from .solver import (BranchAndBound, Enumeration, FixedLayer, Heuristic,
                     Solution, solve, solve_branch_and_bound,
                     solve_exact_enumeration, solve_fixed_layer,
                     solve_heuristic, solution_to_dict)
from .harness import (Scenario, ResultRow, default_scenario, load_scenario,
                      run_sweep, savings_summary, write_csv)

__version__ = "0.1.0"
