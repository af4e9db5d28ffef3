"""Mixed-integer linear model of the placement problem.

Builds a solver-independent description (variables, linear constraints,
objective) matching the power evaluator exactly: assignment binaries, product
linearizations for virtual-link endpoints, aggregated inter-node traffic,
directed flow conservation, per-node traffic with activation binaries, and
the server/LAN accounting on the processing side.

The published formulation lists only the assignment, pinning and flow
constraints; the capacity and linking constraints here are this package's
canonical completion, each named so tests can target it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InputError
from .power import COUNT_ONCE, COUNT_TWICE, TRAFFIC_MODES, servers_required
from .topology import CfnTopology, energy_per_bit, min_power_path
from .workload import Vsr

BINARY = "binary"
INTEGER = "integer"
CONTINUOUS = "continuous"

INF = math.inf

FEAS_TOL = 1e-6


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = INF


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[float, str], ...]
    sense: str  # "<=", "=", ">="
    rhs: float


@dataclass
class MilpModel:
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: list[tuple[float, str]] = field(default_factory=list)
    var_index: dict = field(default_factory=dict)
    mode: str = COUNT_ONCE

    def __post_init__(self):
        self._vars_by_name = {v.name: v for v in self.variables}

    def add_var(self, key, name, kind=CONTINUOUS, lower=0.0, upper=INF) -> str:
        if name in self._vars_by_name:
            raise InputError(f"duplicate variable name {name!r}")
        v = Variable(name, kind, lower, upper)
        self.variables.append(v)
        self._vars_by_name[name] = v
        if key is not None:
            self.var_index[key] = name
        return name

    def add_constraint(self, name, terms, sense, rhs) -> None:
        for _, var in terms:
            if var not in self._vars_by_name:
                raise InputError(f"constraint {name!r} references unknown variable {var!r}")
        self.constraints.append(Constraint(name, tuple(terms), sense, rhs))

    def variable(self, name: str) -> Variable:
        return self._vars_by_name[name]


@dataclass
class SolutionCheckReport:
    residuals: dict[str, float]
    violations: list[tuple[str, float]]
    feasible: bool
    objective: float


def _vm_candidates(vsr: Vsr, vm_id: int, candidate_ids: list[str]) -> list[str]:
    vm = next(vm for vm in vsr.vms if vm.id == vm_id)
    return [vsr.source_iot] if vm.is_input else candidate_ids


def formulate(topology: CfnTopology, vsrs: list[Vsr],
              mode: str = COUNT_ONCE) -> MilpModel:
    """Build the full model.  Deterministic: identical inputs, identical order."""
    if mode not in TRAFFIC_MODES:
        raise InputError(f"unknown traffic mode {mode!r}")
    model = MilpModel(mode=mode)
    model._topology = topology
    model._vsrs = vsrs
    if not vsrs:
        return model

    proc = [p.id for p in topology.processing_nodes()]
    net = [n.id for n in topology.network_nodes()]

    # (a) assignment binaries; one-node fulfilment and source pinning
    for v in vsrs:
        for vm in v.vms:
            cands = _vm_candidates(v, vm.id, proc)
            for b in cands:
                fixed = vm.is_input
                model.add_var(("assign", v.id, vm.id, b),
                              f"delta_r{v.id}_s{vm.id}_{b}", BINARY,
                              lower=1.0 if fixed else 0.0, upper=1.0)
            if vm.is_input:
                model.add_constraint(
                    f"pin_r{v.id}",
                    [(1.0, model.var_index[("assign", v.id, vm.id, v.source_iot)])],
                    "=", 1.0)
            else:
                model.add_constraint(
                    f"assign_r{v.id}_s{vm.id}",
                    [(1.0, model.var_index[("assign", v.id, vm.id, b)]) for b in cands],
                    "=", 1.0)

    # (b) endpoint-product linearization and aggregated traffic
    traffic_pairs: list[tuple[str, str]] = []
    pair_seen: set[tuple[str, str]] = set()
    agg_terms: dict[tuple[str, str], list[tuple[float, str]]] = {}
    theta_terms: dict[str, list[tuple[float, str]]] = {p: [] for p in proc}
    for v in vsrs:
        for li, l in enumerate(v.vlinks):
            gbps = l.bitrate_mbps / 1000.0
            for b in _vm_candidates(v, l.src, proc):
                db = model.var_index[("assign", v.id, l.src, b)]
                for e in _vm_candidates(v, l.dst, proc):
                    de = model.var_index[("assign", v.id, l.dst, e)]
                    y = model.add_var(("y", v.id, li, b, e),
                                      f"y_r{v.id}_l{li}_{b}__{e}", CONTINUOUS,
                                      lower=0.0, upper=1.0)
                    model.add_constraint(f"ylb_r{v.id}_l{li}_{b}__{e}",
                                         [(1.0, db), (1.0, de), (-1.0, y)], "<=", 1.0)
                    model.add_constraint(f"yub1_r{v.id}_l{li}_{b}__{e}",
                                         [(1.0, y), (-1.0, db)], "<=", 0.0)
                    model.add_constraint(f"yub2_r{v.id}_l{li}_{b}__{e}",
                                         [(1.0, y), (-1.0, de)], "<=", 0.0)
                    theta_terms[b].append((gbps, y))
                    if e != b:
                        theta_terms[e].append((gbps, y))
                        if (b, e) not in pair_seen:
                            pair_seen.add((b, e))
                            traffic_pairs.append((b, e))
                        agg_terms.setdefault((b, e), []).append((gbps, y))

    for (b, e) in traffic_pairs:
        lam = model.add_var(("agg", b, e), f"lam_{b}__{e}", CONTINUOUS)
        model.add_constraint(f"agg_{b}__{e}",
                             [(1.0, lam)] + [(-c, y) for c, y in agg_terms[(b, e)]],
                             "=", 0.0)

    # (c) directed flow conservation per traffic pair
    arcs: list[tuple[str, str]] = []
    for a, b in topology.links:
        arcs.append((a, b))
        arcs.append((b, a))
    out_arcs: dict[str, list[tuple[str, str]]] = {n.id: [] for n in topology.nodes}
    in_arcs: dict[str, list[tuple[str, str]]] = {n.id: [] for n in topology.nodes}
    for m, n in arcs:
        out_arcs[m].append((m, n))
        in_arcs[n].append((m, n))
    for (b, e) in traffic_pairs:
        for m, n in arcs:
            model.add_var(("flow", b, e, m, n), f"f_{b}__{e}__{m}__{n}", CONTINUOUS)
        lam = model.var_index[("agg", b, e)]
        for node in topology.nodes:
            m = node.id
            terms = [(1.0, model.var_index[("flow", b, e, a0, a1)])
                     for a0, a1 in out_arcs[m]]
            terms += [(-1.0, model.var_index[("flow", b, e, a0, a1)])
                      for a0, a1 in in_arcs[m]]
            if m == b:
                terms.append((-1.0, lam))
            elif m == e:
                terms.append((1.0, lam))
            model.add_constraint(f"flow_{b}__{e}__{m}", terms, "=", 0.0)

    # (d) per-node traffic, activation binaries, network capacity
    for n in net:
        lamn = model.add_var(("lam_n", n), f"lamn_{n}", CONTINUOUS)
        beta = model.add_var(("beta", n), f"beta_{n}", BINARY, upper=1.0)
        terms = [(1.0, lamn)]
        for (b, e) in traffic_pairs:
            for a0, a1 in in_arcs[n]:
                terms.append((-1.0, model.var_index[("flow", b, e, a0, a1)]))
            if model.mode == COUNT_TWICE:
                for a0, a1 in out_arcs[n]:
                    terms.append((-1.0, model.var_index[("flow", b, e, a0, a1)]))
        model.add_constraint(f"lamn_{n}", terms, "=", 0.0)
        cap = topology.node(n).device.capacity
        model.add_constraint(f"netcap_{n}", [(1.0, lamn), (-cap, beta)], "<=", 0.0)

    # (e) processing side: workload, servers, LAN traffic, activation
    for p in proc:
        node = topology.node(p)
        omega = model.add_var(("omega", p), f"omega_{p}", CONTINUOUS)
        nsrv = model.add_var(("nsrv", p), f"nsrv_{p}", INTEGER,
                             upper=float(node.server_count_max))
        theta = model.add_var(("theta", p), f"theta_{p}", CONTINUOUS)
        phi = model.add_var(("phi", p), f"phi_{p}", BINARY, upper=1.0)
        wterms = [(1.0, omega)]
        for v in vsrs:
            for vm in v.vms:
                name = model.var_index.get(("assign", v.id, vm.id, p))
                if name is not None:
                    wterms.append((-vm.flops_demand, name))
        model.add_constraint(f"workload_{p}", wterms, "=", 0.0)
        model.add_constraint(f"servers_{p}",
                             [(1.0, omega), (-node.server.capacity, nsrv)], "<=", 0.0)
        model.add_constraint(f"active_{p}",
                             [(1.0, nsrv), (-float(node.server_count_max), phi)],
                             "<=", 0.0)
        model.add_constraint(f"lan_{p}",
                             [(1.0, theta)] + [(-c, y) for c, y in theta_terms[p]],
                             "=", 0.0)
        if node.lan is not None:
            model.add_constraint(f"lancap_{p}",
                                 [(1.0, theta), (-node.lan.capacity, phi)], "<=", 0.0)

    # (f) objective: network + processing power
    obj: list[tuple[float, str]] = []
    for n in net:
        node = topology.node(n)
        obj.append((node.pue_net * energy_per_bit(node.device),
                    model.var_index[("lam_n", n)]))
        obj.append((node.pue_net * topology.prorated_idle(node),
                    model.var_index[("beta", n)]))
    for p in proc:
        node = topology.node(p)
        obj.append((node.pue_pr * energy_per_bit(node.server),
                    model.var_index[("omega", p)]))
        obj.append((node.pue_pr * node.server.idle_power,
                    model.var_index[("nsrv", p)]))
        if node.lan is not None:
            obj.append((node.pue_pr * energy_per_bit(node.lan),
                        model.var_index[("theta", p)]))
            obj.append((node.pue_pr * node.lan.idle_power,
                        model.var_index[("phi", p)]))
    model.objective = obj
    return model


def complete_values(model: MilpModel, assignment: dict[tuple[int, int], str],
                    topology: CfnTopology | None = None,
                    vsrs: list[Vsr] | None = None) -> dict[str, float]:
    """Derive every model variable from a bare VM-to-node assignment.

    Flows follow min-power routing; counters (traffic, workload, servers,
    activation indicators) are recomputed the way the evaluator counts them.
    """
    topology = topology if topology is not None else getattr(model, "_topology", None)
    vsrs = vsrs if vsrs is not None else getattr(model, "_vsrs", None)
    if topology is None or vsrs is None:
        raise InputError("model lacks context; pass topology and vsrs explicitly")
    values = {v.name: 0.0 for v in model.variables}

    for v in vsrs:
        for vm in v.vms:
            node = assignment.get((v.id, vm.id))
            if node is None:
                continue
            name = model.var_index.get(("assign", v.id, vm.id, node))
            if name is not None:
                values[name] = 1.0
            values_omega = model.var_index.get(("omega", node))
            if values_omega is not None:
                values[values_omega] += vm.flops_demand

    agg: dict[tuple[str, str], float] = {}
    for v in vsrs:
        for li, l in enumerate(v.vlinks):
            b = assignment.get((v.id, l.src))
            e = assignment.get((v.id, l.dst))
            if b is None or e is None:
                continue
            gbps = l.bitrate_mbps / 1000.0
            yname = model.var_index.get(("y", v.id, li, b, e))
            if yname is not None:
                values[yname] = 1.0
            tb = model.var_index.get(("theta", b))
            if tb is not None:
                values[tb] += gbps
            if e != b:
                te = model.var_index.get(("theta", e))
                if te is not None:
                    values[te] += gbps
                agg[(b, e)] = agg.get((b, e), 0.0) + gbps

    for (b, e), gbps in agg.items():
        lam = model.var_index.get(("agg", b, e))
        if lam is not None:
            values[lam] = gbps
        route = min_power_path(topology, b, e)
        for m, n in zip(route, route[1:]):
            fname = model.var_index.get(("flow", b, e, m, n))
            if fname is not None:
                values[fname] = gbps
        for nid in route:
            node = topology.node(nid)
            if node.is_processing or node.device is None:
                continue
            lamn = model.var_index.get(("lam_n", nid))
            if lamn is not None:
                weight = 2.0 if model.mode == COUNT_TWICE else 1.0
                values[lamn] += weight * gbps

    for n in topology.network_nodes():
        lamn = model.var_index.get(("lam_n", n.id))
        beta = model.var_index.get(("beta", n.id))
        if lamn is not None and beta is not None and values[lamn] > 0:
            values[beta] = 1.0
    for p in topology.processing_nodes():
        om = model.var_index.get(("omega", p.id))
        th = model.var_index.get(("theta", p.id))
        nsrv = model.var_index.get(("nsrv", p.id))
        phi = model.var_index.get(("phi", p.id))
        if om is None:
            continue
        w = values[om]
        if nsrv is not None and w > 0:
            values[nsrv] = float(math.ceil(w / p.server.capacity - 1e-9))
        if phi is not None and (w > 0 or (th is not None and values[th] > 0)):
            values[phi] = 1.0
    return values


def check_solution(model: MilpModel, values) -> SolutionCheckReport:
    """Residual of every constraint, bound violations, recomputed objective.

    ``values`` is either a full variable-name-to-value map or a bare
    (vsr_id, vm_id) -> node assignment, which is auto-completed first.
    """
    if values and not all(isinstance(k, str) for k in values):
        values = complete_values(model, values)
    missing = [v.name for v in model.variables if v.name not in values]
    if missing:
        raise InputError(f"missing values for variables: {missing[:5]}...")

    residuals: dict[str, float] = {}
    violations: list[tuple[str, float]] = []
    for c in model.constraints:
        act = math.fsum(coef * values[var] for coef, var in c.terms)
        if c.sense == "<=":
            res = max(0.0, act - c.rhs)
        elif c.sense == ">=":
            res = max(0.0, c.rhs - act)
        else:
            res = abs(act - c.rhs)
        residuals[c.name] = res
        if res > FEAS_TOL:
            violations.append((c.name, res))
    for v in model.variables:
        x = values[v.name]
        res = max(0.0, v.lower - x) + max(0.0, x - v.upper)
        if v.kind in (BINARY, INTEGER):
            res = max(res, abs(x - round(x)))
        if res > FEAS_TOL:
            violations.append((f"bound_{v.name}", res))
    objective = math.fsum(coef * values[var] for coef, var in model.objective)
    return SolutionCheckReport(residuals=residuals, violations=violations,
                               feasible=not violations, objective=objective)
