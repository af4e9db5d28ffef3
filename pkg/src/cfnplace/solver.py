"""Placement solvers: enumeration oracle, exact branch-and-bound, greedy
heuristic with local search, and the fixed-layer baselines.

All solvers share the same evaluation code path (power.evaluate_placement
over min-power routing), so objectives are directly comparable.  Tie-breaks
are lexicographic on (vsr-id, vm-id, node-id) throughout, which makes every
solver deterministic.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field

from .errors import (CapacityExceededError, ConfigurationError, InfeasibleError,
                     InputError)
from .power import (COUNT_ONCE, Placement, PowerBreakdown, aggregate_traffic,
                    evaluate_placement, min_power_path)
from .topology import CfnTopology, Node, energy_per_bit
from .workload import Vsr

_CAP_EPS = 1e-9


@dataclass
class Solution:
    status: str  # "optimal" | "feasible" | "infeasible"
    placement: Placement | None = None
    breakdown: PowerBreakdown | None = None
    objective: float | None = None
    gap: float | None = None
    nodes_explored: int = 0
    wall_time: float = 0.0
    detail: str = ""


@dataclass(frozen=True)
class Enumeration:
    max_configurations: int = 10 ** 7


@dataclass(frozen=True)
class BranchAndBound:
    epsilon: float = 0.0
    node_limit: int | None = None
    use_bound: bool = True
    # start from the heuristic solution as the incumbent; the search then only
    # has to prove optimality (or improve on it), which prunes far earlier
    seed_incumbent: bool = True


@dataclass(frozen=True)
class Heuristic:
    seed: int = 0
    restarts: int = 1
    move_budget: int = 2000


@dataclass(frozen=True)
class FixedLayer:
    layer: str  # "CDC" | "AF" | "MF"


def solution_to_dict(sol: Solution) -> dict:
    assignment = []
    if sol.placement is not None:
        for (r, s), node in sorted(sol.placement.assign.items()):
            assignment.append({"vsr": r, "vm": s, "node": node})
    return {
        "status": sol.status,
        "objective_w": sol.objective,
        "gap": sol.gap,
        "assignment": assignment,
        "breakdown": sol.breakdown.to_dict() if sol.breakdown else None,
        "nodes_explored": sol.nodes_explored,
        "wall_time_s": sol.wall_time,
    }


def _free_vms(vsrs: list[Vsr]) -> list[tuple[int, int, float]]:
    return [(v.id, vm.id, vm.flops_demand) for v in vsrs for vm in v.free_vms()]


def _pinned_assign(vsrs: list[Vsr]) -> dict[tuple[int, int], str]:
    return {(v.id, v.input_vm().id): v.source_iot for v in vsrs}


class _Instance:
    """Precomputed per-instance data shared by the search-based solvers."""

    def __init__(self, topology: CfnTopology, vsrs: list[Vsr], mode: str = COUNT_ONCE):
        self.topology = topology
        self.vsrs = vsrs
        self.mode = mode
        self.proc = topology.processing_nodes()
        self.proc_ids = [p.id for p in self.proc]
        self.by_id = {p.id: p for p in self.proc}
        self.sources = {v.source_iot for v in vsrs}
        # all-pairs min-power routes between processing nodes
        self.routes: dict[tuple[str, str], list[str]] = {}
        self.route_nodes: dict[tuple[str, str], list[Node]] = {}
        self.route_prop: dict[tuple[str, str], float] = {}
        weight = 2.0 if mode == "count-twice" else 1.0
        for b in self.proc_ids:
            for e in self.proc_ids:
                if b == e:
                    continue
                path = min_power_path(topology, b, e)
                self.routes[(b, e)] = path
                transit = [topology.node(nid) for nid in path
                           if topology.node(nid).is_network
                           and not topology.node(nid).is_processing]
                self.route_nodes[(b, e)] = transit
                self.route_prop[(b, e)] = weight * math.fsum(
                    n.pue_net * energy_per_bit(n.device) for n in transit)
        self.weight = weight
        # gateway network node of degree-1 processing nodes (for symmetry:
        # such nodes are interchangeable behind one gateway)
        self.gateway: dict[str, str | None] = {}
        for p in self.proc:
            nbrs = topology.neighbors(p.id)
            gw = None
            if len(nbrs) == 1:
                n = topology.node(nbrs[0])
                if n.is_network and not n.is_processing:
                    gw = n.id
            self.gateway[p.id] = gw
        # On a tree (unique paths) every network node between a VSR's source
        # and any node hosting one of its VMs ends up carrying traffic, as
        # long as that VM is reachable from the input over positive-bitrate
        # virtual links.  The bound uses this to charge unavoidable idles.
        parent = {n.id: n.id for n in topology.nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        self.is_tree = True
        for a, b in topology.links:
            ra, rb = find(a), find(b)
            if ra == rb:
                self.is_tree = False
                break
            parent[ra] = rb
        self.src_of = {v.id: v.source_iot for v in vsrs}
        self.connected: dict[tuple[int, int], bool] = {}
        self.all_connected = True
        for v in vsrs:
            adj: dict[int, list[int]] = {}
            for l in v.vlinks:
                if l.bitrate_mbps > 0:
                    adj.setdefault(l.src, []).append(l.dst)
                    adj.setdefault(l.dst, []).append(l.src)
            seen = {v.input_vm().id}
            stack = [v.input_vm().id]
            while stack:
                for nb in adj.get(stack.pop(), []):
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            for vm in v.vms:
                c = vm.id in seen
                self.connected[(v.id, vm.id)] = c
                self.all_connected = self.all_connected and c
        self.idle_charge = {n.id: n.pue_net * topology.prorated_idle(n)
                            for n in topology.nodes
                            if n.is_network and not n.is_processing}
        self.route_idle: dict[tuple[str, str], tuple[tuple[str, float], ...]] = {}
        for (b, e), transit in self.route_nodes.items():
            self.route_idle[(b, e)] = tuple(
                (n.id, self.idle_charge[n.id]) for n in transit)
        # network nodes that any remaining VM placed at p must activate:
        # the intersection of source->p transit sets over all sources
        self.amort_path: dict[str, tuple[str, ...]] = {}
        for p in self.proc_ids:
            common: set[str] | None = None
            for src in self.sources:
                on_route = ({i for i, _ in self.route_idle[(src, p)]}
                            if src != p else set())
                common = on_route if common is None else (common & on_route)
            self.amort_path[p] = tuple(sorted(common)) if common else ()
        self.bound_strong = self.is_tree and self.all_connected and bool(self.sources)
        # interchange groups: gateways whose whole device group looks the same
        # from the rest of the network are isomorphic while untouched, so the
        # search only needs to open one representative group per class
        self.members: dict[str, list[str]] = {}
        for p in self.proc:
            gw = self.gateway[p.id]
            if gw is not None:
                self.members.setdefault(gw, []).append(p.id)
        self.group_of: dict[str, tuple] = {}
        for gw, mem in self.members.items():
            gnode = topology.node(gw)
            ext = tuple(sorted(set(topology.neighbors(gw)) - set(mem)))
            prof = tuple(sorted(
                (repr(self.by_id[m].server), self.by_id[m].server_count_max,
                 repr(self.by_id[m].lan), self.by_id[m].pue_pr,
                 self.by_id[m].kind) for m in mem))
            self.group_of[gw] = (repr(gnode.device), gnode.pue_net, ext, prof)

    def placement(self, assign: dict[tuple[int, int], str]) -> Placement:
        pl = Placement(assign=dict(assign))
        pl.routes = {pair: self.routes[pair]
                     for pair in aggregate_traffic(pl, self.vsrs)}
        return pl

    def evaluate(self, assign) -> PowerBreakdown:
        return evaluate_placement(self.placement(assign), self.vsrs,
                                  self.topology, self.mode)


class _PartialCost:
    """Cost accounting over a partial assignment.

    The committed cost covers assigned VMs and virtual links whose two
    endpoints are both assigned; everything pending contributes zero, so the
    committed cost is a valid lower bound on any completion.
    """

    def __init__(self, inst: _Instance):
        self.inst = inst
        # virtual links indexed by endpoint for incremental both-ends checks
        self.links_by_vm: dict[tuple[int, int], list] = {}
        for v in inst.vsrs:
            for l in v.vlinks:
                self.links_by_vm.setdefault((v.id, l.src), []).append((v.id, l))
                self.links_by_vm.setdefault((v.id, l.dst), []).append((v.id, l))

    def cost(self, assign: dict[tuple[int, int], str]):
        """(committed watts, per-node omega, active network node ids) or None
        when the partial assignment already violates a capacity."""
        inst = self.inst
        t = inst.topology
        omega: dict[str, float] = {}
        theta: dict[str, float] = {}
        lam: dict[str, float] = {}
        net_prop = 0.0
        for v in inst.vsrs:
            for vm in v.vms:
                p = assign.get((v.id, vm.id))
                if p is not None:
                    omega[p] = omega.get(p, 0.0) + vm.flops_demand
            for l in v.vlinks:
                b = assign.get((v.id, l.src))
                e = assign.get((v.id, l.dst))
                if b is None or e is None:
                    continue
                gbps = l.bitrate_mbps / 1000.0
                theta[b] = theta.get(b, 0.0) + gbps
                if e != b:
                    theta[e] = theta.get(e, 0.0) + gbps
                    net_prop += inst.route_prop[(b, e)] * gbps
                    for n in inst.route_nodes[(b, e)]:
                        lam[n.id] = lam.get(n.id, 0.0) + inst.weight * gbps
        total = net_prop
        for nid, traffic in lam.items():
            node = t.node(nid)
            if traffic > node.device.capacity * (1 + _CAP_EPS):
                return None
            total += node.pue_net * t.prorated_idle(node)
        for p, w in omega.items():
            node = inst.by_id[p]
            n_srv = math.ceil(w / node.server.capacity - _CAP_EPS)
            if n_srv > node.server_count_max:
                return None
            total += node.pue_pr * (energy_per_bit(node.server) * w
                                    + n_srv * node.server.idle_power)
        for p in set(omega) | set(theta):
            node = inst.by_id[p]
            if node.lan is None:
                continue
            th = theta.get(p, 0.0)
            if th > node.lan.capacity * (1 + _CAP_EPS):
                return None
            total += node.pue_pr * (energy_per_bit(node.lan) * th
                                    + node.lan.idle_power)
        return total, omega, set(lam)


def _fractional_bound(inst: _Instance, committed: float, omega: dict[str, float],
                      active_net: set[str], remaining: float,
                      assign: dict | None = None,
                      threshold: float | None = None) -> float:
    """committed + unavoidable network idles + cheapest fractional fill.

    On a tree topology every network node between a VSR's source and a node
    already hosting one of its (input-reachable) VMs must carry traffic in
    any completion, so those idles are charged outright.  The remaining
    GFLOPS then fill capacity slots: paid-for residual server capacity at the
    pure proportional rate, and fresh servers with their idle power -- plus
    the idles of still-inactive network nodes that any placement there would
    activate, and the node LAN idle -- amortized over the capacity they
    unlock.  Both extras are skipped when the instance does not support them
    (non-tree topology, or VMs unreachable from their input), which keeps the
    bound valid, just weaker.
    """
    bound = committed
    blocked = set(active_net)
    if inst.is_tree and assign is not None:
        for (r, s), p in assign.items():
            if not inst.connected.get((r, s)):
                continue
            src = inst.src_of[r]
            if p == src:
                continue
            for gid, charge in inst.route_idle[(src, p)]:
                if gid not in blocked:
                    blocked.add(gid)
                    bound += charge
    if remaining <= 0:
        return bound
    strong = inst.bound_strong
    # capacity slots: (rate, capacity, network nodes that using it activates)
    slots: list[tuple[float, float, frozenset]] = []
    for p in inst.proc:
        w = omega.get(p.id, 0.0)
        n_open = math.ceil(w / p.server.capacity - _CAP_EPS) if w > 0 else 0
        prop = p.pue_pr * energy_per_bit(p.server)
        req = (frozenset(g for g in inst.amort_path[p.id] if g not in blocked)
               if strong else frozenset())
        open_resid = n_open * p.server.capacity - w
        if open_resid > 0:
            slots.append((prop, open_resid, req))
        fresh = (p.server_count_max - n_open) * p.server.capacity
        if fresh > 0:
            rate = prop + (p.pue_pr * p.server.idle_power
                           / min(p.server.capacity, remaining))
            if strong and p.lan is not None and w <= 0:
                rate += (p.pue_pr * p.lan.idle_power
                         / min(p.server_count_max * p.server.capacity,
                               remaining))
            slots.append((rate, fresh, req))
    slots.sort(key=lambda s: (s[0], -s[1]))

    def fill(enabled: frozenset) -> float:
        left = remaining
        tot = 0.0
        for rate, cap, req in slots:
            if not req <= enabled:
                continue
            take = min(left, cap)
            tot += rate * take
            left -= take
            if left <= 0:
                return tot
        return math.inf  # not enough capacity in the enabled slots

    req_sets = sorted({s[2] for s in slots if s[2]}, key=sorted)
    if not req_sets:
        return bound + fill(frozenset())
    # first tier: amortize each idle over the capacity it can unlock -- cheap,
    # and often already enough to prune against the incumbent threshold
    group_cap: dict[str, float] = {}
    for rate, cap, req in slots:
        for gid in req:
            group_cap[gid] = group_cap.get(gid, 0.0) + cap
    extra: dict[frozenset, float] = {}
    for _, _, req in slots:
        if req and req not in extra:
            extra[req] = math.fsum(
                inst.idle_charge[g] / min(group_cap[g], remaining) for g in req)
    left = remaining
    tot = 0.0
    cheap = math.inf
    for rate, cap, req in sorted(
            ((rate + extra.get(req, 0.0), cap, req) for rate, cap, req in slots),
            key=lambda s: (s[0], -s[1])):
        take = min(left, cap)
        tot += rate * take
        left -= take
        if left <= 0:
            cheap = bound + tot
            break
    if math.isinf(cheap):
        return math.inf  # not enough capacity anywhere
    if threshold is not None and cheap >= threshold:
        return cheap
    if len(req_sets) > 7:
        return cheap
    # second tier: exact fixed-charge relaxation -- any completion activates
    # the union of the requirement sets of the slots it uses and pays those
    # idles in full, so the minimum over all activation subsets is a bound
    best = math.inf
    for mask in range(1 << len(req_sets)):
        union: frozenset = frozenset()
        for k, req in enumerate(req_sets):
            if mask >> k & 1:
                union |= req
        cost = math.fsum(inst.idle_charge[g] for g in union) + fill(union)
        if cost < best:
            best = cost
    return max(cheap, bound + best)


def solve_exact_enumeration(topology: CfnTopology, vsrs: list[Vsr],
                            limit: int = 10 ** 7,
                            mode: str = COUNT_ONCE) -> Solution:
    """Evaluate every assignment of free VMs to processing nodes."""
    start = time.perf_counter()
    inst = _Instance(topology, vsrs, mode)
    free = _free_vms(vsrs)
    cands = sorted(inst.proc_ids)
    size = len(cands) ** len(free) if free else 1
    if size > limit:
        raise ConfigurationError(
            f"search space has {size} configurations, above the limit of {limit}")
    base = _pinned_assign(vsrs)
    best = None
    explored = 0
    for combo in itertools.product(cands, repeat=len(free)):
        assign = dict(base)
        for (r, s, _), node in zip(free, combo):
            assign[(r, s)] = node
        explored += 1
        try:
            breakdown = inst.evaluate(assign)
        except CapacityExceededError:
            continue
        if best is None or breakdown.total < best[0]:
            best = (breakdown.total, assign, breakdown)
    wall = time.perf_counter() - start
    if best is None:
        return Solution(status="infeasible", nodes_explored=explored,
                        wall_time=wall, detail="no feasible assignment")
    total, assign, breakdown = best
    return Solution(status="optimal", placement=inst.placement(assign),
                    breakdown=breakdown, objective=total, gap=0.0,
                    nodes_explored=explored, wall_time=wall)


def solve_branch_and_bound(topology: CfnTopology, vsrs: list[Vsr],
                           params: BranchAndBound = BranchAndBound(),
                           mode: str = COUNT_ONCE) -> Solution:
    """Exact depth-first branch-and-bound over the assignment binaries.

    Branch order: free VMs by descending demand; candidate nodes by ascending
    PUE-weighted energy per GFLOPS.  Interchangeable untouched nodes behind
    one gateway are collapsed to a single representative.
    """
    start = time.perf_counter()
    inst = _Instance(topology, vsrs, mode)
    partial = _PartialCost(inst)
    free = sorted(_free_vms(vsrs), key=lambda x: (-x[2], x[0], x[1]))
    cands = sorted(inst.proc_ids,
                   key=lambda p: (inst.by_id[p].pue_pr
                                  * energy_per_bit(inst.by_id[p].server), p))
    base = _pinned_assign(vsrs)
    suffix_demand = [0.0] * (len(free) + 1)
    for i in range(len(free) - 1, -1, -1):
        suffix_demand[i] = suffix_demand[i + 1] + free[i][2]

    best_obj: float | None = None
    best_assign = None
    if params.seed_incumbent and free:
        warm = solve_heuristic(topology, vsrs, Heuristic(), mode)
        if warm.status != "infeasible" and warm.placement is not None:
            best_obj = warm.objective
            best_assign = dict(warm.placement.assign)
    explored = 0
    limit_hit = False
    eps = params.epsilon
    root = partial.cost(dict(base))
    root_bound = (-math.inf if root is None else
                  _fractional_bound(inst, root[0], root[1], root[2],
                                    suffix_demand[0], base))

    use_count: dict[str, int] = {}
    gw_count: dict[str, int] = {}
    for p0 in base.values():
        use_count[p0] = use_count.get(p0, 0) + 1
        gw0 = inst.gateway.get(p0)
        if gw0 is not None:
            gw_count[gw0] = gw_count.get(gw0, 0) + 1

    def sym_key(p: str, gw: str):
        node = inst.by_id[p]
        prof = (node.kind, repr(node.server), repr(node.lan),
                node.server_count_max, node.pue_pr)
        if gw_count.get(gw, 0) == 0 and gw in inst.group_of:
            # whole device group untouched: interchangeable across groups
            return ("group", inst.group_of[gw], prof)
        return ("node", gw, prof)

    def recurse(i: int, assign: dict):
        nonlocal best_obj, best_assign, explored, limit_hit
        if i == len(free):
            try:
                breakdown = inst.evaluate(assign)
            except CapacityExceededError:
                return
            if best_obj is None or breakdown.total < best_obj:
                best_obj = breakdown.total
                best_assign = dict(assign)
            return
        r, s, f = free[i]
        seen_sym: set = set()
        for p in cands:
            gw = inst.gateway[p]
            if use_count.get(p, 0) == 0 and gw is not None:
                key = sym_key(p, gw)
                if key in seen_sym:
                    continue
                seen_sym.add(key)
            if params.node_limit is not None and explored >= params.node_limit:
                limit_hit = True
                return
            explored += 1
            assign[(r, s)] = p
            use_count[p] = use_count.get(p, 0) + 1
            if gw is not None:
                gw_count[gw] = gw_count.get(gw, 0) + 1
            res = partial.cost(assign)
            if res is not None:
                committed, omega, active = res
                if params.use_bound:
                    threshold = None if best_obj is None else best_obj - eps
                    bound = _fractional_bound(inst, committed, omega, active,
                                              suffix_demand[i + 1], assign,
                                              threshold)
                else:
                    bound = 0.0
                if not (math.isinf(bound)
                        or (best_obj is not None and bound >= best_obj - eps)):
                    recurse(i + 1, assign)
            del assign[(r, s)]
            use_count[p] -= 1
            if gw is not None:
                gw_count[gw] -= 1

    recurse(0, dict(base))
    wall = time.perf_counter() - start
    if best_assign is None:
        status = "feasible" if limit_hit else "infeasible"
        return Solution(status="infeasible", nodes_explored=explored,
                        wall_time=wall, detail="no feasible assignment")
    breakdown = inst.evaluate(best_assign)
    if limit_hit:
        lower = min(max(root_bound, 0.0), breakdown.total)
        gap = max(0.0, (breakdown.total - lower) / breakdown.total)
        status = "feasible"
    else:
        gap = 0.0
        status = "optimal"
    return Solution(status=status, placement=inst.placement(best_assign),
                    breakdown=breakdown, objective=breakdown.total, gap=gap,
                    nodes_explored=explored, wall_time=wall)


def solve_heuristic(topology: CfnTopology, vsrs: list[Vsr],
                    params: Heuristic = Heuristic(),
                    mode: str = COUNT_ONCE,
                    reference_objective: float | None = None) -> Solution:
    """Greedy construction plus single-VM relocation local search."""
    start = time.perf_counter()
    inst = _Instance(topology, vsrs, mode)
    partial = _PartialCost(inst)
    cands = sorted(inst.proc_ids)
    base = _pinned_assign(vsrs)
    best: tuple[float, dict] | None = None

    for k in range(max(1, params.restarts)):
        order = sorted(_free_vms(vsrs), key=lambda x: (-x[2], x[0], x[1]))
        if k > 0:
            random.Random(params.seed + k).shuffle(order)
        assign = dict(base)
        ok = True
        for r, s, f in order:
            choice = None
            for p in cands:
                assign[(r, s)] = p
                res = partial.cost(assign)
                if res is not None and (choice is None or res[0] < choice[0]):
                    choice = (res[0], p)
            if choice is None:
                ok = False
                del assign[(r, s)]
                break
            assign[(r, s)] = choice[1]
        if not ok:
            continue
        try:
            total = inst.evaluate(assign).total
        except CapacityExceededError:
            continue
        # local search: single-VM relocations and pairwise swaps, strict
        # improvements only
        def try_current(prev_total):
            res = partial.cost(assign)
            if res is None:
                return None
            try:
                cand = inst.evaluate(assign).total
            except CapacityExceededError:
                return None
            return cand if cand < prev_total - 1e-12 else None

        free_sorted = sorted(_free_vms(vsrs))
        moves = 0
        improved = True
        while improved and moves < params.move_budget:
            improved = False
            for r, s, f in free_sorted:
                current = assign[(r, s)]
                for p in cands:
                    if p == current:
                        continue
                    assign[(r, s)] = p
                    cand_total = try_current(total)
                    if cand_total is not None:
                        total = cand_total
                        current = p
                        improved = True
                        moves += 1
                    else:
                        assign[(r, s)] = current
                    if moves >= params.move_budget:
                        break
                if moves >= params.move_budget:
                    break
            if improved or moves >= params.move_budget:
                continue
            # relocations exhausted: try exchanging the nodes of two VMs
            for ia in range(len(free_sorted)):
                ra, sa, fa = free_sorted[ia]
                for ib in range(ia + 1, len(free_sorted)):
                    rb, sb, fb = free_sorted[ib]
                    pa, pb = assign[(ra, sa)], assign[(rb, sb)]
                    if pa == pb:
                        continue
                    assign[(ra, sa)], assign[(rb, sb)] = pb, pa
                    cand_total = try_current(total)
                    if cand_total is not None:
                        total = cand_total
                        improved = True
                        moves += 1
                    else:
                        assign[(ra, sa)], assign[(rb, sb)] = pa, pb
                    if moves >= params.move_budget:
                        break
                if moves >= params.move_budget:
                    break
        if best is None or total < best[0]:
            best = (total, dict(assign))
    wall = time.perf_counter() - start
    if best is None:
        return Solution(status="infeasible", wall_time=wall,
                        detail="no feasible greedy completion")
    total, assign = best
    breakdown = inst.evaluate(assign)
    gap = None
    if reference_objective is not None and reference_objective > 0:
        gap = max(0.0, (total - reference_objective) / reference_objective)
    return Solution(status="feasible", placement=inst.placement(assign),
                    breakdown=breakdown, objective=breakdown.total, gap=gap,
                    wall_time=wall)


def solve_fixed_layer(topology: CfnTopology, vsrs: list[Vsr], layer: str,
                      mode: str = COUNT_ONCE) -> Solution:
    """Place every free VM at the designated layer, least-loaded node first."""
    start = time.perf_counter()
    inst = _Instance(topology, vsrs, mode)
    nodes = [p for p in inst.proc if p.kind == layer]
    if not nodes:
        raise ConfigurationError(f"no processing node of kind {layer!r}")
    assign = _pinned_assign(vsrs)
    load = {p.id: 0.0 for p in nodes}
    cap = {p.id: p.server_count_max * p.server.capacity for p in nodes}
    for r, s, f in _free_vms(vsrs):
        fit = [p for p in nodes if load[p.id] + f <= cap[p.id] * (1 + _CAP_EPS)]
        if not fit:
            worst = max(nodes, key=lambda p: load[p.id] / cap[p.id])
            return Solution(status="infeasible",
                            wall_time=time.perf_counter() - start,
                            detail=f"layer {layer} capacity exceeded at {worst.id}")
        target = min(fit, key=lambda p: (load[p.id] / cap[p.id], p.id))
        assign[(r, s)] = target.id
        load[target.id] += f
    try:
        breakdown = inst.evaluate(assign)
    except CapacityExceededError as exc:
        return Solution(status="infeasible", wall_time=time.perf_counter() - start,
                        detail=str(exc))
    return Solution(status="feasible", placement=inst.placement(assign),
                    breakdown=breakdown, objective=breakdown.total,
                    wall_time=time.perf_counter() - start)


def solve(topology: CfnTopology, vsrs: list[Vsr], strategy,
          mode: str = COUNT_ONCE) -> Solution:
    """Dispatch on a Strategy value."""
    if isinstance(strategy, Enumeration):
        return solve_exact_enumeration(topology, vsrs,
                                       strategy.max_configurations, mode)
    if isinstance(strategy, BranchAndBound):
        return solve_branch_and_bound(topology, vsrs, strategy, mode)
    if isinstance(strategy, Heuristic):
        return solve_heuristic(topology, vsrs, strategy, mode)
    if isinstance(strategy, FixedLayer):
        return solve_fixed_layer(topology, vsrs, strategy.layer, mode)
    raise InputError(f"unknown strategy {strategy!r}")
