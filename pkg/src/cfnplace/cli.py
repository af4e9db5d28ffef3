"""Command line interface.

Subcommands: sweep (run a scenario file, write CSV, print savings), solve
(single instance, solution JSON to stdout), export-lp (write the model in LP
text format), validate (check a topology or VSR file).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness, lp_format, milp
from .errors import CfnError
from .solver import BranchAndBound, Enumeration, FixedLayer, Heuristic, solve, solution_to_dict
from .topology import load_topology, validate_topology
from .workload import load_vsrs, validate_vsr

STRATEGIES = {
    "cfn": BranchAndBound(),
    "enum": Enumeration(),
    "heur": Heuristic(),
    "cdc": FixedLayer("CDC"),
    "af": FixedLayer("AF"),
    "mf": FixedLayer("MF"),
}


def _cmd_sweep(args) -> int:
    scenario = harness.load_scenario(args.scenario)
    table = harness.run_sweep(scenario)
    out = args.output or scenario.output
    harness.write_csv(table, out)
    print(f"wrote {len(table)} rows to {out}")
    if "CFN" in scenario.strategies and "CDC" in scenario.strategies:
        s = harness.savings_summary(table, "CDC", "CFN")
        print(f"CFN vs CDC savings: avg={s['avg']:.1f}% "
              f"min={s['min']:.1f}% max={s['max']:.1f}%")
    return 0


def _cmd_solve(args) -> int:
    topology = load_topology(args.topology)
    vsrs = load_vsrs(args.vsrs)
    sol = solve(topology, vsrs, STRATEGIES[args.strategy])
    print(json.dumps(solution_to_dict(sol), indent=2))
    if sol.status == "infeasible":
        print(f"infeasible: {sol.detail}", file=sys.stderr)
        return 1
    return 0


def _cmd_export_lp(args) -> int:
    topology = load_topology(args.topology)
    vsrs = load_vsrs(args.vsrs)
    model = milp.formulate(topology, vsrs)
    lp_format.export_lp(model, args.out)
    print(f"wrote {len(model.variables)} variables, "
          f"{len(model.constraints)} constraints to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    with open(args.file) as fh:
        data = json.load(fh)
    if "nodes" in data:
        topology = load_topology(args.file)
        report = validate_topology(topology)
    elif "vsrs" in data:
        vsrs = load_vsrs(args.file)
        report = [f"VSR {v.id}: {msg}" for v in vsrs for msg in validate_vsr(v)]
    else:
        print("unrecognized file: expected a topology or VSR document",
              file=sys.stderr)
        return 2
    if report:
        for line in report:
            print(line, file=sys.stderr)
        return 1
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfnplace",
        description="Power-minimizing placement of virtual service requests "
                    "on a cloud-fog network")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a scenario sweep and write CSV")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--output", help="override the scenario's CSV destination")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("topology", help="topology JSON file")
    p.add_argument("vsrs", help="VSR batch JSON file")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="cfn")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("export-lp", help="export the MILP in LP text format")
    p.add_argument("topology")
    p.add_argument("vsrs")
    p.add_argument("out")
    p.set_defaults(func=_cmd_export_lp)

    p = sub.add_parser("validate", help="validate a topology or VSR file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CfnError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
