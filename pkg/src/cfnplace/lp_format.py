"""Line-oriented LP text export and a matching reader for round-trip checks.

Layout: "Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End".
One constraint per line, space-separated terms, repr-precision coefficients
so that parsing reproduces every float exactly.
"""

from __future__ import annotations

import math

from .errors import InputError
from .milp import BINARY, CONTINUOUS, INF, INTEGER, MilpModel, Variable


def _num(x: float) -> str:
    return repr(float(x))


def _terms_str(terms) -> str:
    if not terms:
        return "0"
    parts = []
    for i, (coef, var) in enumerate(terms):
        mag = _num(abs(coef))
        if i == 0:
            parts.append(f"{'-' if coef < 0 else ''}{mag} {var}")
        else:
            parts.append(f"{'-' if coef < 0 else '+'} {mag} {var}")
    return " ".join(parts)


def write_lp(model: MilpModel) -> str:
    lines = ["Minimize", f" obj: {_terms_str(model.objective)}", "Subject To"]
    for c in model.constraints:
        lines.append(f" {c.name}: {_terms_str(c.terms)} {c.sense} {_num(c.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.lower == v.upper:
            lines.append(f" {v.name} = {_num(v.lower)}")
        elif math.isinf(v.upper):
            lines.append(f" {v.name} >= {_num(v.lower)}")
        else:
            lines.append(f" {_num(v.lower)} <= {v.name} <= {_num(v.upper)}")
    generals = [v.name for v in model.variables if v.kind == INTEGER]
    if generals:
        lines.append("Generals")
        lines.append(" " + " ".join(generals))
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binaries")
        lines.append(" " + " ".join(binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: MilpModel, destination) -> str:
    """Write the model to ``destination`` (a path); returns the text."""
    text = write_lp(model)
    with open(destination, "w") as fh:
        fh.write(text)
    return text


def _parse_terms(tokens: list[str]):
    terms = []
    sign = 1.0
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
            i += 1
            continue
        if tok == "-":
            sign = -1.0
            i += 1
            continue
        neg = tok.startswith("-")
        coef = float(tok.lstrip("+-"))
        var = tokens[i + 1] if i + 1 < len(tokens) else None
        if var is None:
            if coef == 0 and len(tokens) == 1:
                return []  # empty objective written as "0"
            raise InputError("dangling coefficient in LP terms")
        terms.append((sign * (-coef if neg else coef), var))
        sign = 1.0
        i += 2
    return terms


def parse_lp(text: str) -> MilpModel:
    """Parse LP text produced by write_lp back into a model."""
    section = None
    objective = []
    constraints = []  # (name, terms, sense, rhs)
    bounds: dict[str, tuple[float, float]] = {}
    var_order: list[str] = []
    seen: set[str] = set()
    kinds: dict[str, str] = {}

    def note_var(name):
        if name not in seen:
            seen.add(name)
            var_order.append(name)

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line in ("Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End"):
            section = line
            continue
        if section == "Minimize":
            body = line.split(":", 1)[1] if ":" in line else line
            objective = _parse_terms(body.split())
            for _, var in objective:
                note_var(var)
        elif section == "Subject To":
            if ":" not in line:
                raise InputError(f"malformed constraint line: {line!r}")
            name, body = line.split(":", 1)
            tokens = body.split()
            sense_idx = next((i for i, t in enumerate(tokens)
                              if t in ("<=", "=", ">=")), None)
            if sense_idx is None:
                raise InputError(f"constraint {name!r}: missing sense")
            terms = _parse_terms(tokens[:sense_idx])
            rhs = float(tokens[sense_idx + 1])
            constraints.append((name.strip(), terms, tokens[sense_idx], rhs))
            for _, var in terms:
                note_var(var)
        elif section == "Bounds":
            tokens = line.split()
            if len(tokens) == 5 and tokens[1] == "<=" and tokens[3] == "<=":
                name = tokens[2]
                bounds[name] = (float(tokens[0]), float(tokens[4]))
            elif len(tokens) == 3 and tokens[1] == ">=":
                name = tokens[0]
                bounds[name] = (float(tokens[2]), INF)
            elif len(tokens) == 3 and tokens[1] == "=":
                name = tokens[0]
                bounds[name] = (float(tokens[2]), float(tokens[2]))
            else:
                raise InputError(f"malformed bounds line: {line!r}")
            note_var(name)
        elif section == "Generals":
            for name in line.split():
                kinds[name] = INTEGER
                note_var(name)
        elif section == "Binaries":
            for name in line.split():
                kinds[name] = BINARY
                note_var(name)
        elif section == "End" or section is None:
            raise InputError(f"unexpected content outside sections: {line!r}")

    variables = []
    for name in var_order:
        lo, up = bounds.get(name, (0.0, INF))
        variables.append(Variable(name, kinds.get(name, CONTINUOUS), lo, up))
    model = MilpModel(variables=variables)
    for name, terms, sense, rhs in constraints:
        model.add_constraint(name, terms, sense, rhs)
    model.objective = objective
    return model
