#!/usr/bin/env python3
"""LP solve backend: reads a CPLEX-LP file, solves it with scipy's HiGHS
interface, and writes a HiGHS-raw-style solution file.

Usage: scipy_backend.py MODEL.lp OUT.sol [--time-limit SECONDS]
"""

import sys

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

INF = float("inf")

SECTION_KEYWORDS = {
    "minimize": "objective",
    "minimise": "objective",
    "min": "objective",
    "maximize": "objective_max",
    "maximise": "objective_max",
    "max": "objective_max",
    "subject": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "bound": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "bin": "binaries",
    "general": "generals",
    "generals": "generals",
    "gen": "generals",
    "end": "end",
}

SENSES = {"<": "<=", "<=": "<=", "=<": "<=", ">": ">=", ">=": ">=", "=>": ">=", "=": "="}


def try_number(tok):
    try:
        return float(tok)
    except ValueError:
        low = tok.lower()
        if low in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        if low in ("-inf", "-infinity"):
            return -INF
        return None


class Model:
    def __init__(self):
        self.maximize = False
        self.var_index = {}
        self.var_names = []
        self.lb = []
        self.ub = []
        self.integrality = []
        self.obj = {}
        # rows: (name, {var: coef}, sense, rhs)
        self.rows = []

    def var(self, name):
        idx = self.var_index.get(name)
        if idx is None:
            idx = len(self.var_names)
            self.var_index[name] = idx
            self.var_names.append(name)
            self.lb.append(0.0)
            self.ub.append(INF)
            self.integrality.append(0)
        return idx


def split_sections(text):
    """Returns {section: [(lineno, token), ...]} with comments stripped."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("\\", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        first = tokens[0].lower()
        if first in SECTION_KEYWORDS:
            kind = SECTION_KEYWORDS[first]
            if kind == "end":
                break
            if kind == "constraints" and first == "subject":
                tokens = tokens[2:] if len(tokens) > 1 and tokens[1].lower() == "to" else tokens[1:]
            else:
                tokens = tokens[1:]
            current = "objective" if kind == "objective_max" else kind
            sections.setdefault(current, [])
            if kind == "objective_max":
                sections["__maximize__"] = [(lineno, "1")]
        if current is None:
            raise SystemExit(f"lp parse error at line {lineno}: tokens before the first section")
        sections.setdefault(current, []).extend((lineno, t) for t in tokens)
    return sections


def parse_terms(model, tokens, pos, stop_at_sense):
    """Parses a linear expression; returns (coeffs dict, pos, sense or None)."""
    coeffs = {}
    sign = 1.0
    pending = None
    while pos < len(tokens):
        lineno, tok = tokens[pos]
        if tok in SENSES and stop_at_sense:
            if pending is not None:
                raise SystemExit(f"lp parse error at line {lineno}: dangling coefficient")
            return coeffs, pos + 1, SENSES[tok]
        if tok.endswith(":") or (pos + 1 < len(tokens) and tokens[pos + 1][1] == ":"):
            if pending is not None:
                raise SystemExit(f"lp parse error at line {lineno}: dangling coefficient")
            return coeffs, pos, None  # next row starts
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -sign
        else:
            num = try_number(tok)
            if num is not None:
                if pending is not None:
                    raise SystemExit(f"lp parse error at line {lineno}: two numbers in a row")
                pending = num
            else:
                coef = sign * (pending if pending is not None else 1.0)
                idx = model.var(tok)
                coeffs[idx] = coeffs.get(idx, 0.0) + coef
                sign = 1.0
                pending = None
        pos += 1
    if pending is not None:
        raise SystemExit("lp parse error: dangling coefficient at end of section")
    return coeffs, pos, None


def parse_objective(model, tokens):
    pos = 0
    if pos < len(tokens) and tokens[pos][1].endswith(":"):
        pos += 1
    coeffs, pos, _ = parse_terms(model, tokens, pos, stop_at_sense=False)
    model.obj = coeffs


def parse_constraints(model, tokens):
    pos = 0
    rowno = 0
    while pos < len(tokens):
        lineno, tok = tokens[pos]
        if tok.endswith(":"):
            name = tok[:-1]
            pos += 1
        elif pos + 1 < len(tokens) and tokens[pos + 1][1] == ":":
            name = tok
            pos += 2
        else:
            name = f"r{rowno}"
        coeffs, pos, sense = parse_terms(model, tokens, pos, stop_at_sense=True)
        if sense is None:
            raise SystemExit(f"lp parse error at line {lineno}: constraint '{name}' has no sense")
        if pos >= len(tokens):
            raise SystemExit(f"lp parse error: constraint '{name}' missing rhs")
        neg = False
        if tokens[pos][1] in ("+", "-"):
            neg = tokens[pos][1] == "-"
            pos += 1
        rhs = try_number(tokens[pos][1])
        if rhs is None:
            raise SystemExit(f"lp parse error at line {tokens[pos][0]}: bad rhs '{tokens[pos][1]}'")
        pos += 1
        model.rows.append((name, coeffs, sense, -rhs if neg else rhs))
        rowno += 1


def parse_bounds(model, tokens):
    # group back into lines for the line-oriented bound grammar
    lines = {}
    for lineno, tok in tokens:
        lines.setdefault(lineno, []).append(tok)
    for lineno in sorted(lines):
        toks = lines[lineno]
        if len(toks) == 2 and toks[1].lower() == "free":
            idx = model.var(toks[0])
            model.lb[idx], model.ub[idx] = -INF, INF
            continue
        if len(toks) == 3:
            a, op, c = toks
            na, nc = try_number(a), try_number(c)
            if na is None and nc is not None:
                idx = model.var(a)
                if op in ("<=", "<", "=<"):
                    model.ub[idx] = nc
                elif op in (">=", ">", "=>"):
                    model.lb[idx] = nc
                elif op == "=":
                    model.lb[idx] = model.ub[idx] = nc
                else:
                    raise SystemExit(f"lp parse error at line {lineno}: bad bound operator")
                continue
            if na is not None and nc is None:
                idx = model.var(c)
                if op in ("<=", "<", "=<"):
                    model.lb[idx] = na
                elif op in (">=", ">", "=>"):
                    model.ub[idx] = na
                else:
                    raise SystemExit(f"lp parse error at line {lineno}: bad bound operator")
                continue
        if len(toks) == 5:
            lo, op1, name, op2, hi = toks
            nlo, nhi = try_number(lo), try_number(hi)
            if nlo is None or nhi is None or op1 not in ("<=", "<", "=<") or op2 not in ("<=", "<", "=<"):
                raise SystemExit(f"lp parse error at line {lineno}: bad range bound")
            idx = model.var(name)
            model.lb[idx], model.ub[idx] = nlo, nhi
            continue
        raise SystemExit(f"lp parse error at line {lineno}: unrecognized bound '{' '.join(toks)}'")


def parse_lp(path):
    with open(path, "r") as fh:
        text = fh.read()
    sections = split_sections(text)
    model = Model()
    model.maximize = "__maximize__" in sections
    parse_objective(model, sections.get("objective", []))
    parse_constraints(model, sections.get("constraints", []))
    parse_bounds(model, sections.get("bounds", []))
    for _, tok in sections.get("binaries", []):
        idx = model.var(tok)
        model.integrality[idx] = 1
        model.lb[idx] = max(model.lb[idx], 0.0)
        model.ub[idx] = min(model.ub[idx], 1.0)
    for _, tok in sections.get("generals", []):
        model.integrality[model.var(tok)] = 1
    return model


def fmt(x):
    return "%.15g" % x


def write_solution(path, status, model=None, x=None, objective=None, row_acts=None, row_duals=None):
    with open(path, "w") as fh:
        fh.write("Model status\n%s\n" % status)
        if status != "Optimal":
            return
        fh.write("\n# Primal solution values\nFeasible\n")
        fh.write("Objective %s\n" % fmt(objective))
        fh.write("# Columns %d\n" % len(model.var_names))
        for name, val in zip(model.var_names, x):
            fh.write("%s %s\n" % (name, fmt(val)))
        fh.write("# Rows %d\n" % len(model.rows))
        for (name, _, _, _), act in zip(model.rows, row_acts):
            fh.write("%s %s\n" % (name, fmt(act)))
        fh.write("\n# Dual solution values\n")
        if row_duals is None:
            fh.write("None\n")
        else:
            fh.write("Feasible\n")
            fh.write("# Columns 0\n")
            fh.write("# Rows %d\n" % len(model.rows))
            for (name, _, _, _), dual in zip(model.rows, row_duals):
                fh.write("%s %s\n" % (name, fmt(dual)))


def main():
    args = [a for a in sys.argv[1:] if a]
    time_limit = None
    if "--time-limit" in args:
        i = args.index("--time-limit")
        time_limit = float(args[i + 1])
        del args[i : i + 2]
    if len(args) != 2:
        raise SystemExit(__doc__)
    lp_path, sol_path = args

    model = parse_lp(lp_path)
    n = len(model.var_names)
    if n == 0:
        raise SystemExit("lp parse error: model has no variables")

    c = np.zeros(n)
    for idx, coef in model.obj.items():
        c[idx] = coef
    if model.maximize:
        c = -c

    ub_i, ub_v, ub_j, b_ub = [], [], [], []
    eq_i, eq_v, eq_j, b_eq = [], [], [], []
    row_kind = []  # ("ub"|"eq", position) per model row
    for name, coeffs, sense, rhs in model.rows:
        if sense == "=":
            k = len(b_eq)
            for idx, coef in coeffs.items():
                eq_i.append(k), eq_j.append(idx), eq_v.append(coef)
            b_eq.append(rhs)
            row_kind.append(("eq", k))
        else:
            flip = -1.0 if sense == ">=" else 1.0
            k = len(b_ub)
            for idx, coef in coeffs.items():
                ub_i.append(k), ub_j.append(idx), ub_v.append(flip * coef)
            b_ub.append(flip * rhs)
            row_kind.append(("ub", k))

    A_ub = sparse.csr_matrix((ub_v, (ub_i, ub_j)), shape=(len(b_ub), n)) if b_ub else None
    A_eq = sparse.csr_matrix((eq_v, (eq_i, eq_j)), shape=(len(b_eq), n)) if b_eq else None
    bounds = list(zip(model.lb, model.ub))
    integrality = np.array(model.integrality) if any(model.integrality) else None

    options = {"presolve": True}
    if time_limit:
        options["time_limit"] = time_limit

    res = linprog(c, A_ub=A_ub, b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=A_eq, b_eq=np.array(b_eq) if b_eq else None,
                  bounds=bounds, integrality=integrality, method="highs", options=options)

    if res.status == 0:
        x = np.asarray(res.x)
        objective = float(c @ x) * (-1.0 if model.maximize else 1.0)
        acts = []
        ub_act = A_ub @ x if A_ub is not None else None
        eq_act = A_eq @ x if A_eq is not None else None
        duals = None
        have_duals = integrality is None and res.get("ineqlin") is not None
        if have_duals:
            duals = []
        for (kind, k), (name, coeffs, sense, rhs) in zip(row_kind, model.rows):
            flip = -1.0 if sense == ">=" else 1.0
            act = (eq_act[k] if kind == "eq" else flip * ub_act[k])
            acts.append(act)
            if have_duals:
                if kind == "eq":
                    d = res.eqlin.marginals[k]
                else:
                    d = flip * res.ineqlin.marginals[k]
                duals.append(d * (-1.0 if model.maximize else 1.0))
        write_solution(sol_path, "Optimal", model, x, objective, acts, duals)
    elif res.status == 2:
        write_solution(sol_path, "Infeasible")
    elif res.status == 3:
        write_solution(sol_path, "Unbounded")
    elif res.status == 1:
        write_solution(sol_path, "Time limit reached")
    else:
        raise SystemExit("solver error: %s" % res.message)


if __name__ == "__main__":
    main()
