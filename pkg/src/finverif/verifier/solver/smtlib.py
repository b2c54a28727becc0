"""SMT-LIB2 emission and an external solver process."""
from __future__ import annotations

import os
import re
import subprocess
import tempfile
from dataclasses import dataclass, field

from ...msr.terms import UINT_MOD, App, Const, Fresh, InitRead, Sort, render, short

_OPS = {"add": "+", "sub": "-", "mul": "*"}
_REL = {"eq": "=", "neq": "distinct", "lt": "<", "le": "<="}


def symbol_names(symbols) -> dict:
    """Stable names `v<idx>_<name>` in sorted symbol order."""
    out = {}
    for i, s in enumerate(sorted(symbols, key=lambda t: t.key)):
        clean = re.sub(r"[^A-Za-z0-9_]", "_", short(s)).strip("_") or "x"
        out[s] = f"v{i}_{clean}"
    return out


class SmtUnsupported(Exception):
    pass


def term_smt(t, names: dict) -> str:
    if isinstance(t, Const):
        if t.sort != Sort.NUM:
            raise SmtUnsupported(f"non-numeric constant {render(t)}")
        return str(t.value)
    if isinstance(t, (Fresh, InitRead)):
        return names[t]
    if not isinstance(t, App):
        raise SmtUnsupported(f"cannot emit {render(t)}")
    args = [term_smt(a, names) for a in t.args]
    if t.op == "sum":
        return "0" if not args else args[0] if len(args) == 1 else f"(+ {' '.join(args)})"
    a, b = args
    if t.op in _OPS:
        return f"(mod ({_OPS[t.op]} {a} {b}) {UINT_MOD})"
    if t.op == "div":
        return f"(div {a} {b})"
    if t.op == "mod":
        return f"(mod {a} {b})"
    if t.op == "pow":
        e = t.args[1]
        if not isinstance(e, Const):
            raise SmtUnsupported("symbolic exponent")
        if e.value == 0:
            return "1"
        out = a
        for _ in range(e.value - 1):
            out = f"(mod (* {out} {a}) {UINT_MOD})"
        return out
    raise SmtUnsupported(t.op)


def constraint_smt(c, names) -> str:
    return f"({_REL[c.rel]} {term_smt(c.lhs, names)} {term_smt(c.rhs, names)})"


def emit(cs) -> tuple:
    """SMT-LIB2 script for a ConstraintSet; returns (text, names)."""
    names = symbol_names(cs.symbols)
    free = getattr(cs, "free_symbols", set())
    lo, hi = cs.domain
    lines = ["(set-logic QF_NIA)", "(set-option :produce-models true)"]
    for s, n in sorted(names.items(), key=lambda kv: kv[1]):
        lines.append(f"(declare-fun {n} () Int)")
    for s, n in sorted(names.items(), key=lambda kv: kv[1]):
        if s not in free:
            lines.append(f"(assert (and (<= {lo} {n}) (<= {n} {hi})))")
    for c in cs.conjuncts():
        lines.append(f"(assert {constraint_smt(c, names)})")
    for d in cs.disjunctions:
        parts = " ".join(constraint_smt(c, names) for c in d)
        lines.append(f"(assert (or {parts}))")
    lines += ["(check-sat)", "(get-model)", "(exit)"]
    return "\n".join(lines) + "\n", names


_DEFINE = re.compile(r"\(define-fun\s+(\S+)\s+\(\)\s+Int\s+(\(-\s*\d+\s*\)|-?\d+)\s*\)", re.S)


def parse_model(text: str) -> dict:
    out = {}
    for name, val in _DEFINE.findall(text):
        v = val.strip()
        if v.startswith("("):
            v = "-" + re.sub(r"[()\-\s]", "", v)
        out[name] = int(v)
    return out


@dataclass
class SmtResult:
    status: str
    model: dict = field(default_factory=dict)
    reason: str = ""


def solve_smtlib(cs, binary: str, timeout: float = 60.0) -> SmtResult:
    try:
        script, names = emit(cs)
    except SmtUnsupported as exc:
        return SmtResult("unknown", reason=str(exc))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "query.smt2")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(script)
        try:
            proc = subprocess.run([binary, path], capture_output=True, text=True,
                                  timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            return SmtResult("unknown", reason=f"solver process: {exc}")
    out = proc.stdout.strip()
    first = out.split("\n", 1)[0].strip() if out else ""
    if first == "unsat":
        return SmtResult("unsat")
    if first != "sat":
        return SmtResult("unknown", reason=first or proc.stderr.strip()[:200])
    values = parse_model(out)
    model = {s: values.get(n, 0) for s, n in names.items()}
    return SmtResult("sat", model)
