from __future__ import annotations

import os
import sys
from functools import lru_cache

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)
CORPUS = os.path.join(ROOT, "corpus")
DATA = os.path.join(HERE, "data")

sys.path.insert(0, HERE)   # tests/concrete.py is imported as a plain module

from finverif.compmodel import build_equivalence_model, build_invariant_model  # noqa: E402
from finverif.frontend import parse_source  # noqa: E402
from finverif.propertygen import (NoPropertyApplicable, classify,  # noqa: E402
                                  find_key_variables, generate_properties)
from finverif.translator import build_independent_model  # noqa: E402

Z3 = "/usr/local/bin/z3"
needs_z3 = pytest.mark.skipif(not os.access(Z3, os.X_OK), reason="z3 binary not installed")


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS, name)


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


def read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


@lru_cache(maxsize=None)
def load(path: str, contract: str | None = None):
    """(asts, main ast, independent model, properties) for a source file."""
    asts = parse_source(read(path))
    ast = next(c for c in asts if c.name == contract) if contract else asts[-1]
    indep = build_independent_model(asts)
    try:
        props = generate_properties(ast, find_key_variables(ast), classify(ast, asts), asts)
    except NoPropertyApplicable:
        props = []
    return asts, ast, indep, props


def model_for(path: str, kind: str, contract: str | None = None):
    _, _, indep, props = load(path, contract)
    prop = next(p for p in props if p.kind == kind)
    if kind == "invariant":
        return build_invariant_model(indep, prop)
    return build_equivalence_model(indep, prop)


def source_model(source: str):
    asts = parse_source(source)
    return asts, build_independent_model(asts)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.RESULTS):
        title, ok = acceptance.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
