"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as the tests run (visible with `-s`) and repeated in
the terminal summary by conftest.py.
"""
from __future__ import annotations

import os
import random
import re
import time
from collections import Counter
from contextlib import contextmanager
from functools import lru_cache

from concrete import equivalence_violated, invariant_violated, make_setup
from conftest import CORPUS, corpus_path, data_path, load, model_for, read, source_model
from finverif.cli.corpus import CLASSES, load_manifest, run_corpus
from finverif.compmodel import build_equivalence_model, build_invariant_model, index_timestamps
from finverif.msr import (EMPTY, Execution, Label, Sort, alpha_normalize, check_restrictions,
                          enumerate_applicable, fire)
from finverif.msr.engine import Step
from finverif.msr.terms import UINT_MOD
from finverif.propertygen import classify, find_key_variables, generate_properties
from finverif.verifier import (VALID, VIOLATED, SearchConfig, address_choices, check_witness,
                               verify)
from finverif.verifier.constraints import constraint_text

RESULTS: dict = {}
MANIFEST = os.path.join(CORPUS, "manifest.txt")


@contextmanager
def criterion(n: int, title: str):
    ok = False
    try:
        yield
        ok = True
    finally:
        RESULTS[n] = (title, ok)
        print(f"\nacceptance criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")


def _witness_value(verdict, name):
    return next(v for s, v in verdict.witness.items() if str(s) == f"~{name}")


# ---------------------------------------------------------------- 1

def _normalized(line: str, renames: dict) -> str:
    text = line.replace("~", "").replace("⊕", "+").replace("!=", "≠")
    for atom, name in renames.items():
        text = text.replace(f"[{atom}]", f"[{name}]")
    return re.sub(r"[()\s]", "", text)


def test_ex1_self_transfer_breaks_the_invariant():
    with criterion(1, "Ex1: Violated(token_inv) with to = msg.sender, value != 0, in < 10 s"):
        t0 = time.monotonic()
        v = verify(model_for(corpus_path("ex1.sol"), "invariant"))
        elapsed = time.monotonic() - t0
        assert v.status == VIOLATED and v.prop_name == "token_inv(balances)"
        accounts = dict(address_choices(v.trace))
        assert accounts["to"] == accounts["c_b"]
        assert _witness_value(v, "value") != 0
        renames = {accounts["to"].value: "to"}
        lines = [_normalized(constraint_text(c), renames) for c in v.constraints.violation]
        assert "balances0[to]+value+balances0[to]+value≠C1" in lines
        assert elapsed < 10


# ---------------------------------------------------------------- 2

def test_ex2_add_golden_model():
    with criterion(2, "Ex2.add translates to the four golden rules modulo renaming"):
        _, _, indep, _ = load(data_path("ex2.sol"))
        rules = [r for r in indep.function_rules("Ex2", "add")
                 if r.meta["kind"] in ("ext_call", "recv_ext", "var_assign", "ret_ext")]
        got = "\n\n".join(alpha_normalize(r) for r in rules) + "\n"
        assert got == read(data_path("ex2_add.golden"))


# ---------------------------------------------------------------- 3

def test_ex3_timestamp_dependence():
    with criterion(3, "Ex3: equivalence Violated, bt_B0 <= bt_A0 + 15, opposite parity, < 30 s"):
        t0 = time.monotonic()
        v = verify(model_for(corpus_path("ex3_dice.sol"), "equivalence"))
        elapsed = time.monotonic() - t0
        assert v.status == VIOLATED
        ts = index_timestamps(v.trace)
        a0, b0 = v.witness[ts.symbols_a[0]], v.witness[ts.symbols_b[0]]
        assert b0 <= a0 + 15
        assert a0 % 2 != b0 % 2
        assert check_witness(v.trace, v.witness, v.constraints.domain)
        assert elapsed < 30


# ---------------------------------------------------------------- 4

def test_corpus_scores():
    with criterion(4, "corpus: >= 12 contracts, 7 classes, >= 5 safe, accuracy and F1 1.0, < 10 min"):
        manifest = load_manifest(MANIFEST)
        assert len(manifest.entries) >= 12
        assert manifest.missing_classes() == []
        assert sum(not e.vulnerable for e in manifest.entries) >= 5
        summary = run_corpus(manifest)
        assert summary.mismatches == []
        assert [s.name for s in summary.scores] == [CLASSES[c][0] for c in CLASSES]
        for s in summary.scores:
            assert s.accuracy == 1.0 and s.f1 == 1.0, s
        assert summary.seconds < 600


# ---------------------------------------------------------------- 5

def _small_contracts():
    out = []
    for e in load_manifest(MANIFEST).entries:
        asts, ast, _, _ = load(e.path, e.contract)
        if len(ast.globals) <= 2:
            out.append((e.path, e.contract))
    return out


def test_verdicts_match_the_concrete_oracle():
    with criterion(5, "verify agrees with the brute-force oracle on [0,3], tx_bound 2"):
        cfg = SearchConfig(value_domain=(0, 3), user_cap=1, tx_bound=2, timeout=120)
        checked = 0
        disagreements = []
        for path, contract in _small_contracts():
            asts, _, indep, props = load(path, contract)
            setup = make_setup(asts, lo=0, hi=3, users=1)
            for p in props:
                if p.kind == "invariant":
                    want = invariant_violated(setup, p)
                    model = build_invariant_model(indep, p)
                else:
                    want = equivalence_violated(setup, p, tx_bound=2)
                    model = build_equivalence_model(indep, p)
                v = verify(model, cfg)
                checked += 1
                if v.status != (VIOLATED if want else VALID):
                    disagreements.append((os.path.basename(path), p.name, v.status, want))
        assert checked >= 12
        assert disagreements == []


# ---------------------------------------------------------------- 6

def _invariant_models():
    out = []
    for e in load_manifest(MANIFEST).entries:
        _, _, indep, props = load(e.path, e.contract)
        out += [(indep, build_invariant_model(indep, p)) for p in props if p.kind == "invariant"]
    return out


def _equivalence_models():
    out = []
    for e in load_manifest(MANIFEST).entries:
        _, _, indep, props = load(e.path, e.contract)
        out += [(indep, build_equivalence_model(indep, p)) for p in props
                if p.kind == "equivalence"]
    return out


def _options(model, indep, state, ex):
    opts = []
    for rule, subst in enumerate_applicable(state, model.rules,
                                            universe={Sort.ADDR: indep.address_universe}):
        steps = fire(state, rule, subst)
        labels = Execution(steps=ex.steps + steps).labels()
        if all(r.prefix_ok(labels) for r in model.restrictions if hasattr(r, "prefix_ok")):
            opts.append(steps)
    return opts


def _walk(model, indep, rng, max_steps):
    ex = Execution()
    for _ in range(max_steps):
        opts = _options(model, indep, ex.final, ex)
        if not opts:
            break
        ex.steps += rng.choice(opts)
    return ex


def _starts(ex) -> int:
    return sum(isinstance(a, Label) and a.name == "Start" for acts in ex.labels() for a in acts)


def test_engine_properties():
    with criterion(6, "1000 apply_rule steps keep cardinality and frame; 1000 walks have one "
                      "Start; every double Start is rejected"):
        rng = random.Random(20240611)
        # cardinality identity and frame property of single rule applications
        pool = _invariant_models() + _equivalence_models()
        applied = 0
        while applied < 1000:
            indep, model = pool[applied % len(pool)]
            ex = Execution()
            for _ in range(rng.randint(1, 40)):
                opts = _options(model, indep, ex.final, ex)
                if not opts:
                    break
                steps = rng.choice(opts)
                before = steps[-2].state if len(steps) > 1 else ex.final
                rule = steps[-1].rule_ref
                sub = steps[-1].subst
                after = steps[-1].state
                prem = Counter(f.subst(sub) for f in rule.premise)
                concl = Counter(f.subst(sub) for f in rule.conclusion)
                assert len(after) == len(before) - len(rule.premise) + len(rule.conclusion)
                assert after.counts == (before.counts - prem) + concl
                assert before.counts - prem == after.counts - concl
                ex.steps += steps
                applied += 1
        # invariant-model walks
        models = _invariant_models()
        walks = []
        for i in range(1000):
            indep, model = models[i % len(models)]
            ex = _walk(model, indep, rng, 60)
            assert _starts(ex) == 1
            walks.append((model, ex))
        # injected second Start
        for model, ex in walks:
            labels = list(ex.labels())
            k = rng.randrange(len(labels) + 1)
            injected = Execution(steps=ex.steps[:k] + [Step("inject", {}, EMPTY, (Label("Start"),))]
                                 + ex.steps[k:])
            assert check_restrictions(ex, model.restrictions)
            assert not check_restrictions(injected, model.restrictions)


# ---------------------------------------------------------------- 7

@lru_cache(maxsize=None)
def _corpus_verdicts():
    out = []
    for e in load_manifest(MANIFEST).entries:
        _, _, indep, props = load(e.path, e.contract)
        for p in props:
            model = build_invariant_model(indep, p) if p.kind == "invariant" \
                else build_equivalence_model(indep, p)
            out.append((os.path.basename(e.path), p.name, verify(model)))
    return out


def test_every_corpus_witness_replays():
    with criterion(7, "every Violated corpus verdict passes concrete re-execution"):
        violated = [(f, n, v) for f, n, v in _corpus_verdicts() if v.status == VIOLATED]
        assert len(violated) >= 7
        failures = [(f, n) for f, n, v in violated
                    if not check_witness(v.trace, v.witness, v.constraints.domain)]
        assert failures == []


# ---------------------------------------------------------------- 8

UNGUARDED_ADD = """contract AddOnly {
    mapping(address => uint) balances;
    function transfer(address to, uint value) public {
        require(balances[msg.sender] >= value);
        balances[msg.sender] -= value;
        balances[to] += value;
    }
}"""


def _invariant_verdict(asts, indep):
    ast = asts[-1]
    props = generate_properties(ast, find_key_variables(ast), classify(ast, asts), asts)
    inv = next(p for p in props if p.kind == "invariant")
    return verify(build_invariant_model(indep, inv))


def test_overflow_semantics():
    with criterion(8, "unguarded balances[to] += value wraps mod 2^256; the guarded token is Valid"):
        asts, indep = source_model(UNGUARDED_ADD)
        v = _invariant_verdict(asts, indep)
        assert v.status == VIOLATED
        to = dict(address_choices(v.trace))["to"].value
        wrapped = _witness_value(v, f"balances0[{to}]") + _witness_value(v, "value")
        assert wrapped >= UINT_MOD
        assert check_witness(v.trace, v.witness, v.constraints.domain)

        asts, _, indep, _ = load(corpus_path("overflow_token.sol"))
        v = _invariant_verdict(asts, indep)
        assert v.status == VIOLATED
        assert check_witness(v.trace, v.witness, v.constraints.domain)

        asts, _, indep, _ = load(corpus_path("overflow_token_safe.sol"))
        v = _invariant_verdict(asts, indep)
        assert v.status == VALID and v.complete

