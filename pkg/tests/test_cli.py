from __future__ import annotations

import json

import pytest

from conftest import corpus_path
from finverif.cli import (CLASSES, ManifestMismatch, Options, Report, main, parse_manifest,
                          run_corpus)
from finverif.cli.report import EXIT_ERROR, EXIT_UNKNOWN, EXIT_VALID, EXIT_VIOLATED, SCHEMA

CREDITS = """contract C {
    mapping(address => uint) credits;
    function move(address to, uint v) public { credits[msg.sender] -= v; credits[to] += v; }
}
"""


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- exit codes

def test_violation_exits_one(capsys):
    code, out, _ = _run(capsys, corpus_path("ex1.sol"))
    assert code == EXIT_VIOLATED
    assert "[Violated] token_inv(balances)" in out
    assert "accounts: msg.sender = c_adv, to = c_adv" in out
    assert out.rstrip().endswith("summary: 1 violated, 1 valid, 0 unknown, 0 file errors")


def test_all_valid_exits_zero(capsys):
    code, out, _ = _run(capsys, corpus_path("ex1_patched.sol"))
    assert code == EXIT_VALID
    assert "valid within bounds: max_depth=120 tx_bound=2 call_depth_cap=2" in out


def test_timeout_exits_two(capsys):
    code, out, _ = _run(capsys, "--timeout", "0.000001", corpus_path("reentrancy.sol"))
    assert code == EXIT_UNKNOWN
    assert "(timeout)" in out


def test_syntax_error_exits_three(tmp_path, capsys):
    bad = tmp_path / "bad.sol"
    bad.write_text("contract C {\n  function f( public {}\n}\n")
    code, out, _ = _run(capsys, str(bad))
    assert code == EXIT_ERROR
    assert f"{bad}:2:" in out


def test_bad_arguments_exit_three(capsys):
    assert _run(capsys, "--tx-bound", "0", corpus_path("ex1.sol"))[0] == EXIT_ERROR
    assert _run(capsys, "--solver", "cvc5", corpus_path("ex1.sol"))[0] == EXIT_ERROR
    assert _run(capsys)[0] == EXIT_ERROR


def test_help_exits_zero(capsys):
    code, out, _ = _run(capsys, "--help")
    assert code == EXIT_VALID and "--key-vars" in out


def test_file_error_does_not_abort_siblings(tmp_path, capsys):
    missing = tmp_path / "missing.sol"
    code, out, _ = _run(capsys, "--json", "-", str(missing), corpus_path("ex1_patched.sol"))
    report = json.loads(out)
    assert [e["path"] for e in report["errors"]] == [str(missing)]
    assert [c["contract"] for c in report["contracts"]] == ["Ex1Patched"]
    # no violation or unknown, so the file error decides the code
    assert code == EXIT_ERROR


def test_violation_outranks_file_errors(tmp_path, capsys):
    code, _, _ = _run(capsys, str(tmp_path / "missing.sol"), corpus_path("ex1.sol"))
    assert code == EXIT_VIOLATED


# ---------------------------------------------------------------- options

def test_key_vars_override(tmp_path, capsys):
    src = tmp_path / "credits.sol"
    src.write_text(CREDITS)
    code, out, _ = _run(capsys, str(src))
    assert code == EXIT_VALID and "no property applicable" in out
    code, out, _ = _run(capsys, "--key-vars", "credits", str(src))
    assert code == EXIT_VIOLATED
    assert "key variables: balances=credits" in out
    assert "token_inv(credits)" in out


def test_property_filter(capsys):
    code, out, _ = _run(capsys, "--property", "equivalence", corpus_path("ex1.sol"))
    assert code == EXIT_VALID
    assert "token_inv" not in out


def test_custom_invariant_flag(capsys):
    code, out, _ = _run(capsys, "--property", "invariant", "--invariant",
                        "sum(balances[msg.sender], balances[to]) == 10",
                        corpus_path("ex1_patched.sol"))
    assert code == EXIT_VALID
    assert "balances[msg.sender] + balances[to] == 10" in out


def test_dump_rules(capsys):
    code, out, _ = _run(capsys, "--dump-rules", corpus_path("ex1.sol"))
    assert code == EXIT_VALID
    assert out.startswith(f"// ==== {corpus_path('ex1.sol')}: independent model\n")
    assert "Ex1.transfer.var_assign@11 (line 6)" in out


def test_dump_model(capsys):
    code, out, _ = _run(capsys, "--dump-model", "invariant", corpus_path("ex1.sol"))
    assert code == EXIT_VALID
    assert "token_inv(balances)" in out.splitlines()[0]
    assert "ret_ext_inv:" in out and "End()" in out


# ---------------------------------------------------------------- JSON report

def test_json_report_round_trip(capsys):
    code, out, _ = _run(capsys, "--json", "-", corpus_path("ex1.sol"))
    assert code == EXIT_VIOLATED
    d = json.loads(out)
    assert d["schema"] == SCHEMA
    (c,) = d["contracts"]
    assert set(c) == {"path", "contract", "categories", "key_variables", "properties", "note"}
    inv = c["properties"][0]
    assert inv["status"] == "Violated"
    assert set(inv) == {"name", "kind", "description", "status", "reason", "complete",
                        "bounds", "seconds", "stats", "trace", "witness", "addresses",
                        "constraints"}
    assert inv["witness"]["value"] != 0
    assert inv["addresses"] == {"msg.sender": "c_adv", "to": "c_adv"}
    again = Report.from_json(out).to_json()
    assert again == out.rstrip("\n")
    assert Report.from_json(again).to_json() == again


def test_json_file_and_text_together(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = _run(capsys, "--json", str(target), corpus_path("ex1_patched.sol"))
    assert code == EXIT_VALID and out.startswith("== ")
    assert Report.from_json(target.read_text()).exit_code() == EXIT_VALID


# ---------------------------------------------------------------- corpus manifests

def test_manifest_parsing():
    m = parse_manifest("# comment\n\nex1.sol transfer-mint vulnerable cats=TokenContract "
                       "keys=balances token_inv(balances)=Violated\n"
                       "ico.sol:Sale tod-token vulnerable keys=-\n", "/c")
    a, b = m.entries
    assert (a.path, a.vuln_class, a.vulnerable) == ("/c/ex1.sol", "transfer-mint", True)
    assert a.categories == ("TokenContract",) and a.key_vars == ("balances",)
    assert a.verdicts == {"token_inv(balances)": "Violated"}
    assert (b.contract, b.key_vars) == ("Sale", ())
    assert len(m.missing_classes()) == len(CLASSES) - 2


@pytest.mark.parametrize("text", [
    "ex1.sol nonsense vulnerable",
    "ex1.sol overflow maybe",
    "ex1.sol overflow",
    "ex1.sol overflow safe cats",
])
def test_manifest_errors(text):
    with pytest.raises(ManifestMismatch):
        parse_manifest(text)


def test_empty_manifest_scores_nothing():
    s = run_corpus(parse_manifest(""))
    assert s.scores == [] and s.entries == []
    assert s.exit_code() == EXIT_VALID


def test_misfiled_entry_is_reported(tmp_path):
    manifest = tmp_path / "m.txt"
    manifest.write_text(f"{corpus_path('ex1_patched.sol')} transfer-mint vulnerable\n")
    s = run_corpus(parse_manifest(manifest.read_text()))
    (score,) = s.scores
    assert (score.tp, score.fn, score.accuracy, score.f1) == (0, 1, 0.0, 0.0)
    assert s.exit_code() == EXIT_VIOLATED
    assert "labeled vulnerable but not flagged" in s.mismatches[0]


def test_corpus_flag_with_unknown_class(tmp_path, capsys):
    manifest = tmp_path / "m.txt"
    manifest.write_text("ex1.sol no-such-class vulnerable\n")
    code, _, err = _run(capsys, "--corpus", str(manifest))
    assert code == EXIT_ERROR
    assert "unknown vulnerability class 'no-such-class'" in err


def test_corpus_flag_scores_a_small_manifest(tmp_path, capsys):
    manifest = tmp_path / "m.txt"
    manifest.write_text(f"{corpus_path('ex1.sol')} transfer-mint vulnerable\n"
                        f"{corpus_path('ex1_patched.sol')} transfer-mint safe\n")
    code, out, _ = _run(capsys, "--corpus", str(manifest))
    assert code == EXIT_VALID
    assert "transferMint           1   0   0   1   1.00   1.00" in out


def test_options_defaults():
    o = Options()
    assert o.property == "all" and o.search.tx_bound == 2 and o.key_vars is None
