"""Corpus harness: a hand-labeled manifest, per-class confusion counts, accuracy and F1.

Manifest format (UTF-8, one contract per line, `#` starts a comment):

    path[:Contract]  class  vulnerable|safe  [cats=A,B]  [keys=x,y|-]  [<property>=<verdict>]...

`path` is relative to the manifest.  `class` is one of the slugs in CLASSES.
The contract defaults to the last one in the file.
"""
from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from ..verifier.verify import VIOLATED
from .main import Options, analyze_file
from .report import EXIT_ERROR, EXIT_VALID, EXIT_VIOLATED

# slug -> (display name, property kind that exposes the class)
CLASSES = {
    "tod-eth": ("TOD-eth", "equivalence"),
    "tod-token": ("TOD-token", "equivalence"),
    "td": ("TD", "equivalence"),
    "reentrancy": ("reentrancy", "equivalence"),
    "gasless-send": ("gasless send", "equivalence"),
    "overflow": ("overflow/underflow", "invariant"),
    "transfer-mint": ("transferMint", "invariant"),
}


class ManifestMismatch(Exception):
    pass


@dataclass
class ManifestEntry:
    path: str
    vuln_class: str
    vulnerable: bool
    contract: Optional[str] = None
    categories: Optional[tuple] = None
    key_vars: Optional[tuple] = None
    verdicts: dict = field(default_factory=dict)
    line: int = 0


@dataclass
class CorpusManifest:
    entries: list = field(default_factory=list)
    source: str = ""

    def missing_classes(self) -> list:
        present = {e.vuln_class for e in self.entries}
        return [c for c in CLASSES if c not in present]


def _csv(text: str) -> tuple:
    if text in ("", "-"):
        return ()
    return tuple(sorted(x.strip() for x in text.split(",") if x.strip()))


def parse_manifest(text: str, base_dir: str = ".", source: str = "<manifest>") -> CorpusManifest:
    entries = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 3:
            raise ManifestMismatch(f"{source}:{no}: expected 'path class vulnerable|safe ...'")
        target, cls, status = fields[:3]
        if cls not in CLASSES:
            raise ManifestMismatch(f"{source}:{no}: unknown vulnerability class '{cls}' "
                                   f"(known: {', '.join(CLASSES)})")
        if status not in ("vulnerable", "safe"):
            raise ManifestMismatch(f"{source}:{no}: status must be 'vulnerable' or 'safe'")
        path, _, contract = target.partition(":")
        e = ManifestEntry(os.path.join(base_dir, path), cls, status == "vulnerable",
                          contract or None, line=no)
        for kv in fields[3:]:
            key, sep, val = kv.partition("=")
            if not sep:
                raise ManifestMismatch(f"{source}:{no}: expected key=value, got '{kv}'")
            if key == "cats":
                e.categories = _csv(val)
            elif key == "keys":
                e.key_vars = _csv(val)
            else:
                e.verdicts[key] = val
        entries.append(e)
    return CorpusManifest(entries, source)


def load_manifest(path: str) -> CorpusManifest:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_manifest(text, os.path.dirname(os.path.abspath(path)), path)


@dataclass
class ClassScore:
    name: str
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @property
    def accuracy(self) -> Optional[float]:
        return (self.tp + self.tn) / self.total if self.total else None

    @property
    def f1(self) -> Optional[float]:
        d = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / d if d else None


@dataclass
class EntryResult:
    path: str
    contract: str
    vuln_class: str
    vulnerable: bool
    flagged: bool
    verdicts: dict = field(default_factory=dict)
    categories: tuple = ()
    key_vars: tuple = ()
    seconds: float = 0.0
    error: str = ""


@dataclass
class CorpusSummary:
    scores: list = field(default_factory=list)       # ClassScore, in CLASSES order
    entries: list = field(default_factory=list)      # EntryResult
    mismatches: list = field(default_factory=list)   # str
    seconds: float = 0.0

    def exit_code(self) -> int:
        return EXIT_VIOLATED if self.mismatches else EXIT_VALID

    def table(self) -> str:
        def fmt(x):
            return "n/a" if x is None else f"{x:.2f}"
        rows = [f"{'class':<20}{'TP':>4}{'FN':>4}{'FP':>4}{'TN':>4}{'Acc':>7}{'F1':>7}"]
        for s in self.scores:
            rows.append(f"{s.name:<20}{s.tp:>4}{s.fn:>4}{s.fp:>4}{s.tn:>4}"
                        f"{fmt(s.accuracy):>7}{fmt(s.f1):>7}")
        return "\n".join(rows)

    def render_text(self) -> str:
        out = []
        for e in self.entries:
            tag = "vulnerable" if e.vulnerable else "safe"
            verdicts = " ".join(f"{k}={v}" for k, v in e.verdicts.items()) or e.error
            out.append(f"{e.path}:{e.contract} [{e.vuln_class}, {tag}] "
                       f"flagged={'yes' if e.flagged else 'no'} {verdicts} ({e.seconds:.1f}s)")
        out.append("")
        out.append(self.table())
        for m in self.mismatches:
            out.append(f"MISMATCH {m}")
        out.append(f"total time: {self.seconds:.1f}s")
        return "\n".join(out) + "\n"

    def to_dict(self) -> dict:
        return {"scores": [{**asdict(s), "accuracy": s.accuracy, "f1": s.f1}
                           for s in self.scores],
                "entries": [asdict(e) for e in self.entries],
                "mismatches": list(self.mismatches), "seconds": self.seconds}


def _evaluate(args) -> EntryResult:
    entry, opts = args
    t0 = time.monotonic()
    if entry.contract:
        opts = replace(opts, contracts=(entry.contract,))
    results, err = analyze_file(entry.path, opts)
    if err is not None:
        return EntryResult(entry.path, entry.contract or "?", entry.vuln_class,
                           entry.vulnerable, False, error="; ".join(err.diagnostics),
                           seconds=time.monotonic() - t0)
    chosen = [r for r in results if r.contract == entry.contract] if entry.contract \
        else results[-1:]
    if not chosen:
        return EntryResult(entry.path, entry.contract or "?", entry.vuln_class,
                           entry.vulnerable, False, error="contract not found",
                           seconds=time.monotonic() - t0)
    res = chosen[0]
    kind = CLASSES[entry.vuln_class][1]
    flagged = any(p.kind == kind and p.status == VIOLATED for p in res.properties)
    return EntryResult(entry.path, res.contract, entry.vuln_class, entry.vulnerable, flagged,
                       {p.name: p.status for p in res.properties}, tuple(res.categories),
                       tuple(sorted(res.key_variables.get("balances", []))),
                       time.monotonic() - t0)


def _mismatches(entry: ManifestEntry, got: EntryResult) -> list:
    where = f"{entry.path}:{got.contract} (manifest line {entry.line})"
    if got.error:
        return [f"{where}: analysis failed: {got.error}"]
    out = []
    if entry.categories is not None and tuple(sorted(entry.categories)) != got.categories:
        out.append(f"{where}: categories {','.join(got.categories)}, "
                   f"expected {','.join(entry.categories)}")
    if entry.key_vars is not None and entry.key_vars != got.key_vars:
        out.append(f"{where}: key variables {','.join(got.key_vars) or '-'}, "
                   f"expected {','.join(entry.key_vars) or '-'}")
    for name, want in entry.verdicts.items():
        have = got.verdicts.get(name, "absent")
        if have != want:
            out.append(f"{where}: {name} is {have}, expected {want}")
    if got.flagged != entry.vulnerable:
        out.append(f"{where}: labeled {'vulnerable' if entry.vulnerable else 'safe'} "
                   f"but {'flagged' if got.flagged else 'not flagged'}")
    return out


def run_corpus(manifest: CorpusManifest, opts: Options | None = None,
               jobs: int = 1) -> CorpusSummary:
    """Analyze every manifest entry and score each vulnerability class."""
    opts = opts or Options()
    t0 = time.monotonic()
    work = [(e, opts) for e in manifest.entries]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate, work))
    else:
        results = [_evaluate(w) for w in work]
    summary = CorpusSummary()
    present = []
    for e in manifest.entries:
        if e.vuln_class not in present:
            present.append(e.vuln_class)
    scores = {c: ClassScore(CLASSES[c][0]) for c in CLASSES if c in present}
    for entry, got in zip(manifest.entries, results):
        s = scores[entry.vuln_class]
        if entry.vulnerable:
            s.tp += got.flagged
            s.fn += not got.flagged
        else:
            s.fp += got.flagged
            s.tn += not got.flagged
        summary.entries.append(got)
        summary.mismatches.extend(_mismatches(entry, got))
    summary.scores = list(scores.values())
    summary.seconds = time.monotonic() - t0
    return summary


def corpus_main(path: str, opts: Options, jobs: int, json_out: Optional[str]) -> int:
    try:
        manifest = load_manifest(path)
    except (OSError, ManifestMismatch) as exc:
        print(f"finverif: {exc}", file=sys.stderr)
        return EXIT_ERROR
    summary = run_corpus(manifest, opts, jobs)
    if json_out == "-":
        sys.stdout.write(json.dumps(summary.to_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(summary.render_text())
        if json_out:
            with open(json_out, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(summary.to_dict(), indent=2) + "\n")
    return summary.exit_code()
