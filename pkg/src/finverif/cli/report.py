"""Analysis report: one record rendered both as text and as JSON."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .. import __version__
from ..msr.terms import short
from ..verifier.constraints import address_choices
from ..verifier.verify import UNKNOWN, VALID, VIOLATED

SCHEMA = "finverif-report/1"

EXIT_VALID, EXIT_VIOLATED, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3


@dataclass
class StepInfo:
    rule: str
    uid: str = ""
    line: Optional[int] = None


@dataclass
class PropertyResult:
    name: str
    kind: str
    description: str
    status: str
    reason: str = ""
    complete: bool = False
    bounds: dict = field(default_factory=dict)
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)        # StepInfo
    witness: dict = field(default_factory=dict)      # symbol -> int
    addresses: dict = field(default_factory=dict)    # address argument -> account
    constraints: list = field(default_factory=list)  # rendered lines

    @classmethod
    def from_verdict(cls, prop, verdict) -> "PropertyResult":
        res = cls(prop.name, prop.kind, prop.describe(), verdict.status, verdict.reason,
                  verdict.complete, dict(verdict.bounds), round(verdict.seconds, 3),
                  dict(verdict.stats))
        if verdict.trace is not None:
            for step in verdict.trace.steps:
                meta = step.rule_ref.meta if step.rule_ref is not None else {}
                res.trace.append(StepInfo(step.rule, meta.get("uid", ""), meta.get("line")))
            res.addresses = {_sender_alias(n): a.value for n, a in address_choices(verdict.trace)}
        if verdict.witness:
            res.witness = {short(k): v for k, v in
                           sorted(verdict.witness.items(), key=lambda kv: short(kv[0]))}
        if verdict.constraints is not None:
            res.constraints = verdict.constraints.lines()
        return res


def _sender_alias(name: str) -> str:
    base, _, tx = name.partition("#")
    if base == "c_b":
        base = "msg.sender"
    return f"{base}#{tx}" if tx else base


@dataclass
class ContractResult:
    path: str
    contract: str
    categories: list = field(default_factory=list)
    key_variables: dict = field(default_factory=dict)
    properties: list = field(default_factory=list)   # PropertyResult
    note: str = ""


@dataclass
class FileError:
    path: str
    diagnostics: list = field(default_factory=list)


@dataclass
class Report:
    contracts: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    version: str = __version__
    schema: str = SCHEMA

    def statuses(self) -> list:
        return [p.status for c in self.contracts for p in c.properties]

    def exit_code(self) -> int:
        st = self.statuses()
        if VIOLATED in st:
            return EXIT_VIOLATED
        if UNKNOWN in st:
            return EXIT_UNKNOWN
        if self.errors:
            return EXIT_ERROR
        return EXIT_VALID

    # ------------------------------------------------------------ JSON

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        contracts = []
        for c in d.get("contracts", []):
            props = []
            for p in c.get("properties", []):
                p = dict(p)
                p["trace"] = [StepInfo(**s) for s in p.get("trace", [])]
                props.append(PropertyResult(**p))
            contracts.append(ContractResult(**{**c, "properties": props}))
        errors = [FileError(**e) for e in d.get("errors", [])]
        return cls(contracts, errors, d.get("version", __version__), d.get("schema", SCHEMA))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    # ------------------------------------------------------------ text

    def render_text(self) -> str:
        out = []
        for c in self.contracts:
            out.append(f"== {c.path}: {c.contract}")
            out.append(f"   categories: {', '.join(c.categories) or '-'}")
            kv = c.key_variables
            if kv:
                out.append(f"   key variables: balances={','.join(kv.get('balances', [])) or '-'}"
                           f" totalSupply={kv.get('total_supply') or '-'}")
            if c.note:
                out.append(f"   {c.note}")
            for p in c.properties:
                out.extend(_render_property(p))
        for e in self.errors:
            out.append(f"== {e.path}: error")
            out.extend(f"   {d}" for d in e.diagnostics)
        out.append(_summary_line(self))
        return "\n".join(out) + "\n"


def _render_property(p: PropertyResult) -> list:
    head = f"   [{p.status}] {p.name}: {p.description}"
    if p.reason:
        head += f" ({p.reason})"
    out = [head]
    b = p.bounds
    if p.status == VALID:
        scope = "search exhausted" if p.complete else "depth bound reached"
        out.append(f"      valid within bounds: max_depth={b.get('max_depth')} "
                   f"tx_bound={b.get('tx_bound')} call_depth_cap={b.get('call_depth_cap')}"
                   f" ({scope})")
    if p.status == VIOLATED:
        out.append("      trace:")
        for s in p.trace:
            if s.rule == "Fresh":
                continue
            where = f"  line {s.line}" if s.line else ""
            out.append(f"        {s.rule:<18}{s.uid}{where}")
        if p.addresses:
            out.append("      accounts: " + ", ".join(f"{k} = {v}"
                                                      for k, v in p.addresses.items()))
        if p.witness:
            out.append("      witness: " + ", ".join(f"{k} = {v}" for k, v in p.witness.items()))
        out.append("      constraints:")
        out.extend(f"        {line}" for line in p.constraints)
    out.append(f"      time: {p.seconds:.2f}s")
    return out


def _summary_line(r: Report) -> str:
    st = r.statuses()
    return (f"summary: {st.count(VIOLATED)} violated, {st.count(VALID)} valid, "
            f"{st.count(UNKNOWN)} unknown, {len(r.errors)} file errors")
