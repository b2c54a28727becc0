"""Identifier similarity on a 0..100 scale.

The score is the larger of two ratios: the plain ratio of the case-folded
names, and the ratio of their token keys (camelCase / underscore / digit
split, connective words dropped, plural `s` stripped, tokens sorted).  The
ratio itself is `100 * 2 * LCS / (len(a) + len(b))`, i.e. one minus the
normalized insert/delete edit distance.
"""
from __future__ import annotations

import re
from functools import lru_cache

_CONNECTIVES = frozenset({"of", "the", "for", "by", "to", "in", "on", "at", "per"})
_SPLIT = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


def lcs_length(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if ca == cb else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def ratio(a: str, b: str) -> float:
    if not a and not b:
        return 100.0
    return 100.0 * 2 * lcs_length(a, b) / (len(a) + len(b))


def tokens(name: str) -> list:
    out = []
    for t in _SPLIT.findall(name):
        t = t.lower()
        if t in _CONNECTIVES:
            continue
        if len(t) > 3 and t.endswith("s") and not t.endswith("ss"):
            t = t[:-1]
        out.append(t)
    return out


def token_key(name: str) -> str:
    return " ".join(sorted(tokens(name)))


@lru_cache(maxsize=4096)
def name_similarity(a: str, b: str) -> float:
    """Symmetric, case-insensitive; 100 iff the names are equal up to case."""
    if a.lower() == b.lower():
        return 100.0
    plain = ratio(a.lower(), b.lower())
    ka, kb = token_key(a), token_key(b)
    tok = ratio(ka, kb) if ka and kb else 0.0
    # only identical case-folded strings may reach 100
    return min(max(plain, tok), 99.99)
