"""Tokenizer following Solidity's lexical rules for the supported subset."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import SolSyntaxError

KEYWORDS = {
    "pragma", "contract", "function", "constructor", "returns", "return",
    "if", "else", "for", "while", "do", "require", "assert", "revert", "throw",
    "mapping", "address", "bool", "true", "false", "public", "private",
    "internal", "external", "payable", "view", "pure", "constant", "msg",
    "block", "now", "this", "new", "emit", "event", "modifier", "library",
    "interface", "import", "using", "struct", "enum", "assembly", "memory",
    "storage", "calldata", "delete", "is", "fallback", "receive",
}

PUNCT = [
    "**=", ">>=", "<<=",
    "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=", "%=", "**", "<<", ">>", "|=", "&=", "^=",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", "=", "+", "-", "*", "/",
    "%", "<", ">", "!", "?", ":", "&", "|", "^", "~",
]

ETHER_UNITS = {"wei": 1, "gwei": 10**9, "szabo": 10**12, "finney": 10**15,
               "ether": 10**18}
TIME_UNITS = {"seconds": 1, "minutes": 60, "hours": 3600, "days": 86400,
              "weeks": 604800}


@dataclass(frozen=True)
class Token:
    kind: str  # 'id', 'kw', 'num', 'str', 'op', 'eof'
    text: str
    line: int
    col: int
    value: object = None


def tokenize(source: str) -> list:
    toks = []
    i, line, col = 0, 1, 1
    n = len(source)

    def adv(k):
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n﻿":
            adv(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                adv(1)
            continue
        if source.startswith("/*", i):
            start = (line, col)
            j = source.find("*/", i + 2)
            if j < 0:
                raise SolSyntaxError("unterminated comment", *start)
            adv(j + 2 - i)
            continue
        sl, sc = line, col
        if c.isalpha() or c in "_$":
            j = i
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            word = source[i:j]
            adv(j - i)
            toks.append(Token("kw" if word in KEYWORDS else "id", word, sl, sc))
            continue
        if c.isdigit():
            j = i
            if source.startswith(("0x", "0X"), i):
                j = i + 2
                while j < n and (source[j] in "0123456789abcdefABCDEF_"):
                    j += 1
                text = source[i:j]
                digits = text[2:].replace("_", "")
                if not digits:
                    raise SolSyntaxError("malformed hex literal", sl, sc)
                value = int(digits, 16)
            else:
                while j < n and (source[j].isdigit() or source[j] == "_"):
                    j += 1
                exp = 0
                if j < n and source[j] in "eE" and j + 1 < n and source[j + 1].isdigit():
                    k = j + 1
                    while k < n and source[k].isdigit():
                        k += 1
                    exp = int(source[j + 1:k])
                    j = k
                text = source[i:j]
                mant = text.split("e")[0].split("E")[0].replace("_", "")
                value = int(mant) * 10 ** exp
            if j < n and (source[j].isalpha() or source[j] == "_"):
                raise SolSyntaxError(f"malformed number literal near {source[i:j + 1]!r}", sl, sc)
            adv(j - i)
            toks.append(Token("num", text, sl, sc, value))
            continue
        if c in "\"'":
            j = i + 1
            while j < n and source[j] != c:
                if source[j] == "\\":
                    j += 1
                if j < n and source[j] == "\n":
                    raise SolSyntaxError("unterminated string literal", sl, sc)
                j += 1
            if j >= n:
                raise SolSyntaxError("unterminated string literal", sl, sc)
            text = source[i:j + 1]
            adv(j + 1 - i)
            toks.append(Token("str", text, sl, sc, text[1:-1]))
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                adv(len(p))
                toks.append(Token("op", p, sl, sc))
                break
        else:
            raise SolSyntaxError(f"unexpected character {c!r}", sl, sc)
    toks.append(Token("eof", "", line, col))
    return toks
