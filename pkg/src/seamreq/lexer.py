"""Tokenizer for the contract language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import Location

KEYWORDS = frozenset(
    """class deferred frozen feature require do ensure end inherit note old
    implies and or not if then elseif else check modify Result Current true
    false""".split()
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\ufeff]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>:=|/=|<=|>=|[=<>+\-.():;,])
    """,
    re.VERBOSE,
)


class LexError(Exception):
    def __init__(self, message: str, loc: Location):
        super().__init__(f"{loc}: {message}")
        self.code = "IllegalCharacter"
        self.message = message
        self.loc = loc


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "comment", "eof", a keyword, or an operator
    text: str
    line: int
    column: int

    def loc(self, path: str) -> Location:
        return Location(path, self.line, self.column)


def lex(text: str, path: str = "<input>") -> list[Token]:
    """Split ``text`` into tokens; comments are kept as ``comment`` tokens."""
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise LexError(f"illegal character {text[pos]!r}", Location(path, line, col))
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "comment":
            tokens.append(Token("comment", lexeme[2:].strip(), line, col))
        elif kind == "int":
            tokens.append(Token("int", lexeme, line, col))
        elif kind == "ident":
            if lexeme in KEYWORDS:
                tokens.append(Token(lexeme, lexeme, line, col))
            elif lexeme in ("True", "False"):
                tokens.append(Token(lexeme.lower(), lexeme, line, col))
            else:
                tokens.append(Token("ident", lexeme, line, col))
        elif kind == "op":
            tokens.append(Token(lexeme, lexeme, line, col))
        pos = m.end()
    return tokens
