from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import LexError

KEYWORDS = frozenset({
    "module", "var", "input", "define", "synthesis", "function", "init", "next",
    "invariant", "control", "grammar", "if", "then", "else", "true", "false",
})

# Longest operators first so that e.g. "==>" wins over "==".
PUNCTUATION = [
    ("==>", "implies"), ("::=", "produces"),
    ("==", "eq"), ("!=", "neq"), ("<=", "le"), (">=", "ge"), ("&&", "and"), ("||", "or"),
    ("++", "concat"), ("->", "arrow"),
    ("<", "lt"), (">", "gt"), ("=", "assign"), ("!", "not"), ("~", "tilde"),
    ("&", "bvand"), ("|", "bar"), ("+", "plus"), ("-", "minus"), ("*", "star"),
    ("'", "prime"), (":", "colon"), (";", "semi"), (",", "comma"),
    ("(", "lparen"), (")", "rparen"), ("{", "lbrace"), ("}", "rbrace"),
    ("[", "lbrack"), ("]", "rbrack"),
]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<comment>//[^\n]*)"
    r"|(?P<bv>[0-9]+bv[0-9]+)"
    r"|(?P<int>[0-9]+)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>" + "|".join(re.escape(p) for p, _ in PUNCTUATION) + ")"
)
_PUNCT_KIND = dict(PUNCTUATION)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text}" if self.kind in ("kw", "ident", "int", "bv") else self.kind


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split MiniUCL source into tokens, dropping whitespace and ``//`` comments."""
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        span = SourceSpan(file, line, pos - line_start + 1, 0)
        if m is None:
            raise LexError(f"illegal character {source[pos]!r}", SourceSpan(file, line, span.column, 1))
        text = m.group()
        span = SourceSpan(file, line, span.column, len(text))
        group = m.lastgroup
        if group == "word":
            if "__" in text:
                raise LexError(f"identifier {text!r} uses the reserved '__' infix", span)
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, span))
        elif group == "punct":
            tokens.append(Token(_PUNCT_KIND[text], text, span))
        elif group in ("int", "bv"):
            tokens.append(Token(group, text, span))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    return tokens
