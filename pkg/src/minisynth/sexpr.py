"""S-expression reader following SMT-LIB lexical rules."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SexprError


class Sym(str):
    """A simple or quoted symbol, or a keyword such as ``:named``."""

    def __repr__(self) -> str:
        return f"Sym({str.__repr__(self)})"


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class BVLit:
    value: int
    width: int


@dataclass(frozen=True)
class Dec:
    text: str


_ATOM_RE = re.compile(
    r"(?P<bin>#b[01]+)"
    r"|(?P<hex>#x[0-9a-fA-F]+)"
    r"|(?P<dec>[0-9]+\.[0-9]+)"
    r"|(?P<num>[0-9]+)"
    r"|(?P<sym>[A-Za-z0-9~!@$%^&*_\-+=<>.?/:]+)"
)
_DELIMS = set("() \t\r\n;\"|")


def _read_atoms(text: str):
    """Yield (offset, token) where token is '(' , ')' or an atom value."""
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == ";":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
        elif ch in "()":
            yield i, ch
            i += 1
        elif ch == '"':
            j, buf = i + 1, []
            while True:
                if j >= n:
                    raise SexprError("unterminated string literal", i)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            yield i, Str("".join(buf))
            i = j + 1
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SexprError("unterminated quoted symbol", i)
            yield i, Sym(text[i + 1:j])
            i = j + 1
        else:
            m = _ATOM_RE.match(text, i)
            if m is None or (m.end() < n and text[m.end()] not in _DELIMS):
                raise SexprError(f"unexpected character {ch!r}", i if m is None else m.end())
            kind, tok = m.lastgroup, m.group()
            if kind == "bin":
                yield i, BVLit(int(tok[2:], 2), len(tok) - 2)
            elif kind == "hex":
                yield i, BVLit(int(tok[2:], 16), 4 * (len(tok) - 2))
            elif kind == "num":
                yield i, int(tok)
            elif kind == "dec":
                yield i, Dec(tok)
            else:
                yield i, Sym(tok)
            i = m.end()


def parse_sexprs(text: str) -> list:
    """All top-level s-expressions in ``text``. Lists become Python lists."""
    out: list = []
    stack: list = []
    for offset, tok in _read_atoms(text):
        if tok == "(" and not isinstance(tok, Sym):
            stack.append([])
        elif tok == ")" and not isinstance(tok, Sym):
            if not stack:
                raise SexprError("unbalanced ')'", offset)
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise SexprError("unexpected end of input inside a list", len(text))
    return out


def parse_sexpr(text: str):
    """Exactly one s-expression."""
    exprs = parse_sexprs(text)
    if len(exprs) != 1:
        raise SexprError(f"expected one s-expression, found {len(exprs)}", len(text) if not exprs else 0)
    return exprs[0]


def format_sexpr(sx) -> str:
    if isinstance(sx, list):
        return "(" + " ".join(format_sexpr(x) for x in sx) + ")"
    if isinstance(sx, Str):
        return '"' + sx.value.replace('"', '""') + '"'
    if isinstance(sx, BVLit):
        if sx.width % 4 == 0:
            return f"#x{sx.value:0{sx.width // 4}x}"
        return f"#b{sx.value:0{sx.width}b}"
    if isinstance(sx, Dec):
        return sx.text
    return str(sx)
