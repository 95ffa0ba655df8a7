"""MiniUCL front end: tokenize, parse, typecheck and pretty-print models."""
from .lexer import SourceSpan, Token, tokenize
from .parser import parse, parse_define, parse_source
from .printer import format_expr, format_model
from .typecheck import TypedModel, TypeError_, typecheck


def load_model(source: str, file: str = "<input>") -> TypedModel:
    return typecheck(parse_source(source, file))


__all__ = [
    "SourceSpan", "Token", "TypedModel", "TypeError_", "format_expr", "format_model",
    "load_model", "parse", "parse_define", "parse_source", "tokenize", "typecheck",
]
