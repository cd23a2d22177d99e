"""Lexing and parsing of Solidity source into a spanned AST."""

from .lexer import Token, TokenKind, significant, tokenize
from .parser import parse, parse_file, parse_text
from .rawscan import RawScanReport, scan_raw
from .source import Diagnostic, SourceFile, Span

__all__ = [
    "Diagnostic",
    "RawScanReport",
    "SourceFile",
    "Span",
    "Token",
    "TokenKind",
    "parse",
    "parse_file",
    "parse_text",
    "scan_raw",
    "significant",
    "tokenize",
]
