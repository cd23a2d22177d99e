"""Tokenizer for the Solidity subset.

Scanning runs over the latin-1 view of the raw bytes so that every string
index is also a byte offset. Token text is re-decoded as UTF-8.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .source import Diagnostic, SourceFile, Span


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    NUMBER = "number"
    STRING = "string"
    HEX_STRING = "hex-string"
    OP = "op"
    PUNCT = "punct"
    COMMENT = "comment"
    DOC_COMMENT = "doc-comment"
    ERROR = "error"
    EOF = "eof"


TRIVIA = frozenset({TokenKind.COMMENT, TokenKind.DOC_COMMENT})

KEYWORDS = frozenset(
    """
    pragma import as from contract library interface abstract is using for
    function modifier event struct enum constructor fallback receive returns
    return if else while do break continue emit new delete throw assembly
    public private internal external pure view payable constant immutable
    virtual override memory storage calldata indexed anonymous mapping var
    true false unchecked try catch error type
    """.split()
)

# longest first
_OPERATORS = sorted(
    """
    >>>= >>= <<= >>> ** == != <= >= && || ++ -- += -= *= /= %= |= &= ^= << >> => -> :=
    + - * / % = < > ! ~ & | ^ ? :
    """.split(),
    key=len,
    reverse=True,
)
_PUNCT = frozenset(";,(){}[].")

_BIDI = ("‪", "‫", "‬", "‭", "‮", "⁦", "⁧", "⁨", "⁩")

_RE_WS = re.compile(r"[ \t\r\n\f\v]+")
_RE_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_RE_HEX = re.compile(r"0[xX][0-9a-fA-F_]*")
_RE_DEC = re.compile(r"[0-9][0-9_]*(?:\.[0-9][0-9_]*)*(?:[eE]-?[0-9][0-9_]*)?")
_RE_OP = re.compile("|".join(re.escape(op) for op in _OPERATORS))


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    # True when no whitespace or comment separates this token from the previous one
    joined: bool = False
    flags: frozenset[str] = field(default_factory=frozenset)

    @property
    def start(self) -> int:
        return self.span.start

    @property
    def end(self) -> int:
        return self.span.end

    def is_(self, kind: TokenKind, text: str | None = None) -> bool:
        return self.kind is kind and (text is None or self.text == text)

    def __repr__(self) -> str:
        return f"Token({self.kind.value}, {self.text!r}@{self.span.start})"


def _flags_for(text: str) -> frozenset[str]:
    flags = set()
    if any(ch in text for ch in _BIDI):
        flags.add("non-printable")
        if "‮" in text:
            flags.add("rtl-override")
    elif any(ord(ch) < 32 and ch not in "\t\r\n" for ch in text):
        flags.add("non-printable")
    return frozenset(flags)


def tokenize(file: SourceFile) -> tuple[list[Token], list[Diagnostic]]:
    """Split ``file`` into tokens, keeping comments as trivia.

    Never raises: malformed input becomes ERROR tokens plus diagnostics.
    """
    src = file.data.decode("latin-1")
    n = len(src)
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    pos = 0
    last_end = -1  # end offset of the previous token of any kind

    def emit(kind: TokenKind, start: int, end: int, flags: frozenset[str] = frozenset()) -> None:
        nonlocal last_end
        text = file.text(start, end)
        joined = bool(tokens) and last_end == start
        tokens.append(Token(kind, text, file.span(start, end), joined, flags))
        last_end = end

    while pos < n:
        ch = src[pos]
        m = _RE_WS.match(src, pos)
        if m:
            pos = m.end()
            continue
        start = pos
        if src.startswith("//", pos):
            end = src.find("\n", pos)
            end = n if end < 0 else end
            if end > pos and src[end - 1] == "\r":
                end -= 1
            doc = src.startswith("///", pos) and not src.startswith("////", pos)
            text = file.text(start, end)
            emit(TokenKind.DOC_COMMENT if doc else TokenKind.COMMENT, start, end, _flags_for(text))
            pos = end
            continue
        if src.startswith("/*", pos):
            close = src.find("*/", pos + 2)
            if close < 0:
                end = n
                diags.append(
                    Diagnostic("UnterminatedComment", "block comment is never closed", file.span(start, end))
                )
            else:
                end = close + 2
            doc = src.startswith("/**", pos) and not src.startswith("/**/", pos)
            emit(
                TokenKind.DOC_COMMENT if doc else TokenKind.COMMENT,
                start,
                end,
                _flags_for(file.text(start, end)),
            )
            pos = end
            continue
        if ch in "\"'":
            pos = _scan_string(src, pos, file, diags)
            emit(TokenKind.STRING, start, pos, _flags_for(file.text(start, pos)))
            continue
        m = _RE_IDENT.match(src, pos)
        if m:
            word = m.group()
            end = m.end()
            if word in ("hex", "unicode") and end < n and src[end] in "\"'":
                pos = _scan_string(src, end, file, diags)
                kind = TokenKind.HEX_STRING if word == "hex" else TokenKind.STRING
                emit(kind, start, pos, _flags_for(file.text(start, pos)))
                continue
            emit(TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT, start, end)
            pos = end
            continue
        if "0" <= ch <= "9":
            m = _RE_HEX.match(src, pos) or _RE_DEC.match(src, pos)
            emit(TokenKind.NUMBER, start, m.end())
            pos = m.end()
            continue
        if ch in _PUNCT:
            emit(TokenKind.PUNCT, start, pos + 1)
            pos += 1
            continue
        m = _RE_OP.match(src, pos)
        if m:
            emit(TokenKind.OP, start, m.end())
            pos = m.end()
            continue
        # unknown byte run: group consecutive non-ASCII bytes into one token
        end = pos + 1
        if ord(ch) >= 0x80:
            while end < n and ord(src[end]) >= 0x80:
                end += 1
        emit(TokenKind.ERROR, start, end, _flags_for(file.text(start, end)))
        diags.append(
            Diagnostic("InvalidCharacter", f"unexpected input {file.text(start, end)!r}", file.span(start, end))
        )
        pos = end

    tokens.append(Token(TokenKind.EOF, "", file.span(n, n), False))
    return tokens, diags


def _scan_string(src: str, pos: int, file: SourceFile, diags: list[Diagnostic]) -> int:
    quote = src[pos]
    i = pos + 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == "\n":
            break
        i += 1
    end = min(i, n)
    diags.append(Diagnostic("UnterminatedString", "string literal is never closed", file.span(pos, end)))
    return end


def significant(tokens: list[Token]) -> list[Token]:
    """Tokens without comment trivia."""
    return [t for t in tokens if t.kind not in TRIVIA]
