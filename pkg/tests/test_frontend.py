from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, SECURE_TOKEN
from ercaudit.frontend import SourceFile, TokenKind, parse_file, parse_text, scan_raw, significant, tokenize
from ercaudit.frontend import ast

RTL = "‮"


def lex(text: str):
    tokens, diags = tokenize(SourceFile.from_text(text))
    return [t for t in tokens if t.kind is not TokenKind.EOF], diags


def test_pragma_tokens():
    tokens, diags = lex("pragma solidity 0.5.11;")
    assert [(t.kind, t.text) for t in tokens] == [
        (TokenKind.KEYWORD, "pragma"),
        (TokenKind.IDENT, "solidity"),
        (TokenKind.NUMBER, "0.5.11"),
        (TokenKind.PUNCT, ";"),
    ]
    assert diags == []


def test_assignment_typo_keeps_adjacency():
    tokens, _ = lex("a =+ 1;")
    assert [t.text for t in tokens] == ["a", "=", "+", "1", ";"]
    eq, plus = tokens[1], tokens[2]
    assert plus.joined and not eq.joined
    spaced, _ = lex("a = +1;")
    assert not spaced[2].joined


def test_compound_operator_is_one_token():
    tokens, _ = lex("a += 1;")
    assert [t.text for t in tokens] == ["a", "+=", "1", ";"]


def test_rtl_override_in_comment_is_flagged():
    text = f"contract T {{ // evil {RTL} comment\n}}"
    data = text.encode("utf-8")
    assert b"\xe2\x80\xae" in data
    tokens, _ = tokenize(SourceFile("<rtl>", data))
    comments = [t for t in tokens if t.kind is TokenKind.COMMENT]
    assert len(comments) == 1
    assert {"non-printable", "rtl-override"} <= comments[0].flags


def test_unterminated_string_and_comment_are_diagnostics():
    _, diags = lex('string s = "abc')
    assert any("string" in d.message.lower() for d in diags)
    _, diags = lex("/* never closed")
    assert any("comment" in d.message.lower() for d in diags)


def test_invalid_utf8_yields_error_token():
    tokens, _ = tokenize(SourceFile("<bad>", b"contract \xff\xfe T {}"))
    assert any(t.kind is TokenKind.ERROR for t in tokens)


def test_minimal_contract():
    unit = parse_text("contract T { function transfer(address to, uint256 v) external returns (bool) { } }")
    assert unit.diagnostics == []
    (c,) = unit.contracts
    assert c.name == "T" and len(c.functions) == 1
    fn = c.functions[0]
    assert fn.visibility == "external"
    assert [p.name for p in fn.params] == ["to", "v"]


def test_interface_function_has_no_body():
    unit = parse_text("interface I { function approve(address s, uint256 v) external returns (bool); }")
    (c,) = unit.contracts
    assert c.kind == "interface"
    assert c.functions[0].body is None


def test_secure_fixture_parses_cleanly():
    unit = parse_file(SourceFile.read(SECURE_TOKEN))
    assert unit.diagnostics == []
    names = {fn.name for c in unit.contracts for fn in c.functions}
    names |= {v.name for c in unit.contracts for v in c.state_vars if v.visibility == "public"}
    assert {"totalSupply", "balanceOf", "transfer", "transferFrom", "approve", "allowance"} <= names
    assert {"pause", "withdraw", "sell", "buy"} <= names


def test_unsupported_construct_does_not_abort():
    unit = parse_text("contract A { function f() public { x := 1 2 3 ; } } contract B { }")
    assert [c.name for c in unit.contracts] == ["A", "B"]
    assert unit.diagnostics


def test_scan_raw_absent():
    assert scan_raw(SourceFile.from_text("contract T {}")).empty


def test_scan_raw_in_string():
    src = SourceFile.from_text(f'contract T {{ string s = "a{RTL}b"; }}')
    report = scan_raw(src)
    assert len(report.rtl_override_positions) == 1
    span = report.rtl_override_positions[0]
    assert src.data[span.start:span.end] == b"\xe2\x80\xae"


def test_scan_raw_comment_and_string_ordered():
    src = SourceFile.from_text(f'// {RTL}\ncontract T {{ string s = "{RTL}"; }}')
    spans = scan_raw(src).rtl_override_positions
    assert len(spans) == 2
    assert spans[0].start < spans[1].start
    assert spans[0].line == 1 and spans[1].line == 2


def _shape(node):
    """Structural fingerprint: node types, spans and scalar fields."""
    out = [type(node).__name__, node.span.start, node.span.end]
    for name, value in sorted(vars(node).items()):
        if name in ("span", "diagnostics") or isinstance(value, (ast.Node, list, tuple, dict)):
            continue
        out.append((name, repr(value)))
    out.append([_shape(ch) for ch in node.children()])
    return out


def test_parse_is_deterministic():
    data = SECURE_TOKEN.read_bytes()
    a = parse_file(SourceFile("x.sol", data))
    b = parse_file(SourceFile("x.sol", data))
    assert _shape(a) == _shape(b)


def _texts(file: SourceFile) -> list:
    return [t for t in significant(tokenize(file)[0]) if t.kind is not TokenKind.EOF]


@pytest.mark.parametrize("path", [SECURE_TOKEN, *sorted(CORPUS.glob("*.sol"))], ids=lambda p: p.name)
def test_span_round_trip(path):
    src = SourceFile.read(path)
    tokens = _texts(src)
    unit = parse_file(src)
    checked = 0
    for node in unit.walk():
        if isinstance(node, (ast.SourceUnit, ast.Placeholder)) or node.span.end <= node.span.start:
            continue
        own = [t.text for t in tokens if node.span.start <= t.start and t.end <= node.span.end]
        sub = SourceFile("x.sol", src.data[node.span.start:node.span.end])
        again = [t.text for t in _texts(sub)]
        assert again == own, type(node).__name__
        checked += 1
    assert checked > 0


digit_strings = st.text(alphabet="0123456789", min_size=1, max_size=40)


@given(digits=digit_strings)
def test_decimal_literal_fidelity(digits):
    unit = parse_text(f"contract T {{ uint256 x = {digits}; }}")
    lit = unit.contracts[0].state_vars[0].initializer
    assert isinstance(lit, ast.Literal)
    assert lit.text == digits
    assert lit.value == int(digits)


@given(digits=st.text(alphabet="0123456789abcdefABCDEF", min_size=1, max_size=64))
def test_hex_literal_fidelity(digits):
    unit = parse_text(f"contract T {{ uint256 x = 0x{digits}; }}")
    lit = unit.contracts[0].state_vars[0].initializer
    assert lit.text == "0x" + digits
    assert lit.radix == 16
    assert lit.value == int(digits, 16)


@settings(max_examples=300)
@given(data=st.binary(max_size=300))
def test_parse_never_aborts_on_bytes(data):
    unit = parse_file(SourceFile("fuzz.sol", data))
    assert isinstance(unit, ast.SourceUnit)
    assert isinstance(unit.diagnostics, list)


_FRAGMENTS = ["contract", "C", "{", "}", "(", ")", "function", "f", "public", "returns", "uint256", "x",
              "=", "+", ";", "if", "else", "while", "modifier", "_", "require", ",", "mapping", "=>",
              "0x12", "\"s\"", "emit", "assembly", "/*", "*/", "//", "\n", "pragma", "solidity", "^0.5.0"]


@settings(max_examples=300)
@given(parts=st.lists(st.sampled_from(_FRAGMENTS), max_size=60))
def test_parse_never_aborts_on_token_soup(parts):
    unit = parse_text(" ".join(parts))
    assert isinstance(unit, ast.SourceUnit)
