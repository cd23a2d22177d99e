from __future__ import annotations

import pytest

from conftest import CORPUS, SECURE_TOKEN
from ercaudit.analysis import (
    CallKind,
    EdgeLabel,
    Project,
    analyze_contract,
    build_cfg,
    classify_calls,
    detect_loops,
    expand_modifiers,
    guard_facts,
    state_access,
)
from ercaudit.analysis.modifiers import FROM_FUNCTION, expand_statements
from ercaudit.frontend import SourceFile, ast, parse_file, parse_text

MUTEX = """
contract T {
    bool lock;
    address owner;
    mapping(address => uint256) balances;
    modifier noReentrancy() { require(!lock); lock = true; _; lock = false; }
    modifier onlyOwner() { require(msg.sender == owner); _; }
    modifier A() { balances[msg.sender] = 1; _; balances[msg.sender] = 2; }
    modifier B() { balances[owner] = 3; _; balances[owner] = 4; }
    function plain(uint256 v) public { balances[msg.sender] = v; }
    function guarded() public noReentrancy { msg.sender.transfer(1); }
    function both() public A B { balances[address(0)] = 5; }
    function admin() public onlyOwner { owner = msg.sender; }
}
"""


def load(text: str):
    unit = parse_text(text)
    assert unit.diagnostics == []
    return unit.contracts[-1], Project([unit])


def body_of(text: str, name: str):
    contract, project = load(text)
    fn = contract.function(name)
    return expand_modifiers(fn, contract, project), contract, project


def wrap(statements: str, extra: str = "") -> str:
    return f"""
contract T {{
    mapping(address => uint256) balances;
    uint256 a;
    uint256 b;
    {extra}
    function f(uint256 x) public {{ {statements} }}
}}
"""


def test_expand_identity_without_modifiers():
    body, contract, _ = body_of(MUTEX, "plain")
    fn = contract.function("plain")
    assert body.statements == fn.body.statements
    assert all(body.origin(n) == FROM_FUNCTION for n in body.walk())


def test_expand_mutex_modifier():
    body, contract, project = body_of(MUTEX, "guarded")
    origins = [body.origin(s) for s in body.statements]
    assert origins == ["noReentrancy", "noReentrancy", FROM_FUNCTION, "noReentrancy"]
    assert guard_facts(contract, project).mutex_vars == {"lock"}
    assert guard_facts(contract, project).for_function(contract.function("guarded")).mutex_protected


def test_expand_nests_in_declaration_order():
    body, _, _ = body_of(MUTEX, "both")
    assert [body.origin(s) for s in body.statements] == ["A", "B", FROM_FUNCTION, "B", "A"]
    assert body.applied_modifiers == ["A", "B"]


def test_unknown_modifier_is_opaque_marker():
    text = "contract T { uint a; function f() public whenReady { a = 1; } }"
    body, _, _ = body_of(text, "f")
    assert isinstance(body.statements[0], ast.OpaqueModifier)
    assert body.opaque_modifiers == ["whenReady"]


@pytest.mark.parametrize("name", ["plain", "guarded", "both", "admin"])
def test_expand_is_idempotent(name):
    contract, project = load(MUTEX)
    fn = contract.function(name)
    first = expand_modifiers(fn, contract, project)
    bare = ast.FunctionDef(span=fn.span, name=fn.name, body=fn.body)
    again = expand_statements(bare, contract, project, first.statements)
    assert again.statements == first.statements


def cfg_of(statements: str):
    body, _, _ = body_of(wrap(statements), "f")
    return build_cfg(body)


def test_cfg_straight_line_is_one_block():
    g = cfg_of("a = 1; b = 2; a = b;")
    assert len(g.blocks) == 1 and len(g.blocks[0].items) == 3
    assert g.edges == []


def test_cfg_if_else_is_a_diamond():
    g = cfg_of("if (a > 0) { a = 1; } else { b = 1; }")
    assert len(g.blocks) == 4
    labels = sorted(e.label.value for e in g.edges)
    assert labels == ["false", "seq", "seq", "true"]
    assert g.reachable() == {0, 1, 2, 3}


def test_cfg_while_has_back_edge():
    g = cfg_of("while (a < 10) { a++; }")
    loops = detect_loops(g)
    assert len(loops) == 1 and loops[0].label is EdgeLabel.LOOP_BACK


def test_cfg_require_exits_to_revert():
    g = cfg_of("require(a > 0); a = 1;")
    assert g.revert is not None
    assert g.blocks[g.revert].kind == "revert"
    assert any(e.dst == g.revert and e.label is EdgeLabel.FALSE for e in g.edges)


def test_cfg_every_statement_in_one_block():
    body, _, _ = body_of(MUTEX, "guarded")
    g = build_cfg(body)
    seen = [id(i) for b in g.blocks for i in b.items]
    assert len(seen) == len(set(seen))


def sites_of(statements: str, extra: str = ""):
    body, contract, project = body_of(wrap(statements, extra), "f")
    return classify_calls(body, contract, project), body, contract, project


def test_call_value_checked():
    sites, *_ = sites_of('(bool ok, ) = msg.sender.call.value(x)(""); require(ok);')
    (site,) = [s for s in sites if s.kind is CallKind.CALL_WITH_VALUE]
    assert site.return_used and site.value_forwarded


def test_safemath_member_is_library_call():
    lib = "library SafeMath { function add(uint256 p, uint256 q) internal pure returns (uint256) { return p + q; } }"
    text = lib + wrap("a = a.add(x);", "using SafeMath for uint256;")
    unit = parse_text(text)
    project = Project([unit])
    contract = unit.contracts[-1]
    fn = contract.function("f")
    sites = classify_calls(expand_modifiers(fn, contract, project), contract, project)
    assert [s.kind for s in sites] == [CallKind.LIBRARY_CALL]


def test_bare_send_unused():
    sites, *_ = sites_of("msg.sender.send(x);")
    assert [(s.kind, s.return_used) for s in sites] == [(CallKind.SEND, False)]


def test_transfer_on_address_vs_token():
    extra = "IERC20 token;"
    iface = "interface IERC20 { function transfer(address to, uint256 v) external returns (bool); }"
    unit = parse_text(iface + wrap("msg.sender.transfer(x); token.transfer(msg.sender, x);", extra))
    project = Project([unit])
    contract = unit.contracts[-1]
    fn = contract.function("f")
    kinds = [s.kind for s in classify_calls(expand_modifiers(fn, contract, project), contract, project)]
    assert kinds == [CallKind.ETHER_TRANSFER, CallKind.EXTERNAL_MEMBER_CALL]


def post_call_vars(statements: str):
    sites, body, contract, project = sites_of(statements)
    summary = state_access(build_cfg(body), body, sites, project)
    return [set(v) for v in summary.post_call_vars().values()], summary


def test_cei_sell_has_no_post_call_writes():
    got, _ = post_call_vars("balances[msg.sender] -= x; msg.sender.transfer(x);")
    assert got == [set()]


def test_vulnerable_sell_writes_after_call():
    got, _ = post_call_vars("msg.sender.transfer(x); balances[msg.sender] -= x;")
    assert got == [{"balances"}]


def test_no_external_calls_no_post_call_map():
    got, summary = post_call_vars("a = x; b = a;")
    assert got == []
    assert [a.var for a in summary.accesses() if a.kind == "write"] == ["a", "b"]


def test_post_call_write_on_one_branch_only():
    got, _ = post_call_vars("msg.sender.transfer(x); if (x > 1) { a = 1; } else { b = 2; }")
    assert got == [{"a", "b"}]


def test_guard_facts_only_owner():
    contract, project = load(MUTEX)
    facts = guard_facts(contract, project)
    assert "onlyOwner" in facts.guarding_modifiers
    g = facts.for_function(contract.function("admin"))
    assert g.authorized and g.guarding_modifiers == {"onlyOwner"}


def test_guard_facts_inline_sender_check():
    contract, project = load(wrap("require(msg.sender == owner); a = x;", "address owner;"))
    g = guard_facts(contract, project).for_function(contract.function("f"))
    assert g.sender_guard_vars == {"owner"}


def test_guard_facts_empty():
    contract, project = load(wrap("a = x;"))
    facts = guard_facts(contract, project)
    assert facts.guarding_modifiers == set() and facts.mutex_vars == set()
    assert not facts.for_function(contract.function("f")).authorized


def _all_calls(node: ast.Node) -> list[ast.Call]:
    return [n for n in node.walk() if isinstance(n, ast.Call)]


@pytest.mark.parametrize("path", [SECURE_TOKEN, *sorted(CORPUS.glob("*.sol"))], ids=lambda p: p.name)
def test_call_classification_is_a_partition(path):
    unit = parse_file(SourceFile.read(path))
    project = Project([unit])
    for contract in unit.contracts:
        for fa in analyze_contract(contract, project).functions:
            expected = [id(c) for s in fa.body.statements for c in _all_calls(s)]
            got = [id(s.node) for s in fa.calls]
            assert sorted(got) == sorted(expected), (contract.name, fa.function.name)
            assert len(got) == len(set(got))


def _post_call_writes(path) -> list[set[str]]:
    unit = parse_file(SourceFile.read(path))
    project = Project([unit])
    out = []
    for contract in unit.contracts:
        ca = analyze_contract(contract, project)
        mutex = ca.guards.mutex_vars
        for fa in ca.functions:
            for _, writes in fa.access.post_call:
                out.append({w.var for w in writes if w.var and w.var not in mutex})
    return out


def test_cei_soundness_on_fixtures():
    assert not any(_post_call_writes(SECURE_TOKEN))
    assert any(_post_call_writes(CORPUS / "c08_call_before_write.sol"))


@pytest.mark.parametrize("path", [SECURE_TOKEN, *sorted(CORPUS.glob("*.sol"))], ids=lambda p: p.name)
def test_library_calls_never_delegatecall(path):
    unit = parse_file(SourceFile.read(path))
    project = Project([unit])
    for contract in unit.contracts:
        for fa in analyze_contract(contract, project).functions:
            for site in fa.calls:
                callee = site.node.callee
                while isinstance(callee, (ast.CallOptions,)):
                    callee = callee.expr
                if site.kind is CallKind.LIBRARY_CALL:
                    continue
                if isinstance(callee, ast.MemberAccess) and isinstance(callee.expr, ast.Identifier):
                    if project.is_library(callee.expr.name):
                        assert site.kind is not CallKind.DELEGATECALL
