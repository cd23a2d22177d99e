from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from conftest import SECURE_TOKEN
from ercaudit.analysis import Project
from ercaudit.erc20conf import check_interface
from ercaudit.frontend import SourceFile, parse_file, parse_text

FULL = """
contract Token {
    mapping(address => uint256) balances;
    mapping(address => mapping(address => uint256)) allowed;
    uint256 supply;
    event Transfer(address indexed from, address indexed to, uint256 value);
    event Approval(address indexed owner, address indexed spender, uint256 value);
    function totalSupply() external view returns (uint256) { return supply; }
    function balanceOf(address who) external view returns (uint256) { return balances[who]; }
    function transfer(address to, uint256 v) external returns (bool) { return true; }
    function transferFrom(address f, address to, uint256 v) external returns (bool) { return true; }
    function approve(address s, uint256 v) public returns (bool) { return true; }
    function allowance(address o, address s) external view returns (uint256) { return allowed[o][s]; }
    %s
}
"""

GNT_STYLE = """
contract Gnt {
    mapping(address => uint256) balances;
    uint256 public totalSupply;
    event Transfer(address indexed from, address indexed to, uint256 value);
    function balanceOf(address who) external view returns (uint256) { return balances[who]; }
    function transfer(address to, uint256 v) external returns (bool) { return true; }
}
"""


def report_for(text: str, name: str | None = None):
    unit = parse_text(text)
    project = Project([unit])
    contract = unit.contracts[-1] if name is None else project.contract(name)
    return check_interface(contract, project)


def test_secure_fixture_conforms():
    unit = parse_file(SourceFile.read(SECURE_TOKEN))
    project = Project([unit])
    reports = [check_interface(c, project) for c in unit.contracts if c.kind == "contract"]
    assert any(r.overall for r in reports)


def test_full_interface_conforms():
    r = report_for(FULL % "")
    assert r.overall and r.missing == []
    assert r.methods["approve"].visibility == "public"
    assert r.methods["transfer"].visibility == "external"


def test_gnt_style_missing_three():
    r = report_for(GNT_STYLE)
    assert not r.overall
    assert sorted(r.missing) == ["Approval", "allowance", "approve", "transferFrom"]
    assert sorted(m for m in r.missing if m in r.methods) == ["allowance", "approve", "transferFrom"]
    # the public state variable acts as the totalSupply getter
    assert r.methods["totalSupply"].ok


def test_transfer_without_return_value():
    text = (FULL % "").replace(
        "function transfer(address to, uint256 v) external returns (bool) { return true; }",
        "function transfer(address to, uint256 v) external { }",
    )
    item = report_for(text).methods["transfer"]
    assert item.present and item.signature_match
    assert not item.return_type_match


def test_wrong_parameter_types_do_not_match():
    text = (FULL % "").replace("function approve(address s, uint256 v)", "function approve(address s, uint128 v)")
    item = report_for(text).methods["approve"]
    assert item.present and not item.signature_match


def test_inherited_interface_counts():
    base = (FULL % "").replace("contract Token", "contract Base")
    r = report_for(base + "contract Child is Base { function extra() external {} }", "Child")
    assert r.overall
    assert r.methods["transfer"].owner == "Base"


_UNRELATED = st.from_regex(r"[a-z][a-zA-Z0-9]{0,10}", fullmatch=True).filter(
    lambda n: n.lower() not in {"totalsupply", "balanceof", "transfer", "transferfrom", "approve", "allowance"}
    and n not in {"do", "if", "is", "as", "for", "new", "var", "emit", "else", "from", "type", "error", "while",
                  "break", "throw", "delete", "return", "returns", "continue", "function", "constant",
                  "mapping", "event", "struct", "enum", "public", "private", "pure", "view", "payable",
                  "memory", "storage", "calldata", "external", "internal", "modifier", "contract", "library",
                  "interface", "assembly", "import", "pragma", "using", "indexed", "anonymous", "virtual",
                  "override", "immutable", "receive", "fallback", "constructor", "abstract", "catch", "try",
                  "unchecked", "true", "false"}
)


@given(name=_UNRELATED, params=st.lists(st.sampled_from(["uint256", "address", "bool"]), max_size=3))
def test_unrelated_function_does_not_change_report(name, params):
    sig = ", ".join(f"{t} p{i}" for i, t in enumerate(params))
    base = report_for(FULL % "")
    more = report_for(FULL % f"function {name}({sig}) external {{ }}")
    strip = lambda r: [(i.name, i.present, i.signature_match, i.return_type_match, i.visibility) for i in r.items()]
    assert strip(base) == strip(more)
    assert base.overall == more.overall
