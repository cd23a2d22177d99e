"""AST node families for the supported Solidity subset.

Every node carries the byte span it was parsed from. Nodes compare
structurally (span included), which is what the determinism tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional

from .source import Span


@dataclass(kw_only=True)
class Node:
    span: Span

    def children(self) -> Iterator[Node]:
        for f in fields(self):
            if f.name == "span":
                continue
            value = getattr(self, f.name)
            if isinstance(value, Node):
                yield value
            elif isinstance(value, (list, tuple)):
                for item in value:
                    if isinstance(item, Node):
                        yield item
                    elif isinstance(item, tuple):
                        yield from (x for x in item if isinstance(x, Node))

    def walk(self) -> Iterator[Node]:
        """Pre-order traversal including ``self``."""
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children())))


# --- types -----------------------------------------------------------------


@dataclass(kw_only=True)
class TypeName(Node):
    pass


@dataclass(kw_only=True)
class ElementaryType(TypeName):
    name: str  # normalized: uint -> uint256, byte -> bytes1
    payable: bool = False


@dataclass(kw_only=True)
class UserType(TypeName):
    name: str  # may be dotted, e.g. Lib.Struct


@dataclass(kw_only=True)
class MappingType(TypeName):
    key: TypeName
    value: TypeName


@dataclass(kw_only=True)
class ArrayType(TypeName):
    base: TypeName
    length: Optional[Expression] = None


@dataclass(kw_only=True)
class FunctionType(TypeName):
    text: str


# --- expressions -----------------------------------------------------------


@dataclass(kw_only=True)
class Expression(Node):
    pass


@dataclass(kw_only=True)
class Identifier(Expression):
    name: str


@dataclass(kw_only=True)
class MemberAccess(Expression):
    expr: Expression
    member: str


@dataclass(kw_only=True)
class IndexAccess(Expression):
    base: Expression
    index: Optional[Expression] = None


@dataclass(kw_only=True)
class CallOptions(Expression):
    """``f{value: v, gas: g}`` or the legacy ``f.value(v).gas(g)`` chain."""

    expr: Expression
    names: list[str]
    values: list[Expression]
    legacy: bool = False

    def option(self, name: str) -> Optional[Expression]:
        for n, v in zip(self.names, self.values):
            if n == name:
                return v
        return None


@dataclass(kw_only=True)
class Call(Expression):
    callee: Expression
    args: list[Expression]
    arg_names: list[str] = field(default_factory=list)


@dataclass(kw_only=True)
class BinaryOp(Expression):
    op: str
    left: Expression
    right: Expression


@dataclass(kw_only=True)
class UnaryOp(Expression):
    op: str
    operand: Expression
    prefix: bool = True


@dataclass(kw_only=True)
class Assignment(Expression):
    op: str  # "=", "+=", ...
    target: Expression
    value: Expression


@dataclass(kw_only=True)
class Conditional(Expression):
    cond: Expression
    then: Expression
    orelse: Expression


@dataclass(kw_only=True)
class Literal(Expression):
    """Literal with its exact source text.

    ``kind`` is one of number, address, string, hex-string, bool. Numbers keep
    ``digits`` (source digit string, separators stripped) and ``radix``.
    """

    kind: str
    text: str
    value: object = None
    radix: int = 10
    digits: str = ""
    unit: Optional[str] = None


@dataclass(kw_only=True)
class TupleExpr(Expression):
    items: list[Optional[Expression]]
    bracket: bool = False  # inline array [a, b]


@dataclass(kw_only=True)
class NewExpr(Expression):
    type: TypeName


@dataclass(kw_only=True)
class TypeExpr(Expression):
    """An elementary type used as an expression, as in ``address(x)``."""

    type: TypeName


@dataclass(kw_only=True)
class UnsupportedExpr(Expression):
    text: str


# --- statements ------------------------------------------------------------


@dataclass(kw_only=True)
class Statement(Node):
    pass


@dataclass(kw_only=True)
class Block(Statement):
    statements: list[Statement]
    unchecked: bool = False


@dataclass(kw_only=True)
class ExpressionStmt(Statement):
    expr: Expression


@dataclass(kw_only=True)
class If(Statement):
    cond: Expression
    then: Statement
    orelse: Optional[Statement] = None


@dataclass(kw_only=True)
class For(Statement):
    init: Optional[Statement]
    cond: Optional[Expression]
    post: Optional[Expression]
    body: Statement


@dataclass(kw_only=True)
class While(Statement):
    cond: Expression
    body: Statement
    do_while: bool = False


@dataclass(kw_only=True)
class Return(Statement):
    value: Optional[Expression] = None


@dataclass(kw_only=True)
class Break(Statement):
    pass


@dataclass(kw_only=True)
class Continue(Statement):
    pass


@dataclass(kw_only=True)
class RequireStmt(Statement):
    """``require(...)`` or ``assert(...)`` used as a statement."""

    kind: str  # "require" | "assert"
    cond: Expression
    message: Optional[Expression]
    call: Call

    def children(self) -> Iterator[Node]:
        # cond and message are views into call.args; walking them too would visit them twice
        yield self.call


@dataclass(kw_only=True)
class Revert(Statement):
    message: Optional[Expression] = None
    call: Optional[Call] = None
    throw: bool = False  # legacy `throw;`

    def children(self) -> Iterator[Node]:
        if self.call is not None:
            yield self.call
        elif self.message is not None:
            yield self.message


@dataclass(kw_only=True)
class Emit(Statement):
    call: Call


@dataclass(kw_only=True)
class VarDecl(Node):
    type: Optional[TypeName]  # None for legacy `var`
    name: str
    location: Optional[str] = None


@dataclass(kw_only=True)
class VarDeclStmt(Statement):
    decls: list[Optional[VarDecl]]
    value: Optional[Expression] = None


@dataclass(kw_only=True)
class Assembly(Statement):
    text: str


@dataclass(kw_only=True)
class Placeholder(Statement):
    pass


@dataclass(kw_only=True)
class OpaqueModifier(Statement):
    """Stand-in for a modifier whose definition is not available."""

    name: str
    args: list[Expression] = field(default_factory=list)


@dataclass(kw_only=True)
class UnsupportedStmt(Statement):
    text: str


# --- declarations ----------------------------------------------------------


@dataclass(kw_only=True)
class Parameter(Node):
    type: TypeName
    name: Optional[str] = None
    location: Optional[str] = None
    indexed: bool = False


@dataclass(kw_only=True)
class ModifierInvocation(Node):
    name: str
    args: Optional[list[Expression]] = None


@dataclass(kw_only=True)
class StateVarDecl(Node):
    name: str
    type: TypeName
    visibility: str = "default"  # public | internal | private | default
    mutability: str = "none"  # none | constant | immutable
    initializer: Optional[Expression] = None
    doc: Optional[str] = None


@dataclass(kw_only=True)
class FunctionDef(Node):
    name: str
    kind: str = "function"  # function | constructor | fallback | receive
    params: list[Parameter] = field(default_factory=list)
    returns: list[Parameter] = field(default_factory=list)
    visibility: str = "default"  # external | public | internal | private | default
    mutability: str = "nonpayable"  # payable | view | pure | nonpayable
    modifiers: list[ModifierInvocation] = field(default_factory=list)
    body: Optional[Block] = None
    # header attributes in source order, e.g. [("modifier", "onlyOwner"), ("visibility", "external")]
    header_order: list[tuple[str, str]] = field(default_factory=list)
    doc: Optional[str] = None
    virtual: bool = False
    override: bool = False

    @property
    def is_constructor(self) -> bool:
        return self.kind == "constructor"

    @property
    def signature(self) -> str:
        from .types import type_text

        return f"{self.name}({','.join(type_text(p.type) for p in self.params)})"


@dataclass(kw_only=True)
class ModifierDef(Node):
    name: str
    params: list[Parameter] = field(default_factory=list)
    body: Optional[Block] = None


@dataclass(kw_only=True)
class EventDef(Node):
    name: str
    params: list[Parameter] = field(default_factory=list)
    anonymous: bool = False


@dataclass(kw_only=True)
class StructDef(Node):
    name: str
    members: list[Parameter] = field(default_factory=list)


@dataclass(kw_only=True)
class EnumDef(Node):
    name: str
    values: list[str] = field(default_factory=list)


@dataclass(kw_only=True)
class UsingFor(Node):
    library: str
    target: Optional[TypeName]  # None means `*`


@dataclass(kw_only=True)
class InheritanceSpec(Node):
    name: str
    args: list[Expression] = field(default_factory=list)


@dataclass(kw_only=True)
class UnsupportedDecl(Node):
    text: str


@dataclass(kw_only=True)
class ContractDef(Node):
    name: str
    kind: str = "contract"  # contract | library | interface
    abstract: bool = False
    bases: list[InheritanceSpec] = field(default_factory=list)
    state_vars: list[StateVarDecl] = field(default_factory=list)
    functions: list[FunctionDef] = field(default_factory=list)
    modifiers: list[ModifierDef] = field(default_factory=list)
    events: list[EventDef] = field(default_factory=list)
    structs: list[StructDef] = field(default_factory=list)
    enums: list[EnumDef] = field(default_factory=list)
    using_for: list[UsingFor] = field(default_factory=list)
    unsupported: list[UnsupportedDecl] = field(default_factory=list)
    doc: Optional[str] = None

    @property
    def base_names(self) -> list[str]:
        return [b.name for b in self.bases]

    def function(self, name: str) -> Optional[FunctionDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def state_var(self, name: str) -> Optional[StateVarDecl]:
        for v in self.state_vars:
            if v.name == name:
                return v
        return None


@dataclass(kw_only=True)
class VersionConstraint(Node):
    """Comparator list from a version pragma, e.g. ``>=0.4.22 <0.6.0``."""

    comparators: list[tuple[str, tuple[int, int, int]]]

    @property
    def kind(self) -> str:
        if len(self.comparators) == 1:
            op = self.comparators[0][0]
            if op in ("", "="):
                return "exact"
            if op == "^":
                return "caret"
        return "range"

    @property
    def min_version(self) -> tuple[int, int, int]:
        lows = []
        for op, (a, b, c) in self.comparators:
            if op in ("", "=", "^", "~", ">="):
                lows.append((a, b, c))
            elif op == ">":
                lows.append((a, b, c + 1))
        return max(lows) if lows else (0, 0, 0)


@dataclass(kw_only=True)
class PragmaDirective(Node):
    name: str
    text: str  # everything after the pragma name
    constraint: Optional[VersionConstraint] = None

    @property
    def kind(self) -> str:
        return "solidity-version" if self.name == "solidity" else "other"


@dataclass(kw_only=True)
class ImportDirective(Node):
    path: str


@dataclass(kw_only=True)
class SourceUnit(Node):
    pragmas: list[PragmaDirective] = field(default_factory=list)
    imports: list[ImportDirective] = field(default_factory=list)
    contracts: list[ContractDef] = field(default_factory=list)
    unsupported: list[UnsupportedDecl] = field(default_factory=list)
    diagnostics: list = field(default_factory=list, compare=False)

    @property
    def solidity_pragma(self) -> Optional[PragmaDirective]:
        for p in self.pragmas:
            if p.kind == "solidity-version" and p.constraint is not None:
                return p
        return None

    @property
    def min_version(self) -> Optional[tuple[int, int, int]]:
        p = self.solidity_pragma
        return p.constraint.min_version if p else None
