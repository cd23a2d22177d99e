"""Basic-block control-flow graphs over effective function bodies."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from ..frontend import ast
from .modifiers import EffectiveBody


class EdgeLabel(Enum):
    SEQ = "seq"
    TRUE = "true"
    FALSE = "false"
    LOOP_BACK = "loop-back"


# A block item is a simple statement, a control statement standing for the
# evaluation of its condition, or a bare expression (a for-loop's update).
Item = Union[ast.Statement, ast.Expression]


@dataclass
class BasicBlock:
    id: int
    items: list[Item] = field(default_factory=list)
    kind: str = "normal"  # normal | revert

    @property
    def statements(self) -> list[ast.Statement]:
        return [i for i in self.items if isinstance(i, ast.Statement)]


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: EdgeLabel


@dataclass
class Cfg:
    blocks: list[BasicBlock]
    edges: list[Edge]
    entry: int
    exits: list[int]
    revert: Optional[int] = None

    def successors(self, block: int) -> list[int]:
        return [e.dst for e in self.edges if e.src == block]

    def predecessors(self, block: int) -> list[int]:
        return [e.src for e in self.edges if e.dst == block]

    def reachable(self, start: Optional[int] = None) -> set[int]:
        """Blocks reachable from ``start`` (default: entry), ``start`` included."""
        start = self.entry if start is None else start
        seen = {start}
        stack = [start]
        while stack:
            b = stack.pop()
            for s in self.successors(b):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen

    def normal_blocks(self) -> list[BasicBlock]:
        return [b for b in self.blocks if b.kind == "normal"]

    def items(self) -> Iterator[tuple[int, int, Item]]:
        for b in self.blocks:
            for k, item in enumerate(b.items):
                yield b.id, k, item


def item_expressions(item: Item) -> list[ast.Node]:
    """Sub-trees evaluated when the item executes (conditions only for control nodes)."""
    if isinstance(item, ast.If):
        return [item.cond]
    if isinstance(item, ast.While):
        return [item.cond]
    if isinstance(item, ast.For):
        return [item.cond] if item.cond is not None else []
    return [item]


class _Builder:
    def __init__(self) -> None:
        self.blocks: list[BasicBlock] = []
        self.edges: list[Edge] = []
        self.exits: list[int] = []
        self.revert: Optional[int] = None
        self.loops: list[tuple[int, int]] = []  # (continue target, break target)
        self.current: Optional[int] = None

    def new(self, kind: str = "normal") -> int:
        b = BasicBlock(len(self.blocks), kind=kind)
        self.blocks.append(b)
        return b.id

    def edge(self, src: int, dst: int, label: EdgeLabel = EdgeLabel.SEQ) -> None:
        self.edges.append(Edge(src, dst, label))

    def cur(self) -> int:
        if self.current is None:
            self.current = self.new()  # unreachable code after return/break
        return self.current

    def revert_sink(self) -> int:
        if self.revert is None:
            self.revert = self.new("revert")
        return self.revert

    def append(self, item: Item) -> None:
        self.blocks[self.cur()].items.append(item)

    def lower(self, stmts: list[ast.Statement]) -> None:
        for s in stmts:
            self.stmt(s)

    def stmt(self, s: ast.Statement) -> None:
        if isinstance(s, ast.Block):
            self.lower(s.statements)
        elif isinstance(s, ast.If):
            self.append(s)
            head = self.cur()
            join_needed = []
            then_b = self.new()
            self.edge(head, then_b, EdgeLabel.TRUE)
            self.current = then_b
            self.stmt(s.then)
            if self.current is not None:
                join_needed.append(self.current)
            if s.orelse is not None:
                else_b = self.new()
                self.edge(head, else_b, EdgeLabel.FALSE)
                self.current = else_b
                self.stmt(s.orelse)
                if self.current is not None:
                    join_needed.append(self.current)
                join = self.new()
            else:
                join = self.new()
                self.edge(head, join, EdgeLabel.FALSE)
            for b in join_needed:
                self.edge(b, join)
            self.current = join
        elif isinstance(s, (ast.While, ast.For)):
            if isinstance(s, ast.For) and s.init is not None:
                self.stmt(s.init)
            pre = self.cur()
            if isinstance(s, ast.While) and s.do_while:
                body_b = self.new()
                self.edge(pre, body_b)
                cond_b = self.new()
                after = self.new()
                self.loops.append((cond_b, after))
                self.current = body_b
                self.stmt(s.body)
                if self.current is not None:
                    self.edge(self.current, cond_b)
                self.loops.pop()
                self.blocks[cond_b].items.append(s)
                self.edge(cond_b, body_b, EdgeLabel.LOOP_BACK)
                self.edge(cond_b, after, EdgeLabel.FALSE)
                self.current = after
                return
            head = self.new()
            self.edge(pre, head)
            self.blocks[head].items.append(s)
            body_b = self.new()
            after = self.new()
            self.edge(head, body_b, EdgeLabel.TRUE)
            self.edge(head, after, EdgeLabel.FALSE)
            latch_target = head
            post_b = None
            if isinstance(s, ast.For) and s.post is not None:
                post_b = self.new()
                self.blocks[post_b].items.append(s.post)
                self.edge(post_b, head, EdgeLabel.LOOP_BACK)
                latch_target = post_b
            self.loops.append((latch_target, after))
            self.current = body_b
            self.stmt(s.body)
            if self.current is not None:
                label = EdgeLabel.SEQ if post_b is not None else EdgeLabel.LOOP_BACK
                self.edge(self.current, latch_target, label)
            self.loops.pop()
            self.current = after
        elif isinstance(s, ast.RequireStmt):
            self.append(s)
            b = self.cur()
            self.edge(b, self.revert_sink(), EdgeLabel.FALSE)
            nxt = self.new()
            self.edge(b, nxt, EdgeLabel.TRUE)
            self.current = nxt
        elif isinstance(s, ast.Revert):
            self.append(s)
            self.edge(self.cur(), self.revert_sink())
            self.current = None
        elif isinstance(s, ast.Return):
            self.append(s)
            self.exits.append(self.cur())
            self.current = None
        elif isinstance(s, (ast.Break, ast.Continue)):
            self.append(s)
            if self.loops:
                cont, brk = self.loops[-1]
                if isinstance(s, ast.Break):
                    self.edge(self.cur(), brk)
                else:
                    label = EdgeLabel.LOOP_BACK if self.blocks[cont].items and isinstance(
                        self.blocks[cont].items[0], (ast.While, ast.For)
                    ) else EdgeLabel.SEQ
                    self.edge(self.cur(), cont, label)
            self.current = None
        else:
            self.append(s)


def build_cfg(body: EffectiveBody | list[ast.Statement]) -> Cfg:
    stmts = body.statements if isinstance(body, EffectiveBody) else body
    b = _Builder()
    entry = b.new()
    b.current = entry
    b.lower(stmts)
    if b.current is not None:
        b.exits.append(b.current)
    return Cfg(b.blocks, b.edges, entry, b.exits, b.revert)


def detect_loops(cfg: Cfg) -> list[Edge]:
    """Back edges found by depth-first search from the entry."""
    color: dict[int, int] = {}
    back: list[Edge] = []
    out_edges: dict[int, list[Edge]] = {}
    for e in cfg.edges:
        out_edges.setdefault(e.src, []).append(e)
    stack: list[tuple[int, int]] = [(cfg.entry, 0)]
    color[cfg.entry] = 1
    while stack:
        node, k = stack.pop()
        edges = out_edges.get(node, [])
        if k < len(edges):
            stack.append((node, k + 1))
            e = edges[k]
            c = color.get(e.dst, 0)
            if c == 0:
                color[e.dst] = 1
                stack.append((e.dst, 0))
            elif c == 1:
                back.append(e)
        else:
            color[node] = 2
    return back
