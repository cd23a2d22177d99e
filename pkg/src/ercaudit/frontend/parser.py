"""Hand-written recursive-descent parser for a Solidity subset.

Covers what ERC-20 style contracts need (0.4.x through 0.8.x surface
syntax). Errors are recovered per top-level item and per contract member:
the offending text becomes an ``Unsupported*`` node and a diagnostic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional, TypeVar

from . import ast
from .lexer import TRIVIA, Token, TokenKind, tokenize
from .source import Diagnostic, SourceFile
from .types import is_elementary, normalize

T = TypeVar("T")

# keywords that still work as plain identifiers
SOFT_KEYWORDS = frozenset(
    {"from", "error", "type", "fallback", "receive", "abstract", "virtual", "override",
     "immutable", "unchecked", "try", "catch", "as", "constructor", "calldata", "emit"}
)
VISIBILITY = frozenset({"public", "private", "internal", "external"})
MUTABILITY = frozenset({"pure", "view", "payable", "constant"})
LOCATIONS = frozenset({"memory", "storage", "calldata"})
UNITS = {
    "wei": 1, "gwei": 10**9, "szabo": 10**12, "finney": 10**15, "ether": 10**18,
    "seconds": 1, "minutes": 60, "hours": 3600, "days": 86400, "weeks": 604800, "years": 31536000,
}
ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=", ">>>="})
BINARY_PREC = {
    "||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, ">": 4, "<=": 4, ">=": 4,
    "|": 5, "^": 6, "&": 7, "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9, "*": 10, "/": 10, "%": 10, "**": 11,
}
PREFIX_OPS = frozenset({"!", "-", "~", "++", "--", "+"})
TOP_LEVEL_STARTS = frozenset({"contract", "library", "interface", "abstract", "pragma", "import"})


class ParseError(Exception):
    def __init__(self, token: Token, expected: tuple[str, ...] = ()) -> None:
        self.token = token
        self.expected = expected
        want = " or ".join(expected) if expected else "something else"
        super().__init__(f"expected {want}, found {token.text or 'end of input'!r}")


class Parser:
    def __init__(self, tokens: list[Token], file: SourceFile) -> None:
        self.file = file
        self.toks: list[Token] = []
        self.docs: dict[int, str] = {}
        pending: list[str] = []
        for tok in tokens:
            if tok.kind in TRIVIA:
                if tok.kind is TokenKind.DOC_COMMENT:
                    pending.append(tok.text)
                continue
            if pending:
                self.docs[len(self.toks)] = "\n".join(pending)
                pending = []
            self.toks.append(tok)
        if not self.toks or self.toks[-1].kind is not TokenKind.EOF:
            n = len(file.data)
            self.toks.append(Token(TokenKind.EOF, "", file.span(n, n)))
        self.i = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind in (TokenKind.PUNCT, TokenKind.OP, TokenKind.KEYWORD, TokenKind.IDENT) and t.text == text

    def at_eof(self) -> bool:
        return self.tok.kind is TokenKind.EOF

    def advance(self) -> Token:
        t = self.tok
        if t.kind is not TokenKind.EOF:
            self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.advance()
        raise ParseError(self.tok, (repr(text),))

    def is_ident(self, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind is TokenKind.IDENT or (t.kind is TokenKind.KEYWORD and t.text in SOFT_KEYWORDS)

    def ident(self) -> str:
        if self.is_ident():
            return self.advance().text
        raise ParseError(self.tok, ("identifier",))

    def span_from(self, start: Token) -> ast.Span:
        end = self.toks[self.i - 1].end if self.i > 0 else start.end
        return self.file.span(start.start, max(start.start, end))

    def attempt(self, fn: Callable[[], T]) -> Optional[T]:
        """Run ``fn`` speculatively; rewind and return None on failure."""
        saved = self.i
        try:
            return fn()
        except ParseError:
            self.i = saved
            return None

    def error(self, err: ParseError) -> None:
        self.diagnostics.append(
            Diagnostic("SyntaxError", str(err), err.token.span, err.expected)
        )

    # -- source unit ----------------------------------------------------------

    def parse_source_unit(self) -> ast.SourceUnit:
        start = self.tok
        unit = ast.SourceUnit(span=start.span)
        while not self.at_eof():
            begin = self.i
            try:
                if self.at("pragma"):
                    unit.pragmas.append(self.parse_pragma())
                elif self.at("import"):
                    unit.imports.append(self.parse_import())
                elif self.at("contract") or self.at("library") or self.at("interface") or (
                    self.at("abstract") and self.at("contract", 1)
                ):
                    unit.contracts.append(self.parse_contract())
                elif self.at(";"):
                    self.advance()
                elif self.tok.text in ("struct", "enum", "function", "error", "event", "using", "type") or (
                    self.is_ident() or self.tok.kind is TokenKind.KEYWORD
                ) and self._looks_like_free_declaration():
                    first = self.tok
                    self._skip_member()
                    unit.unsupported.append(ast.UnsupportedDecl(span=self.span_from(first), text=self.span_from(first).text))
                else:
                    raise ParseError(self.tok, ("pragma", "import", "contract", "library", "interface"))
            except (ParseError, RecursionError) as err:
                self._recover_top_level(begin, err)
        unit.span = self.file.span(0, len(self.file.data))
        unit.diagnostics = self.diagnostics
        return unit

    def _looks_like_free_declaration(self) -> bool:
        # free constants such as `uint256 constant X = 1;`
        j = self.i
        while j < len(self.toks) and self.toks[j].kind is not TokenKind.EOF:
            t = self.toks[j]
            if t.text == "constant":
                return True
            if t.text in (";", "{", "}"):
                return False
            j += 1
        return False

    def _recover_top_level(self, begin: int, err: Exception) -> None:
        if isinstance(err, ParseError):
            self.error(err)
            first = self.toks[begin]
        else:
            first = self.toks[begin]
            self.diagnostics.append(Diagnostic("SyntaxError", "nesting too deep", first.span))
        self.i = max(self.i, begin + 1) if self.i <= begin else self.i
        depth = 0
        while not self.at_eof():
            t = self.tok
            if depth == 0 and t.text in TOP_LEVEL_STARTS and t.kind is TokenKind.KEYWORD and self.i > begin:
                break
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth = max(0, depth - 1)
            self.advance()

    def parse_pragma(self) -> ast.PragmaDirective:
        start = self.expect("pragma")
        name_tok = self.advance()
        if name_tok.kind is TokenKind.EOF:
            raise ParseError(name_tok, ("pragma name",))
        body: list[Token] = []
        while not self.at(";"):
            if self.at_eof():
                raise ParseError(self.tok, ("';'",))
            body.append(self.advance())
        self.advance()
        text = self.file.text(body[0].start, body[-1].end) if body else ""
        constraint = None
        if name_tok.text == "solidity":
            constraint = _version_constraint(body, self.file)
        return ast.PragmaDirective(span=self.span_from(start), name=name_tok.text, text=text, constraint=constraint)

    def parse_import(self) -> ast.ImportDirective:
        start = self.expect("import")
        path = None
        while not self.at(";"):
            if self.at_eof():
                raise ParseError(self.tok, ("';'",))
            t = self.advance()
            if t.kind is TokenKind.STRING and path is None:
                path = _string_value(t.text)
        self.advance()
        if path is None:
            raise ParseError(start, ("import path",))
        return ast.ImportDirective(span=self.span_from(start), path=path)

    # -- contracts --------------------------------------------------------------

    def parse_contract(self) -> ast.ContractDef:
        start = self.tok
        doc = self.docs.get(self.i)
        abstract = bool(self.accept("abstract"))
        kind = self.advance().text
        name = self.ident()
        bases: list[ast.InheritanceSpec] = []
        if self.accept("is"):
            while True:
                bstart = self.tok
                bname = self.ident()
                while self.accept("."):
                    bname += "." + self.ident()
                args: list[ast.Expression] = []
                if self.at("("):
                    args, _ = self.parse_call_args()
                bases.append(ast.InheritanceSpec(span=self.span_from(bstart), name=bname, args=args))
                if not self.accept(","):
                    break
        self.expect("{")
        contract = ast.ContractDef(span=start.span, name=name, kind=kind, abstract=abstract, bases=bases, doc=doc)
        while not self.at("}"):
            if self.at_eof():
                raise ParseError(self.tok, ("'}'",))
            begin = self.i
            try:
                self.parse_member(contract)
            except (ParseError, RecursionError) as err:
                if isinstance(err, ParseError):
                    self.error(err)
                else:
                    self.diagnostics.append(Diagnostic("SyntaxError", "nesting too deep", self.toks[begin].span))
                self.i = begin
                first = self.tok
                self._skip_member()
                if self.i == begin:
                    self.advance()
                contract.unsupported.append(ast.UnsupportedDecl(span=self.span_from(first), text=self.span_from(first).text))
        self.expect("}")
        contract.span = self.span_from(start)
        return contract

    def _skip_member(self) -> None:
        """Skip to the end of the current member: ``;`` or a balanced block."""
        depth = 0
        while not self.at_eof():
            t = self.tok
            if t.text in ("(", "[", "{"):
                depth += 1
            elif t.text in (")", "]", "}"):
                if depth == 0:
                    return
                depth -= 1
                if depth == 0 and t.text == "}":
                    self.advance()
                    # a trailing `catch`/`else` would belong to the same construct
                    return
            elif t.text == ";" and depth == 0:
                self.advance()
                return
            self.advance()

    def parse_member(self, contract: ast.ContractDef) -> None:
        t = self.tok
        if self.at("function"):
            contract.functions.append(self.parse_function())
        elif t.text in ("constructor", "fallback", "receive") and self.at("(", 1):
            contract.functions.append(self.parse_function())
        elif self.at("modifier"):
            contract.modifiers.append(self.parse_modifier())
        elif self.at("event"):
            contract.events.append(self.parse_event())
        elif self.at("struct"):
            contract.structs.append(self.parse_struct())
        elif self.at("enum"):
            contract.enums.append(self.parse_enum())
        elif self.at("using"):
            contract.using_for.append(self.parse_using())
        elif self.at(";"):
            self.advance()
        elif self.at("error") and self.is_ident(1) or self.at("type") and self.is_ident(1) and self.at("is", 2):
            first = self.tok
            self._skip_member()
            contract.unsupported.append(ast.UnsupportedDecl(span=self.span_from(first), text=self.span_from(first).text))
        else:
            contract.state_vars.append(self.parse_state_var())

    def parse_state_var(self) -> ast.StateVarDecl:
        start = self.tok
        doc = self.docs.get(self.i)
        type_ = self.parse_type()
        visibility = "default"
        mutability = "none"
        while True:
            if self.tok.text in VISIBILITY and self.tok.kind is TokenKind.KEYWORD:
                visibility = self.advance().text
            elif self.at("constant") or self.at("immutable"):
                mutability = self.advance().text
            elif self.at("override"):
                self.advance()
                if self.at("("):
                    self._skip_parens()
            else:
                break
        name = self.ident()
        init = None
        if self.accept("="):
            init = self.parse_expression()
        self.expect(";")
        return ast.StateVarDecl(
            span=self.span_from(start), name=name, type=type_, visibility=visibility,
            mutability=mutability, initializer=init, doc=doc,
        )

    def _skip_parens(self) -> None:
        self.expect("(")
        depth = 1
        while depth and not self.at_eof():
            t = self.advance()
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1

    def parse_function(self) -> ast.FunctionDef:
        start = self.tok
        doc = self.docs.get(self.i)
        if self.accept("function"):
            if self.is_ident():
                name = self.advance().text
                kind = "function"
                if name in ("fallback", "receive") and False:  # legacy names are ordinary functions
                    kind = name
            else:
                name, kind = "", "fallback"
        else:
            word = self.advance().text
            kind = word
            name = ""
        params = self.parse_parameter_list()
        fn = ast.FunctionDef(span=start.span, name=name, kind=kind, params=params, doc=doc)
        while True:
            t = self.tok
            if t.kind is TokenKind.KEYWORD and t.text in VISIBILITY:
                fn.visibility = self.advance().text
                fn.header_order.append(("visibility", t.text))
            elif t.kind is TokenKind.KEYWORD and t.text in MUTABILITY:
                self.advance()
                fn.mutability = "view" if t.text == "constant" else t.text
                fn.header_order.append(("mutability", t.text))
            elif self.at("virtual"):
                self.advance()
                fn.virtual = True
                fn.header_order.append(("virtual", "virtual"))
            elif self.at("override"):
                self.advance()
                fn.override = True
                if self.at("("):
                    self._skip_parens()
                fn.header_order.append(("override", "override"))
            elif self.at("returns"):
                self.advance()
                fn.returns = self.parse_parameter_list()
            elif self.is_ident() and not self.at("{"):
                mstart = self.tok
                mname = self.ident()
                while self.accept("."):
                    mname += "." + self.ident()
                args = None
                if self.at("("):
                    args, _ = self.parse_call_args()
                fn.modifiers.append(ast.ModifierInvocation(span=self.span_from(mstart), name=mname, args=args))
                fn.header_order.append(("modifier", mname))
            else:
                break
        if self.accept(";"):
            fn.body = None
        else:
            fn.body = self.parse_block()
        fn.span = self.span_from(start)
        return fn

    def parse_modifier(self) -> ast.ModifierDef:
        start = self.expect("modifier")
        name = self.ident()
        params = self.parse_parameter_list() if self.at("(") else []
        while self.at("virtual") or self.at("override"):
            self.advance()
            if self.at("("):
                self._skip_parens()
        body = None if self.accept(";") else self.parse_block()
        return ast.ModifierDef(span=self.span_from(start), name=name, params=params, body=body)

    def parse_event(self) -> ast.EventDef:
        start = self.expect("event")
        name = self.ident()
        params = self.parse_parameter_list(event=True)
        anonymous = bool(self.accept("anonymous"))
        self.expect(";")
        return ast.EventDef(span=self.span_from(start), name=name, params=params, anonymous=anonymous)

    def parse_struct(self) -> ast.StructDef:
        start = self.expect("struct")
        name = self.ident()
        self.expect("{")
        members = []
        while not self.accept("}"):
            mstart = self.tok
            type_ = self.parse_type()
            mname = self.ident()
            self.expect(";")
            members.append(ast.Parameter(span=self.span_from(mstart), type=type_, name=mname))
        return ast.StructDef(span=self.span_from(start), name=name, members=members)

    def parse_enum(self) -> ast.EnumDef:
        start = self.expect("enum")
        name = self.ident()
        self.expect("{")
        values = []
        while not self.at("}"):
            values.append(self.ident())
            if not self.accept(","):
                break
        self.expect("}")
        return ast.EnumDef(span=self.span_from(start), name=name, values=values)

    def parse_using(self) -> ast.UsingFor:
        start = self.expect("using")
        lib = self.ident()
        while self.accept("."):
            lib += "." + self.ident()
        self.expect("for")
        target = None
        if not self.accept("*"):
            target = self.parse_type()
        self.accept("global")
        self.expect(";")
        return ast.UsingFor(span=self.span_from(start), library=lib, target=target)

    def parse_parameter_list(self, event: bool = False) -> list[ast.Parameter]:
        self.expect("(")
        params: list[ast.Parameter] = []
        if self.accept(")"):
            return params
        while True:
            pstart = self.tok
            type_ = self.parse_type()
            location = None
            indexed = False
            while True:
                if self.tok.text in LOCATIONS and self.tok.kind is TokenKind.KEYWORD:
                    location = self.advance().text
                elif event and self.at("indexed"):
                    self.advance()
                    indexed = True
                else:
                    break
            name = self.ident() if self.is_ident() else None
            params.append(
                ast.Parameter(span=self.span_from(pstart), type=type_, name=name, location=location, indexed=indexed)
            )
            if not self.accept(","):
                break
        self.expect(")")
        return params

    # -- types ----------------------------------------------------------------

    def parse_type(self) -> ast.TypeName:
        start = self.tok
        if self.accept("mapping"):
            self.expect("(")
            key = self.parse_type()
            if self.is_ident() and not self.at("=>"):
                self.advance()
            self.expect("=>")
            value = self.parse_type()
            if self.is_ident():
                self.advance()
            self.expect(")")
            t: ast.TypeName = ast.MappingType(span=self.span_from(start), key=key, value=value)
        elif self.at("function"):
            self.advance()
            self._skip_parens()
            while self.tok.text in VISIBILITY or self.tok.text in MUTABILITY:
                self.advance()
            if self.accept("returns"):
                self._skip_parens()
            t = ast.FunctionType(span=self.span_from(start), text=self.span_from(start).text)
        elif self.is_ident() or (self.tok.kind is TokenKind.KEYWORD and self.tok.text == "address"):
            name = self.advance().text
            if is_elementary(name):
                payable = False
                if name == "address" and self.at("payable"):
                    self.advance()
                    payable = True
                t = ast.ElementaryType(span=self.span_from(start), name=normalize(name), payable=payable)
            else:
                while self.at(".") and self.is_ident(1):
                    self.advance()
                    name += "." + self.advance().text
                t = ast.UserType(span=self.span_from(start), name=name)
        else:
            raise ParseError(self.tok, ("type name",))
        while self.at("["):
            self.advance()
            length = None
            if not self.at("]"):
                length = self.parse_expression()
            self.expect("]")
            t = ast.ArrayType(span=self.span_from(start), base=t, length=length)
        return t

    # -- statements -----------------------------------------------------------

    def parse_block(self) -> ast.Block:
        start = self.tok
        unchecked = bool(self.accept("unchecked"))
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.at_eof():
                raise ParseError(self.tok, ("'}'",))
            stmts.append(self.parse_statement())
        self.expect("}")
        return ast.Block(span=self.span_from(start), statements=stmts, unchecked=unchecked)

    def parse_statement(self) -> ast.Statement:
        start = self.tok
        text = start.text if start.kind in (TokenKind.KEYWORD, TokenKind.PUNCT, TokenKind.IDENT) else None
        if text == "{" or (text == "unchecked" and self.at("{", 1)):
            return self.parse_block()
        if text == "if" and start.kind is TokenKind.KEYWORD:
            self.advance()
            self.expect("(")
            cond = self.parse_expression()
            self.expect(")")
            then = self.parse_statement()
            orelse = self.parse_statement() if self.accept("else") else None
            return ast.If(span=self.span_from(start), cond=cond, then=then, orelse=orelse)
        if text == "for" and start.kind is TokenKind.KEYWORD:
            self.advance()
            self.expect("(")
            init = None if self.accept(";") else self.parse_simple_statement()
            cond = None if self.at(";") else self.parse_expression()
            self.expect(";")
            post = None if self.at(")") else self.parse_expression()
            self.expect(")")
            body = self.parse_statement()
            return ast.For(span=self.span_from(start), init=init, cond=cond, post=post, body=body)
        if text == "while" and start.kind is TokenKind.KEYWORD:
            self.advance()
            self.expect("(")
            cond = self.parse_expression()
            self.expect(")")
            body = self.parse_statement()
            return ast.While(span=self.span_from(start), cond=cond, body=body)
        if text == "do" and start.kind is TokenKind.KEYWORD:
            self.advance()
            body = self.parse_statement()
            self.expect("while")
            self.expect("(")
            cond = self.parse_expression()
            self.expect(")")
            self.expect(";")
            return ast.While(span=self.span_from(start), cond=cond, body=body, do_while=True)
        if text == "return" and start.kind is TokenKind.KEYWORD:
            self.advance()
            value = None if self.at(";") else self.parse_expression()
            self.expect(";")
            return ast.Return(span=self.span_from(start), value=value)
        if text in ("break", "continue") and start.kind is TokenKind.KEYWORD:
            self.advance()
            self.expect(";")
            cls = ast.Break if text == "break" else ast.Continue
            return cls(span=self.span_from(start))
        if text == "throw" and start.kind is TokenKind.KEYWORD:
            self.advance()
            self.expect(";")
            return ast.Revert(span=self.span_from(start), throw=True)
        if text == "emit" and start.kind is TokenKind.KEYWORD and not self.at("(", 1):
            self.advance()
            expr = self.parse_expression()
            self.expect(";")
            if not isinstance(expr, ast.Call):
                raise ParseError(start, ("event call",))
            return ast.Emit(span=self.span_from(start), call=expr)
        if text == "assembly" and start.kind is TokenKind.KEYWORD:
            self.advance()
            if self.tok.kind is TokenKind.STRING:
                self.advance()
            if self.at("("):
                self._skip_parens()
            self._skip_braces()
            return ast.Assembly(span=self.span_from(start), text=self.span_from(start).text)
        if text == "try" and start.kind is TokenKind.KEYWORD:
            self.advance()
            while not self.at("{") and not self.at_eof():
                if self.at("("):
                    self._skip_parens()
                else:
                    self.advance()
            self._skip_braces()
            while self.accept("catch"):
                while not self.at("{") and not self.at_eof():
                    self.advance()
                self._skip_braces()
            return ast.UnsupportedStmt(span=self.span_from(start), text=self.span_from(start).text)
        if text == "_" and self.at(";", 1):
            self.advance()
            self.advance()
            return ast.Placeholder(span=self.span_from(start))
        if text == "revert" and self.is_ident(1) and not self.at("(", 1):
            self.advance()
            call = self.parse_expression()
            self.expect(";")
            if not isinstance(call, ast.Call):
                raise ParseError(start, ("error call",))
            return ast.Revert(span=self.span_from(start), call=call)
        return self.parse_simple_statement()

    def _skip_braces(self) -> None:
        self.expect("{")
        depth = 1
        while depth:
            if self.at_eof():
                raise ParseError(self.tok, ("'}'",))
            t = self.advance()
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1

    def parse_simple_statement(self) -> ast.Statement:
        start = self.tok
        decl = self.attempt(self._var_decl_statement)
        if decl is not None:
            return decl
        expr = self.parse_expression()
        self.expect(";")
        span = self.span_from(start)
        if isinstance(expr, ast.Call) and isinstance(expr.callee, ast.Identifier):
            callee = expr.callee.name
            if callee in ("require", "assert") and expr.args:
                message = expr.args[1] if len(expr.args) > 1 else None
                return ast.RequireStmt(span=span, kind=callee, cond=expr.args[0], message=message, call=expr)
            if callee == "revert":
                return ast.Revert(span=span, message=expr.args[0] if expr.args else None, call=expr)
        return ast.ExpressionStmt(span=span, expr=expr)

    def _var_decl_statement(self) -> ast.VarDeclStmt:
        start = self.tok
        decls: list[Optional[ast.VarDecl]] = []
        if self.at("var"):
            self.advance()
            if self.at("("):
                self.advance()
                while not self.at(")"):
                    if self.at(","):
                        decls.append(None)
                        self.advance()
                        continue
                    dstart = self.tok
                    decls.append(ast.VarDecl(span=dstart.span, type=None, name=self.ident()))
                    if not self.accept(","):
                        break
                self.expect(")")
            else:
                dstart = self.tok
                decls.append(ast.VarDecl(span=dstart.span, type=None, name=self.ident()))
        elif self.at("("):
            self.advance()
            while not self.at(")"):
                if self.at(","):
                    decls.append(None)
                    self.advance()
                    if self.at(")"):
                        decls.append(None)
                    continue
                decls.append(self._single_decl())
                if not self.accept(","):
                    break
                if self.at(")"):
                    decls.append(None)
            self.expect(")")
            if not any(d is not None for d in decls):
                raise ParseError(self.tok, ("declaration",))
            self.expect("=")
            value = self.parse_expression()
            self.expect(";")
            return ast.VarDeclStmt(span=self.span_from(start), decls=decls, value=value)
        else:
            decls.append(self._single_decl())
        value = None
        if self.accept("="):
            value = self.parse_expression()
        elif not self.at(";"):
            raise ParseError(self.tok, ("'='", "';'"))
        self.expect(";")
        return ast.VarDeclStmt(span=self.span_from(start), decls=decls, value=value)

    def _single_decl(self) -> ast.VarDecl:
        dstart = self.tok
        type_ = self.parse_type()
        location = None
        if self.tok.text in LOCATIONS and self.tok.kind is TokenKind.KEYWORD:
            location = self.advance().text
        name = self.ident()
        return ast.VarDecl(span=self.span_from(dstart), type=type_, name=name, location=location)

    # -- expressions ----------------------------------------------------------

    def parse_expression(self) -> ast.Expression:
        start = self.tok
        left = self.parse_conditional()
        if self.tok.kind is TokenKind.OP and self.tok.text in ASSIGN_OPS:
            op = self.advance().text
            right = self.parse_expression()
            return ast.Assignment(span=self.span_from(start), op=op, target=left, value=right)
        return left

    def parse_conditional(self) -> ast.Expression:
        start = self.tok
        cond = self.parse_binary(1)
        if self.accept("?"):
            then = self.parse_expression()
            self.expect(":")
            orelse = self.parse_expression()
            return ast.Conditional(span=self.span_from(start), cond=cond, then=then, orelse=orelse)
        return cond

    def parse_binary(self, min_prec: int) -> ast.Expression:
        start = self.tok
        left = self.parse_unary()
        while self.tok.kind is TokenKind.OP and self.tok.text in BINARY_PREC:
            op = self.tok.text
            prec = BINARY_PREC[op]
            if prec < min_prec:
                break
            self.advance()
            # ** is right-associative
            right = self.parse_binary(prec if op == "**" else prec + 1)
            left = ast.BinaryOp(span=self.span_from(start), op=op, left=left, right=right)
        return left

    def parse_unary(self) -> ast.Expression:
        start = self.tok
        if self.tok.kind is TokenKind.OP and self.tok.text in PREFIX_OPS:
            op = self.advance().text
            operand = self.parse_unary()
            return ast.UnaryOp(span=self.span_from(start), op=op, operand=operand, prefix=True)
        if self.at("delete"):
            self.advance()
            operand = self.parse_unary()
            return ast.UnaryOp(span=self.span_from(start), op="delete", operand=operand, prefix=True)
        return self.parse_postfix(self.parse_primary(), start)

    def parse_postfix(self, expr: ast.Expression, start: Token) -> ast.Expression:
        while True:
            if self.at("."):
                self.advance()
                member_tok = self.tok
                if member_tok.kind not in (TokenKind.IDENT, TokenKind.KEYWORD):
                    raise ParseError(member_tok, ("member name",))
                self.advance()
                member = member_tok.text
                if member in ("value", "gas") and self.at("(") and isinstance(expr, (ast.MemberAccess, ast.CallOptions)):
                    self.advance()
                    arg = self.parse_expression()
                    self.expect(")")
                    if isinstance(expr, ast.CallOptions) and expr.legacy:
                        expr = ast.CallOptions(
                            span=self.span_from(start), expr=expr.expr,
                            names=expr.names + [member], values=expr.values + [arg], legacy=True,
                        )
                    else:
                        expr = ast.CallOptions(span=self.span_from(start), expr=expr, names=[member], values=[arg], legacy=True)
                    continue
                expr = ast.MemberAccess(span=self.span_from(start), expr=expr, member=member)
            elif self.at("["):
                self.advance()
                index = None
                if not self.at("]"):
                    index = self.parse_expression()
                    if self.accept(":"):
                        if not self.at("]"):
                            self.parse_expression()
                elif self.accept(":"):
                    if not self.at("]"):
                        self.parse_expression()
                self.expect("]")
                expr = ast.IndexAccess(span=self.span_from(start), base=expr, index=index)
            elif self.at("("):
                args, names = self.parse_call_args()
                expr = ast.Call(span=self.span_from(start), callee=expr, args=args, arg_names=names)
            elif self.at("{") and self.is_ident(1) and self.at(":", 2):
                self.advance()
                names, values = [], []
                while not self.at("}"):
                    names.append(self.ident())
                    self.expect(":")
                    values.append(self.parse_expression())
                    if not self.accept(","):
                        break
                self.expect("}")
                expr = ast.CallOptions(span=self.span_from(start), expr=expr, names=names, values=values)
            elif self.tok.kind is TokenKind.OP and self.tok.text in ("++", "--"):
                op = self.advance().text
                expr = ast.UnaryOp(span=self.span_from(start), op=op, operand=expr, prefix=False)
            else:
                return expr

    def parse_call_args(self) -> tuple[list[ast.Expression], list[str]]:
        self.expect("(")
        args: list[ast.Expression] = []
        names: list[str] = []
        if self.accept("{"):
            while not self.at("}"):
                names.append(self.ident())
                self.expect(":")
                args.append(self.parse_expression())
                if not self.accept(","):
                    break
            self.expect("}")
            self.expect(")")
            return args, names
        while not self.at(")"):
            args.append(self.parse_expression())
            if not self.accept(","):
                break
        self.expect(")")
        return args, names

    def parse_primary(self) -> ast.Expression:
        start = self.tok
        kind = start.kind
        if kind is TokenKind.NUMBER:
            self.advance()
            unit = None
            if self.tok.kind is TokenKind.IDENT and self.tok.text in UNITS:
                unit = self.advance().text
            return _number_literal(start.text, unit, self.span_from(start))
        if kind is TokenKind.STRING:
            parts = [self.advance()]
            while self.tok.kind is TokenKind.STRING:
                parts.append(self.advance())
            value = "".join(_string_value(p.text) for p in parts)
            return ast.Literal(span=self.span_from(start), kind="string", text=self.span_from(start).text, value=value)
        if kind is TokenKind.HEX_STRING:
            self.advance()
            return ast.Literal(span=self.span_from(start), kind="hex-string", text=start.text, value=start.text)
        if kind is TokenKind.KEYWORD and start.text in ("true", "false"):
            self.advance()
            return ast.Literal(span=start.span, kind="bool", text=start.text, value=start.text == "true")
        if self.at("("):
            self.advance()
            items: list[Optional[ast.Expression]] = []
            trailing = False
            while not self.at(")"):
                if self.at(","):
                    items.append(None)
                    self.advance()
                    trailing = True
                    continue
                items.append(self.parse_expression())
                trailing = False
                if self.accept(","):
                    trailing = True
                else:
                    break
            if trailing:
                items.append(None)
            self.expect(")")
            if len(items) == 1 and items[0] is not None:
                return items[0]
            return ast.TupleExpr(span=self.span_from(start), items=items)
        if self.at("["):
            self.advance()
            items = []
            while not self.at("]"):
                items.append(self.parse_expression())
                if not self.accept(","):
                    break
            self.expect("]")
            return ast.TupleExpr(span=self.span_from(start), items=items, bracket=True)
        if self.at("new"):
            self.advance()
            type_ = self.parse_type()
            return ast.NewExpr(span=self.span_from(start), type=type_)
        if self.at("payable") and self.at("(", 1):
            self.advance()
            return ast.TypeExpr(span=start.span, type=ast.ElementaryType(span=start.span, name="address", payable=True))
        if self.at("type") and self.at("(", 1):
            self.advance()
            self.advance()
            type_ = self.parse_type()
            self.expect(")")
            return ast.Call(
                span=self.span_from(start), callee=ast.Identifier(span=start.span, name="type"),
                args=[ast.TypeExpr(span=type_.span, type=type_)],
            )
        if self.is_ident() or (kind is TokenKind.KEYWORD and start.text == "address"):
            name = self.advance().text
            if is_elementary(name):
                payable = False
                if name == "address" and self.at("payable"):
                    self.advance()
                    payable = True
                t = ast.ElementaryType(span=self.span_from(start), name=normalize(name), payable=payable)
                if self.at("[") and self.at("]", 1):
                    # array type used as expression, e.g. `new uint[](n)` is handled by NewExpr;
                    # `uint[]` alone appears in abi.decode type tuples
                    self.advance()
                    self.advance()
                    t = ast.ArrayType(span=self.span_from(start), base=t)
                return ast.TypeExpr(span=self.span_from(start), type=t)
            return ast.Identifier(span=start.span, name=name)
        raise ParseError(start, ("expression",))


def _version_constraint(body: list[Token], file: SourceFile) -> Optional[ast.VersionConstraint]:
    comps: list[tuple[str, tuple[int, int, int]]] = []
    op = ""
    for t in body:
        if t.kind is TokenKind.OP and t.text in ("^", "~", ">=", "<=", ">", "<", "="):
            op = t.text
        elif t.kind is TokenKind.NUMBER:
            parts = t.text.split(".")
            try:
                nums = [int(p) for p in parts]
            except ValueError:
                return None
            if not 1 <= len(nums) <= 3 or any(n < 0 for n in nums):
                return None
            nums += [0] * (3 - len(nums))
            comps.append((op, (nums[0], nums[1], nums[2])))
            op = ""
        elif t.kind is TokenKind.OP and t.text in ("||", "-", "*"):
            op = ""
        else:
            return None
    if not comps:
        return None
    span = file.span(body[0].start, body[-1].end)
    return ast.VersionConstraint(span=span, comparators=comps)


def _string_value(raw: str) -> str:
    if raw.startswith("unicode"):
        raw = raw[len("unicode"):]
    body = raw[1:-1] if len(raw) >= 2 and raw[-1] == raw[0] else raw[1:]
    try:
        return body.encode("latin-1", "backslashreplace").decode("unicode_escape")
    except (UnicodeDecodeError, ValueError):
        return body


def _number_literal(text: str, unit: Optional[str], span: ast.Span) -> ast.Literal:
    clean = text.replace("_", "")
    scale = UNITS.get(unit, 1) if unit else 1
    if clean[:2].lower() == "0x":
        digits = clean[2:]
        value = int(digits, 16) * scale if digits else None
        kind = "address" if len(digits) == 40 else "number"
        return ast.Literal(span=span, kind=kind, text=text, value=value, radix=16, digits=digits, unit=unit)
    value: object = None
    try:
        mantissa, _, exp = clean.lower().partition("e")
        if mantissa.count(".") <= 1:
            v = Fraction(mantissa) * (Fraction(10) ** int(exp or 0)) * scale
            value = int(v) if v.denominator == 1 else v
    except (ValueError, ZeroDivisionError, OverflowError):
        value = None
    return ast.Literal(span=span, kind="number", text=text, value=value, radix=10, digits=clean, unit=unit)


def parse(tokens: list[Token], file: SourceFile) -> ast.SourceUnit:
    """Build a SourceUnit from a token stream; diagnostics land on ``unit.diagnostics``."""
    return Parser(tokens, file).parse_source_unit()


def parse_file(file: SourceFile) -> ast.SourceUnit:
    tokens, lex_diags = tokenize(file)
    unit = parse(tokens, file)
    unit.diagnostics = lex_diags + unit.diagnostics
    return unit


def parse_text(text: str | bytes, path: str = "<string>") -> ast.SourceUnit:
    data = text.encode("utf-8") if isinstance(text, str) else text
    return parse_file(SourceFile(path, data))
