"""Type-name normalization shared by the parser and the checks."""

from __future__ import annotations

import re

from . import ast

_ALIASES = {"uint": "uint256", "int": "int256", "byte": "bytes1", "ufixed": "ufixed128x18", "fixed": "fixed128x18"}

_ELEMENTARY = re.compile(
    r"^(address|bool|string|bytes|uint(8|16|24|32|40|48|56|64|72|80|88|96|104|112|120|128|136|144|152|160|168|176|184|192|200|208|216|224|232|240|248|256)?"
    r"|int(8|16|24|32|40|48|56|64|72|80|88|96|104|112|120|128|136|144|152|160|168|176|184|192|200|208|216|224|232|240|248|256)?"
    r"|bytes([1-9]|[12][0-9]|3[0-2])|byte|u?fixed(\d+x\d+)?)$"
)

DYNAMIC_ELEMENTARY = frozenset({"string", "bytes"})


def is_elementary(name: str) -> bool:
    return bool(_ELEMENTARY.match(name))


def normalize(name: str) -> str:
    return _ALIASES.get(name, name)


def type_text(t: ast.TypeName | None) -> str:
    """Canonical signature text: ``uint`` becomes ``uint256``, payable dropped."""
    if t is None:
        return "var"
    if isinstance(t, ast.ElementaryType):
        return t.name
    if isinstance(t, ast.UserType):
        return t.name
    if isinstance(t, ast.MappingType):
        return f"mapping({type_text(t.key)}=>{type_text(t.value)})"
    if isinstance(t, ast.ArrayType):
        if t.length is None:
            return f"{type_text(t.base)}[]"
        n = t.length.text if isinstance(t.length, ast.Literal) else "?"
        return f"{type_text(t.base)}[{n}]"
    if isinstance(t, ast.FunctionType):
        return "function"
    return "?"


def is_unsigned(t: ast.TypeName | None) -> bool:
    return isinstance(t, ast.ElementaryType) and t.name.startswith("uint")


def is_integer(t: ast.TypeName | None) -> bool:
    return isinstance(t, ast.ElementaryType) and (t.name.startswith("uint") or t.name.startswith("int"))


def is_address(t: ast.TypeName | None) -> bool:
    return isinstance(t, ast.ElementaryType) and t.name == "address"


def is_dynamic(t: ast.TypeName | None) -> bool:
    """Dynamic-length ABI types: string, bytes and unsized arrays."""
    if isinstance(t, ast.ElementaryType):
        return t.name in DYNAMIC_ELEMENTARY
    if isinstance(t, ast.ArrayType):
        return t.length is None
    return False
