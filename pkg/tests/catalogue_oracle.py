"""Independent reader for the markdown check tables, used as the registry oracle."""

from __future__ import annotations

import re
from pathlib import Path

_ROW = re.compile(r"^\\multirow\{2\}\{\*\}\{(\d+)\} & \\multirow\{2\}\{\*\}\{(.*?)\} & \\tx\{")
_MARKERS = {r"$\bigcirc$": "TS", r"\texttt{BP}": "BP"}
_MACROS = [(r"\erc{}", "ERC-20"), (r"\erc", "ERC-20"), (r"\_", "_"), (r"\&", "&"), (r"\%", "%"),
           ("``", '"'), ("''", '"')]


def _braced(text: str, start: int) -> str:
    depth, i = 1, start
    while depth:
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
        i += 1
    return text[start:i - 1]


def _clean(title: str) -> str:
    for src, dst in _MACROS:
        title = title.replace(src, dst)
    title = re.sub(r"\\[a-zA-Z]+\{([^{}]*)\}", r"\1", title)
    return " ".join(title.replace("{", "").replace("}", "").split())


def table_rows(path: str | Path) -> list[tuple[int, str, str]]:
    """(id, SWC label or marker, title) for every numbered table row."""
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        m = _ROW.match(line)
        if not m:
            continue
        mark = m.group(2)
        label = _MARKERS.get(mark, f"SWC-{mark}" if mark.isdigit() else mark)
        rows.append((int(m.group(1)), label, _clean(_braced(line, m.end()))))
    return rows
