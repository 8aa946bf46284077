"""Built-in trefoil categories C1..C5 and the move scripts relating them."""

from __future__ import annotations

from importlib import resources

from .core import FlowCategory
from .fileformat import parse
from .moves import Move, parse_script

CATEGORIES = tuple(f"trefoil3-q21-c{k}" for k in range(1, 6))
SCRIPTS = tuple(f"c{k}-to-c{k + 1}" for k in range(1, 5))


SHORT = {f"c{k}": f"trefoil3-q21-c{k}" for k in range(1, 6)}


def _file(name: str) -> str:
    base = name[:-3] if name.endswith(".fc") else name
    if base in SHORT:
        return SHORT[base] + ".fc"
    for stem, ext in ((CATEGORIES, ".fc"), (SCRIPTS, ".moves")):
        base = name[: -len(ext)] if name.endswith(ext) else name
        if base in stem:
            return base + ext
    raise KeyError(name)


def names() -> list[str]:
    return list(CATEGORIES) + list(SCRIPTS)


def is_example(name: str) -> bool:
    try:
        _file(name)
    except KeyError:
        return False
    return True


def is_category(name: str) -> bool:
    return is_example(name) and _file(name).endswith(".fc")


def raw_text(name: str) -> str:
    return resources.files("flowcat").joinpath("data", _file(name)).read_text(encoding="utf-8")


def category(name: str) -> FlowCategory:
    """``category("c3")`` and ``category("trefoil3-q21-c3")`` are the same."""
    return parse(raw_text(name))


def script(name: str) -> list[tuple[int, Move]]:
    return parse_script(raw_text(name))
