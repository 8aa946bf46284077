"""Reading and writing the line-oriented ``flowcat v1`` category format.

::

    flowcat v1
    object <id> <grading>
    points <upper-id> <lower-id> : <pt-id>+ <pt-id>- ...
    interval <upper-id> <lower-id> <int-id> fr=<0|1> end=(<via>;<lower-pt>;<upper-pt>) end=(...)
    circle <upper-id> <lower-id> <circ-id> label=<0|1>

``#`` starts a comment.  Objects must be declared before moduli that use them.
"""

from __future__ import annotations

import re

from .core import BrokenFlow, Circle, FlowCategory, FlowCatError, Interval

HEADER = "flowcat v1"

_TOK = r"[A-Za-z0-9_]+"
_POINT = re.compile(rf"({_TOK})([+-])\Z")
_END = re.compile(rf"end=\(({_TOK});({_TOK});({_TOK})\)\Z")
_TOKEN = re.compile(rf"{_TOK}\Z")


def _words(line: str) -> list[tuple[str, int]]:
    """Split on whitespace, keeping 1-based column numbers."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse(text: str) -> FlowCategory:
    cat = FlowCategory()
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        words = _words(line)
        if not words:
            continue

        def fail(msg, col=None, code="E_PARSE"):
            raise FlowCatError(code, msg, lineno, col if col is not None else words[0][1])

        if not seen_header:
            if [w for w, _ in words] != HEADER.split():
                fail(f"expected header {HEADER!r}")
            seen_header = True
            continue

        def token(i, what):
            if i >= len(words):
                fail(f"missing {what}", len(line) + 1)
            w, col = words[i]
            if not _TOKEN.match(w):
                fail(f"bad {what} {w!r}", col)
            return w

        def obj(i):
            name = token(i, "object id")
            if name not in cat.objects:
                fail(f"object {name} used before it is declared", words[i][1])
            return name

        def pair(gap, what):
            a, b = obj(1), obj(2)
            if cat.objects[a] - cat.objects[b] != gap:
                fail(f"{what} between {a} and {b} needs grading difference {gap}",
                     words[1][1], "E_GRADING")
            return a, b

        def flag(i, key):
            if i >= len(words):
                fail(f"missing {key}=", len(line) + 1)
            w, col = words[i]
            if w not in (f"{key}=0", f"{key}=1"):
                fail(f"expected {key}=0 or {key}=1, got {w!r}", col)
            return int(w[-1])

        kind = words[0][0]
        try:
            if kind == "object":
                if len(words) != 3:
                    fail("object takes an id and a grading")
                oid = token(1, "object id")
                try:
                    g = int(words[2][0])
                except ValueError:
                    fail(f"bad grading {words[2][0]!r}", words[2][1])
                cat.add_object(oid, g)
            elif kind == "points":
                a, b = pair(1, "points")
                if len(words) < 4 or words[3][0] != ":":
                    fail("expected ':' after the object pair", words[3][1] if len(words) > 3 else None)
                for w, col in words[4:]:
                    m = _POINT.match(w)
                    if not m:
                        fail(f"bad signed point {w!r}", col)
                    cat.add_point(a, b, m.group(1), 1 if m.group(2) == "+" else -1)
            elif kind == "interval":
                a, b = pair(2, "interval")
                cid = token(3, "interval id")
                fr = flag(4, "fr")
                ends = []
                for w, col in words[5:]:
                    m = _END.match(w)
                    if not m:
                        fail(f"bad endpoint {w!r}", col)
                    ends.append(BrokenFlow(*m.groups()))
                if len(ends) != 2:
                    fail(f"an interval has exactly two endpoints, got {len(ends)}")
                cat.add_component(a, b, Interval(cid, fr, ends[0], ends[1]))
            elif kind == "circle":
                a, b = pair(2, "circle")
                cid = token(3, "circle id")
                label = flag(4, "label")
                if len(words) != 5:
                    fail("trailing input after circle label", words[5][1])
                cat.add_component(a, b, Circle(cid, label))
            else:
                fail(f"unknown declaration {kind!r}")
        except FlowCatError as err:
            if err.line is None:
                raise FlowCatError(err.code, err.message, lineno, words[0][1]) from None
            raise
    if not seen_header:
        raise FlowCatError("E_PARSE", f"missing header {HEADER!r}", 1, 1)
    return cat


def serialize(cat: FlowCategory) -> str:
    """Canonical text: objects by (grading desc, id), moduli and ids lexicographic."""
    lines = [HEADER]
    for oid in sorted(cat.objects, key=lambda o: (-cat.objects[o], o)):
        lines.append(f"object {oid} {cat.objects[oid]}")
    for (a, b) in sorted(cat.points):
        pts = cat.points[(a, b)]
        if pts:
            body = " ".join(f"{p}{'+' if pts[p] > 0 else '-'}" for p in sorted(pts))
            lines.append(f"points {a} {b} : {body}")
    for (a, b) in sorted(cat.ones):
        comps = cat.ones[(a, b)]
        for cid in sorted(comps):
            c = comps[cid]
            if isinstance(c, Interval):
                lines.append(f"interval {a} {b} {cid} fr={c.fr} end={c.end1} end={c.end2}")
        for cid in sorted(comps):
            c = comps[cid]
            if isinstance(c, Circle):
                lines.append(f"circle {a} {b} {cid} label={c.label}")
    return "\n".join(lines) + "\n"


def load(path) -> FlowCategory:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(cat: FlowCategory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(cat))
