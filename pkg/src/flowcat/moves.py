"""Moves on truncated framed flow categories.

Every move is a pure function returning a new category.  Handle slides
are implemented directly from their moduli/framing rules;
:func:`intermediate_category` followed by :func:`handle_cancel` gives an
independent route to the same result, which the test-suite exploits.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Union

from networkx.utils import UnionFind

from .core import (BrokenFlow, Circle, Component, FlowCategory, FlowCatError,
                   Interval, eps, fresh_id)


class MoveError(FlowCatError):
    """A move whose preconditions fail."""


def _sign(sigma) -> int:
    if sigma in ("+", 1, +1):
        return 1
    if sigma in ("-", -1):
        return -1
    raise MoveError("E_PARSE", f"slide sign must be + or -, got {sigma!r}")


def _same_grading_pair(cat: FlowCategory, x: str, y: str) -> int:
    for o in (x, y):
        if o not in cat.objects:
            raise MoveError("E_UNKNOWN_OBJECT", f"no object {o}")
    if x == y:
        raise MoveError("E_SELF", f"cannot slide {x} over itself")
    if cat.objects[x] != cat.objects[y]:
        raise MoveError("E_GRADING", f"|{x}| = {cat.objects[x]} but |{y}| = {cat.objects[y]}")
    return cat.objects[x]


def _copy_points(src: dict[str, int], dst: dict[str, int], factor: int) -> dict[str, str]:
    """Add sign-scaled copies of ``src`` to ``dst``; return old id -> new id."""
    ids = {}
    for pid in sorted(src):
        nid = fresh_id(pid, dst)
        dst[nid] = factor * src[pid]
        ids[pid] = nid
    return ids


def handle_slide(cat: FlowCategory, x: str, y: str, sigma) -> FlowCategory:
    """(σ)-slide ``x`` over ``y``; object ids are kept.

    Chain level: row y of the incoming differential becomes r_y - σ r_x and
    column x of the outgoing one becomes c_x + σ c_y.
    """
    _same_grading_pair(cat, x, y)
    s = _sign(sigma)
    shift = 1 if s > 0 else 0
    new = cat.copy()

    # 0-dimensional: M(x', b') = M(x, b) ⊔ σM(y, b);  M(a', y') = M(a, y) ⊔ -σM(a, x)
    below = {b: _copy_points(cat.pts(y, b), new.points.setdefault((x, b), {}), s)
             for b in cat.targets(y)}
    above = {a: _copy_points(cat.pts(a, x), new.points.setdefault((a, y), {}), -s)
             for a in cat.sources(x)}

    # |a| = i + 2: M(a', y') gains a copy of M(a, x), framing shifted by a (+)-slide
    for (a, b), comps in cat.ones.items():
        if b != x:
            continue
        dst = new.ones.setdefault((a, y), {})
        for cid in sorted(comps):
            c = comps[cid]
            nid = fresh_id(cid, dst)
            if isinstance(c, Circle):
                dst[nid] = Circle(nid, c.label + shift)
            else:
                ends = [BrokenFlow(e.via, above[e.via][e.lower], e.upper) for e in c.ends]
                dst[nid] = Interval(nid, c.fr + shift, *ends)

    # |a| = i + 1, |b| = i - 1: one new interval per (B, A) in M(y, b) × M(a, x)
    for a in above:
        for b in below:
            dst = new.ones.setdefault((a, b), {})
            for B, sB in sorted(cat.pts(y, b).items()):
                for A in sorted(cat.pts(a, x)):
                    nid = fresh_id(f"{B}_{A}", dst)
                    dst[nid] = Interval(nid, eps(sB) + shift,
                                        BrokenFlow(y, B, above[a][A]),
                                        BrokenFlow(x, below[b][B], A))

    # |a| = i: M(x', b') gains a copy of M(y, b) with unchanged framings
    for (a, b), comps in cat.ones.items():
        if a != y:
            continue
        dst = new.ones.setdefault((x, b), {})
        for cid in sorted(comps):
            c = comps[cid]
            nid = fresh_id(cid, dst)
            if isinstance(c, Circle):
                dst[nid] = Circle(nid, c.label)
            else:
                ends = [BrokenFlow(e.via, e.lower, below[e.via][e.upper]) for e in c.ends]
                dst[nid] = Interval(nid, c.fr, *ends)
    return new.prune()


def intermediate_names(cat: FlowCategory) -> tuple[str, str]:
    """Ids used for the extra objects e and f of :func:`intermediate_category`."""
    e = fresh_id("e", cat.objects)
    f = fresh_id("f", set(cat.objects) | {e})
    return e, f


# point ids inside M(f, x), M(f, e), M(f, y)
FX, FE, FY = "fx", "fe", "fy"


def intermediate_category(cat: FlowCategory, x: str, y: str, sigma) -> FlowCategory:
    """Add a cancelling pair e (grading i), f (grading i+1) for sliding x over y.

    Cancelling f against e gives back ``cat``; cancelling f against x
    gives the slide of x over y.
    """
    i = _same_grading_pair(cat, x, y)
    s = _sign(sigma)
    e, f = intermediate_names(cat)
    new = cat.copy()
    new.add_object(e, i)
    new.add_object(f, i + 1)
    new.add_point(f, x, FX, 1)
    new.add_point(f, e, FE, -1)
    new.add_point(f, y, FY, s)

    xpart, ypart = {}, {}
    for b in sorted(set(cat.targets(x)) | set(cat.targets(y))):
        dst = new.points.setdefault((e, b), {})
        xpart[b] = _copy_points(cat.pts(x, b), dst, 1)
        ypart[b] = _copy_points(cat.pts(y, b), dst, s)

    for src, part in ((x, xpart), (y, ypart)):
        for (a, b), comps in cat.ones.items():
            if a != src:
                continue
            dst = new.ones.setdefault((e, b), {})
            for cid in sorted(comps):
                c = comps[cid]
                nid = fresh_id(cid, dst)
                if isinstance(c, Circle):
                    dst[nid] = Circle(nid, c.label)
                else:
                    ends = [BrokenFlow(q.via, q.lower, part[q.via][q.upper]) for q in c.ends]
                    dst[nid] = Interval(nid, c.fr, *ends)

    # M(f, b) = M(e, b) × [0, 1] for |b| = i - 1
    shift = 1 if s > 0 else 0
    for b in sorted(xpart):
        dst = new.ones.setdefault((f, b), {})
        for C, nid_e in xpart[b].items():
            nid = fresh_id(f"J_{C}", dst)
            dst[nid] = Interval(nid, 0, BrokenFlow(e, nid_e, FE), BrokenFlow(x, C, FX))
        for B, nid_e in ypart[b].items():
            nid = fresh_id(f"J_{B}", dst)
            fr = eps(cat.pts(y, b)[B]) + shift
            dst[nid] = Interval(nid, fr, BrokenFlow(e, nid_e, FE), BrokenFlow(y, B, FY))
    return new.prune()


@dataclass
class _Piece:
    id: str
    fr: int
    ends: tuple  # each a free BrokenFlow or a hashable glue key


def _assemble(pieces: list[_Piece], band: int) -> list[Component]:
    """Glue pieces along matching keys into intervals and circles.

    The framing of a result is the sum of the piece framings plus ``band``
    per gluing; a chain that closes up becomes a circle labelled by that sum.
    The result takes the smallest constituent id.
    """
    where = defaultdict(list)
    for pi, p in enumerate(pieces):
        for ei, end in enumerate(p.ends):
            if not isinstance(end, BrokenFlow):
                where[end].append((pi, ei))
    uf = UnionFind(range(len(pieces)))
    for key, occ in where.items():
        if len(occ) != 2:
            raise FlowCatError("E_GLUE", f"gluing site {key} occurs {len(occ)} times")
        uf.union(occ[0][0], occ[1][0])
    out: list[Component] = []
    for group in uf.to_sets():
        group = sorted(group)
        free = [end for pi in group for end in pieces[pi].ends if isinstance(end, BrokenFlow)]
        glued = (2 * len(group) - len(free)) // 2
        fr = sum(pieces[pi].fr for pi in group) + band * glued
        name = min(pieces[pi].id for pi in group)
        if not free:
            out.append(Circle(name, fr))
        elif len(free) == 2:
            out.append(Interval(name, fr, free[0], free[1]))
        else:
            raise FlowCatError("E_GLUE", f"glued chain with {len(free)} free ends")
    return out


def _regroup(new: FlowCategory, pair, pieces: list[_Piece], circles: Iterable[Circle], band: int):
    comps = {c.id: c for c in _assemble(pieces, band)}
    for c in circles:
        comps[c.id] = c
    new.ones[pair] = comps


def handle_cancel(cat: FlowCategory, u: str, l: str) -> FlowCategory:
    """Cancel ``u`` against ``l`` where M(u, l) is a single point of sign ε.

    New points: composites (B, A), B ∈ M(u, b), A ∈ M(a, l), of sign -ε·s(B)·s(A).
    New 1-dimensional pieces are the bands {B}×J (J ⊂ M(a, l), framing
    fr(J) + 1 + ε_B) and J'×{A} (J' ⊂ M(u, b), framing fr(J')); old
    components passing through u or l are glued onto them.
    """
    for o in (u, l):
        if o not in cat.objects:
            raise MoveError("E_UNKNOWN_OBJECT", f"no object {o}")
    if cat.objects[u] != cat.objects[l] + 1:
        raise MoveError("E_GRADING", f"|{u}| must be |{l}| + 1")
    ul = cat.pts(u, l)
    if len(ul) != 1:
        raise MoveError("E_NOT_CANCELLABLE", f"M({u},{l}) has {len(ul)} points, need exactly one")
    (eps_ul,) = ul.values()

    new = cat.copy()
    new.remove_object(u)
    new.remove_object(l)

    ups = [a for a in cat.sources(l) if a != u]
    downs = [b for b in cat.targets(u) if b != l]
    comp: dict[tuple[str, str], dict[tuple[str, str], str]] = {}
    for a in ups:
        for b in downs:
            dst = new.points.setdefault((a, b), {})
            ids = {}
            for B, sB in sorted(cat.pts(u, b).items()):
                for A, sA in sorted(cat.pts(a, l).items()):
                    nid = fresh_id(f"{B}_{A}", dst)
                    dst[nid] = -eps_ul * sB * sA
                    ids[(B, A)] = nid
            comp[(a, b)] = ids

    pieces: dict[tuple[str, str], list[_Piece]] = defaultdict(list)
    circles: dict[tuple[str, str], list[Circle]] = defaultdict(list)
    taken: dict[tuple[str, str], set] = defaultdict(set)

    for pair, comps in cat.ones.items():
        if u in pair or l in pair:
            continue
        taken[pair].update(comps)
        for c in comps.values():
            if isinstance(c, Circle):
                circles[pair].append(c)
                continue
            ends = []
            for q in c.ends:
                if q.via == u:
                    ends.append(("U", q.lower, q.upper))
                elif q.via == l:
                    ends.append(("L", q.lower, q.upper))
                else:
                    ends.append(q)
            pieces[pair].append(_Piece(c.id, c.fr, tuple(ends)))

    # bands {B} × J for J in M(a, l), B in M(u, b)
    for (a, ll), comps in sorted(cat.ones.items()):
        if ll != l:
            continue
        for b in downs:
            pair = (a, b)
            for B, sB in sorted(cat.pts(u, b).items()):
                for cid in sorted(comps):
                    c = comps[cid]
                    nid = fresh_id(f"{cid}_{B}", taken[pair])
                    taken[pair].add(nid)
                    if isinstance(c, Circle):
                        circles[pair].append(Circle(nid, c.label + 1 + eps(sB)))
                        continue
                    ends = []
                    for q in c.ends:
                        if q.via == u:
                            ends.append(("U", B, q.upper))
                        else:
                            ends.append(BrokenFlow(q.via, comp[(q.via, b)][(B, q.lower)], q.upper))
                    pieces[pair].append(_Piece(nid, c.fr + 1 + eps(sB), tuple(ends)))

    # bands J' × {A} for J' in M(u, b), A in M(a, l)
    for (uu, b), comps in sorted(cat.ones.items()):
        if uu != u:
            continue
        for a in ups:
            pair = (a, b)
            for A in sorted(cat.pts(a, l)):
                for cid in sorted(comps):
                    c = comps[cid]
                    nid = fresh_id(f"{cid}_{A}", taken[pair])
                    taken[pair].add(nid)
                    if isinstance(c, Circle):
                        circles[pair].append(Circle(nid, c.label))
                        continue
                    ends = []
                    for q in c.ends:
                        if q.via == l:
                            ends.append(("L", q.lower, A))
                        else:
                            ends.append(BrokenFlow(q.via, q.lower, comp[(a, q.via)][(q.upper, A)]))
                    pieces[pair].append(_Piece(nid, c.fr, tuple(ends)))

    for pair in set(pieces) | set(circles):
        _regroup(new, pair, pieces[pair], circles[pair], band=0)
    return new.prune()


def whitney_cancel_points(cat: FlowCategory, x: str, y: str, p: str, m: str) -> FlowCategory:
    """Cancel a positive point ``p`` against a negative point ``m`` of M(x, y).

    Interval ends through p and through m that share the other point are
    joined by a band; each band adds 1 to the framing.
    """
    pts = cat.pts(x, y)
    if p not in pts or m not in pts or p == m:
        raise MoveError("E_NOT_SAME_MODULI", f"{p} and {m} are not two points of M({x},{y})")
    if pts[p] != 1 or pts[m] != -1:
        raise MoveError("E_SIGNS", f"need {p} positive and {m} negative")
    new = cat.copy()
    del new.points[(x, y)][p]
    del new.points[(x, y)][m]

    def rebuild(pair, key_of):
        pieces, circles = [], []
        for c in cat.comps(*pair).values():
            if isinstance(c, Circle):
                circles.append(c)
            else:
                pieces.append(_Piece(c.id, c.fr, tuple(key_of(q) for q in c.ends)))
        _regroup(new, pair, pieces, circles, band=1)

    for a in cat.sources(x):
        rebuild((a, y), lambda q: ("W", q.upper) if q.via == x and q.lower in (p, m) else q)
    for b in cat.targets(y):
        rebuild((x, b), lambda q: ("W", q.lower) if q.via == y and q.upper in (p, m) else q)
    return new.prune()


def normalize_circles(cat: FlowCategory, a: str, b: str) -> FlowCategory:
    """Replace the circles of M(a, b) by at most one non-trivially framed circle."""
    if cat.grading(a) - cat.grading(b) != 2:
        raise MoveError("E_GRADING", f"M({a},{b}) is not 1-dimensional")
    new = cat.copy()
    comps = new.ones.get((a, b), {})
    nontrivial = sorted(c.id for c in comps.values() if isinstance(c, Circle) and c.label == 0)
    kept = {cid: c for cid, c in comps.items() if not isinstance(c, Circle)}
    if len(nontrivial) % 2:
        kept[nontrivial[0]] = Circle(nontrivial[0], 0)
    new.ones[(a, b)] = kept
    return new.prune()


BIRTH_POINT = "b"


def birth(cat: FlowCategory, u: str, l: str, grading: int) -> FlowCategory:
    """Add objects u (grading g+1), l (grading g) joined by one positive point."""
    if u == l or u in cat.objects or l in cat.objects:
        raise MoveError("E_DUPLICATE_ID", f"ids {u}, {l} must be fresh and distinct")
    new = cat.copy()
    new.add_object(u, grading + 1)
    new.add_object(l, grading)
    new.add_point(u, l, BIRTH_POINT, 1)
    return new


# --- move values and scripts -------------------------------------------------

def _sgn(s: int) -> str:
    return "+" if s > 0 else "-"


@dataclass(frozen=True)
class Slide:
    x: str
    y: str
    sign: int

    def apply(self, cat):
        return handle_slide(cat, self.x, self.y, self.sign)

    def __str__(self):
        return f"slide {self.x} over {self.y} {_sgn(self.sign)}"


@dataclass(frozen=True)
class Whitney:
    x: str
    y: str
    pos: str
    neg: str

    def apply(self, cat):
        return whitney_cancel_points(cat, self.x, self.y, self.pos, self.neg)

    def __str__(self):
        return f"whitney {self.x} {self.y} {self.pos} {self.neg}"


@dataclass(frozen=True)
class Normalize:
    a: str
    b: str

    def apply(self, cat):
        return normalize_circles(cat, self.a, self.b)

    def __str__(self):
        return f"normalize {self.a} {self.b}"


@dataclass(frozen=True)
class Intermediate:
    x: str
    y: str
    sign: int

    def apply(self, cat):
        return intermediate_category(cat, self.x, self.y, self.sign)

    def __str__(self):
        return f"intermediate {self.x} {self.y} {_sgn(self.sign)}"


@dataclass(frozen=True)
class Cancel:
    u: str
    l: str

    def apply(self, cat):
        return handle_cancel(cat, self.u, self.l)

    def __str__(self):
        return f"cancel {self.u} {self.l}"


@dataclass(frozen=True)
class Birth:
    u: str
    l: str
    grading: int

    def apply(self, cat):
        return birth(cat, self.u, self.l, self.grading)

    def __str__(self):
        return f"birth {self.u} {self.l} {self.grading}"


Move = Union[Slide, Whitney, Normalize, Intermediate, Cancel, Birth]


def parse_move(line: str) -> Move:
    w = line.split()
    if not w:
        raise FlowCatError("E_PARSE", "empty move")
    kind, args = w[0], w[1:]
    try:
        if kind == "slide" and len(args) == 4 and args[1] == "over" and args[3] in "+-":
            return Slide(args[0], args[2], _sign(args[3]))
        if kind == "whitney" and len(args) == 4:
            return Whitney(*args)
        if kind == "normalize" and len(args) == 2:
            return Normalize(*args)
        if kind == "intermediate" and len(args) == 3 and args[2] in "+-":
            return Intermediate(args[0], args[1], _sign(args[2]))
        if kind == "cancel" and len(args) == 2:
            return Cancel(*args)
        if kind == "birth" and len(args) == 3:
            return Birth(args[0], args[1], int(args[2]))
    except ValueError:
        pass
    raise FlowCatError("E_PARSE", f"cannot parse move {line.strip()!r}")


def parse_script(text: str) -> list[tuple[int, Move]]:
    """Parse a move script into (line number, move) pairs; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append((lineno, parse_move(line)))
        except FlowCatError as err:
            raise FlowCatError(err.code, err.message, lineno, 1) from None
    return out


def digest(cat: FlowCategory) -> str:
    from .fileformat import serialize
    return hashlib.sha256(serialize(cat).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class LogEntry:
    move: Move
    before: str
    after: str


@dataclass
class MoveLog:
    entries: list[LogEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def moves(self) -> list[Move]:
        return [e.move for e in self.entries]

    def apply(self, cat: FlowCategory, move: Move) -> FlowCategory:
        """Apply ``move`` to ``cat`` and record it."""
        out = move.apply(cat)
        self.entries.append(LogEntry(move, digest(cat), digest(out)))
        return out

    def extend(self, other: "MoveLog") -> None:
        self.entries.extend(other.entries)

    def replay(self, cat: FlowCategory) -> FlowCategory:
        for entry in self.entries:
            cat = entry.move.apply(cat)
        return cat

    def script(self) -> str:
        return "".join(f"{e.move}\n" for e in self.entries)


def apply_script(cat: FlowCategory, moves: Iterable[Move]) -> FlowCategory:
    for move in moves:
        cat = move.apply(cat)
    return cat
