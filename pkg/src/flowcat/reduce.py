"""Driving a category to (primary) Smith normal form by recorded moves.

Row and column operations on the chain complex are realized by handle
slides: a (σ)-slide of x over y sends r_y to r_y - σ r_x and c_x to
c_x + σ c_y.  Every slide is followed by Whitney cancellations so that
0-dimensional moduli stay single-signed.
"""

from __future__ import annotations

from .algebra import primary_decompose
from .core import FlowCategory, chain_complex, fresh_id
from .moves import Birth, Cancel, MoveLog, Slide, Whitney


class Reducer:
    """A category together with the log of moves applied to it so far."""

    def __init__(self, cat: FlowCategory):
        self.cat = cat
        self.log = MoveLog()

    def do(self, move) -> None:
        self.cat = self.log.apply(self.cat, move)

    def purify(self, pairs=None) -> None:
        """Whitney-cancel +/- pairs, smallest ids first, until each moduli is single-signed."""
        if pairs is None:
            pairs = sorted(self.cat.points)
        for a, b in pairs:
            pts = self.cat.pts(a, b)
            pos = sorted(p for p, s in pts.items() if s > 0)
            neg = sorted(p for p, s in pts.items() if s < 0)
            for p, m in zip(pos, neg):
                self.do(Whitney(a, b, p, m))

    def slide(self, x: str, y: str, sigma: int) -> None:
        self.do(Slide(x, y, sigma))
        touched = [(x, b) for b in self.cat.targets(x)] + [(a, y) for a in self.cat.sources(y)]
        self.purify(touched)

    def entry(self, col: str, row: str) -> int:
        return self.cat.signed_count(col, row)

    def row_add(self, target: str, source: str, k: int) -> None:
        """r_target += k r_source (side effect c_source -= k c_target)."""
        for _ in range(abs(k)):
            self.slide(source, target, -1 if k > 0 else 1)

    def col_add(self, target: str, source: str, k: int) -> None:
        """c_target += k c_source (side effect r_source -= k r_target)."""
        for _ in range(abs(k)):
            self.slide(target, source, 1 if k > 0 else -1)

    def row_transform(self, rows: tuple[str, str], M) -> None:
        """Replace the two rows by M·(rows) for M in SL2(Z)."""
        for t, s, k in sl2_elementary(M):
            self.row_add(rows[t], rows[s], k)

    def fresh_pair(self) -> tuple[str, str]:
        u = fresh_id("u", self.cat.objects)
        l = fresh_id("l", set(self.cat.objects) | {u})
        return u, l


def sl2_elementary(M) -> list[tuple[int, int, int]]:
    """Elementary row operations (target, source, k) whose product is M.

    Applying ``row[target] += k * row[source]`` in the returned order
    multiplies a two-row matrix on the left by M.
    """
    (a, b), (c, d) = M
    if a * d - b * c != 1:
        raise ValueError(f"{M} is not in SL2(Z)")
    ops = []

    def op(t, s, k):
        nonlocal a, b, c, d
        if not k:
            return
        ops.append((t, s, k))
        if t == 0:
            a, b = a + k * c, b + k * d
        else:
            c, d = c + k * a, d + k * b

    # Euclid on the first column, then fix the sign and clear b
    while c:
        if not a:
            op(0, 1, 1)
            continue
        op(1, 0, -(c // a))
        if c:
            op(0, 1, -(a // c))
    if a == -1:
        op(1, 0, 1)
        op(0, 1, -2)
        op(1, 0, 1)
    op(0, 1, -b)
    assert (a, b, c, d) == (1, 0, 0, 1)
    return [(t, s, -k) for t, s, k in reversed(ops)]


def purify_signs(cat: FlowCategory) -> tuple[FlowCategory, MoveLog]:
    r = Reducer(cat)
    r.purify()
    return r.cat, r.log


def _reduce_step(r: Reducer, k: int) -> list[tuple[str, str]]:
    """Diagonalize d_k : C_k -> C_{k-1}; return the (column, row) pivots."""
    lower = set(r.cat.at_grading(k - 1))
    # rows hit by the previous differential must not be touched
    used = {y for y in lower if any(r.entry(y, z) for z in r.cat.at_grading(k - 2))}
    rows = sorted(lower - used)
    cols = r.cat.at_grading(k)
    pivots = []
    while True:
        cands = [(abs(r.entry(x, y)), y, x) for y in rows for x in cols if r.entry(x, y)]
        if not cands:
            return pivots
        _, py, px = min(cands)
        while True:
            for y in rows:
                if y != py and r.entry(px, y):
                    r.row_add(y, py, -(r.entry(px, y) // r.entry(px, py)))
            for x in cols:
                if x != px and r.entry(x, py):
                    r.col_add(x, px, -(r.entry(x, py) // r.entry(px, py)))
            rest = [(abs(r.entry(px, y)), 0, y) for y in rows if y != py and r.entry(px, y)]
            rest += [(abs(r.entry(x, py)), 1, x) for x in cols if x != px and r.entry(x, py)]
            if rest:
                _, kind, o = min(rest)
                if kind == 0:
                    py = o
                else:
                    px = o
                continue
            d = r.entry(px, py)
            bad = next((y for y in rows if y != py
                        for x in cols if x != px and r.entry(x, y) % d), None)
            if bad is None:
                break
            r.row_add(py, bad, 1)
        pivots.append((px, py))
        rows.remove(py)
        cols.remove(px)


def _snf(r: Reducer) -> None:
    r.purify()
    if not r.cat.objects:
        return
    lo, hi = min(r.cat.objects.values()), max(r.cat.objects.values())
    for k in range(lo + 1, hi + 1):
        _reduce_step(r, k)


def snf_reduce(cat: FlowCategory) -> tuple[FlowCategory, MoveLog]:
    """Smith normal form up to the signs of the diagonal entries."""
    r = Reducer(cat)
    _snf(r)
    return r.cat, r.log


def _diagonal(cat: FlowCategory) -> list[tuple[str, str, int]]:
    return sorted((x, y, n) for (x, y), n in chain_complex(cat).entries().items())


def _make_positive(r: Reducer, x: str, y: str) -> None:
    """Negate the entry (x, y) by rotating row y against a fresh cancelling pair."""
    k = r.cat.objects[x]
    u, l = r.fresh_pair()
    r.do(Birth(u, l, k - 1))
    r.row_transform((y, l), ((-1, 0), (0, -1)))
    r.do(Cancel(u, l))


def _split(r: Reducer, x: str, y: str, q: int, s: int) -> None:
    """Split the entry d = q*s (coprime) at (x, y) into q and s using a fresh pair."""
    k = r.cat.objects[x]
    u, l = r.fresh_pair()
    r.do(Birth(u, l, k - 1))
    # rows (l, y), columns (u, x): diag(1, d)
    a, b = _bezout(q, s)  # a*q + b*s = 1
    r.col_add(x, u, b * s)  # [[1, b s], [0, d]]
    r.row_transform((l, y), ((q, -b), (s, a)))  # [[q, 0], [s, s]]
    r.col_add(u, x, -1)  # [[q, 0], [0, s]]


def _bezout(q: int, s: int) -> tuple[int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    a, b = q, s
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    assert a == 1, "factors must be coprime"
    return x0, y0


def primary_snf_reduce(cat: FlowCategory) -> tuple[FlowCategory, MoveLog]:
    """Smith normal form with positive prime-power diagonal entries and no unit entries."""
    r = Reducer(cat)
    _snf(r)
    for x, y, n in _diagonal(r.cat):
        if n < 0:
            _make_positive(r, x, y)
    for x, y, n in _diagonal(r.cat):
        if n == 1:
            r.do(Cancel(x, y))
            continue
        parts = primary_decompose(n)
        while len(parts) > 1:
            q, rest = parts[0], 1
            for p in parts[1:]:
                rest *= p
            _split(r, x, y, q, rest)
            parts = parts[1:]
    return r.cat, r.log


def is_smith_form(C) -> bool:
    """Each row and column has at most one nonzero entry, and per step the
    absolute values form a divisibility chain."""
    for m in C.differentials.values():
        nz = [(i, j) for i in range(m.shape[0]) for j in range(m.shape[1]) if m[i, j]]
        if len({i for i, _ in nz}) != len(nz) or len({j for _, j in nz}) != len(nz):
            return False
        vals = sorted(abs(int(m[i, j])) for i, j in nz)
        if any(b % a for a, b in zip(vals, vals[1:])):
            return False
    return True
