"""Framed flow categories truncated at moduli dimension one.

A category stores graded objects, signed points for every moduli space
M(a, b) with |a| - |b| = 1, and framed intervals and circles for every
M(a, b) with |a| - |b| = 2.  Interval endpoints are broken flows
(B, A) with B in M(z, b) and A in M(a, z), referenced by point id.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np
from networkx.utils import UnionFind

TOKEN = re.compile(r"[A-Za-z0-9_]+\Z")

Pair = tuple[str, str]


class FlowCatError(Exception):
    """Error carrying a stable code such as ``E_GRADING``."""

    def __init__(self, code: str, message: str, line: int | None = None,
                 column: int | None = None):
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f" (line {self.line}, column {self.column or 1})"
        return f"{self.code}: {self.message}{where}"


@dataclass(frozen=True, order=True)
class BrokenFlow:
    """Endpoint of an interval in M(a, b): ``lower`` in M(via, b), ``upper`` in M(a, via)."""

    via: str
    lower: str
    upper: str

    def __str__(self) -> str:
        return f"({self.via};{self.lower};{self.upper})"


@dataclass(frozen=True)
class SignedPoint:
    id: str
    sign: int

    @property
    def eps(self) -> int:
        return 0 if self.sign > 0 else 1


@dataclass(frozen=True)
class Interval:
    """Interval component with framing bit ``fr`` (0 is the standard framing).

    The two ends are stored sorted so equal intervals compare equal.
    """

    id: str
    fr: int
    end1: BrokenFlow
    end2: BrokenFlow

    def __post_init__(self):
        object.__setattr__(self, "fr", self.fr % 2)
        if self.end2 < self.end1:
            e1, e2 = self.end2, self.end1
            object.__setattr__(self, "end1", e1)
            object.__setattr__(self, "end2", e2)

    @property
    def ends(self) -> tuple[BrokenFlow, BrokenFlow]:
        return (self.end1, self.end2)


@dataclass(frozen=True)
class Circle:
    """Closed component; ``label`` 0 means non-trivially framed, 1 trivially framed."""

    id: str
    label: int

    def __post_init__(self):
        object.__setattr__(self, "label", self.label % 2)


Component = Union[Interval, Circle]


def eps(sign: int) -> int:
    return 0 if sign > 0 else 1


_SUFFIX = re.compile(r"(_\d+)+\Z")


def fresh_id(base: str, taken) -> str:
    """Return ``base`` or ``base_<n>`` (smallest n >= 1) not in ``taken``.

    Numeric suffixes already on ``base`` are stripped first so repeated
    copying does not grow ids without bound.
    """
    if base not in taken:
        return base
    stem = _SUFFIX.sub("", base) or base
    n = 1
    while f"{stem}_{n}" in taken:
        n += 1
    return f"{stem}_{n}"


class FlowCategory:
    """Mutable value holding objects, 0-dimensional and 1-dimensional moduli."""

    def __init__(self):
        self.objects: dict[str, int] = {}
        self.points: dict[Pair, dict[str, int]] = {}
        self.ones: dict[Pair, dict[str, Component]] = {}

    # construction

    def add_object(self, oid: str, grading: int) -> None:
        if oid in self.objects:
            raise FlowCatError("E_DUPLICATE_ID", f"object {oid} already exists")
        self.objects[oid] = int(grading)

    def add_point(self, a: str, b: str, pid: str, sign: int) -> None:
        pts = self.points.setdefault((a, b), {})
        if pid in pts:
            raise FlowCatError("E_DUPLICATE_ID", f"point {pid} already in M({a},{b})")
        pts[pid] = 1 if sign > 0 else -1

    def add_component(self, a: str, b: str, comp: Component) -> None:
        comps = self.ones.setdefault((a, b), {})
        if comp.id in comps:
            raise FlowCatError("E_DUPLICATE_ID", f"component {comp.id} already in M({a},{b})")
        comps[comp.id] = comp

    # access

    def grading(self, oid: str) -> int:
        try:
            return self.objects[oid]
        except KeyError:
            raise FlowCatError("E_UNKNOWN_OBJECT", f"no object {oid}") from None

    def pts(self, a: str, b: str) -> dict[str, int]:
        return self.points.get((a, b), {})

    def comps(self, a: str, b: str) -> dict[str, Component]:
        return self.ones.get((a, b), {})

    def intervals(self, a: str, b: str) -> list[Interval]:
        return [c for c in self.comps(a, b).values() if isinstance(c, Interval)]

    def circles(self, a: str, b: str) -> list[Circle]:
        return [c for c in self.comps(a, b).values() if isinstance(c, Circle)]

    def sources(self, b: str) -> list[str]:
        """Objects a with M(a, b) a non-empty set of points."""
        return sorted(a for (a, bb), p in self.points.items() if bb == b and p)

    def targets(self, a: str) -> list[str]:
        """Objects b with M(a, b) a non-empty set of points."""
        return sorted(b for (aa, b), p in self.points.items() if aa == a and p)

    def at_grading(self, g: int) -> list[str]:
        return sorted(o for o, h in self.objects.items() if h == g)

    def signed_count(self, a: str, b: str) -> int:
        return sum(self.pts(a, b).values())

    def broken_flows(self, a: str, b: str) -> Iterator[BrokenFlow]:
        """All composites (B in M(z, b), A in M(a, z)) for |z| = |b| + 1."""
        gb = self.objects[b]
        for z in self.targets(a):
            if self.objects.get(z) != gb + 1:
                continue
            lower = self.pts(z, b)
            if not lower:
                continue
            for B in sorted(lower):
                for A in sorted(self.pts(a, z)):
                    yield BrokenFlow(z, B, A)

    def composite_sign(self, a: str, b: str, end: BrokenFlow) -> int:
        return self.pts(end.via, b)[end.lower] * self.pts(a, end.via)[end.upper]

    # whole-value operations

    def copy(self) -> "FlowCategory":
        new = FlowCategory()
        new.objects = dict(self.objects)
        new.points = {k: dict(v) for k, v in self.points.items()}
        new.ones = {k: dict(v) for k, v in self.ones.items()}
        return new

    def prune(self) -> "FlowCategory":
        self.points = {k: v for k, v in self.points.items() if v}
        self.ones = {k: v for k, v in self.ones.items() if v}
        return self

    def remove_object(self, oid: str) -> None:
        del self.objects[oid]
        self.points = {k: v for k, v in self.points.items() if oid not in k}
        self.ones = {k: v for k, v in self.ones.items() if oid not in k}

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowCategory):
            return NotImplemented
        a, b = self.copy().prune(), other.copy().prune()
        return (a.objects, a.points, a.ones) == (b.objects, b.points, b.ones)

    def __repr__(self) -> str:
        n0 = sum(len(v) for v in self.points.values())
        n1 = sum(len(v) for v in self.ones.values())
        return f"<FlowCategory {len(self.objects)} objects, {n0} points, {n1} 1-dim components>"


@dataclass(frozen=True)
class Violation:
    code: str
    moduli: Pair | None
    component: str | None
    message: str

    def __str__(self) -> str:
        where = f" M({self.moduli[0]},{self.moduli[1]})" if self.moduli else ""
        comp = f" [{self.component}]" if self.component else ""
        return f"{self.code}{where}{comp}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate(cat: FlowCategory) -> ValidationReport:
    """Check grading constraints, endpoint references and signs, boundary coherence and d∘d = 0."""
    out: list[Violation] = []

    def bad(code, moduli, comp, msg):
        out.append(Violation(code, moduli, comp, msg))

    for oid in cat.objects:
        if not TOKEN.match(oid):
            bad("E_TOKEN", None, None, f"object id {oid!r} is not a token")

    def check_pair(pair, gap):
        a, b = pair
        missing = [o for o in pair if o not in cat.objects]
        if missing:
            bad("E_UNKNOWN_OBJECT", pair, None, f"unknown object(s) {', '.join(missing)}")
            return False
        if cat.objects[a] - cat.objects[b] != gap:
            bad("E_GRADING", pair, None,
                f"|{a}| - |{b}| = {cat.objects[a] - cat.objects[b]}, expected {gap}")
            return False
        return True

    for pair, pts in cat.points.items():
        if not check_pair(pair, 1):
            continue
        for pid, s in pts.items():
            if s not in (1, -1):
                bad("E_SIGN", pair, pid, f"sign {s} is not ±1")

    good_pairs = []
    for pair, comps in cat.ones.items():
        if comps and check_pair(pair, 2):
            good_pairs.append(pair)

    seen = set(good_pairs)
    for a in cat.objects:
        for b in cat.objects:
            if cat.objects[a] - cat.objects[b] == 2 and (a, b) not in seen:
                if any(True for _ in cat.broken_flows(a, b)):
                    good_pairs.append((a, b))

    for pair in sorted(good_pairs):
        a, b = pair
        gb = cat.objects[b]
        actual: Counter = Counter()
        for comp in cat.comps(a, b).values():
            if isinstance(comp, Circle):
                if comp.label not in (0, 1):
                    bad("E_FRAMING", pair, comp.id, f"label {comp.label}")
                continue
            usable = True
            for end in comp.ends:
                if cat.objects.get(end.via) != gb + 1:
                    bad("E_BAD_VIA", pair, comp.id, f"endpoint {end} passes through {end.via}")
                    usable = False
                elif end.lower not in cat.pts(end.via, b) or end.upper not in cat.pts(a, end.via):
                    bad("E_DANGLING_ENDPOINT", pair, comp.id, f"endpoint {end} references a missing point")
                    usable = False
                else:
                    actual[end] += 1
            if usable:
                s1 = cat.composite_sign(a, b, comp.end1)
                s2 = cat.composite_sign(a, b, comp.end2)
                if s1 != -s2:
                    bad("E_ENDPOINT_SIGN", pair, comp.id,
                        f"endpoints {comp.end1} and {comp.end2} both have composite sign {s1:+d}")
        expected = Counter(cat.broken_flows(a, b))
        if actual != expected:
            uncovered = sorted((expected - actual).elements())
            extra = sorted((actual - expected).elements())
            msg = []
            if uncovered:
                msg.append("uncovered " + " ".join(map(str, uncovered)))
            if extra:
                msg.append("repeated or spurious " + " ".join(map(str, extra)))
            bad("E_BOUNDARY", pair, None, "; ".join(msg))

    if not out:
        cc = chain_complex(cat)
        for k in sorted(cc.differentials):
            if k - 1 in cc.differentials:
                prod = cc.d(k - 1).dot(cc.d(k))
                if np.any(prod != 0):
                    bad("E_DD", None, None, f"d{k - 1}∘d{k} != 0")
    return ValidationReport(out)


@dataclass
class ChainComplex:
    """Based integer chain complex; ``differentials[k]`` maps C_k to C_{k-1}.

    Rows are indexed by ``basis[k-1]`` and columns by ``basis[k]``; the
    entry at (y, x) is the signed count of M(x, y).
    """

    basis: dict[int, list[str]]
    differentials: dict[int, np.ndarray]

    @property
    def gradings(self) -> range:
        if not self.basis:
            return range(0)
        return range(min(self.basis), max(self.basis) + 1)

    def rank(self, k: int) -> int:
        return len(self.basis.get(k, []))

    def d(self, k: int) -> np.ndarray:
        if k in self.differentials:
            return self.differentials[k]
        return np.zeros((self.rank(k - 1), self.rank(k)), dtype=object)

    def is_complex(self) -> bool:
        return all(not np.any(self.d(k - 1).dot(self.d(k)) != 0) for k in self.differentials)

    def entries(self) -> dict[tuple[str, str], int]:
        """Nonzero entries keyed by (upper object, lower object)."""
        out = {}
        for k, m in self.differentials.items():
            for i, y in enumerate(self.basis[k - 1]):
                for j, x in enumerate(self.basis[k]):
                    if m[i, j]:
                        out[(x, y)] = int(m[i, j])
        return out

    def __str__(self) -> str:
        lines = []
        for k in sorted(self.differentials, reverse=True):
            m = self.differentials[k]
            lines.append(f"d: C{k} -> C{k - 1}   cols {' '.join(self.basis[k])}   rows {' '.join(self.basis[k - 1])}")
            lines.extend("  " + " ".join(f"{int(v):3d}" for v in row) for row in m)
        return "\n".join(lines)


def chain_complex(cat: FlowCategory) -> ChainComplex:
    if not cat.objects:
        return ChainComplex({}, {})
    lo, hi = min(cat.objects.values()), max(cat.objects.values())
    basis = {g: cat.at_grading(g) for g in range(lo, hi + 1)}
    diffs = {}
    for k in range(lo + 1, hi + 1):
        rows, cols = basis[k - 1], basis[k]
        m = np.zeros((len(rows), len(cols)), dtype=object)
        for j, x in enumerate(cols):
            for i, y in enumerate(rows):
                m[i, j] = cat.signed_count(x, y)
        diffs[k] = m
    return ChainComplex(basis, diffs)


def components(cat: FlowCategory) -> list[set[str]]:
    """Connected components of the graph joining objects with non-empty moduli."""
    uf = UnionFind(cat.objects)
    for store in (cat.points, cat.ones):
        for (a, b), v in store.items():
            if v:
                uf.union(a, b)
    groups = [set(g) for g in uf.to_sets()]
    return sorted(groups, key=lambda g: (-len(g), sorted(g)))
