"""Seeded random valid categories for fuzzing."""

from __future__ import annotations

import random

import numpy as np

from .algebra import smith_normal_form
from .core import Circle, FlowCategory, Interval


def kernel_basis(A: np.ndarray) -> list[list[int]]:
    """Integer basis of the kernel of ``A`` (columns of V past the rank)."""
    m, n = A.shape
    if m == 0:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    snf = smith_normal_form(A)
    return [[int(v) for v in snf.V[:, j]] for j in range(len(snf.D), n)]


def random_differentials(rng: random.Random, sizes: list[int], max_entry: int = 3) -> list[np.ndarray]:
    """Matrices d_k : Z^sizes[k] -> Z^sizes[k-1] with d_{k-1} d_k = 0, listed bottom-up."""
    mats = []
    for k in range(1, len(sizes)):
        rows, cols = sizes[k - 1], sizes[k]
        if mats:
            basis = kernel_basis(mats[-1])
        else:
            basis = [[int(i == j) for i in range(rows)] for j in range(rows)]
        m = np.zeros((rows, cols), dtype=object)
        for j in range(cols):
            for _ in range(20):
                vec = [0] * rows
                for b in basis:
                    c = rng.choice((-1, 0, 0, 1, 2))
                    vec = [v + c * w for v, w in zip(vec, b)]
                if all(abs(v) <= max_entry for v in vec):
                    break
            else:
                vec = [0] * rows
            m[:, j] = vec
        mats.append(m)
    return mats


def category_from_differentials(rng: random.Random, mats: list[np.ndarray], base: int = 0,
                               pair_rate: float = 0.25, max_points: int = 3,
                               circle_rate: float = 0.3) -> FlowCategory:
    """Realize integer differentials (listed bottom-up) as a valid category.

    Each entry n becomes |n| points of sign n, sometimes with an extra +/-
    pair; the broken flows of every 2-step moduli are matched +/- at random
    into intervals of random framing, and a random circle may be added.
    """
    sizes = [mats[0].shape[0]] + [m.shape[1] for m in mats] if mats else []
    cat = FlowCategory()
    names: list[list[str]] = []
    counter = 0
    for k, n in enumerate(sizes):
        level = []
        for _ in range(n):
            oid = f"x{counter}"
            counter += 1
            cat.add_object(oid, base + k)
            level.append(oid)
        names.append(level)

    for k, d in enumerate(mats, start=1):
        for j, a in enumerate(names[k]):
            for i, b in enumerate(names[k - 1]):
                n = int(d[i, j])
                signs = [1 if n > 0 else -1] * abs(n)
                if abs(n) + 2 <= max_points and rng.random() < pair_rate:
                    signs += [1, -1]
                rng.shuffle(signs)
                for t, s in enumerate(signs):
                    cat.add_point(a, b, f"q{t}", s)

    for k in range(2, len(sizes)):
        for a in names[k]:
            for b in names[k - 2]:
                flows = list(cat.broken_flows(a, b))
                pos = [e for e in flows if cat.composite_sign(a, b, e) > 0]
                neg = [e for e in flows if cat.composite_sign(a, b, e) < 0]
                if len(pos) != len(neg):
                    raise ValueError("differentials do not compose to zero")
                rng.shuffle(neg)
                for t, (e1, e2) in enumerate(zip(pos, neg)):
                    cat.add_component(a, b, Interval(f"J{t}", rng.randint(0, 1), e1, e2))
                if rng.random() < circle_rate:
                    cat.add_component(a, b, Circle("S0", rng.randint(0, 1)))
    return cat.prune()


def random_category(rng: random.Random | int, max_objects: int = 8, levels: tuple[int, ...] = (3, 4),
                    max_points: int = 3, circle_rate: float = 0.3) -> FlowCategory:
    """A random valid category with 3-4 gradings and at most ``max_objects`` objects."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    nlev = rng.choice(levels)
    sizes = [1] * nlev
    for _ in range(rng.randint(0, max_objects - nlev)):
        sizes[rng.randrange(nlev)] += 1
    base = rng.randint(0, 2)
    mats = random_differentials(rng, sizes, max_points)
    return category_from_differentials(rng, mats, base, max_points=max_points, circle_rate=circle_rate)
