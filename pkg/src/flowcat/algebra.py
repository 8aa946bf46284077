"""Exact integer linear algebra: Smith normal form, homology, primary parts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import factorint

from .core import ChainComplex, FlowCatError


def as_int_matrix(A) -> np.ndarray:
    """Copy ``A`` into an object-dtype array of Python ints."""
    arr = np.array(A, dtype=object)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = int(v)
    return out


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


@dataclass
class SmithForm:
    """``U @ A @ V`` is the m×n matrix with ``D`` down the diagonal."""

    D: tuple[int, ...]
    U: np.ndarray
    V: np.ndarray

    def diagonal_matrix(self, shape) -> np.ndarray:
        out = np.zeros(shape, dtype=object)
        for i, d in enumerate(self.D):
            out[i, i] = d
        return out


def smith_normal_form(A) -> SmithForm:
    """Smith normal form with unimodular transforms.

    Pivots are the smallest nonzero absolute value in the remaining block,
    ties broken by (row, column).  Invariant factors are non-negative.
    """
    D = as_int_matrix(A)
    m, n = D.shape
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]

    t = 0
    while t < min(m, n):
        cands = [(abs(D[i, j]), i, j) for i in range(t, m) for j in range(t, n) if D[i, j]]
        if not cands:
            break
        _, i, j = min(cands)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                q = D[i, t] // D[t, t]
                if q:
                    D[i] -= q * D[t]
                    U[i] -= q * U[t]
            for j in range(t + 1, n):
                q = D[t, j] // D[t, t]
                if q:
                    D[:, j] -= q * D[:, t]
                    V[:, j] -= q * V[:, t]
            rest = [(abs(D[i, t]), i, "r") for i in range(t + 1, m) if D[i, t]]
            rest += [(abs(D[t, j]), j, "c") for j in range(t + 1, n) if D[t, j]]
            if rest:
                # a remainder is smaller than the pivot: make it the new pivot
                _, k, kind = min(rest)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i, j] % D[t, t]), None)
            if bad is None:
                break
            D[t] += D[bad[0]]
            U[t] += U[bad[0]]
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
        t += 1
    return SmithForm(tuple(int(D[i, i]) for i in range(t)), U, V)


def invariant_factors(A) -> tuple[int, ...]:
    return smith_normal_form(A).D


def primary_decompose(d: int) -> tuple[int, ...]:
    """Prime-power factors of ``d``, sorted; ``1`` gives the empty tuple."""
    if d < 1:
        raise ValueError(f"expected a positive integer, got {d}")
    return tuple(sorted(p ** e for p, e in factorint(d).items()))


def rank_mod_p(A, p: int) -> int:
    """Rank over the field Z/p by row reduction."""
    rows = [[int(v) % p for v in row] for row in as_int_matrix(A)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c]
                rows[r] = [(v - f * w) % p for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class HomologyGroup:
    """Free rank plus prime-power torsion; over a field only ``rank`` is used."""

    rank: int
    torsion: tuple[int, ...] = ()
    coeff: int = 0

    def __str__(self) -> str:
        parts = []
        ring = f"Z/{self.coeff}" if self.coeff else "Z"
        if self.rank == 1:
            parts.append(ring)
        elif self.rank:
            parts.append(f"({ring})^{self.rank}" if self.coeff else f"Z^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def parse_coeff(coeff) -> int:
    """Map ``Z``/``Z2``/``Z3``/int to 0 (integers) or a prime p."""
    if coeff in (0, None, "Z"):
        return 0
    if isinstance(coeff, str) and coeff.startswith("Z"):
        coeff = coeff[1:]
    p = int(coeff)
    if p < 2 or len(factorint(p)) != 1 or sum(factorint(p).values()) != 1:
        raise ValueError(f"coefficients must be Z or Z/p for a prime p, got {coeff}")
    return p


def homology(C: ChainComplex, coeff=0) -> dict[int, HomologyGroup]:
    """Graded homology over Z (``coeff`` 0 or ``"Z"``) or Z/p."""
    if not C.is_complex():
        raise FlowCatError("E_NOT_COMPLEX", "consecutive differentials do not compose to zero")
    p = parse_coeff(coeff)
    grades = list(C.gradings)
    if p:
        ranks = {k: rank_mod_p(C.d(k), p) if C.d(k).size else 0 for k in C.differentials}
        return {k: HomologyGroup(C.rank(k) - ranks.get(k, 0) - ranks.get(k + 1, 0), coeff=p)
                for k in grades}
    factors = {k: invariant_factors(C.d(k)) for k in C.differentials}
    out = {}
    for k in grades:
        inc = factors.get(k + 1, ())
        free = C.rank(k) - len(factors.get(k, ())) - len(inc)
        tors = sorted(q for d in inc if d > 1 for q in primary_decompose(d))
        out[k] = HomologyGroup(free, tuple(tors))
    return out


def nonzero(groups: dict[int, HomologyGroup]) -> dict[int, HomologyGroup]:
    """Drop zero groups so complexes over different grading ranges compare."""
    return {k: h for k, h in groups.items() if h.rank or h.torsion}
