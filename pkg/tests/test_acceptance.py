"""Acceptance criteria 1-7, each reported as one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; a
plain ``pytest`` run lists them in the terminal summary.
"""

import random
import time

import numpy as np
import pytest

from flowcat import examples
from flowcat.algebra import homology, nonzero, smith_normal_form
from flowcat.core import chain_complex, components, validate
from flowcat.generate import category_from_differentials, random_category
from flowcat.iso import iso_check
from flowcat.moves import (Birth, Cancel, Intermediate, MoveLog, Normalize, Slide, Whitney,
                           handle_cancel, handle_slide, intermediate_category, intermediate_names)
from flowcat.reduce import primary_snf_reduce

from oracles import (chain_signature, det, homology_oracle, is_diagonal_type, minor_gcd_factors,
                     moore_differentials, prime_powers)

CORPUS_SIZE = 260


@pytest.fixture(scope="module")
def corpus():
    cats = [random_category(seed) for seed in range(CORPUS_SIZE)]
    for cat in cats:
        assert len(cat.objects) <= 8
        assert len(set(cat.objects.values())) in (3, 4)
        assert all(len(p) <= 3 for p in cat.points.values())
        assert validate(cat).ok
    return cats


def same_grading_pairs(cat):
    return sorted((x, y) for x in cat.objects for y in cat.objects
                  if x != y and cat.objects[x] == cat.objects[y])


def groups(C):
    return {p: nonzero(homology(C, p)) for p in (0, 2, 3)}


def circles(cat, a, b, label=0):
    return [c for c in cat.circles(a, b) if c.label == label]


# 1 ---------------------------------------------------------------------------

def test_criterion_1_trefoil_pipeline(report):
    t0 = time.perf_counter()
    problems = []
    cat = examples.category("c1")
    states = {}
    for k in range(1, 5):
        log = MoveLog()
        for _, move in examples.script(f"c{k}-to-c{k + 1}"):
            cat = log.apply(cat, move)
            if not validate(cat).ok:
                problems.append(f"invalid after {move}")
        states[k + 1] = (cat, log)
        if iso_check(cat, examples.category(f"c{k + 1}")) is None:
            problems.append(f"c{k}-to-c{k + 1} does not reach built-in C{k + 1}")

    c1 = examples.category("c1")
    after_slide = handle_slide(c1, "223", "232", "-")
    ints = after_slide.intervals("333", "232")
    if not (len(ints) == 8 and all(j.fr == 0 for j in ints)):
        problems.append(f"M(333,232) after the first slide: {len(ints)} intervals")

    c2, log2 = states[2]
    pre = c1  # the state just before the final normalize of the C1 -> C2 script
    for move in log2.moves[:-1]:
        pre = move.apply(pre)
    pre_circ = pre.circles("233", "222")
    if not (len(pre_circ) == 3 and all(c.label == 0 for c in pre_circ) and not pre.intervals("233", "222")):
        problems.append("M(233,222) before normalizing is not three circles labelled 0")
    if [c.label for c in c2.comps("233", "222").values()] != [0]:
        problems.append("C2: M(233,222) is not a single eta circle")

    c3, c4 = states[3][0], states[4][0]
    if len(circles(c3, "333", "232")) != 1:
        problems.append("C3: no xi circle in M(333,232)")
    if sum(len(circles(c3, a, "222")) for a in ("233", "323", "332")) != 3:
        problems.append("C3: expected three eta circles")
    if sum(len(circles(c4, "333", b)) for b in ("223", "232", "322")) != 3:
        problems.append("C4: expected three xi circles")

    c5 = states[5][0]
    comps = components(c5)
    moore = [c for c in comps if len(c) == 2]
    for comp in moore:
        x, y = sorted(comp, key=lambda o: -c5.objects[o])
        if (c5.objects[x], c5.objects[y]) != (8, 7) or abs(c5.signed_count(x, y)) != 2:
            problems.append(f"C5 component {sorted(comp)} is not a Z/2 Moore piece in degree 7")
    if len(comps) != 3 or len(moore) != 2:
        problems.append(f"C5 has {len(comps)} components, {len(moore)} of size two")

    elapsed = time.perf_counter() - t0
    if elapsed >= 5:
        problems.append(f"took {elapsed:.2f}s")
    ok = report(1, not problems, f"C1 -> C5 pipeline, {elapsed:.2f}s" + ("; " + "; ".join(problems) if problems else ""))
    assert ok, problems


# 2 ---------------------------------------------------------------------------

def test_criterion_2_homology_of_examples(report):
    expected_z = {9: (0, ()), 8: (0, (2,)), 7: (0, (2, 2)), 6: (0, (2,))}
    expected_z2 = {9: 1, 8: 3, 7: 3, 6: 1}
    problems = []
    for name in examples.CATEGORIES:
        C = chain_complex(examples.category(name))
        oz = homology_oracle(C, 0)
        o2 = homology_oracle(C, 2)
        hz = {k: (h.rank, h.torsion) for k, h in homology(C).items() if k in expected_z}
        h2 = {k: h.rank for k, h in homology(C, 2).items()}
        if hz != expected_z or {k: v for k, v in hz.items() if v != (0, ())} != oz:
            problems.append(f"{name} over Z: {hz}")
        if h2 != expected_z2 or {k: r for k, (r, _) in o2.items()} != expected_z2:
            problems.append(f"{name} over Z/2: {h2}")
    ok = report(2, not problems, "H over Z: 0, Z/2, (Z/2)^2, Z/2; Z/2-dims 1,3,3,1 for C1..C5"
                + ("; " + "; ".join(problems) if problems else ""))
    assert ok, problems


# 3 ---------------------------------------------------------------------------

def test_criterion_3_slide_equals_cancelled_intermediate(corpus, report):
    t0 = time.perf_counter()
    tested, failures = 0, []
    for seed, cat in enumerate(corpus):
        pairs = same_grading_pairs(cat)
        if not pairs:
            continue
        tested += 1
        rng = random.Random(seed)
        for x, y in rng.sample(pairs, min(4, len(pairs))):
            for sigma in (1, -1):
                mid = intermediate_category(cat, x, y, sigma)
                e, f = intermediate_names(cat)
                slid = handle_slide(cat, x, y, sigma)
                if iso_check(slid, handle_cancel(mid, f, x)) is None:
                    failures.append((seed, x, y, sigma, "slide"))
                if iso_check(cat, handle_cancel(mid, f, e)) is None:
                    failures.append((seed, x, y, sigma, "identity"))
    elapsed = time.perf_counter() - t0
    ok = tested >= 200 and not failures and elapsed < 60
    report(3, ok, f"{tested} categories, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:5]


# 4 ---------------------------------------------------------------------------

def legal_moves(cat, rng):
    for x, y in same_grading_pairs(cat):
        yield Slide(x, y, 1)
        yield Slide(x, y, -1)
    for (a, b), pts in sorted(cat.points.items()):
        pos = sorted(p for p, s in pts.items() if s > 0)
        neg = sorted(p for p, s in pts.items() if s < 0)
        for p in pos:
            for m in neg:
                yield Whitney(a, b, p, m)
        if len(pts) == 1:
            yield Cancel(a, b)
    for a in cat.objects:
        for b in cat.objects:
            if cat.objects[a] - cat.objects[b] == 2:
                yield Normalize(a, b)
    for g in sorted(set(cat.objects.values())):
        yield Birth("born_u", "born_l", g)
    pairs = same_grading_pairs(cat)
    if pairs:
        x, y = rng.choice(pairs)
        yield Intermediate(x, y, rng.choice((1, -1)))


def test_criterion_4_moves_preserve_invariants(corpus, report):
    t0 = time.perf_counter()
    moves, failures = 0, []
    for seed, cat in enumerate(corpus):
        ref = groups(chain_complex(cat))
        for move in legal_moves(cat, random.Random(seed)):
            moves += 1
            out = move.apply(cat)
            C = chain_complex(out)
            if not validate(out).ok or not C.is_complex() or groups(C) != ref:
                failures.append((seed, str(move)))
    elapsed = time.perf_counter() - t0
    ok = not failures
    report(4, ok, f"{moves} moves on {len(corpus)} categories, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:5]


# 5 ---------------------------------------------------------------------------

def is_prime_power(n):
    return n > 1 and len(prime_powers(n)) == 1


def step_entries(cat):
    C = chain_complex(cat)
    return {k: sorted(int(v) for v in m.flat if v) for k, m in C.differentials.items() if m.any()}


def test_criterion_5_primary_smith_reduction(corpus, report):
    t0 = time.perf_counter()
    failures = []
    for seed, cat in enumerate(corpus):
        out, log = primary_snf_reduce(cat)
        C = chain_complex(out)
        single = all(len(set(p.values())) <= 1 and len(p) == abs(out.signed_count(a, b))
                     for (a, b), p in out.points.items())
        entries = [v for vs in step_entries(out).values() for v in vs]
        if not (validate(out).ok and single and is_diagonal_type(C)
                and all(is_prime_power(v) for v in entries)
                and groups(C) == groups(chain_complex(cat))):
            failures.append(seed)
    elapsed = time.perf_counter() - t0

    c1 = examples.category("c1")
    expected = {}
    for k, m in chain_complex(c1).differentials.items():
        parts = sorted(q for d in minor_gcd_factors(m) if d > 1 for q in prime_powers(d))
        if parts:
            expected[k] = parts
    out, log = primary_snf_reduce(c1)
    got = step_entries(out)
    c4 = {k: sorted(abs(v) for v in vs) for k, vs in step_entries(examples.category("c4")).items()}
    c1_ok = got == expected == {9: [2], 8: [2, 2], 7: [2]} and c4 == expected and log.replay(c1) == out
    ok = not failures and c1_ok and elapsed < 60
    report(5, ok, f"{len(corpus)} categories, {len(failures)} failures, {elapsed:.1f}s; "
                  f"C1 blocks {got} (oracle {expected}, C4 {c4})")
    assert ok, (failures[:5], got)


# 6 ---------------------------------------------------------------------------

def test_criterion_6_smith_form_unit_suite(report):
    rng = random.Random(6)
    cases, failures = 10_000, []
    for i in range(cases):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        sf = smith_normal_form(A)
        recon = (sf.U.dot(np.array(A, dtype=object)).dot(sf.V) == sf.diagonal_matrix((m, n))).all()
        unimodular = abs(det(sf.U.tolist())) == 1 and abs(det(sf.V.tolist())) == 1
        if sf.D != minor_gcd_factors(A) or not recon or not unimodular:
            failures.append(A)
    ok = not failures
    report(6, ok, f"{cases} matrices up to 4x4 in [-3,3], {len(failures)} failures")
    assert ok, failures[:3]


# 7 ---------------------------------------------------------------------------

# (torsion as prime powers, the same group written with invariant factors)
PRESENTATIONS = [
    ([2], [2]), ([3], [3]), ([4], [4]), ([2, 3], [6]), ([2, 2], [2, 2]),
    ([3, 4], [12]), ([2, 2, 3], [2, 6]), ([], []), ([5], [5]), ([2, 9], [18]),
]


def test_criterion_7_moore_pairs(report):
    rng = random.Random(7)
    pairs, failures = 60, []
    for i in range(pairs):
        primary, invariant = PRESENTATIONS[i % len(PRESENTATIONS)]
        free_n, free_n1 = rng.randint(0, 1), rng.randint(0, 1)
        if not primary and not free_n and not free_n1:
            free_n = 1
        n = rng.randint(2, 6)
        cats = [category_from_differentials(rng, moore_differentials(rng, list(t), free_n, free_n1), base=n - 1)
                for t in (primary, invariant)]
        h = [homology_oracle(chain_complex(c)) for c in cats]
        assert h[0] == h[1] and set(h[0]) <= {n, n + 1}, h
        outs = [primary_snf_reduce(c)[0] for c in cats]
        if chain_signature(outs[0]) != chain_signature(outs[1]):
            failures.append((i, chain_signature(outs[0]), chain_signature(outs[1])))
    ok = not failures and pairs >= 50
    report(7, ok, f"{pairs} pairs of Moore-type categories, {len(failures)} mismatches")
    assert ok, failures[:3]
