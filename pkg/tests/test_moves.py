import random

import pytest
from hypothesis import given, strategies as st

from flowcat import examples
from flowcat.core import Circle, FlowCatError, chain_complex, validate
from flowcat.fileformat import parse
from flowcat.generate import random_category
from flowcat.iso import iso_check
from flowcat.moves import (Birth, Cancel, Intermediate, MoveError, MoveLog, Normalize, Slide, Whitney,
                           apply_script, birth, handle_cancel, handle_slide, intermediate_category,
                           intermediate_names, normalize_circles, parse_move, parse_script,
                           whitney_cancel_points)

seeds = st.integers(min_value=0, max_value=10**6)

PAIR = """flowcat v1
object a 2
object x 1
object y 1
object b 0
points a x : s+
points y b : v-
"""


def entry(cat, x, y):
    return cat.signed_count(x, y)


def same_grading_pairs(cat):
    return sorted((x, y) for x in cat.objects for y in cat.objects
                  if x != y and cat.objects[x] == cat.objects[y])


def test_plus_slide_builds_interval_with_shifted_framing():
    cat = parse(PAIR)
    out = handle_slide(cat, "x", "y", "+")
    assert validate(out).ok
    assert out.pts("x", "b") == {"v": -1}
    assert out.pts("a", "y") == {"s": -1}
    (J,) = out.intervals("a", "b")
    # ε of the negative point B is 1, plus 1 for the (+) slide
    assert J.fr == 0
    out = handle_slide(cat, "x", "y", "-")
    assert out.pts("x", "b") == {"v": 1}
    assert out.pts("a", "y") == {"s": 1}
    assert out.intervals("a", "b")[0].fr == 1


def test_plus_slide_shifts_copied_circle_label():
    text = """flowcat v1
object a 2
object x 0
object y 0
circle a x S label=0
"""
    cat = parse(text)
    assert handle_slide(cat, "x", "y", "+").circles("a", "y") == [Circle("S", 1)]
    assert handle_slide(cat, "x", "y", "-").circles("a", "y") == [Circle("S", 0)]


def test_slide_errors():
    cat = parse(PAIR)
    with pytest.raises(MoveError) as err:
        handle_slide(cat, "x", "a", "+")
    assert err.value.code == "E_GRADING"
    with pytest.raises(MoveError) as err:
        handle_slide(cat, "x", "zz", "+")
    assert err.value.code == "E_UNKNOWN_OBJECT"
    with pytest.raises(MoveError):
        handle_slide(cat, "x", "x", "+")


def test_first_slide_of_trefoil_pipeline(c1):
    out = handle_slide(c1, "223", "232", "-")
    assert validate(out).ok
    for pair in (("333", "232"), ("233", "222"), ("323", "222")):
        ints = out.intervals(*pair)
        assert len(ints) == 8 and all(j.fr == 0 for j in ints)


@given(seeds, st.sampled_from([1, -1]))
def test_slide_acts_on_chain_complex_by_row_and_column_operation(seed, sigma):
    cat = random_category(seed)
    pairs = same_grading_pairs(cat)
    if not pairs:
        return
    x, y = random.Random(seed).choice(pairs)
    out = handle_slide(cat, x, y, sigma)
    assert validate(out).ok
    g = cat.objects[x]
    for a in cat.at_grading(g + 1):
        assert entry(out, a, y) == entry(cat, a, y) - sigma * entry(cat, a, x)
        assert entry(out, a, x) == entry(cat, a, x)
    for b in cat.at_grading(g - 1):
        assert entry(out, x, b) == entry(cat, x, b) + sigma * entry(cat, y, b)
        assert entry(out, y, b) == entry(cat, y, b)


@given(seeds, st.sampled_from([1, -1]))
def test_slide_agrees_with_cancelling_the_intermediate_category(seed, sigma):
    cat = random_category(seed)
    pairs = same_grading_pairs(cat)
    if not pairs:
        return
    x, y = random.Random(seed).choice(pairs)
    mid = intermediate_category(cat, x, y, sigma)
    assert validate(mid).ok
    e, f = intermediate_names(cat)
    assert iso_check(handle_cancel(mid, f, x), handle_slide(cat, x, y, sigma)) is not None
    assert iso_check(handle_cancel(mid, f, e), cat) is not None


@given(seeds)
def test_cancel_is_gaussian_elimination(seed):
    cat = random_category(seed)
    singles = sorted(p for p, pts in cat.points.items() if len(pts) == 1)
    if not singles:
        return
    u, l = random.Random(seed).choice(singles)
    out = handle_cancel(cat, u, l)
    assert validate(out).ok
    unit = entry(cat, u, l)
    for a in cat.at_grading(cat.objects[u]):
        for b in cat.at_grading(cat.objects[l]):
            if u in (a,) or l in (b,):
                continue
            expected = entry(cat, a, b) - entry(cat, a, l) * unit * entry(cat, u, b)
            assert entry(out, a, b) == expected


@given(seeds)
def test_birth_then_cancel_is_identity(seed):
    cat = random_category(seed)
    g = random.Random(seed).choice(sorted(set(cat.objects.values())))
    born = birth(cat, "u", "l", g)
    assert validate(born).ok
    assert handle_cancel(born, "u", "l") == cat


def test_birth_rejects_taken_ids():
    with pytest.raises(MoveError) as err:
        birth(parse(PAIR), "x", "new", 0)
    assert err.value.code == "E_DUPLICATE_ID"


def test_cancel_requires_single_point(c1):
    with pytest.raises(MoveError) as err:
        handle_cancel(c1, "333", "233")
    assert err.value.code == "E_NOT_CANCELLABLE"
    with pytest.raises(MoveError) as err:
        handle_cancel(c1, "333", "222")
    assert err.value.code == "E_GRADING"


def test_whitney_glues_intervals_with_framing_one(c1):
    after = handle_slide(c1, "223", "232", "-")
    after = whitney_cancel_points(after, "223", "222", "p0", "pt0")
    assert "p0" not in after.pts("223", "222") and "pt0" not in after.pts("223", "222")
    assert validate(after).ok
    fr = sorted(j.fr for j in after.intervals("233", "222"))
    assert fr.count(1) == 2


def test_whitney_errors(c1):
    with pytest.raises(MoveError) as err:
        whitney_cancel_points(c1, "223", "222", "p0", "nope")
    assert err.value.code == "E_NOT_SAME_MODULI"
    pos = [p for p, s in c1.pts("223", "222").items() if s > 0]
    with pytest.raises(MoveError) as err:
        whitney_cancel_points(c1, "223", "222", pos[0], pos[1])
    assert err.value.code == "E_SIGNS"


@given(seeds)
def test_whitney_preserves_validity_and_count(seed):
    cat = random_category(seed)
    mixed = sorted(p for p, pts in cat.points.items() if len(set(pts.values())) == 2)
    if not mixed:
        return
    pair = random.Random(seed).choice(mixed)
    pts = cat.pts(*pair)
    p = min(q for q, s in pts.items() if s > 0)
    m = min(q for q, s in pts.items() if s < 0)
    out = whitney_cancel_points(cat, *pair, p, m)
    assert validate(out).ok
    assert out.signed_count(*pair) == cat.signed_count(*pair)
    assert len(out.pts(*pair)) == len(pts) - 2


def test_normalize_keeps_parity_of_nontrivial_circles():
    text = PAIR + "".join(f"circle a b S{i} label={l}\n" for i, l in enumerate([0, 0, 0, 1]))
    text = text.replace("points y b : v-\n", "")
    cat = parse(text)
    out = normalize_circles(cat, "a", "b")
    assert out.circles("a", "b") == [Circle("S0", 0)]
    out = normalize_circles(normalize_circles(cat, "a", "b"), "a", "b")
    assert out.circles("a", "b") == [Circle("S0", 0)]
    with pytest.raises(MoveError):
        normalize_circles(cat, "a", "x")


def test_move_syntax_round_trip():
    lines = ["slide 223 over 232 -", "whitney 223 222 p0 pt0", "normalize 233 222",
             "intermediate x y +", "cancel u l", "birth u l 3"]
    for line in lines:
        assert str(parse_move(line)) == line
    with pytest.raises(FlowCatError) as err:
        parse_script("slide a over b -\n\nslide a b\n")
    assert err.value.code == "E_PARSE" and err.value.line == 3


def test_script_log_replays(c1):
    log = MoveLog()
    cat = c1
    for _, move in examples.script("c1-to-c2"):
        cat = log.apply(cat, move)
    assert len(log) == 6
    assert log.replay(c1) == cat
    assert apply_script(c1, log.moves) == cat
    assert [str(m) for m in log.moves] == [str(m) for _, m in parse_script(log.script())]


def test_move_values_apply():
    cat = parse(PAIR)
    out = Birth("u", "l", 0).apply(cat)
    out = Slide("x", "u", -1).apply(out)
    out = Cancel("u", "l").apply(out)
    assert validate(out).ok
    mid = Intermediate("x", "y", 1).apply(cat)
    assert len(mid.objects) == 6
    assert Normalize("a", "b").apply(cat) == cat
    with pytest.raises(MoveError):
        Whitney("a", "x", "s", "s").apply(cat)


@given(seeds)
def test_opposite_slide_restores_chain_complex(seed):
    cat = random_category(seed)
    pairs = same_grading_pairs(cat)
    if not pairs:
        return
    x, y = random.Random(seed).choice(pairs)
    back = handle_slide(handle_slide(cat, x, y, 1), x, y, -1)
    assert validate(back).ok
    assert chain_complex(back).entries() == chain_complex(cat).entries()


@given(seeds)
def test_disjoint_whitney_cancellations_commute(seed):
    cat = random_category(seed)
    moves = []
    for pair, pts in sorted(cat.points.items()):
        pos = sorted(p for p, s in pts.items() if s > 0)
        neg = sorted(p for p, s in pts.items() if s < 0)
        if pos and neg:
            moves.append(Whitney(*pair, pos[0], neg[0]))
    def touched(w):
        return {(a, w.y) for a in cat.sources(w.x)} | {(w.x, b) for b in cat.targets(w.y)}

    disjoint = [(a, b) for i, a in enumerate(moves) for b in moves[i + 1:] if not touched(a) & touched(b)]
    if not disjoint:
        return
    a, b = disjoint[0]
    assert iso_check(b.apply(a.apply(cat)), a.apply(b.apply(cat))) is not None


def test_birth_on_empty_category():
    from flowcat.core import FlowCategory
    out = birth(FlowCategory(), "u", "l", 0)
    assert out.objects == {"u": 1, "l": 0}
    assert out.points == {("u", "l"): {"b": 1}}


def test_birth_then_slides_expand_c4_differential():
    c4 = examples.category("c4")
    out = birth(c4, "u", "l", 7)
    out = handle_slide(out, "232", "l", "-")
    assert validate(out).ok
    C4, C = chain_complex(c4), chain_complex(out)
    assert C.rank(8) == C4.rank(8) + 1 and C.rank(7) == C4.rank(7) + 1
    # row l of d_8 becomes a copy of row 232; column 232 of d_7 is unchanged
    for a in c4.at_grading(8):
        assert out.signed_count(a, "l") == c4.signed_count(a, "232")
    assert out.signed_count("u", "l") == 1
    assert sorted(homology_pairs(C)) == sorted(homology_pairs(C4))


def homology_pairs(C):
    from flowcat.algebra import homology, nonzero
    return [(k, str(h)) for k, h in nonzero(homology(C)).items()]


def test_slide_with_no_neighbours_changes_nothing():
    cat = parse("flowcat v1\nobject x 0\nobject y 0\n")
    assert handle_slide(cat, "x", "y", "+") == cat
