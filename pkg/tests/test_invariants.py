import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import HOPF, RIGHT_TREFOIL, knot, lee, random_knots
from leetor.cube import KH, LEE, build_complex
from leetor.diagram import mirror, parse_pd, unknot
from leetor.errors import BoundViolation, FreePartMalformed, MultiComponent
from leetor.homology import GradedModule, Summand, compute_homology
from leetor.invariants import (
    build_report,
    collapse_page,
    echelon_pivots,
    filtered_page_oracle,
    knight_move_check,
    page_dims,
    s_invariant,
    sparse_rank,
    unknotting_lower_bound,
)


def module_of(d):
    return compute_homology(build_complex(d, LEE))[0]


def test_s_examples():
    assert s_invariant(module_of(unknot())) == 0
    assert s_invariant(module_of(parse_pd(RIGHT_TREFOIL))) == 2
    assert s_invariant(module_of(mirror(parse_pd(RIGHT_TREFOIL)))) == -2


@pytest.mark.parametrize(
    "free",
    [
        [Summand(0, 1)],
        [Summand(0, 1), Summand(1, 3)],
        [Summand(0, 1), Summand(0, 5)],
        [Summand(0, -1), Summand(0, 1), Summand(2, 3)],
    ],
)
def test_malformed_free_part(free):
    with pytest.raises(FreePartMalformed):
        s_invariant(GradedModule(LEE, free))


def test_collapse_page_examples():
    assert collapse_page(module_of(unknot())) == 1
    assert collapse_page(lee("3_1")[1]) == 2
    synthetic = GradedModule(LEE, [Summand(0, -1), Summand(0, 1), Summand(2, 9, 3)])
    assert collapse_page(synthetic) == 4


def test_page_one_is_khovanov():
    for name in ("3_1", "4_1", "6_2_mirror"):
        module = lee(name)[1]
        kh, _ = compute_homology(build_complex(knot(name), KH))
        assert page_dims(module, 1) == kh.kh_dimensions()


def test_late_pages_are_two_towers():
    for name in ("3_1", "4_1", "5_1", "8_19"):
        module = lee(name)[1]
        s = s_invariant(module)
        for n in range(collapse_page(module), collapse_page(module) + 3):
            assert page_dims(module, n) == Counter({(0, s - 1): 1, (0, s + 1): 1})


def test_trefoil_page_two_is_final():
    module = lee("3_1")[1]
    assert page_dims(module, 2) == page_dims(module, 10)
    with pytest.raises(ValueError):
        page_dims(module, 0)


def test_synthetic_higher_torsion_pages():
    # one Q[t]/t^2 summand survives page 2 and dies on page 3
    g = GradedModule(LEE, [Summand(0, -1), Summand(0, 1), Summand(2, 9, 2)])
    assert page_dims(g, 2) == Counter({(0, -1): 1, (0, 1): 1, (2, 9): 1, (1, 1): 1})
    assert page_dims(g, 3) == Counter({(0, -1): 1, (0, 1): 1})


def test_unknot_oracle_every_page():
    cx = build_complex(unknot(), LEE)
    for n in range(1, 5):
        assert filtered_page_oracle(cx, n) == Counter({(0, -1): 1, (0, 1): 1})


@pytest.mark.parametrize("d", random_knots(12, 8, seed=4) + [knot("8_19")], ids=lambda d: d.pd())
def test_pages_against_filtered_oracle(d):
    cx = build_complex(d, LEE)
    module, _ = compute_homology(cx)
    prev = None
    for n in range(1, 6):
        closed = page_dims(module, n)
        assert filtered_page_oracle(cx, n) == closed
        total = sum(closed.values())
        assert prev is None or total <= prev
        prev = total


def test_oracle_needs_lee():
    with pytest.raises(ValueError):
        filtered_page_oracle(build_complex(unknot(), KH), 1)


def test_corrupted_signs_make_oracle_disagree():
    d = parse_pd(RIGHT_TREFOIL)
    module = lee("3_1")[1]
    bad = build_complex(d, LEE, sign_rule=lambda u, i: 1)
    assert any(filtered_page_oracle(bad, n) != page_dims(module, n) for n in range(1, 4))


matrices = st.lists(
    st.lists(st.sampled_from([0, 0, 1, -1, 2]), min_size=5, max_size=5), min_size=1, max_size=6
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_echelon_pivots_give_every_leading_rank(rows):
    sparse = [{j: v for j, v in enumerate(r) if v} for r in rows]
    pivots = echelon_pivots(sparse)
    for i in range(len(rows) + 1):
        for j in range(6):
            block = [r[:j] for r in rows[:i]]
            want = oracles.dense_rank(block) if j else 0
            assert sum(1 for a, b in pivots if a < i and b < j) == want
    assert sparse_rank(sparse) == oracles.dense_rank(rows)


def test_knight_move_trefoil():
    km = knight_move_check(lee("3_1")[1].kh_dimensions(), 2)
    assert km.holds
    assert km.pawn_pair == [[0, 1], [0, 3]]
    assert km.knight_pairs == [[[2, 5], [3, 9]]]


def test_knight_move_figure_eight():
    km = knight_move_check(lee("4_1")[1].kh_dimensions(), 0)
    assert km.holds
    assert km.pawn_pair == [[0, -1], [0, 1]]
    assert km.knight_pairs == [[[-2, -5], [-1, -1]], [[1, 1], [2, 5]]]


def test_knight_move_counterexample():
    km = knight_move_check({(0, 1): 1, (0, 3): 1, (1, 5): 1}, 2)
    assert not km.holds and km.counterexample == [1, 5]
    assert "counterexample" in km.to_dict()
    km = knight_move_check({(0, 3): 1}, 2)
    assert not km.holds and km.counterexample == [0, 1]


def test_reports():
    r = build_report(unknot(), name="0_1", unknotting_number=0)
    assert (r.s, r.u_X, r.u_t, r.collapse_page) == (0, 0, 0, 1)
    assert unknotting_lower_bound(r) == 0
    t = build_report(knot("3_1"), name="3_1", unknotting_number=1, pages=3)
    assert unknotting_lower_bound(t) == 1
    d = json.loads(t.to_json())
    assert set(d) == {
        "name", "pd", "kh_poincare", "lee_free_gradings", "lee_torsion", "s", "u_X", "u_t",
        "collapse_page", "knight_move", "unknotting_number", "pages",
    }
    assert d["pages"]["1"] == [[0, 1, 1], [0, 3, 1], [2, 5, 1], [3, 9, 1]]
    assert d["pages"]["2"] == d["pages"]["3"] == [[0, 1, 1], [0, 3, 1]]
    assert "pages" not in build_report(knot("3_1")).to_dict()


def test_bound_violation():
    with pytest.raises(BoundViolation):
        build_report(knot("3_1"), unknotting_number=0)
    r = build_report(knot("8_19"))
    r.unknotting_number = 1
    with pytest.raises(BoundViolation):
        unknotting_lower_bound(r)


def test_links_are_refused():
    with pytest.raises(MultiComponent):
        build_report(parse_pd(HOPF))
