import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import HOPF, R2_UNKNOT, RIGHT_TREFOIL, TWIST, knot, random_knots, raw, table
from leetor.diagram import (
    braid_closure,
    change_crossing,
    mirror,
    parse_pd,
    random_braid_word,
    resolve,
    unknot,
    vertex_bits,
    writhe,
)
from leetor.errors import EdgeCountViolation, InconsistentOrientation, MalformedPd


def sign_oracle(tuples, m):
    """Signs for PD codes whose labels increase along the orientation."""
    out = []
    for a, b, c, d in tuples:
        out.append(1 if b == d % m + 1 else -1)
    return out


def test_right_trefoil_counts():
    d = parse_pd(RIGHT_TREFOIL)
    assert (d.n, d.edge_count, d.n_plus, d.n_minus, d.component_count) == (3, 6, 3, 0, 1)
    assert writhe(d) == 3
    assert writhe(mirror(d)) == -3


def test_knottheory_style_trefoil_is_left_handed():
    # the same three crossings listed with b and d swapped are the mirror image
    d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]")
    assert (d.n_plus, d.n_minus) == (0, 3)
    assert [resolve(d, v).k for v in range(8)] == [3, 2, 2, 1, 2, 1, 1, 2]


@pytest.mark.parametrize("entry", [e for e in table() + table(True) if e["pd"].count("X") >= 3],
                         ids=lambda e: e["name"])
def test_signs_match_labelling_oracle(entry):
    d = parse_pd(entry["pd"])
    tuples, signs = raw(d)
    assert signs == sign_oracle(tuples, d.edge_count)


def test_accepted_syntaxes_agree():
    a = parse_pd(RIGHT_TREFOIL)
    b = parse_pd("PD[X[1,5,2,4], X[3,1,4,6], X[5,3,6,2]]")
    c = parse_pd("[[1,5,2,4],[3,1,4,6],[5,3,6,2]]")
    assert a == b == c


def test_empty_needs_marker():
    with pytest.raises(MalformedPd):
        parse_pd("")
    d = parse_pd("", unknot_marker=True)
    assert d == unknot() and d.n == 0 and writhe(d) == 0
    assert resolve(d, ()).k == 1


def test_twist_is_a_one_crossing_unknot():
    d = parse_pd(TWIST)
    assert d.n == 1 and d.edge_count == 2 and d.is_knot
    ks = sorted(resolve(d, v).k for v in range(2))
    tuples, _ = raw(d)
    assert ks == sorted(len(oracles.circles(tuples, vertex_bits(v, 1))) for v in range(2)) == [1, 2]


@pytest.mark.parametrize(
    "text, err",
    [
        ("X[1,2,3,4]", EdgeCountViolation),
        ("X[1,1,2,3]", EdgeCountViolation),
        ("X[1,2,2]", MalformedPd),
        ("X[1,a,2,2]", MalformedPd),
        ("hello", MalformedPd),
        ("X[1,1,2,3] X[3,2,4,4]", InconsistentOrientation),
    ],
)
def test_malformed(text, err):
    with pytest.raises(err):
        parse_pd(text)


def test_hopf_link_is_tagged():
    d = parse_pd(HOPF)
    assert d.multi_component and d.component_count == 2
    assert resolve(d, 0).k == 2


def test_trefoil_resolutions_against_bfs_oracle():
    d = parse_pd(RIGHT_TREFOIL)
    tuples, _ = raw(d)
    assert resolve(d, (0, 0, 0)).k == 2
    assert resolve(d, (1, 1, 1)).k == 3
    for v in range(8):
        r = resolve(d, v)
        comps = oracles.circles(tuples, vertex_bits(v, 3))
        assert r.k == len(comps)
        for comp in comps:
            assert len({r.circle(e) for e in comp}) == 1


@pytest.mark.parametrize("d", random_knots(25, 7, seed=11), ids=lambda d: d.pd())
def test_resolutions_against_bfs_oracle_random(d):
    tuples, _ = raw(d)
    for v in range(1 << d.n):
        r = resolve(d, v)
        comps = oracles.circles(tuples, vertex_bits(v, d.n))
        assert r.k == len(comps)
        # same partition of edges
        part = {frozenset(e for e in range(1, d.edge_count + 1) if r.circle(e) == c) for c in range(r.k)}
        assert part == set(comps)
        # adjacent vertices differ by exactly one circle
        for i in range(d.n):
            if not (v >> i) & 1:
                assert abs(resolve(d, v | (1 << i)).k - r.k) == 1


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_resolve_independent_of_processing_order(data):
    d = knot(data.draw(st.sampled_from(["3_1", "4_1", "5_2", "6_1", "0_1_r2"])))
    v = data.draw(st.integers(0, (1 << d.n) - 1))
    order = data.draw(st.permutations(range(d.n)))
    assert resolve(d, v, order) == resolve(d, v)


def test_vertex_as_bits_or_mask():
    d = parse_pd(RIGHT_TREFOIL)
    assert resolve(d, (1, 0, 1)) == resolve(d, 0b101)
    with pytest.raises(ValueError):
        resolve(d, (1, 0))
    with pytest.raises(ValueError):
        resolve(d, 8)


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_2", "6_3", "0_1_twist", "0_1_r2"])
def test_mirror_swaps_signs(name):
    d = knot(name)
    m = mirror(d)
    assert (m.n_plus, m.n_minus) == (d.n_minus, d.n_plus)
    assert mirror(m) == d


def test_change_crossing_flips_one_sign():
    d = parse_pd(RIGHT_TREFOIL)
    e = change_crossing(d, 1)
    assert [x.sign for x in e.crossings] == [1, -1, 1]
    assert e.crossings[1].reversed() == d.crossings[1]
    # circles at vertex v of D- are those of v xor e_c in D+
    for v in range(8):
        assert resolve(e, v).k == resolve(d, v ^ 0b010).k


def test_r2_unknot_parses():
    d = parse_pd(R2_UNKNOT)
    assert d.n == 2 and d.is_knot and writhe(d) == 0


def test_braid_closure_trefoil():
    d = braid_closure([1, 1, 1], 2)
    assert d.n == 3 and d.is_knot and writhe(d) == 3
    tuples, signs = raw(d)
    assert Counter(len(oracles.circles(tuples, vertex_bits(v, 3))) for v in range(8)) == Counter(
        resolve(parse_pd(RIGHT_TREFOIL), v).k for v in range(8)
    )


def test_random_braid_word_parity_guard():
    with pytest.raises(ValueError):
        random_braid_word(random.Random(0), 4, 4)
    w = random_braid_word(random.Random(0), 5, 4)
    assert braid_closure(w, 4).is_knot
