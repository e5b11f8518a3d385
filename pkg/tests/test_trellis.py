from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import trellis_column, trellis_free_brackets
from trellex import ff
from trellex.conv import ConvolutionalCode
from trellex.errors import HypothesisViolated, InputParseError, NotDeterministic
from trellex.trellis import (
    LabeledDigraph,
    TrellisCode,
    analogue_column_bound,
    exact_log,
    from_convolutional,
    parse_trellis,
    random_deterministic_trellis,
    tc_bounds,
    tc_example1,
    trellis_column_bound,
    trellis_free_bound,
)


def test_exact_log():
    assert exact_log(4, 8) == Fraction(2, 3)
    assert exact_log(16, 4) == 2
    assert isinstance(exact_log(3, 2), float)
    assert exact_log(1, 5) == 0


def test_bound_formulas():
    assert analogue_column_bound(8, 2, 4, 1) == Fraction(11, 3)
    assert trellis_column_bound(8, 2, 4, 1) == Fraction(13, 3)
    # linear case q^k states per step: trellis bound reduces to the convolutional one
    assert trellis_free_bound(2, 2, 2, 4) == 6


def test_convolutional_trellis_agrees():
    code = ConvolutionalCode.from_polys(ff.make_field(2), [[[1, 0, 1], [1, 1, 1]]])
    t = from_convolutional(code)
    assert t.flags.deterministic and t.flags.irreducible and t.flags.lossless
    assert t.column_distances(5) == [2, 3, 3, 4, 4, 5]
    assert t.free_distance() == 5
    assert trellis_column(t.graph.num_states, t.graph.edges, 0, 3) == 4


def test_example_large_column_distance():
    ex = tc_example1(8, 4, 2, 1)
    assert len(ex.codebook) == 16 and len(set(ex.codebook)) == 16
    assert ex.code.column_distances(1) == [2, 4]
    rep = tc_bounds(ex.code, 1, with_free=False, M=4)
    assert rep.column_bound == [Fraction(7, 3), Fraction(13, 3)]
    assert rep.column_bound_int == [2, 4]
    assert rep.analogue[1] == Fraction(11, 3) < 4
    assert rep.ok
    g = ex.code.graph
    assert trellis_column(g.num_states, g.edges, ex.code.initial, 1) == 4


def test_example_periodic_variant():
    ex = tc_example1(8, 4, 2, 1, periodic=True)
    t = ex.code
    assert t.M == 4 and t.flags.irreducible
    # split at the second level and rejoin at the root: one differing symbol
    assert t.free_distance() == 1
    assert tc_bounds(t, 1).ok


def test_example_hypotheses():
    with pytest.raises(HypothesisViolated):
        tc_example1(8, 4, 3, 1)
    with pytest.raises(HypothesisViolated):
        tc_bounds(tc_example1(8, 4, 2, 1).code, 1)


def test_non_deterministic_rejected():
    g = LabeledDigraph(2, [(0, 0, (0,)), (0, 1, (0,)), (1, 0, (1,)), (1, 1, (0,))], 2, 1)
    t = TrellisCode(g)
    assert not t.flags.deterministic
    with pytest.raises(NotDeterministic):
        t.column_distances(2)
    with pytest.raises(NotDeterministic):
        t.free_distance()


def test_lossy_presentation_flag():
    # two distinct paths 0->0 of length 2 with the same labels
    g = LabeledDigraph(2, [(0, 0, (0,)), (0, 1, (0,)), (1, 0, (0,)), (1, 1, (1,))], 2, 1)
    assert not TrellisCode(g).flags.lossless


def test_text_round_trip_and_parse_errors():
    t = random_deterministic_trellis(4, 2, 2, 2, np.random.default_rng(3))
    g = parse_trellis(t.graph.to_text())
    assert g.edges == t.graph.edges
    with pytest.raises(InputParseError):
        parse_trellis("")
    with pytest.raises(InputParseError):
        parse_trellis("2 1 1 2\n0 1 0 0\n")
    with pytest.raises(InputParseError):
        parse_trellis("2 1 2 2\n0 1 0\n1 0 1\n")


@pytest.mark.parametrize("seed", range(12))
def test_random_column_distances_match_oracle(seed):
    rng = np.random.default_rng(seed)
    q, n = int(rng.integers(2, 4)), int(rng.integers(1, 3))
    M = int(rng.integers(2, min(q**n, 4) + 1))
    t = random_deterministic_trellis(int(rng.integers(1, 6)), q, n, M, rng)
    got = t.column_distances(2)
    assert got == [trellis_column(t.graph.num_states, t.graph.edges, 0, j) for j in range(3)]


@pytest.mark.parametrize("seed", range(12))
def test_random_free_distance_within_oracle_brackets(seed):
    rng = np.random.default_rng(100 + seed)
    q = int(rng.integers(2, 4))
    t = random_deterministic_trellis(int(rng.integers(2, 5)), q, 2, 2, rng)
    lower, upper = trellis_free_brackets(t.graph.num_states, t.graph.edges, 0, 7)
    d = t.free_distance()
    assert lower <= d
    if upper is not None:
        assert d <= upper


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bounds_never_violated(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(2, 5))
    n = int(rng.integers(1, 4))
    M = int(rng.integers(2, min(q**n, 8) + 1))
    t = random_deterministic_trellis(int(rng.integers(1, 17)), q, n, M, rng)
    rep = tc_bounds(t, 3)
    assert rep.ok, rep.verdicts
