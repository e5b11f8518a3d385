from fractions import Fraction

import numpy as np
import pytest

from oracles import PyField, intersection_code_words
from trellex import ff
from trellex.block import full_space, single_parity_check
from trellex.construction import (
    ConstructionSpec,
    ExpanderTrellisCode,
    all_messages,
    convex_weights,
    ec_build_B,
    ec_build_phi,
    ec_column_bound_check,
    ec_rate_degree_report,
    ec_theorem_main_report,
    ec_verify_claims,
    ec_witness_check,
    lemma_column_bound,
    micro_spec,
    sample_messages,
)
from trellex.conv import ConvolutionalCode
from trellex.errors import ClaimViolated, DimensionZero, LengthMismatch, RankAssertionFailed
from trellex.expander import cycle_graph, xg_complete

F2 = ff.make_field(2)


def small_spec():
    """6-cycle, rate-1/2 memory-1 outer code, full inner code."""
    conv = ConvolutionalCode.from_polys(F2, [[[1, 1], [1, 0]]])
    return ConstructionSpec(conv, full_space(F2, 2), cycle_graph(3))


def _oracle_words(spec):
    g = spec.graph
    b1 = np.concatenate(spec.conv.gen.coeffs, axis=1).tolist()
    return intersection_code_words(PyField(2, F2.modulus), g.n, g.delta, g.left.tolist(), g.right.tolist(),
                                   b1, spec.inner.gen.tolist(), spec.m)


def test_micro_intersection_code():
    ic = ec_build_B(micro_spec(), cross_check=True)
    assert ic.cross_checked
    assert sorted(map(tuple, ic.codewords().tolist())) == [(0, 0, 0, 0), (1, 1, 1, 1)]
    assert sorted(map(tuple, ic.codewords().tolist())) == sorted(_oracle_words(micro_spec()))


def test_small_instance_intersection_matches_oracle():
    spec = small_spec()
    ic = ec_build_B(spec, cross_check=True)
    words = sorted(map(tuple, ic.codewords().tolist()))
    assert words == sorted(_oracle_words(spec))
    assert ic.dim >= spec.dimension_lower_bound()


def test_micro_pipeline_values():
    etc = ExpanderTrellisCode(micro_spec())
    assert etc.k == 1 and ff.rank(F2, etc.lifted.blocks[0]) == 1
    # memory 0: later blocks may vanish, so the profile is flat
    assert etc.column_distances(2) == [2, 2, 2]
    assert etc.column_distances_brute(2) == [2, 2, 2]
    enc = etc.encode([[1]])
    assert enc.c.tolist() == [[1, 1, 1, 1]] and enc.C.tolist() == [[1, 1]]
    rep = ec_column_bound_check(etc, 0.0, 0)
    assert rep[0].achieved_ratio == Fraction(1) == rep[0].bound


def test_micro_witness_decomposition():
    etc = ExpanderTrellisCode(micro_spec())
    dec = ec_witness_check(etc, [[1]], 0.0)
    assert dec.S == [[0, 1]] and dec.T == [[0, 1]] and dec.Y == [4]
    assert dec.arw == [1] and dec.lam == [1]
    assert all(dec.verdicts.values())
    dec = ec_witness_check(etc, [[1], [0], [0]], 0.0)
    assert dec.T[1:] == [[], []] and dec.arw[1:] == [0, 0]
    assert sum(dec.lam) == 1


def test_convex_weights_sum_to_one():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = np.cumsum(rng.integers(0, 3, size=rng.integers(1, 6)))
        a = (a - a[0] + 1).tolist()
        lam = convex_weights(a)
        assert sum(lam) == 1 and all(x >= 0 for x in lam)


def test_packing_map_linear_bijection():
    f4 = ff.make_field(2, 2)
    phi = ec_build_phi(single_parity_check(f4, 4))
    assert phi.exhaustively_checked and phi.target.q == 4**3
    words = phi.inner.codewords()
    assert (phi.inverse(phi(words)) == words).all()


def test_packed_weight_equals_symbol_weight():
    etc = ExpanderTrellisCode(small_spec())
    for x in sample_messages(etc.k, 2, 3, 50, seed=3):
        enc = etc.encode(x)
        assert ((enc.C != 0).sum(axis=1) == etc.packed_weight(enc.c)).all()


def test_column_methods_agree():
    etc = ExpanderTrellisCode(small_spec())
    dp = etc.column_distances(1, method="dp")
    assert dp == etc.column_distances(1, method="coset") == etc.column_distances_brute(1)
    assert etc.column_distances(3) == etc.column_distances_brute(3)


def test_encoding_is_additive():
    etc = ExpanderTrellisCode(small_spec())
    x = sample_messages(etc.k, 2, 2, 20, seed=5, nonzero_first=False)
    for a, b in zip(x[::2], x[1::2]):
        lhs = etc.encode(F2.add(a, b)).c
        assert (lhs == F2.add(etc.encode(a).c, etc.encode(b).c)).all()


def test_claims_exhaustive_and_tampered():
    etc = ExpanderTrellisCode(small_spec())
    rep = ec_verify_claims(etc, all_messages(etc.k, 2, 1), exhaustive=True)
    assert rep.passed and rep.exhaustive
    g0 = etc.lifted.blocks[0].copy()
    # swap in a full-rank block that is not part of B
    g0[0] = F2.add(g0[0], np.eye(1, g0.shape[1], 0, dtype=np.int64)[0])
    assert ff.rank(F2, g0) == etc.k
    bad = ExpanderTrellisCode(small_spec(), override_G0=g0)
    with pytest.raises(ClaimViolated):
        ec_verify_claims(bad, all_messages(bad.k, 2, 1))


def test_rank_deficient_override():
    etc = ExpanderTrellisCode(small_spec())
    g0 = etc.lifted.blocks[0].copy()
    g0[-1] = 0
    with pytest.raises(RankAssertionFailed):
        ExpanderTrellisCode(small_spec(), override_G0=g0)
    with pytest.raises(LengthMismatch):
        ExpanderTrellisCode(small_spec(), override_G0=g0[:, :-1])


def test_dimension_zero_and_spec_validation():
    # around the 6-cycle right vertices copy and left vertices negate: x = -x
    f3 = ff.make_field(3)
    conv3 = ConvolutionalCode.from_polys(f3, [[[1], [1]]])
    with pytest.raises(DimensionZero):
        ExpanderTrellisCode(ConstructionSpec(conv3, single_parity_check(f3, 2), cycle_graph(3)))
    conv = ConvolutionalCode.from_polys(F2, [[[1], [0]]])
    with pytest.raises(LengthMismatch):
        ConstructionSpec(conv, full_space(F2, 3), xg_complete(2))


def test_rate_degree_report_micro():
    rep = ec_rate_degree_report(ExpanderTrellisCode(micro_spec()))
    assert rep.dim == 1 and rep.dim_lower_bound == 0
    assert rep.rate == Fraction(1, 2) and rep.rate_lower_bound == 0
    assert all(rep.verdicts.values())


def test_full_inner_code_reduces_to_outer_profile():
    # r = 1 and gamma = 0: packed relative profile equals the outer one
    spec = micro_spec(full_inner=True)
    etc = ExpanderTrellisCode(spec)
    rd = ec_rate_degree_report(etc)
    assert rd.rate_lower_bound == Fraction(spec.conv.k, spec.delta)
    outer = spec.conv.column_distances(2)
    assert lemma_column_bound(outer, 2, 2, 0.0, spec.theta) == Fraction(1, 3)
    for r in ec_column_bound_check(etc, 0.0, 2):
        assert r.achieved_ratio == r.bound


def test_theorem_report_micro_and_small():
    rep = ec_theorem_main_report(micro_spec(), horizon=0)
    assert rep["passed"] and rep["packed_column"] == [2]
    rep = ec_theorem_main_report(small_spec(), horizon=2, samples=200)
    assert rep["passed"], rep["verdicts"]
    assert rep["packed_column_brute"] == rep["packed_column"]
