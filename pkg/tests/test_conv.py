import warnings

import numpy as np
import pytest

from oracles import PyField, conv_distances, conv_encode
from trellex import ff
from trellex.conv import (
    ConvolutionalCode,
    cc_bounds,
    cc_search_profile,
    column_distance_bound,
    free_distance_bound,
    profile_chain_holds,
    profile_lengths,
)
from trellex.errors import DegreeUnknown, G0RankDeficient

F2 = ff.make_field(2)
F4 = ff.make_field(2, 2)


def rate_half():
    return ConvolutionalCode.from_polys(F2, [[[1, 0, 1], [1, 1, 1]]])


def test_rate_half_profile():
    code = rate_half()
    assert (code.n, code.k, code.memory, code.degree) == (2, 1, 2, 2)
    assert code.column_distances(5) == [2, 3, 3, 4, 4, 5]
    assert code.free_distance() == 5


def test_encoder_matches_oracle():
    code = rate_half()
    ref = PyField(2, F2.modulus)
    msg = [[1], [0], [1], [1]]
    coeffs = [c.tolist() for c in code.gen.coeffs]
    assert code.encode(np.array(msg)).tolist()[:4] == conv_encode(ref, coeffs, msg)[:4]


@pytest.mark.parametrize("seed", range(5))
def test_random_codes_match_oracle(seed):
    rng = np.random.default_rng(seed)
    f = [F2, F4][seed % 2]
    n, m = 2 + seed % 2, 1 + (seed % 3 == 0)
    while True:
        blocks = rng.integers(0, f.q, size=(m + 1, 1, n))
        if blocks[0].any() and blocks[m].any():
            break
    code = ConvolutionalCode.from_blocks(f, blocks)
    length = 6 if f.q == 2 else 4
    col, free = conv_distances(PyField(f.p, f.modulus), [b.tolist() for b in blocks], length, 3)
    assert code.column_distances(3) == col
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d_free = code.free_distance()
    # finite messages only bound the free distance from above
    assert d_free <= free


def test_bounds_and_lengths():
    assert free_distance_bound(2, 1, 2) == 6
    assert column_distance_bound(2, 1, 3) == 5
    assert profile_lengths(2, 1, 1) == (2, 2)
    assert profile_lengths(3, 3, 1) == (None, None)
    assert profile_chain_holds([2, 3, 4], 2, 1)
    assert not profile_chain_holds([1, 3, 4], 2, 1)


def test_cc_bounds_flags():
    prof = cc_bounds(rate_half())
    assert prof.free == 5 and prof.free_bound == 6 and not prof.is_mds
    assert (prof.L, prof.J) == (4, 4) and not prof.is_mdp
    assert prof.column_bounds == [2, 3, 4, 5, 6]


def test_search_gf4_rate_half_memory_one():
    res = cc_search_profile(2, 1, 1, F4, budget=1 << 16)
    assert res.exhaustive and not res.chain_violations
    assert res.profile == (2, 3, 4)
    assert res.code.free_distance() == 4
    assert cc_bounds(res.code).is_mdp


def test_rank_deficient_g0_rejected():
    with pytest.raises(G0RankDeficient):
        ConvolutionalCode.from_blocks(F2, np.array([[[0, 0]], [[1, 1]]]))


def test_non_reduced_generator_degree_unknown_or_consistent():
    # rows with dependent leading coefficients: nu = 2 but the degree may be smaller
    code = ConvolutionalCode.from_polys(F2, [[[1, 1], [0, 1]], [[0, 1], [1, 1]]])
    assert not code.reduced and code.degree is None
    try:
        prof = cc_bounds(code)
    except DegreeUnknown:
        return
    assert prof.notes
