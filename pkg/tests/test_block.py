import numpy as np
import pytest

from oracles import PyField, block_min_distance
from trellex import ff
from trellex.block import LinearBlockCode, full_space, repetition, single_parity_check
from trellex.errors import LengthMismatch, TooLargeToEnumerate, ZeroMatrix


def test_hamming_7_4():
    f = ff.make_field(2)
    g = [[1, 0, 0, 0, 1, 1, 0], [0, 1, 0, 0, 1, 0, 1], [0, 0, 1, 0, 0, 1, 1], [0, 0, 0, 1, 1, 1, 1]]
    code = LinearBlockCode(f, g)
    assert (code.k, code.n) == (4, 7)
    assert code.min_distance() == 3
    assert len(code.codewords()) == 16
    assert code.contains([1, 1, 0, 0, 0, 1, 1])
    assert not code.contains([1, 0, 0, 0, 0, 0, 0])


@pytest.mark.parametrize("seed", range(6))
def test_min_distance_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    p, e = [(2, 1), (3, 1), (2, 2)][seed % 3]
    f = ff.make_field(p, e)
    n = int(rng.integers(3, 7))
    k = int(rng.integers(1, min(n, 4)))
    g = rng.integers(0, f.q, size=(k, n))
    if not g.any():
        g[0, 0] = 1
    code = LinearBlockCode(f, g)
    ref = PyField(p, f.modulus)
    assert code.min_distance() == block_min_distance(ref, code.gen.tolist())
    assert code.min_distance() <= code.n - code.k + 1


def test_standard_families():
    f4 = ff.make_field(2, 2)
    spc = single_parity_check(f4, 5)
    assert (spc.k, spc.min_distance(), spc.rate) == (4, 2, spc.rate)
    assert LinearBlockCode(f4, spc.gen).min_distance() == 2
    assert repetition(f4, 3).min_distance() == 3
    assert full_space(f4, 3).min_distance() == 1
    assert spc.contains_many(spc.codewords()).all()


def test_errors():
    f = ff.make_field(2)
    with pytest.raises(ZeroMatrix):
        LinearBlockCode(f, [[0, 0, 0]])
    with pytest.raises(LengthMismatch):
        repetition(f, 3).contains([1, 1])
    big = full_space(ff.make_field(2, 4), 8)
    with pytest.raises(TooLargeToEnumerate):
        LinearBlockCode(big.field, big.gen).min_distance(guard=1000)
    with pytest.raises(ValueError):
        repetition(f, 3).with_distance(4)
    assert repetition(f, 3).with_distance(2).min_distance() == 2
