import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import PyField
from trellex import ff
from trellex.errors import AmbientMismatch, DegreeMismatch, DivisionByZero, FieldMismatch, NotPrime, ReducibleModulus

SMALL_FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4)]


@pytest.mark.parametrize("p,e", SMALL_FIELDS)
def test_tables_match_polynomial_arithmetic(p, e):
    f = ff.make_field(p, e)
    ref = PyField(p, f.modulus)
    x = np.arange(f.q)
    a, b = np.meshgrid(x, x, indexing="ij")
    add = f.add(a, b)
    mul = f.mul(a, b)
    for i, j in itertools.product(range(f.q), repeat=2):
        assert add[i, j] == ref.add(i, j)
        assert mul[i, j] == ref.mul(i, j)
    for i in range(1, f.q):
        assert f.inv(i) == ref.inv(i)
        assert f.neg(i) == ref.neg(i)


def test_canonical_moduli_frozen():
    assert ff.make_field(2, 2).modulus == (1, 1, 1)
    assert ff.make_field(2, 3).modulus == (1, 0, 1, 1)
    assert ff.make_field(3, 2).modulus == (1, 0, 1)
    assert ff.make_field(2, 4).modulus == (1, 0, 0, 1, 1)


def test_explicit_modulus_and_validation():
    f = ff.make_field(2, 3, modulus=(1, 1, 0, 1))
    assert f.modulus == (1, 1, 0, 1) and f != ff.make_field(2, 3)
    with pytest.raises(NotPrime):
        ff.make_field(4)
    with pytest.raises(ReducibleModulus):
        ff.make_field(2, 2, modulus=(1, 0, 1))
    with pytest.raises(DegreeMismatch):
        ff.make_field(2, 2, modulus=(1, 1, 0, 1))
    with pytest.raises(DegreeMismatch):
        ff.make_field(2, 0)


def test_field_order_lookup():
    assert ff.field_from_order(9) == ff.make_field(3, 2)
    with pytest.raises(NotPrime):
        ff.field_from_order(6)


def test_elements_and_errors():
    f4 = ff.make_field(2, 2)
    a, b = f4.element(2), f4.element(3)
    assert int(a * b) == int(f4.mul(2, 3))
    assert int((a / b) * b) == 2
    assert int(a - a) == 0 and not (a - a)
    assert int(ff.ff_arith(a, None, "inv") * a) == 1
    with pytest.raises(DivisionByZero):
        f4.element(0).inverse()
    with pytest.raises(FieldMismatch):
        a + ff.make_field(2).element(1)
    with pytest.raises(ValueError):
        f4.element(4)
    assert f4.element([1, 1]) == f4.element(3)


def test_gf9_inverse_table_frozen():
    f = ff.make_field(3, 2)
    assert [int(f.inv(i)) for i in range(1, 9)] == [1, 2, 6, 5, 4, 3, 8, 7]


def test_rank_and_nullspace_small():
    f2 = ff.make_field(2)
    m = np.array([[1, 1, 0, 1], [0, 1, 1, 1], [1, 0, 1, 0]])
    assert ff.rank(f2, m) == 2
    ns = ff.nullspace(f2, m)
    assert ns.shape == (2, 4)
    assert not f2.matmul(m, ns.T).any()
    r, piv = ff.rref(f2, m)
    assert piv == (0, 1)
    assert r.tolist() == [[1, 0, 1, 0], [0, 1, 1, 1], [0, 0, 0, 0]]


def test_subspace_intersection_and_mismatch():
    f = ff.make_field(3)
    a = np.array([[1, 0, 0], [0, 1, 0]])
    b = np.array([[0, 1, 0], [0, 0, 1]])
    assert ff.subspace_intersect(f, a, b).tolist() == [[0, 1, 0]]
    with pytest.raises(AmbientMismatch):
        ff.subspace_intersect(f, a, np.eye(4, dtype=np.int64))


matrices = st.sampled_from([(2, 1), (3, 1), (2, 2), (3, 2)]).flatmap(
    lambda pe: st.tuples(
        st.just(pe),
        st.integers(1, 5).flatmap(
            lambda r: st.integers(1, 6).flatmap(
                lambda c: st.lists(
                    st.lists(st.integers(0, pe[0] ** pe[1] - 1), min_size=c, max_size=c),
                    min_size=r, max_size=r,
                )
            )
        ),
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_nullity(data):
    (p, e), rows = data
    f = ff.make_field(p, e)
    m = np.array(rows, dtype=np.int64)
    ns = ff.nullspace(f, m)
    assert ff.rank(f, m) + ns.shape[0] == m.shape[1]
    assert not f.matmul(m, ns.T).any()
    assert ff.rank(f, ns) == ns.shape[0]


@settings(max_examples=40, deadline=None)
@given(matrices, st.integers(0, 10_000))
def test_intersection_is_contained_in_both(data, seed):
    (p, e), rows = data
    f = ff.make_field(p, e)
    a = np.array(rows, dtype=np.int64)
    rng = np.random.default_rng(seed)
    b = rng.integers(0, f.q, size=(rng.integers(1, 5), a.shape[1]))
    inter = ff.subspace_intersect(f, a, b)
    assert ff.in_rowspace(f, a, inter).all() if inter.size else True
    assert ff.in_rowspace(f, b, inter).all() if inter.size else True
    ra, rb = ff.rank(f, a), ff.rank(f, b)
    rsum = ff.rank(f, np.concatenate([a, b]))
    assert inter.shape[0] == ra + rb - rsum


@pytest.mark.parametrize("p,e,d", [(2, 1, 3), (2, 2, 2), (3, 1, 2), (2, 2, 3), (3, 2, 2)])
def test_embedding_is_linear_bijection(p, e, d):
    base = ff.make_field(p, e)
    emb = ff.ext_embed(base, d)
    ext = emb.ext
    vecs = base.enumerate_vectors(d)
    img = emb.forward(vecs)
    assert sorted(img.tolist()) == list(range(ext.q))
    assert (emb.backward(img) == vecs).all()
    rng = np.random.default_rng(1)
    i, j = rng.integers(0, len(vecs), size=(2, 200))
    assert (emb.forward(base.add(vecs[i], vecs[j])) == ext.add(img[i], img[j])).all()
    for a in range(base.q):
        assert (emb.forward(base.mul(a, vecs)) == ext.mul(emb.embed_scalar(a), img)).all()
    # iota is a field homomorphism
    x = np.arange(base.q)
    aa, bb = np.meshgrid(x, x, indexing="ij")
    assert (emb.iota[base.mul(aa, bb)] == ext.mul(emb.iota[aa], emb.iota[bb])).all()
