"""Finite fields GF(p^e) and exact linear algebra over them.

An element is stored as an integer index in ``[0, q)`` whose base-``p``
digits, least significant first, are its polynomial coefficients modulo the
field's modulus. Bulk arithmetic works on integer numpy arrays through
log/exp tables (and full addition/multiplication tables for small ``q``).
Matrices are plain 2-D integer arrays interpreted over a given field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    AmbientMismatch,
    DegreeMismatch,
    DivisionByZero,
    FieldMismatch,
    FieldTooLarge,
    NotPrime,
    ReducibleModulus,
)

MAX_ORDER = 1 << 20
_TABLE_LIMIT = 1 << 10


# -- polynomials over GF(p), coefficient lists in ascending order ----------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def _prime_factors(x: int) -> list[int]:
    out, f = [], 2
    while f * f <= x:
        if x % f == 0:
            out.append(f)
            while x % f == 0:
                x //= f
        f += 1
    if x > 1:
        out.append(x)
    return out


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a = a[:-1]
    return a


def _poly_rem(a: list[int], m: list[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    m = _poly_trim(list(m))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        shift = len(a) - len(m)
        f = a[-1] * inv_lead % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        a = _poly_trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_rem(prod, m, p)


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. e//2."""
    m = _poly_trim([c % p for c in modulus])
    e = len(m) - 1
    if e < 1:
        return False
    for d in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_rem(m, list(low) + [1], p):
                return False
    return True


def canonical_modulus(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible, coefficients ascending."""
    for low in itertools.product(range(p), repeat=e):
        cand = list(low) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("irreducible polynomials exist in every degree")


# -- fields ------------------------------------------------------------------


class FieldSpec:
    """The field GF(p^e) with a fixed irreducible modulus.

    Instances are immutable and cached by :func:`make_field`; build them
    through that function so that moduli are validated.
    """

    def __init__(self, p: int, e: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.modulus = tuple(int(c) for c in modulus)
        self.q = p**e
        self._weights = p ** np.arange(e, dtype=np.int64)
        self._build_tables()

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.p, self.e, self.modulus)

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    # -- table construction
    def _mul_by_matrix(self, g: int) -> np.ndarray:
        """GF(p) matrix M with digits(a * g) = digits(a) @ M (mod p)."""
        gd = self.coeffs(g)
        rows = []
        for i in range(self.e):
            xi = [0] * i + [1]
            prod = _poly_mulmod(xi, gd, list(self.modulus), self.p)
            rows.append(prod + [0] * (self.e - len(prod)))
        return np.array(rows, dtype=np.int64)

    def _matpow(self, mat: np.ndarray, k: int) -> np.ndarray:
        out = np.eye(self.e, dtype=np.int64)
        while k:
            if k & 1:
                out = out @ mat % self.p
            mat = mat @ mat % self.p
            k >>= 1
        return out

    def _is_primitive(self, g: int) -> bool:
        mat = self._mul_by_matrix(g)
        one = np.zeros(self.e, dtype=np.int64)
        one[0] = 1
        for r in _prime_factors(self.q - 1):
            power = one @ self._matpow(mat, (self.q - 1) // r) % self.p
            if np.array_equal(power, one):
                return False
        return True

    def _build_tables(self):
        q, p, e = self.q, self.p, self.e
        idx = np.arange(q, dtype=np.int64)
        digits = np.empty((q, e), dtype=np.int64)
        rest = idx.copy()
        for i in range(e):
            digits[:, i] = rest % p
            rest //= p
        self.digits = digits
        if q == 2:
            gen = 1
        else:
            gen = next(g for g in range(2, q) if self._is_primitive(g))
        self.generator = gen
        # exp table in blocks: powers g^0..g^(B-1), then repeated jumps by g^B
        mat = self._mul_by_matrix(gen)
        block = max(1, int(np.sqrt(q - 1)))
        head = np.zeros((block, e), dtype=np.int64)
        head[0, 0] = 1
        for i in range(1, block):
            head[i] = head[i - 1] @ mat % p
        jump = self._matpow(mat, block)
        chunks, cur = [], head
        total = 0
        while total < q - 1:
            chunks.append(cur)
            total += block
            cur = cur @ jump % p
        exp_digits = np.concatenate(chunks)[: q - 1]
        exp = exp_digits @ self._weights
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1, dtype=np.int64)
        assert (log[1:] >= 0).all(), "generator is not primitive"
        self.exp = exp
        self.log = log
        self._add_table = None
        self._mul_table = None
        if q <= _TABLE_LIMIT:
            self._add_table = self._add_slow(idx[:, None], idx[None, :])
            self._mul_table = self._mul_slow(idx[:, None], idx[None, :])
        for arr in (self.digits, self.exp, self.log, self._add_table, self._mul_table):
            if arr is not None:
                arr.setflags(write=False)

    def _add_slow(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.e == 1:
            return (a + b) % self.p
        return (self.digits[a] + self.digits[b]) % self.p @ self._weights

    def _mul_slow(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    # -- vectorised arithmetic on index arrays
    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self._add_table is not None:
            return self._add_table[a, b]
        return self._add_slow(a, b)

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.e == 1:
            return (-a) % self.p
        return (-self.digits[a]) % self.p @ self._weights

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._mul_table is not None:
            return self._mul_table[a, b]
        return self._mul_slow(a, b)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("zero has no inverse")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def coeffs(self, a: int) -> list[int]:
        """Polynomial coefficients (ascending) of element index ``a``."""
        return [(int(a) // self.p**i) % self.p for i in range(self.e)]

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs) + [0] * (self.e - len(coeffs))
        return int(sum((c % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def element(self, value) -> FieldElement:
        if isinstance(value, (list, tuple)):
            value = self.from_coeffs(value)
        value = int(value)
        if not 0 <= value < self.q:
            raise ValueError(f"{value} is not an element index of {self}")
        return FieldElement(self, value)

    def elements(self):
        return [FieldElement(self, v) for v in range(self.q)]

    # -- vectors and matrices
    def matmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if self.e == 1:
            return a @ b % self.p
        out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        for i in range(a.shape[-1]):
            out = self.add(out, self.mul(a[..., i, None], b[i]))
        return out

    def dot_rows(self, coeffs, rows) -> np.ndarray:
        """Linear combination ``coeffs @ rows`` for a 1-D coefficient vector."""
        return self.matmul(np.asarray(coeffs)[None, :], rows)[0]

    def enumerate_vectors(self, length: int) -> np.ndarray:
        """All q^length vectors; row index equals sum(v_i * q^i)."""
        count = self.q**length
        idx = np.arange(count, dtype=np.int64)
        out = np.empty((count, length), dtype=np.int64)
        for i in range(length):
            out[:, i] = idx % self.q
            idx //= self.q
        return out


@dataclass(frozen=True)
class FieldElement:
    """A single field element; convenient for scalar work and tests."""

    field: FieldSpec
    value: int

    @property
    def coeffs(self) -> list[int]:
        return self.field.coeffs(self.value)

    def _check(self, other):
        if not isinstance(other, FieldElement):
            other = FieldElement(self.field, int(other))
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.field, int(self.field.add(self.value, other.value)))

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement(self.field, int(self.field.sub(self.value, other.value)))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, int(self.field.mul(self.value, other.value)))

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg(self.value)))

    def inverse(self):
        return FieldElement(self.field, int(self.field.inv(self.value)))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}@{self.field!r}"


@lru_cache(maxsize=None)
def _cached_field(p: int, e: int, modulus: tuple[int, ...]) -> FieldSpec:
    return FieldSpec(p, e, modulus)


def make_field(p: int, e: int = 1, modulus=None) -> FieldSpec:
    """Return GF(p^e), validating or choosing the modulus.

    When ``modulus`` is omitted the canonical one (lexicographically smallest
    ascending coefficient vector) is used, so encodings are reproducible.
    """
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if e < 1:
        raise DegreeMismatch("extension degree must be at least 1")
    if p**e > MAX_ORDER:
        raise FieldTooLarge(f"GF({p}^{e}) exceeds the supported order {MAX_ORDER}")
    if modulus is None:
        modulus = canonical_modulus(p, e)
    else:
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != e + 1:
            raise DegreeMismatch(f"modulus {list(modulus)} does not have degree {e}")
        if modulus[-1] % p != 1:
            raise DegreeMismatch("modulus must be monic")
        modulus = tuple(c % p for c in modulus)
        if not is_irreducible(modulus, p):
            raise ReducibleModulus(f"{list(modulus)} is reducible over GF({p})")
    return _cached_field(p, e, modulus)


def field_from_order(q: int) -> FieldSpec:
    for p in range(2, q + 1):
        if q % p == 0:
            e, rest = 0, q
            while rest % p == 0:
                rest //= p
                e += 1
            if rest != 1:
                raise NotPrime(f"{q} is not a prime power")
            return make_field(p, e)
    raise NotPrime(f"{q} is not a prime power")


def ff_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


# -- linear algebra -----------------------------------------------------------


@dataclass(frozen=True)
class RREF:
    rref: np.ndarray
    rank: int
    pivots: tuple[int, ...]
    nullspace: np.ndarray


def rref(field: FieldSpec, a) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns; zero rows are kept."""
    m = np.array(a, dtype=np.int64)
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        if m[r, c] != 1:
            m[r] = field.mul(field.inv(m[r, c]), m[r])
        factors = m[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            m[hit] = field.sub(m[hit], field.mul(factors[hit, None], m[r][None, :]))
        pivots.append(c)
        r += 1
    return m, tuple(pivots)


def rank(field: FieldSpec, a) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(field, a)[1])


def row_basis(field: FieldSpec, a, ncols: int | None = None) -> np.ndarray:
    """Canonical basis (nonzero RREF rows) of the row space."""
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        width = ncols if ncols is not None else (a.shape[1] if a.ndim == 2 else 0)
        return np.zeros((0, width), dtype=np.int64)
    r, piv = rref(field, a)
    return r[: len(piv)]


def nullspace(field: FieldSpec, a, ncols: int | None = None) -> np.ndarray:
    """Rows spanning {x : a @ x^T = 0}."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] == 0:
        n = ncols if ncols is not None else a.shape[-1]
        return np.eye(n, dtype=np.int64)
    r, piv = rref(field, a)
    n = a.shape[1]
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(piv):
            basis[i, pc] = field.neg(r[row, f])
    return basis


def mat_rref(field: FieldSpec, a) -> RREF:
    a = np.asarray(a, dtype=np.int64)
    r, piv = rref(field, a)
    return RREF(r, len(piv), piv, nullspace(field, a))


def in_rowspace(field: FieldSpec, basis, vectors) -> np.ndarray:
    """Boolean per row of ``vectors``: does it lie in the row space of ``basis``?"""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    basis = np.asarray(basis, dtype=np.int64)
    if basis.size == 0:
        return ~vectors.any(axis=1)
    check = nullspace(field, basis)
    if check.shape[0] == 0:
        return np.ones(vectors.shape[0], dtype=bool)
    return ~field.matmul(vectors, check.T).any(axis=1)


def subspace_intersect(field: FieldSpec, a_basis, b_basis) -> np.ndarray:
    """Basis (in RREF) of rowspace(a) ∩ rowspace(b)."""
    a = row_basis(field, a_basis)
    b = row_basis(field, b_basis)
    if np.shape(a_basis)[-1] != np.shape(b_basis)[-1]:
        raise AmbientMismatch(f"ambient dimensions {np.shape(a_basis)[-1]} and {np.shape(b_basis)[-1]}")
    ambient = np.shape(a_basis)[-1]
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, ambient), dtype=np.int64)
    # (u, v) with u a = v b  <=>  [a; -b]^T (u, v)^T = 0
    stacked = np.concatenate([a, field.neg(b)])
    sols = nullspace(field, stacked.T)
    if sols.shape[0] == 0:
        out = np.zeros((0, ambient), dtype=np.int64)
    else:
        out = row_basis(field, field.matmul(sols[:, : a.shape[0]], a))
    assert out.shape[0] >= a.shape[0] + b.shape[0] - ambient
    return out


# -- field embeddings -----------------------------------------------------------


def _solve_gfp(mat: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over GF(p)."""
    f = make_field(p)
    n = mat.shape[0]
    aug = np.concatenate([mat % p, np.eye(n, dtype=np.int64)], axis=1)
    r, piv = rref(f, aug)
    if tuple(piv[:n]) != tuple(range(n)):
        raise ValueError("matrix is singular")
    return r[:, n:]


class FieldEmbedding:
    """GF(q)-linear bijection between GF(q)^d and GF(q^d).

    ``forward(v) = sum_i iota(v_i) * X^i`` where ``iota`` embeds GF(q) as the
    subfield of GF(q^d) generated by the smallest-index root of the base
    modulus and ``X`` is the polynomial generator of GF(q^d); ``1, X, ...,
    X^(d-1)`` are independent over GF(q) because ``X`` already generates the
    whole field over GF(p).
    """

    def __init__(self, base: FieldSpec, d: int):
        if d < 1:
            raise ValueError("embedding degree must be at least 1")
        self.base = base
        self.d = d
        self.ext = make_field(base.p, base.e * d)
        ext = self.ext
        if base.e == 1:
            iota = np.arange(base.q, dtype=np.int64)
        else:
            root = self._subfield_root()
            powers = [1]
            for _ in range(1, base.e):
                powers.append(int(ext.mul(powers[-1], root)))
            iota = np.zeros(base.q, dtype=np.int64)
            for a in range(base.q):
                acc = 0
                for c, pw in zip(base.coeffs(a), powers):
                    acc = int(ext.add(acc, ext.mul(c, pw)))
                iota[a] = acc
        self.iota = iota
        x = base.p if ext.e > 1 else 1
        basis = [1]
        for _ in range(1, d):
            basis.append(int(ext.mul(basis[-1], x)))
        self.basis = np.array(basis, dtype=np.int64)
        # GF(p)-matrix of forward on digit vectors, for the inverse map
        p, e = base.p, base.e
        rows = []
        for i in range(d):
            for b in range(e):
                v = np.zeros(d, dtype=np.int64)
                v[i] = p**b
                rows.append(ext.digits[int(self.forward(v))])
        self._fwd = np.array(rows, dtype=np.int64)
        self._bwd = _solve_gfp(self._fwd, p)

    def _subfield_root(self) -> int:
        ext, mod = self.ext, self.base.modulus
        for y in range(1, ext.q):
            acc, pw = 0, 1
            for c in mod:
                acc = int(ext.add(acc, ext.mul(c, pw)))
                pw = int(ext.mul(pw, y))
            if acc == 0:
                return y
        raise AssertionError("base modulus has no root in the extension")

    def embed_scalar(self, a):
        return self.iota[np.asarray(a, dtype=np.int64)]

    def forward(self, v) -> np.ndarray:
        """Map coordinate vectors (shape (..., d)) to GF(q^d) element indices."""
        v = np.asarray(v, dtype=np.int64)
        if v.shape[-1] != self.d:
            raise ValueError(f"expected vectors of length {self.d}")
        out = np.zeros(v.shape[:-1], dtype=np.int64)
        for i in range(self.d):
            out = self.ext.add(out, self.ext.mul(self.iota[v[..., i]], self.basis[i]))
        return out

    def backward(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        flat = self.ext.digits[y] @ self._bwd % self.base.p
        flat = flat.reshape(y.shape + (self.d, self.base.e))
        return flat @ self.base._weights


def ext_embed(base: FieldSpec, d: int) -> FieldEmbedding:
    return FieldEmbedding(base, d)
