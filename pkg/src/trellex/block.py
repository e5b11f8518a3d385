"""Linear block codes over GF(q)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import ff
from .errors import LengthMismatch, TooLargeToEnumerate, ZeroMatrix

ENUMERATION_GUARD = 1 << 24
_CHUNK = 1 << 16


class LinearBlockCode:
    """An [n, k] linear code given by a full-rank generator in RREF.

    Attributes
    ----------
    field : FieldSpec
    gen : ndarray, shape (k, n)
        Canonical (reduced row echelon) generator.
    parity : ndarray, shape (n - k, n)
        Rows spanning the dual code, so ``gen @ parity.T == 0``.
    """

    def __init__(self, field: ff.FieldSpec, gen, distance: int | None = None):
        gen = np.atleast_2d(np.asarray(gen, dtype=np.int64))
        if gen.size == 0 or not gen.any():
            raise ZeroMatrix("generator matrix is zero")
        self.field = field
        self.gen = ff.row_basis(field, gen)
        self.gen.setflags(write=False)
        self.k, self.n = self.gen.shape
        self.parity = ff.nullspace(field, self.gen)
        self.parity.setflags(write=False)
        assert not field.matmul(self.gen, self.parity.T).any()
        self._distance = distance

    def __repr__(self):
        return f"LinearBlockCode([{self.n}, {self.k}] over {self.field!r})"

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def relative_distance(self) -> Fraction:
        return Fraction(self.min_distance(), self.n)

    def contains(self, word) -> bool:
        word = np.asarray(word, dtype=np.int64)
        if word.shape[-1] != self.n:
            raise LengthMismatch(f"word of length {word.shape[-1]} for a length-{self.n} code")
        if self.parity.shape[0] == 0:
            return True
        return not self.field.matmul(word[None, :], self.parity.T).any()

    def contains_many(self, words) -> np.ndarray:
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))
        if words.shape[-1] != self.n:
            raise LengthMismatch(f"words of length {words.shape[-1]} for a length-{self.n} code")
        if self.parity.shape[0] == 0:
            return np.ones(words.shape[0], dtype=bool)
        return ~self.field.matmul(words, self.parity.T).any(axis=1)

    def encode(self, messages) -> np.ndarray:
        return self.field.matmul(np.asarray(messages, dtype=np.int64), self.gen)

    def codewords(self) -> np.ndarray:
        if self.field.q**self.k > ENUMERATION_GUARD:
            raise TooLargeToEnumerate(f"{self.field.q}^{self.k} codewords")
        return self.encode(self.field.enumerate_vectors(self.k))

    def min_distance(self, guard: int = ENUMERATION_GUARD) -> int:
        """Minimum Hamming weight of a nonzero codeword, by enumeration.

        Raises TooLargeToEnumerate above ``guard`` messages unless a distance
        was supplied at construction (see :meth:`with_distance`).
        """
        if self._distance is not None:
            return self._distance
        q, k = self.field.q, self.k
        if q**k > guard:
            raise TooLargeToEnumerate(f"q^k = {q}^{k} exceeds the enumeration guard {guard}")
        best = self.n
        for start in range(1, q**k, _CHUNK):
            idx = np.arange(start, min(q**k, start + _CHUNK), dtype=np.int64)
            msgs = np.empty((idx.size, k), dtype=np.int64)
            rest = idx.copy()
            for i in range(k):
                msgs[:, i] = rest % q
                rest //= q
            best = min(best, int((self.encode(msgs) != 0).sum(axis=1).min()))
        assert best <= self.n - self.k + 1, "Singleton bound violated"
        self._distance = best
        return best

    def with_distance(self, d: int, samples: int = 1000, seed: int = 7) -> LinearBlockCode:
        """Copy carrying a caller-supplied distance, spot-checked on random codewords."""
        if not 1 <= d <= self.n - self.k + 1:
            raise ValueError(f"distance {d} impossible for an [{self.n}, {self.k}] code")
        rng = np.random.default_rng(seed)
        msgs = rng.integers(0, self.field.q, size=(samples, self.k))
        msgs = msgs[msgs.any(axis=1)]
        if msgs.size:
            w = (self.encode(msgs) != 0).sum(axis=1)
            if w.min() < d:
                raise ValueError(f"found a codeword of weight {int(w.min())} < {d}")
        return LinearBlockCode(self.field, self.gen, distance=d)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "generator": self.gen.tolist()}


def from_generator(field: ff.FieldSpec, g) -> LinearBlockCode:
    return LinearBlockCode(field, g)


def single_parity_check(field: ff.FieldSpec, n: int) -> LinearBlockCode:
    """The [n, n-1] code {c : sum(c) = 0}; distance 2 for n >= 2."""
    if n < 2:
        raise ValueError("single-parity-check code needs n >= 2")
    gen = np.zeros((n - 1, n), dtype=np.int64)
    gen[:, : n - 1] = np.eye(n - 1, dtype=np.int64)
    gen[:, n - 1] = field.neg(1)
    return LinearBlockCode(field, gen, distance=2)


def repetition(field: ff.FieldSpec, n: int) -> LinearBlockCode:
    return LinearBlockCode(field, np.ones((1, n), dtype=np.int64), distance=n)


def full_space(field: ff.FieldSpec, n: int) -> LinearBlockCode:
    return LinearBlockCode(field, np.eye(n, dtype=np.int64), distance=1)
