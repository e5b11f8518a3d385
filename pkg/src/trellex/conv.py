"""Convolutional codes from polynomial generator matrices.

A generator ``G(D) = G_0 + G_1 D + ... + G_m D^m`` is stored as the list of
its coefficient matrices. Distances are computed on the controller-form
state graph (one shift register of length nu_i per input row), whose states
number q^nu(G): column distances by a Viterbi-style minimum over all paths
that leave the zero state with a nonzero input, the free distance by
Dijkstra back to the zero state.
"""

from __future__ import annotations

import heapq
import itertools
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from . import ff
from .errors import (
    BudgetExceeded,
    DegreeUnknown,
    EmptyGenerator,
    G0RankDeficient,
    NoneFound,
)

TRANSITION_GUARD = 1 << 24
STATE_GUARD = 1 << 22
_CHUNK_ELEMENTS = 1 << 22

WeightFn = Callable[[np.ndarray], np.ndarray]


def hamming_weight(blocks: np.ndarray) -> np.ndarray:
    return (blocks != 0).sum(axis=-1)


class CatastrophicWarning(UserWarning):
    """The presentation has a zero-weight cycle away from the zero state."""


@dataclass(frozen=True)
class PolyGeneratorMatrix:
    field: ff.FieldSpec
    coeffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise EmptyGenerator("no coefficient matrices given")
        blocks = [np.atleast_2d(np.asarray(c, dtype=np.int64)) for c in self.coeffs]
        shape = blocks[0].shape
        if any(b.shape != shape for b in blocks):
            raise ValueError("coefficient matrices must share one shape")
        # memory is tight: drop trailing zero blocks
        while len(blocks) > 1 and not blocks[-1].any():
            blocks.pop()
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "coeffs", tuple(blocks))

    @classmethod
    def from_polys(cls, field: ff.FieldSpec, rows) -> PolyGeneratorMatrix:
        """Build from ``rows[i][j]`` = ascending coefficients of g_ij(D)."""
        k, n = len(rows), len(rows[0])
        m = max(len(c) for row in rows for c in row) - 1
        blocks = np.zeros((max(m, 0) + 1, k, n), dtype=np.int64)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("ragged generator rows")
            for j, poly in enumerate(row):
                for d, c in enumerate(poly):
                    blocks[d, i, j] = c
        return cls(field, tuple(blocks))

    @property
    def k(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def n(self) -> int:
        return self.coeffs[0].shape[1]

    @property
    def memory(self) -> int:
        return len(self.coeffs) - 1

    @property
    def row_degrees(self) -> tuple[int, ...]:
        degs = []
        for i in range(self.k):
            nz = [d for d, b in enumerate(self.coeffs) if b[i].any()]
            degs.append(max(nz) if nz else 0)
        return tuple(degs)

    @property
    def constraint_length(self) -> int:
        return sum(self.row_degrees)

    def leading_coefficients(self) -> np.ndarray:
        return np.array([self.coeffs[d][i] for i, d in enumerate(self.row_degrees)], dtype=np.int64)

    def polys(self) -> list[list[list[int]]]:
        return [
            [[int(b[i, j]) for b in self.coeffs] for j in range(self.n)] for i in range(self.k)
        ]

    def serialize(self) -> tuple[int, ...]:
        return tuple(int(x) for b in self.coeffs for x in b.ravel())


@dataclass(frozen=True)
class StateMachine:
    """Controller-form encoder.

    State digit at position ``pos(i, d)`` (row-major over rows, d = 1..nu_i)
    holds x_{t-d, i}; a state index is sum(digit * q^pos). Inputs are indexed
    as sum(x_i * q^i), so input 0 is the zero block.
    """

    field: ff.FieldSpec
    num_states: int
    inputs: np.ndarray  # (q^k, k)
    out_input: np.ndarray  # (q^k, n)
    out_state: np.ndarray  # (S, n)
    next_state_part: np.ndarray  # (S,)
    next_input_part: np.ndarray  # (q^k,)

    def outputs(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=np.int64)
        return self.field.add(self.out_state[states][:, None, :], self.out_input[None, :, :])

    def next(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=np.int64)
        return self.next_state_part[states][:, None] + self.next_input_part[None, :]


def build_state_machine(gen: PolyGeneratorMatrix, guard: int = TRANSITION_GUARD) -> StateMachine:
    field, q, k = gen.field, gen.field.q, gen.k
    nus = gen.row_degrees
    nu = sum(nus)
    if q**nu * q**k > guard:
        raise BudgetExceeded(f"{q}^{nu} states x {q}^{k} inputs exceeds guard {guard}")
    pos = {}
    for i in range(k):
        for d in range(1, nus[i] + 1):
            pos[(i, d)] = len(pos)
    S = q**nu
    sd = field.enumerate_vectors(nu)  # (S, nu)
    gs = np.zeros((nu, gen.n), dtype=np.int64)
    for (i, d), p in pos.items():
        gs[p] = gen.coeffs[d][i]
    out_state = field.matmul(sd, gs) if nu else np.zeros((1, gen.n), dtype=np.int64)
    qpow = q ** np.arange(max(nu, 1), dtype=np.int64)
    nsp = np.zeros(S, dtype=np.int64)
    for (i, d), p in pos.items():
        if d >= 2:
            nsp += sd[:, pos[(i, d - 1)]] * qpow[p]
    X = field.enumerate_vectors(k)
    nip = np.zeros(q**k, dtype=np.int64)
    for i in range(k):
        if nus[i] >= 1:
            nip += X[:, i] * qpow[pos[(i, 1)]]
    out_input = field.matmul(X, gen.coeffs[0])
    for a in (X, out_input, out_state, nsp, nip):
        a.setflags(write=False)
    return StateMachine(field, S, X, out_input, out_state, nsp, nip)


class ConvolutionalCode:
    """An (n, k) convolutional code with a fixed polynomial generator.

    ``degree`` is exact when the generator is row-reduced (full-rank matrix of
    leading row coefficients); otherwise it is None and only ``degree_upper``
    = nu(G) is known.
    """

    def __init__(self, gen: PolyGeneratorMatrix):
        if not gen.coeffs:
            raise EmptyGenerator("no coefficient matrices given")
        if ff.rank(gen.field, gen.coeffs[0]) != gen.k:
            raise G0RankDeficient("G_0 must have full row rank")
        self.gen = gen
        self.field = gen.field
        self.n, self.k, self.memory = gen.n, gen.k, gen.memory
        self.row_degrees = gen.row_degrees
        self.degree_upper = gen.constraint_length
        self.reduced = ff.rank(self.field, gen.leading_coefficients()) == self.k
        self.equal_row_degrees = len(set(self.row_degrees)) == 1
        self.degree = self.degree_upper if self.reduced else None
        self._sm: StateMachine | None = None
        self.catastrophic: bool | None = None

    @classmethod
    def from_polys(cls, field, rows) -> ConvolutionalCode:
        return cls(PolyGeneratorMatrix.from_polys(field, rows))

    @classmethod
    def from_blocks(cls, field, blocks) -> ConvolutionalCode:
        return cls(PolyGeneratorMatrix(field, tuple(blocks)))

    def __repr__(self):
        return f"ConvolutionalCode(n={self.n}, k={self.k}, m={self.memory}, nu={self.degree_upper}, {self.field!r})"

    def stats(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "memory": self.memory,
            "row_degrees": list(self.row_degrees),
            "overall_constraint_length": self.degree_upper,
            "reduced": self.reduced,
            "equal_row_degrees": self.equal_row_degrees,
            "degree": self.degree,
        }

    def state_machine(self, guard: int = TRANSITION_GUARD) -> StateMachine:
        if self._sm is None:
            self._sm = build_state_machine(self.gen, guard)
        return self._sm

    def truncated_generator(self, j: int) -> np.ndarray:
        """Block-Toeplitz matrix with (c_0..c_j) = (x_0..x_j) @ result."""
        k, n = self.k, self.n
        out = np.zeros(((j + 1) * k, (j + 1) * n), dtype=np.int64)
        for i in range(j + 1):
            for d in range(0, min(self.memory, j - i) + 1):
                out[i * k : (i + 1) * k, (i + d) * n : (i + d + 1) * n] = self.gen.coeffs[d]
        return out

    def encode(self, blocks) -> np.ndarray:
        """Code blocks c_0..c_j for message blocks x_0..x_j (shape (j+1, k))."""
        x = np.atleast_2d(np.asarray(blocks, dtype=np.int64))
        out = np.zeros((x.shape[0], self.n), dtype=np.int64)
        for t in range(x.shape[0]):
            for d in range(0, min(self.memory, t) + 1):
                out[t] = self.field.add(out[t], self.field.dot_rows(x[t - d], self.gen.coeffs[d]))
        return out

    # -- distances
    def column_distances(self, horizon: int, weight: WeightFn = hamming_weight,
                         guard: int = TRANSITION_GUARD) -> list[int]:
        """[d_0^c, ..., d_horizon^c] under the given block weight."""
        sm = self.state_machine(guard)
        S = sm.num_states
        big = np.iinfo(np.int64).max // 4
        dist = np.full(S, big, dtype=np.int64)
        w0 = weight(sm.outputs([0])[0, 1:])
        np.minimum.at(dist, sm.next([0])[0, 1:], w0)
        result = [int(dist.min())]
        cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        chunk = max(1, _CHUNK_ELEMENTS // (len(sm.inputs) * sm.out_input.shape[1]))
        cacheable = S * len(sm.inputs) <= (1 << 22)
        for _ in range(horizon):
            new = np.full(S, big, dtype=np.int64)
            live = np.nonzero(dist < big)[0]
            for start in range(0, live.size, chunk):
                states = live[start : start + chunk]
                key = int(start)
                if cacheable and live.size == S and key in cache:
                    w, nxt = cache[key]
                else:
                    w = weight(sm.outputs(states))
                    nxt = sm.next(states)
                    if cacheable and live.size == S:
                        cache[key] = (w, nxt)
                np.minimum.at(new, nxt.ravel(), (dist[states][:, None] + w).ravel())
            dist = new
            result.append(int(dist.min()))
        return result

    def column_distance(self, j: int, **kw) -> int:
        return self.column_distances(j, **kw)[j]

    def free_distance(self, weight: WeightFn = hamming_weight, guard: int = STATE_GUARD,
                      detect_catastrophic: bool = True) -> int:
        """Minimum weight of a nonzero finite-support codeword.

        Catastrophic presentations only trigger a warning: the minimum over
        polynomial messages is still well defined and is what is returned.
        """
        if self.field.q**self.degree_upper > guard:
            raise BudgetExceeded(f"{self.field.q}^{self.degree_upper} states exceeds guard {guard}")
        sm = self.state_machine()
        S = sm.num_states
        big = np.iinfo(np.int64).max // 4
        best = np.full(S, big, dtype=np.int64)
        heap: list[tuple[int, int]] = []
        w0 = weight(sm.outputs([0])[0, 1:])
        nx0 = sm.next([0])[0, 1:]
        answer = big
        for w, s in zip(w0.tolist(), nx0.tolist()):
            if s == 0:
                answer = min(answer, w)
            elif w < best[s]:
                best[s] = w
                heapq.heappush(heap, (w, s))
        done = np.zeros(S, dtype=bool)
        while heap:
            d, s = heapq.heappop(heap)
            if d >= answer:
                break
            if done[s]:
                continue
            done[s] = True
            w = weight(sm.outputs([s])[0]) + d
            nxt = sm.next([s])[0]
            to_zero = nxt == 0
            if to_zero.any():
                answer = min(answer, int(w[to_zero].min()))
            cand = np.full(S, big, dtype=np.int64)
            np.minimum.at(cand, nxt, w)
            improved = np.nonzero(cand < best)[0]
            improved = improved[improved != 0]
            best[improved] = cand[improved]
            for t in improved.tolist():
                heapq.heappush(heap, (int(best[t]), t))
        if detect_catastrophic and S * len(sm.inputs) <= (1 << 20):
            self.catastrophic = _has_zero_cycle(sm, weight)
            if self.catastrophic:
                warnings.warn("generator has a zero-weight cycle away from the zero state",
                              CatastrophicWarning, stacklevel=2)
        return int(answer)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "n": self.n, "k": self.k, "G": self.gen.polys()}


def _has_zero_cycle(sm: StateMachine, weight: WeightFn) -> bool:
    S = sm.num_states
    states = np.arange(S)
    w = weight(sm.outputs(states))
    nxt = sm.next(states)
    src = np.repeat(states, w.shape[1])
    keep = (w.ravel() == 0) & (src != 0) & (nxt.ravel() != 0)
    src, dst = src[keep], nxt.ravel()[keep]
    alive = np.ones(S, dtype=bool)
    alive[0] = False
    while True:
        has = np.zeros(S, dtype=bool)
        ok = alive[dst] & alive[src]
        has[src[ok]] = True
        nxt_alive = alive & has
        if (nxt_alive == alive).all():
            return bool(alive.any())
        alive = nxt_alive


# -- Singleton-type bounds -------------------------------------------------------


def free_distance_bound(n: int, k: int, delta: int) -> int:
    """(n-k)(floor(delta/k) + 1) + delta + 1."""
    return (n - k) * (delta // k + 1) + delta + 1


def column_distance_bound(n: int, k: int, j: int) -> int:
    """(n-k)(j+1) + 1."""
    return (n - k) * (j + 1) + 1


def profile_lengths(n: int, k: int, delta: int) -> tuple[int | None, int | None]:
    """Maximum profile length L and strongly-MDS index J (None when n == k)."""
    if n == k:
        return None, None
    return delta // k + delta // (n - k), delta // k + -(-delta // (n - k))


def profile_chain_holds(column: Sequence[int], n: int, k: int) -> bool:
    """If column[j] meets its bound then so does every earlier column[i]."""
    meets = [c == column_distance_bound(n, k, j) for j, c in enumerate(column)]
    return all(all(meets[:j]) for j, m in enumerate(meets) if m)


def check_profile(column: Sequence[int], n: int, free: int | None = None) -> None:
    for a, b in zip(column, column[1:]):
        assert a <= b <= a + n, f"column distances {list(column)} break monotonicity"
    if free is not None:
        assert max(column) <= free, f"column distances exceed free distance {free}"


@dataclass
class DistanceProfile:
    n: int
    k: int
    column: list[int]
    free: int | None
    degree: int
    degree_exact: bool
    L: int | None
    J: int | None
    free_bound: int
    column_bounds: list[int]
    is_mds: bool
    is_mdp: bool
    is_smds: bool
    notes: list[str] = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "column": self.column, "free": self.free,
            "degree": self.degree, "degree_exact": self.degree_exact, "L": self.L, "J": self.J,
            "free_bound": self.free_bound, "column_bounds": self.column_bounds,
            "is_MDS": self.is_mds, "is_MDP": self.is_mdp, "is_sMDS": self.is_smds,
            "notes": self.notes,
        }


def _flags(n, k, delta, column, free):
    L, J = profile_lengths(n, k, delta)
    fb = free_distance_bound(n, k, delta)
    mds = free is not None and free == fb
    mdp = L is not None and column[L] == column_distance_bound(n, k, L)
    smds = J is not None and column[J] == fb
    return L, J, fb, mds, mdp, smds


def cc_bounds(code: ConvolutionalCode, horizon: int | None = None,
              free: int | None = None, compute_free: bool = True) -> DistanceProfile:
    """Column/free distances with the Singleton-type bounds and MDS/MDP flags.

    For a non-reduced generator the degree is only bounded by nu(G); the flags
    are evaluated for every degree below nu(G) and DegreeUnknown is raised if
    they disagree.
    """
    n, k, nu = code.n, code.k, code.degree_upper
    candidates = [nu] if code.reduced else list(range(0, nu))
    if not candidates:
        candidates = [nu]
    need = 0
    for delta in candidates + [nu]:
        L, J = profile_lengths(n, k, delta)
        need = max(need, L or 0, J or 0)
    if horizon is not None:
        need = max(need, horizon)
    column = code.column_distances(need)
    if free is None and compute_free:
        free = code.free_distance()
    check_profile(column, n, free)
    assert profile_chain_holds(column, n, k), f"chain property fails on {column}"
    for j, c in enumerate(column):
        assert c <= column_distance_bound(n, k, j), "column distance bound violated"
    results = {d: _flags(n, k, d, column, free) for d in candidates}
    distinct = {r[3:] for r in results.values()}
    if len(distinct) > 1:
        raise DegreeUnknown(
            f"generator is not reduced; flags differ across possible degrees {candidates}"
        )
    delta = candidates[-1]
    L, J, fb, mds, mdp, smds = results[delta]
    notes = [] if code.reduced else [f"degree unknown; flags agree for every degree < {nu}"]
    if free is not None and code.reduced:
        assert free <= fb, "free distance exceeds the generalized Singleton bound"
    return DistanceProfile(
        n=n, k=k, column=column, free=free, degree=delta if code.reduced else nu,
        degree_exact=code.reduced, L=L, J=J, free_bound=fb,
        column_bounds=[column_distance_bound(n, k, j) for j in range(len(column))],
        is_mds=mds, is_mdp=mdp, is_smds=smds, notes=notes,
    )


# -- search -------------------------------------------------------------------


@dataclass
class SearchResult:
    code: ConvolutionalCode
    profile: tuple[int, ...]
    evaluated: int
    exhaustive: bool
    chain_violations: list[tuple[int, ...]]


def _search_horizon(n: int, k: int, m: int) -> int:
    L, _ = profile_lengths(n, k, k * m)
    return L if L is not None else m


def cc_search_profile(n: int, k: int, m: int, field: ff.FieldSpec, budget: int,
                      seed: int = 7, reduced_only: bool = False) -> SearchResult:
    """Find the generator of memory exactly m maximising (d_0^c, ..., d_H^c).

    H is the maximum profile length for degree k*m. The search is exhaustive
    when the whole space fits in ``budget``, otherwise ``budget`` seeded random
    candidates are drawn. Ties go to the lexicographically smallest serialized
    generator.
    """
    q = field.q
    horizon = _search_horizon(n, k, m)
    size = q ** (k * n * (m + 1))
    exhaustive = size <= budget
    if exhaustive:
        source = (np.array(v, dtype=np.int64) for v in itertools.product(range(q), repeat=k * n * (m + 1)))
    else:
        rng = np.random.default_rng(seed)
        source = (rng.integers(0, q, size=k * n * (m + 1)) for _ in range(budget))
    best = None
    evaluated = 0
    violations = []
    for flat in source:
        blocks = flat.reshape(m + 1, k, n)
        if m > 0 and not blocks[m].any():
            continue
        try:
            code = ConvolutionalCode(PolyGeneratorMatrix(field, tuple(blocks)))
        except G0RankDeficient:
            continue
        if code.memory != m or (reduced_only and not (code.reduced and code.equal_row_degrees)):
            continue
        evaluated += 1
        prof = tuple(code.column_distances(horizon))
        if not profile_chain_holds(prof, n, k):
            violations.append(prof)
        key = (prof, tuple(-x for x in code.gen.serialize()))
        if best is None or key > best[0]:
            best = (key, code, prof)
    if best is None:
        raise NoneFound(f"no admissible generator among {budget} candidates")
    return SearchResult(best[1], best[2], evaluated, exhaustive, violations)
