"""Trellis codes presented by labeled digraphs.

Distances between pairs of codewords are found on the pair graph, whose
nodes are ordered state pairs (a, b) and whose edges are pairs of edges
leaving a and b, weighted by the Hamming distance of their labels.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import deque
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import BudgetExceeded, HypothesisViolated, InputParseError, NoInfinitePath, NotDeterministic

Number = Union[int, Fraction, float]
PAIR_GUARD = 1 << 22
FLOAT_TOL = 1e-9


# -- exact logarithms ---------------------------------------------------------


def _primitive_root(x: int) -> tuple[int, int]:
    """(b, a) with x = b^a and a maximal."""
    for a in range(int(math.log2(x)) if x > 1 else 1, 0, -1):
        b = round(x ** (1.0 / a))
        for cand in (b - 1, b, b + 1):
            if cand >= 2 and cand**a == x:
                return cand, a
    return x, 1


def exact_log(x: int, base: int) -> Number:
    """log_base(x) as a Fraction when both are powers of a common integer."""
    if x == 1:
        return Fraction(0)
    b, a = _primitive_root(base)
    c, rest = 0, x
    while rest % b == 0:
        rest //= b
        c += 1
    if rest == 1:
        return Fraction(c, a)
    return math.log(x) / math.log(base)


def floor_number(x: Number) -> int:
    if isinstance(x, float):
        return math.floor(x + FLOAT_TOL)
    return math.floor(x)


def le(a: Number, b: Number) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a <= b + FLOAT_TOL
    return a <= b


def eq(a: Number, b: Number) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return abs(a - b) <= FLOAT_TOL
    return a == b


def number_json(x: Number):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


# -- graphs -------------------------------------------------------------------


class LabeledDigraph:
    """States 0..V-1 and an ordered edge list (src, dst, label in Sigma_q^n)."""

    def __init__(self, num_states: int, edges, q: int, n: int):
        self.num_states = int(num_states)
        self.q, self.n = int(q), int(n)
        edges = [(int(s), int(d), tuple(int(x) for x in lab)) for s, d, lab in edges]
        for s, d, lab in edges:
            if not (0 <= s < self.num_states and 0 <= d < self.num_states):
                raise ValueError(f"edge {s}->{d} leaves the state set")
            if len(lab) != self.n or any(not 0 <= x < self.q for x in lab):
                raise ValueError(f"label {lab} is not in Sigma_{self.q}^{self.n}")
        self.edges = edges
        self.src = np.array([e[0] for e in edges], dtype=np.int64)
        self.dst = np.array([e[1] for e in edges], dtype=np.int64)
        self.labels = np.array([e[2] for e in edges], dtype=np.int64).reshape(len(edges), self.n)
        self.out = [[] for _ in range(self.num_states)]
        for i, (s, _, _) in enumerate(edges):
            self.out[s].append(i)
        self.out = [np.array(o, dtype=np.int64) for o in self.out]

    @property
    def out_degrees(self) -> list[int]:
        return [len(o) for o in self.out]

    @property
    def M(self) -> int | None:
        degs = set(self.out_degrees)
        return degs.pop() if len(degs) == 1 else None

    def reachable(self, start: int) -> np.ndarray:
        seen = np.zeros(self.num_states, dtype=bool)
        seen[start] = True
        todo = [start]
        while todo:
            s = todo.pop()
            for d in self.dst[self.out[s]].tolist():
                if not seen[d]:
                    seen[d] = True
                    todo.append(d)
        return seen

    def to_text(self) -> str:
        lines = [f"{self.q} {self.n} {self.M if self.M is not None else 0} {self.num_states}"]
        lines += [" ".join(str(x) for x in (s, d) + lab) for s, d, lab in self.edges]
        return "\n".join(lines) + "\n"


def parse_trellis(text: str) -> LabeledDigraph:
    """Header ``q n M |V|`` then one ``src dst symbols...`` line per edge."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InputParseError("empty trellis file")
    try:
        q, n, M, V = (int(x) for x in rows[0])
        edges = []
        for r in rows[1:]:
            vals = [int(x) for x in r]
            if len(vals) != 2 + n:
                raise InputParseError(f"edge line {' '.join(r)!r} needs {2 + n} integers")
            edges.append((vals[0], vals[1], vals[2:]))
        g = LabeledDigraph(V, edges, q, n)
    except ValueError as exc:
        raise InputParseError(str(exc)) from exc
    if M and g.M != M:
        raise InputParseError(f"header says M={M} but out-degrees are {sorted(set(g.out_degrees))}")
    return g


# -- pair graph -----------------------------------------------------------------


@dataclass(frozen=True)
class PairGraph:
    V: int
    src: np.ndarray
    dst: np.ndarray
    cost: np.ndarray
    same: np.ndarray  # the two edges carry identical labels


def pair_graph(g: LabeledDigraph, guard: int = PAIR_GUARD) -> PairGraph:
    V = g.num_states
    total = sum(len(a) * len(b) for a in g.out for b in g.out)
    if total > guard:
        raise BudgetExceeded(f"pair graph has {total} edges, guard {guard}")
    src, dst, cost, same = [], [], [], []
    for a in range(V):
        ea = g.out[a]
        if not ea.size:
            continue
        for b in range(V):
            eb = g.out[b]
            if not eb.size:
                continue
            ia, ib = np.meshgrid(ea, eb, indexing="ij")
            ia, ib = ia.ravel(), ib.ravel()
            d = (g.labels[ia] != g.labels[ib]).sum(axis=1)
            src.append(np.full(ia.size, a * V + b))
            dst.append(g.dst[ia] * V + g.dst[ib])
            cost.append(d)
            same.append(d == 0)
    cat = lambda xs, dt: np.concatenate(xs).astype(dt) if xs else np.zeros(0, dtype=dt)
    return PairGraph(V, cat(src, np.int64), cat(dst, np.int64), cat(cost, np.int64), cat(same, bool))


def _splits(g: LabeledDigraph, v: int) -> tuple[np.ndarray, np.ndarray]:
    """Pair-node targets and costs of ordered pairs of distinct edges leaving v."""
    e = g.out[v]
    pairs = [(a, b) for a in e.tolist() for b in e.tolist() if a != b]
    if not pairs:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    a, b = np.array(pairs).T
    nodes = g.dst[a] * g.num_states + g.dst[b]
    costs = (g.labels[a] != g.labels[b]).sum(axis=1)
    return nodes, costs


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class TrellisFlags:
    m_regular: bool
    deterministic: bool
    irreducible: bool
    lossless: bool


def _is_deterministic(g: LabeledDigraph) -> bool:
    for o in g.out:
        labs = [tuple(x) for x in g.labels[o].tolist()]
        if len(set(labs)) != len(labs):
            return False
    return True


def _is_irreducible(g: LabeledDigraph) -> bool:
    if not g.reachable(0).all():
        return False
    rev = LabeledDigraph(g.num_states, [(d, s, lab) for s, d, lab in g.edges], g.q, g.n)
    return bool(rev.reachable(0).all())


def _is_lossless(g: LabeledDigraph, guard: int = PAIR_GUARD) -> bool:
    """No two distinct paths with common endpoints carry the same labels.

    Two such paths split at a state into distinct equally-labelled edges and
    then follow equally-labelled edge pairs until both sit on one state.
    """
    V = g.num_states
    pg = pair_graph(g, guard)
    succ: dict[int, list[int]] = {}
    for s, d in zip(pg.src[pg.same].tolist(), pg.dst[pg.same].tolist()):
        succ.setdefault(s, []).append(d)
    seen = set()
    todo = deque()
    for v in range(V):
        e = g.out[v].tolist()
        for a, b in itertools.permutations(e, 2):
            if g.edges[a][2] == g.edges[b][2]:
                node = int(g.dst[a] * V + g.dst[b])
                if node not in seen:
                    seen.add(node)
                    todo.append(node)
    while todo:
        node = todo.popleft()
        if node // V == node % V:
            return False
        for nxt in succ.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return True


class TrellisCode:
    """A labeled digraph with an initial state and verified structural flags."""

    def __init__(self, graph: LabeledDigraph, initial: int = 0, guard: int = PAIR_GUARD):
        if not 0 <= initial < graph.num_states:
            raise ValueError(f"initial state {initial} out of range")
        self.graph = graph
        self.initial = initial
        self.q, self.n = graph.q, graph.n
        det = _is_deterministic(graph)
        lossless = True if det else _is_lossless(graph, guard)
        if det:
            assert _is_lossless(graph, guard) if graph.num_states ** 2 <= 4096 else True, \
                "deterministic presentation reported lossy"
        self.flags = TrellisFlags(
            m_regular=graph.M is not None,
            deterministic=det,
            irreducible=_is_irreducible(graph),
            lossless=lossless,
        )
        self.degree_upper = exact_log(graph.num_states, graph.q)
        self._pg: PairGraph | None = None
        self._guard = guard

    @property
    def M(self) -> int | None:
        return self.graph.M

    def _require_deterministic(self):
        if not self.flags.deterministic:
            raise NotDeterministic("distances need a deterministic presentation")

    def pairs(self) -> PairGraph:
        if self._pg is None:
            self._pg = pair_graph(self.graph, self._guard)
        return self._pg

    def column_distances(self, horizon: int) -> list[int]:
        """[d_0^c, ..., d_horizon^c] over pairs of paths from the initial state
        whose first edges differ."""
        self._require_deterministic()
        V = self.graph.num_states
        big = np.iinfo(np.int64).max // 4
        dist = np.full(V * V, big, dtype=np.int64)
        nodes, costs = _splits(self.graph, self.initial)
        if not nodes.size:
            raise NoInfinitePath("initial state has fewer than two outgoing edges")
        np.minimum.at(dist, nodes, costs)
        out = [int(dist.min())]
        pg = self.pairs() if horizon else None
        for _ in range(horizon):
            new = np.full(V * V, big, dtype=np.int64)
            live = dist[pg.src] < big
            np.minimum.at(new, pg.dst[live], dist[pg.src[live]] + pg.cost[live])
            dist = new
            if dist.min() >= big:
                raise NoInfinitePath("no pair of paths that long from the initial state")
            out.append(int(dist.min()))
        return out

    def column_distance(self, j: int) -> int:
        return self.column_distances(j)[j]

    def free_distance(self) -> int:
        """Minimum distance between distinct infinite label sequences.

        After the paths split, the distance stops growing once they reach a
        pair node with an infinite zero-cost continuation (the diagonal, or a
        zero-cost cycle off it); the answer is the cheapest route there.
        """
        self._require_deterministic()
        g, V = self.graph, self.graph.num_states
        if any(len(o) == 0 for o in g.out):
            raise NoInfinitePath("some states have no outgoing edges")
        pg = self.pairs()
        N = V * V
        zero = pg.cost == 0
        inW = np.ones(N, dtype=bool)
        while True:
            has = np.zeros(N, dtype=bool)
            ok = zero & inW[pg.dst]
            has[pg.src[ok]] = True
            nxt = inW & has
            if (nxt == inW).all():
                break
            inW = nxt
        # reverse Dijkstra from the zero-continuation set
        big = np.iinfo(np.int64).max // 4
        to_w = np.full(N, big, dtype=np.int64)
        rev: dict[int, list[tuple[int, int]]] = {}
        for s, d, c in zip(pg.src.tolist(), pg.dst.tolist(), pg.cost.tolist()):
            rev.setdefault(d, []).append((s, c))
        heap = [(0, int(v)) for v in np.nonzero(inW)[0]]
        to_w[inW] = 0
        heapq.heapify(heap)
        while heap:
            d, v = heapq.heappop(heap)
            if d > to_w[v]:
                continue
            for u, c in rev.get(v, ()):
                if d + c < to_w[u]:
                    to_w[u] = d + c
                    heapq.heappush(heap, (d + c, u))
        best = big
        for v in np.nonzero(g.reachable(self.initial))[0].tolist():
            nodes, costs = _splits(g, v)
            if nodes.size:
                best = min(best, int((costs + to_w[nodes]).min()))
        if best >= big:
            raise NoInfinitePath("no two distinct infinite paths")
        return best

    def codebook(self, depth: int) -> list[tuple[tuple[int, ...], ...]]:
        """Label sequences of all paths of ``depth`` edges from the initial state."""
        g = self.graph
        paths = [((), self.initial)]
        for _ in range(depth):
            paths = [(labs + (g.edges[e][2],), g.edges[e][1]) for labs, s in paths for e in g.out[s].tolist()]
        return [labs for labs, _ in paths]


def tc_validate(graph: LabeledDigraph, initial: int = 0) -> TrellisCode:
    return TrellisCode(graph, initial)


def from_convolutional(code) -> TrellisCode:
    """Trellis whose states are the controller-form encoder states."""
    sm = code.state_machine()
    states = np.arange(sm.num_states)
    outs = sm.outputs(states)
    nxt = sm.next(states)
    edges = [
        (s, int(nxt[s, x]), outs[s, x].tolist())
        for s in range(sm.num_states)
        for x in range(len(sm.inputs))
    ]
    return TrellisCode(LabeledDigraph(sm.num_states, edges, code.field.q, code.n), 0)


# -- bounds -------------------------------------------------------------------


def trellis_free_bound(q: int, n: int, M: int, num_states: int) -> Number:
    """(n - log_q M)(floor(delta / log_q M) + 1) + delta + 1 with delta = log_q |V|."""
    lm = exact_log(M, q)
    delta = exact_log(num_states, q)
    ell = 0
    while M ** (ell + 1) <= num_states:
        ell += 1
    return (n - lm) * (ell + 1) + delta + 1


def analogue_column_bound(q: int, n: int, M: int, j: int) -> Number:
    """(j+1)(n - log_q M) + 1."""
    return (j + 1) * (n - exact_log(M, q)) + 1


def trellis_column_bound(q: int, n: int, M: int, j: int) -> Number:
    """(j+1) n - log_q M + 1."""
    return (j + 1) * n - exact_log(M, q) + 1


@dataclass
class BoundReport:
    q: int
    n: int
    M: int
    j: int
    log_q_M: Number
    degree_upper: Number
    column: list[int]
    free: int | None
    free_bound: Number
    analogue: list[Number]
    column_bound: list[Number]
    verdicts: dict[str, bool] = dc_field(default_factory=dict)

    @property
    def free_bound_int(self) -> int:
        return floor_number(self.free_bound)

    @property
    def analogue_int(self) -> list[int]:
        return [floor_number(x) for x in self.analogue]

    @property
    def column_bound_int(self) -> list[int]:
        return [floor_number(x) for x in self.column_bound]

    @property
    def analogue_applicable(self) -> list[bool]:
        return [c <= self.n for c in self.column]

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "q": self.q, "n": self.n, "M": self.M, "j": self.j,
            "log_q_M": number_json(self.log_q_M), "degree_upper": number_json(self.degree_upper),
            "column": self.column, "free": self.free,
            "free_bound": number_json(self.free_bound), "free_bound_int": self.free_bound_int,
            "analogue": [number_json(x) for x in self.analogue], "analogue_int": self.analogue_int,
            "analogue_applicable": self.analogue_applicable,
            "column_bound": [number_json(x) for x in self.column_bound], "column_bound_int": self.column_bound_int,
            "verdicts": self.verdicts,
        }


def chain_holds(column: Sequence[int], bounds: Sequence[Number]) -> bool:
    meets = [eq(c, b) for c, b in zip(column, bounds)]
    return all(all(meets[:j]) for j, m in enumerate(meets) if m and j > 0)


def bound_report(q: int, n: int, M: int, num_states: int, column: Sequence[int],
                 free: int | None = None) -> BoundReport:
    j = len(column) - 1
    rep = BoundReport(
        q=q, n=n, M=M, j=j, log_q_M=exact_log(M, q), degree_upper=exact_log(num_states, q),
        column=list(column), free=free, free_bound=trellis_free_bound(q, n, M, num_states),
        analogue=[analogue_column_bound(q, n, M, i) for i in range(j + 1)],
        column_bound=[trellis_column_bound(q, n, M, i) for i in range(j + 1)],
    )
    v = rep.verdicts
    v["column_bound"] = all(le(c, b) for c, b in zip(rep.column, rep.column_bound))
    v["column_bound_chain"] = chain_holds(rep.column, rep.column_bound)
    v["column_bound_chain_int"] = chain_holds(rep.column, rep.column_bound_int)
    v["analogue"] = all(le(c, b) for c, b, ok in zip(rep.column, rep.analogue, rep.analogue_applicable) if ok)
    v["monotone"] = all(a <= b <= a + n for a, b in zip(rep.column, rep.column[1:]))
    if free is not None:
        v["free_bound"] = le(free, rep.free_bound)
    return rep


def tc_bounds(t: TrellisCode, j: int, with_free: bool = True, M: int | None = None) -> BoundReport:
    """Evaluate the three trellis bounds against computed distances.

    ``M`` overrides the out-degree for truncated presentations, whose final
    states have no outgoing edges.
    """
    M = M if M is not None else t.M
    if M is None:
        raise HypothesisViolated("bounds need an M-regular presentation or an explicit M")
    column = t.column_distances(j)
    free = None
    if with_free:
        try:
            free = t.free_distance()
        except NoInfinitePath:
            free = None
    return bound_report(t.q, t.n, M, t.graph.num_states, column, free)


# -- a trellis code beating the convolutional column-distance bound -------------


@dataclass
class LargeColumnDistanceExample:
    q: int
    M: int
    n: int
    j: int
    partition: list[list[int]]  # A_{j,t}
    levels: list[list[list[tuple[int, ...]]]]  # levels[i][t] = calA_{i,t}
    code: TrellisCode
    codebook: list[tuple[tuple[int, ...], ...]]

    def successor_set(self, i: int, a: tuple[int, ...]) -> int:
        """Index t of the set calA_{i+1,t} containing a."""
        for t, s in enumerate(self.levels[i + 1]):
            if a in s:
                return t
        raise KeyError(a)


def tc_example1(q: int, M: int, n: int, j: int, periodic: bool = False) -> LargeColumnDistanceExample:
    """Depth-(j+1) trellis whose truncation C_j has column distance (j+1)n.

    Requires M^j | q and (q / M^j)^n = M. Nested selections take the smallest
    word of each set. With ``periodic`` the last level loops back to the root
    so that the presentation is M-regular and irreducible.
    """
    if j < 1 or M < 2 or q % (M**j) or (q // M**j) ** n != M:
        raise HypothesisViolated(f"need j >= 1, M^j | q and (q/M^j)^n = M; got q={q}, M={M}, n={n}, j={j}")
    size = q // M**j
    partition = [list(range(t * size, (t + 1) * size)) for t in range(M**j)]
    levels: list[list[list[tuple[int, ...]]]] = [[] for _ in range(j + 1)]
    levels[j] = [sorted(itertools.product(a, repeat=n)) for a in partition]
    for i in range(j - 1, -1, -1):
        levels[i] = [[min(levels[i + 1][t * M + u]) for u in range(M)] for t in range(M**i)]
    # state ids: (i, t) for level i, then a terminal state unless periodic
    ids = {}
    for i in range(j + 1):
        for t in range(M**i):
            ids[(i, t)] = len(ids)
    terminal = ids[(0, 0)] if periodic else len(ids)
    where = [{a: t for t, s in enumerate(levels[i]) for a in s} for i in range(j + 1)]
    edges = []
    for i in range(j + 1):
        for t in range(M**i):
            for a in levels[i][t]:
                dst = ids[(i + 1, where[i + 1][a])] if i < j else terminal
                edges.append((ids[(i, t)], dst, a))
    V = len(ids) + (0 if periodic else 1)
    code = TrellisCode(LabeledDigraph(V, edges, q, n), ids[(0, 0)])
    codebook = code.codebook(j + 1)
    assert len(set(codebook)) == M ** (j + 1)
    assert code.column_distance(j) == (j + 1) * n
    return LargeColumnDistanceExample(q, M, n, j, partition, levels, code, codebook)


# -- random presentations -------------------------------------------------------


def random_deterministic_trellis(num_states: int, q: int, n: int, M: int, rng,
                                 irreducible: bool = True, max_tries: int = 1000) -> TrellisCode:
    """M-regular deterministic presentation with uniformly drawn labels and targets."""
    if M > q**n:
        raise ValueError("a deterministic state cannot have more than q^n outgoing edges")
    for _ in range(max_tries):
        edges = []
        for s in range(num_states):
            labs = rng.choice(q**n, size=M, replace=False)
            dsts = rng.integers(0, num_states, size=M)
            for lab, d in zip(labs.tolist(), dsts.tolist()):
                word = [(lab // q**i) % q for i in range(n)]
                edges.append((s, d, word))
        t = TrellisCode(LabeledDigraph(num_states, edges, q, n), 0)
        if t.flags.irreducible or not irreducible:
            return t
    raise BudgetExceeded("could not draw an irreducible presentation")
