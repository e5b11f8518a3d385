"""Delta-regular balanced bipartite graphs, their spectral expansion and copies.

Vertices are 0-indexed internally; graph files use 1-indexed vertices. The
edge list order is the fixed total order on edges, so edge ``e`` is the
``e``-th coordinate of a word living on the edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, EmptySubset, InputParseError, RejectionBudgetExceeded

EXACT_SVD_LIMIT = 512
REGULARITY_TOL = 1e-9
MIXING_TOL = 1e-9


class BipartiteGraph:
    """Simple Delta-regular bipartite graph with n vertices per side."""

    def __init__(self, n: int, delta: int, edges):
        self.n, self.delta = int(n), int(delta)
        self.edges = [(int(s), int(t)) for s, t in edges]
        if len(self.edges) != self.n * self.delta:
            raise ValueError(f"expected {self.n * self.delta} edges, got {len(self.edges)}")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("parallel edges are not allowed")
        self.left = [[] for _ in range(self.n)]
        self.right = [[] for _ in range(self.n)]
        for e, (s, t) in enumerate(self.edges):
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise ValueError(f"edge ({s}, {t}) out of range")
            self.left[s].append(e)
            self.right[t].append(e)
        if any(len(x) != self.delta for x in self.left + self.right):
            raise ValueError(f"graph is not {self.delta}-regular")
        self.left = np.array(self.left, dtype=np.int64).reshape(self.n, self.delta)
        self.right = np.array(self.right, dtype=np.int64).reshape(self.n, self.delta)

    @property
    def num_edges(self) -> int:
        return self.n * self.delta

    def biadjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for s, t in self.edges:
            a[s, t] = 1.0
        return a

    def edges_between(self, S, T) -> int:
        s_mask = np.zeros(self.n, dtype=bool)
        t_mask = np.zeros(self.n, dtype=bool)
        s_mask[list(S)] = True
        t_mask[list(T)] = True
        e = np.array(self.edges, dtype=np.int64)
        return int((s_mask[e[:, 0]] & t_mask[e[:, 1]]).sum())

    def to_text(self) -> str:
        lines = [f"{self.n} {self.delta}"] + [f"{s + 1} {t + 1}" for s, t in self.edges]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return isinstance(other, BipartiteGraph) and (self.n, self.delta, self.edges) == (
            other.n, other.delta, other.edges)

    def __repr__(self):
        return f"BipartiteGraph(n={self.n}, delta={self.delta})"


def parse_graph(text: str) -> BipartiteGraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        n, delta = (int(x) for x in rows[0])
        edges = [(int(s) - 1, int(t) - 1) for s, t in rows[1:]]
        return BipartiteGraph(n, delta, edges)
    except (ValueError, IndexError) as exc:
        raise InputParseError(f"bad graph file: {exc}") from exc


def xg_complete(n: int) -> BipartiteGraph:
    if n < 1:
        raise ValueError("n must be positive")
    return BipartiteGraph(n, n, [(s, t) for s in range(n) for t in range(n)])


def xg_random_regular(n: int, delta: int, seed: int = 7, max_restarts: int = 10_000) -> BipartiteGraph:
    """Union of ``delta`` random perfect matchings, redrawing any that repeat an edge.

    Dense requests are served by drawing the complement, whose degree is
    ``n - delta``. Edges are emitted in lexicographic order.
    """
    if not 0 <= delta <= n or n < 1:
        raise ValueError(f"need 0 <= delta <= n, got n={n}, delta={delta}")
    rng = np.random.default_rng(seed)
    d = min(delta, n - delta)
    for _ in range(max_restarts):
        used = np.zeros((n, n), dtype=bool)
        ok = True
        for _ in range(d):
            for _ in range(200):
                perm = rng.permutation(n)
                if not used[np.arange(n), perm].any():
                    used[np.arange(n), perm] = True
                    break
            else:
                ok = False
                break
        if ok:
            mask = used if d == delta else ~used
            edges = [(int(s), int(t)) for s, t in zip(*np.nonzero(mask))]
            return BipartiteGraph(n, delta, edges)
    raise RejectionBudgetExceeded(f"no simple {delta}-regular graph on {n}+{n} after {max_restarts} restarts")


def cycle_graph(n: int) -> BipartiteGraph:
    """The 2n-cycle as a 2-regular bipartite graph: u_s ~ v_s, v_{s+1}."""
    edges = sorted({(s, s) for s in range(n)} | {(s, (s + 1) % n) for s in range(n)})
    return BipartiteGraph(n, 2, edges)


def disjoint_union(*graphs: BipartiteGraph) -> BipartiteGraph:
    delta = graphs[0].delta
    edges, off = [], 0
    for g in graphs:
        if g.delta != delta:
            raise ValueError("degrees differ")
        edges += [(s + off, t + off) for s, t in g.edges]
        off += g.n
    return BipartiteGraph(off, delta, edges)


@dataclass(frozen=True)
class SpectralProfile:
    delta: int
    gamma: float
    method: str
    residual: float

    def to_json(self) -> dict:
        return {"delta": self.delta, "gamma": self.gamma, "method": self.method, "residual": self.residual}


def _power_second(a: np.ndarray, delta: int, tol: float, max_iter: int, rng) -> tuple[float, float]:
    """sigma_2 of a regular biadjacency by power iteration on A^T A orthogonal to ones."""
    n = a.shape[0]
    ones = np.ones(n) / math.sqrt(n)
    x = rng.standard_normal(n)
    lam = 0.0
    for _ in range(max_iter):
        x -= ones * (ones @ x)
        norm = np.linalg.norm(x)
        if norm < 1e-300:
            return 0.0, 0.0
        x /= norm
        y = a.T @ (a @ x)
        y -= ones * (ones @ y)
        new = float(x @ y)
        resid = float(np.linalg.norm(y - new * x))
        x = y
        if abs(new - lam) <= tol * max(1.0, new) and resid <= math.sqrt(tol) * max(1.0, new):
            return math.sqrt(max(new, 0.0)), resid
        lam = new
    raise ConvergenceFailure(f"power iteration did not converge in {max_iter} steps")


def xg_gamma(g: BipartiteGraph, method: str | None = None, tol: float = 1e-12,
             max_iter: int = 100_000, seed: int = 7) -> SpectralProfile:
    """gamma = sigma_2(biadjacency) / Delta."""
    a = g.biadjacency()
    if method is None:
        method = "exact" if g.n <= EXACT_SVD_LIMIT else "power"
    if method == "exact":
        sv = np.linalg.svd(a, compute_uv=False)
        top = sv[0]
        second = sv[1] if g.n > 1 else 0.0
        residual = abs(top - g.delta)
    elif method == "power":
        top = float(np.linalg.norm(a @ np.ones(g.n)) / math.sqrt(g.n))
        second, residual = _power_second(a, g.delta, tol, max_iter, np.random.default_rng(seed))
    else:
        raise ValueError(f"unknown method {method!r}")
    assert abs(top - g.delta) <= REGULARITY_TOL * max(1, g.delta), "top singular value differs from Delta"
    gamma = min(max(second / g.delta, 0.0), 1.0) if g.delta else 0.0
    if gamma < 1e-13:
        gamma = 0.0
    return SpectralProfile(g.delta, float(gamma), method, float(residual))


@dataclass(frozen=True)
class MixingResult:
    lhs: int
    rhs: float
    holds: bool


def mixing_bound(n: int, delta: int, s: int, t: int, gamma: float) -> float:
    return ((1 - gamma) * s * t / n + gamma * math.sqrt(s * t)) * delta


def xg_mixing_check(g: BipartiteGraph, S, T, gamma: float) -> MixingResult:
    """Edges between left set S and right set T against the mixing bound."""
    S, T = sorted(set(S)), sorted(set(T))
    if not S or not T:
        raise EmptySubset("S and T must be nonempty")
    lhs = g.edges_between(S, T)
    rhs = mixing_bound(g.n, g.delta, len(S), len(T), gamma)
    return MixingResult(lhs, rhs, lhs <= rhs + MIXING_TOL * max(1.0, rhs))


def mixing_sweep(g: BipartiteGraph, gamma: float, trials: int, seed: int = 7) -> dict:
    """Check the mixing bound on random nonempty subset pairs."""
    rng = np.random.default_rng(seed)
    worst, fails = -math.inf, 0
    for _ in range(trials):
        S = np.nonzero(rng.random(g.n) < rng.random())[0]
        T = np.nonzero(rng.random(g.n) < rng.random())[0]
        if not S.size:
            S = rng.integers(0, g.n, size=1)
        if not T.size:
            T = rng.integers(0, g.n, size=1)
        r = xg_mixing_check(g, S.tolist(), T.tolist(), gamma)
        fails += not r.holds
        worst = max(worst, r.lhs - r.rhs)
    return {"trials": trials, "failures": fails, "worst_slack": worst}


@dataclass(frozen=True)
class EdgeIndexing:
    """Coordinates of edges of G_0..G_m: edge e of copy j sits at j*n*Delta + e."""

    graph: BipartiteGraph
    m: int

    @property
    def block(self) -> int:
        return self.graph.num_edges

    @property
    def length(self) -> int:
        return (self.m + 1) * self.block

    def position(self, j: int, e: int) -> int:
        if not (0 <= j <= self.m and 0 <= e < self.block):
            raise IndexError((j, e))
        return j * self.block + e

    def left(self, j: int, s: int) -> np.ndarray:
        """Coordinates of E(u_{j,s}) in edge order."""
        return j * self.block + self.graph.left[s]

    def right(self, j: int, t: int) -> np.ndarray:
        return j * self.block + self.graph.right[t]

    def right_all(self, t: int) -> np.ndarray:
        """Coordinates of E(v_{0,t}, ..., v_{m,t}), copy-major."""
        return np.concatenate([self.right(j, t) for j in range(self.m + 1)])

    def consistent(self) -> bool:
        """Edge order within every copy agrees with the order on E_0."""
        for j in range(self.m + 1):
            pos = [self.position(j, e) for e in range(self.block)]
            if pos != sorted(pos) or any(p - j * self.block != e for e, p in enumerate(pos)):
                return False
        return True


def xg_copies(g: BipartiteGraph, m: int) -> EdgeIndexing:
    if m < 0:
        raise ValueError("m must be nonnegative")
    return EdgeIndexing(g, m)
