"""Landscape analysis: independence polynomial, configuration graphs,
manifold Laplacian gaps, and the analytic classical runtime lower bounds.

All counts are exact Python integers; they overflow 64 bits well below the
sizes this module targets, so bound arithmetic goes through fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .bits import (enumerate_independent_sets_of_size, popcount,
                   spin_exchange_targets)
from .errors import CapacityError, EmptyManifoldError
from .graphs import Graph

ENUMERATION_LIMIT = 30          # default exact-counting vertex limit
DENSE_LAPLACIAN_LIMIT = 2048    # dense eigensolve up to this many nodes

BOUND_KINDS = ("sa", "pt_local", "pt_isoenergetic", "qmc")


@dataclass(frozen=True)
class LandscapeProfile:
    """Independence polynomial D_0..D_alpha and derived bound quantities.

    ``b_star`` is the smallest index after which the counts are monotone
    non-increasing; ``unimodal`` additionally requires a non-decreasing
    prefix up to ``b_star``.
    """

    n: int
    counts: tuple[int, ...]
    alpha: int
    b_star: int
    unimodal: bool
    source: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def suffix_ratio(self, b: int) -> Fraction:
        """D_{b-1} / D_b."""
        return Fraction(self.counts[b - 1], self.counts[b])

    def bound_sizes(self) -> list[int]:
        """Set sizes the runtime bounds maximize over: b in (b_star, alpha],
        falling back to [alpha] when that range is empty."""
        if self.b_star < self.alpha:
            return list(range(self.b_star + 1, self.alpha + 1))
        return [self.alpha]

    @property
    def max_suffix_ratio(self) -> Fraction:
        return max(self.suffix_ratio(b) for b in self.bound_sizes())

    def to_document(self) -> dict:
        return {
            "version": 1,
            "kind": "profile",
            "n": self.n,
            "counts": [str(c) for c in self.counts],
            "alpha": self.alpha,
            "b_star": self.b_star,
            "unimodal": self.unimodal,
            "source": self.source,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "LandscapeProfile":
        return cls(
            n=doc["n"],
            counts=tuple(int(c) for c in doc["counts"]),
            alpha=doc["alpha"],
            b_star=doc["b_star"],
            unimodal=doc["unimodal"],
            source=doc.get("source", {}),
        )


def _profile_from_counts(n: int, counts: list[int], source: dict) -> LandscapeProfile:
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    alpha = len(counts) - 1
    b_star = alpha
    for b in range(alpha, 0, -1):
        if counts[b - 1] >= counts[b]:
            b_star = b - 1
        else:
            break
    unimodal = all(counts[b] <= counts[b + 1] for b in range(b_star))
    return LandscapeProfile(n=n, counts=tuple(counts), alpha=alpha,
                            b_star=b_star, unimodal=unimodal, source=source)


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _components(vertices: int, adj: list[int]) -> list[int]:
    comps = []
    todo = vertices
    while todo:
        seed = todo & -todo
        comp = seed
        frontier = seed
        while frontier:
            grow = 0
            f = frontier
            while f:
                low = f & -f
                v = low.bit_length() - 1
                f ^= low
                grow |= adj[v] & todo & ~comp
            comp |= grow
            frontier = grow
        comps.append(comp)
        todo &= ~comp
    return comps


def _count_component(comp: int, adj: list[int]) -> list[int]:
    k = popcount(comp)
    if k == 0:
        return [1]
    if k == 1:
        return [1, 1]
    # branch on a maximum-degree vertex: I(G) = I(G - v) + x * I(G - N[v])
    best_v, best_deg = -1, -1
    m = comp
    while m:
        low = m & -m
        v = low.bit_length() - 1
        m ^= low
        deg = popcount(adj[v] & comp)
        if deg > best_deg:
            best_v, best_deg = v, deg
    if best_deg == 0:
        # edgeless component: binomial counts
        return [math.comb(k, b) for b in range(k + 1)]
    vbit = 1 << best_v
    without = _count_recursive(comp & ~vbit, adj)
    with_v = _count_recursive(comp & ~(vbit | adj[best_v]), adj)
    out = without + [0] * (len(with_v) + 1 - len(without))
    for i, c in enumerate(with_v):
        out[i + 1] += c
    while out and out[-1] == 0:
        out.pop()
    return out


def _count_recursive(vertices: int, adj: list[int]) -> list[int]:
    result = [1]
    for comp in _components(vertices, adj):
        result = _poly_mul(result, _count_component(comp, adj))
    return result


def path_counts(m: int) -> list[int]:
    """Independence polynomial coefficients of a path with m vertices."""
    if m <= 0:
        return [1]
    prev2, prev = [1], [1, 1]
    for _ in range(m - 1):
        cur = prev + [0] * (len(prev2) + 1 - len(prev))
        for k, c in enumerate(prev2):
            cur[k + 1] += c
        prev2, prev = prev, cur
    return prev


def _count_star(n_b: int, ell: int) -> list[int]:
    """Exact star-graph counts by per-branch products: the centre is either
    absent (branches free) or present (first branch vertices excluded)."""
    absent = [1]
    p = path_counts(ell)
    for _ in range(n_b):
        absent = _poly_mul(absent, p)
    present = [1]
    q = path_counts(ell - 1)
    for _ in range(n_b):
        present = _poly_mul(present, q)
    out = absent + [0] * (len(present) + 1 - len(absent))
    for k, c in enumerate(present):
        out[k + 1] += c
    return out


def independence_polynomial(graph: Graph, method: str = "auto",
                            limit: int = ENUMERATION_LIMIT) -> LandscapeProfile:
    """Exact counts of independent sets by size.

    method "auto" uses the closed per-branch product for star graphs and
    branch-and-bound recursion otherwise; "generic" forces the recursion,
    "star" forces the product form.
    """
    if method not in ("auto", "generic", "star"):
        raise ValueError(f"unknown method {method!r}")
    source = {"kind": graph.kind, **graph.meta}
    if method == "star" or (method == "auto" and graph.kind == "star"):
        if "n_b" not in graph.meta or "ell" not in graph.meta:
            raise ValueError("star counting requires n_b/ell metadata")
        counts = _count_star(graph.meta["n_b"], graph.meta["ell"])
        return _profile_from_counts(graph.n, counts, source)
    if graph.n > limit:
        raise CapacityError(
            f"exact counting limited to n <= {limit} vertices (got n={graph.n}); "
            "star instances use the closed form at any size")
    counts = _count_recursive((1 << graph.n) - 1, graph.adjacency())
    return _profile_from_counts(graph.n, counts, source)


@dataclass(frozen=True)
class ConfigurationGraph:
    """Independent sets of one size as nodes, spin-exchange moves as edges."""

    b: int
    nodes: tuple[int, ...]
    neighbors: tuple[tuple[int, ...], ...]
    components: tuple[int, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.neighbors) // 2

    @property
    def n_components(self) -> int:
        return len(set(self.components)) if self.components else 0

    def largest_component(self) -> list[int]:
        """Node indices of the largest connected component."""
        sizes: dict[int, int] = {}
        for label in self.components:
            sizes[label] = sizes.get(label, 0) + 1
        best = max(sizes, key=lambda lab: (sizes[lab], -lab))
        return [i for i, lab in enumerate(self.components) if lab == best]

    @property
    def connected(self) -> bool:
        return self.n_components <= 1


def configuration_graph(graph: Graph, b: int) -> ConfigurationGraph:
    adj = graph.adjacency()
    nodes = enumerate_independent_sets_of_size(graph.n, adj, b)
    if not nodes:
        raise EmptyManifoldError(f"no independent sets of size {b}")
    index = {z: i for i, z in enumerate(nodes)}
    neighbors = []
    for z in nodes:
        neighbors.append(tuple(sorted(index[t] for t in spin_exchange_targets(z, adj))))
    # connected components by BFS over the move graph
    labels = [-1] * len(nodes)
    current = 0
    for start in range(len(nodes)):
        if labels[start] != -1:
            continue
        stack = [start]
        labels[start] = current
        while stack:
            i = stack.pop()
            for j in neighbors[i]:
                if labels[j] == -1:
                    labels[j] = current
                    stack.append(j)
        current += 1
    return ConfigurationGraph(b=b, nodes=tuple(nodes), neighbors=tuple(neighbors),
                              components=tuple(labels))


def laplacian_gap(cg: ConfigurationGraph) -> float:
    """Gap between the two smallest Laplacian eigenvalues of the largest
    connected component; a single-node manifold reports +inf."""
    comp = cg.largest_component()
    m = len(comp)
    if m == 1:
        return math.inf
    pos = {node: k for k, node in enumerate(comp)}
    rows, cols, vals = [], [], []
    deg = np.zeros(m)
    for node in comp:
        i = pos[node]
        for j_node in cg.neighbors[node]:
            j = pos[j_node]
            rows.append(i)
            cols.append(j)
            vals.append(-1.0)
            deg[i] += 1.0
    lap = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(m, m))
    lap += scipy.sparse.diags(deg)
    if m <= DENSE_LAPLACIAN_LIMIT:
        w = scipy.linalg.eigh(lap.toarray(), eigvals_only=True,
                              subset_by_index=(0, 1))
    else:
        w = np.sort(scipy.sparse.linalg.eigsh(
            lap, k=2, which="SA", return_eigenvectors=False,
            ncv=min(m, 64), maxiter=100 * m))
    return float(w[1] - w[0])


def _isoenergetic_term(profile: LandscapeProfile, b: int, k_prime: int) -> Fraction:
    """Bracketed denominator for the isoenergetic cluster-update bound: the
    local-update flow plus the triple sum over replica-pair energy splits."""
    D = profile.counts
    alpha = profile.alpha
    n = profile.n
    total = Fraction(k_prime * n ** k_prime) * Fraction(D[b], D[b - 1])
    for b1 in range(b, alpha + 1):
        for b2 in range(0, 2 * (b - 1) - b1 + 1):
            for k in range(b1 - b + 1, b - 1 - b2 + 1):
                total += Fraction(D[b1] * D[b2], D[b1 - k] * D[b2 + k])
    return total


def classical_bound(profile: LandscapeProfile, kind: str, *, k: int = 1,
                    k_prime: int = 1, eps: float = 0.25,
                    e_max: float = 1.0) -> float:
    """Analytic runtime lower bounds for SA, parallel tempering (with and
    without isoenergetic cluster updates), and path-integral QMC.

    ``k`` bounds the spins altered per update (SA/QMC), ``k_prime`` the
    spins per replica per collective update (PT), ``e_max`` the Gibbs
    enhancement factor entering the QMC bound.
    """
    if kind not in BOUND_KINDS:
        raise ValueError(f"unknown bound kind {kind!r}; expected one of {BOUND_KINDS}")
    if not eps < 0.5:
        raise ValueError("error target eps must be < 1/2")
    if k < 1 or k_prime < 1:
        raise ValueError("k and k_prime must be >= 1")
    n = profile.n
    log_factor = math.log(1.0 / (2.0 * eps))
    if kind == "sa":
        value = Fraction(1, 2 * n * k) * profile.max_suffix_ratio
    elif kind == "pt_local":
        value = Fraction(1, 2 * n * k_prime * n ** k_prime) * profile.max_suffix_ratio
    elif kind == "qmc":
        if e_max <= 0:
            raise ValueError("e_max must be positive")
        value = Fraction(1, 2 * n * k * n ** k) * profile.max_suffix_ratio / Fraction(e_max)
    else:  # pt_isoenergetic
        best = min(_isoenergetic_term(profile, b, k_prime)
                   for b in profile.bound_sizes())
        value = Fraction(1, 2 * n) / best
    return log_factor * float(value)


@dataclass
class UnimodalityReport:
    checked: int = 0
    violations: list = field(default_factory=list)
    capacity_skips: int = 0

    @property
    def violation_count(self) -> int:
        return len(self.violations)


def unimodality_scan(graphs, limit: int = ENUMERATION_LIMIT) -> UnimodalityReport:
    """Check every instance's independence polynomial for unimodality.

    Capacity errors are collected, not fatal; violations carry the instance
    metadata so the offending case can be reproduced.
    """
    report = UnimodalityReport()
    for g in graphs:
        try:
            profile = independence_polynomial(g, limit=limit)
        except CapacityError:
            report.capacity_skips += 1
            continue
        report.checked += 1
        if not profile.unimodal:
            report.violations.append({"meta": g.meta, "counts": profile.counts})
    return report
