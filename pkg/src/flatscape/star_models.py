"""Closed-form star-graph predictions and a branch-permutation-symmetric
Hilbert space for exact diagonalization at large branch counts.

A star has n_b branches (paths of even length ell) joined at a centre.  Its
unique maximum independent set has size alpha = ell*n_b/2 + 1.  The first
excited manifold is dominated by sets with the centre absent and one domain
wall per branch; the per-branch wall hops on ell/2 + 1 positions, giving the
spin-exchange density c_ell = 2*cos(pi/(ell/2 + 2)) per branch.

The ground and first-excited states are symmetric under branch permutation,
so spectra are computed in the bosonic multiset basis: with K per-branch
states, dimension drops from K^n_b to C(K + n_b - 1, n_b), which reaches
hundreds of branches for ell = 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
import scipy.sparse



def exchange_density(ell: int) -> float:
    """Largest adjacency eigenvalue of the per-branch domain-wall path."""
    if ell < 2 or ell % 2:
        raise ValueError("ell must be even and >= 2")
    return 2.0 * math.cos(math.pi / (ell // 2 + 2))


def central_present_count(n_b: int, ell: int) -> int:
    """Number of size-(alpha-1) independent sets containing the centre.

    With the centre present, every branch avoids its first vertex; exactly
    one branch is one vertex short of its unique constrained maximum, and a
    deficient branch has C(ell/2 + 1, 2) arrangements.  For ell in {4, 6}
    this equals the compact form 3*n_b*(ell/2 - 1); at ell = 2 that
    expression gives 0 while the true count is n_b, and it undercounts for
    ell >= 8.
    """
    return n_b * math.comb(ell // 2 + 1, 2)


def central_absent_count(n_b: int, ell: int) -> int:
    """Size-(alpha-1) sets without the centre: one domain wall per branch."""
    return (ell // 2 + 1) ** n_b


@dataclass(frozen=True)
class StarPrediction:
    """Asymptotic level-crossing parameters for a star graph.

    Quantities follow second-order perturbation theory in Omega/delta and
    carry the per-branch exchange density c_ell; they sharpen as n_b grows
    (the predictions are exact only in the n_b -> infinity limit).
    """

    n_b: int
    ell: int
    alpha: int
    c_ell: float
    crossing: float                 # (Omega/delta)*
    minus_e_star_over_n: float      # -E*/n in units of delta
    tilde_gap: float                # leading-order coupling estimate
    central_absent: int
    central_present: int
    asymptotic: bool = True

    def to_document(self) -> dict:
        return {
            "version": 1,
            "kind": "star_prediction",
            "n_b": self.n_b,
            "ell": self.ell,
            "alpha": self.alpha,
            "c_ell": self.c_ell,
            "crossing": self.crossing,
            "minus_e_star_over_n": self.minus_e_star_over_n,
            "tilde_gap": self.tilde_gap,
            "central_absent": str(self.central_absent),
            "central_present": str(self.central_present),
            "asymptotic": self.asymptotic,
        }


def star_level_crossing(n_b: int, ell: int, omega: float = 1.0) -> StarPrediction:
    """Predicted avoided-crossing location, ground energy and coupling."""
    if n_b < 2:
        raise ValueError("n_b must be >= 2 for a finite crossing")
    c = exchange_density(ell)
    radicand = c * n_b - 1.0
    if radicand <= 0:
        raise ValueError(f"c_ell*n_b - 1 = {radicand} must be positive")
    crossing = math.sqrt(1.0 / radicand)
    n = n_b * ell + 1
    alpha = ell * n_b // 2 + 1
    minus_e = (alpha / n) * (1.0 + 1.0 / radicand)
    per_branch = math.sin(math.pi / (ell // 2 + 2)) / math.sqrt(ell / 4.0 + 1.0)
    tilde = 2.0 * omega * per_branch ** n_b
    return StarPrediction(
        n_b=n_b, ell=ell, alpha=alpha, c_ell=c, crossing=crossing,
        minus_e_star_over_n=minus_e, tilde_gap=tilde,
        central_absent=central_absent_count(n_b, ell),
        central_present=central_present_count(n_b, ell),
    )


def star_wavefunction(n_b: int, ell: int, walls) -> float:
    """Amplitude of the first-excited manifold state at domain-wall
    positions x_i in {1, .., ell/2 + 1}: a product of sine modes."""
    walls = tuple(walls)
    if len(walls) != n_b:
        raise ValueError(f"expected {n_b} domain-wall positions, got {len(walls)}")
    m = ell // 2 + 1
    amp = 1.0
    for x in walls:
        if not 1 <= x <= m:
            raise ValueError(f"wall position {x} outside 1..{m}")
        amp *= math.sin(math.pi * x / (m + 1)) / math.sqrt(ell / 4.0 + 1.0)
    return amp


def _path_sets(ell: int) -> list[int]:
    out = []

    def rec(mask: int, v: int):
        if v == ell:
            out.append(mask)
            return
        rec(mask, v + 1)
        if v == 0 or not (mask >> (v - 1)) & 1:
            rec(mask | (1 << v), v + 1)

    rec(0, 0)
    return sorted(out)


class SymmetricStarSpace:
    """Star-graph operators in the branch-permutation-symmetric sector.

    Basis states are (sector, multiset-of-branch-states): sector A has the
    centre absent, sector B present (every branch then avoids its first
    vertex).  One-branch operators T act bosonically,
    <m - e_b + e_a| sum_i T_i |m> = T_ab * sqrt(m_b (m_a + 1)).
    The ground and first-excited states of the full star Hamiltonian lie in
    this sector (non-positive off-diagonals plus permutation symmetry), so
    minimum-gap scans and resolvent work are exact here.
    """

    def __init__(self, n_b: int, ell: int):
        if ell < 2 or ell % 2:
            raise ValueError("ell must be even and >= 2")
        if n_b < 1:
            raise ValueError("n_b must be >= 1")
        self.n_b = n_b
        self.ell = ell
        self.n = n_b * ell + 1
        self.alpha = ell * n_b // 2 + 1
        states = _path_sets(ell)
        self.branch_states = states
        K = len(states)
        index = {s: i for i, s in enumerate(states)}
        self.size = [bin(s).count("1") for s in states]
        self.constrained = [not (s & 1) for s in states]
        v1_empty = [ell < 2 or not (s >> 1) & 1 for s in states]

        # within-branch single flips (a, b): |a> <- |b|
        self.flips: list[tuple[int, int]] = []
        for i, s in enumerate(states):
            for v in range(ell):
                t = s ^ (1 << v)
                j = index.get(t)
                if j is not None and j > i:
                    self.flips.append((i, j))
                    self.flips.append((j, i))
        # within-branch spin exchanges, centre absent and centre present
        self.exchanges_a: list[tuple[int, int]] = []
        self.exchanges_b: list[tuple[int, int]] = []
        for i, s in enumerate(states):
            for u in range(ell):
                if not (s >> u) & 1:
                    continue
                for v in (u - 1, u + 1):
                    if not 0 <= v < ell or (s >> v) & 1:
                        continue
                    t = (s & ~(1 << u)) | (1 << v)
                    j = index.get(t)
                    if j is None:
                        continue
                    self.exchanges_a.append((j, i))
                    if self.constrained[i] and self.constrained[j]:
                        self.exchanges_b.append((j, i))
        self.exch_deg_a = [0] * K
        self.exch_deg_b = [0] * K
        for _, i in self.exchanges_a:
            self.exch_deg_a[i] += 1
        for _, i in self.exchanges_b:
            self.exch_deg_b[i] += 1

        # per-branch free-vertex counts (centre absent / present)
        self.free_a = []
        for s in states:
            f = 0
            for v in range(ell):
                if (s >> v) & 1:
                    continue
                left = v > 0 and (s >> (v - 1)) & 1
                right = v < ell - 1 and (s >> (v + 1)) & 1
                if not (left or right):
                    f += 1
            self.free_a.append(f)
        v0_free = [self.constrained[i] and v1_empty[i] for i in range(K)]
        self.free_b = [self.free_a[i] - (1 if v0_free[i] else 0) for i in range(K)]
        # centre -> first-vertex hop target, defined where the hop lands on
        # an independent set
        self.centre_hop = {i: index[states[i] | 1]
                           for i in range(K) if self.constrained[i] and v1_empty[i]}
        self.v1_empty = v1_empty

        self.basis_a = list(combinations_with_replacement(range(K), n_b))
        con_states = [i for i in range(K) if self.constrained[i]]
        self.basis_b = list(combinations_with_replacement(con_states, n_b))
        self.index_a = {m: i for i, m in enumerate(self.basis_a)}
        off = len(self.basis_a)
        self.index_b = {m: off + i for i, m in enumerate(self.basis_b)}
        self.dim = off + len(self.basis_b)
        self.total_size = np.zeros(self.dim, dtype=np.int64)
        self.sector_b = np.zeros(self.dim, dtype=bool)
        for m, i in self.index_a.items():
            self.total_size[i] = sum(self.size[s] for s in m)
        for m, i in self.index_b.items():
            self.total_size[i] = 1 + sum(self.size[s] for s in m)
            self.sector_b[i] = True

    @staticmethod
    def _counts(m) -> dict:
        c: dict[int, int] = {}
        for s in m:
            c[s] = c.get(s, 0) + 1
        return c

    def _accumulate_one_branch(self, pairs, basis, index, sink, coef):
        """sum_i T_i for off-diagonal one-branch transitions (a <- b)."""
        by_source: dict[int, list[int]] = {}
        for a, b in pairs:
            by_source.setdefault(b, []).append(a)
        for m in basis:
            i = index[m]
            counts = self._counts(m)
            for b, cnt in counts.items():
                for a in by_source.get(b, ()):
                    m2 = list(m)
                    m2.remove(b)
                    m2.append(a)
                    j = index[tuple(sorted(m2))]
                    amp = math.sqrt(cnt * (counts.get(a, 0) + 1))
                    sink(j, i, coef * amp)

    def _centre_exchange(self, sink, coef):
        """Centre occupation hops onto a branch's first vertex (B -> A) and
        back; valid only when every other branch stays constrained, which
        the sector-B support already guarantees."""
        for m in self.basis_b:
            i = self.index_b[m]
            counts = self._counts(m)
            for b, cnt in counts.items():
                a = self.centre_hop.get(b)
                if a is None:
                    continue
                m2 = list(m)
                m2.remove(b)
                m2.append(a)
                m2 = tuple(sorted(m2))
                j = self.index_a[m2]
                amp = math.sqrt(cnt * self._counts(m2)[a])
                sink(j, i, coef * amp)
                sink(i, j, coef * amp)

    def _centre_flip(self, sink, coef):
        for m in self.basis_b:
            i, j = self.index_a[m], self.index_b[m]
            sink(i, j, coef)
            sink(j, i, coef)

    def drive_matrix(self) -> scipy.sparse.csr_matrix:
        """Single-spin-flip generator (matrix elements 1 per allowed flip)."""
        rows, cols, vals = [], [], []
        sink = lambda r, c, v: (rows.append(r), cols.append(c), vals.append(v))
        self._accumulate_one_branch(self.flips, self.basis_a, self.index_a, sink, 1.0)
        flips_b = [(a, b) for a, b in self.flips
                   if self.constrained[a] and self.constrained[b]]
        self._accumulate_one_branch(flips_b, self.basis_b, self.index_b, sink, 1.0)
        self._centre_flip(sink, 1.0)
        return scipy.sparse.csr_matrix((vals, (rows, cols)),
                                       shape=(self.dim, self.dim))

    def spin_exchange_matrix(self) -> scipy.sparse.csr_matrix:
        rows, cols, vals = [], [], []
        sink = lambda r, c, v: (rows.append(r), cols.append(c), vals.append(v))
        self._accumulate_one_branch(self.exchanges_a, self.basis_a, self.index_a,
                                    sink, 1.0)
        self._accumulate_one_branch(self.exchanges_b, self.basis_b, self.index_b,
                                    sink, 1.0)
        self._centre_exchange(sink, 1.0)
        return scipy.sparse.csr_matrix((vals, (rows, cols)),
                                       shape=(self.dim, self.dim))

    def exchange_degree_diag(self) -> np.ndarray:
        """Configuration-graph degree of each basis state (possible spin
        exchanges, including hops on or off the centre)."""
        diag = np.zeros(self.dim)
        for m, i in self.index_a.items():
            d = sum(self.exch_deg_a[s] for s in m)
            if sum(0 if self.constrained[s] else 1 for s in m) == 1:
                d += 1  # the unique occupied first vertex may hop onto the centre
            diag[i] = d
        for m, i in self.index_b.items():
            d = sum(self.exch_deg_b[s] for s in m)
            d += sum(1 for s in m if s in self.centre_hop)
            diag[i] = d
        return diag

    def free_vertex_diag(self) -> np.ndarray:
        diag = np.zeros(self.dim)
        for m, i in self.index_a.items():
            f = sum(self.free_a[s] for s in m)
            if all(self.constrained[s] for s in m):
                f += 1  # the centre itself is free
            diag[i] = f
        for m, i in self.index_b.items():
            diag[i] = sum(self.free_b[s] for s in m)
        return diag

    def laplacian_matrix(self) -> scipy.sparse.csr_matrix:
        return (scipy.sparse.diags(self.exchange_degree_diag())
                - self.spin_exchange_matrix()).tocsr()

    def hamiltonian(self, omega: float, delta: float,
                    lam: float = 0.0) -> scipy.sparse.csr_matrix:
        """H = H_cost - H_drive + lam * H_laplacian in the symmetric sector."""
        H = scipy.sparse.diags(-delta * self.total_size.astype(float))
        H = H - omega * self.drive_matrix()
        if lam:
            H = H + lam * self.laplacian_matrix()
        return H.tocsr()

    def manifold_indices(self, b: int) -> np.ndarray:
        return np.where(self.total_size == b)[0]

    def perturbation_block(self, b: int) -> tuple[np.ndarray, np.ndarray]:
        """Dense (H_se - H_fv) block on the size-b manifold.

        The second-order effective Hamiltonian within a manifold is
        -(Omega^2/delta) (H_se + b - H_fv) up to the uniform shift, so its
        ground state is this block's maximal eigenvector.
        """
        sel = self.manifold_indices(b)
        pos = {int(g): k for k, g in enumerate(sel)}
        nd = len(sel)
        block = np.zeros((nd, nd))

        def sink(r, c, v):
            if r in pos and c in pos:
                block[pos[r], pos[c]] += v

        self._accumulate_one_branch(self.exchanges_a, self.basis_a,
                                    self.index_a, sink, 1.0)
        self._accumulate_one_branch(self.exchanges_b, self.basis_b,
                                    self.index_b, sink, 1.0)
        self._centre_exchange(sink, 1.0)
        fv = self.free_vertex_diag()
        for g, k in pos.items():
            block[k, k] -= fv[g]
        return sel, block

    def permutation_multiplicity(self, i: int) -> int:
        """Number of distinct branch arrangements collapsed into basis
        state i (the multinomial coefficient of its multiset)."""
        m = self.basis_b[i - len(self.basis_a)] if self.sector_b[i] \
            else self.basis_a[i]
        total = math.factorial(self.n_b)
        for cnt in self._counts(m).values():
            total //= math.factorial(cnt)
        return total

    def uniform_state(self, b: int) -> np.ndarray:
        """The normalized uniform superposition of all size-b independent
        sets, expressed in the symmetric basis."""
        sel = self.manifold_indices(b)
        vec = np.zeros(self.dim)
        for i in sel:
            vec[i] = math.sqrt(self.permutation_multiplicity(int(i)))
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError(f"empty manifold b={b}")
        return vec / norm

    def maximum_state(self) -> np.ndarray:
        """The unique maximum independent set as a symmetric basis vector."""
        vec = np.zeros(self.dim)
        sel = self.manifold_indices(self.alpha)
        if len(sel) != 1:
            raise RuntimeError("star maximum independent set should be unique")
        vec[sel[0]] = 1.0
        return vec

    def product_wall_state(self) -> np.ndarray:
        """The sine-product domain-wall state in the symmetric basis."""
        m = self.ell // 2 + 1
        # branch states with a single domain wall: centre-absent sets of
        # size ell/2; wall position x means first vertex occupied iff x > 1
        vec = np.zeros(self.dim)
        wall_amp = {}
        for i, s in enumerate(self.branch_states):
            if self.size[i] != self.ell // 2:
                continue
            # wall coordinate: x = 1 for the state reachable from the maximum
            # set by flipping the centre (first branch vertex empty), growing
            # by one per occupied odd-numbered site as the wall moves outward
            x = 1 + sum((s >> v) & 1 for v in range(0, self.ell, 2))
            wall_amp[i] = math.sin(math.pi * x / (m + 1)) / math.sqrt(
                self.ell / 4.0 + 1.0)
        for mset, idx in self.index_a.items():
            if any(s not in wall_amp for s in mset):
                continue
            amp = 1.0
            for s in mset:
                amp *= wall_amp[s]
            vec[idx] = amp * math.sqrt(self.permutation_multiplicity(idx))
        return vec
