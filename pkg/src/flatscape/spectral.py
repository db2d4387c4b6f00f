"""Hamiltonians on the independent-set-restricted space, low-lying spectra,
minimum-gap scans, and the effective-two-level (resolvent) gap machinery.

Conventions: the assembled operator is H = H_cost - H_drive + lam * H_lap
with H_cost diagonal (-delta per occupied vertex, plus U per violated edge
in penalty mode), drive entries Omega between configurations one spin flip
apart, and H_lap the configuration-graph Laplacian acting within each
fixed-size manifold.  Fixing delta = 1 and scanning the drive-to-detuning
ratio is the usual workflow; all coefficients stay explicit so any scale
convention can be expressed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .bits import enumerate_independent_sets, popcount, spin_exchange_targets
from .errors import CapacityError, ConfigError, ConvergenceError
from .graphs import Graph

DENSE_EIG_LIMIT = 2048
DEFAULT_NNZ_LIMIT = 2_000_000
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEGENERACY_RTOL = 1e-8


def restricted_basis(graph: Graph) -> list[int]:
    """All independent sets ordered by (size, mask)."""
    sets = enumerate_independent_sets(graph.n, graph.adjacency())
    return sorted(sets, key=lambda z: (popcount(z), z))


def manifold_basis(graph: Graph, b: int) -> list[int]:
    return [z for z in restricted_basis(graph) if popcount(z) == b]


def drive_matrix(graph: Graph, basis: list[int]) -> scipy.sparse.csr_matrix:
    """Single-spin-flip generator: unit entries between basis states one
    flip apart."""
    index = {z: i for i, z in enumerate(basis)}
    rows, cols = [], []
    for i, z in enumerate(basis):
        for v in range(graph.n):
            j = index.get(z ^ (1 << v))
            if j is not None:
                rows.append(i)
                cols.append(j)
    vals = np.ones(len(rows))
    return scipy.sparse.csr_matrix((vals, (rows, cols)),
                                   shape=(len(basis), len(basis)))


def spin_exchange_matrix(graph: Graph, basis: list[int]) -> scipy.sparse.csr_matrix:
    """Unit entries between independent sets related by moving one occupied
    vertex to an unoccupied neighbour."""
    adj = graph.adjacency()
    index = {z: i for i, z in enumerate(basis)}
    rows, cols = [], []
    for i, z in enumerate(basis):
        for t in spin_exchange_targets(z, adj):
            j = index.get(t)
            if j is not None:
                rows.append(i)
                cols.append(j)
    vals = np.ones(len(rows))
    return scipy.sparse.csr_matrix((vals, (rows, cols)),
                                   shape=(len(basis), len(basis)))


def exchange_degree_diag(graph: Graph, basis: list[int]) -> np.ndarray:
    adj = graph.adjacency()
    return np.array([float(len(spin_exchange_targets(z, adj))) for z in basis])


def free_vertex_diag(graph: Graph, basis: list[int]) -> np.ndarray:
    """Per-configuration count of vertices addable without a violation."""
    adj = graph.adjacency()
    out = np.zeros(len(basis))
    for i, z in enumerate(basis):
        free = 0
        for v in range(graph.n):
            if not (z >> v) & 1 and not (adj[v] & z):
                free += 1
        out[i] = free
    return out


def laplacian_matrix(graph: Graph, basis: list[int]) -> scipy.sparse.csr_matrix:
    """Configuration-graph Laplacian (degree diagonal minus exchange
    adjacency); block diagonal over fixed-size manifolds."""
    return (scipy.sparse.diags(exchange_degree_diag(graph, basis))
            - spin_exchange_matrix(graph, basis)).tocsr()


def violation_count(graph: Graph, mask: int) -> int:
    return sum(1 for u, v in graph.edges if (mask >> u) & 1 and (mask >> v) & 1)


@dataclass
class OperatorHandle:
    """A sparse symmetric operator on an explicit configuration basis."""

    basis: list[int]
    matrix: scipy.sparse.csr_matrix
    coefficients: dict
    mode: str
    manifold: int | None
    graph: Graph
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {z: i for i, z in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def sizes(self) -> np.ndarray:
        return np.array([popcount(z) for z in self.basis])

    def term_matrix(self, name: str):
        """Named generator on this operator's basis (unit coefficients)."""
        if name == "cost":
            diag = -self.sizes().astype(float)
            if self.mode == "penalty":
                U = self.coefficients["U"]
                diag = diag + np.array(
                    [U * violation_count(self.graph, z) for z in self.basis])
            return scipy.sparse.diags(diag).tocsr()
        if name == "drive":
            return drive_matrix(self.graph, self.basis)
        if name == "spin_exchange":
            return spin_exchange_matrix(self.graph, self.basis)
        if name == "free_vertex":
            return scipy.sparse.diags(free_vertex_diag(self.graph, self.basis)).tocsr()
        if name == "laplacian":
            return laplacian_matrix(self.graph, self.basis)
        raise ValueError(f"unknown term {name!r}")


def build_operator(graph: Graph, omega: float, delta: float, lam: float = 0.0,
                   U: float | None = None, mode: str = "restricted",
                   manifold: int | None = None,
                   nnz_limit: int = DEFAULT_NNZ_LIMIT) -> OperatorHandle:
    """Assemble H = H_cost - Omega*H_drive + lam*H_laplacian.

    mode "restricted" keeps only independent sets (infinite-penalty limit);
    "penalty" uses all 2^n configurations and requires U.  With ``manifold``
    set, only that fixed-size block is built.
    """
    if mode not in ("restricted", "penalty"):
        raise ConfigError(f"unknown mode {mode!r}")
    if mode == "penalty":
        if U is None:
            raise ConfigError("penalty mode requires an explicit U")
        if manifold is not None:
            raise ConfigError("manifold blocks are defined in restricted mode")
        if lam:
            raise ConfigError("the configuration-graph Laplacian is defined "
                              "on independent sets; use restricted mode")
        if graph.n > 24:
            raise CapacityError(f"penalty mode enumerates 2^n; n={graph.n} > 24")
        basis = list(range(1 << graph.n))
    elif manifold is not None:
        basis = manifold_basis(graph, manifold)
    else:
        basis = restricted_basis(graph)
    dim = len(basis)
    # generous upfront estimate: flips + exchanges per row
    est_nnz = dim * (graph.n + 2)
    if est_nnz > nnz_limit:
        raise CapacityError(
            f"operator would need ~{est_nnz} nonzeros, over the {nnz_limit} limit")
    sizes = np.array([popcount(z) for z in basis], dtype=float)
    diag = -delta * sizes
    if mode == "penalty":
        diag = diag + np.array(
            [U * violation_count(graph, z) for z in basis], dtype=float)
    H = scipy.sparse.diags(diag).tocsr()
    if omega:
        H = H - omega * drive_matrix(graph, basis)
    if lam:
        H = H + lam * laplacian_matrix(graph, basis)
    handle = OperatorHandle(
        basis=basis, matrix=H.tocsr(),
        coefficients={"omega": omega, "delta": delta, "lam": lam, "U": U},
        mode=mode, manifold=manifold, graph=graph)
    return handle


def _as_matrix(op):
    return op.matrix if isinstance(op, OperatorHandle) else op


def operator_norm_bound(H) -> float:
    """Infinity norm of the sparse matrix: cheap upper bound on ||H||."""
    return float(np.max(np.abs(H).sum(axis=1)))


def lowest_eigenpairs(op, count: int = 2, residual_rtol: float = 1e-9):
    """The ``count`` algebraically smallest eigenpairs.

    Dense below DENSE_EIG_LIMIT, Lanczos above; every returned pair is
    residual-checked against ||H v - E v|| <= residual_rtol * ||H||.
    """
    H = _as_matrix(op)
    dim = H.shape[0]
    count = min(count, dim)
    if dim <= DENSE_EIG_LIMIT:
        w, v = scipy.linalg.eigh(H.toarray(), subset_by_index=(0, count - 1))
        return w, v
    scale = operator_norm_bound(H)
    last_residuals = None
    for attempt, (ncv, maxiter) in enumerate(
            ((max(32, 4 * count), 2000), (max(64, 8 * count), 20000))):
        try:
            w, v = scipy.sparse.linalg.eigsh(
                H, k=count, which="SA", ncv=min(dim - 1, ncv), maxiter=maxiter)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            last_residuals = getattr(exc, "eigenvalues", None)
            continue
        order = np.argsort(w)
        w, v = w[order], v[:, order]
        residuals = [float(np.linalg.norm(H @ v[:, i] - w[i] * v[:, i]))
                     for i in range(count)]
        last_residuals = residuals
        if all(r <= residual_rtol * scale for r in residuals):
            return w, v
    raise ConvergenceError(
        f"Lanczos failed to reach residual {residual_rtol:.1e} * ||H||",
        residuals=last_residuals)


def lowest_eigenvalues(op, count: int = 2) -> np.ndarray:
    w, _ = lowest_eigenpairs(op, count)
    return w


@dataclass
class GapReport:
    """Minimum gap, crossing location and resolvent estimates for one scan."""

    gap: float | None = None
    delta_star: float | None = None
    crossing: float | None = None            # (Omega/delta)*
    e_star: float | None = None
    boundary_minimum: bool = False
    curve: list = field(default_factory=list)  # (delta, gap) samples
    tilde_gap: float | None = None
    corrected_gap: float | None = None
    slopes: dict = field(default_factory=dict)
    validity: float | None = None
    degenerate: bool = False
    method: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        def enc(x):
            if x is None:
                return None
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            return x
        return {
            "version": 1,
            "kind": "gap_report",
            "gap": enc(self.gap),
            "delta_star": enc(self.delta_star),
            "crossing": enc(self.crossing),
            "e_star": enc(self.e_star),
            "boundary_minimum": self.boundary_minimum,
            "tilde_gap": enc(self.tilde_gap),
            "corrected_gap": enc(self.corrected_gap),
            "slopes": self.slopes,
            "validity": enc(self.validity),
            "degenerate": self.degenerate,
            "method": self.method,
            "curve": [[float(d), float(g)] for d, g in self.curve],
        }


def _golden_minimize(fn, a, b, rel_tol):
    """Golden-section minimization of a scalar function on [a, b]."""
    c1 = b - GOLDEN * (b - a)
    c2 = a + GOLDEN * (b - a)
    f1, f2 = fn(c1), fn(c2)
    while (b - a) > rel_tol * max(1.0, abs(a), abs(b)):
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - GOLDEN * (b - a)
            f1 = fn(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + GOLDEN * (b - a)
            f2 = fn(c2)
    mid = 0.5 * (a + b)
    return mid, fn(mid)


def scan_minimum_gap(factory, deltas, rel_tol: float = 1e-6,
                     eig_count: int = 2):
    """Coarse scan of gap(delta) with golden-section refinement around every
    interior local minimum.

    ``factory(delta)`` must yield the operator (or matrix) at that scan
    point.  The avoided-crossing dip can be narrower than the grid spacing,
    so every interior local minimum of the coarse curve is refined and the
    best refined value wins; the report keeps the coarse curve.
    """
    deltas = np.asarray(list(deltas), dtype=float)
    if len(deltas) < 3:
        raise ValueError("scan grid needs at least 3 points")

    def gap_at(d):
        w = lowest_eigenvalues(factory(d), eig_count)
        return float(w[1] - w[0])

    def ground_at(d):
        w = lowest_eigenvalues(factory(d), eig_count)
        return float(w[0])

    gaps = np.array([gap_at(d) for d in deltas])
    curve = list(zip(deltas.tolist(), gaps.tolist()))
    interior = [k for k in range(1, len(deltas) - 1)
                if gaps[k] <= gaps[k - 1] and gaps[k] <= gaps[k + 1]]
    report = GapReport(curve=curve)
    # refine every interior dip (avoided crossings can be narrower than the
    # grid spacing), then let the boundary compete with the refined values
    best_gap, best_delta = math.inf, None
    for k in interior:
        d_min, g_min = _golden_minimize(gap_at, deltas[k - 1], deltas[k + 1],
                                        rel_tol)
        if g_min < best_gap:
            best_gap, best_delta = g_min, d_min
    edge = int(np.argmin([gaps[0], gaps[-1]]))
    edge_gap = float(gaps[0] if edge == 0 else gaps[-1])
    edge_delta = float(deltas[0] if edge == 0 else deltas[-1])
    if edge_gap < best_gap:
        report.boundary_minimum = True
        report.gap, report.delta_star = edge_gap, edge_delta
    else:
        report.gap, report.delta_star = best_gap, best_delta
    report.e_star = ground_at(report.delta_star)
    return report


def min_gap_scan(graph: Graph, omega: float = 1.0, lam: float = 0.0,
                 delta_range: tuple[float, float] = (0.1, 6.0),
                 points: int = 64, rel_tol: float = 1e-6,
                 nnz_limit: int = DEFAULT_NNZ_LIMIT) -> GapReport:
    """Minimum-gap scan over the detuning at fixed drive for the (possibly
    Laplacian-modified) Hamiltonian on the restricted space."""
    base = build_operator(graph, omega, 0.0, lam, nnz_limit=nnz_limit)
    sizes = base.sizes().astype(float)

    def factory(d):
        return base.matrix + scipy.sparse.diags(-d * sizes)

    grid = np.linspace(delta_range[0], delta_range[1], points)
    report = scan_minimum_gap(factory, grid, rel_tol)
    if report.delta_star is not None and report.delta_star != 0.0:
        report.crossing = omega / report.delta_star
    report.method = {"omega": omega, "lam": lam, "points": points,
                     "delta_range": list(delta_range), "basis": "restricted",
                     "dim": base.dim}
    return report


@dataclass
class PerturbativeStates:
    """Leading-order crossing states and second-order crossing estimates."""

    ground: np.ndarray          # amplitudes on the alpha manifold
    ground_basis: list[int]
    excited: np.ndarray         # amplitudes on the crossing manifold
    excited_basis: list[int]
    b_excited: int
    alpha: int
    crossing: float             # predicted (Omega/delta)*
    e_star: float               # predicted ground energy at the crossing
    exchange_expectations: dict
    condition_ratio: float      # LHS/RHS of the perturbative-regime check
    degenerate: bool


def _manifold_ground(graph: Graph, b: int):
    """Ground state of the second-order Hamiltonian within one manifold:
    the maximal eigenvector of (H_se - H_fv)."""
    basis = manifold_basis(graph, b)
    dim = len(basis)
    if dim == 0:
        return basis, None, 0.0, 0.0, False
    if dim == 1:
        vec = np.ones(1)
        fv = free_vertex_diag(graph, basis)
        return basis, vec, 0.0, float(fv[0]), False
    block = (spin_exchange_matrix(graph, basis)
             - scipy.sparse.diags(free_vertex_diag(graph, basis))).toarray()
    w, v = scipy.linalg.eigh(block)
    vec = v[:, -1]
    if vec.sum() < 0:
        vec = -vec
    spread = abs(w[-1]) + abs(w[0])
    degenerate = dim > 1 and abs(w[-1] - w[-2]) < DEGENERACY_RTOL * max(spread, 1.0)
    se = float(vec @ (spin_exchange_matrix(graph, basis) @ vec))
    fv = float(vec @ (free_vertex_diag(graph, basis) * vec))
    return basis, vec, se, fv, degenerate


def perturbative_states(graph: Graph, alpha: int | None = None,
                        candidates: int = 4) -> PerturbativeStates:
    """Identify the crossing pair: the alpha-manifold ground state and the
    manifold whose second-order energy first intersects it.

    The crossing location solves
    (Omega/delta)^2 = (alpha - b) / (<E|Hse|E> - <G|Hse|G> - <E|Hfv|E> - alpha + b)
    and the perturbative-regime condition compares the exchange-expectation
    difference against 3 (alpha - b).
    """
    if alpha is None:
        sizes = [popcount(z) for z in restricted_basis(graph)]
        alpha = max(sizes)
    g_basis, g_vec, g_se, _, g_degen = _manifold_ground(graph, alpha)
    best = None
    for b in range(alpha - 1, max(alpha - 1 - candidates, 0), -1):
        e_basis, e_vec, e_se, e_fv, e_degen = _manifold_ground(graph, b)
        if e_vec is None:
            continue
        denom = e_se - g_se - e_fv - (alpha - b)
        if denom <= 0:
            continue
        ratio2 = (alpha - b) / denom
        crossing = math.sqrt(ratio2)
        if best is None or crossing < best["crossing"]:
            best = {"b": b, "basis": e_basis, "vec": e_vec, "se": e_se,
                    "fv": e_fv, "crossing": crossing, "degenerate": e_degen}
    if best is None:
        raise ConvergenceError("no manifold produces a finite positive crossing")
    b = best["b"]
    cond = ((best["se"] - g_se) / (3.0 * (alpha - b))
            if alpha > b else math.inf)
    e_star = -alpha - best["crossing"] ** 2 * (alpha + g_se)  # units of delta
    return PerturbativeStates(
        ground=g_vec, ground_basis=g_basis,
        excited=best["vec"], excited_basis=best["basis"],
        b_excited=b, alpha=alpha, crossing=best["crossing"], e_star=e_star,
        exchange_expectations={"ground_se": g_se, "excited_se": best["se"],
                               "excited_fv": best["fv"]},
        condition_ratio=cond,
        degenerate=g_degen or best["degenerate"],
    )


def embed_state(basis: list[int], sub_basis: list[int],
                amplitudes: np.ndarray) -> np.ndarray:
    """Lift a manifold state into a full-basis vector."""
    index = {z: i for i, z in enumerate(basis)}
    vec = np.zeros(len(basis))
    for z, a in zip(sub_basis, amplitudes):
        vec[index[z]] = a
    return vec


def _heff_entries(H, G: np.ndarray, E: np.ndarray, z: float,
                  dense: bool, solve_tol: float):
    """2x2 effective-Hamiltonian entries at energy z:
    <a| H |b> + <a| H Q (z - QHQ)^{-1} Q H |b> for a, b in {G, E}."""
    def project_out(x):
        return x - G * (G @ x) - E * (E @ x)

    out = {}
    ys = {}
    for name, vb in (("G", G), ("E", E)):
        rhs = project_out(H @ vb)
        if dense:
            dimension = H.shape[0]
            Hd = H.toarray() if scipy.sparse.issparse(H) else H
            P = np.outer(G, G) + np.outer(E, E)
            Q = np.eye(dimension) - P
            A = z * np.eye(dimension) - Q @ Hd @ Q
            y = scipy.linalg.solve(A, rhs, assume_a="sym")
        else:
            dim = H.shape[0]

            # acts as (z - QHQ) on the Q subspace and as the identity on the
            # P block, so MINRES stays well-posed; rhs lives in Q already
            def av(x):
                qx = project_out(x)
                return z * qx - project_out(H @ qx) + (x - qx)

            linop = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=av)
            y, info = scipy.sparse.linalg.minres(linop, rhs, rtol=solve_tol,
                                                 maxiter=40 * dim)
            if info != 0:
                ritz = scipy.sparse.linalg.eigsh(
                    linop, k=1, which="SA", return_eigenvectors=False,
                    maxiter=2000, tol=1e-6)
                raise ConvergenceError(
                    "resolvent solve did not converge; smallest Ritz value of "
                    f"(z - QHQ) is {float(ritz[0]):.3e} (pole proximity)",
                    residuals=[float(ritz[0])])
            y = project_out(y)
        ys[name] = y
    HG, HE = H @ G, H @ E
    out["GG"] = float(G @ HG + (HG) @ ys["G"])
    out["GE"] = float(G @ HE + (HG) @ ys["E"])
    out["EG"] = float(E @ HG + (HE) @ ys["G"])
    out["EE"] = float(E @ HE + (HE) @ ys["E"])
    return out


def _heff_series(H_cost_diag: np.ndarray, drive, G: np.ndarray, E: np.ndarray,
                 z: float, omega: float, order: int):
    """Truncated expansion of the effective coupling in powers of the drive,
    using the bare diagonal resolvent Q/(z - H_cost).

    Assumes a restricted-basis, unmodified operator whose diagonal is the
    cost term alone (constant within manifolds), so the diagonal resolvent
    commutes with projecting out the crossing states.
    """
    def project_out(x):
        return x - G * (G @ x) - E * (E @ x)

    denom = z - H_cost_diag
    pole = np.abs(denom) < 1e-12 * max(1.0, abs(z))

    def apply_resolvent(x):
        qx = project_out(x)
        # components exactly removed by the projector may sit on a pole;
        # anything else there is a genuine divergence
        if np.any(pole & (np.abs(qx) > 1e-10 * max(np.abs(x).max(), 1e-30))):
            raise ConvergenceError("series resolvent hits a pole of z - H_cost")
        out = np.zeros_like(qx)
        np.divide(qx, denom, out=out, where=~pole)
        return out

    total = {"GG": 0.0, "GE": 0.0, "EG": 0.0, "EE": 0.0}
    # term j applies (-omega * drive) then j resolvent insertions; j = 0
    # reproduces the bare coupling between the states
    for name_b, vb in (("G", G), ("E", E)):
        x = -omega * (drive @ vb)
        acc = x.copy()
        for _ in range(order):
            x = -omega * (drive @ apply_resolvent(x))
            acc += x
        total["G" + name_b] = float(G @ acc)
        total["E" + name_b] = float(E @ acc)
    total["GG"] += float(G @ (H_cost_diag * G))
    total["EE"] += float(E @ (H_cost_diag * E))
    return total


def resolvent_gap(H, G: np.ndarray, E: np.ndarray, z0: float,
                  order: int | None = None, omega: float | None = None,
                  h_rel: float = 1e-4, dense_limit: int = 4096,
                  solve_tol: float = 1e-10,
                  exact_pairs=None) -> GapReport:
    """Effective-two-level gap estimates at the crossing.

    Returns tilde (twice the off-diagonal coupling at z0), the corrected gap
    tilde / sqrt(f_gg * f_ee) with f = 1 - d<Heff>/dz, the finite-difference
    slopes, and, when ``exact_pairs`` (eigenvectors psi0, psi1 and the exact
    gap) are supplied, the overlap-area validity diagnostic.

    ``order`` switches to the truncated series in powers of the drive; the
    default solves (z - QHQ) exactly.
    """
    H = _as_matrix(H)
    norm_g, norm_e = np.linalg.norm(G), np.linalg.norm(E)
    G = G / norm_g
    E = E / norm_e
    if abs(float(G @ E)) > 1e-10:
        raise ValueError("crossing states must be orthogonal")
    dense = H.shape[0] <= dense_limit

    if order is not None:
        if omega is None:
            raise ConfigError("series mode needs the drive coefficient omega")
        diag = np.asarray(H.diagonal()).ravel()
        drive = -(H - scipy.sparse.diags(diag)) / omega

        def entries(z):
            return _heff_series(diag, drive, G, E, z, omega, order)
    else:
        def entries(z):
            return _heff_entries(H, G, E, z, dense, solve_tol)

    ent0 = entries(z0)
    tilde = 2.0 * abs(ent0["GE"])
    h = h_rel * max(abs(z0), 1.0)

    def slopes_at(step):
        ep = entries(z0 + step)
        em = entries(z0 - step)
        return {key: (ep[key] - em[key]) / (2.0 * step)
                for key in ("GG", "EE", "GE")}

    s_h = slopes_at(h)
    s_h2 = slopes_at(h / 2.0)
    slopes = {}
    for key in ("GG", "EE", "GE"):
        a, b = s_h[key], s_h2[key]
        if abs(a - b) > 0.01 * max(abs(a), abs(b), 1e-30):
            slopes[key] = (4.0 * b - a) / 3.0  # Richardson fallback
        else:
            slopes[key] = b
    m_gg, m_ee, m_ge = slopes["GG"], slopes["EE"], slopes["GE"]
    f_gg, f_ee = 1.0 - m_gg, 1.0 - m_ee
    corrected = tilde / math.sqrt(f_gg * f_ee)
    report = GapReport(
        tilde_gap=tilde, corrected_gap=corrected,
        slopes={"m_gg": m_gg, "m_ee": m_ee, "m_ge": m_ge,
                "f_gg": f_gg, "f_ee": f_ee},
        method={"z0": z0, "order": order, "dense": dense, "h": h},
    )
    if exact_pairs is not None:
        psi0, psi1, exact_gap = exact_pairs
        area = (float(psi0 @ G) * float(psi1 @ E)
                - float(psi0 @ E) * float(psi1 @ G))
        report.validity = abs(area) ** 2
        report.gap = exact_gap
        report.method["validity_vs_gap"] = (report.validity, exact_gap)
    return report


def hamming_gap_estimate(g_basis: list[int], g_amps: np.ndarray,
                         e_basis: list[int], e_amps: np.ndarray,
                         crossing: float):
    """Low-order coupling estimate from pairwise Hamming distances:
    2 * sum over pairs of crossing^d(z,z') <z|G><z'|E>, plus the
    (distance, population-product) histogram."""
    g_masks = np.asarray(g_basis, dtype=np.int64)
    e_masks = np.asarray(e_basis, dtype=np.int64)
    xor = g_masks[:, None] ^ e_masks[None, :]
    dist = np.zeros(xor.shape, dtype=np.int64)
    work = xor.copy()
    while work.any():
        dist += work & 1
        work >>= 1
    amp_products = np.outer(g_amps, e_amps)
    estimate = 2.0 * float(np.sum(crossing ** dist * amp_products))
    pop_products = np.outer(g_amps ** 2, e_amps ** 2)
    histogram = {}
    for d in np.unique(dist):
        histogram[int(d)] = float(pop_products[dist == d].sum())
    return estimate, histogram
