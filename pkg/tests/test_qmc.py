import math

import numpy as np
import pytest

from oracles import (dense_hamiltonian, gibbs_diagonal, gibbs_distribution,
                     total_variation, trotter_marginal)

from flatscape.errors import CapacityError, ConfigError
from flatscape.graphs import Graph, generate_star
from flatscape.qmc import (QMCConfig, WorldlineEngine, qmc_bound_inputs,
                           qmc_run, trotter_error_proxy,
                           worldline_transition_matrix)
from flatscape.spectral import restricted_basis


def test_config_validation():
    with pytest.raises(ConfigError):
        QMCConfig(slices=1)
    with pytest.raises(ConfigError):
        QMCConfig(site_weight=0.0, segment_weight=0.0)
    with pytest.raises(ConfigError):
        QMCConfig(segment_factor=-1.0)


def test_no_sign_problem_bond_matrix(star22):
    engine = WorldlineEngine(star22, QMCConfig(beta=2.0, slices=16, omega=0.4,
                                               lam=1.0))
    bond = np.exp(engine.log_bond)
    assert (bond >= 0).all()
    assert (np.diag(bond) > 0).all()


def test_worldline_weight_cyclic_invariance(star22):
    config = QMCConfig(beta=1.5, slices=6, omega=0.5, lam=0.5)
    engine = WorldlineEngine(star22, config)
    rng = np.random.default_rng(1)
    for _ in range(20):
        slices = [int(rng.integers(0, len(engine.basis))) for _ in range(6)]
        w0 = engine.log_weight(slices)
        for shift in range(1, 6):
            rotated = slices[shift:] + slices[:shift]
            assert engine.log_weight(rotated) == pytest.approx(w0, abs=1e-12)


def test_detailed_balance_exhaustive_small_worldlines():
    # path on 3 vertices, M = 3 slices: every worldline pair checked
    g = generate_star(1, 2)
    for lam in (0.0, 0.7):
        config = QMCConfig(beta=1.2, slices=3, omega=0.6, lam=lam,
                           site_weight=0.7, segment_weight=0.3)
        P, pi, states = worldline_transition_matrix(g, config)
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
        flow = pi[:, None] * P
        assert np.abs(flow - flow.T).max() <= 1e-12


def test_detailed_balance_two_vertices_m4():
    g = Graph(n=2, edges=((0, 1),))
    config = QMCConfig(beta=2.0, slices=4, omega=0.8, site_weight=0.5,
                       segment_weight=0.5)
    P, pi, states = worldline_transition_matrix(g, config)
    flow = pi[:, None] * P
    assert np.abs(flow - flow.T).max() <= 1e-12


def test_diagonal_limit_reduces_to_classical_gibbs():
    # Omega = lam = 0: only temporal-line moves fire and the slice-1
    # marginal is exactly the classical Gibbs distribution
    g = generate_star(1, 2)
    config = QMCConfig(beta=1.0, slices=8, omega=0.0, lam=0.0, sweeps=20_000,
                       seed=3)
    result = qmc_run(g, config)
    masks, probs = gibbs_distribution(g, 1.0)
    tv = total_variation(result.marginal_probs(), dict(zip(masks, probs)))
    assert tv <= 0.02
    # with no off-diagonal terms a single-slice flip creates a zero-weight
    # bond and can never be accepted
    assert result.acceptance["site"] == 0.0


def test_single_vertex_symmetric_two_level():
    g = Graph(n=1, edges=())
    config = QMCConfig(beta=12.0, slices=64, omega=1.0, delta=0.0,
                       sweeps=4_000, seed=5)
    result = qmc_run(g, config)
    probs = result.marginal_probs()
    assert probs.get(0, 0.0) == pytest.approx(0.5, abs=0.03)
    assert probs.get(1, 0.0) == pytest.approx(0.5, abs=0.03)


def test_marginal_matches_dense_gibbs_star22(star22):
    beta, omega, lam, slices = 2.0, 0.3, 1.0, 64
    config = QMCConfig(beta=beta, slices=slices, omega=omega, delta=1.0,
                       lam=lam, sweeps=8_000, seed=17, burn_in=200)
    result = qmc_run(star22, config)
    basis = restricted_basis(star22)
    H = dense_hamiltonian(star22, basis, omega, 1.0, lam)
    exact = dict(zip(basis, gibbs_diagonal(H, beta)))
    tv = total_variation(result.marginal_probs(), exact)
    assert tv <= 0.05


def test_trotter_convergence_and_proxy(star22):
    basis = restricted_basis(star22)
    H = dense_hamiltonian(star22, basis, 0.3, 1.0, 1.0)
    exact = gibbs_diagonal(H, 2.0)
    tvs = []
    for slices in (8, 16, 32, 64):
        marg = trotter_marginal(H, 2.0, slices)
        tvs.append(0.5 * np.abs(marg - exact).sum())
    assert all(b < a for a, b in zip(tvs, tvs[1:]))  # halves as M doubles
    proxy = trotter_error_proxy(star22, QMCConfig(beta=2.0, slices=32,
                                                  omega=0.3, lam=1.0))
    assert 0.0 < proxy < 1e-3


def test_capacity_error_on_large_restricted_space():
    g = generate_star(4, 6)
    with pytest.raises(CapacityError):
        WorldlineEngine(g, QMCConfig(beta=1.0, slices=4))


def test_emax_uniform_at_infinite_temperature(star22):
    # beta -> 0: populations uniform over the restricted space, so
    # e_max = D_{b-1} / #restricted
    report = qmc_bound_inputs(star22, b=3, omega=0.3, beta=1e-9, lam=0.0)
    restricted = 1 + 5 + 6  # sizes 0..2
    assert report.e_max[3] == pytest.approx(6 / restricted, rel=1e-6)
    assert report.e_max[3] <= 1.0


def test_emax_delocalized_at_large_lambda(star22):
    report = qmc_bound_inputs(star22, b=3, omega=0.3, beta=2.0, lam=50.0)
    assert report.e_max[3] <= 1.1


def test_qmc_bound_reduces_to_pt_local_when_emax_one(star22):
    from flatscape.landscape import classical_bound, independence_polynomial

    report = qmc_bound_inputs(star22, omega=0.3, beta=2.0, lam=50.0, k=1)
    profile = independence_polynomial(star22)
    pt = classical_bound(profile, "pt_local", k_prime=1)
    # with e_max <= 1 the QMC bound is at least the local-update PT bound
    assert report.bound >= pt * 0.999
    manual = max(float(profile.suffix_ratio(b)) / report.e_max[b]
                 for b in report.e_max) * math.log(2.0) / (2 * 5 * 1 * 5)
    assert report.bound == pytest.approx(manual, rel=1e-12)


def test_qmc_run_deterministic(star22):
    config = QMCConfig(beta=1.0, slices=8, omega=0.4, sweeps=500, seed=21)
    a = qmc_run(star22, config)
    b = qmc_run(star22, config)
    assert a.marginal == b.marginal
    assert a.acceptance == b.acceptance


def test_heat_bath_line_matches_exact_conditional():
    """The timeline resampler's draws follow the exact conditional
    distribution (brute-force enumeration over one vertex's timelines)."""
    from itertools import product

    from flatscape.classical_mc import _Uniforms, _stream
    from flatscape.qmc import WorldlineEngine, resample_vertex_line

    g = generate_star(1, 2)  # path on 3 vertices
    config = QMCConfig(beta=1.5, slices=4, omega=0.7, lam=0.4)
    engine = WorldlineEngine(g, config)
    rng_state = [engine.index[0b010], engine.index[0b000],
                 engine.index[0b100], engine.index[0b100]]
    v = 0
    bit = 1 << v
    # brute-force conditional over v's timelines given the rest
    weights = {}
    for occ in product((0, 1), repeat=4):
        cand = []
        ok = True
        for slot, x in enumerate(occ):
            base = engine.basis[rng_state[slot]] & ~bit
            mask = base | (bit if x else 0)
            idx = engine.index.get(mask)
            if idx is None:
                ok = False
                break
            cand.append(idx)
        if ok:
            weights[occ] = math.exp(engine.log_weight(cand))
    total = sum(weights.values())
    exact = {k: w / total for k, w in weights.items()}
    u01 = _Uniforms(_stream(3, 0))
    counts = {}
    draws = 40_000
    for _ in range(draws):
        new = resample_vertex_line(engine, rng_state, v, u01)
        occ = tuple(int(bool(engine.basis[i] & bit)) for i in new)
        counts[occ] = counts.get(occ, 0) + 1
    empirical = {k: c / draws for k, c in counts.items()}
    tv = 0.5 * sum(abs(empirical.get(k, 0.0) - exact.get(k, 0.0))
                   for k in set(empirical) | set(exact))
    assert tv <= 0.01
