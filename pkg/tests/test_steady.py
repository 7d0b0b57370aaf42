import numpy as np
import pytest
import scipy.linalg as la

from ddicool.geometry import build_line, build_single, coupling_matrices
from ddicool.hilbert import HilbertLayout, phonon_number
from ddicool.liouvillian import ModelParams, build_liouvillian, layout_for, vec
from ddicool.steady import (
    DegenerateSteadyStateError,
    InvariantViolation,
    SteadyResult,
    cooling_ratio,
    evolve,
    phonon_occupation,
    steady_state,
)

#: single atom at Delta = -nu, Gamma = 0.1 nu, eta*Omega = 0.04 nu, n_cut = 1;
#: frozen from an independent dense prototype solver
N_SINGLE_REFERENCE = 8.236409923627896e-04


def solve(config, n_cut=1, **kw):
    params = ModelParams.target_driven(config.n_atoms, gamma=0.1, delta=-1.0, n_cut=n_cut, **kw)
    layout = layout_for(params)
    L = build_liouvillian(layout, params, coupling_matrices(config, 0.1))
    return L, layout


def oracle_null_state(L):
    """Eigenvector of the eigenvalue nearest zero, normalized to unit trace."""
    w, v = la.eig(L.toarray())
    k = np.argmin(np.abs(w))
    d = int(round(np.sqrt(L.shape[0])))
    rho = v[:, k].reshape(d, d, order="F")
    return rho / np.trace(rho)


def test_pure_decay_relaxes_to_ground():
    params = ModelParams(eta_omega=(0.0,), gamma=0.1)
    layout = HilbertLayout(1, ())
    L = build_liouvillian(layout, params, coupling_matrices(build_single(), 0.1))
    res = steady_state(L, layout)
    assert np.allclose(res.rho, [[1, 0], [0, 0]], atol=1e-12)
    assert res.n_target is None


def test_single_atom_reference_value():
    L, layout = solve(build_single())
    res = steady_state(L, layout)
    assert res.n_target == pytest.approx(N_SINGLE_REFERENCE, rel=1e-9)
    oracle = oracle_null_state(L)
    n_oracle = np.trace(phonon_number(layout, 0).toarray() @ oracle).real
    assert res.n_target == pytest.approx(n_oracle, rel=1e-8)
    assert res.residual < 1e-10
    assert res.nullity_gap > 1e6


def test_two_atom_ratio_at_magic(s_m):
    L, layout = solve(build_line(2, s_m))
    res = steady_state(L, layout)
    assert res.n_target / N_SINGLE_REFERENCE == pytest.approx(0.95, abs=0.01)
    oracle = oracle_null_state(L)
    assert np.allclose(res.rho, oracle, atol=1e-10)


def test_solvers_agree(s_m):
    L, layout = solve(build_line(2, s_m))
    a = steady_state(L, layout, method="svd")
    b = steady_state(L, layout, method="trace")
    assert np.max(np.abs(a.rho - b.rho)) < 1e-9
    assert b.nullity_gap > 1e6
    with pytest.raises(ValueError):
        steady_state(L, layout, method="nope")


def test_state_invariants(s_m):
    L, layout = solve(build_line(3, 0.3), n_cut=2)
    res = steady_state(L, layout)
    assert res.hermiticity_error < 1e-10
    assert res.min_eigenvalue > -1e-8
    assert np.trace(res.rho).real == pytest.approx(1.0, abs=1e-12)
    assert res.violations() == []


def test_cutoff_convergence(s_m):
    ns = [steady_state(*solve(build_line(2, s_m), n_cut=nc)).n_target for nc in (1, 2)]
    assert abs(ns[1] - ns[0]) / ns[1] < 0.02


def test_undriven_phonon_is_degenerate():
    # an undriven mode never couples, so any phonon population is stationary
    params = ModelParams(eta_omega=(0.04, 0.0), gamma=0.1)
    layout = HilbertLayout(2, (0, 1))
    L = build_liouvillian(layout, params, coupling_matrices(build_line(2, 0.5), 0.1))
    with pytest.raises(DegenerateSteadyStateError, match="degenerate"):
        steady_state(L, layout)
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(L, layout, method="trace")


def test_zero_drive_is_degenerate():
    params = ModelParams(eta_omega=(0.0,), gamma=0.1)
    layout = HilbertLayout(1, (0,))
    L = build_liouvillian(layout, params, coupling_matrices(build_single(), 0.1))
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(L, layout)


def test_bad_shape():
    with pytest.raises(ValueError):
        steady_state(np.zeros((3, 3)))


def test_phonon_occupation_examples():
    layout = HilbertLayout(1, (0,), 2)
    rho = np.zeros((6, 6))
    rho[2, 2] = 1.0  # |g, 2>
    assert phonon_occupation(rho, layout, 0) == pytest.approx(2.0)
    rho = np.eye(6) / 6
    assert phonon_occupation(rho, layout, 0) == pytest.approx(1.0)
    bad = np.zeros((6, 6), dtype=complex)
    bad[1, 1] = 1j
    with pytest.raises(InvariantViolation):
        phonon_occupation(bad, layout, 0)


def _result(n):
    return SteadyResult(np.eye(1), n, 0.0, np.inf)


def test_cooling_ratio_examples():
    assert cooling_ratio(_result(2e-3), _result(1e-3)) == pytest.approx(2.0)
    assert cooling_ratio(_result(1e-3), _result(1e-3)) == 1.0
    with pytest.raises(ValueError):
        cooling_ratio(_result(1e-3), _result(1e-16))
    with pytest.raises(ValueError):
        cooling_ratio(_result(None), _result(1e-3))


def test_far_pair_ratio_is_unity():
    res = steady_state(*solve(build_line(2, 50.0)))
    single = steady_state(*solve(build_single()))
    assert abs(cooling_ratio(res, single) - 1.0) < 1e-3


def test_evolve():
    L, layout = solve(build_single())
    ground = np.zeros((4, 4), dtype=complex)
    ground[0, 0] = 1
    assert np.array_equal(evolve(L, ground, 0.0), ground)
    with pytest.raises(ValueError):
        evolve(L, ground, -1.0)
    rho_ss = steady_state(L, layout).rho
    assert np.allclose(evolve(L, rho_ss, 100.0), rho_ss, atol=1e-10)
    start = np.zeros((4, 4), dtype=complex)
    start[1, 1] = 1  # one phonon, ground spin
    late = evolve(L, start, 1e5)
    assert np.allclose(late, rho_ss, atol=1e-8)
    assert np.linalg.norm(L @ vec(late)) < 1e-9
