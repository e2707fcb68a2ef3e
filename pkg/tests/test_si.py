import numpy as np
import pytest

import oracles
from nare import (
    build_kernel,
    default_shift,
    factors_to_solution,
    inf_norm,
    shifted_coefficients,
    si_init,
    si_shift_init,
    si_shift_step,
    si_shifted_solve,
    si_solution,
    si_solve,
    si_step,
)
from nare.sda import SdaConfig, sda_solve
from nare.shift import make_shift
from nare.si import SiConfig


def test_kernel_scalar_case(prob1):
    kernel = build_kernel(prob1)
    assert kernel.T[0, 0] == 0.25
    assert kernel.P[0, 0] == 0.25
    assert kernel.Qm[0, 0] == 0.25


def test_kernel_column_scaling(prob32):
    kernel = build_kernel(prob32)
    ratio = kernel.P / kernel.T
    assert np.max(np.abs(ratio - prob32.q[None, :])) < 1e-15
    assert np.all(kernel.T > 0) and np.all(kernel.P > 0) and np.all(kernel.Qm > 0)


def test_kernel_transpose_relation(prob8):
    kernel = build_kernel(prob8)
    for i in range(prob8.n):
        for j in range(prob8.n):
            assert kernel.Qm[i, j] == pytest.approx(
                prob8.q[j] * kernel.T[j, i], rel=1e-15)


def test_kernel_entries_scalar_recomputation(prob2):
    kernel = build_kernel(prob2)
    for i in range(2):
        for j in range(2):
            expected = 1.0 / (1.0 / prob2.omegas[i] + 1.0 / prob2.omegas[j])
            assert kernel.T[i, j] == pytest.approx(expected, rel=1e-15)


def test_si_first_iterates(prob1):
    kernel = build_kernel(prob1)
    state = si_init(prob1)
    state = si_step(kernel, state)
    assert state.m[0] == 1.0 and state.n[0] == 1.0
    state = si_step(kernel, state)
    assert state.m[0] == 1.25 and state.n[0] == 1.25
    # monotone and bounded by the fixed point m = 2
    prev = state.m[0]
    for _ in range(200):
        state = si_step(kernel, state)
        assert prev < state.m[0] < 2.0
        prev = state.m[0]


def test_si_critical_symmetry_and_bounds(prob8):
    # in the critical case both kernel factors coincide, so m and n stay
    # bitwise equal; iterates sit between e and the limit vector
    kernel = build_kernel(prob8)
    assert np.array_equal(kernel.P, kernel.Qm)
    spec = default_shift(prob8, "double")
    x_ref = sda_solve(shifted_coefficients(prob8, spec), SdaConfig(tol=1e-14)).x
    m_lim = x_ref @ prob8.q + 1.0
    state = si_init(prob8)
    for _ in range(200):
        state = si_step(kernel, state)
        assert np.array_equal(state.m, state.n)
        assert np.all(state.m >= 1.0)
        assert np.all(state.m <= m_lim * (1 + 1e-12))


def test_si_critical_hits_iteration_cap(prob32):
    sol = si_solve(prob32, SiConfig(max_iter=500))
    assert not sol.converged
    assert sol.iterations == 500


def test_si_noncritical_converges_and_matches_sda(prob_noncrit32):
    sol = si_solve(prob_noncrit32, SiConfig(max_iter=20000))
    assert sol.converged
    ref = sda_solve(prob_noncrit32.quad, SdaConfig(tol=1e-14))
    assert inf_norm(sol.x - ref.x) <= 1e-8 * inf_norm(ref.x)


def test_si_shifted_single_count(prob32):
    sol = si_shifted_solve(prob32, default_shift(prob32, "single"))
    assert sol.converged
    assert 155 <= sol.iterations <= 170
    assert sol.res_final <= 1e-12


def test_si_shifted_double_count(prob32):
    sol = si_shifted_solve(prob32, default_shift(prob32, "double"))
    assert sol.converged
    assert 36 <= sol.iterations <= 44
    assert sol.res_final <= 1e-12


def test_si_single_second_dual_column_vanishes(prob8):
    spec = default_shift(prob8, "single")
    state = si_shift_init(prob8, spec)
    for _ in range(10):
        state = si_shift_step(prob8, spec, state)
        assert np.all(state.N[:, 1] == 0.0)


def test_zero_shift_matches_classic_iteration(prob8):
    spec = make_shift(prob8, 0.0, 0.0, "double", relaxed=True)
    kernel = build_kernel(prob8)
    z_state = si_shift_init(prob8, spec)
    v_state = si_init(prob8)
    for _ in range(25):
        z_state = si_shift_step(prob8, spec, z_state, kernel)
        v_state = si_step(kernel, v_state)
        x_classic = si_solution(kernel, v_state.m, v_state.n)
        assert np.max(np.abs(z_state.Z - x_classic)) < 1e-13


def test_shift_dominance_small(prob8):
    spec0 = make_shift(prob8, 0.0, 0.0, "double", relaxed=True)
    spec1 = default_shift(prob8, "single")
    spec2 = default_shift(prob8, "double")
    s0 = si_shift_init(prob8, spec0)
    s1 = si_shift_init(prob8, spec1)
    s2 = si_shift_init(prob8, spec2)
    kernel = build_kernel(prob8)
    for _ in range(40):
        s0 = si_shift_step(prob8, spec0, s0, kernel)
        s1 = si_shift_step(prob8, spec1, s1, kernel)
        s2 = si_shift_step(prob8, spec2, s2, kernel)
        slack = 1e-13 * max(1.0, inf_norm(s2.Z))
        assert np.min(s1.Z - s0.Z) >= -slack
        assert np.min(s2.Z - s1.Z) >= -slack


def test_monotone_increase_random_admissible_shifts(prob8, rng):
    # strict entrywise growth holds for every admissible shift, not just
    # the default one
    from nare.shift import omega_lower_bound

    om1 = float(prob8.omegas[0])
    kernel = build_kernel(prob8)
    for _ in range(4):
        eta = rng.uniform(0.0, 1.0) / om1
        xi = rng.uniform(omega_lower_bound(eta, om1), 0.0)
        spec = make_shift(prob8, eta, xi, "double", relaxed=True)
        state = si_shift_init(prob8, spec)
        prev = state.Z
        for _ in range(30):
            state = si_shift_step(prob8, spec, state, kernel)
            assert np.min(state.Z - prev) > 0.0
            prev = state.Z


def test_monotone_increase_and_upper_bound(prob8):
    spec = default_shift(prob8, "double")
    ref = sda_solve(shifted_coefficients(prob8, spec), SdaConfig(tol=1e-14))
    state = si_shift_init(prob8, spec)
    prev = state.Z
    for _ in range(60):
        state = si_shift_step(prob8, spec, state)
        gap = inf_norm(state.Z - ref.x)
        if gap <= 10 * 64 * 2.0 ** -52:
            break
        assert np.min(state.Z - prev) > 0.0  # strict entrywise increase
        assert np.max(state.Z - ref.x) <= 1e-12  # never exceeds the limit
        prev = state.Z


def test_component_limits(prob32):
    # 300 sweeps puts the iterate at its floating-point floor (the limit
    # cycles in the last bit, so exact stationarity never happens)
    spec = default_shift(prob32, "double")
    state = si_shift_init(prob32, spec)
    for _ in range(300):
        state = si_shift_step(prob32, spec, state)
    x = state.Z
    m1, m2 = state.M[:, 0], state.M[:, 1]
    n1, n2 = state.N[:, 0], state.N[:, 1]
    m_lim = x @ prob32.q + 1.0
    n_lim = x.T @ prob32.q + 1.0
    assert inf_norm(m1 - m2) <= 1e-8 * inf_norm(m_lim)
    assert inf_norm(m2 - m_lim) <= 1e-8 * inf_norm(m_lim)
    assert inf_norm(n1 - n_lim) <= 1e-8 * inf_norm(n_lim)
    assert inf_norm(n2) <= 1e-8


def test_factors_to_solution_matches_triple_loop(prob4, rng):
    kernel = build_kernel(prob4)
    m_fac = rng.uniform(0.0, 2.0, (prob4.n, 2))
    n_fac = rng.uniform(0.0, 2.0, (prob4.n, 2))
    direct = factors_to_solution(kernel, m_fac, n_fac)
    brute = oracles.hadamard_triple_loop(kernel.T, m_fac, n_fac)
    assert np.max(np.abs(direct - brute)) < 1e-14
    assert np.array_equal(factors_to_solution(kernel, np.zeros((prob4.n, 2)),
                                              np.zeros((prob4.n, 2))),
                          np.zeros((prob4.n, prob4.n)))


def test_scalar_shifted_limit(prob1):
    # the residual computes to an exact 0.0 already at error ~sqrt(eps)
    # (cancellation below ulp), so drive the run by the update error
    sol = si_shifted_solve(prob1, default_shift(prob1, "double"),
                           SiConfig(tol=1e-300, stop_rule="error", max_iter=300))
    assert abs(sol.x[0, 0] - 1.0) <= 1e-12


def test_si_solution_reference_loop_agreement(prob8):
    # package solver against the independent transcription of the scheme;
    # both are driven to their floating-point floor
    spec = default_shift(prob8, "double")
    sol = si_shifted_solve(prob8, spec,
                           SiConfig(tol=1e-300, stop_rule="error", max_iter=500))
    z_ref, _ = oracles.si_shifted_reference(
        0.0, 1.0, prob8.weights, prob8.omegas, spec.eta, spec.xi, max_iter=2000)
    assert inf_norm(sol.x - z_ref) <= 1e-12 * inf_norm(z_ref)
