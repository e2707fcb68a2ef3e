"""Vector fixed-point solvers built on the Hadamard solution form.

The minimal solution factors as X = T o (m n^T) with
T_ij = 1/(delta_i + d_j), reducing the matrix equation to the coupled
vector fixed point

    m = m o (P n) + e,   n = n o (Q m) + e.

The shifted variant iterates rank-two factors M_k = [m1, m2],
N_k = [n1, n2] with Z_k = T o (M_k N_k^T); every step touches Z_k only
through matrix-vector products plus one rank-2 Hadamard update, keeping
the cost at O(n^2) per step.
"""

from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .diagnostics import relative_residual, relative_update_error
from .shift import validate_shift
from .solution import Solution, resolve_tol, stop_hit


@dataclass(frozen=True)
class SiConfig:
    tol: Union[float, str] = "auto"
    max_iter: int = 10000
    stop_rule: str = "either"


@dataclass(frozen=True)
class HadamardKernel:
    """Entrywise-positive kernel matrices of the Hadamard form.

    T_ij = 1/(delta_i + d_j); P scales T's columns by q_j; Qm_ij = q_j T_ji.
    """

    T: np.ndarray
    P: np.ndarray
    Qm: np.ndarray


@dataclass
class SiState:
    m: np.ndarray
    n: np.ndarray
    k: int = 0
    err_history: list = field(default_factory=list)
    res_history: list = field(default_factory=list)


@dataclass
class SiShiftState:
    """Rank-two factors and the materialized iterate of the shifted scheme."""

    M: np.ndarray
    N: np.ndarray
    Z: np.ndarray
    k: int = 0
    err_history: list = field(default_factory=list)
    res_history: list = field(default_factory=list)


def build_kernel(problem):
    t = 1.0 / (problem.delta[:, None] + problem.gamma[None, :])
    # keep all three row-major so the critical case's m/n symmetry is
    # bitwise (a transposed layout changes the BLAS summation order)
    qm = np.ascontiguousarray(t.T) * problem.q[None, :]
    return HadamardKernel(T=t, P=t * problem.q[None, :], Qm=qm)


def si_init(problem):
    return SiState(m=np.zeros(problem.n), n=np.zeros(problem.n))


def si_step(kernel, state):
    """One sweep of the coupled vector iteration (simultaneous update)."""
    m_next = state.m * (kernel.P @ state.n) + 1.0
    n_next = state.n * (kernel.Qm @ state.m) + 1.0
    return replace(state, m=m_next, n=n_next, k=state.k + 1)


def si_solution(kernel, m, n):
    """X = T o (m n^T) for the classic iterate vectors."""
    return kernel.T * np.outer(m, n)


def si_solve(problem, config=None):
    """Classic vector iteration from m = n = 0.

    Converges linearly off the critical case and sublinearly at it, in
    which case the iteration is expected to hit max_iter.
    """
    config = config or SiConfig()
    tol = resolve_tol(config.tol, problem.n)
    kernel = build_kernel(problem)
    state = si_init(problem)
    converged = False
    while state.k < config.max_iter:
        prev_m, prev_n = state.m, state.n
        state = si_step(kernel, state)
        err = relative_update_error([(prev_m, state.m), (prev_n, state.n)])
        res = relative_residual(problem, si_solution(kernel, state.m, state.n))
        state.err_history.append(err)
        state.res_history.append(res)
        if stop_hit(config.stop_rule, err, res, tol):
            converged = True
            break
    x = si_solution(kernel, state.m, state.n)
    return Solution(x=x, y=None, iterations=state.k, converged=converged,
                    method="si", err_history=state.err_history,
                    res_history=state.res_history)


def factors_to_solution(kernel, m_fac, n_fac):
    """Z = T o (M N^T) for n x 2 factor matrices."""
    return kernel.T * (m_fac @ n_fac.T)


def si_shift_init(problem, shift):
    n = problem.n
    return SiShiftState(M=np.zeros((n, 2)), N=np.zeros((n, 2)), Z=np.zeros((n, n)))


def si_shift_step(problem, shift, state, kernel=None):
    """One step of the shifted rank-two iteration:

        m2 <- Z q + e
        m1 <- Z (I - eta Gamma^-1) q + (I + eta Delta^-1) e
        n1 <- Z^T q + e
        n2 <- -xi (Gamma^-1 e - Z^T Delta^-1 q)
        Z  <- T o (m1 n1^T + m2 n2^T)

    At xi = 0 the second dual column vanishes identically and the scheme
    degenerates to the classic fixed point on Z.
    """
    kernel = kernel or build_kernel(problem)
    q, e = problem.q, problem.e
    eta, xi = shift.eta, shift.xi
    z = state.Z
    m2 = z @ q + e
    m1 = z @ ((1.0 - eta / problem.gamma) * q) + (1.0 + eta / problem.delta) * e
    n1 = z.T @ q + e
    n2 = -xi * (e / problem.gamma - z.T @ (q / problem.delta))
    m_fac = np.column_stack([m1, m2])
    n_fac = np.column_stack([n1, n2])
    z_next = kernel.T * (np.outer(m1, n1) + np.outer(m2, n2))
    return replace(state, M=m_fac, N=n_fac, Z=z_next, k=state.k + 1)


def si_shifted_solve(problem, shift, config=None):
    """Shifted low-rank iteration from M = N = 0 (closure of the region allowed)."""
    config = config or SiConfig()
    validate_shift(shift.eta, shift.xi, shift.mode, float(problem.omegas[0]),
                   relaxed=True)
    tol = resolve_tol(config.tol, problem.n)
    kernel = build_kernel(problem)
    state = si_shift_init(problem, shift)
    converged = False
    while state.k < config.max_iter:
        prev_m, prev_n = state.M, state.N
        state = si_shift_step(problem, shift, state, kernel)
        err = relative_update_error([(prev_m, state.M), (prev_n, state.N)])
        res = relative_residual(problem, state.Z)
        state.err_history.append(err)
        state.res_history.append(res)
        if stop_hit(config.stop_rule, err, res, tol):
            converged = True
            break
    return Solution(x=state.Z, y=None, iterations=state.k, converged=converged,
                    method=f"si-{shift.mode}", err_history=state.err_history,
                    res_history=state.res_history)
