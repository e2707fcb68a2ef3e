"""Shared solver plumbing: result container, tolerance and stop-rule handling."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import EPS

STOP_RULES = ("error", "residual", "either")


@dataclass
class Solution:
    """Outcome of an iterative solve.

    ``x`` is the minimal nonnegative solution iterate; ``y`` the dual
    iterate when the method produces one (the dual of the quadruple that
    was actually solved, so the shifted dual for shifted runs).
    Histories hold one entry per iteration.
    """

    x: np.ndarray
    y: Optional[np.ndarray]
    iterations: int
    converged: bool
    method: str
    err_history: list = field(default_factory=list)
    res_history: list = field(default_factory=list)

    @property
    def err_final(self):
        return self.err_history[-1] if self.err_history else math.inf

    @property
    def res_final(self):
        return self.res_history[-1] if self.res_history else math.inf


def auto_tol(n):
    """Default stopping threshold n^2 * eps (eps = 2^-52)."""
    return n * n * EPS


def resolve_tol(tol, n):
    if tol is None or tol == "auto":
        return auto_tol(n)
    tol = float(tol)
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return tol


def stop_hit(rule, err, res, tol):
    if rule == "error":
        return err < tol
    if rule == "residual":
        return res < tol
    if rule == "either":
        return err < tol or res < tol
    raise ValueError(f"stop rule must be one of {STOP_RULES}, got {rule!r}")
