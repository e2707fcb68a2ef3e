"""Secular-equation machinery: eigenvalue location by bisection, Cayley rates.

The critical-case block matrix has determinant

    det(M - lam I) = -lam * prod_i(1/om_i - lam) * sum_j c_j prod_{k!=j}(1/om_k - lam)

so its eigenvalues are 0, the n poles 1/om_i, and the n-1 roots of the
interior polynomial, one per pole gap.  Products of up to 2n factors with
magnitudes up to 1/om_n overflow doubles near the spectrum edges, hence
the signed-log representation.

The double-shifted block matrix factors as

    det(Mbar - lam I) = -prod_i(1/om_i - lam)^2 * (g1 + eta*xi*g2*g3)(lam)

with the rational sums g1, g2, g3 below.  (Deriving the determinant of the
diagonal-plus-rank-2 form gives g1, not lam*g1, in the first term; the
n=1 case with the boundary shift confirms it: the shifted matrix has the
double eigenvalue 1/(2*om_1), which is a root of g1 + eta*xi*g2*g3 only.)
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketFailure, NotCriticalCase, PoleHit, ShiftOutOfRegion

POLE_GUARD = 1e-14
BRACKET_WIDTH_FACTOR = 1e-12
MAX_BISECT = 200
CHEB_SAMPLES = (64, 128, 256, 512, 1024, 2048, 4096)


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as (sign, log |value|) to dodge overflow.

    Multiplication composes: signs multiply, log magnitudes add.
    """

    sign: int
    log_mag: float

    def __mul__(self, other):
        if self.sign == 0 or other.sign == 0:
            return SignedLog(0, -math.inf)
        return SignedLog(self.sign * other.sign, self.log_mag + other.log_mag)

    @classmethod
    def from_value(cls, x):
        x = float(x)
        if x == 0.0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def value(self):
        """Collapse to float; overflows to +-inf for huge magnitudes."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_mag)
        except OverflowError:
            return self.sign * math.inf


def _signed_log_sum(signs, log_mags):
    """Sum of signed-log terms via max-shifted accumulation."""
    signs = np.asarray(signs, dtype=np.float64)
    log_mags = np.asarray(log_mags, dtype=np.float64)
    live = signs != 0.0
    if not np.any(live):
        return SignedLog(0, -math.inf)
    m = float(np.max(log_mags[live]))
    total = float(np.sum(signs[live] * np.exp(log_mags[live] - m)))
    if total == 0.0:
        return SignedLog(0, -math.inf)
    return SignedLog(1 if total > 0 else -1, m + math.log(abs(total)))


@dataclass(frozen=True)
class SpectrumReport:
    """Located eigenvalues with their brackets and secular residuals.

    ``fixed_roots`` holds the poles 1/om_i when they are eigenvalues
    (unshifted critical case only); ``free_roots`` the bisected ones.
    """

    fixed_roots: np.ndarray
    free_roots: np.ndarray
    brackets: tuple
    residuals: np.ndarray
    bracket_widths: np.ndarray
    includes_zero: bool
    on_boundary: bool = False
    coalesced: tuple = field(default=())

    @property
    def eigenvalues(self):
        parts = [self.fixed_roots, self.free_roots]
        if self.includes_zero:
            parts.append(np.array([0.0]))
        return np.sort(np.concatenate(parts))


def _require_critical(problem):
    if not problem.is_critical:
        raise NotCriticalCase(
            "secular machinery is defined for (alpha, c) = (0, 1) only"
        )


def _check_poles(problem, lam):
    if np.any(np.abs(1.0 / problem.omegas - lam) < POLE_GUARD):
        raise PoleHit(f"lambda = {lam!r} collides with a pole 1/omega_i")


def _interior_terms(problem, lam):
    """Signed-log terms c_j prod_{k!=j}(1/om_k - lam), as (signs, logs).

    The polynomial is entire in lam, so evaluation exactly at the poles
    is safe: a vanishing factor kills every term except the one that
    skips it.
    """
    poles = 1.0 / problem.omegas
    factors = poles - lam
    signs = np.sign(factors)
    zero = signs == 0.0
    log_c = np.log(problem.weights)
    n_zero = int(np.count_nonzero(zero))
    if n_zero == 0:
        logs = np.log(np.abs(factors))
        total_log = float(np.sum(logs))
        total_sign = float(np.prod(signs))
        return total_sign * signs, log_c + total_log - logs
    term_signs = np.zeros(problem.n)
    term_logs = np.full(problem.n, -math.inf)
    if n_zero == 1:
        j = int(np.nonzero(zero)[0][0])
        live = ~zero
        term_signs[j] = float(np.prod(signs[live]))
        term_logs[j] = log_c[j] + float(np.sum(np.log(np.abs(factors[live]))))
    return term_signs, term_logs


def _interior_poly(problem, lam):
    """sum_j c_j prod_{k!=j}(1/om_k - lam) in signed-log form."""
    return _signed_log_sum(*_interior_terms(problem, lam))


def _interior_residual(problem, lam):
    """|interior polynomial| scaled by its largest term: a cancellation level.

    The raw polynomial value overflows doubles at large n, so residuals
    are reported relative to the dominant term magnitude.
    """
    term_signs, term_logs = _interior_terms(problem, lam)
    sl = _signed_log_sum(term_signs, term_logs)
    if sl.sign == 0:
        return 0.0
    scale = float(np.max(term_logs[term_signs != 0.0]))
    return math.exp(min(sl.log_mag - scale, 700.0))


def secular_det(problem, lam):
    """det(M - lam I) for the critical block matrix, as a SignedLog.

    Uses the factored form -lam * prod(1/om_i - lam) * interior(lam);
    raises PoleHit within 1e-14 of any pole.
    """
    _require_critical(problem)
    lam = float(lam)
    if lam == 0.0:
        return SignedLog(0, -math.inf)
    _check_poles(problem, lam)
    factors = 1.0 / problem.omegas - lam
    prod = SignedLog(int(np.prod(np.sign(factors))),
                     float(np.sum(np.log(np.abs(factors)))))
    return SignedLog.from_value(-lam) * prod * _interior_poly(problem, lam)


def secular_sums(problem, lam):
    """The three rational sums (g1, g2, g3) of the shifted secular analysis.

    g1 = lam * sum c_i/(1/om_i - lam)
    g2 = sum c_i om_i/(1/om_i - lam)
    g3 = sum c_i/(om_i (1/om_i - lam))
    """
    _require_critical(problem)
    lam = float(lam)
    _check_poles(problem, lam)
    om, c = problem.omegas, problem.weights
    den = 1.0 / om - lam
    g1 = lam * float(np.sum(c / den))
    g2 = float(np.sum(c * om / den))
    g3 = float(np.sum(c / (om * den)))
    return g1, g2, g3


def shifted_secular(problem, shift, lam):
    """Secular function of the shifted block matrix: g1 + eta*xi*g2*g3.

    Off the poles its zeros are exactly the eigenvalues of the shifted
    block matrix; at xi = 0 it reduces to g1, whose off-pole zeros are
    zero plus the interior eigenvalues of the unshifted matrix.
    """
    from .shift import validate_shift  # local import to avoid a cycle

    _require_critical(problem)
    validate_shift(shift.eta, shift.xi, shift.mode, float(problem.omegas[0]),
                   relaxed=True)
    g1, g2, g3 = secular_sums(problem, lam)
    return g1 + shift.eta * shift.xi * g2 * g3


def _bisect(fn, a, b, sa, sb, width):
    """Bisection on sign values; returns (root, final half-bracket)."""
    for _ in range(MAX_BISECT):
        if b - a <= width:
            break
        mid = 0.5 * (a + b)
        sm = fn(mid)
        if sm == 0:
            return mid, (mid, mid)
        if sm == sa:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b), (a, b)


def interlaced_spectrum(problem):
    """Eigenvalues of the critical block matrix M.

    Returns 0, the n poles 1/om_i, and one bisected root strictly inside
    each pole gap, with the strict interlacing verified.
    """
    _require_critical(problem)
    poles = np.sort(1.0 / problem.omegas)
    width = BRACKET_WIDTH_FACTOR * poles[-1]

    def sgn(lam):
        return _interior_poly(problem, lam).sign

    roots, brackets, residuals, widths = [], [], [], []
    for k in range(problem.n - 1):
        a, b = poles[k], poles[k + 1]
        sa, sb = sgn(a), sgn(b)
        if sa == 0 or sb == 0 or sa == sb:
            raise BracketFailure(
                f"no sign change of the interior polynomial on ({a}, {b})"
            )
        root, (lo, hi) = _bisect(sgn, a, b, sa, sb, width)
        roots.append(root)
        brackets.append((lo, hi))
        residuals.append(_interior_residual(problem, root))
        widths.append(hi - lo)

    values = np.array(roots)
    if problem.n > 1:
        inside = (values > poles[:-1]) & (values < poles[1:])
        if not bool(np.all(inside)):
            raise BracketFailure("interior root escaped its pole gap")
    report = SpectrumReport(
        fixed_roots=poles.copy(),
        free_roots=values,
        brackets=tuple(brackets),
        residuals=np.array(residuals),
        bracket_widths=np.array(widths),
        includes_zero=True,
    )
    eigs = report.eigenvalues
    if np.any(np.diff(eigs) <= 0):
        raise BracketFailure("interlacing order violated")
    return report


def _chebyshev_points(a, b, m):
    theta = (2.0 * np.arange(m) + 1.0) * math.pi / (2.0 * m)
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta))


def _g3_level_point(problem, a, b, target):
    """Point in (a, b) where g3 reaches ``target``; g3 rises from -inf to +inf."""
    om, c = problem.omegas, problem.weights

    def g3(lam):
        return float(np.sum(c / (om * (1.0 / om - lam))))

    lo = a + (b - a) * 1e-13
    hi = b - (b - a) * 1e-13
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if g3(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shifted_interlaced_spectrum(problem, shift):
    """Eigenvalues of the double-shifted block matrix.

    Locates two roots of the shifted secular function in (0, 1/om_1) and
    two in each pole gap: Chebyshev sampling (64 doubling to 4096 points)
    finds the positive hump; if sampling misses it, the hump is probed at
    an analytically guaranteed point (the midpoint 1/(2 om_1) for the
    first interval, the g3 level-set point for the gaps).  A vanishing
    probe value marks a coalesced double root, which occurs exactly on
    the boundary of the admissible region.
    """
    from .shift import omega_lower_bound, validate_shift

    _require_critical(problem)
    om1 = float(problem.omegas[0])
    validate_shift(shift.eta, shift.xi, shift.mode, om1, relaxed=True)
    eta, xi = shift.eta, shift.xi
    if eta * xi == 0.0:
        raise ShiftOutOfRegion(
            "shifted spectrum needs eta > 0 and xi < 0 (double shift)"
        )
    on_boundary = abs(xi - omega_lower_bound(eta, om1)) <= 1e-12 * abs(xi)

    omv, cv = problem.omegas, problem.weights

    def gbar_many(lams):
        lams = np.atleast_1d(np.asarray(lams, dtype=np.float64))
        den = (1.0 / omv)[:, None] - lams[None, :]
        g1 = lams * np.sum(cv[:, None] / den, axis=0)
        g2 = np.sum((cv * omv)[:, None] / den, axis=0)
        g3 = np.sum((cv / omv)[:, None] / den, axis=0)
        return g1 + eta * xi * g2 * g3

    def gbar(lam):
        return float(gbar_many(lam)[0])

    poles = np.sort(1.0 / problem.omegas)
    width = BRACKET_WIDTH_FACTOR * poles[-1]
    free, brackets, residuals, widths = [], [], [], []
    coalesced = []

    for k in range(problem.n):
        a = 0.0 if k == 0 else poles[k - 1]
        b = poles[k]
        off = (b - a) * 1e-13
        a_eff = a + (off if k > 0 else 0.0)  # gbar(0) is finite and negative
        b_eff = b - off
        pair = None
        for m in CHEB_SAMPLES:
            pts = _chebyshev_points(a_eff, b_eff, m)
            signs = np.sign(gbar_many(pts))
            idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
            if len(idx) >= 2:
                pair = ((pts[idx[0]], pts[idx[0] + 1]),
                        (pts[idx[-1]], pts[idx[-1] + 1]))
                break
        if pair is None:
            # analytically guaranteed positive probe inside the interval
            if k == 0:
                probe = 1.0 / (2.0 * om1)
            else:
                target = 4.0 * om1 ** 2 / (problem.omegas[k - 1] * problem.omegas[k])
                probe = _g3_level_point(problem, a, b, target)
            gp = gbar(probe)
            if gp > 0.0:
                pair = ((a_eff, probe), (probe, b_eff))
            elif on_boundary and abs(gp) <= 1e-9:
                # double root on the region boundary
                free.extend([probe, probe])
                brackets.extend([(probe, probe)] * 2)
                residuals.extend([abs(gp)] * 2)
                widths.extend([0.0, 0.0])
                coalesced.append(k)
                continue
            else:
                raise BracketFailure(
                    f"no positive value of the shifted secular function found "
                    f"in interval {k} ({a}, {b})"
                )
        for lo0, hi0 in pair:
            sa, sb = np.sign(gbar(lo0)), np.sign(gbar(hi0))
            if sa == sb:
                raise BracketFailure(f"bracket lost its sign change in interval {k}")
            root, (lo, hi) = _bisect(lambda x: np.sign(gbar(x)), lo0, hi0, sa, sb, width)
            free.append(root)
            brackets.append((lo, hi))
            residuals.append(abs(gbar(root)))
            widths.append(hi - lo)

    free = np.array(free)
    report = SpectrumReport(
        fixed_roots=np.array([]),
        free_roots=free,
        brackets=tuple(brackets),
        residuals=np.array(residuals),
        bracket_widths=np.array(widths),
        includes_zero=False,
        on_boundary=on_boundary,
        coalesced=tuple(coalesced),
    )
    _check_shifted_order(problem, report)
    return report


def _check_shifted_order(problem, report):
    """Verify the two-per-gap pattern with all eigenvalues positive."""
    poles = np.sort(1.0 / problem.omegas)
    vals = report.free_roots
    if len(vals) != 2 * problem.n or np.any(vals <= 0):
        raise BracketFailure("shifted spectrum must be 2n positive values")
    for k in range(problem.n):
        lo = 0.0 if k == 0 else poles[k - 1]
        hi = poles[k]
        a, b = vals[2 * k], vals[2 * k + 1]
        pair_ok = (lo < a < hi) and (lo < b < hi)
        order_ok = a < b or (k in report.coalesced and a == b)
        if not (pair_ok and order_ok):
            raise BracketFailure(
                f"interval {k}: pair ({a}, {b}) violates the interlacing pattern"
            )


def closed_loop_spectrum(problem):
    """Eigenvalues {0, lam_2, ..., lam_n} of D - C X at the minimal solution.

    These are the nonnegative eigenvalues of the signed block matrix H,
    located as roots of the even secular function
    1 - sum c_j / (1 - om_j^2 lam^2), one per pole gap.
    """
    _require_critical(problem)
    om, c = problem.omegas, problem.weights

    def even_secular(lam):
        return 1.0 - float(np.sum(c / (1.0 - om ** 2 * lam ** 2)))

    poles = np.sort(1.0 / om)
    width = BRACKET_WIDTH_FACTOR * poles[-1]
    roots = [0.0]
    for k in range(problem.n - 1):
        a, b = poles[k], poles[k + 1]
        off = (b - a) * 1e-13
        a_eff, b_eff = a + off, b - off
        sa, sb = np.sign(even_secular(a_eff)), np.sign(even_secular(b_eff))
        if sa == sb:
            raise BracketFailure(f"even secular function has no root in ({a}, {b})")
        root, _ = _bisect(lambda x: np.sign(even_secular(x)), a_eff, b_eff, sa, sb, width)
        roots.append(root)
    return np.array(roots)


def cayley(z, gamma):
    """Cayley transform (z - gamma)/(z + gamma); maps (0, inf) into (-1, 1)."""
    z = float(z)
    gamma = float(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if abs(z + gamma) < POLE_GUARD:
        raise PoleHit(f"Cayley transform pole at z = -gamma = {-gamma}")
    return (z - gamma) / (z + gamma)


def sda_rate_bound(problem, shift=None, gamma=None):
    """Doubling convergence-rate bound rho(C(D-CX)) * rho(C(A-BY)).

    The spectra come from the located eigenvalues: the closed-loop
    spectrum {0, lam_2..lam_n} with 0 replaced by eta (and, on the dual
    side, by -xi) when the corresponding shift is active.  Equals 1.0
    exactly for the unshifted critical case.
    """
    _require_critical(problem)
    if gamma is None:
        quad = problem.quad
        gamma = max(float(np.max(np.diag(quad.A))), float(np.max(np.diag(quad.D))))
    lams = closed_loop_spectrum(problem)[1:]
    if shift is None:
        primal = np.concatenate([[0.0], lams])
        dual = primal
    elif shift.mode == "single":
        primal = np.concatenate([[shift.eta], lams])
        dual = np.concatenate([[0.0], lams])
    else:
        primal = np.concatenate([[shift.eta], lams])
        dual = np.concatenate([[-shift.xi], lams])
    rho1 = max(abs(cayley(z, gamma)) for z in primal)
    rho2 = max(abs(cayley(z, gamma)) for z in dual)
    return rho1 * rho2
