"""Closed-form exponents and constants of the Rényi EPI for orders in (0, 1).

Products of powers are formed as sums of logarithms and exponentiated last.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

ADMISSIBILITY_TOL = 1e-12
LOG2 = math.log(2.0)


class InadmissibleTriple(ValueError):
    """Exponents outside (0, 1) or violating 1/p' + 1/q' = 1/r'."""


def conjugate(p: float) -> float:
    """Hölder conjugate p' = p / (p - 1); ``inf`` at p = 1."""
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def inv_abs_conjugate(m: float) -> float:
    """1 / |m'| = (1 - m) / m for m in (0, 1)."""
    return (1.0 - m) / m


def _check_young_order(m: float) -> None:
    if not m > 0 or m == 1.0 or math.isinf(m):
        raise ValueError(f"order {m!r} must be positive, finite and different from 1")


def log_young_c(m: float) -> float:
    """log c_m = log(m)/m - log|m'|/m'."""
    _check_young_order(m)
    mp = conjugate(m)
    return math.log(m) / m - math.log(abs(mp)) / mp


def young_c(m: float) -> float:
    """Sharp Young constant c_m = m^{1/m} / |m'|^{1/m'}."""
    return math.exp(log_young_c(m))


@dataclass(frozen=True)
class ExponentTriple:
    p: float
    q: float
    r: float

    @property
    def admissibility_residual(self) -> float:
        """1/|p'| + 1/|q'| - 1/|r'|."""
        return inv_abs_conjugate(self.p) + inv_abs_conjugate(self.q) - inv_abs_conjugate(self.r)

    @property
    def admissible(self) -> bool:
        inside = all(0.0 < m < 1.0 for m in (self.p, self.q, self.r))
        if not inside:
            return False
        scale = max(1.0, inv_abs_conjugate(self.r))
        return abs(self.admissibility_residual) < ADMISSIBILITY_TOL * scale

    def validate(self) -> "ExponentTriple":
        if not self.admissible:
            raise InadmissibleTriple(
                f"(p, q, r) = ({self.p!r}, {self.q!r}, {self.r!r}) is not admissible "
                f"(residual {self.admissibility_residual!r})"
            )
        return self

    @property
    def x(self) -> float:
        return inv_abs_conjugate(self.p)

    @property
    def y(self) -> float:
        return inv_abs_conjugate(self.q)


def xy_to_triple(x: float, y: float) -> ExponentTriple:
    """p = 1/(x+1), q = 1/(y+1), r = 1/(x+y+1); then 1/|p'| = x, 1/|q'| = y."""
    if not (x > 0 and y > 0):
        raise ValueError("x and y must be positive")
    return ExponentTriple(1.0 / (x + 1.0), 1.0 / (y + 1.0), 1.0 / (x + y + 1.0))


def triple_from_pq(p: float, q: float) -> ExponentTriple:
    """Complete (p, q) with the admissible r, i.e. 1/r = 1/p + 1/q - 1."""
    inv_r = 1.0 / p + 1.0 / q - 1.0
    if not inv_r > 1.0:
        raise InadmissibleTriple("no admissible r in (0, 1) for this (p, q)")
    return ExponentTriple(p, q, 1.0 / inv_r).validate()


def log_young_C(t: ExponentTriple) -> float:
    t.validate()
    return log_young_c(t.p) + log_young_c(t.q) - log_young_c(t.r)


def young_C(t: ExponentTriple) -> float:
    """C(p, q, r) = c_p c_q / c_r."""
    return math.exp(log_young_C(t))


def log_A_const(t: ExponentTriple) -> float:
    logC = log_young_C(t)
    return logC + 2.0 * math.log(t.r) / t.r - 2.0 * math.log(t.p) / t.p - 2.0 * math.log(t.q) / t.q


def A_const(t: ExponentTriple) -> float:
    """A(p,q,r) = C(p,q,r) r^{2/r} / (p^{2/p} q^{2/q}), from the Young constants."""
    return math.exp(log_A_const(t))


def _ulogu(u: float) -> float:
    return 0.0 if u == 0.0 else u * math.log(u)


def log_A_xy(x: float, y: float) -> float:
    """log of (x+y)^{x+y}(x+1)^{x+1}(y+1)^{y+1} / (x^x y^y (x+y+1)^{x+y+1}).

    Regrouped as a sum of three positive log1p terms; the six u log u
    terms cancel badly once x + y is large compared with the result.
    """
    if x == 0.0 or y == 0.0:
        s = x + y
        return _ulogu(s) + _ulogu(x + 1) + _ulogu(y + 1) - _ulogu(x) - _ulogu(y) - _ulogu(s + 1)
    t = x + y + 1.0
    return x * math.log1p(y / (x * t)) + y * math.log1p(x / (y * t)) + math.log1p(x * y / t)


def A_xy(x: float, y: float) -> float:
    return math.exp(log_A_xy(x, y))


def _check_r(r: float) -> None:
    if not 0.0 < r < 1.0:
        raise ValueError(f"r = {r!r} must lie in (0, 1)")


def alpha(r: float) -> float:
    """Exponent making N_r^alpha super-additive for log-concave summands."""
    _check_r(r)
    return (1 - r) * LOG2 / ((1 + r) * math.log1p(r) + r * math.log(1 / (4 * r)))


def beta(r: float) -> float:
    """Exponent for uniformly distributed summands."""
    _check_r(r)
    return (1 - r) * LOG2 / (2 * LOG2 + r * math.log(r) - (r + 1) * math.log1p(r))


def gamma(r: float, n: int = 1) -> float:
    """gamma = 2 beta / n (geometric form for uniforms in dimension n)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return 2.0 * beta(r) / n


def abs_conjugate(r: float) -> float:
    """|r'| = r / (1 - r)."""
    return r / (1.0 - r)


def log_c_rk_lower(r: float, k: int) -> float:
    _check_r(r)
    if k < 1:
        raise ValueError("k must be a positive integer")
    n = k * abs_conjugate(r)
    return math.log(r) / (1 - r) + (1 + n) * math.log1p(1 / n)


def c_rk_lower(r: float, k: int) -> float:
    """Lower bound r^{1/(1-r)} (1 + 1/(k|r'|))^{1 + k|r'|} on c(r, k)."""
    return math.exp(log_c_rk_lower(r, k))


def critical_exponent(r: float) -> float:
    """(1-r) log 2 / (2 log Gamma(1+r) + 2 r log(1/r)): the exponent at which the
    i.i.d. exponential pair turns the alpha-EPI into an equality."""
    _check_r(r)
    return (1 - r) * LOG2 / (2 * math.lgamma(1 + r) + 2 * r * math.log(1 / r))


def alpha_opt_bounds(r: float) -> tuple[float, float]:
    """(lower, upper) bounds on the optimal alpha."""
    return max(1.0, critical_exponent(r)), alpha(r)


def c_opt_bounds(r: float) -> tuple[float, float]:
    """e r^{1/(1-r)} <= c_opt(r) <= pi r^{1/(1-r)}."""
    _check_r(r)
    base = math.exp(math.log(r) / (1 - r))
    return math.e * base, math.pi * base


def bound_ratio(r: float) -> float:
    """Ratio of the exponential lower bound on alpha_opt to alpha(r).

    Equal to ((1+r) log(1+r) + r log(1/(4r))) / (2 log Gamma(1+r) + 2 r log(1/r));
    it tends to 1/2 as r -> 0 and to log 2 / (2 gamma_E) as r -> 1.
    """
    _check_r(r)
    upper_den = (1 + r) * math.log1p(r) + r * math.log(1 / (4 * r))
    lower_den = 2 * math.lgamma(1 + r) + 2 * r * math.log(1 / r)
    return upper_den / lower_den


@dataclass(frozen=True)
class ConstantBundle:
    r: float
    abs_conjugate: float
    alpha: float
    beta: float
    gamma_n1: float
    alpha_opt_lower: float
    critical_exponent: float
    c_opt_lower: float
    c_opt_upper: float
    bound_ratio: float
    k: int | None = None
    c_rk_lower: float | None = None

    def gamma(self, n: int) -> float:
        return 2.0 * self.beta / n

    def c_rk(self, k: int) -> float:
        return c_rk_lower(self.r, k)

    def to_dict(self) -> dict:
        return asdict(self)


def constant_bundle(r: float, k: int | None = None) -> ConstantBundle:
    _check_r(r)
    lo, hi = alpha_opt_bounds(r)
    c_lo, c_hi = c_opt_bounds(r)
    return ConstantBundle(
        r=r,
        abs_conjugate=abs_conjugate(r),
        alpha=hi,
        beta=beta(r),
        gamma_n1=gamma(r, 1),
        alpha_opt_lower=lo,
        critical_exponent=critical_exponent(r),
        c_opt_lower=c_lo,
        c_opt_upper=c_hi,
        bound_ratio=bound_ratio(r),
        k=k,
        c_rk_lower=None if k is None else c_rk_lower(r, k),
    )
