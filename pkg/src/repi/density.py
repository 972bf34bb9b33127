"""One-dimensional densities: closed-form families and uniform-grid samples.

Families carry analytic pdf/cdf/moments and know how to choose a finite
window; :class:`GridDensity` is the discretized object every quadrature in
the package works on. The plain-text family format is

    gaussian mean=0 sd=1
    exponential rate=1
    laplace var=1            (or scale=b)
    uniform lo=0 hi=1
    gamma2 rate=1
    potential knots=x1:v1,x2:v2,...
    mixture sep=6 sd=1       (two-component Gaussian mixture, not log-concave)
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np
from scipy import integrate, special

from repi.quadrature import trapezoid

DEFAULT_MASS_TOLERANCE = 1e-6
DEFAULT_LOG_CONCAVE_SLACK = 1e-9
DEFAULT_POINTS_PER_UNIT = 1000
# Pointwise density cutoff (relative to the maximum) defining the window at r = 1.
BASE_WINDOW_RATIO = 1e-14
# Keep window cutoffs out of the subnormal range.
MIN_WINDOW_RATIO = 1e-300


class PreconditionError(ValueError):
    """An input violates a documented precondition (e.g. not log-concave)."""


def points_per_unit() -> int:
    env = os.environ.get("REPI_RESOLUTION")
    if env:
        value = int(env)
        if value < 1:
            raise ValueError("REPI_RESOLUTION must be a positive integer")
        return value
    return DEFAULT_POINTS_PER_UNIT


def window_ratio(r_min: float = 1.0) -> float:
    """Density cutoff such that the truncated tail of f**r_min is negligible."""
    if r_min <= 0:
        raise ValueError("r_min must be positive")
    return max(MIN_WINDOW_RATIO, BASE_WINDOW_RATIO ** (1.0 / min(r_min, 1.0)))


def _fmt(x: float) -> str:
    return repr(float(x)) if not float(x).is_integer() else str(int(x))


# ---------------------------------------------------------------------------
# Closed-form families


@dataclass(frozen=True)
class Family:
    """Base class; subclasses are immutable closed-form densities."""

    kind: ClassVar[str] = ""
    log_concave: ClassVar[bool] = True

    def pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def var(self) -> float:
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def anchor(self) -> float:
        """A point that grids should contain as a node (kink, jump or mode)."""
        return 0.0

    @property
    def peak(self) -> float:
        raise NotImplementedError

    def window(self, ratio: float) -> tuple[float, float]:
        """Interval outside which the density is below ``ratio * peak``."""
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def tail_mass(self, lo: float, hi: float) -> float:
        return float(self.cdf(np.array([lo]))[0] + (1.0 - self.cdf(np.array([hi]))[0]))

    def __str__(self) -> str:
        return self.spec


@dataclass(frozen=True)
class Gaussian(Family):
    loc: float = 0.0
    sd: float = 1.0
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("gaussian sd must be positive")

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2 * math.pi))

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.loc) / self.sd)

    @property
    def mean(self):
        return self.loc

    @property
    def var(self):
        return self.sd**2

    @property
    def anchor(self):
        return self.loc

    @property
    def peak(self):
        return 1.0 / (self.sd * math.sqrt(2 * math.pi))

    def window(self, ratio):
        w = self.sd * math.sqrt(-2.0 * math.log(ratio))
        return (self.loc - w, self.loc + w)

    @property
    def spec(self):
        return f"gaussian mean={_fmt(self.loc)} sd={_fmt(self.sd)}"


@dataclass(frozen=True)
class Exponential(Family):
    rate: float = 1.0
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("exponential rate must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        # x = 0 takes the right limit so that grids starting at 0 are exact.
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    @property
    def mean(self):
        return 1.0 / self.rate

    @property
    def var(self):
        return 1.0 / self.rate**2

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def peak(self):
        return self.rate

    def window(self, ratio):
        return (0.0, -math.log(ratio) / self.rate)

    @property
    def spec(self):
        return f"exponential rate={_fmt(self.rate)}"


@dataclass(frozen=True)
class Laplace(Family):
    """Centered Laplace density exp(-|x|/scale) / (2 scale)."""

    scale: float = 1.0 / math.sqrt(2.0)
    kind: ClassVar[str] = "laplace"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("laplace scale must be positive")

    @classmethod
    def with_variance(cls, var: float) -> "Laplace":
        if not var > 0:
            raise ValueError("laplace variance must be positive")
        return cls(scale=math.sqrt(var / 2.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.abs(x) / self.scale) / (2.0 * self.scale)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        half = 0.5 * np.exp(-np.abs(x) / self.scale)
        return np.where(x < 0, half, 1.0 - half)

    @property
    def mean(self):
        return 0.0

    @property
    def var(self):
        return 2.0 * self.scale**2

    @property
    def peak(self):
        return 1.0 / (2.0 * self.scale)

    def window(self, ratio):
        w = -self.scale * math.log(ratio)
        return (-w, w)

    @property
    def spec(self):
        return f"laplace scale={_fmt(self.scale)}"


@dataclass(frozen=True)
class Uniform(Family):
    lo: float = 0.0
    hi: float = 1.0
    kind: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("uniform requires lo < hi")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / self.length, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.lo) / self.length, 0.0, 1.0)

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def var(self):
        return self.length**2 / 12.0

    @property
    def support(self):
        return (self.lo, self.hi)

    @property
    def anchor(self):
        return self.lo

    @property
    def peak(self):
        return 1.0 / self.length

    def window(self, ratio):
        return (self.lo, self.hi)

    @property
    def spec(self):
        return f"uniform lo={_fmt(self.lo)} hi={_fmt(self.hi)}"


@dataclass(frozen=True)
class GammaShape2(Family):
    """Gamma density with shape 2: rate**2 x exp(-rate x) on (0, inf)."""

    rate: float = 1.0
    kind: ClassVar[str] = "gamma2"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("gamma2 rate must be positive")

    def pdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return self.rate**2 * x * np.exp(-self.rate * x)

    def cdf(self, x):
        u = self.rate * np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-u) - u * np.exp(-u)

    @property
    def mean(self):
        return 2.0 / self.rate

    @property
    def var(self):
        return 2.0 / self.rate**2

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def peak(self):
        return self.rate / math.e

    def window(self, ratio):
        # Upper root of u e^{-u} = ratio / e, u = rate * x.
        u = -special.lambertw(-ratio / math.e, k=-1).real
        return (0.0, u / self.rate)

    @property
    def spec(self):
        return f"gamma2 rate={_fmt(self.rate)}"


@dataclass(frozen=True)
class ConvexPotential(Family):
    """Density exp(-V) / Z with V piecewise linear and convex between the
    first and last knot and +inf outside (compact support)."""

    knots: tuple[tuple[float, float], ...] = ((-1.0, 1.0), (0.0, 0.0), (1.0, 1.0))
    log_norm: float = field(default=float("nan"), compare=False)
    kind: ClassVar[str] = "potential"

    def __post_init__(self):
        knots = tuple((float(x), float(v)) for x, v in self.knots)
        if len(knots) < 2:
            raise ValueError("potential needs at least two knots")
        xs = np.array([k[0] for k in knots])
        vs = np.array([k[1] for k in knots])
        if not np.all(np.diff(xs) > 0):
            raise ValueError("potential knots must have strictly increasing abscissae (empty support)")
        if not np.all(np.isfinite(vs)):
            raise ValueError("potential values must be finite")
        slopes = np.diff(vs) / np.diff(xs)
        if np.any(np.diff(slopes) < -1e-12 * max(1.0, float(np.max(np.abs(slopes))))):
            raise ValueError("potential knot sequence is not convex")
        object.__setattr__(self, "knots", knots)
        if math.isnan(self.log_norm):
            vmin = float(vs.min())
            z = 0.0
            for (x0, v0), (x1, v1) in zip(knots[:-1], knots[1:]):
                seg, _ = integrate.quad(
                    lambda t: math.exp(-(v0 + (v1 - v0) * (t - x0) / (x1 - x0)) + vmin),
                    x0,
                    x1,
                    epsabs=0.0,
                    epsrel=1e-13,
                )
                z += seg
            object.__setattr__(self, "log_norm", math.log(z) - vmin)

    @property
    def _xs(self) -> np.ndarray:
        return np.array([k[0] for k in self.knots])

    @property
    def _vs(self) -> np.ndarray:
        return np.array([k[1] for k in self.knots])

    def potential(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self._xs[0]) & (x <= self._xs[-1])
        return np.where(inside, np.interp(x, self._xs, self._vs), np.inf)

    def pdf(self, x):
        return np.exp(-self.potential(x) - self.log_norm)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xs, vs = self._xs, self._vs
        out = np.zeros_like(x)
        for x0, x1, v0, v1 in zip(xs[:-1], xs[1:], vs[:-1], vs[1:]):
            b = np.clip(x, x0, x1)
            slope = (v1 - v0) / (x1 - x0)
            if abs(slope) * (x1 - x0) < 1e-12:
                seg = (b - x0) * math.exp(-v0 - self.log_norm)
            else:
                # integral of exp(-v0 - slope (t - x0)) over [x0, b]
                seg = -np.expm1(-slope * (b - x0)) / slope * math.exp(-v0 - self.log_norm)
            out = out + seg
        return np.clip(out, 0.0, 1.0)

    def _moment(self, power: int) -> float:
        val, _ = integrate.quad(
            lambda t: t**power * float(self.pdf(np.array([t]))[0]),
            self._xs[0],
            self._xs[-1],
            points=list(self._xs[1:-1]),
            epsabs=0.0,
            epsrel=1e-12,
        )
        return val

    @property
    def mean(self):
        return self._moment(1)

    @property
    def var(self):
        m = self.mean
        return self._moment(2) - m * m

    @property
    def support(self):
        return (float(self._xs[0]), float(self._xs[-1]))

    @property
    def anchor(self):
        return float(self._xs[0])

    @property
    def peak(self):
        return math.exp(-float(self._vs.min()) - self.log_norm)

    def window(self, ratio):
        return self.support

    @property
    def spec(self):
        body = ",".join(f"{_fmt(x)}:{_fmt(v)}" for x, v in self.knots)
        return f"potential knots={body}"


@dataclass(frozen=True)
class GaussianMixture(Family):
    """Equal-weight mixture of N(-sep/2, sd^2) and N(sep/2, sd^2).

    Log-concave only for sep <= 2 sd; used as a deliberately bad input.
    """

    sep: float = 6.0
    sd: float = 1.0
    kind: ClassVar[str] = "mixture"
    log_concave: ClassVar[bool] = False

    def __post_init__(self):
        if not self.sd > 0 or self.sep < 0:
            raise ValueError("mixture needs sd > 0 and sep >= 0")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        m = 0.5 * self.sep
        c = 1.0 / (2.0 * self.sd * math.sqrt(2 * math.pi))
        return c * (np.exp(-0.5 * ((x - m) / self.sd) ** 2) + np.exp(-0.5 * ((x + m) / self.sd) ** 2))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        m = 0.5 * self.sep
        return 0.5 * (special.ndtr((x - m) / self.sd) + special.ndtr((x + m) / self.sd))

    @property
    def mean(self):
        return 0.0

    @property
    def var(self):
        return self.sd**2 + 0.25 * self.sep**2

    @property
    def peak(self):
        grid = np.linspace(-0.5 * self.sep, 0.5 * self.sep, 201)
        return float(self.pdf(grid).max())

    def window(self, ratio):
        # Relative to one component's peak; conservative for the mixture.
        w = 0.5 * self.sep + self.sd * math.sqrt(-2.0 * math.log(ratio))
        return (-w, w)

    @property
    def spec(self):
        return f"mixture sep={_fmt(self.sep)} sd={_fmt(self.sd)}"


FamilyDensity = Family


def _parse_knots(text: str) -> tuple[tuple[float, float], ...]:
    knots = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            x, v = item.split(":")
            knots.append((float(x), float(v)))
        except ValueError:
            raise ValueError(f"bad knot {item!r}; expected x:v") from None
    return tuple(knots)


_BUILDERS: dict[str, tuple[set[str], Callable[[dict], Family]]] = {
    "gaussian": (
        {"mean", "sd", "var"},
        lambda p: Gaussian(
            loc=float(p.get("mean", 0.0)),
            sd=math.sqrt(float(p["var"])) if "var" in p else float(p.get("sd", 1.0)),
        ),
    ),
    "exponential": ({"rate"}, lambda p: Exponential(rate=float(p.get("rate", 1.0)))),
    "laplace": (
        {"var", "scale"},
        lambda p: Laplace(scale=float(p["scale"])) if "scale" in p else Laplace.with_variance(float(p.get("var", 1.0))),
    ),
    "uniform": ({"lo", "hi"}, lambda p: Uniform(lo=float(p.get("lo", 0.0)), hi=float(p.get("hi", 1.0)))),
    "gamma2": ({"rate"}, lambda p: GammaShape2(rate=float(p.get("rate", 1.0)))),
    "potential": ({"knots"}, lambda p: ConvexPotential(knots=_parse_knots(p["knots"]))),
    "mixture": ({"sep", "sd"}, lambda p: GaussianMixture(sep=float(p.get("sep", 6.0)), sd=float(p.get("sd", 1.0)))),
}


def make_family(kind: str, **params) -> Family:
    """Build a validated family from its kind name and keyword parameters."""
    kind = kind.lower()
    if kind not in _BUILDERS:
        raise ValueError(f"unknown family {kind!r}; expected one of {sorted(_BUILDERS)}")
    allowed, build = _BUILDERS[kind]
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"unknown parameter(s) for {kind}: {sorted(unknown)}")
    if kind == "potential" and "knots" not in params:
        raise ValueError("potential requires knots=")
    if kind == "potential" and not isinstance(params["knots"], str):
        return ConvexPotential(knots=tuple(params["knots"]))
    return build(params)


def parse_family(text: str) -> Family:
    """Parse ``"kind key=value ..."`` into a family."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty family spec")
    params = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ValueError(f"bad parameter {tok!r}; expected key=value")
        key, value = tok.split("=", 1)
        params[key] = value
    return make_family(tokens[0], **params)


# ---------------------------------------------------------------------------
# Grid densities


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Samples of a density at ``n_points`` uniformly spaced nodes on [lo, hi].

    All integrals use the composite trapezoid rule on these nodes.
    """

    lo: float
    hi: float
    values: np.ndarray
    mass_tolerance: float = DEFAULT_MASS_TOLERANCE

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 3:
            raise ValueError("a grid density needs at least 3 points")
        if not self.hi > self.lo:
            raise ValueError("grid spacing must be positive")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("grid values must be finite and non-negative")
        if not self.mass_tolerance > 0:
            raise ValueError("mass_tolerance must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "values", values)
        mass = self.mass
        if abs(mass - 1.0) > self.mass_tolerance:
            raise ValueError(f"trapezoid mass {mass!r} is not within {self.mass_tolerance} of 1")

    @classmethod
    def normalized(cls, lo: float, hi: float, values, mass_tolerance: float = DEFAULT_MASS_TOLERANCE) -> "GridDensity":
        values = np.asarray(values, dtype=float)
        h = (hi - lo) / (values.size - 1)
        mass = trapezoid(values, h)
        if not mass > 0:
            raise ValueError("degenerate grid: zero mass")
        return cls(lo, hi, values / mass, mass_tolerance)

    @property
    def n_points(self) -> int:
        return int(self.values.size)

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.lo + self.h * np.arange(self.n_points)

    @property
    def mass(self) -> float:
        return trapezoid(self.values, self.h)

    @property
    def mean(self) -> float:
        return trapezoid(self.x * self.values, self.h) / self.mass

    def affine(self, scale: float, shift: float = 0.0) -> "GridDensity":
        """Density of ``scale * X + shift`` for ``scale > 0``."""
        if not scale > 0:
            raise ValueError("scale must be positive")
        return GridDensity(
            scale * self.lo + shift,
            scale * self.hi + shift,
            self.values / scale,
            self.mass_tolerance,
        )

    def trimmed(self, ratio: float) -> "GridDensity":
        """Drop leading/trailing nodes whose value is below ``ratio * max``."""
        v = self.values
        keep = np.nonzero(v > ratio * v.max())[0]
        i0, i1 = int(keep[0]), int(keep[-1])
        # keep a zero-ish guard node on each side
        i0, i1 = max(i0 - 1, 0), min(i1 + 1, v.size - 1)
        if i1 - i0 < 2:
            i0, i1 = max(i1 - 2, 0), max(i1, 2)
        h = self.h
        return GridDensity.normalized(self.lo + i0 * h, self.lo + i1 * h, v[i0 : i1 + 1], self.mass_tolerance)

    def __repr__(self) -> str:
        return f"GridDensity(lo={self.lo!r}, hi={self.hi!r}, n_points={self.n_points}, h={self.h!r})"


def discretize(
    f: Family,
    lo: float,
    hi: float,
    n_points: int,
    mass_tolerance: float = DEFAULT_MASS_TOLERANCE,
    renormalize: bool = False,
) -> GridDensity:
    """Evaluate ``f`` at ``n_points`` uniform nodes on [lo, hi].

    With ``renormalize`` the samples are divided by their trapezoid mass,
    which coarse grids over kinks need.
    """
    if n_points < 3:
        raise ValueError("n_points must be at least 3")
    if not hi > lo:
        raise ValueError("need lo < hi")
    tail = f.tail_mass(lo, hi)
    if tail >= 0.5 * mass_tolerance:
        raise ValueError(f"window [{lo}, {hi}] too narrow: tail mass {tail:.3g} exceeds tolerance")
    x = np.linspace(lo, hi, n_points)
    if renormalize:
        return GridDensity.normalized(lo, hi, f.pdf(x), mass_tolerance)
    return GridDensity(lo, hi, f.pdf(x), mass_tolerance)


def default_grid(
    f: Family,
    r_min: float = 1.0,
    resolution: int | None = None,
    ratio: float | None = None,
    mass_tolerance: float = DEFAULT_MASS_TOLERANCE,
    renormalize: bool = False,
) -> GridDensity:
    """Discretize ``f`` on a window adequate for Rényi orders >= ``r_min``.

    The window extends until the density drops below ``ratio * peak`` with
    ``ratio = 1e-14 ** (1 / min(r_min, 1))`` by default, which also covers the
    analytic quantile range.  ``resolution`` is in points per unit length.
    Compactly supported families get exact endpoints; others are aligned so
    that ``f.anchor`` is a node.
    """
    ppu = resolution if resolution is not None else points_per_unit()
    h = 1.0 / ppu
    a, b = f.window(ratio if ratio is not None else window_ratio(r_min))
    s0, s1 = f.support
    if math.isfinite(s0) and math.isfinite(s1) and (a, b) == (s0, s1):
        n_int = max(2, int(round((b - a) / h)))
        return discretize(f, a, b, n_int + 1, mass_tolerance, renormalize)
    anchor = f.anchor
    lo = anchor + math.floor((a - anchor) / h + 1e-9) * h
    hi = anchor + math.ceil((b - anchor) / h - 1e-9) * h
    if math.isfinite(s0):
        lo = max(lo, s0)
    if math.isfinite(s1):
        hi = min(hi, s1)
    n = int(round((hi - lo) / h)) + 1
    return discretize(f, lo, lo + (n - 1) * h, n, mass_tolerance, renormalize)


def is_log_concave(g: GridDensity, slack: float = DEFAULT_LOG_CONCAVE_SLACK) -> bool:
    """Midpoint log-concavity of the samples; zeros may only pad the ends."""
    v = g.values
    pos = np.nonzero(v > 0)[0]
    if pos.size == 0:
        return False
    i0, i1 = pos[0], pos[-1]
    if pos.size != i1 - i0 + 1:
        return False
    lv = np.log(v[i0 : i1 + 1])
    if lv.size < 3:
        return True
    return bool(np.all(lv[1:-1] >= 0.5 * (lv[:-2] + lv[2:]) - slack))


def variance(g: GridDensity) -> float:
    x = g.x
    m = trapezoid(x * g.values, g.h) / g.mass
    return trapezoid((x - m) ** 2 * g.values, g.h) / g.mass


@dataclass(frozen=True)
class RenyiOrder:
    """A Rényi order r in [0, inf] with its Hölder conjugate r' = r / (r - 1)."""

    r: float

    def __post_init__(self):
        r = float(self.r)
        if math.isnan(r) or r < 0:
            raise ValueError("Rényi order must lie in [0, inf]")
        object.__setattr__(self, "r", r)

    @property
    def conjugate(self) -> float:
        if self.r == 1.0:
            return math.inf
        if math.isinf(self.r):
            return 1.0
        return self.r / (self.r - 1.0)

    @property
    def abs_conjugate(self) -> float:
        return abs(self.conjugate)

    def __float__(self) -> float:
        return self.r


def as_order(r) -> float:
    return RenyiOrder(float(r)).r
