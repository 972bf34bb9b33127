"""End-to-end checks of the Rényi EPIs on concrete densities, and config-driven sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from repi import constants
from repi.convolution import convolve, iid_normalized_sum, reverse_young_margin
from repi.density import (
    DEFAULT_LOG_CONCAVE_SLACK,
    Exponential,
    Family,
    GammaShape2,
    Gaussian,
    GridDensity,
    Laplace,
    PreconditionError,
    Uniform,
    default_grid,
    is_log_concave,
    parse_family,
)
from repi.rearrangement import rearrangement_monotonicity_check
from repi.renyi import (
    EntropyPowerValue,
    closed_form_entropy_power,
    fmw_comparison_check,
    phi_log_concavity_check,
    renyi_entropy_power,
)
from repi.report import PRECONDITION, VerificationReport
from repi.solver import W_eval, calculus_lemma_check

BASE_TOLERANCE = 1e-6
HARNESS_RESOLUTION = 100
CLT_RESOLUTION = 200
CLT_REL_TOL = 0.015
CLT_UPPER_SLACK = 0.02

Density = Family | GridDensity


def claim_tolerance(scale: float, rel_quad_error: float) -> float:
    """max(1e-6, 10 x relative quadrature error), scaled to the size of the inequality."""
    return max(BASE_TOLERANCE, 10.0 * rel_quad_error) * abs(scale)


def _as_density(d) -> Density:
    return parse_family(d) if isinstance(d, str) else d


def _label(d: Density) -> str:
    return d.spec if isinstance(d, Family) else repr(d)


def _grid(d: Density, r_min: float, resolution: int | None) -> GridDensity:
    if isinstance(d, GridDensity):
        return d
    return default_grid(d, r_min=r_min, resolution=resolution, renormalize=True)


def _log_concave(d: Density) -> bool:
    if isinstance(d, Family):
        return d.log_concave
    return is_log_concave(d, DEFAULT_LOG_CONCAVE_SLACK)


def _closed(d: Density, r: float) -> EntropyPowerValue | None:
    if not isinstance(d, Family):
        return None
    try:
        return closed_form_entropy_power(d, r)
    except ValueError:
        return None


def closed_form_sum_entropy_power(f: Density, g: Density, r: float) -> EntropyPowerValue | None:
    """N_r(X + Y) in closed form when the pair admits one, else None."""
    if isinstance(f, Gaussian) and isinstance(g, Gaussian):
        return closed_form_entropy_power(Gaussian(f.loc + g.loc, math.hypot(f.sd, g.sd)), r)
    if isinstance(f, Exponential) and isinstance(g, Exponential) and f.rate == g.rate:
        return closed_form_entropy_power(GammaShape2(f.rate), r)
    if isinstance(f, Uniform) and isinstance(g, Uniform) and 0 < r < 1:
        a, b = sorted((f.length, g.length))
        integral = (b - a) * b**-r + 2.0 * a * b**-r / (r + 1.0)
        return EntropyPowerValue(r, integral ** (2.0 / (1.0 - r)), "closed-form")
    return None


def _power_report(claim_id, inputs, n_sum, n_parts, exponent, rel_errors, numerics) -> VerificationReport:
    """N_sum^a >= sum N_i^a with the tolerance propagated from relative errors."""
    lhs = n_sum**exponent
    rhs = sum(n**exponent for n in n_parts)
    rel = exponent * sum(rel_errors)
    return VerificationReport(
        claim_id=claim_id,
        inputs=inputs,
        lhs=lhs,
        rhs=rhs,
        margin=lhs - rhs,
        tolerance=claim_tolerance(max(lhs, rhs), rel),
        numerics={**numerics, "exponent": exponent, "quad_error": rel},
    )


def _entropy_powers(f: Density, g: Density, r: float, resolution: int | None, closed_forms: bool):
    """(N(f*g), N(f), N(g), relative errors, method, h) preferring closed forms."""
    cf = (_closed(f, r), _closed(g, r), closed_form_sum_entropy_power(f, g, r)) if closed_forms else (None,) * 3
    if all(v is not None for v in cf):
        nf, ng, ns = cf
        return ns.value, nf.value, ng.value, [0.0, 0.0, 0.0], "closed-form", None
    gf, gg = _grid(f, r, resolution), _grid(g, r, resolution)
    gs = convolve(gf, gg).density
    vals = [renyi_entropy_power(x, r) for x in (gs, gf, gg)]
    rel = [v.quad_error / v.value for v in vals]
    return vals[0].value, vals[1].value, vals[2].value, rel, "grid-quadrature", gs.h


def verify_main_epi(
    f,
    g,
    r: float,
    exponent: float | None = None,
    resolution: int | None = None,
    closed_forms: bool = True,
) -> VerificationReport:
    """N_r(X+Y)^alpha >= N_r(X)^alpha + N_r(Y)^alpha for log-concave X, Y."""
    f, g = _as_density(f), _as_density(g)
    if not (_log_concave(f) and _log_concave(g)):
        raise PreconditionError("the alpha-EPI needs log-concave inputs")
    a = constants.alpha(r) if exponent is None else exponent
    ns, nf, ng, rel, method, h = _entropy_powers(f, g, r, resolution, closed_forms)
    return _power_report(
        "thm1.1",
        f"r={r!r} f={_label(f)} g={_label(g)}",
        ns,
        (nf, ng),
        a,
        rel,
        {"method": method, "N_sum": ns, "N_f": nf, "N_g": ng, "h": h, "resolution": resolution},
    )


def consistency_report(f, g, r: float, resolution: int | None = None) -> VerificationReport:
    """Grid quadrature against closed forms for N_r(X), N_r(Y) and N_r(X+Y)."""
    f, g = _as_density(f), _as_density(g)
    closed = _entropy_powers(f, g, r, resolution, True)
    if closed[4] != "closed-form":
        raise ValueError("pair has no closed form")
    grid = _entropy_powers(f, g, r, resolution, False)
    diffs = [abs(q / c - 1.0) for q, c in zip(grid[:3], closed[:3])]
    worst = max(diffs)
    return VerificationReport(
        claim_id="consistency",
        inputs=f"r={r!r} f={_label(f)} g={_label(g)}",
        lhs=worst,
        rhs=0.0,
        margin=-worst,
        tolerance=max(BASE_TOLERANCE, 10.0 * max(grid[3])),
        numerics={"rel_diff_sum": diffs[0], "rel_diff_f": diffs[1], "rel_diff_g": diffs[2], "h": grid[5]},
    )


def _uniform_grid(length: float, h: float) -> tuple[GridDensity, float]:
    n = max(2, int(round(length / h)))
    snapped = n * h
    return GridDensity(0.0, snapped, np.full(n + 1, 1.0 / snapped)), snapped


def verify_uniform_epi(len_a: float, len_b: float, r: float, resolution: int | None = None) -> VerificationReport:
    """beta-form and gamma-form (n = 1) EPIs for uniforms on intervals.

    Interval lengths are snapped to whole grid cells so both grids share
    the spacing; the snapped lengths are the ones checked.
    """
    if not (len_a > 0 and len_b > 0):
        raise ValueError("interval lengths must be positive")
    h = 1.0 / (resolution if resolution is not None else 1000)
    ga, la = _uniform_grid(len_a, h)
    gb, lb = _uniform_grid(len_b, h)
    gs = convolve(ga, gb).density
    ns = renyi_entropy_power(gs, r)
    rel = ns.quad_error / ns.value
    b = constants.beta(r)
    n_a, n_b = la**2, lb**2
    beta_margin = (ns.value**b - n_a**b - n_b**b) / (n_a**b + n_b**b)
    # e^{h_r(X+Y)} >= (|A|^gamma + |B|^gamma)^{1/gamma}
    gam = constants.gamma(r, 1)
    vol_sum = math.sqrt(ns.value)
    vol_bound = (la**gam + lb**gam) ** (1.0 / gam)
    gamma_margin = (vol_sum - vol_bound) / vol_bound
    tol = max(BASE_TOLERANCE, 10.0 * rel)
    shannon = renyi_entropy_power(gs, 1.0).value
    return VerificationReport(
        claim_id="thm1.2",
        inputs=f"r={r!r} len_a={len_a!r} len_b={len_b!r}",
        lhs=ns.value**b,
        rhs=n_a**b + n_b**b,
        margin=min(beta_margin, gamma_margin),
        tolerance=tol,
        numerics={
            "beta": b,
            "gamma": gam,
            "snapped_lengths": [la, lb],
            "beta_form_margin": beta_margin,
            "beta_form_pass": bool(beta_margin >= -tol),
            "gamma_form_lhs": vol_sum,
            "gamma_form_rhs": vol_bound,
            "gamma_form_margin": gamma_margin,
            "gamma_form_pass": bool(gamma_margin >= -tol),
            "N_r_sum": ns.value,
            "N_1_sum": shannon,
            "shannon_margin": (shannon - n_a - n_b) / (n_a + n_b),
            "quad_error": rel,
            "h": h,
        },
    )


def verify_ktuple_epi(families, r: float, resolution: int | None = None) -> VerificationReport:
    """N_r(X_1 + ... + X_k) >= c(r, k) sum N_r(X_i) with the lower bound on c(r, k)."""
    fams = [_as_density(f) for f in families]
    k = len(fams)
    if k < 2:
        raise ValueError("need at least two summands")
    if not all(_log_concave(f) for f in fams):
        raise PreconditionError("the k-tuple EPI needs log-concave inputs")
    parts, rel_parts = [], []
    for f in fams:
        cf = _closed(f, r)
        if cf is not None:
            parts.append(cf.value)
            rel_parts.append(0.0)
        else:
            v = renyi_entropy_power(_grid(f, r, resolution), r)
            parts.append(v.value)
            rel_parts.append(v.quad_error / v.value)
    if all(isinstance(f, Gaussian) for f in fams):
        sd = math.sqrt(sum(f.sd**2 for f in fams))
        n_sum = closed_form_entropy_power(Gaussian(0.0, sd), r).value
        rel_sum, method = 0.0, "closed-form"
    else:
        grids = [_grid(f, r, resolution) for f in fams]
        total = grids[0]
        for gk in grids[1:]:
            total = convolve(total, gk).density
        v = renyi_entropy_power(total, r)
        n_sum, rel_sum, method = v.value, v.quad_error / v.value, "grid-quadrature"
    c = constants.c_rk_lower(r, k)
    rhs = c * sum(parts)
    rel = rel_sum + max(rel_parts)
    return VerificationReport(
        claim_id="thm1.4",
        inputs=f"r={r!r} k={k} families={[_label(f) for f in fams]}",
        lhs=n_sum,
        rhs=rhs,
        margin=n_sum - rhs,
        tolerance=claim_tolerance(max(n_sum, rhs), rel),
        numerics={"c_rk_lower": c, "N_parts": parts, "method": method, "quad_error": rel, "resolution": resolution},
    )


def sharpness_exponential(r: float, alpha_candidate: float) -> VerificationReport:
    """The alpha-EPI for two i.i.d. exponentials, from closed forms.

    It holds exactly when the exponent is at least the critical one.
    """
    n1 = closed_form_entropy_power(Exponential(1.0), r).value
    n2 = closed_form_entropy_power(GammaShape2(1.0), r).value
    crit = constants.critical_exponent(r)

    def check(a: float) -> VerificationReport:
        return _power_report("prop5.1", f"r={r!r} exponent={a!r}", n2, (n1, n1), a, [0.0], {})

    main = check(alpha_candidate)
    main.numerics.update(
        {
            "critical_exponent": crit,
            "alpha": constants.alpha(r),
            "N_exp": n1,
            "N_exp_sum": n2,
            "pass_at_0.99_critical": check(0.99 * crit).passed,
            "pass_at_1.01_critical": check(1.01 * crit).passed,
        }
    )
    return main


def clt_sharpness(
    r: float,
    k_max: int,
    resolution: int | None = CLT_RESOLUTION,
    rel_tol: float = CLT_REL_TOL,
) -> VerificationReport:
    """N_r of normalized Laplace sums against the Gaussian limit and the c_opt sandwich."""
    if k_max < 1 or k_max & (k_max - 1):
        raise ValueError("k_max must be a power of two")
    lap = Laplace.with_variance(1.0)
    n1 = closed_form_entropy_power(lap, r).value
    target = closed_form_entropy_power(Gaussian(0.0, 1.0), r).value
    lower, upper = constants.c_opt_bounds(r)
    ks, values = [], []
    k = 1
    while k <= k_max:
        s = iid_normalized_sum(lap, k, r_min=r, resolution=resolution)
        ks.append(k)
        values.append(renyi_entropy_power(s, r).value)
        k *= 2
    ratios = [v / n1 for v in values]
    limit_gap = abs(values[-1] / target - 1.0)
    margins = {
        "limit": rel_tol - limit_gap,
        "lower_sandwich": min(q / lower - 1.0 for q in ratios),
        "upper_sandwich": 1.0 + CLT_UPPER_SLACK - ratios[-1] / upper,
    }
    return VerificationReport(
        claim_id="clt",
        inputs=f"r={r!r} k_max={k_max} resolution={resolution}",
        lhs=values[-1],
        rhs=target,
        margin=min(margins.values()),
        tolerance=0.0,
        numerics={
            "k": ks,
            "N_r_S_k": values,
            "N_r_X1": n1,
            "ratios": ratios,
            "c_opt_lower": lower,
            "c_opt_upper": upper,
            "limit_rel_gap": limit_gap,
            **{f"margin_{name}": m for name, m in margins.items()},
        },
    )


def log_A_check(x: float, y: float) -> VerificationReport:
    """W(x, y) = log A > 0, and its x-derivative against a central difference."""
    w, dw = W_eval(x, y)
    step = 1e-6 * x
    fd = (W_eval(x + step, y)[0] - W_eval(x - step, y)[0]) / (2 * step)
    return VerificationReport(
        claim_id="appB",
        inputs=f"x={x!r} y={y!r}",
        lhs=w,
        rhs=0.0,
        margin=w,
        tolerance=0.0,
        numerics={"dW_dx": dw, "dW_dx_fd": fd, "fd_abs_diff": abs(fd - dw)},
    )


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepConfig:
    r_values: list[float]
    families: list[str]
    k_values: list[int] = field(default_factory=lambda: [2, 3])
    resolution: int = HARNESS_RESOLUTION
    seed: int = 0
    clt_k_max: int = 64

    def __post_init__(self):
        if not self.r_values:
            raise ValueError("config needs at least one r value")
        if not self.families:
            raise ValueError("config needs at least one family")
        if not self.k_values:
            raise ValueError("config needs at least one k value")
        for r in self.r_values:
            if not 0.0 < r < 1.0:
                raise ValueError(f"r = {r!r} must lie strictly inside (0, 1)")
        for k in self.k_values:
            if k < 2:
                raise ValueError("k values must be at least 2")
        if self.resolution < 1:
            raise ValueError("resolution must be positive")
        for spec in self.families:
            parse_family(spec)

    @classmethod
    def from_text(cls, text: str) -> "SweepConfig":
        """Parse ``key = value`` lines; ``family`` may repeat, ``#`` starts a comment.

        Lists are comma separated: ``r = 0.3, 0.5``.
        """
        data: dict = {"families": []}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                if key == "family":
                    data["families"].append(value)
                elif key == "r":
                    data["r_values"] = [float(v) for v in value.split(",") if v.strip()]
                elif key == "k":
                    data["k_values"] = [int(v) for v in value.split(",") if v.strip()]
                elif key in ("resolution", "seed", "clt_k_max"):
                    data[key] = int(value)
                else:
                    raise ValueError(f"unknown key {key!r}")
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if "r_values" not in data:
            raise ValueError("config needs an 'r' line")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "SweepConfig":
        return cls.from_text(Path(path).read_text())


def _tag(report: VerificationReport, r: float | None, family: str) -> VerificationReport:
    report.numerics["r"] = r
    report.numerics["family"] = family
    return report


def _guarded(claim_id: str, inputs: str, fn, *args, **kwargs) -> VerificationReport:
    try:
        return fn(*args, **kwargs)
    except PreconditionError as exc:
        return VerificationReport.precondition(claim_id, inputs, str(exc))


FMW_Q_SHIFT = 0.5
PHI_T_GRID = tuple(0.25 * i for i in range(1, 13))


def run_sweep(cfg: SweepConfig) -> list[VerificationReport]:
    """All claims over r x families (x k), in a fixed order."""
    rng = np.random.default_rng(cfg.seed)
    fams = [parse_family(s) for s in cfg.families]
    res = cfg.resolution
    out: list[VerificationReport] = []
    for r in cfg.r_values:
        grids = {f.spec: _grid(f, r, res) for f in fams}
        out.append(_tag(calculus_lemma_check(r), r, ""))
        s = (1 - r) / r
        x = float(rng.uniform(0.05, 0.95)) * s
        out.append(_tag(log_A_check(x, s - x), r, ""))
        out.append(_tag(sharpness_exponential(r, constants.alpha(r)), r, "exponential"))
        for i, f in enumerate(fams):
            g = grids[f.spec]
            q = r + FMW_Q_SHIFT * (1 - r)
            pre = f.log_concave
            label = f.spec
            if pre:
                out.append(_tag(fmw_comparison_check(g, r, q), r, label))
                out.append(_tag(phi_log_concavity_check(g, PHI_T_GRID), r, label))
            else:
                out.append(_tag(VerificationReport.precondition("lem2.2", label, "not log-concave"), r, label))
                out.append(_tag(VerificationReport.precondition("thmA.1", label, "not log-concave"), r, label))
            for f2 in fams[i:]:
                pair = f"{label} + {f2.spec}"
                main = _guarded("thm1.1", pair, verify_main_epi, f, f2, r, resolution=res)
                out.append(_tag(main, r, pair))
                if main.status != PRECONDITION and closed_form_sum_entropy_power(f, f2, r) is not None:
                    out.append(_tag(consistency_report(f, f2, r, res), r, pair))
                out.append(_tag(rearrangement_monotonicity_check(g, grids[f2.spec], r), r, pair))
                xi = float(rng.uniform(0.05, 0.95)) * s
                p, q2 = 1.0 / (xi + 1.0), 1.0 / (s - xi + 1.0)
                out.append(_tag(reverse_young_margin(g, grids[f2.spec], p, q2, r), r, pair))
            for k in cfg.k_values:
                kt = _guarded("thm1.4", f"{k} x {label}", verify_ktuple_epi, [f] * k, r, resolution=res)
                out.append(_tag(kt, r, f"{k} x {label}"))
        la, lb = rng.uniform(0.1, 2.0, size=2)
        out.append(_tag(verify_uniform_epi(float(la), float(lb), r, res), r, "uniform pair"))
    if 0.5 in cfg.r_values and cfg.clt_k_max > 0:
        out.append(_tag(clt_sharpness(0.5, cfg.clt_k_max), 0.5, "laplace var=1"))
    return out


def summarize(reports: list[VerificationReport]) -> dict[str, int]:
    counts = {"pass": 0, "fail": 0, PRECONDITION: 0}
    for rep in reports:
        counts[rep.status] += 1
    return counts


def all_passed(reports: list[VerificationReport]) -> bool:
    return all(rep.passed or rep.status == PRECONDITION for rep in reports)


def reports_to_json(reports: list[VerificationReport]) -> str:
    return json.dumps([rep.to_dict() for rep in reports], indent=2, sort_keys=True)


def reports_to_csv(reports: list[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["claim_id", "r", "family", "margin", "pass"])
    for rep in reports:
        writer.writerow(
            [rep.claim_id, rep.numerics.get("r", ""), rep.numerics.get("family", ""), repr(rep.margin), rep.status]
        )
    return buf.getvalue()
