"""Seeded verification campaigns and their JSON / CSV reports.

Every campaign is a pure function of its :class:`CampaignConfig`: sample
``k`` draws from its own generator ``SeedSequence(seed, spawn_key=(k,))``,
so reports are reproducible and independent of the sample count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .charts import (
    RankChartSpec,
    SkewChartSpec,
    SymChartSpec,
    conjugated_chart,
    great_circle_chart,
    latitude_circle_chart,
    manifold_dim,
    rank1_sym_circle_chart,
    rank_chart,
    rank_tangent_frame,
    skew_chart,
    skew_tangent_frame,
    sphere_graph_chart,
    sphere_slice_chart,
    sym_chart,
)
from .curvature import (
    CLOSED,
    FD,
    ILL_CONDITIONED_GAP,
    analytic_gram_inverse_rank,
    analytic_gram_inverse_skew,
    analytic_gram_rank,
    analytic_gram_skew,
    cone_chart,
    cone_sphere_check,
    first_derivatives_fd,
    gram,
    mean_curvature,
)
from .errors import MMMError, SpecError
from .linalg import numeric_rank, random_orthogonal
from .strata import MultiplicityPattern, distinct_values, patterns, stabilizer

__all__ = [
    "CampaignConfig",
    "FAMILIES",
    "DEFAULT_TOL",
    "run",
    "run_verify",
    "run_counterexample",
    "run_check_gram",
    "run_cone_sphere",
    "run_dims",
    "exit_code",
    "dumps",
    "to_csv",
    "strip_timing",
]

FAMILIES = ("rank", "skew", "sym", "counterexample", "gram", "cone_sphere", "dims")
DEFAULT_TOL = {CLOSED: 1e-6, FD: 1e-4}
COUNTEREXAMPLE_TOL = 1e-3
INVARIANCE_TOL = 1e-6
GRAM_TOL, GRAM_INV_TOL = 1e-8, 1e-10
CONE_TOL = 1e-6

SIGMA_RANGE = (0.5, 3.0)
LAMBDA_RANGE = (-3.0, 3.0)


@dataclass
class CampaignConfig:
    family: str
    m: Optional[int] = None
    n: Optional[int] = None
    r: Optional[int] = None
    pattern: Optional[str] = None
    values: Optional[tuple] = None
    samples: int = 10
    seed: int = 0
    tol: Optional[float] = None
    method: Optional[str] = None
    gap: float = 0.1
    h1: Optional[float] = None
    h2: Optional[float] = None
    richardson: bool = False
    gram_family: str = "both"
    rank_tol: float = 1e-10

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}")
        if self.samples < 1:
            raise SpecError("samples must be at least 1")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise SpecError("seed must be an unsigned 64-bit integer")
        if self.method not in (None, CLOSED, FD, "both"):
            raise SpecError(f"unknown method {self.method!r}")
        if self.gap <= 0:
            raise SpecError("gap must be positive")
        if self.rank_tol <= 0:
            raise SpecError("rank_tol must be positive")
        if self.family == "rank":
            self.m = 2 if self.m is None else self.m
            self.n = 3 if self.n is None else self.n
            self.r = 1 if self.r is None else self.r
            if not (1 <= self.r <= self.m <= self.n):
                raise SpecError(f"need 1 <= r <= m <= n, got m={self.m}, n={self.n}, r={self.r}")
        elif self.family == "skew":
            self.n = 4 if self.n is None else self.n
            self.r = 1 if self.r is None else self.r
            if not (1 <= self.r <= self.n // 2):
                raise SpecError(f"need 1 <= r <= n/2, got n={self.n}, r={self.r}")
        elif self.family == "sym":
            pat = MultiplicityPattern.parse(self.pattern or "1,1")
            self.pattern = ",".join(map(str, pat.kappa))
            if self.n is not None and self.n != pat.n:
                raise SpecError(f"pattern {pat} has size {pat.n}, not n={self.n}")
            if self.method == CLOSED:
                raise SpecError("symmetric strata have no closed-form path; use --method fd")
        if self.values is not None:
            self.values = tuple(float(v) for v in self.values)

    @property
    def kappa(self) -> MultiplicityPattern:
        return MultiplicityPattern.parse(self.pattern)

    def methods(self) -> tuple:
        if self.family == "sym":
            return (FD,)
        m = self.method or CLOSED
        return (CLOSED, FD) if m == "both" else (m,)

    def tolerance(self, method: str) -> float:
        return self.tol if self.tol is not None else DEFAULT_TOL[method]

    def fd_options(self) -> dict:
        return {"h1": self.h1, "h2": self.h2, "richardson": self.richardson}

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def random_rank_spec(rng, m, n, r, gap=0.1, values=None) -> RankChartSpec:
    sig = values if values is not None else distinct_values(rng, r, *SIGMA_RANGE, gap)
    return RankChartSpec(m, n, r, tuple(sig))


def random_skew_spec(rng, n, r, gap=0.1, values=None) -> SkewChartSpec:
    om = values if values is not None else distinct_values(rng, r, *SIGMA_RANGE, gap)
    return SkewChartSpec(n, r, tuple(om))


def random_sym_spec(rng, pattern: MultiplicityPattern, gap=0.1, values=None) -> SymChartSpec:
    if values is None:
        values = rng.permutation(distinct_values(rng, pattern.num_distinct, *LAMBDA_RANGE, gap))
    return SymChartSpec(pattern, tuple(values))


def _spec_echo(spec) -> dict:
    if isinstance(spec, RankChartSpec):
        return {"m": spec.m, "n": spec.n, "r": spec.r, "sigma": list(spec.sigma)}
    if isinstance(spec, SkewChartSpec):
        return {"n": spec.n, "r": spec.r, "omega": list(spec.omega)}
    return {"n": spec.n, "pattern": list(spec.pattern.kappa), "lambda": list(spec.lambda_distinct)}


def _build(config: CampaignConfig, rng):
    if config.family == "rank":
        spec = random_rank_spec(rng, config.m, config.n, config.r, config.gap, config.values)
        return spec, rank_chart(spec)
    if config.family == "skew":
        spec = random_skew_spec(rng, config.n, config.r, config.gap, config.values)
        return spec, skew_chart(spec)
    spec = random_sym_spec(rng, config.kappa, config.gap, config.values)
    return spec, sym_chart(spec)


def _conjugate(chart, rng):
    m, n = chart.ambient.shape
    if chart.ambient.kind == "rect":
        return conjugated_chart(chart, random_orthogonal(m, rng), random_orthogonal(n, rng))
    return conjugated_chart(chart, random_orthogonal(n, rng))


def _verify_sample(config: CampaignConfig, index: int) -> dict:
    rng = sample_rng(config.seed, index)
    rec: dict = {"index": index}
    try:
        spec, chart = _build(config, rng)
    except MMMError as exc:
        rec.update(verdict="error", error=str(exc))
        return rec
    rec["spec"] = _spec_echo(spec)
    rec["dim"] = chart.dim_params
    rec["ill_conditioned"] = bool(spec.min_gap < ILL_CONDITIONED_GAP)
    results, ok = {}, True
    try:
        for method in config.methods():
            res = mean_curvature(chart, method=method,
                                 **(config.fd_options() if method == FD else {}))
            tol = config.tolerance(method)
            passed = res.h_norm <= tol
            ok &= passed
            results[method] = {
                "h_norm": res.h_norm,
                "tangential_residual": res.normal_residual,
                "gram_condition": res.gram_condition,
                "tol": tol,
                "verdict": "pass" if passed else "fail",
                "h": res.h.tolist(),
            }
        if FD in results:
            conj = mean_curvature(_conjugate(chart, rng), method=FD, **config.fd_options())
            gap = abs(conj.h_norm - results[FD]["h_norm"])
            rec["conjugated_h_norm"] = conj.h_norm
            rec["invariance_gap"] = gap
            ok &= gap <= INVARIANCE_TOL
    except MMMError as exc:
        rec.update(results=results, verdict="error", error=str(exc))
        return rec
    rec["method"] = config.method or ("fd" if config.family == "sym" else CLOSED)
    rec["h_norm"] = max(r["h_norm"] for r in results.values())
    rec["tangential_residual"] = max(r["tangential_residual"] for r in results.values())
    rec["gram_condition"] = max(r["gram_condition"] for r in results.values())
    rec["results"] = results
    rec["verdict"] = "pass" if ok else "fail"
    return rec


def _summary(records: list, started: float, key: str = "h_norm") -> dict:
    counts = {v: sum(1 for r in records if r.get("verdict") == v) for v in ("pass", "fail", "error")}
    vals = [r[key] for r in records if key in r]
    return {
        "samples": len(records),
        "passed": counts["pass"],
        "failed": counts["fail"],
        "errors": counts["error"],
        "max_" + key: max(vals) if vals else None,
        "all_pass": counts["pass"] == len(records),
        "wall_time_s": time.perf_counter() - started,
    }


def _report(config: CampaignConfig, summary: dict, records: list) -> dict:
    return {"config": config.echo(), "summary": summary, "samples": records}


def run_verify(config: CampaignConfig) -> dict:
    """Minimality campaign for the rank, skew or sym family."""
    t0 = time.perf_counter()
    records = [_verify_sample(config, k) for k in range(config.samples)]
    return _report(config, _summary(records, t0), records)


def circle_oracle(points: np.ndarray) -> float:
    """Geodesic curvature of a small circle on the unit sphere from sample points.

    The circle's centre in R^N is the mean of evenly spaced points and its
    Euclidean radius rho gives the angular radius alpha = arcsin(rho); the
    geodesic curvature is cot(alpha).
    """
    pts = points.reshape(points.shape[0], -1)
    centre = pts.mean(axis=0)
    rho = float(np.mean(np.linalg.norm(pts - centre, axis=1)))
    return math.sqrt(max(0.0, 1.0 - rho ** 2)) / rho


def run_counterexample(config: CampaignConfig) -> dict:
    """Rank-one symmetric 2x2 cone: expected |H| = 1 at unit-norm points."""
    t0 = time.perf_counter()
    tol = config.tol if config.tol is not None else COUNTEREXAMPLE_TOL
    ring = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    oracle = circle_oracle(np.array([rank1_sym_circle_chart(t).base for t in ring]))
    records = []
    for k in range(config.samples):
        rng = sample_rng(config.seed, k)
        theta0 = float(rng.uniform(0, 2 * np.pi))
        sign = float(rng.choice([-1.0, 1.0]))
        chart = cone_chart(rank1_sym_circle_chart(theta0, sign))
        res = mean_curvature(chart, method=FD, **config.fd_options())
        met = abs(res.h_norm - 1.0) <= tol
        records.append({
            "index": k,
            "spec": {"theta0": theta0, "sign": sign, "base": chart.base.tolist()},
            "h_norm": res.h_norm,
            "tangential_residual": res.normal_residual,
            "gram_condition": res.gram_condition,
            "method": FD,
            "oracle_h_norm": oracle,
            "h": res.h.tolist(),
            "minimal": res.h_norm <= DEFAULT_TOL[FD],
            "expected_nonminimal": True,
            "expectation_met": met,
            "verdict": "pass" if res.h_norm <= DEFAULT_TOL[FD] else "fail",
        })
    summary = _summary(records, t0)
    summary["oracle_h_norm"] = oracle
    summary["expectation_met"] = sum(r["expectation_met"] for r in records)
    # non-minimality is the expected outcome here
    summary["all_pass"] = summary["expectation_met"] == len(records)
    return _report(config, summary, records)


def _gram_record(family: str, spec, tangent, analytic, analytic_inv, chart, fd_h1) -> dict:
    numeric_fd = gram(first_derivatives_fd(chart, fd_h1)).g
    closed = gram(tangent).g
    resid = float(np.max(np.abs(analytic.g - numeric_fd)))
    inv_resid = float(np.max(np.abs(closed @ analytic_inv.g - np.eye(closed.shape[0]))))
    ok = resid <= GRAM_TOL and inv_resid <= GRAM_INV_TOL
    return {
        "family": family,
        "spec": _spec_echo(spec),
        "dim": closed.shape[0],
        "gram_residual": resid,
        "inverse_residual": inv_resid,
        "gram_condition": float(np.linalg.cond(closed)),
        "ill_conditioned": bool(spec.min_gap < ILL_CONDITIONED_GAP),
        "verdict": "pass" if ok else "fail",
    }


def run_check_gram(config: CampaignConfig) -> dict:
    """Closed-form Gram matrices and inverses against numeric ones."""
    t0 = time.perf_counter()
    fams = ("rank", "skew") if config.gram_family == "both" else (config.gram_family,)
    records = []
    for k in range(config.samples):
        rng = sample_rng(config.seed, k)
        for fam in fams:
            if fam == "rank":
                m, n, r = config.m or 3, config.n or 4, config.r or 2
                spec = random_rank_spec(rng, m, n, r, config.gap, config.values)
                rec = _gram_record("rank", spec, rank_tangent_frame(spec), analytic_gram_rank(spec),
                                   analytic_gram_inverse_rank(spec), rank_chart(spec), config.h1)
            else:
                n, r = config.n or 5, config.r or 2
                spec = random_skew_spec(rng, n, r, config.gap, config.values)
                rec = _gram_record("skew", spec, skew_tangent_frame(spec), analytic_gram_skew(spec),
                                   analytic_gram_inverse_skew(spec), skew_chart(spec), config.h1)
            rec["index"] = len(records)
            records.append(rec)
    summary = _summary(records, t0, key="gram_residual")
    summary["max_inverse_residual"] = max(r["inverse_residual"] for r in records)
    return _report(config, summary, records)


def cone_sphere_charts(rng) -> list:
    """(name, sphere chart, expected |H|) for one cone-sphere sample."""
    theta0 = float(rng.uniform(0, 2 * np.pi))
    spec = random_rank_spec(rng, 2, 3, 1)
    rank = rank_chart(spec)
    return [
        ("great_circle", great_circle_chart(theta0), 0.0),
        ("latitude_circle", latitude_circle_chart(np.pi / 4, theta0), 1.0),
        ("rank1_sym_cone", rank1_sym_circle_chart(theta0), 1.0),
        ("normalized_rank_2_3_1", sphere_slice_chart(rank, rank.dim_params - 1), 0.0),
    ]


def run_cone_sphere(config: CampaignConfig) -> dict:
    """Cone versus sphere-slice mean curvature, plus the S^2 sanity value."""
    t0 = time.perf_counter()
    records = []
    for k in range(config.samples):
        rng = sample_rng(config.seed, k)
        for name, chart, expected in cone_sphere_charts(rng):
            rep = cone_sphere_check(chart, **config.fd_options())
            ok = rep.difference <= CONE_TOL and abs(rep.h_sphere - expected) <= CONE_TOL
            records.append({
                "index": len(records), "sample": k, "chart": name,
                "h_cone": rep.h_cone, "h_sphere": rep.h_sphere, "difference": rep.difference,
                "expected_h_norm": expected, "verdict": "pass" if ok else "fail",
            })
    s2 = mean_curvature(sphere_graph_chart(), method=FD, **config.fd_options())
    summary = _summary(records, t0, key="difference")
    summary["sphere_s2_h_norm"] = s2.h_norm
    summary["sphere_s2_ok"] = abs(s2.h_norm - 2.0) <= CONE_TOL
    summary["all_pass"] = summary["all_pass"] and summary["sphere_s2_ok"]
    return _report(config, summary, records)


def dims_sweep():
    """(family, params) rows of the built-in dimension sweep."""
    rows = []
    for n in range(1, 6):
        for m in range(1, n + 1):
            for r in range(1, m + 1):
                rows.append(("rank", {"m": m, "n": n, "r": r}))
    for n in range(2, 7):
        for r in range(1, n // 2 + 1):
            rows.append(("skew", {"n": n, "r": r}))
    for n in range(1, 6):
        for pat in patterns(n):
            rows.append(("sym", {"pattern": pat}))
    return rows


def run_dims(config: CampaignConfig) -> dict:
    """Dimension formulas against the numeric rank of each chart's Jacobian."""
    t0 = time.perf_counter()
    rng = sample_rng(config.seed, 0)
    records = []
    for fam, params in dims_sweep():
        if fam == "rank":
            chart = rank_chart(random_rank_spec(rng, params["m"], params["n"], params["r"], config.gap))
            echo = dict(params, rank=params["r"])
        elif fam == "skew":
            chart = skew_chart(random_skew_spec(rng, params["n"], params["r"], config.gap))
            echo = dict(params, rank=2 * params["r"])
        else:
            pat = params["pattern"]
            chart = sym_chart(random_sym_spec(rng, pat, config.gap))
            echo = {"n": pat.n, "pattern": list(pat.kappa)}
        formula = manifold_dim(fam, **params)
        numeric = numeric_rank(first_derivatives_fd(chart, config.h1).vectors, config.rank_tol)
        rec = {"index": len(records), "family": fam, "params": echo, "formula": formula,
               "numeric": numeric, "chart_params": chart.dim_params}
        if fam == "sym":
            pat = params["pattern"]
            n = pat.n
            rec["orbit_count"] = pat.num_distinct + n * (n - 1) // 2 - stabilizer(pat).dim
        ok = formula == numeric == chart.dim_params == rec.get("orbit_count", formula)
        rec["verdict"] = "pass" if ok else "fail"
        records.append(rec)
    summary = _summary(records, t0, key="formula")
    return _report(config, summary, records)


def run(config: CampaignConfig) -> dict:
    if config.family in ("rank", "skew", "sym"):
        return run_verify(config)
    return {"counterexample": run_counterexample, "gram": run_check_gram,
            "cone_sphere": run_cone_sphere, "dims": run_dims}[config.family](config)


def exit_code(report: dict) -> int:
    return 0 if report["summary"]["all_pass"] else 1


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict, indent: int = 2) -> str:
    """JSON with every float written to 17 significant digits."""
    return _encode(report, indent, 0) + "\n"


def strip_timing(report: dict) -> dict:
    out = json.loads(dumps(report))
    out["summary"].pop("wall_time_s", None)
    return out


def _flatten(rec: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            flat[key] = _encode(v, 0, 0).replace("\n", "")
        elif isinstance(v, float):
            flat[key] = _fmt_float(v)
        else:
            flat[key] = v
    return flat


def to_csv(report: dict) -> str:
    """One row per sample; nested fields become dotted column names."""
    rows = [_flatten({k: v for k, v in r.items() if k != "h" and not (
        isinstance(v, dict) and k == "results")} | _flatten_results(r)) for r in report["samples"]]
    cols: list = []
    for row in rows:
        cols += [c for c in row if c not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _flatten_results(rec: dict) -> dict:
    res = rec.get("results")
    if not isinstance(res, dict):
        return {}
    return {f"{meth}.{k}": v for meth, r in res.items() for k, v in r.items() if k != "h"}
