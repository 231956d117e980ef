"""Mean curvature of an embedded submanifold from a local chart.

The mean curvature vector at ``r(0)`` is the trace of the inverse metric
against the normal part of the Hessian of the chart,

    H = sum_ij (G^{-1})_ij (d_i d_j r(0))^perp,

without the customary ``1/dim`` normalization.  Two routes are provided:
finite differences on an arbitrary chart, and closed forms for the rank and
skew families at their normal-form base points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .charts import (
    TANGENT,
    Chart,
    Frame,
    RankChartSpec,
    SkewChartSpec,
    _L,
    rank_chart,
    rank_parameters,
    rank_tangent_frame,
    skew_chart,
    skew_parameters,
    skew_tangent_frame,
)
from .errors import AmbientError, SingularMetricError, SpecError, StepError
from .linalg import matrix_unit

__all__ = [
    "FD",
    "CLOSED",
    "GramMatrix",
    "SecondDerivTensor",
    "MeanCurvatureResult",
    "ConeSphereReport",
    "gram",
    "analytic_gram_rank",
    "analytic_gram_inverse_rank",
    "analytic_gram_skew",
    "analytic_gram_inverse_skew",
    "first_derivatives_fd",
    "second_derivatives_fd",
    "second_derivatives_closed_rank",
    "second_derivatives_closed_skew",
    "normal_project",
    "tangent_project",
    "mean_curvature",
    "sphere_mean_curvature",
    "cone_chart",
    "cone_sphere_check",
    "ILL_CONDITIONED_GAP",
]

log = logging.getLogger(__name__)

FD, CLOSED = "fd", "closed"

# spectra with a smaller gap are reported as ill-conditioned, not rejected
ILL_CONDITIONED_GAP = 0.05

H1_REL, H2_REL = 1e-5, 1e-3


@dataclass(frozen=True)
class GramMatrix:
    g: np.ndarray
    basis_label: tuple = ()

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @property
    def condition(self) -> float:
        if self.dim == 0:
            return 1.0
        return float(np.linalg.cond(self.g))


def gram(frame: Frame) -> GramMatrix:
    """Pairwise Frobenius inner products of the frame vectors."""
    f = frame.flat
    g = f @ f.T
    g = 0.5 * (g + g.T)
    if g.shape[0]:
        ev = np.linalg.eigvalsh(g)
        if ev[0] <= 1e-14 * max(ev[-1], 1e-300):
            raise SingularMetricError(
                f"degenerate frame: Gram eigenvalues range over [{ev[0]:.3g}, {ev[-1]:.3g}]")
    return GramMatrix(g, frame.labels)


# --------------------------------------------------------------------------
# closed-form metrics
# --------------------------------------------------------------------------

def analytic_gram_rank(spec: RankChartSpec) -> GramMatrix:
    """Metric of the rank chart at Sigma in chart parameter order."""
    mu, nu, sh = rank_parameters(spec.m, spec.n, spec.r)
    s = spec.s
    d = len(mu) + len(nu) + len(sh)
    g = np.zeros((d, d))
    nu_pos = {p: len(mu) + k for k, p in enumerate(nu)}
    for a, (i, j) in enumerate(mu):
        g[a, a] = s(i) ** 2 + s(j) ** 2
        if j <= spec.r:
            b = nu_pos[(i, j)]
            g[a, b] = g[b, a] = -2.0 * s(i) * s(j)
    for b, (k, l) in enumerate(nu):
        g[len(mu) + b, len(mu) + b] = s(k) ** 2 + s(l) ** 2
    for h in range(len(sh)):
        g[d - len(sh) + h, d - len(sh) + h] = 1.0
    return GramMatrix(g, rank_tangent_frame(spec).labels)


def analytic_gram_inverse_rank(spec: RankChartSpec) -> GramMatrix:
    """Inverse metric of the rank chart, entry by entry from the singular values."""
    mu, nu, sh = rank_parameters(spec.m, spec.n, spec.r)
    s = spec.s
    d = len(mu) + len(nu) + len(sh)
    gi = np.zeros((d, d))
    nu_pos = {p: len(mu) + k for k, p in enumerate(nu)}
    for a, (i, j) in enumerate(mu):
        b = nu_pos[(i, j)]
        if j <= spec.r:
            den = (s(i) ** 2 - s(j) ** 2) ** 2
            if den == 0:
                raise SingularMetricError(f"repeated singular value sigma_{i} = sigma_{j}")
            gi[a, a] = gi[b, b] = (s(i) ** 2 + s(j) ** 2) / den
            gi[a, b] = gi[b, a] = 2.0 * s(i) * s(j) / den
        else:
            gi[a, a] = s(i) ** -2
    for b, (k, l) in enumerate(nu):
        if l > spec.r:
            gi[len(mu) + b, len(mu) + b] = s(k) ** -2
    for h in range(len(sh)):
        gi[d - len(sh) + h, d - len(sh) + h] = 1.0
    return GramMatrix(gi, rank_tangent_frame(spec).labels)


def _group_block(wp: float, wq: float, sign: float) -> np.ndarray:
    a, b = wp ** 2 + wq ** 2, 2.0 * wp * wq
    return np.array([[a, 0, 0, -sign * b],
                     [0, a, sign * b, 0],
                     [0, sign * b, a, 0],
                     [-sign * b, 0, 0, a]])


def analytic_gram_skew(spec: SkewChartSpec) -> GramMatrix:
    """2 * blockdiag(G_pq, omega^2 per outer index, Id)."""
    groups, outer, sh = skew_parameters(spec.n, spec.r)
    d = len(groups) + len(outer) + len(sh)
    g = np.zeros((d, d))
    k = 0
    for p in range(1, spec.r + 1):
        for q in range(p + 1, spec.r + 1):
            g[k:k + 4, k:k + 4] = _group_block(spec.w(p), spec.w(q), 1.0)
            k += 4
    for i, _ in outer:
        g[k, k] = spec.w((i + 1) // 2) ** 2
        k += 1
    for _ in sh:
        g[k, k] = 1.0
        k += 1
    return GramMatrix(2.0 * g, skew_tangent_frame(spec).labels)


def analytic_gram_inverse_skew(spec: SkewChartSpec) -> GramMatrix:
    """1/2 * blockdiag(G_pq^{-1}, omega^-2 per outer index, Id)."""
    groups, outer, sh = skew_parameters(spec.n, spec.r)
    d = len(groups) + len(outer) + len(sh)
    gi = np.zeros((d, d))
    k = 0
    for p in range(1, spec.r + 1):
        for q in range(p + 1, spec.r + 1):
            wp, wq = spec.w(p), spec.w(q)
            den = (wp ** 2 - wq ** 2) ** 2
            if den == 0:
                raise SingularMetricError(f"repeated value omega_{p} = omega_{q}")
            gi[k:k + 4, k:k + 4] = _group_block(wp, wq, -1.0) / den
            k += 4
    for i, _ in outer:
        gi[k, k] = spec.w((i + 1) // 2) ** -2
        k += 1
    for _ in sh:
        gi[k, k] = 1.0
        k += 1
    return GramMatrix(0.5 * gi, skew_tangent_frame(spec).labels)


# --------------------------------------------------------------------------
# derivatives
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SecondDerivTensor:
    """``entries[i, j]`` is d_i d_j r(0); ``mask[i, j]`` marks populated entries."""

    entries: np.ndarray
    mask: np.ndarray
    method: str

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def symmetry_defect(self) -> float:
        m = self.mask & self.mask.T
        diff = self.entries - np.swapaxes(self.entries, 0, 1)
        return float(np.max(np.abs(diff[m]), initial=0.0))

    def scale(self) -> float:
        """Largest Frobenius norm among populated entries."""
        if not self.mask.any():
            return 0.0
        norms = np.linalg.norm(self.entries.reshape(self.dim, self.dim, -1), axis=-1)
        return float(norms[self.mask].max())


def _step(chart: Chart, h: Optional[float], rel: float) -> float:
    h = rel * chart.box_scale if h is None else float(h)
    if not (0 < h <= chart.box):
        raise StepError(f"step {h:.3g} outside the parameter box of half-width {chart.box:.3g}")
    return h


def first_derivatives_fd(chart: Chart, h: Optional[float] = None) -> Frame:
    """Central differences (r(h e_i) - r(-h e_i)) / 2h."""
    h = _step(chart, h, H1_REL)
    d = chart.dim_params
    out = np.empty((d,) + chart.ambient.shape)
    e = np.zeros(d)
    for i in range(d):
        e[i] = h
        out[i] = (chart.eval(e) - chart.eval(-e)) / (2 * h)
        e[i] = 0.0
    return Frame(out, TANGENT, chart.param_labels)


def _hessian_fd(chart: Chart, h: float) -> np.ndarray:
    d = chart.dim_params
    f0 = chart.base
    out = np.empty((d, d) + chart.ambient.shape)
    u = np.zeros(d)
    for i in range(d):
        u[i] = h
        fp = chart.eval(u)
        u[i] = -h
        fm = chart.eval(u)
        u[i] = 0.0
        out[i, i] = (fp - 2 * f0 + fm) / h ** 2
    for i in range(d):
        for j in range(i + 1, d):
            acc = 0.0
            for si, sj, w in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                u[i], u[j] = si * h, sj * h
                acc = acc + w * chart.eval(u)
            u[i] = u[j] = 0.0
            out[i, j] = out[j, i] = acc / (4 * h ** 2)
    return out


def second_derivatives_fd(chart: Chart, h: Optional[float] = None,
                          richardson: bool = False) -> SecondDerivTensor:
    """Full Hessian of the chart at 0 by second-order central differences.

    With ``richardson`` the estimates at ``h`` and ``h/2`` are combined to
    cancel the leading ``h^2`` error term.
    """
    h = _step(chart, h, H2_REL)
    hess = _hessian_fd(chart, h)
    if richardson:
        hess = (4.0 * _hessian_fd(chart, h / 2) - hess) / 3.0
    d = chart.dim_params
    return SecondDerivTensor(hess, np.ones((d, d), dtype=bool), FD)


def _fill_from_fd(tensor: np.ndarray, mask: np.ndarray, chart: Chart) -> SecondDerivTensor:
    fd = second_derivatives_fd(chart).entries
    tensor = np.where(mask[(...,) + (None,) * (tensor.ndim - 2)], tensor, fd)
    return SecondDerivTensor(tensor, np.ones_like(mask), CLOSED + "+" + FD)


def second_derivatives_closed_rank(spec: RankChartSpec, full: bool = False) -> SecondDerivTensor:
    """Second derivatives of the rank chart at the entries where G^{-1} is nonzero.

    (mu_ij, mu_ij) -> -s_i E_ii - s_j E_jj, (nu_kl, nu_kl) -> -s_k E_kk - s_l E_ll,
    (s_h, s_h) -> 0 and (mu_ij, nu_ij) -> s_j E_ii + s_i E_jj for j <= r.
    ``full`` fills the remaining entries by finite differences.
    """
    m, n, r = spec.m, spec.n, spec.r
    mu, nu, sh = rank_parameters(m, n, r)
    s = spec.s
    d = len(mu) + len(nu) + len(sh)
    t = np.zeros((d, d, m, n))
    mask = np.zeros((d, d), dtype=bool)

    def diag_unit(k):
        return matrix_unit(m, n, k, k) if k <= m else np.zeros((m, n))

    nu_pos = {p: len(mu) + k for k, p in enumerate(nu)}
    for a, (i, j) in enumerate(mu):
        t[a, a] = -s(i) * diag_unit(i) - s(j) * diag_unit(j)
        mask[a, a] = True
        if j <= r:
            b = nu_pos[(i, j)]
            t[a, b] = t[b, a] = s(j) * diag_unit(i) + s(i) * diag_unit(j)
            mask[a, b] = mask[b, a] = True
    for b, (k, l) in enumerate(nu):
        c = len(mu) + b
        t[c, c] = -s(k) * diag_unit(k) - s(l) * diag_unit(l)
        mask[c, c] = True
    for h in range(len(sh)):
        mask[d - len(sh) + h, d - len(sh) + h] = True
    if full:
        return _fill_from_fd(t, mask, rank_chart(spec))
    return SecondDerivTensor(t, mask, CLOSED)


def second_derivatives_closed_skew(spec: SkewChartSpec, full: bool = False) -> SecondDerivTensor:
    """Second derivatives of the skew chart where G^{-1} is nonzero.

    (s_h, s_h) -> 0; (mu_ij, mu_ij) for i <= 2r < j -> omega L_{i-1,i} (i even)
    or omega L_{i,i+1} (i odd); inside a (p,q)-group the 4x4 table of
    combinations of L_{2p-1,2p} and L_{2q-1,2q}.
    """
    n, r = spec.n, spec.r
    groups, outer, sh = skew_parameters(n, r)
    d = len(groups) + len(outer) + len(sh)
    t = np.zeros((d, d, n, n))
    mask = np.zeros((d, d), dtype=bool)
    k = 0
    for p in range(1, r + 1):
        for q in range(p + 1, r + 1):
            wp, wq = spec.w(p), spec.w(q)
            lp, lq = _L(n, 2 * p - 1, 2 * p), _L(n, 2 * q - 1, 2 * q)
            diag = wp * lp + wq * lq
            cross = wp * lq + wq * lp
            for a in range(4):
                t[k + a, k + a] = diag
                mask[k + a, k + a] = True
            t[k, k + 3] = t[k + 3, k] = -cross
            t[k + 1, k + 2] = t[k + 2, k + 1] = cross
            mask[k, k + 3] = mask[k + 3, k] = mask[k + 1, k + 2] = mask[k + 2, k + 1] = True
            k += 4
    for i, _ in outer:
        w = spec.w((i + 1) // 2)
        t[k, k] = w * (_L(n, i - 1, i) if i % 2 == 0 else _L(n, i, i + 1))
        mask[k, k] = True
        k += 1
    for _ in sh:
        mask[k, k] = True
        k += 1
    if full:
        return _fill_from_fd(t, mask, skew_chart(spec))
    return SecondDerivTensor(t, mask, CLOSED)


# --------------------------------------------------------------------------
# projections and the trace formula
# --------------------------------------------------------------------------

def _orthonormal_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the flattened vectors (QR, not the Gram matrix)."""
    flat = vectors.reshape(vectors.shape[0], -1)
    if flat.shape[0] == 0:
        return np.zeros((flat.shape[1], 0))
    q, _ = np.linalg.qr(flat.T)
    return q


def tangent_project(v, tangent: Frame) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    q = _orthonormal_basis(tangent.vectors)
    return (q @ (q.T @ v.ravel())).reshape(v.shape)


def normal_project(v, tangent: Frame) -> np.ndarray:
    """Component of ``v`` orthogonal to the span of the tangent frame."""
    v = np.asarray(v, dtype=float)
    if len(tangent) and not tangent.is_independent():
        raise SingularMetricError("tangent frame is degenerate")
    return v - tangent_project(v, tangent)


@dataclass(frozen=True)
class MeanCurvatureResult:
    h: np.ndarray
    h_norm: float
    normal_residual: float
    method: str
    gram_condition: float = 1.0
    d2_scale: float = 0.0


def _contract(ginv: np.ndarray, d2: SecondDerivTensor) -> np.ndarray:
    w = np.where(d2.mask, ginv, 0.0)
    return np.tensordot(w, d2.entries, axes=([0, 1], [0, 1]))


def _finish(raw: np.ndarray, span: np.ndarray, tangent: Frame, method: str,
            cond: float, scale: float) -> MeanCurvatureResult:
    q = _orthonormal_basis(span)
    h = raw - (q @ (q.T @ raw.ravel())).reshape(raw.shape)
    resid = float(np.linalg.norm(tangent_project(h, tangent))) if len(tangent) else 0.0
    return MeanCurvatureResult(h, float(np.linalg.norm(h)), resid, method, cond, scale)


def mean_curvature(chart: Chart, method: str = "auto", h1: Optional[float] = None,
                   h2: Optional[float] = None, richardson: bool = False) -> MeanCurvatureResult:
    """Mean curvature vector of the chart's image at ``chart.base``.

    ``method="closed"`` uses the closed-form frame, inverse metric and
    Hessian entries; it needs a rank or skew chart built from its spec.
    ``"fd"`` works for any chart.  ``"auto"`` picks closed when available.
    """
    closed_ok = isinstance(chart.spec, (RankChartSpec, SkewChartSpec))
    if method == "auto":
        method = CLOSED if closed_ok else FD
    if method == CLOSED:
        if not closed_ok:
            raise SpecError(f"no closed form for chart {chart.label!r}")
        spec = chart.spec
        if isinstance(spec, RankChartSpec):
            tangent = rank_tangent_frame(spec)
            gi = analytic_gram_inverse_rank(spec)
            d2 = second_derivatives_closed_rank(spec)
            cond = analytic_gram_rank(spec).condition
        else:
            tangent = skew_tangent_frame(spec)
            gi = analytic_gram_inverse_skew(spec)
            d2 = second_derivatives_closed_skew(spec)
            cond = analytic_gram_skew(spec).condition
        raw = _contract(gi.g, d2)
        return _finish(raw, tangent.vectors, tangent, CLOSED, cond, d2.scale())
    if method != FD:
        raise ValueError(f"unknown method {method!r}")
    tangent = first_derivatives_fd(chart, h1)
    g = gram(tangent)
    d2 = second_derivatives_fd(chart, h2, richardson)
    raw = _contract(np.linalg.inv(g.g), d2)
    res = _finish(raw, tangent.vectors, tangent, FD, g.condition, d2.scale())
    log.debug("%s: |H| = %.3e (fd, cond %.3g)", chart.label, res.h_norm, res.gram_condition)
    return res


def sphere_mean_curvature(chart: Chart, h1: Optional[float] = None, h2: Optional[float] = None,
                          richardson: bool = False, tol: float = 1e-10) -> MeanCurvatureResult:
    """Mean curvature of a chart of X cap S^{N-1} inside the unit sphere.

    Second derivatives are projected onto T_p S^{N-1} = p^perp as well as
    off the tangent space of the slice.
    """
    p = chart.base
    hh = _step(chart, h2, H2_REL)
    probes = [p]
    e = np.zeros(chart.dim_params)
    for i in range(chart.dim_params):
        for sgn in (1.0, -1.0):
            e[i] = sgn * hh
            probes.append(chart.eval(e))
        e[i] = 0.0
    for x in probes:
        if abs(np.linalg.norm(x) - 1.0) > tol:
            raise AmbientError(f"chart {chart.label!r} leaves the unit sphere (|A| = {np.linalg.norm(x):.12g})")
    tangent = first_derivatives_fd(chart, h1)
    g = gram(tangent)
    d2 = second_derivatives_fd(chart, h2, richardson)
    raw = _contract(np.linalg.inv(g.g), d2)
    span = np.concatenate([tangent.vectors, p[None]], axis=0)
    return _finish(raw, span, tangent, FD, g.condition, d2.scale())


def cone_chart(sphere_chart: Chart) -> Chart:
    """R(u, t) = (1 + t) r(u): the cone over a chart of a sphere slice."""
    d = sphere_chart.dim_params

    def fn(v):
        return (1.0 + v[d]) * sphere_chart.eval(v[:d])

    return Chart(d + 1, sphere_chart.ambient, fn, label=f"cone[{sphere_chart.label}]",
                 box=min(sphere_chart.box, 0.5), box_scale=sphere_chart.box_scale,
                 param_labels=tuple(sphere_chart.param_labels) + ("t",))


@dataclass(frozen=True)
class ConeSphereReport:
    h_cone: float
    h_sphere: float
    difference: float

    def __iter__(self):
        return iter((self.h_cone, self.h_sphere, self.difference))


def cone_sphere_check(sphere_chart: Chart, **fd_options) -> ConeSphereReport:
    """Compare H of the cone in R^N with H of the slice in the sphere at the same point."""
    hc = mean_curvature(cone_chart(sphere_chart), method=FD, **fd_options)
    hs = sphere_mean_curvature(sphere_chart, **fd_options)
    return ConeSphereReport(hc.h_norm, hs.h_norm, float(np.linalg.norm(hc.h - hs.h)))
