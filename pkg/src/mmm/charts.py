"""Explicit local parametrizations of the fixed-rank, skew fixed-rank and
eigenvalue-multiplicity manifolds, together with closed-form tangent and
normal frames at their normal-form base points.

A chart is a callable ``u -> A(u)`` on a box ``|u_i| <= box`` around the
origin; ``chart.eval(0)`` is the base point.  Parameter orders are fixed
per family and the closed-form frames are listed in the same order:

* rank:  mu_ij (1<=i<j<=m, i<=r, lex), nu_kl (1<=k<l<=n, k<=r, lex), s_h
* skew:  (p,q)-groups of four, then mu_ij (i<=2r<j, lex), then s_h
* sym:   mu_ab (a<b in different eigenvalue blocks, lex), then t per block
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import AmbientError, DimensionError, SpecError
from .linalg import Ambient, MatrixPoint, matrix_unit, numeric_rank, omega_matrix
from .strata import MultiplicityPattern

__all__ = [
    "Chart",
    "Frame",
    "TANGENT",
    "NORMAL",
    "RankChartSpec",
    "SkewChartSpec",
    "SymChartSpec",
    "rank_chart",
    "rank_tangent_frame",
    "rank_normal_frame",
    "rank_parameters",
    "skew_chart",
    "skew_tangent_frame",
    "skew_normal_frame",
    "skew_parameters",
    "sym_chart",
    "sym_tangent_frame",
    "sym_parameters",
    "manifold_dim",
    "affine_chart",
    "sphere_graph_chart",
    "great_circle_chart",
    "latitude_circle_chart",
    "rank1_sym_circle_chart",
    "sphere_slice_chart",
    "conjugated_chart",
]

TANGENT, NORMAL = "tangent", "normal"


@dataclass(frozen=True)
class Frame:
    """Ordered stack of ambient vectors; ``vectors[k]`` is the k-th matrix."""

    vectors: np.ndarray
    kind: str = TANGENT
    labels: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 3:
            raise DimensionError("frame vectors must be a (k, rows, cols) stack")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def __len__(self):
        return self.vectors.shape[0]

    def __getitem__(self, k):
        return self.vectors[k]

    @property
    def flat(self) -> np.ndarray:
        """The vectors as rows of a (k, N) matrix."""
        return self.vectors.reshape(len(self), int(np.prod(self.vectors.shape[1:])))

    def is_independent(self, rel_tol: float = 1e-8) -> bool:
        return numeric_rank(self.vectors, rel_tol) == len(self)


@dataclass(frozen=True)
class Chart:
    """A smooth local parametrization ``u -> A(u)`` of a submanifold.

    ``box`` is the half-width of the parameter box on which the chart stays
    inside its stratum.  ``box_scale`` is the characteristic parameter length
    used to size finite-difference steps.
    """

    dim_params: int
    ambient: Ambient
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    label: str = ""
    box: float = 0.1
    box_scale: float = 1.0
    param_labels: tuple = ()
    spec: object = None
    base: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        base = np.asarray(self.fn(np.zeros(self.dim_params)), dtype=float)
        if base.shape != self.ambient.shape:
            raise DimensionError(f"chart output {base.shape} does not fit {self.ambient}")
        base.setflags(write=False)
        object.__setattr__(self, "base", base)

    def eval(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim_params,):
            raise DimensionError(f"expected {self.dim_params} parameters, got shape {u.shape}")
        return self.fn(u)

    __call__ = eval

    def point(self, u) -> MatrixPoint:
        a = self.eval(u)
        if self.ambient.kind == "skew":
            return MatrixPoint.skew(a)
        if self.ambient.kind == "sym":
            return MatrixPoint.sym(a)
        return MatrixPoint(self.ambient, a)


def _rot_cols(x: np.ndarray, a: int, b: int, theta: float):
    # x <- x exp(theta L_ab)
    c, s = np.cos(theta), np.sin(theta)
    xa, xb = x[:, a].copy(), x[:, b]
    x[:, a] = c * xa + s * xb
    x[:, b] = -s * xa + c * xb


def _ordered_rotations(n: int, pairs: Sequence[tuple], angles: np.ndarray) -> np.ndarray:
    """prod_k exp(angles[k] L_{pairs[k]}) with factors multiplied left to right."""
    q = np.eye(n)
    for (i, j), th in zip(pairs, angles):
        if th != 0.0:
            _rot_cols(q, i - 1, j - 1, th)
    return q


def _L(n: int, a: int, b: int) -> np.ndarray:
    # L_ab = E_ba - E_ab for any a != b (1-based)
    g = np.zeros((n, n))
    g[b - 1, a - 1] += 1.0
    g[a - 1, b - 1] -= 1.0
    return g


def _check_descending(values, name: str, gap_min: float):
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise SpecError(f"{name} must be a vector")
    if v.size and v[-1] <= 0:
        raise SpecError(f"{name} must be positive, got {v.tolist()}")
    gaps = -np.diff(v)
    if np.any(gaps <= 0):
        raise SpecError(f"{name} must be strictly descending, got {v.tolist()}")
    if np.any(gaps < gap_min):
        raise SpecError(f"{name} gaps fall below gap_min={gap_min}: {v.tolist()}")
    return v


def _min_gap(values) -> float:
    """Smallest distance between consecutive values of a descending vector, and to zero."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 1.0
    return float(min(np.min(-np.diff(v), initial=np.inf), v[-1]))


# --------------------------------------------------------------------------
# rank-r matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RankChartSpec:
    m: int
    n: int
    r: int
    sigma: tuple
    gap_min: float = 0.0

    def __post_init__(self):
        m, n, r = int(self.m), int(self.n), int(self.r)
        if not (1 <= r <= m <= n):
            raise SpecError(f"need 1 <= r <= m <= n, got m={m}, n={n}, r={r}")
        sig = _check_descending(self.sigma, "sigma", self.gap_min)
        if sig.size != r:
            raise SpecError(f"expected {r} singular values, got {sig.size}")
        object.__setattr__(self, "sigma", tuple(float(s) for s in sig))

    @property
    def min_gap(self) -> float:
        return _min_gap(self.sigma)

    def sigma_matrix(self) -> np.ndarray:
        s = np.zeros((self.m, self.n))
        for h, sg in enumerate(self.sigma):
            s[h, h] = sg
        return s

    def s(self, idx: int) -> float:
        """sigma_idx (1-based), zero beyond the rank."""
        return self.sigma[idx - 1] if idx <= self.r else 0.0


def rank_parameters(m: int, n: int, r: int):
    """Index sets (mu pairs, nu pairs, s indices) in chart parameter order."""
    mu = [(i, j) for i in range(1, r + 1) for j in range(i + 1, m + 1)]
    nu = [(k, l) for k in range(1, r + 1) for l in range(k + 1, n + 1)]
    return mu, nu, list(range(1, r + 1))


def _rank_labels(mu, nu, sh):
    return tuple([f"mu{i},{j}" for i, j in mu] + [f"nu{k},{l}" for k, l in nu]
                 + [f"s{h}" for h in sh])


def rank_chart(spec: RankChartSpec) -> Chart:
    """A(mu, s, nu) = (prod e^{mu L}) (Sigma + sum s_h E_hh) (prod e^{-nu L})."""
    m, n, r = spec.m, spec.n, spec.r
    mu, nu, sh = rank_parameters(m, n, r)
    nmu, nnu = len(mu), len(nu)
    sigma = spec.sigma_matrix()

    def fn(u):
        core = sigma.copy()
        for h in range(r):
            core[h, h] += u[nmu + nnu + h]
        left = _ordered_rotations(m, mu, u[:nmu])
        right = _ordered_rotations(n, nu, -u[nmu:nmu + nnu])
        return left @ core @ right

    return Chart(dim_params=nmu + nnu + r, ambient=Ambient.rect(m, n), fn=fn,
                 label=f"rank(m={m},n={n},r={r})", box=0.1 * spec.min_gap,
                 param_labels=_rank_labels(mu, nu, sh), spec=spec)


def rank_tangent_frame(spec: RankChartSpec) -> Frame:
    """d_mu_ij A(0) = s_i E_ji - s_j E_ij, d_nu_kl A(0) = s_k E_kl - s_l E_lk, d_s_h A(0) = E_hh."""
    m, n, r = spec.m, spec.n, spec.r
    mu, nu, sh = rank_parameters(m, n, r)
    vecs = []
    for i, j in mu:
        vecs.append(spec.s(i) * matrix_unit(m, n, j, i) - spec.s(j) * matrix_unit(m, n, i, j))
    for k, l in nu:
        v = spec.s(k) * matrix_unit(m, n, k, l)
        if l <= m:
            v = v - spec.s(l) * matrix_unit(m, n, l, k)
        vecs.append(v)
    vecs += [matrix_unit(m, n, h, h) for h in sh]
    return Frame(np.array(vecs).reshape(-1, m, n), TANGENT, _rank_labels(mu, nu, sh))


def rank_normal_frame(spec: RankChartSpec) -> Frame:
    """Matrix units E_pq with r < p <= m, r < q <= n."""
    m, n, r = spec.m, spec.n, spec.r
    pq = [(p, q) for p in range(r + 1, m + 1) for q in range(r + 1, n + 1)]
    vecs = np.array([matrix_unit(m, n, p, q) for p, q in pq]).reshape(-1, m, n)
    return Frame(vecs, NORMAL, tuple(f"E{p},{q}" for p, q in pq))


# --------------------------------------------------------------------------
# skew-symmetric matrices of rank 2r
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SkewChartSpec:
    n: int
    r: int
    omega: tuple
    gap_min: float = 0.0

    def __post_init__(self):
        n, r = int(self.n), int(self.r)
        if not (1 <= r <= n // 2):
            raise SpecError(f"need 1 <= r <= n/2, got n={n}, r={r}")
        om = _check_descending(self.omega, "omega", self.gap_min)
        if om.size != r:
            raise SpecError(f"expected {r} values of omega, got {om.size}")
        object.__setattr__(self, "omega", tuple(float(w) for w in om))

    @property
    def min_gap(self) -> float:
        return _min_gap(self.omega)

    def w(self, q: int) -> float:
        """omega_q (1-based), zero beyond r."""
        return self.omega[q - 1] if q <= self.r else 0.0

    def omega_matrix(self) -> np.ndarray:
        return omega_matrix(self.n, self.omega)


def skew_parameters(n: int, r: int):
    """(group pairs, outer pairs, s indices) in chart parameter order."""
    groups = []
    for p in range(1, r + 1):
        for q in range(p + 1, r + 1):
            groups += [(2 * p - 1, 2 * q - 1), (2 * p - 1, 2 * q), (2 * p, 2 * q - 1), (2 * p, 2 * q)]
    outer = [(i, j) for i in range(1, 2 * r + 1) for j in range(2 * r + 1, n + 1)]
    return groups, outer, list(range(1, r + 1))


def _skew_labels(pairs, sh):
    return tuple([f"mu{i},{j}" for i, j in pairs] + [f"s{h}" for h in sh])


def skew_chart(spec: SkewChartSpec) -> Chart:
    """A(mu, s) = V^T (sum (omega_h + s_h) L_{2h,2h-1}) V with V = prod_lex e^{mu L}."""
    n, r = spec.n, spec.r
    groups, outer, sh = skew_parameters(n, r)
    pairs = groups + outer
    lex = sorted(range(len(pairs)), key=lambda k: pairs[k])
    lex_pairs = [pairs[k] for k in lex]
    npar = len(pairs)
    omega = np.asarray(spec.omega)

    def fn(u):
        v = _ordered_rotations(n, lex_pairs, u[:npar][lex])
        core = omega_matrix(n, omega + u[npar:])
        b = v.T @ core @ v
        return 0.5 * (b - b.T)

    return Chart(dim_params=npar + r, ambient=Ambient.skew(n), fn=fn,
                 label=f"skew(n={n},r={r})", box=0.1 * spec.min_gap,
                 param_labels=_skew_labels(pairs, sh), spec=spec)


def _skew_mu_tangent(spec: SkewChartSpec, i: int, j: int) -> np.ndarray:
    n, w = spec.n, spec.w

    def term(c, a, b):
        # omega_q = 0 for q > r, so out-of-range indices only ever carry c = 0
        return c * _L(n, a, b) if c != 0.0 else np.zeros((n, n))

    if i % 2 == 0:
        p = i // 2
        if j % 2 == 0:
            q = j // 2
            return term(w(p), 2 * p - 1, 2 * q) + term(w(q), 2 * p, 2 * q - 1)
        q = (j + 1) // 2
        return term(w(p), 2 * p - 1, 2 * q - 1) - term(w(q), 2 * p, 2 * q)
    p = (i + 1) // 2
    if j % 2 == 0:
        q = j // 2
        return -term(w(p), 2 * p, 2 * q) + term(w(q), 2 * p - 1, 2 * q - 1)
    q = (j + 1) // 2
    return -term(w(p), 2 * p, 2 * q - 1) - term(w(q), 2 * p - 1, 2 * q)


def skew_tangent_frame(spec: SkewChartSpec) -> Frame:
    """Closed-form first derivatives at Omega, split by index parity."""
    n, r = spec.n, spec.r
    groups, outer, sh = skew_parameters(n, r)
    vecs = [_skew_mu_tangent(spec, i, j) for i, j in groups + outer]
    vecs += [_L(n, 2 * h, 2 * h - 1) for h in sh]
    return Frame(np.array(vecs).reshape(-1, n, n), TANGENT, _skew_labels(groups + outer, sh))


def skew_normal_frame(spec: SkewChartSpec) -> Frame:
    """Generators L_ab with 2r < a < b <= n."""
    n, r = spec.n, spec.r
    ab = [(a, b) for a in range(2 * r + 1, n + 1) for b in range(a + 1, n + 1)]
    vecs = np.array([_L(n, a, b) for a, b in ab]).reshape(-1, n, n)
    return Frame(vecs, NORMAL, tuple(f"L{a},{b}" for a, b in ab))


# --------------------------------------------------------------------------
# symmetric matrices with prescribed eigenvalue multiplicities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymChartSpec:
    """``lambda_distinct[k]`` is the eigenvalue of the k-th block of ``pattern.blocks()``."""

    pattern: MultiplicityPattern
    lambda_distinct: tuple
    gap_min: float = 0.0

    def __post_init__(self):
        if not isinstance(self.pattern, MultiplicityPattern):
            object.__setattr__(self, "pattern", MultiplicityPattern(self.pattern))
        lam = np.asarray(self.lambda_distinct, dtype=float).ravel()
        nb = len(self.pattern.blocks())
        if lam.size != nb:
            raise SpecError(f"pattern {self.pattern} needs {nb} distinct eigenvalues, got {lam.size}")
        if nb > 1:
            gaps = np.diff(np.sort(lam))
            if np.any(gaps <= 0) or np.any(gaps < self.gap_min):
                raise SpecError(f"eigenvalues must be pairwise separated by gap_min={self.gap_min}")
        object.__setattr__(self, "lambda_distinct", tuple(float(x) for x in lam))

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def min_gap(self) -> float:
        if len(self.lambda_distinct) < 2:
            return 1.0
        return float(np.min(np.diff(np.sort(self.lambda_distinct))))

    def block_index(self) -> np.ndarray:
        """Block number of every diagonal position."""
        return np.repeat(np.arange(len(self.pattern.blocks())), self.pattern.blocks())

    def lambda_matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.lambda_distinct)[self.block_index()])


def sym_parameters(spec: SymChartSpec):
    """(rotation pairs outside the stabilizer algebra, block indices)."""
    blk = spec.block_index()
    n = spec.n
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if blk[a - 1] != blk[b - 1]]
    return pairs, list(range(1, len(spec.pattern.blocks()) + 1))


def _sym_labels(pairs, blocks):
    return tuple([f"mu{a},{b}" for a, b in pairs] + [f"t{k}" for k in blocks])


def sym_chart(spec: SymChartSpec) -> Chart:
    """A(mu, t) = e^{M(mu)} (Lambda + D(t)) e^{M(mu)^T}, M(mu) = sum mu_ab L_ab."""
    n = spec.n
    pairs, blocks = sym_parameters(spec)
    npar = len(pairs)
    gens = np.array([_L(n, a, b) for a, b in pairs]).reshape(npar, n, n)
    blk = spec.block_index()
    lam = np.asarray(spec.lambda_distinct)

    def fn(u):
        q = expm(np.tensordot(u[:npar], gens, axes=1)) if npar else np.eye(n)
        core = np.diag((lam + u[npar:])[blk])
        b = q @ core @ q.T
        return 0.5 * (b + b.T)

    return Chart(dim_params=npar + len(blocks), ambient=Ambient.sym(n), fn=fn,
                 label=f"sym(n={n},kappa={spec.pattern})", box=0.1 * spec.min_gap,
                 param_labels=_sym_labels(pairs, blocks), spec=spec)


def sym_tangent_frame(spec: SymChartSpec) -> Frame:
    """d_mu_ab A(0) = [L_ab, Lambda], d_t_k A(0) = identity on block k."""
    n = spec.n
    pairs, blocks = sym_parameters(spec)
    lam = spec.lambda_matrix()
    vecs = []
    for a, b in pairs:
        g = _L(n, a, b)
        vecs.append(g @ lam - lam @ g)
    blk = spec.block_index()
    for k in blocks:
        vecs.append(np.diag((blk == k - 1).astype(float)))
    return Frame(np.array(vecs).reshape(-1, n, n), TANGENT, _sym_labels(pairs, blocks))


# --------------------------------------------------------------------------
# dimensions
# --------------------------------------------------------------------------

def manifold_dim(family: str, **params) -> int:
    """Dimension of a stratum.

    ``manifold_dim("rank", m=, n=, r=)``, ``manifold_dim("skew", n=, r=)``
    (``r`` is half the rank) or ``manifold_dim("sym", pattern=)``.
    """
    if family == "rank":
        m, n, r = params["m"], params["n"], params["r"]
        if not (0 <= r <= m <= n):
            raise SpecError(f"invalid rank parameters m={m}, n={n}, r={r}")
        return (m + n) * r - r * r
    if family == "skew":
        n, r = params["n"], params["r"]
        if not (0 <= r <= n // 2):
            raise SpecError(f"invalid skew parameters n={n}, r={r}")
        return comb(n, 2) - comb(n - 2 * r, 2)
    if family == "sym":
        pat = params["pattern"]
        if not isinstance(pat, MultiplicityPattern):
            pat = MultiplicityPattern(pat)
        n = pat.n
        return n * (n + 1) // 2 - sum(k * (i * (i + 1) // 2 - 1) for i, k in pat.items())
    raise SpecError(f"unknown family {family!r}")


# --------------------------------------------------------------------------
# auxiliary charts (oracles and sphere slices)
# --------------------------------------------------------------------------

def affine_chart(base, directions, ambient: Optional[Ambient] = None) -> Chart:
    """u -> base + sum u_i directions[i]."""
    base = np.asarray(base, dtype=float)
    dirs = np.asarray(directions, dtype=float)
    amb = ambient or Ambient.rect(*base.shape)
    return Chart(dim_params=dirs.shape[0], ambient=amb,
                 fn=lambda u: base + np.tensordot(u, dirs, axes=1), label="affine")


def sphere_graph_chart() -> Chart:
    """Unit sphere S^2 near the north pole as the graph z = sqrt(1 - x^2 - y^2)."""
    def fn(u):
        return np.array([[u[0], u[1], np.sqrt(1.0 - u[0] ** 2 - u[1] ** 2)]])
    return Chart(2, Ambient.rect(1, 3), fn, label="sphere-graph", box=0.5)


def great_circle_chart(theta0: float = 0.0) -> Chart:
    def fn(u):
        t = theta0 + u[0]
        return np.array([[np.cos(t), np.sin(t), 0.0]])
    return Chart(1, Ambient.rect(1, 3), fn, label="great-circle", box=1.0)


def latitude_circle_chart(colatitude: float = np.pi / 4, theta0: float = 0.0) -> Chart:
    sa, ca = np.sin(colatitude), np.cos(colatitude)

    def fn(u):
        t = theta0 + u[0]
        return np.array([[sa * np.cos(t), sa * np.sin(t), ca]])
    return Chart(1, Ambient.rect(1, 3), fn, label=f"latitude({colatitude:.6g})", box=1.0)


def rank1_sym_circle_chart(theta0: float = 0.0, sign: float = 1.0) -> Chart:
    """Unit-norm rank-one symmetric 2x2 matrices sign * v v^T, v = (cos t, sin t)."""
    def fn(u):
        t = theta0 + u[0]
        v = np.array([np.cos(t), np.sin(t)])
        b = sign * np.outer(v, v)
        return 0.5 * (b + b.T)
    return Chart(1, Ambient.sym(2), fn, label=f"rank1-sym2(theta0={theta0:.6g})", box=1.0)


def sphere_slice_chart(chart: Chart, radial_index: int) -> Chart:
    """Chart of X cap S^{N-1} for a conic chart: drop one parameter and normalize.

    The dropped parameter must be one whose removal still leaves the radial
    direction inside the span of the remaining tangents plus the base point
    (e.g. an ``s_h`` of a rank chart).
    """
    d = chart.dim_params
    if not (0 <= radial_index < d):
        raise DimensionError(f"radial index {radial_index} out of range")
    if np.linalg.norm(chart.base) == 0:
        raise AmbientError("base point is the origin")

    def fn(u):
        full = np.insert(np.asarray(u, dtype=float), radial_index, 0.0)
        a = chart.eval(full)
        return a / np.linalg.norm(a)

    labels = tuple(l for k, l in enumerate(chart.param_labels) if k != radial_index)
    return Chart(d - 1, chart.ambient, fn, label=f"sphere-slice[{chart.label}]",
                 box=chart.box, box_scale=chart.box_scale, param_labels=labels)


def conjugated_chart(chart: Chart, left: np.ndarray, right: Optional[np.ndarray] = None) -> Chart:
    """Move a chart by the isometric group action: A -> left A right^T.

    For skew and symmetric ambients ``right`` defaults to ``left``.
    """
    right = left if right is None else right
    kind = chart.ambient.kind

    def fn(u):
        b = left @ chart.eval(u) @ right.T
        if kind == "skew":
            return 0.5 * (b - b.T)
        if kind == "sym":
            return 0.5 * (b + b.T)
        return b

    return Chart(chart.dim_params, chart.ambient, fn, label=f"conj[{chart.label}]",
                 box=chart.box, box_scale=chart.box_scale, param_labels=chart.param_labels)
