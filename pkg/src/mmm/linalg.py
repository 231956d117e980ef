"""Ambient matrix spaces, the Frobenius inner product and ordered decompositions.

Index arguments of :func:`generator`, :func:`plane_rotation` and
:func:`matrix_unit` are 1-based, matching the usual matrix-unit notation
``E_ij`` and ``L_ij = E_ji - E_ij``.  Everything else uses numpy's 0-based
conventions.

Decompositions follow the transposed convention ``A = U^T Sigma V``,
``A = V^T Omega V`` and ``A = V^T Lambda V``: the rows of ``u`` / ``v`` are
the singular (eigen) vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AmbientError, DimensionError

__all__ = [
    "Ambient",
    "MatrixPoint",
    "SvdResult",
    "SkewNormalForm",
    "SpectralResult",
    "frobenius_inner",
    "frobenius_norm",
    "matrix_unit",
    "generator",
    "plane_rotation",
    "random_orthogonal",
    "svd_ordered",
    "skew_normal_form",
    "omega_matrix",
    "spectral_ordered",
    "numeric_rank",
]

RECT, SKEW, SYM = "rect", "skew", "sym"


@dataclass(frozen=True)
class Ambient:
    """Tag identifying one of the ambient spaces M_{m,n}, Sk_n or Sym_n."""

    kind: str
    shape: tuple

    def __post_init__(self):
        if self.kind not in (RECT, SKEW, SYM):
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        m, n = self.shape
        if self.kind != RECT and m != n:
            raise DimensionError(f"{self.kind} ambient must be square, got {self.shape}")

    @classmethod
    def rect(cls, m: int, n: int) -> "Ambient":
        return cls(RECT, (int(m), int(n)))

    @classmethod
    def skew(cls, n: int) -> "Ambient":
        return cls(SKEW, (int(n), int(n)))

    @classmethod
    def sym(cls, n: int) -> "Ambient":
        return cls(SYM, (int(n), int(n)))

    @property
    def dim(self) -> int:
        """Real dimension of the ambient vector space."""
        m, n = self.shape
        if self.kind == RECT:
            return m * n
        if self.kind == SKEW:
            return n * (n - 1) // 2
        return n * (n + 1) // 2

    def contains(self, a: np.ndarray, tol: float = 0.0) -> bool:
        a = np.asarray(a)
        if a.shape != self.shape:
            return False
        if self.kind == RECT:
            return True
        dev = a + a.T if self.kind == SKEW else a - a.T
        scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
        return bool(np.max(np.abs(dev), initial=0.0) <= tol * scale)

    def __str__(self):
        m, n = self.shape
        if self.kind == RECT:
            return f"Rect({m},{n})"
        return f"{self.kind.capitalize()}({n})"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MatrixPoint:
    """A matrix together with the ambient space it lives in.

    Use the ``rect``/``skew``/``sym`` constructors rather than calling the
    class directly; they enforce the structural invariants.
    """

    ambient: Ambient
    entries: np.ndarray = field(repr=False)
    transposed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(self.entries))
        if self.entries.shape != self.ambient.shape:
            raise DimensionError(
                f"entries of shape {self.entries.shape} do not fit {self.ambient}")
        if not self.ambient.contains(self.entries):
            raise AmbientError(f"entries are not exactly in {self.ambient}")

    @classmethod
    def rect(cls, a) -> "MatrixPoint":
        """Wrap an m x n matrix, transposing first when m > n."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.ndim != 2:
            raise DimensionError("expected a 2-d array")
        if a.shape[0] > a.shape[1]:
            return cls(Ambient.rect(*a.T.shape), a.T, transposed=True)
        return cls(Ambient.rect(*a.shape), a)

    @classmethod
    def skew(cls, a, tol: float = 0.0) -> "MatrixPoint":
        """Wrap a skew-symmetric matrix.

        With ``tol > 0`` an almost-skew input (relative deviation at most
        ``tol``) is replaced by its skew part; otherwise exact antisymmetry
        is required.
        """
        a = _square(a)
        if not Ambient.skew(a.shape[0]).contains(a, tol):
            raise AmbientError("matrix is not skew-symmetric")
        return cls(Ambient.skew(a.shape[0]), 0.5 * (a - a.T))

    @classmethod
    def sym(cls, a, tol: float = 0.0) -> "MatrixPoint":
        """Wrap a symmetric matrix; ``tol`` as in :meth:`skew`."""
        a = _square(a)
        if not Ambient.sym(a.shape[0]).contains(a, tol):
            raise AmbientError("matrix is not symmetric")
        return cls(Ambient.sym(a.shape[0]), 0.5 * (a + a.T))

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


MatrixLike = Union[MatrixPoint, np.ndarray]


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _entries(a) -> np.ndarray:
    if isinstance(a, MatrixPoint):
        return a.entries
    return np.asarray(a, dtype=float)


def frobenius_inner(a: MatrixLike, b: MatrixLike) -> float:
    """Return Tr(a^T b), the sum of entrywise products."""
    if isinstance(a, MatrixPoint) and isinstance(b, MatrixPoint) and a.ambient != b.ambient:
        raise DimensionError(f"ambient mismatch: {a.ambient} vs {b.ambient}")
    x, y = _entries(a), _entries(b)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    return float(np.sum(x * y))


def frobenius_norm(a: MatrixLike) -> float:
    return float(np.linalg.norm(_entries(a)))


def _check_pair(n: int, i: int, j: int):
    if not (1 <= i < j <= n):
        raise IndexError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")


def matrix_unit(m: int, n: int, i: int, j: int) -> np.ndarray:
    """The m x n matrix unit E_ij (1-based)."""
    if not (1 <= i <= m and 1 <= j <= n):
        raise IndexError(f"matrix unit ({i},{j}) outside {m}x{n}")
    e = np.zeros((m, n))
    e[i - 1, j - 1] = 1.0
    return e


def generator(n: int, i: int, j: int) -> np.ndarray:
    """L_ij = E_ji - E_ij, the generator of rotations in the (i, j) plane."""
    _check_pair(n, i, j)
    g = np.zeros((n, n))
    g[j - 1, i - 1] = 1.0
    g[i - 1, j - 1] = -1.0
    return g


def plane_rotation(n: int, i: int, j: int, theta: float) -> np.ndarray:
    """exp(theta * L_ij), evaluated in closed form."""
    _check_pair(n, i, j)
    c, s = np.cos(theta), np.sin(theta)
    q = np.eye(n)
    a, b = i - 1, j - 1
    q[a, a] = q[b, b] = c
    q[a, b] = -s
    q[b, a] = s
    return q


def random_orthogonal(n: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    """Haar-distributed element of O(n) (or SO(n) with ``special``)."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if special and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def numeric_rank(vectors: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Rank of a stack of matrices (leading axis indexes the vectors)."""
    v = np.asarray(vectors, dtype=float)
    if v.shape[0] == 0:
        return 0
    s = np.linalg.svd(v.reshape(v.shape[0], -1), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


@dataclass(frozen=True)
class SvdResult:
    """A = u.T @ diag_embed(sigma) @ v, sigma descending."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int

    def sigma_matrix(self) -> np.ndarray:
        m, n = self.u.shape[0], self.v.shape[0]
        s = np.zeros((m, n))
        k = len(self.sigma)
        s[np.arange(k), np.arange(k)] = self.sigma
        return s

    def reconstruct(self) -> np.ndarray:
        return self.u.T @ self.sigma_matrix() @ self.v


def svd_ordered(a: MatrixLike, rank_tol: float = 1e-10) -> SvdResult:
    """Singular value decomposition in the ``A = U^T Sigma V`` convention.

    ``rank`` counts singular values above ``rank_tol * sigma_1``.
    """
    x = _entries(a)
    if x.ndim != 2:
        raise DimensionError("expected a 2-d array")
    w, s, vh = np.linalg.svd(x, full_matrices=True)
    order = np.argsort(-s, kind="stable")
    w, s = w[:, order], s[order]
    k = len(s)
    vh = np.concatenate([vh[:k][order], vh[k:]], axis=0)
    rank = 0 if s.size == 0 or s[0] == 0 else int(np.sum(s > rank_tol * s[0]))
    return SvdResult(u=w.T, sigma=s, v=vh, rank=rank)


def omega_matrix(n: int, omega) -> np.ndarray:
    """Block normal form: sum_h omega_h L_{2h,2h-1}, so entry (2h-1, 2h) is +omega_h."""
    omega = np.asarray(omega, dtype=float)
    if 2 * len(omega) > n:
        raise DimensionError(f"{len(omega)} blocks do not fit in size {n}")
    w = np.zeros((n, n))
    for h, om in enumerate(omega):
        w[2 * h, 2 * h + 1] = om
        w[2 * h + 1, 2 * h] = -om
    return w


@dataclass(frozen=True)
class SkewNormalForm:
    """A = v.T @ Omega @ v with Omega assembled from ``omega``."""

    v: np.ndarray
    omega: np.ndarray
    rank2r: int

    def omega_matrix(self) -> np.ndarray:
        return omega_matrix(self.v.shape[0], self.omega)

    def reconstruct(self) -> np.ndarray:
        return self.v.T @ self.omega_matrix() @ self.v


def _as_structured(a, kind: str, tol: float) -> np.ndarray:
    if isinstance(a, MatrixPoint):
        if a.ambient.kind != kind:
            raise AmbientError(f"expected a {kind} matrix, got {a.ambient}")
        return a.entries
    x = _square(a)
    amb = Ambient(kind, x.shape)
    if not amb.contains(x, tol):
        raise AmbientError(f"matrix is not {kind}-symmetric")
    return 0.5 * (x - x.T) if kind == SKEW else 0.5 * (x + x.T)


def skew_normal_form(a: MatrixLike, rank_tol: float = 1e-10) -> SkewNormalForm:
    """Normal form of a skew-symmetric matrix.

    Invariant 2-planes come from the eigenvectors of A^T A (each omega_h^2 is
    a double eigenvalue).  Within a plane a unit vector x is completed by
    y = -A x / omega so that entry (2h-1, 2h) of V A V^T equals +omega_h.
    """
    x = _as_structured(a, SKEW, 1e-12)
    n = x.shape[0]
    if n == 0:
        return SkewNormalForm(np.zeros((0, 0)), np.zeros(0), 0)
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[0] == 0:
        return SkewNormalForm(np.eye(n), np.zeros(0), 0)
    r = int(np.sum(sv > rank_tol * sv[0])) // 2
    evals, evecs = np.linalg.eigh(x.T @ x)
    evecs = evecs[:, np.argsort(-evals, kind="stable")]
    rows: list[np.ndarray] = []
    omegas: list[float] = []
    for k in range(2 * r):
        if len(omegas) == r:
            break
        cand = evecs[:, k].copy()
        for _ in range(2):
            for row in rows:
                cand -= (row @ cand) * row
        nrm = np.linalg.norm(cand)
        if nrm < 0.5:
            # already spanned by previously chosen planes
            continue
        cand /= nrm
        ax = x @ cand
        om = float(np.linalg.norm(ax))
        partner = -ax / om
        for row in rows:
            partner -= (row @ partner) * row
        partner -= (cand @ partner) * cand
        partner /= np.linalg.norm(partner)
        rows.extend([cand, partner])
        omegas.append(om)
    basis = np.array(rows).reshape(-1, n)
    if basis.shape[0] < n:
        # orthonormal complement of the chosen planes spans the kernel
        q, _ = np.linalg.qr(np.concatenate([basis.T, np.eye(n)], axis=1))
        basis = np.concatenate([basis, q[:, basis.shape[0]:n].T], axis=0)
    order = np.argsort(-np.asarray(omegas), kind="stable")
    perm = np.concatenate([[2 * h, 2 * h + 1] for h in order] + [np.arange(2 * r, n)]).astype(int)
    return SkewNormalForm(v=basis[perm], omega=np.asarray(omegas)[order], rank2r=2 * r)


@dataclass(frozen=True)
class SpectralResult:
    """A = v.T @ diag(lam) @ v, lam descending."""

    v: np.ndarray
    lam: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.v.T @ np.diag(self.lam) @ self.v

    @property
    def singular_values(self) -> np.ndarray:
        return np.sort(np.abs(self.lam))[::-1]


def spectral_ordered(a: MatrixLike) -> SpectralResult:
    """Spectral decomposition with eigenvalues in descending order."""
    x = _as_structured(a, SYM, 1e-12)
    lam, q = np.linalg.eigh(x)
    order = np.argsort(-lam, kind="stable")
    return SpectralResult(v=q[:, order].T, lam=lam[order])
