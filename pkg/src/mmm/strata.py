"""Eigenvalue-multiplicity strata of symmetric matrices.

A multiplicity pattern ``kappa = (k_1, k_2, ...)`` says that a symmetric
n x n matrix has ``k_i`` distinct eigenvalues of multiplicity ``i``, with
``sum i * k_i = n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import SpecError
from .linalg import MatrixPoint, random_orthogonal, spectral_ordered

__all__ = [
    "MultiplicityPattern",
    "StabilizerDescriptor",
    "StabilizerCheck",
    "patterns",
    "detect_pattern",
    "stabilizer",
    "stabilizer_check",
    "commutant_nullity",
    "distinct_values",
    "sample_stratum",
]


@dataclass(frozen=True)
class MultiplicityPattern:
    """Vector kappa with trailing zeros trimmed.

    ``ambiguous`` is set by :func:`detect_pattern` when the clustering that
    produced the pattern had a gap close to its threshold; it does not take
    part in equality.
    """

    kappa: tuple
    ambiguous: bool = field(default=False, compare=False)

    def __post_init__(self):
        k = [int(x) for x in self.kappa]
        if any(x < 0 for x in k):
            raise SpecError(f"multiplicity counts must be non-negative, got {k}")
        while k and k[-1] == 0:
            k.pop()
        if not k:
            raise SpecError("empty multiplicity pattern")
        object.__setattr__(self, "kappa", tuple(k))

    @classmethod
    def parse(cls, text: str) -> "MultiplicityPattern":
        """Parse ``"1,1"`` style input."""
        try:
            return cls(tuple(int(x) for x in text.replace(" ", "").split(",") if x != ""))
        except ValueError as exc:
            raise SpecError(f"cannot parse pattern {text!r}") from exc

    @property
    def n(self) -> int:
        return sum(i * k for i, k in self.items())

    @property
    def num_distinct(self) -> int:
        return sum(self.kappa)

    def items(self) -> Iterator[tuple]:
        """(multiplicity, count) pairs."""
        return ((i + 1, k) for i, k in enumerate(self.kappa))

    def blocks(self) -> list:
        """Block sizes in block order: k_1 ones, then k_2 twos, ..."""
        return [i for i, k in self.items() for _ in range(k)]

    def __str__(self):
        return "(" + ",".join(map(str, self.kappa)) + ")"


def patterns(n: int) -> list:
    """Every multiplicity pattern of size n (integer partitions of n)."""
    out = []

    def rec(remaining, largest, counts):
        if remaining == 0:
            out.append(MultiplicityPattern(tuple(counts)))
            return
        for part in range(min(largest, remaining), 0, -1):
            counts[part - 1] += 1
            rec(remaining - part, part, counts)
            counts[part - 1] -= 1

    rec(n, n, [0] * n)
    return out


@dataclass(frozen=True)
class StabilizerDescriptor:
    pattern: MultiplicityPattern
    dim: int
    block_sizes: tuple


def stabilizer(pattern: MultiplicityPattern) -> StabilizerDescriptor:
    """O(1)^k1 x O(2)^k2 x ...; its dimension is sum k_i * i(i-1)/2."""
    if not isinstance(pattern, MultiplicityPattern):
        pattern = MultiplicityPattern(pattern)
    dim = sum(k * i * (i - 1) // 2 for i, k in pattern.items())
    return StabilizerDescriptor(pattern, dim, tuple(pattern.blocks()))


def detect_pattern(a, cluster_tol: float = 1e-8) -> MultiplicityPattern:
    """Cluster the sorted spectrum by single linkage and count cluster sizes.

    Consecutive eigenvalues closer than ``cluster_tol * (1 + ||A||)`` share a
    cluster.  Gaps in ``[0.5, 10)`` times that threshold mark the result
    ``ambiguous``.
    """
    if cluster_tol <= 0:
        raise SpecError("cluster_tol must be positive")
    spec = spectral_ordered(a)
    lam = spec.lam
    thr = cluster_tol * (1.0 + float(np.max(np.abs(lam), initial=0.0)))
    gaps = -np.diff(lam)
    sizes, run = [], 1
    for g in gaps:
        if g <= thr:
            run += 1
        else:
            sizes.append(run)
            run = 1
    sizes.append(run)
    ambiguous = bool(np.any((gaps >= 0.5 * thr) & (gaps < 10.0 * thr)))
    kappa = [0] * max(sizes)
    for s in sizes:
        kappa[s - 1] += 1
    return MultiplicityPattern(tuple(kappa), ambiguous=ambiguous)


def _skew_basis(n: int) -> np.ndarray:
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            g = np.zeros((n, n))
            g[b, a], g[a, b] = 1.0, -1.0
            out.append(g)
    return np.array(out).reshape(-1, n, n)


def commutant_nullity(a, rel_tol: float = 1e-8):
    """Dimension of {W skew : WA = AW} and the largest singular value counted as null.

    This is the Lie algebra of the stabilizer of A under conjugation.
    """
    x = np.asarray(a.entries if isinstance(a, MatrixPoint) else a, dtype=float)
    n = x.shape[0]
    basis = _skew_basis(n)
    if basis.shape[0] == 0:
        return 0, 0.0
    ops = np.array([(w @ x - x @ w).ravel() for w in basis]).T
    s = np.linalg.svd(ops, compute_uv=False)
    thr = rel_tol * (1.0 + float(np.linalg.norm(x, 2)))
    null = s[s <= thr]
    return int(null.size), float(null.max(initial=0.0))


@dataclass(frozen=True)
class StabilizerCheck:
    ok: bool
    nullity: int
    expected_dim: int
    residual: float


def stabilizer_check(a, pattern: MultiplicityPattern, rel_tol: float = 1e-8) -> StabilizerCheck:
    """Compare the stabilizer algebra dimension of ``a`` with that of ``O_kappa``."""
    if not isinstance(pattern, MultiplicityPattern):
        pattern = MultiplicityPattern(pattern)
    nullity, residual = commutant_nullity(a, rel_tol)
    expected = stabilizer(pattern).dim
    return StabilizerCheck(nullity == expected, nullity, expected, residual)


def distinct_values(rng: np.random.Generator, k: int, low: float, high: float, gap: float) -> np.ndarray:
    """k values in [low, high], descending, consecutive gaps at least ``gap``.

    Uniform on the admissible set: sort k uniforms on a shortened interval
    and spread them by multiples of ``gap``.
    """
    span = high - low - (k - 1) * gap
    if span < 0:
        raise SpecError(f"cannot fit {k} values with gap {gap} in [{low}, {high}]")
    base = np.sort(rng.uniform(0.0, span, size=k))
    return (low + base + gap * np.arange(k))[::-1]


def sample_stratum(pattern: MultiplicityPattern, rng_seed, count: int, gap: float = 0.1,
                   low: float = -3.0, high: float = 3.0) -> list:
    """Random symmetric matrices V^T Lambda V in the stratum of ``pattern``.

    Sample ``k`` uses its own generator spawned from ``rng_seed``, so any
    subset of samples can be reproduced independently.
    """
    if not isinstance(pattern, MultiplicityPattern):
        pattern = MultiplicityPattern(pattern)
    seeds = np.random.SeedSequence(rng_seed).spawn(count)
    blocks = np.repeat(np.arange(pattern.num_distinct), pattern.blocks())
    out = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        lam = distinct_values(rng, pattern.num_distinct, low, high, gap)
        rng.shuffle(lam)
        v = random_orthogonal(pattern.n, rng)
        out.append(MatrixPoint.sym(v.T @ np.diag(lam[blocks]) @ v, tol=1e-12))
    return out
