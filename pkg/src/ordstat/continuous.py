"""Exact, distribution-free quantities for continuous order statistics.

Every divergence between order statistics of a sample with an invertible
cdf equals the same divergence for uniform order statistics, so all of the
functions here work on ``U(0, 1)`` samples.  Results are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .errors import DomainError
from .special import _shift_diff, digamma, log_factorial

Method = Literal[
    "closed-form", "limit", "oracle-quadrature", "oracle-enumeration", "oracle-montecarlo"
]


def _as_int(x, name: str) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise DomainError(f"{name} must be an integer, got {x!r}")
    return int(x)


def _check_n(n) -> int:
    n = _as_int(n, "n")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class IndexSet:
    """A nonempty, strictly increasing subset of ``{1, ..., n}``."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        n = _check_n(self.n)
        idx = tuple(_as_int(i, "index") for i in self.indices)
        if not idx:
            raise DomainError("index set must be nonempty")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DomainError(f"indices must be strictly increasing, got {list(idx)}")
        if idx[0] < 1 or idx[-1] > n:
            raise DomainError(f"indices must lie in [1, {n}], got {list(idx)}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, n: int, indices: Iterable[int]) -> "IndexSet":
        """Build from any iterable; sorts and rejects duplicates."""
        idx = [_as_int(i, "index") for i in indices]
        if len(set(idx)) != len(idx):
            raise DomainError(f"duplicate indices in {idx}")
        return cls(n, tuple(sorted(idx)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def augmented(self) -> tuple[int, ...]:
        """Indices with the boundary convention ``i_0 = 0`` and ``i_{k+1} = n + 1``."""
        return (0, *self.indices, self.n + 1)

    def union(self, other: "IndexSet") -> "IndexSet":
        if other.n != self.n:
            raise DomainError("index sets refer to different sample sizes")
        return IndexSet(self.n, tuple(sorted(set(self.indices) | set(other.indices))))

    def overlaps(self, other: "IndexSet") -> bool:
        return bool(set(self.indices) & set(other.indices))


@dataclass(frozen=True)
class MIResult:
    """Mutual information in nats with the method that produced it.

    ``infinite`` is set when the two index sets share a coordinate; ``value``
    is then ``math.inf``.
    """

    value: float
    method: Method = "closed-form"
    diagnostics: str | None = None
    infinite: bool = False

    @classmethod
    def overlap(cls, diagnostics: str | None = None) -> "MIResult":
        return cls(math.inf, "closed-form", diagnostics or "index sets overlap", True)

    def __float__(self) -> float:
        return self.value


def kl_subset(idx: IndexSet) -> float:
    """KL divergence between the joint law of ``U_(i), i in idx`` and the product of marginals.

    The T-differences are grouped so that their ``(1 + gamma)`` drifts cancel
    exactly, leaving sums of small positive step excesses.
    """
    a = idx.indices
    n = idx.n
    if len(a) == 1:
        return 0.0
    terms = [_shift_diff(a[t] - a[t - 1] - 1, a[t] - 1) for t in range(1, len(a))]
    terms += [-_shift_diff(n - i, n) for i in a[:-1]]
    return math.fsum(terms)


def kl_whole_sequence(n: int) -> float:
    """KL divergence for the full sequence, ``2 sum_{t=2}^n T_{t-1} - (n-1) T_n``."""
    n = _check_n(n)
    # Pair T_j - T_0 with T_j - T_n for j = 1..n-1; the (1+gamma) drifts sum to zero.
    return math.fsum(_shift_diff(0, j) - _shift_diff(j, n) for j in range(1, n))


def kl_min_max(n: int) -> float:
    """KL divergence for the pair (minimum, maximum): ``log((n-1)/n) + 1/(n-1)``."""
    n = _check_n(n)
    if n < 2:
        raise DomainError(f"min/max pair needs n >= 2, got {n}")
    return math.log1p(-1.0 / n) + 1.0 / (n - 1)


def _check_pair(n: int, r, m) -> tuple[int, int, int]:
    n = _check_n(n)
    r = _as_int(r, "r")
    m = _as_int(m, "m")
    for name, v in (("r", r), ("m", m)):
        if not 1 <= v <= n:
            raise DomainError(f"{name} must lie in [1, {n}], got {v}")
    return n, r, m


def mi_pair(n: int, r: int, m: int) -> MIResult:
    """``I(X_(r); X_(m)) = T_{m-1} + T_{n-r} - T_{m-r-1} - T_n`` for ``r < m``.

    Symmetric in ``(r, m)``; equal indices give infinite MI.
    """
    n, r, m = _check_pair(n, r, m)
    if r == m:
        return MIResult.overlap(f"r = m = {r}")
    if r > m:
        r, m = m, r
    value = _shift_diff(m - r - 1, m - 1) - _shift_diff(n - r, n)
    return MIResult(value)


def mi_subsets(n: int, a: IndexSet | Sequence[int], b: IndexSet | Sequence[int]) -> MIResult:
    """MI between two groups of order statistics.

    Uses ``I(A; B) = D(A u B) - D(A) - D(B)`` where ``D`` is the divergence
    from the product of single-coordinate marginals.
    """
    n = _check_n(n)
    a = a if isinstance(a, IndexSet) else IndexSet.of(n, a)
    b = b if isinstance(b, IndexSet) else IndexSet.of(n, b)
    if a.n != n or b.n != n:
        raise DomainError("index sets refer to a different sample size")
    if a.overlaps(b):
        return MIResult.overlap(f"shared indices {sorted(set(a) & set(b))}")
    value = kl_subset(a.union(b)) - kl_subset(a) - kl_subset(b)
    return MIResult(value)


def log_normalizer(idx: IndexSet) -> float:
    """``log c_I = log n! - sum_t log((i_t - i_{t-1} - 1)!)``."""
    aug = idx.augmented()
    return log_factorial(idx.n) - math.fsum(
        log_factorial(aug[t] - aug[t - 1] - 1) for t in range(1, len(aug))
    )


def joint_pdf_uniform(idx: IndexSet, point: Sequence[float]) -> float:
    """Joint density of ``(U_(i))_{i in idx}`` at ``point``.

    Zero outside ``0 < x_1 < ... < x_k < 1``.  The boundary points are
    ``x_(i_0) = 0`` and ``x_(i_{k+1}) = 1``.
    """
    xs = [float(x) for x in point]
    if len(xs) != len(idx):
        raise DomainError(f"point has dimension {len(xs)}, index set has {len(idx)}")
    xs_aug = [0.0, *xs, 1.0]
    if any(not (hi > lo) for lo, hi in zip(xs_aug, xs_aug[1:])):
        return 0.0
    aug = idx.augmented()
    log_p = log_normalizer(idx)
    for t in range(1, len(aug)):
        e = aug[t] - aug[t - 1] - 1
        if e:
            log_p += e * math.log(xs_aug[t] - xs_aug[t - 1])
    return math.exp(log_p)


def beta_log_expectation(n: int, m: int, kind: str, r: int | None = None) -> float:
    """Expected logs of uniform order statistics.

    ``kind`` is one of

    * ``"log-U"``: ``E[log U_(m)] = psi(m) - psi(n+1)``
    * ``"log-one-minus-U"``: ``E[log(1 - U_(m))] = psi(n+1-m) - psi(n+1)``
    * ``"log-gap"``: ``E[log(U_(m) - U_(r))] = psi(m-r) - psi(n+1)``, needs ``r < m``
    """
    n = _check_n(n)
    m = _as_int(m, "m")
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}], got {m}")
    top = digamma(n + 1.0)
    if kind == "log-U":
        return digamma(float(m)) - top
    if kind == "log-one-minus-U":
        return digamma(float(n + 1 - m)) - top
    if kind == "log-gap":
        if r is None:
            raise DomainError("log-gap needs r")
        r = _as_int(r, "r")
        if not 1 <= r < m:
            raise DomainError(f"log-gap needs 1 <= r < m, got r={r}, m={m}")
        return digamma(float(m - r)) - top
    raise DomainError(f"unknown kind {kind!r}")


def covariance_uniform(n: int, r: int, m: int) -> float:
    """``Cov(U_(r), U_(m)) = r (n - m + 1) / ((n+1)^2 (n+2))`` for ``r <= m``."""
    n, r, m = _check_pair(n, r, m)
    if r > m:
        raise DomainError(f"covariance_uniform needs r <= m, got r={r}, m={m}")
    return r * (n - m + 1) / ((n + 1) ** 2 * (n + 2))


def covariance_exponential_min2(n: int, lam: float) -> float:
    """Covariance of the two smallest order statistics of ``n`` Exp(lam) draws: ``1/(lam n)^2``."""
    n = _check_n(n)
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    lam = float(lam)
    if not (lam > 0.0) or math.isinf(lam):
        raise DomainError(f"rate must be a finite positive number, got {lam}")
    return 1.0 / (lam * lam * n * n)
