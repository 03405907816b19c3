"""Mutual information between order statistics of discrete samples.

Unlike the continuous case these values depend on the sampling
distribution.  They are always bounded by the uniform (continuous) value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .continuous import mi_pair
from .errors import ConsistencyError, DomainError


@dataclass(frozen=True)
class DiscreteDist:
    """Finite-support pmf on strictly increasing support points."""

    support: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        support = tuple(float(v) for v in self.support)
        probs = tuple(float(p) for p in self.probs)
        if not support:
            raise DomainError("support must be nonempty")
        if len(support) != len(probs):
            raise DomainError(f"{len(support)} support points but {len(probs)} probabilities")
        if any(not math.isfinite(v) for v in support):
            raise DomainError("support points must be finite")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise DomainError("support must be strictly increasing")
        if any(not (p > 0.0) or not math.isfinite(p) for p in probs):
            raise DomainError("probabilities must be positive")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise DomainError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def bernoulli(cls, p: float) -> "DiscreteDist":
        p = _check_open_prob(p)
        return cls((0.0, 1.0), (1.0 - p, p))

    @classmethod
    def from_mapping(cls, obj: dict) -> "DiscreteDist":
        """Build from ``{"support": [...], "probs": [...]}``."""
        if not isinstance(obj, dict) or set(obj) != {"support", "probs"}:
            raise DomainError('expected an object with exactly the keys "support" and "probs"')
        try:
            return cls(tuple(obj["support"]), tuple(obj["probs"]))
        except TypeError as exc:
            raise DomainError(f"support and probs must be lists of numbers: {exc}") from None

    @classmethod
    def from_json(cls, path: str | Path) -> "DiscreteDist":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_mapping(obj)

    def to_mapping(self) -> dict:
        return {"support": list(self.support), "probs": list(self.probs)}

    def __len__(self) -> int:
        return len(self.support)

    def cdf(self) -> np.ndarray:
        """``P(X <= v_i)`` for each support point, accumulated from the left."""
        return np.array([math.fsum(self.probs[: i + 1]) for i in range(len(self))])

    def survival(self) -> np.ndarray:
        """``P(X > v_i)``, accumulated from the right so small tails keep their digits."""
        return np.array([math.fsum(self.probs[i + 1 :]) for i in range(len(self))])


def random_dist(rng: np.random.Generator, max_support: int) -> DiscreteDist:
    """A random distribution with 1..max_support integer support points and Dirichlet(1) weights."""
    k = int(rng.integers(1, max_support + 1))
    support = np.sort(rng.choice(100, size=k, replace=False)).astype(float)
    w = rng.dirichlet(np.ones(k))
    w = np.maximum(w, 1e-6)
    w /= w.sum()
    probs = list(w[:-1]) + [1.0 - math.fsum(w[:-1])]
    return DiscreteDist(tuple(support), tuple(probs))


def _check_open_prob(p) -> float:
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return p


def _log_binom_pmf(n: int, q: float, j: int, log_q: float, log_1mq: float) -> float:
    return math.log(math.comb(n, j)) + j * log_q + (n - j) * log_1mq


def _pmf_sum(n: int, q: float, lo: int, hi: int) -> float:
    """``P(lo <= B < hi)`` for ``B ~ Binomial(n, q)``, summed term by term."""
    lo, hi = max(lo, 0), min(hi, n + 1)
    if hi <= lo:
        return 0.0
    if q == 0.0:
        return 1.0 if lo == 0 else 0.0
    if q == 1.0:
        return 1.0 if hi == n + 1 else 0.0
    log_q, log_1mq = math.log(q), math.log1p(-q)
    logs = [_log_binom_pmf(n, q, j, log_q, log_1mq) for j in range(lo, hi)]
    top = max(logs)
    return math.exp(top) * math.fsum(math.exp(v - top) for v in logs)


class _Tail(NamedTuple):
    upper: float  # P(B >= k)
    lower: float  # P(B < k)
    log_upper: float
    log_lower: float


def _log0(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def _tails(n: int, q: float, k: int) -> _Tail:
    """Both tails at ``k``; the smaller is summed directly, the larger is its complement."""
    if k <= 0:
        return _Tail(1.0, 0.0, 0.0, -math.inf)
    if k >= n + 1:
        return _Tail(0.0, 1.0, -math.inf, 0.0)
    if k > n * q:
        up = _pmf_sum(n, q, k, n + 1)
        return _Tail(up, 1.0 - up, _log0(up), math.log1p(-up))
    low = _pmf_sum(n, q, 0, k)
    return _Tail(1.0 - low, low, math.log1p(-low), _log0(low))


def binomial_tail(n: int, q: float, k: int) -> float:
    """``P(B >= k)`` for ``B ~ Binomial(n, q)``."""
    n = _check_n(n)
    q = float(q)
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"q must lie in [0, 1], got {q}")
    k = int(k)
    if not 0 <= k <= n + 1:
        raise DomainError(f"k must lie in [0, {n + 1}], got {k}")
    return _tails(n, q, k).upper


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or int(n) < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_rm(n: int, r, m, strict: bool) -> tuple[int, int]:
    r, m = int(r), int(m)
    ok = 1 <= r < m <= n if strict else 1 <= r <= m <= n
    if not ok:
        rel = "<" if strict else "<="
        raise DomainError(f"need 1 <= r {rel} m <= n, got n={n}, r={r}, m={m}")
    return r, m


def mi_bernoulli(n: int, p: float, r: int, m: int) -> float:
    """``I(X_(r); X_(m))`` for a Bernoulli(p) sample, ``r < m``.

    Writing ``P_k = P(B >= k)`` and ``Q_k = 1 - P_k`` with ``B ~ Binomial(n, 1-p)``:

        -P_m log P_r + (P_r - P_m) log((P_r - P_m) / (P_r Q_m)) - Q_r log Q_m

    The middle logarithm is evaluated as ``log1p(-P_m Q_r / (P_r Q_m))``,
    an exact rewrite that survives ``P_m`` near machine epsilon.
    """
    n = _check_n(n)
    p = _check_open_prob(p)
    if r == m:
        raise DomainError("r = m is not supported for discrete samples (that is an entropy)")
    r, m = _check_rm(n, r, m, strict=True)
    q = 1.0 - p
    tr, tm = _tails(n, q, r), _tails(n, q, m)
    value = 0.0
    if tm.upper > 0.0:
        value -= tm.upper * tr.log_upper
    if tr.lower > 0.0:
        value -= tr.lower * tm.log_lower
    middle = _pmf_sum(n, q, r, m)
    if middle > 0.0 and tm.upper > 0.0 and tr.lower > 0.0:
        value += middle * math.log1p(-(tm.upper * tr.lower) / (tr.upper * tm.lower))
    return value


def mi_min_max_bernoulli(n: int, p: float) -> float:
    """``I(X_(1); X_(n))`` for a Bernoulli(p) sample in terms of ``p**n`` and ``(1-p)**n``."""
    n = _check_n(n)
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    p = _check_open_prob(p)
    a = math.exp(n * math.log1p(-p))  # (1-p)^n
    b = math.exp(n * math.log(p))  # p^n
    value = -a * math.log1p(-b) - b * math.log1p(-a)
    # (1-a-b)/((1-a)(1-b)) = 1 - ab/((1-a)(1-b))
    value += (1.0 - a - b) * math.log1p(-a * b / ((1.0 - a) * (1.0 - b)))
    return value


@dataclass(frozen=True)
class JointPMF2:
    """Joint pmf of ``(X_(r), X_(m))`` on ``support x support``."""

    n: int
    r: int
    m: int
    support: tuple[float, ...]
    table: np.ndarray

    @property
    def row_marginal(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.table.sum(axis=0)

    def mutual_information(self) -> float:
        return mi_from_table(self.table)


def mi_from_table(table: np.ndarray) -> float:
    """Plug-in MI of a 2-D pmf table with ``0 log 0 = 0``."""
    table = np.asarray(table, dtype=float)
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    i, j = np.nonzero(table > 0.0)
    c = table[i, j]
    return math.fsum(c * (np.log(c) - np.log(rows[i]) - np.log(cols[j])))


def _joint_cdf(n: int, r: int, m: int, cdf: np.ndarray, surv: np.ndarray) -> np.ndarray:
    """``G[a, b] = P(X_(r) <= v_a, X_(m) <= v_b)``."""
    k = len(cdf)
    G = np.empty((k, k))
    for b in range(k):
        fb = min(cdf[b], 1.0)
        marg_m = _tails(n, fb, m).upper  # P(X_(m) <= v_b)
        for a in range(k):
            if a >= b:
                G[a, b] = marg_m
                continue
            fa = cdf[a]
            # N1 = #{X <= v_a} ~ Bin(n, fa); N2 | N1=j ~ Bin(n-j, (F_b - F_a) / (1 - F_a))
            cond = min((fb - fa) / surv[a], 1.0)
            total = []
            log_fa, log_1mfa = math.log(fa), math.log(surv[a])
            for j in range(r, n + 1):
                w = math.exp(_log_binom_pmf(n, fa, j, log_fa, log_1mfa))
                need = m - j
                total.append(w if need <= 0 else w * _tails(n - j, cond, need).upper)
            G[a, b] = math.fsum(total)
    return G


def joint_pmf(n: int, dist: DiscreteDist, r: int, m: int) -> JointPMF2:
    """Exact joint pmf of ``(X_(r), X_(m))`` by differencing the bivariate cdf.

    Costs ``O(K**2 n**2)`` for ``K`` support points.
    """
    n = _check_n(n)
    r, m = _check_rm(n, r, m, strict=True)
    cdf, surv = dist.cdf(), dist.survival()
    G = _joint_cdf(n, r, m, cdf, surv)
    padded = np.zeros((len(dist) + 1, len(dist) + 1))
    padded[1:, 1:] = G
    pmf = padded[1:, 1:] - padded[:-1, 1:] - padded[1:, :-1] + padded[:-1, :-1]
    if pmf.min() < -1e-12:
        raise ConsistencyError(f"negative cell {pmf.min():.3e} after differencing")
    pmf = np.clip(pmf, 0.0, None)
    return JointPMF2(n, r, m, dist.support, pmf)


def mi_discrete_exact(n: int, dist: DiscreteDist, r: int, m: int) -> float:
    """Exact ``I(X_(r); X_(m))`` for an arbitrary finite-support sampling distribution."""
    if len(dist) == 1:
        n = _check_n(n)
        _check_rm(n, r, m, strict=True)
        return 0.0
    return joint_pmf(n, dist, r, m).mutual_information()


class BoundCheck(NamedTuple):
    holds: bool
    margin: float
    continuous: float
    discrete: float


def check_upper_bound(n: int, dist: DiscreteDist, r: int, m: int) -> BoundCheck:
    """Compare the discrete MI against the uniform-sample MI that bounds it."""
    discrete = mi_discrete_exact(n, dist, r, m)
    continuous = mi_pair(n, r, m).value
    margin = continuous - discrete
    return BoundCheck(margin >= -1e-10, margin, continuous, discrete)
