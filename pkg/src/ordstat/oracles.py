"""Independent checks for the closed forms.

None of these routines touch the T-sequence machinery.  The quadrature
integrates the order-statistic densities directly, enumeration sorts every
possible discrete sample, and the Monte Carlo estimators sort simulated
samples.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Literal, Sequence

import mpmath
import numpy as np

from .continuous import IndexSet, covariance_exponential_min2, covariance_uniform, mi_pair, mi_subsets
from .discrete import DiscreteDist, mi_bernoulli, mi_discrete_exact, mi_from_table
from .errors import DomainError, OracleError

OracleKind = Literal["oracle-quadrature", "oracle-enumeration", "oracle-montecarlo"]


@dataclass(frozen=True)
class OracleReport:
    closed_form: float
    oracle: float
    abs_diff: float
    rel_diff: float
    oracle_kind: OracleKind
    effort: int
    seed: int | None = None
    std_error: float | None = None

    @classmethod
    def compare(
        cls,
        closed_form: float,
        oracle: float,
        kind: OracleKind,
        effort: int,
        seed: int | None = None,
        std_error: float | None = None,
    ) -> "OracleReport":
        diff = abs(closed_form - oracle)
        return cls(closed_form, oracle, diff, diff / max(abs(closed_form), 1e-300), kind, int(effort), seed, std_error)

    def within_se(self, k: float = 4.0) -> bool:
        if self.std_error is None:
            raise ValueError("report has no standard error")
        return self.abs_diff <= k * self.std_error

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RNGSpec:
    """Seed plus a fixed number of independent streams.

    Work is split across streams before any thread is started, so results
    depend only on ``(seed, stream_count)``.
    """

    seed: int
    stream_count: int = 8

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        if int(self.stream_count) < 1:
            raise DomainError("stream_count must be positive")

    def _children(self) -> list[np.random.SeedSequence]:
        return np.random.SeedSequence(int(self.seed)).spawn(int(self.stream_count) + 1)

    def generators(self) -> list[np.random.Generator]:
        return [np.random.Generator(np.random.PCG64(s)) for s in self._children()[:-1]]

    def aux_generator(self) -> np.random.Generator:
        """A stream disjoint from the sampling streams, used for resampling."""
        return np.random.Generator(np.random.PCG64(self._children()[-1]))

    def split(self, total: int) -> list[int]:
        q, rem = divmod(int(total), int(self.stream_count))
        return [q + (i < rem) for i in range(int(self.stream_count))]


def thread_count() -> int:
    """Worker threads allowed by ``ORDSTAT_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("ORDSTAT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"ORDSTAT_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise DomainError("ORDSTAT_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _map_streams(fn, jobs: Sequence) -> list:
    workers = min(thread_count(), len(jobs))
    if workers <= 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


# --------------------------------------------------------------------------
# extended-precision T sequence


def t_reference(k_max: int, digits: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """``T_k`` and ``T_{k+1} - T_k`` for ``k = 1..k_max`` from running sums at ``digits`` precision.

    Near ``k = 10**5`` the analytic brackets are narrower than the rounding
    error of any double-precision evaluation of ``T_k``, so the reference
    sums ``1/j`` and ``log j`` in multiprecision and rounds only the result.
    """
    if k_max < 1:
        raise DomainError("k_max must be positive")
    t = np.empty(k_max)
    step = np.empty(k_max)
    with mpmath.workdps(digits):
        harm = mpmath.mpf(1)
        lfact = mpmath.mpf(0)
        for k in range(1, k_max + 1):
            # harm = H_k, lfact = log k!
            t[k - 1] = float(lfact - k * harm)
            step[k - 1] = float(mpmath.log(k + 1) - harm - 1)
            harm += mpmath.mpf(1) / (k + 1)
            lfact += mpmath.log(k + 1)
    return t, step


# --------------------------------------------------------------------------
# quadrature


_TANH_SINH_SPAN = 3.5


@lru_cache(maxsize=None)
def _tanh_sinh(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes ``v``, complements ``1 - v`` and weights of the tanh-sinh rule on (0, 1)."""
    h = 2.0**-level
    steps = int(math.ceil(_TANH_SINH_SPAN / h))
    u = np.arange(-steps, steps + 1) * h
    s = 0.5 * math.pi * np.sinh(u)
    # |2s| stays below ~52 on this span, so exp cannot overflow
    v = 1.0 / (1.0 + np.exp(-2.0 * s))
    vc = 1.0 / (1.0 + np.exp(2.0 * s))
    w = h * 0.5 * math.pi * np.cosh(u) * 2.0 * v * vc
    return v, vc, w


class _Group:
    """Log-density of a subset of the integration points."""

    def __init__(self, n: int, positions: Sequence[int], indices: Sequence[int], n_points: int):
        self.bounds = [0, *[p + 1 for p in positions], n_points + 1]
        idx = [0, *indices, n + 1]
        self.exps = [idx[t] - idx[t - 1] - 1 for t in range(1, len(idx))]
        self.log_c = math.lgamma(n + 1) - math.fsum(math.lgamma(e + 1) for e in self.exps)

    def log_pdf(self, gaps: np.ndarray) -> np.ndarray:
        # a group gap is a run of elementary gaps; summing them avoids 1 - x cancellation
        out = np.full(gaps.shape[0], self.log_c)
        for t, e in enumerate(self.exps, start=1):
            if e:
                gap = gaps[:, self.bounds[t - 1] : self.bounds[t]].sum(axis=1)
                with np.errstate(divide="ignore"):
                    out += e * np.log(gap)
        return out


def _simplex_mi(n: int, union: Sequence[int], a: Sequence[int], b: Sequence[int], level: int) -> float:
    """Tanh-sinh product rule for ``E[log f_{A u B} - log f_A - log f_B]``.

    Points ``0 < x_1 < ... < x_K < 1`` are parametrized by ``v in (0,1)^K``
    through ``x_j - x_{j-1} = (1 - x_{j-1}) v_j``, so every boundary
    singularity of the integrand sits on a face of the cube where the rule
    clusters its nodes, and each gap is a product of positive factors.
    """
    k = len(union)
    pos = {i: p for p, i in enumerate(union)}
    g_all = _Group(n, range(k), union, k)
    g_a = _Group(n, [pos[i] for i in a], a, k)
    g_b = _Group(n, [pos[i] for i in b], b, k)
    v, vc, w = _tanh_sinh(level)
    m = len(v)
    # chunk over the first coordinate to bound memory
    tail = np.indices((m,) * (k - 1)).reshape(k - 1, -1)
    total = []
    for i0 in range(m):
        cols = [np.full(tail.shape[1], i0), *tail]
        rem = np.ones(tail.shape[1])
        jac = np.ones(tail.shape[1])
        weight = np.ones(tail.shape[1])
        gaps = []
        for c in cols:
            jac = jac * rem
            gaps.append(rem * v[c])
            rem = rem * vc[c]
            weight = weight * w[c]
        gaps.append(rem)
        gaps = np.column_stack(gaps)
        lf = g_all.log_pdf(gaps)
        ratio = lf - g_a.log_pdf(gaps) - g_b.log_pdf(gaps)
        dens = np.exp(lf)
        good = dens > 0.0
        total.append(np.sum(weight * jac * dens * np.where(good, ratio, 0.0)))
    return math.fsum(total)


def _refine(n, union, a, b, tol: float, budget: int, start: int, what: str) -> tuple[float, int]:
    """Double the node density until two successive levels agree to ``tol``."""
    dim = len(union)
    effort = 0
    prev = None
    level = start
    while True:
        cost = len(_tanh_sinh(level)[0]) ** dim
        if effort + cost > budget:
            raise OracleError(
                f"{what}: no convergence within {budget} evaluations",
                best_estimate=math.nan if prev is None else prev,
            )
        value = _simplex_mi(n, union, a, b, level)
        effort += cost
        if prev is not None and abs(value - prev) <= tol:
            return value, effort
        prev = value
        level += 1


def quad_mi_pair(n: int, r: int, m: int, tol: float = 1e-8, budget: int = 10**7) -> OracleReport:
    """Quadrature of the bivariate order-statistic density against ``mi_pair``."""
    exact = mi_pair(n, r, m)
    r, m = min(r, m), max(r, m)
    if not 1 <= r < m <= n <= 12:
        raise DomainError(f"quadrature oracle needs 1 <= r < m <= n <= 12, got n={n}, r={r}, m={m}")
    value, effort = _refine(n, (r, m), (r,), (m,), tol, budget, 3, "quad_mi_pair")
    return OracleReport.compare(exact.value, value, "oracle-quadrature", effort)


def quad_mi_subsets(
    n: int, a: Sequence[int], b: Sequence[int], tol: float = 1e-6, budget: int = 3 * 10**7
) -> OracleReport:
    """Quadrature check of ``mi_subsets`` for disjoint groups with at most four indices in total."""
    ia, ib = IndexSet.of(n, a), IndexSet.of(n, b)
    exact = mi_subsets(n, ia, ib)
    if exact.infinite:
        raise DomainError("overlapping groups have infinite MI; nothing to integrate")
    union = ia.union(ib).indices
    if len(union) > 4:
        raise DomainError("quadrature oracle supports at most four order statistics")
    start = {1: 4, 2: 3, 3: 2, 4: 1}[len(union)]
    value, effort = _refine(n, union, ia.indices, ib.indices, tol, budget, start, "quad_mi_subsets")
    return OracleReport.compare(exact.value, value, "oracle-quadrature", effort)


# --------------------------------------------------------------------------
# enumeration

_ENUM_CHUNK = 1 << 18


def enumerate_joint_pmf(n: int, dist: DiscreteDist, r: int, m: int, budget: int = 10**7) -> np.ndarray:
    """Joint pmf of ``(X_(r), X_(m))`` from all ``K**n`` samples, each sorted explicitly."""
    k = len(dist)
    total = k**n
    if total > budget:
        raise DomainError(f"{k}**{n} = {total} outcomes exceeds the enumeration budget {budget}; use Monte Carlo")
    probs = np.asarray(dist.probs)
    table = np.zeros(k * k)
    for start in range(0, total, _ENUM_CHUNK):
        codes = np.arange(start, min(start + _ENUM_CHUNK, total))
        digits = np.empty((len(codes), n), dtype=np.int64)
        rest = codes
        for j in range(n):
            rest, digits[:, j] = np.divmod(rest, k)
        weight = np.prod(probs[digits], axis=1)
        ordered = np.sort(digits, axis=1)
        cell = ordered[:, r - 1] * k + ordered[:, m - 1]
        table += np.bincount(cell, weights=weight, minlength=k * k)
    return table.reshape(k, k)


def enum_mi_discrete(
    n: int,
    dist: DiscreteDist,
    r: int,
    m: int,
    budget: int = 10**7,
    reference: Literal["auto", "exact", "bernoulli"] = "auto",
) -> OracleReport:
    """Exhaustive-enumeration MI compared with the closed form.

    ``reference="auto"`` uses the Bernoulli formula for two-point support and
    the general exact computation otherwise.
    """
    if not 1 <= r < m <= n:
        raise DomainError(f"need 1 <= r < m <= n, got n={n}, r={r}, m={m}")
    table = enumerate_joint_pmf(n, dist, r, m, budget)
    value = mi_from_table(table)
    use_bern = reference == "bernoulli" or (reference == "auto" and len(dist) == 2)
    if use_bern:
        if len(dist) != 2:
            raise DomainError("Bernoulli reference needs a two-point support")
        exact = mi_bernoulli(n, dist.probs[1], r, m)
    else:
        exact = mi_discrete_exact(n, dist, r, m)
    return OracleReport.compare(exact, value, "oracle-enumeration", len(dist) ** n)


# --------------------------------------------------------------------------
# Monte Carlo

_MC_CHUNK = 1 << 17


def _discrete_counts(gen: np.random.Generator, size: int, n: int, cdf: np.ndarray, r: int, m: int) -> np.ndarray:
    k = len(cdf)
    counts = np.zeros(k * k, dtype=np.int64)
    for start in range(0, size, _MC_CHUNK):
        rows = min(_MC_CHUNK, size - start)
        u = gen.random((rows, n))
        draws = np.minimum(np.searchsorted(cdf, u, side="right"), k - 1)
        draws.sort(axis=1)
        counts += np.bincount(draws[:, r - 1] * k + draws[:, m - 1], minlength=k * k)
    return counts


def mc_mi_discrete(
    n: int,
    dist: DiscreteDist,
    r: int,
    m: int,
    samples: int,
    rng: RNGSpec,
    bootstrap: int = 200,
) -> OracleReport:
    """Plug-in MI from simulated samples with a bootstrap standard error.

    The bootstrap resamples the table of cell counts multinomially, which is
    the same as resampling the simulated pairs with replacement.
    """
    if samples < 1000:
        raise DomainError("Monte Carlo needs at least 1000 samples")
    if not 1 <= r < m <= n:
        raise DomainError(f"need 1 <= r < m <= n, got n={n}, r={r}, m={m}")
    k = len(dist)
    cdf = dist.cdf()
    jobs = [(g, size, n, cdf, r, m) for g, size in zip(rng.generators(), rng.split(samples))]
    counts = np.sum(_map_streams(_discrete_counts, jobs), axis=0)
    p_hat = counts / samples
    estimate = mi_from_table(p_hat.reshape(k, k))
    boot = rng.aux_generator().multinomial(samples, p_hat, size=bootstrap) / samples
    se = float(np.std([mi_from_table(t.reshape(k, k)) for t in boot], ddof=1))
    exact = mi_discrete_exact(n, dist, r, m)
    return OracleReport.compare(exact, estimate, "oracle-montecarlo", samples, rng.seed, se)


def _cov_block_sums(gen: np.random.Generator, size: int, family: str, lam: float, n: int, r: int, m: int) -> list[np.ndarray]:
    blocks = []
    for start in range(0, size, _MC_CHUNK):
        rows = min(_MC_CHUNK, size - start)
        if family == "uniform":
            x = gen.random((rows, n))
        else:
            x = gen.exponential(1.0 / lam, (rows, n))
        x.sort(axis=1)
        a, b = x[:, r - 1], x[:, m - 1]
        blocks.append(np.array([rows, a.sum(), b.sum(), (a * b).sum()]))
    return blocks


def mc_covariance(
    family: Literal["uniform", "exponential"],
    n: int,
    r: int,
    m: int,
    samples: int,
    rng: RNGSpec,
    lam: float = 1.0,
) -> OracleReport:
    """Simulated ``Cov(X_(r), X_(m))`` with a delete-one-block jackknife standard error."""
    if samples < 1000:
        raise DomainError("Monte Carlo needs at least 1000 samples")
    if family == "uniform":
        exact = covariance_uniform(n, r, m)
    elif family == "exponential":
        if (r, m) != (1, 2):
            raise DomainError("the exponential covariance is only available for (r, m) = (1, 2)")
        exact = covariance_exponential_min2(n, lam)
    else:
        raise DomainError(f"unknown family {family!r}")
    jobs = [(g, size, family, float(lam), n, r, m) for g, size in zip(rng.generators(), rng.split(samples))]
    blocks = np.array([blk for stream in _map_streams(_cov_block_sums, jobs) for blk in stream])
    totals = blocks.sum(axis=0)

    def cov(s):
        cnt, sa, sb, sab = s[..., 0], s[..., 1], s[..., 2], s[..., 3]
        return (sab - sa * sb / cnt) / (cnt - 1)

    estimate = float(cov(totals))
    g = len(blocks)
    if g < 2:
        raise DomainError("need at least two blocks for the jackknife")
    loo = cov(totals[None, :] - blocks)
    se = float(math.sqrt((g - 1) / g * np.sum((loo - loo.mean()) ** 2)))
    return OracleReport.compare(exact, estimate, "oracle-montecarlo", samples, rng.seed, se)
