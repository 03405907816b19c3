"""Large-sample decoupling limits for pairs of order statistics.

Five regimes are covered.  Each pairs an index rule ``n -> (r, m)`` with a
normalization (``1``, ``n`` or ``n**2``) under which the MI has a finite,
nonzero limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .continuous import mi_pair
from .errors import DomainError
from .special import EULER_GAMMA, BracketedValue, c_bounds, harmonic, t_shift_diff

CaseId = Literal["r-vs-max", "r-vs-m", "k-step", "quantile-pair", "quantile-vs-max"]
Scale = Literal["none", "n", "n-squared"]
Rate = Literal["n-cubed", "n-squared", "n", "none"]

_SCALE: dict[str, Scale] = {
    "r-vs-max": "n-squared",
    "r-vs-m": "none",
    "k-step": "none",
    "quantile-pair": "none",
    "quantile-vs-max": "n",
}

# (mi rate, covariance rate), rows of the decoupling-rate table
_RATES: dict[str, tuple[Rate, Rate]] = {
    "r-vs-max": ("n-squared", "n-cubed"),
    "r-vs-m": ("none", "n-squared"),
    "k-step": ("none", "n-squared"),
    "quantile-pair": ("none", "n"),
    "quantile-vs-max": ("n", "n-squared"),
}


def _pos_int(x, name: str) -> int:
    if x is None or isinstance(x, bool) or int(x) != x or int(x) < 1:
        raise DomainError(f"{name} must be a positive integer, got {x!r}")
    return int(x)


@dataclass(frozen=True)
class AsymptoticCase:
    """One large-n regime together with its parameters."""

    case_id: CaseId
    r: int | None = None
    m: int | None = None
    k: int | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        cid = self.case_id
        if cid == "r-vs-max":
            _pos_int(self.r, "r")
        elif cid == "r-vs-m":
            r, m = _pos_int(self.r, "r"), _pos_int(self.m, "m")
            if r >= m:
                raise DomainError(f"r-vs-m needs r < m, got r={r}, m={m}")
        elif cid == "k-step":
            _pos_int(self.k, "k")
        elif cid == "quantile-pair":
            a, b = self.alpha, self.beta
            if a is None or b is None or not (0.0 < a < b < 1.0):
                raise DomainError(f"quantile-pair needs 0 < alpha < beta < 1, got {a}, {b}")
        elif cid == "quantile-vs-max":
            a = self.alpha
            if a is None or not (0.0 < a < 1.0):
                raise DomainError(f"quantile-vs-max needs 0 < alpha < 1, got {a}")
        else:
            raise DomainError(f"unknown case {cid!r}")

    @property
    def scale(self) -> Scale:
        return _SCALE[self.case_id]

    def scale_factor(self, n: int) -> float:
        return {"none": 1.0, "n": float(n), "n-squared": float(n) * n}[self.scale]

    def indices(self, n: int) -> tuple[int, int]:
        """The pair ``(r, m)`` used at sample size ``n``; invalid pairs are rejected, not clamped."""
        cid = self.case_id
        if cid == "r-vs-max":
            r, m = self.r, n
        elif cid == "r-vs-m":
            r, m = self.r, self.m
        elif cid == "k-step":
            r, m = n - self.k, n
        elif cid == "quantile-pair":
            r, m = math.floor(self.alpha * n), math.ceil(self.beta * n)
        else:
            r, m = math.floor(self.alpha * n), n
        if not 1 <= r < m <= n:
            raise DomainError(f"{cid} gives invalid indices (r={r}, m={m}) at n={n}")
        return r, m

    def limit(self) -> float:
        cid = self.case_id
        if cid == "r-vs-max":
            return limit_r_vs_max(self.r)
        if cid == "r-vs-m":
            return limit_fixed_pair(self.r, self.m)
        if cid == "k-step":
            return limit_k_step(self.k)
        if cid == "quantile-pair":
            return limit_quantile_pair(self.alpha, self.beta)
        return limit_quantile_vs_max(self.alpha)


#: Shorthand names accepted by :func:`named_case`.
NAMED_CASES = {
    "min-vs-max": AsymptoticCase("r-vs-max", r=1),
    "median-vs-max": AsymptoticCase("quantile-vs-max", alpha=0.5),
    "q1-vs-max": AsymptoticCase("quantile-vs-max", alpha=0.25),
    "q3-vs-max": AsymptoticCase("quantile-vs-max", alpha=0.75),
    "1-step": AsymptoticCase("k-step", k=1),
}


def named_case(name: str) -> AsymptoticCase:
    try:
        return NAMED_CASES[name]
    except KeyError:
        raise DomainError(f"unknown named case {name!r}; choose from {sorted(NAMED_CASES)}") from None


def limit_r_vs_max(r: int) -> float:
    """Limit of ``n**2 I(X_(r); X_(n))``: ``r / 2``."""
    return _pos_int(r, "r") / 2.0


def limit_fixed_pair(r: int, m: int) -> float:
    """Limit of ``I(X_(r); X_(m))`` for fixed ``r < m``: ``T_{m-1} - T_{m-r-1} + (1+gamma) r``."""
    r, m = _pos_int(r, "r"), _pos_int(m, "m")
    if r >= m:
        raise DomainError(f"need r < m, got r={r}, m={m}")
    # the (1+gamma) r drift of the T-difference cancels the added term exactly
    return t_shift_diff(m - r - 1, m - 1)


def limit_k_step(k: int) -> float:
    """Limit of ``I(X_(n-k); X_(n))``: ``log k - H_{k-1} + gamma``."""
    k = _pos_int(k, "k")
    return math.log(k) - harmonic(k - 1) + EULER_GAMMA


def limit_k_step_bracket(k: int) -> BracketedValue:
    """The k-step limit in its second form, ``log(k/(k+1/2)) + 1/k - c(k-1)``.

    The remainder is the T-step remainder at index ``k - 1``, i.e. the one
    multiplying ``T_k - T_{k-1}``.
    """
    k = _pos_int(k, "k")
    base = math.log1p(-1.0 / (2 * k + 1)) + 1.0 / k
    c_lo, c_hi = c_bounds(k - 1)
    pad = 8.0 * math.ulp(abs(base))
    return BracketedValue(base - 0.5 * (c_lo + c_hi), base - c_hi - pad, base - c_lo + pad)


def limit_quantile_pair(alpha: float, beta: float) -> float:
    """Limit of ``I(X_(floor(alpha n)); X_(ceil(beta n)))``: ``log(beta (1-alpha) / (beta-alpha)) / 2``."""
    if not (0.0 < alpha < beta < 1.0):
        raise DomainError(f"need 0 < alpha < beta < 1, got {alpha}, {beta}")
    return 0.5 * math.log(beta * (1.0 - alpha) / (beta - alpha))


def limit_quantile_vs_max(alpha: float) -> float:
    """Limit of ``n I(X_(floor(alpha n)); X_(n))``: ``alpha / (2 (1 - alpha))``."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"need 0 < alpha < 1, got {alpha}")
    return alpha / (2.0 * (1.0 - alpha))


def decoupling_rate(case: AsymptoticCase) -> dict[str, Rate]:
    """Rates at which MI and covariance vanish; ``"none"`` means MI stays bounded away from 0."""
    mi, cov = _RATES[case.case_id]
    return {"mi": mi, "covariance": cov}


class ConvergenceRow(NamedTuple):
    n: int
    scaled_exact: float
    limit: float
    gap: float


def scaled_mi(case: AsymptoticCase, n: int) -> float:
    r, m = case.indices(n)
    return case.scale_factor(n) * mi_pair(n, r, m).value


def convergence_table(case: AsymptoticCase, n_values: Sequence[int]) -> list[ConvergenceRow]:
    """Exact normalized MI next to its limit for each ``n``, sorted by ``n``."""
    lim = case.limit()
    rows = []
    for n in sorted(int(v) for v in n_values):
        value = scaled_mi(case, n)
        rows.append(ConvergenceRow(n, value, lim, abs(value - lim)))
    return rows


def fit_gap_slope(rows: Sequence[ConvergenceRow]) -> float:
    """Least-squares slope of ``log(gap)`` against ``log(n)``."""
    pts = [(math.log(r.n), math.log(r.gap)) for r in rows if r.gap > 0.0]
    if len(pts) < 2:
        raise DomainError("need at least two rows with a positive gap")
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])
