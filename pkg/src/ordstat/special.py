"""Scalar building blocks: harmonic numbers, log-factorials, digamma and the T sequence.

``T_k = log(k!) - k*H_k`` grows like ``-(1 + gamma) * k``, while every
information measure in this package is a *difference* of T values that can
be as small as ``1/n**2``.  Subtracting two large T values throws away the
leading digits, so differences are never formed that way here.  Instead the
linear drift is removed analytically:

    S_k = T_k + (1 + gamma) * k = sum_{j<k} g(j),   g(j) = log(j+1) - digamma(j+1)

``S_k`` is O(log k) and ``g(j)`` is a small positive number computed without
cancellation, so ``T_b - T_a = S_b - S_a - (1 + gamma) * (b - a)`` and, better,
the drift terms cancel exactly inside the KL and MI formulas.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

#: Euler-Mascheroni constant (20 significant digits).
EULER_GAMMA = 0.57721566490153286061

_ONE_PLUS_GAMMA = 1.0 + EULER_GAMMA
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2, B_4, ..., B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_DIGAMMA_SHIFT = 10.0
_SERIES_MIN = 48


@dataclass(frozen=True)
class BracketedValue:
    """A value with certified lower and upper bounds (natural-log units)."""

    value: float
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.value <= self.hi):
            raise ValueError(f"bracket [{self.lo}, {self.hi}] does not contain {self.value}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


class CompensatedSum:
    """Running Neumaier (improved Kahan) summation."""

    __slots__ = ("_s", "_c")

    def __init__(self, start: float = 0.0):
        self._s = float(start)
        self._c = 0.0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


class TSeqContext:
    """Memoized harmonic numbers and log-factorials up to ``max_exact_k``.

    Tables are filled by compensated direct summation on first demand and
    only ever appended to, so a value once read never changes.  Growth is
    guarded by a lock; reads of already-built entries need no locking.
    """

    def __init__(self, max_exact_k: int = 10**6):
        if max_exact_k < 1:
            raise DomainError("max_exact_k must be positive")
        self.max_exact_k = int(max_exact_k)
        self._harm = [0.0]
        self._lfact = [0.0]
        self._harm_acc = CompensatedSum()
        self._lfact_acc = CompensatedSum()
        self._lock = threading.Lock()

    def _ensure(self, k: int) -> None:
        if k < len(self._harm):
            return
        with self._lock:
            start = len(self._harm)
            harm, lfact = self._harm, self._lfact
            h_acc, l_acc = self._harm_acc, self._lfact_acc
            for j in range(start, k + 1):
                h_acc.add(1.0 / j)
                l_acc.add(math.log(j))
                harm.append(h_acc.value)
                lfact.append(l_acc.value)

    def harmonic(self, k: int) -> float:
        k = _check_nonneg_int(k, "k")
        if k <= self.max_exact_k:
            self._ensure(k)
            return self._harm[k]
        return digamma(k + 1.0) + EULER_GAMMA

    def log_factorial(self, k: int) -> float:
        k = _check_nonneg_int(k, "k")
        if k <= self.max_exact_k:
            self._ensure(k)
            return self._lfact[k]
        return math.lgamma(k + 1.0)

    def t_value(self, k: int) -> float:
        k = _check_nonneg_int(k, "k")
        if k < _SERIES_MIN:
            self._ensure(k)
            return self._lfact[k] - k * self._harm[k]
        return t_shift(k) - _ONE_PLUS_GAMMA * k


def _check_nonneg_int(k, name: str) -> int:
    if isinstance(k, bool) or int(k) != k:
        raise DomainError(f"{name} must be an integer, got {k!r}")
    k = int(k)
    if k < 0:
        raise DomainError(f"{name} must be >= 0, got {k}")
    return k


def _check_pos_int(k, name: str) -> int:
    k = _check_nonneg_int(k, name)
    if k < 1:
        raise DomainError(f"{name} must be >= 1, got {k}")
    return k


def _bernoulli_tail(inv_x2: float, weights: tuple[float, ...]) -> float:
    """Horner evaluation of sum_j weights[j] * inv_x2**j, j >= 1."""
    acc = 0.0
    for w in reversed(weights):
        acc = (acc + w) * inv_x2
    return acc


_DIGAMMA_W = tuple(b / (2 * (j + 1)) for j, b in enumerate(_BERNOULLI))
_SHIFT_W = tuple(b / (2 * (j + 1) - 1) for j, b in enumerate(_BERNOULLI))


def digamma(x: float) -> float:
    """Digamma function for positive real ``x``.

    Shifts ``x`` above 10 with the recurrence ``psi(x) = psi(x+1) - 1/x`` and
    then applies the asymptotic Bernoulli series.
    """
    x = float(x)
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"digamma requires a finite x > 0, got {x}")
    shift = CompensatedSum()
    while x < _DIGAMMA_SHIFT:
        shift.add(1.0 / x)
        x += 1.0
    inv = 1.0 / x
    series = 0.5 * inv + _bernoulli_tail(inv * inv, _DIGAMMA_W)
    return math.log(x) - series - shift.value


def _log_minus_digamma(x: float) -> float:
    # log(x) - psi(x); positive, ~1/(2x)
    if x >= _DIGAMMA_SHIFT:
        inv = 1.0 / x
        return 0.5 * inv + _bernoulli_tail(inv * inv, _DIGAMMA_W)
    return math.log(x) - digamma(x)


@lru_cache(maxsize=1 << 16)
def step_excess(k: int) -> float:
    """``t_step(k) + 1 + gamma = log(k+1) - digamma(k+1)``; positive and decreasing."""
    return _log_minus_digamma(k + 1.0)


def _build_shift_table() -> tuple[float, ...]:
    terms = [step_excess(j) for j in range(_SERIES_MIN)]
    return tuple(math.fsum(terms[:k]) for k in range(_SERIES_MIN))


_SHIFT_TABLE = _build_shift_table()


def t_shift(k: int) -> float:
    """``T_k + (1 + gamma) * k``, i.e. the accumulated step excesses ``sum_{j<k} g(j)``.

    Small ``k`` uses the direct compensated sum; from 48 on, the closed
    asymptotic series ``log(2 pi k)/2 - 1/2 + sum_j B_2j / ((2j-1) k**(2j-1))``,
    which has no cancellation.
    """
    return _shift(_check_nonneg_int(k, "k"))


@lru_cache(maxsize=1 << 16)
def _shift(k: int) -> float:
    if k < _SERIES_MIN:
        return _SHIFT_TABLE[k]
    inv = 1.0 / k
    return _HALF_LOG_2PI + 0.5 * math.log(k) - 0.5 + inv * (
        _SHIFT_W[0] + _bernoulli_tail(inv * inv, _SHIFT_W[1:])
    )


def t_shift_diff(a: int, b: int) -> float:
    """``sum_{j=a}^{b-1} g(j)``, so that ``T_b - T_a = t_shift_diff(a, b) - (1+gamma)(b-a)``."""
    return _shift_diff(_check_nonneg_int(a, "a"), _check_nonneg_int(b, "b"))


def _shift_diff(a: int, b: int) -> float:
    # short spans are summed term by term: S_b - S_a would lose ~log10(a) digits
    if b < a:
        return -_shift_diff(b, a)
    if b - a <= 4:
        return math.fsum([step_excess(j) for j in range(a, b)])
    return _shift(b) - _shift(a)


_DEFAULT = TSeqContext()


def default_context() -> TSeqContext:
    return _DEFAULT


def harmonic(k: int) -> float:
    """Harmonic number ``H_k`` with ``H_0 = 0``."""
    return _DEFAULT.harmonic(k)


def log_factorial(k: int) -> float:
    return _DEFAULT.log_factorial(k)


def t_value(k: int) -> float:
    """``T_k = log(k!) - k*H_k`` with ``T_0 = 0``."""
    return _DEFAULT.t_value(k)


def t_step(k: int) -> float:
    """``T_{k+1} - T_k = log(k+1) - H_k - 1``.

    Evaluated as ``g(k) - (1 + gamma)`` where ``g(k) = log(k+1) - H_k + gamma``
    comes from the cancellation-free digamma series, which keeps the result
    within an ulp or two even for ``k`` in the millions.
    """
    k = _check_nonneg_int(k, "k")
    return step_excess(k) - _ONE_PLUS_GAMMA


def e_bounds(k: int) -> tuple[float, float]:
    """Bounds on the remainder ``e(k)`` of the T-expansion."""
    k = _check_pos_int(k, "k")
    lo = k / (24.0 * (k + 1) ** 2) - 1.0 / (12.0 * k)
    hi = 1.0 / (24.0 * k) - 1.0 / (12.0 * k + 1.0)
    return lo, hi


def c_bounds(k: int) -> tuple[float, float]:
    """Bounds on the remainder ``c(k)`` of the T-step expansion (valid for k >= 0)."""
    k = _check_nonneg_int(k, "k")
    return 1.0 / (24.0 * (k + 2) ** 2), 1.0 / (24.0 * (k + 1) ** 2)


def _padded(mid: float, lo: float, hi: float, pad: float) -> BracketedValue:
    return BracketedValue(mid, lo - pad, hi + pad)


def t_approx(k: int) -> BracketedValue:
    """Bracket on ``T_k`` from ``k log(2k/(2k+1)) + log(2 pi k)/2 - (1+gamma)k - e(k)``.

    The endpoints substitute the two bounds on ``e(k)``.  They are widened by
    a few ulps of ``|T_k|`` plus ``k`` ulps of ``1 + gamma`` so that floating
    point rounding cannot push the true value outside.
    """
    k = _check_pos_int(k, "k")
    base = k * math.log1p(-1.0 / (2 * k + 1)) + _HALF_LOG_2PI + 0.5 * math.log(k)
    e_lo, e_hi = e_bounds(k)
    drift = _ONE_PLUS_GAMMA * k
    lo = (base - e_hi) - drift
    hi = (base - e_lo) - drift
    mid = (base - 0.5 * (e_lo + e_hi)) - drift
    pad = 4.0 * math.ulp(abs(mid)) + k * 2.0**-52
    return _padded(mid, lo, hi, pad)


def t_step_approx(k: int) -> BracketedValue:
    """Bracket on ``T_{k+1} - T_k`` from ``log((2k+2)/(2k+3)) - (1+gamma) + 1/(k+1) - c(k)``."""
    k = _check_pos_int(k, "k")
    base = math.log1p(-1.0 / (2 * k + 3)) + 1.0 / (k + 1) - _ONE_PLUS_GAMMA
    c_lo, c_hi = c_bounds(k)
    pad = 8.0 * math.ulp(abs(base))
    return _padded(base - 0.5 * (c_lo + c_hi), base - c_hi, base - c_lo, pad)
