"""Verification suites run by ``ordstat verify``.

Each suite returns a :class:`SuiteResult` whose checks are plain dicts so
they serialize straight to JSON.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .asymptotics import named_case, scaled_mi
from .continuous import mi_pair
from .discrete import DiscreteDist, check_upper_bound, mi_bernoulli, random_dist
from .errors import DomainError
from .oracles import RNGSpec, enum_mi_discrete, mc_covariance, quad_mi_pair, t_reference
from .special import t_approx, t_step_approx

SUITES = ("lemma1", "quadrature", "enumeration", "bound", "covariance")

BERNOULLI_P = (0.1, 0.3, 0.5, 0.7, 0.9)
UNIFORM_COV_CASES = ((3, 1, 3), (10, 5, 5), (10, 2, 9))
EXPONENTIAL_COV_CASES = ((2, 1.0), (10, 1.0), (10, 2.0))


@dataclass
class SuiteResult:
    name: str
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    @property
    def failures(self) -> int:
        return sum(not c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.name, "pass": self.passed, "checks": len(self.checks),
                "failures": self.failures, "rows": self.checks}


def random_cases(seed: int, count: int, n_max: int, max_support: int) -> list[tuple[int, DiscreteDist, int, int]]:
    """Reproducible ``(n, dist, r, m)`` draws with ``2 <= n <= n_max`` and ``r < m``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        dist = random_dist(rng, max_support)
        r, m = sorted(int(x) for x in rng.choice(np.arange(1, n + 1), size=2, replace=False))
        out.append((n, dist, r, m))
    return out


def lemma1(k_max: int = 10**5) -> SuiteResult:
    """Containment of extended-precision ``T_k`` and its steps in the analytic brackets."""
    t, step = t_reference(k_max)
    bad_t = [k for k in range(1, k_max + 1) if not t_approx(k).contains(t[k - 1])]
    bad_s = [k for k in range(1, k_max + 1) if not t_step_approx(k).contains(step[k - 1])]
    res = SuiteResult("lemma1")
    res.checks.append({"check": "t_approx", "k_max": k_max, "violations": len(bad_t),
                       "first": bad_t[:5], "pass": not bad_t})
    res.checks.append({"check": "t_step_approx", "k_max": k_max, "violations": len(bad_s),
                       "first": bad_s[:5], "pass": not bad_s})
    return res


def quadrature(n_max: int = 8, budget: int = 10**7, tol: float = 1e-6) -> SuiteResult:
    res = SuiteResult("quadrature")
    for n in range(2, n_max + 1):
        for r in range(1, n):
            for m in range(r + 1, n + 1):
                rep = quad_mi_pair(n, r, m, budget=budget)
                res.checks.append({"n": n, "r": r, "m": m, **rep.to_dict(), "pass": rep.abs_diff < tol})
    return res


def enumeration(seed: int = 0, budget: int = 10**7, tol: float = 1e-12) -> SuiteResult:
    res = SuiteResult("enumeration")
    for p in BERNOULLI_P:
        dist = DiscreteDist.bernoulli(p)
        for n in range(2, 13):
            for r in range(1, n):
                for m in range(r + 1, n + 1):
                    rep = enum_mi_discrete(n, dist, r, m, budget=budget, reference="bernoulli")
                    res.checks.append({"n": n, "p": p, "r": r, "m": m, **rep.to_dict(),
                                       "pass": rep.abs_diff < tol})
    for n, dist, r, m in random_cases(seed, 50, 8, 4):
        rep = enum_mi_discrete(n, dist, r, m, budget=budget, reference="exact")
        res.checks.append({"n": n, "dist": dist.to_mapping(), "r": r, "m": m, **rep.to_dict(),
                           "pass": rep.abs_diff < tol})
    return res


def bound(seed: int = 42, count: int = 200, n_max: int = 8, max_support: int = 5) -> SuiteResult:
    """The continuous MI bounds the discrete one for every pair of ``count`` random (n, dist) draws."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("bound")
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        dist = random_dist(rng, max_support)
        worst = None
        for r in range(1, n):
            for m in range(r + 1, n + 1):
                chk = check_upper_bound(n, dist, r, m)
                if worst is None or chk.margin < worst[0].margin:
                    worst = (chk, r, m)
        chk, r, m = worst
        res.checks.append({"n": n, "dist": dist.to_mapping(), "worst_r": r, "worst_m": m,
                           "continuous": chk.continuous, "discrete": chk.discrete,
                           "margin": chk.margin, "pass": chk.holds})
    return res


def covariance(seed: int = 0, samples: int = 10**7, k_se: float = 4.0) -> SuiteResult:
    res = SuiteResult("covariance")
    for i, (n, r, m) in enumerate(UNIFORM_COV_CASES):
        rep = mc_covariance("uniform", n, r, m, samples, RNGSpec(seed + i))
        res.checks.append({"family": "uniform", "n": n, "r": r, "m": m, **rep.to_dict(),
                           "pass": rep.within_se(k_se)})
    for i, (n, lam) in enumerate(EXPONENTIAL_COV_CASES):
        rep = mc_covariance("exponential", n, 1, 2, samples, RNGSpec(seed + 100 + i), lam=lam)
        res.checks.append({"family": "exponential", "lambda": lam, "n": n, "r": 1, "m": 2,
                           **rep.to_dict(), "pass": rep.within_se(k_se)})
    return res


def run(name: str, seed: int | None = None, budget: int | None = None) -> list[SuiteResult]:
    """Run one suite, or all of them for ``name == "all"``.

    ``budget`` is the per-suite effort knob: the largest ``k`` for lemma1,
    the evaluation cap for quadrature and enumeration, the number of random
    cases for bound and the sample count for covariance.
    """
    kw_seed = {} if seed is None else {"seed": seed}
    table: dict[str, Callable[[], SuiteResult]] = {
        "lemma1": lambda: lemma1(**({} if budget is None else {"k_max": budget})),
        "quadrature": lambda: quadrature(**({} if budget is None else {"budget": budget})),
        "enumeration": lambda: enumeration(**kw_seed, **({} if budget is None else {"budget": budget})),
        "bound": lambda: bound(**kw_seed, **({} if budget is None else {"count": budget})),
        "covariance": lambda: covariance(**kw_seed, **({} if budget is None else {"samples": budget})),
    }
    if name == "all":
        return [table[s]() for s in SUITES]
    if name not in table:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return [table[name]()]


# --------------------------------------------------------------------------
# CSV round trip


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def fig3_bernoulli(n: int, p: float) -> float:
    return 0.0 if n < 2 else mi_bernoulli(n, p, n - 1, n)


def fig3_uniform(n: int) -> float:
    return 0.0 if n < 2 else mi_pair(n, n - 1, n).value


def verify_csv(path: str | Path, log_base: float = math.e, p: float = 0.5) -> SuiteResult:
    """Re-read a CSV written by the CLI and recompute every row.

    Recognized headers are the two figure tables and the convergence sweep
    of ``limit --sweep`` (the latter needs the case, so only its internal
    ``gap = |scaled_exact - limit|`` consistency is checked).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    scale = 1.0 / math.log(log_base)
    res = SuiteResult(f"csv:{path.name}")

    def num(x: str) -> float:
        return math.inf if x == "inf" else float(x)

    if header == ["n", "n_times_mi", "limit"]:
        case = named_case("median-vs-max")
        for row in body:
            n, got, lim = int(row[0]), num(row[1]), num(row[2])
            want = scaled_mi(case, n) * scale
            res.checks.append({"n": n, "csv": got, "recomputed": want, "rel_diff": _rel(got, want),
                               "pass": _rel(got, want) < 1e-9 and _rel(lim, case.limit() * scale) < 1e-12})
    elif header == ["n", "mi_bernoulli_p05_step1", "mi_uniform_step1"]:
        for row in body:
            n, bern, unif = int(row[0]), num(row[1]), num(row[2])
            wb, wu = fig3_bernoulli(n, p) * scale, fig3_uniform(n) * scale
            ok = (bern == wb or _rel(bern, wb) < 1e-6) and (unif == wu or _rel(unif, wu) < 1e-9)
            res.checks.append({"n": n, "bernoulli": bern, "uniform": unif, "pass": ok})
    elif header == ["n", "scaled_exact", "limit", "gap"]:
        for row in body:
            n, val, lim, gap = int(row[0]), num(row[1]), num(row[2]), num(row[3])
            res.checks.append({"n": n, "gap": gap, "pass": abs(abs(val - lim) - gap) <= 1e-12 * max(1.0, abs(val))})
    else:
        raise DomainError(f"{path}: unrecognized CSV header {','.join(header)}")
    return res
