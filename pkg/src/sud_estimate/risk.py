"""Exact risk of a coefficient scheme and its large-N expansion diagnostics.

For a scheme c over the partitions of level N the figure of merit is

    risk = 1 - sum_{lambda'} ( sum_{i in S(lambda')} c(lambda' - e_i) )^2
               / ( d^2 * sum_lambda c(lambda)^2 ),

where lambda' runs over the partitions of level N+1 and S(lambda') is the set
of rows from which a box can be removed.  The numerator couples each level-
(N+1) partition to its level-N parents; risk = 0 would need every inner sum
to saturate Cauchy-Schwarz simultaneously, and the shape of the best
achievable deficit is what drives the 1/N^2 estimation rate.

Everything in this module is exact rational arithmetic on the unnormalised
coefficients; a floating-point fast path with compensated summation is
provided for long sweeps and is validated against the exact path in the test
suite.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import EmptySumError, EmptySupportError
from .partitions import enumerate_partitions, gap_vector, removable_rows
from .weights import Scheme, WeightVector, parse_scheme, scheme_weights

__all__ = [
    "RiskBreakdown",
    "exact_risk",
    "float_risk",
    "ExpansionDiagnostics",
    "expansion_diagnostics",
    "BoundWitness",
    "cauchy_schwarz_bound_check",
    "RiskPoint",
    "FitResult",
    "RiskCurve",
    "risk_curve",
    "fit_constant",
    "curve_to_csv",
]


@dataclass(frozen=True)
class RiskBreakdown:
    """Exact risk together with the per-partition numerator terms.

    ``numerator_terms[lambda']`` is (sum of parent coefficients)^2 on the raw
    (unnormalised) scale, so

        risk = 1 - sum(numerator_terms.values()) / (d^2 * norm_sq).
    """

    d: int
    level: int
    risk: Fraction
    numerator_terms: dict[tuple[int, ...], Fraction]
    norm_sq: Fraction

    @property
    def numerator(self) -> Fraction:
        return sum(self.numerator_terms.values(), Fraction(0))


def _parent_sum(parts: tuple[int, ...], w: WeightVector) -> Fraction:
    total = Fraction(0)
    for i in removable_rows(parts):
        parent = parts[: i - 1] + (parts[i - 1] - 1,) + parts[i:]
        total += w.coefficient(parent)
    return total


def exact_risk(d: int, n: int, w: WeightVector) -> RiskBreakdown:
    """Exact risk of the scheme ``w`` at level ``n``.

    Raises :class:`EmptySupportError` if ``w`` has no nonzero coefficient.
    """
    if w.d != d or w.level != n:
        raise ValueError(f"weights are for d={w.d}, level {w.level}, not ({d}, {n})")
    if not w.entries:
        raise EmptySupportError(f"scheme has empty support at level {n} (d={d})")
    terms: dict[tuple[int, ...], Fraction] = {}
    for child in enumerate_partitions(d, n + 1):
        s = _parent_sum(child, w)
        terms[child] = s * s
    numerator = sum(terms.values(), Fraction(0))
    risk = 1 - numerator / (d * d * w.norm_sq)
    if not 0 <= risk <= 1:
        raise ArithmeticError(f"risk {risk} escaped [0, 1]; this is a bug")
    return RiskBreakdown(d, n, risk, terms, w.norm_sq)


def float_risk(d: int, n: int, w: WeightVector) -> float:
    """Floating-point risk with compensated (exactly rounded) summation.

    Fast path for long sweeps; agrees with :func:`exact_risk` to near machine
    precision on every case the tests compare.
    """
    if not w.entries:
        raise EmptySupportError(f"scheme has empty support at level {n} (d={d})")
    coeff = {parts: float(v) for parts, v in w.entries.items()}
    sq = math.fsum(c * c for c in coeff.values())
    terms = []
    for child in enumerate_partitions(d, n + 1):
        s = math.fsum(
            coeff.get(child[: i - 1] + (child[i - 1] - 1,) + child[i:], 0.0)
            for i in removable_rows(child)
        )
        terms.append(s * s)
    return 1.0 - math.fsum(terms) / (d * d * sq)


# ---------------------------------------------------------------------------
# Expansion diagnostics
# ---------------------------------------------------------------------------


def _r_corrections(gaps: tuple[int, ...], rows: set[int]) -> dict[int, int]:
    """First-order correction r(i) to the gap product when a box leaves row i.

    Removing a box from row i of lambda' shifts its gap vector p by
    +e_{i-1} - e_i, so the new gap product equals prod(p) + r(i) with

        r(i) = -prod_{j != i} p_j + [i > 1] (prod_{j != i-1} p_j
                                             - prod_{j != i-1, i} p_j).

    Exact integers; only rows in ``rows`` are needed.
    """
    d = len(gaps)

    def prod_except(skip: tuple[int, ...]) -> int:
        out = 1
        for j in range(1, d + 1):
            if j not in skip:
                out *= gaps[j - 1]
        return out

    out = {}
    for i in rows:
        r = -prod_except((i,))
        if i > 1:
            r += prod_except((i - 1,)) - prod_except((i - 1, i))
        out[i] = r
    return out


@dataclass(frozen=True)
class ExpansionDiagnostics:
    """Order-by-order pieces of the risk ratio for the gap-product scheme.

    Write the parent coefficient of row i as prod(p) + r(i) (see
    :func:`_r_corrections`) and expand numerator and denominator of the risk
    around the leading gap products, summing over the level-(N+1) partitions:

        numerator   = c_t * (1 + t1 + t2)
        d^2 norm_sq = c_u * (1 + u1 + u2)

    with c_t = sum (#S)^2 prod(p)^2, c_u = sum d #S prod(p)^2, t1/u1 the
    cross terms linear in r and t2/u2 the quadratic ones.  The identities
    c_t == c_u and t1 == u1 hold exactly, so u2 - t2 matches the exact risk
    up to O(N^-3); all fields are exact rationals.
    """

    d: int
    level: int
    c_t: Fraction
    c_u: Fraction
    t1: Fraction
    u1: Fraction
    t2: Fraction
    u2: Fraction

    @property
    def u2_minus_t2(self) -> Fraction:
        return self.u2 - self.t2

    def risk_from_expansion(self) -> Fraction:
        """Exact reconstruction 1 - c_t(1+t1+t2) / (c_u(1+u1+u2)).

        Recovers the gap-product risk without ever touching coefficients,
        which makes it an independent cross-check of :func:`exact_risk`.
        """
        return 1 - (self.c_t * (1 + self.t1 + self.t2)) / (
            self.c_u * (1 + self.u1 + self.u2)
        )


def expansion_diagnostics(d: int, n: int) -> ExpansionDiagnostics:
    """Exact expansion pieces at level ``n`` for the gap-product scheme.

    Needs n >= d(d+1)/2 - 1 so that level n+1 contains a strict partition;
    otherwise every term vanishes and :class:`EmptySumError` is raised.
    """
    c_t = 0
    c_u = 0
    t1_num = 0
    u1_num = 0
    t2_num = 0
    u2_num = 0
    for child in enumerate_partitions(d, n + 1):
        gaps = gap_vector(child)
        prod = 1
        for g in gaps:
            prod *= g
        rows = removable_rows(child)
        k = len(rows)
        r = _r_corrections(gaps, rows)
        c_t += k * k * prod * prod
        c_u += d * k * prod * prod
        r_sum = sum(r.values())
        t1_num += 2 * k * prod * r_sum
        u1_num += 2 * d * prod * r_sum
        t2_num += r_sum * r_sum
        u2_num += d * sum(v * v for v in r.values())
    if c_t == 0:
        raise EmptySumError(
            f"every gap product vanishes at level {n + 1} for d={d} "
            f"(need N >= {d * (d + 1) // 2 - 1})"
        )
    return ExpansionDiagnostics(
        d,
        n,
        Fraction(c_t),
        Fraction(c_u),
        Fraction(t1_num, c_t),
        Fraction(u1_num, c_u),
        Fraction(t2_num, c_t),
        Fraction(u2_num, c_u),
    )


class BoundWitness(NamedTuple):
    holds: bool
    slack: Fraction


def cauchy_schwarz_bound_check(d: int, n: int, w: WeightVector) -> BoundWitness:
    """Verify the numerator bound sum (...)^2 <= d^2 norm_sq, i.e. risk >= 0.

    Each inner sum has at most d parents, so Cauchy-Schwarz bounds the
    numerator by d^2 norm_sq.  Returns the exact slack (which equals the
    risk) together with a boolean witness.
    """
    slack = exact_risk(d, n, w).risk
    return BoundWitness(slack >= 0, slack)


# ---------------------------------------------------------------------------
# Sweeps over N
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RiskPoint:
    n: int
    risk: Fraction | None  # exact value when the sweep ran exactly
    risk_float: float
    n2_risk: float


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of N^2 risk = constant + slope / N.

    Fitted on the largest tested half of the N values, where the O(1/N^2)
    remainder is smallest.
    """

    constant: float
    slope: float
    window: tuple[int, int]
    max_residual: float


@dataclass(frozen=True)
class RiskCurve:
    d: int
    scheme: str
    points: tuple[RiskPoint, ...]
    skipped: tuple[tuple[int, str], ...]
    fit: FitResult | None


def fit_constant(points: Sequence[RiskPoint]) -> FitResult:
    """Intercept of N^2 risk against 1/N on the largest tested half."""
    if len(points) < 2:
        raise ValueError("need at least two points to fit")
    pts = sorted(points, key=lambda p: p.n)
    window = pts[len(pts) // 2 :]
    xs = [1.0 / p.n for p in window]
    ys = [p.n2_risk for p in window]
    xbar = math.fsum(xs) / len(xs)
    ybar = math.fsum(ys) / len(ys)
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("degenerate fit window")
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    constant = ybar - slope * xbar
    resid = max(abs(y - (constant + slope * x)) for x, y in zip(xs, ys))
    return FitResult(constant, slope, (window[0].n, window[-1].n), resid)


def _curve_point(args) -> RiskPoint:
    d, n, label, exact = args
    w = scheme_weights(label, d, n)
    if exact:
        r = exact_risk(d, n, w).risk
        rf = float(r)
        return RiskPoint(n, r, rf, n * n * rf)
    rf = float_risk(d, n, w)
    return RiskPoint(n, None, rf, n * n * rf)


def risk_curve(
    d: int,
    n_values: Iterable[int],
    scheme: str | Scheme,
    *,
    exact: bool = False,
    fit: bool = True,
    workers: int = 1,
) -> RiskCurve:
    """Risk as a function of N for one scheme.

    Infeasible levels (empty support) are skipped and recorded rather than
    raised.  ``workers`` > 1 evaluates levels in separate processes; results
    are identical at any worker count because each level is independent and
    the output order is fixed.
    """
    label = parse_scheme(scheme).label()
    ns = sorted(set(int(n) for n in n_values))
    feasible = []
    skipped = []
    for n in ns:
        try:
            scheme_weights(label, d, n)
        except EmptySupportError as exc:
            skipped.append((n, str(exc)))
            continue
        feasible.append(n)
    jobs = [(d, n, label, exact) for n in feasible]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_curve_point, jobs))
    else:
        points = [_curve_point(job) for job in jobs]
    fitted = fit_constant(points) if fit and len(points) >= 2 else None
    return RiskCurve(d, label, tuple(points), tuple(skipped), fitted)


def curve_to_csv(curve: RiskCurve) -> str:
    """CSV rows (N, risk_num, risk_den, risk_float, N2_risk), header included.

    Exact numerator/denominator columns are left empty when the sweep ran on
    the floating-point path.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "risk_num", "risk_den", "risk_float", "N2_risk"])
    for p in curve.points:
        num = p.risk.numerator if p.risk is not None else ""
        den = p.risk.denominator if p.risk is not None else ""
        writer.writerow([p.n, num, den, repr(p.risk_float), repr(p.n2_risk)])
    return buf.getvalue()
