"""Coefficient schemes over the partitions of one level.

A scheme assigns a nonnegative coefficient c(lambda) to every partition of N
into at most d parts.  Coefficients are kept as exact rationals and are
deliberately left unnormalised: every risk expression downstream is a ratio
of quadratic forms in c, so dividing by the squared norm on the way out is
exact, whereas rescaling the coefficients themselves to unit Euclidean norm
would require square roots.  The squared-weight view ``squared_weights`` is
the exactly normalised object (it sums to 1 in rational arithmetic).

The scheme of main interest puts c(lambda) proportional to the product of the
row gaps lambda_i - lambda_{i+1}; it vanishes off the strictly decreasing
partitions and achieves the 1/N^2 estimation rate.  ``power:<alpha>`` raises
the gap product to ``alpha`` (alpha = 0 is uniform on the strict set), and
``optimal`` takes the leading eigenvector of the incidence quadratic form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from pathlib import Path
from typing import Mapping

from .errors import EmptySupportError
from .partitions import check_partition, enumerate_partitions, gap_vector, level

__all__ = [
    "WeightVector",
    "product_gap_weight",
    "power_gap_weight",
    "product_weights",
    "power_weights",
    "uniform_weights",
    "normalize",
    "parse_scheme",
    "scheme_weights",
    "weights_to_json",
    "weights_from_json",
    "save_weights",
    "load_weights",
]


@dataclass(frozen=True)
class WeightVector:
    """Exact nonnegative coefficients on the partitions of one level.

    ``entries`` maps partition -> coefficient; absent partitions carry
    coefficient zero, and zero entries are dropped at construction so the
    stored support is exactly the set of nonzero coefficients.  Instances are
    immutable; ``norm_sq`` is the exact sum of squared coefficients.
    """

    d: int
    level: int
    entries: Mapping[tuple[int, ...], Fraction]
    norm_sq: Fraction = field(init=False)

    def __post_init__(self):
        cleaned = {}
        for parts, value in self.entries.items():
            t = check_partition(parts, self.d)
            if level(t) != self.level:
                raise ValueError(
                    f"partition {t} has level {level(t)}, expected {self.level}"
                )
            v = Fraction(value)
            if v < 0:
                raise ValueError(f"coefficient for {t} is negative: {v}")
            if v:
                cleaned[t] = v
        ordered = dict(sorted(cleaned.items(), reverse=True))
        object.__setattr__(self, "entries", ordered)
        object.__setattr__(self, "norm_sq", sum((v * v for v in ordered.values()), Fraction(0)))

    def coefficient(self, parts) -> Fraction:
        return self.entries.get(tuple(parts), Fraction(0))

    @property
    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.entries)

    def squared_weights(self) -> dict[tuple[int, ...], Fraction]:
        """Exactly normalised squared coefficients; they sum to 1."""
        if not self.entries:
            raise EmptySupportError(
                f"no nonzero coefficient at level {self.level} for d={self.d}"
            )
        return {parts: v * v / self.norm_sq for parts, v in self.entries.items()}

    def float_coefficients(self) -> dict[tuple[int, ...], float]:
        """Coefficients scaled to unit Euclidean norm, as floats."""
        if not self.entries:
            raise EmptySupportError(
                f"no nonzero coefficient at level {self.level} for d={self.d}"
            )
        norm = sqrt(float(self.norm_sq))
        return {parts: float(v) / norm for parts, v in self.entries.items()}

    def scaled(self, factor) -> "WeightVector":
        f = Fraction(factor)
        if f <= 0:
            raise ValueError(f"scale factor must be positive, got {f}")
        return WeightVector(self.d, self.level, {p: v * f for p, v in self.entries.items()})


def normalize(raw: WeightVector) -> WeightVector:
    """Canonical rescaling: the largest coefficient becomes exactly 1.

    Proportions are preserved, zeros stay zero, and the result is invariant
    under positive rescaling of the input, so any two proportional weight
    vectors normalise to the same object.  The exactly normalised view is
    ``squared_weights`` which always sums to 1.  Raises
    :class:`EmptySupportError` when every coefficient vanishes.
    """
    if not raw.entries:
        raise EmptySupportError(
            f"cannot normalise an all-zero weight vector (d={raw.d}, level {raw.level})"
        )
    top = max(raw.entries.values())
    return raw.scaled(Fraction(1, 1) / top)


def product_gap_weight(parts) -> int:
    """Product of the row gaps; zero unless the partition is strictly decreasing."""
    prod = 1
    for g in gap_vector(parts):
        prod *= g
    return prod


def power_gap_weight(parts, alpha) -> Fraction | float:
    """(product of gaps) ** alpha on strict partitions, zero elsewhere.

    Exact for integer alpha >= 0; other exponents fall back to floating
    point.  alpha = 0 gives the uniform scheme on the strict set, alpha = 1
    the plain gap product.
    """
    prod = product_gap_weight(parts)
    a = Fraction(alpha)
    if a < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if prod == 0:
        return Fraction(0)
    if a.denominator == 1:
        return Fraction(prod) ** a.numerator
    return float(prod) ** float(a)


def _scheme_vector(d: int, n: int, weight_fn) -> WeightVector:
    entries = {}
    for parts in enumerate_partitions(d, n, strict=True):
        w = weight_fn(parts)
        if w:
            entries[parts] = Fraction(w)
    if not entries:
        raise EmptySupportError(
            f"no strictly decreasing partition at level {n} for d={d} "
            f"(need N >= {d * (d + 1) // 2})"
        )
    return WeightVector(d, n, entries)


def product_weights(d: int, n: int) -> WeightVector:
    """Gap-product coefficients on the strict partitions of level n."""
    return _scheme_vector(d, n, product_gap_weight)


def power_weights(d: int, n: int, alpha) -> WeightVector:
    """Gap-product-to-the-alpha coefficients on the strict partitions."""
    return _scheme_vector(d, n, lambda p: power_gap_weight(p, alpha))


def uniform_weights(d: int, n: int) -> WeightVector:
    """Equal coefficients on every strict partition of level n."""
    return power_weights(d, n, 0)


@dataclass(frozen=True)
class Scheme:
    """Parsed scheme specification string."""

    kind: str
    alpha: Fraction | None = None
    path: str | None = None
    support: str = "full"

    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.alpha}"
        if self.kind == "file":
            return f"file:{self.path}"
        if self.kind == "optimal" and self.support != "full":
            return f"optimal:{self.support}"
        return self.kind


def parse_scheme(spec: str | Scheme) -> Scheme:
    """Parse ``product``, ``uniform``, ``power:<alpha>``, ``optimal[:support]``
    or ``file:<path>``.

    ``alpha`` accepts integers, decimals and rationals like ``1/2``.
    """
    if isinstance(spec, Scheme):
        return spec
    text = spec.strip()
    if text == "product":
        return Scheme("product")
    if text == "uniform":
        return Scheme("uniform")
    if text.startswith("power:"):
        arg = text.split(":", 1)[1]
        try:
            alpha = Fraction(arg)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad exponent in scheme {text!r}") from exc
        if alpha < 0:
            raise ValueError(f"exponent must be >= 0 in scheme {text!r}")
        return Scheme("power", alpha=alpha)
    if text == "optimal":
        return Scheme("optimal")
    if text.startswith("optimal:"):
        support = text.split(":", 1)[1]
        if support not in ("full", "strict"):
            raise ValueError(f"unknown support {support!r} in scheme {text!r}")
        return Scheme("optimal", support=support)
    if text.startswith("file:"):
        return Scheme("file", path=text.split(":", 1)[1])
    raise ValueError(f"unknown scheme {spec!r}")


def scheme_weights(spec: str | Scheme, d: int, n: int, *, tol: float = 1e-12) -> WeightVector:
    """Materialise a scheme specification as a weight vector at level n."""
    scheme = parse_scheme(spec)
    if scheme.kind == "product":
        return product_weights(d, n)
    if scheme.kind == "uniform":
        return uniform_weights(d, n)
    if scheme.kind == "power":
        return power_weights(d, n, scheme.alpha)
    if scheme.kind == "optimal":
        from .spectral import optimal_weights  # deferred: spectral imports weights

        return optimal_weights(d, n, support=scheme.support, tol=tol)
    if scheme.kind == "file":
        w = load_weights(scheme.path)
        if w.d != d or w.level != n:
            raise ValueError(
                f"weights in {scheme.path} are for d={w.d}, level {w.level}, "
                f"requested d={d}, level {n}"
            )
        return w
    raise ValueError(f"unknown scheme kind {scheme.kind!r}")


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def weights_to_json(w: WeightVector) -> list[dict]:
    """Serialisable form: one record per support partition, canonical order."""
    return [
        {"parts": list(parts), "weight": _fraction_str(value)}
        for parts, value in w.entries.items()
    ]


def weights_from_json(records, d: int | None = None, n: int | None = None) -> WeightVector:
    entries = {}
    for rec in records:
        parts = tuple(rec["parts"])
        entries[parts] = Fraction(rec["weight"])
    if not entries:
        raise EmptySupportError("weight file has no entries")
    some = next(iter(entries))
    d = d if d is not None else len(some)
    n = n if n is not None else sum(some)
    return WeightVector(d, n, entries)


def save_weights(w: WeightVector, path) -> None:
    Path(path).write_text(json.dumps(weights_to_json(w), indent=2) + "\n")


def load_weights(path) -> WeightVector:
    return weights_from_json(json.loads(Path(path).read_text()))
