"""
Ground Field Service - exact scalars, parameters and the bubble series
Obrauer - Cyclotomic Oriented Brauer Engine

Scalars are elements of the sympy domains QQ (characteristic 0) or GF(p).
"""

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, List, Sequence, Tuple

import structlog
from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.ring_series import rs_mul, rs_series_inversion
from sympy.polys.rings import ring

from app.core.exceptions import ParameterError
from app.services.words import Orientation

logger = structlog.get_logger()

FieldElem = Any


@lru_cache(maxsize=None)
def field_for(char: int):
    """The prime field of the given characteristic."""
    if char == 0:
        return QQ
    if char < 0 or not isprime(char):
        raise ParameterError(f"characteristic must be 0 or a prime, got {char}")
    return GF(char)


def parse_scalar(text: Any, char: int) -> FieldElem:
    """Parse ``"p/q"``, an integer or a decimal string into the prime field."""
    domain = field_for(char)
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse scalar {text!r}") from exc
    if char == 0:
        return QQ(value.numerator, value.denominator)
    if value.denominator % char == 0:
        raise ParameterError(f"scalar {text!r} has a denominator divisible by {char}")
    return domain(value.numerator) / domain(value.denominator)


def format_scalar(value: FieldElem, char: int) -> str:
    if char == 0:
        num, den = int(value.numerator), int(value.denominator)
        return str(num) if den == 1 else f"{num}/{den}"
    return str(int(value) % char)


def scalar_sort_key(value: FieldElem, char: int):
    if char == 0:
        return Fraction(int(value.numerator), int(value.denominator))
    return int(value) % char


def is_integral(value: FieldElem, char: int) -> bool:
    """True when ``value`` lies in Z·1 of the field."""
    if char == 0:
        return int(value.denominator) == 1
    return True


class _SeriesCache:
    """Copy-on-extend store of the delta and delta-prime coefficients."""

    def __init__(self):
        self._lock = threading.Lock()
        self.deltas: Tuple[FieldElem, ...] = ()
        self.deltaprimes: Tuple[FieldElem, ...] = ()


@dataclass(frozen=True)
class SeriesCoeffs:
    deltas: Tuple[FieldElem, ...]
    deltaprimes: Tuple[FieldElem, ...]


@dataclass(frozen=True)
class Params:
    level: int
    char: int
    u: Tuple[FieldElem, ...]
    uprime: Tuple[FieldElem, ...]
    max_order: int = 16
    _series: _SeriesCache = field(
        default_factory=_SeriesCache, compare=False, hash=False, repr=False
    )

    @property
    def field(self):
        return field_for(self.char)

    @property
    def zero(self) -> FieldElem:
        return self.field.zero

    @property
    def one(self) -> FieldElem:
        return self.field.one

    def scalar(self, value: Any) -> FieldElem:
        if isinstance(value, int):
            return self.field(value)
        return parse_scalar(value, self.char)

    def fmt(self, value: FieldElem) -> str:
        return format_scalar(value, self.char)

    def sort_key(self, value: FieldElem):
        return scalar_sort_key(value, self.char)

    @property
    def charges(self) -> Tuple[FieldElem, ...]:
        return self.u + self.uprime

    def describe(self) -> str:
        u = ",".join(self.fmt(x) for x in self.u)
        uprime = ",".join(self.fmt(x) for x in self.uprime)
        return f"l={self.level};p={self.char};u=({u});u'=({uprime})"


def make_params(
    level: int,
    char: int,
    u: Sequence[Any],
    uprime: Sequence[Any],
    max_order: int = 16,
) -> Params:
    if not isinstance(level, int) or level < 1:
        raise ParameterError(f"level must be a positive integer, got {level!r}")
    field_for(char)
    if len(u) != level or len(uprime) != level:
        raise ParameterError(
            f"expected {level} charges in u and u', got {len(u)} and {len(uprime)}"
        )
    params = Params(
        level=level,
        char=char,
        u=tuple(parse_scalar(x, char) for x in u),
        uprime=tuple(parse_scalar(x, char) for x in uprime),
        max_order=max(1, max_order),
    )
    logger.debug("params_created", params=params.describe())
    return params


def _polynomial(params: Params, roots: Iterable[FieldElem]) -> List[FieldElem]:
    R, x = ring("x", params.field)
    poly = R.one
    for root in roots:
        poly = poly * (x - root)
    return [poly.get((k,), params.zero) for k in range(params.level + 1)]


def cyclo_poly(params: Params, orientation: Orientation) -> List[FieldElem]:
    """Coefficients c_0..c_l of f (Up) or f' (Down), lowest degree first."""
    roots = params.u if orientation == Orientation.UP else params.uprime
    return _polynomial(params, roots)


def _compute_series(params: Params, n: int) -> SeriesCoeffs:
    R, t = ring("t", params.field)
    f_rev = R.one
    for root in params.u:
        f_rev = f_rev * (R.one - t * root)
    fprime_rev = R.one
    for root in params.uprime:
        fprime_rev = fprime_rev * (R.one - t * root)

    ratio = rs_mul(fprime_rev, rs_series_inversion(f_rev, t, n + 1), t, n + 1)
    inverse_ratio = rs_mul(f_rev, rs_series_inversion(fprime_rev, t, n + 1), t, n + 1)
    deltas = tuple(ratio.get((i,), params.zero) for i in range(1, n + 1))
    deltaprimes = tuple(-inverse_ratio.get((i,), params.zero) for i in range(1, n + 1))
    return SeriesCoeffs(deltas=deltas, deltaprimes=deltaprimes)


def delta_series(params: Params, n: int) -> SeriesCoeffs:
    """delta_1..delta_n and delta'_1..delta'_n, extending the per-Params cache on demand."""
    if n < 1:
        raise ParameterError(f"series order must be at least 1, got {n}")
    cache = params._series
    if len(cache.deltas) < n:
        with cache._lock:
            if len(cache.deltas) < n:
                order = max(n, params.max_order, 2 * len(cache.deltas))
                computed = _compute_series(params, order)
                cache.deltas = computed.deltas
                cache.deltaprimes = computed.deltaprimes
                logger.debug("delta_series_extended", order=order)
    return SeriesCoeffs(deltas=cache.deltas[:n], deltaprimes=cache.deltaprimes[:n])


def bubble_value(params: Params, dots: int, clockwise: bool) -> FieldElem:
    """Value of a closed loop carrying ``dots`` dots next to the left edge."""
    series = delta_series(params, dots + 1)
    return series.deltas[dots] if clockwise else series.deltaprimes[dots]


def series_identity_holds(params: Params, n: int) -> bool:
    """(1 + sum delta_i t^i)(1 - sum delta'_j t^j) has no terms in degrees 1..n."""
    series = delta_series(params, n)
    left = (params.one,) + series.deltas
    right = (params.one,) + tuple(-d for d in series.deltaprimes)
    for degree in range(1, n + 1):
        total = params.zero
        for i in range(degree + 1):
            total += left[i] * right[degree - i]
        if total:
            return False
    return True
