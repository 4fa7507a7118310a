"""Necessity weights and the min/max support algebra.

A :class:`Weight` is a lower bound on a necessity degree, held as an exact
decimal with a fixed number of fractional digits so that ordering decisions
never depend on floating-point rounding. A degree of zero ("no support") is
never stored: functions that may find no support return ``None``.
"""

from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN, InvalidOperation
from fractions import Fraction
from typing import Iterable, Optional, Union

from ..config import ENGINE_CONFIG


WEIGHT_SCALE = ENGINE_CONFIG['weight_scale']
_QUANTUM = Decimal(1).scaleb(-WEIGHT_SCALE)
_ONE = Decimal(1)


class WeightError(ValueError):
    """Raised when a value cannot be represented as a weight in (0, 1]."""
    pass


class UsageError(ValueError):
    """Raised when an algebra operation is called with invalid arguments."""
    pass


WeightLike = Union['Weight', Decimal, Fraction, str, int, float]


def _to_decimal(value: WeightLike) -> Decimal:
    if isinstance(value, Weight):
        return value.value
    if isinstance(value, Fraction):
        quotient = Decimal(value.numerator) / Decimal(value.denominator)
        return quotient.quantize(_QUANTUM, rounding=ROUND_HALF_EVEN)
    if isinstance(value, float):
        # repr() gives the shortest round-tripping text, so 0.1 stays 0.1
        value = repr(value)
    try:
        return Decimal(value).quantize(_QUANTUM, rounding=ROUND_HALF_EVEN)
    except (InvalidOperation, TypeError, ValueError) as e:
        raise WeightError(f"Not a weight: {value!r}") from e


@dataclass(frozen=True, order=True)
class Weight:
    """A necessity lower bound in (0, 1] at fixed decimal scale.

    Example:
        >>> Weight('0.8') > Weight('0.6')
        True
        >>> str(Weight(Fraction(2, 3)))
        '0.6667'
    """

    value: Decimal

    def __init__(self, value: WeightLike):
        quantized = _to_decimal(value)
        if not (0 < quantized <= _ONE):
            raise WeightError(f"Weight must lie in (0, 1], got {value!r}")
        object.__setattr__(self, 'value', quantized)

    @classmethod
    def one(cls) -> 'Weight':
        return cls(_ONE)

    @classmethod
    def from_units(cls, units: int) -> 'Weight':
        """Build a weight from its integer count of scale units."""
        return cls(Decimal(units).scaleb(-WEIGHT_SCALE))

    @property
    def units(self) -> int:
        """Integer count of scale units (``Weight('0.5').units == 5000``)."""
        return int(self.value.scaleb(WEIGHT_SCALE))

    def as_fraction(self) -> Fraction:
        return Fraction(self.value)

    def __str__(self) -> str:
        return f"{self.value:.{WEIGHT_SCALE}f}"

    def __repr__(self) -> str:
        return f"Weight('{self}')"


def weight_or_none(value: Optional[WeightLike]) -> Optional[Weight]:
    """Convert to a weight, mapping ``None`` and zero to ``None``."""
    if value is None:
        return None
    if _to_decimal(value) == 0:
        return None
    return Weight(value)


def combine_support(
    premise_degrees: Iterable[Weight],
    justification_degree: Weight
) -> Weight:
    """Degree carried to a conclusion by one justification firing.

    Returns ``min(premise_degrees + [justification_degree])``: a chain is
    only as certain as its weakest link.

    Raises:
        UsageError: If ``premise_degrees`` is empty.
    """
    premises = list(premise_degrees)
    if not premises:
        raise UsageError("combine_support needs at least one premise degree")
    return min(min(premises), justification_degree)


def merge_degree(existing: Optional[Weight], candidate: Weight) -> Weight:
    """Keep the strongest of two supports for the same conclusion."""
    if existing is None:
        return candidate
    return max(existing, candidate)


def strictly_below(degree: Optional[Weight], bound: Weight) -> bool:
    """``degree < bound`` where ``None`` stands for a zero degree."""
    return degree is None or degree < bound


def max_degree(degrees: Iterable[Optional[Weight]]) -> Optional[Weight]:
    """Maximum of optional degrees; ``None`` when nothing is supported."""
    best: Optional[Weight] = None
    for degree in degrees:
        if degree is not None and (best is None or degree > best):
            best = degree
    return best


def format_degree(degree: Optional[Weight]) -> str:
    """Render a degree, writing zero support as ``0``."""
    return '0' if degree is None else str(degree)
