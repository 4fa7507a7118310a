"""Certainty of observed and aggregated units.

An aggregate is scored on three criteria: its level and type (the template
base weight), how complete it is, and how compact its time window is. The
certainty is the minimum of the three factors, each floored at the doctrine
epsilon::

    completeness = present sub-units / required sub-units
    temporal     = max(epsilon, 1 - span / template max span)
    certainty    = min(base, completeness, temporal)

A unit's own completeness is read, not that of its sub-units.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import logging

from ..core.units import Doctrine, Template, Unit
from ..core.weights import Weight


Transform = Callable[[Weight], Weight]


@dataclass(frozen=True)
class CertaintyFactors:
    base: Weight
    completeness: Weight
    temporal: Weight

    @property
    def certainty(self) -> Weight:
        return min(self.base, self.completeness, self.temporal)


class CertaintyModel:
    """Scores units against a doctrine.

    Args:
        doctrine: Templates and epsilon.
        transform: Optional order-preserving map applied to every factor and
            to leaf confidences. It must keep values inside (0, 1].

    Example:
        >>> model = CertaintyModel(doctrine)
        >>> model.certainty(company)
        Weight('0.6667')
    """

    def __init__(self, doctrine: Doctrine, transform: Optional[Transform] = None):
        self.doctrine = doctrine
        self.transform = transform
        self.logger = logging.getLogger(__name__)

    def _apply(self, weight: Weight) -> Weight:
        return weight if self.transform is None else Weight(self.transform(weight))

    def _floor(self, value: Fraction) -> Weight:
        return max(self.doctrine.epsilon, Weight(value)) if value > 0 else self.doctrine.epsilon

    def factors(self, template: Template, count: int, span: int) -> CertaintyFactors:
        """Factors of a ``template`` aggregate with ``count`` sub-units over ``span`` minutes."""
        if count < 1:
            raise ValueError("Cannot score an aggregate without sub-units")
        completeness = self._floor(Fraction(min(count, template.size), template.size))
        temporal = self._floor(1 - Fraction(span, template.max_span))
        return CertaintyFactors(
            self._apply(template.base_weight),
            self._apply(completeness),
            self._apply(temporal),
        )

    def score(self, template: Template, sub_units: Sequence[Unit]) -> Weight:
        """Certainty of a ``template`` aggregate over ``sub_units``."""
        span = max(u.end for u in sub_units) - min(u.start for u in sub_units) if sub_units else 0
        return self.factors(template, len(sub_units), span).certainty

    def leaf(self, confidence: Weight) -> Weight:
        """Certainty of an observation reported with ``confidence``."""
        return self._apply(confidence)

    def certainty(self, unit: Unit) -> Weight:
        """Certainty of ``unit``.

        Observations keep their (transformed) message confidence; aggregates
        are rescored from their template, sub-unit count and time window.

        Raises:
            DoctrineError: If no template builds the unit.
        """
        if unit.observed:
            return self.leaf(unit.certainty)
        template = self.doctrine.template_for(unit)
        return self.factors(template, len(unit.sub_units), unit.span).certainty


def shift_transform(offset: Weight) -> Transform:
    """``w -> w - offset``; order preserving on weights above ``offset``."""
    def transform(weight: Weight) -> Weight:
        return Weight(weight.value - offset.value)
    return transform
