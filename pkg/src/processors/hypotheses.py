"""Knowledge sources that turn doctrine templates into aggregation rules.

For every template building a level the generator compiles:

* a complete-hypothesis rule with one condition per required sub-unit;
  conditions asking for the same sub-unit type form a symmetry group so each
  combination fires once, and a guard enforces the time window and the axis
  limit;
* incomplete-hypothesis rules, one per proper non-empty part of the required
  sub-unit multiset, used on units left over by a committed combination;
* a conflict rule firing a contradiction between any two hypotheses that
  share a leaf observation.

Rule actions create one assumption per hypothesis (weighted by its
certainty) and a support node justified by the matched sub-unit facts and
that assumption, at the template base weight.
"""

from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import logging

from ..core.atms import PiATMS
from ..core.rule_engine import (
    Action, Element, ElementHandle, FiringContext, Guard, Pattern, Rule, Rulebase,
    WorkingMemory
)
from ..core.units import ANY_TYPE, Doctrine, Template, Unit
from ..core.weights import Weight
from ..config import FUSION_CONFIG
from .certainty import CertaintyModel


logger = logging.getLogger(__name__)

UNIT = 'unit'
HYPOTHESIS = 'hypothesis'


def unit_element(kind: str, unit: Unit) -> Element:
    return Element.of(
        kind,
        id=unit.id,
        level=unit.level,
        type=unit.type,
        start=unit.start,
        end=unit.end,
        axes=unit.axes,
        leaves=unit.leaves,
        certainty=unit.certainty,
        complete=unit.complete,
    )


class PrivateWorkingMemory(WorkingMemory):
    """A working memory over units, with its own Π-ATMS.

    Keeps the :class:`Unit` behind every element so rule actions can build
    aggregates, and records the hypotheses its rules create.
    """

    def __init__(self, name: str, rulebase: Rulebase, max_firings: Optional[int] = None):
        super().__init__(name, PiATMS(name=name), rulebase, max_firings)
        self.units: Dict[str, Unit] = {}
        self._hypotheses: Dict[str, ElementHandle] = {}

    def add_unit(self, unit: Unit) -> ElementHandle:
        """Assert ``unit`` as a fact weighted by its certainty."""
        self.units[unit.id] = unit
        return self.assert_fact(unit_element(UNIT, unit), unit.certainty)

    def add_hypothesis(self, ctx: FiringContext, unit: Unit) -> ElementHandle:
        """Create the assumption backing ``unit`` (once per unit id)."""
        if unit.id in self._hypotheses:
            return self._hypotheses[unit.id]
        self.units[unit.id] = unit
        handle = ctx.assume(HYPOTHESIS, weight=unit.certainty, **dict(unit_element(HYPOTHESIS, unit).attributes))
        self._hypotheses[unit.id] = handle
        return handle

    def hypotheses(self) -> List[Tuple[Unit, ElementHandle]]:
        """Hypotheses in creation order."""
        return [(self.units[uid], h) for uid, h in sorted(self._hypotheses.items(), key=lambda i: i[1].id)]

    def unit_of_node(self) -> Dict[int, str]:
        """Map from assumption and fact nodes to unit ids."""
        mapping = {}
        for handle in self.elements():
            mapping[handle.node] = handle['id']
        return mapping


def slot_types(template: Template) -> List[str]:
    """Required sub-unit types of a template, one entry per sub-unit."""
    return [r.type for r in template.requires for _ in range(r.count)]


def partial_slot_types(template: Template) -> List[List[str]]:
    """Every proper non-empty part of the required multiset, smallest first."""
    parts = []
    for counts in product(*(range(r.count + 1) for r in template.requires)):
        total = sum(counts)
        if total == 0 or total == template.size:
            continue
        parts.append([r.type for r, n in zip(template.requires, counts) for _ in range(n)])
    return sorted(parts, key=lambda p: (len(p), p))


def _window_guard(template: Template, aliases: Sequence[str]) -> Guard:
    def test(bindings) -> bool:
        handles = [bindings[a] for a in aliases]
        span = max(h['end'] for h in handles) - min(h['start'] for h in handles)
        axes = frozenset().union(*(h['axes'] for h in handles))
        return span <= template.max_span and len(axes) <= template.max_axes
    return Guard(test, frozenset(aliases), f"span <= {template.max_span} and axes <= {template.max_axes}")


def _symmetry_groups(types: Sequence[str]) -> Tuple[Tuple[int, ...], ...]:
    groups: Dict[str, List[int]] = {}
    for index, slot in enumerate(types):
        groups.setdefault(slot, []).append(index)
    return tuple(tuple(g) for g in groups.values() if len(g) > 1)


class HypothesisGenerator:
    """Compiles doctrine templates into knowledge sources and runs them.

    Args:
        doctrine: Composition templates.
        model: Certainty model scoring new aggregates.
        conflict_weight: Weight of shared-sub-unit contradictions.
    """

    def __init__(
        self,
        doctrine: Doctrine,
        model: Optional[CertaintyModel] = None,
        conflict_weight: Optional[Weight] = None
    ):
        self.doctrine = doctrine
        self.model = model or CertaintyModel(doctrine)
        self.conflict_weight = conflict_weight or Weight(FUSION_CONFIG['conflict_weight'])
        self.logger = logging.getLogger(__name__)
        self._complete: Dict[str, Rulebase] = {}
        self._incomplete: Dict[str, Rulebase] = {}

    def _hypothesis_rule(self, name: str, template: Template, types: Sequence[str]) -> Rule:
        aliases = [f"s{i}" for i in range(len(types))]
        conditions = []
        for alias, slot in zip(aliases, types):
            tests = {'level': template.sub_level}
            if slot != ANY_TYPE:
                tests['type'] = slot
            conditions.append(Pattern.of(UNIT, alias=alias, **tests))
        complete = len(types) == template.size

        def perform(ctx: FiringContext) -> None:
            memory: PrivateWorkingMemory = ctx.memory
            subs = [memory.units[ctx[a]['id']] for a in aliases]
            certainty = self.model.score(template, subs)
            unit = Unit.aggregate(template.level, template.type, subs, certainty, complete, template.name)
            memory.add_hypothesis(ctx, unit)

        return Rule(
            name=name,
            conditions=tuple(conditions),
            action=Action(perform, frozenset(aliases), f"assume {template.level} {template.type}"),
            weight=self.model.leaf(template.base_weight),
            guard=_window_guard(template, aliases),
            symmetric=_symmetry_groups(types),
        )

    def _conflict_rule(self) -> Rule:
        def overlaps(bindings) -> bool:
            return bool(bindings['h1']['leaves'] & bindings['h2']['leaves'])

        return Rule(
            name='shared-sub-unit',
            conditions=(Pattern.of(HYPOTHESIS, alias='h1'), Pattern.of(HYPOTHESIS, alias='h2')),
            action=Action.of(lambda ctx: ctx.contradiction()),
            weight=self.conflict_weight,
            priority=1,
            guard=Guard(overlaps, frozenset(['h1', 'h2']), 'overlaps(?h1, ?h2)'),
            symmetric=((0, 1),),
        )

    def complete_rules(self, level: str) -> Rulebase:
        """Knowledge source creating complete hypotheses at ``level``."""
        if level not in self._complete:
            rulebase = Rulebase(f"complete-{level}")
            for template in self.doctrine.templates_for(level):
                rulebase.define_rule(self._hypothesis_rule(template.name, template, slot_types(template)))
            rulebase.define_rule(self._conflict_rule())
            self._complete[level] = rulebase
        return self._complete[level]

    def incomplete_rules(self, level: str) -> Rulebase:
        """Knowledge source creating incomplete hypotheses at ``level``."""
        if level not in self._incomplete:
            rulebase = Rulebase(f"incomplete-{level}")
            for template in self.doctrine.templates_for(level):
                for types in partial_slot_types(template):
                    name = f"{template.name}:partial:{'+'.join(types)}"
                    rulebase.define_rule(self._hypothesis_rule(name, template, types))
            rulebase.define_rule(self._conflict_rule())
            self._incomplete[level] = rulebase
        return self._incomplete[level]

    def generate_complete(self, name: str, level: str, units: Iterable[Unit]) -> PrivateWorkingMemory:
        """Run the complete-hypothesis knowledge source over ``units``.

        Returns:
            The working memory; its engine holds one assumption per
            hypothesis and the shared-sub-unit nogoods.
        """
        memory = PrivateWorkingMemory(name, self.complete_rules(level))
        for unit in units:
            memory.add_unit(unit)
        memory.run_to_quiescence()
        self.logger.debug(
            f"[{name}] {len(memory.hypotheses())} complete {level} hypotheses, "
            f"{len(memory.atms.nogoods())} nogoods"
        )
        return memory

    def generate_incomplete(
        self,
        name: str,
        level: str,
        units: Iterable[Unit],
        committed: Iterable[Unit] = ()
    ) -> PrivateWorkingMemory:
        """Run the incomplete-hypothesis knowledge source.

        Only units that no ``committed`` hypothesis uses are asserted.
        """
        used = set()
        for unit in committed:
            used |= set(unit.sub_units)
        memory = PrivateWorkingMemory(name, self.incomplete_rules(level))
        for unit in units:
            if unit.id not in used:
                memory.add_unit(unit)
        memory.run_to_quiescence()
        self.logger.debug(f"[{name}] {len(memory.hypotheses())} incomplete {level} hypotheses")
        return memory

    def complete_with_incomplete(self, memory: PrivateWorkingMemory) -> List[Unit]:
        """Greedy choice of incomplete hypotheses, most certain first.

        A candidate is kept when it raises no nogood together with the ones
        already kept.
        """
        candidates = sorted(memory.hypotheses(), key=lambda p: (-p[0].certainty.value, p[0].id))
        kept: List[Tuple[Unit, ElementHandle]] = []
        for unit, handle in candidates:
            nodes = [h.node for _, h in kept] + [handle.node]
            if memory.atms.environment_inconsistency_degree(nodes) is None:
                kept.append((unit, handle))
        return [unit for unit, _ in kept]
