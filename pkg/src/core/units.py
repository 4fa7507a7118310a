"""Unit, doctrine and solution model for hierarchical aggregation.

Observed units come from scenario messages; aggregated units are built by
the hypothesis knowledge sources from doctrine templates. Every unit carries
the time hull and axis union of what it is made of, plus the set of leaf
observations it covers, which is what conflicts are decided on.
"""

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import hashlib

from .weights import Weight
from ..config import FUSION_CONFIG


ANY_TYPE = 'any'


class DoctrineError(ValueError):
    """Raised when a doctrine is inconsistent or cannot score a unit."""
    pass


LEVELS: Tuple[str, ...] = tuple(FUSION_CONFIG['levels'])


def level_index(level: str) -> int:
    """Position of ``level`` in the echelon order (section is 0).

    Raises:
        DoctrineError: If the level is unknown.
    """
    try:
        return LEVELS.index(level)
    except ValueError:
        raise DoctrineError(
            f"Unknown level '{level}'. Available: {', '.join(LEVELS)}"
        ) from None


def next_level(level: str) -> Optional[str]:
    """The echelon directly above ``level``, or None at the top."""
    index = level_index(level)
    return LEVELS[index + 1] if index + 1 < len(LEVELS) else None


def unit_id(level: str, unit_type: str, sub_units: Iterable[str]) -> str:
    """Content-derived identifier of an aggregate unit."""
    canonical = f"{level}|{unit_type}|{','.join(sorted(sub_units))}"
    digest = hashlib.sha1(canonical.encode('utf-8')).hexdigest()[:8]
    return f"{FUSION_CONFIG['level_prefixes'][level]}-{digest}"


@dataclass(frozen=True)
class Unit:
    """An observed or hypothesised military unit.

    Attributes:
        id: Scenario id for observations, content hash for aggregates.
        level: Echelon name.
        type: Unit type (tank, motorised_rifle, ...).
        start: Start of the time interval, minutes since scenario start.
        end: End of the time interval.
        axes: Axes the unit was seen on.
        sub_units: Ids of the units one level below it is made of.
        certainty: Necessity lower bound of the unit.
        complete: Whether every sub-unit its template requires is present.
        leaves: Observation ids covered (the unit itself when observed).
        template: Name of the template that built it, None when observed.
    """

    id: str
    level: str
    type: str
    start: int
    end: int
    axes: FrozenSet[str]
    sub_units: Tuple[str, ...] = ()
    certainty: Weight = field(default_factory=Weight.one)
    complete: bool = True
    leaves: FrozenSet[str] = frozenset()
    template: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'axes', frozenset(self.axes))
        object.__setattr__(self, 'sub_units', tuple(sorted(self.sub_units)))
        if not self.leaves:
            object.__setattr__(self, 'leaves', frozenset([self.id]) if self.observed else frozenset())
        else:
            object.__setattr__(self, 'leaves', frozenset(self.leaves))
        if self.start > self.end:
            raise ValueError(f"Unit {self.id}: start {self.start} is after end {self.end}")

    @property
    def observed(self) -> bool:
        return not self.sub_units

    @property
    def span(self) -> int:
        return self.end - self.start

    @classmethod
    def observation(
        cls,
        id: str,
        level: str,
        type: str,
        axis: str,
        start: int,
        end: Optional[int] = None,
        certainty: Optional[Weight] = None
    ) -> 'Unit':
        """A leaf unit reported by a message."""
        level_index(level)
        return cls(
            id=id, level=level, type=type, start=start,
            end=start if end is None else end, axes=frozenset([axis]),
            certainty=certainty or Weight(FUSION_CONFIG['default_confidence']),
        )

    @classmethod
    def aggregate(
        cls,
        level: str,
        type: str,
        sub_units: Sequence['Unit'],
        certainty: Weight,
        complete: bool,
        template: Optional[str] = None
    ) -> 'Unit':
        """Aggregate over ``sub_units``: time hull, axis union, leaf union."""
        if not sub_units:
            raise ValueError("An aggregate needs at least one sub-unit")
        ids = [u.id for u in sub_units]
        return cls(
            id=unit_id(level, type, ids),
            level=level,
            type=type,
            start=min(u.start for u in sub_units),
            end=max(u.end for u in sub_units),
            axes=frozenset().union(*(u.axes for u in sub_units)),
            sub_units=tuple(ids),
            certainty=certainty,
            complete=complete,
            leaves=frozenset().union(*(u.leaves for u in sub_units)),
            template=template,
        )


@dataclass(frozen=True)
class Requirement:
    """``count`` sub-units of ``type`` (or any type) one level below."""

    type: str
    count: int

    def accepts(self, unit_type: str) -> bool:
        return self.type == ANY_TYPE or self.type == unit_type


@dataclass(frozen=True)
class Template:
    """A doctrine composition rule for one unit level and type."""

    name: str
    level: str
    type: str
    requires: Tuple[Requirement, ...]
    max_span: int
    max_axes: int
    base_weight: Weight

    @property
    def sub_level(self) -> str:
        return LEVELS[level_index(self.level) - 1]

    @property
    def size(self) -> int:
        """Number of sub-units in a complete unit."""
        return sum(r.count for r in self.requires)

    def accepts(self, unit: Unit) -> bool:
        """True if ``unit`` can fill some slot of this template."""
        return unit.level == self.sub_level and any(r.accepts(unit.type) for r in self.requires)


class Doctrine:
    """The set of composition templates, validated on construction.

    Args:
        templates: Templates in file order.
        epsilon: Floor applied to certainty factors.
        source: Where the doctrine was read from, for messages.

    Raises:
        DoctrineError: On unknown levels, duplicate names, non-positive spans
            or empty requirement lists.
    """

    def __init__(self, templates: Sequence[Template], epsilon: Optional[Weight] = None, source: str = '<memory>'):
        self.templates: Tuple[Template, ...] = tuple(templates)
        self.epsilon = epsilon or Weight(FUSION_CONFIG['epsilon'])
        self.source = source
        self._validate()

    def _validate(self) -> None:
        names = set()
        for template in self.templates:
            if template.name in names:
                raise DoctrineError(f"{self.source}: duplicate template '{template.name}'")
            names.add(template.name)
            if level_index(template.level) == 0:
                raise DoctrineError(
                    f"{self.source}: template '{template.name}' builds the lowest level"
                )
            if template.max_span <= 0:
                raise DoctrineError(f"{self.source}: template '{template.name}' needs a positive span")
            if template.max_axes < 1:
                raise DoctrineError(f"{self.source}: template '{template.name}' needs max_axes >= 1")
            if not template.requires or any(r.count < 1 for r in template.requires):
                raise DoctrineError(
                    f"{self.source}: template '{template.name}' needs positive requirement counts"
                )
            if template.type == ANY_TYPE:
                raise DoctrineError(f"{self.source}: template '{template.name}' must build a concrete type")
            known = set(FUSION_CONFIG['unit_types']) | {ANY_TYPE}
            for requirement in template.requires:
                if requirement.type not in known:
                    raise DoctrineError(
                        f"{self.source}: template '{template.name}' requires unknown type "
                        f"'{requirement.type}'"
                    )

    def templates_for(self, level: str) -> List[Template]:
        """Templates producing units at ``level``."""
        return [t for t in self.templates if t.level == level]

    def template(self, name: str) -> Template:
        for template in self.templates:
            if template.name == name:
                return template
        raise DoctrineError(f"{self.source}: no template named '{name}'")

    def template_for(self, unit: Unit) -> Template:
        """Template of an aggregate (by name, else by level and type).

        Raises:
            DoctrineError: If no template matches.
        """
        if unit.template is not None:
            return self.template(unit.template)
        for template in self.templates:
            if template.level == unit.level and template.type == unit.type:
                return template
        raise DoctrineError(f"No template builds a {unit.type} {unit.level} ({unit.id})")

    def can_absorb(self, unit: Unit) -> bool:
        """True if some template takes ``unit`` as a sub-unit."""
        return any(t.accepts(unit) for t in self.templates)

    def with_templates(self, templates: Sequence[Template]) -> 'Doctrine':
        return Doctrine(templates, self.epsilon, self.source)

    def __len__(self) -> int:
        return len(self.templates)

    def __repr__(self) -> str:
        return f"Doctrine(source='{self.source}', templates={len(self.templates)})"


@dataclass(frozen=True)
class Evidence:
    """Why a unit is believed: label environments and conflicts.

    Environments and conflicts name units rather than engine node ids so
    that they survive outside the working memory that produced them.
    """

    unit_id: str
    environments: Tuple[Tuple[Tuple[str, ...], Weight], ...] = ()
    conflicts: Tuple[Tuple[str, Weight], ...] = ()

    @property
    def support(self) -> Optional[Weight]:
        return max((degree for _, degree in self.environments), default=None)


@dataclass(frozen=True)
class Solution:
    """A conflict-free combination of units at one level.

    Attributes:
        level: Level of the phase that produced it.
        members: Units of the combination, sorted by id.
        unexplained: Units no template could absorb, sorted by id.
        units: Every unit reachable from members and unexplained units.
        evidence: Evidence records of the hypotheses in the tree.
    """

    level: str
    members: Tuple[Unit, ...]
    unexplained: Tuple[Unit, ...] = ()
    units: Tuple[Unit, ...] = ()
    evidence: Tuple[Evidence, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'members', tuple(sorted(self.members, key=lambda u: u.id)))
        object.__setattr__(self, 'unexplained', tuple(sorted(self.unexplained, key=lambda u: u.id)))
        object.__setattr__(self, 'units', tuple(sorted(self.units, key=lambda u: u.id)))
        object.__setattr__(self, 'evidence', tuple(sorted(self.evidence, key=lambda e: e.unit_id)))

    @property
    def member_ids(self) -> FrozenSet[str]:
        return frozenset(u.id for u in self.members)

    @property
    def certainties(self) -> Tuple[Weight, ...]:
        """Member certainties, most certain first."""
        return tuple(sorted((u.certainty for u in self.members), reverse=True))

    def unit(self, unit_id: str) -> Unit:
        for unit in self.units:
            if unit.id == unit_id:
                return unit
        raise KeyError(unit_id)

    def unit_map(self) -> Dict[str, Unit]:
        return {u.id: u for u in self.units}

    def evidence_for(self, unit_id: str) -> Optional[Evidence]:
        for record in self.evidence:
            if record.unit_id == unit_id:
                return record
        return None

    def leaves(self) -> FrozenSet[str]:
        return frozenset().union(*(u.leaves for u in self.members)) if self.members else frozenset()


def compare_solutions(first: Solution, second: Solution) -> int:
    """Negative when ``first`` ranks before ``second``.

    Leximax on member certainties (a longer vector beats its own prefix), then
    fewer unexplained units, then the smaller sorted member id sequence.
    """
    for a, b in zip(first.certainties, second.certainties):
        if a != b:
            return -1 if a > b else 1
    if len(first.certainties) != len(second.certainties):
        return -1 if len(first.certainties) > len(second.certainties) else 1
    if len(first.unexplained) != len(second.unexplained):
        return -1 if len(first.unexplained) < len(second.unexplained) else 1
    first_ids = tuple(sorted(first.member_ids))
    second_ids = tuple(sorted(second.member_ids))
    if first_ids != second_ids:
        return -1 if first_ids < second_ids else 1
    return 0


solution_sort_key = cmp_to_key(compare_solutions)


def rank_solutions(solutions: Iterable[Solution]) -> List[Solution]:
    """Solutions sorted best first."""
    return sorted(solutions, key=solution_sort_key)


@dataclass(frozen=True)
class Scenario:
    """Observed units in message order."""

    name: str
    observations: Tuple[Unit, ...] = ()

    def __len__(self) -> int:
        return len(self.observations)

    def levels(self) -> List[str]:
        return sorted({u.level for u in self.observations}, key=level_index)


@dataclass(frozen=True)
class PhaseTrace:
    """Counts recorded for one aggregation phase.

    ``inspections`` and ``bound`` are filled by the greedy selection path:
    the nogood inspections performed and the square of the nogood count,
    summed over working memories.
    """

    level: str
    memories: int = 0
    hypotheses: int = 0
    nogoods: int = 0
    solutions: int = 0
    inspections: int = 0
    bound: int = 0
    passed_through: bool = False


@dataclass(frozen=True)
class Report:
    """Ranked solutions of one run plus run metadata and the phase trace."""

    meta: Tuple[Tuple[str, str], ...] = ()
    solutions: Tuple[Solution, ...] = ()
    trace: Tuple[PhaseTrace, ...] = ()

    def meta_dict(self) -> Dict[str, str]:
        return dict(self.meta)

    def find(self, unit_id: str) -> Optional[Tuple[Solution, Unit]]:
        """First solution (by rank) whose tree holds ``unit_id``."""
        for solution in self.solutions:
            for unit in solution.units:
                if unit.id == unit_id:
                    return solution, unit
        return None
