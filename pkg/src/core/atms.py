"""Possibilistic assumption-based truth maintenance.

The engine records weighted assumptions, weighted facts and weighted Horn
justifications, and keeps for every node a label: the minimal, sound,
complete and weakly consistent set of weighted environments (assumption sets
with the certainty they lend the node). Derivations of the contradiction node
become weighted nogoods.

Degrees follow the min/max algebra of :mod:`src.core.weights`: a justification
carries ``min`` of its premise degrees and its own weight, and alternative
derivations of the same environment keep the ``max``.

Example:
    >>> atms = PiATMS()
    >>> a = atms.add_assumption(Weight('0.8'))
    >>> b = atms.add_assumption(Weight('0.6'))
    >>> c = atms.add_node('C')
    >>> _ = atms.add_justification({a, b}, c, Weight('0.7'))
    >>> [(sorted(e.assumptions), str(e.degree)) for e in atms.label(c)]
    [([1, 2], '0.6000')]
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import count, product
from typing import (
    Any, Deque, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple
)
import logging
import threading

from .weights import Weight, combine_support, max_degree, strictly_below
from .oracle import WeightedClause, WeightedClauseBase, pos
from ..config import ENGINE_CONFIG


NodeId = int
JustificationId = int


class ATMSError(Exception):
    """Base exception for truth maintenance errors."""
    pass


class UnknownNodeError(ATMSError):
    """Raised when an operation names a node the engine does not hold."""
    pass


class EnumerationLimitError(ATMSError):
    """Raised when full interpretation enumeration would exceed its cap."""
    pass


class NodeKind(str, Enum):
    ASSUMPTION = 'assumption'
    FACT = 'fact'
    DERIVED = 'derived'
    CONTRADICTION = 'contradiction'


@dataclass(frozen=True)
class Environment:
    """A set of assumptions together with the degree it lends a node."""

    assumptions: FrozenSet[NodeId]
    degree: Weight

    def subsumes(self, other: 'Environment') -> bool:
        """True if ``self`` makes ``other`` redundant (fewer or equal
        assumptions, at least the same degree)."""
        return self.assumptions <= other.assumptions and self.degree >= other.degree

    def sort_key(self) -> Tuple[Tuple[NodeId, ...], Weight]:
        return (tuple(sorted(self.assumptions)), self.degree)

    def __str__(self) -> str:
        ids = ','.join(str(a) for a in sorted(self.assumptions))
        return f"({{{ids}}},{self.degree})"


@dataclass(frozen=True)
class Label:
    """The environments currently supporting a node, in canonical order."""

    environments: Tuple[Environment, ...] = ()

    @classmethod
    def of(cls, environments: Iterable[Environment]) -> 'Label':
        return cls(tuple(sorted(environments, key=Environment.sort_key)))

    def __iter__(self) -> Iterator[Environment]:
        return iter(self.environments)

    def __len__(self) -> int:
        return len(self.environments)

    def as_pairs(self) -> FrozenSet[Tuple[FrozenSet[NodeId], Weight]]:
        return frozenset((e.assumptions, e.degree) for e in self.environments)

    def __str__(self) -> str:
        return '{' + ''.join(str(e) for e in self.environments) + '}'


@dataclass(frozen=True)
class Nogood:
    """A weighted contradictory environment; ``id`` orders creation."""

    id: int
    assumptions: FrozenSet[NodeId]
    degree: Weight

    def __str__(self) -> str:
        ids = ','.join(str(a) for a in sorted(self.assumptions))
        return f"({{{ids}}},{self.degree})"


@dataclass(frozen=True)
class Justification:
    id: JustificationId
    antecedents: FrozenSet[NodeId]
    consequent: NodeId
    weight: Weight


@dataclass
class Node:
    id: NodeId
    kind: NodeKind
    intrinsic_weight: Optional[Weight] = None
    datum: Any = None
    environments: List[Environment] = field(default_factory=list)


@dataclass(frozen=True)
class Interpretation:
    """A maximal assumption set embedding no nogood."""

    kept: FrozenSet[NodeId]
    discarded: FrozenSet[NodeId]
    rank_key: Tuple[Any, ...]


@dataclass
class EnumerationStats:
    nogoods: int = 0
    candidates: int = 0
    interpretations: int = 0


@dataclass
class GreedyStats:
    nogoods: int = 0
    iterations: int = 0
    inspections: int = 0
    restoration_checks: int = 0
    restored: int = 0


class PiATMS:
    """A possibilistic ATMS instance.

    Mutating operations take an internal lock, so several rule-engine working
    memories may emit into one engine from different threads. Read operations
    return immutable snapshots.

    Args:
        name: Label used in log messages.
        interpretation_cap: Maximum assumption count for
            :meth:`interpretations` (default from ``ENGINE_CONFIG``).
    """

    def __init__(self, name: str = 'atms', interpretation_cap: Optional[int] = None):
        self.name = name
        self.logger = logging.getLogger(__name__)
        self._interpretation_cap = (
            ENGINE_CONFIG['interpretation_cap'] if interpretation_cap is None
            else interpretation_cap
        )
        self._lock = threading.RLock()
        self._node_ids = count()
        self._justification_ids = count()
        self._nogood_ids = count()
        self._nodes: Dict[NodeId, Node] = {}
        self._justifications: Dict[JustificationId, Justification] = {}
        self._consumers: Dict[NodeId, List[JustificationId]] = {}
        self._nogoods: Dict[int, Nogood] = {}
        self._declared: List[Tuple[FrozenSet[NodeId], Weight]] = []
        self.contradiction = self._new_node(NodeKind.CONTRADICTION, None, 'contradiction')

    # ------------------------------------------------------------------
    # node creation

    def _new_node(self, kind: NodeKind, weight: Optional[Weight], datum: Any) -> NodeId:
        node_id = next(self._node_ids)
        self._nodes[node_id] = Node(node_id, kind, weight, datum)
        self._consumers[node_id] = []
        return node_id

    def add_assumption(self, weight: Weight, datum: Any = None) -> NodeId:
        """Create an assumption whose label is ``{({self}, weight)}``."""
        with self._lock:
            node_id = self._new_node(NodeKind.ASSUMPTION, weight, datum)
            self._merge(node_id, [Environment(frozenset([node_id]), weight)])
            self.logger.debug(f"[{self.name}] assumption {node_id} @ {weight}")
            return node_id

    def add_fact(self, weight: Weight, datum: Any = None) -> NodeId:
        """Create a fact holding in the empty environment at ``weight``."""
        with self._lock:
            node_id = self._new_node(NodeKind.FACT, weight, datum)
            self._merge(node_id, [Environment(frozenset(), weight)])
            self.logger.debug(f"[{self.name}] fact {node_id} @ {weight}")
            return node_id

    def add_node(self, datum: Any = None) -> NodeId:
        """Create a derived node; it is supported only through justifications."""
        with self._lock:
            return self._new_node(NodeKind.DERIVED, None, datum)

    # ------------------------------------------------------------------
    # justifications and propagation

    def _require(self, node_id: NodeId) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"[{self.name}] unknown node {node_id!r}") from None

    def add_justification(
        self,
        antecedents: Iterable[NodeId],
        consequent: Optional[NodeId],
        weight: Weight
    ) -> JustificationId:
        """Install ``antecedents -> consequent`` at ``weight`` and propagate.

        A ``None`` consequent means the contradiction node.

        Raises:
            ATMSError: If the antecedent set is empty, contains the
                contradiction or contains the consequent.
            UnknownNodeError: If an id is not a node of this engine.
        """
        with self._lock:
            antecedent_set = frozenset(antecedents)
            if consequent is None:
                consequent = self.contradiction
            if not antecedent_set:
                raise ATMSError("A justification needs at least one antecedent")
            for node_id in antecedent_set | {consequent}:
                self._require(node_id)
            if self.contradiction in antecedent_set:
                raise ATMSError("The contradiction cannot justify other nodes")
            if consequent in antecedent_set:
                raise ATMSError(f"Node {consequent} cannot justify itself")

            justification = Justification(
                next(self._justification_ids), antecedent_set, consequent, weight
            )
            self._justifications[justification.id] = justification
            for node_id in antecedent_set:
                self._consumers[node_id].append(justification.id)
            self.logger.debug(
                f"[{self.name}] justification {justification.id}: "
                f"{sorted(antecedent_set)} -> {consequent} @ {weight}"
            )
            self._propagate(justification.id)
            return justification.id

    def add_nogood(self, assumptions: Iterable[NodeId], degree: Weight) -> Nogood:
        """Declare that ``assumptions`` are jointly contradictory at ``degree``.

        Returns the stored nogood that now covers the set (which may be an
        older, stronger one).
        """
        with self._lock:
            members = frozenset(assumptions)
            self._require_assumptions(members)
            if not members:
                raise ATMSError("A declared nogood needs at least one assumption")
            self._declared.append((members, degree))
            self._record_nogood(Environment(members, degree))
            return next(
                n for n in self._nogoods.values()
                if n.assumptions <= members and n.degree >= degree
            )

    def _propagate(self, start: JustificationId) -> None:
        queue: Deque[JustificationId] = deque([start])
        queued: Set[JustificationId] = {start}
        while queue:
            justification = self._justifications[queue.popleft()]
            queued.discard(justification.id)
            candidates = self._fire(justification)
            if not candidates:
                continue
            if justification.consequent == self.contradiction:
                for candidate in candidates:
                    self._record_nogood(candidate)
                continue
            if self._merge(justification.consequent, candidates):
                for consumer in self._consumers[justification.consequent]:
                    if consumer not in queued:
                        queued.add(consumer)
                        queue.append(consumer)

    def _fire(self, justification: Justification) -> List[Environment]:
        labels = [self._nodes[a].environments for a in sorted(justification.antecedents)]
        if any(not label for label in labels):
            return []
        candidates = []
        for selection in product(*labels):
            assumptions = frozenset().union(*(e.assumptions for e in selection))
            degree = combine_support([e.degree for e in selection], justification.weight)
            candidates.append(Environment(assumptions, degree))
        return candidates

    def _merge(self, node_id: NodeId, candidates: Iterable[Environment]) -> bool:
        """Fold candidates into a label; True if the label changed."""
        node = self._nodes[node_id]
        changed = False
        for candidate in candidates:
            if not strictly_below(self._inconsistency(candidate.assumptions), candidate.degree):
                continue
            if any(existing.subsumes(candidate) for existing in node.environments):
                continue
            node.environments = [
                e for e in node.environments if not candidate.subsumes(e)
            ]
            node.environments.append(candidate)
            changed = True
        return changed

    def _record_nogood(self, candidate: Environment) -> None:
        for existing in self._nogoods.values():
            if existing.assumptions <= candidate.assumptions and existing.degree >= candidate.degree:
                return
        for nogood_id in [
            n.id for n in self._nogoods.values()
            if candidate.assumptions <= n.assumptions and n.degree <= candidate.degree
        ]:
            del self._nogoods[nogood_id]
        nogood = Nogood(next(self._nogood_ids), candidate.assumptions, candidate.degree)
        self._nogoods[nogood.id] = nogood
        self.logger.debug(f"[{self.name}] nogood {nogood}")

        # weak consistency: nothing may rest on an environment at or below
        # the inconsistency it now carries
        for node in self._nodes.values():
            if node.environments:
                node.environments = [
                    e for e in node.environments
                    if not (nogood.assumptions <= e.assumptions and e.degree <= nogood.degree)
                ]

    # ------------------------------------------------------------------
    # queries

    def _require_assumptions(self, node_ids: Iterable[NodeId]) -> None:
        for node_id in node_ids:
            if self._require(node_id).kind is not NodeKind.ASSUMPTION:
                raise ATMSError(f"Node {node_id} is not an assumption")

    def _inconsistency(self, assumptions: FrozenSet[NodeId]) -> Optional[Weight]:
        return max_degree(
            n.degree for n in self._nogoods.values() if n.assumptions <= assumptions
        )

    def label(self, node_id: NodeId) -> Label:
        """Current label of a node. The contradiction's label is the nogood store."""
        node = self._require(node_id)
        if node.kind is NodeKind.CONTRADICTION:
            return Label.of(Environment(n.assumptions, n.degree) for n in self.nogoods())
        return Label.of(node.environments)

    def node(self, node_id: NodeId) -> Node:
        return self._require(node_id)

    def kind(self, node_id: NodeId) -> NodeKind:
        return self._require(node_id).kind

    def weight_of(self, assumption: NodeId) -> Weight:
        """Intrinsic weight of an assumption or fact."""
        weight = self._require(assumption).intrinsic_weight
        if weight is None:
            raise ATMSError(f"Node {assumption} has no intrinsic weight")
        return weight

    def nodes(self) -> List[NodeId]:
        return sorted(self._nodes)

    def assumptions(self) -> List[NodeId]:
        return sorted(n.id for n in self._nodes.values() if n.kind is NodeKind.ASSUMPTION)

    def nogoods(self) -> List[Nogood]:
        """The minimal nogood store, in creation order."""
        return sorted(self._nogoods.values(), key=lambda n: n.id)

    def justifications(self) -> List[Justification]:
        return [self._justifications[j] for j in sorted(self._justifications)]

    def justifications_for(self, node_id: NodeId) -> List[Justification]:
        self._require(node_id)
        return [j for j in self.justifications() if j.consequent == node_id]

    def environment_inconsistency_degree(self, assumptions: Iterable[NodeId]) -> Optional[Weight]:
        """Largest nogood degree among stored nogoods inside ``assumptions``."""
        members = frozenset(assumptions)
        self._require_assumptions(members)
        return self._inconsistency(members)

    def context_degree(self, node_id: NodeId, hypotheses: Iterable[NodeId]) -> Optional[Weight]:
        """Certainty of a node under the assumption set ``hypotheses``."""
        context = frozenset(hypotheses)
        self._require_assumptions(context)
        node = self._require(node_id)
        if node.kind is NodeKind.CONTRADICTION:
            return self._inconsistency(context)
        return max_degree(e.degree for e in node.environments if e.assumptions <= context)

    def context(self, hypotheses: Iterable[NodeId]) -> Dict[NodeId, Weight]:
        """Every non-contradiction node derivable under ``hypotheses``."""
        context = frozenset(hypotheses)
        self._require_assumptions(context)
        result = {}
        for node in self._nodes.values():
            if node.kind is NodeKind.CONTRADICTION:
                continue
            degree = max_degree(e.degree for e in node.environments if e.assumptions <= context)
            if degree is not None:
                result[node.id] = degree
        return dict(sorted(result.items()))

    # ------------------------------------------------------------------
    # interpretations

    def rank_key(self, discarded: Iterable[NodeId]) -> Tuple[Any, ...]:
        """Ordering key of an interpretation; smaller ranks first.

        Discarded weights sorted descending and compared lexicographically,
        then the number discarded, then the discarded ids.
        """
        dropped = sorted(discarded)
        weights = tuple(sorted((self.weight_of(a) for a in dropped), reverse=True))
        return (weights, len(dropped), tuple(dropped))

    def _interpretation(self, kept: Iterable[NodeId]) -> Interpretation:
        kept_set = frozenset(kept)
        discarded = frozenset(self.assumptions()) - kept_set
        return Interpretation(kept_set, discarded, self.rank_key(discarded))

    def _blocking_nogoods(self) -> List[Nogood]:
        return [n for n in self.nogoods() if n.assumptions]

    def interpretations(
        self,
        limit: Optional[int] = None,
        stats: Optional[EnumerationStats] = None
    ) -> List[Interpretation]:
        """The ``limit`` best maximal consistent assumption sets.

        Maximal consistent sets are the complements of the minimal hitting
        sets of the nogood hypergraph, built one nogood at a time.

        Raises:
            EnumerationLimitError: If there are more assumptions than the cap.
        """
        assumptions = self.assumptions()
        if len(assumptions) > self._interpretation_cap:
            raise EnumerationLimitError(
                f"[{self.name}] {len(assumptions)} assumptions exceed the enumeration "
                f"cap of {self._interpretation_cap}; use best_interpretation() instead"
            )
        if limit is not None and limit < 1:
            raise ATMSError(f"limit must be at least 1, got {limit}")
        nogoods = self._blocking_nogoods()
        stats = stats if stats is not None else EnumerationStats()
        stats.nogoods = len(nogoods)

        hitting_sets: List[FrozenSet[NodeId]] = [frozenset()]
        for nogood in nogoods:
            grown: Set[FrozenSet[NodeId]] = set()
            for hitting in hitting_sets:
                if hitting & nogood.assumptions:
                    grown.add(hitting)
                    continue
                for member in nogood.assumptions:
                    grown.add(hitting | {member})
                    stats.candidates += 1
            hitting_sets = _minimal_sets(grown)

        ranked = sorted(
            (self._interpretation(frozenset(assumptions) - h) for h in hitting_sets),
            key=lambda i: i.rank_key
        )
        stats.interpretations = len(ranked)
        self.logger.debug(
            f"[{self.name}] {len(ranked)} interpretations from {len(nogoods)} nogoods"
        )
        return ranked if limit is None else ranked[:limit]

    def best_interpretation(self, stats: Optional[GreedyStats] = None) -> Interpretation:
        """Greedy single best interpretation.

        While nogoods remain: take the most certain one (lowest id on ties),
        discard its least certain assumption (lowest id on ties) and drop every
        nogood mentioning that assumption. A restoration pass then re-adds
        discarded assumptions, most certain first, whenever no nogood would be
        embedded, so the result is maximal.
        """
        stats = stats if stats is not None else GreedyStats()
        nogoods = self._blocking_nogoods()
        stats.nogoods = len(nogoods)
        kept = set(self.assumptions())
        discarded: List[NodeId] = []

        remaining = list(nogoods)
        while remaining:
            stats.iterations += 1
            selected = remaining[0]
            for nogood in remaining:
                stats.inspections += 1
                if nogood.degree > selected.degree:
                    selected = nogood
            victim = min(selected.assumptions, key=lambda a: (self.weight_of(a), a))
            kept.discard(victim)
            discarded.append(victim)
            survivors = []
            for nogood in remaining:
                if nogood is selected:
                    continue
                stats.inspections += 1
                if victim not in nogood.assumptions:
                    survivors.append(nogood)
            remaining = survivors

        for candidate in sorted(discarded, key=lambda a: (-self.weight_of(a).value, a)):
            trial = kept | {candidate}
            blocked = False
            for nogood in nogoods:
                stats.restoration_checks += 1
                if candidate in nogood.assumptions and nogood.assumptions <= trial:
                    blocked = True
                    break
            if not blocked:
                kept.add(candidate)
                stats.restored += 1

        self.logger.debug(
            f"[{self.name}] greedy selection: {stats.iterations} iterations, "
            f"{stats.inspections} inspections, {stats.restored} restored"
        )
        return self._interpretation(kept)

    # ------------------------------------------------------------------
    # encodings

    def to_clause_base(self, environment: Optional[Iterable[NodeId]] = None) -> WeightedClauseBase:
        """Encode justifications, facts and declared nogoods as a clause base.

        Assumptions in ``environment`` (all assumptions when omitted) are added
        as unit clauses carrying their intrinsic weight. Node ids are the
        propositions; the contradiction is the empty conclusion.
        """
        chosen = frozenset(self.assumptions() if environment is None else environment)
        self._require_assumptions(chosen)
        clauses: List[WeightedClause] = []
        for node in self._nodes.values():
            if node.kind is NodeKind.FACT or (node.kind is NodeKind.ASSUMPTION and node.id in chosen):
                clauses.append(WeightedClause.fact(node.id, node.intrinsic_weight))
        for justification in self.justifications():
            conclusion = None if justification.consequent == self.contradiction else justification.consequent
            clauses.append(
                WeightedClause.implication(justification.antecedents, conclusion, justification.weight)
            )
        for members, degree in self._declared:
            clauses.append(WeightedClause.implication(members, None, degree))
        registry = frozenset(n for n in self._nodes if n != self.contradiction)
        return WeightedClauseBase(tuple(clauses), registry)

    def dump(self) -> str:
        """Deterministic text dump of all labels and nogoods."""
        lines = []
        for node_id in self.nodes():
            node = self._nodes[node_id]
            if node.kind is NodeKind.CONTRADICTION:
                continue
            lines.append(f"node {node_id} {node.kind.value} label={self.label(node_id)}")
        for nogood in sorted(self.nogoods(), key=lambda n: (tuple(sorted(n.assumptions)), n.degree)):
            lines.append(f"nogood {nogood}")
        return '\n'.join(lines) + '\n'

    def __repr__(self) -> str:
        return (
            f"PiATMS(name='{self.name}', nodes={len(self._nodes)}, "
            f"justifications={len(self._justifications)}, nogoods={len(self._nogoods)})"
        )


def _minimal_sets(sets: Iterable[FrozenSet[NodeId]]) -> List[FrozenSet[NodeId]]:
    ordered = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    minimal: List[FrozenSet[NodeId]] = []
    for candidate in ordered:
        if not any(kept <= candidate for kept in minimal):
            minimal.append(candidate)
    return minimal
