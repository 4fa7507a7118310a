"""Weighted clause bases and the brute-force possibilistic oracle.

The oracle answers two questions about a finite propositional base whose
clauses carry necessity weights:

* the inconsistency degree: the greatest weight ``a`` such that the clauses
  weighted at least ``a`` are classically unsatisfiable;
* the entailment degree of a goal: the greatest ``a`` such that those clauses
  classically entail the goal.

Both are computed by enumerating every truth assignment. For an assignment
``w`` let ``pen(w)`` be the largest weight of a clause that ``w`` falsifies;
then the inconsistency degree is ``min_w pen(w)`` and the entailment degree of
``g`` is the minimum of ``pen`` over the assignments falsifying ``g``. The
assignment matrix is built once with numpy so a whole profile costs a single
pass. This module shares no code with the truth maintenance engine; it is the
ground truth the engine is tested against.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, Optional, Tuple
import logging

import numpy as np

from .weights import Weight
from ..config import ENGINE_CONFIG


logger = logging.getLogger(__name__)

Literal = Tuple[Hashable, bool]


class OracleLimitError(RuntimeError):
    """Raised when a base has too many propositions for exhaustive checking."""
    pass


def pos(proposition: Hashable) -> Literal:
    """Positive literal of ``proposition``."""
    return (proposition, True)


def neg(proposition: Hashable) -> Literal:
    """Negative literal of ``proposition``."""
    return (proposition, False)


@dataclass(frozen=True)
class WeightedClause:
    """A disjunction of literals with a necessity weight.

    An empty literal set is the contradiction clause.
    """

    literals: FrozenSet[Literal]
    weight: Weight

    def __post_init__(self):
        object.__setattr__(self, 'literals', frozenset(self.literals))
        signs: Dict[Hashable, bool] = {}
        for proposition, sign in self.literals:
            if signs.setdefault(proposition, sign) != sign:
                raise ValueError(
                    f"Proposition {proposition!r} appears with both signs in one clause"
                )

    @classmethod
    def fact(cls, proposition: Hashable, weight: Weight) -> 'WeightedClause':
        return cls(frozenset([pos(proposition)]), weight)

    @classmethod
    def implication(
        cls,
        premises: Iterable[Hashable],
        conclusion: Optional[Hashable],
        weight: Weight
    ) -> 'WeightedClause':
        """Clause form of ``p1 & ... & pn -> conclusion``.

        A ``None`` conclusion stands for the contradiction.
        """
        literals = {neg(p) for p in premises}
        if conclusion is not None:
            literals.add(pos(conclusion))
        return cls(frozenset(literals), weight)

    @property
    def propositions(self) -> FrozenSet[Hashable]:
        return frozenset(p for p, _ in self.literals)

    def is_contradiction(self) -> bool:
        return not self.literals


@dataclass(frozen=True)
class WeightedClauseBase:
    """A multiset of weighted clauses over a proposition registry."""

    clauses: Tuple[WeightedClause, ...] = ()
    propositions: FrozenSet[Hashable] = field(default_factory=frozenset)

    def __post_init__(self):
        clauses = tuple(self.clauses)
        registry = frozenset(self.propositions)
        used = frozenset().union(*(c.propositions for c in clauses)) if clauses else frozenset()
        if not self.propositions:
            registry = used
        missing = used - registry
        if missing:
            raise ValueError(
                f"Clauses mention unregistered propositions: {sorted(map(repr, missing))}"
            )
        object.__setattr__(self, 'clauses', clauses)
        object.__setattr__(self, 'propositions', registry)

    def extended(self, *clauses: WeightedClause) -> 'WeightedClauseBase':
        """Return a new base with ``clauses`` added."""
        added = frozenset().union(*(c.propositions for c in clauses)) if clauses else frozenset()
        return WeightedClauseBase(self.clauses + tuple(clauses), self.propositions | added)

    def max_weight(self) -> Optional[Weight]:
        return max((c.weight for c in self.clauses), default=None)

    def __len__(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class NecessityProfile:
    """Inconsistency degree of a base plus entailment degrees of goals."""

    inconsistency: Optional[Weight]
    entailment: Dict[Hashable, Optional[Weight]]


def alpha_cut(base: WeightedClauseBase, threshold: Weight) -> WeightedClauseBase:
    """Sub-base of the clauses weighted at least ``threshold``.

    The proposition registry is kept so cuts of one base stay comparable.
    """
    kept = tuple(c for c in base.clauses if c.weight >= threshold)
    return WeightedClauseBase(kept, base.propositions)


def _check_cap(base: WeightedClauseBase, max_propositions: Optional[int]) -> None:
    cap = ENGINE_CONFIG['oracle_max_propositions'] if max_propositions is None else max_propositions
    if len(base.propositions) > cap:
        raise OracleLimitError(
            f"Oracle refuses a base with {len(base.propositions)} propositions "
            f"(cap is {cap}); it enumerates every assignment"
        )


def _penalties(base: WeightedClauseBase, index: Dict[Hashable, int]) -> Tuple[np.ndarray, np.ndarray]:
    n = len(index)
    rows = np.arange(1 << n, dtype=np.int64)
    assignments = ((rows[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    penalty = np.zeros(rows.shape[0], dtype=np.int64)
    for clause in base.clauses:
        falsified = np.ones(rows.shape[0], dtype=bool)
        for proposition, sign in clause.literals:
            column = assignments[:, index[proposition]]
            falsified &= (column != sign)
        np.maximum(penalty, np.where(falsified, clause.weight.units, 0), out=penalty)
    return assignments, penalty


def _as_degree(units: int) -> Optional[Weight]:
    return Weight.from_units(int(units)) if units > 0 else None


def necessity_profile(
    base: WeightedClauseBase,
    goals: Iterable[Hashable] = (),
    max_propositions: Optional[int] = None
) -> NecessityProfile:
    """Inconsistency degree of ``base`` and entailment degree of each goal.

    Raises:
        OracleLimitError: If the base has more propositions than the cap.
    """
    _check_cap(base, max_propositions)
    propositions = sorted(base.propositions, key=repr)
    index = {p: i for i, p in enumerate(propositions)}
    assignments, penalty = _penalties(base, index)

    inconsistency_units = int(penalty.min())
    entailment: Dict[Hashable, Optional[Weight]] = {}
    for goal in goals:
        if goal not in index:
            # an unconstrained goal follows only from inconsistency
            entailment[goal] = _as_degree(inconsistency_units)
            continue
        against = penalty[~assignments[:, index[goal]]]
        entailment[goal] = _as_degree(int(against.min()))

    logger.debug(
        f"Oracle checked {penalty.shape[0]} assignments over "
        f"{len(propositions)} propositions and {len(base)} clauses"
    )
    return NecessityProfile(_as_degree(inconsistency_units), entailment)


def inconsistency_degree(
    base: WeightedClauseBase,
    max_propositions: Optional[int] = None
) -> Optional[Weight]:
    """Greatest weight whose cut is unsatisfiable, or ``None`` if consistent."""
    return necessity_profile(base, (), max_propositions).inconsistency


def entailment_degree(
    base: WeightedClauseBase,
    goal: Hashable,
    max_propositions: Optional[int] = None
) -> Optional[Weight]:
    """Greatest weight whose cut entails ``goal``, or ``None`` if never entailed."""
    return necessity_profile(base, (goal,), max_propositions).entailment[goal]
