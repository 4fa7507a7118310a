"""Phase-by-phase k-best aggregation of units.

Each phase lifts solutions at one level to the level above. Every input
solution gets its own private working memory: complete hypotheses are
generated there, the best maximal consistent combinations are taken from its
engine, and each combination is completed with incomplete hypotheses built
from the units it leaves unused. The combinations of all working memories
are pooled, de-duplicated, stripped of solutions subsumed by another one and
ranked; the best ``k`` go on to the next phase (``m`` after the last one).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import logging

from ..core.atms import EnumerationLimitError, GreedyStats, Interpretation, PiATMS
from ..core.units import (
    Doctrine, Evidence, LEVELS, PhaseTrace, Report, Scenario, Solution, Unit,
    level_index, next_level, rank_solutions
)
from ..config import FUSION_CONFIG, APP_CONFIG
from .certainty import CertaintyModel
from .hypotheses import HypothesisGenerator, PrivateWorkingMemory


logger = logging.getLogger(__name__)

ENUMERATE = 'enumerate'
GREEDY = 'greedy'


@dataclass
class MemoryResult:
    """What one private working memory produced."""

    solutions: List[Solution] = field(default_factory=list)
    hypotheses: int = 0
    nogoods: int = 0
    inspections: int = 0
    bound: int = 0


@dataclass
class PhaseResult:
    solutions: List[Solution]
    trace: PhaseTrace


def _labels(memory: PrivateWorkingMemory, nodes: Dict[str, int], names: Dict[int, str]) -> List[Evidence]:
    """Evidence of the given units, with node ids rendered as unit ids."""
    records = []
    nogoods = memory.atms.nogoods()
    for unit_id, node in sorted(nodes.items()):
        handle = next((h for h in memory.elements() if h['id'] == unit_id), None)
        support = handle.support if handle is not None and handle.support is not None else node
        environments = tuple(
            (tuple(sorted(names[a] for a in env.assumptions)), env.degree)
            for env in memory.atms.label(support)
        )
        conflicts = []
        for nogood in nogoods:
            if node in nogood.assumptions:
                for other in sorted(nogood.assumptions - {node}):
                    conflicts.append((names[other], nogood.degree))
        conflicts = tuple(sorted(set(conflicts), key=lambda c: (c[0], c[1])))
        if environments or conflicts:
            records.append(Evidence(unit_id, environments, conflicts))
    return records


def observation_evidence(unit: Unit) -> Evidence:
    """An observation holds in the empty environment at its certainty."""
    return Evidence(unit.id, (((), unit.certainty),), ())


class PhaseAggregator:
    """Runs aggregation phases for one doctrine.

    Args:
        doctrine: Composition templates.
        model: Certainty model (default: plain model over ``doctrine``).
        selection: ``'enumerate'`` for k-best interpretations, ``'greedy'``
            for the single best interpretation of each working memory.
        parallel: Process working memories on a thread pool.
        max_workers: Thread pool size.
    """

    def __init__(
        self,
        doctrine: Doctrine,
        model: Optional[CertaintyModel] = None,
        selection: str = ENUMERATE,
        parallel: Optional[bool] = None,
        max_workers: Optional[int] = None
    ):
        if selection not in (ENUMERATE, GREEDY):
            raise ValueError(f"Unknown selection mode: {selection}")
        self.doctrine = doctrine
        self.model = model or CertaintyModel(doctrine)
        self.generator = HypothesisGenerator(doctrine, self.model)
        self.selection = selection
        self.parallel = FUSION_CONFIG['parallel'] if parallel is None else parallel
        self.max_workers = max_workers or FUSION_CONFIG['max_workers']
        self.logger = logging.getLogger(__name__)

    # ------------------------------------------------------------------
    # selection inside one working memory

    def _interpretations(self, atms: PiATMS, k: int, result: MemoryResult) -> List[Interpretation]:
        nogood_count = len([n for n in atms.nogoods() if n.assumptions])
        if self.selection == GREEDY:
            stats = GreedyStats()
            best = atms.best_interpretation(stats)
            result.inspections += stats.inspections
            result.bound += nogood_count ** 2
            return [best]
        try:
            return atms.interpretations(limit=k)
        except EnumerationLimitError as e:
            self.logger.warning(f"{e}; falling back to the greedy selection")
            stats = GreedyStats()
            best = atms.best_interpretation(stats)
            result.inspections += stats.inspections
            result.bound += nogood_count ** 2
            return [best]

    def _process(self, solution: Solution, index: int, level: str, target: str, k: int) -> MemoryResult:
        result = MemoryResult()
        aggregable = [u for u in solution.members if u.level == level]
        carried = [u for u in solution.members if level_index(u.level) > level_index(level)]
        stale = [u for u in solution.members if level_index(u.level) < level_index(level)]

        name = f"{target}-pwm{index}"
        memory = self.generator.generate_complete(name, target, aggregable)
        complete = memory.hypotheses()
        result.hypotheses += len(complete)
        result.nogoods += len(memory.atms.nogoods())
        names = memory.unit_of_node()
        by_node = {h.node: u for u, h in complete}

        for rank, interpretation in enumerate(self._interpretations(memory.atms, k, result), start=1):
            committed = sorted((by_node[n] for n in interpretation.kept), key=lambda u: u.id)
            child = self.generator.generate_incomplete(f"{name}.{rank}", target, aggregable, committed)
            result.hypotheses += len(child.hypotheses())
            result.nogoods += len(child.atms.nogoods())
            chosen = self.generator.complete_with_incomplete(child)

            covered = set()
            for unit in committed + chosen:
                covered |= set(unit.sub_units)
            leftover = [u for u in aggregable if u.id not in covered]

            evidence = {e.unit_id: e for e in solution.evidence}
            for record in _labels(memory, {u.id: h.node for u, h in complete if u in committed}, names):
                evidence[record.unit_id] = record
            child_nodes = {u.id: h.node for u, h in child.hypotheses() if u in chosen}
            for record in _labels(child, child_nodes, child.unit_of_node()):
                evidence[record.unit_id] = record

            units = {u.id: u for u in solution.units}
            for unit in committed + chosen:
                units[unit.id] = unit
            result.solutions.append(Solution(
                level=target,
                members=tuple(committed + chosen + carried),
                unexplained=tuple(solution.unexplained) + tuple(stale) + tuple(leftover),
                units=tuple(units.values()),
                evidence=tuple(evidence.values()),
            ))
        return result

    # ------------------------------------------------------------------
    # phases

    def _pool(self, candidates: Iterable[Solution], limit: int) -> List[Solution]:
        unique: Dict[FrozenSet[str], Solution] = {}
        for solution in rank_solutions(candidates):
            unique.setdefault(solution.member_ids, solution)
        ranked = rank_solutions(unique.values())
        kept = [
            s for s in ranked
            if not any(s.member_ids < other.member_ids for other in ranked)
        ]
        return kept[:limit]

    def aggregate_phase(self, inputs: Sequence[Solution], level: str, k: int, limit: Optional[int] = None) -> PhaseResult:
        """Lift ``inputs`` from ``level`` to the level above.

        Args:
            inputs: Solutions whose members are (mostly) at ``level``.
            level: Input level.
            k: Combinations taken per working memory.
            limit: Solutions kept after pooling (default ``k``).

        Returns:
            Ranked solutions at the next level and the phase trace.

        Raises:
            ValueError: If ``k`` or ``limit`` is below 1, or ``level`` is the top.
        """
        limit = k if limit is None else limit
        if k < 1 or limit < 1:
            raise ValueError("k and the solution limit must be at least 1")
        target = next_level(level)
        if target is None:
            raise ValueError(f"No level above {level}")
        if not inputs:
            return PhaseResult([], PhaseTrace(target))

        self.logger.info(f"Phase {level} -> {target}: {len(inputs)} working memories")
        # compiled once, shared read-only by the working memories
        self.generator.complete_rules(target)
        self.generator.incomplete_rules(target)
        jobs = [(solution, index) for index, solution in enumerate(inputs, start=1)]
        if self.parallel and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                results = list(pool.map(lambda job: self._process(job[0], job[1], level, target, k), jobs))
        else:
            results = [self._process(solution, index, level, target, k) for solution, index in jobs]

        hypotheses = sum(r.hypotheses for r in results)
        passed_through = hypotheses == 0
        if passed_through:
            self.logger.warning(f"No {target} hypothesis; passing {level} solutions through")
            candidates = [
                Solution(target, s.members, s.unexplained, s.units, s.evidence) for s in inputs
            ]
        else:
            candidates = [s for r in results for s in r.solutions]
        solutions = self._pool(candidates, limit)

        trace = PhaseTrace(
            level=target,
            memories=len(results),
            hypotheses=hypotheses,
            nogoods=sum(r.nogoods for r in results),
            solutions=len(solutions),
            inspections=sum(r.inspections for r in results),
            bound=sum(r.bound for r in results),
            passed_through=passed_through,
        )
        self.logger.info(
            f"Phase {level} -> {target}: {hypotheses} hypotheses, {trace.nogoods} nogoods, "
            f"{len(solutions)} solutions kept"
        )
        unexplained = sum(len(s.unexplained) for s in solutions)
        if unexplained:
            self.logger.warning(f"{unexplained} unexplained units across {target} solutions")
        return PhaseResult(solutions, trace)

    def initial_solution(self, scenario: Scenario) -> Optional[Solution]:
        """The observations of ``scenario`` as one lowest-level solution."""
        if not scenario.observations:
            return None
        observations = [
            Unit(u.id, u.level, u.type, u.start, u.end, u.axes, certainty=self.model.leaf(u.certainty))
            for u in scenario.observations
        ]
        return Solution(
            level=LEVELS[0],
            members=tuple(observations),
            units=tuple(observations),
            evidence=tuple(observation_evidence(u) for u in observations),
        )

    def run_pipeline(
        self,
        scenario: Scenario,
        k: Optional[int] = None,
        m: Optional[int] = None,
        until: Optional[str] = None
    ) -> Tuple[List[Solution], List[PhaseTrace]]:
        """Run every phase from the lowest level up to ``until``.

        Args:
            scenario: Observations.
            k: Solutions kept by intermediate phases.
            m: Solutions kept by the last phase.
            until: Highest level to build (default: the top level).

        Returns:
            The final ranked solutions and the per-phase trace.
        """
        k = FUSION_CONFIG['k'] if k is None else k
        m = FUSION_CONFIG['m'] if m is None else m
        until = until or LEVELS[-1]
        last = level_index(until)
        if last < 1:
            raise ValueError(f"Cannot stop at the lowest level '{until}'")
        if self.selection == GREEDY:
            k = m = 1

        initial = self.initial_solution(scenario)
        if initial is None:
            self.logger.info("Empty scenario; nothing to aggregate")
            return [], []

        solutions = [initial]
        trace: List[PhaseTrace] = []
        for index in range(last):
            final = index == last - 1
            phase = self.aggregate_phase(solutions, LEVELS[index], k, m if final else k)
            solutions = phase.solutions
            trace.append(phase.trace)
        return solutions, trace


def build_report(
    solutions: Sequence[Solution],
    trace: Sequence[PhaseTrace],
    meta: Sequence[Tuple[str, str]] = ()
) -> Report:
    """Bundle a run into a :class:`Report`."""
    header = (('generator', f"{APP_CONFIG['name']} {APP_CONFIG['version']}"),) + tuple(meta)
    return Report(header, tuple(solutions), tuple(trace))


def run_pipeline(
    scenario: Scenario,
    doctrine: Doctrine,
    k: Optional[int] = None,
    m: Optional[int] = None,
    until: Optional[str] = None,
    selection: str = ENUMERATE,
    parallel: Optional[bool] = None,
    transform: Optional[Callable] = None
) -> Tuple[List[Solution], List[PhaseTrace]]:
    """Convenience wrapper around :meth:`PhaseAggregator.run_pipeline`."""
    aggregator = PhaseAggregator(
        doctrine, CertaintyModel(doctrine, transform), selection=selection, parallel=parallel
    )
    return aggregator.run_pipeline(scenario, k, m, until)
