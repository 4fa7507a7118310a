"""Tests for phase-by-phase aggregation."""

from decimal import Decimal
from itertools import combinations
import random

import pytest

from src.core.units import Scenario, compare_solutions, unit_id
from src.core.weights import Weight
from src.processors.aggregator import (
    ENUMERATE, GREEDY, PhaseAggregator, build_report, run_pipeline
)
from src.processors.certainty import CertaintyModel, shift_transform
from src.processors.reporter import render_structured
from src.processors.solution_checker import SolutionChecker
from tests.conftest import random_scenario, section


H1 = unit_id('company', 'tank', ['S1', 'S2', 'S3'])
H2 = unit_id('company', 'tank', ['S2', 'S3', 'S4'])
I1 = unit_id('company', 'tank', ['S1'])
I4 = unit_id('company', 'tank', ['S4'])


def sign(value):
    return (value > 0) - (value < 0)


def assert_non_subsumed(solutions):
    for i, first in enumerate(solutions):
        for j, second in enumerate(solutions):
            if i != j:
                assert not first.member_ids <= second.member_ids


def test_four_sections_company_phase(company_doctrine, four_sections):
    """The compact company plus the leftover section ranks before the loose company."""
    solutions, trace = PhaseAggregator(company_doctrine).run_pipeline(four_sections, 3, 3, 'company')

    assert [s.member_ids for s in solutions] == [frozenset([H1, I4]), frozenset([H2, I1])]
    assert solutions[0].certainties == (Weight('0.6667'), Weight('0.3333'))
    assert solutions[1].certainties == (Weight('0.3333'), Weight('0.0833'))
    assert all(s.level == 'company' for s in solutions)
    assert all(not s.unexplained for s in solutions)

    [phase] = trace
    assert (phase.level, phase.memories, phase.hypotheses, phase.nogoods, phase.solutions) == \
        ('company', 1, 4, 1, 2)
    assert not phase.passed_through


def test_solutions_carry_evidence(company_doctrine, four_sections):
    [best, _], _ = PhaseAggregator(company_doctrine).run_pipeline(four_sections, 3, 3, 'company')
    record = best.evidence_for(H1)
    assert record.environments == (((H1,), Weight('0.6667')),)
    assert record.conflicts == ((H2, Weight('0.0833')),)
    assert best.evidence_for('S1').environments == (((), Weight('0.9')),)
    assert best.unit(H1).sub_units == ('S1', 'S2', 'S3')


def test_smaller_limit_is_a_prefix(company_doctrine, four_sections):
    aggregator = PhaseAggregator(company_doctrine)
    everything, _ = aggregator.run_pipeline(four_sections, 3, 3, 'company')
    head, _ = aggregator.run_pipeline(four_sections, 3, 1, 'company')
    assert head == everything[:1]


def test_greedy_selection_finds_the_best_solution(company_doctrine, four_sections):
    aggregator = PhaseAggregator(company_doctrine, selection=GREEDY)
    solutions, [phase] = aggregator.run_pipeline(four_sections, 3, 3, 'company')
    assert [s.member_ids for s in solutions] == [frozenset([H1, I4])]
    assert 0 < phase.inspections <= phase.bound


def test_pass_through_when_nothing_aggregates(company_doctrine):
    scenario = Scenario('rifles', (section('M1', 0, type='motorised_rifle'),))
    solutions, [phase] = PhaseAggregator(company_doctrine).run_pipeline(scenario, 3, 3, 'company')
    assert phase.passed_through
    assert phase.hypotheses == 0
    [solution] = solutions
    assert solution.level == 'company'
    assert solution.member_ids == frozenset(['M1'])


def test_empty_scenario(doctrine):
    assert PhaseAggregator(doctrine).run_pipeline(Scenario('empty'), 3, 3) == ([], [])


def test_aggregate_phase_arguments(company_doctrine, four_sections):
    aggregator = PhaseAggregator(company_doctrine)
    assert aggregator.aggregate_phase([], 'section', 3).solutions == []
    initial = aggregator.initial_solution(four_sections)
    with pytest.raises(ValueError):
        aggregator.aggregate_phase([initial], 'section', 0)
    with pytest.raises(ValueError):
        aggregator.aggregate_phase([initial], 'division', 3)
    with pytest.raises(ValueError):
        aggregator.run_pipeline(four_sections, 3, 3, 'section')
    with pytest.raises(ValueError):
        PhaseAggregator(company_doctrine, selection='random')


def test_three_axes_full_run(doctrine, three_axes):
    """Top solutions of the twelve-observation scenario are conflict-free and non-subsumed."""
    solutions, trace = PhaseAggregator(doctrine).run_pipeline(three_axes, 3, 3)
    assert 1 <= len(solutions) <= 3
    assert [p.level for p in trace] == ['company', 'battalion', 'regiment', 'division']
    assert trace[0].hypotheses > 0
    assert_non_subsumed(solutions)
    result = SolutionChecker().check(solutions)
    assert result['passed'], result['issues']
    observed = {u.id for u in three_axes.observations}
    for solution in solutions:
        assert solution.leaves() <= observed


@pytest.mark.parametrize('seed', range(50))
def test_random_scenarios_are_non_subsumed(doctrine, seed):
    scenario = random_scenario(random.Random(seed))
    solutions, _ = PhaseAggregator(doctrine).run_pipeline(scenario, 3, 3)
    assert_non_subsumed(solutions)
    assert SolutionChecker().check(solutions)['passed']


@pytest.mark.parametrize('seed', range(20))
def test_ranking_depends_only_on_weight_order(doctrine, seed):
    """Shifting every weight down keeps every ranking order."""
    rng = random.Random(1000 + seed)
    scenario = random_scenario(rng)
    offset = Weight(rng.choice(['0.01', '0.02', '0.03', '0.04']))
    plain, _ = run_pipeline(scenario, doctrine, 3, 3, 'regiment')
    shifted, _ = run_pipeline(scenario, doctrine, 3, 3, 'regiment', transform=shift_transform(offset))
    assert [s.member_ids for s in shifted] == [s.member_ids for s in plain]



KNEE = Decimal('0.5')


def knee_transform(weight: Weight) -> Weight:
    """Identity above the knee, steeper below it: strictly increasing but not affine."""
    if weight.value >= KNEE:
        return weight
    return Weight(KNEE - (KNEE - weight.value) * Decimal('1.1'))


@pytest.mark.parametrize('seed', range(20))
def test_nonlinear_remap_keeps_every_phase_ranking(doctrine, seed):
    """A strictly increasing non-affine remap keeps the order of every phase's solutions."""
    scenario = random_scenario(random.Random(2000 + seed))
    for until in ('company', 'battalion', 'regiment'):
        plain, plain_trace = run_pipeline(scenario, doctrine, 3, 3, until)
        remapped, remapped_trace = run_pipeline(scenario, doctrine, 3, 3, until, transform=knee_transform)
        assert [s.member_ids for s in remapped] == [s.member_ids for s in plain]
        assert remapped_trace == plain_trace
        for before, after in zip(plain, remapped):
            assert after.certainties == tuple(knee_transform(c) for c in before.certainties)
        for i, j in combinations(range(len(plain)), 2):
            assert sign(compare_solutions(remapped[i], remapped[j])) == \
                sign(compare_solutions(plain[i], plain[j]))


def test_runs_are_deterministic(doctrine, three_axes):
    reports = [
        render_structured(build_report(*PhaseAggregator(doctrine).run_pipeline(three_axes, 3, 3)))
        for _ in range(2)
    ]
    assert reports[0] == reports[1]


def test_parallel_matches_sequential(doctrine, three_axes):
    sequential, _ = PhaseAggregator(doctrine, selection=ENUMERATE).run_pipeline(three_axes, 3, 3)
    parallel, _ = PhaseAggregator(doctrine, parallel=True, max_workers=2).run_pipeline(three_axes, 3, 3)
    assert parallel == sequential


def test_transformed_model_shifts_leaf_certainties(company_doctrine, four_sections):
    model = CertaintyModel(company_doctrine, shift_transform(Weight('0.04')))
    initial = PhaseAggregator(company_doctrine, model).initial_solution(four_sections)
    assert {u.certainty for u in initial.members} == {Weight('0.86')}
