"""Tests for the hypothesis knowledge sources."""

from src.core.units import Doctrine, Requirement, unit_id
from src.core.weights import Weight
from src.processors.hypotheses import HypothesisGenerator, partial_slot_types, slot_types
from tests.conftest import section, tank_company_template


def ids(memory):
    return [unit.id for unit, _ in memory.hypotheses()]


def test_four_sections_give_two_conflicting_companies(company_doctrine, four_sections):
    """Sections at 0, 10, 20 and 65 give two companies sharing two sections."""
    generator = HypothesisGenerator(company_doctrine)
    memory = generator.generate_complete('pwm', 'company', four_sections.observations)

    hypotheses = dict((u.id, u) for u, _ in memory.hypotheses())
    first = unit_id('company', 'tank', ['S1', 'S2', 'S3'])
    second = unit_id('company', 'tank', ['S2', 'S3', 'S4'])
    assert sorted(hypotheses) == sorted([first, second])
    assert hypotheses[first].certainty == Weight('0.6667')
    assert hypotheses[second].certainty == Weight('0.0833')
    assert hypotheses[first].complete
    assert (hypotheses[first].start, hypotheses[first].end) == (0, 20)

    [nogood] = memory.atms.nogoods()
    assert nogood.degree == Weight('0.0833')
    assert nogood.assumptions == frozenset(h.node for _, h in memory.hypotheses())


def test_three_sections_give_one_company(company_doctrine):
    generator = HypothesisGenerator(company_doctrine)
    memory = generator.generate_complete(
        'pwm', 'company', [section('S1', 0), section('S2', 10), section('S3', 20)]
    )
    assert len(memory.hypotheses()) == 1
    assert memory.atms.nogoods() == []


def test_axis_and_window_limits(company_doctrine):
    generator = HypothesisGenerator(company_doctrine)
    spread = generator.generate_complete(
        'pwm', 'company', [section('S1', 0), section('S2', 10, axis='A2'), section('S3', 20)]
    )
    assert spread.hypotheses() == []

    edge = generator.generate_complete(
        'pwm', 'company', [section('S1', 0), section('S2', 30), section('S3', 60)]
    )
    [(unit, _)] = edge.hypotheses()
    assert unit.certainty == Weight('0.05')

    late = generator.generate_complete(
        'pwm', 'company', [section('S1', 0), section('S2', 30), section('S3', 61)]
    )
    assert late.hypotheses() == []


def test_wrong_type_is_not_aggregated(company_doctrine):
    generator = HypothesisGenerator(company_doctrine)
    memory = generator.generate_complete(
        'pwm', 'company', [section(f"S{i}", i, type='motorised_rifle') for i in range(3)]
    )
    assert memory.hypotheses() == []


def test_incomplete_company_from_the_leftover_section(company_doctrine, four_sections):
    generator = HypothesisGenerator(company_doctrine)
    complete = generator.generate_complete('pwm', 'company', four_sections.observations)
    best = max((u for u, _ in complete.hypotheses()), key=lambda u: u.certainty)

    memory = generator.generate_incomplete('pwm.1', 'company', four_sections.observations, [best])
    [(unit, _)] = memory.hypotheses()
    assert unit.sub_units == ('S4',)
    assert not unit.complete
    assert unit.certainty == Weight('0.3333')
    assert generator.complete_with_incomplete(memory) == [unit]


def test_no_leftovers_give_no_incomplete_hypothesis(company_doctrine):
    generator = HypothesisGenerator(company_doctrine)
    subs = [section('S1', 0), section('S2', 10), section('S3', 20)]
    complete = generator.generate_complete('pwm', 'company', subs)
    committed = [u for u, _ in complete.hypotheses()]
    assert generator.generate_incomplete('pwm.1', 'company', subs, committed).hypotheses() == []


def test_leftovers_outside_the_window_stay_apart(company_doctrine):
    generator = HypothesisGenerator(company_doctrine)
    memory = generator.generate_incomplete('pwm', 'company', [section('S1', 0), section('S4', 65)])
    assert sorted(u.sub_units for u, _ in memory.hypotheses()) == [('S1',), ('S4',)]


def test_completion_prefers_the_most_certain_incomplete(company_doctrine):
    """A pair beats the singletons it conflicts with."""
    generator = HypothesisGenerator(company_doctrine)
    memory = generator.generate_incomplete('pwm', 'company', [section('S1', 0), section('S2', 10)])
    assert len(memory.hypotheses()) == 3
    [chosen] = generator.complete_with_incomplete(memory)
    assert chosen.sub_units == ('S1', 'S2')
    assert chosen.certainty == Weight('0.6667')


def test_slot_types():
    template = tank_company_template()
    assert slot_types(template) == ['tank', 'tank', 'tank']
    assert partial_slot_types(template) == [['tank'], ['tank', 'tank']]
    mixed = tank_company_template(
        requires=(Requirement('tank', 1), Requirement('motorised_rifle', 1))
    )
    assert partial_slot_types(mixed) == [['motorised_rifle'], ['tank']]


def test_mixed_template_needs_each_type():
    template = tank_company_template(
        name='mixed', requires=(Requirement('tank', 2), Requirement('motorised_rifle', 1))
    )
    generator = HypothesisGenerator(Doctrine([template]))
    memory = generator.generate_complete('pwm', 'company', [
        section('T1', 0), section('T2', 5), section('M1', 10, type='motorised_rifle'), section('T3', 15)
    ])
    assert len(memory.hypotheses()) == 3
    assert all('M1' in unit.sub_units for unit, _ in memory.hypotheses())
