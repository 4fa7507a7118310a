"""Tests for the rule file parser."""

from decimal import Decimal

import pytest

from src.config import RULES_DIR
from src.core.atms import PiATMS
from src.core.base_parser import FileFormatError, ValidationError
from src.core.rule_engine import Element, WorkingMemory
from src.core.weights import Weight
from src.parsers.rule_parser import RuleParser


def parse(text):
    return RuleParser(text=text).process()['data']


def sightings(memory, times):
    for number, t in enumerate(times, start=1):
        memory.assert_assumption(
            Element.of('sighting', id=f"S{number}", type='tank', axis='A1', start=t, end=t),
            Weight('0.9')
        )


def test_parse_shipped_rules():
    rulebase = RuleParser(RULES_DIR / 'companies.rules').process()['data']
    assert [r.name for r in rulebase.rules] == ['tank-company', 'shared-sighting']
    company, shared = rulebase.rules
    assert company.weight == Weight('0.9')
    assert company.symmetric == ((0, 1, 2),)
    assert shared.priority == 1


def test_shipped_rules_build_competing_companies():
    """Sightings at 0, 10, 20 and 65 give two companies that share sightings."""
    rulebase = RuleParser(RULES_DIR / 'companies.rules').process()['data']
    memory = WorkingMemory('companies', PiATMS(), rulebase)
    sightings(memory, (0, 10, 20, 65))
    report = memory.run_to_quiescence()

    companies = memory.elements('company')
    assert report.count('tank-company') == 2
    assert sorted(memory.atms.weight_of(c.node) for c in companies) == [Weight('0.0833'), Weight('0.6667')]
    assert {c['members'] for c in companies} == {
        frozenset(['S1', 'S2', 'S3']), frozenset(['S2', 'S3', 'S4'])
    }
    [nogood] = memory.atms.nogoods()
    assert nogood.assumptions == frozenset(c.node for c in companies)
    assert nogood.degree == Weight('0.0833')


def test_metadata_and_defaults():
    parser = RuleParser(text="""format rules/1
rule one
  when x
  action derive y
end
""")
    result = parser.process()
    [rule] = result['data'].rules
    assert rule.weight == Weight.one()
    assert rule.priority == 0
    assert result['metadata']['rules'] == ['one']


def test_several_actions_run_in_order():
    rulebase = parse("""format rules/1
rule split
  when ?s: sighting n=?n
  action derive left n=?n
  action derive right n=?n+1
end
""")
    memory = WorkingMemory('wm', PiATMS(), rulebase)
    memory.assert_fact(Element.of('sighting', n=1), Weight('1'))
    memory.run_to_quiescence()
    assert [h['n'] for h in memory.elements('left')] == [1]
    assert [h['n'] for h in memory.elements('right')] == [2]


@pytest.mark.parametrize('body, line', [
    ("rule a\n  when x\n  action derive y\n", 2),
    ("rule a\n  when x\n  frobnicate\n  action derive y\nend\n", 4),
    ("rule a\n  when x flag\n  action derive y\nend\n", 3),
    ("rule a\n  when ?p: x\n  symmetric ?p ?q\n  action derive y\nend\n", 4),
    ("rule a\n  when x\n  guard ?z > 1\n  action derive y\nend\n", 2),
    ("rule a\n  when x\nend\n", 2),
    ("rule a\n  when x\n  action explode y\nend\n", 3),
    ("rule a\n  when x\n  action derive y v=os.system\nend\n", 3),
    ("rule a\n  weight 1.5\n  when x\n  action derive y\nend\n", 3),
    ("end\n", 2),
])
def test_format_errors_report_the_line(body, line):
    with pytest.raises(FileFormatError) as excinfo:
        parse("format rules/1\n" + body)
    assert excinfo.value.line == line


@pytest.mark.parametrize('term', ['nan', 'inf', '-Infinity', 'sNaN'])
def test_non_finite_numbers_are_rejected(term):
    with pytest.raises(FileFormatError) as excinfo:
        parse(f"format rules/1\nrule a\n  when x size<{term}\n  action derive y\nend\n")
    assert excinfo.value.line == 3
    assert 'not a finite number' in str(excinfo.value)


def test_decimal_terms_in_tests():
    [rule] = parse("format rules/1\nrule a\n  when x size<=2.5 kind=tank\n  action derive y\nend\n").rules
    [pattern] = rule.conditions
    assert [t.operand for t in pattern.tests] == [Decimal('2.5'), 'tank']


def test_guard_mixing_division_and_decimals_matches():
    rulebase = parse("""format rules/1
rule pair
  when ?a: sighting type=tank
  when ?b: sighting type=tank
  symmetric ?a ?b
  guard span(?a, ?b)/60*0.5 < 0.25
  action derive pair
end
""")
    memory = WorkingMemory('pairs', PiATMS(), rulebase)
    sightings(memory, (0, 24, 90))
    report = memory.run_to_quiescence()
    assert report.count('pair') == 1
    assert len(memory.elements('pair')) == 1


def test_duplicate_rule_names():
    with pytest.raises(FileFormatError):
        parse("format rules/1\nrule a\n  when x\n  action derive y\nend\n"
              "rule a\n  when x\n  action derive z\nend\n")


def test_missing_header():
    with pytest.raises(FileFormatError):
        parse("rule a\n  when x\n  action derive y\nend\n")


def test_empty_rule_file_is_invalid():
    with pytest.raises(ValidationError):
        parse("format rules/1\n# nothing yet\n")
