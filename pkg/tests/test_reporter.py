"""Tests for report rendering and unit explanations."""

import pytest

from src.core.base_parser import FileFormatError, ValidationError
from src.core.units import Report, unit_id
from src.parsers.report_parser import ReportParser
from src.processors.aggregator import PhaseAggregator, build_report
from src.processors.certainty import CertaintyModel
from src.processors.reporter import UnknownUnitError, explain, render_structured, render_text


H1 = unit_id('company', 'tank', ['S1', 'S2', 'S3'])
H2 = unit_id('company', 'tank', ['S2', 'S3', 'S4'])


@pytest.fixture
def report(company_doctrine, four_sections):
    solutions, trace = PhaseAggregator(company_doctrine).run_pipeline(four_sections, 3, 3, 'company')
    return build_report(solutions, trace, (('command', 'run'), ('scenario', four_sections.name)))


def test_structured_report_reads_back(report):
    """Parsing a rendered report gives the report back."""
    text = render_structured(report)
    parsed = ReportParser(text=text).process()['data']
    assert parsed == report
    assert render_structured(parsed) == text


def test_structured_report_layout(report):
    text = render_structured(report)
    lines = text.splitlines()
    assert lines[0] == 'format report/1'
    assert 'meta command run' in lines
    assert any(line.startswith('phase level=company memories=1 hypotheses=4 nogoods=1') for line in lines)
    assert any(line.startswith('solution rank=1 level=company members=') for line in lines)
    assert f"conflict solution=1 unit={H1} with={H2} degree=0.0833" in lines
    assert 'env solution=1 unit=S1 assumptions=- degree=0.9000' in lines
    assert text.endswith('\n')


def test_text_report(report):
    text = render_text(report, trace=True)
    assert 'command: run' in text
    assert 'Solution 1 (company)' in text
    assert 'Solution 2 (company)' in text
    assert f"  {H1}  company tank  00:00-00:20" in text
    assert 'inspections/bound' in text
    assert 'No solutions.' not in text


def test_text_report_without_solutions():
    text = render_text(Report((('command', 'run'),)), trace=True)
    assert 'No solutions.' in text
    assert 'No phases run.' in text


def test_explain_hypothesis(report, company_doctrine):
    """The explanation gives label, certainty factors, chain and conflicts."""
    text = explain(report, H1, CertaintyModel(company_doctrine))
    assert text.startswith(f"Unit {H1} in solution 1 (company)")
    assert 'certainty = min(base 0.9000, completeness 1.0000, temporal 0.6667) = 0.6667' in text
    assert '[template tank_company]' in text
    assert f"  {{{H1}}}  0.6667" in text
    assert '    S1  section tank  00:00' in text
    assert '  leaves: S1, S2, S3' in text
    assert f"  {H2}  nogood degree 0.0833" in text


def test_explain_observation(report):
    text = explain(report, 'S4')
    assert 'Unit S4 in solution 1 (company)' in text
    assert '  {}  0.9000' in text
    assert 'Conflicts:\n  none' in text
    assert 'leaves:' not in text


def test_explain_unknown_unit(report):
    with pytest.raises(UnknownUnitError) as info:
        explain(report, 'S9')
    assert info.value.unit_id == 'S9'


def test_report_parser_rejects_unknown_solution():
    text = 'format report/1\nenv solution=1 unit=S1 assumptions=- degree=0.9\n'
    with pytest.raises(ValidationError) as info:
        ReportParser(text=text).process()
    assert info.value.line == 2


def test_report_parser_rejects_missing_fields():
    text = 'format report/1\nsolution rank=1 level=company members=S1\n'
    with pytest.raises(FileFormatError) as info:
        ReportParser(text=text).process()
    assert 'unexplained' in str(info.value)


def test_report_parser_rejects_member_without_record():
    text = 'format report/1\nsolution rank=1 level=company members=S1 unexplained=-\n'
    with pytest.raises(ValidationError):
        ReportParser(text=text).process()
