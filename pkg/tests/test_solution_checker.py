"""Tests for solution quality checks."""

from src.core.units import Solution, Unit
from src.core.weights import Weight
from src.processors.solution_checker import SolutionChecker
from tests.conftest import section


S1, S2, S3, S4 = (section(f"S{i}", t) for i, t in enumerate((0, 10, 20, 65), start=1))


def company(subs, certainty='0.6667'):
    return Unit.aggregate('company', 'tank', subs, Weight(certainty), complete=True, template='tank_company')


def solution(members, unexplained=(), extra=()):
    units = set(members) | set(unexplained) | set(extra)
    for unit in list(units):
        units |= {u for u in (S1, S2, S3, S4) if u.id in unit.sub_units}
    return Solution('company', tuple(members), tuple(unexplained), tuple(units))


def test_good_solutions_pass():
    first = solution([company([S1, S2, S3]), S4])
    second = solution([company([S2, S3, S4], '0.3333'), S1])
    result = SolutionChecker().check([first, second])
    assert result['passed'], result['issues']
    assert result['checks_run'] == ['conflict_free', 'non_subsumption', 'ranking', 'tree', 'unexplained']
    assert result['summary']['solutions'] == 2
    assert result['summary']['members'] == 4


def test_shared_leaf_is_an_issue():
    bad = solution([company([S1, S2, S3]), company([S2, S3, S4], '0.3333')])
    result = SolutionChecker().check([bad])
    assert not result['passed']
    assert any('share observation S2' in issue for issue in result['issues'])


def test_subsumed_solution_is_an_issue():
    big = solution([company([S1, S2, S3]), S4])
    small = solution([company([S1, S2, S3])])
    result = SolutionChecker().check([big, small])
    assert 'Solution 2 is contained in solution 1' in result['issues']


def test_equal_member_sets_are_an_issue():
    one = solution([S1, S2])
    result = SolutionChecker().check([one, one])
    assert not result['passed']


def test_bad_ranking_is_an_issue():
    first = solution([company([S2, S3, S4], '0.3333'), S1])
    second = solution([company([S1, S2, S3]), S4])
    result = SolutionChecker().check([first, second])
    assert 'Solution 2 should rank before solution 1' in result['issues']


def test_missing_sub_unit_record_is_an_issue():
    hypothesis = company([S1, S2, S3])
    broken = Solution('company', (hypothesis,), (), (hypothesis, S1, S2))
    result = SolutionChecker().check([broken])
    assert any('names unknown sub-units' in issue and 'S3' in issue for issue in result['issues'])


def test_unexplained_units_are_warnings():
    result = SolutionChecker().check([solution([company([S1, S2, S3])], unexplained=[S4])])
    assert result['passed']
    assert result['warnings'] == ['Solution 1 leaves units unexplained: S4']


def test_no_solutions_pass():
    result = SolutionChecker().check([])
    assert result['passed']
    assert result['summary']['issues_found'] == 0
