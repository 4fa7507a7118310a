"""Quality checks on ranked solutions."""

from typing import Any, Dict, List, Sequence

import logging

from ..core.units import Solution, compare_solutions


class SolutionChecker:
    """Performs quality checks on the solutions of a run.

    Checks that members of a solution share no leaf observation, that no
    solution's member set is contained in another's, that the list is ranked
    and that every unit a member names is present in the solution tree.

    Example:
        >>> checker = SolutionChecker()
        >>> result = checker.check(solutions)
        >>> if not result['passed']:
        ...     print(result['issues'])
    """

    def __init__(self):
        """Initialize the solution checker."""
        self.logger = logging.getLogger(__name__)

    def check(self, solutions: Sequence[Solution]) -> Dict[str, Any]:
        """Run all checks.

        Args:
            solutions: Solutions in reported order.

        Returns:
            Dictionary with check results:
                - passed: Boolean indicating if all checks passed
                - issues: List of issue descriptions
                - warnings: List of warning messages
                - checks_run: List of check names that were executed
                - summary: Counts
        """
        issues: List[str] = []
        warnings: List[str] = []
        checks_run: List[str] = []

        for name, check in (
            ('conflict_free', self._check_conflict_free),
            ('non_subsumption', self._check_non_subsumption),
            ('ranking', self._check_ranking),
            ('tree', self._check_tree),
        ):
            result = check(solutions)
            checks_run.append(name)
            issues.extend(result['issues'])

        unexplained = self._check_unexplained(solutions)
        checks_run.append('unexplained')
        warnings.extend(unexplained['warnings'])

        passed = len(issues) == 0
        result = {
            'passed': passed,
            'issues': issues,
            'warnings': warnings,
            'checks_run': checks_run,
            'summary': {
                'solutions': len(solutions),
                'members': sum(len(s.members) for s in solutions),
                'issues_found': len(issues),
                'warnings_found': len(warnings),
            }
        }

        if passed:
            self.logger.info("All solution checks passed")
        else:
            self.logger.warning(f"Solution checks failed with {len(issues)} issues")

        return result

    def _check_conflict_free(self, solutions: Sequence[Solution]) -> Dict[str, Any]:
        issues = []
        for rank, solution in enumerate(solutions, start=1):
            seen: Dict[str, str] = {}
            for unit in solution.members:
                for leaf in sorted(unit.leaves):
                    if leaf in seen:
                        issues.append(
                            f"Solution {rank}: {unit.id} and {seen[leaf]} share observation {leaf}"
                        )
                    else:
                        seen[leaf] = unit.id
        return {'issues': issues}

    def _check_non_subsumption(self, solutions: Sequence[Solution]) -> Dict[str, Any]:
        issues = []
        for i, first in enumerate(solutions, start=1):
            for j, second in enumerate(solutions, start=1):
                if i != j and first.member_ids <= second.member_ids:
                    issues.append(f"Solution {i} is contained in solution {j}")
        return {'issues': issues}

    def _check_ranking(self, solutions: Sequence[Solution]) -> Dict[str, Any]:
        issues = []
        for rank, (first, second) in enumerate(zip(solutions, solutions[1:]), start=1):
            if compare_solutions(first, second) > 0:
                issues.append(f"Solution {rank + 1} should rank before solution {rank}")
        return {'issues': issues}

    def _check_tree(self, solutions: Sequence[Solution]) -> Dict[str, Any]:
        issues = []
        for rank, solution in enumerate(solutions, start=1):
            known = {u.id for u in solution.units}
            for unit in solution.members + solution.unexplained:
                if unit.id not in known:
                    issues.append(f"Solution {rank}: {unit.id} has no unit record")
            for unit in solution.units:
                missing = [s for s in unit.sub_units if s not in known]
                if missing:
                    issues.append(f"Solution {rank}: {unit.id} names unknown sub-units {missing}")
        return {'issues': issues}

    def _check_unexplained(self, solutions: Sequence[Solution]) -> Dict[str, Any]:
        warnings = []
        for rank, solution in enumerate(solutions, start=1):
            if solution.unexplained:
                ids = ', '.join(u.id for u in solution.unexplained)
                warnings.append(f"Solution {rank} leaves units unexplained: {ids}")
        return {'warnings': warnings}
