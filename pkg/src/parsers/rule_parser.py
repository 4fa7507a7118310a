"""Parser for declarative rule files.

Grammar (one rule per block, ``#`` starts a comment)::

    format rules/1
    rule <name>
      priority <int>                        # optional, default 0
      weight <weight>                       # optional, default 1
      when [?alias:] <kind> <test>...       # one line per condition
      symmetric ?alias ?alias...            # optional, repeatable
      guard <expression>                    # optional
      action <verb> [<kind>] [attr=<expr>...]   # repeatable
    end

A test is ``attribute<op>term`` with ``op`` one of ``= == != < <= > >=``;
``term`` is ``?variable``, a number or a bare word. ``=`` and ``==`` against
an unbound variable bind it. Action verbs are ``assume``, ``derive``, ``fact``
(all followed by a kind) and ``contradiction``. An action attribute named
``weight`` overrides the rule weight for that emission. Guard and attribute
expressions use the functions of :mod:`src.core.expressions`; attribute
expressions must not contain spaces and a bare word is a string constant.
"""

from decimal import Decimal, InvalidOperation
from typing import Any, Dict, List, Optional, Tuple
import re

from ..core.base_parser import BaseParser
from ..core.expressions import FUNCTIONS, ExpressionError, compile_guard, compile_value
from ..core.rule_engine import (
    Action, FiringContext, Pattern, Rule, RuleDefinitionError, Rulebase, Test, Var
)
from ..core.weights import Weight, WeightError


_TEST = re.compile(r'^([A-Za-z_][A-Za-z0-9_]*)(==|!=|<=|>=|=|<|>)(.+)$')
_ALIAS = re.compile(r'^\?([A-Za-z_][A-Za-z0-9_]*):$')
_VERBS = ('assume', 'derive', 'fact', 'contradiction')
_WORD = re.compile(r'^[A-Za-z_][A-Za-z0-9_-]*$')


def _term(text: str) -> Any:
    if text.startswith('?'):
        return Var(text[1:])
    if re.fullmatch(r'-?\d+', text):
        return int(text)
    try:
        value = Decimal(text)
    except InvalidOperation:
        return text
    if not value.is_finite():
        raise ValueError(f"'{text}' is not a finite number")
    return value


class RuleParser(BaseParser):
    """Parser for ``.rules`` files producing a :class:`Rulebase`.

    Example:
        >>> rulebase = RuleParser('data/rules/companies.rules').process()['data']
    """

    kind = 'rules'

    def _condition(self, text: str, line: int) -> Pattern:
        tokens = text.split()
        alias = None
        if tokens and _ALIAS.match(tokens[0]):
            alias = _ALIAS.match(tokens[0]).group(1)
            tokens = tokens[1:]
        if not tokens:
            raise self.error("Condition needs an element kind", line)
        kind, tests = tokens[0], []
        for token in tokens[1:]:
            match = _TEST.match(token)
            if not match:
                raise self.error(f"Invalid test '{token}'", line)
            attribute, op, term = match.groups()
            try:
                value = _term(term)
            except ValueError as e:
                raise self.error(f"Invalid test '{token}': {e}", line) from None
            tests.append(Test(attribute, '==' if op == '=' else op, value))
        return Pattern(kind, tuple(tests), alias)

    def _action(self, text: str, line: int) -> Action:
        tokens = text.split()
        if not tokens or tokens[0] not in _VERBS:
            raise self.error(f"Action verb must be one of: {', '.join(_VERBS)}", line)
        verb, rest = tokens[0], tokens[1:]
        kind = None
        if verb != 'contradiction':
            if not rest or '=' in rest[0]:
                raise self.error(f"'{verb}' needs an element kind", line)
            kind, rest = rest[0], rest[1:]

        values = {}
        for token in rest:
            name, sep, expression = token.partition('=')
            if not sep or not name or not expression:
                raise self.error(f"Expected attr=expression, got '{token}'", line)
            if _WORD.match(expression) and expression not in FUNCTIONS:
                # bare words are string constants, as in condition tests
                expression = repr(expression)
            try:
                values[name] = compile_value(expression)
            except ExpressionError as e:
                raise self.error(str(e), line) from None
        weight_expression = values.pop('weight', None)
        if verb == 'contradiction' and values:
            raise self.error("'contradiction' takes only a weight", line)

        variables = frozenset().union(*(v.variables for v in values.values())) if values else frozenset()
        if weight_expression is not None:
            variables |= weight_expression.variables

        def perform(ctx: FiringContext) -> None:
            weight = None
            if weight_expression is not None:
                weight = Weight(weight_expression(ctx.bindings))
            attributes = {name: value(ctx.bindings) for name, value in values.items()}
            if verb == 'contradiction':
                ctx.contradiction(weight)
            else:
                getattr(ctx, verb)(kind, weight=weight, **attributes)

        return Action(perform, variables, text)

    def _rule(self, name: str, body: List[Tuple[int, str]], start: int) -> Rule:
        conditions: List[Pattern] = []
        actions: List[Action] = []
        symmetric_aliases: List[Tuple[List[str], int]] = []
        guard = None
        priority = 0
        weight = Weight.one()
        for line, text in body:
            keyword, _, rest = text.partition(' ')
            rest = rest.strip()
            if keyword == 'priority':
                try:
                    priority = int(rest)
                except ValueError:
                    raise self.error(f"Invalid priority '{rest}'", line) from None
            elif keyword == 'weight':
                try:
                    weight = Weight(rest)
                except WeightError as e:
                    raise self.error(str(e), line) from None
            elif keyword == 'when':
                conditions.append(self._condition(rest, line))
            elif keyword == 'symmetric':
                aliases = rest.split()
                if any(not a.startswith('?') for a in aliases):
                    raise self.error("symmetric lists ?aliases", line)
                symmetric_aliases.append(([a[1:] for a in aliases], line))
            elif keyword == 'guard':
                if guard is not None:
                    raise self.error("A rule has at most one guard", line)
                try:
                    guard = compile_guard(rest)
                except ExpressionError as e:
                    raise self.error(str(e), line) from None
            elif keyword == 'action':
                actions.append(self._action(rest, line))
            else:
                raise self.error(f"Unknown rule line '{keyword}'", line)

        if not actions:
            raise self.error(f"Rule '{name}' has no action", start)
        positions = {p.alias: i for i, p in enumerate(conditions) if p.alias}
        groups = []
        for aliases, line in symmetric_aliases:
            unknown = [a for a in aliases if a not in positions]
            if unknown:
                raise self.error(f"Unknown alias ?{unknown[0]} in symmetric", line)
            groups.append(tuple(sorted(positions[a] for a in aliases)))
        action = actions[0] if len(actions) == 1 else Action.sequence(actions)
        return Rule(name, tuple(conditions), action, weight, priority, guard, tuple(groups))

    def parse(self) -> Dict[str, Any]:
        """Parse rule blocks into a rulebase.

        Returns:
            Dictionary with 'metadata' and 'data' (a :class:`Rulebase`).

        Raises:
            FileFormatError: On grammar errors or ill-formed rules, with the
                line number.
        """
        if not self.is_loaded:
            self.load()

        rulebase = Rulebase(self.file_path.stem if self.file_path else 'rules')
        block: Optional[Tuple[str, int, List[Tuple[int, str]]]] = None
        for line, text in self._body_lines():
            keyword, _, rest = text.partition(' ')
            if keyword == 'rule':
                if block is not None:
                    raise self.error(f"Rule '{block[0]}' is missing 'end'", line)
                if not rest.strip() or len(rest.split()) != 1:
                    raise self.error("Expected 'rule <name>'", line)
                block = (rest.strip(), line, [])
            elif keyword == 'end' and not rest:
                if block is None:
                    raise self.error("'end' without 'rule'", line)
                name, start, body = block
                try:
                    rulebase.define_rule(self._rule(name, body, start))
                except RuleDefinitionError as e:
                    raise self.error(str(e), start) from None
                block = None
            elif block is None:
                raise self.error(f"Unexpected '{keyword}' outside a rule block", line)
            else:
                block[2].append((line, text))
        if block is not None:
            raise self.error(f"Rule '{block[0]}' is missing 'end'", block[1])

        self._data = rulebase
        self.metadata.update({
            'data_type': 'rules',
            'rule_count': len(rulebase),
            'rules': [r.name for r in rulebase.rules],
        })
        self._is_parsed = True
        self.logger.info(f"Parsed {len(rulebase)} rules from {self.source}")
        return {'metadata': self.metadata, 'data': self.data}

    def validate(self, data: Optional[Rulebase] = None) -> bool:
        """Validate the rulebase (rules are checked as they are defined).

        Raises:
            ValidationError: If the file defines no rule.
        """
        if data is None:
            data = self.data
        if data is None or not len(data):
            raise self.invalid("Rule file defines no rules")
        self._is_validated = True
        return True
