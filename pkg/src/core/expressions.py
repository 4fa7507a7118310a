"""Restricted expressions for rule guards and action values.

Guards and computed attribute values in rule files are written in Python
expression syntax with ``?name`` variables::

    span(?a, ?b, ?c) <= 60 and distinct(?a.axes, ?b.axes, ?c.axes) <= 1

The text is parsed with :mod:`ast` and evaluated by a small interpreter that
accepts only literals, variables, attribute reads on matched elements,
comparisons, boolean and arithmetic operators and a fixed set of functions.
Nothing is passed to ``eval``.
"""

from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Callable, Dict, FrozenSet, Iterable, Mapping
import ast
import operator
import re

from .rule_engine import Element, ElementHandle, Guard, RuleDefinitionError
from .weights import Weight


class ExpressionError(RuleDefinitionError):
    """Raised when an expression is malformed or uses a forbidden construct."""
    pass


_VARIABLE = re.compile(r'\?([A-Za-z_][A-Za-z0-9_]*)')
_PREFIX = '__v_'


def _value_of(item: Any, attribute: str) -> Any:
    if isinstance(item, (ElementHandle, Element)):
        value = item[attribute] if isinstance(item, ElementHandle) else item.get(attribute)
    else:
        value = getattr(item, attribute)
    return _numeric(value)


def _numeric(value: Any) -> Any:
    if isinstance(value, Weight):
        return value.value
    if isinstance(value, float):
        return Decimal(repr(value))
    return value


def _flatten(values: Iterable[Any]) -> list:
    flat = []
    for value in values:
        if isinstance(value, (set, frozenset, tuple, list)):
            flat.extend(value)
        else:
            flat.append(value)
    return flat


def _span(*items: Any) -> Any:
    """Width of the hull of the ``start``/``end`` intervals of ``items``."""
    if not items:
        raise ValueError("span() needs at least one element")
    return max(_value_of(i, 'end') for i in items) - min(_value_of(i, 'start') for i in items)


def _leaves(item: Any) -> FrozenSet[Any]:
    if isinstance(item, (set, frozenset, tuple, list)):
        return frozenset(item)
    return frozenset(_value_of(item, 'leaves'))


def _overlaps(first: Any, second: Any) -> bool:
    return bool(_leaves(first) & _leaves(second))


def _union(*values: Any) -> FrozenSet[Any]:
    return frozenset(_flatten(values))


FUNCTIONS: Dict[str, Callable[..., Any]] = {
    'span': _span,
    'count': lambda *items: len(items),
    'distinct': lambda *values: len(set(_flatten(values))),
    'min': lambda *values: min(_numeric(v) for v in _flatten(values)),
    'max': lambda *values: max(_numeric(v) for v in _flatten(values)),
    'abs': abs,
    'len': len,
    'overlaps': _overlaps,
    'union': _union,
}


def _decimal(value: Any) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"Cannot divide {type(value).__name__} values")
    return Decimal(value)


def _divide(left: Any, right: Any) -> Decimal:
    """Quotient of two numbers as a Decimal."""
    numerator, denominator = _decimal(left), _decimal(right)
    if not denominator:
        raise ZeroDivisionError("division by zero")
    return numerator / denominator


_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: _divide,
    ast.Mod: operator.mod,
}

_COMPARE = {
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.In: lambda a, b: a in b,
    ast.NotIn: lambda a, b: a not in b,
}


@dataclass(frozen=True)
class CompiledExpression:
    """A parsed expression ready to evaluate against a binding."""

    source: str
    tree: ast.Expression
    variables: FrozenSet[str]

    def __call__(self, bindings: Mapping[str, Any]) -> Any:
        return _evaluate(self.tree.body, bindings, self.source)


def _evaluate(node: ast.AST, bindings: Mapping[str, Any], source: str) -> Any:
    if isinstance(node, ast.Constant):
        return _numeric(node.value)
    if isinstance(node, ast.Name):
        if not node.id.startswith(_PREFIX):
            raise ExpressionError(f"Function '{node.id}' used as a value in '{source}'")
        name = node.id[len(_PREFIX):]
        try:
            return bindings[name]
        except KeyError:
            raise ExpressionError(f"Unbound variable ?{name} in '{source}'") from None
    if isinstance(node, ast.Attribute):
        return _value_of(_evaluate(node.value, bindings, source), node.attr)
    if isinstance(node, (ast.Tuple, ast.List)):
        return tuple(_evaluate(e, bindings, source) for e in node.elts)
    if isinstance(node, ast.BoolOp):
        if isinstance(node.op, ast.And):
            return all(_evaluate(v, bindings, source) for v in node.values)
        return any(_evaluate(v, bindings, source) for v in node.values)
    if isinstance(node, ast.UnaryOp):
        operand = _evaluate(node.operand, bindings, source)
        return (not operand) if isinstance(node.op, ast.Not) else -operand
    if isinstance(node, ast.BinOp):
        return _BINARY[type(node.op)](
            _numeric(_evaluate(node.left, bindings, source)),
            _numeric(_evaluate(node.right, bindings, source)),
        )
    if isinstance(node, ast.Compare):
        left = _numeric(_evaluate(node.left, bindings, source))
        for op, comparator in zip(node.ops, node.comparators):
            right = _numeric(_evaluate(comparator, bindings, source))
            if not _COMPARE[type(op)](left, right):
                return False
            left = right
        return True
    if isinstance(node, ast.Call):
        arguments = [_evaluate(a, bindings, source) for a in node.args]
        return FUNCTIONS[node.func.id](*arguments)
    raise ExpressionError(f"Cannot evaluate {type(node).__name__} in '{source}'")


def _check(node: ast.AST, source: str) -> None:
    for child in ast.walk(node):
        if isinstance(child, ast.Call):
            if not isinstance(child.func, ast.Name) or child.func.id not in FUNCTIONS:
                raise ExpressionError(f"Unknown function in '{source}'")
            if child.keywords:
                raise ExpressionError(f"Keyword arguments are not allowed in '{source}'")
        elif isinstance(child, ast.Name):
            if not child.id.startswith(_PREFIX) and child.id not in FUNCTIONS:
                raise ExpressionError(
                    f"Bare name '{child.id}' in '{source}'; variables are written ?name"
                )
        elif isinstance(child, ast.Constant):
            if not isinstance(child.value, (int, float, str, bool)):
                raise ExpressionError(f"Unsupported literal {child.value!r} in '{source}'")
        elif isinstance(child, ast.BinOp):
            if type(child.op) not in _BINARY:
                raise ExpressionError(f"Unsupported operator in '{source}'")
        elif isinstance(child, ast.Compare):
            if any(type(op) not in _COMPARE for op in child.ops):
                raise ExpressionError(f"Unsupported comparison in '{source}'")
        elif isinstance(child, ast.UnaryOp):
            if not isinstance(child.op, (ast.Not, ast.USub)):
                raise ExpressionError(f"Unsupported unary operator in '{source}'")
        elif isinstance(child, ast.Attribute):
            if child.attr.startswith('_'):
                raise ExpressionError(f"Private attribute access in '{source}'")
        elif not isinstance(child, (
            ast.Expression, ast.BoolOp, ast.And, ast.Or, ast.Load, ast.Tuple, ast.List,
            ast.operator, ast.cmpop, ast.unaryop,
        )):
            raise ExpressionError(f"Unsupported syntax {type(child).__name__} in '{source}'")


def compile_expression(text: str) -> CompiledExpression:
    """Parse ``text`` into a :class:`CompiledExpression`.

    Raises:
        ExpressionError: On syntax errors or forbidden constructs.
    """
    source = text.strip()
    if not source:
        raise ExpressionError("Empty expression")
    variables = frozenset(_VARIABLE.findall(source))
    rewritten = _VARIABLE.sub(lambda m: _PREFIX + m.group(1), source)
    try:
        tree = ast.parse(rewritten, mode='eval')
    except SyntaxError as e:
        raise ExpressionError(f"Invalid expression '{source}': {e.msg}") from None
    _check(tree, source)
    return CompiledExpression(source, tree, variables)


def compile_guard(text: str) -> Guard:
    """Compile a boolean guard over ``?variables``."""
    expression = compile_expression(text)
    return Guard(lambda bindings: bool(expression(bindings)), expression.variables, expression.source)


def compile_value(text: str) -> CompiledExpression:
    """Compile an attribute value expression for a rule action."""
    return compile_expression(text)
