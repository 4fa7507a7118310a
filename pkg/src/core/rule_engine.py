"""Forward-chaining production rules coupled to a possibilistic ATMS.

Rules match working-memory elements with first-order patterns and run a
match-select-act cycle, but their actions never modify or delete elements.
A firing instead creates truth maintenance nodes (facts, assumptions, derived
nodes) with new elements backed by them, and installs weighted justifications
from the nodes of the matched elements. Belief status is left entirely to the
:class:`~src.core.atms.PiATMS` the working memory is bound to.

Example:
    >>> atms = PiATMS()
    >>> rules = Rulebase('companies')
    >>> _ = rules.define_rule(Rule(
    ...     name='pair',
    ...     conditions=(Pattern.of('section', axis=Var('a'), alias='s1'),
    ...                 Pattern.of('section', axis=Var('a'), alias='s2')),
    ...     symmetric=((0, 1),),
    ...     action=Action.of(lambda ctx: ctx.derive('pair', axis=ctx['a'])),
    ... ))
    >>> wm = WorkingMemory('wm1', atms, rules)
    >>> _ = wm.assert_fact(Element.of('section', axis='A1', name='x'), Weight('0.9'))
    >>> _ = wm.assert_fact(Element.of('section', axis='A1', name='y'), Weight('0.8'))
    >>> len(wm.run_to_quiescence().firings)
    1
"""

from dataclasses import dataclass, field
from itertools import count
from typing import (
    Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence,
    Set, Tuple, Union
)
import heapq
import logging
import operator

from .atms import NodeId, JustificationId, PiATMS, UnknownNodeError
from .weights import Weight
from ..config import ENGINE_CONFIG


class RuleEngineError(Exception):
    """Base exception for rule engine errors."""
    pass


class RuleDefinitionError(RuleEngineError):
    """Raised when a rule is malformed."""
    pass


class FiringLimitError(RuleEngineError):
    """Raised when a run exceeds the configured number of firings."""
    pass


class DanglingNodeError(RuleEngineError):
    """Raised when an element is asserted with a node the engine lacks."""
    pass


COMPARATORS: Dict[str, Callable[[Any, Any], bool]] = {
    '==': operator.eq,
    '!=': operator.ne,
    '<': operator.lt,
    '<=': operator.le,
    '>': operator.gt,
    '>=': operator.ge,
}


@dataclass(frozen=True)
class Var:
    """A pattern variable, written ``?name`` in rule files."""

    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class Element:
    """Working-memory content: a kind plus sorted attribute pairs."""

    kind: str
    attributes: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def of(cls, kind: str, **attributes: Any) -> 'Element':
        return cls(kind, tuple(sorted(attributes.items())))

    def get(self, attribute: str, default: Any = None) -> Any:
        for name, value in self.attributes:
            if name == attribute:
                return value
        return default

    def has(self, attribute: str) -> bool:
        return any(name == attribute for name, _ in self.attributes)

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.attributes)

    def __str__(self) -> str:
        body = ' '.join(f"{k}={v}" for k, v in self.attributes)
        return f"{self.kind}({body})"


@dataclass(frozen=True)
class ElementHandle:
    """An asserted element and the truth maintenance node backing it.

    ``support`` is the derived node linking a hypothesis to the elements that
    instantiated it, when the element was created by :meth:`FiringContext.assume`.
    """

    id: int
    element: Element
    node: NodeId
    memory: str
    support: Optional[NodeId] = None

    def __getitem__(self, attribute: str) -> Any:
        return self.element.get(attribute)


@dataclass(frozen=True)
class Test:
    """One attribute test of a pattern: ``attribute op operand``."""

    attribute: str
    op: str
    operand: Any

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise RuleDefinitionError(f"Unknown comparison '{self.op}'")

    @property
    def binds(self) -> bool:
        return self.op == '==' and isinstance(self.operand, Var)


@dataclass(frozen=True)
class Pattern:
    """A condition element: kind selector plus attribute tests."""

    kind: str
    tests: Tuple[Test, ...] = ()
    alias: Optional[str] = None

    @classmethod
    def of(cls, kind: str, alias: Optional[str] = None, **equalities: Any) -> 'Pattern':
        """Pattern whose keyword tests are equalities (constants or :class:`Var`)."""
        tests = tuple(Test(attr, '==', value) for attr, value in sorted(equalities.items()))
        return cls(kind, tests, alias)

    def where(self, attribute: str, op: str, operand: Any) -> 'Pattern':
        """Copy of the pattern with one more test."""
        return Pattern(self.kind, self.tests + (Test(attribute, op, operand),), self.alias)

    def bound_variables(self) -> Set[str]:
        names = {t.operand.name for t in self.tests if t.binds}
        if self.alias:
            names.add(self.alias)
        return names

    def used_variables(self) -> Set[str]:
        return {t.operand.name for t in self.tests if isinstance(t.operand, Var) and not t.binds}

    def admits(self, element: Element) -> bool:
        """Constant tests only; variable tests are checked during the join."""
        if element.kind != self.kind:
            return False
        for test in self.tests:
            if isinstance(test.operand, Var):
                if not element.has(test.attribute):
                    return False
                continue
            if not element.has(test.attribute):
                return False
            try:
                if not COMPARATORS[test.op](element.get(test.attribute), test.operand):
                    return False
            except TypeError:
                return False
        return True


@dataclass(frozen=True)
class Guard:
    """Boolean test over a complete binding."""

    test: Callable[[Mapping[str, Any]], bool]
    variables: FrozenSet[str] = frozenset()
    source: str = '<python>'

    def __call__(self, bindings: Mapping[str, Any]) -> bool:
        return bool(self.test(bindings))


@dataclass(frozen=True)
class Action:
    """Right-hand side of a rule; runs with a :class:`FiringContext`."""

    perform: Callable[['FiringContext'], None]
    variables: FrozenSet[str] = frozenset()
    source: str = '<python>'

    @classmethod
    def of(cls, perform: Callable[['FiringContext'], None], *variables: str) -> 'Action':
        return cls(perform, frozenset(variables))

    @classmethod
    def sequence(cls, actions: Sequence['Action'], source: str = '<sequence>') -> 'Action':
        def perform(ctx: 'FiringContext') -> None:
            for action in actions:
                action.perform(ctx)
        variables = frozenset().union(*(a.variables for a in actions)) if actions else frozenset()
        return cls(perform, variables, source)


@dataclass(frozen=True)
class Rule:
    """A production rule.

    Attributes:
        name: Unique name within its rulebase.
        conditions: Patterns joined in order.
        action: What a firing emits.
        weight: Weight of the justifications the firing installs.
        priority: Higher fires first.
        guard: Optional test over the complete binding.
        symmetric: Groups of condition indexes whose matched elements must
            have strictly increasing element ids (one firing per combination).
    """

    name: str
    conditions: Tuple[Pattern, ...]
    action: Action
    weight: Weight = field(default_factory=Weight.one)
    priority: int = 0
    guard: Optional[Guard] = None
    symmetric: Tuple[Tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class RuleHandle:
    rulebase: str
    index: int
    name: str


class Rulebase:
    """An ordered collection of rules (a knowledge source)."""

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(__name__)
        self._rules: List[Rule] = []

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return tuple(self._rules)

    def define_rule(self, rule: Rule) -> RuleHandle:
        """Register a rule after checking it is well formed.

        Raises:
            RuleDefinitionError: On duplicate names, empty condition lists,
                bad symmetry groups or variables used but never bound.
        """
        if any(r.name == rule.name for r in self._rules):
            raise RuleDefinitionError(f"Duplicate rule name '{rule.name}' in {self.name}")
        if not rule.conditions:
            raise RuleDefinitionError(f"Rule '{rule.name}' has no conditions")

        bound: Set[str] = set()
        used: Set[str] = set()
        for pattern in rule.conditions:
            bound |= pattern.bound_variables()
            used |= pattern.used_variables()
        if rule.guard is not None:
            used |= set(rule.guard.variables)
        used |= set(rule.action.variables)
        unbound = used - bound
        if unbound:
            names = ', '.join(f"?{v}" for v in sorted(unbound))
            raise RuleDefinitionError(f"Rule '{rule.name}' uses unbound variables: {names}")

        seen: Set[int] = set()
        for group in rule.symmetric:
            if len(group) < 2 or list(group) != sorted(set(group)):
                raise RuleDefinitionError(
                    f"Rule '{rule.name}': symmetry group {group} must list increasing indexes"
                )
            if seen & set(group) or not all(0 <= i < len(rule.conditions) for i in group):
                raise RuleDefinitionError(f"Rule '{rule.name}': bad symmetry group {group}")
            seen |= set(group)

        self._rules.append(rule)
        self.logger.debug(f"Defined rule '{rule.name}' in {self.name}")
        return RuleHandle(self.name, len(self._rules) - 1, rule.name)

    def __len__(self) -> int:
        return len(self._rules)


def define_rule(rulebase: Rulebase, rule: Rule) -> RuleHandle:
    """Register ``rule`` in ``rulebase``."""
    return rulebase.define_rule(rule)


@dataclass
class Firing:
    """One rule firing and what it emitted."""

    rule: str
    elements: Tuple[int, ...]
    nodes: List[NodeId] = field(default_factory=list)
    justifications: List[JustificationId] = field(default_factory=list)
    created: List[int] = field(default_factory=list)


@dataclass
class FiringReport:
    memory: str
    firings: List[Firing] = field(default_factory=list)

    def count(self, rule: Optional[str] = None) -> int:
        if rule is None:
            return len(self.firings)
        return sum(1 for f in self.firings if f.rule == rule)


class FiringContext:
    """What an action sees and may emit during one firing."""

    def __init__(
        self,
        memory: 'WorkingMemory',
        rule: Rule,
        matched: Tuple[ElementHandle, ...],
        bindings: Mapping[str, Any],
        firing: Firing
    ):
        self.memory = memory
        self.rule = rule
        self.matched = matched
        self.bindings = dict(bindings)
        self._firing = firing

    def __getitem__(self, name: str) -> Any:
        return self.bindings[name]

    @property
    def weight(self) -> Weight:
        return self.rule.weight

    @property
    def atms(self) -> PiATMS:
        return self.memory.atms

    @property
    def antecedents(self) -> FrozenSet[NodeId]:
        return frozenset(h.node for h in self.matched)

    def _justify(self, antecedents: Iterable[NodeId], consequent: Optional[NodeId], weight: Weight) -> JustificationId:
        justification = self.atms.add_justification(antecedents, consequent, weight)
        self._firing.justifications.append(justification)
        return justification

    def _insert(self, element: Element, node: NodeId, support: Optional[NodeId] = None) -> ElementHandle:
        handle = self.memory._insert(element, node, support)
        self._firing.created.append(handle.id)
        return handle

    def assume(self, kind: str, weight: Optional[Weight] = None, **attributes: Any) -> ElementHandle:
        """Create a hypothesis element backed by a new assumption.

        A derived support node is justified by the matched elements together
        with the assumption, at the rule weight.
        """
        element = Element.of(kind, **attributes)
        existing = self.memory.lookup(element)
        if existing is not None:
            return existing
        assumption = self.atms.add_assumption(weight or self.weight, datum=element)
        support = self.atms.add_node(datum=('support', element))
        self._firing.nodes.extend([assumption, support])
        self._justify(self.antecedents | {assumption}, support, self.weight)
        return self._insert(element, assumption, support)

    def derive(self, kind: str, weight: Optional[Weight] = None, **attributes: Any) -> ElementHandle:
        """Create (or further support) a derived element from the matched ones."""
        element = Element.of(kind, **attributes)
        existing = self.memory.lookup(element)
        if existing is not None:
            if existing.node not in self.antecedents:
                self._justify(self.antecedents, existing.node, weight or self.weight)
            return existing
        node = self.atms.add_node(datum=element)
        self._firing.nodes.append(node)
        self._justify(self.antecedents, node, weight or self.weight)
        return self._insert(element, node)

    def fact(self, kind: str, weight: Optional[Weight] = None, **attributes: Any) -> ElementHandle:
        """Create a new uncertain fact element."""
        element = Element.of(kind, **attributes)
        existing = self.memory.lookup(element)
        if existing is not None:
            return existing
        node = self.atms.add_fact(weight or self.weight, datum=element)
        self._firing.nodes.append(node)
        return self._insert(element, node)

    def contradiction(
        self,
        weight: Optional[Weight] = None,
        among: Optional[Iterable[ElementHandle]] = None
    ) -> JustificationId:
        """Justify the contradiction from the matched (or given) elements."""
        handles = self.matched if among is None else tuple(among)
        return self._justify({h.node for h in handles}, None, weight or self.weight)

    def justify(
        self,
        antecedents: Iterable[ElementHandle],
        consequent: ElementHandle,
        weight: Optional[Weight] = None
    ) -> JustificationId:
        """Install a justification between existing elements."""
        return self._justify({h.node for h in antecedents}, consequent.node, weight or self.weight)


@dataclass(order=True)
class _Activation:
    key: Tuple[int, int, Tuple[int, ...]]
    rule_index: int = field(compare=False)
    handles: Tuple[ElementHandle, ...] = field(compare=False)
    bindings: Dict[str, Any] = field(compare=False)


class WorkingMemory:
    """A private working memory: an element namespace with its own rulebase.

    Args:
        name: Namespace name, used in handles and logs.
        atms: Truth maintenance engine the memory emits into.
        rulebase: Rules matched against this memory.
        max_firings: Firing cap for one run (default from ``ENGINE_CONFIG``).
    """

    def __init__(
        self,
        name: str,
        atms: PiATMS,
        rulebase: Optional[Rulebase] = None,
        max_firings: Optional[int] = None
    ):
        self.name = name
        self.atms = atms
        self.rulebase = rulebase if rulebase is not None else Rulebase(f"{name}-rules")
        self.max_firings = ENGINE_CONFIG['max_firings'] if max_firings is None else max_firings
        self.logger = logging.getLogger(__name__)
        self._ids = count(1)
        self._handles: Dict[int, ElementHandle] = {}
        self._by_content: Dict[Element, int] = {}
        self._fired: Set[Tuple[int, Tuple[int, ...]]] = set()
        self._agenda: List[_Activation] = []
        self._matched_upto = 0
        self._rules_seen = 0

    # ------------------------------------------------------------------
    # elements

    def lookup(self, element: Element) -> Optional[ElementHandle]:
        element_id = self._by_content.get(element)
        return None if element_id is None else self._handles[element_id]

    def _insert(self, element: Element, node: NodeId, support: Optional[NodeId] = None) -> ElementHandle:
        handle = ElementHandle(next(self._ids), element, node, self.name, support)
        self._handles[handle.id] = handle
        self._by_content[element] = handle.id
        return handle

    def assert_element(self, element: Element, node: NodeId) -> ElementHandle:
        """Make ``element`` visible to matching, backed by ``node``.

        Asserting the same content twice returns the first handle.

        Raises:
            DanglingNodeError: If ``node`` is not a node of the bound engine.
        """
        existing = self.lookup(element)
        if existing is not None:
            return existing
        try:
            self.atms.node(node)
        except UnknownNodeError as e:
            raise DanglingNodeError(f"[{self.name}] {e}") from None
        return self._insert(element, node)

    def assert_fact(self, element: Element, weight: Weight) -> ElementHandle:
        """Create a fact node and assert ``element`` backed by it."""
        existing = self.lookup(element)
        if existing is not None:
            return existing
        return self._insert(element, self.atms.add_fact(weight, datum=element))

    def assert_assumption(self, element: Element, weight: Weight) -> ElementHandle:
        """Create an assumption node and assert ``element`` backed by it."""
        existing = self.lookup(element)
        if existing is not None:
            return existing
        return self._insert(element, self.atms.add_assumption(weight, datum=element))

    def elements(self, kind: Optional[str] = None) -> List[ElementHandle]:
        return [
            h for _, h in sorted(self._handles.items())
            if kind is None or h.element.kind == kind
        ]

    def handle(self, element_id: int) -> ElementHandle:
        return self._handles[element_id]

    def __len__(self) -> int:
        return len(self._handles)

    # ------------------------------------------------------------------
    # matching

    def _join(
        self,
        rule: Rule,
        pools: Sequence[Sequence[ElementHandle]]
    ) -> Iterable[Tuple[Tuple[ElementHandle, ...], Dict[str, Any]]]:
        predecessor: Dict[int, int] = {}
        for group in rule.symmetric:
            for before, after in zip(group, group[1:]):
                predecessor[after] = before

        def extend(position: int, chosen: List[ElementHandle], bindings: Dict[str, Any], pending: List[Tuple[Any, str, str]]):
            if position == len(rule.conditions):
                if pending:
                    return
                if rule.guard is not None:
                    try:
                        if not rule.guard(bindings):
                            return
                    except (TypeError, ValueError, ZeroDivisionError) as e:
                        self.logger.debug(f"Guard of '{rule.name}' failed on {bindings}: {e}")
                        return
                yield tuple(chosen), bindings
                return
            pattern = rule.conditions[position]
            before = predecessor.get(position)
            for handle in pools[position]:
                if before is not None and handle.id <= chosen[before].id:
                    continue
                if any(h.id == handle.id for h in chosen):
                    continue
                extended = self._bind(pattern, handle, bindings, pending)
                if extended is None:
                    continue
                new_bindings, new_pending = extended
                chosen.append(handle)
                yield from extend(position + 1, chosen, new_bindings, new_pending)
                chosen.pop()

        yield from extend(0, [], {}, [])

    @staticmethod
    def _bind(
        pattern: Pattern,
        handle: ElementHandle,
        bindings: Dict[str, Any],
        pending: List[Tuple[Any, str, str]]
    ) -> Optional[Tuple[Dict[str, Any], List[Tuple[Any, str, str]]]]:
        element = handle.element
        result = dict(bindings)
        waiting = list(pending)
        if pattern.alias:
            if pattern.alias in result and result[pattern.alias] != handle:
                return None
            result[pattern.alias] = handle
        for test in pattern.tests:
            if not isinstance(test.operand, Var):
                continue
            value = element.get(test.attribute)
            name = test.operand.name
            if test.binds and name not in result:
                result[name] = value
            elif name in result:
                try:
                    if not COMPARATORS[test.op](value, result[name]):
                        return None
                except TypeError:
                    return None
            else:
                waiting.append((value, test.op, name))
        still = []
        for value, op, name in waiting:
            if name not in result:
                still.append((value, op, name))
                continue
            try:
                if not COMPARATORS[op](value, result[name]):
                    return None
            except TypeError:
                return None
        return result, still

    def _candidates(self, pattern: Pattern, handles: Iterable[ElementHandle]) -> List[ElementHandle]:
        return [h for h in handles if pattern.admits(h.element)]

    def _collect_activations(self) -> None:
        """Add activations that involve elements asserted since the last call.

        Semi-naive join: for each condition position ``p`` the delta feeds
        position ``p``, older elements feed earlier positions and all elements
        feed later ones, so every new match is found exactly once.
        """
        rules = self.rulebase.rules
        all_handles = self.elements()
        old = [h for h in all_handles if h.id <= self._matched_upto]
        delta = [h for h in all_handles if h.id > self._matched_upto]
        newly_defined = range(self._rules_seen, len(rules))
        for rule_index, rule in enumerate(rules):
            if rule_index in newly_defined:
                pools = [self._candidates(p, all_handles) for p in rule.conditions]
                self._push_matches(rule_index, rule, pools)
                continue
            if not delta:
                continue
            old_pools = [self._candidates(p, old) for p in rule.conditions]
            delta_pools = [self._candidates(p, delta) for p in rule.conditions]
            all_pools = [o + d for o, d in zip(old_pools, delta_pools)]
            for p in range(len(rule.conditions)):
                if not delta_pools[p]:
                    continue
                pools = old_pools[:p] + [delta_pools[p]] + all_pools[p + 1:]
                self._push_matches(rule_index, rule, pools)
        self._rules_seen = len(rules)
        if all_handles:
            self._matched_upto = all_handles[-1].id

    def _push_matches(self, rule_index: int, rule: Rule, pools: Sequence[Sequence[ElementHandle]]) -> None:
        for handles, bindings in self._join(rule, pools):
            ids = tuple(h.id for h in handles)
            if (rule_index, ids) in self._fired:
                continue
            heapq.heappush(
                self._agenda,
                _Activation((-rule.priority, rule_index, ids), rule_index, handles, bindings)
            )

    def conflict_set(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """Pending activations in firing order, as (rule name, element ids)."""
        self._collect_activations()
        rules = self.rulebase.rules
        return [(rules[a.rule_index].name, a.key[2]) for a in sorted(self._agenda)]

    def run_to_quiescence(self) -> FiringReport:
        """Match, select and fire until no activation remains.

        Conflict resolution: priority (descending), rule definition order,
        then matched element ids. A rule never fires twice on the same
        element tuple.

        Raises:
            FiringLimitError: If more than ``max_firings`` firings occur.
        """
        report = FiringReport(self.name)
        rules = self.rulebase.rules
        self._collect_activations()
        while self._agenda:
            activation = heapq.heappop(self._agenda)
            ids = activation.key[2]
            if (activation.rule_index, ids) in self._fired:
                continue
            if len(report.firings) >= self.max_firings:
                counts: Dict[str, int] = {}
                for firing in report.firings:
                    counts[firing.rule] = counts.get(firing.rule, 0) + 1
                raise FiringLimitError(
                    f"[{self.name}] stopped after {self.max_firings} firings; "
                    f"firings per rule: {counts}"
                )
            self._fired.add((activation.rule_index, ids))
            rule = rules[activation.rule_index]
            firing = Firing(rule.name, ids)
            rule.action.perform(FiringContext(self, rule, activation.handles, activation.bindings, firing))
            report.firings.append(firing)
            self.logger.debug(f"[{self.name}] fired {rule.name} on {ids}")
            if firing.created:
                self._collect_activations()
        self.logger.debug(f"[{self.name}] quiescent after {len(report.firings)} firings")
        return report

    def __repr__(self) -> str:
        return f"WorkingMemory(name='{self.name}', elements={len(self._handles)}, rules={len(self.rulebase)})"
