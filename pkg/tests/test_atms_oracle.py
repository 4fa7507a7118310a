"""Truth maintenance results checked against the brute-force oracle."""

import random
from itertools import chain, combinations, permutations

import pytest

from src.core.atms import PiATMS
from src.core.oracle import necessity_profile
from src.core.weights import Weight, strictly_below


GRID = [Weight.from_units(u) for u in range(1000, 10001, 1000)]


def subsets(items):
    items = sorted(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))]


def random_instance(rng, max_assumptions=6, max_justifications=8):
    """A random Horn system as ``(assumption weights, fact weights, derived count, justifications)``.

    Justifications are ``(antecedent indexes, consequent index or None, weight)``
    with indexes into the creation order assumptions, facts, derived nodes.
    """
    assumptions = [rng.choice(GRID) for _ in range(rng.randint(2, max_assumptions))]
    facts = [rng.choice(GRID) for _ in range(rng.randint(0, 1))]
    derived = rng.randint(1, 3)
    first_derived = len(assumptions) + len(facts)
    total = first_derived + derived
    justifications = []
    for _ in range(rng.randint(2, max_justifications)):
        consequent = rng.choice(list(range(first_derived, total)) + [None])
        pool = [i for i in range(total) if i != consequent]
        antecedents = frozenset(rng.sample(pool, rng.randint(1, min(3, len(pool)))))
        justifications.append((antecedents, consequent, rng.choice(GRID)))
    return assumptions, facts, derived, justifications


def build(instance, order=None):
    assumptions, facts, derived, justifications = instance
    atms = PiATMS('random')
    ids = [atms.add_assumption(w) for w in assumptions]
    ids += [atms.add_fact(w) for w in facts]
    ids += [atms.add_node() for _ in range(derived)]
    for index in (order if order is not None else range(len(justifications))):
        antecedents, consequent, weight = justifications[index]
        atms.add_justification(
            {ids[i] for i in antecedents},
            None if consequent is None else ids[consequent],
            weight
        )
    return atms


@pytest.mark.parametrize('seed', range(1000))
def test_single_justification_label(seed):
    """One justification over fresh assumptions gives one environment at the min degree."""
    rng = random.Random(seed)
    atms = PiATMS()
    weights = [rng.choice(GRID) for _ in range(rng.randint(1, 4))]
    premises = {atms.add_assumption(w) for w in weights}
    conclusion = atms.add_node()
    justification_weight = rng.choice(GRID)
    atms.add_justification(premises, conclusion, justification_weight)
    expected = min(min(weights), justification_weight)
    assert atms.label(conclusion).as_pairs() == {(frozenset(premises), expected)}


@pytest.mark.parametrize('seed', range(200))
def test_labels_agree_with_oracle(seed):
    """Labels are sound, complete, minimal and weakly consistent; nogoods carry exact degrees.

    Instances go up to eight assumptions and fifteen justifications, added in a shuffled order.
    """
    rng = random.Random(seed)
    instance = random_instance(rng, max_assumptions=8, max_justifications=15)
    order = list(range(len(instance[3])))
    rng.shuffle(order)
    atms = build(instance, order)
    assumptions = atms.assumptions()
    goals = [n for n in atms.nodes() if n != atms.contradiction]

    for environment in subsets(assumptions):
        profile = necessity_profile(atms.to_clause_base(environment), goals)
        inconsistency = profile.inconsistency
        assert atms.environment_inconsistency_degree(environment) == inconsistency

        for node in goals:
            expected = profile.entailment[node]
            found = atms.context_degree(node, environment)
            if found is not None:
                assert expected is not None and found <= expected
            if expected is not None and strictly_below(inconsistency, expected):
                assert found == expected

    for node in goals:
        label = list(atms.label(node))
        for env in label:
            assert strictly_below(atms.environment_inconsistency_degree(env.assumptions), env.degree)
            assert not any(other != env and other.subsumes(env) for other in label)

    for nogood in atms.nogoods():
        profile = necessity_profile(atms.to_clause_base(nogood.assumptions))
        assert profile.inconsistency == nogood.degree


@pytest.mark.parametrize('seed', range(100))
def test_results_do_not_depend_on_justification_order(seed):
    """Every insertion order of the same justifications gives the same labels and nogoods."""
    instance = random_instance(random.Random(seed), max_justifications=5)
    reference = build(instance).dump()
    for order in permutations(range(len(instance[3]))):
        assert build(instance, order).dump() == reference
