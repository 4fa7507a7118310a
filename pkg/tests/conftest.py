"""Shared fixtures for the test suite."""

import pytest

from src.config import DATA_DIR, DEFAULT_DOCTRINE_PATH
from src.core.units import Doctrine, Requirement, Scenario, Template, Unit
from src.core.weights import Weight
from src.parsers.doctrine_parser import DoctrineParser
from src.parsers.scenario_parser import ScenarioParser


SCENARIOS = DATA_DIR / 'scenarios'


def tank_company_template(**overrides) -> Template:
    fields = dict(
        name='tank_company',
        level='company',
        type='tank',
        requires=(Requirement('tank', 3),),
        max_span=60,
        max_axes=1,
        base_weight=Weight('0.9'),
    )
    fields.update(overrides)
    return Template(**fields)


def section(id: str, t: int, axis: str = 'A1', conf: str = '0.9', type: str = 'tank') -> Unit:
    return Unit.observation(id, 'section', type, axis, t, certainty=Weight(conf))


def random_scenario(rng, name='random') -> Scenario:
    """A handful of sections of both types on up to three axes over four hours."""
    observations = []
    for number in range(rng.randint(4, 9)):
        t = rng.randrange(0, 241, 5)
        observations.append(Unit.observation(
            f"O{number:02d}", 'section', rng.choice(['tank', 'tank', 'motorised_rifle']),
            rng.choice(['A1', 'A2', 'A3']), t, t + rng.choice([0, 0, 5]),
            Weight.from_units(rng.randrange(5000, 10001, 500)),
        ))
    return Scenario(name, tuple(observations))


def write_scenario(scenario: Scenario, path) -> str:
    """Write ``scenario`` in the scenario file format and return the path."""
    lines = ['format scenario/1', f"name {scenario.name}"]
    for unit in scenario.observations:
        [axis] = unit.axes
        t = str(unit.start) if unit.start == unit.end else f"{unit.start}-{unit.end}"
        lines.append(
            f"obs id={unit.id} level={unit.level} type={unit.type} axis={axis} t={t} conf={unit.certainty}"
        )
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return str(path)


@pytest.fixture
def company_doctrine():
    """Doctrine holding only the tank company template."""
    return Doctrine([tank_company_template()])


@pytest.fixture
def doctrine():
    """The shipped default doctrine."""
    return DoctrineParser(DEFAULT_DOCTRINE_PATH).process()['data']


@pytest.fixture
def four_sections():
    """Four tank sections on one axis at 0, 10, 20 and 65 minutes."""
    return ScenarioParser(SCENARIOS / 'four_sections.scn').process()['data']


@pytest.fixture
def three_axes():
    """Twelve observations on three axes over six hours."""
    return ScenarioParser(SCENARIOS / 'three_axes.scn').process()['data']


@pytest.fixture
def scenario_path():
    return SCENARIOS / 'four_sections.scn'
