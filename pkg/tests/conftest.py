from pathlib import Path

import pytest

from tamploop import load_cooking_domain

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def domain():
    return load_cooking_domain()


@pytest.fixture(scope="session")
def pick_place_text():
    return (FIXTURES / "pick_place.pddl").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def slice_food_text():
    return (FIXTURES / "slice_food.pddl").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def pick_place(domain, pick_place_text):
    from tamploop.pddl import parse_problem

    return parse_problem(pick_place_text, domain)


@pytest.fixture(scope="session")
def slice_food(domain, slice_food_text):
    from tamploop.pddl import parse_problem

    return parse_problem(slice_food_text, domain)
