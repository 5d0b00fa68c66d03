import random

import pytest
from hypothesis import strategies as st

from sadic.morphisms import Alphabet, Morphism, Word
from sadic.presets import preset

PHI = (1 + 5 ** 0.5) / 2


def alphabet_of_size(d, prefix="x"):
    return Alphabet(tuple(f"{prefix}{i}" for i in range(d)))


def random_morphism(rng, domain, codomain, max_len=6, min_len=1):
    images = []
    for _ in domain:
        k = rng.randint(min_len, max_len)
        images.append(Word(codomain, [rng.randrange(codomain.size) for _ in range(k)]))
    return Morphism(domain, codomain, tuple(images))


@st.composite
def morphisms(draw, domain=None, codomain=None, max_size=5, max_len=6, min_len=1):
    if domain is None:
        domain = alphabet_of_size(draw(st.integers(1, max_size)), "p")
    if codomain is None:
        codomain = alphabet_of_size(draw(st.integers(1, max_size)), "q")
    images = [
        Word(codomain, draw(st.lists(st.integers(0, codomain.size - 1), min_size=min_len, max_size=max_len)))
        for _ in domain
    ]
    return Morphism(domain, codomain, tuple(images))


@pytest.fixture
def rng():
    return random.Random(20261015)


@pytest.fixture
def fib():
    return preset("fibonacci")


@pytest.fixture
def tm():
    return preset("thue-morse")


def probability_tower(name, depth=30, lookahead=30):
    """Exact tower seeded from a level-``depth`` cone generator, normalized to mass 1."""
    from sadic.measures import MeasureTower
    return MeasureTower.from_generator(preset(name), depth, lookahead).normalized()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
