import itertools

import numpy as np
import pytest

import hefcheck as hc
from hefcheck.program import intern_program


@pytest.fixture
def example2():
    return hc.load_example("example2")


@pytest.fixture
def example3():
    return hc.load_example("example3")


@pytest.fixture
def stable_demo():
    return hc.load_example("stable_demo")


@pytest.fixture
def pab():
    return hc.load_example("shift_counterexample")


@pytest.fixture
def clear_config():
    hc.config.reset()
    yield
    hc.config.reset()


def random_program(rng, num_atoms, num_rules, max_head=2, negation=False):
    """
    A program over atoms a0..a{num_atoms-1} with `num_rules` random rules.
    Heads are never empty; bodies may be.
    """
    names = [f"a{i}" for i in range(num_atoms)]
    rules = []
    for _ in range(num_rules):
        size = int(rng.integers(1, max_head + 1))
        head = sorted(rng.choice(num_atoms, size=min(size, num_atoms), replace=False))
        pos = [i for i in range(num_atoms) if rng.random() < 0.35]
        neg = [i for i in range(num_atoms) if negation and rng.random() < 0.2]
        rules.append(
            (
                [names[i] for i in head],
                [names[i] for i in pos],
                [names[i] for i in neg],
            )
        )
    return intern_program(rules)


def all_rules(num_atoms):
    """Every positive rule (nonempty head, any body) over `num_atoms` atoms."""
    names = [f"a{i}" for i in range(num_atoms)]
    subsets = [
        [names[i] for i in range(num_atoms) if (mask >> i) & 1]
        for mask in range(1 << num_atoms)
    ]
    return [(head, pos, []) for head in subsets if head for pos in subsets]


def all_programs(num_atoms, max_rules, nondisjunctive=False):
    """Every program with up to `max_rules` rules over `num_atoms` atoms, as rule lists."""
    rules = all_rules(num_atoms)
    if nondisjunctive:
        rules = [r for r in rules if len(r[0]) == 1]
    for k in range(1, max_rules + 1):
        yield from itertools.combinations(rules, k)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def make_random_program():
    return random_program


@pytest.fixture
def program_space():
    return all_programs
