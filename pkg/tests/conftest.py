import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from moip_utility.cli import GeneratorSpec, generate_instance, load_bundled_instance  # noqa: E402
from moip_utility.driver import run  # noqa: E402
from moip_utility.utility import parse_utility  # noqa: E402

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

UTILITIES = {
    "squares": lambda k: " + ".join(f"f{i}^2" for i in range(1, k + 1)),
    "cubes": lambda k: " + ".join(f"f{i}^3" for i in range(1, k + 1)),
}


def corpus_specs(count=50):
    """Seeded 3x3/4x4 assignment instances, k in {2,3}, costs in [1,20]."""
    specs = []
    for seed in range(count):
        size = 3 + seed % 2
        k = 2 + (seed // 2) % 2
        util = "squares" if (seed // 4) % 2 == 0 else "cubes"
        specs.append(
            GeneratorSpec(shape="assignment", size=size, k=k, cost_low=1, cost_high=20, seed=1000 + seed, utility=UTILITIES[util](k))
        )
    return specs


@pytest.fixture(scope="session")
def table1():
    return load_bundled_instance()


@pytest.fixture(scope="session")
def table1_inst(table1):
    return table1[0]


@pytest.fixture(scope="session")
def cubes3():
    return parse_utility("f1^3 + f2^3 + f3^3", 3)


@pytest.fixture(scope="session")
def golden_run(table1):
    return run(*table1)


@pytest.fixture(scope="session")
def corpus():
    out = []
    for spec in corpus_specs():
        inst, text = generate_instance(spec)
        out.append((spec, inst, parse_utility(text, spec.k)))
    return out


@pytest.fixture(scope="session")
def corpus_runs(corpus):
    return [run(inst, expr) for _, inst, expr in corpus]
