import numpy as np
import pytest

from frogrec.encoders import FeatureTables
from frogrec.graph_data import GeneratorConfig, generate_synthetic, split_temporal
from frogrec.numerics import set_default_dtype


@pytest.fixture
def f64():
    """Run the test body in 64-bit mode."""
    set_default_dtype("float64")
    yield
    set_default_dtype("float32")


@pytest.fixture(autouse=True)
def _restore_precision():
    yield
    set_default_dtype("float32")


@pytest.fixture(scope="session")
def small_dataset():
    cfg = GeneratorConfig(n=300, communities=4, random_candidates=100)
    return generate_synthetic(cfg, seed=11)


@pytest.fixture(scope="session")
def small_tables(small_dataset):
    return FeatureTables.from_dataset(small_dataset)


@pytest.fixture(scope="session")
def small_split(small_dataset, small_tables):
    return split_temporal(small_dataset.instances, small_dataset.graph, 5, small_tables.featurizer)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
