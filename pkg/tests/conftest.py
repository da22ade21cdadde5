import numpy as np
import pytest

from covhomog.data import GroupedDataset, builtin_dataset


@pytest.fixture(scope="session")
def iris():
    return builtin_dataset("iris")


@pytest.fixture(scope="session")
def skulls():
    return builtin_dataset("skulls")


@pytest.fixture(scope="session")
def wine():
    return builtin_dataset("wine")


def random_spd(rng, p, jitter=0.1):
    X = rng.normal(size=(p, p))
    return X @ X.T + jitter * np.eye(p)


def identical_groups(base, g):
    """``g`` groups carrying bitwise-identical copies of ``base``."""
    values = np.vstack([base] * g)
    labels = [f"g{i}" for i in range(g) for _ in range(len(base))]
    names = [f"v{j}" for j in range(base.shape[1])]
    return GroupedDataset(values, labels, names)


def make_grouped(rng, sizes, p, scales=None):
    blocks, labels = [], []
    for i, n in enumerate(sizes):
        s = 1.0 if scales is None else scales[i]
        blocks.append(rng.normal(loc=i, scale=s, size=(n, p)))
        labels += [f"g{i}"] * n
    return GroupedDataset(np.vstack(blocks), labels, [f"v{j}" for j in range(p)])


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def record_criterion(cid, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
