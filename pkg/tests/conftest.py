import numpy as np
import pytest

from markovconc import new_kernel, pair_chain

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def random_reversible(rng, m):
    """Kernel from a random symmetric weight matrix; reversible by construction."""
    W = rng.random((m, m)) + 0.05
    W = W + W.T
    return W / W.sum(axis=1, keepdims=True)


def random_kernel(rng, m):
    """Rows drawn from a Dirichlet law; generically non-reversible."""
    return rng.dirichlet(np.ones(m), size=m)


def ensemble(seed=2024, count=20):
    """Deterministic list of ``(matrix, reversible_by_construction)`` pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        m = int(rng.integers(2, 7))
        if i % 2 == 0:
            out.append((random_reversible(rng, m), True))
        else:
            out.append((random_kernel(rng, m), False))
    return out


@pytest.fixture
def P1():
    return new_kernel(["0", "1"], [[0.6, 0.4], [0.4, 0.6]])


@pytest.fixture
def P0():
    return new_kernel(["0", "1"], [[0.5, 0.5], [0.5, 0.5]])


@pytest.fixture
def flip():
    return new_kernel(["0", "1"], [[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def rank_one():
    pi = np.array([0.2, 0.3, 0.5])
    return new_kernel(None, np.tile(pi, (3, 1)))


@pytest.fixture
def Q0(P0):
    return pair_chain(P0)[0]


@pytest.fixture
def Q1(P1):
    return pair_chain(P1)[0]


@pytest.fixture
def record(request):
    """Log one acceptance line; the lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def _record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
