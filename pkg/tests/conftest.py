from fractions import Fraction as F

import numpy as np
import pytest

import qpmaps as q


@pytest.fixture
def example1():
    return q.make_example1(F(1, 10), F(-1, 20), F(7, 10))


@pytest.fixture
def example2():
    return q.make_example2(F(1, 10), F(1, 5), F(1, 2), F(3, 10), F(-1, 10))


@pytest.fixture
def thm1_map():
    return q.qpmap([0.3, -0.3], [[1.5], [-1.5]], [[2, 2]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_qmt(rng, n, lo=-2, hi=2):
    """Random invertible integer QMT."""
    while True:
        C = rng.integers(lo, hi + 1, size=(n, n))
        if round(np.linalg.det(C)) != 0:
            return q.qmt(C.tolist())


def bounded_conservative_maps(count):
    """Seeded example-family maps whose orbits from near x = 1 stay bounded for 200 steps.

    lambda3 <= 0 keeps x3 from growing geometrically and, for the second family,
    -(A14 + A24) <= 0 keeps the x1*x2*x3 term from pushing u3 upward.
    """
    out = []
    seed = 0
    while len(out) < count:
        profile = "example1_family" if seed % 2 else "example2_family"
        qp = q.random_map(seed, profile=profile, entry_range=(-0.5, 0.5))
        seed += 1
        if qp.lam[2] > 0 or (qp.m == 2 and qp.A[2, 1] > 0):
            continue
        out.append(qp)
    return out


@pytest.fixture
def record(request):
    """Record one acceptance line; lines are also echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def _record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        return passed
    return _record


_ACCEPTANCE = pytest.StashKey()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
