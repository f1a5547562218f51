import random

import pytest

from shiftequiv.matrix import Matrix

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        ACCEPTANCE[marker] = (report.outcome, dict(report.user_properties).get("summary", ""))


@pytest.fixture(autouse=True)
def _criterion_tag(request):
    mark = request.node.get_closest_marker("acceptance")
    if mark:
        request.node.user_properties.append(("criterion", mark.args[0]))
    yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        outcome, summary = ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {summary}")


@pytest.fixture
def rng():
    return random.Random(20240611)


def rand_matrix(rng, n, m=None, lo=-3, hi=3):
    m = n if m is None else m
    return Matrix([[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)])


def rand_rational_matrix(rng, n, lo=-4, hi=4, den=4):
    return Matrix([[f"{rng.randint(lo, hi)}/{rng.randint(1, den)}" for _ in range(n)] for _ in range(n)])


def rand_invertible(rng, n, lo=-2, hi=2):
    while True:
        u = rand_matrix(rng, n, lo=lo, hi=hi)
        if u.rank() == n:
            return u


def rand_nilpotent(rng, n, lo=-3, hi=3, conjugate=True):
    """Strictly upper triangular seed, optionally conjugated by random elementary matrices."""
    seed = Matrix([[rng.randint(lo, hi) if j > i else 0 for j in range(n)] for i in range(n)])
    if not conjugate or n == 1:
        return seed
    u = Matrix.identity(n)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2)
        u = u @ Matrix.elementary(n, i, j, f"{rng.randint(-3, 3)}/{rng.randint(1, 3)}")
    return u.inverse() @ seed @ u
