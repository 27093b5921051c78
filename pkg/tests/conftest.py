import numpy as np
import pytest

CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def criteria(request):
    """``{criterion: [(clause, passed, detail), ...]}`` shared by the acceptance tests."""
    return request.config.stash.setdefault(CRITERIA, {})


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        clauses = results[k]
        ok = all(p for _, p, _ in clauses)
        parts = "; ".join(f"{c} {'ok' if p else 'FAILED'} ({d})" for c, p, d in clauses)
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {parts}")
