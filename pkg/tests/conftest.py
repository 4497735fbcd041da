import numpy as np
import pytest

from blockforge.designs import Design, check_counting, replication_bound_ok

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion a test belongs to")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    n, title = marker.args
    entry = _CRITERIA.setdefault(n, {"title": title, "outcomes": []})
    if call.excinfo is None:
        if call.when == "call":
            entry["outcomes"].append("PASS")
    elif call.excinfo.errisinstance(pytest.skip.Exception):
        entry["outcomes"].append("SKIPPED-DATA")
    else:
        entry["outcomes"].append("FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        entry = _CRITERIA[n]
        outs = entry["outcomes"]
        if "FAIL" in outs:
            verdict = "FAIL"
        elif outs and all(o == "SKIPPED-DATA" for o in outs):
            verdict = "SKIPPED-DATA"
        elif "PASS" in outs:
            verdict = "PASS"
        else:
            verdict = "NOT RUN"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict:12s} {entry['title']}")


def assert_design_laws(D: Design) -> None:
    """Counting identities and the replication bound for a verified 2-design."""
    p = check_counting(D)
    assert p.v * p.r == p.b * p.k
    assert p.lam * (p.v - 1) == p.r * (p.k - 1)
    if p.k == 5:
        assert replication_bound_ok(p)


def naive_pair_counts(D: Design) -> dict:
    counts = {}
    for row in D.blocks:
        for i in range(len(row)):
            for j in range(i + 1, len(row)):
                counts[(row[i], row[j])] = counts.get((row[i], row[j]), 0) + 1
    return counts


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
