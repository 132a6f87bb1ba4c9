"""Independent brute-force oracles shared by the tests.

These deliberately avoid the library's own counting code: crossings and
nestings are read off quadruples of points, and matchings are generated
from ``itertools`` rather than the library enumerator.
"""
from itertools import combinations

import pytest

from steinlab import from_pairs

FIGURE_PAIRS = [(1, 8), (2, 9), (3, 4), (5, 7), (6, 10), (11, 12)]


def matchings(points):
    """All perfect matchings of a tuple of points, as lists of pairs."""
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        for m in matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + m


def quadruple_crossings(pairs):
    chords = {frozenset(p) for p in pairs}
    pts = sorted(x for p in pairs for x in p)
    return sum(1 for a, b, c, d in combinations(pts, 4)
               if frozenset((a, c)) in chords and frozenset((b, d)) in chords)


def quadruple_nestings(pairs):
    chords = {frozenset(p) for p in pairs}
    pts = sorted(x for p in pairs for x in p)
    return sum(1 for a, b, c, d in combinations(pts, 4)
               if frozenset((a, d)) in chords and frozenset((b, c)) in chords)


def modular_simple(pairs):
    size = 2 * len(pairs)
    chords = {frozenset(p) for p in pairs}
    return sum(1 for i in range(1, size + 1) if frozenset((i, i % size + 1)) in chords)


@pytest.fixture
def figure():
    return from_pairs(FIGURE_PAIRS)


_criteria = {}


def pytest_runtest_logreport(report):
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    number, title = marker
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        prev = _criteria.get(number, (title, True, 0.0))
        _criteria[number] = (title, prev[1] and not failed, prev[2] + report.duration)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, secs = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f} s)")
