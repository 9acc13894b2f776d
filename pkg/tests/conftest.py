from __future__ import annotations

import itertools

import pytest

from treecert.catalog import get_entry


@pytest.fixture(scope="session")
def entry():
    """Cached catalog lookup: ``entry("two_twos", n=3)``."""
    cache = {}

    def get(name, **params):
        key = (name, tuple(sorted(params.items())))
        if key not in cache:
            cache[key] = get_entry(name, **params)
        return cache[key]

    return get


def cube(n: int, ell: int):
    return list(itertools.product(range(ell), repeat=n))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
