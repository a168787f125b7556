import json
from collections import Counter
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def load(name):
    return json.loads((DATA / name).read_text())


@pytest.fixture(scope="session")
def printed_tables():
    return load("printed_tables.json")


@pytest.fixture(scope="session")
def oeis_fixtures():
    return load("oeis_fixtures.json")["sequences"]


def matchings(points):
    """All perfect matchings of a sorted tuple of points, as lists of pairs."""
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for idx, other in enumerate(rest):
        for m in matchings(rest[:idx] + rest[idx + 1:]):
            yield [(first, other)] + m


def relation(marked, other):
    i, j = marked
    a, b = other
    if b < i or a > j:
        return "X"
    if i < a and b < j:
        return "C"
    if a < i and j < b:
        return "G"
    return "K"


def brute_force(n):
    """Counter keyed by (stat, p, size) over every marked diagram."""
    tally = Counter()
    for m in matchings(tuple(range(2 * n))):
        for chord in m:
            rel = Counter(relation(chord, o) for o in m if o != chord)
            size = chord[1] - chord[0] - 1
            for stat in "KCGX":
                tally[stat, rel[stat], size] += 1
    return tally


@pytest.fixture(scope="session")
def brute():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = brute_force(n)
        return cache[n]

    return get
