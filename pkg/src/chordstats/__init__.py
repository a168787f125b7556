"""Statistics of linear chord diagrams seen from one marked chord.

For ``n`` chords on ``2n`` points in a line, every other chord either
crosses the marked chord (K), lies inside it (C), arches over it (G), or
lies wholly to one side (X).  The package counts diagrams by each relation
exactly, by several independent routes, and studies the limiting laws.
"""

from .errors import ConsistencyError, QuadratureError
from .exact import (
    CountTable,
    SizeDistribution,
    StatKind,
    at_least_count,
    count_crossings_by_size,
    count_row,
    count_stat,
    double_factorial,
    k_recursion_row,
    k_recursion_table,
    size_distribution,
    total_configurations,
)

__all__ = [
    "ConsistencyError",
    "QuadratureError",
    "CountTable",
    "SizeDistribution",
    "StatKind",
    "at_least_count",
    "count_crossings_by_size",
    "count_row",
    "count_stat",
    "double_factorial",
    "k_recursion_row",
    "k_recursion_table",
    "size_distribution",
    "total_configurations",
]
