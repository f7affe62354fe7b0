"""Slow, obviously-correct reference implementations used as test oracles."""

import math
from functools import reduce
from itertools import combinations
from typing import List, Sequence


def cofactor_det(rows: Sequence[Sequence[int]]) -> int:
    """Laplace expansion along the first row."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        total += (-1) ** j * rows[0][j] * cofactor_det([list(r) for r in minor])
    return total


def minor_gcd(rows: Sequence[Sequence[int]], k: int) -> int:
    """gcd of all k x k minors (1 for k = 0)."""
    if k == 0:
        return 1
    m, n = len(rows), len(rows[0]) if rows else 0
    values = (
        cofactor_det([[rows[i][j] for j in cols] for i in row_set])
        for row_set in combinations(range(m), k)
        for cols in combinations(range(n), k)
    )
    return reduce(math.gcd, (abs(v) for v in values), 0)


def invariant_factors(rows: Sequence[Sequence[int]]) -> List[int]:
    """d_k = D_k / D_{k-1} from determinantal divisors, zeros past the rank."""
    m, n = len(rows), len(rows[0]) if rows else 0
    factors = []
    previous = 1
    for k in range(1, min(m, n) + 1):
        current = minor_gcd(rows, k)
        if current == 0:
            factors.extend([0] * (min(m, n) - k + 1))
            break
        factors.append(current // previous)
        previous = current
    return factors


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> List[List[int]]:
    return [[sum(x * y for x, y in zip(row, column)) for column in zip(*b)] for row in a]
