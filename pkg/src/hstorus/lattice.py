"""Exact arithmetic in the K3 second-cohomology lattice II(3,19).

The lattice is U + U + U + E8(-1) + E8(-1) in the fixed basis order

    e1, f1, e2, f2, e3, f3, (E8 block 1: 8 coords), (E8 block 2: 8 coords)

where U is the hyperbolic plane [[0,1],[1,0]] and E8(-1) is the negated
E8 Cartan matrix.  All arithmetic is over Python integers; the only
floating point in this module is the one-time signature self-check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

RANK = 22

# E8 Dynkin diagram: chain 0-1-2-3-4-5-6 with node 7 attached to node 4
# (arm lengths 1, 2, 4 around the trivalent node).
_E8_EDGES = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7))


def _e8_cartan() -> list[list[int]]:
    c = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in _E8_EDGES:
        c[i][j] = c[j][i] = -1
    return c


def _build_gram() -> tuple[tuple[int, ...], ...]:
    g = [[0] * RANK for _ in range(RANK)]
    for b in range(3):  # three hyperbolic planes
        g[2 * b][2 * b + 1] = 1
        g[2 * b + 1][2 * b] = 1
    e8 = _e8_cartan()
    for block in range(2):
        off = 6 + 8 * block
        for i in range(8):
            for j in range(8):
                g[off + i][off + j] = -e8[i][j]
    return tuple(tuple(row) for row in g)


#: Gram matrix of II(3,19) in the documented basis order.
GRAM: tuple[tuple[int, ...], ...] = _build_gram()


def gram_determinant() -> int:
    """Exact determinant of the Gram matrix (must be -1)."""
    return _int_det([list(row) for row in GRAM])


def _int_det(m: list[list[int]]) -> int:
    """Fraction-free Bareiss determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def signature() -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of the float shadow of GRAM."""
    import numpy as np

    vals = np.linalg.eigvalsh(np.array(GRAM, dtype=float))
    return int((vals > 0).sum()), int((vals < 0).sum())


@dataclass(frozen=True)
class LatticeClass:
    """An element of H^2(S, Z) as 22 integer coordinates."""

    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != RANK:
            raise ValueError(f"expected {RANK} coordinates, got {len(self.coords)}")
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @staticmethod
    def zero() -> "LatticeClass":
        return LatticeClass((0,) * RANK)

    @staticmethod
    def basis(i: int) -> "LatticeClass":
        coords = [0] * RANK
        coords[i] = 1
        return LatticeClass(tuple(coords))

    def __add__(self, other: "LatticeClass") -> "LatticeClass":
        return LatticeClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticeClass") -> "LatticeClass":
        return LatticeClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LatticeClass":
        return LatticeClass(tuple(-a for a in self.coords))

    def __mul__(self, n: int) -> "LatticeClass":
        return LatticeClass(tuple(n * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def scale_rational(self, q: Fraction) -> "LatticeClass":
        """Scale by a rational; raises ValueError naming the first fractional coordinate."""
        scaled = [Fraction(c) * q for c in self.coords]
        for i, s in enumerate(scaled):
            if s.denominator != 1:
                raise ValueError(
                    f"coordinate {i} scales to non-integer {s}; class {q}*x is not integral"
                )
        return LatticeClass(tuple(int(s) for s in scaled))

    def to_json(self) -> list[int]:
        return list(self.coords)

    @staticmethod
    def from_json(data: Sequence[int]) -> "LatticeClass":
        return LatticeClass(tuple(int(x) for x in data))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# Named basis vectors of the three hyperbolic planes.
E1, F1 = LatticeClass.basis(0), LatticeClass.basis(1)
E2, F2 = LatticeClass.basis(2), LatticeClass.basis(3)
E3, F3 = LatticeClass.basis(4), LatticeClass.basis(5)


def intersect(a: LatticeClass, b: LatticeClass) -> int:
    """Intersection pairing a^T . G . b."""
    total = 0
    for i, ai in enumerate(a.coords):
        if ai == 0:
            continue
        row = GRAM[i]
        total += ai * sum(row[j] * bj for j, bj in enumerate(b.coords) if bj)
    return total


def asd_admissible(a: LatticeClass) -> Optional[int]:
    """k >= 0 with Q(a) = -2k if a can carry an anti-self-dual representative.

    Returns None when Q(a) > 0, or when a is nonzero but Q(a) = 0 (a
    nonzero ASD form has strictly negative self-intersection).  The zero
    class returns k = 0.  Q(a) is always even in this lattice.
    """
    q = intersect(a, a)
    if q > 0:
        return None
    k = -q // 2
    if k == 0 and not a.is_zero():
        return None
    return k


@dataclass(frozen=True)
class SmithResult:
    """Invariant factors d1 | d2 | ... of an integer matrix."""

    factors: tuple[int, ...]
    rank: int


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SmithResult:
    """Smith normal form invariant factors of an arbitrary integer matrix.

    Tracks the unimodular row/column transforms and asserts U M V == D
    before returning, so every answer is self-certified.
    """
    m = [list(map(int, row)) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    orig = [row[:] for row in m]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        m[dst] = [a + c * b for a, b in zip(m[dst], m[src])]
        u[dst] = [a + c * b for a, b in zip(u[dst], u[src])]

    def add_col(dst, src, c):
        for row in m:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    n = min(rows, cols)
    while t < n:
        # locate a nonzero pivot of minimal absolute value
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # clear row and column t; repeat until clean (remainders may refill)
        while True:
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    add_row(i, t, -q)
                    if m[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    add_col(j, t, -q)
                    if m[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        # enforce divisibility of the trailing block by the pivot
        p = m[t][t]
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % p != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1

    diag = [abs(m[i][i]) for i in range(n) if m[i][i] != 0]
    # self-check: U (unimodular) * orig * V (unimodular) must be diagonal
    # with the computed entries up to sign
    prod = _mat_mul(_mat_mul(u, orig), v)
    for i in range(rows):
        for j in range(cols):
            expect = m[i][j]
            assert prod[i][j] == expect, "SNF transform self-check failed"
    assert abs(_int_det([row[:] for row in u])) == 1 if rows else True
    assert abs(_int_det([row[:] for row in v])) == 1 if cols else True
    return SmithResult(tuple(diag), len(diag))


def _mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if not a or not b:
        return []
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def rank_of(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix (via SNF)."""
    m = [list(row) for row in matrix]
    if not m or not m[0]:
        return 0
    return smith_normal_form(m).rank
