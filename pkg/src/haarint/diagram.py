"""Monomials in orthogonal-matrix entries and their bipartite diagrams.

A monomial ``O(i1,j1)^k1 O(i2,j2)^k2 ...`` is drawn as a bipartite
multigraph: one left dot per distinct row index, one right dot per distinct
column index, one edge of multiplicity ``k`` per factor.  Haar integrals only
depend on the diagram up to relabeling of the dots and the left/right swap,
so :func:`canonicalize` picks one representative per isomorphism class.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable


class ParseError(ValueError):
    """Malformed monomial text.  ``position`` is a 0-based column."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} (at column {position + 1})")
        self.message = message
        self.text = text
        self.position = position

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.position}^"


@dataclass(frozen=True, order=True)
class Factor:
    row: int
    col: int
    power: int = 1

    def __post_init__(self):
        if self.row < 1 or self.col < 1:
            raise ValueError(f"matrix indices must be >= 1, got ({self.row},{self.col})")
        if self.power < 0:
            raise ValueError(f"power must be >= 0, got {self.power}")


@dataclass(frozen=True)
class Monomial:
    """Normalized product of matrix entries.

    Duplicate ``(row, col)`` pairs are merged, zero powers dropped and the
    factors sorted, so equal monomials compare equal.
    """

    factors: tuple[Factor, ...] = ()

    def __init__(self, factors: Iterable[Factor | tuple[int, int, int]] = ()):
        powers: dict[tuple[int, int], int] = {}
        for f in factors:
            if not isinstance(f, Factor):
                f = Factor(*f)
            powers[f.row, f.col] = powers.get((f.row, f.col), 0) + f.power
        merged = tuple(Factor(r, c, p) for (r, c), p in sorted(powers.items()) if p)
        object.__setattr__(self, "factors", merged)

    @property
    def order(self) -> int:
        return sum(f.power for f in self.factors)

    def transpose(self) -> Monomial:
        return Monomial(Factor(f.col, f.row, f.power) for f in self.factors)

    def relabel(self, rows: dict[int, int], cols: dict[int, int]) -> Monomial:
        """Apply index maps; indices missing from a map are left unchanged."""
        return Monomial(
            Factor(rows.get(f.row, f.row), cols.get(f.col, f.col), f.power)
            for f in self.factors
        )

    def __str__(self) -> str:
        return " ".join(
            f"O({f.row},{f.col})" + (f"^{f.power}" if f.power != 1 else "")
            for f in self.factors
        )


_TERM = re.compile(r"O\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)(?:\^(\d+))?")


def parse_monomial(text: str) -> Monomial:
    """Parse ``O(i,j)`` / ``O(i,j)^k`` terms separated by optional whitespace."""
    factors = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos == n:
            break
        match = _TERM.match(text, pos)
        if match is None:
            raise ParseError("expected a term of the form O(i,j) or O(i,j)^k", text, pos)
        for group in (1, 2):
            if int(match.group(group)) < 1:
                raise ParseError("index must be >= 1", text, match.start(group))
        if match.group(3) is not None and int(match.group(3)) < 1:
            raise ParseError("power must be >= 1", text, match.start(3))
        power = int(match.group(3)) if match.group(3) is not None else 1
        factors.append(Factor(int(match.group(1)), int(match.group(2)), power))
        pos = match.end()
    return Monomial(factors)


@dataclass(frozen=True)
class Diagram:
    """Canonical bipartite multigraph of a monomial.

    ``matrix[a][b]`` is the multiplicity of the edge between left dot ``a``
    and right dot ``b``.  Instances built by :func:`canonicalize` are unique
    per isomorphism class (relabeling plus transposition).
    """

    matrix: tuple[tuple[int, ...], ...]

    @property
    def left_degrees(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.matrix)

    @property
    def right_degrees(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.matrix))

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return [
            (a, b, m)
            for a, row in enumerate(self.matrix)
            for b, m in enumerate(row)
            if m
        ]

    @property
    def order(self) -> int:
        return sum(self.left_degrees)

    @property
    def shape(self) -> tuple[int, int]:
        """Number of left and right dots."""
        return len(self.matrix), len(self.matrix[0]) if self.matrix else 0

    def to_monomial(self) -> Monomial:
        return Monomial(Factor(a + 1, b + 1, m) for a, b, m in self.edges)

    def __str__(self) -> str:
        return str(self.to_monomial())


def _tie_permutations(degrees: list[int]):
    """All orderings of the dots that list degrees in descending order."""
    groups: dict[int, list[int]] = {}
    for idx, d in enumerate(degrees):
        groups.setdefault(d, []).append(idx)
    blocks = [groups[d] for d in sorted(groups, reverse=True)]
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [i for block in choice for i in block]


def _best_matrix(matrix: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    rows = [sum(r) for r in matrix]
    cols = [sum(c) for c in zip(*matrix)]
    best = None
    for rp in _tie_permutations(rows):
        for cp in _tie_permutations(cols):
            cand = tuple(tuple(matrix[i][j] for j in cp) for i in rp)
            if best is None or cand < best:
                best = cand
    return best


def canonicalize(m: Monomial) -> Diagram:
    if not m.factors:
        return Diagram(())
    rows = sorted({f.row for f in m.factors})
    cols = sorted({f.col for f in m.factors})
    ri = {r: k for k, r in enumerate(rows)}
    ci = {c: k for k, c in enumerate(cols)}
    matrix = [[0] * len(cols) for _ in rows]
    for f in m.factors:
        matrix[ri[f.row]][ci[f.col]] = f.power
    straight = _best_matrix(matrix)
    flipped = _best_matrix([list(c) for c in zip(*matrix)])
    return Diagram(min(straight, flipped))


def vanishes_by_invariance(d: Diagram) -> bool:
    """True when sign-flip invariance forces the integral to be zero.

    Flipping the sign of one row (or column) of O is a Haar-preserving map,
    so every dot needs an even degree; odd total order is a special case.
    """
    if d.order % 2:
        return True
    return any(x % 2 for x in d.left_degrees + d.right_degrees)


def required_dimension(d: Diagram) -> int:
    """Smallest N with enough distinct row and column indices."""
    t, s = d.shape
    return max(t, s, 1)
