"""Multiplicity patterns of root configurations and their degeneration order."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .polyalg import (
    PolyError,
    RationalPoly,
    ONE,
    rational_roots,
    squarefree_decomposition,
)


@dataclass(frozen=True, order=True)
class MultiplicityPattern:
    """Non-increasing tuple of positive root multiplicities."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"pattern parts must be positive: {parts}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @classmethod
    def of(cls, parts: Iterable[int]) -> "MultiplicityPattern":
        return cls(tuple(parts))

    @classmethod
    def nodal(cls, d: int, nu: int) -> "MultiplicityPattern":
        """``nu`` twos followed by ``d - 2 nu`` ones."""
        if nu < 0 or 2 * nu > d:
            raise ValueError(f"need 0 <= 2*nu <= d, got d={d}, nu={nu}")
        return cls((2,) * nu + (1,) * (d - 2 * nu))

    @property
    def degree(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def to_json(self) -> list[int]:
        return list(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def _as_pattern(m) -> MultiplicityPattern:
    return m if isinstance(m, MultiplicityPattern) else MultiplicityPattern.of(m)


def is_degeneration(m_prime, m) -> bool:
    """True iff some surjection merges the parts of ``m`` into the parts of ``m_prime``.

    Backtracking assignment of the parts of ``m`` (largest first) into bins
    whose capacities are the parts of ``m_prime``; every bin must end up full,
    which forces surjectivity since all parts are positive.
    """
    mp, m = _as_pattern(m_prime), _as_pattern(m)
    if mp.degree != m.degree or mp.length > m.length:
        return False
    return _fits(mp.parts, m.parts)


@lru_cache(maxsize=None)
def _fits(bins: tuple[int, ...], items: tuple[int, ...]) -> bool:
    if not items:
        return all(b == 0 for b in bins)
    first, rest = items[0], items[1:]
    tried = set()
    for i, cap in enumerate(bins):
        if cap < first or cap in tried:
            continue
        tried.add(cap)
        nxt = list(bins)
        nxt[i] -= first
        if _fits(tuple(sorted(nxt, reverse=True)), rest):
            return True
    return False


def integer_partitions(n: int, max_part: int | None = None) -> Iterable[tuple[int, ...]]:
    """Partitions of ``n`` as non-increasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def strict_degenerations(m) -> set[MultiplicityPattern]:
    """All patterns strictly coarser than ``m`` (the boundary strata of its closure)."""
    m = _as_pattern(m)
    out = set()
    for parts in integer_partitions(m.degree):
        if len(parts) < m.length and _fits(parts, m.parts):
            out.add(MultiplicityPattern(parts))
    return out


def viete(roots: Sequence) -> RationalPoly:
    """Monic ``prod (z - r)`` over the given roots."""
    p = ONE
    for r in roots:
        p = p * RationalPoly.linear_root(r)
    return p


@dataclass(frozen=True)
class PatternReport:
    """Root-multiplicity data of a monic polynomial.

    ``pattern`` is the multiplicity pattern of the complex roots, always exact
    (a squarefree factor of degree n in the i-th slot of the square-free
    decomposition contributes n roots of multiplicity exactly i).
    ``signature`` lists ``(multiplicity, squarefree factor degree)``.
    ``roots_rational`` says whether every root is rational, in which case
    ``roots`` holds them with multiplicities.
    """

    pattern: MultiplicityPattern
    signature: tuple[tuple[int, int], ...]
    roots_rational: bool
    roots: tuple[tuple[Fraction, int], ...] | None

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "signature": [list(s) for s in self.signature],
            "roots_rational": self.roots_rational,
            "roots": None
            if self.roots is None
            else [[f"{r.numerator}/{r.denominator}", k] for r, k in self.roots],
        }


def pattern_of(p: RationalPoly) -> PatternReport:
    if p.is_zero:
        raise PolyError("pattern of the zero polynomial")
    if p.lc != 1:
        raise PolyError(f"pattern_of expects a monic polynomial, leading coefficient is {p.lc}")
    decomposition = squarefree_decomposition(p)
    parts: list[int] = []
    signature = []
    all_rational = True
    roots: list[tuple[Fraction, int]] = []
    for mult, factor in decomposition:
        parts.extend([mult] * factor.degree)
        signature.append((mult, factor.degree))
        rs = rational_roots(factor)
        if len(rs) != factor.degree:
            all_rational = False
        roots.extend((r, mult) for r in rs)
    roots.sort()
    return PatternReport(
        pattern=MultiplicityPattern(tuple(parts)),
        signature=tuple(signature),
        roots_rational=all_rational,
        roots=tuple(roots) if all_rational else None,
    )


def stratum_dimension(m) -> int:
    return _as_pattern(m).length


def codimension(m) -> int:
    """Codimension of the closed stratum inside the space of monic polynomials."""
    m = _as_pattern(m)
    return m.degree - m.length
