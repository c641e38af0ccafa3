"""Exact calculus of filtered (parabolic) structures at a puncture.

Weights are rationals normalized into the half-open interval (-1, 0].
Filtrations living on a cyclic cover carry, per jump, the character of the
deck-group action on the graded piece; that extra integer is what makes
descent well defined (the bare mod-1 weight multiset is not injective under
pullback).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotEquivariant, ParityViolation


def reduce_mod1(x: Fraction) -> Fraction:
    """Representative of x + Z in (-1, 0]."""
    x = Fraction(x)
    return x - math.ceil(x)


def _norm_jumps(jumps, characters=None):
    """Canonicalize (weight, multiplicity) pairs; merge equal (weight, char)."""
    items = {}
    chars = list(characters) if characters is not None else None
    for i, (w, m) in enumerate(jumps):
        w = reduce_mod1(Fraction(w))
        m = int(m)
        if m <= 0:
            raise ValueError("multiplicities must be positive")
        key = (w, chars[i] if chars is not None else None)
        items[key] = items.get(key, 0) + m
    ordered = sorted(items.items(), key=lambda kv: (-kv[0][0], kv[0][1] or 0))
    out_jumps = tuple((w, m) for (w, c), m in ordered)
    out_chars = tuple(c for (w, c), m in ordered) if chars is not None else None
    return out_jumps, out_chars


@dataclass(frozen=True)
class FilteredLocal:
    """Parabolic weight data of a filtered bundle at one puncture.

    ``characters`` is present only for filtrations on a cyclic cover (one
    deck-character per jump entry); base filtrations leave it None.
    """

    rank: int
    jumps: tuple[tuple[Fraction, int], ...]
    base_degree: Fraction = Fraction(0)
    cover_order: int = 1
    characters: tuple[int, ...] | None = None

    def __post_init__(self):
        jumps, chars = _norm_jumps(self.jumps, self.characters)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "characters", chars)
        object.__setattr__(self, "base_degree", Fraction(self.base_degree))
        if sum(m for _, m in self.jumps) != self.rank:
            raise ValueError("multiplicities must sum to rank")
        if self.characters is not None:
            if len(self.characters) != len(self.jumps):
                raise ValueError("one character per jump entry required")
            if any(not (0 <= c < self.cover_order) for c in self.characters):
                raise NotEquivariant("characters must lie in [0, cover_order)")
        if self.cover_order == 1 and self.characters is not None:
            object.__setattr__(self, "characters", tuple(0 for _ in self.jumps))

    def weight_multiset(self) -> list[Fraction]:
        out: list[Fraction] = []
        for w, m in self.jumps:
            out.extend([w] * m)
        return sorted(out, reverse=True)

    def weighted_sum(self) -> Fraction:
        return sum((w * m for w, m in self.jumps), Fraction(0))


@dataclass(frozen=True)
class StarExtensionInput:
    """Data for the canonical decomposable extension of an irreducible block.

    r: block rank (= cover order), d: determinant jump weight,
    m: valuation of the eigenframe wedge against the determinant frame.
    """

    r: int
    d: Fraction
    m: int

    def __post_init__(self):
        object.__setattr__(self, "d", Fraction(self.d))
        if self.r < 1:
            raise ValueError("rank must be >= 1")
        check_frame_parity(self.r, self.m)


def check_frame_parity(r: int, m: int) -> None:
    """m/r must be an integer for odd r, a half-integer non-integer for even r."""
    mr = Fraction(m, r)
    if r % 2 == 1:
        if mr.denominator != 1:
            raise ParityViolation(f"odd rank {r} needs r | m, got m={m}")
    else:
        half_integral = (2 * mr).denominator == 1 and mr.denominator != 1
        if not half_integral:
            raise ParityViolation(
                f"even rank {r} needs m/r in (1/2)Z \\ Z, got m={m}")


@dataclass(frozen=True)
class RamifiedCoverSpec:
    cover_order: int
    interior_ramification: tuple[int, ...] = ()
    puncture_ramification: tuple[int, ...] = ()

    def __post_init__(self):
        if any(m < 1 for m in self.interior_ramification + self.puncture_ramification):
            raise ValueError("ramification indices must be >= 1")


class PoleOrder(Enum):
    NOT_HOLOMORPHIC = "NotHolomorphic"
    DEGENERATE = "Degenerate"
    NONDEGENERATE = "Nondegenerate"


def pullback_character(w: Fraction, ell: int) -> int:
    """Deck character of the graded line generated by the pullback of weight w."""
    k = -math.ceil(ell * Fraction(w))  # offset putting ell*w + k into (-1, 0]
    return (-k) % ell


def pullback_filtration(f: FilteredLocal, ell: int) -> FilteredLocal:
    """Pull back along zeta -> zeta^ell; weights scale by ell mod 1.

    The result carries the deck characters needed to descend again.
    """
    if ell < 1:
        raise ValueError("cover order must be >= 1")
    if f.cover_order != 1:
        raise ValueError("input must be a base (non-cover) filtration")
    if ell == 1:
        return f
    jumps = []
    chars = []
    for w, m in f.jumps:
        jumps.append((reduce_mod1(ell * w), m))
        chars.append(pullback_character(w, ell))
    return FilteredLocal(f.rank, tuple(jumps), f.base_degree,
                         cover_order=ell, characters=tuple(chars))


def descent_filtration(f: FilteredLocal, ell: int) -> FilteredLocal:
    """Invert pullback_filtration using the stored deck characters."""
    if ell < 1:
        raise ValueError("cover order must be >= 1")
    if ell == 1:
        return FilteredLocal(f.rank, f.jumps, f.base_degree)
    if f.cover_order != ell:
        raise NotEquivariant(
            f"filtration lives on a {f.cover_order}-cover, asked to descend {ell}")
    if f.characters is None:
        raise NotEquivariant("no deck characters recorded; cannot descend")
    jumps = []
    for (w, m), chi in zip(f.jumps, f.characters):
        k = (-chi) % ell
        b = Fraction(w - k, ell)
        if not Fraction(-1) < b <= 0:
            raise NotEquivariant(f"character {chi} inconsistent with weight {w}")
        jumps.append((b, m))
    g = FilteredLocal(f.rank, tuple(jumps), f.base_degree)
    if pullback_filtration(g, ell) != f:
        raise NotEquivariant("round trip failed: jump data not deck-compatible")
    return g


def star_extension(inp: StarExtensionInput) -> tuple[Fraction, FilteredLocal]:
    """Canonical decomposable extension determined by the determinant data.

    Returns (line weight class on the r-cover, rank-r filtration downstairs):
    the eigenline weight is b/r mod 1 with b = -m + r d, and the downstairs
    jumps are b/r^2 - p/r (p = 0..r-1), each of multiplicity one.
    """
    r, d, m = inp.r, inp.d, inp.m
    b = Fraction(-m) + r * d
    line_weight = reduce_mod1(Fraction(b, r))
    jumps = tuple((reduce_mod1(Fraction(b, r * r) - Fraction(p, r)), 1)
                  for p in range(r))
    out = FilteredLocal(r, jumps, base_degree=d)
    if not parity_check(r, d, [w for w, _ in out.jumps]):
        raise ParityViolation("star extension output failed its own parity rule")
    return line_weight, out


def parity_check(r: int, d: Fraction, jumps: Iterable[Fraction]) -> bool:
    """r*a - d must be integral (odd r) or strictly half-integral (even r)."""
    d = Fraction(d)
    for a in jumps:
        v = r * Fraction(a) - d
        if r % 2 == 1:
            if v.denominator != 1:
                return False
        else:
            if not ((2 * v).denominator == 1 and v.denominator != 1):
                return False
    return True


def filtered_degree(locals_: Sequence[FilteredLocal], base_degree: Fraction) -> Fraction:
    """deg = base_degree - sum over punctures of sum a * dim Gr_a over (-1,0]."""
    total = Fraction(base_degree)
    for f in locals_:
        total -= f.weighted_sum()
    return total


def pushforward_degree(f: FilteredLocal, spec: RamifiedCoverSpec,
                       deg_f: Fraction) -> Fraction:
    """Degree drops by rank/2 per interior ramification excess."""
    excess = sum(m - 1 for m in spec.interior_ramification)
    return Fraction(deg_f) - Fraction(f.rank, 2) * excess


def pushforward_jumps(f: FilteredLocal, m: int) -> FilteredLocal:
    """Local pushforward along an m-fold ramified cover at the puncture.

    Each upstairs jump a of multiplicity mu contributes downstairs jumps
    (a - j)/m for j = 0..m-1, mod-reduced.
    """
    jumps: list[tuple[Fraction, int]] = []
    for a, mu in f.jumps:
        for j in range(m):
            jumps.append((reduce_mod1(Fraction(a - j, m)), mu))
    return FilteredLocal(f.rank * m, tuple(jumps), f.base_degree)


def canonical_pairing_filtration(k: int) -> FilteredLocal:
    """Rank-1 filtration making z^{-k}-valued squares perfect: jump k/2 mod 1."""
    w = reduce_mod1(Fraction(k, 2))
    return FilteredLocal(1, ((w, 1),))


def pairing_pole_check(k: int, r: int) -> PoleOrder:
    """Classify the pushforward pairing by the pole order k of the line pairing.

    Holomorphic iff k <= r-1; nondegenerate at the puncture iff k = r-1.
    """
    if r < 1:
        raise ValueError("rank must be >= 1")
    if k > r - 1:
        return PoleOrder.NOT_HOLOMORPHIC
    if k == r - 1:
        return PoleOrder.NONDEGENERATE
    return PoleOrder.DEGENERATE
