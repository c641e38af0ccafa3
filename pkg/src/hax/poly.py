"""Polynomials in one complex variable, plus a small Laurent companion.

``ComplexPoly`` stores coefficients low-to-high (index j is the coefficient
of z^j) with trailing zeros trimmed, so equality and degree are well defined.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_TRIM_EPS = 0.0  # only exact trailing zeros are trimmed


def _trim(coeffs: Sequence[complex]) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial sum_j coefficients[j] * z**j."""

    coefficients: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _trim(self.coefficients))

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c) -> "ComplexPoly":
        return cls((complex(c),))

    @classmethod
    def zero(cls) -> "ComplexPoly":
        return cls(())

    @classmethod
    def one(cls) -> "ComplexPoly":
        return cls((1.0 + 0j,))

    @classmethod
    def z(cls) -> "ComplexPoly":
        return cls((0j, 1.0 + 0j))

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "ComplexPoly":
        return cls((0j,) * k + (complex(c),))

    # -- structure ----------------------------------------------------
    @property
    def degree(self) -> float:
        return len(self.coefficients) - 1 if self.coefficients else float("-inf")

    def is_zero(self) -> bool:
        return not self.coefficients

    def __bool__(self) -> bool:
        return bool(self.coefficients)

    def coeff(self, k: int) -> complex:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0j

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other) -> "ComplexPoly":
        other = _as_poly(other)
        n = max(len(self.coefficients), len(other.coefficients))
        return ComplexPoly(tuple(self.coeff(k) + other.coeff(k) for k in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "ComplexPoly":
        return ComplexPoly(tuple(-c for c in self.coefficients))

    def __sub__(self, other) -> "ComplexPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "ComplexPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "ComplexPoly":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return ComplexPoly.zero()
        out = np.convolve(np.asarray(self.coefficients), np.asarray(other.coefficients))
        return ComplexPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ComplexPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = ComplexPoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> "ComplexPoly":
        cs = self.coefficients
        return ComplexPoly(tuple(k * cs[k] for k in range(1, len(cs))))

    def compose(self, inner: "ComplexPoly") -> "ComplexPoly":
        """self(inner(z)), by Horner over polynomial coefficients."""
        out = ComplexPoly.zero()
        for c in reversed(self.coefficients):
            out = out * inner + ComplexPoly.const(c)
        return out

    def __call__(self, z):
        """Evaluate by Horner; accepts scalars or numpy arrays."""
        if not self.coefficients:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        acc = np.full_like(np.asarray(z, dtype=complex), self.coefficients[-1]) \
            if np.ndim(z) else self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * z + c
        return acc

    def truncate(self, order: int) -> "ComplexPoly":
        """Drop terms of degree > order."""
        return ComplexPoly(self.coefficients[: order + 1])

    def sup_bound(self, radius: float) -> float:
        """Upper bound for |p(z)| on |z| <= radius (coefficient sum)."""
        return float(sum(abs(c) * radius ** k for k, c in enumerate(self.coefficients)))

    def approx_eq(self, other: "ComplexPoly", tol: float = 1e-12) -> bool:
        other = _as_poly(other)
        n = max(len(self.coefficients), len(other.coefficients))
        scale = 1.0 + max(self.sup_bound(1.0), other.sup_bound(1.0))
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol * scale for k in range(n))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            term = _fmt_coeff(c)
            if k == 1:
                term += "*z"
            elif k > 1:
                term += f"*z^{k}"
            parts.append(term)
        return " + ".join(parts)


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    sign = "+" if c.imag >= 0 else "-"
    return f"({c.real!r}{sign}{abs(c.imag)!r}i)"


def _as_poly(x) -> ComplexPoly:
    if isinstance(x, ComplexPoly):
        return x
    return ComplexPoly.const(x)


def poly_matrix(entries: Iterable[Iterable]) -> tuple[tuple[ComplexPoly, ...], ...]:
    """Normalize a nested iterable into a square tuple matrix of polynomials."""
    rows = tuple(tuple(_as_poly(e) for e in row) for row in entries)
    r = len(rows)
    if any(len(row) != r for row in rows):
        raise ValueError("matrix of polynomials must be square")
    return rows


def eval_matrix(mat: Sequence[Sequence[ComplexPoly]], z) -> np.ndarray:
    """Evaluate a polynomial matrix at z (scalar -> (r,r), array -> (...,r,r))."""
    r = len(mat)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            out[..., i, j] = mat[i][j](z)
    return out


class LaurentPoly:
    """Finite Laurent polynomial sum_k c_k z^k, k in Z. Mutable dict core."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, complex] | None = None):
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = complex(c)
                if c != 0:
                    self.terms[int(k)] = c

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "LaurentPoly":
        return cls({k: complex(c)})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_exp(self):
        return min(self.terms) if self.terms else None

    @property
    def max_exp(self):
        return max(self.terms) if self.terms else None

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return LaurentPoly(out)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[int, complex] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 + k2
                out[k] = out.get(k, 0j) + c1 * c2
        return LaurentPoly(out)

    def scale(self, c) -> "LaurentPoly":
        return LaurentPoly({k: v * c for k, v in self.terms.items()})

    def __call__(self, z: complex) -> complex:
        return sum(c * z ** k for k, c in self.terms.items())

    def coeff(self, k: int) -> complex:
        return self.terms.get(k, 0j)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "LaurentPoly(0)"
        body = " + ".join(f"{c}*z^{k}" for k, c in sorted(self.terms.items()))
        return f"LaurentPoly({body})"


def laurent_det(mat: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Determinant by permutation expansion; fine for the small ranks used here."""
    from itertools import permutations

    r = len(mat)
    out = LaurentPoly.zero()
    for perm in permutations(range(r)):
        sign = 1
        seen = list(perm)
        for i in range(r):  # parity by counting inversions
            for j in range(i + 1, r):
                if seen[i] > seen[j]:
                    sign = -sign
        term = LaurentPoly.monomial(0, sign)
        for i in range(r):
            term = term * mat[i][perm[i]]
            if term.is_zero():
                break
        out = out + term
    return out
