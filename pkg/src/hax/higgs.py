"""Higgs bundles on a disc and their spectral data.

The bundle is the trivial rank-r bundle; the Higgs field is theta = f dz with
f a square matrix of polynomials in z. Everything downstream (branch loci,
eigenframes, local normal forms, cyclic pullbacks) is derived from f.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEverywhere, DegeneratePoint, NotSimpleZero
from .poly import ComplexPoly, eval_matrix, poly_matrix

_CHECK_POINTS = (0.31 + 0.17j, -0.52 + 0.4j, 0.11 - 0.63j)


@dataclass(frozen=True)
class HiggsBundleDisc:
    """Rank-r Higgs field theta = f dz on the disc |z| < domain_radius."""

    rank: int
    field_matrix: tuple[tuple[ComplexPoly, ...], ...]
    domain_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "field_matrix", poly_matrix(self.field_matrix))
        if self.rank < 1 or len(self.field_matrix) != self.rank:
            raise ValueError("field_matrix must be rank x rank")
        if self.domain_radius <= 0:
            raise ValueError("domain_radius must be positive")

    def f_at(self, z) -> np.ndarray:
        """Evaluate f(z); scalar z -> (r,r), array -> (...,r,r)."""
        return eval_matrix(self.field_matrix, z)

    def sup_bound(self) -> float:
        """Frobenius-style coefficient bound for |f| on the domain."""
        R = self.domain_radius
        return float(np.sqrt(sum(p.sup_bound(R) ** 2
                                 for row in self.field_matrix for p in row)))

    def gap_tolerance(self, tol: float = 1e-6) -> float:
        """Scale-aware near-branch threshold: tol * (1 + sup|f|)."""
        return tol * (1.0 + self.sup_bound())


@dataclass(frozen=True)
class SpectralSample:
    """Eigen-decomposition of f at one point, deterministically ordered."""

    point: complex
    eigenvalues: tuple[complex, ...]
    eigenvectors: np.ndarray  # columns, unit norm
    min_gap: float


@dataclass(frozen=True)
class BranchLocus:
    points: tuple[complex, ...]
    tolerance: float


@dataclass(frozen=True)
class CoverMap:
    """zeta -> zeta**order."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("cover order must be >= 1")


def cyclic_higgs(r: int, q: ComplexPoly | complex, radius: float = 1.0) -> HiggsBundleDisc:
    """Companion field: ones on the superdiagonal, q in the lower-left corner."""
    if r < 2:
        raise ValueError("cyclic Higgs field needs rank >= 2")
    if not isinstance(q, ComplexPoly):
        q = ComplexPoly.const(q)
    rows = []
    for i in range(r):
        row = [ComplexPoly.zero()] * r
        if i + 1 < r:
            row[i + 1] = ComplexPoly.one()
        rows.append(row)
    rows[r - 1][0] = q
    return HiggsBundleDisc(r, tuple(tuple(row) for row in rows), radius)


def char_poly(h: HiggsBundleDisc) -> list[ComplexPoly]:
    """Coefficients a_0..a_{r-1} of det(y I - f) = y^r + sum a_j y^j.

    Computed over C[z] via Newton's identities on the power traces, then
    verified by direct evaluation at a few fixed points.
    """
    r = h.rank
    fm = h.field_matrix
    power = fm
    ptr = []  # p_k = tr(f^k)
    for _ in range(r):
        ptr.append(_mat_trace(power))
        power = _mat_mul(power, fm)
    # Newton: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    e = [ComplexPoly.one()]
    for k in range(1, r + 1):
        acc = ComplexPoly.zero()
        for i in range(1, k + 1):
            term = e[k - i] * ptr[i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        e.append(acc * (1.0 / k))
    a = [ComplexPoly.zero()] * r
    for j in range(r):
        coef = e[r - j]
        a[j] = coef if (r - j) % 2 == 0 else -coef
    for z0 in _CHECK_POINTS:
        lhs = np.poly(h.f_at(z0 * h.domain_radius))  # high-to-low monic coeffs
        rhs = np.array([1.0] + [a[r - 1 - k](z0 * h.domain_radius) for k in range(r)])
        scale = 1.0 + np.max(np.abs(lhs))
        if np.max(np.abs(lhs - rhs)) > 1e-8 * scale:
            raise AssertionError("characteristic polynomial self-check failed")
    return a


def _mat_mul(A, B):
    r = len(A)
    return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(r)), ComplexPoly.zero())
                       for j in range(r)) for i in range(r))


def _mat_trace(A) -> ComplexPoly:
    return sum((A[i][i] for i in range(len(A))), ComplexPoly.zero())


def discriminant_poly(a: list[ComplexPoly]) -> ComplexPoly:
    """Discriminant in z of y^r + sum a_j(z) y^j, by sample-and-interpolate.

    The discriminant of a monic degree-r polynomial is a fixed polynomial in
    its coefficients, so sampling it at enough z values determines it.
    """
    r = len(a)
    if r == 0:
        raise ValueError("empty coefficient list")
    deg_bound = max(2, (2 * r - 1) * max(1, max(int(max(p.degree, 0)) for p in a)) + 1)
    m = deg_bound + 1
    radius = 1.0
    zs = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([_disc_at(a, z) for z in zs])
    # vals_k = sum_j (c_j radius^j) e^{2pi i jk/m}, inverted by fft/m
    coeffs = np.fft.fft(vals) / m / radius ** np.arange(m)
    scale = 1.0 + np.max(np.abs(vals))
    cleaned = [c if abs(c) > 1e-9 * scale else 0j for c in coeffs]
    return ComplexPoly(tuple(cleaned))


def _disc_at(a: list[ComplexPoly], z: complex) -> complex:
    r = len(a)
    coeffs = [1.0 + 0j] + [complex(a[r - 1 - k](z)) for k in range(r)]  # high->low
    p = np.array(coeffs)
    dp = p[:-1] * np.arange(r, 0, -1)
    res = _resultant(p, dp)
    sign = (-1) ** (r * (r - 1) // 2)
    return sign * res


def _resultant(p: np.ndarray, q: np.ndarray) -> complex:
    n = len(p) - 1
    m = len(q) - 1
    if n == 0 or m < 0:
        return 1.0 + 0j
    S = np.zeros((n + m, n + m), dtype=complex)
    for i in range(m):
        S[i, i : i + n + 1] = p
    for i in range(n):
        S[m + i, i : i + m + 1] = q
    return complex(np.linalg.det(S))


def branch_locus(h: HiggsBundleDisc, tol: float = 1e-8) -> BranchLocus:
    """Roots of the spectral discriminant inside the domain, deduplicated."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = char_poly(h)
    disc = discriminant_poly(a)
    if disc.is_zero():
        raise DegenerateEverywhere("discriminant vanishes identically")
    if disc.degree < 1:
        return BranchLocus((), tol)
    roots = _poly_roots(disc)
    # Newton polish
    d1 = disc.derivative()
    for _ in range(3):
        dv = d1(roots)
        ok = np.abs(dv) > 1e-14
        roots = np.where(ok, roots - disc(roots) / np.where(ok, dv, 1.0), roots)
    keep = [complex(z) for z in roots if abs(z) < h.domain_radius * (1 + 1e-9)]
    keep.sort(key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    dedup: list[complex] = []
    for z in keep:
        if all(abs(z - w) > tol for w in dedup):
            dedup.append(z)
    return BranchLocus(tuple(dedup), tol)


def _poly_roots(p: ComplexPoly) -> np.ndarray:
    """Roots via eigenvalues of the companion matrix."""
    cs = np.asarray(p.coefficients, dtype=complex)
    cs = cs / cs[-1]
    n = len(cs) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -cs[:-1]
    return np.linalg.eigvals(C)


def eigen_frame(h: HiggsBundleDisc, z: complex, tol: float | None = None) -> SpectralSample:
    """Eigen data of f(z), sorted lexicographically by (Re, Im) of eigenvalue.

    Raises DegeneratePoint when the minimal eigenvalue gap is below the
    scale-aware threshold tol*(1 + sup|f|).
    """
    base_tol = 1e-6 if tol is None else tol
    threshold = h.gap_tolerance(base_tol)
    F = h.f_at(z)
    w, V = np.linalg.eig(F)
    order = sorted(range(len(w)),
                   key=lambda i: (w[i].real, w[i].imag) + tuple(
                       (V[k, i].real, V[k, i].imag) for k in range(h.rank)))
    w = w[order]
    V = V[:, order]
    V = V / np.linalg.norm(V, axis=0, keepdims=True)
    # canonical phase: largest-magnitude component real positive
    for i in range(h.rank):
        k = int(np.argmax(np.abs(V[:, i])))
        ph = V[k, i] / abs(V[k, i])
        V[:, i] = V[:, i] / ph
    if h.rank > 1:
        gaps = [abs(w[i] - w[j]) for i in range(h.rank) for j in range(i + 1, h.rank)]
        min_gap = float(min(gaps))
    else:
        min_gap = float("inf")
    if min_gap < threshold:
        raise DegeneratePoint(
            f"eigenvalue gap {min_gap:.3e} below threshold {threshold:.3e} at z={z}")
    scale = max(1.0, float(np.max(np.abs(F))))
    for i in range(h.rank):
        if np.max(np.abs(F @ V[:, i] - w[i] * V[:, i])) > 1e-10 * scale:
            raise AssertionError("eigenpair residual out of tolerance")
    return SpectralSample(complex(z), tuple(complex(x) for x in w), V, min_gap)


def local_normal_form(a: list[ComplexPoly], trunc: int) -> tuple[complex, ComplexPoly]:
    """Eigenvalue shift and coordinate series normalizing a_0 to -z.

    Returns (alpha, w) where alpha recentres the fully collapsed fibre at z=0
    and w solves w*(dw/dz)^r = -a_0(z) after the shift, to order ``trunc``.
    """
    if trunc < 1:
        raise ValueError("trunc must be >= 1")
    r = len(a)
    if r == 1:
        alpha = -a[0](0)
        a0 = a[0] - ComplexPoly.const(a[0](0))
    else:
        alpha = -a[r - 1](0) / r
        # lowest coefficient after replacing y -> y + alpha is P(alpha, z)
        a0 = ComplexPoly.const(alpha ** r)
        for j in range(r):
            a0 = a0 + a[j] * (alpha ** j)
    scale = 1.0 + max(p.sup_bound(1.0) for p in a)
    if abs(a0(0)) > 1e-9 * scale:
        raise NotSimpleZero("collapsed fibre is not totally degenerate at z=0")
    s = -a0  # want w*(w')^r = s with s(0)=0, s'(0) != 0
    s1 = s.coeff(1)
    if abs(s1) <= 1e-12 * scale:
        raise NotSimpleZero("shifted a_0 vanishes to order >= 2 at z=0")
    # w = sum_{k>=1} c_k z^k; match w*(w')^r = s order by order
    c1 = s1 ** (1.0 / (r + 1))
    cs = [0j, c1]
    for k in range(2, trunc + 1):
        # linear coefficient of c_k in [z^k] of w*(w')^r is c1^r * (1 + r*k)/... :
        # w ~ c1 z + c_k z^k, w' ~ c1 + k c_k z^{k-1}
        # [z^k]: c_k c1^r + c1 * r c1^{r-1} * k c_k = c_k c1^r (1 + r k)
        w_known = ComplexPoly(tuple(cs))
        lhs = (w_known * (w_known.derivative() ** r)).truncate(k)
        resid = s.coeff(k) - lhs.coeff(k)
        ck = resid / (c1 ** r * (1 + r * k))
        cs.append(ck)
    w = ComplexPoly(tuple(cs))
    check = (w * (w.derivative() ** r)).truncate(trunc)
    target = s.truncate(trunc)
    if not check.approx_eq(target, 1e-8):
        raise AssertionError("normal-form series did not close")
    return complex(alpha), w


def pullback_higgs(h: HiggsBundleDisc, c: CoverMap) -> HiggsBundleDisc:
    """Pull back by zeta -> zeta^l: g(zeta) = l zeta^{l-1} f(zeta^l)."""
    ell = c.order
    if ell == 1:
        return h
    zl = ComplexPoly.monomial(ell)
    front = ComplexPoly.monomial(ell - 1, ell)
    rows = tuple(tuple(front * p.compose(zl) for p in row) for row in h.field_matrix)
    return HiggsBundleDisc(h.rank, rows, h.domain_radius ** (1.0 / ell))
