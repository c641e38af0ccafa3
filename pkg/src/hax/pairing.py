"""Symmetric pairings of Higgs bundles and the decoupled metrics they induce.

Conventions. A metric field stores per node the Hermitian positive matrix M
with h(u, v) = v^dag M u; a pairing stores the symmetric matrix Chat with
C(u, v) = v^T Chat u. Compatibility of h with C reads M = conj(Chat) M^{-T} Chat,
which in a C-orthonormal frame is the classical tH.H = id.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoint, PairingDegenerate, PreconditionViolated
from .higgs import HiggsBundleDisc
from .poly import ComplexPoly, LaurentPoly, eval_matrix, poly_matrix

_CHECK_POINTS = (0.41 + 0.23j, -0.35 - 0.48j, 0.07 + 0.66j)


@dataclass(frozen=True)
class SymmetricPairingField:
    """Holomorphic symmetric matrix field C(z) on the disc."""

    gram: tuple[tuple[ComplexPoly, ...], ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gram", poly_matrix(self.gram))
        r = len(self.gram)
        for i in range(r):
            for j in range(i + 1, r):
                if not self.gram[i][j].approx_eq(self.gram[j][i]):
                    raise ValueError("pairing matrix must be symmetric")
        dets = [np.linalg.det(eval_matrix(self.gram, z)) for z in _CHECK_POINTS]
        if max(abs(d) for d in dets) < 1e-14:
            raise ValueError("pairing determinant vanishes identically")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def gram_at(self, z) -> np.ndarray:
        return eval_matrix(self.gram, z)


def antidiagonal_pairing(r: int) -> SymmetricPairingField:
    """Ones on the antidiagonal; self-adjoint for every cyclic companion field."""
    rows = [[ComplexPoly.one() if i + j == r - 1 else ComplexPoly.zero()
             for j in range(r)] for i in range(r)]
    return SymmetricPairingField(tuple(tuple(row) for row in rows), "antidiagonal")


def identity_pairing(r: int) -> SymmetricPairingField:
    rows = [[ComplexPoly.one() if i == j else ComplexPoly.zero()
             for j in range(r)] for i in range(r)]
    return SymmetricPairingField(tuple(tuple(row) for row in rows), "identity")


def check_higgs_selfadjoint(c: SymmetricPairingField, h: HiggsBundleDisc,
                            tol: float = 1e-10) -> bool:
    """True iff transpose(f) . C = C . f as polynomial identities."""
    if c.rank != h.rank:
        raise PreconditionViolated("pairing and Higgs field sizes differ")
    r = h.rank
    f = h.field_matrix
    C = c.gram
    for i in range(r):
        for j in range(r):
            lhs = sum((f[k][i] * C[k][j] for k in range(r)), ComplexPoly.zero())
            rhs = sum((C[i][k] * f[k][j] for k in range(r)), ComplexPoly.zero())
            if not lhs.approx_eq(rhs, tol):
                return False
    return True


def trace_pushforward_pairing(k: int, r: int) -> list[list[LaurentPoly]]:
    """Gram of the trace pairing in the frame {v, zeta v, ..., zeta^{r-1} v}.

    The line pairing has C(v, v) = zeta^{-k}; multiplication by zeta^j has
    trace r z^{j/r} when r | j and 0 otherwise, so entry (i, j) is
    r z^{(i+j-k)/r} when r | (i+j-k), else 0. Exponents may be negative.
    """
    if r < 1:
        raise ValueError("rank must be >= 1")
    out = []
    for i in range(r):
        row = []
        for j in range(r):
            e = i + j - k
            if e % r == 0:
                row.append(LaurentPoly.monomial(e // r, r))
            else:
                row.append(LaurentPoly.zero())
        out.append(row)
    return out


@dataclass(frozen=True)
class JacobianPairing:
    """Pairing/metric weights induced by a covering z = phi(zeta)."""

    jacobian: ComplexPoly          # G = d phi / d zeta
    vanishing_order: int           # ord_0 G = pole order of the line pairing
    cover_degree: int              # multiplicity of phi at 0

    def metric_weight(self, zeta) -> float:
        """|G|^{-1}, the flat line-metric density."""
        return 1.0 / abs(self.jacobian(zeta))


def cover_pairing_from_jacobian(phi: ComplexPoly) -> JacobianPairing:
    """From z = phi(zeta): pairing weight G^{-1} a b with G = phi'."""
    G = phi.derivative()
    if G.is_zero():
        raise PreconditionViolated("phi must be non-constant")
    ordG = 0
    while abs(G.coeff(ordG)) == 0:
        ordG += 1
    shifted = phi - ComplexPoly.const(phi(0))
    mult = 0
    while abs(shifted.coeff(mult)) == 0:
        mult += 1
    return JacobianPairing(G, ordG, mult)


@dataclass(frozen=True)
class DecoupledMetric:
    """Metric diagonal in the theta-eigenframe with weights |C(e_i, e_i)|."""

    field: "MetricField"           # forward ref into solver module
    eigenline_weights: np.ndarray  # (N, r) real, |C(e_i,e_i)| per node
    valid: np.ndarray              # nodes far enough from the branch locus


def decoupled_metric_values(hb: HiggsBundleDisc, c: SymmetricPairingField,
                            zs: np.ndarray, gap_tol: float | None = None):
    """Pointwise decoupled Gram matrices at the points zs.

    Returns (values (N,r,r), weights (N,r), valid (N,)). Nodes inside the
    degeneracy threshold are flagged invalid and carry the identity.
    """
    if not check_higgs_selfadjoint(c, hb):
        raise PreconditionViolated("theta is not self-adjoint for this pairing")
    r = hb.rank
    threshold = hb.gap_tolerance() if gap_tol is None else gap_tol
    F = hb.f_at(zs)
    Chat = c.gram_at(zs)
    w, V = np.linalg.eig(F)
    N = len(zs)
    if r > 1:
        gaps = np.full(N, np.inf)
        for i in range(r):
            for j in range(i + 1, r):
                gaps = np.minimum(gaps, np.abs(w[:, i] - w[:, j]))
    else:
        gaps = np.full(N, np.inf)
    valid = gaps >= threshold
    # c_i = v_i^T Chat v_i per eigencolumn
    cvals = np.einsum("kia,kij,kja->ka", V, Chat, V)
    weights = np.abs(cvals)
    scale = 1.0 + np.max(np.abs(Chat))
    if np.any(weights[valid] < 1e-12 * scale):
        raise PairingDegenerate("eigenline isotropic for the pairing")
    vals = np.empty((N, r, r), dtype=complex)
    Vinv = np.linalg.inv(V)
    D = weights.astype(complex)
    vals[:] = np.einsum("kai,ki,kib->kab", np.conj(np.transpose(Vinv, (0, 2, 1))), D, Vinv)
    vals[~valid] = np.eye(r)
    vals = 0.5 * (vals + np.conj(np.transpose(vals, (0, 2, 1))))
    return vals, weights, valid


def decoupled_metric_from_pairing(hb: HiggsBundleDisc, c: SymmetricPairingField,
                                  grid, gap_tol: float | None = None) -> DecoupledMetric:
    """Grid-sampled h^C; raises DegeneratePoint only if no node is usable."""
    from .solver import MetricField

    zs = grid.nodes()
    vals, weights, valid = decoupled_metric_values(hb, c, zs, gap_tol)
    if not np.any(valid):
        raise DegeneratePoint("entire grid sits at the branch locus")
    field = MetricField(grid, vals, validate=False)
    # commutator check on valid nodes
    F = hb.f_at(zs[valid])
    M = vals[valid]
    Minv = np.linalg.inv(M)
    adj = Minv @ np.conj(np.transpose(F, (0, 2, 1))) @ M
    comm = F @ adj - adj @ F
    scale = 1.0 + float(np.max(np.abs(F))) ** 2
    if np.max(np.abs(comm)) > 1e-8 * scale:
        raise AssertionError("decoupled metric fails the commutation check")
    return DecoupledMetric(field, weights, valid)


def compatibility_defect(hfield, c: SymmetricPairingField, mask=None) -> float:
    """Max over nodes of ||M - conj(C) M^{-T} C|| / ||M||; 0 iff compatible."""
    M = hfield.values
    if M.shape[-1] != c.rank:
        raise PreconditionViolated("metric and pairing sizes differ")
    zs = hfield.grid.nodes()
    Chat = c.gram_at(zs)
    dual = np.conj(Chat) @ np.linalg.inv(np.transpose(M, (0, 2, 1))) @ Chat
    ratios = np.linalg.norm(M - dual, axis=(1, 2)) / np.linalg.norm(M, axis=(1, 2))
    if mask is not None:
        ratios = ratios[mask]
    return float(np.max(ratios))


@dataclass(frozen=True)
class GramMatrix:
    """Gram of a C-compatible metric in a C-orthonormal frame."""

    entries: np.ndarray

    def __post_init__(self):
        H = self.entries
        if np.max(np.abs(H - H.conj().T)) > 1e-12:
            raise ValueError("Gram matrix must be Hermitian")
        if np.min(np.linalg.eigvalsh(H)) <= 0:
            raise ValueError("Gram matrix must be positive definite")
        r = H.shape[0]
        if np.max(np.abs(H.T @ H - np.eye(r))) > 1e-12:
            raise ValueError("compatibility tH.H = id violated")
        if abs(np.linalg.det(H) - 1) > 1e-12:
            raise ValueError("det must be 1")

    @property
    def rank(self) -> int:
        return self.entries.shape[0]


def sample_compatible_metric(r: int, scale: float, seed: int) -> tuple[GramMatrix, float]:
    """H = exp(iB), B real antisymmetric: Hermitian positive, tH.H = id, det 1.

    Returns the sample and its realized off-diagonal ratio
    max_{i<j} |H_ij| / sqrt(H_ii H_jj).
    """
    if scale < 0:
        raise PreconditionViolated("scale must be >= 0")
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(r, r))
    B = scale * (B - B.T) / 2.0
    w, V = np.linalg.eigh(1j * B)
    H = (V * np.exp(w)) @ V.conj().T
    H = 0.5 * (H + H.conj().T)
    eps = 0.0
    d = np.sqrt(np.real(np.diag(H)))
    for i in range(r):
        for j in range(i + 1, r):
            eps = max(eps, abs(H[i, j]) / (d[i] * d[j]))
    return GramMatrix(H), float(eps)


@dataclass(frozen=True)
class GramBoundsReport:
    A: float
    max_diag_dev: float
    max_offdiag: float
    passed: bool


def gram_bounds(H: GramMatrix, eps: float) -> GramBoundsReport:
    """Check the linear-algebra bounds A <= 2r, |H_ii - 1| <= 4 r^2 eps,
    |H_ij| <= eps (1 + 4 r^2 eps) for a compatible Gram with off-diagonal
    ratio at most eps <= 1/(2r)."""
    M = H.entries
    r = H.rank
    if eps > 1.0 / (2 * r) + 1e-15:
        raise PreconditionViolated(f"eps={eps} exceeds 1/(2r)={1/(2*r)}")
    d = np.sqrt(np.real(np.diag(M)))
    for i in range(r):
        for j in range(i + 1, r):
            if abs(M[i, j]) > eps * d[i] * d[j] * (1 + 1e-12):
                raise PreconditionViolated("input off-diagonal exceeds eps ratio")
    A = float(np.real(np.trace(M)))
    max_diag = float(np.max(np.abs(np.real(np.diag(M)) - 1.0)))
    off = np.abs(M - np.diag(np.diag(M)))
    max_off = float(np.max(off)) if r > 1 else 0.0
    passed = (A <= 2 * r + 1e-12
              and max_diag <= 4 * r * r * eps + 1e-12
              and max_off <= eps * (1 + 4 * r * r * eps) + 1e-12)
    return GramBoundsReport(A, max_diag, max_off, passed)
