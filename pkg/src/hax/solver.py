"""Finite-difference Dirichlet solver for the rescaled Hitchin equation.

Discrete equation, in the fixed holomorphic frame with Gram field H:

    dzbar(H^{-1} dz H) - t^2 [f, H^{-1} f^dag H] = 0,

whose trace forces log det H to be harmonic. With the cyclic ansatz
H = diag(e^u, e^{-u}) this reduces to u'' + u'/rho = 4 t^2 (e^{2u} - |q|^2 e^{-2u})
radially, with u* = (1/2) log|q| the exact zero of the nonlinearity and
positive linearized potential 16 t^2 |q| about it.

The Newton iteration works on the Hermitian residual K = H x (equation),
trust-regioned in multiplicative coordinates H -> H^{1/2} exp(S) H^{1/2},
with the determinant re-projected onto the harmonic extension of the
boundary log-determinant after every step (1/r-power trace correction).
The convergence norm is the trace-deflated residual; the raw trace part is
pure discretization error and is reported, not iterated on.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NotConverged, PreconditionViolated
from .grid import DiscGrid
from .higgs import HiggsBundleDisc
from .poly import ComplexPoly

BoundaryMetric = Callable[[complex], np.ndarray]


def _herm(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def _expm_herm(S: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(S)
    return np.einsum("...ab,...b,...cb->...ac", V, np.exp(w), np.conj(V))


class MetricField:
    """Per-node Hermitian positive Gram matrices in the holomorphic frame."""

    def __init__(self, grid: DiscGrid, values: np.ndarray, validate: bool = True):
        values = np.asarray(values, dtype=complex)
        if values.shape[0] != grid.N or values.shape[1] != values.shape[2]:
            raise ValueError("values must be (N, r, r)")
        if validate:
            if np.max(np.abs(values - np.conj(np.swapaxes(values, 1, 2)))) > 1e-12:
                raise ValueError("metric values must be Hermitian")
            if np.min(np.linalg.eigvalsh(values)) <= 0:
                raise ValueError("metric values must be positive definite")
        self.grid = grid
        self.values = values

    @property
    def rank(self) -> int:
        return self.values.shape[1]

    @classmethod
    def identity(cls, grid: DiscGrid, r: int) -> "MetricField":
        vals = np.broadcast_to(np.eye(r), (grid.N, r, r)).astype(complex).copy()
        return cls(grid, vals, validate=False)

    @classmethod
    def from_function(cls, grid: DiscGrid, fun: BoundaryMetric, r: int) -> "MetricField":
        zs = grid.nodes()
        vals = np.empty((grid.N, r, r), dtype=complex)
        for k, z in enumerate(zs):
            vals[k] = fun(z)
        return cls(grid, _herm(vals), validate=False)

    def copy(self) -> "MetricField":
        return MetricField(self.grid, self.values.copy(), validate=False)

    def log_det(self) -> np.ndarray:
        sign, ld = np.linalg.slogdet(self.values)
        return ld

    def evaluator(self) -> Callable[[complex], np.ndarray]:
        """Nearest-node lookup, adequate for sampling away from the boundary."""
        grid = self.grid

        def at(z: complex) -> np.ndarray:
            i = int(round((z.real + grid.span) / grid.h))
            j = int(round((z.imag + grid.span) / grid.h))
            i = min(max(i, 0), grid.n - 1)
            j = min(max(j, 0), grid.n - 1)
            k = grid.idx[i, j]
            if k < 0:
                d2 = np.abs(grid.nodes() - z)
                k = int(np.argmin(d2))
            return self.values[k]

        return at


@dataclass
class SolveConfig:
    tol: float = 1e-9
    max_iter: int = 60
    damping: float = 1.0          # scales the trust-region cap / flow step
    scheme: str = "newton"        # "newton" or "flow"

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not (0 < self.damping <= 1):
            raise ValueError("damping must be in (0, 1]")
        if self.scheme not in ("newton", "flow"):
            raise ValueError("scheme must be 'newton' or 'flow'")


@dataclass
class SolveStats:
    iterations: int
    final_residual: float
    det_drift: float
    raw_residual_sup: float = 0.0
    raw_residual_l1: float = 0.0


class _DiscreteProblem:
    """Residual, Jacobian and boundary plumbing for one (grid, f, t)."""

    def __init__(self, grid: DiscGrid, hb: HiggsBundleDisc, t: float,
                 boundary: BoundaryMetric):
        self.grid, self.t, self.r = grid, float(t), hb.rank
        zs = grid.nodes()
        self.f = hb.f_at(zs)
        self.fd = np.conj(np.transpose(self.f, (0, 2, 1)))
        r = self.r
        self.bvals = np.zeros((grid.N, 4, r, r), dtype=complex)
        for k in range(grid.N):
            for d in range(4):
                if grid.nbr_idx[k, d] < 0:
                    self.bvals[k, d] = boundary(grid.bnd_pts[k, d])

    def K(self, H: np.ndarray):
        """Hermitian residual K = H . (dzbar(H^-1 dz H) - t^2 [f, H^-1 f+ H])."""
        g = self.grid
        Dx, Dy, Lap = g.first_and_second(H, self.bvals)
        Dz = 0.5 * (Dx - 1j * Dy)
        Dzb = 0.5 * (Dx + 1j * Dy)
        Hinv = np.linalg.inv(H)
        K = (0.25 * Lap - Dzb @ Hinv @ Dz
             - self.t ** 2 * (H @ self.f @ Hinv @ self.fd @ H
                              - self.fd @ H @ self.f))
        return K, Hinv, Dz, Dzb

    def deflated(self, H: np.ndarray):
        K, Hinv, _, _ = self.K(H)
        lam = np.real(np.einsum("kab,kba->k", Hinv, K)) / self.r
        Kd = K - lam[:, None, None] * H
        Rd = Hinv @ Kd
        return Kd, Rd, Hinv

    def jacobian(self, H: np.ndarray, Hinv: np.ndarray, Dz: np.ndarray,
                 Dzb: np.ndarray) -> sp.csc_matrix:
        """Exact complex-linear Jacobian of K with respect to H."""
        g, r, t = self.grid, self.r, self.t
        N, r2 = g.N, self.r ** 2
        f, fd = self.f, self.fd
        G_R = Hinv @ Dz
        G_L = Dzb @ Hinv
        eye = np.broadcast_to(np.eye(r), (N, r, r))

        def blk(L, Rm):
            return np.einsum("kac,kdb->kabcd", L, Rm).reshape(-1, r2, r2)

        Bpt = -(t * t) * (blk(eye, f @ Hinv @ fd @ H)
                          - blk(H @ f @ Hinv, Hinv @ fd @ H)
                          + blk(H @ f @ Hinv @ fd, eye)
                          - blk(fd, f))
        Bpt += blk(G_L, G_R)
        dzc = 0.5 * (g.c10[:, 0] - 1j * g.c10[:, 1])
        dzbc = 0.5 * (g.c10[:, 0] + 1j * g.c10[:, 1])
        Bc = (Bpt + (0.25 * g.c20)[:, None, None] * blk(eye, eye)
              - dzbc[:, None, None] * blk(eye, G_R)
              - dzc[:, None, None] * blk(G_L, eye))
        rows, cols, vals = [], [], []
        kr = np.arange(N)
        a_idx = np.repeat(np.arange(r2), r2)
        b_idx = np.tile(np.arange(r2), r2)

        def add(keq, kvar, B):
            rows.append((keq[:, None] * r2 + a_idx[None, :]).ravel())
            cols.append((kvar[:, None] * r2 + b_idx[None, :]).ravel())
            vals.append(B.reshape(len(keq), -1).ravel())

        add(kr, kr, Bc)
        for d in range(4):
            dd = g.c1[:, d]
            if d < 2:
                dzk = 0.5 * dd
                dzbk = 0.5 * dd
            else:
                dzk = -0.5j * dd
                dzbk = 0.5j * dd
            Bn = ((0.25 * g.c2[:, d])[:, None, None] * blk(eye, eye)
                  - dzbk[:, None, None] * blk(eye, G_R)
                  - dzk[:, None, None] * blk(G_L, eye))
            m = g.nbr_idx[:, d] >= 0
            add(kr[m], g.nbr_idx[m, d], Bn[m])
        return sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(N * r2, N * r2)).tocsc()

    def project_det(self, H: np.ndarray, logdet_target: np.ndarray) -> np.ndarray:
        ld = np.linalg.slogdet(H)[1]
        return H * np.exp((logdet_target - ld) / self.r)[:, None, None]


def hitchin_residual(h: MetricField, hb: HiggsBundleDisc, t: float,
                     boundary: BoundaryMetric | None = None):
    """Full discrete residual field and its sup / discrete-L1 norms.

    When no boundary callable is given, cut arms reuse the nearest interior
    value (one-sided closure); converged solves should pass their own
    boundary data for the faithful stencil.
    """
    if t < 0:
        raise PreconditionViolated("t must be >= 0")
    grid = h.grid
    if boundary is None:
        ev = h.evaluator()
        boundary = lambda z: ev(z)  # noqa: E731
    prob = _DiscreteProblem(grid, hb, t, boundary)
    K, Hinv, _, _ = prob.K(h.values)
    R = Hinv @ K
    norms = np.max(np.abs(R), axis=(1, 2))
    sup = float(np.max(norms))
    l1 = float(np.sum(norms) * grid.cell_area())
    return R, sup, l1


def solve_dirichlet(hb: HiggsBundleDisc, t: float, boundary: BoundaryMetric,
                    cfg: SolveConfig | None = None, grid: DiscGrid | None = None,
                    init: MetricField | None = None) -> tuple[MetricField, SolveStats]:
    """Unique harmonic metric on the disc with prescribed boundary values.

    The boundary is a callable z -> Hermitian positive (r, r) matrix on the
    circle. The returned metric matches it at every cut-arm endpoint, its
    log-determinant equals the discrete harmonic extension of the boundary
    log-determinant, and the deflated residual is below cfg.tol.
    """
    if t < 0:
        raise PreconditionViolated("t must be >= 0")
    cfg = cfg or SolveConfig()
    if grid is None:
        grid = init.grid if init is not None else DiscGrid(128, hb.domain_radius)
    r = hb.rank
    ld_target = grid.harmonic_extension(
        lambda z: float(np.linalg.slogdet(np.asarray(boundary(z)))[1]))
    H = (init.values.copy() if init is not None
         else MetricField.identity(grid, r).values)

    stages = _continuation_stages(t) if init is None else [t]
    total_its = 0
    for tt in stages:
        prob = _DiscreteProblem(grid, hb, tt, boundary)
        if cfg.scheme == "newton":
            H, its, res = _newton_stage(prob, H, ld_target, cfg)
        else:
            H, its, res = _flow_solve(prob, H, ld_target, cfg)
        total_its += its
    field = MetricField(grid, H, validate=False)
    drift = float(np.max(np.abs(field.log_det() - ld_target)))
    _, raw_sup, raw_l1 = hitchin_residual(field, hb, t, boundary)
    stats = SolveStats(total_its, res, drift, raw_sup, raw_l1)
    if res > cfg.tol:
        raise NotConverged(f"residual {res:.3e} > tol {cfg.tol:.1e}", stats)
    return field, stats


def _continuation_stages(t: float) -> list[float]:
    if t <= 2.0:
        return [t]
    stages = []
    tt = 1.0
    while tt < t:
        stages.append(tt)
        tt *= 2.0
    stages.append(t)
    return stages


def _newton_stage(prob: _DiscreteProblem, H: np.ndarray, ld_target: np.ndarray,
                  cfg: SolveConfig):
    """Trust-regioned Newton with pseudo-transient fallback, det-projected.

    The determinant is re-projected onto the harmonic extension after every
    update (1/r-power trace correction) and the trace-deflated residual is
    driven below tol; the raw trace part is pure discretization error. Far
    from the solution the plain Newton direction can stall (the frozen
    operator loses ellipticity at metric cusps), in which case a diagonal
    shift mu is switched on, implicit-Euler style, and annealed away as the
    residual drops.
    """
    H = prob.project_det(_herm(H), ld_target)
    N, r2 = prob.grid.N, prob.r ** 2
    eye = sp.identity(N * r2, format="csc", dtype=complex)
    mu = 0.0
    mu_base = 0.3 / prob.grid.h ** 2
    res = None
    for itn in range(cfg.max_iter):
        K, Hinv, Dz, Dzb = prob.K(H)
        lam = np.real(np.einsum("kab,kba->k", Hinv, K)) / prob.r
        Kd = K - lam[:, None, None] * H
        res = float(np.max(np.abs(Hinv @ Kd)))
        if res < cfg.tol:
            return H, itn, res
        rms = float(np.sqrt(np.mean(np.abs(Kd) ** 2)))
        J = prob.jacobian(H, Hinv, Dz, Dzb)
        accepted = False
        for _trial in range(12):
            # J approximates (1/4)Lap + lower order: shifting by -mu pushes the
            # spectrum away from zero on the implicit-Euler side
            lu = spla.splu((J - mu * eye).tocsc() if mu > 0 else J,
                           permc_spec="MMD_AT_PLUS_A")
            dH = _herm(lu.solve(-Kd.reshape(-1)).reshape(N, prob.r, prob.r))
            w, V = np.linalg.eigh(H)
            sq = np.einsum("kab,kb,kcb->kac", V, np.sqrt(w), np.conj(V))
            isq = np.einsum("kab,kb,kcb->kac", V, 1.0 / np.sqrt(w), np.conj(V))
            Sig = _herm(isq @ dH @ isq)
            smax = float(np.max(np.abs(np.linalg.eigvalsh(Sig))))
            alpha = min(1.0, cfg.damping / max(smax, 1e-300))
            for _ in range(10):
                Hn = prob.project_det(_herm(sq @ _expm_herm(alpha * Sig) @ sq),
                                      ld_target)
                Kdn, Rdn, _ = prob.deflated(Hn)
                rmsn = float(np.sqrt(np.mean(np.abs(Kdn) ** 2)))
                resn = float(np.max(np.abs(Rdn)))
                if rmsn < rms * (1 - 1e-4 * alpha) or resn < cfg.tol:
                    accepted = True
                    break
                alpha *= 0.5
            if accepted:
                break
            mu = mu_base if mu == 0.0 else mu * 4.0
        if not accepted:
            raise NotConverged(
                f"stalled at residual {res:.3e} despite transient damping",
                SolveStats(itn, res, float("nan")))
        H = Hn
        mu = mu / 3.0 if mu > 1e-8 * mu_base else 0.0
    Kd, Rd, _ = prob.deflated(H)
    res = float(np.max(np.abs(Rd)))
    if res < cfg.tol:
        return H, cfg.max_iter, res
    raise NotConverged(f"max_iter reached at residual {res:.3e}",
                       SolveStats(cfg.max_iter, res, float("nan")))


def _flow_solve(prob: _DiscreteProblem, H: np.ndarray, ld_target: np.ndarray,
                cfg: SolveConfig):
    """Damped fixed-point flow H <- H^{1/2} exp(eta W) H^{1/2}.

    W is the inverse-Laplacian-preconditioned symmetrized residual; robust but
    slow, kept as a cross-check of the Newton scheme.
    """
    H = prob.project_det(_herm(H), ld_target)
    A = (prob.grid.laplacian_matrix() * 0.25).astype(complex)
    lu = spla.splu(A.tocsc(), permc_spec="MMD_AT_PLUS_A")
    res = np.inf
    for itn in range(cfg.max_iter):
        Kd, Rd, Hinv = prob.deflated(H)
        res = float(np.max(np.abs(Rd)))
        if res < cfg.tol:
            return H, itn, res
        S = _herm(Hinv @ Kd)  # h-symmetrized direction, then preconditioned
        W = np.stack([lu.solve(S[:, i, j]) for i in range(prob.r)
                      for j in range(prob.r)], axis=1)
        W = _herm(W.reshape(prob.grid.N, prob.r, prob.r))
        step = -cfg.damping * W
        smax = float(np.max(np.abs(np.linalg.eigvalsh(step))))
        if smax > 0.5:
            step *= 0.5 / smax
        w, V = np.linalg.eigh(H)
        sq = np.einsum("kab,kb,kcb->kac", V, np.sqrt(w), np.conj(V))
        isq = np.einsum("kab,kb,kcb->kac", V, 1.0 / np.sqrt(w), np.conj(V))
        Sig = _herm(isq @ (H @ step + step @ H) @ isq) * 0.5
        H = prob.project_det(_herm(sq @ _expm_herm(Sig) @ sq), ld_target)
    raise NotConverged(f"flow hit max_iter at residual {res:.3e}",
                       SolveStats(cfg.max_iter, res, float("nan")))


# ---------------------------------------------------------------------------
# radial oracle for cyclic fields
# ---------------------------------------------------------------------------

@dataclass
class RadialProfile:
    rho: np.ndarray
    u: np.ndarray
    residual: float
    iterations: int

    def __call__(self, rr):
        return np.interp(rr, self.rho, self.u)


def radial_cyclic_solve(q: ComplexPoly, t: float, boundary_value: float = 0.0,
                        n_radial: int = 513, radius: float = 1.0,
                        tol: float = 1e-10, max_iter: int = 80) -> RadialProfile:
    """Radial profile of the rank-2 cyclic solution for q = c z^k.

    Solves u'' + u'/rho = 4 t^2 (e^{2u} - |q|^2 e^{-2u}) with u'(0) = 0 and
    u(radius) = boundary_value by damped Newton; Dirichlet solutions with
    boundary diag(e^{u_R}, e^{-u_R}) are recovered as diag(e^u, e^{-u}).
    """
    mono = [k for k, c in enumerate(q.coefficients) if c != 0]
    if len(mono) != 1:
        raise PreconditionViolated("radial oracle needs q = c * z^k with c != 0")
    k = mono[0]
    c = abs(q.coefficients[k])
    rho = np.linspace(0.0, radius, n_radial)
    d = rho[1] - rho[0]
    q2 = (c * rho ** k) ** 2

    def solve_at(tt: float, u0: np.ndarray) -> tuple[np.ndarray, float, int]:
        u = u0.copy()
        u[-1] = boundary_value
        i = np.arange(1, n_radial - 1)
        best_res = np.inf
        for itn in range(max_iter):
            F = np.empty(n_radial - 1)
            F[0] = 4 * (u[1] - u[0]) / d ** 2 \
                - 4 * tt ** 2 * (np.exp(2 * u[0]) - q2[0] * np.exp(-2 * u[0]))
            F[1:] = ((u[i + 1] - 2 * u[i] + u[i - 1]) / d ** 2
                     + (u[i + 1] - u[i - 1]) / (2 * d * rho[i])
                     - 4 * tt ** 2 * (np.exp(2 * u[i]) - q2[i] * np.exp(-2 * u[i])))
            res = float(np.max(np.abs(F)))
            if res < tol:
                return u, res, itn
            main = np.empty(n_radial - 1)
            lower = np.empty(n_radial - 2)
            upper = np.empty(n_radial - 2)
            main[0] = -4 / d ** 2 - 8 * tt ** 2 * (np.exp(2 * u[0])
                                                   + q2[0] * np.exp(-2 * u[0]))
            upper[0] = 4 / d ** 2
            main[1:] = -2 / d ** 2 - 8 * tt ** 2 * (np.exp(2 * u[i])
                                                    + q2[i] * np.exp(-2 * u[i]))
            lower[:] = 1 / d ** 2 - 1 / (2 * d * rho[i])
            upper[1:] = 1 / d ** 2 + 1 / (2 * d * rho[i[:-1]])
            A = sp.diags([lower, main, upper], [-1, 0, 1], format="csc")
            du = spla.spsolve(A, -F)
            step = 1.0
            for _ in range(40):
                un = u.copy()
                un[:-1] += step * du
                Fn = np.empty(n_radial - 1)
                Fn[0] = 4 * (un[1] - un[0]) / d ** 2 \
                    - 4 * tt ** 2 * (np.exp(2 * un[0]) - q2[0] * np.exp(-2 * un[0]))
                Fn[1:] = ((un[i + 1] - 2 * un[i] + un[i - 1]) / d ** 2
                          + (un[i + 1] - un[i - 1]) / (2 * d * rho[i])
                          - 4 * tt ** 2 * (np.exp(2 * un[i])
                                           - q2[i] * np.exp(-2 * un[i])))
                resn = float(np.max(np.abs(Fn)))
                if resn < res:
                    break
                step *= 0.5
            u = un
            best_res = min(best_res, resn)
        return u, best_res, max_iter

    u = np.full(n_radial, boundary_value, dtype=float)
    its_total = 0
    for tt in _continuation_stages(t):
        u, res, its = solve_at(tt, u)
        its_total += its
    if res > tol:
        raise NotConverged(f"radial Newton stalled at {res:.2e}",
                           SolveStats(its_total, res, 0.0))
    return RadialProfile(rho, u, res, its_total)


def radial_metric_field(profile: RadialProfile, grid: DiscGrid) -> MetricField:
    """diag(e^u, e^{-u}) sampled on a grid via a spline of the radial profile.

    Cubic interpolation keeps the reconstruction's second differences at the
    profile's truncation level instead of injecting piecewise-linear kinks.
    """
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(profile.rho, profile.u, bc_type=((1, 0.0), "not-a-knot"))
    rr = np.abs(grid.nodes())
    uu = spline(np.clip(rr, profile.rho[0], profile.rho[-1]))
    vals = np.zeros((grid.N, 2, 2), dtype=complex)
    vals[:, 0, 0] = np.exp(uu)
    vals[:, 1, 1] = np.exp(-uu)
    return MetricField(grid, vals, validate=False)


def clip_metric_eigenvalues(field: MetricField, lo: float, hi: float) -> MetricField:
    """Clamp per-node eigenvalues into [lo, hi]; regularizes singular seeds."""
    if not (0 < lo < hi):
        raise PreconditionViolated("need 0 < lo < hi")
    w, V = np.linalg.eigh(field.values)
    w = np.clip(w, lo, hi)
    vals = np.einsum("kab,kb,kcb->kac", V, w.astype(complex), np.conj(V))
    return MetricField(field.grid, _herm(vals), validate=False)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def relative_endomorphism(h0: MetricField, h1: MetricField) -> np.ndarray:
    """s with h1 = h0 . s, i.e. s = M0^{-1} M1 per node."""
    return np.linalg.inv(h0.values) @ h1.values


def _endo_norm_sq(A: np.ndarray, M: np.ndarray, Minv: np.ndarray) -> np.ndarray:
    """|A|_h^2 = tr(A . A^{*h}) with A^{*h} = M^{-1} A^dag M."""
    Astar = Minv @ np.conj(np.transpose(A, (0, 2, 1))) @ M
    return np.real(np.einsum("kab,kba->k", A, Astar))


def trace_identity_check(h0: MetricField, h1: MetricField, hb: HiggsBundleDisc,
                         t: float, pad: int = 2) -> float:
    """Max discrepancy in dzdzbar Tr(s) = |dbar(s) s^{-1/2}|^2 + t^2 |[f,s] s^{-1/2}|^2.

    Both metrics must solve the same discrete problem; the identity is then
    exact up to O(h^2) stencil error. Nodes within ``pad`` lattice steps of
    the boundary are excluded (one-sided closure there is lower order).
    """
    grid = h0.grid
    s = relative_endomorphism(h0, h1)
    # s is the identity on the shared boundary
    bvals = np.broadcast_to(np.eye(h0.rank), (grid.N, 4, h0.rank, h0.rank)).astype(complex)
    Dx, Dy, Lap = grid.first_and_second(s, bvals)
    Dzb = 0.5 * (Dx + 1j * Dy)
    tr_lap = np.real(np.einsum("kaa->k", Lap)) * 0.25
    M0 = h0.values
    M0inv = np.linalg.inv(M0)
    w, V = _herm_sqrt_inv_input(s, M0)
    Vinv = np.linalg.inv(V)
    s_isqrt = np.einsum("kai,ki,kib->kab", V, 1.0 / np.sqrt(np.maximum(w, 1e-300)), Vinv)
    F = hb.f_at(grid.nodes())
    comm = F @ s - s @ F
    rhs = (_endo_norm_sq(Dzb @ s_isqrt, M0, M0inv)
           + t ** 2 * _endo_norm_sq(comm @ s_isqrt, M0, M0inv))
    disc = np.abs(tr_lap - rhs)
    # drop a boundary collar
    dist = np.full(grid.N, np.inf)
    near = np.any(grid.nbr_idx < 0, axis=1)
    dist[near] = 0
    for _ in range(pad):
        nxt = dist.copy()
        for d in range(4):
            m = grid.nbr_idx[:, d] >= 0
            nxt[m] = np.minimum(nxt[m], dist[grid.nbr_idx[m, d]] + 1)
        dist = nxt
    keep = dist > pad - 1
    return float(np.max(disc[keep])) if np.any(keep) else float(np.max(disc))


def _herm_sqrt_inv_input(s: np.ndarray, M0: np.ndarray):
    """Eigen-data of the h0-self-adjoint s, via the Hermitian M0^{1/2} s M0^{-1/2}."""
    w0, V0 = np.linalg.eigh(M0)
    sq = np.einsum("kab,kb,kcb->kac", V0, np.sqrt(w0), np.conj(V0))
    isq = np.einsum("kab,kb,kcb->kac", V0, 1.0 / np.sqrt(w0), np.conj(V0))
    Ssym = _herm(sq @ s @ isq)
    w, V = np.linalg.eigh(Ssym)
    # transport eigenvectors back: s = isq Ssym sq, s^{-1/2} = isq Ssym^{-1/2} sq
    Vback = isq @ V
    return w, Vback


@dataclass
class SimpsonReport:
    sup_higgs_norm: float
    spectral_bound: float
    within_factor: float
    ok: bool


def simpson_sup_check(h: MetricField, hb: HiggsBundleDisc, t: float,
                      region_mask: np.ndarray, factor: float = 4.0) -> SimpsonReport:
    """Compare sup |t f|_h on the region against t * r * max|beta_i|."""
    zs = h.grid.nodes()[region_mask]
    F = hb.f_at(zs)
    M = h.values[region_mask]
    Minv = np.linalg.inv(M)
    norms = np.sqrt(_endo_norm_sq(F, M, Minv))
    sup_tf = t * float(np.max(norms)) if len(zs) else 0.0
    eigs = np.linalg.eigvals(F)
    bound = t * hb.rank * float(np.max(np.abs(eigs))) if len(zs) else 0.0
    ratio = sup_tf / bound if bound > 0 else (0.0 if sup_tf == 0 else np.inf)
    return SimpsonReport(sup_tf, bound, ratio, ratio <= factor)


# ---------------------------------------------------------------------------
# checkpoint serialization (little-endian: int64 n, int64 r, float64 R, data)
# ---------------------------------------------------------------------------

def save_checkpoint(path, field: MetricField) -> None:
    """Flat binary snapshot: header (n, r, R), then row-major node matrices
    as interleaved re/im doubles; off-disc lattice nodes are zero-filled."""
    grid = field.grid
    r = field.rank
    full = grid.to_grid_array(field.values, fill=0.0 + 0j)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qqd", grid.n, r, grid.radius))
        inter = np.empty(full.shape + (2,), dtype="<f8")
        inter[..., 0] = full.real
        inter[..., 1] = full.imag
        fh.write(inter.tobytes())


def load_checkpoint(path, span: float | None = None) -> MetricField:
    with open(path, "rb") as fh:
        n, r, R = struct.unpack("<qqd", fh.read(24))
        data = np.frombuffer(fh.read(), dtype="<f8")
    full = data.reshape(n, n, r, r, 2)
    vals = full[..., 0] + 1j * full[..., 1]
    grid = DiscGrid(n, R, span=span)
    return MetricField(grid, vals[grid.ii, grid.jj], validate=False)
