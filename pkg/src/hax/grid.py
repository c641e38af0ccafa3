"""Masked Cartesian grid on a disc with cut-cell boundary stencils.

Nodes live on a uniform lattice over [-span, span]^2; the disc |z| < radius
is the computational domain. Stencil arms that would leave the disc are cut
at the circle and carry the exact boundary point there (one-point boundary
interpolation, weight 1). Nodes whose cut arm would be shorter than
``demote_frac * h`` are demoted to boundary nodes to keep stencils tame.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import RegionOutsideGrid

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))  # E, W, N, S


class DiscGrid:
    """Disc discretization; all per-node arrays are indexed by interior node."""

    def __init__(self, n: int, radius: float = 1.0, span: float | None = None,
                 demote_frac: float = 0.1):
        if n < 8:
            raise ValueError("grid too coarse")
        self.n = n
        self.radius = float(radius)
        self.span = float(span) if span is not None else float(radius)
        if self.radius > self.span + 1e-15:
            raise ValueError("disc must fit inside the lattice span")
        xs = np.linspace(-self.span, self.span, n)
        self.h = xs[1] - xs[0]
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        self.Z = X + 1j * Y
        inside = np.abs(self.Z) < self.radius
        # demote nodes with a dangerously short cut arm
        keep = inside.copy()
        ii, jj = np.where(inside)
        for i, j in zip(ii, jj):
            x, y = self.Z[i, j].real, self.Z[i, j].imag
            for di, dj in _DIRS:
                i2, j2 = i + di, j + dj
                out_of_lattice = not (0 <= i2 < n and 0 <= j2 < n)
                if out_of_lattice or not inside[i2, j2]:
                    s = self._cut_length(x, y, di, dj)
                    if s < demote_frac * self.h:
                        keep[i, j] = False
        self.interior = keep
        ii, jj = np.where(keep)
        self.ii, self.jj = ii, jj
        self.N = len(ii)
        self.idx = -np.ones(self.Z.shape, dtype=int)
        self.idx[ii, jj] = np.arange(self.N)

        self.arms = np.zeros((self.N, 4))
        self.nbr_idx = -np.ones((self.N, 4), dtype=int)
        self.bnd_pts = np.zeros((self.N, 4), dtype=complex)
        for k in range(self.N):
            i, j = ii[k], jj[k]
            x, y = self.Z[i, j].real, self.Z[i, j].imag
            for d, (di, dj) in enumerate(_DIRS):
                i2, j2 = i + di, j + dj
                in_lattice = 0 <= i2 < n and 0 <= j2 < n
                if in_lattice and keep[i2, j2]:
                    self.arms[k, d] = self.h
                    self.nbr_idx[k, d] = self.idx[i2, j2]
                elif in_lattice and inside[i2, j2]:
                    # demoted node: treated as a boundary sample at its radial
                    # projection onto the circle, one lattice step away
                    zb = self.Z[i2, j2]
                    self.arms[k, d] = self.h
                    self.bnd_pts[k, d] = zb / abs(zb) * self.radius
                else:
                    s = self._cut_length(x, y, di, dj)
                    self.arms[k, d] = max(s, demote_frac * self.h)
                    self.bnd_pts[k, d] = (x + di * s) + 1j * (y + dj * s)
        self._build_stencils()

    def _cut_length(self, x, y, di, dj):
        if di != 0:
            return -x * di + np.sqrt(max(self.radius ** 2 - y * y, 0.0))
        return -y * dj + np.sqrt(max(self.radius ** 2 - x * x, 0.0))

    def _build_stencils(self):
        aE, aW, aN, aS = (self.arms[:, 0], self.arms[:, 1],
                          self.arms[:, 2], self.arms[:, 3])
        # second derivative: u'' ~ 2 [a_m u_p + a_p u_m - (a_p+a_m) u_0] / (a_p a_m (a_p+a_m))
        self.c2 = np.stack([2 / (aE * (aE + aW)), 2 / (aW * (aE + aW)),
                            2 / (aN * (aN + aS)), 2 / (aS * (aN + aS))], axis=1)
        self.c20 = -2 / (aE * aW) - 2 / (aN * aS)
        # first derivative: u' ~ [a_m^2 u_p - a_p^2 u_m + (a_p^2-a_m^2) u_0] / (a_p a_m (a_p+a_m))
        self.c1 = np.stack([aW / (aE * (aE + aW)), -aE / (aW * (aE + aW)),
                            aS / (aN * (aN + aS)), -aN / (aS * (aN + aS))], axis=1)
        self.c10 = np.stack([(aE - aW) / (aE * aW), (aN - aS) / (aN * aS)], axis=1)

    # -- basic queries --------------------------------------------------
    def nodes(self) -> np.ndarray:
        """Interior node coordinates, shape (N,)."""
        return self.Z[self.ii, self.jj]

    def boundary_samples(self):
        """(points on the circle, weights) for every cut arm; weights are 1."""
        mask = self.nbr_idx < 0
        return self.bnd_pts[mask], np.ones(int(mask.sum()))

    def cell_area(self) -> float:
        return float(self.h * self.h)

    def to_grid_array(self, values: np.ndarray, fill=np.nan) -> np.ndarray:
        """Scatter per-node values back onto the (n, n) lattice."""
        shape = (self.n, self.n) + values.shape[1:]
        out = np.full(shape, fill, dtype=values.dtype)
        out[self.ii, self.jj] = values
        return out

    # -- differential operators -----------------------------------------
    def neighbor_values(self, F: np.ndarray, d: int, bvals: np.ndarray) -> np.ndarray:
        """Values of field F at the d-direction stencil endpoint per node."""
        kidx = self.nbr_idx[:, d]
        safe = np.maximum(kidx, 0)
        out = F[safe].copy()
        miss = kidx < 0
        out[miss] = bvals[miss, d]
        return out

    def first_and_second(self, F: np.ndarray, bvals: np.ndarray):
        """(Dx, Dy, Lap) of a per-node field, cut-cell corrected.

        F has shape (N, ...); bvals has shape (N, 4, ...) holding the boundary
        values at cut-arm endpoints (ignored where the neighbor is interior).
        """
        FE = self.neighbor_values(F, 0, bvals)
        FW = self.neighbor_values(F, 1, bvals)
        FN = self.neighbor_values(F, 2, bvals)
        FS = self.neighbor_values(F, 3, bvals)
        extra = (1,) * (F.ndim - 1)
        c1 = self.c1.reshape(self.N, 4, *extra)
        c10 = self.c10.reshape(self.N, 2, *extra)
        c2 = self.c2.reshape(self.N, 4, *extra)
        c20 = self.c20.reshape(self.N, *extra)
        Dx = c1[:, 0] * FE + c1[:, 1] * FW + c10[:, 0] * F
        Dy = c1[:, 2] * FN + c1[:, 3] * FS + c10[:, 1] * F
        Lap = (c2[:, 0] * FE + c2[:, 1] * FW + c2[:, 2] * FN + c2[:, 3] * FS
               + c20 * F)
        return Dx, Dy, Lap

    def laplacian_matrix(self) -> sp.csc_matrix:
        """Sparse cut-cell Laplacian on interior nodes (boundary folded out)."""
        rows, cols, vals = [], [], []
        kr = np.arange(self.N)
        rows.append(kr); cols.append(kr); vals.append(self.c20)
        for d in range(4):
            m = self.nbr_idx[:, d] >= 0
            rows.append(kr[m]); cols.append(self.nbr_idx[m, d]); vals.append(self.c2[m, d])
        return sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.N, self.N)).tocsc()

    def harmonic_extension(self, boundary_fun) -> np.ndarray:
        """Solve Lap u = 0 with u = boundary_fun on the circle (cut-cell 5pt)."""
        rhs = np.zeros(self.N)
        for d in range(4):
            m = self.nbr_idx[:, d] < 0
            if np.any(m):
                vals = np.array([boundary_fun(z) for z in self.bnd_pts[m, d]],
                                dtype=float)
                rhs[m] -= self.c2[m, d] * vals
        A = self.laplacian_matrix()
        return spla.spsolve(A, rhs)


@dataclass(frozen=True)
class AnnulusRegion:
    """r_in <= |z - center| <= r_out."""

    r_in: float
    r_out: float
    center: complex = 0j

    def __post_init__(self):
        if not (0 <= self.r_in < self.r_out):
            raise ValueError("need 0 <= r_in < r_out")

    def contains(self, z) -> np.ndarray:
        d = np.abs(np.asarray(z) - self.center)
        return (d >= self.r_in) & (d <= self.r_out)

    def mask(self, grid: DiscGrid) -> np.ndarray:
        m = self.contains(grid.nodes())
        if not np.any(m):
            raise RegionOutsideGrid("region contains no interior grid nodes")
        if self.r_out > grid.radius + 1e-12 or abs(self.center) + self.r_out > grid.radius + grid.h:
            raise RegionOutsideGrid("region reaches outside the grid disc")
        return m


@dataclass(frozen=True)
class DiscRegion:
    """|z - center| <= r_out."""

    r_out: float
    center: complex = 0j

    def contains(self, z) -> np.ndarray:
        return np.abs(np.asarray(z) - self.center) <= self.r_out

    def mask(self, grid: DiscGrid) -> np.ndarray:
        m = self.contains(grid.nodes())
        if not np.any(m):
            raise RegionOutsideGrid("region contains no interior grid nodes")
        return m
