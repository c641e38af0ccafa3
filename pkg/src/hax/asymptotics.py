"""Experiment layer: t-sweeps, decay fits, cutoff patching, weight estimates.

Everything here consumes the solver and pairing modules and produces
ConvergenceReport records that serialize to JSON/CSV for the CLI.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

import numpy as np

from .errors import (DegeneratePoint, InsufficientRadii, NonPositiveError,
                     NotConverged, NotPositive, PreconditionViolated,
                     RegionOutsideGrid)
from .grid import AnnulusRegion, DiscGrid
from .higgs import HiggsBundleDisc, branch_locus, cyclic_higgs
from .pairing import (SymmetricPairingField, compatibility_defect,
                      decoupled_metric_from_pairing, decoupled_metric_values)
from .poly import ComplexPoly
from .solver import (MetricField, SolveConfig, SolveStats, hitchin_residual,
                     relative_endomorphism, solve_dirichlet)

DEFAULT_SCHEDULE = (4.0, 5.66, 8.0, 11.3, 16.0, 22.6, 32.0)


@dataclass(frozen=True)
class TSchedule:
    values: tuple[float, ...] = DEFAULT_SCHEDULE

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        object.__setattr__(self, "values", v)
        if any(x <= 0 for x in v) or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("schedule must be strictly increasing and positive")


@dataclass(frozen=True)
class RateFit:
    C: float
    epsilon: float
    r_squared: float
    n_points: int = 0
    degenerate: bool = False


def rate_fit(points: Sequence[tuple[float, float]]) -> RateFit:
    """OLS of log(err) against t: err ~ C exp(-epsilon t)."""
    if len(points) < 3:
        raise PreconditionViolated("rate fit needs at least 3 points")
    ts = np.array([p[0] for p in points], dtype=float)
    errs = np.array([p[1] for p in points], dtype=float)
    if np.any(errs <= 0):
        raise NonPositiveError("errors must be positive for a log fit")
    y = np.log(errs)
    A = np.vstack([np.ones_like(ts), ts]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    eps = -float(coef[1])
    degenerate = ss_tot < 1e-20 or abs(eps) < 1e-12
    return RateFit(float(np.exp(coef[0])), eps, r2, len(points), degenerate)


@dataclass
class ComparisonNorms:
    s_field: np.ndarray
    sup: float
    l2: float
    l2_1: float
    l2_2: float


def metric_comparison(h_ref: MetricField, h: MetricField, region) -> ComparisonNorms:
    """Norms of s - id on the region, s = M_ref^{-1} M nodewise.

    Discrete Sobolev norms use centered differences of s up to second order;
    stencil arms that exit the region are dropped from the derivative sums.
    """
    if h_ref.grid is not h.grid and h_ref.grid.N != h.grid.N:
        raise PreconditionViolated("metrics must share a grid")
    grid = h.grid
    mask = region.mask(grid)
    s = relative_endomorphism(h_ref, h)
    r = h.rank
    dev = s - np.eye(r)
    node_sup = np.linalg.norm(dev, ord=2, axis=(1, 2))
    node_fro2 = np.sum(np.abs(dev) ** 2, axis=(1, 2))
    area = grid.cell_area()
    sup = float(np.max(node_sup[mask]))
    l2_sq = float(np.sum(node_fro2[mask]) * area)
    # first and second centered differences, masked to in-region neighbors
    d1_sq, d2_sq = _masked_derivative_norms(grid, dev, mask)
    l2_1_sq = l2_sq + d1_sq * area
    l2_2_sq = l2_1_sq + d2_sq * area
    return ComparisonNorms(s, sup, np.sqrt(l2_sq), np.sqrt(l2_1_sq), np.sqrt(l2_2_sq))


def _masked_derivative_norms(grid: DiscGrid, dev: np.ndarray, mask: np.ndarray):
    h = grid.h
    d1_sq = 0.0
    d2_sq = 0.0
    idxE, idxW = grid.nbr_idx[:, 0], grid.nbr_idx[:, 1]
    idxN, idxS = grid.nbr_idx[:, 2], grid.nbr_idx[:, 3]

    def ok(idx):
        good = idx >= 0
        good[good] = mask[idx[good]]
        return good

    for ida, idb in ((idxE, idxW), (idxN, idxS)):
        both = mask & ok(ida) & ok(idb)
        if np.any(both):
            diff = (dev[ida[both]] - dev[idb[both]]) / (2 * h)
            d1_sq += float(np.sum(np.abs(diff) ** 2))
            second = (dev[ida[both]] - 2 * dev[both] + dev[idb[both]]) / h ** 2
            d2_sq += float(np.sum(np.abs(second) ** 2))
    # mixed second derivative via first differences of first differences
    bothx = mask & ok(idxE) & ok(idxW)
    if np.any(bothx):
        dx = np.zeros_like(dev)
        dx[bothx] = (dev[idxE[bothx]] - dev[idxW[bothx]]) / (2 * h)
        bothxy = bothx & ok(idxN) & ok(idxS)
        bothxy[bothxy] &= bothx[idxN[bothxy]] & bothx[idxS[bothxy]]
        if np.any(bothxy):
            dxy = (dx[idxN[bothxy]] - dx[idxS[bothxy]]) / (2 * h)
            d2_sq += float(np.sum(np.abs(dxy) ** 2))
    return d1_sq, d2_sq


def off_diagonal_decay(h: MetricField, hb: HiggsBundleDisc, region,
                       gap_tol: float | None = None) -> float:
    """Max over the region of |h(e_i, e_j)| / (|e_i|_h |e_j|_h), i != j."""
    grid = h.grid
    mask = region.mask(grid)
    zs = grid.nodes()[mask]
    threshold = hb.gap_tolerance() if gap_tol is None else gap_tol
    F = hb.f_at(zs)
    w, V = np.linalg.eig(F)
    r = hb.rank
    gaps = np.full(len(zs), np.inf)
    for i in range(r):
        for j in range(i + 1, r):
            gaps = np.minimum(gaps, np.abs(w[:, i] - w[:, j]))
    if np.any(gaps < threshold):
        raise DegeneratePoint("region touches the branch locus")
    M = h.values[mask]
    G = np.einsum("kia,kij,kjb->kab", np.conj(V), M, V)  # h(e_b, e_a)
    diag = np.sqrt(np.real(np.einsum("kaa->ka", G)))
    ratio = 0.0
    for i in range(r):
        for j in range(r):
            if i != j:
                ratio = max(ratio, float(np.max(np.abs(G[:, i, j])
                                                / (diag[:, i] * diag[:, j]))))
    return ratio


def sheet_diagonal_spread(s_field: np.ndarray, h_grid: DiscGrid,
                          hb: HiggsBundleDisc, loop_center: complex,
                          loop_radius: float, n_samples: int = 256) -> float:
    """Transport the eigenframe labels around a loop; return the max spread
    |s_ii - s_jj| over index pairs exchanged by the monodromy."""
    angles = np.linspace(0.0, 2 * np.pi, n_samples, endpoint=False)
    zs = loop_center + loop_radius * np.exp(1j * angles)
    F = hb.f_at(zs)
    w, V = np.linalg.eig(F)
    r = hb.rank
    # continuous labeling by nearest-eigenvalue matching
    perm_total = np.arange(r)
    labels = [np.arange(r)]
    for k in range(1, n_samples + 1):
        prev = w[(k - 1) % n_samples][labels[-1]]
        cur = w[k % n_samples]
        taken = np.full(r, False)
        lab = np.zeros(r, dtype=int)
        for i in range(r):
            order = np.argsort(np.abs(cur - prev[i]))
            for j in order:
                if not taken[j]:
                    lab[i] = j
                    taken[j] = True
                    break
        labels.append(lab if k < n_samples else lab)
        if k == n_samples:
            perm_total = lab
    exchanged = [(i, int(perm_total[i])) for i in range(r) if perm_total[i] != i]
    if not exchanged:
        return 0.0
    ev = _field_evaluator(h_grid, s_field)
    spread = 0.0
    for k in range(n_samples):
        S = ev(zs[k])
        lab = labels[k]
        Vk = V[k][:, lab]
        Sk = np.linalg.inv(Vk) @ S @ Vk
        for i, j in exchanged:
            spread = max(spread, float(abs(Sk[i, i] - Sk[j, j])))
    return spread


def _field_evaluator(grid: DiscGrid, field_vals: np.ndarray):
    def at(z: complex) -> np.ndarray:
        i = int(round((z.real + grid.span) / grid.h))
        j = int(round((z.imag + grid.span) / grid.h))
        k = grid.idx[min(max(i, 0), grid.n - 1), min(max(j, 0), grid.n - 1)]
        if k < 0:
            k = int(np.argmin(np.abs(grid.nodes() - z)))
        return field_vals[k]

    return at


@dataclass(frozen=True)
class CutoffProfile:
    """Quintic smoothstep in |zeta|: 1 below inner, 0 above outer, C^2."""

    inner: float = 0.5
    outer: float = 2.0 / 3.0

    def __post_init__(self):
        if not (0 < self.inner < self.outer):
            raise ValueError("need 0 < inner < outer")

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        x = np.clip((rho - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        smooth = x ** 3 * (10 - 15 * x + 6 * x ** 2)
        return 1.0 - smooth


def build_cutoff(inner: float, outer: float) -> CutoffProfile:
    return CutoffProfile(inner, outer)


def build_approximate_solution(h_limit: MetricField, h_inner: MetricField,
                               chi: CutoffProfile, hb: HiggsBundleDisc,
                               t: float) -> tuple[MetricField, dict]:
    """Patch an inner solve into the decoupled limit through the cutoff.

    Works in the eigenframe of the cyclic field pulled back through
    zeta = z^{1/r}: off-diagonal eigenframe entries are scaled by chi,
    diagonal ones are log-interpolated, and the determinant is restored
    exactly by a 1/r-power correction. Outside the cutoff band the output
    equals h_limit; strictly inside it equals h_inner.
    """
    grid = h_limit.grid
    r = hb.rank
    if h_inner.grid.n != grid.n or h_inner.grid.span != grid.span:
        raise PreconditionViolated("inner solve must live on the same lattice")
    zs = grid.nodes()
    zeta_abs = np.abs(zs) ** (1.0 / r)
    chivals = chi(zeta_abs)
    inner_at = {(h_inner.grid.ii[k], h_inner.grid.jj[k]): k
                for k in range(h_inner.grid.N)}
    vals = h_limit.values.copy()
    band = (chivals > 0) & (chivals < 1)
    core = chivals >= 1
    F = hb.f_at(zs)
    w, V = np.linalg.eig(F)
    for k in range(grid.N):
        if chivals[k] <= 0:
            continue
        key = (grid.ii[k], grid.jj[k])
        if key not in inner_at:
            raise PreconditionViolated("inner solve does not cover the cutoff support")
        Mi = h_inner.values[inner_at[key]]
        if chivals[k] >= 1:
            vals[k] = Mi
            continue
        P = V[k]
        Pinv = np.linalg.inv(P)
        Gi = P.conj().T @ Mi @ P
        Gl = P.conj().T @ h_limit.values[k] @ P
        c = chivals[k]
        G = c * Gi + 0j
        for i in range(r):
            for j in range(r):
                if i == j:
                    G[i, i] = np.exp(c * np.log(np.real(Gi[i, i]))
                                     + (1 - c) * np.log(np.real(Gl[i, i])))
                else:
                    G[i, j] = c * Gi[i, j]
        M = Pinv.conj().T @ G @ Pinv
        M = 0.5 * (M + M.conj().T)
        if np.min(np.linalg.eigvalsh(M)) <= 0:
            raise NotPositive("interpolated metric left the positive cone")
        vals[k] = M
    # exact determinant correction towards the limit metric
    ld = np.linalg.slogdet(vals)[1]
    ld_ref = h_limit.log_det()
    vals = vals * np.exp((ld_ref - ld) / r)[:, None, None]
    out = MetricField(grid, vals, validate=False)
    Rfield, sup, l1 = hitchin_residual(out, hb, t)
    band_pad = band.copy()
    for d in range(4):
        m = grid.nbr_idx[:, d] >= 0
        band_pad[m] |= band[grid.nbr_idx[m, d]]
    node_norm = np.max(np.abs(Rfield), axis=(1, 2))
    report = {
        "residual_sup": sup,
        "residual_l1": l1,
        "band_l1": float(np.sum(node_norm[band_pad]) * grid.cell_area()),
        "band_mask": band_pad,
        "core_mask": core,
        "chi": chivals,
    }
    return out, report


def weights_from_metric(h, section: Sequence[ComplexPoly], center: complex = 0j,
                        radii: tuple[float, float] = (0.05, 0.2),
                        n_radii: int = 12, n_angles: int = 32):
    """Least-squares growth order of log|section|_h against log|z|.

    ``h`` is a callable z -> Gram matrix or a MetricField (sampled nearest
    node). Returns (weight, slope, lattice_shift) with the weight reduced
    into (-1, 0]; the raw slope satisfies weight = -slope + shift.
    """
    if isinstance(h, MetricField):
        h_at = h.evaluator()
    else:
        h_at = h
    secs = [p if isinstance(p, ComplexPoly) else ComplexPoly.const(p) for p in section]
    rr = np.linspace(radii[0], radii[1], n_radii)
    if len(rr) < 3:
        raise InsufficientRadii("need at least 3 radii")
    logr, lognorm = [], []
    for rad in rr:
        vals = []
        for ang in np.linspace(0, 2 * np.pi, n_angles, endpoint=False):
            z = center + rad * np.exp(1j * ang)
            v = np.array([p(z) for p in secs])
            M = h_at(z)
            nrm = np.real(np.conj(v) @ M @ v)
            if nrm <= 0:
                raise NonPositiveError("section norm not positive")
            vals.append(0.5 * np.log(nrm))
        logr.append(np.log(rad))
        lognorm.append(float(np.mean(vals)))
    A = np.vstack([np.ones(len(logr)), np.array(logr)]).T
    coef, *_ = np.linalg.lstsq(A, np.array(lognorm), rcond=None)
    slope = float(coef[1])
    weight = -slope
    shift = 0
    while weight > 0:
        weight -= 1
        shift += 1
    while weight <= -1:
        weight += 1
        shift -= 1
    return weight, slope, shift


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

@dataclass
class ExperimentUnit:
    """One solved Higgs datum: reference metric, region, schedule, grid."""

    hb: HiggsBundleDisc
    pairing: SymmetricPairingField | None
    grid: DiscGrid
    region: AnnulusRegion
    schedule: TSchedule
    boundary: Callable[[complex], np.ndarray]
    mode: str = "symmetric"          # symmetric | generic
    solver: SolveConfig = field(default_factory=SolveConfig)


@dataclass
class TRecord:
    t: float
    sup_err: float
    l2_err: float
    l2_1_err: float
    l2_2_err: float
    offdiag_max: float
    compat_defect: float
    solver_iterations: int = 0
    solver_residual: float = 0.0
    raw_residual_sup: float = 0.0
    det_drift: float = 0.0
    failed: bool = False
    message: str = ""


@dataclass
class ConvergenceReport:
    schedule: tuple[float, ...]
    records: list[TRecord]
    fits: dict[str, RateFit]
    mode: str
    grid_n: int
    region: tuple[float, float]
    config_hash: str = ""
    tool_version: str = ""
    cauchy_decreasing: bool | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "schedule": list(self.schedule),
            "records": [asdict(r) for r in self.records],
            "fits": {k: asdict(v) for k, v in self.fits.items()},
            "mode": self.mode,
            "grid_n": self.grid_n,
            "region": list(self.region),
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "cauchy_decreasing": self.cauchy_decreasing,
            "notes": self.notes,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["t,sup_err,l2_err,l2_1_err,l2_2_err,offdiag,compat_defect"]
        for r in self.records:
            lines.append(",".join(_csv_num(x) for x in
                                  (r.t, r.sup_err, r.l2_err, r.l2_1_err,
                                   r.l2_2_err, r.offdiag_max, r.compat_defect)))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_json(text: str) -> "ConvergenceReport":
        d = json.loads(text)
        records = [TRecord(**r) for r in d["records"]]
        fits = {k: RateFit(**v) for k, v in d["fits"].items()}
        return ConvergenceReport(tuple(d["schedule"]), records, fits, d["mode"],
                                 d["grid_n"], tuple(d["region"]),
                                 d.get("config_hash", ""), d.get("tool_version", ""),
                                 d.get("cauchy_decreasing"), d.get("notes", []))


def _csv_num(x: float) -> str:
    return format(float(x), ".12e")


def run_schedule(unit: ExperimentUnit, drop_first_in_fit: bool = True,
                 retries: int = 3) -> ConvergenceReport:
    """Solve along the schedule with warm starts and assemble the report.

    Symmetric mode compares against h^C; generic mode (no pairing reference)
    compares against the last metric in the schedule.
    """
    grid = unit.grid
    if unit.pairing is not None and unit.mode == "symmetric":
        dec = decoupled_metric_from_pairing(unit.hb, unit.pairing, grid)
        h_ref = dec.field
    else:
        h_ref = None
    solved: list[tuple[float, MetricField, SolveStats]] = []
    failures: list[TRecord] = []
    prev: MetricField | None = None
    for t in unit.schedule.values:
        cfg = unit.solver
        attempt = 0
        while True:
            try:
                h_t, stats = solve_dirichlet(unit.hb, t, unit.boundary, cfg,
                                             grid=grid, init=prev)
                break
            except NotConverged as exc:
                attempt += 1
                if attempt > retries:
                    failures.append(TRecord(t, *(np.nan,) * 6, failed=True,
                                            message=str(exc)))
                    h_t = None
                    break
                cfg = SolveConfig(cfg.tol, cfg.max_iter * 2, cfg.damping / 2,
                                  cfg.scheme)
        if h_t is None:
            continue
        prev = h_t
        solved.append((t, h_t, stats))
    if h_ref is None and solved:
        h_ref = solved[-1][1]
    records: list[TRecord] = []
    for t, h_t, stats in solved:
        records.append(_measure(unit, h_t, stats, t, h_ref))
    records.extend(failures)
    records.sort(key=lambda r: r.t)
    fits = {}
    good = [r for r in records if not r.failed]
    use = good[1:] if drop_first_in_fit and len(good) > 3 else good
    for key, attr in (("sup", "sup_err"), ("l2", "l2_err"),
                      ("l2_1", "l2_1_err"), ("l2_2", "l2_2_err"),
                      ("offdiag", "offdiag_max")):
        pts = [(r.t, getattr(r, attr)) for r in use
               if np.isfinite(getattr(r, attr)) and getattr(r, attr) > 0]
        if len(pts) >= 3:
            try:
                fits[key] = rate_fit(pts)
            except NonPositiveError:
                pass
    cauchy = None
    if unit.mode == "generic" and len(solved) >= 3:
        m = unit.region.mask(grid)
        diffs = []
        for (_, a, _s1), (_, b, _s2) in zip(solved, solved[1:]):
            s = relative_endomorphism(a, b)
            diffs.append(float(np.max(np.linalg.norm(
                s[m] - np.eye(unit.hb.rank), ord=2, axis=(1, 2)))))
        cauchy = all(d2 < d1 * 1.05 for d1, d2 in zip(diffs, diffs[1:]))
    return ConvergenceReport(unit.schedule.values, records, fits, unit.mode,
                             grid.n, (unit.region.r_in, unit.region.r_out),
                             cauchy_decreasing=cauchy)


def _measure(unit: ExperimentUnit, h_t: MetricField, stats: SolveStats,
             t: float, h_ref: MetricField) -> TRecord:
    cmp_ = metric_comparison(h_ref, h_t, unit.region)
    off = off_diagonal_decay(h_t, unit.hb, unit.region)
    defect = (compatibility_defect(h_t, unit.pairing)
              if unit.pairing is not None else float("nan"))
    return TRecord(t, cmp_.sup, cmp_.l2, cmp_.l2_1, cmp_.l2_2, off, defect,
                   stats.iterations, stats.final_residual,
                   stats.raw_residual_sup, stats.det_drift)


def convergence_experiment(hb: HiggsBundleDisc, pairing: SymmetricPairingField | None,
                           grid: DiscGrid, region: AnnulusRegion,
                           schedule: TSchedule, boundary=None,
                           mode: str = "symmetric",
                           solver: SolveConfig | None = None) -> ConvergenceReport:
    """End-to-end sweep. In symmetric mode the reference is h^C and the
    default boundary is its restriction to the circle; generic mode compares
    consecutive solutions (Cauchy diagnostic, flagged heuristic)."""
    if mode == "symmetric":
        if pairing is None:
            raise PreconditionViolated("symmetric mode needs a pairing")
        if boundary is None:
            boundary = boundary_from_pairing(hb, pairing)
    elif mode == "generic":
        if boundary is None:
            raise PreconditionViolated("generic mode needs explicit boundary data")
    else:
        raise PreconditionViolated(f"unknown mode {mode!r}")
    _require_region_regular(hb, region)
    unit = ExperimentUnit(hb, pairing, grid, region, schedule, boundary,
                          mode, solver or SolveConfig())
    report = run_schedule(unit)
    if mode == "generic":
        report.notes.append("generic-mode Cauchy check is a heuristic diagnostic")
    return report


def boundary_from_pairing(hb: HiggsBundleDisc, pairing: SymmetricPairingField,
                          radius: float | None = None):
    """Boundary callable sampling h^C on the circle."""
    R = radius if radius is not None else hb.domain_radius

    def at(z: complex) -> np.ndarray:
        zz = np.array([z if abs(z) > 0 else R + 0j])
        vals, _, valid = decoupled_metric_values(hb, pairing, zz)
        if not valid[0]:
            raise DegeneratePoint(f"boundary point {z} at branch locus")
        return vals[0]

    return at


def _require_region_regular(hb: HiggsBundleDisc, region: AnnulusRegion,
                            margin: float = 0.02) -> None:
    locus = branch_locus(hb, 1e-8)
    for p in locus.points:
        if region.contains(np.array([p]))[0]:
            raise PreconditionViolated(f"branch point {p} inside region")
        d = abs(p - region.center)
        if region.r_in - margin < d < region.r_out + margin:
            raise PreconditionViolated(f"branch point {p} within margin of region")


def family_sweep(family: Sequence[tuple[str, HiggsBundleDisc, SymmetricPairingField]],
                 grid: DiscGrid, region: AnnulusRegion, schedule: TSchedule,
                 solver: SolveConfig | None = None, workers: int = 1):
    """Per-member convergence experiments on a shared grid; min fitted epsilon.

    Family members are (label, Higgs field, pairing) triples; regions are
    validated against every member's branch locus before any solve.
    """
    for _, hb, _C in family:
        _require_region_regular(hb, region)
    results: list[tuple[str, ConvergenceReport]] = []
    if workers > 1 and len(family) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(workers, len(family))) as ex:
            futs = [ex.submit(_family_member, label, hb, C, grid.n, grid.radius,
                              grid.span, region, schedule, solver)
                    for label, hb, C in family]
            results = [f.result() for f in futs]
    else:
        for label, hb, C in family:
            results.append(_family_member(label, hb, C, grid.n, grid.radius,
                                          grid.span, region, schedule, solver))
    eps_values = []
    for label, rep in results:
        if "sup" in rep.fits:
            eps_values.append(rep.fits["sup"].epsilon)
    min_eps = min(eps_values) if eps_values else float("nan")
    return results, min_eps


def _family_member(label, hb, C, n, radius, span, region, schedule, solver):
    grid = DiscGrid(n, radius, span=span)
    rep = convergence_experiment(hb, C, grid, region, schedule, solver=solver)
    return label, rep


def cyclic_benchmark_unit(q: ComplexPoly | None = None, r: int = 2, n: int = 128,
                          region: AnnulusRegion | None = None,
                          schedule: TSchedule | None = None):
    """The standard benchmark: cyclic field, antidiagonal pairing."""
    from .pairing import antidiagonal_pairing

    q = q if q is not None else ComplexPoly.z()
    hb = cyclic_higgs(r, q)
    C = antidiagonal_pairing(r)
    grid = DiscGrid(n, hb.domain_radius)
    region = region or AnnulusRegion(0.25, 0.5)
    schedule = schedule or TSchedule()
    return hb, C, grid, region, schedule
