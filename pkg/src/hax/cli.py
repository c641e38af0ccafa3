"""hax command line: spectral / filtered / solve / sweep / report.

Every run embeds the config hash and tool version in its outputs; identical
configs produce byte-identical JSON/CSV/SVG.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (TSchedule, boundary_from_pairing, convergence_experiment,
                          family_sweep)
from .config import ExperimentConfig, parse_config
from .errors import HaxError, ParseError
from .filtered import (FilteredLocal, RamifiedCoverSpec, StarExtensionInput,
                       canonical_pairing_filtration, descent_filtration,
                       filtered_degree, pairing_pole_check, parity_check,
                       pullback_filtration, pushforward_degree, star_extension)
from .grid import DiscGrid
from .higgs import branch_locus, eigen_frame
from .solver import save_checkpoint, solve_dirichlet


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hax", description="Hitchin-equation laboratory on the disc")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("spectral", "print branch locus and eigen data"),
                        ("solve", "run one Dirichlet solve and write a checkpoint"),
                        ("sweep", "run a convergence or family sweep (JSON+CSV)")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override config key, e.g. --set grid.n=64")
        if name == "solve":
            p.add_argument("--t", type=float, default=None,
                           help="coupling value (default: first schedule entry)")

    p = sub.add_parser("filtered", help="exact filtered-structure calculus")
    p.add_argument("--json", required=True,
                   help="JSON request (inline or a file path)")

    p = sub.add_parser("report", help="render an SVG decay plot from a sweep JSON")
    p.add_argument("report_json", help="path to a sweep JSON report")
    p.add_argument("--out", default=None, help="output SVG path")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "filtered":
        return _cmd_filtered(args)
    if args.command == "report":
        return _cmd_report(args)
    cfg = _load_config(args)
    if args.command == "spectral":
        return _cmd_spectral(cfg)
    if args.command == "solve":
        return _cmd_solve(cfg, args.t)
    if args.command == "sweep":
        return _cmd_sweep(cfg)
    raise AssertionError(args.command)


def _load_config(args) -> ExperimentConfig:
    text = Path(args.config).read_text()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ParseError(f"--set expects K=V, got {item!r}")
        k, _, v = item.partition("=")
        overrides[k.strip()] = v.strip()
    return parse_config(text, overrides)


def _cmd_spectral(cfg: ExperimentConfig) -> int:
    hb = cfg.higgs()
    locus = branch_locus(hb, 1e-8)
    print(f"# hax {__version__} config {cfg.config_hash()}")
    print(f"rank {hb.rank}, domain radius {hb.domain_radius}")
    print(f"branch points ({len(locus.points)}):")
    for p in locus.points:
        print(f"  {p.real:+.12f} {p.imag:+.12f}i")
    for z0 in (0.5 + 0j, 0.25 + 0.25j):
        try:
            s = eigen_frame(hb, z0)
            eig_str = ", ".join(f"{w.real:+.6f}{w.imag:+.6f}i" for w in s.eigenvalues)
            print(f"eigenvalues at z={z0}: [{eig_str}] (gap {s.min_gap:.3e})")
        except HaxError as exc:
            print(f"eigenframe at z={z0}: {exc}")
    return 0


def _cmd_solve(cfg: ExperimentConfig, t: float | None) -> int:
    hb = cfg.higgs()
    pairing = cfg.pairing()
    tval = t if t is not None else cfg.schedule.values[0]
    grid = DiscGrid(cfg.n, cfg.radius)
    boundary = boundary_from_pairing(hb, pairing)
    h, stats = solve_dirichlet(hb, tval, boundary, cfg.solver, grid=grid)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{cfg.label}_t{tval:g}.haxckpt"
    save_checkpoint(path, h)
    print(f"# hax {__version__} config {cfg.config_hash()}")
    print(f"t={tval:g}: iterations={stats.iterations} "
          f"residual={stats.final_residual:.3e} det_drift={stats.det_drift:.3e}")
    print(f"checkpoint written to {path}")
    return 0


def _cmd_sweep(cfg: ExperimentConfig) -> int:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "family":
        family = []
        for x in cfg.family_values:
            hb = cfg.higgs(shift=x)
            family.append((f"x={x.real:g}", hb, cfg.pairing()))
        grid = DiscGrid(cfg.n, cfg.radius)
        results, min_eps = family_sweep(family, grid, cfg.region, cfg.schedule,
                                        solver=cfg.solver, workers=_workers(cfg))
        payload = {"config_hash": cfg.config_hash(), "tool_version": __version__,
                   "min_epsilon": min_eps, "members": {}}
        for label, rep in results:
            rep.config_hash = cfg.config_hash()
            rep.tool_version = __version__
            payload["members"][label] = json.loads(rep.to_json())
            (out_dir / f"{cfg.label}_{label}.csv").write_text(rep.to_csv())
        jpath = out_dir / f"{cfg.label}_family.json"
        jpath.write_text(json.dumps(payload, indent=2, sort_keys=True))
        print(f"# hax {__version__} config {cfg.config_hash()}")
        print(f"family sweep: min fitted epsilon = {min_eps:.6f}")
        print(f"report written to {jpath}")
        return 0
    hb = cfg.higgs()
    pairing = cfg.pairing() if cfg.mode == "symmetric" else None
    grid = DiscGrid(cfg.n, cfg.radius)
    boundary = None
    if cfg.mode == "generic":
        base = cfg.pairing()
        bnd0 = boundary_from_pairing(hb, base)
        rng = np.random.default_rng(cfg.seed)
        P = rng.normal(size=(cfg.rank, cfg.rank)) * 0.1
        P = np.eye(cfg.rank) + 0.5 * (P + P.T)

        def boundary(z, _bnd0=bnd0, _P=P):
            return _P @ _bnd0(z) @ _P.T

    rep = convergence_experiment(hb, pairing, grid, cfg.region, cfg.schedule,
                                 boundary=boundary, mode=cfg.mode,
                                 solver=cfg.solver)
    rep.config_hash = cfg.config_hash()
    rep.tool_version = __version__
    jpath = out_dir / f"{cfg.label}.json"
    cpath = out_dir / f"{cfg.label}.csv"
    jpath.write_text(rep.to_json())
    cpath.write_text(rep.to_csv())
    print(f"# hax {__version__} config {cfg.config_hash()}")
    for key, fit in sorted(rep.fits.items()):
        print(f"fit[{key}]: C={fit.C:.4g} epsilon={fit.epsilon:.4f} "
              f"R2={fit.r_squared:.4f}")
    print(f"reports written to {jpath} and {cpath}")
    return 0


def _workers(cfg: ExperimentConfig) -> int:
    env = os.environ.get("HAX_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParseError(f"HAX_WORKERS must be an integer, got {env!r}")
    return cfg.workers


# ---------------------------------------------------------------------------
# filtered subcommand: exact fractions in, exact fractions out
# ---------------------------------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise ParseError(f"exact fraction expected, got {x!r}")


def _fmt_frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _filtered_from_payload(d: dict) -> FilteredLocal:
    jumps = tuple((_frac(w), int(m)) for w, m in d["jumps"])
    return FilteredLocal(int(d["rank"]), jumps,
                         base_degree=_frac(d.get("base_degree", 0)),
                         cover_order=int(d.get("cover_order", 1)),
                         characters=(tuple(int(c) for c in d["characters"])
                                     if d.get("characters") else None))


def _cmd_filtered(args) -> int:
    raw = args.json
    if os.path.exists(raw):
        raw = Path(raw).read_text()
    try:
        req = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON request: {exc}")
    op = req.get("op")
    if op == "pairing_pole_check":
        out = pairing_pole_check(int(req["k"]), int(req["r"]))
        print(out.value)
        return 0
    if op == "star_extension":
        line_w, bundle = star_extension(StarExtensionInput(
            int(req["r"]), _frac(req["d"]), int(req["m"])))
        print(f"line_weight: {_fmt_frac(line_w)}")
        print("bundle_jumps: "
              + ", ".join(f"{_fmt_frac(w)} (x{m})" for w, m in bundle.jumps))
        return 0
    if op == "parity_check":
        ok = parity_check(int(req["r"]), _frac(req["d"]),
                          [_frac(a) for a in req["jumps"]])
        print("true" if ok else "false")
        return 0
    if op == "pullback":
        f = _filtered_from_payload(req["filtration"])
        out = pullback_filtration(f, int(req["ell"]))
        print("jumps: " + ", ".join(f"{_fmt_frac(w)} (x{m})" for w, m in out.jumps))
        print("characters: " + ", ".join(str(c) for c in out.characters))
        return 0
    if op == "descent":
        f = _filtered_from_payload(req["filtration"])
        out = descent_filtration(f, int(req["ell"]))
        print("jumps: " + ", ".join(f"{_fmt_frac(w)} (x{m})" for w, m in out.jumps))
        return 0
    if op == "filtered_degree":
        locs = [_filtered_from_payload(p) for p in req["punctures"]]
        deg = filtered_degree(locs, _frac(req.get("base_degree", 0)))
        print(_fmt_frac(deg))
        return 0
    if op == "pushforward_degree":
        f = _filtered_from_payload(req["filtration"])
        spec = RamifiedCoverSpec(int(req.get("cover_order", 1)),
                                 tuple(int(m) for m in req.get("interior", ())),
                                 tuple(int(m) for m in req.get("punctures", ())))
        deg = pushforward_degree(f, spec, _frac(req["degree"]))
        print(_fmt_frac(deg))
        return 0
    if op == "canonical_pairing_filtration":
        out = canonical_pairing_filtration(int(req["k"]))
        print("jump: " + _fmt_frac(out.jumps[0][0]))
        return 0
    raise ParseError(f"unknown filtered op {op!r}")


# ---------------------------------------------------------------------------
# SVG report rendering
# ---------------------------------------------------------------------------

_SVG_COLORS = {"sup": "#1f77b4", "l2": "#ff7f0e", "l2_1": "#2ca02c",
               "l2_2": "#d62728", "offdiag": "#9467bd"}


def render_svg(report: dict, width: int = 640, height: int = 420) -> str:
    """Log-y decay plot, one polyline per norm series."""
    records = [r for r in report["records"] if not r.get("failed")]
    series = {}
    for key, attr in (("sup", "sup_err"), ("l2", "l2_err"), ("l2_1", "l2_1_err"),
                      ("l2_2", "l2_2_err"), ("offdiag", "offdiag_max")):
        pts = [(r["t"], r[attr]) for r in records
               if r.get(attr) is not None and r[attr] > 0]
        if len(pts) >= 2:
            series[key] = pts
    if not series:
        raise HaxError("report holds no positive error series to plot")
    all_t = [t for pts in series.values() for t, _ in pts]
    all_e = [e for pts in series.values() for _, e in pts]
    t0, t1 = min(all_t), max(all_t)
    e0, e1 = np.log10(min(all_e)), np.log10(max(all_e))
    e0, e1 = np.floor(e0), np.ceil(e1) if e1 > np.floor(e0) else np.floor(e0) + 1
    ml, mr, mt, mb = 64, 16, 28, 44

    def X(t):
        return ml + (t - t0) / (t1 - t0) * (width - ml - mr)

    def Y(e):
        le = np.log10(e)
        return mt + (e1 - le) / (e1 - e0) * (height - mt - mb)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>']
    # grid lines per decade
    dec = int(e1 - e0)
    for k in range(dec + 1):
        y = mt + k / max(dec, 1) * (height - mt - mb)
        out.append(f'<line x1="{ml}" y1="{y:.1f}" x2="{width-mr}" y2="{y:.1f}" '
                   'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{ml-6}" y="{y+4:.1f}" text-anchor="end" '
                   f'font-size="11" fill="#444444">1e{int(e1-k)}</text>')
    for t in sorted({round(t, 6) for t in all_t}):
        x = X(t)
        out.append(f'<line x1="{x:.1f}" y1="{mt}" x2="{x:.1f}" y2="{height-mb}" '
                   'stroke="#f0f0f0" stroke-width="1"/>')
        out.append(f'<text x="{x:.1f}" y="{height-mb+16}" text-anchor="middle" '
                   f'font-size="11" fill="#444444">{t:g}</text>')
    for key, pts in sorted(series.items()):
        path = " ".join(f"{X(t):.2f},{Y(e):.2f}" for t, e in pts)
        color = _SVG_COLORS.get(key, "#333333")
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" '
                   f'points="{path}"><title>{key}</title></polyline>')
        for t, e in pts:
            out.append(f'<circle cx="{X(t):.2f}" cy="{Y(e):.2f}" r="2.4" '
                       f'fill="{color}"/>')
    # legend
    lx = width - mr - 90
    for i, key in enumerate(sorted(series)):
        y = mt + 14 + 16 * i
        color = _SVG_COLORS.get(key, "#333333")
        out.append(f'<rect x="{lx}" y="{y-9}" width="12" height="4" fill="{color}"/>')
        out.append(f'<text x="{lx+18}" y="{y}" font-size="11" '
                   f'fill="#222222">{key}</text>')
    meta = (f'hax {report.get("tool_version", "")} '
            f'config {report.get("config_hash", "")}')
    out.append(f'<text x="{ml}" y="16" font-size="11" fill="#666666">{meta}</text>')
    out.append(f'<text x="{(ml+width-mr)/2:.0f}" y="{height-8}" font-size="12" '
               'text-anchor="middle" fill="#222222">t</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _cmd_report(args) -> int:
    text = Path(args.report_json).read_text()
    report = json.loads(text)
    if "members" in report:  # family report: plot the first member
        first = sorted(report["members"])[0]
        inner = report["members"][first]
        inner.setdefault("tool_version", report.get("tool_version", ""))
        inner.setdefault("config_hash", report.get("config_hash", ""))
        report = inner
    svg = render_svg(report)
    out = args.out or (str(Path(args.report_json).with_suffix("")) + ".svg")
    Path(out).write_text(svg)
    print(f"plot written to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
