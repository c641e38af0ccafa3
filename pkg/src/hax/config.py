"""Experiment configuration: INI-style text with sections, strict validation.

The format is ``[section]`` headers over ``key = value`` lines; ``#`` and
``;`` start comments. Polynomial values use ``z`` and complex literals in
``a+bi`` form (e.g. ``z^2 - 0.25``, ``(1+2i)*z``). Every parse failure is
reported with line/column.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .grid import AnnulusRegion
from .higgs import HiggsBundleDisc, branch_locus, cyclic_higgs
from .pairing import SymmetricPairingField, antidiagonal_pairing, identity_pairing
from .poly import ComplexPoly
from .solver import SolveConfig
from .asymptotics import DEFAULT_SCHEDULE, TSchedule

_KNOWN_KEYS = {
    "higgs": {"rank", "cyclic_q", "matrix"},
    "pairing": {"pairing", "matrix"},
    "grid": {"n", "radius"},
    "schedule": {"values"},
    "region": {"r_in", "r_out", "center"},
    "solver": {"tol", "max_iter", "damping", "scheme"},
    "run": {"mode", "seed", "workers", "out_dir", "label"},
    "family": {"parameter", "values"},
}

_DEFAULTS = {
    "grid": {"n": 128, "radius": 1.0},
    "region": {"r_in": 0.25, "r_out": 0.5, "center": 0j},
    "run": {"mode": "symmetric", "seed": 0, "workers": 1, "out_dir": ".",
            "label": "experiment"},
}


# ---------------------------------------------------------------------------
# polynomial literal parser
# ---------------------------------------------------------------------------

class _Tok:
    def __init__(self, kind, value, col):
        self.kind, self.value, self.col = kind, value, col


def _tokenize_poly(text: str, line: int | None = None):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*^()":
            if c == "^" and i + 1 < n and text[i + 1] == "^":
                raise ParseError("'^^' is not an operator", line, i + 1)
            toks.append(_Tok(c, c, i + 1))
            i += 1
            continue
        if c == "z":
            toks.append(_Tok("z", "z", i + 1))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] in ".eE"
                             or (text[j] in "+-" and j > i and text[j - 1] in "eE")):
                j += 1
            num = text[i:j]
            imag = False
            if j < n and text[j] in "ij":
                imag = True
                j += 1
            try:
                val = complex(0, float(num)) if imag else complex(float(num))
            except ValueError:
                raise ParseError(f"bad numeric literal {num!r}", line, i + 1)
            toks.append(_Tok("num", val, i + 1))
            i = j
            continue
        if c in "ij":
            toks.append(_Tok("num", 1j, i + 1))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r} in polynomial", line, i + 1)
    toks.append(_Tok("end", None, n + 1))
    return toks


class _PolyParser:
    """Recursive descent over +, -, *, ^, parentheses, z, complex literals."""

    def __init__(self, toks, line=None):
        self.toks, self.pos, self.line = toks, 0, line

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> ComplexPoly:
        out = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.value!r}", self.line, tok.col)
        return out

    def expr(self) -> ComplexPoly:
        sign = 1.0
        tok = self.peek()
        while tok.kind in "+-":
            if tok.kind == "-":
                sign = -sign
            self.next()
            tok = self.peek()
        acc = self.term() * sign
        while self.peek().kind in "+-":
            op = self.next().kind
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> ComplexPoly:
        acc = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "*":
                self.next()
                acc = acc * self.power()
            elif tok.kind in ("z", "num", "("):
                acc = acc * self.power()  # implicit multiplication
            else:
                return acc

    def power(self) -> ComplexPoly:
        base = self.atom()
        if self.peek().kind == "^":
            caret = self.next()
            tok = self.next()
            if tok.kind != "num" or tok.value.imag != 0 \
                    or tok.value.real != int(tok.value.real) or tok.value.real < 0:
                raise ParseError("exponent must be a nonnegative integer",
                                 self.line, caret.col)
            return base ** int(tok.value.real)
        return base

    def atom(self) -> ComplexPoly:
        tok = self.next()
        if tok.kind == "z":
            return ComplexPoly.z()
        if tok.kind == "num":
            return ComplexPoly.const(tok.value)
        if tok.kind == "(":
            inner = self.expr()
            closing = self.next()
            if closing.kind != ")":
                raise ParseError("missing ')'", self.line, closing.col)
            return inner
        if tok.kind == "-":
            return -self.atom()
        if tok.kind == "+":
            return self.atom()
        raise ParseError(f"unexpected token {tok.value!r}", self.line, tok.col)


def parse_poly(text: str, line: int | None = None) -> ComplexPoly:
    return _PolyParser(_tokenize_poly(text, line), line).parse()


# ---------------------------------------------------------------------------
# config object
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    rank: int
    cyclic_q: ComplexPoly | None
    matrix: tuple[tuple[ComplexPoly, ...], ...] | None
    pairing_spec: str
    pairing_matrix: tuple[tuple[ComplexPoly, ...], ...] | None
    n: int
    radius: float
    schedule: TSchedule
    region: AnnulusRegion
    solver: SolveConfig
    mode: str
    seed: int
    workers: int
    out_dir: str
    label: str
    family_parameter: str = ""
    family_values: tuple[complex, ...] = ()
    raw: dict = field(default_factory=dict)

    def higgs(self, shift: complex = 0j) -> HiggsBundleDisc:
        if self.cyclic_q is not None:
            q = self.cyclic_q
            if shift != 0:
                q = q - ComplexPoly.const(shift)
            return cyclic_higgs(self.rank, q, self.radius)
        return HiggsBundleDisc(self.rank, self.matrix, self.radius)

    def pairing(self) -> SymmetricPairingField:
        if self.pairing_spec == "antidiagonal":
            return antidiagonal_pairing(self.rank)
        if self.pairing_spec == "identity":
            return identity_pairing(self.rank)
        if self.pairing_spec.startswith("jacobian:"):
            # pushforward weights of z = phi(zeta); for cyclic covers this is
            # the antidiagonal up to normalization, which we use directly
            return antidiagonal_pairing(self.rank)
        if self.pairing_spec == "matrix":
            return SymmetricPairingField(self.pairing_matrix, "custom")
        raise ParseError(f"unknown pairing spec {self.pairing_spec!r}")

    def normalized(self) -> dict:
        d = {
            "higgs": {
                "rank": self.rank,
                "cyclic_q": str(self.cyclic_q) if self.cyclic_q is not None else None,
                "matrix": ([[str(p) for p in row] for row in self.matrix]
                           if self.matrix is not None else None),
            },
            "pairing": self.pairing_spec,
            "grid": {"n": self.n, "radius": self.radius},
            "schedule": list(self.schedule.values),
            "region": {"r_in": self.region.r_in, "r_out": self.region.r_out,
                       "center": [self.region.center.real, self.region.center.imag]},
            "solver": {"tol": self.solver.tol, "max_iter": self.solver.max_iter,
                       "damping": self.solver.damping, "scheme": self.solver.scheme},
            "run": {"mode": self.mode, "seed": self.seed, "workers": self.workers,
                    "label": self.label},
            "family": {"parameter": self.family_parameter,
                       "values": [[v.real, v.imag] for v in self.family_values]},
        }
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.normalized(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _parse_sections(text: str):
    """key = value lines under [section] headers, with positions."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].split(";", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno,
                                 len(line))
            current = stripped[1:-1].strip().lower()
            if current not in _KNOWN_KEYS:
                raise ParseError(f"unknown section [{current}]", lineno, 1)
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno,
                             len(line) - len(line.lstrip()) + 1)
        if current is None:
            raise ParseError("key outside of any [section]", lineno, 1)
        key, _, value = stripped.partition("=")
        key = key.strip().lower()
        if key not in _KNOWN_KEYS[current]:
            raise ParseError(f"unknown key {key!r} in [{current}]", lineno, 1)
        sections[current][key] = (value.strip(), lineno)
    return sections


def _get(sections, sec, key, default=None):
    if sec in sections and key in sections[sec]:
        return sections[sec][key]
    return (default, None)


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse and fully validate an experiment config.

    ``overrides`` maps dotted keys (``section.key``) to replacement strings,
    matching the CLI's ``--set`` flag.
    """
    sections = _parse_sections(text)
    if overrides:
        for dotted, val in overrides.items():
            if "." not in dotted:
                raise ParseError(f"override {dotted!r} must be section.key")
            sec, key = dotted.split(".", 1)
            sec, key = sec.lower(), key.lower()
            if sec not in _KNOWN_KEYS or key not in _KNOWN_KEYS[sec]:
                raise ParseError(f"unknown override target {dotted!r}")
            sections.setdefault(sec, {})[key] = (val, None)

    val, line = _get(sections, "higgs", "rank", "2")
    rank = _int(val, line, "rank", minimum=1)
    qtext, qline = _get(sections, "higgs", "cyclic_q")
    mtext, mline = _get(sections, "higgs", "matrix")
    cyclic_q = parse_poly(qtext, qline) if qtext is not None else None
    matrix = _parse_matrix(mtext, mline, rank) if mtext is not None else None
    if cyclic_q is None and matrix is None:
        cyclic_q = ComplexPoly.z()
    if cyclic_q is not None and matrix is not None:
        raise ParseError("give either cyclic_q or matrix, not both", mline)
    if cyclic_q is not None and cyclic_q.is_zero():
        raise ParseError("cyclic_q must be nonzero", qline)

    ptext, _pl = _get(sections, "pairing", "pairing", "antidiagonal")
    pmat_text, pmat_line = _get(sections, "pairing", "matrix")
    pairing_matrix = (_parse_matrix(pmat_text, pmat_line, rank)
                      if pmat_text is not None else None)
    pairing_spec = "matrix" if pairing_matrix is not None else ptext

    val, line = _get(sections, "grid", "n", str(_DEFAULTS["grid"]["n"]))
    n = _int(val, line, "n", minimum=8)
    val, line = _get(sections, "grid", "radius", "1.0")
    radius = _float(val, line, "radius", positive=True)

    val, line = _get(sections, "schedule", "values")
    if val is None:
        schedule = TSchedule(DEFAULT_SCHEDULE)
    else:
        try:
            schedule = TSchedule(tuple(float(x) for x in val.split(",")))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad schedule: {exc}", line)

    val, line = _get(sections, "region", "r_in", "0.25")
    r_in = _float(val, line, "r_in", positive=True)
    val, line = _get(sections, "region", "r_out", "0.5")
    r_out = _float(val, line, "r_out", positive=True)
    val, line = _get(sections, "region", "center", "0")
    try:
        center = complex(parse_poly(val, line)(0))
    except ParseError:
        raise
    try:
        region = AnnulusRegion(r_in, r_out, center)
    except ValueError as exc:
        raise ParseError(str(exc), line)

    val, line = _get(sections, "solver", "tol", "1e-9")
    tol = _float(val, line, "tol", positive=True)
    val, line = _get(sections, "solver", "max_iter", "60")
    max_iter = _int(val, line, "max_iter", minimum=1)
    val, line = _get(sections, "solver", "damping", "1.0")
    damping = _float(val, line, "damping", positive=True)
    val, line = _get(sections, "solver", "scheme", "newton")
    if val not in ("newton", "flow"):
        raise ParseError(f"scheme must be newton or flow, got {val!r}", line)
    solver = SolveConfig(tol, max_iter, damping, val)

    val, line = _get(sections, "run", "mode", "symmetric")
    mode = val.lower()
    if mode not in ("symmetric", "generic", "family"):
        raise ParseError(f"mode must be symmetric/generic/family, got {val!r}", line)
    val, line = _get(sections, "run", "seed", "0")
    seed = _int(val, line, "seed", minimum=0)
    val, line = _get(sections, "run", "workers", "1")
    workers = _int(val, line, "workers", minimum=1)
    out_dir, _ = _get(sections, "run", "out_dir", ".")
    label, _ = _get(sections, "run", "label", "experiment")

    fam_par, _ = _get(sections, "family", "parameter", "")
    fam_vals_text, fam_line = _get(sections, "family", "values")
    family_values: tuple[complex, ...] = ()
    if fam_vals_text:
        try:
            family_values = tuple(complex(parse_poly(v.strip(), fam_line)(0))
                                  for v in fam_vals_text.split(","))
        except ParseError:
            raise
    if mode == "family" and not family_values:
        raise ParseError("family mode requires [family] values", fam_line)

    cfg = ExperimentConfig(rank, cyclic_q, matrix, pairing_spec, pairing_matrix,
                           n, radius, schedule, region, solver, mode, seed,
                           workers, out_dir, label, fam_par, family_values)
    _validate_region_against_branch_locus(cfg)
    return cfg


def _validate_region_against_branch_locus(cfg: ExperimentConfig) -> None:
    shifts = cfg.family_values if cfg.mode == "family" else (0j,)
    for x in shifts:
        hb = cfg.higgs(shift=x)
        try:
            locus = branch_locus(hb, 1e-8)
        except Exception:
            return  # degenerate-everywhere fields are caught at run time
        for p in locus.points:
            d = abs(p - cfg.region.center)
            if cfg.region.r_in - 0.02 < d < cfg.region.r_out + 0.02:
                raise ParseError(
                    f"branch point {p:.4f} touches region [{cfg.region.r_in}, "
                    f"{cfg.region.r_out}] for family shift {x}")


def _parse_matrix(text: str, line, rank: int):
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != rank:
        raise ParseError(f"matrix needs {rank} ';'-separated rows", line)
    out = []
    for row in rows:
        entries = [e for e in row.split(",")]
        if len(entries) != rank:
            raise ParseError(f"matrix row needs {rank} ','-separated entries", line)
        out.append(tuple(parse_poly(e, line) for e in entries))
    return tuple(out)


def _int(val, line, name, minimum=None):
    try:
        out = int(val)
    except (TypeError, ValueError):
        raise ParseError(f"{name} must be an integer, got {val!r}", line)
    if minimum is not None and out < minimum:
        raise ParseError(f"{name} must be >= {minimum}", line)
    return out


def _float(val, line, name, positive=False):
    try:
        out = float(val)
    except (TypeError, ValueError):
        raise ParseError(f"{name} must be a number, got {val!r}", line)
    if positive and out <= 0:
        raise ParseError(f"{name} must be positive", line)
    return out
