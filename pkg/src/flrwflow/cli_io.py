"""Config parsing, snapshot CSV files and run reports."""
from __future__ import annotations

import dataclasses
import io
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .diagnostics import (
    error_norms,
    rescale_contracting,
    rescale_expanding,
    steady_residual,
    velocity_indicators,
)
from .driver import SCHEMES, RunResult, RunSpec, SchemeOptions, Snapshot
from .model import FluidParams, GeometryProfile
from .problems import GEOMETRIES, PROBLEMS, geometry
from .timestep import INTEGRATORS

FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration text; ``line`` is 1-based, or None when the key is missing."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


# -- config -------------------------------------------------------------------

def _flag(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _times(text: str) -> tuple:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def _choice(options):
    def conv(text: str) -> str:
        text = text.strip()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return conv


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 3:
        raise ValueError(f"need at least 3 cells, got {n}")
    return n


def _number(lo=None, hi=None, lo_open=False, hi_open=True):
    def conv(text: str) -> float:
        x = float(text)
        if not np.isfinite(x):
            raise ValueError(f"expected a finite number, got {text!r}")
        if lo is not None and (x < lo or (lo_open and x == lo)):
            raise ValueError(f"{x} is below the allowed range (min {lo}{' exclusive' if lo_open else ''})")
        if hi is not None and (x > hi or (hi_open and x == hi)):
            raise ValueError(f"{x} is above the allowed range (max {hi}{' exclusive' if hi_open else ''})")
        return x
    return conv


def _format_version(text: str) -> int:
    v = int(text)
    if v != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {v}; this build writes {FORMAT_VERSION}")
    return v


# key -> converter; every key is optional except ``test``.
KEYS: dict[str, Callable[[str], Any]] = {
    "test": _choice(tuple(PROBLEMS)),
    "geometry": _choice(GEOMETRIES),
    "N": _positive_int,
    "Ny": _positive_int,
    "eps": _number(0.0),
    "k": _number(0.0, lo_open=True, hi=None),
    "kappa": _number(0.0, lo_open=True, hi=None),
    "t0": _number(),
    "t_end": _number(),
    "cfl": _number(0.0, 1.0, lo_open=True),
    "allow_cfl_above_half": _flag,
    "c_t": _number(0.0, 1.0, lo_open=True),
    "scheme": _choice(SCHEMES),
    "space_order": _choice(("1", "2")),
    "integrator": _choice(tuple(INTEGRATORS)),
    "theta": _number(0.0, None),
    "alpha_src": _number(0.0, None, lo_open=True),
    "m": _number(0.0, None, lo_open=True),
    "M": _number(0.0, None, lo_open=True),
    "paper_literal_psi": _flag,
    "paper_literal_q1": _flag,
    "snapshots": _times,
    "out": str,
    "format_version": _format_version,
}

_ALIASES = {"space_order": int}


@dataclass(frozen=True)
class Config:
    """A validated run configuration with every optional key resolved."""

    test: str
    geometry: str
    N: int
    Ny: int | None
    eps: float
    k: float
    kappa: float
    t0: float
    t_end: float
    cfl: float
    allow_cfl_above_half: bool
    c_t: float
    scheme: str
    space_order: int
    integrator: str
    theta: float
    alpha_src: float
    m: float
    M: float
    paper_literal_psi: bool
    paper_literal_q1: bool
    snapshots: tuple
    out: str
    format_version: int
    explicit: tuple = field(default=(), compare=False)

    @property
    def problem(self):
        return PROBLEMS[self.test]

    @property
    def shape(self) -> tuple:
        return (self.N,) if self.problem.dim == 1 else (self.N, self.Ny or self.N)

    def params(self) -> FluidParams:
        return FluidParams(self.eps, self.k, self.kappa)

    def geom(self) -> GeometryProfile:
        return geometry(self.geometry, self.problem.regime)

    def options(self) -> SchemeOptions:
        return SchemeOptions(self.scheme, self.space_order, self.theta, self.alpha_src, self.m, self.M,
                             self.paper_literal_psi, self.paper_literal_q1)

    def to_runspec(self) -> RunSpec:
        g = self.geom()
        return RunSpec(self.params(), g, self.problem.initial(g), self.shape, self.t0, self.t_end,
                       self.options(), self.integrator, self.cfl, self.c_t, self.allow_cfl_above_half,
                       self.snapshots, self.test)

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)

    def echo(self) -> str:
        """One-line key=value summary used in file headers."""
        parts = []
        for f in dataclasses.fields(self):
            if f.name == "explicit":
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            parts.append(f"{f.name}={v}")
        return "; ".join(parts)


GLOBAL_DEFAULTS = dict(
    eps=1.0, k=0.5, kappa=2.0, t0=1.0, t_end=1.0, cfl=0.3, allow_cfl_above_half=False, c_t=0.5,
    scheme="wb_hll", space_order=2, integrator="rk4", theta=1e-12, alpha_src=100.0, m=1.0, M=10.0,
    paper_literal_psi=False, paper_literal_q1=False, snapshots=(), out="out",
    format_version=FORMAT_VERSION, Ny=None, N=100,
)


def parse_config(text: str) -> Config:
    """Parse ``key = value`` lines ('#' starts a comment) into a validated Config."""
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", lineno)
        try:
            v = KEYS[key](val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno) from None
        values[key] = _ALIASES.get(key, lambda x: x)(v)
        lines[key] = lineno
    if "test" not in values:
        raise ConfigError("missing required key 'test'")
    return build_config(values, lines)


def _resolve_snapshots(v) -> tuple:
    if isinstance(v, str):
        return _times(v)
    return tuple(float(x) for x in v)


def build_config(values: dict, lines: dict | None = None) -> Config:
    """Fill defaults (global, then per-test) and run the cross-field checks."""
    lines = lines or {}
    problem = PROBLEMS[values["test"]]
    merged = dict(GLOBAL_DEFAULTS)
    merged["geometry"] = problem.geometry
    if problem.regime == "contracting":
        merged.update(t0=-1.0, t_end=-1e-6)
    for key, v in problem.defaults.items():
        if key in KEYS:
            merged[key] = v
    merged.update(values)
    merged["snapshots"] = _resolve_snapshots(merged["snapshots"])
    merged["space_order"] = int(merged["space_order"])
    if problem.dim == 1:
        merged["Ny"] = None
    elif merged.get("Ny") is None:
        merged["Ny"] = merged["N"]

    def fail(msg, *keys):
        line = next((lines[k] for k in keys if k in lines), None)
        raise ConfigError(msg, line)

    if geometry(merged["geometry"]).dim != problem.dim:
        fail(f"geometry {merged['geometry']} is not {problem.dim}D", "geometry")
    if merged["eps"] > 0 and merged["k"] * merged["eps"] >= 1.0:
        fail(f"k={merged['k']} must be below the light speed 1/eps={1 / merged['eps']}", "k", "eps")
    if merged["cfl"] >= 0.5 and not merged["allow_cfl_above_half"]:
        fail(f"cfl={merged['cfl']} violates cfl < 1/2; set allow_cfl_above_half = true to override", "cfl")
    if not merged["m"] < merged["M"]:
        fail(f"need m < M, got m={merged['m']}, M={merged['M']}", "M", "m")
    if problem.regime == "expanding" and merged["t0"] <= 0:
        fail("expanding runs need t0 > 0", "t0")
    if problem.regime == "contracting" and not (merged["t0"] < 0 and merged["t_end"] < 0):
        fail("contracting runs need t0 < 0 and t_end < 0", "t0", "t_end")
    if merged["t_end"] < merged["t0"]:
        fail("t_end must not precede t0", "t_end")
    for s in merged["snapshots"]:
        if not merged["t0"] < s <= merged["t_end"]:
            fail(f"snapshot time {s} outside ({merged['t0']}, {merged['t_end']}]", "snapshots")
    cfg = Config(**{k: merged[k] for k in (f.name for f in dataclasses.fields(Config)) if k != "explicit"},
                 explicit=tuple(sorted(values)))
    try:
        cfg.to_runspec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> Config:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# -- snapshots ----------------------------------------------------------------

@dataclass
class SnapshotRecord:
    """Header fields plus a table with one row per cell."""

    header: dict
    columns: tuple
    data: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def __eq__(self, other):
        return (isinstance(other, SnapshotRecord) and self.header == other.header
                and self.columns == other.columns and self.data.shape == other.data.shape
                and np.array_equal(self.data.view(np.uint64), other.data.view(np.uint64)))


def snapshot_columns(dim: int, regime: str, params: FluidParams) -> tuple:
    coords = ("x", "y")[:dim]
    vel = ("u", "v")[:dim]
    base = coords + ("rho",) + vel
    if regime == "expanding" and 3 * params.eps**2 * params.k**2 < 1:
        return base + ("rho_tilde",) + tuple(c + "_tilde" for c in vel)
    if regime == "contracting":
        return base + ("rho_tilde",) + tuple("dist_" + c for c in vel)
    return base


def make_record(snap: Snapshot, cfg: Config) -> SnapshotRecord:
    params = cfg.params()
    regime = cfg.problem.regime
    q = snap.q
    dim = q.shape[0] - 1
    shape = q.shape[1:]
    mesh = np.meshgrid(*[(np.arange(n) + 0.5) / n for n in shape], indexing="ij")
    cols = [m.ravel() for m in mesh] + [c.ravel() for c in q]
    names = snapshot_columns(dim, regime, params)
    if "rho_tilde" in names:
        if regime == "expanding":
            rt, ut = rescale_expanding(q, snap.t, params)
            cols += [rt.ravel()] + [c.ravel() for c in ut]
        else:
            cols += [rescale_contracting(q, snap.t, params).ravel()]
            cols += [c.ravel() for c in velocity_indicators(q, params)]
    header = {
        "format_version": str(FORMAT_VERSION),
        "config": cfg.echo(),
        "t": repr(float(snap.t)),
        "requested": repr(float(snap.requested)) if snap.requested is not None else "none",
        "step": str(snap.step),
        "N": " ".join(str(n) for n in shape),
        "dx": " ".join(repr(1.0 / n) for n in shape),
    }
    return SnapshotRecord(header, names, np.column_stack(cols))


def write_snapshot(record: SnapshotRecord, sink) -> None:
    """Write ``record`` as CSV to a path or a text stream."""
    buf = io.StringIO()
    for key, val in record.header.items():
        buf.write(f"# {key}: {val}\n")
    buf.write("# columns: " + ",".join(record.columns) + "\n")
    np.savetxt(buf, record.data, fmt="%.17g", delimiter=",")
    text = buf.getvalue()
    if hasattr(sink, "write"):
        sink.write(text)
        return
    path = Path(sink)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write snapshot to {path}: {exc}") from exc


def parse_snapshot(text: str) -> SnapshotRecord:
    header, columns, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(": ")
            if key == "columns":
                columns = tuple(val.split(","))
            else:
                header[key] = val
        elif line.strip():
            rows.append([float(x) for x in line.split(",")])
    if columns is None:
        raise ValueError("snapshot has no columns header")
    data = np.array(rows, float).reshape(len(rows), len(columns))
    return SnapshotRecord(header, columns, data)


def read_snapshot(path) -> SnapshotRecord:
    return parse_snapshot(Path(path).read_text(encoding="utf-8"))


def record_primitives(record: SnapshotRecord) -> np.ndarray:
    """Component-first primitive array (rho, u[, v]) from a snapshot record."""
    shape = tuple(int(n) for n in record.header["N"].split())
    names = ["rho", "u", "v"][: len(shape) + 1]
    return np.array([record.column(n).reshape(shape) for n in names])


# -- reports ------------------------------------------------------------------

def snapshot_diagnostics(snap: Snapshot, initial: Snapshot, cfg: Config) -> dict:
    params, geom = cfg.params(), cfg.geom()
    q = snap.q
    shape = q.shape[1:]
    mesh = np.meshgrid(*[(np.arange(n) + 0.5) / n for n in shape], indexing="ij")
    volume = 1.0 / np.prod(shape)
    out = {"t": snap.t, "step": snap.step, "mass": float(snap.U[0].sum() * volume)}
    names = ["rho", "u", "v"][: q.shape[0]]
    for name, comp in zip(names, q):
        out[f"min_{name}"] = float(comp.min())
        out[f"max_{name}"] = float(comp.max())
    if not geom.flat:
        c_fit, res = steady_residual(q, geom.b(*mesh))
        out["steady_C"] = c_fit
        out["steady_residual"] = res
    l1, linf = error_norms(q, initial.q)
    for name, a, b in zip(names, l1, linf):
        out[f"L1_change_{name}"] = float(a)
        out[f"Linf_change_{name}"] = float(b)
    return out


def write_report(result: RunResult, cfg: Config, path) -> list:
    """Write per-snapshot diagnostics as a '#'-headed CSV and return them."""
    snaps = list(result.snapshots)
    final = Snapshot(result.final.t, result.final_q, result.final.U, result.steps)
    if not snaps or snaps[-1].t != final.t:
        snaps.append(final)
    rows = [snapshot_diagnostics(s, result.initial, cfg) for s in snaps]
    keys = list(rows[0])
    buf = io.StringIO()
    buf.write(f"# format_version: {FORMAT_VERSION}\n# spec: {cfg.echo()}\n")
    buf.write(",".join(keys) + "\n")
    for r in rows:
        buf.write(",".join(f"{r[k]:.17g}" for k in keys) + "\n")
    try:
        Path(path).write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return rows


def snapshot_filename(index: int) -> str:
    return f"snapshot_{index:04d}.csv"


def run_to_directory(cfg: Config, out_dir=None) -> RunResult:
    """Run ``cfg`` and write every snapshot, the final state and a report into ``out_dir``."""
    from .driver import run

    out = Path(out_dir or cfg.out)
    os.makedirs(out, exist_ok=True)
    written = []

    def sink(snap):
        path = out / snapshot_filename(len(written) + 1)
        write_snapshot(make_record(snap, cfg), path)
        written.append(path)

    result = run(cfg.to_runspec(), sink=sink)
    write_snapshot(make_record(result.initial, cfg), out / snapshot_filename(0))
    final = Snapshot(result.final.t, result.final_q, result.final.U, result.steps)
    write_snapshot(make_record(final, cfg), out / "final.csv")
    write_report(result, cfg, out / "report.csv")
    return result
