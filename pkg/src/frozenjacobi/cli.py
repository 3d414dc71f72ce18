"""Command-line front end: emits CSV or JSON tables for plotting and checks.

Exit codes: 0 success, 1 computation error, 2 configuration error.  Errors
are reported on stderr as a one-line JSON record.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .finite_free import finite_s, finite_t
from .free_jacobi import FreeParams, MomentSeq, esf_power_moments, moment_flow
from .frozen import JacobiParams, frozen_esf, frozen_roots, heat_residual, initial_expansion
from .hermite_unitary import szego_max_error

COMMANDS = ("frozen", "moments", "transform", "szego", "converge", "residual")

COLUMNS = {
    "frozen": ("j", "root"),
    "frozen_grid": ("t", "j", "root"),
    "moments": ("t", "ell", "moment"),
    "transform": ("k", "v", "s_value", "t_value"),
    "szego": ("m", "t", "samples", "max_rel_error"),
    "converge": ("m", "ell", "frozen_moment", "free_moment", "abs_error"),
    "residual": ("h_t", "residual", "slope"),
}

RESIDUAL_STEPS = (4e-3, 2e-3, 1e-3, 5e-4)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    r: float = 0.0
    s: float = 0.0
    m: int = 8
    t_grid: tuple = (1.0,)
    grid_given: bool = False
    lam: float = 1.0
    theta: float = 0.5
    m_list: tuple = (16, 32, 64)
    samples: int = 100
    dt: float = 1e-3
    horizon: int = 6
    fmt: str = "csv"
    out: str = None
    workers: int = 4
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        t = np.asarray(self.t_grid, dtype=float)
        if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t)):
            raise ConfigError("time grid must be nonempty, nonnegative and strictly increasing")
        ml = np.asarray(self.m_list)
        if ml.size == 0 or np.any(ml < 1) or np.any(np.diff(ml) <= 0):
            raise ConfigError("m sweep must be positive and strictly increasing")
        if self.m < 1:
            raise ConfigError("m must be a positive integer")
        if not (self.r > -1 and self.s > -1):
            raise ConfigError("need r > -1 and s > -1")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.command in ("moments", "converge"):
            try:
                FreeParams(self.lam, self.theta)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if self.command == "residual" and min(self.t_grid) <= max(RESIDUAL_STEPS):
            raise ConfigError(f"residual needs t > {max(RESIDUAL_STEPS)}")
        return self

    @property
    def jacobi(self) -> JacobiParams:
        return JacobiParams(self.r, self.s, self.m)


def _sweep(fn, cells, workers):
    """Run independent cells concurrently; results come back in cell order."""
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, cells))


def _frozen(cfg: RunConfig):
    P = cfg.jacobi

    def cell(t):
        if t == 0:
            return np.ones(P.m)
        return frozen_roots(P, t).roots

    res = _sweep(cell, cfg.t_grid, cfg.workers)
    if not cfg.grid_given:
        return "frozen", [(j, x) for j, x in enumerate(res[0])], {}
    rows = [(t, j, x) for t, roots in zip(cfg.t_grid, res) for j, x in enumerate(roots)]
    return "frozen_grid", rows, {}


def _moments(cfg: RunConfig):
    fp = FreeParams(cfg.lam, cfg.theta)
    M0 = MomentSeq.point_mass(1.0, cfg.horizon)
    res = _sweep(lambda t: moment_flow(fp, M0, t, cfg.dt).values, cfg.t_grid, cfg.workers)
    rows = [(t, ell, v[ell]) for t, v in zip(cfg.t_grid, res) for ell in range(cfg.horizon + 1)]
    return "moments", rows, {}


def _transform(cfg: RunConfig):
    P = cfg.jacobi
    t = cfg.t_grid[0]
    poly = frozen_esf(P, t, cfg.dt)
    S, T = finite_s(poly), finite_t(poly)
    m = P.m
    rows = []
    for k in range(1, m + 1):
        s_val = S.at(k) if k <= m - S.zero_run else math.nan
        rows.append((k, k / m, s_val, T((k - 0.5) / m)))
    return "transform", rows, {}


def _szego(cfg: RunConfig):
    res = _sweep(lambda t: szego_max_error(cfg.m, t, cfg.samples), cfg.t_grid, cfg.workers)
    rows = [(cfg.m, t, cfg.samples, e) for t, e in zip(cfg.t_grid, res)]
    return "szego", rows, {"max_rel_error": max(res)}


def jacobi_from_free(fp: FreeParams, m: int) -> JacobiParams:
    """Finite parameters with ``p = m/lam`` and ``d = p/theta``."""
    p = m / fp.lam
    d = p / fp.theta
    return JacobiParams.from_pq(p, d - p, m)


def _converge(cfg: RunConfig):
    fp = FreeParams(cfg.lam, cfg.theta)
    t = cfg.t_grid[0]
    free = moment_flow(fp, MomentSeq.point_mass(1.0, cfg.horizon), t).values

    def cell(m):
        P = jacobi_from_free(fp, m)
        return esf_power_moments(frozen_esf(P, t / P.d, cfg.dt), cfg.horizon).values

    res = _sweep(cell, cfg.m_list, cfg.workers)
    rows = []
    worst = {}
    for m, v in zip(cfg.m_list, res):
        for ell in range(1, cfg.horizon + 1):
            err = abs(v[ell] - free[ell])
            rows.append((m, ell, v[ell], free[ell], err))
            worst[m] = max(worst.get(m, 0.0), err)
    return "converge", rows, {"max_abs_error": {str(m): worst[m] for m in cfg.m_list}}


def _residual(cfg: RunConfig):
    P = cfg.jacobi
    t = cfg.t_grid[0]
    exp0 = initial_expansion(P)
    res = [heat_residual(exp0, P, t, h) for h in RESIDUAL_STEPS]
    rows = []
    for i, (h, r) in enumerate(zip(RESIDUAL_STEPS, res)):
        slope = math.nan if i == 0 else math.log(res[i - 1] / r) / math.log(RESIDUAL_STEPS[i - 1] / h)
        rows.append((h, r, slope))
    return "residual", rows, {}


HANDLERS = {
    "frozen": _frozen,
    "moments": _moments,
    "transform": _transform,
    "szego": _szego,
    "converge": _converge,
    "residual": _residual,
}


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _jsonable(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else None


def render(cfg: RunConfig, schema: str, rows, summary) -> str:
    cols = COLUMNS[schema]
    if cfg.fmt == "csv":
        lines = [",".join(cols)] + [",".join(_fmt(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    conf = {k: v for k, v in asdict(cfg).items() if k not in ("out", "workers", "extra", "fmt", "grid_given")}
    conf["t_grid"] = list(conf["t_grid"])
    conf["m_list"] = list(conf["m_list"])
    doc = {
        "command": cfg.command,
        "schema": schema,
        "version": __version__,
        "config": conf,
        "columns": list(cols),
        "rows": [[_jsonable(v) for v in row] for row in rows],
    }
    doc.update(summary)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the exit status."""
    try:
        schema, rows, summary = HANDLERS[cfg.command](cfg)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        _error_record(1, exc)
        return 1
    text = render(cfg, schema, rows, summary)
    if cfg.out:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _error_record(code, exc):
    rec = {"status": "error", "exit_code": code, "error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frozenjacobi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--r", type=float, default=0.0)
        p.add_argument("--s", type=float, default=0.0)
        p.add_argument("--m", type=int, default=8)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--t", type=float, default=None)
        g.add_argument("--t-grid", type=_floats, default=None, help="comma-separated times")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--theta", type=float, default=0.5)
        p.add_argument("--m-list", type=_ints, default=(16, 32, 64))
        p.add_argument("--samples", type=int, default=100)
        p.add_argument("--dt", type=float, default=1e-3)
        p.add_argument("--horizon", type=int, default=6)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--workers", type=int, default=4)
    return parser


def config_from_args(ns) -> RunConfig:
    grid = ns.t_grid if ns.t_grid is not None else ((ns.t,) if ns.t is not None else (1.0,))
    return RunConfig(
        command=ns.command,
        r=ns.r,
        s=ns.s,
        m=ns.m,
        t_grid=tuple(grid),
        grid_given=ns.t_grid is not None,
        lam=ns.lam,
        theta=ns.theta,
        m_list=tuple(ns.m_list),
        samples=ns.samples,
        dt=ns.dt,
        horizon=ns.horizon,
        fmt=ns.fmt,
        out=ns.out,
        workers=max(1, ns.workers),
    )


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns).validate()
    except (ConfigError, ValueError) as exc:
        _error_record(2, exc)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
