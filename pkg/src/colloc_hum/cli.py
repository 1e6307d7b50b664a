"""Experiment runner: ``python -m colloc_hum.cli --experiment exp1-gaussian --n 20,50,100``.

Configuration is a flat ``key = value`` file (``#`` starts a comment) and/or
command-line flags; flags override the file.  Keys:

    experiment   exp1-gaussian | exp1-hat | exp2 | exp3 | spectra
    n            comma list of 1-d orders            (default 20,50,100)
    n2           2-d orders, e.g. 20x20,50x50        (default 20x20)
    n_ref        reference order for exp2            (default 200)
    t_final      final time                          (default 4.4)
    dt           time step                           (default 0.01)
    delta        cutoff width                        (default: see default_delta)
    smooth       cutoff smoothstep order             (default 2)
    cg_tol       relative CG residual                (default 1e-10)
    cg_max_iter  CG iteration cap                    (default 5000)
    alpha        truncation constant in (0, 2/pi)    (default 0.6)
    data         built-in data name or a node file   (default per experiment)
    out_dir      output directory                    (default results)
    format       csv | json                          (default csv)
    export_controls  write (t, f, g_R, g_L) per N    (default false)

Exit status: 0 on success, 1 if some solve did not converge (its row is
still written, with status "nonconverged"), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .adjoint1d import AdjointFinalData, TimeGrid
from .control2d import (
    SIDES,
    extract_controls_2d,
    forward_verify_2d,
    make_grid,
    solve_hum_2d,
    tensor_basis,
)
from .cutoff import WeightFunction, default_delta
from .errors import (CollocHumError, ConfigurationError, InvalidDataError, NonConvergenceError,
                     ParameterError)
from .forward1d import final_residual, forward_solve
from .hum1d import extract_controls, solve_hum, time_l2
from .initial_data import ALPHA_MAX, BUILTINS_1D, builtin_1d, builtin_2d, interpolate_data, load_node_file
from .operators1d import build_discretization
from .spectral_analysis import gap_scan, observability_quotient, scaling_fit, top_pair_gap

log = logging.getLogger("colloc_hum")

_CONFIG_ERRORS = (ConfigurationError, InvalidDataError, ParameterError)

EXPERIMENTS = ("exp1-gaussian", "exp1-hat", "exp2", "exp3", "spectra")


@dataclass
class RunConfig:
    experiment: str = "exp1-gaussian"
    n: list = field(default_factory=lambda: [20, 50, 100])
    n2: list = field(default_factory=lambda: [(20, 20)])
    n_ref: int = 200
    t_final: float = 4.4
    dt: float = 1e-2
    delta: float | None = None
    smooth: int = 2
    cg_tol: float = 1e-10
    cg_max_iter: int = 5000
    alpha: float = 0.6
    data: str | None = None
    out_dir: str = "results"
    format: str = "csv"
    export_controls: bool = False

    def validate(self) -> "RunConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.format not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        if any(int(k) < 2 for k in self.n) or any(min(p) < 2 for p in self.n2):
            raise ConfigurationError("orders must be >= 2")
        if not 0.0 < self.alpha < ALPHA_MAX:
            raise ConfigurationError("alpha must lie in (0, 2/pi)")
        if self.cg_tol <= 0 or self.cg_max_iter < 1:
            raise ConfigurationError("cg_tol must be positive and cg_max_iter >= 1")
        TimeGrid(self.t_final, self.dt)
        self.weight()
        return self

    @property
    def effective_delta(self) -> float:
        return default_delta(self.t_final) if self.delta is None else self.delta

    def weight(self) -> WeightFunction:
        return WeightFunction(self.t_final, self.effective_delta, self.smooth)

    def time_grid(self) -> TimeGrid:
        return TimeGrid(self.t_final, self.dt)


def _parse_pairs(text: str) -> list:
    out = []
    for item in str(text).split(","):
        item = item.strip().lower()
        if not item:
            continue
        a, _, b = item.partition("x")
        out.append((int(a), int(b or a)))
    return out


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


_PARSERS = {
    "experiment": str,
    "n": lambda s: [int(x) for x in str(s).split(",") if x.strip()],
    "n2": _parse_pairs,
    "n_ref": int,
    "t_final": float,
    "dt": float,
    "delta": lambda s: None if str(s).strip().lower() in ("", "none", "default") else float(s),
    "smooth": int,
    "cg_tol": float,
    "cg_max_iter": int,
    "alpha": float,
    "data": str,
    "out_dir": str,
    "format": str,
    "export_controls": _parse_bool,
}


def read_config_file(path) -> dict:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _PARSERS:
            raise ConfigurationError(f"{path}:{lineno}: bad line {raw!r}")
        values[key] = value.strip()
    return values


def build_config(argv=None) -> RunConfig:
    parser = argparse.ArgumentParser(prog="colloc-hum", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key = value configuration file")
    for f in fields(RunConfig):
        parser.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    raw = read_config_file(ns.config) if ns.config else {}
    for f in fields(RunConfig):
        v = getattr(ns, f.name)
        if v is not None:
            raw[f.name] = v
    cfg = RunConfig()
    for key, value in raw.items():
        try:
            setattr(cfg, key, _PARSERS[key](value))
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad value for {key}: {value!r}") from exc
    return cfg.validate()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10e}"
    return v


def write_table(path: Path, header, rows, fmt: str):
    path = path.with_suffix("." + fmt)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    else:
        recs = [{h: (float(v) if isinstance(v, np.floating) else v) for h, v in zip(header, row)} for row in rows]
        path.write_text(json.dumps(recs, indent=1, sort_keys=False) + "\n")
    return path


def _data_1d(cfg: RunConfig, disc, default: str):
    name = cfg.data or default
    if name in BUILTINS_1D:
        return builtin_1d(name, disc.rule)
    u0, u1 = load_node_file(name, disc.rule.n_nodes)
    return interpolate_data(u0, u1, disc.rule)


def _solve_1d(cfg: RunConfig, order: int, default_data: str):
    """Returns (solution-like record, controls, status)."""
    disc = build_discretization(order)
    data = _data_1d(cfg, disc, default_data)
    w, grid = cfg.weight(), cfg.time_grid()
    status = "ok"
    try:
        sol = solve_hum(data, disc.basis, disc.shapes, w, grid, tol=cfg.cg_tol, max_iter=cfg.cg_max_iter)
        controls, iters = sol.controls, sol.cg_iterations
    except NonConvergenceError as exc:
        status = "nonconverged"
        z = AdjointFinalData.from_vector(exc.best, disc.basis)
        controls, iters = extract_controls(z, w, grid), exc.iterations
    state = forward_solve(data, controls, disc.basis, disc.shapes, disc.laplacian, grid)
    residual = final_residual(state, disc.rule, data)
    return controls, iters, residual, status


def run_exp1(cfg: RunConfig, out: Path) -> int:
    default = "hat" if cfg.experiment == "exp1-hat" else "gaussian-bump"
    rows, bad = [], 0
    for order in sorted(cfg.n):
        controls, iters, residual, status = _solve_1d(cfg, order, default)
        bad += status != "ok"
        nf, ngr, ngl = controls.l2_norms()
        rows.append((order, nf, ngr, ngl, residual, iters, status))
        log.info("N=%d |f|=%.4g |gR|=%.3g |gL|=%.3g res=%.3g", order, nf, ngr, ngl, residual)
        if cfg.export_controls:
            write_table(out / f"controls_N{order}", ("t", "f", "g_R", "g_L"),
                        zip(controls.grid.times, controls.f, controls.g_r, controls.g_l), cfg.format)
    write_table(out / f"{cfg.experiment}_controls",
                ("N", "norm_f", "norm_gR", "norm_gL", "residual", "cg_iters", "status"), rows, cfg.format)
    return bad


def run_exp2(cfg: RunConfig, out: Path) -> int:
    ref, _, _, ref_status = _solve_1d(cfg, cfg.n_ref, "hat")
    rows, bad = [], int(ref_status != "ok")
    for order in sorted(cfg.n):
        controls, iters, residual, status = _solve_1d(cfg, order, "hat")
        bad += status != "ok"
        err = time_l2(controls.grid, controls.f - ref.f)
        _, ngr, ngl = controls.l2_norms()
        rows.append((order, np.log10(err), np.log10(ngr), np.log10(ngl), residual, iters, status))
    write_table(out / "exp2_convergence",
                ("N", "log10_err_f", "log10_norm_gR", "log10_norm_gL", "residual", "cg_iters", "status"),
                rows, cfg.format)
    return bad


def run_exp3(cfg: RunConfig, out: Path) -> int:
    rows, bad = [], 0
    w, tgrid = cfg.weight(), cfg.time_grid()
    profile = None
    for n1, n2 in sorted(cfg.n2):
        grid = make_grid(n1, n2)
        basis = tensor_basis(grid.dir1.basis, grid.dir2.basis)
        data = builtin_2d(cfg.data or "gaussian-2d", grid.dir1.rule, grid.dir2.rule)
        status = "ok"
        try:
            sol = solve_hum_2d(data, grid, basis, w, tgrid, tol=cfg.cg_tol, max_iter=cfg.cg_max_iter)
            controls, iters = sol.controls, sol.cg_iterations
        except NonConvergenceError as exc:
            status, bad = "nonconverged", bad + 1
            m = basis.count
            shp = basis.frequencies.shape
            controls = extract_controls_2d(exc.best[:m].reshape(shp), exc.best[m:].reshape(shp),
                                           basis, grid, w, tgrid)
            iters = exc.iterations
        residual = forward_verify_2d(data, controls, grid, basis, tgrid)
        side_sum = (time_l2(tgrid, controls.f1 * np.sqrt(controls.tangential_weights[1]))
                    + time_l2(tgrid, controls.f2 * np.sqrt(controls.tangential_weights[2])))
        rows.append((n1, n2, controls.norm_f(), *(controls.norm_g(s) for s in SIDES),
                     residual, side_sum, iters, status))
        profile = controls
    write_table(out / "exp3_controls",
                ("N1", "N2", "norm_f", "norm_g1", "norm_g2", "norm_g3", "norm_g4", "residual",
                 "norm_f_side_sum", "cg_iters", "status"), rows, cfg.format)
    if profile is not None:
        write_table(out / "exp3_profile", ("t", "f_norm_on_gamma"),
                    zip(profile.grid.times, profile.gamma_profile()), cfg.format)
    return bad


def run_spectra(cfg: RunConfig, out: Path) -> int:
    gap_rows, q_rows, top = [], [], []
    for order in sorted(cfg.n):
        basis = build_discretization(order).basis
        gap_rows.extend((order, k, g) for k, g in gap_scan(basis))
        qp = observability_quotient(basis).value
        qr = observability_quotient(basis, reinforced=True).value
        q_rows.append((order, qp, qr))
        top.append((order, top_pair_gap(basis)))
    write_table(out / "spectra_gaps", ("N", "k", "gap"), gap_rows, cfg.format)
    write_table(out / "spectra_quotients", ("N", "quotient_plain", "quotient_reinforced"), q_rows, cfg.format)
    if len(top) >= 3:
        gfit = scaling_fit(top)
        qfit = scaling_fit([(n, qp) for n, qp, _ in q_rows])
        summary = {"gap_exponent": gfit.exponent, "gap_r2": gfit.r_squared,
                   "quotient_exponent": qfit.exponent, "quotient_r2": qfit.r_squared,
                   "max_reinforced": max(r for _, _, r in q_rows)}
        (out / "spectra_fits.json").write_text(json.dumps(summary, indent=1) + "\n")
    return 0


RUNNERS = {"exp1-gaussian": run_exp1, "exp1-hat": run_exp1, "exp2": run_exp2,
           "exp3": run_exp3, "spectra": run_spectra}


def run_experiment(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = asdict(cfg)
    meta["delta"] = cfg.effective_delta
    (out / f"{cfg.experiment}_config.json").write_text(json.dumps(meta, indent=1, default=list) + "\n")
    bad = RUNNERS[cfg.experiment](cfg, out)
    return 1 if bad else 0


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_experiment(cfg)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 1
    except CollocHumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
