"""Command line front end: scenario config, runs, and verification commands.

Config files are flat ``key = value`` lines with dotted section keys;
unknown keys are rejected so misconfiguration fails loudly.  Everything is
deterministic: fixed 17-significant-digit decimal output, no stochastic
components anywhere.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import evolution, kernels, lagrangian, oracle, reconstruction
from .errors import BlowupError, ConfigurationError, ConswaveError
from .model import PRESETS, make_preset

DEFAULTS = {
    "model.preset": "camassa_holm",
    "model.k": 0.0,
    "model.f_coeffs": "",
    "model.g_coeffs": "",
    "initial.kind": "gaussian",
    "initial.amplitude": 0.5,
    "initial.rho_amplitude": 0.0,
    "initial.center": 0.0,
    "initial.width": 1.0,
    "initial.half_separation": 1.0,
    "initial.height": 1.0,
    "initial.x_left": -5.0,
    "initial.x_right": 5.0,
    "initial.smoothing": 0.5,
    "initial.file": "",
    "grid.x_min": -20.0,
    "grid.x_max": 20.0,
    "grid.n": 1024,
    "grid.pad_tol": 1e-3,
    "time.t_end": 1.0,
    "time.dt": 1e-3,
    "time.output_every": 0.1,
    "numerics.tan_clamp": 1e8,
    "numerics.eps_plateau": 1e-8,
    "numerics.substep_cos_threshold": 1e-4,
    "numerics.breaking_eps": 1e-4,
    "numerics.oracle_blowup_guard": 1e3,
    "outputs.directory": "out",
    "outputs.write_frames": True,
    "outputs.write_diagnostics": True,
    "outputs.x_samples": 1001,
}

_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _coerce(key: str, raw: str):
    proto = DEFAULTS[key]
    raw = raw.strip()
    if isinstance(proto, bool):
        if raw.lower() not in _BOOL:
            raise ConfigurationError(f"{key}: expected a boolean, got {raw!r}")
        return _BOOL[raw.lower()]
    if isinstance(proto, int):
        return int(raw)
    if isinstance(proto, float):
        return float(raw)
    return raw


def parse_config(path=None, overrides=()) -> dict:
    """Resolve defaults, an optional config file, and key=value overrides."""
    cfg = dict(DEFAULTS)
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in DEFAULTS:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = _coerce(key, raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"--override needs key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigurationError(f"unknown override key {key!r}")
        cfg[key] = _coerce(key, raw)
    return cfg


def build_model(cfg: dict):
    preset = cfg["model.preset"]
    if preset == "custom_polynomial":
        def parse_list(text, name):
            try:
                return [float(tok) for tok in text.split(",") if tok.strip()]
            except ValueError as exc:
                raise ConfigurationError(f"bad {name}: {text!r}") from exc
        return make_preset(preset, cfg["model.k"],
                           f_coeffs=parse_list(cfg["model.f_coeffs"], "f_coeffs"),
                           g_coeffs=parse_list(cfg["model.g_coeffs"], "g_coeffs"))
    return make_preset(preset, cfg["model.k"])


def build_initial(cfg: dict) -> lagrangian.InitialData:
    window = (cfg["grid.x_min"], cfg["grid.x_max"])
    kind = cfg["initial.kind"]
    if kind == "zero":
        return lagrangian.zero_data(window)
    if kind == "gaussian":
        return lagrangian.gaussian_data(
            amp_u=cfg["initial.amplitude"], amp_rho=cfg["initial.rho_amplitude"],
            center=cfg["initial.center"], width=cfg["initial.width"],
            window=window)
    if kind == "peakon":
        return lagrangian.peakon_data(c=cfg["initial.amplitude"],
                                      center=cfg["initial.center"], window=window)
    if kind == "peakon_antipeakon":
        return lagrangian.peakon_antipeakon_data(
            c=cfg["initial.amplitude"],
            half_sep=cfg["initial.half_separation"], window=window)
    if kind == "dambreak_rho":
        return lagrangian.dambreak_rho_data(
            height=cfg["initial.height"], x_left=cfg["initial.x_left"],
            x_right=cfg["initial.x_right"], smoothing=cfg["initial.smoothing"],
            window=window)
    if kind == "from_file":
        if not cfg["initial.file"]:
            raise ConfigurationError("initial.kind=from_file requires initial.file")
        return lagrangian.from_file(cfg["initial.file"], window=window)
    raise ConfigurationError(
        f"unknown initial.kind {kind!r}; known: {lagrangian.INITIAL_PRESETS}")


def validate_config(cfg: dict, initial: lagrangian.InitialData, e0: float) -> None:
    if cfg["grid.n"] < 16:
        raise ConfigurationError("grid.n must be at least 16")
    if cfg["time.dt"] <= 0:
        raise ConfigurationError("time.dt must be positive")
    if cfg["time.t_end"] < 0:
        raise ConfigurationError("time.t_end must be non-negative")
    if not 0.0 < cfg["grid.pad_tol"] < 1.0:
        raise ConfigurationError("grid.pad_tol must lie in (0, 1)")
    pad = kernels.truncation_padding(e0, 1.0, cfg["grid.pad_tol"])
    a, b = initial.window
    xs = np.linspace(a, b, 4001)
    mag = np.abs(initial.u(xs)) + np.abs(initial.rho(xs))
    peak = float(np.max(mag)) if np.max(mag) > 0 else 0.0
    if peak > 0:
        live = xs[mag > cfg["grid.pad_tol"] * peak]
        lo, hi = float(live[0]), float(live[-1])
        if lo - a < pad or b - hi < pad:
            raise ConfigurationError(
                f"window [{a}, {b}] does not clear the data support "
                f"[{lo:.3g}, {hi:.3g}] by the required padding {pad:.3g}")


def output_times(cfg: dict):
    t_end = cfg["time.t_end"]
    every = cfg["time.output_every"]
    if every <= 0 or t_end == 0:
        return [0.0, t_end] if t_end > 0 else [0.0]
    n = int(round(t_end / every))
    times = [min(i * every, t_end) for i in range(n + 1)]
    if times[-1] < t_end - 1e-12:
        times.append(t_end)
    times[-1] = t_end
    return times


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    return f"{value:.17g}"


def write_frame(path, frame: reconstruction.EulerianFrame) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u", "ux", "ux_valid", "rho", "rho_valid"])
        for i in range(frame.x.size):
            writer.writerow([
                _fmt(frame.x[i]), _fmt(frame.u[i]),
                _fmt(frame.ux[i] if frame.ux_valid[i] else 0.0),
                _fmt(frame.ux_valid[i]),
                _fmt(frame.rho[i] if frame.rho_valid[i] else 0.0),
                _fmt(frame.rho_valid[i]),
            ])


def has_unit_f2(model) -> bool:
    coef = model.f2.coef
    return coef.size == 1 and coef[0] == 1.0


class Runner:
    """Shared pipeline setup for the run/verify/compare commands."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.model = build_model(cfg)
        self.initial = build_initial(cfg)
        self.e0 = lagrangian.energy_e0(self.initial)
        validate_config(cfg, self.initial, self.e0)
        self.zmap = lagrangian.build_z_map(self.initial)
        self.grid = lagrangian.grid_for(self.initial, cfg["grid.n"], self.zmap)
        self.state0 = lagrangian.init_state(self.initial, self.grid, self.zmap)
        self.times = output_times(cfg)
        self.x_samples = np.linspace(cfg["grid.x_min"], cfg["grid.x_max"],
                                     cfg["outputs.x_samples"])

    def integrate(self, callback=None):
        return evolution.integrate(
            self.state0, self.model, self.cfg["time.t_end"],
            self.cfg["time.dt"], output_times=self.times, callback=callback,
            tan_clamp=self.cfg["numerics.tan_clamp"],
            substep_cos_threshold=self.cfg["numerics.substep_cos_threshold"])


def cmd_run(cfg: dict, out_dir=None) -> int:
    out = Path(out_dir or cfg["outputs.directory"])
    out.mkdir(parents=True, exist_ok=True)
    runner = Runner(cfg)
    rho_ref = diag.rho_invariant(runner.state0) if has_unit_f2(runner.model) else None

    meta = {"config": {k: cfg[k] for k in sorted(cfg)}, "E0": runner.e0,
            "z_window": list(runner.zmap.z_window), "dz": runner.grid.dz}
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))

    diag_path = out / "diagnostics.csv"
    diag_fh = None
    if cfg["outputs.write_diagnostics"]:
        diag_fh = open(diag_path, "w", newline="")
        diag_writer = csv.writer(diag_fh)
        diag_writer.writerow(diag.DiagnosticsReport.field_names())

    index = {"count": 0}

    def on_output(state):
        i = index["count"]
        index["count"] = i + 1
        if cfg["outputs.write_frames"]:
            frame = reconstruction.reconstruct(
                state, runner.x_samples, cfg["numerics.eps_plateau"])
            write_frame(out / f"frame_{i:04d}.csv", frame)
        if diag_fh is not None:
            fields = kernels.compute_P_Px(state, runner.model)
            report = diag.bounds_report(
                state, fields, runner.model, runner.e0,
                rho_invariant_ref=rho_ref,
                breaking_eps=cfg["numerics.breaking_eps"])
            diag_writer.writerow([_fmt(v) for v in report.row()])
            diag_fh.flush()

    try:
        runner.integrate(callback=on_output)
    finally:
        if diag_fh is not None:
            diag_fh.close()
    print(f"run complete: {index['count']} output times -> {out}")
    return 0


def cmd_verify(cfg: dict) -> int:
    runner = Runner(cfg)
    model = runner.model
    checks = []

    fast = kernels.compute_P_Px(runner.state0, model)
    direct = kernels.compute_P_Px_direct(runner.state0, model)
    gap = max(float(np.max(np.abs(fast.P - direct.P))),
              float(np.max(np.abs(fast.Px - direct.Px))))
    checks.append(("nonlocal fast/direct equivalence", gap, 1e-10))

    rho_ref = diag.rho_invariant(runner.state0) if has_unit_f2(model) else None
    reports = []

    def on_output(state):
        fields = kernels.compute_P_Px(state, model)
        reports.append(diag.bounds_report(
            state, fields, model, runner.e0, rho_invariant_ref=rho_ref,
            breaking_eps=cfg["numerics.breaking_eps"]))

    runner.integrate(callback=on_output)
    checks.append(("u_Z identity residual",
                   max(r.residual_uZ for r in reports), 1e-3))
    checks.append(("x_Z identity residual",
                   max(r.residual_xZ for r in reports), 1e-3))
    checks.append(("energy drift (relative)",
                   max(r.energy_drift_rel for r in reports), 1e-4))

    phi = np.exp(-(runner.grid.z - np.mean(runner.grid.z)) ** 2)
    checks.append(("Frechet derivative residual (eps=1e-5)",
                   diag.frechet_check(runner.state0, model, phi, 1e-5), 1e-3))
    if rho_ref is not None:
        checks.append(("density invariant drift (f''=1)",
                       max(r.rho_invariant_drift for r in reports), 1e-6))

    failed = 0
    for name, value, tol in checks:
        ok = value <= tol
        failed += 0 if ok else 1
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {value:.3e} (tol {tol:.1e})")
    return 1 if failed else 0


def cmd_compare(cfg: dict) -> int:
    runner = Runner(cfg)
    lag_states = runner.integrate()
    eul0 = oracle.make_state(runner.initial, cfg["grid.n"])
    interior = np.abs(eul0.x - 0.5 * (eul0.x[0] + eul0.x[-1])) \
        <= 0.4 * (eul0.x[-1] - eul0.x[0])
    xq = eul0.x[interior]
    print(f"{'t':>8} {'max|du|':>12} {'max|drho|':>12}")
    try:
        eul_states = oracle.oracle_integrate(
            eul0, runner.model, cfg["time.t_end"], cfg["time.dt"],
            output_times=runner.times,
            blowup_guard=cfg["numerics.oracle_blowup_guard"])
    except BlowupError as exc:
        print(f"oracle stopped: {exc}")
        print("the characteristic solver continues past breaking; "
              "no comparison table available")
        return 0
    worst = 0.0
    for ls, es in zip(lag_states, eul_states):
        frame = reconstruction.reconstruct(ls, xq, cfg["numerics.eps_plateau"])
        du = float(np.max(np.abs(frame.u - es.u[interior])))
        drho_vals = np.abs(frame.rho - es.rho[interior])
        drho = float(np.max(drho_vals[frame.rho_valid])) if frame.rho_valid.any() else 0.0
        worst = max(worst, du)
        print(f"{ls.t:8.4f} {du:12.4e} {drho:12.4e}")
    print(f"max over times: {worst:.4e}")
    return 0


def cmd_convergence(cfg: dict, levels: int = 3) -> int:
    base_n = cfg["grid.n"]
    base_dt = cfg["time.dt"]
    xq = np.linspace(cfg["grid.x_min"] * 0.8, cfg["grid.x_max"] * 0.8, 2001)
    finals = []
    ns = [base_n * (2 ** lvl) for lvl in range(levels)]
    for lvl, n in enumerate(ns):
        level_cfg = dict(cfg)
        level_cfg["grid.n"] = n
        level_cfg["time.dt"] = base_dt / (2 ** lvl)
        runner = Runner(level_cfg)
        states = runner.integrate()
        finals.append(reconstruction.reconstruct(
            states[-1], xq, cfg["numerics.eps_plateau"]).u)
    print(f"{'N':>8} {'err vs finest':>14} {'order':>8}")
    errs = [float(np.max(np.abs(u - finals[-1]))) for u in finals[:-1]]
    for i, (n, err) in enumerate(zip(ns[:-1], errs)):
        order = (np.log2(errs[i - 1] / err) if i > 0 and err > 0 else float("nan"))
        print(f"{n:8d} {err:14.4e} {order:8.2f}")
    print(f"{ns[-1]:8d} {'reference':>14}")
    return 0


def cmd_presets() -> int:
    print("flux presets:")
    for name in PRESETS:
        print(f"  {name}")
    print("initial data kinds:")
    for name in lagrangian.INITIAL_PRESETS:
        print(f"  {name}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="conswave",
        description="Globally conservative solutions of two-component "
                    "nonlinear dispersive wave equations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "verify", "compare", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE")
        if name == "convergence":
            p.add_argument("--levels", type=int, default=3)
    sub.add_parser("presets")
    args = parser.parse_args(argv)

    if args.command == "presets":
        return cmd_presets()
    try:
        cfg = parse_config(args.config, args.override)
        if args.command == "run":
            return cmd_run(cfg, out_dir=args.out)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        return cmd_convergence(cfg, levels=args.levels)
    except ConswaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
