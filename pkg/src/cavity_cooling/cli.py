"""Command-line runner: ``cavity-cooling <command> [--config FILE] [flags]``.

Config files are flat ``key = value`` text with ``#`` comments.  Command-line
flags override file values.  Frequencies are given in Hz (the ``x/2pi``
values) and converted to rad/s internally; lifetimes are in seconds and
``inf`` disables the corresponding loss.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 verification failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from . import fock, lindblad, protocol, verification
from .serialize import write_csv, write_distribution, write_json, write_wigner
from .wigner import PhaseGrid, wigner_diagonal

MODES = ("cool-closed", "cool-open", "fidelity-sweep", "wigner", "verify")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    mode: str = "cool-closed"
    n_t: float = 3.6
    n_atoms: int = 5
    tail_tol: float = 1e-8
    g_hz: float = 49e3
    delta_hz: float = 245e3
    omega_hz: float = 51.1e9
    cavity_lifetime: float = 130e-3
    atom_lifetime: float = 30e-3
    n_t_bath: float | None = None
    gap: float = 82e-6
    dt: float = 1e-7
    out: str = "results"
    seed: int = 0
    cases: int = 1000
    trajectory_every: int = 0
    x_min: float = -4.0
    x_max: float = 4.0
    p_min: float = -4.0
    p_max: float = 4.0
    nx: int = 161
    np: int = 161

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.n_t < 0:
            raise ConfigError("n_t must be >= 0")
        if self.n_atoms < 1:
            raise ConfigError("n_atoms must be >= 1")
        if not 0 < self.tail_tol < 1:
            raise ConfigError("tail_tol must lie in (0, 1)")
        try:
            self.grid()
            self.physical()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self) -> PhaseGrid:
        return PhaseGrid(self.x_min, self.x_max, self.p_min, self.p_max, self.nx, self.np)

    def physical(self) -> lindblad.PhysicalParams:
        return lindblad.PhysicalParams.from_hz(
            g_hz=self.g_hz,
            delta_hz=self.delta_hz,
            omega_hz=self.omega_hz,
            cavity_lifetime=self.cavity_lifetime,
            atom_lifetime=self.atom_lifetime,
            n_t_bath=self.n_t if self.n_t_bath is None else self.n_t_bath,
            gap=self.gap,
            dt=self.dt,
        )

    def truncation(self) -> fock.Truncation:
        return fock.choose_truncation(self.n_t, self.tail_tol)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_ALIASES = {"atoms": "n_atoms", "output_dir": "out", "n-t": "n_t"}


def _coerce(key, raw: str):
    kind = _FIELDS[key].type
    if "int" in kind:
        return int(raw)
    if "float" in kind:
        if raw.strip().lower() in ("none", "") and "None" in kind:
            return None
        return float(raw)
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key).replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {raw!r} for {key}") from None
    return values


def build_config(mode: str, config_path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = {}
    if config_path:
        path = Path(config_path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        values.update(parse_config_text(text, str(path)))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["mode"] = mode
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def _wigner_pair(cfg, out, states: dict):
    grid = cfg.grid()
    for name, (state, meta) in states.items():
        write_wigner(out / f"wigner_{name}.csv", grid, wigner_diagonal(state, grid), meta)


def cmd_cool_closed(cfg: ExperimentConfig, stdout=sys.stdout) -> dict:
    out = Path(cfg.out)
    trunc = cfg.truncation()
    initial = fock.thermal_state(cfg.n_t, trunc)
    res = protocol.cool_to_vacuum(cfg.n_t, cfg.n_atoms, trunc)
    write_distribution(out / "initial_distribution.csv", fock.photon_distribution(initial))
    write_distribution(out / "final_distribution.csv", fock.photon_distribution(res.final_state))
    summary = {**res.to_dict(), "dim": trunc.dim, "tail_mass": initial.tail_mass,
               "vacuum_fidelity": res.fidelity_trace[-1]}
    write_json(out / "cooling_result.json", summary)
    _wigner_pair(cfg, out, {
        "initial": (initial, {"state": "thermal", "n_t": cfg.n_t}),
        "final": (res.final_state, {"state": "cooled", "n_t": cfg.n_t, "n_atoms": cfg.n_atoms}),
    })
    print(f"p_post = {res.p_post:.6f}", file=stdout)
    print(f"vacuum_fidelity = {res.fidelity_trace[-1]:.6f}", file=stdout)
    return summary


def cmd_fidelity_sweep(cfg: ExperimentConfig, stdout=sys.stdout) -> list:
    rows = protocol.fidelity_sweep(cfg.n_t, cfg.n_atoms, cfg.truncation())
    write_csv(Path(cfg.out) / "fidelity_sweep.csv", ("N", "fidelity", "p_post"), rows)
    for n, f, p in rows:
        print(f"N = {n:2d}  fidelity = {f:.6f}  p_post = {p:.6f}", file=stdout)
    return rows


def cmd_cool_open(cfg: ExperimentConfig, stdout=sys.stdout) -> dict:
    out = Path(cfg.out)
    params = cfg.physical()
    try:
        params.check_step()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    trunc = cfg.truncation()
    initial = fock.thermal_state(cfg.n_t, trunc)
    seq = protocol.dyadic_sequence(cfg.n_atoms)
    res = lindblad.run_open_protocol(params, seq, initial, trajectory_every=cfg.trajectory_every)
    summary = {**res.to_dict(), "n_t": cfg.n_t, "phases": list(seq.phases), "dim": trunc.dim,
               "params": dataclasses.asdict(params)}
    write_json(out / "open_result.json", summary)
    write_distribution(out / "initial_distribution.csv", fock.photon_distribution(initial))
    write_distribution(out / "final_distribution.csv", fock.photon_distribution(res.final_field))
    if res.trajectory:
        write_csv(out / "trajectory.csv", ("time_s", "mean_photon"), res.trajectory)
    _wigner_pair(cfg, out, {
        "initial": (initial, {"state": "thermal", "n_t": cfg.n_t}),
        "final": (res.final_field, {"state": "cooled-open", "n_t": cfg.n_t, "n_atoms": cfg.n_atoms}),
    })
    print(f"vacuum_fidelity = {res.vacuum_fidelity:.6f}", file=stdout)
    print(f"best_thermal n_t = {res.best_thermal_nbar:.6f}  fidelity = {res.fidelity_to_best_thermal:.6f}",
          file=stdout)
    print(f"p_total = {res.p_total:.6f}", file=stdout)
    return summary


def cmd_wigner(cfg: ExperimentConfig, stdout=sys.stdout) -> dict:
    out = Path(cfg.out)
    trunc = cfg.truncation()
    initial = fock.thermal_state(cfg.n_t, trunc)
    cooled = protocol.cool_to_vacuum(cfg.n_t, cfg.n_atoms, trunc).final_state
    _wigner_pair(cfg, out, {
        "thermal": (initial, {"state": "thermal", "n_t": cfg.n_t}),
        "cooled": (cooled, {"state": "cooled", "n_t": cfg.n_t, "n_atoms": cfg.n_atoms}),
    })
    print(f"wrote Wigner grids ({cfg.nx}x{cfg.np}) to {out}", file=stdout)
    return {"dim": trunc.dim}


def cmd_verify(cfg: ExperimentConfig, stdout=sys.stdout, fault=None) -> dict:
    report = verification.run_equivalence(seed=cfg.seed, n_cases=cfg.cases, fault=fault)
    write_json(Path(cfg.out) / "verify_report.json", report)
    print(f"cases = {report['cases']}  comparisons = {report['comparisons']}", file=stdout)
    for key in sorted(k for k in report if k.startswith("max_")):
        print(f"{key} = {report[key]:.3e}", file=stdout)
    print("PASS" if report["passed"] else "FAIL", file=stdout)
    return report


COMMANDS = {
    "cool-closed": cmd_cool_closed,
    "cool-open": cmd_cool_open,
    "fidelity-sweep": cmd_fidelity_sweep,
    "wigner": cmd_wigner,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-cooling", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in MODES:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--n-t", dest="n_t", type=float, help="initial thermal photon number")
        p.add_argument("--atoms", dest="n_atoms", type=int, help="number of atoms")
        p.add_argument("--out", dest="out", help="output directory")
        p.add_argument("--tail-tol", dest="tail_tol", type=float, help="allowed thermal tail mass")
        p.add_argument("--dt", dest="dt", type=float, help="integrator step (s)")
        p.add_argument("--gap", dest="gap", type=float, help="atom-free interval (s)")
        p.add_argument("--seed", dest="seed", type=int, help="seed for randomized checks")
        if name == "verify":
            p.add_argument("--cases", dest="cases", type=int, help="number of random instances")
            p.add_argument("--inject-fault", dest="fault", choices=verification.FAULTS, help=argparse.SUPPRESS)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    opts = vars(args)
    command = opts.pop("command")
    config_path = opts.pop("config")
    fault = opts.pop("fault", None)
    try:
        cfg = build_config(command, config_path, opts)
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    try:
        if command == "verify":
            report = cmd_verify(cfg, stdout, fault=fault)
            if not report["passed"]:
                print(f"first failing case: {report['first_failure']}", file=stderr)
                return EXIT_VERIFY
            return EXIT_OK
        COMMANDS[command](cfg, stdout)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (lindblad.IntegratorError, protocol.PostselectionError, fock.TruncationError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
