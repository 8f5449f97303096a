"""Command-line sweeps over lambda_p, lambda_e, the MPR strength X or the packet size B.

    cogrelay sweep --preset fig2 --axis lambda_p --from 0 --to 0.4 --step 0.05 --out fig2.csv
    cogrelay presets fig5

Exit codes: 0 success, 2 configuration error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import config as config_mod
from .channel import ConfigError
from .config import RunConfig, SimSettings
from .optimize import OptimizationResult, optimize, optimize_s3
from .presets import PRESETS, describe
from .rates import FEAS_TOL
from .sim import run

logger = logging.getLogger("cogrelay")

AXES = ("lambda_p", "lambda_e", "X", "B")
SYSTEMS = ("S1", "S2", "S3", "Sc", "SIM")
COLUMNS = (
    "axis_value", "system", "mu_s_star", "feasible", "beta", "f", "alpha", "omega", "gamma",
    "mu_p", "lambda_r", "mu_r", "pi_p", "pi_r", "nu0", "sim_mu_s", "sim_ci",
)


class InvariantError(RuntimeError):
    """An internal consistency check failed; the numbers cannot be trusted."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    step: float
    systems: tuple
    grid: int
    sim: SimSettings
    sc_bound: str = "outer"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {', '.join(AXES)}, got {self.axis!r}")
        if not self.step > 0:
            raise ConfigError(f"--step must be > 0, got {self.step}")
        unknown = [s for s in self.systems if s not in SYSTEMS]
        if unknown:
            raise ConfigError(f"unknown systems {', '.join(unknown)}; choose from {', '.join(SYSTEMS)}")
        if self.grid < 2:
            raise ConfigError(f"--grid must be >= 2, got {self.grid}")
        if self.sc_bound not in ("outer", "inner"):
            raise ConfigError(f"--sc-bound must be outer or inner, got {self.sc_bound!r}")
        lo, hi = (0.0, 1.0) if self.axis != "B" else (0.0, math.inf)
        for v in self.values():
            if not lo <= v <= hi or (self.axis == "B" and v <= 0):
                raise ConfigError(f"sweep value {v} outside the domain of {self.axis}")

    def values(self) -> list[float]:
        if self.stop < self.start:
            return []
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [float(np.round(self.start + k * self.step, 12)) for k in range(n)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    if math.isnan(v):  # undefined ratio, e.g. mu_p when the PU never transmitted
        return ""
    return format(float(v), ".12g")


def _check(res: OptimizationResult, lam_p: float) -> None:
    r = res.best_rates
    for name in ("mu_p", "mu_s", "mu_r", "mu_e", "lambda_r", "pi_p", "pi_r", "nu0"):
        v = getattr(r, name)
        if not (-FEAS_TOL <= v <= 1.0 + FEAS_TOL):
            raise InvariantError(f"{res.system}: {name} = {v} outside [0, 1]")
    if res.feasible and not r.stable:
        raise InvariantError(f"{res.system}: reported feasible but the returned policy is unstable")


def _opt_row(value: float, res: OptimizationResult) -> dict:
    p, r = res.best_policy, res.best_rates
    return dict(
        axis_value=value, system=res.system, mu_s_star=res.objective, feasible=res.feasible,
        beta=p.beta, f=p.f, alpha=p.alpha, omega=p.omega, gamma=p.gamma,
        mu_p=r.mu_p, lambda_r=r.lambda_r, mu_r=r.mu_r, pi_p=r.pi_p, pi_r=r.pi_r, nu0=r.nu0,
        sim_mu_s=None, sim_ci=None,
    )


def point_seed(seed: int, index: int) -> int:
    """Per-sweep-point simulation seed; independent of which systems are requested."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def evaluate_point(task) -> list[dict]:
    cfg, spec, index, value = task
    lam_p, lam_e, mpr, bits = cfg.lam_p, cfg.lam_e, None, None
    if spec.axis == "lambda_p":
        lam_p = value
    elif spec.axis == "lambda_e":
        lam_e = value
    elif spec.axis == "X":
        mpr = value
    else:
        bits = value
    table = cfg.scenario.table(mpr=mpr, bits=bits)

    rows = []
    for system in spec.systems:
        if system == "SIM":
            res = optimize_s3(table, lam_p, spec.grid)
            _check(res, lam_p)
            row = _opt_row(value, res)
            row.update(system="SIM", mu_s_star=None)
            if res.feasible:
                s = spec.sim
                rep = run(table, res.best_policy, lam_p, lam_e, replicas=s.replicas, slots=s.slots,
                          seed=point_seed(s.seed, index), warmup=s.warmup)
                for k in ("mu_p", "lambda_r", "mu_r", "pi_p", "pi_r", "nu0"):
                    row[k] = rep.mean[k]
                row["sim_mu_s"], row["sim_ci"] = rep.mu_s, rep.ci("mu_s")
                if rep.any_unstable:
                    logger.warning("simulation at %s = %s shows queue blow-up", spec.axis, value)
            rows.append(row)
            continue
        kw = {"bound": spec.sc_bound} if system == "Sc" else {}
        res = optimize(system, table, lam_e, lam_p, spec.grid, **kw)
        _check(res, lam_p)
        rows.append(_opt_row(value, res))
    return rows


def run_sweep(cfg: RunConfig, spec: SweepSpec, workers: int = 1) -> list[dict]:
    """Rows for every (sweep value, system), in sweep order."""
    tasks = [(cfg, spec, k, v) for k, v in enumerate(spec.values())]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(evaluate_point, tasks))
    else:
        chunks = [evaluate_point(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def write_csv(rows: Sequence[dict], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in COLUMNS])


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cogrelay", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="optimize (and optionally simulate) along one axis, write CSV")
    src = sw.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--config", help="YAML run configuration")
    sw.add_argument("--axis", required=True, choices=AXES)
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--step", type=float, required=True)
    sw.add_argument("--systems", default="S1,S2,S3,Sc", help="comma list from S1,S2,S3,Sc,SIM")
    sw.add_argument("--grid", type=int, help="grid points per policy axis (default 41)")
    sw.add_argument("--lambda-p", type=float, help="fixed lambda_p when another axis is swept")
    sw.add_argument("--lambda-e", type=float, help="override lambda_e")
    sw.add_argument("--x", dest="mpr", type=float, help="fixed MPR strength X")
    sw.add_argument("--sc-bound", default="outer", choices=("outer", "inner"))
    sw.add_argument("--sim", action="store_true", help="add the simulated original system (SIM)")
    sw.add_argument("--replicas", type=int)
    sw.add_argument("--slots", type=int)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out", default="-", help="CSV path, '-' for stdout")

    pr = sub.add_parser("presets", help="list built-in parameter sets")
    pr.add_argument("name", nargs="?")
    return ap


def _build(args) -> tuple[RunConfig, SweepSpec]:
    cfg = config_mod.from_preset(args.preset) if args.preset else config_mod.load(args.config)
    changes = {}
    if args.lambda_p is not None:
        changes["lam_p"] = args.lambda_p
    if args.lambda_e is not None:
        changes["lam_e"] = args.lambda_e
    for k, v in changes.items():
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"--{k.replace('lam_', 'lambda-')} must lie in [0, 1], got {v}")
    scenario = cfg.scenario
    if args.mpr is not None:
        from dataclasses import replace

        scenario = replace(scenario, mpr=args.mpr)
        scenario.table()  # validate
    sim = cfg.sim
    if any(v is not None for v in (args.replicas, args.slots, args.seed)):
        sim = SimSettings(
            replicas=args.replicas if args.replicas is not None else sim.replicas,
            slots=args.slots if args.slots is not None else sim.slots,
            seed=args.seed if args.seed is not None else sim.seed,
            warmup=sim.warmup,
        )
    from dataclasses import replace

    cfg = replace(cfg, scenario=scenario, sim=sim, **changes)
    if args.axis == "X" and "X" not in scenario.free:
        raise ConfigError(f"{scenario.name} has no MPR-strength axis")
    if args.axis == "B" and scenario.physical is None:
        raise ConfigError(f"{scenario.name} is stated in probabilities; B needs a physical channel")
    systems = tuple(s.strip() for s in args.systems.split(",") if s.strip())
    if args.sim and "SIM" not in systems:
        systems += ("SIM",)
    spec = SweepSpec(
        axis=args.axis, start=args.start, stop=args.stop, step=args.step, systems=systems,
        grid=args.grid if args.grid is not None else cfg.grid, sim=sim, sc_bound=args.sc_bound,
    )
    return cfg, spec


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "presets":
            names = [args.name] if args.name else sorted(PRESETS)
            print("\n\n".join(describe(n) for n in names))
            return 0
        cfg, spec = _build(args)
        rows = run_sweep(cfg, spec, workers=max(1, args.workers))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    return 0


if __name__ == "__main__":
    sys.exit(main())
