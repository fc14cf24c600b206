"""Command-line front end.

Subcommands: simulate | equilibrium | lyapunov | dispatch. Exit codes
are a stable contract: 0 success, 2 input error, 3 infeasibility,
4 runtime domain abort. Verbosity via the ICISIM_LOG environment
variable (debug/info/warning).
"""

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import equilibrium as eqm
from . import lyapunov as lyap
from . import scenario as scn
from . import sim
from .errors import (DomainError, DroopCapabilityError, InfeasibleError,
                     ScenarioError)

log = logging.getLogger("icisim")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_DOMAIN = 4

ROCOF_WINDOW_S = 0.5   # relay-style measurement window


def _final_loads(scenario):
    loads = scenario.loads.copy()
    for ev in scenario.events:
        loads[ev.node] = ev.new_load
    return loads


def _load_scenario(args):
    scenario = scn.load(args.scenario)
    if args.h is not None or args.t_end is not None:
        cfg = scenario.integrator
        scenario.integrator = scn.IntegratorConfig(
            h=args.h if args.h is not None else cfg.h,
            t_end=args.t_end if args.t_end is not None else cfg.t_end,
            record_every=cfg.record_every, omega_min=cfg.omega_min)
    return scenario


def _print_summary(scenario, traj):
    f_final = traj.f_hz[-1]
    print(f"final frequencies [Hz]: "
          + " ".join(f"{v:.6f}" for v in f_final))
    print(f"rocof_max ({ROCOF_WINDOW_S:g} s window): "
          f"{sim.rocof_max(traj, ROCOF_WINDOW_S):.4f} Hz/s")
    if traj.p_m is not None:
        disc = sim.sharing_ratios(traj, scenario.q_eff)
        total_inj = float(traj.p_m[-1].sum())
        total_load = float(_final_loads(scenario).sum())
        print(f"sharing discrepancy: {disc:.3e}")
        print(f"total injection vs load [kW]: "
              f"{total_inj / 1e3:.4f} / {total_load / 1e3:.4f}")


def cmd_simulate(args):
    scenario = _load_scenario(args)
    traj = sim.simulate(scenario)
    if args.out:
        sim.write_csv(traj, args.out)
        print(f"trajectory written to {args.out}")
    _print_summary(scenario, traj)
    return EXIT_OK


def cmd_equilibrium(args):
    scenario = _load_scenario(args)
    mode = args.mode or scenario.mode
    loads = _final_loads(scenario)
    if mode == "primary":
        setpoints = scenario.p_m_star if scenario.p_m_star is not None \
            else scenario.loads
        delta = eqm.delta_n(loads, setpoints, scenario.params.d
                            + scenario.params.d_tilde, scenario.params.omega_star)
        print(f"Delta_N: {delta:.6f} (rad/s)^2")
        if delta <= 0:
            raise DroopCapabilityError("no synchronous equilibrium: Delta_N <= 0")
        eq = eqm.equilibrium_primary(loads, setpoints, scenario.params,
                                     scenario.topology)
        print(f"omega_s: {eq.omega_s:.6f} rad/s ({eq.omega_s / 2 / math.pi:.6f} Hz)")
        print(f"omega_u: {eq.omega_u:.6f} rad/s")
        print("eta_s [rad]: " + " ".join(f"{v:.6e}" for v in eq.eta))
        print(f"residual [W]: {eq.residual:.3e}")
    else:
        eq = eqm.equilibrium_secondary(loads, scenario.q_eff, scenario.params,
                                       scenario.topology)
        print(f"xi_bar: {eq.xi_bar[0]:.6f}")
        print("P_m_star [kW]: " + " ".join(f"{v / 1e3:.4f}" for v in eq.p_m))
        print("eta_bar [rad]: " + " ".join(f"{v:.6e}" for v in eq.eta))
        print(f"residual [W]: {eq.residual:.3e}")
    return EXIT_OK


def cmd_lyapunov(args):
    scenario = _load_scenario(args)
    if args.r_theta <= 0 or args.r_omega <= 0:
        raise ScenarioError("degenerate sampling ball: radii must be positive")
    loads = _final_loads(scenario)
    if scenario.mode == "secondary":
        eq = eqm.equilibrium_secondary(loads, scenario.q_eff, scenario.params,
                                       scenario.topology)
        anchor = np.concatenate([eq.theta, np.full(scenario.n, eq.omega_bar),
                                 eq.xi_bar])
        fn = lyap.EnergyFunction(kind=lyap.SECONDARY, params=scenario.params,
                                 topology=scenario.topology, anchor=anchor)
    else:
        setpoints = scenario.p_m_star
        eq = eqm.equilibrium_primary(loads, setpoints, scenario.params,
                                     scenario.topology)
        anchor = np.concatenate([eq.theta, np.full(scenario.n, eq.omega_s)])
        fn = lyap.EnergyFunction(kind=lyap.PRIMARY, params=scenario.params,
                                 topology=scenario.topology, anchor=anchor,
                                 omega_s=eq.omega_s)
    radii = lyap.BallRadii(r_theta=args.r_theta, r_omega=args.r_omega,
                           r_xi_rel=args.r_xi)
    ok_pd, worst, _ = lyap.sample_positive(fn, radii, n_samples=args.samples,
                                           seed=args.seed)
    print(f"positive definiteness ({args.samples} samples): "
          f"{'PASS' if ok_pd else 'FAIL'} (min shifted energy {worst:.3e})")
    traj = sim.simulate(scenario)
    report = lyap.check_decrease(traj, fn)
    print(f"monotone decrease along trajectory: "
          f"{'PASS' if report.passed else 'FAIL'} "
          f"(max increment {report.max_increment:.3e}, "
          f"tolerance {report.tolerance:.3e})")
    print(f"shifted energy: initial {report.initial_value:.6e}, "
          f"final {report.final_value:.6e}")
    return EXIT_OK if (ok_pd and report.passed) else EXIT_INFEASIBLE


def cmd_dispatch(args):
    scenario = _load_scenario(args)
    loads = _final_loads(scenario)
    p_star = eqm.optimal_injection(loads, scenario.q_eff)
    print("P_m_star [kW]: " + " ".join(f"{v / 1e3:.4f}" for v in p_star))
    print(f"total [kW]: {p_star.sum() / 1e3:.4f} "
          f"(load {loads.sum() / 1e3:.4f})")
    weighted = scenario.q_eff * p_star
    print(f"q_i * P_i spread: {np.ptp(weighted) / np.mean(weighted):.3e}")
    return EXIT_OK


def _run_one(cmd, args):
    try:
        return cmd(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InfeasibleError, DroopCapabilityError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DomainError as exc:
        print(f"domain abort: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def _batch_worker(payload):
    cmd_name, scenario_path, out_dir = payload
    args = argparse.Namespace(scenario=scenario_path, h=None, t_end=None,
                              mode=None, out=None)
    if out_dir:
        args.out = str(Path(out_dir) / (Path(scenario_path).stem + ".csv"))
    print(f"--- {scenario_path}")
    return _run_one(_COMMANDS[cmd_name], args)


def _run_batch(cmd_name, args):
    paths = sorted(str(p) for p in Path(args.scenario).glob("*.scenario"))
    if not paths:
        print(f"error: no *.scenario files in {args.scenario}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = getattr(args, "out", None)
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    payloads = [(cmd_name, p, out_dir) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_batch_worker, payloads))
    else:
        codes = [_batch_worker(p) for p in payloads]
    return max(codes)


_COMMANDS = {
    "simulate": cmd_simulate,
    "equilibrium": cmd_equilibrium,
    "lyapunov": cmd_lyapunov,
    "dispatch": cmd_dispatch,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="icisim",
        description="Simulate and analyze networks of inverters with "
                    "capacitive inertia.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True,
                       help="scenario file, or a directory of *.scenario files")
        p.add_argument("--h", type=float, default=None, metavar="S",
                       help="override the integration step")
        p.add_argument("--t-end", dest="t_end", type=float, default=None,
                       metavar="S", help="override the simulation horizon")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for directory batches")

    p = sub.add_parser("simulate", help="integrate and write trajectory CSV")
    common(p)
    p.add_argument("--out", default=None, help="trajectory CSV path")

    p = sub.add_parser("equilibrium",
                       help="report the equilibrium for the post-event loads")
    common(p)
    p.add_argument("--mode", choices=["primary", "secondary"], default=None)

    p = sub.add_parser("lyapunov", help="numerical stability certification")
    common(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r-theta", type=float, default=0.1)
    p.add_argument("--r-omega", type=float, default=1.0)
    p.add_argument("--r-xi", type=float, default=0.01,
                   help="xi radius as a fraction of the anchor magnitude")

    p = sub.add_parser("dispatch", help="optimal injections for the final loads")
    common(p)
    return parser


def main(argv=None):
    level = os.environ.get("ICISIM_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    if not hasattr(args, "mode"):
        args.mode = None
    if Path(args.scenario).is_dir():
        return _run_batch(args.command, args)
    return _run_one(_COMMANDS[args.command], args)


if __name__ == "__main__":
    sys.exit(main())
