"""Command line front end.

Every subcommand reads its options from flags, falling back to a flat JSON
file given with --config, then to built-in defaults (flags win over config,
config wins over defaults; unknown config keys are rejected).  Results land
in --out (default ``<command>.csv`` or ``<command>.json``) and the resolved
options are always mirrored next to it in ``<out>.config.json``.

Exit codes:

* 0  success
* 1  internal failure (an iteration refused to converge, an orbit
     degenerated)
* 2  invalid input: bad flags, malformed config or CSV, parameters outside
     their domains
* 3  the run itself succeeded but the measured quantity violates the
     hypothesis it probes (a failed condition probe, a diverged
     return-time average, a negative domination exponent, an empty-handed
     two-stage selection)

``ROVELLA_THREADS`` caps the thread pool used for per-seed ensembles; the
members are independent and merged in index order, so the output is
byte-identical for any thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels, measures
from .errors import (
    ConvergenceError,
    DegeneracyError,
    InputDomainError,
    RovellaError,
    SpecError,
)
from .flow_model import (
    CrossSectionPoint,
    SaddleSpec,
    return_map_composed,
    return_time,
)
from .interval_maps import (
    MapSpec,
    eval_map,
    find_fixed_points,
    solve_conjugacy,
)
from .output import dump_json, jsonable, read_csv_columns, write_csv
from .pliss import HyperbolicTimeParams, hyperbolic_times, pliss_times
from .solenoid import SolenoidSpec, empirical_fiber_diameter, fiber_cluster_count
from .torusphere import domination_profile, lyapunov_ensemble

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_HYPOTHESIS = 3

_KINDS = ("g0", "f0", "tent", "perturbed")
_TENT_KINDS = ("g0", "tent", "perturbed")


# ---------------------------------------------------------------------------
# option plumbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Opt:
    name: str
    type: object
    default: object
    help: str
    choices: tuple | None = None
    required: bool = False

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


def _checkpoints_arg(value):
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return tuple(int(part) for part in str(value).split(","))


_SEED_OPT = _Opt("seed", int, 0,
                 "base RNG seed; ensemble member i uses seed+i")


def _resolve(command: str, opts: list[_Opt], args) -> dict:
    config = {}
    if args.config is not None:
        with open(args.config) as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise SpecError("--config must hold a flat JSON object")
        known = {o.name for o in opts} | {"seed"}
        unknown = sorted(set(config) - known)
        if unknown:
            raise SpecError(
                f"unknown config keys for '{command}': {', '.join(unknown)}")
    vals = {}
    for o in [*opts, _SEED_OPT]:
        v = getattr(args, o.name)
        if v is None and o.name in config:
            raw = config[o.name]
            v = raw if raw is None else o.type(raw)
        if v is None:
            if o.required:
                raise SpecError(
                    f"'{command}' needs {o.flag} (flag or config key)")
            v = o.default
        vals[o.name] = v
    return vals


def _mapspec(vals: dict) -> MapSpec:
    """Build the map from kind/alpha/eps options, resolving a missing alpha
    to the family default (2.0 for the ball quotient, else 1.5) and writing
    the resolved value back for the config mirror."""
    kind = vals["kind"]
    alpha = vals.get("alpha")
    if alpha is None:
        alpha = 2.0 if kind == "f0" else 1.5
        vals["alpha"] = alpha
    eps = vals.get("eps", 0.0)
    if kind == "tent":
        return MapSpec.tent()
    if kind == "g0":
        return MapSpec.g0(alpha)
    if kind == "f0":
        return MapSpec.f0(alpha)
    return MapSpec.perturbed(alpha, eps)


def _matched_saddle(alpha: float, lambda1: float = 1.0,
                    C: float = 4.0) -> SaddleSpec:
    # lambda3 pins the saddle exponent to the map's critical order; lambda2
    # sits just beyond the beta > alpha + 2 floor
    return SaddleSpec(lambda1, -(alpha + 2.5) * lambda1, -alpha * lambda1, C)


def _thread_count() -> int:
    raw = os.environ.get("ROVELLA_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def _ordered_map(fn, items: list) -> list:
    workers = min(_thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# handlers (one per subcommand, returning the exit code)
# ---------------------------------------------------------------------------

def _cmd_orbit(vals: dict) -> int:
    spec = _mapspec(vals)
    t0 = vals["t0"]
    if t0 is None:
        t0 = float(np.random.default_rng(vals["seed"]).uniform(-1.0, 1.0))
        vals["t0"] = t0
    if not (math.isfinite(t0) and abs(t0) <= 1.0):
        raise InputDomainError(f"t0 must lie in [-1, 1], got {t0}")
    code, alpha, eps = spec.kernel_args
    t = _kernels.orbit_array(code, alpha, eps, float(t0), vals["n"])
    write_csv(vals["out"], ["step", "t"], enumerate(t.tolist()))
    print(f"wrote {vals['out']} ({t.size} points)")
    return EXIT_OK


def _cmd_conjugacy(vals: dict) -> int:
    spec = _mapspec(vals)
    table = solve_conjugacy(spec, vals["grid_size"], vals["tol"])
    write_csv(vals["out"], ["x", "h"], zip(table.grid.tolist(),
                                           table.values.tolist()))
    print(f"wrote {vals['out']} (residual={table.residual:.3e}, "
          f"sweeps={table.sweeps})")
    return EXIT_OK


def _cmd_fixed_points(vals: dict) -> int:
    spec = _mapspec(vals)
    reports = find_fixed_points(spec)
    write_csv(vals["out"], ["location", "multiplier", "stability"],
              [(r.location, r.multiplier, r.stability) for r in reports])
    print(f"wrote {vals['out']} ({len(reports)} fixed points)")
    return EXIT_OK


def _cmd_lyapunov(vals: dict) -> int:
    spec = _mapspec(vals)
    rng = np.random.default_rng(vals["seed"])
    t0s = rng.uniform(-1.0, 1.0, size=vals["seeds"])
    ens = lyapunov_ensemble(spec, t0s, vals["n"])
    dump_json({
        "kind": vals["kind"], "alpha": vals["alpha"], "eps": vals.get("eps", 0.0),
        "n": ens.n, "seeds": vals["seeds"], "seed": vals["seed"],
        "meridian_mean": ens.meridian_mean,
        "parallel_mean": ens.parallel_mean,
        "log2": math.log(2.0),
        "bad_count": int(np.count_nonzero(ens.bad >= 0)),
        "meridian_exponents": ens.meridian_exponents,
        "parallel_exponents": ens.parallel_exponents,
    }, vals["out"])
    print(f"wrote {vals['out']} (meridian={ens.meridian_mean:.6f}, "
          f"parallel={ens.parallel_mean:.6f})")
    return EXIT_OK


def _cmd_pliss(vals: dict) -> int:
    (a,) = read_csv_columns(vals["input"], 1)
    report = pliss_times(a, vals["c1"], vals["c2"], vals["H"])
    dump_json({
        "n": report.n, "count": report.count,
        "frequency": report.frequency, "zeta": report.zeta,
        "floor": report.floor, "hypothesis_met": report.hypothesis_met,
        "times": report.times,
    }, vals["out"])
    print(f"wrote {vals['out']} ({report.count} times, "
          f"frequency={report.frequency:.4f})")
    return EXIT_OK


def _cmd_hyptimes(vals: dict) -> int:
    psi, D = read_csv_columns(vals["input"], 2)
    params = HyperbolicTimeParams(vals["c"], vals["delta"], vals["b"],
                                  vals["beta"])
    times = hyperbolic_times(psi, D, params)
    dump_json({
        "n": int(np.asarray(psi).size), "count": int(times.size),
        "frequency": float(times.size) / np.asarray(psi).size,
        "c": params.c, "delta": params.delta, "b": params.b,
        "beta": params.beta, "times": times,
    }, vals["out"])
    print(f"wrote {vals['out']} ({times.size} hyperbolic times)")
    return EXIT_OK


def _cmd_abv0(vals: dict) -> int:
    spec = _mapspec(vals)

    def run(i: int) -> dict:
        res = measures.abv0_orbit_driver(spec, vals["seed"] + i, vals["n"],
                                         vals["xi"], vals["b"], vals["beta"],
                                         vals["r1"])
        k = res.constants
        return {
            "seed": vals["seed"] + i, "count": res.count,
            "floor": res.floor, "theta": k.theta, "c": k.c, "H1": k.H1,
            "r2": k.r2, "stage1_count": res.stage1_count,
            "stage2_count": res.stage2_count,
            "failures": list(res.failures), "passed": res.passed,
        }

    members = _ordered_map(run, list(range(vals["seeds"])))
    all_passed = all(m["passed"] for m in members)
    dump_json({
        "kind": vals["kind"], "alpha": vals["alpha"], "n": vals["n"],
        "xi": vals["xi"], "b": vals["b"], "beta": vals["beta"],
        "r1": vals["r1"], "members": members, "all_passed": all_passed,
    }, vals["out"])
    print(f"wrote {vals['out']} "
          f"({sum(m['passed'] for m in members)}/{len(members)} passed)")
    return EXIT_OK if all_passed else EXIT_HYPOTHESIS


def _cmd_return_map(vals: dict) -> int:
    f0 = MapSpec.f0(vals["alpha"])
    s = _matched_saddle(vals["alpha"], vals["lambda1"], vals["C"])
    sol = SolenoidSpec()
    mag = np.linspace(0.05, 0.95, vals["points"])
    rows = []
    for x1 in np.concatenate([-mag[::-1], mag]):
        p = CrossSectionPoint(x1=float(x1), x2=0.25, theta=[0.3], z=0.1 + 0j)
        image, diag = return_map_composed(s, f0, sol, p)
        rows.append((float(x1), image.x1, eval_map(f0, float(x1)), image.x2,
                     return_time(float(x1), s, vals["tau0"]),
                     diag.scale_error, diag.x1_roundtrip_error))
    write_csv(vals["out"],
              ["x1", "y1", "y1_closed", "y2", "time", "scale_error",
               "roundtrip_error"], rows)
    worst = max(r[5] for r in rows)
    print(f"wrote {vals['out']} ({len(rows)} passages, "
          f"max scale error {worst:.3e})")
    return EXIT_OK


def _cmd_domination(vals: dict) -> int:
    spec = _mapspec(vals)
    prof = domination_profile(spec, vals["gamma"], vals["omega"],
                              vals["points_per_side"], vals["t_min"],
                              vals["t_max"])
    dump_json({
        "kind": vals["kind"], "alpha": vals["alpha"],
        "gamma": prof.gamma, "omega": prof.omega,
        "sup_d": prof.sup_d, "fitted_exponent": prof.fitted_exponent,
        "t": prof.t, "d": prof.d,
    }, vals["out"])
    print(f"wrote {vals['out']} (sup={prof.sup_d:.4f}, "
          f"exponent={prof.fitted_exponent:+.4f})")
    # a negative exponent means the ratio blows up at the critical point:
    # domination fails there, which is a finding, not an error
    return EXIT_OK if prof.fitted_exponent >= 0.0 else EXIT_HYPOTHESIS


def _cmd_solenoid(vals: dict) -> int:
    spec = SolenoidSpec(1, vals["lam"], vals["c"])
    report = fiber_cluster_count(spec, vals["n"])
    dump_json({
        "lam": spec.lam, "c": spec.c, "n": report.n,
        "cluster_count": report.cluster_count, "expected": report.expected,
        "threshold": report.threshold,
        "diameter_bound": report.diameter_bound,
        "empirical_diameter": empirical_fiber_diameter(spec, vals["n"]),
        "min_separation": report.min_separation,
    }, vals["out"])
    print(f"wrote {vals['out']} ({report.cluster_count}/{report.expected} "
          "clusters)")
    return EXIT_OK


def _cmd_density(vals: dict) -> int:
    spec = _mapspec(vals)
    stats = measures.density_histogram(spec, vals["seed"], vals["n"],
                                       vals["bins"])
    payload = jsonable(stats)
    payload["kind"] = vals["kind"]
    payload["alpha"] = vals["alpha"]
    dump_json(payload, vals["out"])
    print(f"wrote {vals['out']} (tv_cauchy={stats.tv_cauchy:.4f}, "
          f"restarts={stats.restarts})")
    return EXIT_OK


def _cmd_recurrence(vals: dict) -> int:
    spec = _mapspec(vals)
    report = measures.recurrence_fraction(spec, vals["delta"], vals["n_max"],
                                          vals["seeds"], vals["seed"])
    hit = report.steps[report.steps >= 0]
    dump_json({
        "kind": vals["kind"], "alpha": vals["alpha"],
        "delta": report.delta, "n_max": report.n_max,
        "seeds": report.seeds, "seed": report.seed,
        "fraction": report.fraction, "visited": report.visited,
        "median_steps": float(np.median(hit)) if hit.size else math.nan,
    }, vals["out"])
    print(f"wrote {vals['out']} (fraction={report.fraction:.4f})")
    return EXIT_OK


def _cmd_basin(vals: dict) -> int:
    spec = MapSpec.f0(vals["alpha"])
    report = measures.basin_fraction(spec, vals["sink"], vals["n_max"],
                                     vals["grid_size"], vals["hold"])
    entered = report.entry_steps[report.entry_steps >= 0]
    dump_json({
        "alpha": vals["alpha"], "sink": report.sink,
        "trap_lo": report.trap_lo, "trap_hi": report.trap_hi,
        "n_max": report.n_max, "hold": report.hold,
        "grid_size": report.grid_size, "fraction": report.fraction,
        "entered": report.entered,
        "median_entry": float(np.median(entered)) if entered.size else math.nan,
    }, vals["out"])
    print(f"wrote {vals['out']} (fraction={report.fraction:.5f})")
    return EXIT_OK


def _cmd_integrability(vals: dict) -> int:
    spec = _mapspec(vals)
    alpha_s = spec.alpha if vals["kind"] != "tent" else 1.5
    s = _matched_saddle(alpha_s, vals["lambda1"])
    ens = measures.integrability_ensemble(spec, s, vals["seeds"],
                                          vals["checkpoints"], vals["seed"],
                                          vals["tau0"])
    dump_json({
        "kind": vals["kind"], "alpha": vals["alpha"],
        "lambda1": vals["lambda1"], "tau0": ens.tau0,
        "checkpoints": list(ens.checkpoints), "seeds": ens.seeds,
        "seed": ens.seed, "averages": ens.averages,
        "rel_diffs": ens.rel_diffs, "diverged": ens.diverged,
        "bad_count": int(np.count_nonzero(ens.bad >= 0)),
    }, vals["out"])
    print(f"wrote {vals['out']} (max rel diff "
          f"{float(np.max(ens.rel_diffs)):.4f})")
    return EXIT_OK if not ens.diverged else EXIT_HYPOTHESIS


def _cmd_probe_conditions(vals: dict) -> int:
    spec = _mapspec(vals)
    rng = np.random.default_rng(vals["seed"])
    orbit_t, _mer, _par, _redraws = measures.random_orbit(spec, rng,
                                                          vals["n"])
    reports = [
        measures.slow_recurrence_probe(orbit_t, [vals["delta"]],
                                       vals["epsilon"]),
        measures.condition_A_probe(spec),
        measures.condition_C_probe(spec, vals["u_radius"]),
        measures.condition_D_probe(spec, vals["delta"], vals["n"],
                                   vals["seed"]),
        measures.nonflatness_probe(spec),
    ]
    dump_json({
        "kind": vals["kind"], "alpha": vals["alpha"],
        "probes": [jsonable(r) for r in reports],
        "all_passed": all(r.passed for r in reports),
    }, vals["out"])
    failed = [r.condition for r in reports if not r.passed]
    if failed:
        print(f"wrote {vals['out']} (failed: {', '.join(failed)})")
        return EXIT_HYPOTHESIS
    print(f"wrote {vals['out']} (all {len(reports)} probes passed)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# command table and parser
# ---------------------------------------------------------------------------

def _map_opts(kinds=_KINDS, with_eps=True) -> list[_Opt]:
    opts = [
        _Opt("kind", str, "g0", "map family", choices=kinds),
        _Opt("alpha", float, None,
             "critical order (default 2.0 for f0, otherwise 1.5; the tent "
             "map ignores it)"),
    ]
    if with_eps:
        opts.append(_Opt("eps", float, 0.0,
                         "perturbation size for the perturbed family"))
    return opts


_COMMANDS: dict = {
    "orbit": ("iterate one start point and write the orbit",
              [*_map_opts(),
               _Opt("t0", float, None, "start point (default: random)"),
               _Opt("n", int, 1000, "number of steps")],
              "csv", _cmd_orbit),
    "conjugacy": ("solve the increasing conjugacy to the tent map",
                  [*_map_opts(_TENT_KINDS),
                   _Opt("grid_size", int, 10001, "uniform grid nodes"),
                   _Opt("tol", float, 1e-6, "residual target")],
                  "csv", _cmd_conjugacy),
    "fixed-points": ("locate fixed points with multipliers",
                     _map_opts(), "csv", _cmd_fixed_points),
    "lyapunov": ("meridian/parallel exponents over a random ensemble",
                 [*_map_opts(),
                  _Opt("n", int, 100_000, "steps per member"),
                  _Opt("seeds", int, 100, "ensemble size")],
                 "json", _cmd_lyapunov),
    "pliss": ("Pliss times of a weight sequence from a one-column CSV",
              [_Opt("input", str, None, "CSV with one weight column",
                    required=True),
               _Opt("c1", float, None, "selection slope", required=True),
               _Opt("c2", float, None, "average floor", required=True),
               _Opt("H", float, None, "weight cap", required=True)],
              "json", _cmd_pliss),
    "hyptimes": ("hyperbolic times from a psi,D two-column CSV",
                 [_Opt("input", str, None, "CSV with psi and D columns",
                       required=True),
                  _Opt("c", float, None, "contraction slope", required=True),
                  _Opt("delta", float, 0.05, "truncation radius of D"),
                  _Opt("b", float, 0.2, "recurrence weight"),
                  _Opt("beta", float, 1.0, "distance growth exponent")],
                 "json", _cmd_hyptimes),
    "abv0": ("two-stage expansion/recurrence time selection on random orbits",
             [*_map_opts(_TENT_KINDS),
              _Opt("n", int, 100_000, "orbit length per member"),
              _Opt("seeds", int, 10, "ensemble size"),
              _Opt("xi", float, 0.5, "pointwise slope fraction"),
              _Opt("b", float, 0.2, "recurrence weight"),
              _Opt("beta", float, 1.0, "distance growth exponent"),
              _Opt("r1", float, 0.05, "stage-1 neighborhood radius")],
             "json", _cmd_abv0),
    "return-map": ("flow-box return map against its closed form",
                   [_Opt("alpha", float, 2.0, "ball-quotient critical order"),
                    _Opt("lambda1", float, 1.0, "saddle expansion rate"),
                    _Opt("C", float, 4.0, "gluing contraction"),
                    _Opt("tau0", float, 1.0, "return-time offset"),
                    _Opt("points", int, 100, "samples per sign of x1")],
                   "csv", _cmd_return_map),
    "domination": ("domination ratio profile and its critical exponent",
                   [*_map_opts(_TENT_KINDS),
                    _Opt("gamma", float, 1.05, "denominator norm weight"),
                    _Opt("omega", float, 0.25, "denominator meridian weight"),
                    _Opt("points_per_side", int, 400, "log-grid resolution"),
                    _Opt("t_min", float, 1e-4, "smallest |t| sampled"),
                    _Opt("t_max", float, 0.99, "largest |t| sampled")],
                   "json", _cmd_domination),
    "solenoid": ("fiber diameters and cluster counts of the disk attractor",
                 [_Opt("lam", float, 0.1, "fiber contraction"),
                  _Opt("c", float, 0.5, "fiber center offset"),
                  _Opt("n", int, 8, "level of the fiber partition")],
                 "json", _cmd_solenoid),
    "density": ("orbit histogram with Birkhoff and self-consistency stats",
                [*_map_opts(),
                 _Opt("n", int, 1_000_000, "orbit length"),
                 _Opt("bins", int, 50, "histogram bins")],
                "json", _cmd_density),
    "recurrence": ("fraction of starts that reach the critical neighborhood",
                   [*_map_opts(),
                    _Opt("delta", float, 0.05, "neighborhood radius"),
                    _Opt("n_max", int, 100_000, "iteration budget"),
                    _Opt("seeds", int, 1000, "ensemble size")],
                   "json", _cmd_recurrence),
    "basin": ("fraction of the interval absorbed by the ball-quotient sink",
              [_Opt("alpha", float, 2.0, "ball-quotient critical order"),
               _Opt("sink", float, -1.0, "attracting fixed point"),
               _Opt("n_max", int, 10_000, "iteration budget"),
               _Opt("grid_size", int, 10_000, "start grid size"),
               _Opt("hold", int, 10, "steps required inside the trap")],
              "json", _cmd_basin),
    "integrability": ("checkpoint stability of mean return times",
                      [*_map_opts(_TENT_KINDS),
                       _Opt("seeds", int, 10, "ensemble size"),
                       _Opt("lambda1", float, 1.0, "saddle expansion rate"),
                       _Opt("tau0", float, 1.0, "return-time offset"),
                       _Opt("checkpoints", _checkpoints_arg,
                            (10_000, 100_000, 1_000_000),
                            "comma-separated orbit lengths")],
                      "json", _cmd_integrability),
    "probe-conditions": ("run the recurrence/expansion condition probes",
                         [*_map_opts(_TENT_KINDS),
                          _Opt("n", int, 100_000, "orbit length"),
                          _Opt("delta", float, 0.05,
                               "critical neighborhood radius"),
                          _Opt("u_radius", float, 0.05,
                               "expansion-probe exclusion radius"),
                          _Opt("epsilon", float, 0.5,
                               "slow-recurrence target")],
                         "json", _cmd_probe_conditions),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rovella",
        description="Numerical toolbox for multidimensional Rovella-like "
                    "attractors: interval quotients, cocycle factors, "
                    "hyperbolic-time selection, the geometric flow model "
                    "and its solenoid.",
        epilog="exit codes: 0 ok, 1 internal, 2 invalid input, "
               "3 hypothesis violated")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, (desc, opts, ext, _handler) in _COMMANDS.items():
        p = sub.add_parser(name, help=desc, description=desc)
        for o in opts:
            p.add_argument(o.flag, dest=o.name, type=o.type, default=None,
                           choices=o.choices, help=o.help)
        p.add_argument("--seed", dest="seed", type=int, default=None,
                       help=_SEED_OPT.help)
        p.add_argument("--config", default=None,
                       help="flat JSON file with option defaults")
        p.add_argument("--out", default=None,
                       help=f"output path (default {name}.{ext})")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command is None:
        build_parser().print_help()
        return EXIT_VALIDATION
    _desc, opts, ext, handler = _COMMANDS[args.command]
    try:
        vals = _resolve(args.command, opts, args)
        vals["out"] = args.out if args.out is not None else \
            f"{args.command}.{ext}"
        rc = handler(vals)
        dump_json({"command": args.command, **jsonable(vals)},
                  vals["out"] + ".config.json")
        return rc
    except (ConvergenceError, DegeneracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (RovellaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
