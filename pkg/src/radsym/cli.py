"""Command-line front end.

Every option may also come from a ``--config`` file of ``key = value``
lines whose keys are the option names with dashes replaced by
underscores.  Flags override the config file, which overrides the
built-in defaults; unknown config keys are rejected.

Exit codes: 0 success or certified, 1 certificate not passed (which is
not evidence of radial symmetry), 2 usage, input or domain error,
3 particle collapse during minimization.

Output files go to ``--output-dir``, else ``$RADSYM_OUTPUT_DIR``, else
the working directory.  CSV files always carry a header row:

* ``trace.csv`` from ``minimize``: iter, energy, grad_norm, step
* ``potential_sample.csv`` from ``potential-sample``: r, w, dw
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .certificate import (SearchExhausted, certify_composite, certify_general,
                          certify_prototype, search_alpha_beta)
from .minimizer import (CollapseError, DescentSpec, ParticleConfiguration, diagnose,
                        gradient_descent)
from .potential import (CompositePotential, NonDifferentiableError, PrototypePotential,
                        ShapeError)
from .quadrature import QuadratureError, QuadratureSpec
from .radial_energy import SearchInconclusive, kernel_sup, krs_analytic_bound

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_COLLAPSE = 0, 1, 2, 3

GLOBAL_DEFAULTS = {"output_dir": None, "seed": 0, "threads": 1, "quad_tol": 1e-10,
                   "quad_method": "gauss_phi", "quad_panels": 1}

POTENTIAL_DEFAULTS = {"variant": None, "eps": None, "alpha": None, "beta": None,
                      "power_s": None, "table": None, "potential": None}

DEFAULTS = {
    "certify prototype": {"dim": 2, "eps": None, "mode": "analytic"},
    "certify general": {"dim": 2, "eps": None, "eta": None, "mode": "numeric",
                        "excess": None, "grid_step": 1e-3},
    "certify composite": {"dim": 2, "eps": None, "alpha": None, "beta": None,
                          "power_s": 0.5, "mode": "numeric", "search": False,
                          "alpha0": 0.1, "beta0": None, "grid_step": 1e-3},
    "energy": {**POTENTIAL_DEFAULTS, "measure": None, "dim": None, "n_samples": 20000},
    "kernel-sup": {"dim": 2, "eps": None},
    "minimize": {**POTENTIAL_DEFAULTS, "dim": 2, "n_particles": None, "max_iters": 5000,
                 "step0": 1.0, "shrink": 0.5, "armijo": 1e-4, "grad_tol": 1e-9,
                 "init": "gaussian", "init_scale": 1.0, "init_file": None,
                 "min_move": 1e-4, "threshold": 0.2},
    "potential-sample": {**POTENTIAL_DEFAULTS, "dim": 2, "r_min": 0.05, "r_max": 4.0,
                         "step": 1e-3},
}


# planar composite certified by ``certify composite --eps 0.05 --search``;
# ``minimize`` falls back to it when no potential is given
CERTIFIED_COMPOSITE = {"eps": 0.05, "alpha": 0.00625, "beta": 0.0015625, "power_s": 0.5}


class UsageError(ValueError):
    pass


def _add_global(p):
    g = p.add_argument_group("global options")
    g.add_argument("--config", help="file of 'key = value' defaults for this command")
    g.add_argument("--output-dir", help="directory for reports (default $RADSYM_OUTPUT_DIR or .)")
    g.add_argument("--seed", type=int, help="seed for randomized steps")
    g.add_argument("--threads", type=int,
                   help="worker cap; evaluation is single-threaded, recorded for provenance")
    g.add_argument("--quad-tol", type=float, help="quadrature tolerance (1e-10)")
    g.add_argument("--quad-method", choices=["gauss_phi", "gauss_t"])
    g.add_argument("--quad-panels", type=int)


def _add_potential(p):
    g = p.add_argument_group("potential")
    g.add_argument("--potential", help="potential config file")
    g.add_argument("--variant", choices=["prototype", "composite", "tabulated"])
    g.add_argument("--eps", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--power-s", type=float)
    g.add_argument("--table", help="two-column CSV radius,value (tabulated)")


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="radsym", argument_default=sup,
        description="Certificates and numerics for radial symmetry breaking of "
                    "interaction energy minimizers.",
        epilog=__doc__.split("\n\n", 1)[1], formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", help="run a symmetry-breaking certificate",
                          argument_default=sup)
    csub = cert.add_subparsers(dest="kind", required=True)

    p = csub.add_parser("prototype", argument_default=sup,
                        help="indicator well, Dirac simplex competitor")
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--mode", choices=["analytic", "numeric"])
    _add_global(p)

    p = csub.add_parser("general", argument_default=sup,
                        help="indicator well plus a nonnegative excess potential")
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--eta", type=float, help="ball radius of the competitor (eps/2)")
    p.add_argument("--mode", choices=["analytic", "numeric"])
    p.add_argument("--excess", help="potential config file for the excess W1")
    p.add_argument("--grid-step", type=float)
    _add_global(p)

    p = csub.add_parser("composite", argument_default=sup, help="smooth composite potential")
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--power-s", type=float)
    p.add_argument("--mode", choices=["analytic", "numeric"])
    p.add_argument("--search", action="store_true", default=sup,
                   help="halve alpha and beta from --alpha0/--beta0 until certified")
    p.add_argument("--alpha0", type=float)
    p.add_argument("--beta0", type=float)
    p.add_argument("--grid-step", type=float)
    _add_global(p)

    p = sub.add_parser("energy", argument_default=sup, help="energy of a measure file")
    _add_potential(p)
    p.add_argument("--measure", help="measure file")
    p.add_argument("--dim", type=int, help="dimension (read from the measure file if absent)")
    p.add_argument("--n-samples", type=int, help="Monte Carlo samples per ball pair")
    _add_global(p)

    p = sub.add_parser("kernel-sup", argument_default=sup,
                       help="numerical sup of the shell-distance kernel mass")
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    _add_global(p)

    p = sub.add_parser("minimize", argument_default=sup, help="particle gradient descent (default potential: the certified planar composite)")
    _add_potential(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--n-particles", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--step0", type=float)
    p.add_argument("--shrink", type=float)
    p.add_argument("--armijo", type=float)
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--init", choices=["gaussian", "uniform_ball", "from_file"])
    p.add_argument("--init-scale", type=float, help="gaussian scale or ball radius")
    p.add_argument("--init-file", help="particles measure file for --init from_file")
    p.add_argument("--min-move", type=float)
    p.add_argument("--threshold", type=float, help="single-linkage cluster threshold")
    _add_global(p)

    p = sub.add_parser("potential-sample", argument_default=sup,
                       help="tabulate r, w(r), w'(r) as CSV")
    _add_potential(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--step", type=float)
    _add_global(p)
    return parser


def _convert(value: str, like):
    if isinstance(like, bool):
        low = value.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise UsageError(f"not a boolean: {value!r}")
        return low in ("true", "1", "yes")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value


_NUMERIC_KEYS = {"eps", "alpha", "beta", "power_s", "eta", "beta0", "alpha0", "r_min",
                 "r_max", "step", "grid_step", "init_scale", "quad_tol"}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, the optional config file and explicit flags."""
    given = vars(args).copy()
    key = given.pop("command")
    if key == "certify":
        key = f"certify {given.pop('kind')}"
    defaults = {**GLOBAL_DEFAULTS, **DEFAULTS[key]}
    merged = dict(defaults)
    cfg_path = given.pop("config", None)
    if cfg_path:
        try:
            cfg = io.parse_key_values(Path(cfg_path).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        unknown = set(cfg) - set(defaults)
        if unknown:
            raise UsageError(f"unknown config keys for '{key}': {sorted(unknown)}")
        for k, v in cfg.items():
            like = defaults[k]
            if like is None and k in _NUMERIC_KEYS:
                like = 0.0
            elif like is None and k in ("dim", "n_particles"):
                like = 0
            try:
                merged[k] = _convert(v, like)
            except ValueError:
                raise UsageError(f"config key {k!r}: bad value {v!r}") from None
    merged.update(given)
    merged["command"] = key
    return merged


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + k.replace("_", "-") for k in missing))


def _quad(cfg) -> QuadratureSpec:
    return QuadratureSpec(method=cfg["quad_method"], tol=cfg["quad_tol"],
                          panels=cfg["quad_panels"])


def _potential(cfg):
    if cfg.get("potential"):
        return io.read_potential(cfg["potential"])
    variant = cfg.get("variant")
    if variant is None:
        raise UsageError("give --potential FILE or --variant")
    block = {"variant": variant}
    for k in ("eps", "alpha", "beta", "power_s", "dim"):
        if cfg.get(k) is not None:
            block[k] = str(cfg[k])
    if variant == "tabulated":
        _require(cfg, "table")
        return io.load_table(cfg["table"])
    return io.potential_from_config(block)


def _report(cfg, name, payload):
    path = io.output_dir(cfg["output_dir"]) / name
    io.write_json(path, {**payload, "config": cfg})
    return path


def cmd_certify(cfg) -> int:
    kind = cfg["command"].split()[1]
    quad = _quad(cfg)
    if kind == "prototype":
        _require(cfg, "eps")
        rep = certify_prototype(cfg["eps"], cfg["dim"], cfg["mode"], quad)
    elif kind == "general":
        _require(cfg, "eps", "excess")
        w1 = io.read_potential(cfg["excess"])
        rep = certify_general(w1, cfg["eps"], cfg["dim"], cfg["eta"], cfg["mode"], quad,
                              grid_step=cfg["grid_step"])
    elif cfg["search"]:
        _require(cfg, "eps")
        alpha, beta, rep = search_alpha_beta(cfg["eps"], cfg["power_s"], cfg["dim"],
                                             cfg["alpha0"], cfg["beta0"], cfg["mode"], quad,
                                             grid_step=cfg["grid_step"])
        print(f"found alpha = {alpha:.6g}, beta = {beta:.6g}")
    else:
        _require(cfg, "eps", "alpha", "beta")
        rep = certify_composite(cfg["eps"], cfg["alpha"], cfg["beta"], cfg["power_s"],
                                cfg["dim"], cfg["mode"], quad, grid_step=cfg["grid_step"])
    if rep.kind == "prototype":
        print(f"radial lower bound {rep.radial_lower_bound:.8g}  "
              f"competitor energy {rep.competitor_energy:.8g}")
    else:
        print(f"condition lhs {rep.condition_lhs:.8g}  rhs {rep.condition_rhs:.8g}")
    print(f"margin {rep.margin:.8g}  passed {rep.passed}")
    path = _report(cfg, f"certificate_{kind}.json", rep.to_dict())
    print(f"report: {path}")
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_energy(cfg) -> int:
    _require(cfg, "measure")
    measure, dim = io.read_measure(cfg["measure"])
    dim = cfg["dim"] or dim
    p = _potential({**cfg, "dim": dim})
    value, stderr = io.measure_energy(p, measure, dim, _quad(cfg), cfg["n_samples"], cfg["seed"])
    print(f"energy {value!r}" + (f"  stderr {stderr:.3g}" if stderr else ""))
    _report(cfg, "energy.json", {"energy": value, "stderr": stderr})
    return EXIT_OK


def cmd_kernel_sup(cfg) -> int:
    _require(cfg, "eps")
    res = kernel_sup(cfg["eps"], cfg["dim"], _quad(cfg))
    try:
        analytic = krs_analytic_bound(cfg["eps"], cfg["dim"])
    except ValueError as exc:
        analytic = None
        note = str(exc)
    print(f"numeric sup {res.sup_value:.8g}")
    if analytic is None:
        print(f"analytic bound unavailable: {note}")
    else:
        ok = res.sup_value <= analytic + 1e-9
        print(f"analytic bound {analytic:.8g}  numeric <= analytic: {ok}")
    _report(cfg, "kernel_sup.json", {**res.to_dict(), "analytic_bound": analytic})
    return EXIT_OK


def cmd_minimize(cfg) -> int:
    if cfg.get("variant") is None and not cfg.get("potential"):
        if cfg["dim"] != 2:
            raise UsageError("give a potential; the built-in composite is certified for dim 2")
        given = {k: v for k, v in cfg.items() if v is not None}
        cfg = {**cfg, **CERTIFIED_COMPOSITE, **given, "variant": "composite"}
    p = _potential(cfg)
    if isinstance(p, PrototypePotential):
        raise UsageError("the prototype potential is piecewise constant and cannot be "
                         "minimized by gradient descent; use a composite or tabulated one")
    initial = None
    if cfg["init"] == "from_file":
        _require(cfg, "init_file")
        initial, _ = io.read_measure(cfg["init_file"])
        if not isinstance(initial, ParticleConfiguration):
            raise UsageError("--init-file must be a 'particles' measure file")
    spec = DescentSpec(dim=cfg["dim"], n_particles=cfg["n_particles"],
                       max_iters=cfg["max_iters"], step0=cfg["step0"], shrink=cfg["shrink"],
                       armijo=cfg["armijo"], grad_tol=cfg["grad_tol"], seed=cfg["seed"],
                       init=cfg["init"], init_scale=cfg["init_scale"], min_move=cfg["min_move"])
    res = gradient_descent(p, spec, initial)
    out = io.output_dir(cfg["output_dir"])
    io.write_csv(out / "trace.csv", io.TRACE_COLUMNS, res.trace_rows())
    (out / "final_config.txt").write_text(io.format_measure(res.config))
    diag = diagnose(p, res.config, _quad(cfg), cfg["threshold"])
    print(f"final energy {res.energy:.10g}  ({res.reason}, {len(res.energies) - 1} steps)")
    print(f"cluster count {diag.cluster_count}  radial gap {diag.radial_gap:.6g}  "
          f"below radial bound {diag.below_radial_bound}")
    _report(cfg, "diagnostics.json", {**diag.to_dict(), "converged": res.converged,
                                      "stop_reason": res.reason})
    return EXIT_OK


def cmd_potential_sample(cfg) -> int:
    if cfg["step"] <= 0 or cfg["r_max"] <= cfg["r_min"]:
        raise UsageError("need step > 0 and r_max > r_min")
    p = _potential(cfg)
    n = int(np.floor((cfg["r_max"] - cfg["r_min"]) / cfg["step"] + 1e-9)) + 1
    r = cfg["r_min"] + cfg["step"] * np.arange(n)
    if isinstance(p, CompositePotential) and r[0] <= 0:
        raise UsageError("the composite potential is singular at r <= 0")
    w = p(r)
    try:
        dw = p.derivative(r)
    except NonDifferentiableError:
        dw = np.array([_safe_derivative(p, x) for x in r])
    path = io.write_csv(io.output_dir(cfg["output_dir"]) / "potential_sample.csv",
                        io.SAMPLE_COLUMNS, zip(r, w, dw))
    print(f"{n} samples written to {path}")
    return EXIT_OK


def _safe_derivative(p, x):
    try:
        return float(p.derivative(np.array([x]))[0])
    except NonDifferentiableError:
        return float("nan")


COMMANDS = {"certify": cmd_certify, "energy": cmd_energy, "kernel-sup": cmd_kernel_sup,
            "minimize": cmd_minimize, "potential-sample": cmd_potential_sample}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = resolve(args)
        return COMMANDS[cfg["command"].split()[0]](cfg)
    except CollapseError as exc:
        print(f"collapse: {exc}", file=sys.stderr)
        return EXIT_COLLAPSE
    except (SearchExhausted, SearchInconclusive, QuadratureError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, ValueError, ShapeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
