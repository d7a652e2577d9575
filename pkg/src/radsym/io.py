"""Plain-text configuration, measure files, and report writers.

Potential config block (``#`` starts a comment)::

    variant = composite        # prototype | composite | tabulated
    eps = 0.05
    alpha = 0.00625
    beta = 0.0015625
    power_s = 0.5
    dim = 2
    file = table.csv           # tabulated only: two columns radius,value

Measure file: ``key = value`` header lines followed by whitespace
separated rows::

    kind = dirac               # dirac | balls | profile | particles
    dim = 2
    eta = 0.025                # balls only
    0.3333333333 0.0 0.577350269
    ...

Numbers may be written as fractions (``1/3``).  Rows are
``weight x_1 .. x_d`` for ``dirac`` and ``balls``,
``radius weight`` for ``profile`` and ``x_1 .. x_d`` for ``particles``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from fractions import Fraction
from pathlib import Path

import numpy as np

from .certificate import jsonable
from .measures import (DiscreteMeasure, MollifiedBallMeasure, RadialProfile, sample_balls,
                       validate_profile)
from .minimizer import ParticleConfiguration, particle_energy
from .potential import CompositePotential, PrototypePotential, RadialPotential, TabulatedPotential
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .radial_energy import radial_energy

OUTPUT_DIR_ENV = "RADSYM_OUTPUT_DIR"

POTENTIAL_KEYS = {"variant", "eps", "alpha", "beta", "power_s", "dim", "file"}
MEASURE_KEYS = {"kind", "dim", "eta"}
MEASURE_KINDS = ("dirac", "balls", "profile", "particles")


class FormatError(ValueError):
    """Malformed config block or measure file."""


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_key_values(text: str, allowed: set[str] | None = None) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {n}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if allowed is not None and key not in allowed:
            raise FormatError(f"line {n}: unknown key {key!r}")
        if key in out:
            raise FormatError(f"line {n}: duplicate key {key!r}")
        out[key] = value
    return out


def _number(cfg, key, cast=float):
    try:
        return cast(cfg[key])
    except KeyError:
        raise FormatError(f"missing key {key!r}") from None
    except ValueError:
        raise FormatError(f"key {key!r}: not a number: {cfg[key]!r}") from None


def load_table(path) -> TabulatedPotential:
    """Two-column CSV ``radius,value``; a non-numeric first row is a header."""
    rows = []
    with open(path, newline="") as fh:
        for n, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if n == 1:
                    continue
                raise FormatError(f"{path}:{n}: expected 'radius,value'") from None
    if not rows:
        raise FormatError(f"{path}: no data rows")
    r, v = zip(*rows)
    return TabulatedPotential(r, v)


def potential_from_config(cfg: dict, base_dir: str | os.PathLike = ".") -> RadialPotential:
    """Build a potential from parsed ``key = value`` pairs."""
    unknown = set(cfg) - POTENTIAL_KEYS
    if unknown:
        raise FormatError(f"unknown keys {sorted(unknown)}")
    variant = cfg.get("variant", "").lower()
    if variant == "prototype":
        return PrototypePotential(_number(cfg, "eps"))
    if variant == "composite":
        return CompositePotential(_number(cfg, "eps"), _number(cfg, "alpha"), _number(cfg, "beta"),
                                  _number(cfg, "power_s"), _number(cfg, "dim", int))
    if variant == "tabulated":
        if "file" not in cfg:
            raise FormatError("tabulated potential needs 'file'")
        return load_table(Path(base_dir) / cfg["file"])
    raise FormatError(f"unknown variant {variant!r}")


def potential_to_config(p: RadialPotential) -> str:
    if isinstance(p, PrototypePotential):
        return f"variant = prototype\neps = {p.eps!r}\n"
    if isinstance(p, CompositePotential):
        return ("variant = composite\n"
                f"eps = {p.eps!r}\nalpha = {p.alpha!r}\nbeta = {p.beta!r}\n"
                f"power_s = {p.power_s!r}\ndim = {p.dim!r}\n")
    raise FormatError(f"{type(p).__name__} has no config block representation")


def read_potential(path) -> RadialPotential:
    path = Path(path)
    return potential_from_config(parse_key_values(path.read_text(), POTENTIAL_KEYS), path.parent)


# ---------------------------------------------------------------------------
# measure files

def _token(tok):
    # fractions such as 1/3 keep equal weights bitwise equal
    return float(Fraction(tok)) if "/" in tok else float(tok)


def parse_measure(text: str):
    header, rows = [], []
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if "=" in line:
            if rows:
                raise FormatError(f"line {n}: header line after data")
            header.append(line)
            continue
        try:
            rows.append([_token(tok) for tok in line.split()])
        except ValueError:
            raise FormatError(f"line {n}: non-numeric data {raw!r}") from None
    cfg = parse_key_values("\n".join(header), MEASURE_KEYS)
    kind = cfg.get("kind")
    if kind not in MEASURE_KINDS:
        raise FormatError(f"kind must be one of {MEASURE_KINDS}, got {kind!r}")
    if not rows:
        raise FormatError("measure file has no data rows")
    if len({len(r) for r in rows}) != 1:
        raise FormatError("rows have different lengths")
    data = np.array(rows)
    if kind == "profile":
        if data.shape[1] != 2:
            raise FormatError("profile rows are 'radius weight'")
        prof = RadialProfile(data[:, 0], data[:, 1])
        if not validate_profile(prof):
            raise FormatError("profile weights must be positive, sum to 1, radii >= 0")
        if "dim" not in cfg:
            raise FormatError("profile needs 'dim'")
        return prof, _number(cfg, "dim", int)
    dim = _number(cfg, "dim", int) if "dim" in cfg else data.shape[1] - (kind != "particles")
    if kind == "particles":
        if data.shape[1] != dim:
            raise FormatError(f"particle rows need {dim} coordinates")
        return ParticleConfiguration(data), dim
    if data.shape[1] != dim + 1:
        raise FormatError(f"rows need a weight and {dim} coordinates")
    try:
        if kind == "dirac":
            return DiscreteMeasure(data[:, 1:], data[:, 0]), dim
        return MollifiedBallMeasure(data[:, 1:], _number(cfg, "eta"), data[:, 0]), dim
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_measure(path):
    return parse_measure(Path(path).read_text())


def format_measure(measure) -> str:
    if isinstance(measure, RadialProfile):
        raise FormatError("profiles need an explicit dim; write them by hand")
    if isinstance(measure, ParticleConfiguration):
        lines = [f"kind = particles\ndim = {measure.dim}"]
        lines += [" ".join(repr(float(v)) for v in x) for x in measure.positions]
        return "\n".join(lines) + "\n"
    if isinstance(measure, MollifiedBallMeasure):
        lines = [f"kind = balls\ndim = {measure.dim}\neta = {measure.eta!r}"]
        pos = measure.centers
    else:
        lines = [f"kind = dirac\ndim = {measure.dim}"]
        pos = measure.positions
    lines += [" ".join(repr(float(v)) for v in (w, *x)) for w, x in zip(measure.weights, pos)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# energies

def dirac_energy(p: RadialPotential, m: DiscreteMeasure) -> float:
    """``1/2 sum_{i,j} w_i w_j w(|x_i - x_j|)``, self terms included.

    With equal weights the pair sum is accumulated exactly and divided
    once, so integer-valued potentials give correctly rounded energies.
    """
    n = len(m)
    i, j = np.triu_indices(n, k=1)
    dist = np.linalg.norm(m.positions[i] - m.positions[j], axis=1)
    w0 = float(p(np.array([0.0]))[0]) if not p.singular_at_origin else math.inf
    equal = np.all(m.weights == m.weights[0])
    if equal:
        cross = math.fsum(p(dist)) / (n * n)
        self_part = 0.5 * w0 / n if w0 != 0 else 0.0
    else:
        cross = math.fsum(m.weights[i] * m.weights[j] * p(dist))
        self_part = 0.5 * w0 * float(np.sum(m.weights ** 2)) if w0 != 0 else 0.0
    return cross + self_part


def balls_energy(p: RadialPotential, m: MollifiedBallMeasure, n_samples: int = 20000,
                 seed: int = 0) -> tuple[float, float]:
    """Monte Carlo energy of a mollified measure, stratified by ball pair.

    Returns ``(estimate, stderr)``.  Every unordered pair of balls (and
    every ball with itself) gets ``n_samples`` independent point pairs.
    With equal weights the per-pair means are summed exactly before the
    single division by ``k^2``, as in :func:`dirac_energy`.
    """
    rng = np.random.default_rng(seed)
    k = len(m.weights)
    equal = np.all(m.weights == m.weights[0])
    terms, var = [], 0.0
    for a in range(k):
        for b in range(a, k):
            x = sample_balls(m, a, n_samples, rng)
            y = sample_balls(m, b, n_samples, rng)
            vals = p(np.linalg.norm(x - y, axis=1))
            coef = 0.5 if a == b else 1.0
            if not equal:
                coef *= m.weights[a] * m.weights[b]
            terms.append(coef * float(np.mean(vals)))
            var += coef ** 2 * float(np.var(vals, ddof=1)) / n_samples
    if equal:
        return math.fsum(terms) / (k * k), math.sqrt(var) / (k * k)
    return math.fsum(terms), math.sqrt(var)


def measure_energy(p: RadialPotential, measure, dim: int | None = None,
                   quad: QuadratureSpec = DEFAULT_QUAD, n_samples: int = 20000,
                   seed: int = 0) -> tuple[float, float]:
    """Energy of any supported measure as ``(value, stderr)``.

    The standard error is 0 for the deterministic routes.
    """
    if isinstance(measure, ParticleConfiguration):
        return particle_energy(p, measure), 0.0
    if isinstance(measure, DiscreteMeasure):
        return dirac_energy(p, measure), 0.0
    if isinstance(measure, MollifiedBallMeasure):
        return balls_energy(p, measure, n_samples, seed)
    if isinstance(measure, RadialProfile):
        if dim is None:
            raise ValueError("radial profiles need dim")
        return radial_energy(p, measure, dim, quad), 0.0
    raise TypeError(f"unsupported measure {type(measure).__name__}")


# ---------------------------------------------------------------------------
# reports

def output_dir(explicit: str | None = None) -> Path:
    """``explicit``, else ``$RADSYM_OUTPUT_DIR``, else the working directory."""
    path = Path(explicit or os.environ.get(OUTPUT_DIR_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                          for v in row])
    return path


TRACE_COLUMNS = ("iter", "energy", "grad_norm", "step")
SAMPLE_COLUMNS = ("r", "w", "dw")
