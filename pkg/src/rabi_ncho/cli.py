"""Command-line batch interface.

Every subcommand writes one table (CSV by default, or JSON) with a metadata
header, and exits with 0 on success, 2 on a regime refusal or invalid
configuration, 1 on an internal error.

Configuration files are INI-style (``key = value``), one section per
subcommand; keys are the long option names with dashes replaced by
underscores. Command-line flags override file values. Unknown keys are
rejected.

The default output directory is taken from ``RABI_NCHO_OUTPUT_DIR`` (or the
current directory); the file is named after the subcommand.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .errors import ContractError, ConvergenceError, OutOfRegimeError, StatisticalFailure, UnsupportedError

OUTPUT_ENV = "RABI_NCHO_OUTPUT_DIR"
COMMANDS = ("spectrum", "perturb", "fk", "zeta", "fiber", "sector", "symcheck")


class SchemaError(ValueError):
    """Invalid or unknown configuration key/value."""


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]


# name -> (converter, default, help); shared model keys first
_MODEL_KEYS: dict[str, tuple[Callable, Any, str]] = {
    "family": (str, None, "model family"),
    "delta": (float, 0.0, "detuning Δ"),
    "g": (float, 0.0, "coupling g"),
    "alpha": (float, 1.0, "NcHO α"),
    "beta": (float, 1.0, "NcHO β"),
    "t_coef": (float, 0.0, "t in (p+tq)²+sq²"),
    "s_coef": (float, 1.0, "s in (p+tq)²+sq²"),
}
_COMMON_KEYS: dict[str, tuple[Callable, Any, str]] = {
    "output": (str, None, "output file (default: $%s/<command>.<format>)" % OUTPUT_ENV),
    "format": (str, "csv", "csv or json"),
    "seed": (int, 0, "random seed (recorded in the header)"),
}
SCHEMA: dict[str, dict[str, tuple[Callable, Any, str]]] = {
    "spectrum": {**_MODEL_KEYS, "k": (int, 8, "number of levels"), "tol": (float, 1e-10, "convergence tolerance"),
                 "n_max": (int, None, "fixed truncation (skips escalation)")},
    "perturb": {**_MODEL_KEYS, "oracle": (int, 1, "also compute finite-difference coefficients (0/1)"),
                "h": (float, 1e-2, "finite-difference step"), "tol": (float, 1e-13, "eigenvalue tolerance")},
    "fk": {**_MODEL_KEYS, "t": (float, 1.0, "time horizon"), "n_samples": (int, 100_000, "Monte Carlo paths"),
           "mode": (str, "element", "element or ground"), "vector": (str, "ground", "ground or constant"),
           "quad_nodes": (int, 16, "Gauss-Legendre nodes per interval"), "n_max": (int, 160, "oracle truncation"),
           "tol": (float, 0.0, "unused; recorded")},
    "zeta": {**_MODEL_KEYS, "s": (_floats, [2.0], "comma-separated s values"),
             "levels": (int, 300, "converged levels summed"), "tol": (float, 1e-9, "convergence tolerance")},
    "fiber": {"alpha": (float, 3.0, "NcHO α"), "beta": (float, 2.0, "NcHO β"), "k_max": (int, 8, "levels"),
              "tol": (float, 1e-6, "distance tolerance"), "fiber_family": (str, "fiber2p", "fiber2p or fiber1p"),
              "n_max": (int, None, "matched truncation (default: converged)")},
    "sector": {"delta": (float, 0.5, "detuning Δ"), "g": (float, 0.3, "coupling g"),
               "n_max": (int, 256, "truncation"), "tol": (float, 0.0, "unused; recorded")},
    "symcheck": {**_MODEL_KEYS, "n_max": (int, 200, "truncation"), "k": (int, 10, "levels"),
                 "tol": (float, 1e-9, "pass threshold")},
}
for _keys in SCHEMA.values():
    _keys.update(_COMMON_KEYS)


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any] = field(default_factory=dict)

    def get(self, key: str) -> Any:
        return self.values.get(key, SCHEMA[self.command][key][1])

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp[self.command] = {k: (",".join(repr(x) for x in v) if isinstance(v, list) else
                                repr(v) if isinstance(v, float) else str(v))
                            for k, v in sorted(self.values.items()) if v is not None}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, command: str) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.read_string(text)
        unknown_sections = [s for s in cp.sections() if s not in SCHEMA]
        if unknown_sections:
            raise SchemaError(f"unknown config section(s): {', '.join(unknown_sections)}")
        values = {}
        if cp.has_section(command):
            for key, raw in cp[command].items():
                if key not in SCHEMA[command]:
                    raise SchemaError(f"unknown config key {key!r} in section [{command}]")
                values[key] = _convert(command, key, raw)
        return cls(command, values)


def _convert(command: str, key: str, raw: Any) -> Any:
    conv = SCHEMA[command][key][0]
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad value {raw!r} for key {key!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rabi-ncho", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, keys in SCHEMA.items():
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="INI file with a [%s] section" % cmd)
        for key, (_, default, help_) in keys.items():
            # default=None so that file values are only overridden by explicit flags
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"{help_} (default: {default})")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.command)
    if args.config:
        cfg = RunConfig.from_ini(Path(args.config).read_text(encoding="utf-8"), args.command)
    for key in SCHEMA[args.command]:
        raw = getattr(args, key)
        if raw is not None:
            cfg.values[key] = _convert(args.command, key, raw)
    fmt = cfg.get("format")
    if fmt not in ("csv", "json"):
        raise SchemaError(f"format must be csv or json, got {fmt!r}")
    return cfg


# --------------------------------------------------------------------------- commands


def _model(cfg: RunConfig):
    from .spectral import ModelSpec
    fam = cfg.get("family")
    if fam is None:
        raise SchemaError("missing required key 'family'")
    return ModelSpec(fam, delta=cfg.get("delta"), g=cfg.get("g"), alpha=cfg.get("alpha"),
                     beta=cfg.get("beta"), t_coef=cfg.get("t_coef"), s_coef=cfg.get("s_coef"))


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict[str, Any]


def _cmd_spectrum(cfg: RunConfig) -> Table:
    from .spectral import assemble, converged_spectrum, eigen
    model = _model(cfg)
    k, tol = cfg.get("k"), cfg.get("tol")
    if cfg.get("n_max") is not None:
        if model.regime != "bounded":
            raise OutOfRegimeError(model.refusal_reason())
        spec = eigen(assemble(model, cfg.get("n_max")), k=k)
        n_max, tol_used = spec.n_max, float("nan")
    else:
        spec = converged_spectrum(model, k, tol)
        n_max, tol_used = spec.n_max, tol
    rows = []
    for gi, grp in enumerate(spec.degeneracy_groups):
        for i in grp:
            rows.append([i, float(spec.values[i]), gi, n_max, tol_used])
    return Table(["index", "value", "degeneracy_group", "n_max", "tol"], rows, {"n_max": n_max, "tol": tol_used})


def _cmd_perturb(cfg: RunConfig) -> Table:
    from .perturbation import (coeffs_1p, coeffs_2p, curvature_at_zero, lowest_eigenvalue,
                               ncho_lambda0_series, quartic_at_zero)
    from .spectral import ModelSpec
    model = _model(cfg)
    h, tol = cfg.get("h"), cfg.get("tol")
    if model.family == "rabi2p":
        c = coeffs_2p(model.delta)
        energy = lambda x: lowest_eigenvalue(ModelSpec("rabi2p", delta=model.delta, g=x), tol)
    elif model.family == "rabi1p":
        c = coeffs_1p(model.delta)
        energy = lambda x: lowest_eigenvalue(ModelSpec("rabi1p", delta=model.delta, g=x), tol)
    elif model.family == "ncho":
        c = ncho_lambda0_series(model.alpha, model.beta)
        A = 0.5 * (model.alpha + model.beta)
        energy = lambda x: lowest_eigenvalue(ModelSpec("ncho", alpha=A - x, beta=A + x), tol)
    else:
        raise SchemaError(f"perturb supports rabi2p, rabi1p, ncho; got {model.family!r}")
    rows = [["e0", c.e0, float(energy(0.0)) if cfg.get("oracle") else None],
            ["e2", c.e2, curvature_at_zero(energy, h) / 2 if cfg.get("oracle") else None]]
    if c.e4 is not None:
        rows.append(["e4", c.e4, quartic_at_zero(energy, h) / 24 if cfg.get("oracle") else None])
    for r in rows:
        r += [None if r[2] is None else r[2] - r[1], "converged", tol]
    return Table(["coefficient", "closed_form", "finite_difference", "difference", "n_max", "tol"], rows,
                 {"n_max": "converged", "tol": tol, "h": h})


def _cmd_fk(cfg: RunConfig) -> Table:
    from .feynman_kac import (FKConfig, TestVector, fk_ground_energy, fk_matrix_element, rak_ground_vector,
                              spectral_matrix_element)
    import scipy.linalg
    from .feynman_kac import _fk_operator
    model = _model(cfg)
    t, n, seed, n_max = cfg.get("t"), cfg.get("n_samples"), cfg.get("seed"), cfg.get("n_max")
    conf = FKConfig(quad_nodes=cfg.get("quad_nodes"))
    vec = rak_ground_vector(model) if cfg.get("vector") == "ground" else TestVector.constant()
    if cfg.get("mode") == "ground":
        est = fk_ground_energy(model, t, n, seed, test_vector=vec, config=conf)
        ref = float(scipy.linalg.eigvalsh(_fk_operator(model, n_max), subset_by_index=(0, 0))[0])
    elif cfg.get("mode") == "element":
        est = fk_matrix_element(model, vec, vec, t, n, seed, config=conf)
        ref = spectral_matrix_element(model, vec, vec, t, n_max)
    else:
        raise SchemaError(f"mode must be element or ground, got {cfg.get('mode')!r}")
    z = est.z_score(ref)
    row = [cfg.get("mode"), float(np.real(est.mean)), est.std_error, est.n_samples, est.seed, ref, z, n_max,
           cfg.get("tol")]
    return Table(["quantity", "mc_mean", "std_error", "n_samples", "seed", "spectral", "z", "n_max", "tol"], [row],
                 {"n_max": n_max, "tol": cfg.get("tol"), "integrand": est.integrand_spec})


def _cmd_zeta(cfg: RunConfig) -> Table:
    from .spectral import converged_spectrum
    from .zeta import spectral_zeta, zeta_2p_delta0, zeta_2p_g0, zeta_ncho_equal
    model = _model(cfg)
    levels, tol = cfg.get("levels"), cfg.get("tol")
    if model.regime != "bounded":
        raise OutOfRegimeError(model.refusal_reason())
    spec = converged_spectrum(model, levels, tol, n_start=max(64, 2 * levels))
    rows = []
    for s in cfg.get("s"):
        z = spectral_zeta(spec, s)
        closed = None
        if model.family == "rabi2p" and model.delta == 0:
            closed = zeta_2p_delta0(s, model.g)
        elif model.family == "rabi2p" and model.g == 0 and 0 <= model.delta < 0.5:
            closed = zeta_2p_g0(s, model.delta)
        elif model.family == "ncho" and model.alpha == model.beta:
            closed = zeta_ncho_equal(s, model.alpha)
        rows.append([s, z.value, z.tail_bound, closed, spec.n_max, tol])
    return Table(["s", "value", "tail_bound", "closed_form", "n_max", "tol"], rows,
                 {"n_max": spec.n_max, "tol": tol, "levels": levels})


def _cmd_fiber(cfg: RunConfig) -> Table:
    from .fiber import verify_fiber
    rep = verify_fiber(cfg.get("alpha"), cfg.get("beta"), cfg.get("k_max"), cfg.get("tol"),
                       family=cfg.get("fiber_family"), n_max=cfg.get("n_max"))
    rows = [[lv.index, lv.lam, lv.scaled, lv.distance, lv.multiplicity_ncho, lv.multiplicity_fiber,
             int(lv.passed), rep.n_max, rep.tol] for lv in rep.levels]
    return Table(["index", "lambda", "scaled", "distance", "mult_ncho", "mult_fiber", "pass", "n_max", "tol"], rows,
                 {"n_max": rep.n_max, "tol": rep.tol, "passed": int(rep.passed)})


def _cmd_sector(cfg: RunConfig) -> Table:
    from .spectral import ModelSpec, ground_sector
    rep = ground_sector(ModelSpec("rabi2p", delta=cfg.get("delta"), g=cfg.get("g")), cfg.get("n_max"))
    rows = [[lab.value, w, rep.label.value if rep.label else "degenerate", rep.degeneracy, rep.ground_energy,
             rep.n_max, cfg.get("tol")] for lab, w in rep.weights.items()]
    return Table(["sector", "weight", "ground_label", "degeneracy", "ground_energy", "n_max", "tol"], rows,
                 {"n_max": rep.n_max, "tol": cfg.get("tol")})


def _cmd_symcheck(cfg: RunConfig) -> Table:
    from .spectral import symmetry_checks
    model = _model(cfg)
    res = symmetry_checks(model, cfg.get("n_max"), cfg.get("k"))
    rows = [[name, dev, int(dev < cfg.get("tol")), cfg.get("n_max"), cfg.get("tol")] for name, dev in res.items()]
    return Table(["transformation", "max_deviation", "pass", "n_max", "tol"], rows,
                 {"n_max": cfg.get("n_max"), "tol": cfg.get("tol")})


_HANDLERS = {"spectrum": _cmd_spectrum, "perturb": _cmd_perturb, "fk": _cmd_fk, "zeta": _cmd_zeta,
             "fiber": _cmd_fiber, "sector": _cmd_sector, "symcheck": _cmd_symcheck}


# --------------------------------------------------------------------------- output


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(x: Any) -> Any:
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def render(table: Table, cfg: RunConfig) -> str:
    meta = {"tool": "rabi_ncho", "version": __version__, "command": cfg.command, "seed": cfg.get("seed"),
            **{k: v for k, v in sorted(cfg.values.items()) if k not in ("output", "format", "seed")},
            **table.metadata}
    if cfg.get("format") == "json":
        doc = {"metadata": {k: _jsonable(v) if not isinstance(v, list) else [_jsonable(x) for x in v]
                            for k, v in meta.items()},
               "columns": table.columns,
               "rows": [[_jsonable(x) for x in row] for row in table.rows]}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        val = ",".join(_fmt(x) for x in v) if isinstance(v, list) else _fmt(v)
        buf.write(f"# {k}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def output_path(cfg: RunConfig) -> Path:
    if cfg.get("output"):
        return Path(cfg.get("output"))
    base = Path(os.environ.get(OUTPUT_ENV, "."))
    return base / f"{cfg.command}.{cfg.get('format')}"


def run(cfg: RunConfig) -> Path:
    """Execute a resolved configuration and write its artifact; returns the path."""
    table = _HANDLERS[cfg.command](cfg)
    path = output_path(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(table, cfg), encoding="utf-8")
    return path


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        path = run(cfg)
    except OutOfRegimeError as exc:
        print(f"refused: {exc.reason}", file=sys.stderr)
        return 2
    except (SchemaError, configparser.Error, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, UnsupportedError, StatisticalFailure) as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
