"""Command-line entry point.

Subcommands::

    meyer-check   identities, orthonormality and periodization of the wavelets
    verify        every checkable claim of the norm-inflation construction
    norm          wavelet norm of a coefficient table file
    synth         sampled field (u1, u2) at one time

Exit codes: 0 success, 2 invalid parameters, 3 a numerical check failed,
4 an input or output file could not be read or written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import counterexample as cx
from . import dyadic, meyer

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    n: int = 2
    a: float = 0.25
    b: float = 0.75
    j0_max: int = 10
    m_max: int = 40
    m_range: tuple[int, int] = (4, 16)
    points_per_side: int = 256
    box_side: float = 1.0
    out: str | None = None
    format: str = "json"
    seed: int = 0
    transition_order: int = 3


# -- deterministic serialization -------------------------------------------------------


def _fmt_float(x: float) -> str:
    if x is None or not math.isfinite(x):
        return "null"
    return format(float(x), ".17g")


def dumps_report(obj, indent: int = 2) -> str:
    """JSON with keys in insertion order and floats at 17 significant digits."""
    out = io.StringIO()
    _dump(obj, out, 0, indent)
    out.write("\n")
    return out.getvalue()


def _dump(obj, out, level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for pos, (key, value) in enumerate(obj.items()):
            out.write(f"{pad}{json.dumps(str(key))}: ")
            _dump(value, out, level + 1, indent)
            out.write(",\n" if pos < len(obj) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for pos, value in enumerate(obj):
            out.write(pad)
            _dump(value, out, level + 1, indent)
            out.write(",\n" if pos < len(obj) - 1 else "\n")
        out.write(end + "]")
    elif obj is None:
        out.write("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(_fmt_float(float(obj)))
    else:
        out.write(json.dumps(str(obj)))


def _csv_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_value(v) for v in row])
    return buf.getvalue()


class OutputError(OSError):
    pass


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _emit(config: RunConfig, text: str, path: Path | None = None) -> None:
    path = path or (Path(config.out) if config.out else None)
    if path is None:
        sys.stdout.write(text)
    else:
        _write(path, text)


def _sidecar(config: RunConfig, suffix: str) -> Path | None:
    if not config.out:
        return None
    p = Path(config.out)
    return p.with_name(p.stem + suffix)


# -- subcommands ------------------------------------------------------------------------


def meyer_battery(profile: meyer.MeyerProfile, seed: int = 0) -> dict:
    """Residuals of the wavelet identities; each entry has ``residual``, ``tolerance``, ``pass``."""
    rng = np.random.default_rng(seed)
    results = {}

    xi = np.linspace(meyer.BAND_LO, meyer.BAND_MID, 10_000)
    om2 = lambda x: profile.omega(x) ** 2
    results["partition_dilation"] = float(np.max(np.abs(om2(xi) + om2(2 * xi) - 1)))
    results["partition_reflection"] = float(np.max(np.abs(om2(xi) + om2(meyer.TWO_PI - xi) - 1)))

    xs = rng.uniform(0.1, 100.0, 50) * rng.choice([-1.0, 1.0], 50)
    lp = 0.0
    for x in xs:
        js = range(math.floor(math.log2(abs(x) / meyer.BAND_HI)), math.ceil(math.log2(abs(x) / meyer.BAND_LO)) + 1)
        lp = max(lp, abs(sum(abs(complex(profile.psi1(2.0**-j * x))) ** 2 for j in js) - 1))
    results["littlewood_paley"] = lp

    ortho = 0.0
    for n in (1, 2):
        for _ in range(12):
            first = _random_index(rng, n)
            second = first if rng.random() < 0.3 else _random_index(rng, n, near=first)
            expected = 1.0 if first == second else 0.0
            ortho = max(ortho, abs(meyer.inner_product(profile, first, second) - expected))
    results["orthonormality"] = ortho

    # the wavelet decays like |x|^-(order+2), so low orders need a wider window
    radius = 128 if profile.transition_order >= 3 else 512
    y = np.linspace(0.0, 1.0, 65)
    direct = sum(meyer.wavelet_values_1d(profile, 1, y - k) for k in range(-radius, radius + 1))
    poly = meyer.evaluate_polynomial(meyer.periodization_polynomial(profile, (1,)), [y])
    results["periodization"] = float(np.max(np.abs(direct - poly)))

    tolerances = {
        "partition_dilation": 1e-12,
        "partition_reflection": 1e-12,
        "littlewood_paley": 1e-10,
        "orthonormality": 1e-6,
        "periodization": 1e-8,
    }
    return {
        name: {"residual": value, "tolerance": tolerances[name], "pass": value <= tolerances[name]}
        for name, value in results.items()
    }


def _random_index(rng, n: int, near: meyer.WaveletIndex | None = None) -> meyer.WaveletIndex:
    while True:
        eps = tuple(int(v) for v in rng.integers(0, 2, n))
        if any(eps):
            break
    if near is None:
        j = int(rng.integers(-1, 3))
        k = tuple(int(v) for v in rng.integers(-3, 4, n))
    else:
        j = near.j + int(rng.integers(-1, 2))
        k = tuple(int(v) for v in np.array(near.k) + rng.integers(-2, 3, n))
    return meyer.WaveletIndex(eps, j, k)


def cmd_meyer_check(config: RunConfig) -> int:
    profile = meyer.build_profile(config.transition_order)
    battery = meyer_battery(profile, config.seed)
    if config.format == "csv":
        text = _csv_text(["identity", "residual", "tolerance", "pass"],
                         [[k, v["residual"], v["tolerance"], v["pass"]] for k, v in battery.items()])
    else:
        text = dumps_report({"transition_order": config.transition_order, "seed": config.seed, "checks": battery})
    _emit(config, text)
    failed = [k for k, v in battery.items() if not v["pass"]]
    for name in failed:
        print(f"meyer-check: {name} residual {battery[name]['residual']:.3e} above {battery[name]['tolerance']:g}",
              file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    params = cx.validate_params(config.n, config.a, config.b)
    profile = meyer.build_profile(config.transition_order)
    vcfg = cx.VerifyConfig(
        j0_max=config.j0_max,
        m_max=config.m_max,
        m_range=config.m_range,
        points_per_side=config.points_per_side,
        box_side=config.box_side,
    )
    report = cx.verify_theorem(params, profile, vcfg)
    blim_csv = _csv_text(["t", "c"], [[r["t"], r["c"]] for r in report.blim])
    bbmo_csv = _csv_text(["j0", "S"], [[r["j0"], r["value"]] for r in report.bbmo])
    if config.format == "csv":
        _emit(config, blim_csv)
        if config.out:
            _write(_sidecar(config, "_bbmo.csv"), bbmo_csv)
    else:
        _emit(config, dumps_report(report.as_dict()))
        if config.out:
            _write(_sidecar(config, "_blim.csv"), blim_csv)
            _write(_sidecar(config, "_bbmo.csv"), bbmo_csv)
    for msg in report.failures:
        print(f"verify: {msg}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_norm(config: RunConfig, coeff_file: str, gamma: float, q: float) -> int:
    table = dyadic.CoefficientField.load(coeff_file)
    params = dyadic.SpaceParams(gamma, q)
    if not table.entries:
        print("norm: coefficient table is empty; the norm is 0", file=sys.stderr)
        print(_fmt_float(0.0))
        return EXIT_OK
    roots = dyadic.hull_roots(table)
    values = dyadic.tl_norm_breakdown(table, params, roots)
    norm = float(np.max(values))
    print(_fmt_float(norm))
    if config.out:
        rows = [(r.j, list(r.k), float(v)) for r, v in zip(roots, values)]
        if config.format == "csv":
            text = _csv_text(["j"] + [f"k{i + 1}" for i in range(table.n)] + ["value"],
                             [[j, *k, v] for j, k, v in rows])
        else:
            text = dumps_report({
                "gamma": gamma,
                "q": q if math.isfinite(q) else "inf",
                "norm": norm,
                "roots": [{"j": j, "k": k, "value": v} for j, k, v in rows],
            })
        _write(Path(config.out), text)
    return EXIT_OK


def cmd_synth(config: RunConfig, t: float) -> int:
    params = cx.validate_params(config.n, config.a, config.b)
    if not t > 0:
        raise cx.ParameterError("t > 0", f"time must be positive, got {t}")
    profile = meyer.build_profile(config.transition_order)
    grid = meyer.GridSpec(params.n, config.box_side, config.points_per_side)
    comps = cx.synthesize_field(params, profile, t, grid)
    residual = cx.divergence_residual(comps, grid)
    coords = [c.ravel() for c in grid.coordinates()]
    header = [f"x{i + 1}" for i in range(params.n)] + ["u1", "u2"]
    body = zip(*coords, comps[0].ravel(), comps[1].ravel())
    _emit(config, _csv_text(header, body))
    meta = {
        "params": params.as_dict(),
        "t": t,
        "points_per_side": grid.points_per_side,
        "box_side": grid.box_side,
        "sup_norm": float(max(np.max(np.abs(c)) for c in comps)),
        "sup_norm_u1": float(np.max(np.abs(comps[0]))),
        "sup_norm_u2": float(np.max(np.abs(comps[1]))),
        "divergence_residual": residual,
    }
    sidecar = _sidecar(config, "_meta.json")
    if sidecar is not None:
        _write(sidecar, dumps_report(meta))
    else:
        sys.stderr.write(dumps_report(meta))
    return EXIT_OK


# -- argument handling ------------------------------------------------------------------


def _m_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


def _q_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2)
    common.add_argument("--a", type=float, default=0.25)
    common.add_argument("--b", type=float, default=0.75)
    common.add_argument("--j0-max", type=int, default=10)
    common.add_argument("--m-max", type=int, default=40)
    common.add_argument("--m-range", type=_m_range, default=(4, 16), metavar="LO..HI")
    common.add_argument("--grid", type=int, default=256, help="points per side")
    common.add_argument("--box", type=float, default=1.0, help="box side length")
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--transition-order", type=int, default=3)

    parser = argparse.ArgumentParser(prog="carleson-ns", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("meyer-check", parents=[common], help="check the wavelet identities")
    sub.add_parser("verify", parents=[common], help="verify the norm-inflation construction")
    p_norm = sub.add_parser("norm", parents=[common], help="wavelet norm of a coefficient table")
    p_norm.add_argument("coeff_file")
    p_norm.add_argument("--gamma", type=float, default=-1.0)
    p_norm.add_argument("--q", type=_q_value, default=2.0)
    p_synth = sub.add_parser("synth", parents=[common], help="sample the field at one time")
    p_synth.add_argument("--t", type=float, required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        n=args.n, a=args.a, b=args.b, j0_max=args.j0_max, m_max=args.m_max, m_range=args.m_range,
        points_per_side=args.grid, box_side=args.box, out=args.out, format=args.format, seed=args.seed,
        transition_order=args.transition_order,
    )
    try:
        if args.command == "meyer-check":
            return cmd_meyer_check(config)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "norm":
            return cmd_norm(config, args.coeff_file, args.gamma, args.q)
        return cmd_synth(config, args.t)
    except cx.ParameterError as exc:
        print(f"{args.command}: invalid parameters, violates {exc.constraint}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except meyer.NyquistError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (OSError, dyadic.CoefficientFileError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"{args.command}: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except ArithmeticError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
