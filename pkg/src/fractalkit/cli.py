"""Command line front end: deterministic CSV/JSON emission for every solver.

Artifacts are written atomically; floats carry 17 significant digits; the
same config, seed, and thread count reproduce byte-identical output.  Exit
status: 0 all hard checks pass, 2 configuration or structure errors,
3 numerical failures (the failing check or gate is named on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile

import numpy as np

from .blowups import BlowupAddress, blowup_convergence
from .eigenfields import eta_fields
from .graphs import build_level_graph
from .kernels import (
    complex_power_kernel,
    exp_complex_kernel,
    heat_kernel,
    heat_pair_sample,
)
from .operators import effective_resistance, spectrum
from .partitions import partition_metric
from .resolvent import neumann_resolvent, resolvent_series_many
from .sectors import tau_sequence, verify_sector_estimates
from .specs import Point, load_spec
from .util import (
    CapacityError,
    ConfigError,
    GateError,
    ModelError,
    SingularityError,
    canonical_json,
    fmt_float,
)
from .verify import SUITE_NAMES, run_suite, verify_all, verify_eta


def _parse_complex(text: str) -> complex:
    """Parse "RE,IM" or a bare real part."""
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ConfigError(f"complex value {text!r} must look like RE or RE,IM")


def _parse_ray(text: str) -> float:
    """Angle in radians; a 'pi' suffix scales by pi, e.g. '0.25pi'."""
    t = text.strip().lower()
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        return (float(head) if head else 1.0) * math.pi
    return float(t)


def _parse_grid(text: str):
    """Geometric grid "LO,HI,N", or an explicit comma list of values."""
    parts = [p for p in text.split(",") if p]
    if len(parts) == 3 and parts[2].isdigit() and int(parts[2]) >= 2:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi <= lo:
            raise ConfigError(f"grid {text!r} needs 0 < LO < HI")
        return list(np.geomspace(lo, hi, n))
    return [float(p) for p in parts]


def _parse_omega(text: str) -> BlowupAddress:
    """Blowup address "PRE:PER" with the part after the colon repeating."""
    if ":" in text:
        head, _, tail = text.partition(":")
        if not all(ch.isdigit() for ch in head + tail):
            raise ConfigError(f"blowup address {text!r} must be digits")
        return BlowupAddress(
            preperiod=tuple(int(ch) for ch in head),
            period=tuple(int(ch) for ch in tail),
        )
    return BlowupAddress.parse(text)


def _read_pairs(path: str) -> list[tuple[Point, Point]]:
    """Point pairs from CSV columns x,y holding "word:label" addresses."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "y"} <= set(reader.fieldnames):
            raise ConfigError(f"{path}: pair CSV needs header columns x,y")
        pairs = []
        for row in reader:
            pairs.append((Point.parse(row["x"].strip()), Point.parse(row["y"].strip())))
    if not pairs:
        raise ConfigError(f"{path}: no pairs")
    return pairs


def _read_columns(path: str, names: tuple[str, ...]) -> list[tuple[float, ...]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(names) <= set(reader.fieldnames):
            raise ConfigError(f"{path}: CSV needs header columns {','.join(names)}")
        return [tuple(float(row[n]) for n in names) for row in reader]


def _emit(text: str, out: str | None) -> None:
    """Write to stdout, or atomically to a file path."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(out))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt_float(c) for c in row])
    return buf.getvalue()


def _default_pairs(spec, m: int, npairs: int, seed: int) -> list[tuple[Point, Point]]:
    return heat_pair_sample(spec, min(m, 6), npairs, seed=seed)


# ---------------------------------------------------------------------------
# subcommand bodies


def cmd_info(args) -> int:
    spec = load_spec(args.spec)
    doc = {
        "name": spec.name,
        "letters": spec.nletters,
        "boundary_corners": spec.nboundary,
        "gluing_labels": spec.nlabels,
        "r": list(spec.r),
        "mu": list(spec.mu),
        "S": spec.S,
        "weyl_exponent": spec.S / (spec.S + 1.0),
        "resistance_exponent": spec.resistance_exponent,
        "renormalization_residual": spec.renormalization_residual(),
    }
    if args.level is not None:
        lg = build_level_graph(spec, args.level)
        doc["level"] = {
            "m": args.level,
            "vertices": lg.nvert,
            "interior": int(len(lg.interior)),
        }
    _emit(canonical_json(doc) + "\n", args.out)
    return 0


def cmd_metric(args) -> int:
    spec = load_spec(args.spec)
    pairs = _read_pairs(args.pairs)
    pm = partition_metric(spec, args.k)
    m = args.level if args.level is not None else max(
        6, *(len(p.word) for xy in pairs for p in xy)
    )
    rows = []
    for x, y in pairs:
        rows.append([str(x), str(y), args.k, pm.distance(x, y),
                     effective_resistance(spec, m, x, y)])
    _emit(_csv_text(["x", "y", "k", "d_k", "R"], rows), args.out)
    return 0


def cmd_spectrum(args) -> int:
    spec = load_spec(args.spec)
    m = args.level if args.level is not None else 6
    sp = spectrum(spec, m, bc=args.bc, count=args.count)
    n = args.count if args.count is not None else len(sp.eigenvalues)
    rows = [[j, float(lam)] for j, lam in enumerate(sp.eigenvalues[:n])]
    _emit(_csv_text(["j", "lambda_j"], rows), args.out)
    return 0


def cmd_eta(args) -> int:
    spec = load_spec(args.spec)
    m = args.level if args.level is not None else 8
    if not 0 <= args.p < spec.nboundary:
        raise ConfigError(f"corner index {args.p} outside 0..{spec.nboundary - 1}")
    z = _parse_complex(args.z)
    lg = build_level_graph(spec, m)
    field = eta_fields(spec, m, z)[args.p]
    rows = [[str(lg.point_at(v)), float(np.real(field[v])), float(np.imag(field[v]))]
            for v in range(lg.nvert)]
    _emit(_csv_text(["vertex", "value_re", "value_im"], rows), args.out)
    return 0


def cmd_resolvent(args) -> int:
    spec = load_spec(args.spec)
    m = args.level if args.level is not None else 8
    z = _parse_complex(args.z)
    pairs = _read_pairs(args.pairs) if args.pairs else _default_pairs(
        spec, m, 12, args.seed)
    rows = []
    if args.neumann:
        vals = neumann_resolvent(spec, m, z, pairs)
        for (x, y), g in zip(pairs, vals):
            rows.append([str(x), str(y), float(np.real(g)), float(np.imag(g)), 0.0])
    else:
        results = resolvent_series_many(spec, m, z, pairs, max_depth=args.depth)
        for (x, y), res in zip(pairs, results):
            rows.append([str(x), str(y), float(np.real(res.value)),
                         float(np.imag(res.value)), res.tail_bound])
    _emit(_csv_text(["x", "y", "re", "im", "tail_bound"], rows), args.out)
    return 0


def cmd_blowup(args) -> int:
    spec = load_spec(args.spec)
    omega = _parse_omega(args.omega)
    z = _parse_complex(args.z)
    if z.imag != 0:
        raise ConfigError("exhaustion march needs a real spectral parameter")
    m = args.level if args.level is not None else (10 if spec.nletters == 2 else 6)
    if args.pairs:
        pairs = _read_pairs(args.pairs)
    else:
        pairs = _default_pairs(spec, max(2, m - args.nmax), 10, args.seed)
    conv = blowup_convergence(spec, m, omega, z.real, pairs, args.nmax)
    rows = []
    for rec in conv["records"]:
        for n, val in enumerate(rec["values"]):
            rows.append([rec["pair"][0], rec["pair"][1], str(n), val])
    _emit(_csv_text(["x", "y", "n", "value"], rows), args.out)
    if args.report:
        _emit(canonical_json(conv) + "\n", args.report)
    return 0


def cmd_sector(args) -> int:
    spec = load_spec(args.spec)
    m = args.level if args.level is not None else (10 if spec.nletters == 2 else 6)
    pairs = _read_pairs(args.pairs) if args.pairs else _default_pairs(
        spec, m, 6, args.seed)
    rays = [_parse_ray(t) for t in args.rays.split(",")] if args.rays else None
    moduli = _parse_grid(args.modulus_grid) if args.modulus_grid else None
    kw = {}
    if rays is not None:
        kw["rays"] = rays
    if moduli is not None:
        kw["moduli"] = moduli
    res = verify_sector_estimates(spec, m, pairs, **kw)
    res["pairs"] = [[str(x), str(y)] for x, y in pairs]
    _emit(canonical_json(res) + "\n", args.out)
    return 0 if res["passed"] else _fail("sector_envelope")


def cmd_scmap(args) -> int:
    samples = _read_columns(args.f, ("x", "f"))
    xs = np.array([s[0] for s in samples])
    fs = np.array([s[1] for s in samples])
    if np.any(fs <= 0) or np.any(xs <= 0):
        raise ConfigError("axis samples must be positive")
    order = np.argsort(xs)
    lx, lf = np.log(xs[order]), np.log(fs[order])

    def f(x: float) -> float:
        # log-log interpolation with endpoint-slope extrapolation
        return float(np.exp(np.interp(math.log(x), lx, lf)))

    sc = tau_sequence(f, args.M, args.eps, levels=args.levels)
    pts = [complex(re, im) for re, im in _read_columns(args.eval, ("re", "im"))]
    rows = []
    for zv in pts:
        h = sc.evaluate(zv)
        rows.append([zv.real, zv.imag, h.real, h.imag])
    _emit(_csv_text(["re", "im", "h_re", "h_im"], rows), args.out)
    return 0


def _kernel_rows(pairs, grid) -> list[list]:
    rows = []
    for (x, y), val in zip(pairs, grid.values):
        rows.append([str(x), str(y), float(np.real(val)), float(np.imag(val)),
                     grid.budget])
    return rows


def cmd_heat(args) -> int:
    spec = load_spec(args.spec)
    m = args.level if args.level is not None else (10 if spec.nletters == 2 else 6)
    if args.t <= 0:
        raise ConfigError("time must be positive")
    pairs = _read_pairs(args.pairs) if args.pairs else _default_pairs(
        spec, m, 12, args.seed)
    grid = heat_kernel(spec, m, args.t, pairs, method=args.method)
    _emit(_csv_text(["x", "y", "re", "im", "budget"], _kernel_rows(pairs, grid)),
          args.out)
    return 0


def cmd_kernel(args) -> int:
    spec = load_spec(args.spec)
    m = args.level if args.level is not None else (10 if spec.nletters == 2 else 6)
    pairs = _read_pairs(args.pairs) if args.pairs else _default_pairs(
        spec, m, 12, args.seed)
    if args.symbol == "heat":
        if args.t is None:
            raise ConfigError("heat symbol needs --t")
        grid = heat_kernel(spec, m, args.t, pairs, method="contour")
    elif args.symbol == "power":
        if args.w is None:
            raise ConfigError("power symbol needs --w")
        grid = complex_power_kernel(spec, m, _parse_complex(args.w), pairs)
    elif args.symbol == "exp":
        if args.w is None:
            raise ConfigError("semigroup symbol needs --w")
        grid = exp_complex_kernel(spec, m, _parse_complex(args.w), pairs)
    else:
        raise ConfigError(f"unknown symbol {args.symbol!r}")
    _emit(_csv_text(["x", "y", "re", "im", "budget"], _kernel_rows(pairs, grid)),
          args.out)
    return 0


def cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    outdir = args.out if args.out else "."
    if args.suite == "all":
        summary, reports = verify_all(spec, m=args.level, seed=args.seed,
                                      quick=args.quick)
        for rep in reports + [summary]:
            rep.write(outdir)
        failing = []
        for rep in reports:
            status = "pass" if rep.passed else "FAIL"
            print(f"{rep.name:10s} {status}  checks={len(rep.checks)}")
            failing.extend(f"{rep.name}.{cid}" for cid in rep.failing())
        if failing:
            return _fail(", ".join(failing))
        return 0
    if args.suite == "eta" and args.lambda_grid:
        rep = verify_eta(spec, m=args.level, seed=args.seed,
                         lambdas=_parse_grid(args.lambda_grid))
    else:
        rep = run_suite(args.suite, spec, m=args.level, seed=args.seed,
                        quick=args.quick)
    rep.write(outdir)
    for c in rep.checks:
        print(f"{c.id:28s} {'pass' if c.passed else 'FAIL'}")
    if not rep.passed:
        return _fail(", ".join(f"{rep.name}.{cid}" for cid in rep.failing()))
    return 0


def _fail(check_id: str) -> int:
    print(f"failed check: {check_id}", file=sys.stderr)
    return 3


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, spec: bool = True) -> None:
    if spec:
        p.add_argument("--spec", default="interval",
                       help="builtin name or spec JSON path (default interval)")
        p.add_argument("--level", "-m", type=int, default=None,
                       help="refinement level")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled pairs")
    p.add_argument("--threads", type=int, default=None,
                   help="worker pool size (overrides FRACTAL_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fractal",
        description="Dirichlet forms, resolvents, and kernel estimates on "
                    "self-similar structures.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="structure constants and level sizes")
    _add_common(p)
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("metric", help="partition distances and resistances")
    _add_common(p)
    p.add_argument("--k", type=float, required=True, help="partition scale")
    p.add_argument("--pairs", required=True, help="CSV of point pairs (x,y)")
    p.set_defaults(fn=cmd_metric)

    p = sub.add_parser("spectrum", help="eigenvalues at one level")
    _add_common(p)
    p.add_argument("--bc", choices=("dirichlet", "neumann"), default="dirichlet")
    p.add_argument("--count", type=int, default=None, help="eigenvalues to emit")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("eta", help="boundary-layer eigenfield values")
    _add_common(p)
    p.add_argument("--p", type=int, default=0, help="boundary corner index")
    p.add_argument("--z", default="1", help="spectral parameter RE[,IM]")
    p.set_defaults(fn=cmd_eta)

    p = sub.add_parser("resolvent", help="resolvent kernel on point pairs")
    _add_common(p)
    p.add_argument("--z", default="1", help="spectral parameter RE[,IM]")
    p.add_argument("--depth", "-D", type=int, default=None, help="series depth")
    p.add_argument("--pairs", default=None, help="CSV of point pairs (x,y)")
    p.add_argument("--neumann", action="store_true",
                   help="reflecting kernel instead of the absorbing series")
    p.set_defaults(fn=cmd_resolvent)

    p = sub.add_parser("blowup", help="exhaustion kernels along a blowup address")
    _add_common(p)
    p.add_argument("--omega", required=True,
                   help="address PRE:PER, the part after ':' repeating")
    p.add_argument("--nmax", type=int, default=5, help="exhaustion steps")
    p.add_argument("--z", default="1", help="spectral parameter (real)")
    p.add_argument("--pairs", default=None, help="CSV of point pairs (x,y)")
    p.add_argument("--report", default=None,
                   help="also write the convergence report JSON here")
    p.set_defaults(fn=cmd_blowup)

    p = sub.add_parser("sector", help="ray growth envelopes off the spectrum")
    _add_common(p)
    p.add_argument("--pairs", default=None, help="CSV of point pairs (x,y)")
    p.add_argument("--rays", default=None,
                   help='comma list of angles, "pi" suffix allowed: 0.25pi,0.5pi')
    p.add_argument("--modulus-grid", default=None,
                   help="LO,HI,N geometric grid or explicit comma list")
    p.set_defaults(fn=cmd_sector)

    p = sub.add_parser("scmap", help="comparison map from axis decay samples")
    _add_common(p, spec=False)
    p.add_argument("--f", required=True, help="CSV of axis samples (x,f)")
    p.add_argument("--M", type=float, default=8.0, help="vertex scale")
    p.add_argument("--eps", type=float, default=0.02, help="exponent slack")
    p.add_argument("--levels", type=int, default=12, help="vertex levels")
    p.add_argument("--eval", required=True, help="CSV of points (re,im)")
    p.set_defaults(fn=cmd_scmap)

    p = sub.add_parser("heat", help="heat kernel on point pairs")
    _add_common(p)
    p.add_argument("--t", type=float, required=True, help="time")
    p.add_argument("--pairs", default=None, help="CSV of point pairs (x,y)")
    p.add_argument("--method", choices=("spectral", "contour", "both"),
                   default="both")
    p.set_defaults(fn=cmd_heat)

    p = sub.add_parser("kernel", help="functional-calculus kernels")
    _add_common(p)
    p.add_argument("--symbol", choices=("heat", "power", "exp"), required=True)
    p.add_argument("--w", default=None, help="symbol parameter RE[,IM]")
    p.add_argument("--t", type=float, default=None, help="time (heat symbol)")
    p.add_argument("--pairs", default=None, help="CSV of point pairs (x,y)")
    p.set_defaults(fn=cmd_kernel)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITE_NAMES + ("all",))
    _add_common(p)
    p.add_argument("--quick", action="store_true", help="reduced levels and trials")
    p.add_argument("--lambda-grid", default=None,
                   help="override the mass-integral grid (eta suite)")
    p.set_defaults(fn=cmd_verify)

    return ap


# flags whose values may start with a minus sign ("-0.1,0"); fused into
# --flag=value form so the parser cannot mistake them for options
_VALUE_FLAGS = {"--w", "--z"}


def _fuse_values(argv: list[str]) -> list[str]:
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_fuse_values(list(argv)))
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return 2
        os.environ["FRACTAL_THREADS"] = str(args.threads)
    try:
        return args.fn(args)
    except SingularityError as e:
        print(f"singularity: {e}", file=sys.stderr)
        return 3
    except (GateError, CapacityError) as e:
        print(f"failed check: {e}", file=sys.stderr)
        return 3
    except (ConfigError, ModelError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
