"""Command-line front door: runs the shipped experiments, emits tables.

Subcommands
    hk         coefficients of one h_k as CSV/JSON
    verify     operator-identity suite, JSON report
    distance   least-squares distance sweep over K
    moebius    Mobius-combination residual sweep over n
    dirichlet  energy cross-check sweep over k, or the golden-pair check
    pdcp       dilation-span distance sweep, or the range-exclusion witness
    pointwise  compact-open pointwise checks at given z values

Outputs are deterministic for a fixed (config, seed): wall-clock metadata
never enters the files.  CSV tables carry a header row and a JSON metadata
sidecar (``<out>.meta.json``) with the package version, N, and tolerances;
``--format json`` writes a single JSON document instead.  Exit codes:
0 success, 2 usage error, 3 numerical failure (including failed verifies),
4 I/O failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import bdcriterion as bd
from . import dirichletlocal as dl
from . import hardyops as ho
from . import numtheory as nt
from . import pdcp as pd
from .bdcriterion import NumericalError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list: {text!r}") from exc


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad complex list: {text!r}") from exc


def _parse_args(argv):
    ap = argparse.ArgumentParser(
        prog="bdhardy",
        description="Numerical experiments around the Baez-Duarte criterion in H^2.")
    ap.add_argument("--version", action="version", version=f"bdhardy {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, n_default=65536):
        p.add_argument("--N", type=int, default=n_default,
                       help="truncation length (default %(default)s)")
        p.add_argument("--out", type=str, default=None,
                       help="output path (default: table to stdout, no sidecar)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized checks (default 0)")
        p.add_argument("--threads", type=int, default=1,
                       help="task-level parallelism over sweep cells")

    p = sub.add_parser("hk", help="coefficients of h_k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="number of coefficients")
    common(p)

    p = sub.add_parser("verify", help="operator identity suite")
    p.add_argument("--all", action="store_true", help="run the full suite")
    p.add_argument("--identity", action="append", default=[],
                   choices=ho.IDENTITIES, help="run one identity (repeatable)")
    common(p, n_default=4096)

    p = sub.add_parser("distance", help="distance from the target to the family span")
    p.add_argument("--family", choices=("hk", "ims"), default="hk")
    p.add_argument("--target", choices=("one", "one-minus-z"), default="one")
    p.add_argument("--K", type=_int_list, required=True, help="comma-separated K values")
    common(p)

    p = sub.add_parser("moebius", help="Mobius-combination residual sweep")
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated cutoffs")
    common(p)

    p = sub.add_parser("dirichlet", help="local Dirichlet energy cross-checks")
    p.add_argument("--check", choices=("crosscheck", "golden"), default="crosscheck")
    p.add_argument("--k", type=_int_list, default=[2, 3, 4, 5],
                   help="comma-separated k values (crosscheck)")
    p.add_argument("--grid", type=int, default=10 ** 4, help="circle points (golden)")
    common(p)

    p = sub.add_parser("pdcp", help="dilation-completeness experiments")
    p.add_argument("--witness", action="store_true",
                   help="run the range-exclusion witness instead of a sweep")
    p.add_argument("--generator", type=str, default="f1",
                   help="f1, f:<s>, e:<k>, or hk:<k>")
    p.add_argument("--target", type=str, default="e:1")
    p.add_argument("--n-max", type=_int_list, default=[8, 16, 32, 64])
    p.add_argument("--Ns", type=int, default=4096, help="sine-coefficient length")
    common(p)

    p = sub.add_parser("pointwise", help="compact-open pointwise checks")
    p.add_argument("--z", type=_complex_list, required=True,
                   help="comma-separated points, e.g. 0,0.5,0.5j")
    p.add_argument("--n", type=_int_list, required=True)
    common(p)

    return ap.parse_args(argv)


def _csv_table(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(repr(v) if isinstance(v, float) else str(v)
                           for v in row) + "\n")
    return buf.getvalue()


def _emit(args, header, rows, meta, json_payload=None):
    """Write the table (+ sidecar) or a single JSON document."""
    meta = {"tool": "bdhardy", "version": __version__, "command": args.command,
            **meta}
    if args.format == "json":
        doc = json.dumps({"meta": meta, "rows": json_payload if json_payload
                          is not None else [dict(zip(header, r)) for r in rows]},
                         indent=2) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(doc)
        else:
            sys.stdout.write(doc)
        return
    table = _csv_table(header, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
        with open(args.out + ".meta.json", "w") as fh:
            fh.write(json.dumps(meta, indent=2) + "\n")
    else:
        sys.stdout.write(table)


def _map_cells(fn, cells, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, cells))
    return [fn(c) for c in cells]


def _cmd_hk(args) -> int:
    seq = ho.hk_coeffs(args.k, args.n)
    if args.format == "json":
        doc = seq.to_json() + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(doc)
        else:
            sys.stdout.write(doc)
        return EXIT_OK
    table = seq.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
        with open(args.out + ".meta.json", "w") as fh:
            json.dump({"tool": "bdhardy", "version": __version__,
                       "command": "hk", "k": args.k, "n": args.n,
                       "trunc_bound": seq.trunc_bound}, fh, indent=2)
            fh.write("\n")
    else:
        sys.stdout.write(table)
    return EXIT_OK


def _cmd_verify(args) -> int:
    names = list(args.identity)
    if args.all or not names:
        names = list(ho.IDENTITIES)
    default_params = {
        "SemigroupW": {"m": 2, "n": 3}, "SemigroupT": {"m": 2, "n": 3},
        "Quasiconjugacy": {"n": 2}, "WnOnHk": {"n": 2, "k": 3},
        "PhiMapsRkToHk": {"k": 3}, "TIsometry": {"degree": 64},
        "PsiIsometry": {},
    }
    reports = _map_cells(
        lambda name: ho.verify_identity(name, default_params[name],
                                        n=args.N, seed=args.seed),
        names, args.threads)
    payload = [r.to_dict() for r in reports]
    doc = json.dumps({"meta": {"tool": "bdhardy", "version": __version__,
                               "command": "verify", "N": args.N,
                               "seed": args.seed},
                      "reports": payload}, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERICAL


def _cmd_distance(args) -> int:
    family = "Hk" if args.family == "hk" else "ImsHk"
    target = "One" if args.target == "one" else "OneMinusZ"

    def cell(k):
        rep = bd.distance(bd.build_gram(family, k, args.N, target))
        return [k, args.N, rep.distance, rep.regularization,
                rep.condition_estimate, rep.truncation_bound]

    rows = _map_cells(cell, args.K, args.threads)
    header = ["K", "N", "distance", "ridge", "condition", "truncation_bound"]
    _emit(args, header, rows,
          {"family": family, "target": target, "N": args.N,
           "ridge_policy": "1e-14*trace/(K-1), x10 until Cholesky succeeds"})
    return EXIT_OK


def _cmd_moebius(args) -> int:
    tables = nt.cached_sieve(max(args.n))

    def cell(n):
        rep = bd.moebius_residual(n, args.N, tables)
        return [n, args.N, rep.residual_norm, rep.phi_bound,
                rep.scalar_terms[0], rep.scalar_terms[1]]

    rows = _map_cells(cell, args.n, args.threads)
    header = ["n", "N", "residual_norm", "phi_bound", "M1", "M2"]
    _emit(args, header, rows,
          {"N": args.N, "bound": "residual <= sqrt(phi_bound)+|M1|*||L||_N+|1+M2|"})
    return EXIT_OK


def _cmd_dirichlet(args) -> int:
    if args.check == "golden":
        rep = dl.golden_pair_check(args.grid)
        rows = [[args.grid, rep.max_deviation, rep.a_at_zero, rep.passed]]
        _emit(args, ["grid", "max_deviation", "a_at_zero", "pass"], rows,
              {"tolerance": 1e-12})
        return EXIT_OK if rep.passed else EXIT_NUMERICAL

    def cell(k):
        e, b = dl.dirichlet_energy_bergman_crosscheck(k, args.N)
        rel = abs(e - b) / b if b else 0.0
        return [k, args.N, e, b, rel]

    rows = _map_cells(cell, args.k, args.threads)
    _emit(args, ["k", "N", "energy_decomposition", "bergman_norm2", "rel_diff"],
          rows, {"N": args.N})
    return EXIT_OK


def _parse_sine(spec: str, n_s: int) -> pd.SineSeq:
    if spec == "f1":
        return pd.wintner_fs(1.0, n_s)
    if spec.startswith("f:"):
        return pd.wintner_fs(float(spec[2:]), n_s)
    if spec.startswith("e:"):
        k = int(spec[2:])
        coeffs = np.zeros(max(n_s, k))
        coeffs[k - 1] = 1.0
        return pd.SineSeq(coeffs)
    if spec.startswith("hk:"):
        return pd.map_v(ho.hk_coeffs(int(spec[3:]), n_s + 1))
    raise argparse.ArgumentTypeError(f"bad sine-function spec: {spec!r}")


def _cmd_pdcp(args) -> int:
    if args.witness:
        rep = pd.range_exclusion_witness(args.N, seed=args.seed)
        doc = json.dumps({"meta": {"tool": "bdhardy", "version": __version__,
                                   "command": "pdcp", "N": args.N},
                          "witness": rep.to_dict()}, indent=2) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(doc)
        else:
            sys.stdout.write(doc)
        return EXIT_OK if rep.passed else EXIT_NUMERICAL
    gen = _parse_sine(args.generator, args.Ns)
    tgt = _parse_sine(args.target, args.Ns)

    def cell(n_max):
        rep = pd.span_distance_l2(tgt, gen, n_max)
        return [n_max, rep.N, rep.distance, rep.regularization,
                rep.condition_estimate]

    rows = _map_cells(cell, args.n_max, args.threads)
    _emit(args, ["n_max", "Ns", "distance", "ridge", "condition"], rows,
          {"generator": args.generator, "target": args.target, "Ns": args.Ns})
    return EXIT_OK


def _cmd_pointwise(args) -> int:
    tables = nt.cached_sieve(max(args.n))
    cells = [(z, n) for z in args.z for n in args.n]

    def cell(zn):
        z, n = zn
        rep = bd.compact_open_check([z], n, args.N, tables)[0]
        return [z.real, z.imag, n, rep.abs_error, rep.bound]

    rows = _map_cells(cell, cells, args.threads)
    _emit(args, ["z_re", "z_im", "n", "abs_error", "bound"], rows,
          {"N": args.N, "bound": "||r_n||_full/(|1-z| sqrt(1-|z|^2))"})
    return EXIT_OK


_DISPATCH = {
    "hk": _cmd_hk, "verify": _cmd_verify, "distance": _cmd_distance,
    "moebius": _cmd_moebius, "dirichlet": _cmd_dirichlet,
    "pdcp": _cmd_pdcp, "pointwise": _cmd_pointwise,
}


def main(argv=None) -> int:
    args = _parse_args(argv if argv is not None else sys.argv[1:])
    try:
        return _DISPATCH[args.command](args)
    except (NumericalError, FloatingPointError) as exc:
        print(f"bdhardy: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"bdhardy: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bdhardy: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
