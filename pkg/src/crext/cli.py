"""Command line front end.

Every subcommand writes machine-readable output (JSON, or CSV for contour
and grid dumps) to stdout and logs to stderr.  Exit codes: 0 success,
1 failing fixtures, 2 parse or schema error, 3 hypothesis failure,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import __version__
from .discs import DEFAULT_NODES, default_seed, disc_through
from .errors import (
    CRExtError,
    HypothesisError,
    NotCRError,
    ParseError,
    SchemaError,
)
from .extend import EST_TOL, divergence_along, extend_at_point
from .fixtures import verify_examples
from .formal import chain_identity_check, formal_jet
from .io import load_json, parse_cpolynomial, parse_data, parse_model, parse_point, parse_probe_path
from .quadric import (
    ZERO_TOL,
    block_reduce_B,
    cr_singular_locus,
    extension_verdict,
    inertia,
    normalize,
    real_form,
)
from .topology import classify_quadric_leaf, sample_leaf

log = logging.getLogger("crext")

EXIT_OK, EXIT_FIXTURE, EXIT_SCHEMA, EXIT_HYPOTHESIS, EXIT_NUMERICAL = 0, 1, 2, 3, 4


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _positive(name):
    def conv(text):
        v = float(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v
    return conv


def _resolution(text):
    v = int(text)
    if v < 17:
        raise argparse.ArgumentTypeError("resolution must be at least 17")
    return v


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------
def cmd_analyze(args):
    model = parse_model(load_json(args.model))
    zt = args.zero_tol
    ia = inertia(model.A, zt)
    iq = inertia(real_form(model.quadric()), zt)
    verdict = extension_verdict(model, zt)
    report = {
        "n": model.n,
        "inertia_A": ia._asdict(),
        "inertia_real_form": iq._asdict(),
        "q_nondegenerate": verdict.q_nondegenerate,
        "verdict": verdict.to_json(),
    }
    try:
        loc = cr_singular_locus(model, zero_tol=zt, seed=args.seed)
        report["cr_singular_locus"] = loc.summary()
    except CRExtError as exc:
        report["cr_singular_locus"] = {"error": exc.code, "message": str(exc)}
    if ia.zero == 0 and ia.negative == 0:
        nf = normalize(model, zt)
        report["bishop_invariants"] = [float(x) for x in nf.lambdas]
        report["parabolic_flags"] = list(nf.parabolic)
    else:
        report["parabolic_flags"] = None
        report["parabolic_note"] = "invariants are defined for positive definite A only"
    log.info("verdict %s (a=%d, b=%d)", verdict.verdict.value, verdict.a, verdict.b)
    _emit(report)
    return EXIT_OK


def cmd_normal_form(args):
    model = parse_model(load_json(args.model))
    nf = block_reduce_B(model, args.zero_tol) if args.block else normalize(model, args.zero_tol)
    _emit(nf.to_json())
    return EXIT_OK


def cmd_formal_extend(args):
    model = parse_model(load_json(args.model))
    raw = load_json(args.f)
    if isinstance(raw, dict):
        raw = raw.get("terms")
    f = parse_cpolynomial(raw, model.n)
    jet = formal_jet(f, model, args.order, tol=args.consistency_tol, zero_tol=args.zero_tol)
    chain = chain_identity_check(jet.f_truncation, jet.F_truncation, model, order=args.order)
    _emit({
        "order": jet.order,
        "F": jet.F_truncation.to_json(),
        "residual_valuation": jet.residual_valuation,
        "chain_identity_residual": chain,
    })
    return EXIT_OK


def cmd_disc(args):
    model = parse_model(load_json(args.model))
    z, s = parse_point(load_json(args.point), model.n)
    work, ws = model, s
    if s < float(model.rho(z)):
        log.info("point lies below the manifold; building the disc for s -> -s")
        work, ws = model.flipped(), -s
    disc = disc_through((z, ws), work, variant=args.variant, K=args.nodes)
    ct = disc.contour()
    pts = disc.L(ct.tau)
    resid = np.abs(ws - work.rho(pts))
    theta = np.angle(ct.tau - disc.center)
    log.info("disc through the point: %d nodes, max residual %.3e", ct.K, resid.max())
    w = csv.writer(sys.stdout, lineterminator="\n")
    header = ["angle"]
    for j in range(model.n):
        header += [f"re_z{j + 1}", f"im_z{j + 1}"]
    w.writerow(header + ["residual"])
    for k in range(ct.K):
        row = [f"{theta[k]:.17g}"]
        for j in range(model.n):
            row += [f"{pts[k, j].real:.17g}", f"{pts[k, j].imag:.17g}"]
        w.writerow(row + [f"{resid[k]:.3e}"])
    return EXIT_OK


def cmd_extend_point(args):
    model = parse_model(load_json(args.model))
    data = parse_data(load_json(args.data), model.n)
    if args.probe_path:
        probes = parse_probe_path(load_json(args.probe_path), model.n)
        rep = divergence_along(data, probes, threshold=args.threshold)
        _emit(rep.to_json())
        return EXIT_OK
    if not args.point:
        raise SchemaError("point", "either --point or --probe-path is required")
    point = parse_point(load_json(args.point), model.n)
    res = extend_at_point(data, model, point, K=args.nodes, est_tol=args.est_tol,
                          w_factor=args.w_factor, seed=args.seed)
    _emit(res.to_json())
    return EXIT_OK


def cmd_leaf_topology(args):
    model = parse_model(load_json(args.model))
    q = model.quadric()
    iq = inertia(real_form(q), args.zero_tol)
    out = {"s": args.s, "inertia_real_form": iq._asdict()}
    try:
        out["classification"] = classify_quadric_leaf(iq, int(np.sign(args.s))).to_json()
        if not model.is_pure:
            out["classification"]["note"] += " (quadric part; valid for small |s|)"
    except HypothesisError as exc:
        out["classification"] = {"error": exc.code, "message": str(exc)}
    oracle = sample_leaf(model, args.s, box=args.box, resolution=args.resolution,
                         check_stability=args.stability, return_cells=bool(args.csv))
    out["oracle"] = oracle.to_json()
    if "error" not in out["classification"]:
        c = out["classification"]
        out["agree"] = (c["components"], c["boundary_components"]) == oracle.counts()
    if args.csv:
        cells = oracle.boundary_cells
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x{j + 1}" for j in range(cells.shape[1])])
            for row in cells:
                w.writerow([f"{v:.10g}" for v in row])
        log.info("wrote %d boundary cells to %s", len(cells), args.csv)
    _emit(out)
    return EXIT_OK


def cmd_verify_examples(args):
    results = verify_examples(args.only)
    for r in results:
        log.info(r.line())
    _emit({"fixtures": [r.to_json() for r in results],
           "passed": sum(r.passed for r in results), "total": len(results)})
    return EXIT_OK if all(r.passed for r in results) else EXIT_FIXTURE


# ---------------------------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog="crext", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"crext {__version__}")
    p.add_argument("--seed", type=int, default=None, help="jitter seed (default: CREXT_SEED or 0)")
    p.add_argument("--zero-tol", type=_positive("zero-tol"), default=ZERO_TOL)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="inertia, locus, parabolicity and extension verdict")
    a.add_argument("--model", required=True)
    a.set_defaults(func=cmd_analyze)

    a = sub.add_parser("normal-form", help="diagonalize A and Takagi-reduce B")
    a.add_argument("--model", required=True)
    a.add_argument("--block", action="store_true", help="reduce only the upper-left 2x2 block of B")
    a.set_defaults(func=cmd_normal_form)

    a = sub.add_parser("formal-extend", help="formal extension F(z, s) of CR polynomial data")
    a.add_argument("--model", required=True)
    a.add_argument("--f", required=True)
    a.add_argument("--order", type=int, required=True)
    a.add_argument("--consistency-tol", type=_positive("consistency-tol"), default=1e-9)
    a.set_defaults(func=cmd_formal_extend)

    a = sub.add_parser("disc", help="boundary nodes of the attached disc through a point (CSV)")
    a.add_argument("--model", required=True)
    a.add_argument("--point", required=True)
    a.add_argument("--variant", type=int, choices=(0, 1), default=0)
    a.add_argument("--nodes", type=int, default=DEFAULT_NODES)
    a.set_defaults(func=cmd_disc)

    a = sub.add_parser("extend-point", help="numeric extension at a point, or a divergence report")
    a.add_argument("--model", required=True)
    a.add_argument("--data", required=True)
    a.add_argument("--point")
    a.add_argument("--probe-path")
    a.add_argument("--nodes", type=int, default=DEFAULT_NODES)
    a.add_argument("--est-tol", type=_positive("est-tol"), default=EST_TOL)
    a.add_argument("--w-factor", type=_positive("w-factor"), default=0.2)
    a.add_argument("--threshold", type=_positive("threshold"), default=1e3)
    a.set_defaults(func=cmd_extend_point)

    a = sub.add_parser("leaf-topology", help="classification and grid count of a leaf")
    a.add_argument("--model", required=True)
    a.add_argument("--s", type=float, required=True)
    a.add_argument("--resolution", type=_resolution, default=64)
    a.add_argument("--box", type=_positive("box"), default=None)
    a.add_argument("--stability", action="store_true", help="also count at twice the resolution")
    a.add_argument("--csv", help="write boundary cell centers to this file")
    a.set_defaults(func=cmd_leaf_topology)

    a = sub.add_parser("verify-examples", help="run the bundled example fixtures")
    a.add_argument("--only", nargs="+", default=None)
    a.set_defaults(func=cmd_verify_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    args.seed = default_seed(args.seed)
    log.debug("seed %d", args.seed)
    try:
        return args.func(args)
    except (ParseError, SchemaError) as exc:
        log.error("%s: %s", exc.code, exc)
        return EXIT_SCHEMA
    except (HypothesisError, NotCRError) as exc:
        log.error("%s: %s", exc.code, exc)
        return EXIT_HYPOTHESIS
    except CRExtError as exc:
        log.error("%s: %s", exc.code, exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        log.error("SCHEMA_ERROR: %s", exc)
        return EXIT_SCHEMA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
