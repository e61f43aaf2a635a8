"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, otherwise the
``exit_code`` of the raised :class:`~kirkwood.errors.KirkwoodError`.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import DimMismatch, InvalidDimension, KirkwoodError
from .generate import STATE_KINDS, make_rng, random_basis, random_density
from .io import Document, load, save
from .linalg import DEFAULT_TOL, PVM, OrthonormalBasis, Tolerances, max_abs, pvm_from_basis
from .measurement import born_probabilities, wigner_joint
from .quasiprob import KirkwoodTable, kirkwood
from .reconstruct import (
    BasisPair,
    check_complementary,
    min_overlap,
    reassemble,
    reconstruct_density,
    reconstruct_fourier,
    schwinger_pair,
)
from .sampling import simulate_successive
from .verify import FAULTS, run_suite

BASIS_KINDS = ("standard", "schwinger_b", "random_unitary")


def _metadata(tol: Tolerances, **extra) -> dict:
    meta = {"tool": "kirkwood", "version": __version__, "tolerances": tol.as_dict()}
    meta.update({k: v for k, v in extra.items() if v is not None})
    return meta


def _inputs(*paths) -> list[str]:
    return [os.path.basename(str(p)) for p in paths]


def _load_kind(path, *kinds) -> Document:
    doc = load(path)
    if doc.kind not in kinds:
        raise KirkwoodError(f"{path}: expected a {' or '.join(kinds)} document, got {doc.kind}")
    return doc


def _as_pvm(doc: Document) -> PVM:
    return pvm_from_basis(doc.payload) if doc.kind == "basis" else doc.payload


def _finite(x: float):
    return float(x) if np.isfinite(x) else None


def cmd_gen_state(args, tol: Tolerances) -> int:
    if args.dim < 2:
        raise InvalidDimension(f"dimension must be at least 2, got {args.dim}")
    rho = random_density(args.dim, make_rng(args.seed), args.kind)
    save(Document("state", args.dim, rho, _metadata(tol, seed=args.seed, generator=args.kind)),
         args.out)
    return 0


def cmd_gen_basis(args, tol: Tolerances) -> int:
    if args.dim < 2:
        raise InvalidDimension(f"dimension must be at least 2, got {args.dim}")
    if args.kind == "standard":
        basis = OrthonormalBasis.standard(args.dim)
    elif args.kind == "schwinger_b":
        basis = schwinger_pair(args.dim).b
    else:
        basis = random_basis(args.dim, make_rng(args.seed))
    seed = args.seed if args.kind == "random_unitary" else None
    save(Document("basis", args.dim, basis, _metadata(tol, seed=seed, generator=args.kind)),
         args.out)
    return 0


def cmd_kirkwood(args, tol: Tolerances) -> int:
    rho = _load_kind(args.state, "state").payload
    a = _as_pvm(_load_kind(args.basis_a, "basis", "pvm"))
    b = _as_pvm(_load_kind(args.basis_b, "basis", "pvm"))
    table = kirkwood(rho, a, b, tol)
    report = {
        "max_marginal_deviation": max(
            max_abs(table.row_marginals - born_probabilities(rho, a)),
            max_abs(table.column_marginals - born_probabilities(rho, b))),
        "max_imaginary_marginal": max(max_abs(table.entries.sum(axis=1).imag),
                                      max_abs(table.entries.sum(axis=0).imag)),
    }
    meta = _metadata(tol, inputs=_inputs(args.state, args.basis_a, args.basis_b), report=report)
    save(Document("kirkwood_table", rho.dim, table, meta), args.out)
    return 0


def cmd_reconstruct(args, tol: Tolerances) -> int:
    table: KirkwoodTable = _load_kind(args.table, "kirkwood_table").payload
    pair = BasisPair(_load_kind(args.basis_a, "basis").payload,
                     _load_kind(args.basis_b, "basis").payload)
    raw = reassemble(table, pair, tol)
    if args.fourier:
        if max_abs(pair.overlaps - schwinger_pair(pair.dim).overlaps) > tol.herm:
            raise DimMismatch("--fourier needs the Schwinger basis pair")
        rho = reconstruct_fourier(table, pair.dim, tol)
    else:
        rho = reconstruct_density(table, pair, tol)
    report = {
        "path": "fourier" if args.fourier else "inversion",
        "min_overlap": min_overlap(pair),
        "complementary": bool(check_complementary(pair, tol.overlap)),
        "hermiticity_defect": max_abs(raw - raw.conj().T),
        "physicality_residual_frobenius": float(np.linalg.norm(raw - rho.matrix)),
        "min_eigenvalue": float(np.linalg.eigvalsh(rho.matrix)[0]),
    }
    if args.reference is not None:
        ref = _load_kind(args.reference, "state").payload
        if ref.dim != rho.dim:
            raise DimMismatch("reference state has a different dimension")
        report["reference_error_frobenius"] = float(np.linalg.norm(rho.matrix - ref.matrix))
    inputs = _inputs(args.table, args.basis_a, args.basis_b)
    save(Document("state", rho.dim, rho, _metadata(tol, inputs=inputs, report=report)), args.out)
    return 0


def cmd_simulate(args, tol: Tolerances) -> int:
    if args.trials < 1:
        raise KirkwoodError(f"need at least one trial, got {args.trials}")
    rho = _load_kind(args.state, "state").payload
    a = _as_pvm(_load_kind(args.basis_a, "basis", "pvm"))
    b = _as_pvm(_load_kind(args.basis_b, "basis", "pvm"))
    counts = simulate_successive(rho, a, b, args.trials, args.seed, workers=args.workers, tol=tol)
    exact = wigner_joint(rho, a, b, tol).probabilities
    dev = np.abs(counts.frequencies - exact)
    sigma = np.sqrt(exact * (1 - exact) / args.trials)
    with np.errstate(divide="ignore", invalid="ignore"):
        multiple = np.where(sigma > 0, dev / sigma, np.where(dev > 0, np.inf, 0.0))
    comparison = {
        "max_abs_deviation": float(dev.max()),
        "max_sigma_multiple": _finite(multiple.max()),
        "exact": exact.tolist(),
    }
    meta = _metadata(tol, seed=args.seed, inputs=_inputs(args.state, args.basis_a, args.basis_b),
                     comparison=comparison)
    save(Document("joint_counts", rho.dim, counts, meta), args.out)
    return 0


def _parse_dims(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = list(range(int(lo), int(hi) + 1))
        else:
            dims = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI or a comma list, got {text!r}")
    if not dims or min(dims) < 2 or max(dims) > 64:
        raise argparse.ArgumentTypeError("dimensions must lie in 2..64")
    return dims


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def cmd_verify(args, tol: Tolerances) -> int:
    results = run_suite(args.dims, args.instances, args.seed, args.fault, tol)
    passed = all(r.status in ("pass", "inconclusive") for r in results)
    families = []
    for r in results:
        d = r.as_dict()
        d["worst_residual"] = _finite(r.worst_residual)
        families.append(d)
    payload = {"passed": passed, "families": families}
    meta = _metadata(tol, seed=args.seed, dims=args.dims, instances=args.instances,
                     fault=args.fault)
    save(Document("report", max(args.dims), payload, meta), args.out)
    for r in results:
        print(f"{r.status.upper():12s} {r.name:18s} worst={r.worst_residual:.3e} "
              f"threshold={r.threshold:.0e}")
    return 0 if passed else 1


def _tolerance_overrides(items) -> Tolerances:
    tol = DEFAULT_TOL
    names = set(tol.as_dict())
    for item in items or ():
        if "=" in item:
            key, _, value = item.partition("=")
            if key not in names:
                raise argparse.ArgumentTypeError(f"unknown tolerance {key!r}; choose from {sorted(names)}")
            tol = tol.replace(**{key: float(value)})
        else:
            v = float(item)
            tol = tol.replace(herm=v, norm=v, psd=v)
    return tol


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="output document path")
    common.add_argument("--tol", action="append", metavar="[NAME=]VALUE",
                        help="tolerance override; a bare value sets herm, norm and psd")

    parser = argparse.ArgumentParser(prog="kirkwood",
                                     description="Kirkwood quasiprobabilities of successive measurements.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-state", parents=[common], help="generate a density matrix")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kind", choices=STATE_KINDS, default="mixed")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_state)

    p = sub.add_parser("gen-basis", parents=[common], help="generate an orthonormal basis")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kind", choices=BASIS_KINDS, default="standard")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_basis)

    p = sub.add_parser("kirkwood", parents=[common], help="compute a Kirkwood table")
    p.add_argument("state")
    p.add_argument("basis_a")
    p.add_argument("basis_b")
    p.set_defaults(func=cmd_kirkwood)

    p = sub.add_parser("reconstruct", parents=[common], help="invert a Kirkwood table")
    p.add_argument("table")
    p.add_argument("basis_a")
    p.add_argument("basis_b")
    p.add_argument("--fourier", action="store_true", help="use the DFT form (Schwinger pair only)")
    p.add_argument("--reference", help="state document to report the reconstruction error against")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("simulate", parents=[common], help="sample successive measurements")
    p.add_argument("state")
    p.add_argument("basis_a")
    p.add_argument("basis_b")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the identity checks")
    p.add_argument("--dims", type=_parse_dims, default=list(range(2, 9)), metavar="LO..HI")
    p.add_argument("--instances", type=_positive, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fault", choices=FAULTS, help="inject a deliberate defect")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    try:
        tol = _tolerance_overrides(args.tol)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        parser.error(str(exc))
    try:
        return args.func(args, tol)
    except KirkwoodError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
