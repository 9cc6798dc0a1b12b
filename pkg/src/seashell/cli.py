"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 certificate refused.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__, forward
from .certify import certify
from .errors import CertificateRefused, NumericalError, SeashellError, ValidationError
from .fileio import (dumps, load_json, read_spectral, sidecar_path, spectral_to_dict,
                     write_reconstruction, write_text)
from .reconstruction import SCHEMES, SHIFTS, reconstruct
from .roundtrip import roundtrip
from .spectral_data import detect_finite_rank

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_REFUSED = 0, 2, 3, 4


def _grid_size(text: str) -> int:
    m = int(text)
    if m < 8:
        raise argparse.ArgumentTypeError("m must be >= 8")
    return m


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="seashell",
        description="Reconstruct a Sturm-Liouville potential from finite spectral data.",
        epilog="SEASHELL_THREADS caps the worker threads used by the kernel solver.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def recon_opts(sp):
        sp.add_argument("--m", type=_grid_size, default=600, help="grid intervals on [0, pi] (default 600)")
        sp.add_argument("--shift", choices=SHIFTS, default="none",
                        help="centre eigenvalues by lambda_{N-1} - (N-1)^2 before solving")
        sp.add_argument("--scheme", choices=SCHEMES, default="central2",
                        help="differentiation of the kernel diagonal")

    r = sub.add_parser("reconstruct", help="spectral data JSON -> potential CSV + JSON sidecar")
    r.add_argument("input")
    r.add_argument("-o", "--output", required=True, help="CSV path; sidecar is written next to it")
    recon_opts(r)

    f = sub.add_parser("forward", help="potential spec JSON -> spectral data JSON")
    f.add_argument("input")
    f.add_argument("--count", type=_positive_int, required=True, help="number of eigenvalues")
    f.add_argument("--cells", type=_positive_int, default=None, help="integration cells")
    f.add_argument("-o", "--output")

    rt = sub.add_parser("roundtrip", help="forward, reconstruct, re-solve and report e_N")
    rt.add_argument("input")
    rt.add_argument("--count", type=_positive_int, required=True, help="number of eigenvalues N")
    rt.add_argument("-o", "--output")
    recon_opts(rt)
    rt.set_defaults(shift="auto")

    c = sub.add_parser("certify", help="a-priori error certificate for omega = 0 data")
    c.add_argument("input")
    c.add_argument("--M", type=float, default=None, help="l2 bound on the remainders (else from file)")
    c.add_argument("--N", type=_positive_int, default=None, help="truncation index (default: last stored)")
    c.add_argument("-o", "--output")

    d = sub.add_parser("detect", help="finite-rank index from a run of trivial pairs")
    d.add_argument("input")
    d.add_argument("--n-tilde", type=_positive_int, required=True, dest="n_tilde")
    d.add_argument("--trivial-tol", type=float, default=None, dest="trivial_tol")
    d.add_argument("-o", "--output")
    return p


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def run(args: argparse.Namespace) -> int:
    if args.command == "reconstruct":
        outputs = {Path(args.output).resolve(), sidecar_path(args.output).resolve()}
        if Path(args.input).resolve() in outputs:
            raise ValidationError("output would overwrite the input file")
        data = read_spectral(args.input)
        rec = reconstruct(data, m=args.m, shift=args.shift, scheme=args.scheme)
        write_reconstruction(rec, args.output)
    elif args.command == "forward":
        spec = forward.potential_from_dict(load_json(args.input))
        data = forward.spectral_data(spec, args.count, args.cells)
        _emit(dumps(spectral_to_dict(data)), args.output)
    elif args.command == "roundtrip":
        spec = forward.potential_from_dict(load_json(args.input))
        rep = roundtrip(spec, args.count, m=args.m, shift=args.shift, scheme=args.scheme)
        _emit(dumps(rep.to_dict()), args.output)
    elif args.command == "certify":
        cert = certify(read_spectral(args.input), args.M, args.N)
        print(cert.summary(), file=sys.stderr if args.output is None else sys.stdout)
        _emit(dumps(cert.to_dict()), args.output)
    elif args.command == "detect":
        data = read_spectral(args.input)
        N = detect_finite_rank(data, args.n_tilde, args.trivial_tol)
        _emit(dumps({"N": N}) if args.output else f"{N}\n", args.output)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except CertificateRefused as exc:
        print(f"seashell: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except NumericalError as exc:
        print(f"seashell: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SeashellError, OSError) as exc:
        print(f"seashell: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
