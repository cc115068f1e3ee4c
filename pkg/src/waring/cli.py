"""Command-line front end.

Every subcommand emits one JSON object per result on stdout, always carrying
``seed``, ``tolerances`` and ``version`` metadata, so runs are reproducible
and composable in pipelines.  Exit codes: 0 success / accepted sample,
2 degenerate or rejected sample, 1 usage or precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import PreconditionError, RejectedSampleError
from .linalg import RANK_RTOL
from .apolarity import INCLUSION_TOL, apolar_space, catalecticant, is_polar_polyhedron
from .forms import (
    DISTINCT_TOL,
    LinearForm,
    complex_gaussian,
    num_monomials,
    random_decomposition,
    random_form,
    synthesize,
)
from .decompose import (
    RESIDUAL_TOL,
    chain_connect,
    check_chain,
    conic_vsp4_sample,
    decomposition_residual,
    plane_cubic_vsp4,
    quadric_pencil_decompose,
    quadric_sample_vsp,
    random_conic_plane,
    sylvester_parametrize,
    tangent_dimension,
)
from .secant import stable_report, terracini_dim
from . import jsonio

# classical cases reproduced by `table --classical`: (n, d, h); the binary
# rows instantiate the d = 2h-1 family
CLASSICAL_TABLE = (
    (1, 3, 2),
    (1, 5, 3),
    (2, 3, 4),
    (2, 4, 6),
    (2, 5, 7),
    (2, 6, 10),
    (3, 3, 5),
    (4, 3, 8),
)


def _default_seed() -> int:
    return int(os.environ.get("WARING_SEED", "0"))


def _add_common(parser: argparse.ArgumentParser, with_input: bool = False) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="random seed (default: WARING_SEED env var or 0)")
    parser.add_argument("--pretty", action="store_true",
                        help="indent the JSON output")
    parser.add_argument("--residual-tol", type=float, default=RESIDUAL_TOL)
    parser.add_argument("--rank-rtol", type=float, default=RANK_RTOL)
    parser.add_argument("--inclusion-tol", type=float, default=INCLUSION_TOL)
    parser.add_argument("--distinct-tol", type=float, default=DISTINCT_TOL)
    if with_input:
        parser.add_argument("--input", help="read the input JSON from this path "
                                            "instead of stdin")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waring",
        description="Waring decompositions of homogeneous forms "
                    "(JSON in, JSON out).",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded random form")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rank", type=int, default=None,
                   help="build the form from a random decomposition with this "
                        "many terms")
    p.add_argument("--with-decomposition", action="store_true",
                   help="with --rank, also emit the planted decomposition")

    p = sub.add_parser("decompose", help="decompose a form via a constructive family")
    _add_common(p, with_input=True)
    p.add_argument("--method", required=True,
                   choices=("sylvester", "pencil", "dk"))
    p.add_argument("--h", type=int, default=None,
                   help="number of terms (sylvester only)")
    p.add_argument("--u", default=None,
                   help="comma-separated parameter coordinates, python complex "
                        "literals allowed (sylvester / dk)")
    p.add_argument("--trials", type=int, default=1)

    p = sub.add_parser("sample", help="sample a random point of the space of "
                                      "decompositions")
    _add_common(p, with_input=True)
    p.add_argument("--method", required=True, choices=("quadric", "conic"))
    p.add_argument("--h", type=int, default=None,
                   help="number of terms (quadric only; conic is 4)")
    p.add_argument("--trials", type=int, default=1)

    p = sub.add_parser("verify", help="check a decomposition against a form")
    _add_common(p, with_input=True)

    p = sub.add_parser("apolar", help="orthonormal basis of the apolar space")
    _add_common(p, with_input=True)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("catalecticant", help="catalecticant matrix with "
                                             "monomial labels")
    _add_common(p, with_input=True)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("vsp-dim", help="tangent dimension at a decomposition")
    _add_common(p, with_input=True)

    p = sub.add_parser("secant-dim", help="secant dimension report")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--h", type=int, required=True)

    p = sub.add_parser("secant-table", help="secant dimension reports over a grid")
    _add_common(p)
    p.add_argument("--grid", required=True,
                   help="ranges n0-n1,d0-d1,h0-h1 (single values allowed), "
                        "e.g. 1-2,2-4,2-6")

    p = sub.add_parser("chain", help="connect two decompositions of a quadric")
    _add_common(p, with_input=True)

    p = sub.add_parser("table", help="classical table of decomposition-space "
                                     "dimensions")
    _add_common(p)
    p.add_argument("--classical", action="store_true", required=True)

    return parser


def _tolerances(args) -> dict:
    return {
        "residual_tol": args.residual_tol,
        "rank_rtol": args.rank_rtol,
        "inclusion_tol": args.inclusion_tol,
        "distinct_tol": args.distinct_tol,
    }


def _emit(args, payload: dict) -> None:
    obj = {
        "version": __version__,
        "seed": args.seed,
        "tolerances": _tolerances(args),
    }
    obj.update(payload)
    print(json.dumps(obj, indent=2 if args.pretty else None))


def _read_obj(args) -> dict:
    if getattr(args, "input", None):
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    return json.loads(text)


def _extract_form(obj):
    if isinstance(obj, dict) and "form" in obj:
        obj = obj["form"]
    return jsonio.form_from_obj(obj)


def _extract_decomposition(obj, key="decomposition"):
    if not isinstance(obj, dict) or key not in obj:
        raise ValueError(f"input JSON needs a '{key}' field")
    return jsonio.decomposition_from_obj(obj[key])


def _parse_parameter(text: str) -> np.ndarray:
    try:
        return np.array([complex(part.strip()) for part in text.split(",")],
                        dtype=complex)
    except ValueError as exc:
        raise PreconditionError(f"cannot parse parameter '{text}': {exc}") from exc


def _parse_grid(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise PreconditionError("grid must be n-range,d-range,h-range")
    ranges = []
    for part in parts:
        if "-" in part:
            lo, hi = part.split("-", 1)
            ranges.append(range(int(lo), int(hi) + 1))
        else:
            ranges.append(range(int(part), int(part) + 1))
    return ranges


def _cmd_gen(args) -> int:
    if args.rank is not None:
        dec = random_decomposition(args.n, args.d, args.rank, args.seed)
        form = synthesize(dec, args.n)
        payload = {"kind": "form", **jsonio.form_to_obj(form)}
        if args.with_decomposition:
            payload["decomposition"] = jsonio.decomposition_to_obj(dec)
    else:
        form = random_form(args.n, args.d, args.seed)
        payload = {"kind": "form", **jsonio.form_to_obj(form)}
    _emit(args, payload)
    return 0


def _trial_seeds(args):
    return [args.seed + k for k in range(max(1, args.trials))]


def _cmd_decompose(args) -> int:
    form = _extract_form(_read_obj(args))
    worst = 0
    for trial, seed in enumerate(_trial_seeds(args)):
        rng = np.random.default_rng(seed)
        try:
            if args.method == "sylvester":
                if args.h is None:
                    raise PreconditionError("--h is required for sylvester")
                if args.u is not None:
                    u = _parse_parameter(args.u)
                else:
                    u = complex_gaussian(rng, 2 * args.h - form.degree)
                sample = sylvester_parametrize(
                    form, args.h, u,
                    residual_tol=args.residual_tol,
                    distinct_tol=args.distinct_tol,
                    rank_rtol=args.rank_rtol,
                )
                payload = {"kind": "vsp_sample", "method": "sylvester",
                           "trial": trial, "trial_seed": seed,
                           **jsonio.sample_to_obj(sample)}
            elif args.method == "pencil":
                n = form.n
                G = random_form(n, 2, seed + 1)
                result = quadric_pencil_decompose(
                    form, G,
                    residual_tol=args.residual_tol,
                    distinct_tol=args.distinct_tol,
                    rank_rtol=args.rank_rtol,
                )
                payload = {"kind": "pencil", "method": "pencil",
                           "trial": trial, "trial_seed": seed,
                           **jsonio.pencil_to_obj(result)}
            else:  # dk
                if args.u is not None:
                    u = _parse_parameter(args.u)
                else:
                    u = complex_gaussian(rng, 3)
                sample = plane_cubic_vsp4(
                    form, u,
                    residual_tol=args.residual_tol,
                    distinct_tol=args.distinct_tol,
                    rank_rtol=args.rank_rtol,
                )
                payload = {"kind": "vsp_sample", "method": "dk",
                           "trial": trial, "trial_seed": seed,
                           **jsonio.sample_to_obj(sample)}
            _emit(args, payload)
        except RejectedSampleError as exc:
            _emit(args, {"kind": "rejection", "trial": trial,
                         "trial_seed": seed, "error": str(exc)})
            worst = 2
    return worst


def _cmd_sample(args) -> int:
    form = _extract_form(_read_obj(args))
    worst = 0
    for trial, seed in enumerate(_trial_seeds(args)):
        rng = np.random.default_rng(seed)
        try:
            if args.method == "quadric":
                if args.h is None:
                    raise PreconditionError("--h is required for quadric sampling")
                n = form.n
                extras = [
                    (complex(complex_gaussian(rng, 1)[0]),
                     LinearForm(complex_gaussian(rng, n + 1)))
                    for _ in range(args.h - (n + 1))
                ] if args.h > n + 1 else []
                G = random_form(n, 2, seed + 1)
                sample = quadric_sample_vsp(
                    form, args.h, extras, G,
                    residual_tol=args.residual_tol,
                    distinct_tol=args.distinct_tol,
                    rank_rtol=args.rank_rtol,
                )
            else:  # conic
                plane = random_conic_plane(form, seed)
                sample = conic_vsp4_sample(
                    form, plane,
                    residual_tol=args.residual_tol,
                    distinct_tol=args.distinct_tol,
                    rank_rtol=args.rank_rtol,
                )
            _emit(args, {"kind": "vsp_sample", "method": args.method,
                         "trial": trial, "trial_seed": seed,
                         **jsonio.sample_to_obj(sample)})
        except RejectedSampleError as exc:
            _emit(args, {"kind": "rejection", "trial": trial,
                         "trial_seed": seed, "error": str(exc)})
            worst = 2
    return worst


def _cmd_verify(args) -> int:
    obj = _read_obj(args)
    form = _extract_form(obj)
    dec = _extract_decomposition(obj)
    residual = decomposition_residual(form, dec)
    cert = is_polar_polyhedron(form, dec.forms,
                               inclusion_tol=args.inclusion_tol,
                               rank_rtol=args.rank_rtol)
    ok = cert.verdict and residual <= args.residual_tol
    _emit(args, {"kind": "verification", "residual": residual,
                 **jsonio.certificate_to_obj(cert), "accepted": ok})
    return 0 if ok else 2


def _cmd_apolar(args) -> int:
    form = _extract_form(_read_obj(args))
    basis = apolar_space(form, args.t, rank_rtol=args.rank_rtol)
    _emit(args, {"kind": "apolar_basis", **jsonio.apolar_to_obj(basis)})
    return 0


def _cmd_catalecticant(args) -> int:
    form = _extract_form(_read_obj(args))
    cat = catalecticant(form, args.t)
    _emit(args, {"kind": "catalecticant", **jsonio.catalecticant_to_obj(cat)})
    return 0


def _cmd_vsp_dim(args) -> int:
    obj = _read_obj(args)
    form = _extract_form(obj)
    dec = _extract_decomposition(obj)
    dim = tangent_dimension(form, dec, rank_rtol=args.rank_rtol,
                            residual_tol=args.residual_tol)
    formula = dec.h * form.num_vars - num_monomials(form.n, form.degree)
    _emit(args, {"kind": "vsp_dim", "n": form.n, "d": form.degree, "h": dec.h,
                 "tangent_dimension": dim, "formula_dimension": formula})
    return 0


def _cmd_secant_dim(args) -> int:
    report, stable = stable_report(args.n, args.d, args.h, args.seed,
                                   rank_rtol=args.rank_rtol)
    _emit(args, {"kind": "secant_report",
                 **jsonio.secant_report_to_obj(report), "stable": stable})
    return 0


def _cmd_secant_table(args) -> int:
    n_range, d_range, h_range = _parse_grid(args.grid)
    for n in n_range:
        for d in d_range:
            for h in h_range:
                report = terracini_dim(n, d, h, args.seed,
                                       rank_rtol=args.rank_rtol)
                _emit(args, {"kind": "secant_report",
                             **jsonio.secant_report_to_obj(report)})
    return 0


def _cmd_chain(args) -> int:
    obj = _read_obj(args)
    form = _extract_form(obj)
    dec_a = _extract_decomposition(obj, "a")
    dec_b = _extract_decomposition(obj, "b")
    cert = chain_connect(form, dec_a, dec_b, args.seed,
                         residual_tol=args.residual_tol,
                         distinct_tol=args.distinct_tol,
                         rank_rtol=args.rank_rtol)
    verified = check_chain(form, cert, residual_tol=args.residual_tol)
    _emit(args, {"kind": "chain", **jsonio.chain_to_obj(cert),
                 "verified": verified})
    return 0 if verified else 2


def _cmd_table(args) -> int:
    for row, (n, d, h) in enumerate(CLASSICAL_TABLE):
        dec = random_decomposition(n, d, h, args.seed + row)
        form = synthesize(dec, n)
        dim = tangent_dimension(form, dec, rank_rtol=args.rank_rtol,
                                residual_tol=args.residual_tol)
        expected = h * (n + 1) - num_monomials(n, d)
        _emit(args, {"kind": "classical_row", "n": n, "d": d, "h": h,
                     "vsp_dim": dim, "expected_dim": expected,
                     "match": dim == expected})
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "decompose": _cmd_decompose,
    "sample": _cmd_sample,
    "verify": _cmd_verify,
    "apolar": _cmd_apolar,
    "catalecticant": _cmd_catalecticant,
    "vsp-dim": _cmd_vsp_dim,
    "secant-dim": _cmd_secant_dim,
    "secant-table": _cmd_secant_table,
    "chain": _cmd_chain,
    "table": _cmd_table,
}


def run(argv=None) -> int:
    """Parse arguments, dispatch, and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None:
        args.seed = _default_seed()
    try:
        return _COMMANDS[args.command](args)
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON at line {exc.lineno} column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return 1
    except RejectedSampleError as exc:
        _emit(args, {"kind": "rejection", "error": str(exc)})
        return 2
    except (PreconditionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
