"""Command-line surface: every analysis as a subcommand.

Exit codes: 0 when the checked property holds (or the command is purely
diagnostic), 1 when a checked property fails (witness found, certificate
rejected, map not CP), 2 on usage, IO or parse errors. `--json` prints the
full report as canonical JSON (sorted keys); given the same flags and
seeds the output is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import FiniteCStar
from .certificates import (
    load_certificate,
    load_map,
    orderzero_certificate,
    save_certificate,
    save_map,
    verify_certificate,
)
from .errors import PosmapError
from .family import verify_corner_family
from .orderzero import cp_repair, order_zero_defect, oz_decompose
from .positivity import (
    DEFAULT_RESTARTS,
    DEFAULT_TOL,
    VIOLATED,
    Witness,
    is_cp,
    k_positivity_falsify,
    tomiyama_map,
    tomiyama_threshold,
)


def _witness_dict(w: Witness) -> dict:
    enc = lambda v: [[float(z.real), float(z.imag)] for z in v]
    return {
        "k": w.k,
        "block": w.block,
        "value": w.value,
        "vector_norm": w.vector_norm,
        "factors_left": [enc(a) for a in w.factors_left],
        "factors_right": [enc(b) for b in w.factors_right],
    }


def _verdict_dict(v) -> dict:
    return {
        "status": v.status,
        "best_value": v.best_value,
        "restarts_used": v.restarts_used,
        "witness": _witness_dict(v.witness) if v.witness else None,
    }


def _two_pos_dict(check) -> dict:
    return {
        "status": check.status,
        "verdict": _verdict_dict(check.verdict) if check.verdict else None,
    }


def _print_report(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True, indent=2, allow_nan=False))
        return

    def walk(obj, indent=0):
        pad = "  " * indent
        if isinstance(obj, dict):
            for key, val in obj.items():
                if isinstance(val, (dict, list)) and val:
                    print(f"{pad}{key}:")
                    walk(val, indent + 1)
                else:
                    print(f"{pad}{key}: {val}")
        elif isinstance(obj, list):
            for i, val in enumerate(obj):
                if isinstance(val, (dict, list)) and val:
                    print(f"{pad}[{i}]")
                    walk(val, indent + 1)
                else:
                    print(f"{pad}[{i}] {val}")

    walk(payload)


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise PosmapError(f"{flag}: expected comma-separated integers, got {text!r}")


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise PosmapError(f"{flag}: expected comma-separated numbers, got {text!r}")


# -- subcommand handlers (return (exit_code, payload)) --------------------------


def _cmd_check_cp(args) -> tuple[int, dict]:
    phi = load_map(args.mapfile)
    verdict = is_cp(phi, args.tol)
    payload = {
        "command": "check-cp",
        "mapfile": args.mapfile,
        "tol": args.tol,
        "completely_positive": verdict,
    }
    return (0 if verdict else 1), payload


def _cmd_check_kpos(args) -> tuple[int, dict]:
    phi = load_map(args.mapfile)
    v = k_positivity_falsify(
        phi, args.k, restarts=args.restarts, seed=args.seed, tol=args.tol
    )
    payload = {
        "command": "check-kpos",
        "mapfile": args.mapfile,
        "k": args.k,
        "restarts": args.restarts,
        "seed": args.seed,
        "tol": args.tol,
        "verdict": _verdict_dict(v),
    }
    return (1 if v.status == VIOLATED else 0), payload


def _cmd_tomiyama(args) -> tuple[int, dict]:
    threshold = tomiyama_threshold(args.n, args.k)
    payload = {
        "command": "tomiyama",
        "n": args.n,
        "k": args.k,
        "threshold": threshold,
    }
    code = 0
    if args.lam is not None:
        phi = tomiyama_map(args.n, args.lam)
        k_positive = args.lam <= threshold
        v = k_positivity_falsify(
            phi, args.k, restarts=args.restarts, seed=args.seed, tol=args.tol
        )
        payload.update(
            {
                "lambda": args.lam,
                "k_positive_closed_form": k_positive,
                "falsifier": _verdict_dict(v),
            }
        )
        code = 0 if k_positive else 1
        if args.out:
            save_map(phi, args.out)
            payload["written"] = args.out
    return code, payload


def _cmd_defect(args) -> tuple[int, dict]:
    phi = load_map(args.mapfile)
    rep = order_zero_defect(phi, samples=args.samples, seed=args.seed)
    payload = {
        "command": "defect",
        "mapfile": args.mapfile,
        "one_var_sup": rep.one_var_sup,
        "orth_pair_sup": rep.orth_pair_sup,
        "od_sup": rep.od_sup,
        "samples": rep.samples,
        "seed": rep.seed,
    }
    return 0, payload


def _cmd_decompose(args) -> tuple[int, dict]:
    phi = load_map(args.mapfile)
    dec = oz_decompose(phi)
    payload = {
        "command": "decompose",
        "mapfile": args.mapfile,
        "h_norm": dec.h.norm(),
        "mult_defect": dec.mult_defect,
        "commute_defect": dec.commute_defect,
        "reconstruct_defect": dec.reconstruct_defect,
        "within_tol": max(dec.mult_defect, dec.commute_defect, dec.reconstruct_defect)
        <= args.tol,
        "tol": args.tol,
    }
    return 0, payload


def _cmd_repair(args) -> tuple[int, dict]:
    phi = load_map(args.mapfile)
    repaired, eps = cp_repair(phi)
    cp_after = is_cp(repaired, args.tol)
    payload = {
        "command": "repair",
        "mapfile": args.mapfile,
        "eps_meas": eps,
        "repaired_is_cp": cp_after,
    }
    if args.out:
        save_map(repaired, args.out)
        payload["written"] = args.out
    return (0 if cp_after else 1), payload


def _cmd_example4(args) -> tuple[int, dict]:
    rep = verify_corner_family(
        args.n,
        args.m,
        args.k,
        args.lam,
        args.eps,
        seed=args.seed,
        samples=args.samples,
        restarts=args.restarts,
    )
    payload = {
        "command": "example4",
        "n": rep.n,
        "m": rep.m,
        "k": rep.k,
        "lambda": rep.lam,
        "eps": rep.eps,
        "seed": rep.seed,
        "samples": rep.samples,
        "defect_max": rep.defect_max,
        "defect_bound": rep.defect_bound,
        "defect_ok": rep.defect_ok,
        "closed_form_dev": rep.closed_form_dev,
        "closed_form_ok": rep.closed_form_ok,
        "mixing_parameter": rep.mixing_parameter,
        "next_threshold": rep.next_threshold,
        "exceeds_next_threshold": rep.exceeds_next_threshold,
        "falsifier": _verdict_dict(rep.falsifier) if rep.falsifier else None,
        "all_ok": rep.all_ok,
    }
    return (0 if rep.all_ok else 1), payload


def _cmd_verify_cert(args) -> tuple[int, dict]:
    cert = load_certificate(args.certfile)
    rep = verify_certificate(
        cert, tol=args.tol, seed=args.seed, restarts=args.restarts
    )
    payload = {
        "command": "verify-cert",
        "certfile": args.certfile,
        "tol": args.tol,
        "seed": args.seed,
        "restarts": args.restarts,
        "psi_norm": rep.psi_norm,
        "psi_contraction_ok": rep.psi_contraction_ok,
        "psi_two_positive": _two_pos_dict(rep.psi_two_positive),
        "legs": [
            {
                "contraction_norm": leg.contraction_norm,
                "contraction_ok": leg.contraction_ok,
                "two_positive": _two_pos_dict(leg.two_positive),
                "mult_defect": leg.mult_defect,
                "commute_defect": leg.commute_defect,
                "reconstruct_defect": leg.reconstruct_defect,
                "one_var_sup": leg.sampled.one_var_sup,
                "orth_pair_sup": leg.sampled.orth_pair_sup,
                "od_sup": leg.sampled.od_sup,
                "order_zero_ok": leg.order_zero_ok,
            }
            for leg in rep.legs
        ],
        "sum_norm": rep.sum_norm,
        "sum_contractive_ok": rep.sum_contractive_ok,
        "approx_errors": list(rep.approx_errors),
        "approx_failures": list(rep.approx_failures),
        "epsilon": rep.epsilon,
        "caveat": rep.caveat,
        "overall": rep.overall,
    }
    return (0 if rep.overall else 1), payload


def _cmd_gen_cert(args) -> tuple[int, dict]:
    blocks = _parse_int_list(args.algebra, "--algebra")
    weights = _parse_float_list(args.weights, "--weights")
    cert = orderzero_certificate(
        FiniteCStar(tuple(blocks)), weights, seed=args.seed, epsilon=args.epsilon
    )
    save_certificate(cert, args.out)
    payload = {
        "command": "gen-cert",
        "algebra": blocks,
        "weights": weights,
        "seed": args.seed,
        "epsilon": args.epsilon,
        "written": args.out,
    }
    return 0, payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posmap",
        description="Positivity, order-zero and certificate analyses for maps "
        "between finite-dimensional C*-algebras.",
    )
    parser.add_argument("--version", action="version", version=f"posmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, restarts=False, samples=False):
        p.add_argument("--json", action="store_true", help="print the report as JSON")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--seed", type=int, default=0)
        if restarts:
            p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
        if samples:
            p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("check-cp", help="complete positivity via the Choi criterion")
    p.add_argument("mapfile")
    common(p)
    p.set_defaults(handler=_cmd_check_cp)

    p = sub.add_parser("check-kpos", help="falsify k-positivity of a map file")
    p.add_argument("mapfile")
    p.add_argument("--k", type=int, required=True)
    common(p, restarts=True)
    p.set_defaults(handler=_cmd_check_kpos)

    p = sub.add_parser(
        "tomiyama", help="k-positivity threshold of the trace-mixing family"
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("-o", "--out", default=None, help="write the map file (needs --lambda)")
    common(p, restarts=True)
    p.set_defaults(handler=_cmd_tomiyama)

    p = sub.add_parser("defect", help="sampled order-zero defects of a map file")
    p.add_argument("mapfile")
    common(p, samples=True)
    p.set_defaults(handler=_cmd_defect)

    p = sub.add_parser("decompose", help="h*pi structure decomposition of a map file")
    p.add_argument("mapfile")
    common(p)
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("repair", help="measure the column defect and repair to CP")
    p.add_argument("mapfile")
    p.add_argument("-o", "--out", default=None, help="write the repaired map file")
    common(p)
    p.set_defaults(handler=_cmd_repair)

    p = sub.add_parser(
        "example4", help="verify one member of the corner-mixture family"
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    common(p, restarts=True, samples=True)
    p.set_defaults(handler=_cmd_example4)

    p = sub.add_parser("verify-cert", help="verify a certificate file")
    p.add_argument("certfile")
    common(p, restarts=True)
    p.set_defaults(handler=_cmd_verify_cert)

    p = sub.add_parser("gen-cert", help="generate a partition-of-unity certificate")
    p.add_argument("--algebra", required=True, help="block sizes, e.g. 2,3")
    p.add_argument("--weights", required=True, help="positive weights summing to 1")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--epsilon", type=float, default=1e-6)
    common(p)
    p.set_defaults(handler=_cmd_gen_cert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        code, payload = args.handler(args)
    except (PosmapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_report(payload, args.json)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
