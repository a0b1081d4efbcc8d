"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse or precondition errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, List, Optional

from .errors import VybeError
from .exact import LevelwiseMatrix
from .io import (
    FormatError,
    decode_map,
    decode_tensor,
    dumps,
    encode_lie_map,
    encode_lie_tensor,
    encode_map,
    encode_tensor,
    load_algebra,
    read_json,
    report_to_dict,
)
from .lie import reduce_map, reduce_tensor, verify_reduction
from .modules import contragredient, parse_module_descriptor, semidirect
from .report import CheckReport
from .voa import Module, VertexAlgebra, verify_module_axioms, verify_voa_axioms
from .yang_baxter import (
    build_r_from_T,
    check_relative_rbo,
    check_strong_rbo,
    check_voybe,
    map_to_tensor,
    tensor_to_map,
)

DEFAULT_M = [-2, -1, 0, 1, 2, 3]

M_SET_NOTE = (
    "verdicts cover only the listed m values; a solution for every natural m "
    "and one for every integer m are different claims"
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _algebra(args) -> VertexAlgebra:
    if not args.algebra:
        raise UsageError("--algebra is required")
    return load_algebra(args.algebra, args.max_degree)


def _module(args, V: VertexAlgebra) -> Optional[Module]:
    if not args.module:
        return None
    try:
        return parse_module_descriptor(V, args.module)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _input(args, flag: str) -> str:
    path = getattr(args, flag) or getattr(args, "input", None)
    if not path:
        raise UsageError(f"--{flag} is required")
    return path


def _m_set(args) -> List[int]:
    ms = args.m if args.m else DEFAULT_M
    return sorted(set(ms))


def _emit_text(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, report: CheckReport, command: str) -> int:
    if args.format == "json":
        text = dumps(report_to_dict(report, command))
    else:
        text = report.summary() + "\n"
    _emit_text(args, text)
    return 0 if report.passed else 1


def _per_m(title: str, ms: List[int], fn: Callable[[int], CheckReport]) -> CheckReport:
    report = CheckReport(title)
    report.info["m_set"] = ms
    report.notes.append(M_SET_NOTE)
    for m in ms:
        sub = fn(m)
        report.merge(sub, f"m={m}:")
        report.info[f"m={m}"] = "pass" if sub.passed else ("fail" if sub.failures else "no coverage")
    return report


def _load_map(args, V: VertexAlgebra, W: Optional[Module]):
    path = _input(args, "map")
    return decode_map(V, read_json(path), W, path)


def _load_tensor(args, V: VertexAlgebra, W: Optional[Module]):
    path = _input(args, "tensor")
    return decode_tensor(V, read_json(path), W, path)


def _map_endpoints(T: LevelwiseMatrix):
    V, W = T.target, T.source
    if not isinstance(V, VertexAlgebra) or not isinstance(W, Module):
        raise UsageError("map target must be a vertex algebra and its source a module")
    return V, W


# ---------------------------------------------------------------------------
# commands


def cmd_check_voa(args) -> int:
    V = _algebra(args)
    W = _module(args, V)
    if W is None or W is V:
        report = verify_voa_axioms(V)
    else:
        report = verify_module_axioms(W)
    return _emit_report(args, report, "check-voa")


def cmd_check_voybe(args) -> int:
    V = _algebra(args)
    r, carrier = _load_tensor(args, V, _module(args, V))
    ms = _m_set(args)
    report = _per_m(f"VOYBE on {r.space.tag}", ms, lambda m: check_voybe(r.space, r, m))
    report.info["carrier"] = carrier
    return _emit_report(args, report, "check-voybe")


def cmd_check_rbo(args) -> int:
    V0 = _algebra(args)
    T, _, _ = _load_map(args, V0, _module(args, V0))
    V, W = _map_endpoints(T)
    ms = _m_set(args)
    report = _per_m(f"relative RBO {W.tag} -> {V.tag}", ms, lambda m: check_relative_rbo(V, W, T, m))
    return _emit_report(args, report, "check-rbo")


def cmd_check_strong_rbo(args) -> int:
    V0 = _algebra(args)
    T, _, _ = _load_map(args, V0, _module(args, V0))
    V, W = _map_endpoints(T)
    ms = _m_set(args)
    report = _per_m(f"strong relative RBO {W.tag} -> {V.tag}", ms, lambda m: check_strong_rbo(V, W, T, m))
    return _emit_report(args, report, "check-strong-rbo")


def _semidirect_for(V: VertexAlgebra, W: Module, source_name: str):
    U = semidirect(V, contragredient(W))
    return U, f"semidirect({source_name}')"


def cmd_build_r(args) -> int:
    V0 = _algebra(args)
    T, src, _ = _load_map(args, V0, _module(args, V0))
    V, W = _map_endpoints(T)
    U, carrier = _semidirect_for(V, W, src)
    r = build_r_from_T(T, U)
    _emit_text(args, dumps(encode_tensor(r, carrier)))
    return 0


def cmd_convert(args) -> int:
    V = _algebra(args)
    W = _module(args, V)
    if args.to == "map":
        r, carrier = _load_tensor(args, V, W)
        T = tensor_to_map(r.space, r)
        _emit_text(args, dumps(encode_map(T, f"{carrier}'", carrier)))
        return 0
    T, src, tgt = _load_map(args, V, W)
    if not isinstance(T.target, VertexAlgebra) or T.source.tag != contragredient(T.target).tag:
        raise UsageError("only maps U' -> U convert to tensors")
    r = map_to_tensor(T.target, T)
    _emit_text(args, dumps(encode_tensor(r, tgt)))
    return 0


def cmd_reduce_level1(args) -> int:
    V = _algebra(args)
    W = _module(args, V)
    if args.tensor or (args.input and not args.map):
        r, _ = _load_tensor(args, V, W)
        _emit_text(args, dumps(encode_lie_tensor(reduce_tensor(r))))
        return 0
    T, src, tgt = _load_map(args, V, W)
    _emit_text(args, dumps(encode_lie_map(reduce_map(T), f"lie:{src}", f"lie:{tgt}")))
    return 0


def cmd_verify_reduction(args) -> int:
    V = _algebra(args)
    W = _module(args, V)
    if args.m and set(args.m) != {0}:
        raise UsageError("verify-reduction only supports m = 0")
    r = T = None
    U: VertexAlgebra = V
    if args.tensor:
        r, _ = _load_tensor(args, V, W)
        U = r.space
    if args.map:
        T, src, _ = _load_map(args, V, W)
        Vt, Wt = _map_endpoints(T)
        U, _ = _semidirect_for(Vt, Wt, src)
        if r is not None:
            report = verify_reduction(r.space, r=r)
            report.merge(verify_reduction(U, T=T), "map:")
            return _emit_report(args, report, "verify-reduction")
    if r is None and T is None:
        raise UsageError("verify-reduction needs --tensor or --map")
    return _emit_report(args, verify_reduction(U, r=r, T=T), "verify-reduction")


COMMANDS = {
    "check-voa": (cmd_check_voa, "verify the VOA (or module) axioms on the window"),
    "check-voybe": (cmd_check_voybe, "check a skewsymmetric diagonal tensor against the m-VOYBE"),
    "check-rbo": (cmd_check_rbo, "check the relative Rota-Baxter identity for a map"),
    "check-strong-rbo": (cmd_check_strong_rbo, "check the strong relative Rota-Baxter identities"),
    "build-r": (cmd_build_r, "build the skewsymmetric tensor of a map in V x| W'"),
    "convert": (cmd_convert, "convert between skewsymmetric tensors and maps U' -> U"),
    "reduce-level1": (cmd_reduce_level1, "extract the level-one Lie tensor or matrix"),
    "verify-reduction": (cmd_verify_reduction, "check the level-one reduction implications"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vybe", description="Exact checks for vertex operator Yang-Baxter data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", nargs="?", help="input file (alternative to --tensor/--map)")
        p.add_argument("--algebra", help="algebra config JSON")
        p.add_argument("--module", help='module descriptor: "adjoint", "coadjoint" or "fock:<lambda>"')
        p.add_argument("--map", help="map JSON (kind lp_map)")
        p.add_argument("--tensor", help="tensor JSON (kind diagonal_tensor)")
        p.add_argument("--m", type=int, action="append", help="value of m (repeatable; default -2..3)")
        p.add_argument("--max-degree", type=int, help="truncation degree N (overrides the config)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write output here instead of stdout")
        if name == "convert":
            p.add_argument("--to", choices=("map", "tensor"), required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_degree is not None and args.max_degree < 0:
        parser.error("--max-degree must be non-negative")
    fn = COMMANDS[args.command][0]
    try:
        return fn(args)
    except (UsageError, FormatError) as exc:
        print(f"vybe {args.command}: {exc}", file=sys.stderr)
        return 2
    except (VybeError, ValueError) as exc:
        print(f"vybe {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
