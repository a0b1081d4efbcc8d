"""JSON encodings of algebra configs, vectors, diagonal tensors, maps and reports.

Vectors are ``{"terms": [{"mono": [[gen, mode], ...], "coeff": "p/q"}]}``.
A term of a contragredient carries ``"dual": true`` and a term of a
semidirect product carries ``"part": "V"`` or ``"part": "M"``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from .errors import CarrierMismatch, VybeError
from .exact import (
    GradedSpace,
    GradedVector,
    Key,
    LevelwiseMatrix,
    PBWMonomial,
    Q,
    Rational,
    format_rational,
)
from .lie import LieTensor
from .modules import ContragredientModule, SemidirectVOA, contragredient, parse_module_descriptor, semidirect
from .report import CheckReport
from .voa import CurrentVOA, LieAlgebraData, Module, PBWSpace, VertexAlgebra, build_current_voa, heisenberg_lie
from .yang_baxter import DiagonalTensor

SCHEMA = "1"


class FormatError(VybeError):
    """A file does not follow the expected JSON layout."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}", str(path)) from None
    except OSError as exc:
        raise FormatError(exc.strerror or "cannot read file", str(path)) from None


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _rational(value: Any, where: str) -> Rational:
    try:
        return Q(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {value!r} ({exc})", where) from None


def _field(data: Mapping, name: str, where: str):
    if not isinstance(data, Mapping) or name not in data:
        raise FormatError(f"missing field {name!r}", where)
    return data[name]


# ---------------------------------------------------------------------------
# algebra configs


def algebra_from_config(data: Mapping, max_degree: Optional[int] = None, where: str = "config") -> CurrentVOA:
    """Build a truncated current algebra from a config mapping.

    ``{"algebra": "heisenberg", "rank": r}`` is shorthand for the abelian
    algebra with identity form.  ``max_degree`` overrides the file value.
    """
    kind = _field(data, "algebra", where)
    N = max_degree if max_degree is not None else data.get("max_degree", 4)
    if not isinstance(N, int) or N < 0:
        raise FormatError(f"max_degree must be a non-negative integer, got {N!r}", where)
    level = _rational(data.get("level", 1), where + ".level")
    if kind == "heisenberg":
        rank = data.get("rank", 1)
        if not isinstance(rank, int) or rank < 1:
            raise FormatError(f"rank must be a positive integer, got {rank!r}", where)
        return build_current_voa(heisenberg_lie(rank), level, N)
    if kind != "current":
        raise FormatError(f"unknown algebra kind {kind!r}", where)
    lie = _field(data, "lie", where)
    dim = _field(lie, "dim", where + ".lie")
    brackets = []
    for n, entry in enumerate(lie.get("brackets", [])):
        if not isinstance(entry, list) or len(entry) != 4:
            raise FormatError("bracket entry must be [i, j, k, c]", f"{where}.lie.brackets[{n}]")
        brackets.append(entry[:3] + [_rational(entry[3], f"{where}.lie.brackets[{n}]")])
    form = lie.get("form")
    if form is not None:
        form = [[_rational(x, where + ".lie.form") for x in row] for row in form]
    h_dual = lie.get("h_dual")
    lie_data = LieAlgebraData(
        dim, brackets, form, None if h_dual is None else _rational(h_dual, where + ".lie.h_dual"), lie.get("names")
    )
    return build_current_voa(lie_data, level, N)


def load_algebra(path: Union[str, Path], max_degree: Optional[int] = None) -> CurrentVOA:
    return algebra_from_config(read_json(path), max_degree, str(path))


# ---------------------------------------------------------------------------
# carriers


def resolve_space(V: VertexAlgebra, name: str, module: Optional[Module] = None) -> GradedSpace:
    """Map a carrier name to a space.

    ``V``/``U`` is the algebra, ``W`` the selected module, a trailing ``'``
    takes the contragredient and ``semidirect(X)`` is ``V`` extended by ``X``,
    itself a carrier name (``V'``, ``W'``) or a module descriptor.
    """
    text = name.strip()
    if text.endswith("'"):
        return contragredient(resolve_space(V, text[:-1], module))
    if text in ("V", "U"):
        return V
    if text == "W":
        if module is None:
            raise FormatError("carrier 'W' needs --module")
        return module
    if text.startswith("semidirect(") and text.endswith(")"):
        inner = text[len("semidirect("):-1]
        try:
            M = resolve_space(V, inner, module)
        except FormatError:
            try:
                M = parse_module_descriptor(V, inner)
            except ValueError as exc:
                raise FormatError(str(exc)) from None
        if M is V:
            raise FormatError("a semidirect carrier must extend V by a module other than V")
        return semidirect(V, M)
    raise FormatError(f"unknown carrier {name!r}")


# ---------------------------------------------------------------------------
# vectors


def encode_key(space: GradedSpace, key: Key) -> Dict[str, Any]:
    if isinstance(space, SemidirectVOA):
        part, inner = key
        sub = space.V if part == "V" else space.M
        return {"part": part, **encode_key(sub, inner)}
    if isinstance(space, ContragredientModule):
        inner = encode_key(space.source, key[1])
        if "dual" in inner:
            raise FormatError("nested contragredients have no file encoding")
        return {"dual": True, **inner}
    if isinstance(space, PBWSpace):
        return {"mono": [[g, m] for g, m in key]}
    raise FormatError(f"no key encoding for {space.tag}")


def decode_key(space: GradedSpace, term: Mapping, where: str) -> Key:
    if isinstance(space, SemidirectVOA):
        part = term.get("part")
        if part not in ("V", "M"):
            raise FormatError("semidirect term needs \"part\": \"V\" or \"M\"", where)
        sub = space.V if part == "V" else space.M
        rest = {k: v for k, v in term.items() if k != "part"}
        return (part, decode_key(sub, rest, where))
    if isinstance(space, ContragredientModule):
        if term.get("dual") is not True:
            raise FormatError("term of a contragredient needs \"dual\": true", where)
        rest = {k: v for k, v in term.items() if k != "dual"}
        return ("*", decode_key(space.source, rest, where))
    mono = _field(term, "mono", where)
    try:
        key = PBWMonomial(tuple((int(g), int(m)) for g, m in mono))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad monomial {mono!r} ({exc})", where) from None
    try:
        space.index(key)
    except (KeyError, ValueError, VybeError) as exc:
        raise FormatError(f"monomial {mono!r} is not a basis vector of {space.tag} ({exc})", where) from None
    return key


def encode_vector(v: GradedVector) -> Dict[str, Any]:
    return {
        "terms": [
            {**encode_key(v.space, k), "coeff": format_rational(c)} for k, c in v.sorted_terms()
        ]
    }


def decode_vector(space: GradedSpace, data: Mapping, where: str = "vector") -> GradedVector:
    terms: Dict[Key, Rational] = {}
    for n, term in enumerate(_field(data, "terms", where)):
        w = f"{where}.terms[{n}]"
        key = decode_key(space, {k: v for k, v in term.items() if k != "coeff"}, w)
        terms[key] = terms.get(key, Q(0)) + _rational(term.get("coeff", 1), w)
    return space.vector(terms)


# ---------------------------------------------------------------------------
# tensors and maps


def encode_tensor(r: DiagonalTensor, carrier: str) -> Dict[str, Any]:
    U = r.space
    levels = {}
    for t in r.support():
        levels[str(t)] = [
            {
                "left": encode_vector(U.basis_vector(p)),
                "right": encode_vector(U.basis_vector(q)),
                "coeff": format_rational(c),
            }
            for (p, q), c in r.sorted_entries(t)
        ]
    return {"kind": "diagonal_tensor", "carrier": carrier, "levels": levels}


def decode_tensor(V: VertexAlgebra, data: Mapping, module: Optional[Module] = None, where: str = "tensor"):
    """Returns ``(tensor, carrier_name)``."""
    if _field(data, "kind", where) != "diagonal_tensor":
        raise FormatError("expected kind \"diagonal_tensor\"", where)
    carrier = data.get("carrier", "U")
    U = resolve_space(V, carrier, module)
    if not isinstance(U, VertexAlgebra):
        raise CarrierMismatch("a vertex algebra", U.tag)
    pairs = []
    for lvl, entries in _field(data, "levels", where).items():
        for n, entry in enumerate(entries):
            w = f"{where}.levels[{lvl}][{n}]"
            left = decode_vector(U, _field(entry, "left", w), w + ".left")
            right = decode_vector(U, _field(entry, "right", w), w + ".right")
            coeff = _rational(entry.get("coeff", 1), w)
            for v in (left, right):
                if v and v.levels() != [int(lvl)]:
                    raise FormatError(f"vector is not at level {lvl}", w)
            pairs.append((left, right, coeff))
    return DiagonalTensor.from_pairs(U, pairs), carrier


def encode_map(T: LevelwiseMatrix, source: str, target: str) -> Dict[str, Any]:
    return {
        "kind": "lp_map",
        "source": source,
        "target": target,
        "degree_shift": T.shift,
        "levels": {
            str(n): [[format_rational(x) for x in row] for row in T.blocks[n]] for n in sorted(T.blocks)
        },
    }


def decode_map(V: VertexAlgebra, data: Mapping, module: Optional[Module] = None, where: str = "map"):
    """Returns ``(map, source_name, target_name)``."""
    if _field(data, "kind", where) != "lp_map":
        raise FormatError("expected kind \"lp_map\"", where)
    src_name = data.get("source", "W")
    tgt_name = data.get("target", "V")
    source = resolve_space(V, src_name, module)
    target = resolve_space(V, tgt_name, module)
    shift = data.get("degree_shift", 0)
    if not isinstance(shift, int):
        raise FormatError("degree_shift must be an integer", where)
    blocks = {}
    for lvl, rows in _field(data, "levels", where).items():
        w = f"{where}.levels[{lvl}]"
        try:
            n = int(lvl)
        except ValueError:
            raise FormatError(f"level key {lvl!r} is not an integer", where) from None
        blocks[n] = [[_rational(x, w) for x in row] for row in rows]
    try:
        T = LevelwiseMatrix(source, target, blocks, shift)
    except (ValueError, VybeError) as exc:
        raise FormatError(str(exc), where) from None
    return T, src_name, tgt_name


def encode_lie_tensor(R: LieTensor) -> Dict[str, Any]:
    U = R.lie.space
    idx = {k: i for i, k in enumerate(R.lie.basis)}
    entries = sorted(R.entries.items(), key=lambda kv: (idx[kv[0][0]], idx[kv[0][1]]))
    return {
        "kind": "diagonal_tensor",
        "carrier": R.lie.carrier,
        "levels": {
            "1": [
                {
                    "left": encode_vector(U.basis_vector(p)),
                    "right": encode_vector(U.basis_vector(q)),
                    "coeff": format_rational(c),
                }
                for (p, q), c in entries
            ]
        },
    }


def encode_lie_map(rows, source: str, target: str) -> Dict[str, Any]:
    return {
        "kind": "lp_map",
        "source": source,
        "target": target,
        "degree_shift": 0,
        "levels": {"1": [[format_rational(x) for x in row] for row in rows]},
    }


# ---------------------------------------------------------------------------
# reports


def _plain(x: Any) -> Any:
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Rational):
        return format_rational(x)
    return str(x)


def report_to_dict(report: CheckReport, command: str) -> Dict[str, Any]:
    return {
        "schema": SCHEMA,
        "command": command,
        "title": report.title,
        "passed": report.passed,
        "n_covered": report.n_covered,
        "coverage": {c: _plain(report.coverage[c]) for c in sorted(report.coverage)},
        "skipped": {c: _plain(report.skipped[c]) for c in sorted(report.skipped)},
        "failures": [
            {"component": f.component, "instance": _plain(f.instance), "witness": _plain(f.witness)}
            for f in report.failures
        ],
        "notes": list(report.notes),
        "info": _plain(report.info),
    }
