"""Diagonal two-tensors, the vertex operator Yang-Baxter residual and Rota-Baxter checks.

A diagonal tensor ``r = sum_t r^t`` over a vertex algebra ``U`` is stored as
one coefficient matrix per level: ``r^t = sum R^t[p, q] e_p (x) e_q`` with
``e_p`` running over the basis of ``U(t)``.  The residual of the m-VOYBE at
``(s, t)`` lives in ``U(s+t-m-1) (x) U(s) (x) U(t)`` and is assembled from
three factorwise products:

    A = r^s_12 ._m r^t_13
    B = r^t_23 .'_m r^u_12
    C = r^u_13 .'op_m r^s_23          (u = s + t - m - 1)

    alpha_{s,t} = A - B + C

The operator side uses maps ``U' -> U`` (``Phi``/``Psi``) and Rota-Baxter
identities checked on basis pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ._parallel import pmap
from .errors import (
    CarrierMismatch,
    ConstructionError,
    NotSkewsymmetric,
    OutOfWindow,
)
from .exact import (
    ONE,
    ZERO,
    GradedSpace,
    GradedVector,
    Key,
    LevelwiseMatrix,
    Q,
    Rational,
    Terms,
    add_into,
    matrix_rank,
    scale_terms,
)
from .modules import (
    ContragredientModule,
    SemidirectVOA,
    contragredient,
    intertwiner_flip_terms,
    intertwiner_terms,
)
from .report import CheckReport
from .voa import Module, VertexAlgebra, primed_op_terms, primed_terms

LevelPreservingMap = LevelwiseMatrix

Pair = Tuple[Key, Key]


# ---------------------------------------------------------------------------
# diagonal tensors


class DiagonalTensor:
    """Element of the diagonal part of the completed tensor square of ``space``."""

    def __init__(self, space: GradedSpace, levels: Optional[Mapping[int, Mapping[Pair, object]]] = None):
        self.space = space
        self.levels: Dict[int, Dict[Pair, Rational]] = {}
        for t, entries in (levels or {}).items():
            t = int(t)
            clean: Dict[Pair, Rational] = {}
            for (p, q), c in entries.items():
                if space.level_of(p) != t or space.level_of(q) != t:
                    raise ValueError(f"pair ({p!r}, {q!r}) is not homogeneous of level {t}")
                space.index(p)
                space.index(q)
                c = Q(c)
                if c:
                    clean[(p, q)] = clean.get((p, q), ZERO) + c
            clean = {k: v for k, v in clean.items() if v}
            if clean:
                self.levels[t] = clean

    @classmethod
    def from_pairs(cls, space: GradedSpace, pairs: Iterable[Tuple[GradedVector, GradedVector, object]]):
        """Sum of ``coeff * left (x) right``; both factors must share one level."""
        levels: Dict[int, Dict[Pair, Rational]] = {}
        for left, right, coeff in pairs:
            for v in (left, right):
                if v.space.tag != space.tag:
                    raise CarrierMismatch(space.tag, v.space.tag)
            if not left or not right:
                continue
            ll, rl = left.levels(), right.levels()
            if len(ll) != 1 or ll != rl:
                raise ValueError(f"pair is not diagonal: levels {ll} and {rl}")
            slot = levels.setdefault(ll[0], {})
            c = Q(coeff)
            for p, a in left.terms.items():
                for q, b in right.terms.items():
                    add_into(slot, {(p, q): a * b}, c)
        return cls(space, levels)

    @classmethod
    def from_matrices(cls, space: GradedSpace, mats: Mapping[int, Sequence[Sequence[object]]]):
        levels = {}
        for t, rows in mats.items():
            basis = space.basis(int(t))
            if len(rows) != len(basis) or any(len(r) != len(basis) for r in rows):
                raise ValueError(f"level {t} matrix must be {len(basis)}x{len(basis)}")
            levels[int(t)] = {
                (basis[i], basis[j]): rows[i][j]
                for i in range(len(basis))
                for j in range(len(basis))
                if Q(rows[i][j])
            }
        return cls(space, levels)

    def matrix(self, t: int) -> List[List[Rational]]:
        basis = self.space.basis(t)
        out = [[ZERO] * len(basis) for _ in basis]
        for (p, q), c in self.levels.get(t, {}).items():
            out[self.space.index(p)][self.space.index(q)] = c
        return out

    def sigma(self) -> "DiagonalTensor":
        return DiagonalTensor(
            self.space, {t: {(q, p): c for (p, q), c in e.items()} for t, e in self.levels.items()}
        )

    def _combine(self, other: "DiagonalTensor", scale) -> "DiagonalTensor":
        if other.space.tag != self.space.tag:
            raise CarrierMismatch(self.space.tag, other.space.tag)
        out = {t: dict(e) for t, e in self.levels.items()}
        for t, e in other.levels.items():
            add_into(out.setdefault(t, {}), e, scale)
        return DiagonalTensor(self.space, out)

    def __add__(self, other):
        return self._combine(other, ONE)

    def __sub__(self, other):
        return self._combine(other, -ONE)

    def __mul__(self, scalar) -> "DiagonalTensor":
        s = Q(scalar)
        return DiagonalTensor(self.space, {t: scale_terms(e, s) for t, e in self.levels.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagonalTensor):
            return NotImplemented
        return self.space.tag == other.space.tag and self.levels == other.levels

    def is_zero(self) -> bool:
        return not self.levels

    def is_skewsymmetric(self) -> bool:
        return self.sigma() == -self

    def restrict(self, levels: Iterable[int]) -> "DiagonalTensor":
        keep = set(levels)
        return DiagonalTensor(self.space, {t: e for t, e in self.levels.items() if t in keep})

    def support(self) -> List[int]:
        return sorted(self.levels)

    def sorted_entries(self, t: int) -> List[Tuple[Pair, Rational]]:
        idx = self.space.index
        return sorted(self.levels.get(t, {}).items(), key=lambda kv: (idx(kv[0][0]), idx(kv[0][1])))

    def __repr__(self) -> str:
        n = sum(len(e) for e in self.levels.values())
        return f"<DiagonalTensor on {self.space.tag}: {n} entries at levels {self.support()}>"


def skewsymmetrize(gamma: DiagonalTensor) -> DiagonalTensor:
    """``gamma - sigma(gamma)``."""
    return gamma - gamma.sigma()


# ---------------------------------------------------------------------------
# triple tensors


@dataclass
class TripleTensorComponent:
    """Sparse element of ``U(p1) (x) U(p2) (x) U(p3)`` keyed by basis-key triples."""

    space: GradedSpace
    levels: Tuple[int, int, int]
    entries: Dict[Tuple[Key, Key, Key], Rational] = field(default_factory=dict)

    def add(self, k1: Key, k2: Key, k3: Key, c) -> None:
        if not c:
            return
        key = (k1, k2, k3)
        v = self.entries.get(key, ZERO) + c
        if v:
            self.entries[key] = v
        else:
            self.entries.pop(key, None)

    def add_outer(self, t1: Mapping[Key, Rational], t2: Mapping[Key, Rational], t3: Mapping[Key, Rational], c) -> None:
        if not c:
            return
        for k1, c1 in t1.items():
            for k2, c2 in t2.items():
                c12 = c * c1 * c2
                for k3, c3 in t3.items():
                    self.add(k1, k2, k3, c12 * c3)

    def combine(self, other: "TripleTensorComponent", scale=ONE) -> "TripleTensorComponent":
        out = TripleTensorComponent(self.space, self.levels, dict(self.entries))
        for (a, b, c), v in other.entries.items():
            out.add(a, b, c, scale * v)
        return out

    def __add__(self, other):
        return self.combine(other, ONE)

    def __sub__(self, other):
        return self.combine(other, -ONE)

    def scaled(self, s) -> "TripleTensorComponent":
        s = Q(s)
        return TripleTensorComponent(self.space, self.levels, {k: v * s for k, v in self.entries.items() if s})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, TripleTensorComponent):
            return NotImplemented
        return self.levels == other.levels and self.entries == other.entries

    def contract23(self, g: Key, f: Key) -> Terms:
        """Pair slot 2 with the dual basis vector of ``g`` and slot 3 with that of ``f``."""
        out: Terms = {}
        for (k1, k2, k3), c in self.entries.items():
            if k2 == g and k3 == f:
                add_into(out, {k1: c})
        return out

    def sorted_entries(self):
        idx = self.space.index
        return sorted(self.entries.items(), key=lambda kv: tuple(idx(k) for k in kv[0]))

    def first_entry(self):
        items = self.sorted_entries()
        return items[0] if items else None


# ---------------------------------------------------------------------------
# cached m-dot products on basis keys


def _primed(U: VertexAlgebra, a: Key, m: int, b: Key) -> Terms:
    cache = U.__dict__.setdefault("_primed_cache", {})
    key = (a, m, b)
    got = cache.get(key)
    if got is None:
        got = primed_terms(U, {a: ONE}, m, {b: ONE})
        cache[key] = got
    return got


def _primed_op(U: VertexAlgebra, a: Key, m: int, b: Key) -> Terms:
    cache = U.__dict__.setdefault("_primed_op_cache", {})
    key = (a, m, b)
    got = cache.get(key)
    if got is None:
        got = primed_op_terms(U, {a: ONE}, m, {b: ONE})
        cache[key] = got
    return got


def _level_window(U: GradedSpace, *levels: int) -> bool:
    return all(0 <= n <= U.max_degree for n in levels)


def triple_products(
    U: VertexAlgebra, r: DiagonalTensor, m: int, s: int, t: int
) -> Tuple[TripleTensorComponent, TripleTensorComponent, TripleTensorComponent]:
    """The three products at ``(s, t)``, each in ``U(u) (x) U(s) (x) U(t)``.

    Returns ``(A, B, C)`` with ``alpha_{s,t} = A - B + C``.

    Raises
    ------
    OutOfWindow
        If ``u = s + t - m - 1`` or ``s``, ``t`` leave the window.
    """
    if r.space.tag != U.tag:
        raise CarrierMismatch(U.tag, r.space.tag)
    u = s + t - m - 1
    for lv in (s, t, u):
        if lv > U.max_degree:
            raise OutOfWindow(lv, U.max_degree, U.tag)
    levels = (u, s, t)
    A = TripleTensorComponent(U, levels)
    B = TripleTensorComponent(U, levels)
    C = TripleTensorComponent(U, levels)
    if u < 0:
        return A, B, C
    Rs = r.levels.get(s, {})
    Rt = r.levels.get(t, {})
    Ru = r.levels.get(u, {})
    # A = sum R^s[p,q] R^t[p',q'] (e_p ._m e_p') (x) e_q (x) e_q'
    for (p, q), c1 in Rs.items():
        for (p2, q2), c2 in Rt.items():
            prod = U.mode_basis(p2, m, p)
            for k, c in prod.items():
                A.add(k, q, q2, c1 * c2 * c)
    # B = sum R^t[p,q] R^u[p',q'] e_p' (x) (e_p .'_m e_q') (x) e_q
    for (p, q), c1 in Rt.items():
        for (p2, q2), c2 in Ru.items():
            prod = _primed(U, p, m, q2)
            for k, c in prod.items():
                B.add(p2, k, q, c1 * c2 * c)
    # C = sum R^u[p,q] R^s[p',q'] e_p (x) e_p' (x) (e_q .'op_m e_q')
    for (p, q), c1 in Ru.items():
        for (p2, q2), c2 in Rs.items():
            prod = _primed_op(U, q2, m, q)
            for k, c in prod.items():
                C.add(p, p2, k, c1 * c2 * c)
    return A, B, C


def voybe_coverage(U: GradedSpace, m: int, N: Optional[int] = None) -> List[Tuple[int, int]]:
    """Pairs ``(s, t)`` with ``s, t, s+t-m-1`` all in ``0..N``."""
    N = U.max_degree if N is None else min(N, U.max_degree)
    return [(s, t) for s in range(N + 1) for t in range(N + 1) if 0 <= s + t - m - 1 <= N]


def voybe_residual(
    U: VertexAlgebra, r: DiagonalTensor, m: int, N: Optional[int] = None
) -> Dict[Tuple[int, int], TripleTensorComponent]:
    """``alpha_{s,t}`` for every covered pair ``(s, t)``."""
    cov = voybe_coverage(U, m, N)

    def one(st):
        A, B, C = triple_products(U, r, m, *st)
        return A - B + C

    return dict(zip(cov, pmap(one, cov)))


def _require_skew(r: DiagonalTensor) -> None:
    if not r.is_skewsymmetric():
        raise NotSkewsymmetric("tensor is not skewsymmetric: sigma(r) != -r")


def _describe_triple(U: GradedSpace, entry) -> Dict[str, str]:
    (k1, k2, k3), c = entry
    d = U.describe_key
    return {"slots": f"{d(k1)} (x) {d(k2)} (x) {d(k3)}", "coeff": str(c)}


def check_voybe(
    U: VertexAlgebra, r: DiagonalTensor, m: int, N: Optional[int] = None
) -> CheckReport:
    """Pass iff every covered residual component vanishes.

    Raises
    ------
    NotSkewsymmetric
        If ``r`` is not skewsymmetric.
    """
    _require_skew(r)
    report = CheckReport(f"{m}-VOYBE on {U.tag}")
    report.info["m"] = m
    for (s, t), alpha in voybe_residual(U, r, m, N).items():
        witness = {}
        if not alpha.is_zero():
            witness = _describe_triple(U, alpha.first_entry())
        report.record("residual", (s, t, m), alpha.is_zero(), **witness)
    if not report.coverage:
        report.notes.append("no (s, t) pair fits the window for this m")
    return report


# ---------------------------------------------------------------------------
# tensor <-> operator


def _dual(U: VertexAlgebra) -> ContragredientModule:
    return contragredient(U)


def is_skewsymmetric_map(T: LevelwiseMatrix) -> bool:
    """``<T f, g> = -<f, T g>`` for a level-preserving ``U' -> U``."""
    if T.shift != 0:
        return False
    for n in T.source.levels():
        M = T.block(n)
        for i in range(len(M)):
            for j in range(len(M)):
                if M[i][j] != -M[j][i]:
                    return False
    return True


def tensor_to_map(U: VertexAlgebra, r: DiagonalTensor) -> LevelwiseMatrix:
    """``T_r(f) = (id (x) f)(r)`` as a level-preserving map ``U' -> U``."""
    _require_skew(r)
    if r.space.tag != U.tag:
        raise CarrierMismatch(U.tag, r.space.tag)
    return LevelwiseMatrix(_dual(U), U, {t: r.matrix(t) for t in r.support()}, 0)


def map_to_tensor(U: VertexAlgebra, T: LevelwiseMatrix) -> DiagonalTensor:
    """Inverse of :func:`tensor_to_map`: ``R^t = (M - M^T) / 2``."""
    if T.source.tag != _dual(U).tag or T.target.tag != U.tag:
        raise CarrierMismatch(f"{_dual(U).tag} -> {U.tag}", f"{T.source.tag} -> {T.target.tag}")
    if not is_skewsymmetric_map(T):
        raise NotSkewsymmetric("map is not skewsymmetric")
    half = Q("1/2")
    mats = {}
    for n, M in T.blocks.items():
        k = len(M)
        mats[n] = [[half * (M[i][j] - M[j][i]) for j in range(k)] for i in range(k)]
    return DiagonalTensor.from_matrices(U, mats)


# ---------------------------------------------------------------------------
# relative Rota-Baxter operators


def _map_terms(T: LevelwiseMatrix, terms: Terms) -> Terms:
    return T.apply_terms(terms)


def rbo_residual_terms(V: VertexAlgebra, W: Module, T: LevelwiseMatrix, m: int, u: Key, v: Key) -> Terms:
    """``T(u)_m T(v) - T(T(u)_m v) - T(u(m) T(v))`` for basis keys of ``W``."""
    Tu = T.image_of_key(u)
    Tv = T.image_of_key(v)
    out = V.mode_terms(Tu, m, Tv) if Tu and Tv else {}
    if Tu:
        add_into(out, _map_terms(T, W.mode_terms(Tu, m, {v: ONE})), -ONE)
    if Tv:
        add_into(out, _map_terms(T, W.skew_terms({u: ONE}, m, Tv)), -ONE)
    return out


def _check_map(V: VertexAlgebra, W: Module, T: LevelwiseMatrix) -> None:
    if T.source.tag != W.tag:
        raise CarrierMismatch(W.tag, T.source.tag)
    if T.target.tag != V.tag:
        raise CarrierMismatch(V.tag, T.target.tag)
    if W.voa.tag != V.tag:
        raise CarrierMismatch(V.tag, W.voa.tag)


def check_relative_rbo(
    V: VertexAlgebra, W: Module, T: LevelwiseMatrix, m: int, N: Optional[int] = None
) -> CheckReport:
    """``T(u)_m T(v) = T(T(u)_m v) + T(u(m) T(v))`` on all basis pairs of ``W``.

    An instance ``(u, v)`` is covered when the identity's level is in the
    window of ``V``; instances whose intermediate terms leave a window are
    listed as skipped.
    """
    _check_map(V, W, T)
    NW = W.max_degree if N is None else min(N, W.max_degree)
    d = T.shift
    report = CheckReport(f"{m}-relative RBO {W.tag} -> {V.tag}")
    report.info.update({"m": m, "degree_shift": d})
    pairs = [
        (s, u, t, v)
        for s in range(NW + 1)
        for t in range(NW + 1)
        if 0 <= s + t + 2 * d - m - 1
        for u in W.basis(s)
        for v in W.basis(t)
    ]

    def one(item):
        s, u, t, v = item
        final = s + t + 2 * d - m - 1
        if final > V.max_degree:
            return None
        try:
            return rbo_residual_terms(V, W, T, m, u, v)
        except OutOfWindow:
            return None

    for (s, u, t, v), res in zip(pairs, pmap(one, pairs)):
        inst = (s, W.index(u), t, W.index(v), m)
        if res is None:
            report.skip("rbo", inst)
            continue
        witness = {}
        if res:
            Tu, Tv = T.image_of_key(u), T.image_of_key(v)
            lhs = V.mode_terms(Tu, m, Tv) if Tu and Tv else {}
            rhs = dict(lhs)
            add_into(rhs, res, -ONE)
            witness = {
                "u": W.describe_key(u),
                "v": W.describe_key(v),
                "lhs": repr(V.vec(lhs)),
                "rhs": repr(V.vec(rhs)),
            }
        report.record("rbo", inst, not res, **witness)
    return report


def coadjoint_map(V: VertexAlgebra, W: Module, T: LevelwiseMatrix) -> LevelwiseMatrix:
    """``T*: V' -> W'`` with ``<T* f, u> = <f, T u>``."""
    Vd, Wd = contragredient(V), contragredient(W)
    blocks = {}
    for n, M in T.blocks.items():
        blocks[n + T.shift] = [list(col) for col in zip(*M)]
    return LevelwiseMatrix(Vd, Wd, blocks, -T.shift)


def coadjoint_mode_residual(
    V: VertexAlgebra, W: Module, T: LevelwiseMatrix, Ts: LevelwiseMatrix, m: int, u: Key, f: Key
) -> Terms:
    """``T(u)_m T*f - T*(T(u)_m f) + T*(u[m] T*f)`` in ``W'``."""
    Vd, Wd = contragredient(V), contragredient(W)
    Tu = T.image_of_key(u)
    Tsf = Ts.image_of_key(f)
    out: Terms = Wd.mode_terms(Tu, m, Tsf) if Tu and Tsf else {}
    if Tu:
        add_into(out, Ts.apply_terms(Vd.mode_terms(Tu, m, {f: ONE})), -ONE)
    if Tsf:
        add_into(out, Ts.apply_terms(intertwiner_terms(W, {u: ONE}, m, Tsf)), ONE)
    return out


def coadjoint_skew_residual(
    V: VertexAlgebra, W: Module, T: LevelwiseMatrix, Ts: LevelwiseMatrix, m: int, u: Key, f: Key
) -> Terms:
    """``(T*f)(m) T(u) - T*(f(m) T(u)) + T*((T*f){m} u)`` in ``W'``."""
    Vd, Wd = contragredient(V), contragredient(W)
    Tu = T.image_of_key(u)
    Tsf = Ts.image_of_key(f)
    out: Terms = Wd.skew_terms(Tsf, m, Tu) if Tu and Tsf else {}
    if Tu:
        add_into(out, Ts.apply_terms(Vd.skew_terms({f: ONE}, m, Tu)), -ONE)
    if Tsf:
        add_into(out, Ts.apply_terms(intertwiner_flip_terms(W, Tsf, m, {u: ONE})), ONE)
    return out


def check_strong_rbo(
    V: VertexAlgebra, W: Module, T: LevelwiseMatrix, m: int, N: Optional[int] = None
) -> CheckReport:
    """Relative RBO identity plus the two compatibilities with the coadjoint map.

    Components: ``rbo``, ``coadjoint_mode`` and ``coadjoint_skew``; the
    last two range over basis ``u`` of ``W`` and ``f`` of ``V'``.
    """
    _check_map(V, W, T)
    if W.conformal_weight != 0:
        raise ConstructionError("strong relative RBOs need a module of conformal weight 0")
    if T.shift != 0:
        raise ConstructionError("strong relative RBOs must be level preserving")
    report = CheckReport(f"{m}-strong relative RBO {W.tag} -> {V.tag}")
    report.info["m"] = m
    report.merge(check_relative_rbo(V, W, T, m, N))
    Ts = coadjoint_map(V, W, T)
    Vd = contragredient(V)
    NW = W.max_degree if N is None else min(N, W.max_degree)
    items = [
        (p, u, q, f)
        for p in range(NW + 1)
        for q in range(min(NW, V.max_degree) + 1)
        if 0 <= p + q - m - 1 <= NW
        for u in W.basis(p)
        for f in Vd.basis(q)
    ]

    def one(item):
        p, u, q, f = item
        out = []
        for name, fn in (("coadjoint_mode", coadjoint_mode_residual), ("coadjoint_skew", coadjoint_skew_residual)):
            try:
                out.append((name, fn(V, W, T, Ts, m, u, f)))
            except OutOfWindow:
                out.append((name, None))
        return out

    Wd = contragredient(W)
    for (p, u, q, f), results in zip(items, pmap(one, items)):
        inst = (p, W.index(u), q, Vd.index(f), m)
        for name, res in results:
            if res is None:
                report.skip(name, inst)
                continue
            witness = {}
            if res:
                witness = {"u": W.describe_key(u), "f": Vd.describe_key(f), "residual": repr(Wd.vec(res))}
            report.record(name, inst, not res, **witness)
    return report


# ---------------------------------------------------------------------------
# tensors from operators


def build_r_from_T(T: LevelwiseMatrix, U: SemidirectVOA) -> DiagonalTensor:
    """``r_T = sum_t sum_i T(v_i) (x) v_i* - v_i* (x) T(v_i)`` in ``U = V x| W'``."""
    if T.shift != 0:
        raise ConstructionError("r_T needs a level-preserving map")
    W = T.source
    if T.target.tag != U.V.tag or not isinstance(U.M, ContragredientModule) or U.M.source.tag != W.tag:
        raise CarrierMismatch(f"{U.V.tag} x| dual({W.tag})", U.tag)
    levels: Dict[int, Dict[Pair, Rational]] = {}
    for n in range(U.max_degree + 1):
        slot: Dict[Pair, Rational] = {}
        for v in W.basis(n):
            star = ("M", ("*", v))
            for k, c in T.image_of_key(v).items():
                add_into(slot, {(("V", k), star): c})
                add_into(slot, {(star, ("V", k)): -c})
        if slot:
            levels[n] = slot
    return DiagonalTensor(U, levels)


BLOCKS = {
    ("V", "M", "M"): "A",
    ("M", "V", "M"): "B",
    ("M", "M", "V"): "C",
}


def residual_blocks(alpha: TripleTensorComponent) -> Dict[str, TripleTensorComponent]:
    """Split a residual in ``V x| W'`` by which slots hold ``V`` versus ``W'``.

    Blocks ``A`` (V, W', W'), ``B`` (W', V, W') and ``C`` (W', W', V); any
    other placement is collected under ``other``.
    """
    out = {name: TripleTensorComponent(alpha.space, alpha.levels) for name in ("A", "B", "C", "other")}
    for (k1, k2, k3), c in alpha.entries.items():
        name = BLOCKS.get((k1[0], k2[0], k3[0]), "other")
        out[name].add(k1, k2, k3, c)
    return out


def check_blocks_against_strong_axioms(
    T: LevelwiseMatrix, U: SemidirectVOA, m: int
) -> CheckReport:
    """Entrywise identities between the residual of ``r_T`` and the strong RBO axioms.

    ``A[h, v_i*, v_k*]   =  rbo(u=v_k, v=v_i)[h]``
    ``B[v_i*, h, v_l*]   = -<coadjoint_mode(u=v_l, f=h*), v_i>``
    ``C[v_k*, v_l*, h]   = -<coadjoint_skew(u=v_l, f=h*), v_k>``
    and every other slot placement vanishes.
    """
    V, W = U.V, T.source
    r = build_r_from_T(T, U)
    Ts = coadjoint_map(V, W, T)
    report = CheckReport(f"residual blocks vs strong RBO axioms, m={m}")
    for (s, t), alpha in voybe_residual(U, r, m).items():
        blocks = residual_blocks(alpha)
        report.record("other", (s, t, m), blocks["other"].is_zero())
        # A: slot2 = v_i* (level s), slot3 = v_k* (level t)
        want = TripleTensorComponent(U, alpha.levels)
        for vi in W.basis(s):
            for vk in W.basis(t):
                for h, c in rbo_residual_terms(V, W, T, m, vk, vi).items():
                    want.add(("V", h), ("M", ("*", vi)), ("M", ("*", vk)), c)
        report.record("A", (s, t, m), want == blocks["A"])
        # B: slot1 = v_i* (level u), slot2 = h (level s), slot3 = v_l* (level t)
        want = TripleTensorComponent(U, alpha.levels)
        for vl in W.basis(t):
            for h in V.basis(s):
                res = coadjoint_mode_residual(V, W, T, Ts, m, vl, ("*", h))
                for (star, vi), c in res.items():
                    want.add(("M", ("*", vi)), ("V", h), ("M", ("*", vl)), -c)
        report.record("B", (s, t, m), want == blocks["B"])
        # C: slot1 = v_k* (level u), slot2 = v_l* (level s), slot3 = h (level t)
        want = TripleTensorComponent(U, alpha.levels)
        for vl in W.basis(s):
            for h in V.basis(t):
                res = coadjoint_skew_residual(V, W, T, Ts, m, vl, ("*", h))
                for (star, vk), c in res.items():
                    want.add(("M", ("*", vk)), ("M", ("*", vl)), ("V", h), -c)
        report.record("C", (s, t, m), want == blocks["C"])
    return report


# ---------------------------------------------------------------------------
# operator identity versus tensor residual


def check_tensor_operator_identity(
    U: VertexAlgebra, r: DiagonalTensor, m: int, N: Optional[int] = None
) -> CheckReport:
    """For dual basis ``f`` of ``U(t)*`` and ``g`` of ``U(s)*``,

        T(f)_m T(g) - T(T(f)_m g) - T(f(m) T(g)) = alpha_{s,t}(g (x) f)

    with ``T = tensor_to_map(r)``; compared as exact vectors.
    """
    T = tensor_to_map(U, r)
    Ud = _dual(U)
    report = CheckReport(f"operator/tensor identity for m={m} on {U.tag}")
    for (s, t), alpha in voybe_residual(U, r, m, N).items():
        for f in Ud.basis(t):
            for g in Ud.basis(s):
                lhs = rbo_residual_terms(U, Ud, T, m, f, g)
                rhs = alpha.contract23(g[1], f[1])
                inst = (s, t, Ud.index(f), Ud.index(g), m)
                witness = {} if lhs == rhs else {"operator": repr(U.vec(lhs)), "tensor": repr(U.vec(rhs))}
                report.record("identity", inst, lhs == rhs, **witness)
    return report


# ---------------------------------------------------------------------------
# invariant forms


def invariant_form_gram(U: VertexAlgebra, n: int) -> List[List[Rational]]:
    """Gram matrix of ``(a|b) = <vac*, a'_{-1} b>`` on ``U(n)``."""
    basis = U.basis(n)
    vac = U.vacuum_key
    return [[_primed(U, a, -1, b).get(vac, ZERO) for b in basis] for a in basis]


@dataclass
class InvariantForm:
    """Per-level Gram matrices of a symmetric bilinear form on ``U``."""

    space: VertexAlgebra
    grams: Dict[int, List[List[Rational]]]

    def pair(self, a: Terms, b: Terms) -> Rational:
        idx = self.space.index
        lvl = self.space.level_of
        total = ZERO
        for ka, ca in a.items():
            for kb, cb in b.items():
                if lvl(ka) == lvl(kb):
                    total += ca * cb * self.grams[lvl(ka)][idx(ka)][idx(kb)]
        return total


def standard_form(U: VertexAlgebra) -> InvariantForm:
    return InvariantForm(U, {n: invariant_form_gram(U, n) for n in U.levels()})


def check_invariant_form(form: InvariantForm, N: Optional[int] = None) -> CheckReport:
    """Symmetry, nondegeneracy and ``(a_m b|c) = (b|a'_m c)`` on basis triples."""
    U = form.space
    N = U.max_degree if N is None else min(N, U.max_degree)
    report = CheckReport(f"invariant form on {U.tag}")
    for n in range(N + 1):
        G = form.grams[n]
        k = len(G)
        report.record("symmetric", (n,), all(G[i][j] == G[j][i] for i in range(k) for j in range(k)))
        report.record("nondegenerate", (n,), matrix_rank(G) == k if k else True)
    basis = [x for n in range(N + 1) for x in U.basis(n)]
    for a in basis:
        for b in basis:
            for c in basis:
                m = U.level_of(a) + U.level_of(b) - U.level_of(c) - 1
                try:
                    lhs = form.pair(U.mode_basis(a, m, b), {c: ONE})
                    rhs = form.pair({b: ONE}, _primed(U, a, m, c))
                except OutOfWindow:
                    continue
                report.record("invariance", (repr(a), m, repr(b), repr(c)), lhs == rhs)
    return report


def form_transport(U: VertexAlgebra, r: DiagonalTensor, form: Optional[InvariantForm] = None) -> LevelwiseMatrix:
    """``T_r`` composed with ``a -> (a|.)``: a level-preserving map ``U -> U``.

    Raises
    ------
    ConstructionError
        If the form is degenerate on some level of the window.
    """
    form = standard_form(U) if form is None else form
    blocks = {}
    for n in U.levels():
        G = form.grams[n]
        if G and matrix_rank(G) != len(G):
            raise ConstructionError(f"form is degenerate on level {n}")
    _require_skew(r)
    for n in r.support():
        R = r.matrix(n)
        G = form.grams[n]
        k = len(R)
        blocks[n] = [[sum((R[p][q] * G[q][j] for q in range(k)), ZERO) for j in range(k)] for p in range(k)]
    return LevelwiseMatrix(U, U, blocks, 0)


def check_form_transport(
    U: VertexAlgebra, r: DiagonalTensor, m: int, form: Optional[InvariantForm] = None
) -> CheckReport:
    """Assert ``check_voybe(r, m)`` passes iff the transported map is an m-RBO of ``U``."""
    Tt = form_transport(U, r, form)
    voybe = check_voybe(U, r, m)
    rbo = check_relative_rbo(U, U, Tt, m)
    report = CheckReport(f"form transport biconditional, m={m}")
    report.record("biconditional", (m,), voybe.passed == rbo.passed, voybe=voybe.passed, rbo=rbo.passed)
    report.info.update({"voybe_passed": voybe.passed, "rbo_passed": rbo.passed})
    return report
