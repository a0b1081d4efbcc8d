"""Level-one Lie algebras of vertex algebras, the classical Yang-Baxter equation and O-operators.

``V_1`` is a Lie algebra under ``[a, b] = a_0 b`` and ``W(1)`` is a module
under ``rho(a) u = a_0 u``.  Tensors and maps on level one are compared with
their vertex-algebra counterparts: a skewsymmetric ``R`` solves the CYBE
exactly when the level-one residual of the 0-VOYBE vanishes, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import CarrierMismatch, ConstructionError, HypothesisViolated
from .exact import (
    ONE,
    ZERO,
    GradedSpace,
    Key,
    LevelwiseMatrix,
    Q,
    Rational,
    Terms,
    add_into,
)
from .modules import ContragredientModule, SemidirectVOA, contragredient
from .report import CheckReport
from .voa import Module, VertexAlgebra, primed_op_terms, primed_terms
from .yang_baxter import (
    DiagonalTensor,
    TripleTensorComponent,
    build_r_from_T,
    check_relative_rbo,
    check_strong_rbo,
    check_voybe,
    tensor_to_map,
    triple_products,
)


def _neg(t: Terms) -> Terms:
    return {k: -c for k, c in t.items()}


def is_quasi_primary_level(W: GradedSpace, n: int = 1) -> bool:
    """``L(1) W(n) = 0``."""
    if n > W.max_degree:
        return True
    return all(not W.virasoro_basis(1, u) for u in W.basis(n))


# ---------------------------------------------------------------------------
# level-one structures


@dataclass
class LieLevelOne:
    """``V_1`` with bracket ``a_0 b``; ``table[(a, b)]`` holds the bracket terms."""

    space: VertexAlgebra
    basis: Tuple[Key, ...]
    table: Dict[Tuple[Key, Key], Terms]
    quasi_primary: bool

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def carrier(self) -> str:
        return "lie_semidirect" if isinstance(self.space, SemidirectVOA) else "lie"

    def bracket(self, x: Mapping[Key, Rational], y: Mapping[Key, Rational]) -> Terms:
        out: Terms = {}
        for a, ca in x.items():
            for b, cb in y.items():
                add_into(out, self.table[(a, b)], ca * cb)
        return out

    def structure_constants(self) -> Dict[Tuple[int, int, int], Rational]:
        idx = {k: i for i, k in enumerate(self.basis)}
        out = {}
        for (a, b), terms in self.table.items():
            for k, c in terms.items():
                out[(idx[a], idx[b], idx[k])] = c
        return out

    def check(self) -> CheckReport:
        """Antisymmetry and Jacobi on basis elements."""
        report = CheckReport(f"level-one Lie algebra of {self.space.tag}")
        B = self.basis
        for a in B:
            for b in B:
                s = dict(self.table[(a, b)])
                add_into(s, self.table[(b, a)])
                report.record("antisymmetry", (repr(a), repr(b)), not s)
        for a in B:
            for b in B:
                for c in B:
                    j: Terms = {}
                    add_into(j, self.bracket({a: ONE}, self.table[(b, c)]))
                    add_into(j, self.bracket({b: ONE}, self.table[(c, a)]))
                    add_into(j, self.bracket({c: ONE}, self.table[(a, b)]))
                    report.record("jacobi", (repr(a), repr(b), repr(c)), not j)
        return report


def level1_lie(V: VertexAlgebra) -> LieLevelOne:
    cached = V.__dict__.get("_level1_lie")
    if cached is not None:
        return cached
    basis = V.basis(1) if V.max_degree >= 1 else ()
    table = {(a, b): V.mode_basis(a, 0, b) for a in basis for b in basis}
    lie = LieLevelOne(V, tuple(basis), table, is_quasi_primary_level(V, 1))
    V._level1_lie = lie
    return lie


@dataclass
class LieModuleOne:
    """Action ``rho(a) u = a_0 u`` of ``V_1`` on ``W(1)`` plus the dual action on ``W(1)*``.

    ``rho[a][u]`` holds the terms of ``a_0 u``; ``rho_star[a][f]`` those of
    ``rho*(a) f`` with ``<rho*(a) f, v> = -<f, rho(a) v>``.
    """

    lie: LieLevelOne
    module: Module
    basis: Tuple[Key, ...]
    rho: Dict[Key, Dict[Key, Terms]]
    quasi_primary: bool
    rho_star: Dict[Key, Dict[Key, Terms]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.rho_star:
            for a in self.lie.basis:
                dual: Dict[Key, Terms] = {("*", u): {} for u in self.basis}
                for v in self.basis:
                    for u, c in self.rho[a][v].items():
                        add_into(dual[("*", u)], {("*", v): -c})
                self.rho_star[a] = dual

    @property
    def dual_basis(self) -> Tuple[Key, ...]:
        return tuple(("*", u) for u in self.basis)

    def act(self, a: Mapping[Key, Rational], u: Mapping[Key, Rational]) -> Terms:
        out: Terms = {}
        for x, cx in a.items():
            for k, ck in u.items():
                add_into(out, self.rho[x][k], cx * ck)
        return out

    def act_dual(self, a: Mapping[Key, Rational], f: Mapping[Key, Rational]) -> Terms:
        out: Terms = {}
        for x, cx in a.items():
            for k, ck in f.items():
                add_into(out, self.rho_star[x][k], cx * ck)
        return out

    def check(self) -> CheckReport:
        """Representation property, dual antisymmetry, and agreement with the contragredient action."""
        report = CheckReport(f"level-one module {self.module.tag}")
        L = self.lie
        for a in L.basis:
            for b in L.basis:
                for u in self.basis:
                    lhs = self.act(L.table[(a, b)], {u: ONE})
                    rhs = self.act({a: ONE}, self.act({b: ONE}, {u: ONE}))
                    add_into(rhs, self.act({b: ONE}, self.act({a: ONE}, {u: ONE})), -ONE)
                    report.record("representation", (repr(a), repr(b), repr(u)), lhs == rhs)
        for a in L.basis:
            for f in self.dual_basis:
                for v in self.basis:
                    lhs = self.rho_star[a][f].get(("*", v), ZERO)
                    rhs = -self.rho[a][v].get(f[1], ZERO)
                    report.record("dual_action", (repr(a), repr(f), repr(v)), lhs == rhs)
        if self.module.max_degree >= 1 and not isinstance(L.space, SemidirectVOA):
            Wd = contragredient(self.module)
            for a in L.basis:
                for f in self.dual_basis:
                    got = Wd.mode_basis(a, 0, f)
                    report.record("contragredient", (repr(a), repr(f)), got == self.rho_star[a][f])
        return report


def level1_module(W: Module, lie: Optional[LieLevelOne] = None) -> LieModuleOne:
    """Level-one data of ``W`` over ``V_1`` (``lie`` defaults to that of ``W.voa``)."""
    lie = level1_lie(W.voa) if lie is None else lie
    basis = tuple(W.basis(1)) if W.max_degree >= 1 else ()
    rho = {a: {u: W.mode_basis(a, 0, u) for u in basis} for a in lie.basis}
    return LieModuleOne(lie, W, basis, rho, is_quasi_primary_level(W, 1))


# ---------------------------------------------------------------------------
# Lie tensors and the CYBE


@dataclass
class LieTensor:
    """Sparse element of ``g (x) g`` for ``g = level1_lie(space)``."""

    lie: LieLevelOne
    entries: Dict[Tuple[Key, Key], Rational] = field(default_factory=dict)

    def __post_init__(self):
        basis = set(self.lie.basis)
        clean = {}
        for (p, q), c in self.entries.items():
            if p not in basis or q not in basis:
                raise CarrierMismatch(self.lie.space.tag, f"key pair {(p, q)!r}")
            c = Q(c)
            if c:
                clean[(p, q)] = c
        self.entries = clean

    @classmethod
    def from_matrix(cls, lie: LieLevelOne, rows: Sequence[Sequence[object]]) -> "LieTensor":
        B = lie.basis
        return cls(lie, {(B[i], B[j]): rows[i][j] for i in range(len(B)) for j in range(len(B))})

    def matrix(self) -> List[List[Rational]]:
        idx = {k: i for i, k in enumerate(self.lie.basis)}
        out = [[ZERO] * self.lie.dim for _ in self.lie.basis]
        for (p, q), c in self.entries.items():
            out[idx[p]][idx[q]] = c
        return out

    def sigma(self) -> "LieTensor":
        return LieTensor(self.lie, {(q, p): c for (p, q), c in self.entries.items()})

    def __sub__(self, other: "LieTensor") -> "LieTensor":
        out = dict(self.entries)
        add_into(out, other.entries, -ONE)
        return LieTensor(self.lie, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieTensor):
            return NotImplemented
        return self.lie.space.tag == other.lie.space.tag and self.entries == other.entries

    def is_skewsymmetric(self) -> bool:
        out = dict(self.entries)
        add_into(out, self.sigma().entries)
        return not out

    def is_zero(self) -> bool:
        return not self.entries


def _triple(lie: LieLevelOne) -> TripleTensorComponent:
    return TripleTensorComponent(lie.space, (1, 1, 1))


def cybe_terms(R: LieTensor) -> Tuple[TripleTensorComponent, TripleTensorComponent, TripleTensorComponent]:
    """``([R12, R13], [R12, R23], [R13, R23])`` expanded over structure constants."""
    L = R.lie
    b1213, b1223, b1323 = _triple(L), _triple(L), _triple(L)
    items = list(R.entries.items())
    for (i, j), c1 in items:
        for (k, l), c2 in items:
            c = c1 * c2
            for x, cx in L.table[(i, k)].items():
                b1213.add(x, j, l, c * cx)
            for x, cx in L.table[(j, k)].items():
                b1223.add(i, x, l, c * cx)
            for x, cx in L.table[(j, l)].items():
                b1323.add(i, k, x, c * cx)
    return b1213, b1223, b1323


def cybe_brackets(R: LieTensor) -> TripleTensorComponent:
    """``[[R, R]] = [R12, R13] + [R12, R23] + [R13, R23]``."""
    a, b, c = cybe_terms(R)
    return a + b + c


def check_cybe(R: LieTensor) -> CheckReport:
    report = CheckReport(f"CYBE on level one of {R.lie.space.tag}")
    value = cybe_brackets(R)
    witness = {}
    if not value.is_zero():
        (k1, k2, k3), c = value.first_entry()
        d = R.lie.space.describe_key
        witness = {"slots": f"{d(k1)} (x) {d(k2)} (x) {d(k3)}", "coeff": str(c)}
    report.record("cybe", (1, 1, 1), value.is_zero(), **witness)
    return report


# ---------------------------------------------------------------------------
# O-operators


@dataclass
class LieMap:
    """Matrix of a linear map from a module basis into ``g``: rows ``g``, columns the module."""

    lie: LieLevelOne
    source_basis: Tuple[Key, ...]
    rows: List[List[Rational]]

    def image(self, u: Mapping[Key, Rational]) -> Terms:
        col = {k: j for j, k in enumerate(self.source_basis)}
        out: Terms = {}
        for k, c in u.items():
            j = col[k]
            for i, a in enumerate(self.lie.basis):
                if self.rows[i][j]:
                    add_into(out, {a: self.rows[i][j] * c})
        return out


def check_lie_o_operator(module: LieModuleOne, T: LieMap, dual: bool = False) -> CheckReport:
    """``[Tu, Tv] = T(rho(Tu) v - rho(Tv) u)`` on all basis pairs.

    With ``dual=True`` the source is ``W(1)*`` under ``rho*``.
    """
    L = module.lie
    basis = module.dual_basis if dual else module.basis
    act = module.act_dual if dual else module.act
    if tuple(T.source_basis) != tuple(basis):
        raise CarrierMismatch("module basis", "map columns")
    report = CheckReport(f"O-operator on {'dual ' if dual else ''}{module.module.tag}")
    for u in basis:
        for v in basis:
            Tu, Tv = T.image({u: ONE}), T.image({v: ONE})
            lhs = L.bracket(Tu, Tv)
            inner = act(Tu, {v: ONE})
            add_into(inner, act(Tv, {u: ONE}), -ONE)
            rhs = T.image(inner)
            report.record("o_operator", (repr(u), repr(v)), lhs == rhs)
    return report


def lie_map_from_tensor(R: LieTensor) -> LieMap:
    """``T_R(f) = (id (x) f)(R)`` on the dual basis of ``g``."""
    return LieMap(R.lie, tuple(("*", k) for k in R.lie.basis), R.matrix())


def coadjoint_module_one(lie: LieLevelOne) -> LieModuleOne:
    """``g`` acting on itself; its dual side is the coadjoint representation."""
    rho = {a: {b: lie.table[(a, b)] for b in lie.basis} for a in lie.basis}
    return LieModuleOne(lie, lie.space, lie.basis, rho, lie.quasi_primary)


# ---------------------------------------------------------------------------
# reductions


def reduce_tensor(r: DiagonalTensor) -> LieTensor:
    """The level-one component ``r^1`` as a Lie tensor."""
    lie = level1_lie(r.space)
    return LieTensor(lie, dict(r.levels.get(1, {})))


def reduce_map(T: LevelwiseMatrix) -> List[List[Rational]]:
    """Level-one block of ``T`` (rows: target ``(1)``, columns: source ``(1)``)."""
    if T.shift != 0:
        raise ConstructionError("only level-preserving maps reduce to level one")
    if T.source.max_degree < 1:
        return []
    return [list(row) for row in T.block(1)]


def restrict_to_level_one(V: VertexAlgebra, W: Module, T: LevelwiseMatrix) -> LieMap:
    lie = level1_lie(V)
    return LieMap(lie, tuple(W.basis(1)), reduce_map(T))


def extend_level_one(V: VertexAlgebra, W: Module, T1: Sequence[Sequence[object]], phi=None) -> LevelwiseMatrix:
    """Level-preserving ``W -> V``: ``T1`` on ``W(1)``, ``phi`` on ``W(0)`` into ``C 1``, zero above.

    ``phi`` is a list of scalars, one per basis vector of ``W(0)``.
    """
    blocks = {1: T1}
    if phi is not None:
        if V.dim(0) != 1:
            raise ConstructionError("V(0) must be spanned by the vacuum")
        phi = list(phi)
        if len(phi) != W.dim(0):
            raise ValueError(f"phi needs {W.dim(0)} entries")
        blocks[0] = [phi]
    return LevelwiseMatrix(W, V, blocks, 0)


def semidirect_level_one_tensor(U: SemidirectVOA, T1: Sequence[Sequence[object]]) -> LieTensor:
    """``T - T^21`` in ``(g + W(1)*)^{(x)2}`` for ``T = sum T(v_i) (x) v_i*``."""
    lie = level1_lie(U)
    W = U.M.source
    entries: Dict[Tuple[Key, Key], Rational] = {}
    Vb = U.V.basis(1)
    for j, v in enumerate(W.basis(1)):
        star = ("M", ("*", v))
        for i, h in enumerate(Vb):
            c = Q(T1[i][j])
            if c:
                add_into(entries, {(("V", h), star): c})
                add_into(entries, {(star, ("V", h)): -c})
    return LieTensor(lie, entries)


# ---------------------------------------------------------------------------
# level-one sign table


def check_level_one_signs(U: VertexAlgebra) -> CheckReport:
    """The nine level-one identities for the products ``._0``, ``.'_0``, ``.'op_0``.

    For ``a, b`` in ``V_1`` and ``f`` in ``W(1)*`` inside ``U = V x| W'``:

        a_0 b = [a,b]        a'_0 b = -[a,b]        a'op_0 b = [a,b]
        a_0 f = rho*(a) f    a'_0 f = -rho*(a) f    a'op_0 f = rho*(a) f
        f_0 a = -rho*(a) f   f'_0 a = rho*(a) f     f'op_0 a = -rho*(a) f

    On a plain vertex algebra only the first row applies.
    """
    report = CheckReport(f"level-one sign table on {U.tag}")
    semi = isinstance(U, SemidirectVOA) and isinstance(U.M, ContragredientModule)
    V = U.V if semi else U
    lie = level1_lie(V)

    def emb(t: Terms, part: str) -> Terms:
        return {(part, k): c for k, c in t.items()} if semi else t

    def key(k: Key, part: str) -> Key:
        return (part, k) if semi else k

    for a in lie.basis:
        A = key(a, "V")
        for b in lie.basis:
            B = key(b, "V")
            br = emb(lie.table[(a, b)], "V")
            inst = (repr(a), repr(b))
            report.record("a_0 b", inst, U.mode_basis(A, 0, B) == br)
            report.record("a'_0 b", inst, primed_terms(U, {A: ONE}, 0, {B: ONE}) == _neg(br))
            report.record("a'op_0 b", inst, primed_op_terms(U, {A: ONE}, 0, {B: ONE}) == br)
    if not semi:
        return report
    mod = level1_module(U.M.source, lie)
    for a in lie.basis:
        A = ("V", a)
        for f in mod.dual_basis:
            F = ("M", f)
            rs = emb(mod.rho_star[a][f], "M")
            inst = (repr(a), repr(f))
            report.record("a_0 f", inst, U.mode_basis(A, 0, F) == rs)
            report.record("a'_0 f", inst, primed_terms(U, {A: ONE}, 0, {F: ONE}) == _neg(rs))
            report.record("a'op_0 f", inst, primed_op_terms(U, {A: ONE}, 0, {F: ONE}) == rs)
            report.record("f_0 a", inst, U.mode_basis(F, 0, A) == _neg(rs))
            report.record("f'_0 a", inst, primed_terms(U, {F: ONE}, 0, {A: ONE}) == rs)
            report.record("f'op_0 a", inst, primed_op_terms(U, {F: ONE}, 0, {A: ONE}) == _neg(rs))
    return report


def check_projection_signs(r: DiagonalTensor) -> CheckReport:
    """Level-(1,1,1) parts of the three 0-dot products against the CYBE brackets.

    ``A = -[R12, R13]``, ``B = [R12, R23]`` (it enters the residual with a
    minus sign) and ``C = -[R13, R23]``.
    """
    U = r.space
    report = CheckReport(f"level-one projections on {U.tag}")
    R = reduce_tensor(r)
    A, B, C = triple_products(U, r, 0, 1, 1)
    b1213, b1223, b1323 = cybe_terms(R)
    report.record("r12.r13", (1, 1, 1), A == b1213.scaled(-1))
    report.record("r23.'r12", (1, 1, 1), B == b1223)
    report.record("r13.'op r23", (1, 1, 1), C == b1323.scaled(-1))
    return report


def _require_quasi_primary(*spaces: GradedSpace) -> None:
    for W in spaces:
        if not is_quasi_primary_level(W, 1):
            raise HypothesisViolated(f"level 1 of {W.tag} is not spanned by quasi-primary vectors")


def _implies(report: CheckReport, name: str, premise: bool, conclusion: bool) -> None:
    report.record(name, (premise, conclusion), (not premise) or conclusion, premise=premise, conclusion=conclusion)


def _iff(report: CheckReport, name: str, left: bool, right: bool) -> None:
    report.record(name, (left, right), left == right, left=left, right=right)


def verify_reduction(
    U: VertexAlgebra,
    r: Optional[DiagonalTensor] = None,
    T: Optional[LevelwiseMatrix] = None,
    m: int = 0,
) -> CheckReport:
    """Level-one reduction checks for a tensor ``r`` on ``U`` and/or a map ``T: W -> V``.

    For ``r``: the sign table, the projection identities and the square
    ``voybe(r) <=> T_r RBO``, ``voybe(r) => CYBE(R)``,
    ``T_r RBO => T_R O-operator``, ``CYBE(R) <=> T_R O-operator``.

    For ``T`` (``U`` must be ``V x| W'``): ``strong(T) <=> voybe(r_T)``,
    each of the three strong axioms implies the O-operator property of
    ``T|W(1)``, ``voybe(r_T) => CYBE`` of the level-one tensor, and
    ``O-operator <=> CYBE``.  The level-one tensor must equal ``T - T^21``.

    Raises
    ------
    HypothesisViolated
        If a level one involved is not quasi-primary.
    """
    if m != 0:
        raise ConstructionError("the level-one reduction is stated for m = 0")
    report = CheckReport(f"level-one reduction on {U.tag}")
    _require_quasi_primary(U)
    report.merge(check_level_one_signs(U), "signs.")
    lie = level1_lie(U)
    report.merge(lie.check(), "lie.")
    if r is not None:
        if r.space.tag != U.tag:
            raise CarrierMismatch(U.tag, r.space.tag)
        report.merge(check_projection_signs(r), "projection.")
        R = reduce_tensor(r)
        voybe = check_voybe(U, r, 0).passed
        Tr = tensor_to_map(U, r)
        rbo = check_relative_rbo(U, contragredient(U), Tr, 0).passed
        cybe = check_cybe(R).passed
        TR = lie_map_from_tensor(R)
        lie_o = check_lie_o_operator(coadjoint_module_one(lie), TR, dual=True).passed
        _iff(report, "tensor.voybe<=>rbo", voybe, rbo)
        _implies(report, "tensor.voybe=>cybe", voybe, cybe)
        _implies(report, "tensor.rbo=>o_operator", rbo, lie_o)
        _iff(report, "tensor.cybe<=>o_operator", cybe, lie_o)
        report.record("tensor.naturality", (1,), reduce_map(Tr) == TR.rows)
        report.info.update({"voybe": voybe, "rbo": rbo, "cybe": cybe, "o_operator": lie_o})
    if T is not None:
        if not isinstance(U, SemidirectVOA) or not isinstance(U.M, ContragredientModule):
            raise ConstructionError("map reductions need U = V x| W'")
        V, W = U.V, U.M.source
        _require_quasi_primary(V, W, U.M)
        strong = check_strong_rbo(V, W, T, 0)
        axioms = {
            comp: not any(f.component == comp for f in strong.failures)
            for comp in ("rbo", "coadjoint_mode", "coadjoint_skew")
        }
        r_T = build_r_from_T(T, U)
        voybe = check_voybe(U, r_T, 0).passed
        T1 = restrict_to_level_one(V, W, T)
        mod = level1_module(W, level1_lie(V))
        lie_o = check_lie_o_operator(mod, T1).passed
        Rcal = reduce_tensor(r_T)
        cybe = check_cybe(Rcal).passed
        report.record("map.level_one_tensor", (1,), Rcal == semidirect_level_one_tensor(U, T1.rows))
        _iff(report, "map.strong<=>voybe", strong.passed, voybe)
        for comp, ok in axioms.items():
            _implies(report, f"map.{comp}=>o_operator", ok, lie_o)
        _implies(report, "map.voybe=>cybe", voybe, cybe)
        _iff(report, "map.o_operator<=>cybe", lie_o, cybe)
        report.info.update(
            {"strong": strong.passed, "voybe_r_T": voybe, "o_operator": lie_o, "cybe": cybe, **axioms}
        )
    return report
