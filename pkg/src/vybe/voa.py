"""Truncated current-algebra vertex operator algebras.

A :class:`CurrentVOA` is the vacuum module of the affinization of a finite
dimensional Lie algebra ``g`` with invariant form ``kappa`` at level ``k``:

    [x(m), y(n)] = [x, y](m + n) + m k kappa(x, y) delta(m + n, 0).

Its states are PBW monomials ``x1(n1) ... xr(nr)|0>`` with negative modes.
Modes of arbitrary states are computed by peeling off the leftmost factor
and applying the iterate identity; generator modes act on monomials through
the commutation relations above.  The conformal vector is the Sugawara
vector, so the Heisenberg algebra (``g`` abelian) and affine ``sl2`` are the
same code path.

All spaces here share the :class:`Module` protocol: a graded space with a
memoized mode action of a vertex algebra.  Module-agnostic operations
(``primed_mode``, ``m_dot``, ``verify_voa_axioms``) work on any of them.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ._parallel import pmap
from .errors import (
    ConstructionError,
    LieAlgebraError,
    NotHomogeneous,
    OutOfWindow,
)
from .exact import (
    ONE,
    ZERO,
    GradedSpace,
    GradedVector,
    Key,
    PBWMonomial,
    Q,
    Rational,
    Terms,
    add_into,
    binom,
    inv_factorial,
    matrix_inverse,
    monomial_sort_key,
    normal_order_key,
    scale_terms,
)
from .report import CheckReport


# ---------------------------------------------------------------------------
# Lie algebra data


class LieAlgebraData:
    """Structure constants and a symmetric invariant form of a Lie algebra.

    Parameters
    ----------
    dim
        Dimension of the algebra.
    brackets
        Entries ``(i, j, k, c)`` meaning ``[x_i, x_j]`` has coefficient ``c``
        on ``x_k``.  A pair listed in only one order is completed by
        antisymmetry; a pair listed in both orders must be antisymmetric.
    form
        ``dim x dim`` symmetric matrix of the invariant form.
    h_dual
        Optional dual Coxeter number in the normalization of ``form``.  It
        is compared against half the adjoint Casimir eigenvalue.
    names
        Optional generator labels used in printing.

    Raises
    ------
    LieAlgebraError
        If antisymmetry, the Jacobi identity, symmetry or invariance of the
        form fails, or ``h_dual`` disagrees with the Casimir.
    """

    def __init__(
        self,
        dim: int,
        brackets: Iterable[Sequence[object]] = (),
        form: Optional[Sequence[Sequence[object]]] = None,
        h_dual=None,
        names: Optional[Sequence[str]] = None,
    ):
        if dim < 1:
            raise LieAlgebraError("dimension must be positive")
        self.dim = int(dim)
        self.names = tuple(names) if names else tuple(f"x{i}" for i in range(dim))
        listed: Dict[Tuple[int, int], Dict[int, Rational]] = {}
        for entry in brackets:
            if len(entry) != 4:
                raise LieAlgebraError(f"bracket entry must be [i, j, k, c], got {entry!r}")
            i, j, k, c = int(entry[0]), int(entry[1]), int(entry[2]), Q(entry[3])
            for idx in (i, j, k):
                if not 0 <= idx < dim:
                    raise LieAlgebraError(f"generator index {idx} out of range")
            slot = listed.setdefault((i, j), {})
            slot[k] = slot.get(k, ZERO) + c
        table: Dict[Tuple[int, int], Dict[int, Rational]] = {}
        for (i, j), out in listed.items():
            table[(i, j)] = {k: c for k, c in out.items() if c}
            if (j, i) not in listed:
                table[(j, i)] = {k: -c for k, c in out.items() if c}
        self._table = {key: val for key, val in table.items() if val}
        if form is None:
            form = [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]
        self.form = tuple(tuple(Q(x) for x in row) for row in form)
        if len(self.form) != dim or any(len(r) != dim for r in self.form):
            raise LieAlgebraError("form must be a dim x dim matrix")
        self._validate()
        try:
            self.inverse_form = tuple(tuple(r) for r in matrix_inverse(self.form))
        except ValueError:
            raise ConstructionError("invariant form is degenerate") from None
        self.casimir = self._adjoint_casimir()
        computed = self.casimir / 2
        if h_dual is not None and Q(h_dual) != computed:
            raise LieAlgebraError(
                f"h_dual={Q(h_dual)} disagrees with the form's adjoint Casimir/2={computed}"
            )
        self.h_dual = computed

    def bracket(self, i: int, j: int) -> Dict[int, Rational]:
        return self._table.get((i, j), {})

    @property
    def is_abelian(self) -> bool:
        return not self._table

    def _bracket_vec(self, u: Mapping[int, Rational], v: Mapping[int, Rational]) -> Dict[int, Rational]:
        out: Dict[int, Rational] = {}
        for i, a in u.items():
            for j, b in v.items():
                add_into(out, self.bracket(i, j), a * b)
        return out

    def _validate(self) -> None:
        n = self.dim
        for i in range(n):
            if self.bracket(i, i):
                raise LieAlgebraError(f"antisymmetry fails: [x{i}, x{i}] != 0")
            for j in range(n):
                neg = {k: -c for k, c in self.bracket(j, i).items()}
                if self.bracket(i, j) != neg:
                    raise LieAlgebraError(f"antisymmetry fails for pair ({i}, {j})")
        for i, j, k in itertools.product(range(n), repeat=3):
            total: Dict[int, Rational] = {}
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                add_into(total, self._bracket_vec({a: ONE}, self.bracket(b, c)))
            if total:
                raise LieAlgebraError(f"Jacobi identity fails on ({i}, {j}, {k}): {total}")
        for i in range(n):
            for j in range(n):
                if self.form[i][j] != self.form[j][i]:
                    raise LieAlgebraError("invariant form is not symmetric")
        for i, j, k in itertools.product(range(n), repeat=3):
            lhs = sum((c * self.form[l][k] for l, c in self.bracket(i, j).items()), ZERO)
            rhs = sum((c * self.form[i][l] for l, c in self.bracket(j, k).items()), ZERO)
            if lhs != rhs:
                raise LieAlgebraError(f"form is not invariant on ({i}, {j}, {k})")

    def _adjoint_casimir(self) -> Rational:
        """Eigenvalue of sum kappa^{ab} ad(x_a) ad(x_b) on g; must be scalar."""
        n = self.dim
        ad = [[[self.bracket(a, j).get(i, ZERO) for j in range(n)] for i in range(n)] for a in range(n)]
        cas = [[ZERO] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                w = self.inverse_form[a][b]
                if not w:
                    continue
                for i in range(n):
                    for j in range(n):
                        s = sum((ad[a][i][l] * ad[b][l][j] for l in range(n)), ZERO)
                        if s:
                            cas[i][j] += w * s
        value = cas[0][0]
        for i in range(n):
            for j in range(n):
                if cas[i][j] != (value if i == j else ZERO):
                    raise ConstructionError(
                        "adjoint Casimir is not scalar; Sugawara vector needs a simple or abelian algebra"
                    )
        return value

    def __repr__(self) -> str:
        return f"<LieAlgebraData dim={self.dim} abelian={self.is_abelian}>"


def heisenberg_lie(rank: int = 1) -> LieAlgebraData:
    """Abelian algebra of the given rank with the identity form."""
    names = ["alpha"] if rank == 1 else [f"alpha{i}" for i in range(rank)]
    return LieAlgebraData(rank, (), None, names=names)


def sl2_lie() -> LieAlgebraData:
    """sl2 in the basis ``e, h, f`` with the trace form ``(e|f) = 1, (h|h) = 2``."""
    brackets = [
        (1, 0, 0, 2),   # [h, e] = 2e
        (1, 2, 2, -2),  # [h, f] = -2f
        (0, 2, 1, 1),   # [e, f] = h
    ]
    form = [[0, 0, 1], [0, 2, 0], [1, 0, 0]]
    return LieAlgebraData(3, brackets, form, h_dual=2, names=("e", "h", "f"))


# ---------------------------------------------------------------------------
# module protocol


class Module(GradedSpace):
    """Graded space carrying a memoized mode action of a vertex algebra.

    Subclasses implement :meth:`_compute_mode` for basis keys; the public
    entry points check the truncation window and extend bilinearly.
    """

    conformal_weight: Rational = ZERO

    def __init__(self, voa: Optional["VertexAlgebra"], max_degree: int, tag: str):
        super().__init__(max_degree)
        self._voa = voa
        self.tag = tag
        self._modes: Dict[Tuple[Key, int, Key], Terms] = {}
        self._virasoro: Dict[Tuple[int, Key], Terms] = {}

    @property
    def voa(self) -> "VertexAlgebra":
        return self._voa

    def _compute_mode(self, a: Key, m: int, u: Key) -> Terms:
        raise NotImplementedError

    def mode_level(self, a: Key, m: int, u: Key) -> int:
        return self.voa.level_of(a) - m - 1 + self.level_of(u)

    def mode_basis(self, a: Key, m: int, u: Key) -> Terms:
        """``a_m u`` for basis keys; raises OutOfWindow above the window."""
        level = self.mode_level(a, m, u)
        if level < 0:
            return {}
        if level > self.max_degree:
            raise OutOfWindow(level, self.max_degree, self.tag)
        key = (a, m, u)
        got = self._modes.get(key)
        if got is None:
            got = self._compute_mode(a, m, u)
            self._modes[key] = got
        return got

    def mode_terms(self, a: Mapping[Key, Rational], m: int, u: Mapping[Key, Rational]) -> Terms:
        acc: Terms = {}
        for ak, ac in a.items():
            for uk, uc in u.items():
                add_into(acc, self.mode_basis(ak, m, uk), ac * uc)
        return acc

    def virasoro_basis(self, n: int, u: Key) -> Terms:
        """``L(n) u`` for a basis key."""
        key = (n, u)
        got = self._virasoro.get(key)
        if got is None:
            got = self.mode_terms(self.voa.omega_terms, n + 1, {u: ONE})
            self._virasoro[key] = got
        return got

    def virasoro_terms(self, n: int, u: Mapping[Key, Rational]) -> Terms:
        acc: Terms = {}
        for k, c in u.items():
            add_into(acc, self.virasoro_basis(n, k), c)
        return acc

    def virasoro_power(self, n: int, j: int, u: Mapping[Key, Rational]) -> Terms:
        cur: Terms = dict(u)
        for _ in range(j):
            if not cur:
                break
            cur = self.virasoro_terms(n, cur)
        return cur

    def skew_terms(self, u: Mapping[Key, Rational], m: int, a: Mapping[Key, Rational]) -> Terms:
        """``u(m) a`` in this module for ``u`` here and ``a`` in the vertex algebra.

        Expands ``Res_z z^m e^{zL(-1)} Y(a, -z) u``.
        """
        acc: Terms = {}
        for uk, uc in u.items():
            du = self.level_of(uk)
            for ak, ac in a.items():
                top = self.voa.level_of(ak) + du - m - 1
                if top > self.max_degree:
                    raise OutOfWindow(top, self.max_degree, self.tag)
                for j in range(0, top + 1):
                    inner = self.mode_basis(ak, m + j, uk)
                    if not inner:
                        continue
                    sign = ONE if (m + j + 1) % 2 == 0 else -ONE
                    add_into(acc, self.virasoro_power(-1, j, inner), sign * inv_factorial(j) * ac * uc)
        return acc

    def vec(self, terms: Mapping[Key, Rational]) -> GradedVector:
        return GradedVector._raw(self, dict(terms))


class VertexAlgebra(Module):
    """A module over itself with vacuum and conformal vector."""

    vacuum_key: Key
    omega_terms: Terms
    central_charge: Rational
    cft_type: bool = False  # dim V_0 = 1 is part of the contract

    @property
    def voa(self) -> "VertexAlgebra":
        return self

    @property
    def vacuum(self) -> GradedVector:
        return self.basis_vector(self.vacuum_key)

    @property
    def omega(self) -> GradedVector:
        return self.vec(self.omega_terms)


# ---------------------------------------------------------------------------
# PBW spaces: the current VOA and Fock-type modules


class PBWSpace(Module):
    """Span of PBW monomials on a top vector for the affinization of ``lie``.

    ``zero_modes`` gives the eigenvalue of each ``x(0)`` on the top vector;
    it is empty for the vacuum module.
    """

    def __init__(
        self,
        voa: Optional["CurrentVOA"],
        lie: LieAlgebraData,
        level: Rational,
        max_degree: int,
        tag: str,
        zero_modes: Optional[Mapping[int, Rational]] = None,
    ):
        super().__init__(voa, max_degree, tag)
        self.lie = lie
        self.level = Q(level)
        self.zero_modes = {g: Q(v) for g, v in (zero_modes or {}).items() if Q(v)}
        self._gen_cache: Dict[Tuple[int, int, Tuple], Terms] = {}

    # basis ---------------------------------------------------------------
    def _enumerate_level(self, n: int) -> List[PBWMonomial]:
        factors = sorted(
            ((g, -p) for p in range(1, n + 1) for g in range(self.lie.dim)),
            key=normal_order_key,
        )
        out: List[PBWMonomial] = []

        def grow(start: int, remaining: int, acc: List[Tuple[int, int]]):
            if remaining == 0:
                out.append(PBWMonomial(acc))
                return
            for idx in range(start, len(factors)):
                g, mode = factors[idx]
                if -mode > remaining:
                    continue
                acc.append((g, mode))
                grow(idx, remaining + mode, acc)
                acc.pop()

        grow(0, n, [])
        out.sort(key=monomial_sort_key)
        return out

    def level_of(self, key: Key) -> int:
        return -sum(mode for _, mode in key)

    def describe_key(self, key: Key) -> str:
        names = self.lie.names
        top = "|0>" if self.voa is self else "|top>"
        if not key:
            return top
        return "".join(f"{names[g]}({n})" for g, n in key) + top

    # generator action ------------------------------------------------------
    def gen_action(self, x: int, j: int, mono: Tuple) -> Terms:
        """``x(j)`` applied to a normally ordered monomial."""
        key = (x, j, mono)
        got = self._gen_cache.get(key)
        if got is not None:
            return got
        got = self._gen_uncached(x, j, mono)
        self._gen_cache[key] = got
        return got

    def _gen_uncached(self, x: int, j: int, mono: Tuple) -> Terms:
        if not mono:
            if j < 0:
                return {PBWMonomial(((x, j),)): ONE}
            if j == 0 and x in self.zero_modes:
                return {mono: self.zero_modes[x]}
            return {}
        if j < 0 and normal_order_key((x, j)) <= normal_order_key(mono[0]):
            return {tuple.__new__(PBWMonomial, ((x, j),) + tuple(mono)): ONE}
        y, n = mono[0]
        rest = tuple.__new__(PBWMonomial, mono[1:])
        acc: Terms = {}
        for key, c in self.gen_action(x, j, rest).items():
            add_into(acc, self.gen_action(y, n, key), c)
        for z, c in self.lie.bracket(x, y).items():
            add_into(acc, self.gen_action(z, j + n, rest), c)
        if j + n == 0:
            kap = self.lie.form[x][y]
            if kap:
                add_into(acc, {rest: ONE}, j * self.level * kap)
        return acc

    def gen_terms(self, x: int, j: int, terms: Mapping[Key, Rational]) -> Terms:
        acc: Terms = {}
        for key, c in terms.items():
            add_into(acc, self.gen_action(x, j, key), c)
        return acc

    # vertex operators ------------------------------------------------------
    def _compute_mode(self, a: Key, m: int, u: Key) -> Terms:
        return self._pbw_mode(a, m, u)

    def _pbw_mode(self, a: Tuple, m: int, c: Tuple) -> Terms:
        """``a_m c`` for a vacuum-module monomial ``a`` acting on ``c``.

        Writes ``a = x(n) rest`` and uses the iterate identity; the two
        ``i``-sums stop once every term has negative level.
        """
        if self.voa.level_of(a) - m - 1 + self.level_of(c) < 0:
            return {}
        key = (a, m, c)
        got = self._modes.get(key)
        if got is not None:
            return got
        if not a:
            got = {c: ONE} if m == -1 else {}
        else:
            (x, n), rest = a[0], tuple.__new__(PBWMonomial, a[1:])
            if not rest:
                j = m + n + 1
                coef = binom(-j - 1, -n - 1)
                got = scale_terms(self.gen_action(x, j, c), coef)
            else:
                got = {}
                deg_c = self.level_of(c)
                w_rest = self.voa.level_of(rest)
                sign_n = ONE if n % 2 == 0 else -ONE
                for i in range(0, max(w_rest - m - 1 + deg_c, deg_c) + 1):
                    b = binom(n, i) if i % 2 == 0 else -binom(n, i)
                    if w_rest - m - i - 1 + deg_c >= 0:
                        inner = self._pbw_mode(rest, m + i, c)
                        if inner:
                            add_into(got, self.gen_terms(x, n - i, inner), b)
                    if i <= deg_c:
                        s = -b * sign_n
                        for k2, c2 in self.gen_action(x, i, c).items():
                            add_into(got, self._pbw_mode(rest, n + m - i, k2), s * c2)
        self._modes[key] = got
        return got


class CurrentVOA(PBWSpace, VertexAlgebra):
    """Vacuum module of the affinization of ``lie`` at level ``k``, truncated at ``N``.

    Use :func:`build_current_voa` to construct one.
    """

    cft_type = True

    def __init__(self, lie: LieAlgebraData, k, max_degree: int, tag: Optional[str] = None):
        k = Q(k)
        denom = 2 * k + lie.casimir
        if not denom:
            raise ConstructionError(
                f"critical level: k + h_dual = 0 (k={k}, h_dual={lie.h_dual})"
            )
        if tag is None:
            kind = "heisenberg" if lie.is_abelian else "current"
            tag = f"{kind}(dim={lie.dim},k={k},N={max_degree})"
        PBWSpace.__init__(self, None, lie, k, max_degree, tag)
        self._voa = self
        self.vacuum_key = PBWMonomial(())
        omega: Terms = {}
        for i in range(lie.dim):
            for j in range(lie.dim):
                w = lie.inverse_form[i][j]
                if w:
                    add_into(omega, self.gen_action(i, -1, PBWMonomial(((j, -1),))), w / denom)
        self.omega_terms = omega
        self.central_charge = 2 * k * lie.dim / denom

    @property
    def k(self) -> Rational:
        return self.level

    def __repr__(self) -> str:
        return f"<CurrentVOA {self.tag} c={self.central_charge}>"


def build_current_voa(lie: LieAlgebraData, k, N: int, tag: Optional[str] = None) -> CurrentVOA:
    """Truncated VOA of the affinization of ``lie`` at level ``k``.

    The conformal vector is the Sugawara vector
    ``omega = sum kappa^{ij} x_i(-1) x_j(-1)|0> / (2k + C)`` where ``C`` is
    the adjoint Casimir eigenvalue (``2 h_dual`` in the form's
    normalization), giving central charge ``k dim g / (k + h_dual)``.
    """
    return CurrentVOA(lie, k, N, tag)


def heisenberg(rank: int = 1, N: int = 4, k=1) -> CurrentVOA:
    return build_current_voa(heisenberg_lie(rank), k, N)


def affine_sl2(k=1, N: int = 3) -> CurrentVOA:
    return build_current_voa(sl2_lie(), k, N)


# ---------------------------------------------------------------------------
# module-agnostic operations on GradedVectors


def _module_of(V: "VertexAlgebra", b: GradedVector) -> Module:
    space = b.space
    if not isinstance(space, Module) or space.voa.tag != V.tag:
        raise ConstructionError(f"{space.tag} is not a module of {V.tag}")
    return space


def _check_in(V: "VertexAlgebra", a: GradedVector) -> None:
    if a.space.tag != V.tag:
        from .errors import CarrierMismatch

        raise CarrierMismatch(V.tag, a.space.tag)


def _result(space: Module, terms: Terms) -> GradedVector:
    return GradedVector._raw(space, terms)


def mode_action(V: VertexAlgebra, a: GradedVector, m: int, b: GradedVector) -> GradedVector:
    """``a_m b`` for ``a`` in ``V`` and ``b`` in ``V`` or any module of ``V``.

    Raises
    ------
    OutOfWindow
        If some component of the result lies above the window of ``b``'s carrier.
    """
    _check_in(V, a)
    W = _module_of(V, b)
    return _result(W, W.mode_terms(a.terms, m, b.terms))


def virasoro_mode(V: VertexAlgebra, n: int, b: GradedVector) -> GradedVector:
    """``L(n) b = omega_{n+1} b``."""
    W = _module_of(V, b)
    return _result(W, W.virasoro_terms(n, b.terms))


def homogeneous_weight(space: GradedSpace, terms: Mapping[Key, Rational]) -> int:
    levels = {space.level_of(k) for k in terms}
    if len(levels) > 1:
        raise NotHomogeneous(f"vector spans levels {sorted(levels)}")
    return levels.pop() if levels else 0


def _sign(e: int) -> Rational:
    return ONE if e % 2 == 0 else -ONE


def primed_terms(W: Module, a: Mapping[Key, Rational], m: int, u: Mapping[Key, Rational]) -> Terms:
    """``a'_m u``: sum over j of ``(-1)^{wt a} / j! (L(1)^j a)_{2 wt a - m - j - 2} u``."""
    if not a or not u:
        return {}
    V = W.voa
    wa = homogeneous_weight(V, a)
    acc: Terms = {}
    cur: Terms = dict(a)
    sign = _sign(wa)
    for j in range(0, wa + 1):
        if not cur:
            break
        add_into(acc, W.mode_terms(cur, 2 * wa - m - j - 2, u), sign * inv_factorial(j))
        cur = V.virasoro_terms(1, cur)
    return acc


def primed_op_terms(W: Module, a: Mapping[Key, Rational], m: int, u: Mapping[Key, Rational]) -> Terms:
    """``a'^op_m u``: double sum with ``L(1)^j`` on ``a`` and ``L(1)^i`` on ``u``."""
    if not a or not u:
        return {}
    V = W.voa
    wa = homogeneous_weight(V, a)
    acc: Terms = {}
    lowered_u: List[Terms] = []
    cur_u: Terms = dict(u)
    while cur_u:
        lowered_u.append(cur_u)
        cur_u = W.virasoro_terms(1, cur_u)
    cur_a: Terms = dict(a)
    for j in range(0, wa + 1):
        if not cur_a:
            break
        for i, ui in enumerate(lowered_u):
            coef = _sign(wa + m + i + 1) * inv_factorial(i) * inv_factorial(j)
            add_into(acc, W.mode_terms(cur_a, 2 * wa - m - j - i - 2, ui), coef)
        cur_a = V.virasoro_terms(1, cur_a)
    return acc


def residue_primed_op_terms(
    W: Module, a: Mapping[Key, Rational], m: int, u: Mapping[Key, Rational]
) -> Terms:
    """Independent evaluation of ``a'^op_m u`` as the coefficient of ``z^{-m-1}`` in

        Y(e^{-zL(1)} (-z^{-2})^{L(0)} a, -z^{-1}) e^{zL(1)} u.

    Each factor is expanded into (z-power, coefficient, vector) triples and
    the product is filtered by total power; no closed-form sign is used.
    """
    if not a or not u:
        return {}
    V = W.voa
    wa = homogeneous_weight(V, a)
    left = []  # e^{-zL(1)} (-z^{-2})^{L(0)} a
    cur = dict(a)
    j = 0
    while cur:
        left.append((-2 * wa + j, _sign(wa) * _sign(j) * inv_factorial(j), cur))
        cur = V.virasoro_terms(1, cur)
        j += 1
    right = []  # e^{zL(1)} u
    cur = dict(u)
    i = 0
    while cur:
        right.append((i, inv_factorial(i), cur))
        cur = W.virasoro_terms(1, cur)
        i += 1
    target = -m - 1
    acc: Terms = {}
    for pa, ca, va in left:
        for pu, cu, vu in right:
            # Y(v, -z^{-1}) = sum_k v_k (-1)^{-k-1} z^{k+1}
            k = target - pa - pu - 1
            coef = ca * cu * _sign(-k - 1)
            add_into(acc, W.mode_terms(va, k, vu), coef)
    return acc


def residue_primed_terms(W: Module, a: Mapping[Key, Rational], m: int, u: Mapping[Key, Rational]) -> Terms:
    """Coefficient of ``z^{-m-1}`` in ``Y(e^{zL(1)} (-z^{-2})^{L(0)} a, z^{-1}) u``."""
    if not a or not u:
        return {}
    V = W.voa
    wa = homogeneous_weight(V, a)
    acc: Terms = {}
    cur = dict(a)
    j = 0
    while cur:
        power = -2 * wa + j
        k = -m - 1 - power - 1  # Y(v, z^{-1}) = sum_k v_k z^{k+1}
        add_into(acc, W.mode_terms(cur, k, u), _sign(wa) * inv_factorial(j))
        cur = V.virasoro_terms(1, cur)
        j += 1
    return acc


def primed_mode(V: VertexAlgebra, a: GradedVector, m: int, b: GradedVector) -> GradedVector:
    """``a'_m b`` from ``Y'(a, z) = Y(e^{zL(1)} (-z^{-2})^{L(0)} a, z^{-1})``.

    ``a`` must be homogeneous.
    """
    _check_in(V, a)
    W = _module_of(V, b)
    return _result(W, primed_terms(W, a.terms, m, b.terms))


def primed_op_mode(V: VertexAlgebra, a: GradedVector, m: int, b: GradedVector) -> GradedVector:
    """``a'^op_m b`` from ``Y'^op(a, z) b = Y(e^{-zL(1)} (-z^{-2})^{L(0)} a, -z^{-1}) e^{zL(1)} b``."""
    _check_in(V, a)
    W = _module_of(V, b)
    return _result(W, primed_op_terms(W, a.terms, m, b.terms))


M_DOT_KINDS = ("plain", "primed", "primed_op")


def m_dot_terms(V: VertexAlgebra, kind: str, alpha: Terms, m: int, beta: Terms) -> Terms:
    if kind == "plain":
        return V.mode_terms(beta, m, alpha)
    if kind == "primed":
        return primed_terms(V, alpha, m, beta)
    if kind == "primed_op":
        return primed_op_terms(V, beta, m, alpha)
    raise ValueError(f"unknown m-dot kind {kind!r}; expected one of {M_DOT_KINDS}")


def m_dot(V: VertexAlgebra, kind: str, alpha: GradedVector, m: int, beta: GradedVector) -> GradedVector:
    """The three m-dot products.

    ``plain``: ``beta_m alpha``; ``primed``: ``alpha'_m beta``;
    ``primed_op``: ``beta'^op_m alpha``.
    """
    _check_in(V, alpha)
    _check_in(V, beta)
    return _result(V, m_dot_terms(V, kind, alpha.terms, m, beta.terms))


# ---------------------------------------------------------------------------
# axiom verification


def _sub(a: Terms, b: Terms) -> Terms:
    out = dict(a)
    add_into(out, b, -ONE)
    return out


def _fmt(space: GradedSpace, terms: Terms) -> str:
    return repr(GradedVector._raw(space, terms))


def _mode_range(wa: int, wc: int, N: int) -> range:
    """Modes ``p`` for which ``a_p c`` can land in levels ``-1..N``."""
    top = wa + wc - 1
    return range(top - N, top + 2)


def verify_module_axioms(
    W: Module,
    N: Optional[int] = None,
    *,
    components: Optional[Iterable[str]] = None,
) -> CheckReport:
    """Check the component identities of a vertex algebra or module on the window.

    Components
    ----------
    ``truncation``, ``vacuum``, ``creation`` (algebras only), ``commutator``,
    ``iterate``, ``skewsymmetry`` (algebras only), ``virasoro``,
    ``derivative``, ``grading``, ``conformal_vector`` (algebras only).

    Instances whose intermediate terms leave the window are listed under
    ``skipped`` rather than silently passed.
    """
    V = W.voa
    is_algebra = W is V
    N = W.max_degree if N is None else min(N, W.max_degree)
    wanted = set(components) if components is not None else None
    report = CheckReport(f"vertex {'algebra' if is_algebra else 'module'} axioms for {W.tag}")
    report.info["central_charge"] = str(V.central_charge)
    report.info["dims"] = [W.dim(n) for n in range(N + 1)]
    lam = W.conformal_weight

    def on(name: str) -> bool:
        return wanted is None or name in wanted

    vbasis = [k for n in range(min(N, V.max_degree) + 1) for k in V.basis(n)]
    wbasis = [k for n in range(N + 1) for k in W.basis(n)]
    vac = V.vacuum_key

    def guarded(component: str, instance: Tuple, fn) -> None:
        try:
            ok, witness = fn()
        except OutOfWindow:
            report.skip(component, instance)
            return
        report.record(component, instance, ok, **witness)

    if is_algebra and on("conformal_vector"):
        wt = homogeneous_weight(V, V.omega_terms)
        if V.cft_type:
            report.record("conformal_vector", ("dim V_0", 1), V.dim(0) == 1, dim=V.dim(0))
        if V.max_degree >= 2:
            report.record("conformal_vector", ("wt omega", 2), wt == 2, weight=wt)

    if on("grading"):
        for u in wbasis:
            def check(u=u):
                got = W.virasoro_basis(0, u)
                eig = lam + W.level_of(u)
                want = {u: eig} if eig else {}
                return got == want, {"L0": _fmt(W, got), "expected": _fmt(W, want)}
            guarded("grading", (repr(u),), check)

    if on("truncation"):
        for a in vbasis:
            for u in wbasis:
                p = V.level_of(a) + W.level_of(u)
                def check(a=a, u=u, p=p):
                    got = W._compute_mode(a, p, u) if p >= 0 else {}
                    return not got, {"value": _fmt(W, got)}
                guarded("truncation", (repr(a), p, repr(u)), check)

    if on("vacuum"):
        for u in wbasis:
            for p in _mode_range(0, W.level_of(u), N):
                def check(u=u, p=p):
                    got = W.mode_basis(vac, p, u)
                    want = {u: ONE} if p == -1 else {}
                    return got == want, {"value": _fmt(W, got)}
                guarded("vacuum", (p, repr(u)), check)

    if is_algebra and on("creation"):
        for a in vbasis:
            for p in range(-1, V.level_of(a) + 1):
                def check(a=a, p=p):
                    got = V.mode_basis(a, p, vac)
                    want = {a: ONE} if p == -1 else {}
                    return got == want, {"value": _fmt(V, got)}
                guarded("creation", (repr(a), p), check)

    nontrivial = [a for a in vbasis if a != vac]

    if on("commutator") or on("iterate"):
        triples = [(a, b, u) for a in nontrivial for b in nontrivial for u in wbasis
                   if V.level_of(a) + V.level_of(b) + W.level_of(u) - 2 <= N + N]

        def work(triple):
            a, b, u = triple
            out = []
            wa, wb, wu = V.level_of(a), V.level_of(b), W.level_of(u)
            for p in _mode_range(wa, wu, N):
                for q in _mode_range(wb, wu, N):
                    final = wa + wb + wu - p - q - 2
                    if final < 0 or final > N:
                        continue
                    inst = (repr(a), p, repr(b), q, repr(u))
                    if on("commutator") and wa + wb - 1 > V.max_degree:
                        out.append(("commutator", inst, None, None, None))
                    elif on("commutator"):
                        try:
                            lhs = _sub(
                                W.mode_terms({a: ONE}, p, W.mode_basis(b, q, u)),
                                W.mode_terms({b: ONE}, q, W.mode_basis(a, p, u)),
                            )
                            rhs: Terms = {}
                            for i in range(0, wa + wb):
                                ab = V.mode_basis(a, i, b)
                                if ab:
                                    add_into(rhs, W.mode_terms(ab, p + q - i, {u: ONE}), binom(p, i))
                            out.append(("commutator", inst, lhs == rhs, lhs, rhs))
                        except OutOfWindow:
                            out.append(("commutator", inst, None, None, None))
                    if on("iterate") and (wa + wb - p - 1 > V.max_degree or wa + wu - 1 > N):
                        out.append(("iterate", inst, None, None, None))
                    elif on("iterate"):
                        try:
                            ab = V.mode_basis(a, p, b)
                            lhs = W.mode_terms(ab, q, {u: ONE})
                            rhs = {}
                            sp = _sign(p)
                            for i in range(0, max(wb - q - 1 + wu, wa - 1 + wu) + 1):
                                c = binom(p, i) * _sign(i)
                                t1 = W.mode_terms({a: ONE}, p - i, W.mode_basis(b, q + i, u))
                                t2 = W.mode_terms({b: ONE}, p + q - i, W.mode_basis(a, i, u))
                                add_into(rhs, t1, c)
                                add_into(rhs, t2, -c * sp)
                            out.append(("iterate", inst, lhs == rhs, lhs, rhs))
                        except OutOfWindow:
                            out.append(("iterate", inst, None, None, None))
            return out

        for results in pmap(work, triples):
            for comp, inst, ok, lhs, rhs in results:
                if ok is None:
                    report.skip(comp, inst)
                else:
                    report.record(comp, inst, ok, lhs=_fmt(W, lhs), rhs=_fmt(W, rhs))

    if is_algebra and on("skewsymmetry"):
        for a in nontrivial:
            for b in vbasis:
                wa, wb = V.level_of(a), V.level_of(b)
                for p in _mode_range(wa, wb, N):
                    def check(a=a, b=b, p=p):
                        lhs = V.mode_basis(a, p, b)
                        rhs = V.skew_terms({a: ONE}, p, {b: ONE})
                        return lhs == rhs, {"lhs": _fmt(V, lhs), "rhs": _fmt(V, rhs)}
                    guarded("skewsymmetry", (repr(a), p, repr(b)), check)

    if on("virasoro"):
        c = V.central_charge
        span = N + 1
        for u in wbasis:
            for mm in range(-span, span + 1):
                for nn in range(-span, span + 1):
                    final = W.level_of(u) - mm - nn
                    if final < 0 or final > N:
                        continue
                    def check(u=u, mm=mm, nn=nn):
                        lhs = _sub(
                            W.virasoro_terms(mm, W.virasoro_basis(nn, u)),
                            W.virasoro_terms(nn, W.virasoro_basis(mm, u)),
                        )
                        rhs = scale_terms(W.virasoro_basis(mm + nn, u), Q(mm - nn))
                        if mm + nn == 0:
                            add_into(rhs, {u: ONE}, Q(mm ** 3 - mm) / 12 * c)
                        return lhs == rhs, {"lhs": _fmt(W, lhs), "rhs": _fmt(W, rhs)}
                    guarded("virasoro", (mm, nn, repr(u)), check)

    if on("derivative"):
        for a in vbasis:
            if V.level_of(a) + 1 > V.max_degree:
                continue
            la = V.virasoro_basis(-1, a)
            for u in wbasis:
                wa, wu = V.level_of(a), W.level_of(u)
                for p in _mode_range(wa + 1, wu, N):
                    def check(a=a, u=u, p=p, la=la):
                        lhs = W.mode_terms(la, p, {u: ONE})
                        rhs = scale_terms(W.mode_basis(a, p - 1, u), Q(-p))
                        return lhs == rhs, {"lhs": _fmt(W, lhs), "rhs": _fmt(W, rhs)}
                    guarded("derivative", (repr(a), p, repr(u)), check)

    return report


def verify_voa_axioms(V: VertexAlgebra, N: Optional[int] = None, **kwargs) -> CheckReport:
    """All vertex operator algebra axioms on the truncation window of ``V``."""
    return verify_module_axioms(V, N, **kwargs)


def generator_state(V: CurrentVOA, gen: int, mode: int = -1) -> GradedVector:
    """The state ``x_gen(mode)|0>``."""
    return V.basis_vector(PBWMonomial(((gen, mode),)))


def state(V: PBWSpace, *factors: Tuple[int, int]) -> GradedVector:
    """Normally ordered product of creation operators applied to the top vector."""
    terms: Terms = {PBWMonomial(()): ONE}
    for g, n in reversed(factors):
        terms = V.gen_terms(g, n, terms)
    return V.vec(terms)
