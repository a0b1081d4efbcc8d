"""Modules over a truncated vertex algebra.

Fock modules of a Heisenberg algebra reuse the PBW machinery with a nonzero
zero-mode eigenvalue on the top vector.  Contragredient modules act by the
transpose of the primed operator, and the semidirect product ``V x| M``
glues ``V`` and a module ``M`` with ``M`` a square-zero ideal.
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from .errors import CarrierMismatch, ConstructionError, OutOfWindow
from .exact import (
    ONE,
    ZERO,
    GradedVector,
    Key,
    Q,
    Rational,
    Terms,
    add_into,
    inv_factorial,
)
from .voa import (
    CurrentVOA,
    Module,
    PBWSpace,
    VertexAlgebra,
    homogeneous_weight,
    primed_terms,
)


def adjoint_module(V: VertexAlgebra) -> VertexAlgebra:
    """The algebra acting on itself; it already satisfies the module protocol."""
    return V


class FockModule(PBWSpace):
    """``M(1, lambda)`` for a Heisenberg algebra: ``alpha(0)`` acts on the top by ``lambda``."""

    def __init__(self, V: CurrentVOA, lam, max_degree: Optional[int] = None):
        if not isinstance(V, CurrentVOA) or not V.lie.is_abelian:
            raise ConstructionError("Fock modules need a Heisenberg (abelian) parent algebra")
        rank = V.lie.dim
        if isinstance(lam, (list, tuple)):
            weights = [Q(x) for x in lam]
        else:
            weights = [Q(lam)]
        if len(weights) != rank:
            raise ConstructionError(f"need {rank} highest-weight components, got {len(weights)}")
        N = V.max_degree if max_degree is None else int(max_degree)
        label = ",".join(str(w) for w in weights)
        super().__init__(V, V.lie, V.level, N, f"fock({label})@{V.tag}", dict(enumerate(weights)))
        self.highest_weight = tuple(weights)
        inv = V.lie.inverse_form
        self.conformal_weight = sum(
            (inv[i][j] * weights[i] * weights[j] for i in range(rank) for j in range(rank)), ZERO
        ) / (2 * V.level)

    def describe_key(self, key: Key) -> str:
        names = self.lie.names
        return "".join(f"{names[g]}({n})" for g, n in key) + "|lambda>"

    @property
    def top(self) -> GradedVector:
        return self.basis_vector(self.basis(0)[0])


def fock_module(V: CurrentVOA, lam) -> FockModule:
    return FockModule(V, lam)


class ContragredientModule(Module):
    """Graded dual ``W' = sum W(n)*`` with ``<a_m f, u> = <f, a'_m u>``.

    Basis keys are ``("*", key)`` for the coordinate dual of each basis key
    of ``W``.
    """

    def __init__(self, source: Module):
        lam = source.conformal_weight
        if lam.denominator != 1:
            raise ConstructionError(
                f"contragredient needs an integral conformal weight, got {lam}"
            )
        super().__init__(source.voa, source.max_degree, f"dual({source.tag})")
        self.source = source
        self.conformal_weight = lam
        self._transposes: Dict[Tuple[Key, int, int], Dict[Key, Terms]] = {}

    def _enumerate_level(self, n: int):
        return [("*", k) for k in self.source.basis(n)]

    def level_of(self, key: Key) -> int:
        return self.source.level_of(key[1])

    def describe_key(self, key: Key) -> str:
        return f"({self.source.describe_key(key[1])})*"

    def _transpose(self, a: Key, m: int, s: int) -> Dict[Key, Terms]:
        """Rows of ``a_m`` from ``W(t)*`` to ``W(s)*``, keyed by the source dual key."""
        key = (a, m, s)
        got = self._transposes.get(key)
        if got is None:
            got = {}
            W = self.source
            for u in W.basis(s):
                for wk, c in primed_terms(W, {a: ONE}, m, {u: ONE}).items():
                    got.setdefault(("*", wk), {})[("*", u)] = c
            self._transposes[key] = got
        return got

    def _compute_mode(self, a: Key, m: int, f: Key) -> Terms:
        s = self.mode_level(a, m, f)
        return dict(self._transpose(a, m, s).get(f, {}))

    def dual_key(self, key: Key) -> Key:
        return ("*", key)


def contragredient(W: Module) -> ContragredientModule:
    """The contragredient module of ``W`` (cached per module instance)."""
    cached = getattr(W, "_contragredient", None)
    if cached is None:
        cached = ContragredientModule(W)
        W._contragredient = cached
    return cached


class SemidirectVOA(VertexAlgebra):
    """``V x| M``: keys ``("V", k)`` and ``("M", k)``; ``M`` is a square-zero ideal.

    The mixed products are ``a_m g`` (module action) and
    ``g(m) a = Res z^m e^{zL(-1)} Y_M(a, -z) g`` (skewsymmetry).
    """

    def __init__(self, V: VertexAlgebra, M: Module):
        if M.voa.tag != V.tag:
            raise CarrierMismatch(V.tag, M.voa.tag)
        if M.conformal_weight != 0:
            raise ConstructionError(
                f"semidirect product needs conformal weight 0, got {M.conformal_weight}"
            )
        N = min(V.max_degree, M.max_degree)
        super().__init__(None, N, f"semidirect({V.tag};{M.tag})")
        self.V = V
        self.M = M
        self.vacuum_key = ("V", V.vacuum_key)
        self.omega_terms = {("V", k): c for k, c in V.omega_terms.items()}
        self.central_charge = V.central_charge
        self.conformal_weight = ZERO

    @property
    def voa(self) -> "SemidirectVOA":
        return self

    def _enumerate_level(self, n: int):
        return [("V", k) for k in self.V.basis(n)] + [("M", k) for k in self.M.basis(n)]

    def level_of(self, key: Key) -> int:
        part, inner = key
        return (self.V if part == "V" else self.M).level_of(inner)

    def describe_key(self, key: Key) -> str:
        part, inner = key
        return (self.V if part == "V" else self.M).describe_key(inner)

    def _compute_mode(self, a: Key, m: int, b: Key) -> Terms:
        pa, ka = a
        pb, kb = b
        if pa == "V" and pb == "V":
            return {("V", k): c for k, c in self.V.mode_basis(ka, m, kb).items()}
        if pa == "V":
            return {("M", k): c for k, c in self.M.mode_basis(ka, m, kb).items()}
        if pb == "V":
            return {("M", k): c for k, c in self.M.skew_terms({ka: ONE}, m, {kb: ONE}).items()}
        return {}

    # embeddings
    def embed(self, v: GradedVector) -> GradedVector:
        if v.space.tag == self.V.tag:
            part = "V"
        elif v.space.tag == self.M.tag:
            part = "M"
        else:
            raise CarrierMismatch(f"{self.V.tag} or {self.M.tag}", v.space.tag)
        return GradedVector._raw(self, {(part, k): c for k, c in v.terms.items()})

    def project(self, v: GradedVector, part: str) -> GradedVector:
        space = self.V if part == "V" else self.M
        return GradedVector._raw(space, {k[1]: c for k, c in v.terms.items() if k[0] == part})


def semidirect(V: VertexAlgebra, M: Module) -> SemidirectVOA:
    return SemidirectVOA(V, M)


# ---------------------------------------------------------------------------
# operations on vectors


def _as_module(v: GradedVector) -> Module:
    if not isinstance(v.space, Module):
        raise ConstructionError(f"{v.space.tag} is not a module")
    return v.space


def module_mode_action(W: Module, a: GradedVector, m: int, u: GradedVector) -> GradedVector:
    if a.space.tag != W.voa.tag:
        raise CarrierMismatch(W.voa.tag, a.space.tag)
    if u.space.tag != W.tag:
        raise CarrierMismatch(W.tag, u.space.tag)
    return GradedVector._raw(W, W.mode_terms(a.terms, m, u.terms))


def skew_mode_action(W: Module, u: GradedVector, m: int, a: GradedVector) -> GradedVector:
    """``u(m) a`` valued in ``W``: the skewsymmetry-formula companion of ``Y_W``."""
    if a.space.tag != W.voa.tag:
        raise CarrierMismatch(W.voa.tag, a.space.tag)
    if u.space.tag != W.tag:
        raise CarrierMismatch(W.tag, u.space.tag)
    return GradedVector._raw(W, W.skew_terms(u.terms, m, a.terms))


def _sign(e: int) -> Rational:
    return ONE if e % 2 == 0 else -ONE


def intertwiner_terms(W: Module, u: Mapping[Key, Rational], m: int, f: Mapping[Key, Rational]) -> Terms:
    """``u[m] f`` in ``V'`` for ``u`` in ``W`` and ``f`` in ``W'``.

    ``<u[m] f, a> = sum_j (-1)^{wt u} / j! <f, (L(1)^j u)(2 wt u - m - j - 2) a>``.
    """
    if not u or not f:
        return {}
    V = W.voa
    Vd = contragredient(V)
    wu = homogeneous_weight(W, u)
    acc: Terms = {}
    for fk, fc in f.items():
        deg_f = W.level_of(fk[1])
        s = wu + deg_f - m - 1
        if s < 0:
            continue
        if s > V.max_degree:
            raise OutOfWindow(s, V.max_degree, Vd.tag)
        for a in V.basis(s):
            total = ZERO
            cur: Terms = dict(u)
            j = 0
            while cur:
                k = 2 * wu - m - j - 2
                image = W.skew_terms(cur, k, {a: ONE})
                c = image.get(fk[1])
                if c:
                    total += _sign(wu) * inv_factorial(j) * c
                cur = W.virasoro_terms(1, cur)
                j += 1
            if total:
                add_into(acc, {("*", a): ONE}, fc * total)
    return acc


def intertwiner_flip_terms(W: Module, f: Mapping[Key, Rational], m: int, u: Mapping[Key, Rational]) -> Terms:
    """``f{m} u = sum_j (-1)^{m+j+1} / j! L(-1)^j (u[m+j] f)`` in ``V'``."""
    if not u or not f:
        return {}
    V = W.voa
    Vd = contragredient(V)
    wu = homogeneous_weight(W, u)
    acc: Terms = {}
    for fk, fc in f.items():
        top = wu + W.level_of(fk[1]) - m - 1
        if top > V.max_degree:
            raise OutOfWindow(top, V.max_degree, Vd.tag)
        for j in range(0, top + 1):
            inner = intertwiner_terms(W, u, m + j, {fk: fc})
            if inner:
                add_into(acc, Vd.virasoro_power(-1, j, inner), _sign(m + j + 1) * inv_factorial(j))
    return acc


def _check_pair(u: GradedVector, f: GradedVector) -> Module:
    W = _as_module(u)
    Wd = contragredient(W)
    if f.space.tag != Wd.tag:
        raise CarrierMismatch(Wd.tag, f.space.tag)
    if W.conformal_weight != 0:
        raise ConstructionError("intertwining operators here require conformal weight 0")
    return W


def intertwiner_WWp_Vp(u: GradedVector, m: int, f: GradedVector) -> GradedVector:
    """Mode ``m`` of the intertwining operator of type ``(V' ; W, W')`` on ``u (x) f``."""
    W = _check_pair(u, f)
    return GradedVector._raw(contragredient(W.voa), intertwiner_terms(W, u.terms, m, f.terms))


def intertwiner_WpW_Vp(f: GradedVector, m: int, u: GradedVector) -> GradedVector:
    """Mode ``m`` of the intertwining operator of type ``(V' ; W', W)``, defined by skewsymmetry."""
    W = _check_pair(u, f)
    return GradedVector._raw(contragredient(W.voa), intertwiner_flip_terms(W, f.terms, m, u.terms))


def parse_module_descriptor(V: VertexAlgebra, descriptor: str) -> Module:
    """``"adjoint"``, ``"coadjoint"`` or ``"fock:<lambda>"``."""
    text = descriptor.strip()
    if text == "adjoint":
        return adjoint_module(V)
    if text == "coadjoint":
        return contragredient(V)
    if text.startswith("fock:"):
        body = text[len("fock:"):]
        parts = [p for p in body.split(",") if p.strip()]
        if not parts:
            raise ValueError(f"fock descriptor needs a weight: {descriptor!r}")
        lam: Union[object, Sequence[object]] = Q(parts[0]) if len(parts) == 1 else [Q(p) for p in parts]
        return fock_module(V, lam)
    raise ValueError(f"unknown module descriptor {descriptor!r}")
