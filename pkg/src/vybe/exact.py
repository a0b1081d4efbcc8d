"""Exact rational scalars, sparse graded vectors and per-level matrices.

Every space in the package (a vertex algebra, a module, a dual module, a
semidirect product) is a :class:`GradedSpace`: a finite window of levels
``0..N``, each with an ordered list of hashable basis keys.  Vectors are
sparse maps from basis keys to :data:`Rational` coefficients and carry the
space they live in, so mixing carriers is caught at the point of use.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Sequence, Tuple

import gmpy2

from .errors import CarrierMismatch, OutOfWindow

Rational = type(gmpy2.mpq(0))
ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)

Key = Hashable
Terms = Dict[Key, "Rational"]


def Q(value) -> "Rational":
    """Coerce ints, strings like ``"-3/2"`` and rationals to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, float):
        raise TypeError("floating point scalars are not accepted; use 'p/q' strings")
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        try:
            return gmpy2.mpq(text)
        except ValueError:
            raise ValueError(f"not a rational literal: {value!r}") from None
    return gmpy2.mpq(value)


def format_rational(q) -> str:
    """Serialize as ``"p/q"``; integers omit the denominator."""
    return str(Q(q))


def binom(n: int, k: int) -> "Rational":
    """Binomial coefficient extended to any integer ``n`` by the falling factorial."""
    if k < 0:
        return ZERO
    return gmpy2.mpq(gmpy2.bincoef(n, k))


def inv_factorial(j: int) -> "Rational":
    return gmpy2.mpq(1, gmpy2.fac(j))


# ---------------------------------------------------------------------------
# raw sparse dictionaries (the hot path works on these directly)


def add_into(acc: Terms, terms: Mapping[Key, "Rational"], scale=ONE) -> None:
    """``acc += scale * terms`` with zero purging."""
    if not scale:
        return
    for key, coeff in terms.items():
        value = acc.get(key, ZERO) + scale * coeff
        if value:
            acc[key] = value
        else:
            acc.pop(key, None)


def scale_terms(terms: Mapping[Key, "Rational"], scale) -> Terms:
    if not scale:
        return {}
    return {k: c * scale for k, c in terms.items()}


# ---------------------------------------------------------------------------
# graded spaces and vectors


class PBWMonomial(tuple):
    """Normally ordered creation monomial ``x1(n1) x2(n2) ... |top>``.

    A tuple of ``(generator, mode)`` pairs with every mode negative, sorted by
    mode descending and then generator index ascending.  The top vector is
    implied by the space the monomial lives in.
    """

    __slots__ = ()

    def __new__(cls, factors: Iterable[Tuple[int, int]] = ()):
        factors = tuple((int(g), int(n)) for g, n in factors)
        for _, n in factors:
            if n >= 0:
                raise ValueError(f"creation modes must be negative, got {n}")
        if list(factors) != sorted(factors, key=normal_order_key):
            raise ValueError(f"factors not in normal order: {factors}")
        return super().__new__(cls, factors)

    @property
    def weight(self) -> int:
        return -sum(n for _, n in self)

    def __repr__(self) -> str:
        if not self:
            return "|0>"
        return " ".join(f"x{g}({n})" for g, n in self) + " |0>"


def normal_order_key(factor: Tuple[int, int]) -> Tuple[int, int]:
    gen, mode = factor
    return (-mode, gen)


def monomial_sort_key(mono: Sequence[Tuple[int, int]]):
    return tuple(normal_order_key(f) for f in mono)


class GradedSpace:
    """A graded vector space truncated to levels ``0..max_degree``.

    Subclasses implement :meth:`_enumerate_level` and :meth:`level_of`.
    """

    tag: str = "space"

    def __init__(self, max_degree: int):
        if max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        self.max_degree = int(max_degree)
        self._bases: Dict[int, Tuple[Key, ...]] = {}
        self._index: Dict[Key, int] = {}

    def _enumerate_level(self, n: int) -> List[Key]:
        raise NotImplementedError

    def level_of(self, key: Key) -> int:
        raise NotImplementedError

    def basis(self, n: int) -> Tuple[Key, ...]:
        if n < 0:
            return ()
        if n > self.max_degree:
            raise OutOfWindow(n, self.max_degree, self.tag)
        cached = self._bases.get(n)
        if cached is None:
            cached = tuple(self._enumerate_level(n))
            for i, key in enumerate(cached):
                self._index[key] = i
            self._bases[n] = cached
        return cached

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    @property
    def dims(self) -> List[int]:
        return [self.dim(n) for n in range(self.max_degree + 1)]

    def index(self, key: Key) -> int:
        if key not in self._index:
            self.basis(self.level_of(key))
        return self._index[key]

    def levels(self) -> range:
        return range(self.max_degree + 1)

    def check_level(self, n: int) -> None:
        if n > self.max_degree:
            raise OutOfWindow(n, self.max_degree, self.tag)

    # vector helpers
    def vector(self, terms: Mapping[Key, object] | None = None) -> "GradedVector":
        return GradedVector(self, terms or {})

    def basis_vector(self, key: Key) -> "GradedVector":
        self.index(key)
        return GradedVector(self, {key: ONE})

    def zero(self) -> "GradedVector":
        return GradedVector(self, {})

    def describe_key(self, key: Key) -> str:
        return repr(key)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.tag} N={self.max_degree}>"


class GradedVector:
    """Immutable sparse vector in a :class:`GradedSpace`."""

    __slots__ = ("space", "terms")

    def __init__(self, space: GradedSpace, terms: Mapping[Key, object]):
        clean: Terms = {}
        for key, coeff in terms.items():
            q = Q(coeff)
            if q:
                clean[key] = q
        self.space = space
        self.terms = clean

    @classmethod
    def _raw(cls, space: GradedSpace, terms: Terms) -> "GradedVector":
        obj = cls.__new__(cls)
        obj.space = space
        obj.terms = terms
        return obj

    def _same_space(self, other: "GradedVector") -> None:
        if self.space.tag != other.space.tag:
            raise CarrierMismatch(self.space.tag, other.space.tag)

    def __add__(self, other: "GradedVector") -> "GradedVector":
        self._same_space(other)
        acc = dict(self.terms)
        add_into(acc, other.terms)
        return GradedVector._raw(self.space, acc)

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        self._same_space(other)
        acc = dict(self.terms)
        add_into(acc, other.terms, -ONE)
        return GradedVector._raw(self.space, acc)

    def __neg__(self) -> "GradedVector":
        return GradedVector._raw(self.space, scale_terms(self.terms, -ONE))

    def __mul__(self, scalar) -> "GradedVector":
        return GradedVector._raw(self.space, scale_terms(self.terms, Q(scalar)))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self.space.tag == other.space.tag and self.terms == other.terms

    def __hash__(self):
        return hash((self.space.tag, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator[Tuple[Key, "Rational"]]:
        return iter(self.sorted_terms())

    def coefficient(self, key: Key) -> "Rational":
        return self.terms.get(key, ZERO)

    def component(self, n: int) -> "GradedVector":
        level = self.space.level_of
        return GradedVector._raw(
            self.space, {k: c for k, c in self.terms.items() if level(k) == n}
        )

    def levels(self) -> List[int]:
        return sorted({self.space.level_of(k) for k in self.terms})

    def weight(self) -> int:
        """Level of a nonzero homogeneous vector."""
        levels = self.levels()
        if len(levels) != 1:
            raise ValueError(f"vector is not homogeneous (levels {levels})")
        return levels[0]

    def is_homogeneous(self) -> bool:
        return len(self.levels()) <= 1

    def sorted_terms(self) -> List[Tuple[Key, "Rational"]]:
        space = self.space
        return sorted(
            self.terms.items(), key=lambda kc: (space.level_of(kc[0]), space.index(kc[0]))
        )

    def __repr__(self) -> str:
        if not self.terms:
            return f"0 [{self.space.tag}]"
        body = " + ".join(
            f"({format_rational(c)})*{self.space.describe_key(k)}" for k, c in self.sorted_terms()
        )
        return f"{body} [{self.space.tag}]"


def linear_combine(coeffs: Sequence[object], vecs: Sequence[GradedVector]) -> GradedVector:
    """Exact linear combination ``sum(c * v)`` of vectors sharing one carrier."""
    if len(coeffs) != len(vecs):
        raise ValueError("coefficient and vector counts differ")
    if not vecs:
        raise ValueError("need at least one vector to fix the carrier")
    space = vecs[0].space
    acc: Terms = {}
    for c, v in zip(coeffs, vecs):
        if v.space.tag != space.tag:
            raise CarrierMismatch(space.tag, v.space.tag)
        add_into(acc, v.terms, Q(c))
    return GradedVector._raw(space, acc)


def dual_pairing(f: GradedVector, v: GradedVector) -> "Rational":
    """Pair a dual vector with a vector against the coordinate dual basis.

    Dual spaces expose ``source`` (the space they are dual to) and use keys
    ``("*", key)`` so that ``<("*", b), b'> = delta(b, b')``.
    """
    source = getattr(f.space, "source", None)
    if source is None or source.tag != v.space.tag:
        raise CarrierMismatch(f"dual of {v.space.tag}", f.space.tag)
    total = ZERO
    for (star, key), coeff in f.terms.items():
        other = v.terms.get(key)
        if other is not None:
            total += coeff * other
    return total


class LevelwiseMatrix:
    """Per-level blocks of a degree-``shift`` linear map between graded spaces.

    ``blocks[n]`` is a list of rows indexed by the target basis of level
    ``n + shift``; its columns are indexed by the source basis of level ``n``.
    Missing levels are zero blocks.
    """

    def __init__(
        self,
        source: GradedSpace,
        target: GradedSpace,
        blocks: Mapping[int, Sequence[Sequence[object]]] | None = None,
        shift: int = 0,
    ):
        self.source = source
        self.target = target
        self.shift = int(shift)
        self.blocks: Dict[int, Tuple[Tuple["Rational", ...], ...]] = {}
        for n, block in (blocks or {}).items():
            n = int(n)
            rows = tuple(tuple(Q(x) for x in row) for row in block)
            self._check_shape(n, rows)
            if any(x for row in rows for x in row):
                self.blocks[n] = rows

    def _check_shape(self, n: int, rows) -> None:
        if n < 0 or n > self.source.max_degree:
            raise OutOfWindow(n, self.source.max_degree, self.source.tag)
        tn = n + self.shift
        cols = self.source.dim(n)
        if tn < 0 or tn > self.target.max_degree:
            if any(x for row in rows for x in row):
                raise ValueError(f"level {n} maps outside target window")
            return
        if len(rows) != self.target.dim(tn) or any(len(r) != cols for r in rows):
            raise ValueError(
                f"block at level {n} has shape {len(rows)}x{len(rows[0]) if rows else 0}, "
                f"expected {self.target.dim(tn)}x{cols}"
            )

    @classmethod
    def from_function(cls, source, target, fn, shift=0, levels=None) -> "LevelwiseMatrix":
        """Build from ``fn(basis_key) -> GradedVector`` evaluated on each source basis key."""
        blocks = {}
        for n in levels if levels is not None else source.levels():
            tn = n + shift
            if tn < 0 or tn > target.max_degree:
                continue
            tb = target.basis(tn)
            rows = [[ZERO] * source.dim(n) for _ in tb]
            for j, key in enumerate(source.basis(n)):
                image = fn(key)
                for tkey, c in image.terms.items():
                    if target.level_of(tkey) != tn:
                        raise ValueError("image is not at the shifted level")
                    rows[target.index(tkey)][j] = c
            blocks[n] = rows
        return cls(source, target, blocks, shift)

    def block(self, n: int) -> Tuple[Tuple["Rational", ...], ...]:
        got = self.blocks.get(n)
        if got is not None:
            return got
        tn = n + self.shift
        rows = self.target.dim(tn) if 0 <= tn <= self.target.max_degree else 0
        return tuple((ZERO,) * self.source.dim(n) for _ in range(rows))

    def apply_terms(self, terms: Mapping[Key, "Rational"]) -> Terms:
        acc: Terms = {}
        src = self.source
        for key, coeff in terms.items():
            n = src.level_of(key)
            rows = self.blocks.get(n)
            if rows is None:
                continue
            tb = self.target.basis(n + self.shift)
            j = src.index(key)
            for i, row in enumerate(rows):
                x = row[j]
                if x:
                    value = acc.get(tb[i], ZERO) + x * coeff
                    if value:
                        acc[tb[i]] = value
                    else:
                        del acc[tb[i]]
        return acc

    def __call__(self, v: GradedVector) -> GradedVector:
        if v.space.tag != self.source.tag:
            raise CarrierMismatch(self.source.tag, v.space.tag)
        return GradedVector._raw(self.target, self.apply_terms(v.terms))

    def image_of_key(self, key: Key) -> Terms:
        return self.apply_terms({key: ONE})

    def transpose_entry(self, n: int, i: int, j: int) -> "Rational":
        return self.block(n)[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LevelwiseMatrix):
            return NotImplemented
        return (
            self.source.tag == other.source.tag
            and self.target.tag == other.target.tag
            and self.shift == other.shift
            and self.blocks == other.blocks
        )

    def __repr__(self) -> str:
        return (
            f"<LevelwiseMatrix {self.source.tag}->{self.target.tag} shift={self.shift} "
            f"levels={sorted(self.blocks)}>"
        )


# ---------------------------------------------------------------------------
# small dense exact linear algebra (delegated to sympy's DomainMatrix over QQ)


def _domain_matrix(rows):
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    rows = [[QQ.convert(Q(x)) for x in row] for row in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), QQ)


def matrix_rank(rows: Sequence[Sequence[object]]) -> int:
    if not rows or not rows[0]:
        return 0
    return int(_domain_matrix(rows).rank())


def matrix_inverse(rows: Sequence[Sequence[object]]) -> List[List["Rational"]]:
    """Exact inverse; raises ``ValueError`` for singular input."""
    if not rows:
        return []
    from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

    try:
        inv = _domain_matrix(rows).inv()
    except DMNonInvertibleMatrixError:
        raise ValueError("matrix is singular") from None
    return [[Q(x) for x in row] for row in inv.to_list()]


def matmul(a: Sequence[Sequence[object]], b: Sequence[Sequence[object]]) -> List[List["Rational"]]:
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    return [
        [sum((a[i][k] * b[k][j] for k in range(inner)), ZERO) for j in range(ncols)]
        for i in range(len(a))
    ]


def transpose(a: Sequence[Sequence[object]]) -> List[List[object]]:
    return [list(col) for col in zip(*a)] if a else []
