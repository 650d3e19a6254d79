"""The evaluation functor: ladders as exact sparse matrices on tensor products
of quantized exterior powers.

Basis vectors of the a-th exterior power are x_S for size-a subsets S of
{1..n}, stored as bitmasks and enumerated in colexicographic (= numeric)
order. Tensor factors are indexed row-major, first factor slowest.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    InvalidPattern,
    LabelOutOfRange,
)
from .qring import (
    ONE,
    LaurentPoly,
    RatFun,
    ZERO,
    packed_matmul,
    poly_exact_div,
    poly_gcd,
    qbinom,
)
from .webs import Ladder, Rung, Tilt, flip, light_ladder, mirror, neutral_sort
from .weights import Path, enumerate_paths, path_leq


def ell(s_mask: int, t_mask: int) -> int:
    """Number of pairs i < j with i in S and j in T (subsets as bitmasks)."""
    count = 0
    m = s_mask
    while m:
        low = m & -m
        i = low.bit_length() - 1
        count += (t_mask >> (i + 1)).bit_count()
        m ^= low
    return count


def ell_sets(s: Iterable[int], t: Iterable[int]) -> int:
    """ell on subsets given as iterables of elements of {1..n}."""
    sm = 0
    for i in s:
        sm |= 1 << (i - 1)
    tm = 0
    for j in t:
        tm |= 1 << (j - 1)
    return ell(sm, tm)


@lru_cache(maxsize=None)
def subsets(n: int, a: int) -> tuple[int, ...]:
    """All size-a subsets of {1..n} as bitmasks, in colex (numeric) order."""
    if not 0 <= a <= n:
        raise LabelOutOfRange(f"subset size {a} outside [0,{n}]")
    return tuple(m for m in range(1 << n) if m.bit_count() == a)


@lru_cache(maxsize=None)
def _subset_index(n: int, a: int) -> dict[int, int]:
    return {m: i for i, m in enumerate(subsets(n, a))}


def _sign_pow(k: int) -> int:
    return -1 if k % 2 else 1


def _mono(sign: int, exp: int) -> LaurentPoly:
    return LaurentPoly.monomial(exp, sign)


@lru_cache(maxsize=None)
def _rung_local(n: int, a: int, b: int, tilt: Tilt, s: int):
    """Action of a rung on a pair of factors: {(A,B): [((C,D), coeff), ...]}.

    NE with crossbar s is (id (x) merge(s,b)) o (split(a-s,s) (x) id);
    NW is (merge(a,s) (x) id) o (id (x) split(s,b-s)).
    """
    out: dict[tuple[int, int], list[tuple[tuple[int, int], LaurentPoly]]] = {}
    if tilt is Tilt.NE:
        c, d = a - s, b + s
        if not (0 <= c <= n and 0 <= d <= n):
            raise LabelOutOfRange(f"NE rung ({a},{b})->({c},{d}) outside [0,{n}]")
        split_sign = _sign_pow((a - s) * s)
        for amask in subsets(n, a):
            for bmask in subsets(n, b):
                terms = []
                # U runs over (a-s)-subsets of A; R = A \ U is merged into B.
                for umask in subsets(n, a - s):
                    if umask & amask != umask:
                        continue
                    rmask = amask ^ umask
                    if rmask & bmask:
                        continue
                    exp = ell(rmask, bmask) - ell(rmask, umask)
                    sign = split_sign * _sign_pow(exp)
                    terms.append(((umask, rmask | bmask), _mono(sign, exp)))
                if terms:
                    out[(amask, bmask)] = terms
    else:
        c, d = a + s, b - s
        if not (0 <= c <= n and 0 <= d <= n):
            raise LabelOutOfRange(f"NW rung ({a},{b})->({c},{d}) outside [0,{n}]")
        split_sign = _sign_pow(s * (b - s))
        for amask in subsets(n, a):
            for bmask in subsets(n, b):
                terms = []
                # U runs over s-subsets of B; U is merged into A.
                for umask in subsets(n, s):
                    if umask & bmask != umask:
                        continue
                    rmask = bmask ^ umask
                    if umask & amask:
                        continue
                    exp = ell(amask, umask) - ell(rmask, umask)
                    sign = split_sign * _sign_pow(exp)
                    terms.append(((amask | umask, rmask), _mono(sign, exp)))
                if terms:
                    out[(amask, bmask)] = terms
    return out


@dataclass(frozen=True)
class TensorBasis:
    """Basis of a tensor product of exterior powers, indexed by tuples of
    subsets (S_1..S_d), |S_i| = labels[i]."""

    n: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= x <= self.n for x in self.labels):
            raise LabelOutOfRange(f"labels {self.labels} outside [0,{self.n}]")

    @property
    def dim(self) -> int:
        d = 1
        for a in self.labels:
            d *= len(subsets(self.n, a))
        return d

    def tuples(self) -> Iterable[tuple[int, ...]]:
        """All basis tuples in index order (row-major, first factor slowest)."""
        return itertools.product(*(subsets(self.n, a) for a in self.labels))

    def index_of(self, masks: Sequence[int]) -> int:
        idx = 0
        for a, m in zip(self.labels, masks):
            idx = idx * len(subsets(self.n, a)) + _subset_index(self.n, a)[m]
        return idx

    def tuple_of(self, idx: int) -> tuple[int, ...]:
        out = []
        for a in reversed(self.labels):
            ss = subsets(self.n, a)
            idx, r = divmod(idx, len(ss))
            out.append(ss[r])
        return tuple(reversed(out))

    def top_tuple(self) -> tuple[int, ...]:
        """x_top: every factor at its initial segment [1, a]."""
        return tuple((1 << a) - 1 for a in self.labels)

    def top_index(self) -> int:
        return self.index_of(self.top_tuple())

    def weight_of_tuple(self, masks: Sequence[int]) -> tuple[int, ...]:
        """gl_n weight: how many factors contain each of 1..n."""
        w = [0] * self.n
        for m in masks:
            while m:
                low = m & -m
                w[low.bit_length() - 1] += 1
                m ^= low
        return tuple(w)


class EvalMatrix:
    """A sparse exact matrix between tensor bases.

    Entries are rational functions; internally they are Laurent-polynomial
    numerators over one common denominator, which keeps products fast.
    """

    __slots__ = ("rows", "cols", "_rows", "den")

    def __init__(
        self,
        rows: TensorBasis,
        cols: TensorBasis,
        rows_data: Mapping[int, Mapping[int, LaurentPoly]] | None = None,
        den: LaurentPoly = ONE,
    ):
        self.rows = rows
        self.cols = cols
        self._rows: dict[int, dict[int, LaurentPoly]] = {
            i: {j: v for j, v in r.items() if v}
            for i, r in (rows_data or {}).items()
        }
        self._rows = {i: r for i, r in self._rows.items() if r}
        if den.is_zero():
            raise DimensionMismatch("zero denominator in EvalMatrix")
        self.den = den

    # -- construction helpers ------------------------------------------

    @staticmethod
    def identity(basis: TensorBasis) -> EvalMatrix:
        return EvalMatrix(
            basis, basis, {i: {i: ONE} for i in range(basis.dim)}
        )

    @staticmethod
    def zero(rows: TensorBasis, cols: TensorBasis) -> EvalMatrix:
        return EvalMatrix(rows, cols, {})

    # -- inspection ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.dim, self.cols.dim

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def is_zero(self) -> bool:
        return not self._rows

    def entry(self, i: int, j: int) -> RatFun:
        v = self._rows.get(i, {}).get(j)
        if v is None:
            return RatFun(ZERO)
        return RatFun(v, self.den)

    def items(self) -> Iterable[tuple[int, int, RatFun]]:
        for i in sorted(self._rows):
            row = self._rows[i]
            for j in sorted(row):
                yield i, j, RatFun(row[j], self.den)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvalMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        keys = set()
        for i, r in self._rows.items():
            keys.update((i, j) for j in r)
        for i, r in other._rows.items():
            keys.update((i, j) for j in r)
        for i, j in keys:
            a = self._rows.get(i, {}).get(j, ZERO)
            b = other._rows.get(i, {}).get(j, ZERO)
            if a * other.den != b * self.den:
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    # -- algebra ----------------------------------------------------------

    def compose(self, other: EvalMatrix) -> EvalMatrix:
        """self o other (apply other first)."""
        if other.rows.dim != self.cols.dim:
            raise DimensionMismatch(
                f"compose {self.shape} with {other.shape}"
            )
        data = packed_matmul(self._rows, other._rows)
        return EvalMatrix(self.rows, other.cols, data, self.den * other.den)

    def __matmul__(self, other: EvalMatrix) -> EvalMatrix:
        return self.compose(other)

    def add(self, other: EvalMatrix, sign: int = 1) -> EvalMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"add {self.shape} with {other.shape}")
        out: dict[int, dict[int, LaurentPoly]] = {}
        for i, r in self._rows.items():
            out[i] = {j: v * other.den for j, v in r.items()}
        for i, r in other._rows.items():
            row = out.setdefault(i, {})
            for j, v in r.items():
                w = v * self.den * sign
                cur = row.get(j)
                nv = w if cur is None else cur + w
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
        return EvalMatrix(self.rows, self.cols, out, self.den * other.den)

    def sub(self, other: EvalMatrix) -> EvalMatrix:
        return self.add(other, -1)

    def scale(self, c: RatFun | LaurentPoly | int) -> EvalMatrix:
        c = RatFun.coerce(c)
        if c.is_zero():
            return EvalMatrix.zero(self.rows, self.cols)
        out = {
            i: {j: v * c.num for j, v in r.items()} for i, r in self._rows.items()
        }
        return EvalMatrix(self.rows, self.cols, out, self.den * c.den)

    def transpose_shape(self) -> tuple[int, int]:
        return self.cols.dim, self.rows.dim

    def trace(self) -> RatFun:
        if self.rows.dim != self.cols.dim:
            raise DimensionMismatch("trace of a non-square matrix")
        t = ZERO
        for i, r in self._rows.items():
            v = r.get(i)
            if v is not None:
                t = t + v
        return RatFun(t, self.den)

    def reduced(self) -> EvalMatrix:
        """Divide out the gcd of the denominator and all numerators.

        The gcd is guessed from the denominator and a small sample of entries,
        then validated by exact division of every entry (falling back to the
        full gcd chain in the rare case the sample was too optimistic).
        """
        if not self._rows:
            return EvalMatrix(self.rows, self.cols, {}, ONE)
        values = [v for r in self._rows.values() for v in r.values()]
        g = self.den
        for v in values[:24]:
            g = poly_gcd(g, v)
            if g.is_one():
                break
        out = None
        if not g.is_one():
            out = self._try_divide_all(g)
            if out is None:
                for v in values:
                    g = poly_gcd(g, v)
                    if g.is_one():
                        break
                if not g.is_one():
                    out = self._try_divide_all(g)
                    assert out is not None
        if out is None:
            g = ONE
            out = {i: dict(r) for i, r in self._rows.items()}
        den = poly_exact_div(self.den, g) if not g.is_one() else self.den
        # normalize: no q-power factor in the denominator, positive lead
        v = den.valuation()
        lead = 1 if den.leading_coefficient() > 0 else -1
        if v or lead < 0:
            den = den.shift(-v) * lead
            for r in out.values():
                for j in r:
                    r[j] = r[j].shift(-v) * lead
        return EvalMatrix(self.rows, self.cols, out, den)

    def _try_divide_all(self, g: LaurentPoly) -> dict[int, dict[int, LaurentPoly]] | None:
        from .qring import poly_divmod

        out: dict[int, dict[int, LaurentPoly]] = {}
        for i, r in self._rows.items():
            row = {}
            for j, val in r.items():
                quot, rem = poly_divmod(val, g)
                if rem:
                    return None
                row[j] = quot
            out[i] = row
        return out

    def tensor_identity_right(self, label: int) -> EvalMatrix:
        """self (x) identity of one extra factor with the given label."""
        n = self.rows.n
        extra = len(subsets(n, label))
        rows = TensorBasis(n, self.rows.labels + (label,))
        cols = TensorBasis(n, self.cols.labels + (label,))
        out: dict[int, dict[int, LaurentPoly]] = {}
        for i, r in self._rows.items():
            for t in range(extra):
                out[i * extra + t] = {j * extra + t: v for j, v in r.items()}
        return EvalMatrix(rows, cols, out, self.den)

    def reindex(self, rows: TensorBasis, cols: TensorBasis,
                row_map: Callable[[int], int] | None = None,
                col_map: Callable[[int], int] | None = None) -> EvalMatrix:
        """Relabel coordinates via bijections of basis indices."""
        out: dict[int, dict[int, LaurentPoly]] = {}
        for i, r in self._rows.items():
            ni = row_map(i) if row_map else i
            out[ni] = {(col_map(j) if col_map else j): v for j, v in r.items()}
        return EvalMatrix(rows, cols, out, self.den)

    def apply_to_vector(self, vec: Mapping[int, LaurentPoly]) -> dict[int, LaurentPoly]:
        """Matrix times a sparse column vector of polynomials (ignores den)."""
        out: dict[int, LaurentPoly] = {}
        for i, r in self._rows.items():
            acc = ZERO
            hit = False
            for j, v in r.items():
                w = vec.get(j)
                if w is not None:
                    acc = acc + v * w
                    hit = True
            if hit and acc:
                out[i] = acc
        return out

    def specialize(self, value: Fraction) -> dict[tuple[int, int], Fraction]:
        d = self.den.evaluate(value)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the chosen point")
        return {
            (i, j): v.evaluate(value) / d
            for i, r in self._rows.items()
            for j, v in r.items()
        }

    def to_json(self) -> dict:
        return {
            "rows": self.rows.dim,
            "cols": self.cols.dim,
            "entries": [
                [i, j, val.to_json()] for i, j, val in self.items()
            ],
        }

    def __repr__(self) -> str:
        return f"EvalMatrix({self.rows.dim}x{self.cols.dim}, nnz={self.nnz()})"


def merge_matrix(a: int, b: int, n: int) -> EvalMatrix:
    """The merge map V_a (x) V_b -> V_{a+b}: x_S (x) x_T -> (-q)^ell(S,T) x_{S u T}."""
    if a + b > n or a < 0 or b < 0:
        raise LabelOutOfRange(f"merge({a},{b}) needs 0 <= a+b <= {n}")
    rows = TensorBasis(n, (a + b,))
    cols = TensorBasis(n, (a, b))
    out: dict[int, dict[int, LaurentPoly]] = {}
    for j, (smask, tmask) in enumerate(cols.tuples()):
        if smask & tmask:
            continue
        e = ell(smask, tmask)
        i = rows.index_of((smask | tmask,))
        out.setdefault(i, {})[j] = _mono(_sign_pow(e), e)
    return EvalMatrix(rows, cols, out)


def split_matrix(a: int, b: int, n: int) -> EvalMatrix:
    """The split map V_{a+b} -> V_a (x) V_b with entries (-1)^{ab}(-q)^{-ell(S\\T,T)}."""
    if a + b > n or a < 0 or b < 0:
        raise LabelOutOfRange(f"split({a},{b}) needs 0 <= a+b <= {n}")
    rows = TensorBasis(n, (a, b))
    cols = TensorBasis(n, (a + b,))
    sign0 = _sign_pow(a * b)
    out: dict[int, dict[int, LaurentPoly]] = {}
    for j, (smask,) in enumerate(cols.tuples()):
        for tmask in subsets(n, a):
            if tmask & smask != tmask:
                continue
            rest = smask ^ tmask
            e = -ell(rest, tmask)
            i = rows.index_of((tmask, rest))
            out.setdefault(i, {})[j] = _mono(sign0 * _sign_pow(e), e)
    return EvalMatrix(rows, cols, out)


def eval_rung(left: int, right: int, rung: Rung, n: int) -> EvalMatrix:
    """Evaluate a single rung applied at labels (left, right)."""
    if rung.s == 0:
        return EvalMatrix.identity(TensorBasis(n, (left, right)))
    local = _rung_local(n, left, right, rung.tilt, rung.s)
    c, d = rung.outputs(left, right)
    rows = TensorBasis(n, (c, d))
    cols = TensorBasis(n, (left, right))
    out: dict[int, dict[int, LaurentPoly]] = {}
    for j, pair in enumerate(cols.tuples()):
        for (od, coeff) in local.get(pair, ()):
            i = rows.index_of(od)
            out.setdefault(i, {})[j] = coeff
    return EvalMatrix(rows, cols, out)


def _propagate(
    ladder: Ladder, vectors: dict[object, dict[tuple[int, ...], LaurentPoly]]
) -> dict[object, dict[tuple[int, ...], LaurentPoly]]:
    """Push sparse vectors (keyed by basis tuples of the bottom) through the
    ladder, one rung at a time."""
    n = ladder.n
    levels = ladder.levels()
    for step, rung in enumerate(ladder.rungs):
        a, b = levels[step][rung.pos], levels[step][rung.pos + 1]
        local = _rung_local(n, a, b, rung.tilt, rung.s)
        p = rung.pos
        nxt: dict[object, dict[tuple[int, ...], LaurentPoly]] = {}
        for key, vec in vectors.items():
            acc: dict[tuple[int, ...], LaurentPoly] = {}
            for tup, coeff in vec.items():
                for (od, rc) in local.get((tup[p], tup[p + 1]), ()):
                    ntup = tup[:p] + od + tup[p + 2 :]
                    cur = acc.get(ntup)
                    nv = coeff * rc if cur is None else cur + coeff * rc
                    if nv:
                        acc[ntup] = nv
                    else:
                        acc.pop(ntup, None)
            nxt[key] = acc
        vectors = nxt
    return vectors


def eval_ladder(ladder: Ladder) -> EvalMatrix:
    """Bottom-to-top product of rung evaluations; the empty ladder is the identity."""
    cols = TensorBasis(ladder.n, ladder.bottom)
    rows = TensorBasis(ladder.n, ladder.top)
    vectors: dict[object, dict[tuple[int, ...], LaurentPoly]] = {
        j: {tup: ONE} for j, tup in enumerate(cols.tuples())
    }
    vectors = _propagate(ladder, vectors)
    out: dict[int, dict[int, LaurentPoly]] = {}
    for j, vec in vectors.items():
        for tup, val in vec.items():
            out.setdefault(rows.index_of(tup), {})[j] = val
    return EvalMatrix(rows, cols, out)


def eval_ladder_columns(
    ladder: Ladder, columns: dict[object, tuple[int, ...]]
) -> dict[object, dict[tuple[int, ...], LaurentPoly]]:
    """Apply the ladder to selected bottom basis tuples, returning sparse
    images keyed like the input."""
    vectors = {key: {tup: ONE} for key, tup in columns.items()}
    return _propagate(ladder, vectors)


# ---------------------------------------------------------------------------
# Relation checking
# ---------------------------------------------------------------------------


@dataclass
class RelationCase:
    relation: str
    labels: tuple[int, ...]
    mirrored: bool
    ok: bool
    detail: str = ""


RELATIONS = ("associativity", "rungsquash", "rungswap", "R3", "bigon", "circle")


def _lincomb(
    terms: list[tuple[LaurentPoly, Ladder]], rows: TensorBasis, cols: TensorBasis
) -> EvalMatrix:
    acc = EvalMatrix.zero(rows, cols)
    for coeff, ladder in terms:
        if coeff.is_zero():
            continue
        acc = acc.add(eval_ladder(ladder).scale(coeff))
    return acc


def _maybe_ladder(n: int, bottom: Sequence[int], rungs: list[tuple[int, Tilt, int]]) -> Ladder | None:
    """Build a ladder, or None when an intermediate label leaves [0, n]
    (such webs are zero)."""
    try:
        return Ladder(
            n, tuple(bottom), tuple(Rung(p, t, s) for p, t, s in rungs if s > 0)
        )
    except LabelOutOfRange:
        return None


def check_relation(
    relation: str, labels: tuple[int, ...], n: int, mirrored: bool = False
) -> RelationCase:
    """Check one web relation instance as an exact matrix identity.

    Labels per relation:
      associativity: (k, l, m)         merge order invariance
      rungsquash:    (k, l, s, r)      two stacked NE rungs squash to one
      rungswap:      (k, l, s, r)      NE s then NW r against the swapped order
      R3:            (a, b, c, r, s, t) the Coxeter-style rung relation
      bigon:         (k, l) and variant through n-k
      circle:        (k,)              closed circle evaluates to [n choose k]
    """
    if relation not in RELATIONS:
        raise InvalidPattern(f"unknown relation {relation!r}")
    builder = _RELATION_BUILDERS[relation]
    lhs_terms, rhs_terms, bottom = builder(labels, n)
    if lhs_terms is None:
        raise InvalidPattern(f"labels {labels} not admissible for {relation}")
    if mirrored:
        lhs_terms = [(c, mirror(l)) for c, l in lhs_terms]
        rhs_terms = [(c, mirror(l)) for c, l in rhs_terms]
        bottom = tuple(reversed(bottom))
    tops = [l.top for _, l in lhs_terms + rhs_terms]
    top = tops[0]
    if any(t != top for t in tops):
        raise InvalidPattern(f"sides have mismatched boundaries for {relation}{labels}")
    rows = TensorBasis(n, top)
    cols = TensorBasis(n, tuple(bottom))
    lhs = _lincomb(lhs_terms, rows, cols)
    rhs = _lincomb(rhs_terms, rows, cols)
    ok = lhs == rhs
    detail = "" if ok else f"lhs {lhs!r} != rhs {rhs!r}"
    return RelationCase(relation, tuple(labels), mirrored, ok, detail)


def _build_associativity(labels, n):
    k, l, m = labels
    if min(k, l, m) < 0 or k + l + m > n:
        return None, None, None
    bottom = (k, l, m)
    lhs = _maybe_ladder(n, bottom, [(0, Tilt.NE, k), (1, Tilt.NE, k + l)])
    rhs = _maybe_ladder(
        n, bottom, [(1, Tilt.NE, l), (0, Tilt.NE, k), (1, Tilt.NE, k)]
    )
    if lhs is None or rhs is None:
        return None, None, None
    return [(ONE, lhs)], [(ONE, rhs)], bottom


def _build_rungsquash(labels, n):
    k, l, s, r = labels
    if min(k, l, s, r) < 0:
        return None, None, None
    bottom = (k, l)
    lhs = _maybe_ladder(n, bottom, [(0, Tilt.NE, s), (0, Tilt.NE, r)])
    rhs = _maybe_ladder(n, bottom, [(0, Tilt.NE, s + r)])
    if lhs is None or rhs is None:
        return None, None, None
    return [(ONE, lhs)], [(qbinom(r + s, r), rhs)], bottom


def _build_rungswap(labels, n):
    k, l, s, r = labels
    if min(k, l, s, r) < 0:
        return None, None, None
    bottom = (k, l)
    lhs = _maybe_ladder(n, bottom, [(0, Tilt.NE, s), (0, Tilt.NW, r)])
    if lhs is None:
        return None, None, None
    rhs_terms = []
    for t in range(0, min(r, s) + 1):
        lad = _maybe_ladder(n, bottom, [(0, Tilt.NW, r - t), (0, Tilt.NE, s - t)])
        if lad is None:
            continue
        rhs_terms.append((qbinom(k - l + r - s, t), lad))
    return [(ONE, lhs)], rhs_terms, bottom


def _build_r3(labels, n):
    a, b, c, r, s, t = labels
    if min(a, b, c, r, s, t) < 0:
        return None, None, None
    bottom = (a, b, c)
    lhs = _maybe_ladder(
        n, bottom, [(1, Tilt.NE, r), (0, Tilt.NE, s), (1, Tilt.NE, t)]
    )
    if lhs is None:
        return None, None, None
    m = r + t
    rhs_terms = []
    for nn in range(0, s + 1):
        ll = s - nn
        lad = _maybe_ladder(
            n, bottom, [(0, Tilt.NE, nn), (1, Tilt.NE, m), (0, Tilt.NE, ll)]
        )
        if lad is None:
            continue
        rhs_terms.append((qbinom(m - s, t - nn), lad))
    return [(ONE, lhs)], rhs_terms, bottom


def _build_bigon(labels, n):
    k, l = labels
    if k < 0 or l < 0 or k + l > n:
        return None, None, None
    bottom = (k + l, 0)
    lhs = _maybe_ladder(n, bottom, [(0, Tilt.NE, l), (0, Tilt.NW, l)])
    rhs = _maybe_ladder(n, bottom, [])
    if lhs is None or rhs is None:
        return None, None, None
    return [(ONE, lhs)], [(qbinom(k + l, l), rhs)], bottom


def _build_bigon_dual(labels, n):
    k, l = labels
    if k < 0 or l < 0 or k > n or l > n - k:
        return None, None, None
    bottom = (k, n)
    lhs = _maybe_ladder(n, bottom, [(0, Tilt.NW, l), (0, Tilt.NE, l)])
    rhs = _maybe_ladder(n, bottom, [])
    if lhs is None or rhs is None:
        return None, None, None
    return [(ONE, lhs)], [(qbinom(n - k, l), rhs)], bottom


def _build_circle(labels, n):
    (k,) = labels
    if not 0 <= k <= n:
        return None, None, None
    bottom = (0, n)
    lhs = _maybe_ladder(n, bottom, [(0, Tilt.NW, k), (0, Tilt.NE, k)])
    rhs = _maybe_ladder(n, bottom, [])
    if lhs is None or rhs is None:
        return None, None, None
    return [(ONE, lhs)], [(qbinom(n, k), rhs)], bottom


_RELATION_BUILDERS = {
    "associativity": _build_associativity,
    "rungsquash": _build_rungsquash,
    "rungswap": _build_rungswap,
    "R3": _build_r3,
    "bigon": _build_bigon,
    "circle": _build_circle,
}


def relation_sweep(relation: str, n: int, include_mirror: bool = True) -> list[RelationCase]:
    """Check a relation over all admissible label tuples with labels in [0, n]."""
    cases: list[RelationCase] = []
    rng = range(n + 1)

    def run(labels):
        for mirrored in (False,) if not include_mirror else (False, True):
            try:
                cases.append(check_relation(relation, labels, n, mirrored))
            except InvalidPattern:
                return

    if relation == "associativity":
        for k, l, m in itertools.product(rng, repeat=3):
            if k + l + m <= n:
                run((k, l, m))
    elif relation in ("rungsquash", "rungswap"):
        for labels in itertools.product(rng, repeat=4):
            run(labels)
    elif relation == "R3":
        for a, b, c in itertools.product(rng, repeat=3):
            for r, s, t in itertools.product(rng, repeat=3):
                run((a, b, c, r, s, t))
    elif relation == "bigon":
        for k, l in itertools.product(rng, repeat=2):
            if k + l <= n:
                run((k, l))
            # dual variant through n-k, checked without the generic plumbing
            res = _build_bigon_dual((k, l), n)
            if res[0] is not None:
                lhs_terms, rhs_terms, bottom = res
                rows = TensorBasis(n, lhs_terms[0][1].top)
                cols = TensorBasis(n, bottom)
                ok = _lincomb(lhs_terms, rows, cols) == _lincomb(rhs_terms, rows, cols)
                cases.append(RelationCase("bigon-dual", (k, l), False, ok))
    elif relation == "circle":
        for k in rng:
            run((k,))
    else:
        raise InvalidPattern(f"unknown relation {relation!r}")
    return cases


# ---------------------------------------------------------------------------
# Triangularity
# ---------------------------------------------------------------------------


@dataclass
class TriangularityCase:
    word: tuple[int, ...]
    e: str
    f: str
    case: str
    ok: bool
    detail: str = ""


def triangularity_report(word: Sequence[int], n: int) -> list[TriangularityCase]:
    """Check the light-ladder triangularity contract on one word.

    For paths e, f: LL_e kills x_{w,f} when f > e; sends it to a unit multiple
    of x_top when f = e; and otherwise produces no x_top component.
    """
    word = tuple(word)
    paths = enumerate_paths(word, n)
    out: list[TriangularityCase] = []
    for e in paths:
        ladder = light_ladder(word, e)
        top_basis = TensorBasis(n, ladder.top)
        x_top = top_basis.top_tuple()
        columns = {
            idx: tuple(s.subset() for s in f.steps) for idx, f in enumerate(paths)
        }
        images = eval_ladder_columns(ladder, columns)
        for idx, f in enumerate(paths):
            img = images[idx]
            f_ge_e = path_leq(e, f)
            e_ge_f = path_leq(f, e)
            if f_ge_e and not e_ge_f:  # f > e
                ok = not img
                case = "f>e -> zero"
                detail = "" if ok else f"nonzero image with {len(img)} terms"
            elif f_ge_e and e_ge_f:  # f = e
                unit = img.get(x_top)
                ok = (
                    len(img) == 1
                    and unit is not None
                    and unit.is_unit_monomial()
                )
                case = "f=e -> unit*x_top"
                detail = "" if ok else f"image {img}"
            else:
                coeff = img.get(x_top, ZERO)
                ok = coeff.is_zero()
                case = "f!>=e -> no x_top"
                detail = "" if ok else f"x_top coefficient {coeff}"
            out.append(
                TriangularityCase(word, str(e), str(f), case, ok, detail)
            )
    return out


def neutral_unitriangularity(word: Sequence[int], target: Sequence[int], n: int) -> bool:
    """Lemma-level check: a neutral ladder sends x_top to a unit multiple of
    x_top and no other basis vector reaches x_top."""
    ladder = neutral_sort(tuple(word), tuple(target), n)
    mat = eval_ladder(ladder)
    rows, cols = mat.rows, mat.cols
    ti = rows.top_index()
    tj = cols.top_index()
    top_row = mat._rows.get(ti, {})
    if list(top_row.keys()) != [tj]:
        return False
    v = top_row[tj]
    if not v.is_unit_monomial():
        return False
    col_hits = [
        (i, j) for i, r in mat._rows.items() for j in r if j == tj and i != ti
    ]
    return not col_hits


# ---------------------------------------------------------------------------
# Hom-space rank certification
# ---------------------------------------------------------------------------


def _strip_positions(labels: Sequence[int], n: int) -> tuple[int, ...]:
    return tuple(i for i, x in enumerate(labels) if x not in (0, n))


def _flat_entries(mat: EvalMatrix) -> dict[tuple, LaurentPoly]:
    """Entries keyed by (stripped row tuple, stripped col tuple)."""
    n = mat.rows.n
    rkeep = _strip_positions(mat.rows.labels, n)
    ckeep = _strip_positions(mat.cols.labels, n)
    out: dict[tuple, LaurentPoly] = {}
    for i, r in mat._rows.items():
        rt = mat.rows.tuple_of(i)
        rkey = tuple(rt[p] for p in rkeep)
        for j, v in r.items():
            ct = mat.cols.tuple_of(j)
            out[(rkey, tuple(ct[p] for p in ckeep))] = v
    return out


def _fraction_rank(rows: list[dict], tol_unused=None) -> int:
    """Rank of sparse rows with Fraction values by Gaussian elimination."""
    pivots: list[tuple[object, dict]] = []
    rank = 0
    for row in rows:
        row = dict(row)
        for key, prow in pivots:
            c = row.get(key)
            if c:
                factor = c / prow[key]
                for k2, v2 in prow.items():
                    nv = row.get(k2, Fraction(0)) - factor * v2
                    if nv:
                        row[k2] = nv
                    else:
                        row.pop(k2, None)
        row = {k: v for k, v in row.items() if v}
        if row:
            key = next(iter(row))
            pivots.append((key, row))
            rank += 1
    return rank


def path_pair_count(source: Sequence[int], target: Sequence[int], n: int) -> int:
    es = enumerate_paths(tuple(source), n)
    fs = enumerate_paths(tuple(target), n)
    from collections import Counter

    ce = Counter(e.endpoint for e in es)
    cf = Counter(f.endpoint for f in fs)
    return sum(ce[w] * cf[w] for w in ce if w in cf)


def hom_rank(
    source: Sequence[int],
    target: Sequence[int],
    n: int,
    bound: int = 6,
    points: int = 3,
    seed: int = 0,
) -> int:
    """Certified rank over Q(q) of the span of double-ladder evaluations.

    Specializes q at random rational points; the maximum specialized rank is a
    lower bound for the generic rank, which the path-pair count bounds above.
    """
    source, target = tuple(source), tuple(target)
    if len(source) > bound or len(target) > bound:
        raise InvalidPattern(f"word width exceeds configured bound {bound}")
    from .webs import double_ladder

    es = enumerate_paths(source, n)
    fs = enumerate_paths(target, n)
    mats = []
    for e in es:
        for f in fs:
            if e.endpoint == f.endpoint:
                mats.append(_flat_entries(eval_ladder(double_ladder(e, f))))
    if not mats:
        return 0
    rng = random.Random(seed)
    best = 0
    for _ in range(max(points, 1)):
        num = rng.randint(2, 40)
        den_ = rng.randint(1, 7)
        val = Fraction(num, den_)
        rows = [
            {k: v.evaluate(val) for k, v in m.items()} for m in mats
        ]
        best = max(best, _fraction_rank(rows))
        if best == len(mats):
            break
    return best
