"""Weight combinatorics for sl_n: 01-sequences, dominance, inversion sets,
and enumeration of minuscule Littelmann paths (dominant weight subsequences).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidWeight, NotDominant


@dataclass(frozen=True)
class GlWeight:
    """A weight of a fundamental representation, as a 01-sequence of length n."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise InvalidWeight(f"bits must be 0/1, got {self.bits}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def a(self) -> int:
        """The fundamental index: number of 1s."""
        return sum(self.bits)

    def is_highest(self) -> bool:
        return self.bits == highest_weight(self.a, self.n).bits

    def subset(self) -> int:
        """Bitmask of {1..n} with element i present when bits[i-1] = 1."""
        m = 0
        for i, b in enumerate(self.bits):
            if b:
                m |= 1 << i
        return m

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @staticmethod
    def parse(text: str) -> GlWeight:
        return GlWeight(tuple(int(c) for c in text.strip()))


@dataclass(frozen=True)
class SlWeight:
    """An sl_n weight in fundamental-weight coordinates (length n-1)."""

    coords: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coords) + 1

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: SlWeight) -> SlWeight:
        if len(self.coords) != len(other.coords):
            raise InvalidWeight("rank mismatch")
        return SlWeight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: SlWeight) -> SlWeight:
        if len(self.coords) != len(other.coords):
            raise InvalidWeight("rank mismatch")
        return SlWeight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def level(self) -> int:
        return sum(self.coords)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)

    @staticmethod
    def parse(text: str, n: int | None = None) -> SlWeight:
        text = text.strip()
        coords = tuple(int(c) for c in text.split(",")) if text else ()
        if n is not None and len(coords) != n - 1:
            raise InvalidWeight(f"expected {n - 1} coordinates, got {len(coords)}")
        return SlWeight(coords)

    @staticmethod
    def zero(n: int) -> SlWeight:
        return SlWeight((0,) * (n - 1))

    @staticmethod
    def fundamental(a: int, n: int) -> SlWeight:
        if not 1 <= a <= n - 1:
            raise InvalidWeight(f"fundamental index {a} out of range for n={n}")
        return SlWeight(tuple(1 if i == a else 0 for i in range(1, n)))


@dataclass(frozen=True)
class PositiveRoot:
    """The positive root eps_i - eps_j for 1 <= i < j <= n."""

    i: int
    j: int

    def __post_init__(self):
        if not 1 <= self.i < self.j:
            raise InvalidWeight(f"need 1 <= i < j, got ({self.i}, {self.j})")

    def __str__(self) -> str:
        return f"e{self.i}-e{self.j}"


def omega_set(a: int, n: int) -> tuple[GlWeight, ...]:
    """Omega(a): all 01-sequences of length n with a ones, in descending
    lexicographic order (the highest weight comes first)."""
    out = [
        GlWeight(bits)
        for bits in itertools.product((1, 0), repeat=n)
        if sum(bits) == a
    ]
    return tuple(out)


def highest_weight(a: int, n: int) -> GlWeight:
    return GlWeight((1,) * a + (0,) * (n - a))


def sl_coords(mu: GlWeight) -> SlWeight:
    """The sl_n weight of a 01-sequence: coordinate i is bits[i] - bits[i+1]."""
    b = mu.bits
    return SlWeight(tuple(b[i] - b[i + 1] for i in range(len(b) - 1)))


def pairing_A(lam: SlWeight, alpha: PositiveRoot) -> int:
    """A(lambda, alpha) = <lambda + rho, alpha> = sum of (lambda_k + 1) over i <= k < j."""
    return sum(lam.coords[k - 1] + 1 for k in range(alpha.i, alpha.j))


def inversion_set(mu: GlWeight) -> frozenset[PositiveRoot]:
    """Phi(mu): roots indexed by pairs of a 0 occurring before a 1 in mu."""
    b = mu.bits
    return frozenset(
        PositiveRoot(i + 1, j + 1)
        for i in range(len(b))
        for j in range(i + 1, len(b))
        if b[i] == 0 and b[j] == 1
    )


def is_dominant_sum(lam: SlWeight, mu: GlWeight) -> bool:
    """True when lambda + weight(mu) is dominant; cross-checked against the
    inversion-set criterion (the sum fails to be dominant exactly when some
    inversion root alpha has A(lambda, alpha) = 1)."""
    direct = (lam + sl_coords(mu)).is_dominant()
    by_roots = not any(pairing_A(lam, al) - 1 == 0 for al in inversion_set(mu))
    if direct != by_roots:
        raise AssertionError(
            f"dominance criteria disagree for lambda={lam}, mu={mu}"
        )
    return direct


def dominance_leq(nu: SlWeight, lam: SlWeight) -> bool:
    """nu <= lambda in dominance order: lambda - nu is a nonnegative integer
    combination of simple roots (partial-sums criterion in eps-coordinates)."""
    if len(nu.coords) != len(lam.coords):
        raise InvalidWeight("rank mismatch")
    n = lam.n
    d = lam - nu
    # m_j = sum_i d_i * (min(i,j) - i*j/n) must be a nonnegative integer for all j.
    for j in range(1, n):
        m = sum(
            Fraction(d.coords[i - 1]) * (min(i, j) - Fraction(i * j, n))
            for i in range(1, n)
        )
        if m.denominator != 1 or m < 0:
            return False
    return True


def dominance_lt(nu: SlWeight, lam: SlWeight) -> bool:
    return nu != lam and dominance_leq(nu, lam)


@dataclass(frozen=True)
class Path:
    """A minuscule Littelmann path: one weight choice per letter of a word,
    with every prefix sum dominant."""

    word: tuple[int, ...]
    steps: tuple[GlWeight, ...]
    prefix_weights: tuple[SlWeight, ...]

    @property
    def endpoint(self) -> SlWeight:
        return self.prefix_weights[-1]

    def is_full(self) -> bool:
        return all(s.is_highest() for s in self.steps)

    def __str__(self) -> str:
        return ";".join(str(s) for s in self.steps)


def path_leq(f: Path, e: Path) -> bool:
    """Path dominance order: f <= e when every prefix weight satisfies f_i <= e_i."""
    if f.word != e.word:
        raise InvalidWeight("paths on different words are incomparable")
    return all(
        dominance_leq(fw, ew) for fw, ew in zip(f.prefix_weights, e.prefix_weights)
    )


def enumerate_paths(
    word: tuple[int, ...] | list[int],
    n: int,
    target: SlWeight | None = None,
) -> list[Path]:
    """All dominant weight subsequences of the word, in the deterministic order
    induced by descending lexicographic choice of 01-sequence at each letter."""
    word = tuple(word)
    for a in word:
        if not 1 <= a <= n - 1:
            raise InvalidWeight(f"letter {a} outside 1..{n - 1}")
    out: list[Path] = []
    zero = SlWeight.zero(n)

    def dfs(idx: int, steps: list[GlWeight], prefixes: list[SlWeight]):
        if idx == len(word):
            if target is None or prefixes[-1] == target:
                out.append(Path(word, tuple(steps), tuple(prefixes)))
            return
        for mu in omega_set(word[idx], n):
            nxt = prefixes[-1] + sl_coords(mu)
            if nxt.is_dominant():
                steps.append(mu)
                prefixes.append(nxt)
                dfs(idx + 1, steps, prefixes)
                steps.pop()
                prefixes.pop()

    dfs(0, [], [zero])
    return out


def full_path(word: tuple[int, ...], n: int) -> Path:
    """The path through the highest weight at every letter."""
    steps = tuple(highest_weight(a, n) for a in word)
    prefixes = [SlWeight.zero(n)]
    for s in steps:
        prefixes.append(prefixes[-1] + sl_coords(s))
    if not all(p.is_dominant() for p in prefixes):
        raise NotDominant("full path left the dominant chamber")
    return Path(word, steps, tuple(prefixes))


@dataclass(frozen=True)
class ElementaryData:
    """String data of a 01-sequence: k is the number of 0-strings not counting
    a trailing one; y, x are the string endpoints; alpha, beta the cumulative
    1- and 0-counts, satisfying alpha_i + beta_i = x_i and alpha_i + beta_{i-1} = y_i."""

    k: int
    y: tuple[int, ...]  # length k+1
    x: tuple[int, ...]  # length k
    alpha: tuple[int, ...]  # length k+1
    beta: tuple[int, ...]  # length k


def elementary_data(mu: GlWeight) -> ElementaryData:
    if mu.a == 0:
        raise InvalidWeight("the zero weight has no elementary ladder data")
    bits = mu.bits
    n = len(bits)
    # runs alternate 1-string, 0-string, ... starting with a possibly empty 1-string
    y: list[int] = []
    x: list[int] = []
    alpha: list[int] = []
    beta: list[int] = []
    ones = 0
    zeros = 0
    i = 0
    while i < n:
        j = i
        while j < n and bits[j] == 1:
            j += 1
        ones += j - i
        y.append(j)  # last index (1-based) of this 1-string; i==j gives empty string
        alpha.append(ones)
        i = j
        if i == n:
            break
        j = i
        while j < n and bits[j] == 0:
            j += 1
        if j == n:
            break  # trailing 0-string is not counted
        zeros += j - i
        x.append(j)
        beta.append(zeros)
        i = j
    data = ElementaryData(len(x), tuple(y), tuple(x), tuple(alpha), tuple(beta))
    for idx in range(data.k):
        assert data.alpha[idx] + data.beta[idx] == data.x[idx]
        assert data.alpha[idx + 1] + data.beta[idx] == data.y[idx + 1]
    assert data.y[0] == data.alpha[0]
    assert data.alpha[-1] == mu.a
    return data


def weight_from_strings(y: tuple[int, ...], x: tuple[int, ...], n: int) -> GlWeight:
    """Reconstruct mu from 0 <= y_1 < x_1 < ... < x_k < y_{k+1} <= n: ones occupy
    [1, y_1] and each (x_i, y_{i+1}]."""
    bits = [0] * n
    for p in range(y[0]):
        bits[p] = 1
    for i, xi in enumerate(x):
        for p in range(xi, y[i + 1]):
            bits[p] = 1
    return GlWeight(tuple(bits))


def canonical_sequence(lam: SlWeight) -> tuple[int, ...]:
    """The fixed word expressing a dominant weight: index i repeated lambda_i
    times, weakly increasing."""
    if not lam.is_dominant():
        raise NotDominant(f"{lam} is not dominant")
    out: list[int] = []
    for i, c in enumerate(lam.coords, start=1):
        out.extend([i] * c)
    return tuple(out)


def weight_of_word(word: tuple[int, ...], n: int) -> SlWeight:
    w = SlWeight.zero(n)
    for a in word:
        w = w + SlWeight.fundamental(a, n)
    return w


@lru_cache(maxsize=None)
def dominant_weights_up_to(n: int, level: int) -> tuple[SlWeight, ...]:
    """All dominant weights with coordinate sum <= level, sorted."""
    out = [
        SlWeight(c)
        for total in range(level + 1)
        for c in _compositions(total, n - 1)
    ]
    return tuple(sorted(out, key=lambda w: (w.level(), w.coords)))


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 0:
        return [()] if total == 0 else []
    return [
        (h,) + rest
        for h in range(total + 1)
        for rest in _compositions(total - h, parts - 1)
    ]
