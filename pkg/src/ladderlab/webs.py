"""The rigid ladder model of sl_n webs.

A ladder is a sequence of labeled uprights with tilted crossbars (rungs),
read bottom to top. Labels live in [0, n]; 0- and n-labeled strands carry
one-dimensional representations and act as bookkeeping for trivalent
vertices, cups, caps and tags.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    InvalidWeight,
    LabelOutOfRange,
    NotAPermutation,
    PathMismatch,
    ValidationError,
    WeightMismatch,
)
from .weights import (
    GlWeight,
    Path,
    SlWeight,
    canonical_sequence,
    elementary_data,
    sl_coords,
    weight_of_word,
)


class Tilt(str, Enum):
    NE = "NE"
    NW = "NW"


class RungClass(str, Enum):
    INWARD = "inward"
    OUTWARD = "outward"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Rung:
    """A crossbar between uprights pos and pos+1.

    On adjacent labels (a, b): NE sends them to (a-s, b+s), NW to (a+s, b-s).
    """

    pos: int
    tilt: Tilt
    s: int

    def __post_init__(self):
        if self.s < 1:
            raise ValidationError("crossbar label must be >= 1 (0 is the identity)")
        if self.pos < 0:
            raise ValidationError("rung position must be >= 0")

    def outputs(self, a: int, b: int) -> tuple[int, int]:
        if self.tilt is Tilt.NE:
            return a - self.s, b + self.s
        return a + self.s, b - self.s


@dataclass(frozen=True)
class Ladder:
    """A ladder diagram: rank parameter n, bottom labels, rungs bottom-to-top."""

    n: int
    bottom: tuple[int, ...]
    rungs: tuple[Rung, ...]

    def __post_init__(self):
        self.levels()  # validate on construction

    @property
    def width(self) -> int:
        return len(self.bottom)

    def levels(self) -> list[tuple[int, ...]]:
        """All label sequences from bottom to top; validates the ladder."""
        n = self.n
        if any(not 0 <= x <= n for x in self.bottom):
            raise LabelOutOfRange(f"bottom labels must lie in [0,{n}]")
        state = list(self.bottom)
        out = [tuple(state)]
        for r in self.rungs:
            if r.pos + 1 >= len(state):
                raise ValidationError(f"rung position {r.pos} out of range")
            a, b = state[r.pos], state[r.pos + 1]
            c, d = r.outputs(a, b)
            if not (0 <= c <= n and 0 <= d <= n and 0 <= r.s <= n):
                raise LabelOutOfRange(
                    f"rung {r} at labels ({a},{b}) leaves [0,{n}]"
                )
            state[r.pos], state[r.pos + 1] = c, d
            out.append(tuple(state))
        return out

    @property
    def top(self) -> tuple[int, ...]:
        return self.levels()[-1]

    def is_identity(self) -> bool:
        return not self.rungs

    def stack(self, upper: Ladder) -> Ladder:
        """upper composed on top of self; boundaries must agree exactly."""
        if upper.n != self.n or upper.bottom != self.top:
            raise WeightMismatch(
                f"cannot stack: top {self.top} != bottom {upper.bottom}"
            )
        return Ladder(self.n, self.bottom, self.rungs + upper.rungs)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "bottom": list(self.bottom),
            "rungs": [
                {"pos": r.pos, "tilt": r.tilt.value, "s": r.s} for r in self.rungs
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @staticmethod
    def from_json(data: dict) -> Ladder:
        try:
            n = int(data["n"])
            bottom = tuple(int(x) for x in data["bottom"])
            rungs = tuple(
                Rung(int(r["pos"]), Tilt(r["tilt"]), int(r["s"]))
                for r in data["rungs"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed ladder data: {exc}") from exc
        return Ladder(n, bottom, rungs)


def classify_rung(a: int, b: int, rung: Rung, n: int) -> RungClass:
    """Inward/outward/neutral classification of a rung applied at labels (a, b)."""
    if not (0 <= a <= n and 0 <= b <= n):
        raise LabelOutOfRange(f"labels ({a},{b}) outside [0,{n}]")
    c, d = rung.outputs(a, b)
    if not (0 <= c <= n and 0 <= d <= n):
        raise LabelOutOfRange(f"outputs ({c},{d}) outside [0,{n}]")
    if sorted((a, b)) == sorted((c, d)):
        return RungClass.NEUTRAL
    if min(c, d) <= min(a, b) and max(a, b) <= max(c, d):
        return RungClass.OUTWARD
    return RungClass.INWARD


def flip(ladder: Ladder) -> Ladder:
    """The duality involution: upside-down with each tilt swapped."""
    flipped = tuple(
        Rung(r.pos, Tilt.NW if r.tilt is Tilt.NE else Tilt.NE, r.s)
        for r in reversed(ladder.rungs)
    )
    return Ladder(ladder.n, ladder.top, flipped)


def mirror(ladder: Ladder) -> Ladder:
    """Left-right reflection: positions reversed, tilts swapped."""
    w = ladder.width
    mirrored = tuple(
        Rung(w - 2 - r.pos, Tilt.NW if r.tilt is Tilt.NE else Tilt.NE, r.s)
        for r in ladder.rungs
    )
    return Ladder(ladder.n, tuple(reversed(ladder.bottom)), mirrored)


class _Builder:
    """Accumulates rungs while tracking the current label sequence."""

    def __init__(self, n: int, bottom: Sequence[int]):
        self.n = n
        self.bottom = tuple(bottom)
        self.state = list(bottom)
        self.rungs: list[Rung] = []

    def rung(self, pos: int, tilt: Tilt, s: int):
        if s == 0:
            return
        r = Rung(pos, tilt, s)
        a, b = self.state[pos], self.state[pos + 1]
        c, d = r.outputs(a, b)
        if not (0 <= c <= self.n and 0 <= d <= self.n):
            raise LabelOutOfRange(f"rung at ({a},{b}) leaves [0,{self.n}]")
        self.state[pos], self.state[pos + 1] = c, d
        self.rungs.append(r)

    def swap(self, pos: int):
        """Neutral swap of adjacent strands; a no-op on equal labels."""
        a, b = self.state[pos], self.state[pos + 1]
        if a == b:
            return
        if a > b:
            self.rung(pos, Tilt.NE, a - b)
        else:
            self.rung(pos, Tilt.NW, b - a)

    def sort_region(self, start: int, target: Sequence[int]):
        """Neutral bubble sort of state[start:start+len(target)] onto target,
        matching equal labels stably."""
        end = start + len(target)
        current = self.state[start:end]
        if sorted(current) != sorted(target):
            raise NotAPermutation(
                f"target {tuple(target)} is not a permutation of {tuple(current)}"
            )
        keys = _stable_permutation(current, target)
        m = len(keys)
        for _ in range(m):
            swapped = False
            for j in range(m - 1):
                if keys[j] > keys[j + 1]:
                    keys[j], keys[j + 1] = keys[j + 1], keys[j]
                    self.swap(start + j)
                    swapped = True
            if not swapped:
                break

    def build(self) -> Ladder:
        return Ladder(self.n, self.bottom, tuple(self.rungs))


def _stable_permutation(current: Sequence[int], target: Sequence[int]) -> list[int]:
    """keys[i] = destination slot of current[i], matching equal labels in order."""
    slots: dict[int, list[int]] = {}
    for idx, lab in enumerate(target):
        slots.setdefault(lab, []).append(idx)
    keys = []
    for lab in current:
        keys.append(slots[lab].pop(0))
    return keys


def neutral_sort(bottom: Sequence[int], target: Sequence[int], n: int) -> Ladder:
    """A ladder of neutral rungs realizing the reordering bottom -> target,
    built by a deterministic bubble sort of adjacent swaps."""
    if sorted(bottom) != sorted(target):
        raise NotAPermutation(f"{tuple(target)} is not a permutation of {tuple(bottom)}")
    b = _Builder(n, bottom)
    b.sort_region(0, target)
    ladder = b.build()
    assert ladder.top == tuple(target)
    return ladder


def elementary_ladder(mu: GlWeight) -> Ladder:
    """The elementary light ladder E_mu: bottom (x_1..x_k, a), NE crossbars
    beta_k ... beta_1 applied rightmost-first, top (y_1..y_{k+1})."""
    if mu.a == 0:
        raise InvalidWeight("mu must lie in some Omega(a) with a >= 1")
    n = mu.n
    data = elementary_data(mu)
    k = data.k
    bottom = data.x + (mu.a,)
    b = _Builder(n, bottom)
    for i in range(k, 0, -1):
        b.rung(i - 1, Tilt.NE, data.beta[i - 1])
    ladder = b.build()
    assert ladder.top == data.y, f"E_mu replay mismatch for {mu}"
    return ladder


def _apply_tier(
    builder: _Builder,
    dead_end: int,
    t: int,
    mu: GlWeight,
    target_live: tuple[int, ...],
) -> int:
    """One tier of the light ladder algorithm at strand position t.

    state[dead_end:t] holds the current live block and state[t] the new strand.
    Sorts the chosen inputs of E_mu to the right of the live block, applies
    E_mu, parks any produced 0/n strands on the left, and sorts the live block
    to target_live. Returns the new dead_end.
    """
    n = builder.n
    a = builder.state[t]
    if mu.a != a or mu.n != n:
        raise PathMismatch(f"step {mu} does not match strand label {a}")
    data = elementary_data(mu)
    k = data.k
    live = builder.state[dead_end:t]
    remaining = list(live)
    for lab in data.x:
        if lab not in remaining:
            raise PathMismatch(
                f"live block {tuple(live)} is missing a strand labeled {lab}"
            )
        # rightmost available copy
        remaining.reverse()
        remaining.remove(lab)
        remaining.reverse()
    builder.sort_region(dead_end, tuple(remaining) + data.x)
    for i in range(k, 0, -1):
        builder.rung(t - k + i - 1, Tilt.NE, data.beta[i - 1])
    assert tuple(builder.state[t - k : t + 1]) == data.y
    # park dead strands (labels 0 or n) on the left, next to dead_end
    for pos in range(t - k, t + 1):
        lab = builder.state[pos]
        if lab in (0, n):
            for p in range(pos, dead_end, -1):
                builder.swap(p - 1)
            dead_end += 1
    builder.sort_region(dead_end, target_live)
    return dead_end


def light_ladder(word: Sequence[int], path: Path) -> Ladder:
    """The chosen light ladder for a dominant weight subsequence.

    Bottom is the word; the top is the canonical sequence of the expressed
    weight, preceded by the dead block of 0- and n-labeled strands (all 0s,
    then all ns). Contains only outward and neutral rungs.
    """
    word = tuple(word)
    if path.word != word:
        raise PathMismatch(f"path word {path.word} differs from {word}")
    if not all(w.is_dominant() for w in path.prefix_weights):
        raise PathMismatch("path is not a dominant weight subsequence")
    n = path.steps[0].n if path.steps else len(path.prefix_weights[0].coords) + 1
    b = _Builder(n, word)
    dead_end = 0
    for t in range(len(word)):
        target_live = canonical_sequence(path.prefix_weights[t + 1])
        dead_end = _apply_tier(b, dead_end, t, path.steps[t], target_live)
        assert tuple(b.state[dead_end : t + 1]) == target_live
    dead = b.state[:dead_end]
    b.sort_region(0, tuple(sorted(dead)))
    ladder = b.build()
    for (level, r) in zip(ladder.levels(), ladder.rungs):
        cls = classify_rung(level[r.pos], level[r.pos + 1], r, n)
        assert cls is not RungClass.INWARD, "light ladder grew an inward rung"
    return ladder


def light_tier(
    n: int, live: Sequence[int], a: int, mu: GlWeight
) -> Ladder:
    """A single light-ladder tier: bottom live+(a,), top [dead block]+canonical
    sequence of wt(live) + mu."""
    live = tuple(live)
    lam = weight_of_word(live, n)
    nxt = lam + sl_coords(mu)
    if not nxt.is_dominant():
        raise PathMismatch(f"{lam} + wt({mu}) is not dominant")
    b = _Builder(n, live + (a,))
    dead_end = _apply_tier(b, 0, len(live), mu, canonical_sequence(nxt))
    b.sort_region(0, tuple(sorted(b.state[:dead_end])))
    return b.build()


def _dead_counts(labels: Sequence[int], n: int) -> tuple[int, int]:
    zeros = sum(1 for x in labels if x == 0)
    ns = sum(1 for x in labels if x == n)
    return zeros, ns


def _pad_light_ladder(ladder: Ladder, extra_zeros: int, extra_ns: int) -> Ladder:
    """Add untouched 0/n uprights on the left and re-sort the whole dead prefix
    into all-0s-then-all-ns."""
    n = ladder.n
    pad = extra_zeros + extra_ns
    bottom = (0,) * extra_zeros + (n,) * extra_ns + ladder.bottom
    b = _Builder(n, bottom)
    for r in ladder.rungs:
        b.rung(r.pos + pad, r.tilt, r.s)
    old_zeros, old_ns = _dead_counts(ladder.top, n)
    dead_width = pad + old_zeros + old_ns
    target = (0,) * (extra_zeros + old_zeros) + (n,) * (extra_ns + old_ns)
    b.sort_region(0, target)
    assert len(target) == dead_width
    return b.build()


def double_ladder(e: Path, f: Path) -> Ladder:
    """The double light ladder: flip(light_ladder(f)) stacked on light_ladder(e),
    joined along the canonical sequence of the common expressed weight.

    When the two sides produce different numbers of 0/n-labeled strands, both
    are padded on the left with untouched trivial strands so the middle
    boundaries agree on the nose.
    """
    if e.endpoint != f.endpoint:
        raise WeightMismatch(
            f"paths express different weights: {e.endpoint} vs {f.endpoint}"
        )
    le = light_ladder(e.word, e)
    lf = light_ladder(f.word, f)
    n = le.n
    ze, ne_ = _dead_counts(le.top, n)
    zf, nf = _dead_counts(lf.top, n)
    le = _pad_light_ladder(le, max(zf - ze, 0), max(nf - ne_, 0))
    lf = _pad_light_ladder(lf, max(ze - zf, 0), max(ne_ - nf, 0))
    return le.stack(flip(lf))


def strip_trivial(ladder: Ladder) -> tuple[Ladder, tuple[int, ...]]:
    """Remove uprights untouched by rungs whose constant label is 0 or n.

    Returns the stripped ladder and the tuple of kept original positions.
    """
    n = ladder.n
    touched = set()
    for r in ladder.rungs:
        touched.add(r.pos)
        touched.add(r.pos + 1)
    kept = tuple(
        i
        for i, lab in enumerate(ladder.bottom)
        if i in touched or lab not in (0, n)
    )
    index_of = {old: new for new, old in enumerate(kept)}
    new_rungs = tuple(Rung(index_of[r.pos], r.tilt, r.s) for r in ladder.rungs)
    new_bottom = tuple(ladder.bottom[i] for i in kept)
    return Ladder(n, new_bottom, new_rungs), kept


def stripped_boundary(labels: Sequence[int], n: int) -> tuple[int, ...]:
    """The boundary sequence with all 0s and ns removed."""
    return tuple(x for x in labels if x not in (0, n))
