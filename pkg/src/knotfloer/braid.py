"""Braid words, closure combinatorics and the composite-knot braid formula.

A braid word on ``n`` strands is a sequence of nonzero integers; ``+i`` is the
Artin generator sigma_i and ``-i`` its inverse.  Text form::

    s1 s2^-1 s1 s2^-1 s3^3 @4

one ``s<i>`` token per run of equal letters, optional ``@n`` strand override.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class BraidError(ValueError):
    """Semantic error on a braid word (bad index, strand mismatch, ...)."""


class BraidSyntaxError(BraidError):
    """The braid text does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(e) for e in self.letters))
        if self.strands < 2:
            raise BraidError(f"a braid needs at least 2 strands, got {self.strands}")
        for e in self.letters:
            if e == 0:
                raise BraidError("generator index 0 is not allowed")
            if abs(e) > self.strands - 1:
                raise BraidError(
                    f"generator s{abs(e)} needs {abs(e) + 1} strands, braid has {self.strands}"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_braid(self)

    def __mul__(self, other: BraidWord) -> BraidWord:
        if self.strands != other.strands:
            raise BraidError(f"strand mismatch: {self.strands} vs {other.strands}")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> BraidWord:
        return BraidWord(self.strands, tuple(-e for e in reversed(self.letters)))

    def mirror(self) -> BraidWord:
        return BraidWord(self.strands, tuple(-e for e in self.letters))

    @property
    def exponent_sum(self) -> int:
        return sum(1 if e > 0 else -1 for e in self.letters)


@dataclass(frozen=True)
class ClosureInfo:
    permutation: tuple[int, ...]  # 1-based image of each strand
    components: int
    exponent_sum: int

    @property
    def is_knot(self) -> bool:
        return self.components == 1


_TOKEN = re.compile(r"\s*(?:(s)(\d+)(?:\^([+-]?\d+))?|(@)(\d+))")


def parse_braid(text: str) -> BraidWord:
    """Parse ``s<i>[^k]`` tokens (and an optional trailing ``@n``) into a word."""
    letters: list[int] = []
    strands = None
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            while text[pos].isspace():
                pos += 1
            raise BraidSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(4)
        if strands is not None:
            raise BraidSyntaxError("nothing may follow the @n strand override", start)
        if m.group(1):
            index = int(m.group(2))
            if index == 0:
                raise BraidSyntaxError("generator index 0", start)
            power = int(m.group(3)) if m.group(3) is not None else 1
            if power == 0:
                raise BraidSyntaxError("zero exponent", start)
            sign = 1 if power > 0 else -1
            letters.extend([sign * index] * abs(power))
        else:
            strands = int(m.group(5))
        end = m.end()
        if end < len(text) and not text[end].isspace():
            raise BraidSyntaxError(f"missing whitespace before {text[end]!r}", end)
        pos = end
    if not letters and strands is None:
        raise BraidSyntaxError("empty braid word", 0)
    top = max((abs(e) for e in letters), default=0)
    if strands is None:
        strands = top + 1
    if top >= strands:
        raise BraidError(f"generator s{top} needs {top + 1} strands, @{strands} declared")
    return BraidWord(strands, tuple(letters))


def format_braid(b: BraidWord) -> str:
    """Canonical printer: run-length ``^k`` compression and an explicit ``@n``."""
    tokens = []
    i = 0
    while i < len(b.letters):
        e = b.letters[i]
        j = i
        while j < len(b.letters) and b.letters[j] == e:
            j += 1
        run = (j - i) * (1 if e > 0 else -1)
        tokens.append(f"s{abs(e)}" if run == 1 else f"s{abs(e)}^{run}")
        i = j
    tokens.append(f"@{b.strands}")
    return " ".join(tokens)


def closure_info(b: BraidWord) -> ClosureInfo:
    perm = list(range(b.strands))
    # perm[k] tracks which top position ends at bottom position k
    for e in b.letters:
        i = abs(e) - 1
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
    # image of top strand s is its bottom position
    image = [0] * b.strands
    for bottom, top in enumerate(perm):
        image[top] = bottom
    seen = [False] * b.strands
    cycles = 0
    for s in range(b.strands):
        if not seen[s]:
            cycles += 1
            while not seen[s]:
                seen[s] = True
                s = image[s]
    return ClosureInfo(tuple(p + 1 for p in image), cycles, b.exponent_sum)


def free_reduce(b: BraidWord) -> BraidWord:
    out: list[int] = []
    for e in b.letters:
        if out and out[-1] == -e:
            out.pop()
        else:
            out.append(e)
    return BraidWord(b.strands, tuple(out))


def shift(b: BraidWord, k: int, new_strands: int) -> BraidWord:
    if k < 0:
        raise BraidError("shift amount must be nonnegative")
    if new_strands < b.strands + k:
        raise BraidError(
            f"{new_strands} strands cannot host a {b.strands}-strand braid shifted by {k}"
        )
    return BraidWord(new_strands, tuple(e + k if e > 0 else e - k for e in b.letters))


def _require_knot(b: BraidWord, label: str) -> None:
    c = closure_info(b).components
    if c != 1:
        raise BraidError(f"{label} closure has {c} components, expected a knot")


def connected_sum(b1: BraidWord, b2: BraidWord) -> BraidWord:
    """``b1 * shift(b2, n-1)`` on ``n+m-1`` strands; its closure is K1 # K2."""
    _require_knot(b1, "first")
    _require_knot(b2, "second")
    n, m = b1.strands, b2.strands
    total = n + m - 1
    return BraidWord(total, b1.letters) * shift(b2, n - 1, total)


def split_connected_sum(b: BraidWord) -> tuple[BraidWord, BraidWord] | None:
    """Inverse of :func:`connected_sum` up to cyclic rotation of the word.

    Looks for a strand ``k`` such that some rotation of the word reads as a
    block of letters below ``k`` followed by a block at or above ``k``.
    Returns ``None`` when no such split exists.
    """
    word = b.letters
    for k in range(2, b.strands):
        low = [abs(e) < k for e in word]
        if all(low) or not any(low):
            continue
        # exactly one low->high and one high->low transition around the cycle
        changes = sum(low[i] != low[i - 1] for i in range(len(word)))
        if changes != 2:
            continue
        start = next(i for i in range(len(word)) if low[i] and not low[i - 1])
        rot = word[start:] + word[:start]
        w1 = tuple(e for e in rot if abs(e) < k)
        w2 = tuple(e - (k - 1) if e > 0 else e + (k - 1) for e in rot if abs(e) >= k)
        b1 = BraidWord(k, w1)
        b2 = BraidWord(b.strands - k + 1, w2)
        if closure_info(b1).is_knot and closure_info(b2).is_knot:
            return b1, b2
    return None


def markov_conjugate(b: BraidWord, x: BraidWord) -> BraidWord:
    """Type-I move: ``x^-1 b x``.  No free reduction is applied."""
    if b.strands != x.strands:
        raise BraidError(f"strand mismatch: {b.strands} vs {x.strands}")
    return x.inverse() * b * x


def markov_stabilize(b: BraidWord) -> BraidWord:
    """Type-II move: append sigma_n and add one strand."""
    return BraidWord(b.strands + 1, b.letters + (b.strands,))
