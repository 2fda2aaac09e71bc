"""Binary-word exclusion processes as monotone lattice paths.

A word over {0, 1} with n1 ones and n0 zeros maps to a staircase walk from
(0, h) to (w, 0) with h = n1 and w = n0: ones become steps down, zeros
steps to the right.  One swap of a (1, 0) neighbor pair adds exactly one
unit square to the region under the walk; the top configuration (all
zeros, then all ones) encloses the whole h x w rectangle.

Neither orientation is normalized away: a bias callback need not be
symmetric under relabeling, so h and w are always recorded as given.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .kernels import square_of

RIGHT = "R"
DOWN = "D"


@dataclass(frozen=True)
class StaircaseWalk:
    """Monotone lattice path as a step sequence over {R, D}."""

    steps: tuple[str, ...]

    def __post_init__(self):
        if any(s not in (RIGHT, DOWN) for s in self.steps):
            raise ValidationError(f"walk steps must be '{RIGHT}' or '{DOWN}'")

    @property
    def h(self) -> int:
        return sum(1 for s in self.steps if s == DOWN)

    @property
    def w(self) -> int:
        return sum(1 for s in self.steps if s == RIGHT)


@dataclass(frozen=True)
class BiasReport:
    """Minimum bias ratio over all (word, active position) pairs."""

    min_bias: float
    witness_word: tuple
    witness_position: int
    witness_square: tuple[int, int]
    exact: bool  # False when estimated from sampled trajectories


@dataclass(frozen=True)
class HittingSummary:
    n1: int
    n0: int
    trials: tuple[int, ...]
    seed: int

    @property
    def mean(self) -> float:
        return sum(self.trials) / len(self.trials) if self.trials else 0.0

    @property
    def max(self) -> int:
        return max(self.trials) if self.trials else 0

    @property
    def area(self) -> int:
        return self.n1 * self.n0

    @property
    def normalized_mean(self) -> float:
        return self.mean / self.area if self.area else 0.0


def word_to_walk(word) -> StaircaseWalk:
    """1 -> step down, 0 -> step right."""
    word = tuple(word)
    if any(x not in (0, 1) for x in word):
        raise ValidationError(f"binary word expected, got {word}")
    return StaircaseWalk(tuple(DOWN if x == 1 else RIGHT for x in word))


def walk_to_word(walk: StaircaseWalk, n1: int | None = None, n0: int | None = None) -> tuple:
    """Inverse of word_to_walk; optionally checks the declared step counts."""
    if n1 is not None and walk.h != n1:
        raise ValidationError(f"walk has {walk.h} down steps, expected {n1}")
    if n0 is not None and walk.w != n0:
        raise ValidationError(f"walk has {walk.w} right steps, expected {n0}")
    return tuple(1 if s == DOWN else 0 for s in walk.steps)


def area(word) -> int:
    """Unit squares under the walk: zeros to the left of each one."""
    total = 0
    zeros = 0
    for x in word:
        if x == 0:
            zeros += 1
        else:
            total += zeros
    return total


def bottom_word(n1: int, n0: int) -> tuple:
    return (1,) * n1 + (0,) * n0


def top_word(n1: int, n0: int) -> tuple:
    return (0,) * n0 + (1,) * n1


def all_words(n1: int, n0: int):
    """All binary words with n1 ones and n0 zeros, lexicographic."""
    n = n1 + n0
    for ones in combinations(range(n), n1):
        word = [0] * n
        for i in ones:
            word[i] = 1
        yield tuple(word)


def measure_boundedness(bias, n1: int, n0: int, *, budget: int = 50_000,
                        sample_steps: int | None = None, seed: int = 0) -> BiasReport:
    """Minimum of bias(word, i) / bias(swapped, i) over active (1, 0) sites.

    Exact when the word space fits the budget.  Otherwise, if
    ``sample_steps`` is given, the minimum is taken over the words visited
    by a seeded chain trajectory and flagged as a lower-confidence
    estimate; without the fallback the budget overrun is an error.
    """
    count = math.comb(n1 + n0, n1)
    if count <= budget:
        return _boundedness_over(all_words(n1, n0), bias, exact=True)
    if sample_steps is None:
        raise BudgetExceededError(
            f"{count} words exceed the budget of {budget} and no sampling "
            "fallback was requested"
        )
    rng = np.random.default_rng(seed)
    visited = [bottom_word(n1, n0)]
    word = list(visited[0])
    n = n1 + n0
    for _ in range(sample_steps):
        i = int(rng.integers(1, n))
        if word[i - 1] != word[i]:
            if rng.random() < bias(tuple(word), i):
                word[i - 1], word[i] = word[i], word[i - 1]
                visited.append(tuple(word))
    return _boundedness_over(visited, bias, exact=False)


def _boundedness_over(words, bias, exact: bool) -> BiasReport:
    best = None
    for word in words:
        for i in range(1, len(word)):
            if word[i - 1] == 1 and word[i] == 0:
                swapped = list(word)
                swapped[i - 1], swapped[i] = 0, 1
                ratio = bias(word, i) / bias(tuple(swapped), i)
                if best is None or ratio < best[0]:
                    best = (ratio, word, i)
    if best is None:
        raise ValidationError("no active (1, 0) site exists; need n1 >= 1 and n0 >= 1")
    ratio, word, i = best
    return BiasReport(min_bias=ratio, witness_word=word, witness_position=i,
                      witness_square=square_of(word, i), exact=exact)


def _mix64(z: int) -> int:
    """64-bit finalizer used to split one root seed into per-trial seeds."""
    z = (z + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4B5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def trial_seed(root: int, index: int) -> int:
    """Seed of one trial: root xor index pushed through the 64-bit mix.

    Trials are therefore reproducible and independent of the order or the
    number of trials run.
    """
    return _mix64((root ^ index) & 0xFFFFFFFFFFFFFFFF)


def hitting_time_to_top(bias, n1: int, n0: int, trials: int, seed: int) -> HittingSummary:
    """Steps from the lowest word (1^n1 0^n0) until the top is first reached.

    Warns when the callback advertises a minimum bias ratio <= 1 (the walk
    is then not pushed toward the top and the experiment may be slow), but
    runs regardless.
    """
    known = getattr(bias, "known_min_ratio", None)
    if known is not None and known <= 1.0:
        warnings.warn(
            f"minimum bias ratio {known} <= 1; hitting times may be exponential",
            stacklevel=2,
        )
    results = []
    for t in range(trials):
        results.append(_one_hit(bias, n1, n0, trial_seed(seed, t)))
    return HittingSummary(n1=n1, n0=n0, trials=tuple(results), seed=seed)


def _one_hit(bias, n1: int, n0: int, seed: int) -> int:
    if n1 == 0 or n0 == 0:
        return 0
    n = n1 + n0
    word = list(bottom_word(n1, n0))
    target = n1 * n0
    current = 0
    rng = np.random.default_rng(seed)
    const_p = getattr(bias, "constant_p", None)
    steps = 0
    block = 4096
    while True:
        positions = rng.integers(1, n, size=block)
        coins = rng.random(block)
        for k in range(block):
            steps += 1
            i = int(positions[k])
            a, b = word[i - 1], word[i]
            if a == b:
                continue
            if const_p is not None:
                p = const_p if a == 1 else 1.0 - const_p
            else:
                p = bias(tuple(word), i)
            if coins[k] < p:
                word[i - 1], word[i] = b, a
                current += 1 if a == 1 else -1
                if current == target:
                    return steps


def write_hitting_csv(path, summary: HittingSummary):
    """Trial rows plus one summary row (mean, max, area, normalized ratio)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_type", "trial", "steps", "mean", "max", "area", "ratio"])
        for idx, steps in enumerate(summary.trials):
            writer.writerow(["trial", idx, steps, "", "", "", ""])
        writer.writerow([
            "summary", "", "",
            f"{summary.mean:.17g}", summary.max, summary.area,
            f"{summary.normalized_mean:.17g}",
        ])
