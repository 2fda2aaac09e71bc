"""Exact one-step transition enumeration for every chain in the toolkit.

Each ``transitions_*`` function returns a dict mapping target state to
probability, with the self-loop entry included so each row sums to exactly
one.  Enumeration is the primitive; sampling (:func:`sample_step`) is
derived from it, which keeps row-stochasticity directly testable.

Holding conventions follow the chain definitions exactly; no extra 1/2
laziness is added anywhere.  Acceptance probabilities above one are an
error, never clamped: clamping would silently change the stationary
distribution and mask invalid inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from bisect import bisect_right
from decimal import Decimal
from pathlib import Path

import numpy as np

from .errors import PropertyViolationError, ValidationError
from .model import ClassPartition, ProbabilitySet, validate_kclass
from .treerep import LeagueTree


# ---------------------------------------------------------------------------
# shared move mechanics for the transposition chains


def _is_permutation(state, n: int) -> bool:
    return sorted(state) == list(range(1, n + 1))


class _ClassView:
    """Uniform access to classes and pair probabilities.

    Permutation states carry elements whose class comes from the partition
    and whose pair probabilities come from the full matrix; word states
    carry class labels directly and use the class-pair table.
    """

    def __init__(self, state, prob_set: ProbabilitySet, partition: ClassPartition):
        self.state = tuple(state)
        n = partition.n
        if len(self.state) != n:
            raise ValidationError(f"state length {len(self.state)} != n={n}")
        if _is_permutation(self.state, n):
            self.classes = tuple(partition.class_of(x) for x in self.state)
            self._p = prob_set.p
            self._offset = 1  # matrix is 0-based, elements are 1-based
        else:
            counts = [0] * partition.k
            for label in self.state:
                if not 1 <= label <= partition.k:
                    raise ValidationError(
                        f"state {self.state} is neither a permutation of 1..{n} "
                        f"nor a word over 1..{partition.k}"
                    )
                counts[label - 1] += 1
            if tuple(counts) != partition.sizes:
                raise ValidationError(
                    f"word {self.state} has label counts {tuple(counts)}, "
                    f"partition expects {partition.sizes}"
                )
            self.classes = self.state
            self._p = validate_kclass(prob_set, partition)  # already 1-based
            self._offset = 0

    def prob(self, pos_a: int, pos_b: int) -> float:
        """p for the ordered pair of the items at 1-based positions a, b."""
        return float(self._p[self.state[pos_a - 1] - self._offset,
                             self.state[pos_b - 1] - self._offset])

    def ratio(self, pos_a: int, pos_b: int) -> float:
        return self.prob(pos_a, pos_b) / self.prob(pos_b, pos_a)

    def swapped(self, i: int, j: int) -> tuple:
        out = list(self.state)
        out[i - 1], out[j - 1] = out[j - 1], out[i - 1]
        return tuple(out)


def _finish_row(state, targets: dict) -> dict:
    total = math.fsum(targets.values())
    if total > 1.0 + 1e-12:
        raise PropertyViolationError(
            f"transition masses from {state} sum to {total} > 1"
        )
    row = dict(targets)
    row[state] = max(0.0, 1.0 - total)
    return row


def transitions_mnn(sigma, prob_set: ProbabilitySet) -> dict:
    """Adjacent-transposition chain.

    A position 1 < i <= n is chosen uniformly; the elements at i-1 and i
    are exchanged with the probability of placing the element at i ahead
    of the element at i-1.
    """
    sigma = tuple(sigma)
    n = len(sigma)
    targets: dict = {}
    if n == 1:
        return _finish_row(sigma, targets)
    base = 1.0 / (n - 1)
    for i in range(2, n + 1):
        p_swap = prob_set.prob(sigma[i - 1], sigma[i - 2])
        out = list(sigma)
        out[i - 2], out[i - 1] = out[i - 1], out[i - 2]
        tgt = tuple(out)
        if tgt != sigma:
            targets[tgt] = targets.get(tgt, 0.0) + base * p_swap
    return _finish_row(sigma, targets)


class MtkMove:
    """One admissible transposition: positions i < j, direction, acceptance."""

    __slots__ = ("i", "j", "direction", "acceptance")

    def __init__(self, i, j, direction, acceptance):
        self.i, self.j, self.direction, self.acceptance = i, j, direction, acceptance


def mtk_moves(state, prob_set: ProbabilitySet, partition: ClassPartition,
              directions=("L", "R", "N")) -> list[MtkMove]:
    """Enumerate the class-transposition moves available from a state.

    For each position i and direction:
      L: the nearest left position j holding a class >= the class at i; the
         move fires (with acceptance 1) only if that class is strictly
         greater.
      R: the nearest right position j with class >= class at i; if strictly
         greater the swap is accepted with probability
         ratio(j, i) * prod over i < m < j of ratio over m, exactly the
         product of bias ratios that makes detailed balance with the L move
         hold.
      N: the nearest left position in the same class; the swap always
         fires.

    Acceptance above 1 means the probabilities are outside the weakly
    monotone regime this chain requires; it is reported, never clamped.
    """
    view = _ClassView(state, prob_set, partition)
    classes = view.classes
    n = len(classes)
    moves: list[MtkMove] = []
    for i in range(1, n + 1):
        ci = classes[i - 1]
        if "L" in directions:
            for j in range(i - 1, 0, -1):
                if classes[j - 1] >= ci:
                    if classes[j - 1] > ci:
                        moves.append(MtkMove(j, i, "L", 1.0))
                    break
        if "R" in directions:
            for j in range(i + 1, n + 1):
                if classes[j - 1] >= ci:
                    if classes[j - 1] > ci:
                        acc = view.ratio(j, i)
                        for m in range(i + 1, j):
                            acc *= view.ratio(j, m) * view.ratio(m, i)
                        if acc > 1.0:
                            raise PropertyViolationError(
                                f"acceptance probability {acc} > 1 for the right move "
                                f"({i}, {j}) from {view.state}; the probability set is "
                                "outside the weakly monotone regime this chain requires"
                            )
                        moves.append(MtkMove(i, j, "R", acc))
                    break
        if "N" in directions:
            for j in range(i - 1, 0, -1):
                if classes[j - 1] == ci:
                    moves.append(MtkMove(j, i, "N", 1.0))
                    break
    return moves


def transitions_mtk(state, prob_set: ProbabilitySet, partition: ClassPartition) -> dict:
    """Class-transposition chain: position and direction L/R/N uniform.

    Every (position, direction) pair carries mass 1/(3n); unused mass is
    the self-loop.  Accepts permutations or class-label words (same-class
    exchanges on words fold into the self-loop).
    """
    return _transitions_from_moves(state, prob_set, partition, ("L", "R", "N"))


def transitions_mk1(state, prob_set: ProbabilitySet, partition: ClassPartition) -> dict:
    """Cross-class chain: exactly the L and R moves, each with mass 1/(3n).

    The 1/(3n) per-move mass (not 1/(2n)) matches its role as the
    cross-class part of the full transposition chain.
    """
    return _transitions_from_moves(state, prob_set, partition, ("L", "R"))


def _transitions_from_moves(state, prob_set, partition, directions) -> dict:
    state = tuple(state)
    n = len(state)
    base = 1.0 / (3 * n)
    targets: dict = {}
    view = _ClassView(state, prob_set, partition)
    for mv in mtk_moves(state, prob_set, partition, directions):
        tgt = view.swapped(mv.i, mv.j)
        if tgt == state:
            continue
        targets[tgt] = targets.get(tgt, 0.0) + base * mv.acceptance
    return _finish_row(state, targets)


def transitions_mi(sigma, prob_set: ProbabilitySet, partition: ClassPartition,
                   cls: int) -> dict:
    """Within-class shuffle for one class.

    A position holding a class-``cls`` element is chosen uniformly among
    the class's positions; the element is exchanged with the nearest
    class-mate to its left, with probability 1, if one exists.
    """
    sigma = tuple(sigma)
    if not _is_permutation(sigma, partition.n):
        raise ValidationError(f"{sigma} is not a permutation of 1..{partition.n}")
    classes = [partition.class_of(x) for x in sigma]
    positions = [i for i in range(1, partition.n + 1) if classes[i - 1] == cls]
    if not positions:
        raise ValidationError(f"class {cls} is empty")
    base = 1.0 / len(positions)
    targets: dict = {}
    for f in positions:
        for g in range(f - 1, 0, -1):
            if classes[g - 1] == cls:
                out = list(sigma)
                out[f - 1], out[g - 1] = out[g - 1], out[f - 1]
                tgt = tuple(out)
                targets[tgt] = targets.get(tgt, 0.0) + base
                break
    return _finish_row(sigma, targets)


def transitions_mpp(word, prob_set: ProbabilitySet, partition: ClassPartition) -> dict:
    """Adjacent-transposition chain on class-label words.

    Identical to the nearest-neighbor rule with same-label exchanges
    rejected (they would not change the word anyway).
    """
    word = tuple(word)
    n = len(word)
    table = validate_kclass(prob_set, partition)
    counts = [0] * partition.k
    for label in word:
        if not 1 <= label <= partition.k:
            raise ValidationError(f"label {label} outside 1..{partition.k}")
        counts[label - 1] += 1
    if tuple(counts) != partition.sizes:
        raise ValidationError(
            f"word {word} has label counts {tuple(counts)}, partition expects {partition.sizes}"
        )
    targets: dict = {}
    if n == 1:
        return _finish_row(word, targets)
    base = 1.0 / (n - 1)
    for i in range(2, n + 1):
        left, right = word[i - 2], word[i - 1]
        if left == right:
            continue
        p_swap = float(table[right, left])
        out = list(word)
        out[i - 2], out[i - 1] = out[i - 1], out[i - 2]
        targets[tuple(out)] = targets.get(tuple(out), 0.0) + base * p_swap
    return _finish_row(word, targets)


def transitions_mtree(sigma, tree: LeagueTree,
                      prob_set: ProbabilitySet | None = None) -> dict:
    """Tree-pair chain.

    An unordered pair {a, b} is chosen uniformly among the C(n, 2) pairs.
    The move fires only if no element currently between a and b descends
    from their lowest common ancestor; it then places a, b in order with
    probability p[a][b] and out of order otherwise, leaving everything
    between them fixed.  Placing an already-ordered pair "in order" leaves
    the state unchanged; that mass folds into the self-loop.
    """
    sigma = tuple(sigma)
    n = tree.n
    if not _is_permutation(sigma, n):
        raise ValidationError(f"{sigma} is not a permutation of 1..{n}")
    if prob_set is None:
        from .treerep import induced_probabilities

        prob_set = induced_probabilities(tree)
    pos = {x: i + 1 for i, x in enumerate(sigma)}
    base = 1.0 / (n * (n - 1) / 2)
    targets: dict = {}
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            lo, hi = sorted((pos[a], pos[b]))
            blockers = tree.leaf_descendants(tree.lca(a, b)[0])
            if any(sigma[m - 1] in blockers for m in range(lo + 1, hi)):
                continue
            p_in = prob_set.prob(a, b)
            in_order = list(sigma)
            in_order[lo - 1], in_order[hi - 1] = a, b
            out_order = list(sigma)
            out_order[lo - 1], out_order[hi - 1] = b, a
            for tgt, mass in ((tuple(in_order), base * p_in),
                              (tuple(out_order), base * (1.0 - p_in))):
                if tgt != sigma:
                    targets[tgt] = targets.get(tgt, 0.0) + mass
    return _finish_row(sigma, targets)


def transitions_me(word, bias) -> dict:
    """Generalized exclusion chain on binary words.

    A position 1 <= i < n is chosen uniformly; if the labels at i and i+1
    differ they are exchanged with probability bias(word, i), which may
    depend on the entire word.
    """
    word = tuple(word)
    n = len(word)
    if any(x not in (0, 1) for x in word):
        raise ValidationError(f"exclusion words are over {{0, 1}}, got {word}")
    targets: dict = {}
    if n < 2:
        return _finish_row(word, targets)
    base = 1.0 / (n - 1)
    for i in range(1, n):
        if word[i - 1] == word[i]:
            continue
        p = float(bias(word, i))
        if not 0.0 < p < 1.0:
            raise ValidationError(
                f"bias callback returned {p} at position {i} of {word}; "
                "swap probabilities must lie strictly in (0, 1)"
            )
        out = list(word)
        out[i - 1], out[i] = out[i], out[i - 1]
        targets[tuple(out)] = targets.get(tuple(out), 0.0) + base * p
    return _finish_row(word, targets)


# ---------------------------------------------------------------------------
# bias callbacks for the exclusion chain


def constant_bias(p: float):
    """State-independent bias: swap toward the top with probability p.

    A (1, 0) pattern swaps to (0, 1) with probability p and the reverse
    swap happens with probability 1 - p, so every square has bias ratio
    p / (1 - p).
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValidationError(f"constant bias p={p} must lie in (0, 1)")

    def bias(word, i):
        return p if word[i - 1] == 1 else 1.0 - p

    bias.known_min_ratio = p / (1.0 - p)
    bias.constant_p = p
    bias.spec = f"constant:{p}"
    return bias


def square_of(word, i: int) -> tuple[int, int]:
    """Unit square (column, row), 1-based, added or removed by a swap at i.

    With 1 -> down and 0 -> right, the square is determined by the prefix
    before position i: column = zeros before + 1, row = ones in the whole
    word minus ones before.
    """
    zeros_before = sum(1 for x in word[: i - 1] if x == 0)
    ones_before = (i - 1) - zeros_before
    h = sum(word)
    return zeros_before + 1, h - ones_before


def square_table_bias(table: dict):
    """Per-square bias from a table {"h": .., "w": .., "bias": {"(x,y)": "1.2"}}.

    Each square carries a bias ratio lambda > 0; adding the square happens
    with probability lambda/(1+lambda) and removing it with 1/(1+lambda).
    """
    try:
        h, w = int(table["h"]), int(table["w"])
        raw = table["bias"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad square-bias table: {exc}") from exc
    lam: dict[tuple[int, int], float] = {}
    for key, val in raw.items():
        x, y = _parse_square_key(key)
        v = float(Decimal(val)) if isinstance(val, str) else float(val)
        if v <= 0:
            raise ValidationError(f"square ({x},{y}) bias {v} must be positive")
        lam[(x, y)] = v
    wanted = {(x, y) for x in range(1, w + 1) for y in range(1, h + 1)}
    if set(lam) != wanted:
        raise ValidationError(
            f"square-bias table must cover every square of the {h}x{w} region"
        )

    def bias(word, i):
        sq = square_of(word, i)
        v = lam[sq]
        return v / (1.0 + v) if word[i - 1] == 1 else 1.0 / (1.0 + v)

    bias.known_min_ratio = min(lam.values())
    bias.square_biases = dict(lam)
    bias.spec = "square-dependent"
    return bias


def _parse_square_key(key: str) -> tuple[int, int]:
    body = key.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    try:
        x, y = (int(s) for s in body.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad square key {key!r}, expected \"(x,y)\"") from exc
    return x, y


def word_hash_bias(word, i):
    """Deterministic test bias depending on the whole word and position.

    Hashes (word, i) into (0.55, 0.95).  Useful for exercising
    state-dependent behavior reproducibly; makes no boundedness promise.
    """
    payload = bytes(word) + i.to_bytes(4, "little")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    u = int.from_bytes(digest, "little") / 2.0**64
    return 0.55 + 0.4 * u


word_hash_bias.spec = "word-hash"


def make_bias(spec: str):
    """Bias registry: "constant:<p>", "square-dependent:<table-file>", "word-hash"."""
    if spec == "word-hash":
        return word_hash_bias
    if spec.startswith("constant:"):
        try:
            p = float(Decimal(spec.split(":", 1)[1]))
        except Exception as exc:
            raise ValidationError(f"bad bias spec {spec!r}") from exc
        return constant_bias(p)
    if spec.startswith("square-dependent:"):
        path = Path(spec.split(":", 1)[1])
        try:
            table = json.loads(path.read_text())
        except OSError as exc:
            raise ValidationError(f"cannot read bias table {path}: {exc}") from exc
        return square_table_bias(table)
    raise ValidationError(f"unknown bias spec {spec!r}")


# ---------------------------------------------------------------------------
# kernel objects and the shared sampler


class ChainKernel:
    """A named transition rule with exact row enumeration and cached sampling."""

    name = "?"
    space_kind = "permutations"

    def transitions(self, state) -> dict:
        raise NotImplementedError

    def _row(self, state):
        cache = getattr(self, "_row_cache", None)
        if cache is None:
            cache = self._row_cache = {}
        hit = cache.get(state)
        if hit is None:
            row = self.transitions(state)
            targets = tuple(row)
            cum = []
            acc = 0.0
            for t in targets:
                acc += row[t]
                cum.append(acc)
            cum[-1] = max(cum[-1], 1.0)
            hit = cache[state] = (targets, cum)
        return hit


class AdjacentTranspositionChain(ChainKernel):
    name = "mnn"

    def __init__(self, prob_set: ProbabilitySet):
        self.prob_set = prob_set

    def transitions(self, state):
        return transitions_mnn(state, self.prob_set)


class ClassTranspositionChain(ChainKernel):
    name = "mtk"

    def __init__(self, prob_set: ProbabilitySet, partition: ClassPartition):
        self.prob_set = prob_set
        self.partition = partition
        validate_kclass(prob_set, partition)

    def transitions(self, state):
        return transitions_mtk(state, self.prob_set, self.partition)


class SameClassChain(ChainKernel):
    def __init__(self, prob_set: ProbabilitySet, partition: ClassPartition, cls: int):
        if not 1 <= cls <= partition.k:
            raise ValidationError(f"class {cls} outside 1..{partition.k}")
        self.prob_set = prob_set
        self.partition = partition
        self.cls = cls
        self.name = f"mi:{cls}"

    def transitions(self, state):
        return transitions_mi(state, self.prob_set, self.partition, self.cls)


class CrossClassChain(ChainKernel):
    name = "mk1"

    def __init__(self, prob_set: ProbabilitySet, partition: ClassPartition,
                 on_words: bool = True):
        self.prob_set = prob_set
        self.partition = partition
        self.space_kind = "words" if on_words else "permutations"
        validate_kclass(prob_set, partition)

    def transitions(self, state):
        return transitions_mk1(state, self.prob_set, self.partition)


class ParticleProcessChain(ChainKernel):
    name = "mpp"
    space_kind = "words"

    def __init__(self, prob_set: ProbabilitySet, partition: ClassPartition):
        self.prob_set = prob_set
        self.partition = partition

    def transitions(self, state):
        return transitions_mpp(state, self.prob_set, self.partition)


class TreeSwapChain(ChainKernel):
    name = "mtree"

    def __init__(self, tree: LeagueTree):
        from .treerep import induced_probabilities

        self.tree = tree
        self.prob_set = induced_probabilities(tree)

    def transitions(self, state):
        return transitions_mtree(state, self.tree, self.prob_set)


class GeneralizedExclusionChain(ChainKernel):
    name = "me"
    space_kind = "binary"

    def __init__(self, bias, n1: int, n0: int):
        self.bias = bias
        self.n1 = int(n1)
        self.n0 = int(n0)

    def transitions(self, state):
        if sum(state) != self.n1 or len(state) != self.n1 + self.n0:
            raise ValidationError(
                f"word {state} does not have {self.n1} ones and {self.n0} zeros"
            )
        return transitions_me(state, self.bias)


def make_kernel(name: str, *, prob_set=None, partition=None, tree=None,
                bias=None, n1=None, n0=None) -> ChainKernel:
    """Kernel registry keyed by the config-file chain names."""
    if name == "mnn":
        return AdjacentTranspositionChain(_need(prob_set, "mnn needs a model"))
    if name == "mtk":
        return ClassTranspositionChain(_need(prob_set, "mtk needs a model"),
                                       _need(partition, "mtk needs a class partition"))
    if name.startswith("mi:"):
        cls = int(name.split(":", 1)[1])
        return SameClassChain(_need(prob_set, "mi needs a model"),
                              _need(partition, "mi needs a class partition"), cls)
    if name == "mk1":
        return CrossClassChain(_need(prob_set, "mk1 needs a model"),
                               _need(partition, "mk1 needs a class partition"))
    if name == "mpp":
        return ParticleProcessChain(_need(prob_set, "mpp needs a model"),
                                    _need(partition, "mpp needs a class partition"))
    if name == "mtree":
        return TreeSwapChain(_need(tree, "mtree needs a league tree"))
    if name == "me":
        if bias is None or n1 is None or n0 is None:
            raise ValidationError("me needs bias, n1 and n0")
        return GeneralizedExclusionChain(bias, n1, n0)
    raise ValidationError(f"unknown chain {name!r}")


def _need(value, message):
    if value is None:
        raise ValidationError(message)
    return value


def sample_step(kernel: ChainKernel, state, rng):
    """Draw one step from the kernel's enumerated distribution.

    The generator is advanced in place; the same seed always yields the
    same trajectory.
    """
    targets, cum = kernel._row(state)
    u = rng.random()
    return targets[bisect_right(cum, u)]
