"""Probability models for biased adjacent-transposition dynamics.

Three families are supported: a general pairwise matrix, class-structured
sets where the swap probability depends only on the classes of the two
elements, and access-frequency (weight) sets with p[i][j] = w_i/(w_i+w_j).
Tree-structured sets are built in :mod:`biasedperm.treerep` and reuse the
same container type.

Indices are 1-based everywhere in the public API and in serialized form.
All off-diagonal probabilities live strictly inside (0, 1): endpoint values
break ergodicity of every chain in this package and make bias ratios
undefined, so they are rejected at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import numpy as np

from .errors import ValidationError

PROVENANCES = ("general", "k-class", "w-distribution", "league-tree")


@dataclass(frozen=True)
class ProbabilitySet:
    """Full pairwise swap-probability matrix over n elements.

    ``p[i-1, j-1]`` is the probability that elements i and j end up in the
    order (i, j) when they interact.  Both triangles are stored; the
    complement relation p[j][i] = 1 - p[i][j] holds exactly because the
    mirror entry is always derived as ``1.0 - value``.  The diagonal is
    unused and set to NaN.
    """

    n: int
    p: np.ndarray
    provenance: str = "general"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        self.p.setflags(write=False)

    def prob(self, i: int, j: int) -> float:
        """Probability of placing elements i and j in order (i, j)."""
        if i == j:
            raise ValidationError("probability is undefined for a pair (i, i)")
        return float(self.p[i - 1, j - 1])

    def ratio(self, i: int, j: int) -> float:
        """Bias ratio p[i][j] / p[j][i]."""
        return self.prob(i, j) / self.prob(j, i)


@dataclass(frozen=True)
class ClassPartition:
    """Partition of 1..n into k contiguous classes.

    ``boundaries`` holds the cut points c_1 < c_2 < ... < c_{k-1}; class 1
    covers 1..c_1, class 2 covers c_1+1..c_2, and so on.  Contiguity is a
    hard requirement: it is what guarantees that the induced sets are
    positively biased.
    """

    n: int
    boundaries: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("partition needs n >= 1")
        b = self.boundaries
        if any(not 1 <= c < self.n for c in b) or list(b) != sorted(set(b)):
            raise ValidationError(
                f"boundaries must be strictly increasing cut points inside 1..{self.n - 1}, got {b}"
            )

    @property
    def k(self) -> int:
        return len(self.boundaries) + 1

    @property
    def sizes(self) -> tuple[int, ...]:
        edges = (0,) + self.boundaries + (self.n,)
        return tuple(edges[i + 1] - edges[i] for i in range(len(edges) - 1))

    def class_of(self, x: int) -> int:
        """1-based class label of element x."""
        if not 1 <= x <= self.n:
            raise ValidationError(f"element {x} outside 1..{self.n}")
        c = 1
        for cut in self.boundaries:
            if x <= cut:
                return c
            c += 1
        return c

    def members(self, c: int) -> tuple[int, ...]:
        edges = (0,) + self.boundaries + (self.n,)
        if not 1 <= c <= self.k:
            raise ValidationError(f"class {c} outside 1..{self.k}")
        return tuple(range(edges[c - 1] + 1, edges[c] + 1))

    @classmethod
    def from_sizes(cls, sizes) -> "ClassPartition":
        sizes = tuple(int(s) for s in sizes)
        if any(s < 1 for s in sizes):
            raise ValidationError("class sizes must be positive")
        cuts = []
        total = 0
        for s in sizes[:-1]:
            total += s
            cuts.append(total)
        return cls(sum(sizes), tuple(cuts))


@dataclass(frozen=True)
class KClassParams:
    """Cut points plus the upper-triangular matrix of cross-class probabilities."""

    partition: ClassPartition
    q: dict = field(default_factory=dict)  # (a, b) with a < b -> probability in (1/2, 1)

    def __post_init__(self):
        k = self.partition.k
        wanted = {(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)}
        got = set(self.q)
        if got != wanted:
            raise ValidationError(
                f"q must supply exactly the pairs {sorted(wanted)}, got {sorted(got)}"
            )
        for pair, v in self.q.items():
            v = float(v)
            if not 0.5 < v < 1.0:
                raise ValidationError(
                    f"cross-class probability q{pair}={v} must lie strictly in (1/2, 1)"
                )


@dataclass(frozen=True)
class WeightVector:
    """Access frequencies, nonincreasing, kept as exact rationals.

    Exactness matters: equal weights collapse elements into one class, and
    that collapse is decided by exact comparison of the supplied decimal
    strings, never by a floating tolerance.
    """

    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.values:
            raise ValidationError("weight vector is empty")
        if any(v <= 0 for v in self.values):
            raise ValidationError("weights must be positive")
        if any(self.values[i] < self.values[i + 1] for i in range(len(self.values) - 1)):
            raise ValidationError("weights must be nonincreasing")

    @classmethod
    def from_strings(cls, items) -> "WeightVector":
        vals = []
        for s in items:
            try:
                vals.append(Fraction(Decimal(str(s))))
            except (InvalidOperation, ValueError) as exc:
                raise ValidationError(f"bad weight {s!r}: {exc}") from exc
        return cls(tuple(vals))

    @property
    def distinct(self) -> tuple[Fraction, ...]:
        out = []
        for v in self.values:
            if not out or out[-1] != v:
                out.append(v)
        return tuple(out)

    def induced_partition(self) -> ClassPartition:
        """Classes are the runs of equal weight values."""
        sizes = []
        for v in self.values:
            if sizes and self.values[sum(sizes) - 1] == v:
                sizes[-1] += 1
            else:
                sizes.append(1)
        return ClassPartition.from_sizes(sizes)


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of the three weak-monotonicity clauses.

    prop1: p[i][j] >= 1/2 for 2 <= i < j <= n.
    prop2: p[i][j+1] >= p[i][j] for 1 <= i < j <= n-1.
    prop3: p[i-1][j] >= p[i][j] for 2 <= i < j <= n.
    The set is weakly monotone iff prop1 and (prop2 or prop3).
    """

    prop1: bool
    prop2: bool
    prop3: bool

    @property
    def weakly_monotone(self) -> bool:
        return self.prop1 and (self.prop2 or self.prop3)


def _empty_matrix(n: int) -> np.ndarray:
    p = np.full((n, n), np.nan)
    return p


def _check_open_interval(value: float, what: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValidationError(
            f"{what} = {value} is outside the open interval (0, 1); "
            "boundary probabilities break ergodicity and are rejected"
        )
    return value


def build_general(n: int, entries) -> ProbabilitySet:
    """Build a general set from one probability per unordered pair.

    ``entries`` is an iterable of (i, j, p) with 1-based i != j.  Every
    unordered pair must be supplied exactly once; the complementary entry
    is filled as 1 - p.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    p = _empty_matrix(n)
    seen = set()
    for i, j, v in entries:
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ValidationError(f"bad pair ({i}, {j}) for n={n}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValidationError(f"pair {key} supplied more than once")
        seen.add(key)
        v = _check_open_interval(v, f"p[{i}][{j}]")
        p[i - 1, j - 1] = v
        p[j - 1, i - 1] = 1.0 - v
    missing = [
        (i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in seen
    ]
    if missing:
        raise ValidationError(f"missing pairs: {missing}")
    return ProbabilitySet(n=n, p=p, provenance="general")


def build_kclass(params: KClassParams) -> ProbabilitySet:
    """Induce the pairwise matrix of a class-structured set.

    Elements in the same class interact with probability exactly 1/2;
    elements from classes a < b are put in increasing order with
    probability q[(a, b)].
    """
    part = params.partition
    n = part.n
    p = _empty_matrix(n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            ci, cj = part.class_of(i), part.class_of(j)
            if ci == cj:
                v = 0.5
            else:
                v = float(params.q[(ci, cj)])
            p[i - 1, j - 1] = v
            p[j - 1, i - 1] = 1.0 - v
    return ProbabilitySet(n=n, p=p, provenance="k-class")


def build_from_weights(w: WeightVector) -> ProbabilitySet:
    """Frequency-induced set with p[i][j] = w_i / (w_i + w_j)."""
    vals = w.values
    n = len(vals)
    p = _empty_matrix(n)
    for i in range(n):
        for j in range(i + 1, n):
            v = float(vals[i] / (vals[i] + vals[j]))
            if vals[i] == vals[j]:
                v = 0.5
            v = _check_open_interval(v, f"p[{i + 1}][{j + 1}]")
            p[i, j] = v
            p[j, i] = 1.0 - v
    return ProbabilitySet(n=n, p=p, provenance="w-distribution")


def kclass_params_from_weights(w: WeightVector) -> KClassParams:
    """The class parameters a weight vector collapses to (k distinct values)."""
    part = w.induced_partition()
    reps = [w.values[part.members(c)[0] - 1] for c in range(1, part.k + 1)]
    q = {}
    for a in range(1, part.k + 1):
        for b in range(a + 1, part.k + 1):
            q[(a, b)] = float(reps[a - 1] / (reps[a - 1] + reps[b - 1]))
    return KClassParams(partition=part, q=q)


def uniform_set(n: int) -> ProbabilitySet:
    """All pairs interact with probability 1/2 (single class covering 1..n)."""
    return build_kclass(KClassParams(partition=ClassPartition(n, ()), q={}))


def constant_bias_set(n: int, p: float) -> ProbabilitySet:
    """Every cross pair put in order with the same probability p > 1/2."""
    part = ClassPartition(n, tuple(range(1, n)))
    q = {(a, b): float(p) for a in range(1, n + 1) for b in range(a + 1, n + 1)}
    return build_kclass(KClassParams(partition=part, q=q))


def check_weak_monotonicity(prob_set: ProbabilitySet) -> MonotonicityReport:
    """Exhaustive scan of the three monotonicity clauses; no sampling."""
    p = prob_set.p
    n = prob_set.n
    prop1 = all(
        p[i - 1, j - 1] >= 0.5 for i in range(2, n + 1) for j in range(i + 1, n + 1)
    )
    prop2 = all(
        p[i - 1, j] >= p[i - 1, j - 1]
        for i in range(1, n) for j in range(i + 1, n)
    )
    prop3 = all(
        p[i - 2, j - 1] >= p[i - 1, j - 1]
        for i in range(2, n + 1) for j in range(i + 1, n + 1)
    )
    return MonotonicityReport(prop1=prop1, prop2=prop2, prop3=prop3)


def validate_kclass(prob_set: ProbabilitySet, partition: ClassPartition) -> np.ndarray:
    """Check that prob_set is constant on class pairs and 1/2 within classes.

    Returns the (k+1) x (k+1) table of class-pair probabilities, 1-based,
    with table[a][b] the probability of ordering an (a, b) cross pair
    increasingly (a != b) and 1/2 on the diagonal.
    """
    if prob_set.n != partition.n:
        raise ValidationError("probability set and partition disagree on n")
    k = partition.k
    table = np.full((k + 1, k + 1), np.nan)
    for a in range(1, k + 1):
        table[a, a] = 0.5
        for x in partition.members(a):
            for y in partition.members(a):
                if x < y and prob_set.p[x - 1, y - 1] != 0.5:
                    raise ValidationError(
                        f"within-class pair ({x}, {y}) has probability "
                        f"{prob_set.p[x - 1, y - 1]} != 1/2"
                    )
        for b in range(a + 1, k + 1):
            vals = {prob_set.p[x - 1, y - 1] for x in partition.members(a)
                    for y in partition.members(b)}
            if len(vals) != 1:
                raise ValidationError(
                    f"cross-class pair ({a}, {b}) probabilities are not constant: {sorted(vals)}"
                )
            v = vals.pop()
            table[a, b] = v
            table[b, a] = 1.0 - v
    return table


def check_bounded(prob_set: ProbabilitySet, partition: ClassPartition):
    """Minimum cross-class bias ratio p[i][j]/p[j][i] over i < j, or None.

    Returns None when the partition has no cross-class pair (single class);
    the caller compares the returned ratio against its own threshold.
    """
    validate_kclass(prob_set, partition)
    best = None
    for i in range(1, prob_set.n + 1):
        for j in range(i + 1, prob_set.n + 1):
            if partition.class_of(i) == partition.class_of(j):
                continue
            r = prob_set.ratio(i, j)
            if best is None or r < best:
                best = r
    return best


def random_monotone_set(n: int, rng, low: float = 0.5, high: float = 0.99) -> ProbabilitySet:
    """Seeded random monotone positively biased set (general provenance).

    Monotone here means p[i][j] <= p[i][j+1] and p[i][j] >= p[i+1][j] for
    all 1 <= i < j <= n, with every upper-triangle entry in [low, high].
    Rows are drawn top-down, columns left to right, each entry uniform on
    the interval its monotonicity constraints allow.
    """
    p = np.full((n, n), np.nan)
    entries = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lo = low
            if j - 1 > i:
                lo = max(lo, p[i - 1, j - 2])  # p[i][j] >= p[i][j-1]
            hi = high
            if i - 1 >= 1:
                hi = min(hi, p[i - 2, j - 1])  # p[i][j] <= p[i-1][j]
            v = float(rng.uniform(lo, hi))
            p[i - 1, j - 1] = v
            entries.append((i, j, v))
    return build_general(n, entries)


def parse_probability(text) -> float:
    """Parse a decimal-string probability from a config file."""
    if isinstance(text, bool) or not isinstance(text, str):
        raise ValidationError(
            f"probabilities must be decimal strings, got {text!r}"
        )
    try:
        value = float(Decimal(text))
    except (InvalidOperation, ValueError) as exc:
        raise ValidationError(f"bad probability string {text!r}") from exc
    return _check_open_interval(value, f"probability {text!r}")


def _parse_pair_key(key: str) -> tuple[int, int]:
    body = key.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    try:
        a, b = (int(s) for s in body.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad pair key {key!r}, expected \"(a,b)\"") from exc
    return a, b


def model_from_config(cfg: dict):
    """Build a model from its JSON config form.

    Returns (ProbabilitySet, ClassPartition or None, LeagueTree or None).
    The schema keeps 1-based indices and decimal-string probabilities:

      {"type": "general", "n": 3, "entries": [[1, 2, "0.6"], ...]}
      {"type": "kclass", "n": 6, "boundaries": [2, 3], "q": {"(1,2)": "0.8", ...}}
      {"type": "weights", "w": ["4", "2", "2", "1"]}
      {"type": "league", "tree": {...}}
    """
    if not isinstance(cfg, dict):
        raise ValidationError("model config must be an object")
    kind = cfg.get("type")
    if kind == "general":
        _require_keys(cfg, {"type", "n", "entries"})
        entries = [(int(i), int(j), parse_probability(s)) for i, j, s in cfg["entries"]]
        return build_general(int(cfg["n"]), entries), None, None
    if kind == "kclass":
        _require_keys(cfg, {"type", "n", "boundaries", "q"})
        part = ClassPartition(int(cfg["n"]), tuple(int(c) for c in cfg["boundaries"]))
        q = {_parse_pair_key(k): parse_probability(v) for k, v in cfg["q"].items()}
        return build_kclass(KClassParams(partition=part, q=q)), part, None
    if kind == "weights":
        _require_keys(cfg, {"type", "w"})
        w = WeightVector.from_strings(cfg["w"])
        return build_from_weights(w), w.induced_partition(), None
    if kind == "league":
        _require_keys(cfg, {"type", "tree"})
        from . import treerep

        tree = treerep.parse_tree(cfg["tree"])
        return treerep.induced_probabilities(tree), None, tree
    raise ValidationError(f"unknown model type {kind!r}")


def _require_keys(cfg: dict, allowed: set):
    extra = set(cfg) - allowed
    if extra:
        raise ValidationError(f"unknown model config fields: {sorted(extra)}")
    missing = allowed - set(cfg)
    if missing:
        raise ValidationError(f"missing model config fields: {sorted(missing)}")
