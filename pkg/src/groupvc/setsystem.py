"""Set systems over finite bases: translate families, shatter function, VC dimension.

The exact searches run on bit-vector columns.  A column of a base point x is
the bitmask, over family indices, of the sets containing x; a sample's trace
structure is the join of the column splits, tracked as a partition of the
family into cells.  A sample is shattered exactly when all 2^|sample| cells
are nonempty.

Families built from group translates are invariant under a transitive
permutation of the base, so searches may anchor the first sample point at
base index 0 without losing exactness; ``SetSystem.transitive`` records that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceededError
from .groups import FiniteGroup, GroupSubset

DEFAULT_WORK_BUDGET = 10_000_000

STATUS_EXACT = "exact"
STATUS_AT_LEAST = "at_least"
STATUS_UNKNOWN_ABOVE = "unknown_above"


@dataclass(frozen=True)
class VcResult:
    """Outcome of a VC-dimension search.

    ``exact``: the dimension is exactly ``value``.
    ``at_least``: the search stopped at the cap; the dimension is >= value.
    ``unknown_above``: the work budget ran out; the dimension is >= value but
    undetermined above it.
    """

    value: int
    status: str

    @property
    def is_exact(self) -> bool:
        return self.status == STATUS_EXACT

    def __str__(self) -> str:
        if self.status == STATUS_EXACT:
            return str(self.value)
        return f"{self.status} {self.value}"


@dataclass(frozen=True)
class ShatterResult:
    """Shatter-function value; ``exact=False`` marks a sampled lower bound."""

    value: int
    exact: bool


@dataclass(frozen=True)
class TranslateFamilySpec:
    """Recipe for a family of group translates of a fixed subset."""

    group: FiniteGroup
    a: GroupSubset
    mode: str  # "left" | "right" | "bi"

    def __post_init__(self):
        if self.mode not in ("left", "right", "bi"):
            raise ValueError(f"mode must be left, right or bi, got {self.mode!r}")
        self.group._check_subset(self.a)


class SetSystem:
    """A deduplicated family of subsets of ``{0..base_size-1}``."""

    def __init__(
        self,
        base_size: int,
        sets: Iterable[GroupSubset | int],
        labels: Sequence[str | None] | None = None,
        *,
        transitive: bool = False,
    ):
        if base_size <= 0:
            raise ValueError("base size must be positive")
        self.base_size = base_size
        label_list = list(labels) if labels is not None else None
        seen: dict[int, int] = {}
        bits_list: list[int] = []
        kept_labels: list[str | None] = []
        for pos, s in enumerate(sets):
            b = s.bits if isinstance(s, GroupSubset) else int(s)
            if isinstance(s, GroupSubset) and s.size != base_size:
                raise ValueError("family member universe does not match base size")
            if b < 0 or b >> base_size:
                raise ValueError("family member has points outside the base")
            if b in seen:
                continue
            seen[b] = len(bits_list)
            bits_list.append(b)
            kept_labels.append(label_list[pos] if label_list is not None else None)
        self.bits: tuple[int, ...] = tuple(bits_list)
        self.labels: tuple[str | None, ...] = tuple(kept_labels)
        self.transitive = transitive
        self._packed_cache: np.ndarray | None = None
        self._columns_cache: list[int] | None = None

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def family(self) -> tuple[GroupSubset, ...]:
        return tuple(GroupSubset(self.base_size, b) for b in self.bits)

    def set_at(self, i: int) -> GroupSubset:
        return GroupSubset(self.base_size, self.bits[i])

    def measures(self):
        from fractions import Fraction

        m = self.base_size
        return [Fraction(b.bit_count(), m) for b in self.bits]

    # -- cached dense representations ----------------------------------

    def packed(self) -> np.ndarray:
        """(f, ceil(m/8)) uint8 matrix, one little-endian packed row per set."""
        if self._packed_cache is None:
            m = self.base_size
            nbytes = (m + 7) // 8
            raw = b"".join(b.to_bytes(nbytes, "little") for b in self.bits)
            mat = np.frombuffer(raw, dtype=np.uint8).reshape(len(self.bits), nbytes)
            self._packed_cache = mat
        return self._packed_cache

    def bool_matrix(self) -> np.ndarray:
        """(f, m) boolean incidence matrix."""
        return np.unpackbits(
            self.packed(), axis=1, count=self.base_size, bitorder="little"
        ).astype(bool)

    def columns(self) -> list[int]:
        """Per base point, the bitmask over family indices of sets containing it."""
        if self._columns_cache is None:
            cols = [0] * self.base_size
            for i, s in enumerate(self.bits):
                bit = 1 << i
                x = s
                while x:
                    low = x & -x
                    cols[low.bit_length() - 1] |= bit
                    x ^= low
            self._columns_cache = cols
        return self._columns_cache

    @classmethod
    def from_packed_rows(
        cls,
        base_size: int,
        packed: np.ndarray,
        labels: Sequence[str | None] | None = None,
        *,
        transitive: bool = False,
    ) -> "SetSystem":
        rows = [int.from_bytes(row.tobytes(), "little") for row in packed]
        return cls(base_size, rows, labels, transitive=transitive)

    # -- file format -----------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "SetSystem":
        lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
        if not lines:
            raise ValueError("empty set-system input")
        m = int(lines[0])
        sets = []
        for ln in lines[1:]:
            if ln == "-":
                sets.append(GroupSubset.empty(m))
            else:
                sets.append(GroupSubset.from_indices(m, (int(p) for p in ln.split())))
        return cls(m, sets)

    def to_text(self) -> str:
        lines = [str(self.base_size)]
        for b in self.bits:
            members = GroupSubset(self.base_size, b).members()
            lines.append(" ".join(map(str, members)) if members else "-")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"SetSystem(base_size={self.base_size}, sets={len(self.bits)})"


# -- translate families -----------------------------------------------------


def translate_family(spec: TranslateFamilySpec) -> SetSystem:
    """The deduplicated family of left, right, or two-sided translates of a set.

    Labels record the first translating element(s) producing each set.
    """
    group, a, mode = spec.group, spec.a, spec.mode
    n = group.order
    v = a.to_bool_array()
    mul = group.mul
    inv_list = group.inv.astype(np.int64)
    if mode == "left":
        # row g is g*A: x in g*A  <=>  inv(g)*x in A
        rows = v[mul[inv_list]]
        labels = [f"g={g}" for g in range(n)]
        return _dedup_rows(n, rows, labels)
    if mode == "right":
        # row h is A*h: x in A*h  <=>  x*inv(h) in A
        rows = v[mul[:, inv_list]].T
        labels = [f"h={h}" for h in range(n)]
        return _dedup_rows(n, rows, labels)
    # bi: row (g, h) is g*A*h: x in g*A*h  <=>  inv(g)*x*inv(h) in A
    blocks = []
    labels = []
    for g in range(n):
        left_row = mul[int(inv_list[g])]
        block = v[mul[np.ix_(left_row, inv_list)]].T  # row h of the block is g*A*h
        blocks.append(np.packbits(block, axis=1, bitorder="little"))
        labels.extend(f"g={g},h={h}" for h in range(n))
    packed = np.concatenate(blocks, axis=0)
    return _dedup_packed(n, packed, labels)


def _dedup_rows(base_size: int, rows: np.ndarray, labels: list[str]) -> SetSystem:
    return _dedup_packed(base_size, np.packbits(rows, axis=1, bitorder="little"), labels)


def _dedup_packed(base_size: int, packed: np.ndarray, labels: list[str]) -> SetSystem:
    _, first = np.unique(packed, axis=0, return_index=True)
    order = np.sort(first)
    kept = packed[order]
    kept_labels = [labels[i] for i in order]
    return SetSystem.from_packed_rows(base_size, kept, kept_labels, transitive=True)


# -- traces and shattering ----------------------------------------------------


def _sample_indices(sys: SetSystem, sample) -> list[int]:
    if isinstance(sample, GroupSubset):
        if sample.size != sys.base_size:
            raise ValueError("sample universe does not match the base")
        return sample.members()
    pts = sorted({int(x) for x in sample})
    for x in pts:
        if not 0 <= x < sys.base_size:
            raise ValueError(f"sample point {x} outside the base")
    return pts


def trace(sys: SetSystem, sample) -> list[tuple[int, ...]]:
    """Distinct traces ``sample & S`` over the family, sorted."""
    pts = _sample_indices(sys, sample)
    mask = 0
    for x in pts:
        mask |= 1 << x
    seen = set()
    for b in sys.bits:
        seen.add(b & mask)
    out = []
    for t in seen:
        members = []
        x = t
        while x:
            low = x & -x
            members.append(low.bit_length() - 1)
            x ^= low
        out.append(tuple(members))
    return sorted(out)


def is_shattered(sys: SetSystem, sample) -> bool:
    """True iff the family cuts all 2^|sample| traces on the sample."""
    pts = _sample_indices(sys, sample)
    if len(pts) > 30:
        raise ValueError(f"sample of size {len(pts)} exceeds the shattering guard (30)")
    if not sys.bits:
        return False
    cols = sys.columns()
    cells = [(1 << len(sys.bits)) - 1]
    for x in pts:
        col = cols[x]
        new = []
        for cell in cells:
            a = cell & col
            if not a or a == cell:
                return False
            new.append(a)
            new.append(cell ^ a)
        cells = new
    return True


def sauer_shelah_bound(k: int, n: int) -> int:
    """The binomial shatter bound sum_{i<=k} C(n, i)."""
    from math import comb

    if k < 0 or n < 0:
        raise ValueError("arguments must be nonnegative")
    return sum(comb(n, i) for i in range(min(k, n) + 1))


# -- the exact search engine --------------------------------------------------


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self, amount: int = 1) -> bool:
        self.left -= amount
        return self.left >= 0


def _splits(sys: SetSystem) -> list[int]:
    """Canonical nontrivial column splits, as bitmasks over family indices."""
    f = len(sys.bits)
    full = (1 << f) - 1
    out = set()
    for c in sys.columns():
        if c == 0 or c == full:
            continue
        out.add(min(c, full ^ c))
    return sorted(out)


def _shatter_levels(sys: SetSystem, max_n: int, budget: _Budget) -> list[int]:
    """Exact shatter-function values pi(0..max_n) via a partition-join DP.

    States are partitions of the family reachable by joining point splits;
    level t holds partitions using t effective splits.  pi(n) is the best
    cell count seen at levels <= n (duplicate-split sample points never
    change the trace count, and the base always has enough points to pad).
    """
    f = len(sys.bits)
    if f == 0:
        return [0] * (max_n + 1)
    if max_n == 0:
        return [1]
    full = (1 << f) - 1
    splits = _splits(sys)
    best = [1] * (max_n + 1)

    def fill_from(level: int, value: int) -> None:
        for t in range(level, max_n + 1):
            best[t] = max(best[t], value)

    anchor_split = None
    if sys.transitive:
        c0 = sys.columns()[0]
        if c0 != 0 and c0 != full:
            anchor_split = min(c0, full ^ c0)

    states: set[frozenset[int]] = {frozenset((full,))}
    level = 0
    if anchor_split is not None:
        states = {frozenset((anchor_split, full ^ anchor_split))}
        level = 1
        fill_from(1, 2)
    while level < max_n and states:
        # the next level attempts exactly states x splits transitions
        if not budget.spend(len(states) * len(splits)):
            raise BudgetExceededError(
                f"shatter search exceeded its work budget at level {level + 1}"
            )
        nxt: set[frozenset[int]] = set()
        nxt_level = level + 1
        for cells in states:
            for sp in splits:
                new = []
                changed = False
                for cell in cells:
                    a = cell & sp
                    if a and a != cell:
                        new.append(a)
                        new.append(cell ^ a)
                        changed = True
                    else:
                        new.append(cell)
                if not changed:
                    continue
                key = frozenset(new)
                count = len(key)
                if count > best[nxt_level]:
                    fill_from(nxt_level, count)
                    if count == f:
                        return best  # saturated: pi can never exceed the family size
                # keep the state only if doubling per level could still beat
                # some recorded value within the horizon
                for delta in range(1, max_n - nxt_level + 1):
                    if min(f, count << delta) > best[nxt_level + delta]:
                        nxt.add(key)
                        break
        states = nxt
        level += 1
    return best


def shatter_profile(
    sys: SetSystem, max_n: int, *, budget: int = DEFAULT_WORK_BUDGET
) -> list[int]:
    """Exact ``[pi(0), ..., pi(max_n)]`` in one shared search."""
    if not 0 <= max_n <= sys.base_size:
        raise ValueError(f"max_n must lie in 0..{sys.base_size}")
    values = _shatter_levels(sys, max_n, _Budget(budget))
    ceil = 1
    out = []
    for t, v in enumerate(values):
        ceil = 1 << t if t < 62 else ceil
        out.append(min(v, ceil))
    return out


def shatter_function(
    sys: SetSystem,
    n: int,
    mode: str = "exact",
    *,
    seed: int | None = None,
    tries: int = 1000,
    budget: int = DEFAULT_WORK_BUDGET,
) -> ShatterResult:
    """The shatter function pi(n): max distinct traces over size-n samples.

    Exact mode is refused with :class:`BudgetExceededError` past the work
    budget; sampled mode returns the max over seeded random samples, flagged
    as a lower bound.
    """
    if not 0 <= n <= sys.base_size:
        raise ValueError(f"n must lie in 0..{sys.base_size}")
    if mode == "exact":
        return ShatterResult(shatter_profile(sys, n, budget=budget)[n], True)
    if mode != "sampled":
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    import random

    rng = random.Random(seed)
    if not sys.bits:
        return ShatterResult(0, n == 0)
    base = list(range(sys.base_size))
    best = 0
    for _ in range(max(1, tries)):
        pts = rng.sample(base, n)
        mask = 0
        for x in pts:
            mask |= 1 << x
        seen = {b & mask for b in sys.bits}
        best = max(best, len(seen))
    return ShatterResult(best, False)


def _exists_shattered(
    sys: SetSystem, s: int, budget: _Budget, anchored: bool
) -> bool:
    """Sorted DFS for one shattered s-sample, pruned by downward closure."""
    f = len(sys.bits)
    cols = sys.columns()
    full = (1 << f) - 1
    m = sys.base_size
    stack: list[tuple[int, tuple[int, ...]]] = []
    if anchored:
        c0 = cols[0]
        if c0 and c0 != full:
            stack.append((1, (c0, full ^ c0)))
    else:
        for x0 in range(m):
            c0 = cols[x0]
            if c0 and c0 != full:
                stack.append((x0 + 1, (c0, full ^ c0)))
    if s == 1:
        return bool(stack)
    target = 1 << s
    pending = 0
    while stack:
        start, cells = stack.pop()
        if len(cells) == target:
            return True
        pending += m - start
        if pending >= 4096 or pending > budget.left:
            if not budget.spend(pending):
                raise BudgetExceededError("vc search exceeded its work budget")
            pending = 0
        for x in range(start, m):
            col = cols[x]
            new = []
            push = new.append
            for cell in cells:
                a = cell & col
                if not a or a == cell:
                    break
                push(a)
                push(cell ^ a)
            else:
                if len(new) == target:
                    return True
                stack.append((x + 1, tuple(new)))
    return False


def vc_dimension(
    sys: SetSystem, cap: int = 16, *, budget: int = DEFAULT_WORK_BUDGET
) -> VcResult:
    """Exact VC dimension below ``cap``, else ``at_least cap``.

    The search walks sample sizes upward; a sample is only extended while it
    stays shattered (shattering is downward closed).  Running out of work
    budget yields an explicit ``unknown_above`` result, never a silent
    approximation.  An empty family has dimension -1 by convention.
    """
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    f = len(sys.bits)
    if f == 0:
        return VcResult(-1, STATUS_EXACT)
    shared = _Budget(budget)
    s = 1
    while True:
        if s > cap:
            return VcResult(cap, STATUS_AT_LEAST)
        if (1 << s) > f or s > sys.base_size:
            return VcResult(s - 1, STATUS_EXACT)
        try:
            found = _exists_shattered(sys, s, shared, sys.transitive)
        except BudgetExceededError:
            return VcResult(s - 1, STATUS_UNKNOWN_ABOVE)
        if not found:
            return VcResult(s - 1, STATUS_EXACT)
        s += 1


def nip_check(sys: SetSystem, k: int, *, budget: int = DEFAULT_WORK_BUDGET) -> bool:
    """True iff the VC dimension is < k (no k points are shattered)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    res = vc_dimension(sys, cap=k, budget=budget)
    if res.status == STATUS_EXACT:
        return res.value < k
    if res.value >= k:
        return False
    raise BudgetExceededError(
        f"vc search undetermined above {res.value}; cannot decide {k}-NIP"
    )


def dual_system(sys: SetSystem) -> SetSystem:
    """Swap the roles of points and sets: base = family indices."""
    f = len(sys.bits)
    if f == 0:
        raise ValueError("dual of an empty family is undefined")
    cols = sys.columns()
    return SetSystem(f, cols, [f"x={x}" for x in range(sys.base_size)])
