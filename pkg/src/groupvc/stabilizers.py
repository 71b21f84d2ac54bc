"""Measure stabilizers, generic covering witnesses, and covering numbers.

``stab_eps(G, A, eps)`` collects the elements whose translate of A differs
from A on at most an eps-fraction of the group; thresholds are compared by
integer cross multiplication, so boundary cases are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .approx import eps_net
from .errors import BudgetExceededError, InternalCheckError
from .groups import (
    FiniteGroup,
    GroupSubset,
    is_normal,
    is_subgroup,
    normal_core,
    setwise_stabilizer,
)
from .setsystem import (
    SetSystem,
    TranslateFamilySpec,
    shatter_function,
    translate_family,
)

DEFAULT_BOUND_BUDGET = 50_000
DEFAULT_EXACT_COVER_LIMIT = 60


@dataclass(frozen=True)
class StabilizerReport:
    """Stab^eps together with its covering witness and class-count bound."""

    epsilon: Fraction
    stab: GroupSubset
    is_subgroup: bool
    covering_reps: tuple[int, ...]
    class_count: int
    net_size: int
    theoretical_class_bound: int | None

    def to_json_dict(self) -> dict:
        return {
            "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "stab_members": self.stab.members(),
            "stab_size": len(self.stab),
            "is_subgroup": self.is_subgroup,
            "covering_reps": list(self.covering_reps),
            "class_count": self.class_count,
            "net_size": self.net_size,
            "theoretical_class_bound": self.theoretical_class_bound,
        }


@dataclass(frozen=True)
class CoverResult:
    """A verified set of translators whose translates of the target cover G."""

    side: str
    translators: tuple[int, ...]
    size: int
    optimal: bool

    def to_json_dict(self) -> dict:
        return {
            "side": self.side,
            "translators": list(self.translators),
            "size": self.size,
            "optimal": self.optimal,
        }


@dataclass(frozen=True)
class SimilarityPartition:
    """Families grouped by small symmetric difference.

    At tau = 0 this is the exact-equality partition, a true equivalence.  For
    tau > 0 near-equality is not transitive, so the classes are connected
    components of the threshold graph; ``is_equivalence`` flags which case
    applies.
    """

    classes: tuple[tuple[int, ...], ...]
    tau: Fraction
    is_equivalence: bool


def _left_translate_matrix(group: FiniteGroup, v: np.ndarray) -> np.ndarray:
    """Boolean matrix whose row g is the membership vector of g*A."""
    inv_list = group.inv.astype(np.int64)
    return v[group.mul[inv_list]]


def stab_eps(group: FiniteGroup, a: GroupSubset, epsilon) -> GroupSubset:
    """{x : |xA symdiff A| <= eps * |G|}, exact rational comparison.

    Always contains the identity and is inverse-closed; it is a subgroup only
    at eps = 0 in general.
    """
    group._check_subset(a)
    epsilon = Fraction(epsilon)
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    n = group.order
    v = a.to_bool_array()
    diffs = (_left_translate_matrix(group, v) != v[None, :]).sum(axis=1)
    p, q = epsilon.numerator, epsilon.denominator
    return GroupSubset.from_bool_array(diffs * q <= p * n)


def stab_zero_subgroup(group: FiniteGroup, a: GroupSubset) -> GroupSubset:
    """Stab^0: the exact setwise stabilizer, asserted to be a subgroup."""
    s0 = stab_eps(group, a, Fraction(0))
    sw = setwise_stabilizer(group, a, "left")
    if s0 != sw:
        raise InternalCheckError("Stab^0 disagrees with the setwise stabilizer")
    if not is_subgroup(group, s0):
        raise InternalCheckError("Stab^0 failed the subgroup check")
    return s0


def stab_covering_witness(
    group: FiniteGroup,
    a: GroupSubset,
    epsilon,
    k_hint: int | None = None,
    *,
    bound_budget: int = DEFAULT_BOUND_BUDGET,
) -> StabilizerReport:
    """Build and verify the generic-cover witness for Stab^eps.

    The construction nets the family of translated pairwise differences
    {g * (A symdiff dA) : g in G, d outside Stab^eps} (every member has
    measure > eps), classifies group elements by the trace of xA on the net,
    and takes least-index class representatives.  Elements sharing a trace
    miss the net on their translate difference, so that difference has
    measure <= eps and each class lies inside rep * Stab^eps; the resulting
    cover of G is still re-verified exactly.

    ``k_hint`` is accepted for interface compatibility; the greedy net and
    the exact verifier do not need a dimension hint.  The class-count bound
    pi(net size) of the left-translate family is attached when its exact
    computation fits in ``bound_budget``.
    """
    del k_hint
    group._check_subset(a)
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    n = group.order
    v = a.to_bool_array()
    W = _left_translate_matrix(group, v)
    stab = stab_eps(group, a, epsilon)

    heavy = sorted(stab.complement().members())
    if heavy:
        diff_rows = W[heavy] ^ v[None, :]
        packed = np.unique(np.packbits(diff_rows, axis=1, bitorder="little"), axis=0)
        blocks = []
        for row in packed:
            d = np.unpackbits(row, count=n, bitorder="little").astype(bool)
            blocks.append(
                np.packbits(_left_translate_matrix(group, d), axis=1, bitorder="little")
            )
        all_packed = np.unique(np.concatenate(blocks, axis=0), axis=0)
        diff_sys = SetSystem.from_packed_rows(n, all_packed, transitive=True)
        net = eps_net(diff_sys, epsilon)
        net_points = net.points
    else:
        net_points = ()

    if net_points:
        traces = W[:, list(net_points)]
        keys = np.packbits(traces, axis=1, bitorder="little")
        reps: list[int] = []
        seen: dict[bytes, int] = {}
        for x in range(n):
            key = keys[x].tobytes()
            if key not in seen:
                seen[key] = x
                reps.append(x)
    else:
        reps = [0]

    stab_vec = stab.to_bool_array()
    covered = np.zeros(n, dtype=bool)
    mul, inv = group.mul, group.inv
    for r in reps:
        covered |= stab_vec[mul[int(inv[r])]]
    if not covered.all():
        raise InternalCheckError("covering witness failed exact verification")

    bound: int | None = None
    left_sys = translate_family(TranslateFamilySpec(group, a, "left"))
    try:
        bound = shatter_function(
            left_sys, min(len(net_points), n), budget=bound_budget
        ).value
    except BudgetExceededError:
        bound = None

    return StabilizerReport(
        epsilon=epsilon,
        stab=stab,
        is_subgroup=is_subgroup(group, stab),
        covering_reps=tuple(reps),
        class_count=len(reps),
        net_size=len(net_points),
        theoretical_class_bound=bound,
    )


def _translate_bits(group: FiniteGroup, a: GroupSubset, side: str) -> list[int]:
    v = a.to_bool_array()
    if side == "left":
        rows = _left_translate_matrix(group, v)
    else:
        inv_list = group.inv.astype(np.int64)
        rows = v[group.mul[:, inv_list]].T
    packed = np.packbits(rows, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def covering_number(
    group: FiniteGroup,
    a: GroupSubset,
    side: str = "left",
    mode: str = "greedy",
    *,
    exact_limit: int = DEFAULT_EXACT_COVER_LIMIT,
) -> CoverResult:
    """How many translates of ``a`` cover the group.

    Greedy mode runs max-new-coverage with least-index tie-break and always
    returns a valid cover.  Exact mode runs branch and bound over translators
    and is refused above ``exact_limit`` elements; only exact results carry
    ``optimal=True``.
    """
    group._check_subset(a)
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if not a:
        raise ValueError("the empty set has no covering translates")
    n = group.order
    full = (1 << n) - 1
    rows = _translate_bits(group, a, side)
    distinct: dict[int, int] = {}
    for g, bits in enumerate(rows):
        if bits not in distinct:
            distinct[bits] = g
    sets = list(distinct.keys())
    translators = list(distinct.values())

    greedy_sol = _greedy_cover(sets, translators, full)
    if mode == "greedy":
        result = CoverResult(side, tuple(greedy_sol), len(greedy_sol), False)
    elif mode == "exact":
        if n > exact_limit:
            raise ValueError(
                f"exact cover search limited to order {exact_limit}, group has {n}"
            )
        sol = _exact_cover(sets, translators, full, n, len(greedy_sol), greedy_sol)
        result = CoverResult(side, tuple(sol), len(sol), True)
    else:
        raise ValueError(f"mode must be 'greedy' or 'exact', got {mode!r}")

    union = 0
    lookup = dict(zip(translators, sets))
    for g in result.translators:
        union |= lookup[g]
    if union != full:
        raise InternalCheckError("cover result failed exact verification")
    return result


def _greedy_cover(sets: list[int], translators: list[int], full: int) -> list[int]:
    # translators are ascending, so scanning in order keeps least-index ties
    uncovered = full
    chosen: list[int] = []
    while uncovered:
        best_gain, best_i = -1, -1
        for i, bits in enumerate(sets):
            gain = (bits & uncovered).bit_count()
            if gain > best_gain:
                best_gain, best_i = gain, i
        if best_gain <= 0:
            raise InternalCheckError("greedy cover stalled")
        chosen.append(translators[best_i])
        uncovered &= ~sets[best_i]
    return chosen


def _exact_cover(
    sets: list[int],
    translators: list[int],
    full: int,
    n: int,
    best_size: int,
    best_sol: list[int],
) -> list[int]:
    covers_of: list[list[int]] = [[] for _ in range(n)]
    for i, bits in enumerate(sets):
        x = bits
        while x:
            low = x & -x
            covers_of[low.bit_length() - 1].append(i)
            x ^= low
    best = {"size": best_size, "sol": list(best_sol)}

    def dfs(covered: int, chosen: list[int]) -> None:
        if covered == full:
            if len(chosen) < best["size"]:
                best["size"] = len(chosen)
                best["sol"] = list(chosen)
            return
        uncovered = full & ~covered
        max_gain = max((b & uncovered).bit_count() for b in sets)
        need = (uncovered.bit_count() + max_gain - 1) // max_gain
        if len(chosen) + need >= best["size"]:
            return
        # branch on the uncovered element with the fewest live covers,
        # trying its candidate sets in descending fresh-coverage order
        pick_opts = None
        x = uncovered
        while x:
            low = x & -x
            e = low.bit_length() - 1
            opts = [i for i in covers_of[e] if sets[i] & uncovered]
            if pick_opts is None or len(opts) < len(pick_opts):
                pick_opts = opts
                if len(opts) <= 1:
                    break
            x ^= low
        ranked = sorted(
            pick_opts or [], key=lambda i: (-(sets[i] & uncovered).bit_count(), i)
        )
        for i in ranked:
            chosen.append(translators[i])
            dfs(covered | sets[i], chosen)
            chosen.pop()

    dfs(0, [])
    return best["sol"]


def intersect_stabilizers(group: FiniteGroup, family: SetSystem) -> GroupSubset:
    """Intersection of the exact left stabilizers of every family set.

    The empty family yields the whole group (empty-intersection convention).
    """
    if family.base_size != group.order:
        raise ValueError("family base does not match the group order")
    n = group.order
    mul = group.mul
    cand = list(range(n))
    identity = group.identity
    for b in family.bits:
        if len(cand) == 1:
            break
        if b == 0:
            continue
        members = GroupSubset(n, b).members()
        lookup = GroupSubset(n, b).to_bool_array()
        keep = lookup[mul[np.ix_(cand, members)]].all(axis=1)
        cand = [c for c, k in zip(cand, keep) if k]
    if identity not in cand:
        raise InternalCheckError("stabilizer intersection lost the identity")
    return GroupSubset.from_indices(n, cand)


def stabilizer_core(group: FiniteGroup, a: GroupSubset) -> GroupSubset:
    """The common stabilizer of all two-sided translates g*A*h.

    This subgroup is normal and coincides with the normal core of the setwise
    stabilizer of A; both facts are re-checked exactly on every call.
    """
    group._check_subset(a)
    bi = translate_family(TranslateFamilySpec(group, a, "bi"))
    left_side = intersect_stabilizers(group, bi)
    expected = normal_core(group, setwise_stabilizer(group, a, "left"))
    if left_side != expected:
        raise InternalCheckError(
            "two-sided stabilizer intersection disagrees with the normal core"
        )
    if not is_normal(group, left_side):
        raise InternalCheckError("stabilizer core failed the normality check")
    return left_side


def measure_equivalence_classes(
    group: FiniteGroup, family: SetSystem, tau
) -> SimilarityPartition:
    """Partition family indices by symmetric difference at most tau * |G|.

    tau = 0 gives exact equality (singletons on a deduplicated family).  For
    tau > 0 the relation is not transitive; connected components of the
    threshold graph are returned and flagged as such.
    """
    if family.base_size != group.order:
        raise ValueError("family base does not match the group order")
    tau = Fraction(tau)
    if not 0 <= tau <= 1:
        raise ValueError("tau must lie in [0, 1]")
    f = len(family.bits)
    parent = list(range(f))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if tau > 0:
        n = group.order
        p, q = tau.numerator, tau.denominator
        bits = family.bits
        for i in range(f):
            for j in range(i + 1, f):
                if (bits[i] ^ bits[j]).bit_count() * q <= p * n:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(f):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(groups[r]) for r in sorted(groups))
    return SimilarityPartition(classes, tau, tau == 0)
