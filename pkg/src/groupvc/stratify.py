"""Left-vs-two-sided translate stratification and its symmetric-group witness.

The left translates of a point stabilizer in a symmetric group form a
disjoint coset family of VC dimension 1, yet the diagonal family
``{x : x*b*x in H}`` over conjugating parameters shatters the set of
transpositions through the stabilized point.  ``build_witness`` constructs
and exhaustively verifies that configuration; ``vc_gap_report`` compares the
left, right and two-sided translate families for arbitrary inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InternalCheckError
from .groups import FiniteGroup, GroupSubset, make_symmetric, symmetric_elements
from .setsystem import (
    DEFAULT_WORK_BUDGET,
    SetSystem,
    TranslateFamilySpec,
    VcResult,
    is_shattered,
    translate_family,
    vc_dimension,
)


@dataclass(frozen=True)
class StratificationWitness:
    """A verified shattering configuration in the symmetric group S_{k+1}.

    ``h`` is the stabilizer of point 0; ``transpositions[i]`` is the element
    index of (0 i+1); ``parameters`` maps each subset of {1..k} (encoded as a
    bitmask, bit i-1 for point i) to an element whose fixed points among
    {1..k} are exactly that subset.  ``membership_matrix[n][mask]`` records
    whether a_n * b_mask * a_n lands in h, and verification requires it to
    equal the containment pattern ``n in mask``.
    """

    k: int
    group: FiniteGroup
    h: GroupSubset
    transpositions: tuple[int, ...]
    parameters: dict[int, int] = field(repr=False)
    membership_matrix: tuple[tuple[bool, ...], ...] = field(repr=False)
    verified: bool = False

    def to_json_dict(self) -> dict:
        perms = symmetric_elements(self.k + 1)
        return {
            "k": self.k,
            "group": self.group.description,
            "stabilized_point": 0,
            "h_members": self.h.members(),
            "transpositions": [
                {"index": idx, "one_line": list(perms[idx])}
                for idx in self.transpositions
            ],
            "parameters": [
                {
                    "fixed_points": _mask_points(mask),
                    "index": idx,
                    "one_line": list(perms[idx]),
                }
                for mask, idx in self.parameters.items()
            ],
            "membership_matrix": [
                "".join("1" if v else "0" for v in row)
                for row in self.membership_matrix
            ],
            "verified": self.verified,
        }


def _mask_points(mask: int) -> list[int]:
    # bit i-1 encodes point i of {1..k}
    out = []
    x = mask
    while x:
        low = x & -x
        out.append(low.bit_length())
        x ^= low
    return out


def _perm_index(perm: tuple[int, ...], index_of: dict[tuple[int, ...], int]) -> int:
    return index_of[perm]


def build_witness(k: int) -> StratificationWitness:
    """Construct and exhaustively verify the shattering witness for S_{k+1}.

    For each subset I of {1..k}, the parameter permutation fixes 0's orbit as
    follows: with D = {1..k} \\ I, it is the identity when D is empty, the
    transposition (0 x) when D = {x}, and otherwise the single cycle through
    D in increasing order.  Verification failure signals a composition
    convention bug and raises.
    """
    if not 2 <= k <= 6:
        raise ValueError(f"k must lie in 2..6, got {k}")
    m = k + 1
    group = make_symmetric(m)
    perms = symmetric_elements(m)
    index_of = {p: i for i, p in enumerate(perms)}
    identity = tuple(range(m))

    h = GroupSubset.from_indices(group.order, (i for i, p in enumerate(perms) if p[0] == 0))

    transpositions = []
    for point in range(1, m):
        p = list(identity)
        p[0], p[point] = p[point], p[0]
        transpositions.append(_perm_index(tuple(p), index_of))

    parameters: dict[int, int] = {}
    for mask in range(1 << k):
        fixed = {i + 1 for i in range(k) if (mask >> i) & 1}
        moved = sorted(set(range(1, m)) - fixed)
        p = list(identity)
        if len(moved) == 1:
            x = moved[0]
            p[0], p[x] = p[x], p[0]
        elif len(moved) >= 2:
            for a, b in zip(moved, moved[1:] + moved[:1]):
                p[a] = b
        parameters[mask] = _perm_index(tuple(p), index_of)
        realized = {pt for pt in range(1, m) if p[pt] == pt}
        if realized != fixed:
            raise InternalCheckError(
                f"parameter for subset {sorted(fixed)} fixes {sorted(realized)}"
            )

    matrix = []
    ok = True
    for n, a_idx in enumerate(transpositions, start=1):
        row = []
        for mask in range(1 << k):
            b_idx = parameters[mask]
            prod = group.multiply(group.multiply(a_idx, b_idx), a_idx)
            inside = prod in h
            row.append(inside)
            if inside != bool((mask >> (n - 1)) & 1):
                ok = False
        matrix.append(tuple(row))
    if not ok:
        raise InternalCheckError(
            "membership matrix disagrees with containment; composition convention bug"
        )

    return StratificationWitness(
        k=k,
        group=group,
        h=h,
        transpositions=tuple(transpositions),
        parameters=parameters,
        membership_matrix=tuple(matrix),
        verified=True,
    )


def diagonal_conjugation_family(
    group: FiniteGroup, h: GroupSubset, parameters=None
) -> SetSystem:
    """The family {x : x*b*x in h}, b over the group or the given elements."""
    group._check_subset(h)
    n = group.order
    mul = group.mul
    h_vec = h.to_bool_array()
    idx = np.arange(n)
    bs = list(range(n)) if parameters is None else [int(b) for b in parameters]
    sets = []
    for b in bs:
        prod = mul[mul[idx, b], idx]  # x*b*x under (f*g)(i) = f(g(i))
        sets.append(GroupSubset.from_bool_array(h_vec[prod]))
    return SetSystem(n, sets, [f"b={b}" for b in bs])


def shattered_set_from_witness(
    w: StratificationWitness,
) -> tuple[GroupSubset, SetSystem]:
    """The witness sample and the diagonal family shattering it.

    The sample is the transposition set; the family holds one set
    ``{x : x*b_I*x in h}`` per parameter.  That the sample is shattered is
    re-checked and must hold for a verified witness.
    """
    if not w.verified:
        raise ValueError("the witness is not verified")
    sample = GroupSubset.from_indices(w.group.order, w.transpositions)
    family = diagonal_conjugation_family(w.group, w.h, w.parameters.values())
    if not is_shattered(family, sample):
        raise InternalCheckError("witness family does not shatter its sample")
    return sample, family


@dataclass(frozen=True)
class GapReport:
    """VC dimensions of the left, right and two-sided translate families."""

    vc_left: VcResult
    vc_right: VcResult
    vc_bi: VcResult
    family_sizes: dict[str, int]

    def to_json_dict(self) -> dict:
        def enc(r: VcResult) -> dict:
            return {"value": r.value, "status": r.status}

        return {
            "vc_left": enc(self.vc_left),
            "vc_right": enc(self.vc_right),
            "vc_bi": enc(self.vc_bi),
            "family_sizes": dict(self.family_sizes),
        }


def vc_gap_report(
    group: FiniteGroup,
    a: GroupSubset,
    cap: int = 16,
    *,
    budget: int = DEFAULT_WORK_BUDGET,
) -> GapReport:
    """Compare the VC data of the three translate families under a shared cap.

    Budget refusals are reported per family through the result statuses.
    """
    results = {}
    sizes = {}
    for mode in ("left", "right", "bi"):
        fam = translate_family(TranslateFamilySpec(group, a, mode))
        sizes[mode] = len(fam)
        results[mode] = vc_dimension(fam, cap=cap, budget=budget)
    return GapReport(results["left"], results["right"], results["bi"], sizes)
