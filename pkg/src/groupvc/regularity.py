"""Coset regularity audits: how evenly a set meets the cosets of a subgroup.

A coset is regular for A at level eps when A fills at most an eps-fraction
or at least a (1-eps)-fraction of it; boundary densities count as regular.
The uniform measure on the coset space plays the role of the quotient's
invariant measure, so the irregular mass is irregular_count / index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import FiniteGroup, GroupSubset, generated_subgroup, left_cosets, normal_core
from .stabilizers import stab_eps


@dataclass(frozen=True)
class RegularityReport:
    """Per-coset densities of a set relative to a subgroup, with the
    irregular-coset count under the open-interval test eps < d < 1-eps."""

    subgroup: GroupSubset
    index: int
    coset_reps: tuple[int, ...]
    densities: tuple[Fraction, ...]
    epsilon: Fraction
    irregular_count: int
    irregular_mass: Fraction

    def rows(self) -> list[tuple[int, int, Fraction, bool]]:
        """(coset_rep, size, density, regular_flag) rows, in coset order."""
        size = len(self.subgroup)
        out = []
        for rep, d in zip(self.coset_reps, self.densities):
            regular = not (self.epsilon < d < 1 - self.epsilon)
            out.append((rep, size, d, regular))
        return out

    def to_json_dict(self) -> dict:
        return {
            "subgroup_members": self.subgroup.members(),
            "subgroup_size": len(self.subgroup),
            "index": self.index,
            "epsilon": _frac(self.epsilon),
            "irregular_count": self.irregular_count,
            "irregular_mass": _frac(self.irregular_mass),
            "irregular_mass_decimal": float(self.irregular_mass),
            "cosets": [
                {
                    "rep": rep,
                    "size": size,
                    "density": _frac(d),
                    "regular": regular,
                }
                for rep, size, d, regular in self.rows()
            ],
        }


@dataclass(frozen=True)
class PipelineCandidate:
    source_epsilon: Fraction | None  # None marks the trivial last-resort subgroup
    report: RegularityReport

    @property
    def nontrivial(self) -> bool:
        return len(self.report.subgroup) > 1


@dataclass(frozen=True)
class PipelineResult:
    """Best audited subgroup candidate plus the full search trace.

    ``success`` is true only when a nontrivial candidate meets the target
    mass; the trivial subgroup always scores zero vacuously and is reported
    as a flagged failure instead.
    """

    best: PipelineCandidate
    candidates: tuple[PipelineCandidate, ...]
    target_mass: Fraction
    success: bool

    def to_json_dict(self) -> dict:
        def enc(c: PipelineCandidate) -> dict:
            return {
                "source_epsilon": None
                if c.source_epsilon is None
                else _frac(c.source_epsilon),
                "subgroup_size": len(c.report.subgroup),
                "index": c.report.index,
                "irregular_mass": _frac(c.report.irregular_mass),
                "nontrivial": c.nontrivial,
            }

        return {
            "target_mass": _frac(self.target_mass),
            "success": self.success,
            "best": {
                "source_epsilon": None
                if self.best.source_epsilon is None
                else _frac(self.best.source_epsilon),
                "report": self.best.report.to_json_dict(),
            },
            "candidates": [enc(c) for c in self.candidates],
        }


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def coset_densities(
    group: FiniteGroup, h: GroupSubset, a: GroupSubset
) -> list[Fraction]:
    """|A meets C| / |C| for each left coset C, in deterministic coset order."""
    group._check_subset(a)
    cosets = left_cosets(group, h)
    return [Fraction((c.bits & a.bits).bit_count(), len(c)) for c in cosets]


def irregular_fraction(
    group: FiniteGroup, h: GroupSubset, a: GroupSubset, epsilon
) -> RegularityReport:
    """Audit every coset of h at level epsilon; see the module notes."""
    epsilon = Fraction(epsilon)
    if not 0 <= epsilon < Fraction(1, 2):
        raise ValueError("epsilon must lie in [0, 1/2)")
    group._check_subset(a)
    cosets = left_cosets(group, h)
    densities = tuple(
        Fraction((c.bits & a.bits).bit_count(), len(c)) for c in cosets
    )
    irregular = sum(1 for d in densities if epsilon < d < 1 - epsilon)
    index = len(cosets)
    return RegularityReport(
        subgroup=h,
        index=index,
        coset_reps=tuple(min(c.members()) for c in cosets),
        densities=densities,
        epsilon=epsilon,
        irregular_count=irregular,
        irregular_mass=Fraction(irregular, index),
    )


def regularity_pipeline(
    group: FiniteGroup,
    a: GroupSubset,
    epsilon_grid,
    audit_epsilon,
    target_mass,
) -> PipelineResult:
    """Search the stabilizer ladder for a normal subgroup with regular cosets.

    For each grid value eps', the candidate is
    ``normal_core(<Stab^eps'(A)>)`` (the stabilizer need not be a subgroup,
    so it is closed up and then cored down to a normal one).  Every candidate
    is audited at ``audit_epsilon``; the best nontrivial candidate by
    (irregular mass, then larger subgroup, then smaller eps') is returned.
    The trivial subgroup is kept as a last resort: it audits to mass zero
    vacuously, so it never counts as success.
    """
    grid = [Fraction(e) for e in epsilon_grid]
    if not grid:
        raise ValueError("the epsilon grid is empty")
    audit_epsilon = Fraction(audit_epsilon)
    target_mass = Fraction(target_mass)
    group._check_subset(a)

    candidates: list[PipelineCandidate] = []
    for eps in sorted(set(grid)):
        stab = stab_eps(group, a, eps)
        cand = normal_core(group, generated_subgroup(group, stab))
        report = irregular_fraction(group, cand, a, audit_epsilon)
        candidates.append(PipelineCandidate(eps, report))
    trivial = GroupSubset.from_indices(group.order, [group.identity])
    candidates.append(
        PipelineCandidate(None, irregular_fraction(group, trivial, a, audit_epsilon))
    )

    nontrivial = [c for c in candidates if c.nontrivial]
    if nontrivial:
        best = min(
            nontrivial,
            key=lambda c: (
                c.report.irregular_mass,
                -len(c.report.subgroup),
                c.source_epsilon,
            ),
        )
        success = best.report.irregular_mass <= target_mass
    else:
        best = candidates[-1]
        success = False
    return PipelineResult(best, tuple(candidates), target_mass, success)
