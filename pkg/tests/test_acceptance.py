"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  All corpora are seeded and deterministic.
"""

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction

from groupvc import (
    GroupSubset,
    SetSystem,
    TranslateFamilySpec,
    covering_number,
    generated_subgroup,
    is_normal,
    is_shattered,
    is_subgroup,
    left_cosets,
    make_cyclic,
    make_dihedral,
    make_direct_product,
    make_symmetric,
    normal_core,
    random_eps_approximation,
    regularity_pipeline,
    sauer_shelah_bound,
    setwise_stabilizer,
    shatter_profile,
    shattered_set_from_witness,
    stab_covering_witness,
    stab_eps,
    stab_zero_subgroup,
    stabilizer_core,
    build_witness,
    translate_family,
    vc_dimension,
)
from groupvc.cli import main as cli_main


@contextmanager
def criterion(num, label):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {num}: {label} ({time.time() - start:.1f}s)")
        raise
    print(f"PASS criterion {num}: {label} ({time.time() - start:.1f}s)")


def interval_subset(n, start, length):
    return GroupSubset.from_indices(n, ((start + j) % n for j in range(length)))


def three_interval_set(n, seed):
    rng = random.Random(seed)
    a = GroupSubset.empty(n)
    for _ in range(3):
        start = rng.randrange(n)
        length = rng.randrange(n // 8, n // 4)
        a = a | interval_subset(n, start, length)
    return a


def test_criterion_1_sauer_shelah_suite():
    with criterion(1, "Sauer-Shelah on 200 seeded systems, zero violations"):
        rng = random.Random(0xC1)
        checked = 0
        for _ in range(200):
            f = rng.randrange(3, 17)
            # wide families on a smaller base keep the exact search cheap
            m = rng.randrange(16, 33 if f > 10 else 65)
            sys_ = SetSystem(m, [GroupSubset(m, rng.getrandbits(m)) for _ in range(f)])
            res = vc_dimension(sys_)
            assert res.is_exact and res.value <= 4
            profile = shatter_profile(sys_, 10, budget=200_000_000)
            for n in range(11):
                assert profile[n] <= sauer_shelah_bound(res.value, n)
                assert profile[n] <= 2**n
            checked += 1
        assert checked == 200


def test_criterion_2_vc_theorem_suite():
    with criterion(2, "VC-theorem sampling on Z_n translate families"):
        eps = Fraction(1, 10)
        for n in (128, 256, 512, 1024):
            g = make_cyclic(n)
            a = three_interval_set(n, seed=1000 + n)
            fam = translate_family(TranslateFamilySpec(g, a, "left"))
            res = vc_dimension(fam, cap=7, budget=500_000_000)
            assert res.is_exact and res.value <= 6
            verified_first_try = 0
            for trial in range(100):
                cert = random_eps_approximation(
                    fam, eps, seed=n * 1000 + trial, max_attempts=1, k=res.value
                )
                verified_first_try += cert.verified
            assert verified_first_try >= 90, (n, verified_first_try)


def _criterion_3_corpus():
    """50 seeded (G, A) pairs, |G| <= 500, left-family VC dimension <= 3."""
    rng = random.Random(0xC3)
    pairs = []
    for n in (60, 96, 200, 500):
        g = make_cyclic(n)
        # single intervals: translate families of circular arcs stay below
        # dimension 3; coset unions of low-index subgroups stay below log2(index)
        for _ in range(3):
            pairs.append((g, interval_subset(n, rng.randrange(n), rng.randrange(n // 6, n // 2))))
        for d in (4, 6):
            h = generated_subgroup(g, GroupSubset.from_indices(n, [d]))
            a = GroupSubset.empty(n)
            for _ in range(rng.randrange(1, 3)):
                a = a | g.left_translate(rng.randrange(n), h)
            pairs.append((g, a))
    for g in (make_dihedral(24), make_dihedral(100), make_dihedral(250),
              make_direct_product(make_cyclic(12), make_cyclic(20))):
        n = g.order
        for _ in range(8):
            h = generated_subgroup(g, GroupSubset.from_indices(n, [rng.randrange(1, n)]))
            while n // len(h) > 8:  # keep the index (hence the dimension) small
                extra = rng.randrange(n)
                h = generated_subgroup(g, h | GroupSubset.from_indices(n, [extra]))
            a = GroupSubset.empty(n)
            for _ in range(rng.randrange(1, 3)):
                a = a | g.left_translate(rng.randrange(n), h)
            pairs.append((g, a))
    return pairs[:50]


def test_criterion_3_stabilizer_covering():
    with criterion(3, "stabilizer covering witnesses verify with bounded classes"):
        pairs = _criterion_3_corpus()
        assert len(pairs) == 50
        bounds_computed = 0
        for g, a in pairs:
            fam = translate_family(TranslateFamilySpec(g, a, "left"))
            res = vc_dimension(fam, cap=4)
            assert res.is_exact and res.value <= 3, (g.description, res)
            for eps in (Fraction(1, 4), Fraction(1, 10)):
                rep = stab_covering_witness(g, a, eps)
                covered = GroupSubset.empty(g.order)
                for r in rep.covering_reps:
                    covered = covered | g.left_translate(r, rep.stab)
                assert covered == GroupSubset.full(g.order)
                if rep.theoretical_class_bound is not None:
                    bounds_computed += 1
                    assert rep.class_count <= rep.theoretical_class_bound
        assert bounds_computed > 0


def test_criterion_4_example_replication():
    with criterion(4, "symmetric-group witness for k in {2, 3, 4}"):
        for k in (2, 3, 4):
            w = build_witness(k)
            assert w.verified
            fam = translate_family(TranslateFamilySpec(w.group, w.h, "left"))
            res = vc_dimension(fam)
            assert res.is_exact and res.value == 1
            sample, family = shattered_set_from_witness(w)
            assert is_shattered(family, sample)
            assert vc_dimension(family, cap=k).value >= k


def _criterion_5_corpus():
    rng = random.Random(0xC5)
    groups = [
        make_cyclic(16),
        make_cyclic(63),
        make_cyclic(200),
        make_dihedral(12),
        make_dihedral(50),
        make_symmetric(3),
        make_symmetric(4),
        make_direct_product(make_cyclic(4), make_cyclic(25)),
        make_direct_product(make_symmetric(3), make_cyclic(8)),
        make_direct_product(make_dihedral(4), make_cyclic(12)),
    ]
    pairs = []
    for g in groups:
        n = g.order
        for i in range(10):
            if i < 5:
                a = GroupSubset.from_indices(n, rng.sample(range(n), rng.randrange(0, n + 1)))
            else:
                h = generated_subgroup(
                    g, GroupSubset.from_indices(n, rng.sample(range(n), 1))
                )
                a = GroupSubset.empty(n)
                for _ in range(rng.randrange(1, 4)):
                    a = a | g.left_translate(rng.randrange(n), h)
            pairs.append((g, a))
    return pairs


def test_criterion_5_normal_core_identity():
    with criterion(5, "two-sided stabilizer core equals the normal core, 100 pairs"):
        pairs = _criterion_5_corpus()
        assert len(pairs) == 100
        for g, a in pairs:
            core = stabilizer_core(g, a)
            assert core == normal_core(g, setwise_stabilizer(g, a, "left"))
            assert is_normal(g, core)


def test_criterion_6_stabilizer_algebra():
    with criterion(6, "Stab^eps algebra: subgroup at 0, monotone, inverse-closed"):
        ladder = [Fraction(0), Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(1)]
        for g, a in _criterion_5_corpus():
            assert is_subgroup(g, stab_zero_subgroup(g, a))
            prev = None
            for eps in ladder:
                s = stab_eps(g, a, eps)
                assert g.identity in s
                assert all(g.inverse(x) in s for x in s)
                if prev is not None:
                    assert prev.is_subset_of(s)
                prev = s


def test_criterion_7_regularity_shadow():
    with criterion(7, "regularity pipeline recovers a nontrivial subgroup, 20 seeds"):
        g = make_cyclic(2)
        for _ in range(7):
            g = make_direct_product(g, make_cyclic(2))
        assert g.order == 256
        # H = the index-8 subgroup of elements with zero top-3 coordinates;
        # A = 4 of its cosets forming a coset of an index-2 overgroup, then
        # 2 percent of the 256 positions flipped
        grid = [Fraction(1, 16), Fraction(1, 8), Fraction(1, 4)]
        good = 0
        for seed in range(20):
            rng = random.Random(0xC7 + seed)
            phi = rng.randrange(1, 8)
            parity = rng.randrange(2)
            base = [x for x in range(256) if ((x >> 5) & phi).bit_count() % 2 == parity]
            flips = rng.sample(range(256), round(0.02 * 256))
            a = GroupSubset.from_indices(256, base) ^ GroupSubset.from_indices(256, flips)
            res = regularity_pipeline(g, a, grid, Fraction(1, 20), Fraction(1, 10))
            if (
                res.success
                and len(res.best.report.subgroup) > 1
                and res.best.report.irregular_mass <= Fraction(1, 10)
            ):
                good += 1
        assert good >= 18, good


def test_criterion_8_covering_numbers():
    with criterion(8, "exact covers are minimal, verified, and half-cosets need 2"):
        rng = random.Random(0xC8)
        groups = [
            make_cyclic(12),
            make_cyclic(30),
            make_cyclic(60),
            make_dihedral(15),
            make_dihedral(24),
            make_symmetric(3),
            make_direct_product(make_cyclic(6), make_cyclic(8)),
        ]
        for g in groups:
            n = g.order
            sets = [
                GroupSubset.from_indices(n, [rng.randrange(n)]),
                GroupSubset.from_indices(n, rng.sample(range(n), 2)),
                GroupSubset.from_indices(n, rng.sample(range(n), rng.randrange(n // 6, n // 2))),
            ]
            for d in (2, 3):
                if n % d == 0:
                    h = generated_subgroup(g, GroupSubset.from_indices(n, [d]))
                    sets.append(g.left_translate(rng.randrange(n), h))
            for a in sets:
                for side in ("left", "right"):
                    greedy = covering_number(g, a, side, "greedy")
                    exact = covering_number(g, a, side, "exact")
                    assert exact.size <= greedy.size
                    assert exact.optimal and not greedy.optimal
        # the required half-group coset case: odd residues in Z_12
        g12 = make_cyclic(12)
        odds = GroupSubset.from_indices(12, range(1, 12, 2))
        assert covering_number(g12, odds, "left", "exact").size == 2


def test_criterion_9_cli_determinism(tmp_path):
    with criterion(9, "CLI reports are byte-identical for equal config and seed"):
        configs = [
            (
                "approx",
                {
                    "group": {"constructor": "cyclic", "args": [40]},
                    "set": {"kind": "intervals", "items": [[0, 9], [20, 5]]},
                    "epsilon": "1/10",
                    "k": 2,
                    "seed": 777,
                },
            ),
            (
                "stab",
                {
                    "group": {"constructor": "cyclic", "args": [12]},
                    "set": {"kind": "interval", "start": 0, "length": 6},
                    "epsilon": "1/3",
                },
            ),
            (
                "regularity",
                {
                    "group": {"constructor": "cyclic", "args": [24]},
                    "set": {
                        "kind": "coset_union",
                        "subgroup_generators": [6],
                        "reps": [0, 1],
                    },
                    "grid": ["1/16", "1/8"],
                    "epsilon": "1/20",
                    "target_mass": "1/10",
                    "seed": 5,
                },
            ),
            (
                "batch",
                {
                    "tasks": [
                        {
                            "task": "vcdim",
                            "group": {"constructor": "cyclic", "args": [6]},
                            "set": {"kind": "indices", "values": [0, 3]},
                        },
                        {
                            "task": "witness",
                            "k": 2,
                        },
                    ],
                    "seed": 11,
                },
            ),
        ]
        for name, cfg in configs:
            cfg_path = tmp_path / f"{name}.json"
            cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
            out_a = tmp_path / f"{name}_a.json"
            out_b = tmp_path / f"{name}_b.json"
            code_a = cli_main([name, "--config", str(cfg_path), "--out", str(out_a)])
            code_b = cli_main([name, "--config", str(cfg_path), "--out", str(out_b)])
            assert code_a == code_b == 0
            assert out_a.read_bytes() == out_b.read_bytes()
