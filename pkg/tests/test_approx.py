import random
from fractions import Fraction

import pytest

from groupvc import (
    GroupSubset,
    SetSystem,
    TranslateFamilySpec,
    empirical_frequency,
    eps_net,
    make_cyclic,
    measure_level_set,
    random_eps_approximation,
    sample_size,
    trace_class_partition,
    translate_family,
    verify_approximation,
)


def interval(n, start, length):
    return GroupSubset.from_indices(n, ((start + j) % n for j in range(length)))


class TestSampleSize:
    def test_frozen_values(self):
        # ceil(1600 * (1 + ln 10)) and ceil(32 * (1 + ln 2))
        assert sample_size(2, Fraction(1, 10)) == 5285
        assert sample_size(1, Fraction(1, 2)) == 55

    def test_monotone_in_epsilon(self):
        for k in (1, 2, 5):
            for eps in (Fraction(1, 3), Fraction(1, 5), Fraction(1, 10)):
                assert sample_size(k, eps / 2) > sample_size(k, eps)

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_size(0, Fraction(1, 2))
        with pytest.raises(ValueError):
            sample_size(1, Fraction(1))


class TestEmpiricalFrequency:
    def test_all_in(self):
        s = GroupSubset.from_indices(10, range(5))
        assert empirical_frequency([0, 1, 2, 2], s) == 1

    def test_none_in(self):
        s = GroupSubset.from_indices(10, range(5))
        assert empirical_frequency([7, 8], s) == 0

    def test_full_base_recovers_measure(self):
        s = GroupSubset.from_indices(10, [0, 4, 7])
        assert empirical_frequency(list(range(10)), s) == s.measure()

    def test_empty_points(self):
        with pytest.raises(ValueError):
            empirical_frequency([], GroupSubset.full(3))


class TestVerifyApproximation:
    def test_full_base_zero_deviation(self):
        g = make_cyclic(20)
        fam = translate_family(TranslateFamilySpec(g, interval(20, 0, 7), "left"))
        check = verify_approximation(fam, list(range(20)), Fraction(1, 10))
        assert check.max_deviation == 0

    def test_disjoint_point_full_set(self):
        sys = SetSystem(4, [GroupSubset.full(4), GroupSubset.from_indices(4, [3])])
        check = verify_approximation(sys, [3], Fraction(1, 2))
        # the point multiset {3} misses nothing of the full set but
        # overweights {3}: deviation 3/4 on the singleton set
        assert check.max_deviation == Fraction(3, 4)
        assert check.worst_index == 1

    def test_idempotent(self):
        g = make_cyclic(30)
        fam = translate_family(TranslateFamilySpec(g, interval(30, 3, 11), "left"))
        pts = [random.Random(5).randrange(30) for _ in range(40)]
        a = verify_approximation(fam, pts, Fraction(1, 10))
        b = verify_approximation(fam, pts, Fraction(1, 10))
        assert a == b

    def test_matches_fraction_oracle(self):
        g = make_cyclic(16)
        fam = translate_family(TranslateFamilySpec(g, interval(16, 2, 5), "left"))
        pts = [1, 1, 4, 9, 15, 0]
        check = verify_approximation(fam, pts, Fraction(1, 8))
        worst = max(
            abs(s.measure() - empirical_frequency(pts, s)) for s in fam.family
        )
        assert check.max_deviation == worst


class TestRandomApproximation:
    def test_single_set_family(self):
        sys = SetSystem(5, [GroupSubset.full(5)])
        cert = random_eps_approximation(sys, Fraction(1, 4), seed=0, k=1)
        assert cert.verified and cert.max_deviation == 0

    def test_z100_translates(self):
        g = make_cyclic(100)
        fam = translate_family(TranslateFamilySpec(g, interval(100, 0, 30), "left"))
        cert = random_eps_approximation(
            fam, Fraction(1, 10), seed=12345, max_attempts=3, k=2
        )
        assert cert.verified
        assert cert.max_deviation <= Fraction(1, 10)
        assert len(cert.points) == sample_size(2, Fraction(1, 10))

    def test_deterministic(self):
        g = make_cyclic(64)
        fam = translate_family(TranslateFamilySpec(g, interval(64, 5, 20), "left"))
        a = random_eps_approximation(fam, Fraction(1, 8), seed=9, k=2)
        b = random_eps_approximation(fam, Fraction(1, 8), seed=9, k=2)
        assert a == b

    def test_unverified_certificate_reported(self):
        # with c shrunk so that r = 1, a single point can never
        # epsilon-approximate two disjoint half-measure sets
        sys = SetSystem(
            4,
            [GroupSubset.from_indices(4, [0, 1]), GroupSubset.from_indices(4, [2, 3])],
        )
        cert = random_eps_approximation(
            sys, Fraction(1, 100), seed=3, max_attempts=2, k=1, c=Fraction(1, 100000)
        )
        assert len(cert.points) == 1
        assert not cert.verified
        assert cert.max_deviation == Fraction(1, 2)


class TestEpsNet:
    def test_all_light_gives_empty_net(self):
        sys = SetSystem(10, [GroupSubset.from_indices(10, [i]) for i in range(10)])
        net = eps_net(sys, Fraction(1, 5))
        assert net.points == () and net.verified

    def test_single_full_set(self):
        sys = SetSystem(6, [GroupSubset.full(6)])
        net = eps_net(sys, Fraction(1, 2))
        assert len(net.points) == 1 and net.verified

    def test_index3_cosets(self):
        g = make_cyclic(12)
        h = GroupSubset.from_indices(12, [0, 3, 6, 9])
        fam = translate_family(TranslateFamilySpec(g, h, "left"))
        net = eps_net(fam, Fraction(1, 4))
        assert len(net.points) == 3
        assert net.verified

    def test_net_hits_every_heavy_set(self):
        rng = random.Random(19)
        for _ in range(10):
            m = rng.randrange(8, 30)
            sets = [
                GroupSubset(m, rng.getrandbits(m)) for _ in range(rng.randrange(1, 12))
            ]
            sys = SetSystem(m, sets)
            eps = Fraction(rng.randrange(1, 4), 4)
            net = eps_net(sys, eps)
            assert net.verified
            pts = set(net.points)
            for s in sys.family:
                if s.measure() > eps:
                    assert pts & set(s.members())

    def test_boundary_measure_not_heavy(self):
        # measure exactly epsilon is not > epsilon: no netting required
        sys = SetSystem(4, [GroupSubset.from_indices(4, [0])])
        net = eps_net(sys, Fraction(1, 4))
        assert net.points == ()


class TestTraceClassPartition:
    def test_single_point(self):
        sys = SetSystem(6, [GroupSubset.from_indices(6, [0, i]) for i in range(1, 6)])
        classes = trace_class_partition([5], sys)
        assert len(classes) <= 2

    def test_single_set(self):
        sys = SetSystem(6, [GroupSubset.full(6)])
        assert trace_class_partition([0, 1], sys) == [[0]]

    def test_z6_cosets(self):
        g = make_cyclic(6)
        fam = translate_family(
            TranslateFamilySpec(g, GroupSubset.from_indices(6, [0, 3]), "left")
        )
        assert trace_class_partition([0, 1, 2], fam) == [[0], [1], [2]]

    def test_constant_frequency_within_class(self):
        rng = random.Random(33)
        m = 20
        sys = SetSystem(m, [GroupSubset(m, rng.getrandbits(m)) for _ in range(15)])
        pts = [rng.randrange(m) for _ in range(9)]
        for cls in trace_class_partition(pts, sys):
            freqs = {empirical_frequency(pts, sys.set_at(i)) for i in cls}
            assert len(freqs) == 1

    def test_partition_covers_family(self):
        sys = SetSystem(8, [GroupSubset.from_indices(8, [i, (i + 1) % 8]) for i in range(8)])
        classes = trace_class_partition([0, 4], sys)
        assert sorted(i for cls in classes for i in cls) == list(range(len(sys)))


class TestMeasureLevelSet:
    def test_full_interval(self):
        sys = SetSystem(4, [GroupSubset.from_indices(4, [0]), GroupSubset.full(4)])
        assert measure_level_set(sys, Fraction(0), Fraction(1)) == [0, 1]

    def test_point_interval_at_one(self):
        sys = SetSystem(4, [GroupSubset.from_indices(4, [0]), GroupSubset.full(4)])
        assert measure_level_set(sys, Fraction(1), Fraction(1)) == [1]

    def test_z12_translates_all_half(self):
        g = make_cyclic(12)
        fam = translate_family(TranslateFamilySpec(g, interval(12, 0, 6), "left"))
        got = measure_level_set(fam, Fraction(1, 2), Fraction(1, 2))
        assert got == list(range(12))

    def test_approx_superset_of_exact(self):
        g = make_cyclic(60)
        fam = translate_family(TranslateFamilySpec(g, interval(60, 7, 21), "left"))
        cert = random_eps_approximation(fam, Fraction(1, 10), seed=2, k=2)
        assert cert.verified
        exact = measure_level_set(fam, Fraction(1, 4), Fraction(2, 5))
        approx = measure_level_set(
            fam, Fraction(1, 4), Fraction(2, 5), "approx", cert
        )
        assert set(exact) <= set(approx)

    def test_unverified_certificate_refused(self):
        sys = SetSystem(
            4,
            [GroupSubset.from_indices(4, [0, 1]), GroupSubset.from_indices(4, [2, 3])],
        )
        bad = random_eps_approximation(
            sys, Fraction(1, 100), seed=3, max_attempts=1, k=1, c=Fraction(1, 100000)
        )
        assert not bad.verified
        with pytest.raises(ValueError):
            measure_level_set(sys, Fraction(0), Fraction(1), "approx", bad)

    def test_interval_validation(self):
        sys = SetSystem(4, [GroupSubset.full(4)])
        with pytest.raises(ValueError):
            measure_level_set(sys, Fraction(1, 2), Fraction(1, 4))
