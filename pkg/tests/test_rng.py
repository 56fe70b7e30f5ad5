"""Determinism and distribution checks for the seeded generator."""

import math

import numpy as np
import pytest

from klflow.rng import SplitMix64

MASK = (1 << 64) - 1


def _reference_stream(seed: int, n: int) -> list[int]:
    """Straight-line SplitMix64 written independently of the package."""
    out = []
    state = seed & MASK
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


class TestRawStream:
    def test_matches_reference_implementation(self):
        for seed in (0, 1, 42, 0xDEADBEEF, MASK):
            rng = SplitMix64(seed)
            got = [rng.next_u64() for _ in range(50)]
            assert got == _reference_stream(seed, 50)

    def test_same_seed_same_stream(self):
        a = SplitMix64(7)
        b = SplitMix64(7)
        assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]

    def test_different_seeds_differ(self):
        a = SplitMix64(1)
        b = SplitMix64(2)
        assert [a.next_u64() for _ in range(10)] != [b.next_u64() for _ in range(10)]


class TestUniform:
    def test_range_and_determinism(self):
        rng = SplitMix64(3)
        xs = rng.uniforms(10_000)
        assert np.all(xs >= 0.0) and np.all(xs < 1.0)
        assert np.array_equal(xs, SplitMix64(3).uniforms(10_000))

    def test_is_53_bit_dyadic(self):
        # every draw is k * 2^-53 for integer k
        rng = SplitMix64(4)
        for _ in range(100):
            u = rng.uniform()
            assert (u * 2.0**53) == int(u * 2.0**53)

    def test_bounds_applied(self):
        rng = SplitMix64(5)
        xs = rng.uniforms(1000, -2.0, 3.0)
        assert np.all(xs >= -2.0) and np.all(xs < 3.0)

    def test_moments(self):
        xs = SplitMix64(6).uniforms(50_000)
        assert abs(float(np.mean(xs)) - 0.5) < 0.01
        assert abs(float(np.var(xs)) - 1.0 / 12.0) < 0.005


class TestNormal:
    def test_moments(self):
        rng = SplitMix64(8)
        xs = rng.normals(50_000)
        assert abs(float(np.mean(xs))) < 0.02
        assert abs(float(np.var(xs)) - 1.0) < 0.03

    def test_shape(self):
        rng = SplitMix64(9)
        assert rng.normals(3, 4).shape == (3, 4)
        assert rng.normals(5).shape == (5,)
        assert rng.normals().shape == ()

    def test_draw_count_is_fixed(self):
        # one normal consumes exactly two words
        a = SplitMix64(10)
        a.normal()
        b = SplitMix64(10)
        b.next_u64()
        b.next_u64()
        assert a.next_u64() == b.next_u64()


class TestInteger:
    def test_inclusive_range(self):
        rng = SplitMix64(11)
        draws = {rng.integer(2, 5) for _ in range(500)}
        assert draws == {2, 3, 4, 5}

    def test_rejects_empty_range(self):
        with pytest.raises(ValueError):
            SplitMix64(12).integer(3, 2)

    def test_degenerate_range(self):
        assert SplitMix64(13).integer(7, 7) == 7


class TestSpawn:
    def test_substreams_are_deterministic(self):
        a = SplitMix64(14).spawn(3)
        b = SplitMix64(14).spawn(3)
        assert [a.next_u64() for _ in range(20)] == [b.next_u64() for _ in range(20)]

    def test_substreams_differ_from_parent_and_each_other(self):
        parent = SplitMix64(15)
        s0 = parent.spawn(0)
        s1 = parent.spawn(1)
        w_parent = [SplitMix64(15).next_u64() for _ in range(10)]
        w0 = [s0.next_u64() for _ in range(10)]
        w1 = [s1.next_u64() for _ in range(10)]
        assert w0 != w1
        assert w0 != w_parent and w1 != w_parent

    def test_spawn_does_not_advance_parent(self):
        a = SplitMix64(16)
        a.spawn(0)
        b = SplitMix64(16)
        assert a.next_u64() == b.next_u64()


def test_gaussian_tail_mass():
    # ~4.6% of mass beyond 2 sigma
    xs = SplitMix64(17).normals(100_000)
    frac = float(np.mean(np.abs(xs) > 2.0))
    assert math.isclose(frac, 0.0455, abs_tol=0.005)
