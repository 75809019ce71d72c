import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergolab.errors import DimensionMismatchError, ValidationError
from ergolab.rng import SplitMix64
from ergolab.systems import (GOLDEN, HeisenbergTranslation, Rotation,
                             SkewProduct, ToralAutomorphism, cat_map,
                             default_heisenberg, ergodicity_certificate,
                             golden_rotation, haar_sample, heisenberg_inv,
                             heisenberg_mul, lattice_translate_witness,
                             orbit_points, reduce_mod_lattice, standard_skew,
                             step, step_pow, system_from_kv, system_to_kv)
from conftest import circle_dist

unit = st.floats(min_value=0.0, max_value=1.0, exclude_max=True,
                 allow_nan=False, width=64)


def all_systems():
    return [golden_rotation(), standard_skew(), cat_map(),
            default_heisenberg(),
            Rotation((GOLDEN, math.sqrt(2) - 1)),
            SkewProduct((0.3,), ((2,),), (0.125,)),
            ToralAutomorphism(((1, 1), (1, 2)))]


def rand_point(system, seed=13):
    return system.haar_block(SplitMix64(seed), 1)[0]


# ---------------------------------------------------------------------------
# step / step_pow


def test_rotation_step_examples():
    assert Rotation((0.25,)).step(np.array([0.5]))[0] == 0.75
    assert Rotation((0.75,)).step(np.array([0.5]))[0] == 0.25


def test_heisenberg_step_of_identity():
    h = default_heisenberg()
    # hand evaluation of the group law: (a, b, 0) * (0, 0, 0) = (a, b, 0)
    expected = reduce_mod_lattice(heisenberg_mul((h.alpha, h.beta, 0.0),
                                                 (0.0, 0.0, 0.0)))
    assert circle_dist(h.step(np.zeros(3)), expected) == 0.0


def test_step_pow_identity_at_zero():
    for s in all_systems():
        p = rand_point(s)
        assert np.array_equal(step_pow(s, p, 0), p)


def test_heisenberg_cube_power_closed_form():
    # induction on the group law: t^n = (n a, n b, C(n,2) a b)
    h = default_heisenberg()
    t = (h.alpha, h.beta, 0.0)
    g = t
    for _ in range(2):
        g = heisenberg_mul(t, g)
    expected = reduce_mod_lattice(g)
    got = h.step(np.zeros(3), 3)
    assert circle_dist(got, expected) <= 1e-12
    fa, fb = Fraction(h.alpha), Fraction(h.beta)
    direct = reduce_mod_lattice((3 * h.alpha, 3 * h.beta, float(3 * fa * fb)))
    assert circle_dist(got, direct) <= 1e-12


def test_rotation_pow_example():
    got = Rotation((0.1,)).step(np.array([0.0]), 7)[0]
    assert abs(got - 0.7) <= 1e-12


@pytest.mark.parametrize("system", all_systems(),
                         ids=lambda s: type(s).__name__)
def test_step_pow_consistency_and_inverse(system):
    p = rand_point(system, seed=3)
    for n in range(-15, 16):
        lhs = step_pow(system, p, n + 1)
        rhs = step(system, step_pow(system, p, n))
        assert circle_dist(lhs, rhs) <= 1e-12
    assert circle_dist(step(system, step_pow(system, p, -1)), p) <= 1e-12


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatchError):
        golden_rotation().step(np.array([0.1, 0.2]))
    with pytest.raises(DimensionMismatchError):
        cat_map().step(np.array([0.1]))


# ---------------------------------------------------------------------------
# Heisenberg lattice reduction and group law


def test_reduce_examples():
    assert np.allclose(reduce_mod_lattice((0.3, 0.4, 0.5)), (0.3, 0.4, 0.5))
    assert circle_dist(reduce_mod_lattice((1.3, 0.4, 0.5)),
                       (0.3, 0.4, 0.5)) <= 1e-12
    # b = -1 shifts z by -x, then c = 1 brings it back into range
    assert circle_dist(reduce_mod_lattice((0.5, 1.2, 0.1)),
                       (0.5, 0.2, 0.6)) <= 1e-12


def test_reduce_rejects_nonfinite():
    with pytest.raises(ValidationError):
        reduce_mod_lattice((np.nan, 0.0, 0.0))


@given(st.tuples(unit, unit, unit), st.tuples(unit, unit, unit),
       st.tuples(unit, unit, unit))
def test_heisenberg_associativity(a, b, c):
    lhs = heisenberg_mul(heisenberg_mul(a, b), c)
    rhs = heisenberg_mul(a, heisenberg_mul(b, c))
    assert max(abs(x - y) for x, y in zip(lhs, rhs)) <= 1e-12


@given(st.tuples(unit, unit, unit))
def test_heisenberg_inverse(g):
    e = heisenberg_mul(g, heisenberg_inv(g))
    assert max(abs(v) for v in e) <= 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_reduce_is_lattice_translate(x, y, z):
    raw = (x, y, z)
    red = reduce_mod_lattice(raw)
    assert np.all(red >= 0.0) and np.all(red < 1.0)
    gamma = lattice_translate_witness(raw)
    assert all(isinstance(v, int) for v in gamma)
    rebuilt = heisenberg_mul(raw, gamma)
    assert circle_dist(rebuilt, red) <= 1e-9


def test_skew_double_step_matches_power():
    s = standard_skew()
    p = rand_point(s, seed=8)
    assert circle_dist(s.step(s.step(p)), s.step(p, 2)) <= 1e-12


# ---------------------------------------------------------------------------
# Orbits


def test_orbit_floats_are_canonical():
    for s in all_systems():
        x = rand_point(s, seed=21)
        a = orbit_points(s, x, 1, 0, 300)
        b = orbit_points(s, x, 1, 120, 100)
        assert np.array_equal(a[120:220], b)


@pytest.mark.parametrize("system", all_systems(),
                         ids=lambda s: type(s).__name__)
def test_orbit_matches_closed_powers(system):
    x = rand_point(system, seed=5)
    for stride in (1, 2, 3):
        pts = orbit_points(system, x, stride, 7, 20)
        for i, n in enumerate(range(7, 27)):
            assert circle_dist(pts[i], step_pow(system, x, stride * n)) <= 1e-10


def test_rotation_incremental_vs_closed_form_long_orbit():
    # the two long-orbit paths must agree within 1e-9 well past 1e6 steps
    g = golden_rotation()
    x = np.array([0.3])
    n = 2_000_000
    seq = x.copy()
    alpha = g.alpha[0]
    for _ in range(n):
        seq = seq + alpha
        seq -= np.floor(seq)
    closed = step_pow(g, x, n)
    chunked = orbit_points(g, x, 1, n, 1)[0]
    assert circle_dist(seq, closed) <= 1e-9
    assert circle_dist(chunked, closed) <= 1e-11


def test_heisenberg_obs_and_state_columns_agree():
    h = default_heisenberg()
    x = rand_point(h, seed=2)
    full = orbit_points(h, x, 2, 0, 500, coords="state")
    obs = orbit_points(h, x, 2, 0, 500, coords="obs")
    assert np.array_equal(full[:, :2], obs)


# ---------------------------------------------------------------------------
# Haar sampling


def test_haar_sampling_deterministic():
    s = default_heisenberg()
    a = haar_sample(s, SplitMix64(99))
    b = haar_sample(s, SplitMix64(99))
    assert np.array_equal(a, b)


def test_haar_equidistribution_torus():
    g = golden_rotation()
    pts = g.haar_block(SplitMix64(123), 100_000)
    m = np.abs(np.mean(np.exp(2j * np.pi * pts[:, 0])))
    assert m < 0.02  # 3/sqrt(N) Monte Carlo envelope


def test_haar_equidistribution_heisenberg():
    h = default_heisenberg()
    pts = h.haar_block(SplitMix64(321), 100_000)
    m = np.abs(np.mean(np.exp(2j * np.pi * (pts[:, 0] + pts[:, 1]))))
    assert m < 0.02


# ---------------------------------------------------------------------------
# Ergodicity certificates


def test_certificate_rational_rotation():
    cert = ergodicity_certificate(Rotation((0.5,)), 10)
    assert cert.verdict == "non-ergodic"
    assert "k=(2,)" in cert.witness


def test_certificate_golden_matches_continued_fractions():
    bound = 2000
    cert = ergodicity_certificate(golden_rotation(), bound)
    assert cert.verdict == "ergodic"
    # independent oracle: best rational approximations of the golden ratio
    # are Fibonacci quotients, so min_k |frac(k a)| over k <= bound equals
    # the distance at the largest Fibonacci number below the bound
    a, b = 1, 1
    while b <= bound:
        a, b = b, a + b
    best_q = a
    alpha = GOLDEN
    dists = np.abs(np.round(np.arange(1, bound + 1) * alpha)
                   - np.arange(1, bound + 1) * alpha)
    assert np.argmin(dists) + 1 == best_q
    assert dists.min() > 1e-9  # far above the certificate tolerance


def test_certificate_heisenberg_defaults():
    cert = ergodicity_certificate(default_heisenberg(), 100)
    assert cert.verdict == "ergodic"
    cert = ergodicity_certificate(HeisenbergTranslation(GOLDEN, GOLDEN), 10)
    assert cert.verdict == "non-ergodic"


def test_certificate_automorphisms():
    assert ergodicity_certificate(cat_map(), 20).verdict == "ergodic"
    rot90 = ToralAutomorphism(((0, -1), (1, 0)))
    cert = ergodicity_certificate(rot90, 10)
    assert cert.verdict == "non-ergodic" and "A^4" in cert.witness
    parabolic = ToralAutomorphism(((1, 1), (0, 1)))
    assert ergodicity_certificate(parabolic, 5).verdict == "non-ergodic"


def test_certificate_skew():
    assert ergodicity_certificate(standard_skew(), 50).verdict == "ergodic"
    assert ergodicity_certificate(SkewProduct((0.5,), ((1,),)),
                                  10).verdict == "non-ergodic"


def test_unimodularity_enforced():
    with pytest.raises(ValidationError):
        ToralAutomorphism(((2, 0), (0, 1)))


# ---------------------------------------------------------------------------
# Serialization


@pytest.mark.parametrize("system", all_systems(),
                         ids=lambda s: type(s).__name__)
def test_system_kv_roundtrip(system):
    assert system_from_kv(system_to_kv(system)) == system
