import math

import numpy as np
import pytest

from ergolab.errors import (FrequencyOverflowError, ValidationError)
from ergolab.observables import Observable, integral_haar
from ergolab.phases import e
from ergolab.rng import SplitMix64
from ergolab.seminorms import (hk_seminorm, multilinear_norm_bound_check,
                               seminorm_ladder, van_der_corput_check)
from ergolab.suites import quadratic_phase_block, vdc_family
from ergolab.systems import (GOLDEN, cat_map, default_heisenberg,
                             golden_rotation, standard_skew)

G = golden_rotation()
CM = cat_map()


# ---------------------------------------------------------------------------
# Base case and exact identities


@pytest.mark.parametrize("system", [G, CM, standard_skew(),
                                    default_heisenberg()],
                         ids=lambda s: type(s).__name__)
def test_order_one_is_integral_modulus(system):
    dim = system.obs_dim
    f = Observable.from_dict(dim, {(0,) * dim: 0.5 - 0.25j,
                                   (1,) + (0,) * (dim - 1): 1.0})
    est = hk_seminorm(system, f, 1)
    assert est.value == abs(integral_haar(f))
    assert est.exact


def test_rotation_character_order_one_vanishes():
    assert hk_seminorm(G, Observable.character(3), 1).value == 0.0


def test_rotation_character_order_two_is_one():
    # f T^h conj(f) is the constant e(-k h a): every inner seminorm is 1
    for k in (1, -2, 7):
        est = hk_seminorm(G, Observable.character(k), 2, outer_h=30)
        assert abs(est.value - 1.0) <= 1e-12
        assert est.exact


def test_eigenfunction_rigidity_orders_two_to_four():
    f = Observable.character(1, coeff=e(0.3))   # modulus-one coefficient
    for order in (2, 3, 4):
        est = hk_seminorm(G, f, order, outer_h=10)
        assert abs(est.value - 1.0) <= 1e-12


def test_cat_map_zero_mean_order_two_vanishes_exactly():
    for k in ((1, 0), (0, 1), (3, -2)):
        est = hk_seminorm(CM, Observable.character(k), 2, outer_h=30)
        assert est.value == 0.0
        assert est.exact


def test_heisenberg_base_character_order_two():
    est = hk_seminorm(default_heisenberg(), Observable.character((1, 0)), 2,
                      outer_h=20)
    assert abs(est.value - 1.0) <= 1e-12


def test_exact_path_independent_of_h():
    for h1, h2 in ((100, 1000), (10, 400)):
        v1 = hk_seminorm(G, Observable.character(1), 2, outer_h=h1).value
        v2 = hk_seminorm(G, Observable.character(1), 2, outer_h=h2).value
        assert v1 == v2
    v1 = hk_seminorm(CM, Observable.character((1, 0)), 2, outer_h=10).value
    v2 = hk_seminorm(CM, Observable.character((1, 0)), 2, outer_h=30).value
    assert v1 == v2 == 0.0


def test_overflow_propagates_from_composition():
    with pytest.raises(FrequencyOverflowError):
        hk_seminorm(CM, Observable.character((1, 0)), 2, outer_h=500,
                    method="exact")


def test_validation():
    with pytest.raises(ValidationError):
        hk_seminorm(G, Observable.character(1), 0)
    with pytest.raises(ValidationError):
        hk_seminorm(G, Observable.character(1), 2, method="monte_carlo")


# ---------------------------------------------------------------------------
# Monte Carlo path


def test_mc_matches_exact_on_rotation():
    f = Observable.from_dict(1, {(0,): 0.5, (1,): 0.5})
    exact_est = hk_seminorm(G, f, 2, outer_h=64, method="exact")
    mc_est = hk_seminorm(G, f, 2, outer_h=64, inner_n=4000,
                         method="monte_carlo", rng=SplitMix64(2))
    assert not mc_est.exact and mc_est.inner_n == 4000
    assert abs(exact_est.value - mc_est.value) <= 3 / math.sqrt(64)


def test_mc_h_consistency_noise_scale():
    f = Observable.from_dict(1, {(0,): 0.5, (1,): 0.5})
    v100 = hk_seminorm(G, f, 2, outer_h=100, inner_n=2000,
                       method="monte_carlo", rng=SplitMix64(8)).value
    v1000 = hk_seminorm(G, f, 2, outer_h=1000, inner_n=2000,
                        method="monte_carlo", rng=SplitMix64(8)).value
    assert abs(v100 - v1000) <= 3 / math.sqrt(100)


def test_ladder_reports_monotonicity_slack():
    f = Observable.from_dict(1, {(0,): 0.3, (1,): 0.7})
    ladder = seminorm_ladder(G, f, 3, outer_h=40)
    values = [est.value for est, _ in ladder]
    for (est, slack), nxt in zip(ladder[:-1], values[1:]):
        assert est.value <= nxt + slack + 1e-12


# ---------------------------------------------------------------------------
# Van der Corput


def test_vdc_constant_is_equality_case():
    rep = van_der_corput_check(np.ones(5000, dtype=complex), 50)
    assert abs(rep.lhs - 1.0) <= 1e-12
    assert abs(rep.rhs - 1.0) <= 1e-12
    assert abs(rep.margin) <= 1e-12


def test_vdc_vector_valued_constant():
    v = np.tile(np.array([0.6, 0.8j]), (3000, 1))
    rep = van_der_corput_check(v, 30)
    assert abs(rep.lhs - 1.0) <= 1e-12 and abs(rep.margin) <= 1e-12


def test_vdc_linear_phase():
    rep = van_der_corput_check(vdc_family("linear", 100_000, 100), 100)
    assert rep.lhs <= 1e-8
    assert abs(rep.rhs - 1.0) <= 1e-12
    assert rep.margin >= 0.999


def test_vdc_quadratic_phase():
    rep = van_der_corput_check(vdc_family("quadratic", 100_000, 100), 100)
    assert rep.lhs <= 1e-2 and rep.rhs <= 1e-2
    assert rep.margin >= -1e-3


def test_vdc_rejects_h_out_of_range():
    with pytest.raises(ValidationError):
        van_der_corput_check(np.ones(100), 100)
    with pytest.raises(ValidationError):
        van_der_corput_check(np.ones(100), 0)


def test_quadratic_phase_block_exactness():
    got = quadratic_phase_block(GOLDEN, 3000)
    for n in (0, 1, 777, 2999):
        from fractions import Fraction
        expect = float(Fraction(n * n) * Fraction(GOLDEN) % 1)
        d = abs(got[n] - expect)
        assert min(d, 1 - d) <= 1e-10


# ---------------------------------------------------------------------------
# The multilinear L2 bound


def test_bound_check_constants_saturate():
    fs = [Observable.constant(1.0, 1)] * 2
    bc = multilinear_norm_bound_check(G, fs, 50, 100, SplitMix64(5),
                                      outer_h=10)
    assert abs(bc.lhs - 1.0) <= 1e-12
    assert bc.rhs == 1.0
    assert bc.seminorms == (1.0, 1.0)


def test_bound_check_d1_is_ergodic_theorem_base():
    f = Observable.character(1)
    bc = multilinear_norm_bound_check(G, [f], 200, 5000, SplitMix64(6))
    # rhs = |integral| = 0; lhs is the L2 mean of small geometric sums
    assert bc.rhs == 0.0
    assert bc.lhs <= 2 / (5000 * abs(1 - e(GOLDEN))) + 1e-12


def test_bound_check_cat_map_decay():
    fs = [Observable.character((1, 0)), Observable.character((0, 1))]
    bc = multilinear_norm_bound_check(CM, fs, 300, 3000, SplitMix64(7))
    assert bc.rhs == 0.0
    # E|A_N|^2 = 1/N for unit characters; allow generous sampling slack
    assert bc.lhs <= 3 / math.sqrt(3000)


def test_bound_check_rotation_characters_trivial_bound():
    fs = [Observable.character(1), Observable.character(1)]
    bc = multilinear_norm_bound_check(G, fs, 50, 500, SplitMix64(9),
                                      outer_h=20)
    assert bc.rhs == 1.0      # order-2 seminorm of a character is 1
    assert bc.lhs <= bc.rhs + 0.05
