import math

import numpy as np
import pytest

from bellwerner import (
    GhzFamily,
    PureFamily,
    builtin,
    detect_visibility,
    ghz_amplitudes,
    ghz_separability_threshold,
    lhv_bound,
    max_pair_product,
    measure_lower_bound,
    measure_monte_carlo,
    necessary_check_first_failure,
    separability_necessary_check,
    separability_upper_bound,
    undetectable_measure_condition,
    undetectable_range_general,
    undetectable_range_homogeneous,
    visibility_lower_bound,
    werner_density,
)

ROOT2 = math.sqrt(2.0)
ROOT3 = math.sqrt(3.0)


# -- visibility lower bound ---------------------------------------------------


def test_visibility_lower_bound_values():
    assert visibility_lower_bound(2, 2.0, 2 * ROOT2) == pytest.approx(
        6.0 / (8 * ROOT2 - 2.0), abs=1e-15
    )
    assert visibility_lower_bound(2, 1.0, ROOT3) == 0.5060555253367347
    # scale invariance in (c1, c2)
    assert visibility_lower_bound(2, 2.0, 2 * ROOT3) == pytest.approx(
        visibility_lower_bound(2, 1.0, ROOT3), rel=1e-15
    )


def test_visibility_lower_bound_degenerate_limit():
    assert visibility_lower_bound(3, 1.0, 1.0 + 1e-12) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        visibility_lower_bound(2, 2.0, 2.0)
    with pytest.raises(ValueError):
        visibility_lower_bound(2, 0.0, 1.0)


# -- GHZ thresholds and ranges ------------------------------------------------


def test_ghz_separability_threshold_values():
    assert ghz_separability_threshold(2, math.pi / 4) == 1.0 / 3.0
    assert ghz_separability_threshold(3, math.pi / 4) == pytest.approx(0.2, abs=1e-15)
    assert ghz_separability_threshold(4, 1e-9) == pytest.approx(1.0, abs=1e-6)
    for bad in (0.0, math.pi / 2, -0.3, 2.0):
        with pytest.raises(ValueError):
            ghz_separability_threshold(2, bad)


_TABLE_HOMOGENEOUS = {
    2: 0.0811,
    3: 0.0335,
    4: 0.0156,
    5: 0.0075,
    6: 0.0037,
}


def test_homogeneous_range_table():
    for m, expected in _TABLE_HOMOGENEOUS.items():
        rng = undetectable_range_homogeneous(m)
        assert rng.theta_lower / math.pi == pytest.approx(expected, abs=5e-5)
        assert rng.theta_upper == math.pi - rng.theta_lower  # exact symmetry
        assert rng.measure == (rng.theta_upper - rng.theta_lower) / math.pi
    with pytest.raises(ValueError):
        undetectable_range_homogeneous(1)


_TABLE_UNIT_RATIOS = {
    3: 0.2272,
    4: 0.1218,
    5: 0.0738,
    6: 0.0443,
}


def test_general_range_table():
    assert undetectable_range_general(2, [1.0]) is None
    for m, expected in _TABLE_UNIT_RATIOS.items():
        rng = undetectable_range_general(m, [1.0] * (m - 1))
        assert rng.theta_lower / math.pi == pytest.approx(expected, abs=5e-5)
        assert rng.theta_upper == math.pi - rng.theta_lower
    with pytest.raises(ValueError):
        undetectable_range_general(3, [1.0, 0.0])


def test_general_range_ignores_infinite_ratios():
    rng = undetectable_range_general(3, [math.inf, math.inf])
    assert rng.theta_lower == 0.0
    assert rng.measure == 1.0


def test_homogeneous_tighter_than_unit_ratio_window():
    for m in range(3, 7):
        hom = undetectable_range_homogeneous(m)
        gen = undetectable_range_general(m, [1.0] * (m - 1))
        assert hom.theta_lower < gen.theta_lower


# -- pair-based separability bound (pure states) -------------------------------


def test_pair_bound_ghz_values():
    assert separability_upper_bound(ghz_amplitudes(2, math.pi / 4)) == pytest.approx(
        1.0 / ROOT3, abs=1e-12
    )
    assert separability_upper_bound(ghz_amplitudes(3, math.pi / 4)) == pytest.approx(
        1.0 / math.sqrt(15.0), abs=1e-12
    )


def test_pair_bound_product_state_caps_at_one():
    vec = np.zeros(4)
    vec[0] = 1.0
    assert separability_upper_bound(vec) == 1.0


def test_pair_bound_dominates_exact_threshold():
    for m in (2, 3):
        for theta in np.linspace(0.05, math.pi / 2 - 0.05, 12):
            upper = separability_upper_bound(ghz_amplitudes(m, theta))
            exact = ghz_separability_threshold(m, theta)
            assert upper >= exact - 1e-12


def test_pair_bound_validation():
    with pytest.raises(ValueError):
        separability_upper_bound(np.ones(4))  # not normalized
    with pytest.raises(ValueError):
        separability_upper_bound(np.array([1.0, 0.0, 0.0]))  # not a power of two


# -- necessary separability check ----------------------------------------------


def test_necessary_check_ghz_examples():
    amps = ghz_amplitudes(2, math.pi / 4)
    assert separability_necessary_check(amps, 0.2) is True
    assert separability_necessary_check(amps, 0.5) is False
    assert separability_necessary_check(amps, 0.0) is True


def test_necessary_check_any_state_at_zero():
    rng = np.random.default_rng(41)
    for _ in range(10):
        vec = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        vec /= np.linalg.norm(vec)
        assert separability_necessary_check(vec, 0.0) is True


def test_first_failure_matches_ghz_threshold():
    amps = ghz_amplitudes(2, math.pi / 4)
    v = necessary_check_first_failure(amps)
    assert v == pytest.approx(1.0 / 3.0, abs=2e-6)


def test_first_failure_ordering_on_grid():
    for m in (2, 3):
        for theta in np.linspace(0.1, math.pi / 2 - 0.1, 8):
            v = necessary_check_first_failure(ghz_amplitudes(m, theta))
            assert v is not None
            assert v >= ghz_separability_threshold(m, theta) - 1e-9


def test_first_failure_none_for_product_state():
    vec = np.zeros(4)
    vec[0] = 1.0
    assert necessary_check_first_failure(vec) is None


# -- measure condition and lower bound ------------------------------------------


def test_measure_condition_examples():
    yes = undetectable_measure_condition(3, (1.0, 1.0), 6.0)
    assert yes.satisfied and bool(yes)
    assert yes.sum_inverse_gammas == 2.0
    no = undetectable_measure_condition(3, (1.0, 1.0), 3.0)
    assert not no.satisfied and not bool(no)
    inf_case = undetectable_measure_condition(3, (math.inf, math.inf), 1.74)
    assert inf_case.satisfied  # S = 0 passes any poly > sqrt(3)


def test_measure_condition_variant_is_looser():
    verdict = undetectable_measure_condition(2, (1.1,), 2.65)
    assert verdict.threshold_loose > verdict.threshold_strict
    assert verdict.strict_form is verdict.satisfied


def test_measure_condition_validation():
    with pytest.raises(ValueError):
        undetectable_measure_condition(3, (1.0,), 6.0)  # wrong arity
    with pytest.raises(ValueError):
        undetectable_measure_condition(3, (1.0, 1.0), 1.0)  # poly too small
    with pytest.raises(ValueError):
        undetectable_measure_condition(3, (1.0, -1.0), 6.0)


def test_measure_lower_bound_values():
    assert measure_lower_bound(3, 3.0) == 0.31640625
    assert measure_lower_bound(4, 4.0) == pytest.approx(
        (1.0 - 25.0 / 256.0) ** 8, abs=1e-15
    )
    assert measure_lower_bound(10, 0.0) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ValueError):
        measure_lower_bound(2, 3.0)  # c = 1
    with pytest.raises(ValueError):
        measure_lower_bound(2, 5.0)  # c > 1


def test_monte_carlo_basics():
    est = measure_monte_carlo(2, 2.0, 5000, seed=3)
    assert 0.0 <= est.fraction <= 1.0
    assert est.hits == round(est.fraction * est.samples)
    assert est.samples == 5000
    assert est.std_error > 0.0
    with pytest.raises(ValueError):
        measure_monte_carlo(2, 2.0, 50)  # too few samples


def test_monte_carlo_zero_above_saturation():
    # c >= 1 leaves nothing above the threshold
    est = measure_monte_carlo(2, 5.0, 1000, seed=0)
    assert est.fraction == 0.0 and est.std_error == 0.0


def test_monte_carlo_dominates_closed_form():
    for m in (2, 3, 4):
        est = measure_monte_carlo(m, float(m), 20000, seed=0)
        bound = measure_lower_bound(m, float(m))
        assert est.fraction + 3.0 * est.std_error >= bound


def test_monte_carlo_matches_exact_fraction():
    # reference-pair weight beats c^2 with probability
    # (1-c^2)^(d-2) * (1 + (d-2) c^2) for d = 2^m amplitudes
    m, poly = 3, 3.0
    d = 2 ** m
    c2 = ((poly + 1.0) / d) ** 2
    exact = (1.0 - c2) ** (d - 2) * (1.0 + (d - 2) * c2)
    est = measure_monte_carlo(m, poly, 40000, seed=1)
    assert est.fraction == pytest.approx(exact, abs=5 * est.std_error)


def test_monte_carlo_partition_independent():
    serial = measure_monte_carlo(3, 3.0, 30000, seed=9, threads=1)
    pooled = measure_monte_carlo(3, 3.0, 30000, seed=9, threads=4)
    assert serial.hits == pooled.hits
    assert serial.fraction == pooled.fraction


# -- families and densities ------------------------------------------------------


def test_ghz_amplitudes_layout():
    amps = ghz_amplitudes(3, 0.3)
    assert amps.shape == (8,)
    assert amps[0] == pytest.approx(math.cos(0.3))
    assert amps[-1] == pytest.approx(math.sin(0.3))
    assert not amps[1:-1].any()


def test_family_validation():
    with pytest.raises(ValueError):
        GhzFamily(2, 0.0)
    with pytest.raises(ValueError):
        GhzFamily(1, 0.5)
    with pytest.raises(ValueError):
        PureFamily(np.ones(4))
    with pytest.raises(ValueError):
        PureFamily(np.array([1.0]))
    fam = PureFamily(np.array([1.0, 0.0, 0.0, 0.0]))
    assert fam.parties == 2


def test_werner_density_properties():
    fam = GhzFamily(2, math.pi / 4)
    for v in (0.0, 0.35, 1.0):
        rho = werner_density(fam, v)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(rho, rho.conj().T)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12
    with pytest.raises(ValueError):
        werner_density(fam, 1.5)


def test_max_pair_product():
    assert max_pair_product(ghz_amplitudes(2, math.pi / 4)) == pytest.approx(
        0.25, abs=1e-15
    )
    vec = np.zeros(4)
    vec[0] = 1.0
    assert max_pair_product(vec) == 0.0


# -- empirical detection -----------------------------------------------------------


def test_detect_visibility_chsh():
    found = detect_visibility(builtin("CHSH"), GhzFamily(2, math.pi / 4), 0, restarts=6)
    assert found == pytest.approx(1.0 / ROOT2, abs=1e-3)
    floor = visibility_lower_bound(2, 2.0, 2 * ROOT2)
    assert floor - 1e-3 <= found <= 1.0


def test_detect_visibility_mermin():
    found = detect_visibility(builtin("MERMIN"), GhzFamily(3, math.pi / 4), 0, restarts=6)
    assert found == pytest.approx(0.5, abs=5e-3)


def test_detect_visibility_near_product_state():
    found = detect_visibility(builtin("CHSH"), GhzFamily(2, 0.01), 0, restarts=4)
    assert found is None or found > 0.9


def test_detect_visibility_party_cap():
    from bellwerner import CapExceeded

    with pytest.raises(CapExceeded):
        detect_visibility(
            builtin("MERMIN(7)"), GhzFamily(7, math.pi / 4), 0, restarts=1
        )
