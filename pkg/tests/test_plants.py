import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fftesc.plants import (
    Branch,
    Disturbance,
    DisturbanceError,
    HeatExchangerNetwork,
    PlantError,
    QuadraticMap,
    Turbine,
    WindFarm,
    apply_disturbance,
    circle_overlap_area,
    six_turbine_layout,
    eight_branch_network,
    exchanger_outlets,
    farm_power,
    mean_temperature_difference,
    network_end_temperature,
    power_coefficient,
    quadratic_cost,
    set_parameter,
    turbine_power,
    validate_schedule,
    velocity_deficit,
    wake_overlap,
)
from oracles import (
    balanced_counterflow_duty,
    brute_force_simplex,
    row_power_mw,
    monte_carlo_overlap,
    simplex_grid_optimum,
)

# ---- quadratic -----------------------------------------------------------------

QMAP = QuadraticMap(-100.0, 0.5, 0.0)


def test_quadratic_values():
    assert quadratic_cost(QMAP, 0.5) == 0.0
    assert quadratic_cost(QMAP, 0.3) == pytest.approx(-4.0, rel=1e-12)


@given(st.floats(-10, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_quadratic_at_optimum_is_offset(c, ustar, off):
    assert QuadraticMap(c, ustar, off).cost(ustar) == off


def test_quadratic_vector_form():
    q = QuadraticMap((1.0, 2.0), (0.0, 1.0), 3.0)
    assert q.n_inputs == 2
    assert q.cost([1.0, 0.0]) == pytest.approx(1 + 2 + 3)
    np.testing.assert_allclose(q.gradient([1.0, 0.0]), [2.0, -4.0])


# ---- wind farm geometry --------------------------------------------------------


def pair(dy=0.0, dx=400.0, d=80.0):
    return WindFarm(
        turbines=(Turbine(0.0, 0.0, d), Turbine(dx, dy, d)),
        roughness=0.075, free_stream=8.0, air_density=1.225,
    )


def test_front_row_has_no_deficit():
    farm = six_turbine_layout()
    for i in (0, 3):
        assert velocity_deficit(farm, [0.3] * 6, i) == 0.0


def test_coaxial_deficit():
    farm = pair()
    dv = velocity_deficit(farm, [0.3, 0.3], 1)
    assert dv == pytest.approx(2 * 0.3 * (80 / 140) ** 2, rel=1e-12)
    assert dv == pytest.approx(0.19592, abs=1e-5)


def test_disjoint_wake_has_no_deficit():
    farm = pair(dy=70.0 + 40.0)
    assert wake_overlap(farm, 0, 1) == 0.0
    assert velocity_deficit(farm, [0.3, 0.3], 1) == 0.0


def test_overlap_bounds_and_containment():
    assert circle_overlap_area(70, 40, 0) == pytest.approx(math.pi * 40**2)
    assert circle_overlap_area(40, 70, 10) == pytest.approx(math.pi * 40**2)
    assert circle_overlap_area(70, 40, 200) == 0.0


@pytest.mark.parametrize("dist", [35.0, 60.0, 95.0])
def test_overlap_matches_monte_carlo(dist):
    exact = circle_overlap_area(70.0, 40.0, dist)
    mc = monte_carlo_overlap(70.0, 40.0, dist, 2_000_000, seed=7)
    assert exact == pytest.approx(mc, rel=0.01)


@settings(max_examples=200)
@given(st.floats(1, 200), st.floats(1, 200), st.floats(0, 500))
def test_overlap_properties(r1, r2, dist):
    a = circle_overlap_area(r1, r2, dist)
    assert 0 <= a <= math.pi * min(r1, r2) ** 2 * (1 + 1e-12)
    assert a == pytest.approx(circle_overlap_area(r2, r1, dist), rel=1e-9, abs=1e-9)


@given(st.floats(0, 300))
def test_overlap_reflection_symmetric(dy):
    assert wake_overlap(pair(dy=dy), 0, 1) == wake_overlap(pair(dy=-dy), 0, 1)


# ---- wind farm power -----------------------------------------------------------


def lone(v=8.0):
    return WindFarm((Turbine(0.0, 0.0, 80.0),), 0.075, v, 1.225)


def test_betz_optimum_power():
    assert power_coefficient(1 / 3) == pytest.approx(16 / 27, rel=1e-15)
    p = turbine_power(lone(), [1 / 3], 0)
    assert p == pytest.approx(0.5 * 1.225 * math.pi * 1600 * 16 / 27 * 512, rel=1e-12)
    assert p == pytest.approx(9.34e5, rel=1e-3)


def test_zero_induction_and_zero_wind():
    assert turbine_power(lone(), [0.0], 0) == 0.0
    assert turbine_power(lone(v=0.0), [0.3], 0) == 0.0
    assert farm_power(six_turbine_layout(), [0.0] * 6) == 0.0


def test_single_turbine_farm():
    assert farm_power(lone(), [0.25]) == turbine_power(lone(), [0.25], 0)


def test_six_turbine_layout_pinned_value():
    farm = six_turbine_layout()
    assert farm.cost([0.3] * 6) == pytest.approx(3.7033817939236107, rel=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(0, 0.5), min_size=3, max_size=3),
       st.lists(st.floats(0, 0.5), min_size=3, max_size=3))
def test_six_turbine_layout_matches_row_oracle(row_a, row_b):
    farm = six_turbine_layout()
    got = farm.cost(row_a + row_b)
    want = row_power_mw(row_a) + row_power_mw(row_b)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


@settings(max_examples=20)
@given(st.permutations(range(6)), st.lists(st.floats(0, 0.5), min_size=6, max_size=6))
def test_power_invariant_under_turbine_order(perm, u):
    farm = six_turbine_layout()
    shuffled = WindFarm(tuple(farm.turbines[i] for i in perm), farm.roughness,
                        farm.free_stream, farm.air_density)
    assert farm_power(shuffled, [u[i] for i in perm]) == pytest.approx(
        farm_power(farm, u), rel=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(0, 0.5), min_size=6, max_size=6), st.integers(0, 5),
       st.floats(0, 0.5))
def test_upwind_induction_weakly_slows_downwind(u, j, bump):
    farm = six_turbine_layout()
    hi = list(u)
    hi[j] = max(u[j], bump)
    for i, ti in enumerate(farm.turbines):
        if ti.x > farm.turbines[j].x:
            assert velocity_deficit(farm, hi, i) >= velocity_deficit(farm, u, i) - 1e-15
    assert farm_power(farm, u) >= 0


def test_velocity_clamped_when_deficit_exceeds_one():
    big = WindFarm((Turbine(0, 0, 80), Turbine(1, 0, 80)), 0.075, 8.0, 1.225)
    assert velocity_deficit(big, [0.5, 0.3], 1) > 0.99
    tight = WindFarm((Turbine(0, 0, 80), Turbine(0.1, 0, 80), Turbine(0.2, 0, 80)),
                     0.075, 8.0, 1.225)
    assert velocity_deficit(tight, [0.5, 0.5, 0.3], 2) > 1
    assert turbine_power(tight, [0.5, 0.5, 0.3], 2) == 0.0


def test_wind_farm_rejects_bad_parameters():
    with pytest.raises(ValueError):
        Turbine(0, 0, 0)
    with pytest.raises(ValueError):
        WindFarm((Turbine(0, 0, 80),), 0.0, 8, 1.2)
    with pytest.raises(ValueError):
        WindFarm((Turbine(0, 0, 80),), 0.1, 8, 1.2, power_unit="GW")


# ---- single exchanger -------------------------------------------------------------

C_P = 4.2


def test_no_transfer_without_area():
    out = exchanger_outlets(Branch(120.0, ua=0.0), 0.2, 60.0, 100.0, C_P)
    assert (out.duty, out.cold_out, out.hot_out) == (0.0, 60.0, 120.0)


def test_large_area_reaches_pinch():
    split, flow = 0.2, 100.0
    out = exchanger_outlets(Branch(120.0, ua=1e6), split, 60.0, flow, C_P)
    pinch = min(split * flow, 15.0) * C_P * 1e3 * 60.0
    assert out.duty <= pinch
    assert out.duty == pytest.approx(pinch, rel=0.01)


@pytest.mark.parametrize("ua", [1e3, 5e4, 2e5])
def test_balanced_counterflow_matches_effectiveness(ua):
    # 0.15 * 100 kg/s equals the 15 kg/s hot stream
    out = exchanger_outlets(Branch(120.0, ua=ua, hot_flow=15.0), 0.15, 60.0, 100.0, C_P)
    ref = balanced_counterflow_duty(ua, 15.0 * C_P * 1e3, 60.0)
    assert out.duty == pytest.approx(ref, rel=1e-6)
    dt1, dt2 = 120.0 - out.cold_out, out.hot_out - 60.0
    assert dt1 == pytest.approx(dt2, rel=1e-9)
    assert mean_temperature_difference(dt1, dt1) == pytest.approx(dt1, rel=1e-15)


def test_balanced_reference_value():
    out = exchanger_outlets(Branch(120.0), 0.15, 60.0, 100.0, C_P)
    assert out.duty == pytest.approx(1672566.37, rel=1e-8)


branches = st.builds(
    Branch, st.floats(61, 300), st.just(0.0) | st.floats(1.0, 5e5), st.floats(0.5, 50),
)


def _residual(branch, split, flow, q, tc=60.0):
    span = branch.hot_inlet_temp - tc
    c_cold, c_hot = split * flow * C_P * 1e3, branch.hot_flow * C_P * 1e3
    return q - branch.ua * mean_temperature_difference(span - q / c_cold, span - q / c_hot)


@settings(max_examples=300)
@given(branches, st.floats(1e-3, 1.0), st.floats(1, 200))
def test_exchanger_invariants(branch, split, flow):
    tc = 60.0
    out = exchanger_outlets(branch, split, tc, flow, C_P)
    c_cold = split * flow * C_P * 1e3
    c_hot = branch.hot_flow * C_P * 1e3
    th = branch.hot_inlet_temp
    q = out.duty
    assert tc <= out.cold_out <= th and tc <= out.hot_out <= th
    # Near pinch one ulp of Q moves the residual by more than 1e-6 W once NTU gets
    # into the hundreds, so the bound is on the relative residual there.
    if branch.ua / min(c_cold, c_hot) <= 200:
        assert abs(_residual(branch, split, flow, q)) < 1e-6 * max(1.0, q)
    if q > 0:
        assert c_cold * (out.cold_out - tc) == pytest.approx(q, rel=1e-6)
        assert c_hot * (th - out.hot_out) == pytest.approx(q, rel=1e-6)


@pytest.mark.parametrize("th", [61.0, 120.0, 150.0, 300.0])
def test_default_branch_residual_absolute(th):
    for split in np.geomspace(0.01, 1.0, 200):
        q = exchanger_outlets(Branch(th), split, 60.0, 100.0, C_P).duty
        assert abs(_residual(Branch(th), split, 100.0, q)) < 1e-6


def test_duty_is_best_representable_root():
    b, split, flow = Branch(61.0, 371496.0, 3.0), 0.125, 1.0
    q = exchanger_outlets(b, split, 60.0, flow, C_P).duty
    r = abs(_residual(b, split, flow, q))
    for x in (np.nextafter(q, 0), np.nextafter(q, np.inf)):
        assert r <= abs(_residual(b, split, flow, float(x)))


@settings(max_examples=100)
@given(branches, st.floats(1e-3, 1.0), st.floats(0.1, 50))
def test_hotter_inlet_raises_cold_outlet(branch, split, dth):
    a = exchanger_outlets(branch, split, 60.0, 100.0, C_P)
    b = exchanger_outlets(Branch(branch.hot_inlet_temp + dth, branch.ua, branch.hot_flow),
                          split, 60.0, 100.0, C_P)
    assert b.cold_out >= a.cold_out
    if branch.ua > 0:
        assert b.cold_out > a.cold_out


def test_exchanger_rejects_inverted_temperatures_and_tiny_split():
    with pytest.raises(PlantError):
        exchanger_outlets(Branch(50.0), 0.2, 60.0, 100.0, C_P)
    with pytest.raises(PlantError):
        exchanger_outlets(Branch(120.0), 1e-4, 60.0, 100.0, C_P)


# ---- network ----------------------------------------------------------------------


def _branch_value(net):
    def value(i, s):
        out = exchanger_outlets(net.branches[i], s, net.cold_inlet_temp, net.cold_flow,
                                net.heat_capacity, net.split_floor)
        return s * out.cold_out
    return value


def test_grid_oracle_agrees_with_enumeration():
    net = HeatExchangerNetwork((Branch(120.0), Branch(140.0, ua=2e4), Branch(110.0)))
    dp, dp_s = simplex_grid_optimum(_branch_value(net), 3, 40, net.split_floor)
    bf, bf_s = brute_force_simplex(lambda s: network_end_temperature(net, s[:-1]), 3, 40,
                                   net.split_floor)
    assert dp == pytest.approx(bf, rel=1e-12)
    np.testing.assert_allclose(dp_s, bf_s)


def test_identical_branches_optimal_at_equal_split():
    net = HeatExchangerNetwork(tuple(Branch(120.0) for _ in range(4)))
    _, best = simplex_grid_optimum(_branch_value(net), 4, 200, net.split_floor)
    np.testing.assert_allclose(best, [0.25] * 4)
    equal = network_end_temperature(net, [0.25] * 3)
    for d in (0.01, -0.01):
        assert network_end_temperature(net, [0.25 + d, 0.25 - d, 0.25]) < equal


def test_branch_without_area_gets_floor():
    net = HeatExchangerNetwork((Branch(120.0), Branch(120.0, ua=0.0), Branch(130.0)))
    _, best = simplex_grid_optimum(_branch_value(net), 3, 1000, net.split_floor)
    assert best[1] == pytest.approx(net.split_floor)


def test_two_branch_limit():
    net = HeatExchangerNetwork((Branch(120.0), Branch(150.0)))
    s = 1 - 1e-3
    alone = exchanger_outlets(net.branches[0], s, 60.0, 100.0, C_P).cold_out
    got = network_end_temperature(net, [s])
    assert got == pytest.approx(alone, abs=0.1)
    assert abs(got - alone) < abs(network_end_temperature(net, [0.9]) - alone)


@pytest.mark.parametrize("u", [[0.6, 0.5], [0.9995, 0.0], [-0.1, 0.5], [math.nan, 0.1]])
def test_split_closure_rejected(u):
    net = HeatExchangerNetwork((Branch(120.0), Branch(130.0), Branch(125.0)))
    with pytest.raises(PlantError):
        network_end_temperature(net, u)


def test_default_network_shape():
    net = eight_branch_network()
    assert net.n_inputs == 7
    assert 60.0 < net.cost([0.125] * 7) < 140.0


def test_split_closure_uses_complement():
    net = HeatExchangerNetwork((Branch(120.0), Branch(130.0), Branch(125.0)))
    np.testing.assert_allclose(net.splits([0.2, 0.3]), [0.2, 0.3, 0.5])


# ---- disturbances -----------------------------------------------------------------


def test_disturbance_changes_parameter_at_step():
    net = eight_branch_network()
    sched = [Disturbance(2000, "branches.0.hot_inlet_temp", 150.0)]
    assert apply_disturbance(net, sched, 1999) is net
    after = apply_disturbance(net, sched, 2000)
    assert after.branches[0].hot_inlet_temp == 150.0
    assert net.branches[0].hot_inlet_temp == 120.0
    assert after.branches[1:] == net.branches[1:]


def test_empty_schedule():
    net = eight_branch_network()
    assert apply_disturbance(net, [], 0) is net


def test_same_step_applied_in_order():
    net = eight_branch_network()
    sched = [Disturbance(5, "cold_inlet_temp", 50.0), Disturbance(5, "cold_inlet_temp", 55.0)]
    assert apply_disturbance(net, sched, 5).cold_inlet_temp == 55.0


def test_wind_farm_field_disturbance():
    farm = set_parameter(six_turbine_layout(), "turbines.2.diameter", 90.0)
    assert farm.turbines[2].diameter == 90.0


@pytest.mark.parametrize("path", ["branches.9.ua", "branches.0.colour", "nope", "branches..ua",
                                  "cold_flow.x"])
def test_unknown_paths_rejected(path):
    with pytest.raises(DisturbanceError):
        validate_schedule(eight_branch_network(), [Disturbance(1, path, 1.0)])


def test_plants_implement_protocol():
    from fftesc.plants import Plant

    for plant in (QMAP, six_turbine_layout(), eight_branch_network()):
        assert isinstance(plant, Plant)
        assert plant.n_inputs >= 1
