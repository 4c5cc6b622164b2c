"""
Tests for the switching plant: bridge voltages, PWM, rectifier conduction,
state derivatives and the RK4 micro-step.
"""

import itertools
import math

import numpy as np
import pytest

from errors import ParameterError, SimulationDivergedError
from models.plant import LinearLoadParams, NonlinearLoadParams, PlantParams, PlantState, SwitchState, Topology
from models.scenario import EventKind, ScenarioEvent
from models.signals import DqPair, ThreePhase
from simulator import kernels
from simulator.frames import abc_to_dq, dq_to_abc, wrap_angle
from simulator.plant import (InverterPlant, inverter_voltages, plant_derivatives, pwm_modulate,
                             rectifier_conduction, step)

F_S = 10e3
DT = 1e-6


def duty_over_period(u_ref: float, u_bat: float = 700.0) -> float:
    """Fraction of one carrier period the upper switch is on for a constant reference."""
    steps = int(round(1.0 / (F_S * DT)))
    on = 0
    for k in range(steps):
        phase = kernels.carrier_phase(k, DT, F_S)
        on += pwm_modulate(ThreePhase(u_ref, u_ref, u_ref), u_bat, phase).ss_a
    return on / steps


class TestInverterVoltages:
    def test_single_leg_on(self):
        result = inverter_voltages(SwitchState(1, 0, 0), 700.0)
        assert tuple(result) == pytest.approx((466.6667, -233.3333, -233.3333), abs=1e-3)

    @pytest.mark.parametrize("state", list(itertools.product((0, 1), repeat=3)))
    def test_every_state_sums_to_zero(self, state):
        result = inverter_voltages(SwitchState(*state), 700.0)
        assert result.zero_sequence == pytest.approx(0.0, abs=1e-12)

    def test_invalid_switch_state(self):
        with pytest.raises(ParameterError):
            SwitchState(2, 0, 0)


class TestPwm:
    @pytest.mark.parametrize("u_ref, expected", [
        (0.0, 0.5),
        (350.0, 1.0),
        (-175.0, 0.25),
        (175.0, 0.75),
        (-350.0, 0.0),
    ])
    def test_duty_over_one_carrier_period(self, u_ref, expected):
        assert duty_over_period(u_ref) == pytest.approx(expected, abs=0.01)

    def test_duty_is_linear_in_the_reference(self):
        rng = np.random.default_rng(42)
        for u_ref in rng.uniform(-340.0, 340.0, size=100):
            assert duty_over_period(u_ref) == pytest.approx(0.5 + u_ref / 700.0, abs=0.015)

    def test_saturation_beyond_rails(self):
        assert pwm_modulate(ThreePhase(1e4, -1e4, 0.0), 700.0, 0.999).ss_a == 1
        assert pwm_modulate(ThreePhase(1e4, -1e4, 0.0), 700.0, 0.0).ss_b == 0

    def test_carrier_is_triangular(self):
        assert kernels.carrier_value(0.0) == 0.0
        assert kernels.carrier_value(0.25) == pytest.approx(0.5)
        assert kernels.carrier_value(0.5) == pytest.approx(1.0)
        assert kernels.carrier_value(0.75) == pytest.approx(0.5)

    def test_phase_out_of_range(self):
        with pytest.raises(ParameterError):
            pwm_modulate(ThreePhase.zero(), 700.0, 1.0)


class TestRectifier:
    def test_conducting_pair(self):
        voltage, currents = rectifier_conduction(ThreePhase(300.0, -150.0, -150.0), 10.0, 400.0,
                                                 NonlinearLoadParams())
        assert voltage == pytest.approx(448.4)
        assert tuple(currents) == pytest.approx((10.0, -10.0, 0.0))

    def test_blocked_bridge_draws_nothing(self):
        voltage, currents = rectifier_conduction(ThreePhase(100.0, -50.0, -50.0), 0.0, 400.0,
                                                 NonlinearLoadParams())
        assert voltage < 400.0
        assert tuple(currents) == (0.0, 0.0, 0.0)

    def test_equal_phases_draw_nothing(self):
        _, currents = rectifier_conduction(ThreePhase(0.0, 0.0, 0.0), 5.0, 0.0, NonlinearLoadParams())
        assert tuple(currents) == (0.0, 0.0, 0.0)


class TestDerivatives:
    def test_inductor_current_decay_rate(self):
        state = PlantState(i_L=ThreePhase(1.0, -1.0, 0.0))
        result = plant_derivatives(state, ThreePhase.zero(), Topology(linear=False, nonlinear=False),
                                   PlantParams(), LinearLoadParams(), NonlinearLoadParams())
        assert tuple(result.i_L) == pytest.approx((-41.6667, 41.6667, 0.0), abs=1e-3)

    def test_capacitor_charges_from_inductor_current(self):
        state = PlantState(i_L=ThreePhase(1.0, -1.0, 0.0))
        result = plant_derivatives(state, ThreePhase.zero(), Topology(linear=False, nonlinear=False),
                                   PlantParams(), LinearLoadParams(), NonlinearLoadParams())
        assert result.u_C.a == pytest.approx(1.0 / 15e-6)


class TestStep:
    def test_rl_free_decay_matches_exponential(self):
        params = PlantParams(C_s=1e6)
        state = PlantState(i_L=ThreePhase(1.0, -1.0, 0.0))
        topology = Topology(linear=False, nonlinear=False)
        for _ in range(1000):
            state = step(state, ThreePhase.zero(), DT, topology, params,
                         LinearLoadParams(), NonlinearLoadParams())
        expected = math.exp(-params.R_s * 1e-3 / params.L_s)
        assert state.i_L.a == pytest.approx(expected, abs=1e-6)
        assert state.i_L.b == pytest.approx(-expected, abs=1e-6)
        assert state.t == pytest.approx(1e-3)

    def test_energy_never_increases_without_sources(self):
        params, linear, nonlinear = PlantParams(), LinearLoadParams(), NonlinearLoadParams()
        topology = Topology(linear=True, nonlinear=False)
        state = PlantState(i_L=ThreePhase(1.0, -1.0, 0.0), u_C=ThreePhase(100.0, -50.0, -50.0))
        energy = state.stored_energy(params, linear, nonlinear)
        for _ in range(10_000):
            state = step(state, ThreePhase.zero(), DT, topology, params, linear, nonlinear)
            current = state.stored_energy(params, linear, nonlinear)
            assert current <= energy * (1.0 + 1e-12)
            energy = current
        assert energy < 0.5 * params.C_s * (100.0 ** 2 + 2 * 50.0 ** 2)

    def test_rejects_large_step(self):
        with pytest.raises(ParameterError):
            step(PlantState(), ThreePhase.zero(), 5e-6, Topology(), PlantParams(),
                 LinearLoadParams(), NonlinearLoadParams())

    def test_non_finite_state_raises(self):
        state = PlantState(i_L=ThreePhase(float("nan"), 0.0, 0.0))
        with pytest.raises(SimulationDivergedError):
            step(state, ThreePhase.zero(), DT, Topology(), PlantParams(),
                 LinearLoadParams(), NonlinearLoadParams())


class TestInverterPlant:
    @pytest.fixture
    def plant(self):
        return InverterPlant(PlantParams(), LinearLoadParams(), NonlinearLoadParams(),
                             Topology(linear=True, nonlinear=False))

    def test_advance_counts_micro_steps(self, plant):
        duty = plant.advance(ThreePhase.zero(), 100)
        assert plant.step_index == 100
        assert plant.t == pytest.approx(1e-4)
        assert duty == pytest.approx(np.full(3, 50.0), abs=1.0)

    def test_currents_stay_three_wire(self, plant):
        for k in range(40):
            angle = 2 * math.pi * 50 * k * 50e-6
            plant.advance(ThreePhase(200 * math.cos(angle), 200 * math.cos(angle - 2 * math.pi / 3),
                                     200 * math.cos(angle + 2 * math.pi / 3)), 50)
        i_l_sum, i_lin_sum = plant.kcl_residuals()
        assert abs(i_l_sum) < 1e-9
        assert abs(i_lin_sum) < 1e-9

    def test_rectifier_current_never_negative(self):
        plant = InverterPlant(PlantParams(), LinearLoadParams(), NonlinearLoadParams(),
                              Topology(linear=False, nonlinear=True),
                              state=PlantState(u_C=ThreePhase(300.0, -150.0, -150.0)))
        for _ in range(200):
            plant.advance(ThreePhase(300.0, -150.0, -150.0), 50)
            assert plant.snapshot()[9] >= 0.0

    def test_measure_includes_load_current(self, plant):
        plant._x[6:9] = (2.0, -1.0, -1.0)
        _, _, i_0 = plant.measure()
        assert tuple(i_0) == (2.0, -1.0, -1.0)

    def test_resistive_load_is_algebraic(self):
        plant = InverterPlant(PlantParams(), LinearLoadParams(R_l=10.0, L_l=0.0), NonlinearLoadParams(),
                              Topology(linear=True, nonlinear=False),
                              state=PlantState(u_C=ThreePhase(100.0, -50.0, -50.0)))
        _, _, i_0 = plant.measure()
        assert tuple(i_0) == pytest.approx((10.0, -5.0, -5.0))

    def test_disconnect_clears_load_current(self, plant):
        plant._x[6:9] = (2.0, -1.0, -1.0)
        plant.apply_event(ScenarioEvent(0.0, EventKind.DISCONNECT_LINEAR))
        _, _, i_0 = plant.measure()
        assert not plant.topology.linear
        assert tuple(i_0) == (0.0, 0.0, 0.0)

    def test_scale_plant_changes_only_plant(self, plant):
        plant.apply_event(ScenarioEvent(0.0, EventKind.SCALE_PLANT, 1.4))
        assert plant.params.L_s == pytest.approx(2.4e-3 * 1.4)
        assert plant.params.R_s == pytest.approx(0.14)
        assert plant.params.C_s == 15e-6

    def test_scale_linear(self, plant):
        plant.apply_event(ScenarioEvent(0.0, EventKind.SCALE_LINEAR, 0.5))
        assert plant.linear.R_l == pytest.approx(4.5)

    def test_divergence_raises_with_time(self):
        plant = InverterPlant(PlantParams(), LinearLoadParams(), NonlinearLoadParams(), Topology(),
                              state=PlantState(i_L=ThreePhase(float("inf"), 0.0, 0.0)))
        with pytest.raises(SimulationDivergedError) as excinfo:
            plant.advance(ThreePhase.zero(), 50)
        assert excinfo.value.t == pytest.approx(1e-6)

    def test_precharge_on_rectifier_connect(self, plant):
        plant._x[3:6] = (300.0, -150.0, -150.0)
        plant.apply_event(ScenarioEvent(0.0, EventKind.CONNECT_NONLINEAR))
        assert plant.state.u_dc == pytest.approx(math.sqrt(270000.0) - 1.6)
        assert plant.state.i_dc == 0.0

    def test_precharge_disabled(self):
        plant = InverterPlant(PlantParams(), LinearLoadParams(), NonlinearLoadParams(precharge=False),
                              Topology(), state=PlantState(u_C=ThreePhase(300.0, -150.0, -150.0)))
        plant.apply_event(ScenarioEvent(0.0, EventKind.CONNECT_NONLINEAR))
        assert plant.state.u_dc == 0.0

    def test_precharge_never_lowers_the_dc_link(self):
        plant = InverterPlant(PlantParams(), LinearLoadParams(), NonlinearLoadParams(), Topology(),
                              state=PlantState(u_C=ThreePhase(300.0, -150.0, -150.0), u_dc=600.0))
        plant.apply_event(ScenarioEvent(0.0, EventKind.CONNECT_NONLINEAR))
        assert plant.state.u_dc == 600.0

    def test_dq_model_holds_on_a_three_wire_state(self, plant):
        params = plant.params
        for k in range(40):
            angle = params.omega * k * 50e-6
            plant.advance(dq_to_abc(DqPair(250.0, 20.0), angle), 50)
        assert plant.kcl_residuals() == pytest.approx((0.0, 0.0), abs=1e-9)

        theta = wrap_angle(params.omega * plant.t)
        u_inv = dq_to_abc(DqPair(280.0, -15.0), theta)
        state = plant.state
        rates = plant_derivatives(state, u_inv, plant.topology, params, plant.linear, plant.nonlinear)
        residual_L, residual_C = dq_residuals(state, rates, u_inv, theta, params, state.i_lin)
        assert residual_L == pytest.approx((0.0, 0.0), abs=1e-6)
        assert residual_C == pytest.approx((0.0, 0.0), abs=1e-6)


def dq_residuals(state, rates, u_inv, theta, params, i_0):
    """Residuals of the synchronous-frame filter equations evaluated on abc derivatives."""
    w = params.omega
    i_L, u_C, i_0 = abc_to_dq(state.i_L, theta), abc_to_dq(state.u_C, theta), abc_to_dq(i_0, theta)
    u = abc_to_dq(u_inv, theta)
    di = abc_to_dq(rates.i_L, theta)
    du = abc_to_dq(rates.u_C, theta)
    di_d, di_q = di.d + w * i_L.q, di.q - w * i_L.d
    du_d, du_q = du.d + w * u_C.q, du.q - w * u_C.d
    residual_L = (params.L_s * di_d - (u.d - u_C.d - params.R_s * i_L.d + w * params.L_s * i_L.q),
                  params.L_s * di_q - (u.q - u_C.q - params.R_s * i_L.q - w * params.L_s * i_L.d))
    residual_C = (params.C_s * du_d - (i_L.d - i_0.d + w * params.C_s * u_C.q),
                  params.C_s * du_q - (i_L.q - i_0.q - w * params.C_s * u_C.d))
    return residual_L, residual_C


class TestDqModel:
    @pytest.mark.parametrize("seed", range(3))
    def test_random_balanced_states(self, seed):
        rng = np.random.default_rng(seed)
        params, linear, nonlinear = PlantParams(), LinearLoadParams(), NonlinearLoadParams()
        topology = Topology(linear=True, nonlinear=False)
        for _ in range(100):
            theta = rng.uniform(-math.pi, math.pi)
            i_L, u_C, i_lin, u_inv = (dq_to_abc(DqPair(*pair), theta)
                                      for pair in rng.uniform(-300, 300, size=(4, 2)))
            state = PlantState(i_L=i_L, u_C=u_C, i_lin=i_lin)
            rates = plant_derivatives(state, u_inv, topology, params, linear, nonlinear)
            residual_L, residual_C = dq_residuals(state, rates, u_inv, theta, params, i_lin)
            assert residual_L == pytest.approx((0.0, 0.0), abs=1e-6)
            assert residual_C == pytest.approx((0.0, 0.0), abs=1e-6)


class TestKernelWorkspace:
    def test_stale_scratch_buffers_do_not_leak(self):
        x0 = PlantState(i_L=ThreePhase(3.0, -1.0, -2.0), u_C=ThreePhase(300.0, -150.0, -150.0),
                        i_lin=ThreePhase(1.0, -0.5, -0.5), u_dc=400.0).to_array()
        args = (1e-6, 350.0, -350.0, 0.0, 2.4e-3, 0.1, 15e-6, True, 9.0, 3e-3,
                True, 1.8e-3, 2.2e-3, 460.0, 0.8)
        fresh = x0.copy()
        kernels.rk4_step(fresh, *args, *kernels.workspace())
        k, tmp, i_load = kernels.workspace()
        for buffer in (k, tmp, i_load):
            buffer.fill(np.nan)
        reused = x0.copy()
        kernels.rk4_step(reused, *args, k, tmp, i_load)
        assert np.array_equal(fresh, reused)
        assert np.all(np.isfinite(reused))
