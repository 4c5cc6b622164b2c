"""
Cascaded grid-forming controller: open-loop angle and voltage reference, a PI
capacitor-voltage loop with load-current and coupling feed-forward, and the
decoupled average-model sliding-mode current loop. Executed once per sampling
period on zero-order-held measurements.

The voltage reference ramps up over T_ramp after start. The load current fed
forward is extrapolated one sample ahead, and the output voltage is rotated
back to abc half a sample ahead of the measurement angle.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import structlog

from errors import ParameterError
from models.control import ControllerConfig, ControllerState, SmcGains, VoltageLoopGains
from models.scenario import EventKind, ScenarioEvent
from models.signals import DqPair, ThreePhase
from simulator.frames import abc_to_dq, dq_to_abc, wrap_angle

logger = structlog.get_logger(__name__)

# no load-current extrapolation across a breaker operation
_SWITCHING_EVENTS = frozenset({EventKind.CONNECT_LINEAR, EventKind.DISCONNECT_LINEAR,
                               EventKind.CONNECT_NONLINEAR, EventKind.DISCONNECT_NONLINEAR})


def synthesize_voltage_gains(xi: float, T_vres: float, C_s: float) -> VoltageLoopGains:
    """
    Pole-placement PI gains for the capacitor-voltage loop.

    Args:
        xi: Damping factor (1 = critically damped)
        T_vres: Desired voltage response time (s)
        C_s: Filter capacitance the gains are synthesized for (F)

    Returns:
        VoltageLoopGains with K_pv = 2*xi*omega_v*C_s and K_iv = omega_v**2*C_s
    """
    if not (xi > 0 and T_vres > 0 and C_s > 0):
        raise ParameterError(f"xi, T_vres and C_s must be positive, got ({xi}, {T_vres}, {C_s})")
    omega_v = 2.0 * math.pi / T_vres
    return VoltageLoopGains(
        K_pv=2.0 * xi * omega_v * C_s,
        K_iv=omega_v ** 2 * C_s,
        xi=xi,
        omega_v=omega_v,
        T_vres=T_vres,
    )


def sat(x: float) -> float:
    """Unit saturation used as the boundary-layer replacement of sign()."""
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


def _clamp(x: float, limit: float) -> float:
    return max(-limit, min(limit, x))


def generate_references(t: float, config: ControllerConfig) -> Tuple[DqPair, float]:
    """Capacitor-voltage reference (u_amp, 0) and the wrapped electrical angle at ``t``."""
    if t < 0:
        raise ParameterError(f"reference time must be non-negative, got {t}")
    return DqPair(config.u_amp, 0.0), wrap_angle(config.omega * t)


def soft_start(u_Cref: DqPair, t: float, T_ramp: float) -> DqPair:
    """Scale the voltage reference linearly from zero over the first ``T_ramp`` seconds."""
    if T_ramp <= 0 or t >= T_ramp:
        return u_Cref
    ratio = t / T_ramp
    return DqPair(u_Cref.d * ratio, u_Cref.q * ratio)


def predict_load_current(i_0: DqPair, state: ControllerState) -> DqPair:
    """
    One-sample linear extrapolation of the measured load current.

    The current loop lands on its reference one sample late, so the voltage
    loop is fed the load current expected at the next sample. Without
    history the raw sample is returned.
    """
    prev = state.prev_i_0
    state.prev_i_0 = i_0
    if prev is None:
        return i_0
    return DqPair(2.0 * i_0.d - prev.d, 2.0 * i_0.q - prev.q)


def modulation_angle(theta: float, config: ControllerConfig) -> float:
    """Angle used to return u_ref to abc; leads by half a sample when delay compensation is on."""
    if not config.delay_compensation:
        return theta
    return wrap_angle(theta + 0.5 * config.omega * config.T_sam)


def voltage_loop(u_C: DqPair, u_Cref: DqPair, i_0: DqPair, state: ControllerState,
                 gains: VoltageLoopGains) -> DqPair:
    """PI voltage control with load-current and coupling compensation; returns i_Lref."""
    cfg = state.config
    e_d = u_Cref.d - u_C.d
    e_q = u_Cref.q - u_C.q

    # forward-Euler integral with anti-windup clamp on the integral contribution
    state.integ_d = _clamp(state.integ_d + gains.K_iv * e_d * cfg.T_sam, cfg.integrator_limit)
    state.integ_q = _clamp(state.integ_q + gains.K_iv * e_q * cfg.T_sam, cfg.integrator_limit)

    coupling = cfg.omega * cfg.C_s
    i_d = gains.K_pv * e_d + state.integ_d + i_0.d - u_C.q * coupling
    i_q = gains.K_pv * e_q + state.integ_q + i_0.q + u_C.d * coupling
    return DqPair(i_d, i_q)


def smc_current_loop(i_L: DqPair, i_Lref: DqPair, u_C: DqPair, state: ControllerState,
                     gains: SmcGains) -> DqPair:
    """
    Sliding-mode current law with dq decoupling and equivalent-control feed-forward.

    Surfaces are S = i_L - i_Lref so that the reaching term -L_s*k*sat(S/k_sat)
    drives the averaged current error to zero. The reference derivative is a
    one-sample backward difference, zero on the first call.
    """
    cfg = state.config
    if state.primed:
        di_d = (i_Lref.d - state.prev_i_ref.d) / cfg.T_sam
        di_q = (i_Lref.q - state.prev_i_ref.q) / cfg.T_sam
    else:
        di_d = di_q = 0.0
        state.primed = True
    state.prev_i_ref = i_Lref

    s_d = i_L.d - i_Lref.d
    s_q = i_L.q - i_Lref.q
    L_s, R_s, omega = cfg.L_s, cfg.R_s, cfg.omega

    u_d = (-L_s * (gains.k_cd / gains.k_ttd) * sat(s_d / gains.k_sat)
           + L_s * di_d - omega * L_s * i_L.q + R_s * i_L.d + u_C.d)
    u_q = (-L_s * (gains.k_cq / gains.k_ttq) * sat(s_q / gains.k_sat)
           + L_s * di_q + omega * L_s * i_L.d + R_s * i_L.q + u_C.q)
    return DqPair(u_d, u_q)


@dataclass(frozen=True)
class ControlOutput:
    """Everything the controller computed at one sampling instant."""
    theta: float
    i_Lref: DqPair
    i_L: DqPair
    u_C: DqPair
    i_0: DqPair
    u_ref: DqPair
    u_ref_abc: ThreePhase

    @property
    def error(self) -> DqPair:
        """Tracking error i_Lref - i_L."""
        return DqPair(self.i_Lref.d - self.i_L.d, self.i_Lref.q - self.i_L.q)


class CascadedController:
    """
    PI voltage loop cascaded with the sliding-mode current loop, paired 1:1
    with one plant instance.
    """

    def __init__(self, config: ControllerConfig, gains: SmcGains):
        self.state = ControllerState(config=config)
        self.gains = gains
        self.voltage_gains = synthesize_voltage_gains(config.xi, config.T_vres, config.C_s)

    @property
    def config(self) -> ControllerConfig:
        return self.state.config

    def update(self, t: float, i_L_abc: ThreePhase, u_C_abc: ThreePhase,
               i_0_abc: ThreePhase) -> ControlOutput:
        """Run one sampling period on held abc measurements."""
        cfg = self.state.config
        u_Cref, theta = generate_references(t, cfg)
        u_Cref = soft_start(u_Cref, t, cfg.T_ramp)
        self.state.theta = theta

        i_L = abc_to_dq(i_L_abc, theta)
        u_C = abc_to_dq(u_C_abc, theta)
        i_0 = abc_to_dq(i_0_abc, theta)
        i_0_ff = predict_load_current(i_0, self.state) if cfg.load_prediction else i_0

        i_Lref = voltage_loop(u_C, u_Cref, i_0_ff, self.state, self.voltage_gains)
        u_ref = smc_current_loop(i_L, i_Lref, u_C, self.state, self.gains)
        u_ref_abc = dq_to_abc(u_ref, modulation_angle(theta, cfg))
        return ControlOutput(theta, i_Lref, i_L, u_C, i_0, u_ref, u_ref_abc)

    def apply_event(self, event: ScenarioEvent) -> None:
        """Controller-model perturbations; load switching also drops the load-current history."""
        if event.kind is EventKind.SCALE_CONTROLLER:
            self.state.config = self.state.config.scaled(event.factor)
            logger.debug("controller_event", kind=event.kind.value, factor=event.factor)
        elif event.kind in _SWITCHING_EVENTS:
            self.state.prev_i_0 = None
