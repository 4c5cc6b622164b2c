"""
Compiled micro-step kernels for the switching plant.

Everything here works on plain floats and float64 arrays so that numba can
compile it; without numba the same functions run as ordinary Python.
State vector layout: [i_La, i_Lb, i_Lc, u_Ca, u_Cb, u_Cc, i_la, i_lb, i_lc, i_dc, u_dc].
"""

import math

import numpy as np

try:
    import numba

    jit = numba.njit(cache=True)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    def jit(fn):
        return fn

    HAVE_NUMBA = False

N_STATES = 11
CARRIER_EPS = 1e-9


@jit
def inverter_phase_voltages(ss_a, ss_b, ss_c, u_bat):
    """Phase voltages of the two-level bridge; the three outputs sum to exactly zero."""
    s = u_bat / 3.0
    return ((2.0 * ss_a - ss_b - ss_c) * s,
            (2.0 * ss_b - ss_a - ss_c) * s,
            (2.0 * ss_c - ss_a - ss_b) * s)


@jit
def carrier_value(phase):
    """Symmetric triangle in [0, 1], minimum at phase 0."""
    if phase < 0.5:
        return 2.0 * phase
    return 2.0 - 2.0 * phase


@jit
def carrier_phase(step_index, dt, f_s):
    return (step_index * dt * f_s + CARRIER_EPS) % 1.0


@jit
def pwm_switch(u_ref, u_bat, carrier):
    """Upper-switch status of one leg for a given carrier value."""
    m = 0.5 + u_ref / u_bat
    if m >= 1.0:
        return 1.0
    if m <= 0.0:
        return 0.0
    if m > carrier:
        return 1.0
    return 0.0


@jit
def conduction_pair(u_a, u_b, u_c):
    """Indices of the highest and lowest phase; ties go to the lower index."""
    i_max = 0
    i_min = 0
    v_max = u_a
    v_min = u_a
    if u_b > v_max:
        i_max = 1
        v_max = u_b
    if u_b < v_min:
        i_min = 1
        v_min = u_b
    if u_c > v_max:
        i_max = 2
        v_max = u_c
    if u_c < v_min:
        i_min = 2
        v_min = u_c
    return i_max, i_min


@jit
def workspace():
    """Scratch buffers for rk4_step: stage derivatives, stage state, load currents."""
    return np.empty((4, N_STATES)), np.empty(N_STATES), np.empty(3)


@jit
def derivatives(x, out, i_load, u_a, u_b, u_c,
                L_s, R_s, C_s,
                lin_on, R_l, L_l,
                nl_on, L_n, C_n, R_n, u_f,
                i_max, i_min, conducting):
    """Time derivatives of the packed state with diode states frozen.

    ``i_load`` is a length-3 scratch buffer; it holds the bus-1 load currents on return.
    """
    u_inv = (u_a, u_b, u_c)
    for p in range(3):
        i_load[p] = 0.0

    if lin_on:
        for p in range(3):
            if L_l > 0.0:
                out[6 + p] = (x[3 + p] - R_l * x[6 + p]) / L_l
                i_load[p] = x[6 + p]
            else:
                out[6 + p] = 0.0
                i_load[p] = x[3 + p] / R_l
    else:
        for p in range(3):
            out[6 + p] = 0.0

    i_dc = x[9] if x[9] > 0.0 else 0.0
    if nl_on and conducting:
        bridge = x[3 + i_max] - x[3 + i_min] - 2.0 * u_f
        di_dc = (bridge - x[10]) / L_n
        if x[9] <= 0.0 and di_dc < 0.0:
            di_dc = 0.0
        out[9] = di_dc
        if i_max != i_min:
            i_load[i_max] += i_dc
            i_load[i_min] -= i_dc
    else:
        out[9] = 0.0
        i_dc = 0.0
    out[10] = (i_dc - x[10] / R_n) / C_n

    for p in range(3):
        out[p] = (u_inv[p] - x[3 + p] - R_s * x[p]) / L_s
        out[3 + p] = (x[p] - i_load[p]) / C_s


@jit
def rk4_step(x, dt, u_a, u_b, u_c,
             L_s, R_s, C_s,
             lin_on, R_l, L_l,
             nl_on, L_n, C_n, R_n, u_f,
             k, tmp, i_load):
    """One explicit RK4 step in place; switch and diode states are frozen over the step.

    ``k`` (4 x N_STATES), ``tmp`` (N_STATES) and ``i_load`` (3) are scratch buffers.
    """
    i_max, i_min = conduction_pair(x[3], x[4], x[5])
    conducting = False
    if nl_on:
        bridge = x[3 + i_max] - x[3 + i_min] - 2.0 * u_f
        conducting = x[9] > 0.0 or bridge > x[10]

    k1 = k[0]
    k2 = k[1]
    k3 = k[2]
    k4 = k[3]

    derivatives(x, k1, i_load, u_a, u_b, u_c, L_s, R_s, C_s, lin_on, R_l, L_l,
                nl_on, L_n, C_n, R_n, u_f, i_max, i_min, conducting)
    for n in range(N_STATES):
        tmp[n] = x[n] + 0.5 * dt * k1[n]
    derivatives(tmp, k2, i_load, u_a, u_b, u_c, L_s, R_s, C_s, lin_on, R_l, L_l,
                nl_on, L_n, C_n, R_n, u_f, i_max, i_min, conducting)
    for n in range(N_STATES):
        tmp[n] = x[n] + 0.5 * dt * k2[n]
    derivatives(tmp, k3, i_load, u_a, u_b, u_c, L_s, R_s, C_s, lin_on, R_l, L_l,
                nl_on, L_n, C_n, R_n, u_f, i_max, i_min, conducting)
    for n in range(N_STATES):
        tmp[n] = x[n] + dt * k3[n]
    derivatives(tmp, k4, i_load, u_a, u_b, u_c, L_s, R_s, C_s, lin_on, R_l, L_l,
                nl_on, L_n, C_n, R_n, u_f, i_max, i_min, conducting)
    for n in range(N_STATES):
        x[n] += dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n])

    if x[9] < 0.0:
        x[9] = 0.0
    if lin_on and not L_l > 0.0:
        for p in range(3):
            x[6 + p] = x[3 + p] / R_l


@jit
def advance(x, first_step, n_steps, dt,
            ref_a, ref_b, ref_c, u_bat, f_s,
            L_s, R_s, C_s,
            lin_on, R_l, L_l,
            nl_on, L_n, C_n, R_n, u_f,
            duty):
    """Run ``n_steps`` PWM-modulated micro-steps starting at global index ``first_step``.

    High-side on-counts are added to ``duty``. Returns the number of steps
    completed before the state became non-finite (``n_steps`` on success).
    """
    k, tmp, i_load = workspace()
    for j in range(n_steps):
        c = carrier_value(carrier_phase(first_step + j, dt, f_s))
        ss_a = pwm_switch(ref_a, u_bat, c)
        ss_b = pwm_switch(ref_b, u_bat, c)
        ss_c = pwm_switch(ref_c, u_bat, c)
        duty[0] += ss_a
        duty[1] += ss_b
        duty[2] += ss_c
        u_a, u_b, u_c = inverter_phase_voltages(ss_a, ss_b, ss_c, u_bat)
        rk4_step(x, dt, u_a, u_b, u_c, L_s, R_s, C_s, lin_on, R_l, L_l,
                 nl_on, L_n, C_n, R_n, u_f, k, tmp, i_load)
        for n in range(N_STATES):
            if not math.isfinite(x[n]):
                return j
    return n_steps
