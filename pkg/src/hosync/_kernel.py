"""Compiled inner loop for the coupled switch network.

Everything here works on plain arrays so that numba can compile it; the
public wrappers live in :mod:`hosync.model`.

With the switch state frozen each branch is linear, so one step is
``u' = v_inf + a (u - v_inf)`` where ``v_inf`` is the branch's steady-state
capacitor voltage (``v_off``/``v_on`` plus the noise sample) and ``a`` the
branch contraction factor chosen by the integrator.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def effective_thresholds(on, u_th, delta_fwd, delta_bwd, out):
    """Turn-on thresholds lowered by every ON nearest neighbour.

    ``delta_fwd[k]`` is the shift oscillator k imposes on k+1 and
    ``delta_bwd[k]`` the shift k+1 imposes on k.
    """
    n = on.shape[0]
    for j in range(n):
        thr = u_th[j]
        if j > 0 and on[j - 1]:
            thr -= delta_fwd[j - 1]
        if j < n - 1 and on[j + 1]:
            thr -= delta_bwd[j]
        out[j] = thr


@njit(cache=True)
def advance(u, on, v_off, v_on, a_off, a_on, u_th, u_h, delta_fwd, delta_bwd,
            noise, k, shared, thr, change):
    """Advance all oscillators by one step using noise row ``k``.

    Transitions are decided simultaneously from the new voltages and the
    thresholds implied by the pre-step states.  ``change[j]`` becomes +1 for
    OFF->ON, -1 for ON->OFF, else 0.  Returns the number of OFF->ON
    transitions, or -1 if a voltage is not finite.
    """
    n = u.shape[0]
    effective_thresholds(on, u_th, delta_fwd, delta_bwd, thr)
    count = 0
    for j in range(n):
        un = noise[k, 0] if shared else noise[k, j]
        if on[j]:
            v_inf = v_on[j] + un
            x = v_inf + a_on[j] * (u[j] - v_inf)
        else:
            v_inf = v_off[j] + un
            x = v_inf + a_off[j] * (u[j] - v_inf)
        if not np.isfinite(x):
            return -1
        u[j] = x
        v = x - un
        change[j] = 0
        if on[j]:
            if v < u_h[j]:
                change[j] = -1
        elif v > thr[j]:
            change[j] = 1
            count += 1
    for j in range(n):
        if change[j] != 0:
            on[j] = change[j] > 0
    return count


@njit(cache=True)
def run(u, on, v_off, v_on, a_off, a_on, u_th, u_h, u_cf, g_off, g_on,
        delta_fwd, delta_bwd, noise, shared, step0, first_record,
        spike_steps, spike_counts, trace_u, trace_i, trace_every):
    """Integrate ``noise.shape[0]`` steps starting at global step ``step0``.

    Spike step indices (global: the step after which the switch is ON) at or
    beyond ``first_record`` are appended to ``spike_steps``.  Returns -1 on
    success or the local step index where a non-finite voltage appeared.
    """
    n = u.shape[0]
    thr = np.empty(n)
    change = np.zeros(n, dtype=np.int8)
    cap = spike_steps.shape[1]
    n_trace = trace_u.shape[0]
    for k in range(noise.shape[0]):
        gstep = step0 + k + 1
        count = advance(u, on, v_off, v_on, a_off, a_on, u_th, u_h, delta_fwd, delta_bwd,
                        noise, k, shared, thr, change)
        if count < 0:
            return k
        if count > 0 and gstep >= first_record:
            for j in range(n):
                if change[j] > 0:
                    c = spike_counts[j]
                    if c < cap:
                        spike_steps[j, c] = gstep
                    spike_counts[j] = c + 1
        if n_trace > 0 and gstep >= first_record and (gstep - first_record) % trace_every == 0:
            row = (gstep - first_record) // trace_every
            if row < n_trace:
                for j in range(n):
                    un = noise[k, 0] if shared else noise[k, j]
                    v = u[j] - un
                    if on[j]:
                        trace_i[row, j] = g_on[j] * (v - u_cf[j])
                    else:
                        trace_i[row, j] = g_off[j] * v
                    trace_u[row, j] = u[j]
    return -1
