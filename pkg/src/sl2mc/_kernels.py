"""Numba kernels for the angle-chain Monte Carlo.

One replica is one serial recursion theta_{n+1} = S(T_n, theta_n) carried
in the unit-vector representation (cos, sin), so no trig call is needed in
the step itself.  Replicas are embarrassingly parallel: each owns its RNG
stream (a pure function of (master_seed, replica)) and writes only its own
output slots, which makes results bit-identical for any thread count.
All float accumulators use Kahan compensation.

The RNG recurrence must match sl2mc.rng bit for bit.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

# an outdated TBB emits a harmless layer-selection warning before numba
# falls back to its built-in threading; results are unaffected
warnings.filterwarnings("ignore", message=".*TBB.*")

from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 2.0**-53


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _pick_atom(cumw, u):
    for i in range(cumw.shape[0]):
        if u < cumw[i]:
            return i
    return cumw.shape[0] - 1


@njit(cache=True, parallel=True)
def chain_kernel(
    t11,
    t12,
    t21,
    t22,
    cumw,
    steps,
    burn_in,
    theta0,
    replicas,
    master_seed,
    n_bins,
    n_harm,
):
    """Run `replicas` independent chains; collect per-replica raw sums.

    Returns (gain_sum, harm_cos, harm_sin, hist, theta_last): the compensated
    sum of log-norm gains after burn-in, sums of cos/sin(2k theta_n) for
    k = 1..n_harm, occupation counts over n_bins uniform bins of [0, pi),
    and the final angle of each replica.
    """
    gain_sum = np.zeros(replicas)
    harm_cos = np.zeros((replicas, n_harm))
    harm_sin = np.zeros((replicas, n_harm))
    hist = np.zeros((replicas, n_bins), dtype=np.int64)
    theta_last = np.zeros(replicas)
    bin_scale = n_bins / math.pi

    for r in prange(replicas):
        state = _mix64(master_seed + np.uint64(r + 1) * _GOLDEN)
        c = math.cos(theta0)
        s = math.sin(theta0)
        gsum = 0.0
        gcmp = 0.0
        hc = np.zeros(n_harm)
        hs = np.zeros(n_harm)
        hcc = np.zeros(n_harm)
        hsc = np.zeros(n_harm)

        for n in range(1, steps + 1):
            state = state + _GOLDEN
            u = (_mix64(state) >> np.uint64(11)) * _INV53
            k = _pick_atom(cumw, u)

            x = t11[k] * c + t12[k] * s
            y = t21[k] * c + t22[k] * s
            r2 = x * x + y * y
            g = 0.5 * math.log(r2)
            inv = 1.0 / math.sqrt(r2)
            if y > 0.0 or (y == 0.0 and x > 0.0):
                c = x * inv
                s = y * inv
            else:
                c = -x * inv
                s = -y * inv
            if s == 0.0:
                s = 0.0  # normalize -0.0 so theta lands at +0.0

            if n > burn_in:
                yk = g - gcmp
                tk = gsum + yk
                gcmp = (tk - gsum) - yk
                gsum = tk

                c2 = c * c - s * s
                s2 = 2.0 * c * s
                ck = c2
                sk = s2
                for j in range(n_harm):
                    yk = ck - hcc[j]
                    tk = hc[j] + yk
                    hcc[j] = (tk - hc[j]) - yk
                    hc[j] = tk
                    yk = sk - hsc[j]
                    tk = hs[j] + yk
                    hsc[j] = (tk - hs[j]) - yk
                    hs[j] = tk
                    cn = ck * c2 - sk * s2
                    sn = sk * c2 + ck * s2
                    ck = cn
                    sk = sn

                theta = math.atan2(s, c)
                if theta >= math.pi:
                    theta = 0.0
                b = int(theta * bin_scale)
                if b >= n_bins:
                    b = n_bins - 1
                hist[r, b] += 1

        gain_sum[r] = gsum
        for j in range(n_harm):
            harm_cos[r, j] = hc[j]
            harm_sin[r, j] = hs[j]
        # invariant: s > 0, or s == 0 with c > 0, so atan2 lands in [0, pi)
        theta_last[r] = math.atan2(s, c)

    return gain_sum, harm_cos, harm_sin, hist, theta_last
