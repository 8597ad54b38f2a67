"""numba kernels for the event loop and graph sampling.

These mirror the pure-Python reference paths exactly: same xoshiro256**
stream (see `rng`), same raw-output consumption, same update arithmetic.
All kernels release the GIL so sweep tasks can run on a thread pool, and
are cached on disk so repeat processes skip compilation.

Raw-draw order per event, mutate-or-interact scheme:
    node draw, gate draw, then either one mutation draw or one neighbor
    draw (skipped when the node is isolated).
Mutate-and-interact scheme:
    node draw, neighbor draw (skipped when isolated), second node draw,
    gate draw, then one mutation draw when the gate fires.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53

SCHEME_MUTATE_OR_INTERACT = 0
SCHEME_MUTATE_AND_INTERACT = 1

KIND_UNIFORM = 0
KIND_ASYMMETRIC_LINEAR = 1
KIND_SYMMETRIC_TENT = 2


@njit(inline="always")
def _next_u64(s):
    s1 = s[1]
    x = s1 * U64(5)
    result = ((x << U64(7)) | (x >> U64(57))) * U64(9)
    t = s1 << U64(17)
    s[2] ^= s[0]
    s[3] ^= s1
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s3 = s[3]
    s[3] = (s3 << U64(45)) | (s3 >> U64(19))
    return result


@njit(inline="always")
def _u01(s):
    return (_next_u64(s) >> U64(11)) * _INV_2_53


@njit(inline="always")
def _randbelow(s, n):
    # Bitmask rejection; consumes the same raw outputs as the Python twin.
    m = U64(n - 1)
    m |= m >> U64(1)
    m |= m >> U64(2)
    m |= m >> U64(4)
    m |= m >> U64(8)
    m |= m >> U64(16)
    m |= m >> U64(32)
    while True:
        v = _next_u64(s) & m
        if v < U64(n):
            return np.int64(v)


@njit(inline="always")
def _profile_eval(kind, p, alpha, x):
    if kind == KIND_UNIFORM:
        return p
    if kind == KIND_ASYMMETRIC_LINEAR:
        return alpha * (x - 0.5) + p
    if x <= 0.5:
        return alpha * (x - 0.25) + p
    return -alpha * (x - 0.75) + p


@njit(inline="always")
def _consensus(opinions, a, b, d, mu):
    oa = opinions[a]
    ob = opinions[b]
    diff = oa - ob
    if -d < diff < d:
        if mu == 0.5:
            mid = 0.5 * (oa + ob)
            opinions[a] = mid
            opinions[b] = mid
        else:
            shift = mu * diff
            opinions[a] = oa - shift
            opinions[b] = ob + shift
        return True
    return False


@njit(cache=True, nogil=True)
def run_events(
    offsets,
    neighbors,
    opinions,
    d,
    mu,
    total_steps,
    window,
    scheme,
    kind,
    base_rate,
    slope,
    bins,
    counts,
    state,
):
    """Advance ``total_steps`` events in place, tallying the final window.

    During the last ``window`` events the whole opinion vector is binned
    into ``counts`` after each event.  Returns (interactions attempted,
    consensus events, mutations).
    """
    n = opinions.shape[0]
    interactions = np.int64(0)
    consensus = np.int64(0)
    mutations = np.int64(0)
    hist_start = total_steps - window
    for t in range(total_steps):
        a = _randbelow(state, n)
        if scheme == SCHEME_MUTATE_OR_INTERACT:
            gate = _u01(state)
            if gate < _profile_eval(kind, base_rate, slope, opinions[a]):
                opinions[a] = _u01(state)
                mutations += 1
            else:
                deg = offsets[a + 1] - offsets[a]
                if deg > 0:
                    b = neighbors[offsets[a] + _randbelow(state, deg)]
                    interactions += 1
                    if _consensus(opinions, a, b, d, mu):
                        consensus += 1
        else:
            deg = offsets[a + 1] - offsets[a]
            if deg > 0:
                b = neighbors[offsets[a] + _randbelow(state, deg)]
                interactions += 1
                if _consensus(opinions, a, b, d, mu):
                    consensus += 1
            c = _randbelow(state, n)
            gate = _u01(state)
            if gate < _profile_eval(kind, base_rate, slope, opinions[c]):
                opinions[c] = _u01(state)
                mutations += 1
        if t >= hist_start:
            for i in range(n):
                k = int(opinions[i] * bins)
                if k >= bins:
                    k = bins - 1
                counts[k] += 1
    return interactions, consensus, mutations


@njit(cache=True, nogil=True)
def er_pairs(n, p_edge, us, vs, state):
    """Sample G(n, p) edges by geometric skipping over ordered pairs.

    Fills ``us``/``vs`` with pairs (u < v) and returns the edge count, or
    -1 if the buffers are full (caller re-runs with larger buffers and the
    same starting state, so the stream is unchanged).  Requires
    0 < p_edge < 1.
    """
    cap = us.shape[0]
    count = np.int64(0)
    log_q = np.log(1.0 - p_edge)
    v = 1
    w = -1
    while v < n:
        r = _u01(state)
        w = w + 1 + int(np.floor(np.log(1.0 - r) / log_q))
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            if count == cap:
                return np.int64(-1)
            us[count] = w
            vs[count] = v
            count += 1
    return count


def warm_up() -> None:
    """Force-compile the hot kernels (first call in a process pays JIT cost)."""
    offsets = np.array([0, 1, 2], dtype=np.int64)
    neighbors = np.array([1, 0], dtype=np.int64)
    opinions = np.array([0.25, 0.75])
    counts = np.zeros(4, dtype=np.int64)
    state = np.array([1, 2, 3, 4], dtype=np.uint64)
    for scheme in (SCHEME_MUTATE_OR_INTERACT, SCHEME_MUTATE_AND_INTERACT):
        run_events(
            offsets, neighbors, opinions.copy(), 0.5, 0.5, 2, 1,
            scheme, KIND_UNIFORM, 0.01, 0.0, 4, counts.copy(), state.copy(),
        )
    er_pairs(4, 0.5, np.empty(16, dtype=np.int64), np.empty(16, dtype=np.int64),
             state.copy())
