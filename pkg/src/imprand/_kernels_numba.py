"""numba-compiled kernels, one fused loop each."""
import numpy as np
from numba import njit

LN2 = np.log(2.0)


@njit(cache=True, nogil=True)
def _log_capital(m1, m0, bits):
    n = bits.size
    out = np.empty(n + 1)
    out[0] = 0.0
    acc = 0.0
    for k in range(n):
        m = m1[k] if bits[k] == 1 else m0[k]
        if m < 0.0:
            return out[:0], k
        if m == 0.0:
            acc = -np.inf
        elif acc != -np.inf:
            acc += np.log(m)
        out[k + 1] = acc
    return out, -1


def log_capital(m1, m0, bits):
    out, bad = _log_capital(np.ascontiguousarray(m1, dtype=np.float64),
                            np.ascontiguousarray(m0, dtype=np.float64),
                            np.ascontiguousarray(bits, dtype=np.uint8))
    return out, int(bad)


@njit(cache=True, nogil=True)
def _mixture_log_capital(inc, sel, xis, log_w, log_rest):
    n = inc.size
    R = xis.size
    acc = log_w.copy()
    out = np.empty(n + 1)
    for k in range(n + 1):
        if k > 0 and sel[k - 1] != 0:
            for r in range(R):
                acc[r] += np.log1p(-xis[r] * inc[k - 1])
        m = log_rest
        for r in range(R):
            if acc[r] > m:
                m = acc[r]
        s = np.exp(log_rest - m)
        for r in range(R):
            s += np.exp(acc[r] - m)
        out[k] = m + np.log(s)
    return out


def mixture_log_capital(inc, sel, xis, log_w, log_rest):
    return _mixture_log_capital(np.ascontiguousarray(inc, dtype=np.float64),
                                np.ascontiguousarray(sel, dtype=np.float64),
                                np.ascontiguousarray(xis, dtype=np.float64),
                                np.ascontiguousarray(log_w, dtype=np.float64),
                                float(log_rest))


@njit(cache=True, nogil=True)
def _cap_mix_log(logT, n_max, slack):
    n = logT.size
    out = np.empty(n)
    reached = -np.inf
    rest = -n_max * LN2
    for k in range(n):
        if logT[k] > reached:
            reached = logT[k]
        # every component is log T or its frozen level, minus the log weight
        m = rest
        for j in range(1, n_max + 1):
            lev = j * LN2
            c = 0.0 if reached >= lev - slack else logT[k] - lev
            if c > m:
                m = c
        s = np.exp(rest - m)
        for j in range(1, n_max + 1):
            lev = j * LN2
            c = 0.0 if reached >= lev - slack else logT[k] - lev
            s += np.exp(c - m)
        out[k] = m + np.log(s)
    return out


def cap_mix_log(logT, n_max, slack):
    return _cap_mix_log(np.ascontiguousarray(logT, dtype=np.float64), int(n_max), float(slack))


@njit(cache=True, nogil=True)
def _backward_lower(values, lo, hi, depth):
    v = values.copy()
    for d in range(depth - 1, -1, -1):
        start = 2**d - 1
        for i in range(2**d):
            f0 = v[2 * i]
            diff = v[2 * i + 1] - f0
            a = lo[start + i] * diff
            b = hi[start + i] * diff
            v[i] = f0 + (a if a < b else b)
    return v[0]


def backward_lower(values, lo, hi, depth):
    return float(_backward_lower(np.array(values, dtype=np.float64),
                                 np.ascontiguousarray(lo, dtype=np.float64),
                                 np.ascontiguousarray(hi, dtype=np.float64), int(depth)))
