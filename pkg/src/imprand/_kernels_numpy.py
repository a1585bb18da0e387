"""Pure-numpy kernels. Same signatures and results as the numba backend."""
import numpy as np

LN2 = np.log(2.0)


def log_capital(m1, m0, bits):
    """Running log capital of a multiplier sequence; returns (logs, first_negative_index or -1)."""
    m = np.where(bits == 1, m1, m0)
    neg = np.flatnonzero(m < 0)
    if neg.size:
        return np.empty(0), int(neg[0])
    out = np.empty(m.size + 1)
    out[0] = 0.0
    with np.errstate(divide="ignore"):
        np.cumsum(np.log(m), out=out[1:])
    return out, -1


def mixture_log_capital(inc, sel, xis, log_w, log_rest):
    """log of ``exp(log_rest) + sum_r exp(log_w[r]) prod_k (1 - xis[r] sel[k] inc[k])``."""
    steps = np.log1p(-np.outer(xis, sel * inc))
    comp = np.empty((xis.size, inc.size + 1))
    comp[:, 0] = 0.0
    np.cumsum(steps, axis=1, out=comp[:, 1:])
    comp += log_w[:, None]
    return np.logaddexp(np.logaddexp.reduce(comp, axis=0), log_rest)


def cap_mix_log(logT, n_max, slack):
    """Capped-and-mixed log capital; a level counts as reached within ``slack`` in log."""
    reached = np.maximum.accumulate(logT)
    levels = np.arange(1, n_max + 1)[:, None] * LN2
    comp = np.where(reached[None, :] >= levels - slack, levels, logT[None, :])
    comp = comp - levels  # weight 2**-n
    return np.logaddexp(np.logaddexp.reduce(comp, axis=0), -n_max * LN2)


def backward_lower(values, lo, hi, depth):
    """Backward induction of the lower expectation; ``lo``/``hi`` hold levels 0..depth-1 back to back."""
    v = np.asarray(values, dtype=np.float64)
    for d in range(depth - 1, -1, -1):
        start = 2**d - 1
        l = lo[start:start + 2**d]
        h = hi[start:start + 2**d]
        f0 = v[0::2]
        diff = v[1::2] - f0
        v = f0 + np.minimum(l * diff, h * diff)
    return float(v[0])
