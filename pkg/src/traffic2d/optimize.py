"""Derivative-free bounded scalar minimization (golden-section search)."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0          # 1/phi
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0       # 1/phi^2


def golden_section(f, lo, hi, tol=1e-8):
    """Minimize a unimodal f on [lo, hi] to argument tolerance ``tol``.

    Returns (x_min, f(x_min), iterations). The bracket shrinks by 1/phi per
    iteration, so the iteration count is fixed by the interval and tolerance.
    """
    if hi < lo:
        lo, hi = hi, lo
    h = hi - lo
    if h <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x), 0
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = lo + INV_PHI_SQ * h
    d = lo + INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(n - 1):
        h *= INV_PHI
        if fc < fd:
            hi, d, fd = d, c, fc
            c = lo + INV_PHI_SQ * h
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * h
            fd = f(d)
    x = c if fc < fd else d
    return x, min(fc, fd), n
