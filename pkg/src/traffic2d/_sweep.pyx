# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled directional sweep kernel (local Lax-Friedrichs).

Hot inner loop of the Strang-split solver; a pure-numpy twin lives in
``traffic2d._sweep_py`` with the identical contract.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline double _specrad(double rho, double mu, double c_rho, double c_mu,
                            double w, double inv_rmax) nogil:
    cdef double rho_hat = rho * inv_rmax
    cdef double mu_hat = mu * inv_rmax
    cdef double factor = 1.0 - rho_hat - w * mu_hat
    cdef double a = c_rho * (factor - rho_hat)
    cdef double d = c_mu * (factor - w * mu_hat)
    cdef double disc = (a - d) * (a - d) + 4.0 * c_rho * c_mu * w * rho_hat * mu_hat
    if disc < 0.0:
        disc = 0.0
    cdef double root = sqrt(disc)
    cdef double lo = fabs(0.5 * (a + d) - 0.5 * root)
    cdef double hi = fabs(0.5 * (a + d) + 0.5 * root)
    return lo if lo > hi else hi


def rusanov_sweep(double[:, :] rho_pad, double[:, :] mu_pad,
                  double c_rho, double c_mu, double w, double rmax, double lam):
    """One conservative Rusanov sweep along axis 0 of ghost-padded arrays.

    Same contract as ``traffic2d._sweep_py.rusanov_sweep``.
    """
    cdef Py_ssize_t n = rho_pad.shape[0] - 2
    cdef Py_ssize_t m = rho_pad.shape[1]
    cdef double inv_rmax = 1.0 / rmax

    rho_new_arr = np.empty((n, m), dtype=np.float64)
    mu_new_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, :] rho_new = rho_new_arr
    cdef double[:, :] mu_new = mu_new_arr

    cdef Py_ssize_t i, j
    cdef double rl, ml, rr, mr, factor_l, factor_r
    cdef double f_rho_l, f_mu_l, f_rho_r, f_mu_r
    cdef double rad_l, rad_r, alpha
    cdef double flux_rho_lo, flux_mu_lo, flux_rho_hi, flux_mu_hi

    with nogil:
        for j in range(m):
            # march interfaces bottom-up within the column, reusing the right state
            rl = rho_pad[0, j]
            ml = mu_pad[0, j]
            factor_l = 1.0 - (rl + w * ml) * inv_rmax
            f_rho_l = c_rho * rl * factor_l
            f_mu_l = c_mu * ml * factor_l
            rad_l = _specrad(rl, ml, c_rho, c_mu, w, inv_rmax)

            rr = rho_pad[1, j]
            mr = mu_pad[1, j]
            factor_r = 1.0 - (rr + w * mr) * inv_rmax
            f_rho_r = c_rho * rr * factor_r
            f_mu_r = c_mu * mr * factor_r
            rad_r = _specrad(rr, mr, c_rho, c_mu, w, inv_rmax)

            alpha = rad_l if rad_l > rad_r else rad_r
            flux_rho_lo = 0.5 * (f_rho_l + f_rho_r - alpha * (rr - rl))
            flux_mu_lo = 0.5 * (f_mu_l + f_mu_r - alpha * (mr - ml))

            for i in range(1, n + 1):
                rl = rr
                ml = mr
                f_rho_l = f_rho_r
                f_mu_l = f_mu_r
                rad_l = rad_r

                rr = rho_pad[i + 1, j]
                mr = mu_pad[i + 1, j]
                factor_r = 1.0 - (rr + w * mr) * inv_rmax
                f_rho_r = c_rho * rr * factor_r
                f_mu_r = c_mu * mr * factor_r
                rad_r = _specrad(rr, mr, c_rho, c_mu, w, inv_rmax)

                alpha = rad_l if rad_l > rad_r else rad_r
                flux_rho_hi = 0.5 * (f_rho_l + f_rho_r - alpha * (rr - rl))
                flux_mu_hi = 0.5 * (f_mu_l + f_mu_r - alpha * (mr - ml))

                rho_new[i - 1, j] = rl - lam * (flux_rho_hi - flux_rho_lo)
                mu_new[i - 1, j] = ml - lam * (flux_mu_hi - flux_mu_lo)

                flux_rho_lo = flux_rho_hi
                flux_mu_lo = flux_mu_hi

    return rho_new_arr, mu_new_arr
