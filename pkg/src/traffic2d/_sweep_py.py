"""Pure-Python (numpy) directional sweep kernel.

Fallback twin of the compiled extension ``traffic2d._sweep``; same contract,
selected at import time by :mod:`traffic2d.kernels`.
"""

import numpy as np


def _point_quantities(rho, mu, c_rho, c_mu, w, rmax):
    """Point fluxes and Jacobian spectral radius for every cell."""
    rho_hat = rho / rmax
    mu_hat = mu / rmax
    s = rho_hat + w * mu_hat
    factor = 1.0 - s
    f_rho = c_rho * rho * factor
    f_mu = c_mu * mu * factor
    a = c_rho * (factor - rho_hat)
    d = c_mu * (factor - w * mu_hat)
    disc = (a - d) ** 2 + 4.0 * c_rho * c_mu * w * rho_hat * mu_hat
    root = np.sqrt(np.maximum(disc, 0.0))
    half_tr = 0.5 * (a + d)
    rad = np.maximum(np.abs(half_tr - 0.5 * root), np.abs(half_tr + 0.5 * root))
    return f_rho, f_mu, rad


def rusanov_sweep(rho_pad, mu_pad, c_rho, c_mu, w, rmax, lam):
    """One conservative local Lax-Friedrichs sweep along axis 0.

    Inputs carry one ghost layer on each side along axis 0 (shape (N+2, M)).
    Interface fluxes

        F_{i+1/2} = 0.5*(f(U_{i+1}) + f(U_i) - alpha_{i+1/2}*(U_{i+1} - U_i))

    use alpha = max of the two endpoint Jacobian spectral radii. ``lam`` is
    dt_sweep/dx. Returns the updated interior (N, M) pair (rho, mu).
    """
    f_rho, f_mu, rad = _point_quantities(rho_pad, mu_pad, c_rho, c_mu, w, rmax)
    alpha = np.maximum(rad[:-1], rad[1:])
    flux_rho = 0.5 * (f_rho[:-1] + f_rho[1:] - alpha * (rho_pad[1:] - rho_pad[:-1]))
    flux_mu = 0.5 * (f_mu[:-1] + f_mu[1:] - alpha * (mu_pad[1:] - mu_pad[:-1]))
    rho_new = rho_pad[1:-1] - lam * (flux_rho[1:] - flux_rho[:-1])
    mu_new = mu_pad[1:-1] - lam * (flux_mu[1:] - flux_mu[:-1])
    return rho_new, mu_new
