"""Linearized fluctuation dynamics and stability.

Fluctuations ``u = (dx, dp, dX, dY)`` around a steady state obey
``du/dt = A u + noise`` with the drift matrix

    [[ 0,            omega_m,  0,        0        ],
     [-omega_m_eff, -gamma_m, -G X_s,   -G Y_s    ],
     [ G Y_s,        0,       -kappa,    Delta_eff],
     [-G X_s,        0,       -Delta_eff, -kappa  ]]

where ``X_s``, ``Y_s`` are the quadratures of ``a_s`` and ``G`` is the
effective coupling.  Its characteristic polynomial is
``l**4 + (2 kappa + gamma_m) l**3 + s1 l**2 + s2 l + s3``, and the
Routh-Hurwitz conditions on those coefficients decide stability.  The
eigenvalues are computed as well; they are the final word, and the
Hurwitz conditions are kept as a cross-check.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams

log = logging.getLogger(__name__)

MARGINAL_TOL = 1e-6  # |max Re lambda| <= MARGINAL_TOL * omega_m counts as marginal


@dataclass(frozen=True)
class DriftMatrix:
    a: np.ndarray
    x_quad: float
    y_quad: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.a)


@dataclass(frozen=True)
class StabilityReport:
    s1: float
    s2: float
    s3: float
    cond4: bool
    cond5: bool
    rh_stable: bool
    max_re_eigenvalue: float
    eig_stable: bool
    marginal: bool

    @property
    def agrees(self) -> bool:
        return self.rh_stable == self.eig_stable

    def to_dict(self) -> dict:
        return {
            "s1": self.s1,
            "s2": self.s2,
            "s3": self.s3,
            "cond4": self.cond4,
            "cond5": self.cond5,
            "rh_stable": self.rh_stable,
            "max_re_eigenvalue": self.max_re_eigenvalue,
            "eig_stable": self.eig_stable,
            "marginal": self.marginal,
        }


def quadratures(a_s: complex) -> tuple[float, float]:
    """``X_s = (a + a*)/sqrt 2`` and ``Y_s = (a - a*)/(i sqrt 2)``."""
    return math.sqrt(2.0) * a_s.real, math.sqrt(2.0) * a_s.imag


def build_drift_matrix(params: SystemParams, branch) -> DriftMatrix:
    xq, yq = quadratures(branch.a_s)
    g = branch.g_eff
    wm, gm, k, dt = params.omega_m, params.gamma_m, params.kappa, branch.delta_eff
    a = np.array(
        [
            [0.0, wm, 0.0, 0.0],
            [-branch.omega_m_eff, -gm, -g * xq, -g * yq],
            [g * yq, 0.0, -k, dt],
            [-g * xq, 0.0, -dt, -k],
        ]
    )
    return DriftMatrix(a=a, x_quad=xq, y_quad=yq)


def hurwitz_coefficients(params: SystemParams, branch) -> tuple[float, float, float, float]:
    """``(2 kappa + gamma_m, s1, s2, s3)``: the non-leading characteristic coefficients."""
    k, gm, wm = params.kappa, params.gamma_m, params.omega_m
    wmt, dt, g = branch.omega_m_eff, branch.delta_eff, branch.g_eff
    xq, yq = quadratures(branch.a_s)
    optical = k * k + dt * dt
    s1 = optical + 2.0 * k * gm + wmt * wm
    s2 = optical * gm + 2.0 * k * wmt * wm
    s3 = optical * wmt * wm - dt * wm * g * g * (xq * xq + yq * yq)
    return 2.0 * k + gm, s1, s2, s3


def routh_hurwitz(params: SystemParams, branch) -> StabilityReport:
    a1, s1, s2, s3 = hurwitz_coefficients(params, branch)
    cond4 = a1 * s1 > s2
    cond5 = s1 * s2 * a1 > s2 * s2 + a1 * a1 * s3
    rh_stable = bool(s1 > 0 and s2 > 0 and s3 > 0 and cond4 and cond5)

    eig = build_drift_matrix(params, branch).eigenvalues
    max_re = float(eig.real.max())
    marginal = abs(max_re) <= MARGINAL_TOL * params.omega_m
    eig_stable = max_re < 0
    if marginal and rh_stable != eig_stable:
        log.debug("Routh-Hurwitz/eigenvalue disagreement at marginal point, max Re = %g", max_re)
    return StabilityReport(
        s1=s1,
        s2=s2,
        s3=s3,
        cond4=bool(cond4),
        cond5=bool(cond5),
        rh_stable=rh_stable,
        max_re_eigenvalue=max_re,
        eig_stable=bool(eig_stable),
        marginal=bool(marginal),
    )
