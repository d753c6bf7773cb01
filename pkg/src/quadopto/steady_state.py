"""Mean-field steady states with linear and quadratic dispersive coupling.

The self-consistency conditions are

    x_s = -g_l I / (omega_m + 2 g_q I),      p_s = 0,
    a_s = eps / (kappa + i Delta_eff),       Delta_eff = Delta + g_l x_s + g_q x_s**2,

with ``I = |a_s|**2``.  Eliminating ``x_s`` from ``I (kappa**2 + Delta_eff**2) = eps**2``
and clearing the denominator ``(omega_m + 2 g_q I)**4`` gives a real
polynomial of degree <= 5 in ``I``; every steady state is one of its
non-negative real roots.  With ``g_q = 0`` it is the familiar cubic of
dispersive optical bistability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import Polynomial

from .errors import NoSteadyStateError
from .params import DriveConfig, SystemParams, drive_amplitude

IMAG_TOL = 1e-8
DENOMINATOR_TOL = 1e-6


@dataclass(frozen=True)
class SteadyStateBranch:
    """One self-consistent mean-field solution.

    ``delta_eff``, ``omega_m_eff`` and ``g_eff`` are the effective detuning,
    mechanical frequency and optomechanical coupling seen by the
    fluctuations (all rad/s).  ``stable`` is ``None`` until a stability
    analysis has been attached.
    """

    x_s: float
    p_s: float
    a_s: complex
    intensity: float
    delta_eff: float
    omega_m_eff: float
    g_eff: float
    spring_ratio: float
    stable: bool | None = None

    def to_dict(self) -> dict:
        return {
            "x_s": self.x_s,
            "p_s": self.p_s,
            "a_s": {"real": self.a_s.real, "imag": self.a_s.imag},
            "intensity": self.intensity,
            "delta_eff": self.delta_eff,
            "omega_m_eff": self.omega_m_eff,
            "g_eff": self.g_eff,
            "spring_ratio": self.spring_ratio,
            "stable": self.stable,
        }


def steady_state_polynomial(params: SystemParams, drive: DriveConfig) -> Polynomial:
    """Polynomial ``P(I)`` whose non-negative real roots are the steady-state intensities.

    ``P(I) = [I (kappa**2 d**4 + (Delta_eff d**2)**2) - eps**2 d**4] / omega_m**4`` with
    ``d = omega_m + 2 g_q I``.  Trailing zero coefficients are trimmed, so the
    degree drops to 3 when ``g_q = 0`` and to 1 when both couplings vanish.
    """
    eps2 = drive_amplitude(params, drive) ** 2
    g_l, g_q, wm = params.g_l, params.g_q, params.omega_m
    intensity = Polynomial([0.0, 1.0])
    den = Polynomial([1.0, 2.0 * g_q / wm])  # (omega_m + 2 g_q I) / omega_m
    # Delta_eff * den**2, using x_s = -(g_l / omega_m) I / den
    detuning_num = (
        drive.detuning * den**2
        - (g_l**2 / wm) * intensity * den
        + g_q * (g_l / wm) ** 2 * intensity**2
    )
    poly = intensity * (params.kappa**2 * den**4 + detuning_num**2) - eps2 * den**4
    return poly.trim()


def _scaled_polynomial(params: SystemParams, drive: DriveConfig, scale: float) -> Polynomial:
    # Same equation in u = I / scale with scale = eps**2 / kappa**2, divided by
    # kappa**2: Q(u) = u (d**4 + (q / kappa)**2) - d**4.  Physical roots lie in (0, 1].
    g_l, g_q, wm, kappa = params.g_l, params.g_q, params.omega_m, params.kappa
    u = Polynomial([0.0, 1.0])
    d = Polynomial([1.0, 2.0 * g_q * scale / wm])
    q = (
        drive.detuning * d**2
        - (g_l**2 * scale / wm) * u * d
        + g_q * (g_l * scale / wm) ** 2 * u**2
    ) / kappa
    return u * (d**4 + q**2) - d**4


def _companion_roots(poly: Polynomial) -> np.ndarray:
    coef = np.asarray(poly.coef, dtype=float)
    # Terms too small to matter anywhere on |u| <= 1 only create huge spurious roots.
    big = np.abs(coef).max()
    keep = np.nonzero(np.abs(coef) > 1e-17 * big)[0]
    coef = coef[: keep[-1] + 1]
    n = coef.size - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    companion = np.zeros((n, n))
    companion[1:, :-1] = np.eye(n - 1)
    companion[:, -1] = -coef[:-1] / coef[-1]
    return np.linalg.eigvals(companion)


def _polish(poly: Polynomial, root: float, iterations: int = 8) -> float:
    deriv = poly.deriv()
    best, best_res = root, abs(poly(root))
    for _ in range(iterations):
        slope = deriv(root)
        if slope == 0:
            break
        root = root - poly(root) / slope
        res = abs(poly(root))
        if res < best_res:
            best, best_res = root, res
        else:
            break
    return best


def make_branch(params: SystemParams, drive: DriveConfig, intensity: float) -> SteadyStateBranch:
    """Build a branch from a steady-state intensity using the closed-form relations.

    ``a_s`` takes its phase from ``eps / (kappa + i Delta_eff)`` and its modulus
    from ``sqrt(intensity)``, so ``|a_s|**2 == intensity`` holds to rounding
    even where the intensity root is ill-conditioned (near turning points).
    """
    g_l, g_q, wm = params.g_l, params.g_q, params.omega_m
    x_s = -g_l * intensity / (wm + 2.0 * g_q * intensity)
    delta_eff = drive.detuning + g_l * x_s + g_q * x_s**2
    cavity = complex(params.kappa, -delta_eff)
    a_s = math.sqrt(intensity) * cavity / abs(cavity)
    omega_m_eff = wm + 2.0 * g_q * intensity
    return SteadyStateBranch(
        x_s=float(x_s),
        p_s=0.0,
        a_s=complex(a_s),
        intensity=float(intensity),
        delta_eff=float(delta_eff),
        omega_m_eff=float(omega_m_eff),
        g_eff=float(g_l + 2.0 * g_q * x_s),
        spring_ratio=float(omega_m_eff / wm),
    )


def solve_steady_states(
    params: SystemParams, drive: DriveConfig, *, assess_stability: bool = True
) -> list[SteadyStateBranch]:
    """All physical steady states, sorted by ascending intensity.

    Roots of the steady-state polynomial are found as companion-matrix
    eigenvalues and refined by Newton steps.  Complex roots, negative
    intensities and roots where ``omega_m + 2 g_q I`` (nearly) vanishes are
    discarded.  With ``assess_stability`` each branch gets its ``stable``
    flag from the eigenvalues of the drift matrix.

    Raises
    ------
    NoSteadyStateError
        If filtering leaves no branch.  The exception lists every candidate
        root and why it was rejected.
    """
    eps = drive_amplitude(params, drive)
    if eps == 0.0:
        branches = [make_branch(params, drive, 0.0)]
    else:
        scale = eps**2 / params.kappa**2
        poly = _scaled_polynomial(params, drive, scale)
        candidates = _companion_roots(poly)
        rejected = {}
        intensities = []
        for root in candidates:
            if abs(root.imag) >= IMAG_TOL * (1.0 + abs(root)):
                rejected[complex(root)] = "complex"
                continue
            u = _polish(poly, float(root.real))
            if u < 0.0:
                rejected[complex(root)] = "negative intensity"
                continue
            if u > 1.0 + 1e-9:
                rejected[complex(root)] = "exceeds empty-cavity bound eps^2/kappa^2"
                continue
            if abs(1.0 + 2.0 * params.g_q * scale * u / params.omega_m) < DENOMINATOR_TOL:
                rejected[complex(root)] = "vanishing omega_m + 2 g_q I"
                continue
            intensities.append(u * scale)
        if not intensities:
            raise NoSteadyStateError(
                "no physical steady state found", candidates=candidates * scale, rejected=rejected
            )
        intensities = _dedupe(sorted(intensities))
        branches = [make_branch(params, drive, i) for i in intensities]

    if assess_stability:
        from .dynamics import routh_hurwitz

        branches = [replace(b, stable=routh_hurwitz(params, b).eig_stable) for b in branches]
    return branches


def _dedupe(values, rtol=1e-12):
    out = []
    for v in values:
        if out and math.isclose(v, out[-1], rel_tol=rtol, abs_tol=0.0):
            continue
        out.append(v)
    return out


def operating_branch(branches: list[SteadyStateBranch]) -> SteadyStateBranch:
    """The lowest-intensity branch.

    This is the branch reached adiabatically when the pump is ramped up from
    zero, so it is the one followed in power and coupling sweeps.
    """
    return min(branches, key=lambda b: b.intensity)


def effective_coupling(branch: SteadyStateBranch) -> float:
    """Many-photon coupling rate ``G_eff |a_s|`` in rad/s."""
    return branch.g_eff * abs(branch.a_s)
