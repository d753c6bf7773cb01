"""Position-fluctuation spectrum S_xx(omega) of the mechanical oscillator.

Three independent routes are provided:

* ``ANALYTIC_CORRECTED``: the closed form

      S_xx = omega_m / |D|**2 * [ (2 n_a + 1) 2 G**2 I kappa omega_m (kappa**2 + w**2 + Delta**2)
                                  + gamma_m w coth(hbar w / 2 kB T)
                                    ((kappa**2 + w**2 + Delta**2)**2 - 4 w**2 Delta**2) ]

* ``TRANSFER_ASSEMBLY``: ``|X_xi|**2`` and the symmetrized ``|X_a|**2`` combined with
  the noise spectra, without using the simplified algebra above.
* ``MATRIX_ORACLE``: direct solution of ``(-i w I - A) u = noise`` with the
  4x4 drift matrix for every frequency.

``ANALYTIC_UNCORRECTED`` keeps the closed form as it commonly appears in
the literature (``|D(w**2)|`` in the denominator, ``coth(hbar w / kB T)``
and ``-4 w**2 Delta`` with a single power of the detuning).  It is not a
valid spectral density and exists only to show the disagreement.

All spectra are symmetrized, hence even in omega.  Units are the
dimensionless position squared per rad/s.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import build_drift_matrix
from .errors import SingularSystemError
from .params import CothConvention, NoiseModel, SystemParams, noise_model


class SpectrumMethod(enum.Enum):
    ANALYTIC_CORRECTED = "corrected"
    ANALYTIC_UNCORRECTED = "uncorrected"
    TRANSFER_ASSEMBLY = "transfer"
    MATRIX_ORACLE = "oracle"


@dataclass(frozen=True)
class TransferCoefficients:
    d_omega: np.ndarray | complex
    x_a: np.ndarray | complex
    x_a_dag: np.ndarray | complex
    x_xi: np.ndarray | complex


@dataclass(frozen=True)
class SpectrumResult:
    frequencies: np.ndarray
    s_xx: np.ndarray
    method: SpectrumMethod


def d_coefficients(params: SystemParams, branch) -> np.ndarray:
    """Coefficients of the quartic D(omega), highest power first."""
    k, gm, wm = params.kappa, params.gamma_m, params.omega_m
    dt = branch.delta_eff
    optical = np.array([-1.0, -2j * k, k * k + dt * dt])  # (kappa - i w)**2 + Delta**2
    mechanical = np.array([1.0, 1j * gm, -wm * branch.omega_m_eff])
    coef = np.polymul(optical, mechanical).astype(complex)
    coef[-1] += 2.0 * branch.g_eff**2 * branch.intensity * dt * wm
    return coef


def d_of_omega(params: SystemParams, branch, omega):
    """D(omega) for real frequencies or complex trial roots."""
    omega = np.asarray(omega)
    if not np.iscomplexobj(omega):
        omega = omega.astype(float)
    k, gm, wm = params.kappa, params.gamma_m, params.omega_m
    dt = branch.delta_eff
    optical = (k - 1j * omega) ** 2 + dt * dt
    mechanical = omega**2 + 1j * gm * omega - wm * branch.omega_m_eff
    return optical * mechanical + 2.0 * branch.g_eff**2 * branch.intensity * dt * wm


def _x_a(params, branch, omega):
    k, wm = params.kappa, params.omega_m
    return (
        np.sqrt(2.0 * k) * wm * branch.g_eff * np.conj(branch.a_s)
        * (k - 1j * omega - 1j * branch.delta_eff)
    )


def transfer_coefficients(params: SystemParams, branch, omega) -> TransferCoefficients:
    """D(omega) and the input-noise transfer coefficients.

    ``dx(w) = [X_a a_in + X_a_dag a_in_dag - X_xi xi] / D``.  Works on scalars
    or arrays of frequencies.
    """
    omega = np.asarray(omega, dtype=float)
    k, wm = params.kappa, params.omega_m
    return TransferCoefficients(
        d_omega=d_of_omega(params, branch, omega),
        x_a=_x_a(params, branch, omega),
        x_a_dag=np.conj(_x_a(params, branch, -omega)),
        x_xi=wm * ((k - 1j * omega) ** 2 + branch.delta_eff**2),
    )


def _noise(params, noise):
    return noise if noise is not None else noise_model(params)


def brownian_noise_spectrum(params: SystemParams, omega, noise: NoiseModel | None = None):
    """Symmetrized spectrum of the Brownian force, ``gamma_m w coth(...) / omega_m``."""
    noise = _noise(params, noise)
    return params.gamma_m * noise.omega_coth(omega) / params.omega_m


def s_xx_analytic(
    params: SystemParams,
    branch,
    omega,
    method: SpectrumMethod = SpectrumMethod.ANALYTIC_CORRECTED,
    noise: NoiseModel | None = None,
):
    omega = np.asarray(omega, dtype=float)
    k, gm, wm = params.kappa, params.gamma_m, params.omega_m
    dt, g, intensity = branch.delta_eff, branch.g_eff, branch.intensity
    lorentz = k * k + omega**2 + dt * dt
    if method is SpectrumMethod.ANALYTIC_CORRECTED:
        noise = _noise(params, noise)
        if noise.coth_argument_convention is not CothConvention.HALF:
            raise ValueError("the corrected spectrum needs the HALF coth convention")
        radiation = (2.0 * noise.n_a + 1.0) * 2.0 * g * g * intensity * k * wm * lorentz
        thermal = gm * noise.omega_coth(omega) * (lorentz**2 - 4.0 * omega**2 * dt * dt)
        return wm * (radiation + thermal) / np.abs(d_of_omega(params, branch, omega)) ** 2
    if method is SpectrumMethod.ANALYTIC_UNCORRECTED:
        full = noise_model(params, CothConvention.FULL)
        radiation = 2.0 * g * g * intensity * k * wm * lorentz
        thermal = gm * full.omega_coth(omega) * (lorentz**2 - 4.0 * omega**2 * dt)
        return wm * (radiation + thermal) / np.abs(d_of_omega(params, branch, omega**2))
    raise ValueError(f"{method} is not an analytic method")


def s_xx_transfer(params: SystemParams, branch, omega, noise: NoiseModel | None = None):
    omega = np.asarray(omega, dtype=float)
    noise = _noise(params, noise)
    tc = transfer_coefficients(params, branch, omega)
    x_a_minus = _x_a(params, branch, -omega)
    optical = (2.0 * noise.n_a + 1.0) * 0.5 * (np.abs(tc.x_a) ** 2 + np.abs(x_a_minus) ** 2)
    thermal = np.abs(tc.x_xi) ** 2 * brownian_noise_spectrum(params, omega, noise)
    return (optical + thermal) / np.abs(tc.d_omega) ** 2


def position_response(params: SystemParams, branch, omega) -> np.ndarray:
    """Row ``x`` of ``(-i w I - A)^-1`` for each frequency, shape ``(n, 4)``.

    Column ``j`` is the response of ``dx`` to a unit force in channel ``j``
    of ``(dx, dp, dX, dY)``.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    a = build_drift_matrix(params, branch).a
    m = -1j * omega[:, None, None] * np.eye(4) - a[None, :, :]
    scale = np.abs(m).max(axis=(1, 2))
    cond = np.linalg.cond(m / scale[:, None, None])
    if not np.all(np.isfinite(cond)) or cond.max() > 1e13:
        raise SingularSystemError(
            f"response matrix is singular (condition number {cond.max():.3g}); "
            "the branch is marginally stable"
        )
    unit = np.zeros((omega.size, 4, 1), dtype=complex)
    unit[:, 0, 0] = 1.0
    try:
        # Row 0 of M^-1 is the solution of M^T y = e_0.
        rows = np.linalg.solve(np.transpose(m, (0, 2, 1)), unit)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    return rows


def oracle_channels(params: SystemParams, branch, omega, noise: NoiseModel | None = None):
    """``(thermal, optical)`` contributions to S_xx from the matrix solution."""
    noise = _noise(params, noise)
    omega_arr = np.asarray(omega, dtype=float)
    rows = position_response(params, branch, omega_arr)
    thermal = np.abs(rows[:, 1]) ** 2 * brownian_noise_spectrum(params, omega_arr.ravel(), noise)
    # Symmetrized quadrature input noise: 2 kappa (n_a + 1/2) in each of dX_in, dY_in.
    optical = params.kappa * (2.0 * noise.n_a + 1.0) * (
        np.abs(rows[:, 2]) ** 2 + np.abs(rows[:, 3]) ** 2
    )
    shape = omega_arr.shape
    return thermal.reshape(shape), optical.reshape(shape)


def s_xx_oracle(params: SystemParams, branch, omega, noise: NoiseModel | None = None):
    thermal, optical = oracle_channels(params, branch, omega, noise)
    out = thermal + optical
    return out if out.ndim else float(out)


def s_xx(params, branch, omega, method=SpectrumMethod.ANALYTIC_CORRECTED, noise=None):
    """Dispatch on ``method``."""
    method = SpectrumMethod(method)
    if method is SpectrumMethod.TRANSFER_ASSEMBLY:
        return s_xx_transfer(params, branch, omega, noise)
    if method is SpectrumMethod.MATRIX_ORACLE:
        return s_xx_oracle(params, branch, omega, noise)
    return s_xx_analytic(params, branch, omega, method, noise)


def frequency_grid(params: SystemParams, lo: float = 0.5, hi: float = 1.5, points: int = 4001):
    """Uniform grid over ``[lo, hi] * omega_m`` in rad/s."""
    return np.linspace(lo, hi, points) * params.omega_m


def compute_spectrum(params, branch, frequencies, method=SpectrumMethod.ANALYTIC_CORRECTED, noise=None):
    frequencies = np.asarray(frequencies, dtype=float)
    method = SpectrumMethod(method)
    values = np.asarray(s_xx(params, branch, frequencies, method, noise), dtype=float)
    return SpectrumResult(frequencies=frequencies, s_xx=values, method=method)
