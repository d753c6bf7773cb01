"""Normal-mode-splitting peaks from the complex zeros of D(omega).

For a stable branch the four zeros of D come in mirror pairs
``+-w_+ - i h_+`` and ``+-w_- - i h_-``.  The real parts give the peak
positions and the imaginary parts the half widths.  Here ``gamma_plus``
and ``gamma_minus`` are the *full* widths of each pair (``2 h``, the sum
of |Im| over the two mirror roots), so that by Vieta
``gamma_plus + gamma_minus = 2 kappa + gamma_m`` for every stable branch.
A doublet counts as resolved when ``w_+ - w_- > (gamma_plus + gamma_minus) / 2``,
i.e. when the splitting exceeds the sum of the two half widths.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePolynomialError, ImaginaryFrequencyError, PeakClassificationError
from .params import SystemParams
from .spectrum import d_coefficients
from .steady_state import effective_coupling

PAIR_TOL = 1e-6


@dataclass(frozen=True)
class NmsPeaks:
    omega_plus: float
    omega_minus: float
    gamma_plus: float
    gamma_minus: float
    resolved: bool
    raw_roots: tuple

    @property
    def splitting(self) -> float:
        return self.omega_plus - self.omega_minus

    @property
    def half_widths(self) -> tuple[float, float]:
        return self.gamma_plus / 2.0, self.gamma_minus / 2.0

    def to_dict(self) -> dict:
        return {
            "omega_plus": self.omega_plus,
            "omega_minus": self.omega_minus,
            "gamma_plus": self.gamma_plus,
            "gamma_minus": self.gamma_minus,
            "resolved": self.resolved,
            "raw_roots": [{"real": r.real, "imag": r.imag} for r in self.raw_roots],
        }


def quartic_roots(coeffs) -> np.ndarray:
    """All four roots of ``c0 w**4 + c1 w**3 + c2 w**2 + c3 w + c4``.

    Companion-matrix eigenvalues of the rescaled monic polynomial, each
    refined by Newton steps.  Returned sorted by (Re, Im).

    Raises
    ------
    DegeneratePolynomialError
        If the quartic term is negligible, i.e. it only adds a root more than
        ``1e14`` times larger than the roots of the remaining cubic.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (5,):
        raise ValueError("expected 5 coefficients, highest power first")
    if _leading_negligible(c):
        raise DegeneratePolynomialError("leading coefficient vanishes; not a quartic")
    monic = c / c[0]
    # rescale w = rho z so all monic coefficients are O(1)
    rho = max(abs(monic[k]) ** (1.0 / k) for k in range(1, 5))
    if rho == 0:
        return np.zeros(4, dtype=complex)
    # divide one factor of rho at a time: rho**k can underflow while monic[k] / rho**k cannot
    b = monic.copy()
    for k in range(1, 5):
        b[k:] /= rho
    companion = np.zeros((4, 4), dtype=complex)
    companion[1:, :-1] = np.eye(3)
    companion[:, -1] = -b[:0:-1]
    roots = np.linalg.eigvals(companion) * rho
    roots = np.array([_newton(c, r) for r in roots])
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _leading_negligible(c, rtol=1e-14) -> bool:
    # Compare the quartic term with the dominant lower term at the root scale
    # of the lower-degree polynomial; scale-free, unlike |c0| / max|c|.
    if c[0] == 0 or not np.all(np.isfinite(c)):
        return True
    lower = c[1:]
    nz = np.nonzero(lower)[0]
    if nz.size == 0:
        return False
    j = nz[0]
    tail = [abs(lower[k] / lower[j]) ** (1.0 / (k - j)) for k in nz[1:]]
    sigma = max(tail) if tail else 1.0
    return abs(c[0]) * sigma ** (j + 1) <= rtol * abs(lower[j])


def _newton(c, root, iterations=3):
    dc = np.polyder(c)
    best, best_res = root, abs(np.polyval(c, root))
    for _ in range(iterations):
        slope = np.polyval(dc, root)
        if slope == 0:
            break
        root = root - np.polyval(c, root) / slope
        res = abs(np.polyval(c, root))
        if res < best_res:
            best, best_res = root, res
        else:
            break
    return best


def classify_roots(roots) -> NmsPeaks:
    """Group four zeros into two mirror pairs and extract positions and widths."""
    roots = np.asarray(roots, dtype=complex)
    scale = np.abs(roots).max()
    tol = PAIR_TOL * max(scale, np.finfo(float).tiny)
    order = np.lexsort((np.sign(roots.imag), np.abs(roots.real)))
    ordered = roots[order]
    pairs = [ordered[:2], ordered[2:]]
    for r1, r2 in pairs:
        overdamped = abs(r1.real) <= tol and abs(r2.real) <= tol
        mirrored = abs(r1.real + r2.real) <= tol and abs(r1.imag - r2.imag) <= tol
        if not (overdamped or mirrored):
            raise PeakClassificationError(
                "zeros of D(omega) do not form two mirror pairs", raw_roots=roots
            )
    (lo1, lo2), (hi1, hi2) = pairs
    omega_minus = 0.5 * (abs(lo1.real) + abs(lo2.real))
    omega_plus = 0.5 * (abs(hi1.real) + abs(hi2.real))
    gamma_minus = abs(lo1.imag) + abs(lo2.imag)
    gamma_plus = abs(hi1.imag) + abs(hi2.imag)
    return NmsPeaks(
        omega_plus=float(omega_plus),
        omega_minus=float(omega_minus),
        gamma_plus=float(gamma_plus),
        gamma_minus=float(gamma_minus),
        resolved=bool(omega_plus - omega_minus > 0.5 * (gamma_plus + gamma_minus)),
        raw_roots=tuple(complex(r) for r in quartic_sorted(roots)),
    )


def quartic_sorted(roots):
    roots = np.asarray(roots)
    return roots[np.lexsort((roots.imag, roots.real))]


def exact_peaks(params: SystemParams, branch) -> NmsPeaks:
    return classify_roots(quartic_roots(d_coefficients(params, branch)))


def approx_peaks(params: SystemParams, branch) -> tuple[float, float]:
    """Closed-form peak positions ``(w_+, w_-)`` valid for kappa, Delta_eff >> gamma_m.

    ``w_+-**2 = (wa**2 + wb**2)/2 +- sqrt((wa**2 - wb**2)**2 + 8 omega_m I G**2 Delta)/2``
    with ``wa**2 = kappa**2 + Delta_eff**2`` and ``wb**2 = omega_m omega_m_eff``.
    """
    gm = params.gamma_m
    if params.kappa < 10 * gm or abs(branch.delta_eff) < 10 * gm:
        warnings.warn("peak approximation assumes kappa, Delta_eff >> gamma_m", stacklevel=2)
    wa2 = params.kappa**2 + branch.delta_eff**2
    wb2 = params.omega_m * branch.omega_m_eff
    disc = (wa2 - wb2) ** 2 + 8.0 * params.omega_m * branch.intensity * branch.g_eff**2 * branch.delta_eff
    if disc < 0:
        raise ImaginaryFrequencyError("negative discriminant in peak formula")
    root = np.sqrt(disc)
    plus2 = 0.5 * (wa2 + wb2 + root)
    minus2 = 0.5 * (wa2 + wb2 - root)
    if minus2 < 0:
        raise ImaginaryFrequencyError("lower normal mode has imaginary frequency (unstable)")
    return float(np.sqrt(plus2)), float(np.sqrt(minus2))


def nms_threshold_value(params: SystemParams) -> float:
    return params.kappa + params.gamma_m / 2.0


def nms_threshold(params: SystemParams, branch) -> bool:
    """True when the many-photon coupling exceeds ``kappa + gamma_m / 2``."""
    return bool(abs(effective_coupling(branch)) > nms_threshold_value(params))


# --- shape of a sampled spectrum -------------------------------------------


def local_maxima(values) -> np.ndarray:
    """Indices of strict interior local maxima."""
    v = np.asarray(values)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return np.nonzero(inner)[0] + 1


def valley_to_peak(frequencies, values, lo: float, hi: float) -> float:
    """``min / max`` of the spectrum on ``[lo, hi]`` (typically ``[w_-, w_+]``).

    Close to 1 for merged peaks, small for a deep dip between two peaks.
    """
    f = np.asarray(frequencies)
    sel = (f >= lo) & (f <= hi)
    if sel.sum() < 2:
        raise ValueError("fewer than two samples between the peaks")
    seg = np.asarray(values)[sel]
    return float(seg.min() / seg.max())
