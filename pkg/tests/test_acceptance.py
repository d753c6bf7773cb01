"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line, shown in the terminal summary,
before asserting.
"""

import time

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from conftest import ACCEPTANCE_LINES, branch_at, drive_at
from quadopto.dynamics import MARGINAL_TOL, routh_hurwitz
from quadopto.params import drive_amplitude
from quadopto.peaks import approx_peaks, exact_peaks, local_maxima, valley_to_peak
from quadopto.spectrum import SpectrumMethod, s_xx_analytic, s_xx_oracle, s_xx_transfer
from quadopto.steady_state import effective_coupling, operating_branch, solve_steady_states
from quadopto.sweeps import instability_power, run_figure


def record(number, title, passed, detail):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def _random_branches(base, rng, *, stable_only, detuning=(1.0, 1.0)):
    while True:
        p = base.with_ratio(rng.uniform(-2e-5, 2e-5))
        power = 12.0 * (1.0 - rng.random())  # (0, 12] mW
        d = drive_at(p, power, rng.uniform(*detuning))
        for b in solve_steady_states(p, d):
            if b.stable or not stable_only:
                yield p, b


def test_criterion_1_width_sum(base):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst, n = 0.0, 0
    for p, b in _random_branches(base, rng, stable_only=True):
        pk = exact_peaks(p, b)
        total = 2 * p.kappa + p.gamma_m
        worst = max(worst, abs(pk.gamma_plus + pk.gamma_minus - total) / total)
        n += 1
        if n == 600:
            break
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 10
    record(1, "width sum equals 2 kappa + gamma_m", ok, f"{n} stable branches, max rel err {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_spectrum_triple_agreement(base):
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    worst, uncorrected_min, n = 0.0, np.inf, 0
    branches = _random_branches(base, rng, stable_only=True, detuning=(0.5, 1.5))
    for p, b in branches:
        w = rng.uniform(0.05, 2.0) * p.omega_m
        exact = s_xx_oracle(p, b, w)
        for value in (s_xx_analytic(p, b, w), s_xx_transfer(p, b, w)):
            worst = max(worst, abs(value / exact - 1))
        printed = s_xx_analytic(p, b, w, SpectrumMethod.ANALYTIC_UNCORRECTED)
        uncorrected_min = min(uncorrected_min, abs(printed / exact - 1))
        n += 1
        if n == 200:
            break
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and uncorrected_min > 1e-2 and elapsed < 5
    record(
        2, "corrected, transfer and oracle spectra agree", ok,
        f"{n} samples, max rel diff {worst:.2e}; uncorrected form off by >= {uncorrected_min:.2e}; {elapsed:.2f} s",
    )
    assert ok


def test_criterion_3_routh_hurwitz_concordance(base):
    rng = np.random.default_rng(303)
    start = time.perf_counter()
    agree = n = skipped = unstable = 0
    for p, b in _random_branches(base, rng, stable_only=False, detuning=(-1.5, 1.5)):
        rep = routh_hurwitz(p, b)
        if abs(rep.max_re_eigenvalue) <= MARGINAL_TOL * p.omega_m:
            skipped += 1
            continue
        n += 1
        agree += rep.rh_stable == rep.eig_stable
        unstable += not rep.eig_stable
        if n == 1000:
            break
    elapsed = time.perf_counter() - start
    ok = agree == n and elapsed < 10
    record(
        3, "Routh-Hurwitz verdict equals eigenvalue verdict", ok,
        f"{agree}/{n} agree ({unstable} unstable, {skipped} marginal skipped), {elapsed:.2f} s",
    )
    assert ok


def _shape(rows, wm):
    """Per-ratio spectrum arrays from a fig2 dataset."""
    out = {}
    for r in rows:
        if r["stable"]:
            out.setdefault(r["gq_ratio"], ([], []))
            out[r["gq_ratio"]][0].append(r["omega_over_omega_m"] * wm)
            out[r["gq_ratio"]][1].append(r["s_xx"])
    return {k: (np.array(f), np.array(s)) for k, (f, s) in out.items()}


def test_criterion_4_fig2_shapes(base):
    start = time.perf_counter()
    _, rows_a, _ = run_figure("fig2a")
    _, rows_b, _ = run_figure("fig2b")
    elapsed = time.perf_counter() - start
    wm = base.omega_m
    surf_a, surf_b = _shape(rows_a, wm), _shape(rows_b, wm)

    # (a) 6.9 mW
    p0, b0 = branch_at(base, 6.9, 0.0)
    pk0 = exact_peaks(p0, b0)
    f, s = surf_a[0.0]
    valley = valley_to_peak(f, s, pk0.omega_minus, pk0.omega_plus)
    negative = sorted(r for r in surf_a if r <= -4e-6 + 1e-12)
    resolved_neg = [exact_peaks(*branch_at(base, 6.9, r)).resolved for r in negative]
    two_maxima_neg = [len(local_maxima(surf_a[r][1])) == 2 for r in negative]
    ok_a = valley > 0.5 and all(resolved_neg) and all(two_maxima_neg) and len(surf_a) == 19

    # (b) 10.7 mW
    p1, b1 = branch_at(base, 10.7, 0.0)
    resolved_zero = exact_peaks(p1, b1).resolved
    maxima_zero = len(local_maxima(surf_b[0.0][1]))
    maxima_pos = len(local_maxima(surf_b[9e-6][1]))
    ok_b = resolved_zero and maxima_zero == 2 and maxima_pos == 1

    ok = ok_a and ok_b and elapsed < 60
    record(
        4, "fig2 spectra", ok,
        f"6.9 mW: valley/peak at g_q=0 {valley:.3f}, resolved for all {len(negative)} ratios <= -4e-6: "
        f"{all(resolved_neg)}; 10.7 mW: resolved at 0 {resolved_zero} ({maxima_zero} maxima), "
        f"maxima at +9e-6: {maxima_pos}; surfaces {elapsed:.1f} s",
    )
    assert ok


def test_criterion_5_fig3_trends(base):
    neg = np.linspace(0.0, -12e-6, 25)
    peaks = [exact_peaks(*branch_at(base, 6.9, r)) for r in neg]
    sep = np.array([pk.splitting for pk in peaks])
    widths = np.array([[pk.gamma_plus, pk.gamma_minus] for pk in peaks])
    sep_growth = sep[-1] - sep[0]
    width_change = np.abs(widths[-1] - widths[0]).max()
    ok_sep = bool(np.all(np.diff(sep) > 0)) and sep_growth > width_change

    pos = np.linspace(0.0, 20e-6, 21)
    hp = [exact_peaks(*branch_at(base, 10.7, r)) for r in pos]
    g_minus = np.array([pk.gamma_minus for pk in hp])
    hp_sep = np.array([pk.splitting for pk in hp])
    ok_width = bool(np.all(np.diff(g_minus) > 0)) and (g_minus[-1] - g_minus[0]) > abs(hp_sep[-1] - hp_sep[0])

    unstable = [not branch_at(base, 10.7, r)[1].stable for r in (-9e-6, -12e-6)]
    ok = ok_sep and ok_width and all(unstable)
    record(
        5, "fig3 peak trends", ok,
        f"6.9 mW separation {sep[0] / base.omega_m:.4f} -> {sep[-1] / base.omega_m:.4f} omega_m "
        f"(widths move <= {width_change / base.omega_m:.4f}); 10.7 mW Gamma_- {g_minus[0] / base.omega_m:.4f} -> "
        f"{g_minus[-1] / base.omega_m:.4f}; 10.7 mW unstable at -9e-6, -12e-6: {all(unstable)}",
    )
    assert ok


def test_criterion_6_fig4_coupling(base):
    _, neg = branch_at(base, 7.6, -12e-6)
    _, pos = branch_at(base, 7.6, 20e-6)
    ratio = effective_coupling(neg) / effective_coupling(pos)
    p_inst = instability_power(overrides={"g_q_ratio": -12e-6})

    _, rows, _ = run_figure("fig4")
    per_curve = {}
    for r in rows:
        if not r["stable"] or r["resolved"] is None:
            continue
        hits = per_curve.setdefault(r["gq_ratio"], [0, 0])
        hits[0] += r["threshold"] == r["resolved"]
        hits[1] += 1
    agree = sum(h[0] for h in per_curve.values())
    total = sum(h[1] for h in per_curve.values())
    consistency = agree / total

    ok_ratio = abs(ratio - 3.0) <= 0.6
    ok_power = p_inst is not None and abs(p_inst - 7.6) <= 0.5
    ok_consistency = consistency >= 0.9
    ok = ok_ratio and ok_power and ok_consistency
    detail = ", ".join(f"{k:+.1e}: {h[0]}/{h[1]}" for k, h in sorted(per_curve.items()))
    record(
        6, "fig4 coupling", ok,
        f"ratio at 7.6 mW {ratio:.3f}; instability at {p_inst:.3f} mW; threshold/resolved agreement "
        f"{consistency:.1%} ({detail})",
    )
    assert ok_ratio
    assert ok_power
    assert ok_consistency, "threshold crossing and resolvability disagree on too many powers"


def test_criterion_7_fig5_photon_number(base):
    _, rows, _ = run_figure("fig5")
    at = [(r["gq_ratio"], r["photon_number"]) for r in rows if r["power_mw"] == 6.9]
    ratios, photons = map(np.array, zip(*at))
    decreasing = bool(np.all(np.diff(photons) < 0))
    i_neg = operating_branch(solve_steady_states(base.with_ratio(-9e-6), drive_at(base, 6.9))).intensity
    i_pos = operating_branch(solve_steady_states(base.with_ratio(9e-6), drive_at(base, 6.9))).intensity
    ok = decreasing and i_neg / i_pos > 1 and len(ratios) == 33
    record(
        7, "fig5 photon number", ok,
        f"strictly decreasing over {len(ratios)} ratios: {decreasing}; I(-9e-6)/I(+9e-6) = {i_neg / i_pos:.4f}",
    )
    assert ok


def test_criterion_8_limits(base):
    empty = base._replace(g_l=0.0)
    worst = 0.0
    for power, det in ((0.5, 1.0), (6.9, 1.0), (12.0, -0.7), (3.0, 0.0)):
        d = drive_at(empty, power, det)
        (b,) = solve_steady_states(empty, d)
        expected = drive_amplitude(empty, d) ** 2 / (empty.kappa**2 + d.detuning**2)
        worst = max(worst, abs(b.intensity / expected - 1))

    (b,) = solve_steady_states(empty, drive_at(empty, 6.9))
    wm, gm = base.omega_m, base.gamma_m

    def density(w):
        return float(s_xx_analytic(empty, b, w))

    res = minimize_scalar(lambda w: -density(w), bounds=(wm - 5 * gm, wm + 5 * gm), method="bounded",
                          options={"xatol": 1e-6 * gm})
    center, peak = res.x, density(res.x)
    lo = brentq(lambda w: density(w) - peak / 2, wm - 10 * gm, center)
    hi = brentq(lambda w: density(w) - peak / 2, center, wm + 10 * gm)
    fwhm = hi - lo
    ok = worst <= 1e-12 and abs(center / wm - 1) < 1e-3 and abs(fwhm / gm - 1) < 1e-3
    record(
        8, "decoupled limits", ok,
        f"empty-cavity I rel err {worst:.1e}; Lorentzian centre {center / wm:.8f} omega_m, FWHM {fwhm / gm:.6f} gamma_m",
    )
    assert ok


def test_criterion_9_peak_formula_accuracy(base):
    worst, where = 0.0, None
    points = [(6.9, r) for r in np.linspace(-9e-6, 9e-6, 19)]
    points += [(power, r) for power in (6.9, 10.7) for r in np.linspace(-12e-6, 20e-6, 33)]
    checked = 0
    for power, r in points:
        p, b = branch_at(base, power, r)
        if not b.stable:
            continue
        pk = exact_peaks(p, b)
        wp, wm_ = approx_peaks(p, b)
        err = max(abs(wp - pk.omega_plus), abs(wm_ - pk.omega_minus)) / p.omega_m
        checked += 1
        if err > worst:
            worst, where = err, (power, r)
    ok = worst < 1e-2
    record(
        9, "closed-form peak positions vs exact roots", ok,
        f"max error {worst:.2%} of omega_m over {checked} stable points (worst at {where[0]} mW, g_q/g_l={where[1]:.1e})",
    )
    assert ok, "the closed form neglects terms of order (kappa/omega_m)**2, which is ~5% here"
