"""Single-point reports, parameter sweeps and figure datasets.

Every sweep point follows the lowest-intensity steady state (the branch
reached by ramping the pump up from zero).  Points where that branch is
unstable, or where no steady state exists, still produce a row: the
stability columns are filled in and every other numeric column is left
blank.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .dynamics import StabilityReport, routh_hurwitz
from .errors import ConfigError, NoSteadyStateError, PeakClassificationError
from .params import apply_overrides, config_to_objects, load_config
from .peaks import NmsPeaks, exact_peaks, nms_threshold, nms_threshold_value
from .spectrum import SpectrumMethod, s_xx
from .steady_state import SteadyStateBranch, effective_coupling, operating_branch, solve_steady_states

AXIS_KEYS = {
    "power_mw": "power_mw",
    "gq_ratio": "g_q_ratio",
    "detuning_over_omega_m": "detuning_over_omega_m",
    "omega_over_omega_m": None,  # spectral frequency, not a config key
}
OUTPUTS = ("steady_state", "stability", "spectrum", "peaks", "photon_number", "effective_coupling")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_KEYS:
            raise ConfigError(f"unknown axis {self.name!r}; valid axes: {', '.join(AXIS_KEYS)}")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError(f"axis {self.name!r} needs at least 2 points")

    @property
    def values(self) -> np.ndarray:
        v = np.linspace(self.min, self.max, int(self.points))
        # linspace leaves ~1e-21 where the grid crosses zero; make it exact
        v[np.abs(v) <= 1e-12 * max(abs(self.min), abs(self.max))] = 0.0
        return v


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    outputs: tuple[str, ...] = ("stability",)

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ConfigError("sweep axes must be distinct")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad or not self.outputs:
            raise ConfigError(f"unknown output(s) {bad}; valid outputs: {', '.join(OUTPUTS)}")
        has_omega = "omega_over_omega_m" in self.axis_names
        if has_omega != ("spectrum" in self.outputs):
            raise ConfigError("the spectrum output requires an omega_over_omega_m axis and vice versa")

    @property
    def axes(self) -> tuple[SweepAxis, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)


@dataclass
class PointResult:
    """Everything computed at one operating point."""

    config: dict[str, float]
    branches: list[SteadyStateBranch] = field(default_factory=list)
    operating: SteadyStateBranch | None = None
    stability: StabilityReport | None = None
    peaks: NmsPeaks | None = None
    coupling: float | None = None
    threshold: bool | None = None
    error: str | None = None

    @property
    def stable(self) -> bool:
        return self.stability is not None and self.stability.eig_stable


def evaluate_point(config: Mapping[str, float]) -> PointResult:
    """Solve, assess and analyse the operating branch for one config."""
    params, drive = config_to_objects(config)
    result = PointResult(config=dict(config))
    try:
        result.branches = solve_steady_states(params, drive)
    except NoSteadyStateError as exc:
        result.error = str(exc)
        return result
    branch = operating_branch(result.branches)
    result.operating = branch
    result.stability = routh_hurwitz(params, branch)
    result.coupling = effective_coupling(branch)
    result.threshold = nms_threshold(params, branch)
    if result.stable and branch.intensity > 0:
        try:
            result.peaks = exact_peaks(params, branch)
        except PeakClassificationError as exc:
            result.error = str(exc)
    return result


# --- single point ----------------------------------------------------------


def run_point(source=None, overrides=None) -> dict[str, Any]:
    """JSON-ready report for one operating point."""
    config = apply_overrides(load_config(source), overrides or {})
    res = evaluate_point(config)
    params, _ = config_to_objects(config)
    report = {
        "config": config,
        "branches": [],
        "operating_branch": None,
        "stable": res.stable,
        "peaks": res.peaks.to_dict() if res.peaks else None,
        "effective_coupling": res.coupling,
        "threshold_value": nms_threshold_value(params),
        "threshold": res.threshold,
        "error": res.error,
    }
    for i, b in enumerate(res.branches):
        record = b.to_dict()
        record["stability"] = routh_hurwitz(params, b).to_dict()
        report["branches"].append(record)
        if b is res.operating:
            report["operating_branch"] = i
    return report


# --- sweeps ----------------------------------------------------------------

_OUTPUT_COLUMNS = {
    "steady_state": ["n_branches", "x_s", "delta_eff", "omega_m_eff", "g_eff", "spring_ratio"],
    "stability": ["rh_stable", "eig_stable", "max_re_eigenvalue"],
    "photon_number": ["photon_number"],
    "effective_coupling": ["effective_coupling", "threshold"],
    "peaks": ["omega_plus", "omega_minus", "gamma_plus", "gamma_minus", "resolved", "g_eff", "threshold"],
    "spectrum": ["s_xx", "method"],
}


def sweep_columns(spec: SweepSpec, oracle: bool = False) -> list[str]:
    cols = list(spec.axis_names)
    if "stability" not in spec.outputs:
        cols.append("stable")
    for out in OUTPUTS:
        if out in spec.outputs:
            for c in _OUTPUT_COLUMNS[out]:
                if c not in cols:
                    cols.append(c)
    if oracle and "spectrum" in spec.outputs:
        cols.append("s_xx_oracle")
    return cols


def _point_row(res: PointResult, outputs: Sequence[str]) -> dict[str, Any]:
    row: dict[str, Any] = {"stable": res.stable}
    if "stability" in outputs and res.stability is not None:
        row.update(
            rh_stable=res.stability.rh_stable,
            eig_stable=res.stability.eig_stable,
            max_re_eigenvalue=res.stability.max_re_eigenvalue,
        )
    elif "stability" in outputs:
        row.update(rh_stable=False, eig_stable=False)
    if not res.stable:
        return row
    b = res.operating
    if "steady_state" in outputs:
        row.update(
            n_branches=len(res.branches),
            x_s=b.x_s,
            delta_eff=b.delta_eff,
            omega_m_eff=b.omega_m_eff,
            g_eff=b.g_eff,
            spring_ratio=b.spring_ratio,
        )
    if "photon_number" in outputs:
        row["photon_number"] = b.intensity
    if "effective_coupling" in outputs:
        row.update(effective_coupling=res.coupling, threshold=res.threshold)
    if "peaks" in outputs:
        row["threshold"] = res.threshold
        row["g_eff"] = res.coupling
        if res.peaks is not None:
            row.update(
                omega_plus=res.peaks.omega_plus,
                omega_minus=res.peaks.omega_minus,
                gamma_plus=res.peaks.gamma_plus,
                gamma_minus=res.peaks.gamma_minus,
                resolved=res.peaks.resolved,
            )
    return row


def _map(fn, items, workers):
    items = list(items)
    if workers and workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))  # map preserves input order
    return [fn(i) for i in items]


def run_sweep(
    spec: SweepSpec,
    source=None,
    overrides=None,
    *,
    method: SpectrumMethod | str = SpectrumMethod.ANALYTIC_CORRECTED,
    oracle: bool = False,
    workers: int = 1,
) -> tuple[list[str], list[dict[str, Any]]]:
    """Evaluate a 1D/2D sweep.  Rows are ordered with axis1 outermost."""
    base = apply_overrides(load_config(source), overrides or {})
    method = SpectrumMethod(method)
    point_axes = [a for a in spec.axes if AXIS_KEYS[a.name] is not None]
    omega_axis = next((a for a in spec.axes if AXIS_KEYS[a.name] is None), None)

    point_keys = list(itertools.product(*(a.values for a in point_axes)))

    def configure(values):
        cfg = dict(base)
        for axis, v in zip(point_axes, values):
            cfg[AXIS_KEYS[axis.name]] = float(v)
        return apply_overrides(cfg, {})

    configs = [configure(k) for k in point_keys]
    results = _map(evaluate_point, configs, workers)
    by_key = dict(zip(point_keys, results))

    spectra = {}
    if omega_axis is not None:
        for key, res in by_key.items():
            if res.stable:
                params, _ = config_to_objects(res.config)
                w = omega_axis.values * params.omega_m
                spectra[key] = (
                    np.asarray(s_xx(params, res.operating, w, method), dtype=float),
                    np.asarray(s_xx(params, res.operating, w, SpectrumMethod.MATRIX_ORACLE), dtype=float)
                    if oracle
                    else None,
                )

    columns = sweep_columns(spec, oracle)
    rows = []
    for combo in itertools.product(*(enumerate(a.values) for a in spec.axes)):
        row = {}
        key = []
        omega_index = None
        for axis, (i, v) in zip(spec.axes, combo):
            row[axis.name] = float(v)
            if AXIS_KEYS[axis.name] is None:
                omega_index = i
            else:
                key.append(v)
        res = by_key[tuple(key)]
        row.update(_point_row(res, spec.outputs))
        if omega_index is not None:
            row["method"] = method.value
            if res.stable:
                values, oracle_values = spectra[tuple(key)]
                row["s_xx"] = float(values[omega_index])
                if oracle_values is not None:
                    row["s_xx_oracle"] = float(oracle_values[omega_index])
        rows.append(row)
    return columns, rows


def instability_power(
    source=None, overrides=None, lo_mw: float = 0.0, hi_mw: float = 12.0, tol_mw: float = 1e-4
) -> float | None:
    """Lowest pump power [mW] at which the operating branch becomes unstable.

    Scans ``[lo_mw, hi_mw]`` coarsely and bisects the first stable->unstable
    transition.  ``None`` if the branch stays stable throughout.
    """
    base = apply_overrides(load_config(source), overrides or {})

    def stable(p_mw):
        return evaluate_point(apply_overrides(base, {"power_mw": p_mw})).stable

    grid = np.linspace(lo_mw, hi_mw, 241)
    prev = grid[0]
    if not stable(prev):
        return float(prev)
    for p in grid[1:]:
        if not stable(p):
            lo, hi = prev, p
            while hi - lo > tol_mw:
                mid = 0.5 * (lo + hi)
                lo, hi = (mid, hi) if stable(mid) else (lo, mid)
            return float(0.5 * (lo + hi))
        prev = p
    return None


# --- figures ---------------------------------------------------------------

FIGURES = ("fig2a", "fig2b", "fig3", "fig4", "fig5")
FIG_POWERS_MW = (6.9, 10.7)
FIG4_RATIOS = (-12e-6, 0.0, 20e-6)


def _spectrum_surface(source, power_mw, omega_range, points, ratio_points, method, oracle, workers):
    spec = SweepSpec(
        axis1=SweepAxis("gq_ratio", -9e-6, 9e-6, ratio_points),
        axis2=SweepAxis("omega_over_omega_m", omega_range[0], omega_range[1], points),
        outputs=("spectrum",),
    )
    return run_sweep(
        spec, source, {"power_mw": power_mw, "detuning_over_omega_m": 1.0},
        method=method, oracle=oracle, workers=workers,
    )


def _normalized_peaks(source, power_mw, ratio_points, workers):
    spec = SweepSpec(axis1=SweepAxis("gq_ratio", -12e-6, 20e-6, ratio_points), outputs=("peaks",))
    _, rows = run_sweep(
        spec, source, {"power_mw": power_mw, "detuning_over_omega_m": 1.0}, workers=workers
    )
    wm = config_to_objects(load_config(source))[0].omega_m
    out = []
    for r in rows:
        rec = {"power_mw": power_mw, "gq_ratio": r["gq_ratio"], "stable": r["stable"]}
        for name in ("omega_plus", "omega_minus", "gamma_plus", "gamma_minus"):
            rec[f"{name}_over_omega_m"] = r[name] / wm if name in r else None
        rec["resolved"] = r.get("resolved")
        out.append(rec)
    return out


def run_figure(
    figure_id: str,
    source=None,
    *,
    method: SpectrumMethod | str = SpectrumMethod.ANALYTIC_CORRECTED,
    oracle: bool = False,
    workers: int = 1,
    omega_range: tuple[float, float] = (0.5, 1.5),
    omega_points: int = 4001,
    ratio_points: int | None = None,
) -> tuple[list[str], list[dict[str, Any]], dict[str, Any]]:
    """Dataset behind one figure: ``(columns, rows, extra_metadata)``."""
    if figure_id not in FIGURES:
        raise ConfigError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}")
    extra: dict[str, Any] = {}
    if figure_id in ("fig2a", "fig2b"):
        power = FIG_POWERS_MW[0] if figure_id == "fig2a" else FIG_POWERS_MW[1]
        cols, rows = _spectrum_surface(
            source, power, omega_range, omega_points, ratio_points or 19, method, oracle, workers
        )
        extra["power_mw"] = power
        return cols, rows, extra
    if figure_id == "fig3":
        rows = []
        for power in FIG_POWERS_MW:
            rows += _normalized_peaks(source, power, ratio_points or 33, workers)
        cols = [
            "power_mw", "gq_ratio", "stable",
            "omega_plus_over_omega_m", "omega_minus_over_omega_m",
            "gamma_plus_over_omega_m", "gamma_minus_over_omega_m", "resolved",
        ]
        return cols, rows, extra
    if figure_id == "fig4":
        params, _ = config_to_objects(load_config(source))
        thr = nms_threshold_value(params)
        rows = []
        truncation = {}
        for ratio in FIG4_RATIOS:
            over = {"g_q_ratio": ratio, "detuning_over_omega_m": 1.0}
            spec = SweepSpec(
                axis1=SweepAxis("power_mw", 0.1, 12.0, ratio_points or 120),
                outputs=("effective_coupling", "peaks"),
            )
            _, sweep_rows = run_sweep(spec, source, over, workers=workers)
            truncation[repr(ratio)] = instability_power(source, over)
            for r in sweep_rows:
                rows.append({
                    "gq_ratio": ratio,
                    "power_mw": r["power_mw"],
                    "stable": r["stable"],
                    "effective_coupling": r.get("effective_coupling"),
                    "threshold_value": thr,
                    "threshold": r.get("threshold"),
                    "resolved": r.get("resolved"),
                })
        extra["instability_power_mw"] = truncation
        cols = ["gq_ratio", "power_mw", "stable", "effective_coupling", "threshold_value", "threshold", "resolved"]
        return cols, rows, extra
    # fig5
    rows = []
    for power in FIG_POWERS_MW:
        spec = SweepSpec(axis1=SweepAxis("gq_ratio", -12e-6, 20e-6, ratio_points or 33), outputs=("photon_number",))
        _, sweep_rows = run_sweep(
            spec, source, {"power_mw": power, "detuning_over_omega_m": 1.0}, workers=workers
        )
        for r in sweep_rows:
            rows.append({"power_mw": power, "gq_ratio": r["gq_ratio"], "stable": r["stable"],
                         "photon_number": r.get("photon_number")})
    return ["power_mw", "gq_ratio", "stable", "photon_number"], rows, extra


# --- output ------------------------------------------------------------------


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    if value == 0.0:
        return "0"
    return f"{value:.12g}"


def to_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def params_hash(config: Mapping[str, float]) -> str:
    blob = json.dumps(dict(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def git_revision() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 else "unknown"


def write_dataset(out_dir, name, columns, rows, metadata) -> Path:
    """Write ``<name>.csv`` and its ``<name>.meta.json`` sidecar; return the CSV path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    csv_path.write_text(to_csv(columns, rows), encoding="utf-8")
    meta = {"columns": list(columns), "rows": len(rows), "version": __version__}
    meta.update(metadata)
    meta.setdefault("git_revision", git_revision())
    (out_dir / f"{name}.meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2, default=str) + "\n", encoding="utf-8"
    )
    return csv_path
