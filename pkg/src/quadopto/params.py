"""Physical parameters, unit conventions and derived scalars.

All frequencies are stored as angular frequencies in rad/s.  The ``from_hz``
constructors and the JSON config loader accept ordinary frequencies
(``f = omega / 2 pi``) because that is how cavity and oscillator data are
usually tabulated.

Positions and momenta of the oscillator are dimensionless (in units of the
zero-point spread), and the intracavity field is in photon-amplitude units, so
``|a_s|**2`` is the mean photon number.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .constants import BOLTZMANN, HBAR, SPEED_OF_LIGHT, TWO_PI
from .errors import ConfigError


@dataclass(frozen=True)
class SystemParams:
    """Fixed constants of the cavity + mechanical oscillator.

    Attributes
    ----------
    kappa : float
        Cavity amplitude decay rate [rad/s].
    omega_m : float
        Bare mechanical frequency [rad/s].
    gamma_m : float
        Mechanical damping rate [rad/s].
    mass : float
        Effective oscillator mass [kg]. Only carried for bookkeeping; the
        couplings already absorb it.
    g_l : float
        Linear optomechanical coupling [rad/s].
    g_q_ratio : float
        Quadratic coupling expressed as ``g_q / g_l``.
    omega_p : float
        Pump laser angular frequency [rad/s].
    temperature : float
        Bath temperature [K].
    """

    kappa: float
    omega_m: float
    gamma_m: float
    mass: float
    g_l: float
    g_q_ratio: float
    omega_p: float
    temperature: float

    def __post_init__(self):
        for name in ("kappa", "omega_m", "gamma_m", "mass", "omega_p"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")
        for name in ("g_l", "g_q_ratio"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.resolved_sideband:
            warnings.warn(
                f"not in the resolved-sideband regime: omega_m/kappa = {self.omega_m / self.kappa:.3g}",
                stacklevel=3,
            )

    @property
    def g_q(self) -> float:
        """Quadratic coupling in rad/s."""
        return self.g_q_ratio * self.g_l

    @property
    def resolved_sideband(self) -> bool:
        return self.omega_m > self.kappa

    @property
    def wavelength(self) -> float:
        """Pump wavelength in metres."""
        return TWO_PI * SPEED_OF_LIGHT / self.omega_p

    @classmethod
    def from_hz(
        cls,
        kappa_hz,
        omega_m_hz,
        gamma_m_hz,
        mass_kg,
        g_l_hz,
        g_q_ratio,
        wavelength_nm,
        temperature_k,
    ) -> "SystemParams":
        return cls(
            kappa=TWO_PI * kappa_hz,
            omega_m=TWO_PI * omega_m_hz,
            gamma_m=TWO_PI * gamma_m_hz,
            mass=mass_kg,
            g_l=TWO_PI * g_l_hz,
            g_q_ratio=g_q_ratio,
            omega_p=TWO_PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9),
            temperature=temperature_k,
        )

    def to_hz(self) -> dict[str, float]:
        return {
            "kappa_hz": self.kappa / TWO_PI,
            "omega_m_hz": self.omega_m / TWO_PI,
            "gamma_m_hz": self.gamma_m / TWO_PI,
            "mass_kg": self.mass,
            "g_l_hz": self.g_l / TWO_PI,
            "g_q_ratio": self.g_q_ratio,
            "wavelength_nm": self.wavelength * 1e9,
            "temperature_k": self.temperature,
        }

    def with_ratio(self, g_q_ratio: float) -> "SystemParams":
        return self._replace(g_q_ratio=g_q_ratio)

    def _replace(self, **changes) -> "SystemParams":
        fields = asdict(self)
        fields.update(changes)
        with warnings.catch_warnings():
            # The regime warning was already issued for the original object.
            warnings.simplefilter("ignore")
            return SystemParams(**fields)


@dataclass(frozen=True)
class DriveConfig:
    """Operating point: pump power [W] and detuning ``omega_c - omega_p`` [rad/s]."""

    power: float
    detuning: float

    def __post_init__(self):
        if not (self.power >= 0 and math.isfinite(self.power)):
            raise ValueError(f"power must be >= 0, got {self.power!r}")
        if not math.isfinite(self.detuning):
            raise ValueError("detuning must be finite")


class CothConvention(enum.Enum):
    """Argument of the thermal ``coth``: ``hbar w / 2 kB T`` (HALF) or ``hbar w / kB T`` (FULL)."""

    HALF = "half"
    FULL = "full"


@dataclass(frozen=True)
class NoiseModel:
    n_a: float
    n_m_proxy: float
    temperature: float
    coth_argument_convention: CothConvention = CothConvention.HALF

    def omega_coth(self, omega):
        """``omega * coth(hbar omega / (c kB T))`` with c = 2 (HALF) or 1 (FULL).

        Even in omega.  Tends to ``c kB T / hbar`` as omega -> 0 and to
        ``|omega|`` as T -> 0.
        """
        omega = np.asarray(omega, dtype=float)
        c = 2.0 if self.coth_argument_convention is CothConvention.HALF else 1.0
        w = np.abs(omega)
        if self.temperature == 0:
            return w
        thermal = c * BOLTZMANN * self.temperature / HBAR
        x = w / thermal
        out = np.empty_like(w)
        small = x < 1e-4
        # series x coth x = 1 + x^2/3 - x^4/45
        xs = x[small]
        out[small] = thermal * (1.0 + xs * xs / 3.0 - xs**4 / 45.0)
        xl = x[~small]
        out[~small] = w[~small] / np.tanh(xl)
        return out if out.ndim else float(out)


def drive_amplitude(params: SystemParams, drive: DriveConfig) -> float:
    """Pump amplitude ``sqrt(2 kappa P / (hbar omega_p))`` in s^-1."""
    if drive.power < 0:
        raise ValueError("power must be non-negative")
    return math.sqrt(2.0 * params.kappa * drive.power / (HBAR * params.omega_p))


def thermal_photon_number(params: SystemParams) -> float:
    # Bose-Einstein occupation at the optical frequency (omega_c ~ omega_p).
    if params.temperature == 0:
        return 0.0
    x = HBAR * params.omega_p / (BOLTZMANN * params.temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def noise_model(params: SystemParams, convention=CothConvention.HALF) -> NoiseModel:
    if params.temperature == 0:
        proxy = 0.0
    else:
        proxy = BOLTZMANN * params.temperature / (HBAR * params.omega_m)
    return NoiseModel(
        n_a=thermal_photon_number(params),
        n_m_proxy=proxy,
        temperature=params.temperature,
        coth_argument_convention=CothConvention(convention),
    )


# --- JSON configuration ----------------------------------------------------

PARAM_KEYS = (
    "kappa_hz",
    "omega_m_hz",
    "gamma_m_hz",
    "mass_kg",
    "g_l_hz",
    "g_q_ratio",
    "wavelength_nm",
    "temperature_k",
)
DRIVE_KEYS = ("power_mw", "detuning_over_omega_m")
CONFIG_KEYS = PARAM_KEYS + DRIVE_KEYS


def reference_config() -> dict[str, float]:
    """The bundled reference parameter set (``data/reference.json``)."""
    text = resources.files("quadopto").joinpath("data/reference.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_config(source: str | Path | Mapping[str, Any] | None = None) -> dict[str, float]:
    """Read and validate a config; ``None`` gives the bundled reference set."""
    if source is None:
        raw = reference_config()
    elif isinstance(source, Mapping):
        raw = dict(source)
    else:
        path = Path(source)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must contain a JSON object")
    return validate_config(raw)


def validate_config(raw: Mapping[str, Any]) -> dict[str, float]:
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(
            f"unknown config key(s) {', '.join(unknown)}; valid keys: {', '.join(CONFIG_KEYS)}"
        )
    missing = [k for k in CONFIG_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(missing)}")
    config = {}
    for key in CONFIG_KEYS:
        value = raw[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"config key {key!r} must be finite")
        config[key] = float(value)
    try:
        config_to_objects(config)
    except ValueError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    return config


def apply_overrides(config: Mapping[str, float], overrides) -> dict[str, float]:
    """Return a copy of ``config`` with ``key=value`` strings or a mapping applied."""
    updated = dict(config)
    if isinstance(overrides, Mapping):
        items = list(overrides.items())
    else:
        items = []
        for item in overrides or ():
            key, sep, value = str(item).partition("=")
            if not sep:
                raise ConfigError(f"override {item!r} is not of the form key=value")
            items.append((key.strip(), value.strip()))
    for key, value in items:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown override key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}")
        try:
            updated[key] = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"override {key!r} must be a number, got {value!r}") from None
    return validate_config(updated)


def config_to_objects(config: Mapping[str, float]) -> tuple[SystemParams, DriveConfig]:
    params = SystemParams.from_hz(**{k: config[k] for k in PARAM_KEYS})
    drive = DriveConfig(
        power=config["power_mw"] * 1e-3,
        detuning=config["detuning_over_omega_m"] * params.omega_m,
    )
    return params, drive
