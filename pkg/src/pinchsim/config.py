"""System configuration and scene geometry.

All internal quantities are SI (Hz, m, W).  dB / dBm values are converted at
the configuration boundary and never appear inside the solvers.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "SystemConfig",
    "Point3",
    "WaveguideLayout",
    "Region",
    "BlockageModel",
    "dbm_to_watt",
    "watt_to_dbm",
    "db_to_linear",
    "default_config",
    "load_config",
    "ENV_PREFIX",
]

ENV_PREFIX = "PINCHSIM_"


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def watt_to_dbm(p_watt: float) -> float:
    return 10.0 * math.log10(p_watt / 1e-3)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Carrier / medium constants shared by every solver.

    Attributes
    ----------
    fc : carrier frequency [Hz]
    n_eff : effective refractive index of the waveguide core
    alpha : in-waveguide amplitude attenuation [1/m], decay exp(-alpha*x)
    d_v : waveguide deployment height [m]
    noise_power : receiver AWGN power [W]
    p_max : transmit power budget [W]
    """

    fc: float = 28e9
    n_eff: float = 1.4
    alpha: float = 0.0092
    d_v: float = 5.0
    noise_power: float = dbm_to_watt(-70.0)
    p_max: float = dbm_to_watt(30.0)

    def __post_init__(self):
        if self.fc <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.n_eff < 1:
            raise ValueError("effective refractive index must be >= 1")
        if self.alpha < 0:
            raise ValueError("attenuation coefficient must be non-negative")
        if self.d_v <= 0:
            raise ValueError("waveguide height must be positive")
        if self.noise_power <= 0 or self.p_max <= 0:
            raise ValueError("powers must be positive")
        # The two textual definitions of the Friis constant,
        # c^2/(4 pi fc)^2 and (lambda/(4 pi))^2, are algebraically identical;
        # assert that once here.
        eta_a = (SPEED_OF_LIGHT / (4.0 * math.pi * self.fc)) ** 2
        eta_b = (self.wavelength / (4.0 * math.pi)) ** 2
        assert abs(eta_a - eta_b) <= 1e-12 * eta_a

    @property
    def wavelength(self) -> float:
        """Free-space wavelength lambda = c/fc [m]."""
        return SPEED_OF_LIGHT / self.fc

    @property
    def guided_wavelength(self) -> float:
        """In-waveguide wavelength lambda_g = lambda/n_eff [m]."""
        return self.wavelength / self.n_eff

    @property
    def eta(self) -> float:
        """Friis constant (lambda/(4 pi))^2 [m^2]."""
        return (self.wavelength / (4.0 * math.pi)) ** 2

    @property
    def rho(self) -> float:
        """Transmit SNR P_max/sigma^2 (dimensionless)."""
        return self.p_max / self.noise_power

    def with_(self, **kwargs) -> "SystemConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Point3:
    """A point in 3-D space, coordinates in meters."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def distance_to(self, other: "Point3") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


@dataclass(frozen=True)
class Region:
    """Rectangular service region on the ground plane.

    The region spans x in [0, length] and y in [-width/2, width/2];
    square regions use length == width.
    """

    length: float
    width: float

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValueError("region dimensions must be positive")

    @classmethod
    def square(cls, side: float) -> "Region":
        return cls(side, side)

    def sample_users(self, n: int, rng: np.random.Generator) -> list[Point3]:
        xs = rng.uniform(0.0, self.length, n)
        ys = rng.uniform(-self.width / 2.0, self.width / 2.0, n)
        return [Point3(float(x), float(y), 0.0) for x, y in zip(xs, ys)]


@dataclass(frozen=True)
class WaveguideLayout:
    """P parallel waveguides at height d_v, evenly spread over a region of
    side D.  Waveguide p runs along x with y-offset (p-1)*d_h - D/2 and its
    feed point at x = 0.
    """

    count: int
    height: float
    region_side: float
    narrow_spacing: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("need at least one waveguide")
        if self.height <= 0 or self.region_side <= 0:
            raise ValueError("height and region side must be positive")

    @property
    def spacing(self) -> float:
        """Distance d_h between neighboring waveguides (0 for a single one)."""
        if self.count == 1:
            return 0.0
        return self.region_side / (self.count - 1)

    def y_offsets(self) -> np.ndarray:
        if self.count == 1:
            return np.zeros(1)
        return np.arange(self.count) * self.spacing - self.region_side / 2.0

    def feed_points(self) -> list[Point3]:
        return [Point3(0.0, float(y), self.height) for y in self.y_offsets()]

    def check_spacing(self, cfg: SystemConfig) -> bool:
        """True when d_h is large against the wavelength (model assumption
        d_h >> lambda); False flags a questionable layout."""
        if self.count == 1:
            return True
        return self.spacing > 10.0 * cfg.wavelength


@dataclass(frozen=True)
class BlockageModel:
    """Probabilistic LoS-blockage environment with density beta [1/m^2]."""

    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("blockage density must lie in (0, 1]")


def default_config() -> SystemConfig:
    """Baseline mmWave configuration (28 GHz, 30 dBm, -70 dBm noise)."""
    return SystemConfig()


_DB_KEYS = {"noise_power", "p_max"}


def _parse_value(key: str, value):
    """Accept plain SI numbers, or strings with a dB/dBm suffix for power
    quantities (e.g. "30 dBm")."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        low = text.lower()
        if low.endswith("dbm"):
            return dbm_to_watt(float(text[:-3]))
        if low.endswith("db"):
            return db_to_linear(float(text[:-2]))
        return float(text)
    raise ValueError(f"cannot interpret config value {value!r} for key {key!r}")


def load_config(path: str | None = None, env: dict | None = None) -> SystemConfig:
    """Build a SystemConfig from an optional TOML file plus environment
    overrides (PINCHSIM_<KEY>=value, same unit-suffix rules as the file)."""
    values: dict[str, float] = {}
    if path is not None:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        for key, value in raw.items():
            values[key] = _parse_value(key, value)
    env = os.environ if env is None else env
    for key, value in env.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX):].lower()
            values[name] = _parse_value(name, value)

    known = {"fc", "n_eff", "alpha", "d_v", "noise_power", "p_max"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SystemConfig(**values)
