"""Two-stage channel model for waveguide-fed pinching links.

A link gain is the product of the in-waveguide propagation gain (exponential
amplitude decay plus guided-wavelength phase) and the free-space spherical
wave gain from the radiating point to the user.  All functions here are pure.
"""

from __future__ import annotations

import math

import numpy as np

from .config import Point3, SystemConfig, WaveguideLayout

__all__ = [
    "in_waveguide_gain",
    "free_space_gain",
    "channel_single",
    "channel_array",
    "channel_multi_waveguide",
    "rate_from_snr",
]

TWO_PI = 2.0 * math.pi


def in_waveguide_gain(x_wg: float, cfg: SystemConfig) -> complex:
    """Gain accumulated over x_wg meters of waveguide:
    exp(-alpha*x) * exp(-j*2*pi*x/lambda_g)."""
    if x_wg < 0:
        raise ValueError("in-waveguide distance must be non-negative")
    return math.exp(-cfg.alpha * x_wg) * complex(
        math.cos(TWO_PI * x_wg / cfg.guided_wavelength),
        -math.sin(TWO_PI * x_wg / cfg.guided_wavelength),
    )


def free_space_gain(antenna: Point3, user: Point3, cfg: SystemConfig) -> complex:
    """Spherical-wave gain sqrt(eta) * exp(-j*2*pi*d/lambda) / d."""
    d = antenna.distance_to(user)
    if d == 0.0:
        raise ValueError("antenna and user coincide; free-space gain is singular")
    phase = TWO_PI * d / cfg.wavelength
    return math.sqrt(cfg.eta) / d * complex(math.cos(phase), -math.sin(phase))


def channel_single(
    x_wg: float,
    user: Point3,
    cfg: SystemConfig,
    include_attenuation: bool = True,
    y_offset: float = 0.0,
) -> complex:
    """End-to-end gain for one pinch at position x_wg on a waveguide with the
    given y-offset.  With include_attenuation off the exp(-alpha*x) magnitude
    factor is dropped; the phase is unchanged."""
    if x_wg < 0:
        raise ValueError("pinch position must be non-negative")
    antenna = Point3(x_wg, y_offset, cfg.d_v)
    g = in_waveguide_gain(x_wg, cfg) * free_space_gain(antenna, user, cfg)
    if not include_attenuation:
        g *= math.exp(cfg.alpha * x_wg)
    return g


def channel_array(
    positions,
    user: Point3,
    cfg: SystemConfig,
    include_attenuation: bool = True,
    y_offset: float = 0.0,
) -> complex:
    """Coherent sum of the per-pinch gains for an array on one waveguide.

    Positions must be strictly increasing.  The free-space phase of each term
    uses the Euclidean antenna-user distance.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 1 or positions.size == 0:
        raise ValueError("positions must be a non-empty 1-D sequence")
    if positions.size > 1 and np.any(np.diff(positions) <= 0):
        raise ValueError("pinch positions must be strictly increasing")
    return complex(
        sum(
            channel_single(float(x), user, cfg, include_attenuation, y_offset)
            for x in positions
        )
    )


def channel_multi_waveguide(
    layout: WaveguideLayout,
    positions_per_waveguide,
    user: Point3,
    cfg: SystemConfig,
    include_attenuation: bool = True,
) -> np.ndarray:
    """Per-waveguide effective gains; entry p is the coherent sum over the
    pinches on waveguide p, using that waveguide's y-offset."""
    if len(positions_per_waveguide) != layout.count:
        raise ValueError("one position list per waveguide is required")
    offsets = layout.y_offsets()
    gains = [
        channel_array(pos, user, cfg, include_attenuation, y_offset=float(yp))
        for pos, yp in zip(positions_per_waveguide, offsets)
    ]
    return np.array(gains, dtype=complex)


def rate_from_snr(snr) -> float:
    """Spectral efficiency log2(1 + snr) [bps/Hz]."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("SNR must be non-negative")
    out = np.log2(1.0 + snr)
    return float(out) if out.ndim == 0 else out
