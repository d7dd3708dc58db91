"""Close-in (CI) free-space reference distance path-loss model.

The model is a single-slope line anchored at the free-space loss over a
reference distance d0:

    PL(d) = FSPL(fc, d0) + 10 * n * log10(d / d0) + X_sigma

where n is the path-loss exponent (PLE) and X_sigma is zero-mean Gaussian
shadow fading with standard deviation sigma (dB).  Fitting minimizes the
mean squared residual, which has a closed form for the through-origin
line: n = sum(A*D) / sum(D^2) with A = PL - FSPL(fc, d0) and
D = 10*log10(d/d0).

Convention notes:
- sigma is the population RMS of the fit residuals (divisor N).  Users
  comparing against an N-1 convention will see slightly larger values
  there for small N.
- The residual mean is not forced to zero; the through-origin fit only
  guarantees |mean| <= sigma.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT


@dataclass(frozen=True)
class CiParams:
    """Deterministic part of the CI model."""

    fc_hz: float   # carrier frequency
    d0_m: float    # free-space reference distance
    n: float       # path-loss exponent

    def __post_init__(self):
        if self.fc_hz <= 0:
            raise ValueError(f"fc_hz must be positive, got {self.fc_hz}")
        if self.d0_m <= 0:
            raise ValueError(f"d0_m must be positive, got {self.d0_m}")
        if not 0 < self.n < 10:
            raise ValueError(f"path-loss exponent out of sane range (0, 10): {self.n}")


@dataclass(frozen=True)
class CiFit:
    """Result of fitting the CI model to a path-loss series."""

    params: CiParams
    sigma_db: float                  # population RMS of residuals
    num_points: int
    residuals_db: tuple[float, ...] = field(repr=False)

    def __post_init__(self):
        res = np.asarray(self.residuals_db, dtype=float)
        rms = math.sqrt(float(np.mean(res**2))) if res.size else 0.0
        if abs(rms - self.sigma_db) > 1e-9:
            raise ValueError(
                f"sigma_db {self.sigma_db} does not equal residual RMS {rms}"
            )
        # |mean| <= rms always holds; the epsilon absorbs float rounding.
        if res.size and abs(float(np.mean(res))) > self.sigma_db + 1e-9:
            raise ValueError("residual mean exceeds sigma_db")


def fspl(fc_hz: float, d_m):
    """Free-space (Friis) path loss in dB between isotropic antennas.

    Args:
        fc_hz: Carrier frequency in Hz.
        d_m: Distance in meters (scalar or array).

    Returns:
        20*log10(4*pi*d*fc/c) in dB, same shape as d_m.
    """
    d = np.asarray(d_m, dtype=float)
    if fc_hz <= 0:
        raise ValueError(f"fc_hz must be positive, got {fc_hz}")
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    out = 20.0 * np.log10(4.0 * np.pi * d * fc_hz / SPEED_OF_LIGHT)
    return float(out) if np.isscalar(d_m) else out


def ci_predict(params: CiParams, d_m):
    """Mean CI path loss in dB at distance d_m (no shadowing term).

    Args:
        params: Model parameters (fc, d0, n).
        d_m: Distance in meters, scalar or array; must be >= d0.
    """
    d = np.asarray(d_m, dtype=float)
    if np.any(d < params.d0_m):
        raise ValueError(f"distance below reference distance {params.d0_m} m")
    out = fspl(params.fc_hz, params.d0_m) + 10.0 * params.n * np.log10(d / params.d0_m)
    return float(out) if np.isscalar(d_m) else out


def fit_ci(series, fc_hz: float = 142e9, d0_m: float = 1.0) -> CiFit:
    """Closed-form MMSE fit of the path-loss exponent and shadowing std.

    Args:
        series: PathLossSeries (or anything with .points of
            (distance_m, pathloss_db) pairs).
        fc_hz: Carrier frequency anchoring FSPL(fc, d0).
        d0_m: Reference distance; all series distances must be >= d0_m.

    Returns:
        CiFit with n = sum(A*D)/sum(D^2), residuals A - n*D, and
        sigma_db = sqrt(mean(residual^2)) (divisor N).

    Raises:
        ValueError: fewer than 2 points, a distance below d0, or all
            distances equal to d0 (slope is then unconstrained).
    """
    points = getattr(series, "points", series)
    dist = np.asarray([p[0] for p in points], dtype=float)
    pl = np.asarray([p[1] for p in points], dtype=float)
    if dist.size < 2:
        raise ValueError(f"need at least 2 points to fit, got {dist.size}")
    if np.any(dist < d0_m):
        raise ValueError(f"all distances must be >= d0 ({d0_m} m)")

    big_d = 10.0 * np.log10(dist / d0_m)
    big_a = pl - fspl(fc_hz, d0_m)
    denom = float(np.sum(big_d**2))
    if denom == 0.0:
        raise ValueError("all distances equal d0; path-loss exponent is undetermined")
    n = float(np.sum(big_a * big_d)) / denom
    residuals = big_a - n * big_d
    sigma = math.sqrt(float(np.mean(residuals**2)))
    return CiFit(
        params=CiParams(fc_hz=fc_hz, d0_m=d0_m, n=n),
        sigma_db=sigma,
        num_points=int(dist.size),
        residuals_db=tuple(float(r) for r in residuals),
    )


def residual_stats(fit: CiFit) -> tuple[float, float, float]:
    """Summary of fit residuals: (mean, RMS-about-zero, max |residual|).

    The second value uses divisor N about zero, so it equals sigma_db.
    """
    res = np.asarray(fit.residuals_db, dtype=float)
    if res.size == 0:
        raise ValueError("fit has no residuals")
    mean = float(np.mean(res))
    rms = math.sqrt(float(np.mean(res**2)))
    return mean, rms, float(np.max(np.abs(res)))
