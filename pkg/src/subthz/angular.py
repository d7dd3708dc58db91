"""Azimuth spread of arrival (ASA) over the strongest multipath components.

Per link, with phi_i the arrival azimuth and alpha_i the linear amplitude
of the i-th strongest MPC (amplitudes normalized to the strongest one;
the normalization cancels in both statistics):

    mu_ASA = sum(phi_i * alpha_i^2) / sum(alpha_i^2)
    S_A    = sqrt(sum((phi_i - mu_ASA)^2 * alpha_i^2) / sum(alpha_i^2))

Angles enter these formulas linearly, exactly as given -- no circular
statistics.  A link whose MPCs straddle the 0/360 wrap can therefore show
an inflated spread; pass unwrap=True to first map all angles into
(phi_1 - 180, phi_1 + 180] about the strongest MPC.  The default is the
literal linear form.

Aggregate statistics use the sample standard deviation (divisor N-1).
"""

import math
from dataclasses import dataclass

import numpy as np

from .campaign import DEFAULT_FLOOR_DB, LinkRecord, link_mpcs

MAX_ASA_MPCS = 3   # spreads are defined over the 3 strongest components


@dataclass(frozen=True)
class AsaSample:
    """Per-link angular statistics."""

    link_id: str
    mu_asa_deg: float
    s_a_deg: float
    distance_m: float
    condition: str

    def __post_init__(self):
        if self.s_a_deg < 0:
            raise ValueError("spread cannot be negative")
        if not 0.0 <= self.mu_asa_deg < 360.0:
            raise ValueError("mean angle must lie in [0, 360)")


@dataclass(frozen=True)
class AsaStats:
    """Aggregate of per-link spreads for one environment/condition cell."""

    mean_deg: float
    std_deg: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("aggregate needs at least one sample")
        if self.std_deg < 0:
            raise ValueError("std cannot be negative")


def _weights_and_angles(mpcs, unwrap: bool):
    """Squared normalized amplitudes and (optionally unwrapped) angles."""
    if not mpcs:
        raise ValueError("need at least one MPC")
    if len(mpcs) > MAX_ASA_MPCS:
        raise ValueError(f"angular spread is defined over at most {MAX_ASA_MPCS} MPCs")
    gains = np.asarray([m.gain_db for m in mpcs], dtype=float)
    phis = np.asarray([m.azimuth_deg for m in mpcs], dtype=float)
    # alpha_i = 10^(g_i/20) normalized to the strongest MPC; weights are
    # alpha_i^2.  Working relative to the peak keeps the weights finite.
    alpha = 10.0 ** ((gains - gains.max()) / 20.0)
    w = alpha**2
    total = float(w.sum())
    if total == 0.0:
        raise ValueError("all MPC amplitudes are zero")
    if unwrap:
        ref = phis[int(np.argmax(gains))]
        phis = ref + (phis - ref + 180.0) % 360.0 - 180.0
    return w / total, phis


def mu_asa(mpcs, unwrap: bool = False) -> float:
    """Amplitude-squared-weighted mean arrival azimuth in degrees."""
    w, phis = _weights_and_angles(mpcs, unwrap)
    return float(np.sum(phis * w))


def asa(mpcs, unwrap: bool = False) -> float:
    """Weighted RMS azimuth spread about mu_asa, in degrees."""
    w, phis = _weights_and_angles(mpcs, unwrap)
    mu = float(np.sum(phis * w))
    return math.sqrt(float(np.sum((phis - mu) ** 2 * w)))


def asa_sample(link: LinkRecord, floor_db: float = DEFAULT_FLOOR_DB,
               unwrap: bool = False) -> AsaSample:
    """Angular statistics of one link over its 3 strongest MPCs."""
    mpcs = link_mpcs(link, max_count=MAX_ASA_MPCS, floor_db=floor_db)
    return AsaSample(
        link_id=link.id,
        mu_asa_deg=mu_asa(mpcs, unwrap) % 360.0,
        s_a_deg=asa(mpcs, unwrap),
        distance_m=link.distance_m,
        condition=link.condition,
    )


def asa_samples(links, floor_db: float = DEFAULT_FLOOR_DB,
                unwrap: bool = False) -> list[AsaSample]:
    """Per-link angular statistics, ordered by link id."""
    return [asa_sample(link, floor_db=floor_db, unwrap=unwrap)
            for link in sorted(links, key=lambda li: li.id)]


def aggregate_asa(samples, environment: str, condition: str) -> AsaStats:
    """Mean and sample std (divisor N-1) of S_A over matching samples.

    Samples carry no environment field; `environment` labels the
    population and the caller is expected to pass samples drawn from
    campaigns of that environment.  Matching filters on condition.

    Raises:
        ValueError: no sample matches the condition.
    """
    spreads = [s.s_a_deg for s in samples if s.condition == condition]
    if not spreads:
        raise ValueError(
            f"no {condition} samples to aggregate for {environment} environment"
        )
    arr = np.asarray(spreads, dtype=float)
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return AsaStats(mean_deg=float(np.mean(arr)), std_deg=std, count=int(arr.size))


def asa_vs_distance(samples) -> list[tuple[float, float, float]]:
    """(distance, mu_ASA, S_A) rows sorted by distance (ties by link id)."""
    if not samples:
        raise ValueError("no samples")
    ordered = sorted(samples, key=lambda s: (s.distance_m, s.link_id))
    return [(s.distance_m, s.mu_asa_deg, s.s_a_deg) for s in ordered]
