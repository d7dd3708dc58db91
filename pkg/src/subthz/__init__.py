"""Sub-THz (140 GHz band) close-in path-loss modeling toolkit.

Fits the close-in free-space reference distance model to measurement
campaigns (directional, omnidirectional, and k-th strongest MPC
categories), computes azimuth-spread-of-arrival statistics, bundles the
fitted parameter tables of a published indoor/outdoor study, and
synthesizes shadowed channels, outage probabilities, and coverage grids.
"""

from .angular import (
    AsaSample,
    AsaStats,
    aggregate_asa,
    asa,
    asa_sample,
    asa_samples,
    asa_vs_distance,
    mu_asa,
)
from .campaign import (
    DIRECTIONAL,
    OMNIDIRECTIONAL,
    CampaignMeta,
    Category,
    DirectionalScan,
    LinkRecord,
    Mpc,
    ParseError,
    PathLossSeries,
    ValidationError,
    campaign_to_json,
    extract_mpcs,
    kth_strongest,
    link_mpcs,
    load_campaign,
    pathloss_series,
    save_campaign,
    synthesize_omnidirectional,
)
from .ci import CiFit, CiParams, ci_predict, fit_ci, fspl, residual_stats
from .registry import AsaEntry, ModelEntry, ModelRegistry, list_all, lookup, lookup_asa
from .synthesis import (
    CoverageGrid,
    GridSpec,
    LinkBudget,
    SynthesisConfig,
    coverage_grid,
    generate_synthetic_campaign,
    outage_probability,
    sample_pathloss,
    synthetic_campaign_meta,
)

__version__ = "0.1.0"

__all__ = [
    "AsaEntry", "AsaSample", "AsaStats", "CampaignMeta", "Category", "CiFit",
    "CiParams", "CoverageGrid", "DIRECTIONAL", "DirectionalScan", "GridSpec",
    "LinkBudget", "LinkRecord", "ModelEntry", "ModelRegistry", "Mpc",
    "OMNIDIRECTIONAL", "ParseError", "PathLossSeries", "SynthesisConfig",
    "ValidationError", "aggregate_asa", "asa", "asa_sample", "asa_samples",
    "asa_vs_distance", "campaign_to_json", "ci_predict", "coverage_grid",
    "extract_mpcs", "fit_ci", "fspl", "generate_synthetic_campaign",
    "kth_strongest", "link_mpcs", "list_all", "load_campaign", "lookup",
    "lookup_asa", "mu_asa", "outage_probability", "pathloss_series",
    "residual_stats", "sample_pathloss", "save_campaign",
    "synthesize_omnidirectional", "synthetic_campaign_meta",
]
