"""Command-line interface tying the toolkit together.

Verbs: fit, asa, registry, synth, coverage, validate, report.  Data goes
to files or stdout; diagnostics go to stderr.  Every command is a pure
function of its inputs and seeds, so repeated runs produce byte-identical
outputs.

Exit codes: 0 success, 1 usage error, 2 parse/validation error,
3 computation error.

Commands that produce a JSON/CSV pair (fit: report + per-point residuals;
asa: aggregate + per-link samples) take one --output path and derive the
sibling file by swapping the .json/.csv suffix.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import angular, registry, synthesis
from .campaign import (
    DEFAULT_FLOOR_DB,
    DIRECTIONAL,
    OMNIDIRECTIONAL,
    ParseError,
    ValidationError,
    campaign_to_json,
    kth_strongest,
    load_campaign,
    pathloss_series,
)
from .ci import CiParams, ci_predict, fit_ci

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_COMPUTE = 3


class UsageError(Exception):
    """Bad flags or flag combinations; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _canon_condition(raw: str) -> str:
    table = {"los": "LoS", "nlos": "NLoS"}
    key = raw.lower()
    if key not in table:
        raise UsageError(f"unknown condition {raw!r} (expected LoS or NLoS)")
    return table[key]


def _parse_category(tokens):
    """Map --category tokens to a Category: directional | omni | kth N."""
    name = tokens[0].lower()
    if name in ("directional", "dir") and len(tokens) == 1:
        return DIRECTIONAL
    if name in ("omni", "omnidirectional") and len(tokens) == 1:
        return OMNIDIRECTIONAL
    if name == "kth" and len(tokens) == 2:
        try:
            k = int(tokens[1])
        except ValueError:
            raise UsageError(f"kth category needs an integer, got {tokens[1]!r}")
        try:
            return kth_strongest(k)
        except ValueError as exc:
            raise UsageError(str(exc))
    raise UsageError(
        f"bad --category {' '.join(tokens)!r} (use: directional | omni | kth 2 | kth 3)"
    )


def _paired_outputs(out: str) -> tuple[Path, Path]:
    """(json_path, csv_path) derived from one --output path."""
    p = Path(out)
    if p.suffix == ".json":
        return p, p.with_suffix(".csv")
    if p.suffix == ".csv":
        return p.with_suffix(".json"), p
    return p.with_name(p.name + ".json"), p.with_name(p.name + ".csv")


def _write_json(doc, path: Path | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _filter_condition(links, cond: str | None):
    if cond is None:
        return list(links)
    return [li for li in links if li.condition == cond]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_fit(args) -> int:
    meta, links = load_campaign(args.input, args.format)
    cond = _canon_condition(args.cond) if args.cond else None
    links = _filter_condition(links, cond)
    if not links:
        raise ValueError("no links match the requested condition")
    category = _parse_category(args.category)
    series = pathloss_series(links, category, floor_db=args.floor_db)
    fit = fit_ci(series, fc_hz=args.fc_ghz * 1e9, d0_m=args.d0_m)

    report = {
        "category": category.label,
        "condition": cond or "all",
        "environment": meta.environment if meta else None,
        "n": fit.params.n,
        "sigma_db": fit.sigma_db,
        "num_points": fit.num_points,
        "fc_hz": fit.params.fc_hz,
        "d0_m": fit.params.d0_m,
    }
    if args.output is None:
        _write_json(report, None)
        return EXIT_OK

    json_path, csv_path = _paired_outputs(args.output)
    _write_json(report, json_path)
    rows = []
    for (d, pl), resid in zip(series.points, fit.residuals_db):
        rows.append((d, pl, ci_predict(fit.params, d), resid))
    _write_csv(csv_path,
               ("distance_m", "measured_pathloss_db", "predicted_pathloss_db",
                "residual_db"),
               rows)
    print(f"{category.label}: n = {fit.params.n:.2f}, "
          f"sigma = {fit.sigma_db:.2f} dB ({fit.num_points} points)")
    return EXIT_OK


def _cmd_asa(args) -> int:
    meta, links = load_campaign(args.input, args.format)
    if not links:
        raise ValueError("no links in campaign")
    samples = angular.asa_samples(links, floor_db=args.floor_db,
                                  unwrap=args.unwrap)
    env = meta.environment if meta else None

    aggregate = {"environment": env}
    for cond in ("LoS", "NLoS"):
        try:
            stats = angular.aggregate_asa(samples, env or "unknown", cond)
        except ValueError:
            continue
        aggregate[cond] = {
            "mean_sa_deg": stats.mean_deg,
            "std_sa_deg": stats.std_deg,
            "count": stats.count,
        }

    if args.output is None:
        _write_json(aggregate, None)
        return EXIT_OK

    json_path, csv_path = _paired_outputs(args.output)
    _write_json(aggregate, json_path)
    # Same ordering as asa_vs_distance: ascending distance, ties by link id.
    ordered = sorted(samples, key=lambda s: (s.distance_m, s.link_id))
    rows = [(s.link_id, s.distance_m, s.condition, s.mu_asa_deg, s.s_a_deg)
            for s in ordered]
    _write_csv(csv_path,
               ("link_id", "distance_m", "condition", "mu_asa_deg", "s_a_deg"),
               rows)
    print(f"asa: {len(samples)} links -> {csv_path}")
    return EXIT_OK


def _cmd_registry(args) -> int:
    reg = registry.ModelRegistry.default()
    if args.overrides:
        reg = reg.with_overrides(args.overrides)

    if args.export:
        text = reg.export_json()
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    if not args.env or not args.cond or not args.cat:
        raise UsageError("registry query needs --env, --cond and --cat "
                         "(or use --export)")
    cond = _canon_condition(args.cond)
    if args.cat == "asa":
        entry = reg.lookup_asa(args.env, cond)
        print(f"{entry.environment} {entry.condition} asa: "
              f"mean S_A = {entry.mean_sa_deg:g} deg, "
              f"std = {entry.std_sa_deg:g} deg [{entry.source}]")
        return EXIT_OK
    cat = {"directional": "directional", "omni": "omnidirectional",
           "omnidirectional": "omnidirectional",
           "second": "second_strongest", "third": "third_strongest"}[args.cat]
    entry = reg.lookup(args.env, cond, cat)
    print(f"{entry.environment} {entry.condition} {entry.category}: "
          f"n = {entry.n:g}, sigma = {entry.sigma_db:g} dB [{entry.source}]")
    return EXIT_OK


def _cmd_synth(args) -> int:
    params = CiParams(fc_hz=args.fc_ghz * 1e9, d0_m=args.d0_m, n=args.n)
    cfg = synthesis.SynthesisConfig(
        params=params,
        sigma_db=args.sigma,
        seed=args.seed,
        num_links=args.links,
        distance_law=args.law,
        distance_range_m=(args.dmin, args.dmax),
    )
    links = synthesis.generate_synthetic_campaign(cfg)
    meta = synthesis.synthetic_campaign_meta(cfg, environment=args.env)
    text = campaign_to_json(meta, links)
    if args.output:
        Path(args.output).write_text(text)
        print(f"synth: {len(links)} links -> {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_coverage(args) -> int:
    if args.n is not None:
        n, sigma = args.n, args.sigma
    else:
        if not args.env or not args.cond or not args.cat:
            raise UsageError("coverage needs either --n/--sigma or a registry "
                             "key (--env, --cond, --cat)")
        cat = {"directional": "directional", "omni": "omnidirectional",
               "omnidirectional": "omnidirectional",
               "second": "second_strongest", "third": "third_strongest"}[args.cat]
        entry = registry.lookup(args.env, _canon_condition(args.cond), cat)
        n, sigma = entry.n, entry.sigma_db

    params = CiParams(fc_hz=args.fc_ghz * 1e9, d0_m=args.d0_m, n=n)
    budget = synthesis.LinkBudget(
        eirp_dbm=args.eirp, rx_gain_dbi=args.rx_gain,
        noise_floor_dbm=args.noise_floor, required_snr_db=args.req_snr,
    )
    grid = synthesis.GridSpec(
        x_range_m=(args.xmin, args.xmax),
        y_range_m=(args.ymin, args.ymax),
        cell_size_m=args.cell,
    )
    result = synthesis.coverage_grid(params, sigma, budget, grid)

    rows = []
    for x, y, d, p, out in result.rows():
        if math.isnan(p):
            rows.append((x, y, d, "", ""))   # closer than d0: flagged, not computed
        else:
            rows.append((x, y, d, p, out))
    header = ("x_m", "y_m", "distance_m", "mean_rx_power_dbm", "outage")
    if args.output:
        _write_csv(Path(args.output), header, rows)
        print(f"coverage: {len(rows)} cells -> {args.output}")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    if args.trials:
        # Monte Carlo cross-check of the worst computed cell (stderr only).
        worst = max((r for r in rows if r[4] != ""), key=lambda r: r[4], default=None)
        if worst is not None:
            p_mc = synthesis.outage_probability(
                params, sigma, budget, worst[2],
                mode="monte_carlo", trials=args.trials, seed=args.seed,
            )
            print(f"mc check at ({worst[0]}, {worst[1]}): closed form "
                  f"{worst[4]:.4f}, monte carlo {p_mc:.4f} "
                  f"({args.trials} trials, seed {args.seed})", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    meta, links = load_campaign(args.input, args.format)
    label = meta.name if meta else Path(args.input).name
    print(f"valid: {label} with {len(links)} links")
    return EXIT_OK


_REPORT_CATEGORIES = (DIRECTIONAL, OMNIDIRECTIONAL, kth_strongest(2),
                      kth_strongest(3))


def _cmd_report(args) -> int:
    meta, links = load_campaign(args.input, args.format)
    if not links:
        raise ValueError("no links in campaign")
    env = meta.environment if meta else None

    doc = {"environment": env, "num_links": len(links), "conditions": {}}
    for cond in ("LoS", "NLoS"):
        subset = _filter_condition(links, cond)
        if not subset:
            continue
        section = {"num_links": len(subset), "pathloss": {}}
        for category in _REPORT_CATEGORIES:
            try:
                series = pathloss_series(subset, category,
                                         floor_db=args.floor_db)
                fit = fit_ci(series, fc_hz=args.fc_ghz * 1e9, d0_m=args.d0_m)
            except ValueError as exc:
                print(f"report: {cond} {category.label}: skipped ({exc})",
                      file=sys.stderr)
                continue
            section["pathloss"][category.label] = {
                "n": fit.params.n,
                "sigma_db": fit.sigma_db,
                "num_points": fit.num_points,
            }
        samples = angular.asa_samples(subset, floor_db=args.floor_db)
        stats = angular.aggregate_asa(samples, env or "unknown", cond)
        section["asa"] = {
            "mean_sa_deg": stats.mean_deg,
            "std_sa_deg": stats.std_deg,
            "count": stats.count,
        }
        doc["conditions"][cond] = section

    _write_json(doc, Path(args.output) if args.output else None)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_model_flags(p):
    p.add_argument("--fc-ghz", type=float, default=142.0,
                   help="carrier frequency in GHz (default 142)")
    p.add_argument("--d0-m", type=float, default=1.0,
                   help="reference distance in meters (default 1)")


def _add_input_flags(p):
    p.add_argument("--input", required=True, help="campaign file")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="input format (default: from suffix)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="subthz",
                     description="Sub-THz close-in path-loss modeling toolkit")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("fit", help="fit the CI model to a campaign")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--category", nargs="+", default=["directional"],
                   metavar="CAT", help="directional | omni | kth 2 | kth 3")
    p.add_argument("--cond", default=None, help="restrict to LoS or NLoS links")
    p.add_argument("--floor-db", type=float, default=DEFAULT_FLOOR_DB,
                   help="MPC dynamic range below the peak (default 25)")
    p.add_argument("--output", default=None,
                   help="report path; writes <output>.json and <output>.csv")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("asa", help="per-link azimuth spread statistics")
    _add_input_flags(p)
    p.add_argument("--floor-db", type=float, default=DEFAULT_FLOOR_DB)
    p.add_argument("--unwrap", action="store_true",
                   help="unwrap angles about the strongest MPC first")
    p.add_argument("--output", default=None,
                   help="output path; writes samples CSV and aggregate JSON")
    p.set_defaults(func=_cmd_asa)

    p = sub.add_parser("registry", help="query the bundled parameter tables")
    p.add_argument("--env", choices=registry.ENVIRONMENTS, default=None)
    p.add_argument("--cond", default=None, help="LoS or NLoS")
    p.add_argument("--cat",
                   choices=("directional", "omni", "omnidirectional",
                            "second", "third", "asa"),
                   default=None)
    p.add_argument("--export", action="store_true",
                   help="emit the full registry as JSON")
    p.add_argument("--overrides", default=None,
                   help="JSON file of user-fitted entries to merge in")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_registry)

    p = sub.add_parser("synth", help="generate a synthetic campaign")
    _add_model_flags(p)
    p.add_argument("--n", type=float, required=True, help="path-loss exponent")
    p.add_argument("--sigma", type=float, required=True,
                   help="shadow-fading std in dB")
    p.add_argument("--links", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--law", choices=synthesis.DISTANCE_LAWS[:2],
                   default="log_uniform")
    p.add_argument("--dmin", type=float, default=3.0)
    p.add_argument("--dmax", type=float, default=66.0)
    p.add_argument("--env", choices=registry.ENVIRONMENTS, default="outdoor")
    p.add_argument("--output", default=None, help="campaign JSON path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("coverage", help="coverage grid around the transmitter")
    _add_model_flags(p)
    p.add_argument("--n", type=float, default=None,
                   help="path-loss exponent (else looked up via --env/--cond/--cat)")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--env", choices=registry.ENVIRONMENTS, default=None)
    p.add_argument("--cond", default=None)
    p.add_argument("--cat",
                   choices=("directional", "omni", "omnidirectional",
                            "second", "third"),
                   default=None)
    p.add_argument("--eirp", type=float, default=synthesis.EIRP_DEFAULT_DBM)
    p.add_argument("--rx-gain", type=float, default=0.0)
    p.add_argument("--noise-floor", type=float, default=-80.0)
    p.add_argument("--req-snr", type=float, default=10.0)
    p.add_argument("--xmin", type=float, default=-100.0)
    p.add_argument("--xmax", type=float, default=100.0)
    p.add_argument("--ymin", type=float, default=-100.0)
    p.add_argument("--ymax", type=float, default=100.0)
    p.add_argument("--cell", type=float, default=10.0)
    p.add_argument("--trials", type=int, default=None,
                   help="Monte Carlo cross-check of the worst cell (stderr)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="coverage CSV path")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("validate", help="check a campaign file")
    _add_input_flags(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("report", help="full campaign report (fits + spreads)")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--floor-db", type=float, default=DEFAULT_FLOOR_DB)
    p.add_argument("--output", default=None, help="report JSON path")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"invalid input:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
