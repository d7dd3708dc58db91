"""Built-in store of fitted model parameters from the bundled 140 GHz study.

Every entry is stored exactly as printed in the source tables (the
registry is a citation artifact, not a computation): CI path-loss
exponent n and shadow-fading std sigma per (environment, condition,
modeling category), plus azimuth-spread statistics per (environment,
condition).  Source labels name the table each value came from; the
spread table's std column is unit-less in the source and stored as dB
consistent with the rest.

A user-fitted override file (same JSON schema as `export_json`) can
replace or extend entries via `ModelRegistry.with_overrides`.
"""

import json
from dataclasses import dataclass
from pathlib import Path

ENVIRONMENTS = ("indoor", "outdoor")
CONDITIONS = ("LoS", "NLoS")
CATEGORIES = ("directional", "omnidirectional", "second_strongest", "third_strongest")


@dataclass(frozen=True)
class ModelEntry:
    """One fitted CI model: (environment, condition, category) -> (n, sigma)."""

    environment: str
    condition: str
    category: str
    n: float
    sigma_db: float
    source: str

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("path-loss exponent must be positive")
        if self.sigma_db < 0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class AsaEntry:
    """Azimuth-spread statistics: (environment, condition) -> (mean, std)."""

    environment: str
    condition: str
    mean_sa_deg: float
    std_sa_deg: float
    source: str


_PATHLOSS_ROWS = (
    # environment, condition, category, n, sigma_db, source
    ("indoor", "LoS", "directional", 2.1, 1.8, "Table II"),
    ("indoor", "LoS", "omnidirectional", 1.8, 3.0, "Table II"),
    ("indoor", "LoS", "second_strongest", 2.8, 8.5, "Table II"),
    ("indoor", "LoS", "third_strongest", 3.1, 9.2, "Table II"),
    ("indoor", "NLoS", "directional", 2.9, 9.0, "Table II"),
    ("indoor", "NLoS", "omnidirectional", 2.3, 8.3, "Table II"),
    ("indoor", "NLoS", "second_strongest", 3.2, 9.1, "Table II"),
    ("indoor", "NLoS", "third_strongest", 3.5, 8.7, "Table II"),
    ("outdoor", "LoS", "directional", 2.0, 0.1, "Table III"),
    ("outdoor", "LoS", "omnidirectional", 1.7, 1.3, "Table III"),
    ("outdoor", "LoS", "second_strongest", 2.6, 8.7, "Table III"),
    ("outdoor", "LoS", "third_strongest", 2.9, 8.4, "Table III"),
    ("outdoor", "NLoS", "directional", 2.6, 10.1, "Table III"),
    ("outdoor", "NLoS", "omnidirectional", 2.3, 11.9, "Table III"),
    ("outdoor", "NLoS", "second_strongest", 3.0, 9.0, "Table III"),
    ("outdoor", "NLoS", "third_strongest", 3.1, 8.0, "Table III"),
)

_ASA_ROWS = (
    # environment, condition, mean_sa_deg, std_sa_deg, source
    ("indoor", "LoS", 52.3, 47.3, "Table IV"),
    ("indoor", "NLoS", 38.5, 45.4, "Table IV"),
    ("outdoor", "LoS", 49.8, 53.0, "Table IV"),
    ("outdoor", "NLoS", 46.1, 56.6, "Table IV"),
)

# Deterministic listing order: environment, then condition, then category.
_KEY_ORDER = {
    "environment": {e: i for i, e in enumerate(ENVIRONMENTS)},
    "condition": {c: i for i, c in enumerate(CONDITIONS)},
    "category": {c: i for i, c in enumerate(CATEGORIES)},
}


def _check_key(environment: str, condition: str, category: str | None = None):
    if environment not in ENVIRONMENTS:
        raise ValueError(f"unknown environment {environment!r}")
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if category is not None and category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")


class ModelRegistry:
    """Read-only mapping of fitted parameters, with an override hook."""

    def __init__(self, entries, asa_entries):
        self._models = {}
        for e in entries:
            key = (e.environment, e.condition, e.category)
            if key in self._models:
                raise ValueError(f"duplicate registry entry for {key}")
            self._models[key] = e
        self._asa = {}
        for a in asa_entries:
            key = (a.environment, a.condition)
            if key in self._asa:
                raise ValueError(f"duplicate spread entry for {key}")
            self._asa[key] = a

    @classmethod
    def default(cls) -> "ModelRegistry":
        """Registry populated with the bundled study tables."""
        return cls(
            (ModelEntry(*row) for row in _PATHLOSS_ROWS),
            (AsaEntry(*row) for row in _ASA_ROWS),
        )

    def lookup(self, environment: str, condition: str, category: str) -> ModelEntry:
        """Unique path-loss entry for a valid (env, condition, category)."""
        _check_key(environment, condition, category)
        return self._models[(environment, condition, category)]

    def lookup_asa(self, environment: str, condition: str) -> AsaEntry:
        """Unique spread entry for a valid (env, condition)."""
        _check_key(environment, condition)
        return self._asa[(environment, condition)]

    def list_all(self) -> tuple[list[ModelEntry], list[AsaEntry]]:
        """All entries in deterministic (env, condition, category) order."""
        models = sorted(
            self._models.values(),
            key=lambda e: (_KEY_ORDER["environment"][e.environment],
                           _KEY_ORDER["condition"][e.condition],
                           _KEY_ORDER["category"][e.category]),
        )
        spreads = sorted(
            self._asa.values(),
            key=lambda a: (_KEY_ORDER["environment"][a.environment],
                           _KEY_ORDER["condition"][a.condition]),
        )
        return models, spreads

    def export_json(self) -> str:
        """Full registry as JSON (deterministic bytes)."""
        models, spreads = self.list_all()
        doc = {
            "pathloss": [
                {"environment": e.environment, "condition": e.condition,
                 "category": e.category, "n": e.n, "sigma_db": e.sigma_db,
                 "source": e.source}
                for e in models
            ],
            "asa": [
                {"environment": a.environment, "condition": a.condition,
                 "mean_sa_deg": a.mean_sa_deg, "std_sa_deg": a.std_sa_deg,
                 "source": a.source}
                for a in spreads
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    def with_overrides(self, path) -> "ModelRegistry":
        """New registry with entries from a user JSON file replacing/adding.

        The file uses the `export_json` schema; either top-level list may
        be omitted.
        """
        doc = json.loads(Path(path).read_text())
        models = dict(self._models)
        for obj in doc.get("pathloss", []):
            e = ModelEntry(
                environment=obj["environment"], condition=obj["condition"],
                category=obj["category"], n=float(obj["n"]),
                sigma_db=float(obj["sigma_db"]),
                source=str(obj.get("source", path)),
            )
            _check_key(e.environment, e.condition, e.category)
            models[(e.environment, e.condition, e.category)] = e
        spreads = dict(self._asa)
        for obj in doc.get("asa", []):
            a = AsaEntry(
                environment=obj["environment"], condition=obj["condition"],
                mean_sa_deg=float(obj["mean_sa_deg"]),
                std_sa_deg=float(obj["std_sa_deg"]),
                source=str(obj.get("source", path)),
            )
            _check_key(a.environment, a.condition)
            spreads[(a.environment, a.condition)] = a
        return ModelRegistry(models.values(), spreads.values())


_DEFAULT = ModelRegistry.default()


def lookup(environment: str, condition: str, category: str) -> ModelEntry:
    """Path-loss entry from the bundled registry."""
    return _DEFAULT.lookup(environment, condition, category)


def lookup_asa(environment: str, condition: str) -> AsaEntry:
    """Spread entry from the bundled registry."""
    return _DEFAULT.lookup_asa(environment, condition)


def list_all() -> tuple[list[ModelEntry], list[AsaEntry]]:
    """All bundled entries in deterministic order."""
    return _DEFAULT.list_all()
