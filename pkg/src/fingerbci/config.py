"""Pipeline configuration shared by the CLI commands and the harness."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class PipelineConfig:
    """All tunables of the decoding pipeline.

    The band grid defaults to seventeen 2 Hz bands from 5 to 39 Hz; the
    extra-trees grids are searched by cross-validation per binary task
    (``et_max_features`` of ``None`` means {1, ceil(sqrt(d)), d} for the
    task's feature dimension d).
    """

    band_start: float = 5.0
    band_stop: float = 39.0
    band_width: float = 2.0
    fir_taps: int = 257
    csp_pairs: int = 2
    lda_shrinkage: float = 1e-3
    cv_folds: int = 5
    et_max_features: list[int] | None = None
    et_min_samples_split: list[int] = field(default_factory=lambda: [2, 5, 10])
    et_n_estimators: list[int] = field(default_factory=lambda: [50, 100, 200])
    test_fraction: float = 0.2
    repetitions: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.band_width <= 0 or self.band_stop <= self.band_start or self.band_start <= 0:
            raise ValueError("band grid must satisfy 0 < band_start < band_stop with positive width")
        if self.fir_taps % 2 == 0 or self.fir_taps < 31:
            raise ValueError("fir_taps must be odd and >= 31")
        if self.csp_pairs < 1:
            raise ValueError("csp_pairs must be >= 1")
        if self.lda_shrinkage < 0:
            raise ValueError("lda_shrinkage must be >= 0")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        if self.et_max_features is not None and not self.et_max_features:
            raise ValueError("et_max_features must be null or a non-empty list")
        if not self.et_min_samples_split or not self.et_n_estimators:
            raise ValueError("extra-trees grids must be non-empty")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must lie strictly between 0 and 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        config = cls(**data)
        config.validate()
        return config

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
