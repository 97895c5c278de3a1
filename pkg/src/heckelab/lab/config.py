"""Experiment configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from ..mixeduni import LevelStructure, MixedPoint
from ..siegel import SiegelPoint
from .report import config_hash


class Experiment(str, Enum):
    height_scaling = "height_scaling"
    count_points = "count_points"
    orbit_census = "orbit_census"
    nt_scaling = "nt_scaling"


DEFAULT_TOLERANCES = {
    "tol_sym": 1e-9,
    "tol_act": 1e-9,
    "tol_pd": 1e-12,
    "max_iter": 10_000,
    "tol": 1e-5,             # canonical-height comparisons
    "bit_budget": 10**7,
    "candidate_budget": 10**8,
}


def default_base() -> MixedPoint:
    return MixedPoint((0, 0), SiegelPoint.from_tau(2j))


@dataclass
class ExperimentConfig:
    experiment: Experiment
    base_point: MixedPoint = field(default_factory=default_base)
    n_max: int = 10
    level: LevelStructure = field(default_factory=LevelStructure)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None
    threads: int = 1
    oracle: str = "parabola"
    T: int = 10
    curves: list | None = None   # curve JSON objects; None means the bundled suite

    def __post_init__(self):
        self.experiment = Experiment(self.experiment)
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        self.tolerances = {**DEFAULT_TOLERANCES, **(self.tolerances or {})}

    def tol(self, name: str):
        return self.tolerances[name]

    def to_json(self, include_runtime: bool = False) -> dict:
        """Everything that determines the results; thread count and output path only on request."""
        obj = {
            "experiment": self.experiment.value,
            "base_point": self.base_point.to_json(),
            "n_max": self.n_max,
            "level": self.level.N,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "oracle": self.oracle,
            "T": self.T,
            "curves": self.curves,
        }
        if include_runtime:
            obj.update(output_path=self.output_path, threads=self.threads)
        return obj

    @property
    def hash(self) -> str:
        return config_hash(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        tols = {**DEFAULT_TOLERANCES, **obj.get("tolerances", {})}
        base = obj.get("base_point")
        if base is None:
            bp = default_base()
        else:
            Z = base["Z"]
            bp = MixedPoint.from_json({**base, "Z": Z})
            bp = MixedPoint(bp.v, SiegelPoint(bp.Z.g, bp.Z.X, bp.Z.Y,
                                              tol_sym=tols["tol_sym"], tol_pd=tols["tol_pd"]))
        return cls(
            experiment=obj["experiment"],
            base_point=bp,
            n_max=int(obj.get("n_max", 10)),
            level=LevelStructure(int(obj.get("level", 4))),
            seed=int(obj.get("seed", 0)),
            tolerances=tols,
            output_path=obj.get("output_path"),
            threads=int(obj.get("threads", 1)),
            oracle=obj.get("oracle", "parabola"),
            T=int(obj.get("T", 10)),
            curves=obj.get("curves"),
        )

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))
