"""Shipped experiment scenarios: loading, running and reporting."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .classifier import Relation, classify
from .counterexamples import Family, RatioReport, ratio_experiment
from .params import ParamError, SpaceParams, canonical, space_from_json
from .seqnorm import NormParams

SCENARIO_VERSION = 1


@dataclass
class Scenario:
    name: str
    reference: str
    src: SpaceParams
    tgt: SpaceParams
    family: Family
    J: list = field(default_factory=list)

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        version = obj.get("version", SCENARIO_VERSION)
        if version != SCENARIO_VERSION:
            raise ParamError(f"unsupported scenario version {version}")
        try:
            return cls(obj["name"], obj.get("reference", ""), space_from_json(obj["src"]),
                       space_from_json(obj["tgt"]), Family.from_json(obj["family"]),
                       [int(J) for J in obj.get("J", [8, 16, 32, 64])])
        except KeyError as exc:
            raise ParamError(f"scenario is missing field {exc}") from exc

    def norm_params(self) -> tuple:
        """Norm parameters; large-region spaces are measured in their collapsed form."""
        return NormParams.from_space(canonical(self.src)), NormParams.from_space(canonical(self.tgt))

    def run(self, J_list: Optional[list] = None, jobs: int = 1) -> "ScenarioResult":
        verdict = classify(self.src, self.tgt)
        src, tgt = self.norm_params()
        report = ratio_experiment(src, tgt, self.family, J_list or self.J, verdict.relation, jobs)
        return ScenarioResult(self, verdict.relation, report)


@dataclass
class ScenarioResult:
    scenario: Scenario
    relation: Relation
    report: RatioReport

    def to_json(self) -> dict:
        sc = self.scenario
        return {"scenario": sc.name, "reference": sc.reference, "src": sc.src.to_json(),
                "tgt": sc.tgt.to_json(), "family": sc.family.to_json(),
                "relation": self.relation.value, **self.report.to_json()}


def scenario_names() -> list:
    root = resources.files("morrey_embed.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(name_or_path: str) -> Scenario:
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        text = path.read_text()
    elif name_or_path in scenario_names():
        text = resources.files("morrey_embed.scenarios").joinpath(name_or_path + ".json").read_text()
    else:
        raise ParamError(f"unknown scenario {name_or_path!r}")
    try:
        return Scenario.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParamError(f"malformed scenario file: {exc}") from exc


def load_suite() -> list:
    return [load_scenario(name) for name in scenario_names()]
