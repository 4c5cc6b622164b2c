"""
Application-wide settings and configuration.
This module loads settings from an external config.json file and scenario
documents from JSON files; every value has a built-in default.
"""
import json
import math
from pathlib import Path
from typing import List, Optional, Tuple, Union

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigurationError, ScenarioNotFoundError
from models.control import ControllerConfig, SmcGains
from models.plant import LinearLoadParams, NonlinearLoadParams, PlantParams, Topology
from models.report import GaConfig, PsoConfig, SaConfig, SearchSpace
from models.scenario import EventKind, Scenario, ScenarioEvent

logger = structlog.get_logger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent.parent / "config.json"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PlantSection(_Section):
    L_s: float = Field(2.4e-3, gt=0)
    R_s: float = Field(0.1, ge=0)
    C_s: float = Field(15e-6, gt=0)
    u_bat: float = Field(700.0, gt=0)
    f_s: float = Field(10e3, gt=0)
    omega: float = Field(100.0 * math.pi, gt=0)


class NonlinearLoadSection(_Section):
    L_n: float = Field(1.8e-3, gt=0)
    C_n: float = Field(2.2e-3, gt=0)
    R_n: float = Field(460.0, gt=0)
    u_f: float = Field(0.8, ge=0)
    precharge: bool = True


class LinearLoadSection(_Section):
    R_l: float = Field(9.0, gt=0)
    L_l: float = Field(3e-3, ge=0)


class ControlSection(_Section):
    T_sam: float = Field(50e-6, gt=0)
    T_cres: float = Field(0.5e-3, gt=0)
    T_vres: float = Field(10e-3, gt=0)
    xi: float = Field(1.0, gt=0)
    u_amp: float = Field(300.0, ge=0)
    integrator_limit: float = Field(50.0, gt=0)
    T_ramp: float = Field(10e-3, ge=0)
    delay_compensation: bool = True
    load_prediction: bool = True


class GainsSection(_Section):
    k_cd: float = Field(1000.0, gt=0)
    k_cq: float = Field(1000.0, gt=0)
    k_sat: float = Field(0.5, gt=0)


class SearchSpaceSection(_Section):
    lower: Tuple[float, float, float] = (1.0, 1.0, 0.001)
    upper: Tuple[float, float, float] = (2000.0, 2000.0, 15.0)

    @model_validator(mode="after")
    def _ordered(self):
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("search_space.lower must be below search_space.upper")
        return self


class PsoSection(_Section):
    swarm_size: int = Field(50, ge=2)
    max_iterations: int = Field(45, ge=1)
    w_high: float = Field(1.1, gt=0)
    w_low: float = Field(0.1, gt=0)
    c_1: float = Field(1.49, gt=0)
    c_2: float = Field(1.49, gt=0)


class GaSection(_Section):
    population: int = Field(50, ge=2)
    generations: int = Field(45, ge=1)
    crossover_probability: float = Field(0.9, ge=0, le=1)
    blend_alpha: float = Field(0.5, ge=0)
    mutation_probability: float = Field(0.1, ge=0, le=1)
    mutation_scale: float = Field(0.05, gt=0)
    tournament_size: int = Field(3, ge=1)
    elitism: int = Field(1, ge=0)


class SaSection(_Section):
    initial_temperature: float = Field(100.0, gt=0)
    iterations: int = Field(45, ge=1)
    cooling_rate: float = Field(0.9, gt=0, le=1)
    moves_per_temperature: int = Field(50, ge=1)
    step_scale: float = Field(0.1, gt=0)


class RunSection(_Section):
    dt_sim: float = Field(1e-6, gt=0, le=2e-6)
    penalty: float = Field(1e6, gt=0)
    threshold: float = Field(0.037, gt=0)
    workers: int = Field(1, ge=1)


class Settings(BaseModel):
    """
    Configuration settings for the simulator and tuner, loaded from a config file.
    """
    model_config = ConfigDict(extra="forbid")

    plant: PlantSection = Field(default_factory=PlantSection)
    nonlinear_load: NonlinearLoadSection = Field(default_factory=NonlinearLoadSection)
    linear_load: LinearLoadSection = Field(default_factory=LinearLoadSection)
    control: ControlSection = Field(default_factory=ControlSection)
    smc_baseline: GainsSection = Field(default_factory=GainsSection)
    search_space: SearchSpaceSection = Field(default_factory=SearchSpaceSection)
    pso: PsoSection = Field(default_factory=PsoSection)
    ga: GaSection = Field(default_factory=GaSection)
    sa: SaSection = Field(default_factory=SaSection)
    run: RunSection = Field(default_factory=RunSection)

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "Settings":
        """
        Load settings from ``path`` or from config.json in the project root.
        If the default file doesn't exist, the built-in values are used.
        """
        config_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
        if not config_path.exists():
            if path is not None:
                raise ConfigurationError(f"config file not found: {config_path}")
            logger.debug("config_missing_using_defaults", path=str(config_path))
            return cls()

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                config_data = json.load(f)
            settings = cls.model_validate(config_data)
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigurationError(f"invalid config {config_path}: {e}") from e
        logger.debug("config_loaded", path=str(config_path))
        return settings

    # --- conversions to domain objects ---

    def plant_params(self) -> PlantParams:
        return PlantParams(**self.plant.model_dump())

    def nonlinear_params(self) -> NonlinearLoadParams:
        return NonlinearLoadParams(**self.nonlinear_load.model_dump())

    def linear_params(self) -> LinearLoadParams:
        return LinearLoadParams(**self.linear_load.model_dump())

    def controller_config(self) -> ControllerConfig:
        """Controller copies of the plant model taken at configuration time."""
        return ControllerConfig(
            T_sam=self.control.T_sam,
            T_cres=self.control.T_cres,
            T_vres=self.control.T_vres,
            xi=self.control.xi,
            u_amp=self.control.u_amp,
            omega=self.plant.omega,
            L_s=self.plant.L_s,
            R_s=self.plant.R_s,
            C_s=self.plant.C_s,
            integrator_limit=self.control.integrator_limit,
            T_ramp=self.control.T_ramp,
            delay_compensation=self.control.delay_compensation,
            load_prediction=self.control.load_prediction,
        )

    def baseline_gains(self) -> SmcGains:
        return SmcGains(**self.smc_baseline.model_dump())

    def search_space_model(self) -> SearchSpace:
        return SearchSpace(lower=tuple(self.search_space.lower), upper=tuple(self.search_space.upper))

    def pso_config(self, seed: int = 0) -> PsoConfig:
        return PsoConfig(seed=seed, **self.pso.model_dump())

    def ga_config(self, seed: int = 0) -> GaConfig:
        return GaConfig(seed=seed, **self.ga.model_dump())

    def sa_config(self, seed: int = 0) -> SaConfig:
        return SaConfig(seed=seed, **self.sa.model_dump())


class EventDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    time: float = Field(ge=0)
    kind: EventKind
    factor: float = Field(1.0, gt=0)


class TopologyDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    linear: bool = True
    nonlinear: bool = False


class ScenarioDocument(BaseModel):
    """On-disk scenario description."""
    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    horizon: float = Field(0.7, ge=0)
    events: List[EventDocument] = Field(default_factory=list)
    initial_topology: TopologyDocument = Field(default_factory=TopologyDocument)
    linear_load: LinearLoadSection = Field(default_factory=LinearLoadSection)

    @field_validator("events")
    @classmethod
    def _within_horizon(cls, events, info):
        horizon = info.data.get("horizon")
        if horizon is not None:
            for event in events:
                if event.time > horizon:
                    raise ValueError(f"event at t={event.time} lies beyond the horizon {horizon}")
        return events

    def to_scenario(self) -> Scenario:
        return Scenario(
            horizon=self.horizon,
            events=[ScenarioEvent(e.time, e.kind, e.factor) for e in self.events],
            initial_topology=Topology(self.initial_topology.linear, self.initial_topology.nonlinear),
            linear_load=LinearLoadParams(**self.linear_load.model_dump()),
            name=self.name,
        )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read a scenario JSON document."""
    scenario_path = Path(path)
    if not scenario_path.exists():
        raise ScenarioNotFoundError(scenario_path)
    try:
        with open(scenario_path, "r", encoding="utf-8") as f:
            document = ScenarioDocument.model_validate(json.load(f))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ConfigurationError(f"invalid scenario {scenario_path}: {e}") from e
    logger.info("scenario_loaded", path=str(scenario_path), events=len(document.events))
    return document.to_scenario()


def dump_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    """Write a scenario as a JSON document that ``load_scenario`` reads back."""
    document = {
        "name": scenario.name,
        "horizon": scenario.horizon,
        "events": [{"time": e.time, "kind": e.kind.value, "factor": e.factor} for e in scenario.events],
        "initial_topology": {
            "linear": scenario.initial_topology.linear,
            "nonlinear": scenario.initial_topology.nonlinear,
        },
        "linear_load": {"R_l": scenario.linear_load.R_l, "L_l": scenario.linear_load.L_l},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=4)
