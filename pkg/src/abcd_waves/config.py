"""Declarative run configuration mirroring the CLI flags."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Literal, Optional, Union

import tomli
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .resonance import as_fraction

SEED_ENV = "ABCD_WAVES_SEED"
DEFAULT_SEED = 20240611

Number = Union[int, float, str]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


def _check_number(v):
    if v is not None:
        as_fraction(v)
    return v


class ClassifyConfig(_Strict):
    a: Optional[Number] = None
    b: Optional[Number] = None
    c: Optional[Number] = None
    d: Optional[Number] = None
    theta2: Optional[Number] = None
    lam: Optional[Number] = Field(None, alias="lambda")
    mu: Optional[Number] = None
    alpha: Optional[Number] = None
    beta: Optional[Number] = None
    P: int = Field(50, ge=1)
    Q: int = Field(20, ge=0)
    as_json: bool = Field(False, alias="json")

    _num = field_validator("a", "b", "c", "d", "theta2", "lam", "mu", "alpha", "beta")(_check_number)


class ResonanceConfig(_Strict):
    alpha: Number = 5
    beta: Number = 4
    gamma: Number = "1/4"
    method: Literal["quartic", "brute"] = "quartic"
    P: int = Field(200, ge=10)
    Q: int = Field(200, ge=10)

    _num = field_validator("alpha", "beta", "gamma")(_check_number)


class WaveConfig(_Strict):
    alpha0: Number = 5
    beta0: Number = 4
    gamma0: Number = "1/4"
    mu: float = -0.1
    nu: float = -0.1
    B: float = 0.0
    tau: float = 0.0
    order: int = Field(2, ge=1)
    formula: Literal["direct", "swapped"] = "direct"
    beta2_source: Literal["closed_form", "inner_product"] = "closed_form"
    refine: Optional[bool] = None
    nx: int = Field(256, ge=4)
    nt: int = Field(256, ge=4)
    out: Optional[str] = None

    _num = field_validator("alpha0", "beta0", "gamma0")(_check_number)


class Figure1Config(WaveConfig):
    t: float = 8.0


class VerifyConfig(_Strict):
    wave: Optional[str] = None
    trivial: bool = False
    alpha: Optional[Number] = None
    beta: Optional[Number] = None
    gamma: Optional[Number] = None
    B: float = 0.1
    nx: int = Field(256, ge=4)
    nt: int = Field(256, ge=4)

    _num = field_validator("alpha", "beta", "gamma")(_check_number)


class RunConfig(_Strict):
    seed: int = DEFAULT_SEED
    classify: ClassifyConfig = ClassifyConfig()
    resonance: ResonanceConfig = ResonanceConfig()
    bifurcate: WaveConfig = WaveConfig()
    verify: VerifyConfig = VerifyConfig()
    figure1: Figure1Config = Figure1Config()
    dump: WaveConfig = WaveConfig()


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Read a TOML document (if any) and apply per-section overrides on top."""
    doc: dict = {}
    if path is not None:
        with open(path, "rb") as fh:
            doc = tomli.load(fh)
    for section, values in (overrides or {}).items():
        if isinstance(values, dict):
            doc.setdefault(section, {})
            if not isinstance(doc[section], dict):
                raise ValueError(f"config key {section!r} must be a table")
            doc[section].update(values)
        else:
            doc[section] = values
    return RunConfig.model_validate(doc)


def resolve_seed(cfg: RunConfig | None = None) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        return int(env)
    return cfg.seed if cfg is not None else DEFAULT_SEED
