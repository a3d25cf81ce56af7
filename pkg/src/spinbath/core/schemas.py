"""
Experiment configuration schema.

One JSON document describes a full run: the physical model, the bath
temperature, the depth grid and how the curve is obtained. Unknown keys are
rejected.
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from spinbath.core.exceptions import ConfigurationError

Mode = Literal["nonmarkovian", "markovian", "xi"]
Method = Literal["averaged", "montecarlo", "closed", "trajectory"]
Gateset = Literal["clifford1q", "haar", "xi"]


class ModeConfig(BaseModel):
    omega: float = Field(ge=0)
    cutoff: int = Field(ge=1)

    model_config = ConfigDict(extra="forbid")


class ExperimentConfig(BaseModel):
    """
    Validated experiment parameters.

    ``beta`` accepts the string ``"inf"`` (ground-state bath) and serialises
    back to it, so the JSON written into CSV headers reparses to an equal
    config.
    """
    n_qubits: int = Field(default=1, ge=1)
    modes: List[ModeConfig] = Field(min_length=1)
    g: Union[float, List[List[float]]] = 4.0
    dt: float = Field(default=0.1, gt=0)
    beta: float = math.inf
    depths: List[int] = Field(min_length=1)
    samples: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    mode: Mode = "nonmarkovian"
    method: Method = "averaged"
    gateset: Gateset = "clifford1q"
    cutoffs: Optional[List[int]] = None
    n_circuits: int = Field(default=200, ge=1)
    workers: Optional[int] = Field(default=None, ge=1)

    model_config = ConfigDict(extra="forbid")

    @field_validator("beta", mode="before")
    @classmethod
    def _parse_beta(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        return value

    @field_validator("beta")
    @classmethod
    def _positive_beta(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("beta must be positive (use \"inf\" for the ground state)")
        return value

    @field_serializer("beta")
    def _serialize_beta(self, value: float) -> Union[float, str]:
        return "inf" if math.isinf(value) else value

    @field_validator("depths")
    @classmethod
    def _increasing_depths(cls, value: List[int]) -> List[int]:
        if any(k < 0 for k in value):
            raise ValueError("depths must be non-negative")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("depths must be strictly increasing")
        return value

    @field_validator("cutoffs")
    @classmethod
    def _positive_cutoffs(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or any(c < 1 for c in value)):
            raise ValueError("cutoffs must be a non-empty list of integers >= 1")
        return value

    @model_validator(mode="after")
    def _check_coupling_shape(self) -> "ExperimentConfig":
        if isinstance(self.g, list):
            shape = np.asarray(self.g, dtype=float).shape
            if shape != (len(self.modes), self.n_qubits):
                raise ValueError(
                    f"coupling matrix g has shape {shape}, expected "
                    f"({len(self.modes)}, {self.n_qubits}) for modes x qubits"
                )
        if not math.isinf(self.beta) and any(m.omega == 0 for m in self.modes):
            raise ValueError("a finite beta needs every mode frequency > 0")
        return self

    def coupling_matrix(self) -> np.ndarray:
        if isinstance(self.g, list):
            return np.asarray(self.g, dtype=float)
        return np.full((len(self.modes), self.n_qubits), float(self.g))

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Return a revalidated copy with the non-None overrides applied."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return load_config(data)

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """
        Load a JSON (or YAML) experiment file.

        Raises:
            ConfigurationError: If the file is missing, unparsable or invalid.
        """
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Configuration file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"Cannot parse {path}: {exc}") from exc
        return load_config(data)


def load_config(data: Union[Dict[str, Any], str]) -> ExperimentConfig:
    """Validate a mapping or JSON string, mapping schema errors to ConfigurationError."""
    try:
        if isinstance(data, str):
            return ExperimentConfig.model_validate_json(data)
        if not isinstance(data, dict):
            raise ConfigurationError("experiment configuration must be a mapping")
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as exc:
        raise ConfigurationError(f"Invalid experiment configuration:\n{exc}") from exc
