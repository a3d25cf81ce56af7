"""
Result containers shared by the averaged engine, the Monte-Carlo sampler and
the fitting routines.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from spinbath.core.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class DecayCurve:
    """
    Survival probability as a function of sequence depth.

    Attributes:
        depths: Integer sequence depths.
        values: Survival probabilities, one per depth.
        stderr: Optional standard error of the mean per depth (Monte-Carlo only).
        dimension: System dimension d; 1/d is the decay asymptote.
        label: Free-form description (mode/method) carried into reports.
    """
    depths: np.ndarray
    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    dimension: int = 2
    label: str = ""

    def __post_init__(self):
        depths = np.asarray(self.depths, dtype=int)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "depths", depths)
        object.__setattr__(self, "values", values)
        if self.stderr is not None:
            object.__setattr__(self, "stderr", np.asarray(self.stderr, dtype=float))

        if depths.ndim != 1 or depths.shape != values.shape:
            raise ValidationError(
                f"depths {depths.shape} and values {values.shape} must be equal-length 1-D arrays"
            )
        if self.stderr is not None and self.stderr.shape != values.shape:
            raise ValidationError("stderr must match values in length")
        if np.any(values < -1e-9) or np.any(values > 1 + 1e-9):
            raise ValidationError("survival values must lie in [0, 1]")
        if self.dimension < 2:
            raise ValidationError(f"system dimension must be >= 2, got {self.dimension}")

    def __len__(self) -> int:
        return len(self.depths)

    @property
    def asymptote(self) -> float:
        return 1.0 / self.dimension

    def subset(self, mask: np.ndarray) -> "DecayCurve":
        """Return the curve restricted to the points selected by a boolean mask."""
        return DecayCurve(
            depths=self.depths[mask],
            values=self.values[mask],
            stderr=None if self.stderr is None else self.stderr[mask],
            dimension=self.dimension,
            label=self.label,
        )

    def with_depth_zero(self) -> "DecayCurve":
        """Prepend the depth-0 point (survival 1, stderr 0) when it is missing."""
        if len(self) and self.depths[0] == 0:
            return self
        return DecayCurve(
            depths=np.concatenate([[0], self.depths]),
            values=np.concatenate([[1.0], self.values]),
            stderr=None if self.stderr is None else np.concatenate([[0.0], self.stderr]),
            dimension=self.dimension,
            label=self.label,
        )

    def to_frame(self) -> pd.DataFrame:
        """Tabular form with the `depth,value,stderr` columns of the CSV schema."""
        stderr = self.stderr if self.stderr is not None else np.full(len(self), np.nan)
        return pd.DataFrame({"depth": self.depths, "value": self.values, "stderr": stderr})


@dataclass
class FitResult:
    """
    Outcome of fitting a DecayCurve to one model family.

    `params` holds (A, p) for ``exp_offset`` and (A, alpha, beta) for
    ``powexp_offset``; the offset B is reported separately.
    """
    model: str
    params: Dict[str, float]
    offset: float
    offset_fixed: bool
    sse: float
    converged: bool
    flags: Dict[str, bool] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def predict(self, depths: np.ndarray) -> np.ndarray:
        k = np.asarray(depths, dtype=float)
        if self.model == "exp_offset":
            return self.params["A"] * self.params["p"] ** k + self.offset
        if self.model == "powexp_offset":
            return (
                self.params["A"] * k ** (-self.params["alpha"])
                * np.exp(-self.params["beta"] * k) + self.offset
            )
        raise ValueError(f"Unknown model family '{self.model}'")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "params": dict(self.params),
            "offset": self.offset,
            "offset_fixed": self.offset_fixed,
            "sse": self.sse,
            "converged": self.converged,
            "flags": dict(self.flags),
            "metadata": dict(self.metadata),
        }
