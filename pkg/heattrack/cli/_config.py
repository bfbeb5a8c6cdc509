"""
File: ./heattrack/cli/_config.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import hashlib
from typing import Any, Dict, List, Union, Literal, Optional, Annotated
from pathlib import Path

# External
import orjson
import numpy as np
from pydantic import Field, BaseModel, ValidationError, validator, root_validator

# Project
from ..jets import normalize_bump
from ..grids import Signal, TimeGrid, SpaceGrid, resample, read_signal_csv
from ..logger import get_logger
from .._errors import ConfigError, IncompatibleGridError
from ..flatness import Target, RampTarget, SineTarget, ZeroTarget, BumpIntegralTarget
from .._constants import N_MAX, N_MAX_CAP, QUAD_NODES, TOL_KERNEL, TOL_SERIES

logger = get_logger(__name__)

Command = Literal["track", "cost-curve", "gs", "transmute", "hum", "verify"]
TargetFamily = Literal["zero", "ramp", "sine", "bump_integral", "samples"]

# Parameters each target family cannot do without
_REQUIRED_PARAMETERS: Dict[str, List[str]] = {
    "zero": [],
    "ramp": ["slope"],
    "sine": ["frequency"],
    "bump_integral": ["onset", "width"],
    "samples": ["path"],
}


class TargetSpec(BaseModel):
    """
    Tracked signal w, chosen from a closed-form family or read from a ``t,value`` CSV file.
    """

    class Config:
        allow_mutation = False
        extra = "forbid"

    family: Annotated[TargetFamily, Field(description="Target family")]
    slope: Annotated[Optional[float], Field(description="Ramp slope, w = slope·t")] = None
    amplitude: Annotated[float, Field(description="Amplitude of sine and bump_integral")] = 1.0
    frequency: Annotated[
        Optional[float], Field(description="Sine frequency f in A·sin(2πft)", gt=0)
    ] = None
    onset: Annotated[
        Optional[float], Field(description="Start of the bump_integral rise", ge=0)
    ] = None
    width: Annotated[
        Optional[float], Field(description="Duration of the bump_integral rise", gt=0)
    ] = None
    bump_order: Annotated[
        float, Field(description="Gevrey order of the bump_integral cut-off", gt=1)
    ] = 1.5
    path: Annotated[Optional[Path], Field(description="Samples CSV with a t,value header")] = None

    @root_validator(skip_on_failure=True)
    def _family_parameters(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        family = values["family"]
        missing = [name for name in _REQUIRED_PARAMETERS[family] if values.get(name) is None]
        if missing:
            raise ValueError(f"family {family} needs {', '.join(missing)}")
        path: Optional[Path] = values.get("path")
        if family == "samples" and path is not None and not path.is_file():
            raise ValueError(f"samples file {path} does not exist")
        return values

    def closed_form(self) -> Target:
        """The target as a closed-form family member

        Raises:
            ConfigError: the family is ``samples``

        """
        if self.family == "zero":
            return ZeroTarget()
        if self.family == "ramp":
            assert self.slope is not None
            return RampTarget(self.slope)
        if self.family == "sine":
            assert self.frequency is not None
            return SineTarget(self.amplitude, self.frequency)
        if self.family == "bump_integral":
            assert self.onset is not None and self.width is not None
            bump = normalize_bump(self.bump_order)
            return BumpIntegralTarget(bump, self.onset, self.width, self.amplitude)
        raise ConfigError("Sampled targets have no closed form")

    def samples(self) -> Signal:
        """Read the samples file; a malformed file raises DataFileError naming the row"""
        assert self.path is not None
        signal = read_signal_csv(self.path)
        logger.info("Read %d target samples from %s", len(signal), self.path)
        return signal

    def build(self, tgrid: TimeGrid) -> Union[Target, Signal]:
        """The target over [0, T]: a closed form, or the samples resampled onto ``tgrid``

        Raises:
            ConfigError: samples that do not span [0, T]
            DataFileError: malformed samples file

        """
        if self.family != "samples":
            return self.closed_form()

        signal = self.samples()
        if not isinstance(signal.grid, TimeGrid):
            raise ConfigError(f"{self.path}: target samples must start at t = 0")
        try:
            return resample(signal, tgrid)
        except IncompatibleGridError as exc:
            raise ConfigError(f"{self.path}: {exc}") from exc

    def sampled(self, tgrid: TimeGrid) -> Signal:
        """The target sampled at the nodes of ``tgrid``"""
        target = self.build(tgrid)
        if isinstance(target, Signal):
            return target
        return Signal(tgrid, target.values(np.asarray(tgrid.nodes)))


class ExperimentConfig(BaseModel):
    """
    One reproducible experiment: command, grids, target and method parameters.
    """

    class Config:
        allow_mutation = False
        extra = "forbid"

    command: Annotated[Command, Field(description="Pipeline to run")] = "track"
    length: Annotated[float, Field(description="Rod length L", gt=0)] = 1.0
    t_end: Annotated[float, Field(description="Horizon T", gt=0)] = 1.0
    n_cells: Annotated[int, Field(description="Space cells", ge=4)] = 100
    n_steps: Annotated[int, Field(description="Time steps", ge=2)] = 400
    target: Annotated[TargetSpec, Field(description="Tracked signal w")] = TargetSpec(
        family="ramp", slope=1.0
    )
    s: Annotated[float, Field(description="Cost exponent s, bump order 2 - s", gt=0, lt=1)] = 0.5
    eps: Annotated[float, Field(description="Tracking tolerance ε", ge=0)] = 0.1
    eps_list: Annotated[
        Optional[List[float]], Field(description="Tolerances swept by cost-curve")
    ] = None
    n_max: Annotated[
        int, Field(description="Jet order flatness series start from", ge=1, le=N_MAX_CAP)
    ] = N_MAX
    max_order: Annotated[
        int, Field(description="Jet order flatness series may double up to", ge=1, le=N_MAX_CAP)
    ] = N_MAX_CAP
    tol_series: Annotated[
        float, Field(description="Series truncation tolerance", gt=0)
    ] = TOL_SERIES
    tol_kernel: Annotated[
        float, Field(description="Kernel truncation tolerance", gt=0, lt=0.5)
    ] = TOL_KERNEL
    quad_nodes: Annotated[
        int, Field(description="Gauss-Legendre nodes per panel", ge=2)
    ] = QUAD_NODES
    max_iters: Annotated[int, Field(description="Dual minimization iteration cap", ge=1)] = 500
    grad_tol: Annotated[float, Field(description="Relative gradient tolerance", gt=0)] = 1e-6
    smoothing_sigma: Annotated[
        Optional[float], Field(description="σ of the smoothed ε term", gt=0)
    ] = None
    tol_disc: Annotated[
        float, Field(description="Discretization slack of closed-loop checks", gt=0)
    ] = 5e-3
    flux_substeps: Annotated[
        int, Field(description="Solver substeps per control step in closed-loop checks", ge=1)
    ] = 4
    gs_x_max: Annotated[float, Field(description="Right end of the G_s sample range", gt=0)] = 30.0
    gs_points: Annotated[int, Field(description="G_s samples", ge=2)] = 300
    seed: Annotated[int, Field(description="Seed of randomized property checks", ge=0)] = 0
    workers: Annotated[
        Optional[int], Field(description="Threads of the cost-curve sweep", ge=1)
    ] = None
    out: Annotated[Path, Field(description="Output directory")] = Path("heattrack-out")

    @validator("eps_list")
    def _positive_tolerances(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None:
            if any(not eps > 0 for eps in value):
                raise ValueError("every tolerance must be positive")
            if len(set(value)) != len(value):
                raise ValueError("tolerances must be distinct")
        return value

    @root_validator(skip_on_failure=True)
    def _command_parameters(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        command = values["command"]
        if values["n_max"] > values["max_order"]:
            raise ValueError("n_max must not exceed max_order")
        if command == "track" and not values["eps"] > 0:
            raise ValueError("track needs eps > 0")
        if command == "cost-curve":
            eps_list = values.get("eps_list")
            if eps_list is None or len(eps_list) < 2:
                raise ValueError("cost-curve needs eps_list with at least 2 entries")
        return values

    @property
    def tgrid(self) -> TimeGrid:
        return TimeGrid(t_end=self.t_end, n_steps=self.n_steps)

    @property
    def xgrid(self) -> SpaceGrid:
        return SpaceGrid(length=self.length, n_cells=self.n_cells)


def config_hash(cfg: ExperimentConfig) -> str:
    """Digest of every setting that shapes the outputs, the output directory excluded"""
    canonical = orjson.dumps(
        cfg.dict(exclude={"out"}), default=str, option=orjson.OPT_SORT_KEYS
    )
    return hashlib.sha256(canonical).hexdigest()[:16]


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in error['loc'] if part != '__root__') or 'config'}: "
        f"{error['msg']}"
        for error in exc.errors()
    )


def _anchor_samples_path(data: Dict[str, Any], base: Path) -> None:
    target = data.get("target")
    if isinstance(target, dict) and isinstance(target.get("path"), str):
        path = Path(target["path"])
        if not path.is_absolute():
            target["path"] = str(base / path)


def load_config(path: Optional[Path] = None, **overrides: Any) -> ExperimentConfig:
    """Read an experiment config from a JSON document.

    Relative sample paths are taken relative to the config file. Overrides whose value is
    None are ignored, the others replace the document entries before validation.

    Args:
        path: JSON document, defaults apply when omitted
        overrides: Settings that take precedence over the document

    Raises:
        ConfigError: syntax error (line and column given) or invalid setting (field path given)
        OSError: unreadable config file

    """
    data: Dict[str, Any] = {}
    if path is not None:
        raw = path.read_bytes()
        try:
            document = orjson.loads(raw)
        except orjson.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(document, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        data = document
        _anchor_samples_path(data, path.parent)

    data.update({key: value for key, value in overrides.items() if value is not None})
    try:
        cfg = ExperimentConfig.parse_obj(data)
    except ValidationError as exc:
        source = path if path is not None else "config"
        raise ConfigError(f"{source}: {_validation_message(exc)}") from exc

    logger.debug("Loaded %s config %s", cfg.command, config_hash(cfg))
    return cfg


__all__ = (
    "Command",
    "TargetSpec",
    "TargetFamily",
    "ExperimentConfig",
    "load_config",
    "config_hash",
)
