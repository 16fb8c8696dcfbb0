"""Pydantic schemas for experiment config files and result records."""
import hashlib
import json
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.errors import ConfigurationError

ExperimentKind = Literal[
    "linear_benchmark",
    "linearizability",
    "momentum_cone",
    "mixture_distinguishability",
    "gisin_signaling",
    "blowup_scan",
]


class StrictModel(BaseModel):
    """Unknown keys and non-finite numbers are rejected."""
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class Interval(BaseModel):
    """Half-open interval; the only place infinite bounds are allowed."""
    model_config = ConfigDict(extra="forbid", allow_inf_nan=True)

    lo: float
    hi: float

    @model_validator(mode="after")
    def check_order(self):
        if self.lo != self.lo or self.hi != self.hi:
            raise ValueError("interval bounds must not be NaN")
        if not self.lo < self.hi:
            raise ValueError(f"interval needs lo < hi, got [{self.lo}, {self.hi})")
        return self


# === Grid ===

class GridConfig(StrictModel):
    points: List[int] = Field(min_length=1, max_length=2)
    lengths: List[float] = Field(min_length=1, max_length=2)

    @field_validator("points")
    @classmethod
    def check_points(cls, value: List[int]) -> List[int]:
        for n in value:
            if n < 8 or n & (n - 1):
                raise ValueError(f"points per axis must be a power of two >= 8, got {n}")
        return value

    @field_validator("lengths")
    @classmethod
    def check_lengths(cls, value: List[float]) -> List[float]:
        if any(length <= 0 for length in value):
            raise ValueError("box lengths must be positive")
        return value

    @model_validator(mode="after")
    def check_axes(self):
        if len(self.points) != len(self.lengths):
            raise ValueError("points and lengths need one entry per axis")
        return self


# === Initial states ===

class GaussianState(StrictModel):
    family: Literal["gaussian"]
    center: float = 0.0
    width: float = Field(default=1.0, gt=0)
    carrier: float = 0.0


class PlaneWaveState(StrictModel):
    family: Literal["plane_wave"]
    carrier: float = 1.0


class HermiteState(StrictModel):
    family: Literal["hermite"]
    order: int = Field(default=1, ge=0, le=20)
    center: float = 0.0
    width: float = Field(default=1.0, gt=0)


class RandomState(StrictModel):
    """Smooth random state drawn from the experiment seed."""
    family: Literal["random"]
    bandwidth: float = Field(default=2.0, gt=0)
    envelope: float = Field(default=3.0, gt=0)


SingleState = Annotated[
    Union[GaussianState, PlaneWaveState, HermiteState, RandomState],
    Field(discriminator="family"),
]


class SuperpositionComponent(StrictModel):
    amplitude: Tuple[float, float] = (1.0, 0.0)
    state: SingleState


class SuperpositionState(StrictModel):
    family: Literal["superposition"]
    components: List[SuperpositionComponent] = Field(min_length=1)


class TwoParticleState(StrictModel):
    """Gaussians at -separation/2 and +separation/2, product or symmetrized."""
    family: Literal["two_particle"]
    mode: Literal["product", "entangled"] = "entangled"
    separation: float = Field(default=2.0, gt=0)
    width: float = Field(default=1.0, gt=0)
    carrier: float = 0.0


StateConfig = Annotated[
    Union[GaussianState, PlaneWaveState, HermiteState, RandomState, SuperpositionState, TwoParticleState],
    Field(discriminator="family"),
]


# === Potentials ===

class ZeroPotential(StrictModel):
    kind: Literal["zero"]


class HarmonicPotential(StrictModel):
    kind: Literal["harmonic"]
    omega: float = Field(gt=0)
    center: float = 0.0


class SquareWellPotential(StrictModel):
    kind: Literal["square_well"]
    depth: float
    width: float = Field(gt=0)
    center: float = 0.0


class LinearRampPotential(StrictModel):
    kind: Literal["linear_ramp"]
    slope: float
    center: float = 0.0


class TablePotential(StrictModel):
    """Piecewise-linear V through (x, V) breakpoints, held constant outside."""
    kind: Literal["table"]
    points: List[Tuple[float, float]] = Field(min_length=2)

    @field_validator("points")
    @classmethod
    def check_increasing(cls, value):
        xs = [x for x, _ in value]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("table breakpoints need strictly increasing x")
        return value


PotentialConfig = Annotated[
    Union[ZeroPotential, HarmonicPotential, SquareWellPotential, LinearRampPotential, TablePotential],
    Field(discriminator="kind"),
]


# === Dynamics ===

class CoefficientsConfig(StrictModel):
    nu1: float = 0.0
    nu2: float = 0.0
    mu0: float = 1.0
    mu1: float = 0.0
    mu2: float = 0.0
    mu3: float = 0.0
    mu4: float = 0.0
    mu5: float = 0.0
    alpha1: float = 0.0


class GaugeConfig(StrictModel):
    """Either a constant gamma or (time, gamma) breakpoints."""
    gamma: Optional[float] = None
    breakpoints: Optional[List[Tuple[float, float]]] = None

    @model_validator(mode="after")
    def check_one_form(self):
        if (self.gamma is None) == (self.breakpoints is None):
            raise ValueError("give exactly one of gamma or breakpoints")
        if self.breakpoints is not None:
            times = [t for t, _ in self.breakpoints]
            if not times or any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError("gauge breakpoints need strictly increasing times")
        return self


class TimeConfig(StrictModel):
    t_final: float = Field(gt=0)
    dt: float = Field(default=1e-3, gt=0)
    samples: int = Field(default=10, ge=1, le=10000)
    scheme: Literal["strang_split", "rk4_full"] = "strang_split"
    mass: float = Field(default=1.0, gt=0)
    node_floor: Optional[float] = Field(default=None, gt=0, le=1e-6)


class ToleranceConfig(StrictModel):
    width_rel: float = Field(default=1e-6, gt=0)
    norm: float = Field(default=1e-12, gt=0)
    centroid: float = Field(default=1e-5, gt=0)
    residual: float = Field(default=1e-4, gt=0)
    sensitivity: float = Field(default=1e-3, gt=0)
    order_ratio_min: float = Field(default=2.8, gt=0)
    order_ratio_max: float = Field(default=5.5, gt=0)
    momentum: float = Field(default=2e-3, gt=0)
    indistinguishable: float = Field(default=1e-10, gt=0)
    distinguishable: float = Field(default=1e-3, gt=0)
    signaling: float = Field(default=1e-10, gt=0)
    product_signaling: float = Field(default=1e-6, gt=0)
    factorization: float = Field(default=1e-5, gt=0)


class OutputConfig(StrictModel):
    directory: Optional[str] = None
    stem: Optional[str] = None


# === Kind-specific sections ===

class LinearizabilitySection(StrictModel):
    convergence_dts: List[float] = Field(default_factory=list)
    perturb: Optional[Literal["nu1", "nu2", "mu1", "mu2", "mu3", "mu4", "mu5", "alpha1"]] = None
    perturbation: float = 0.1

    @field_validator("convergence_dts")
    @classmethod
    def check_dts(cls, value):
        if any(dt <= 0 for dt in value):
            raise ValueError("convergence dts must be positive")
        if len(value) == 1:
            raise ValueError("a convergence study needs at least two dts")
        return value


class MomentumSection(StrictModel):
    regions: List[Interval] = Field(min_length=1)
    times: List[float] = Field(min_length=1)
    cone_grid: bool = False

    @field_validator("times")
    @classmethod
    def check_times(cls, value):
        if any(t <= 0 for t in value) or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("times must be positive and strictly increasing")
        return value


class MixtureSection(StrictModel):
    offset: float = Field(default=1.2, gt=0)
    width: float = Field(default=1.0, gt=0)
    durations: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5], min_length=1)
    cells: int = Field(default=8, ge=1, le=256)
    fraction: float = Field(default=0.5, gt=0, le=1)


class SignalingSection(StrictModel):
    t: float = Field(gt=0)
    reference: PotentialConfig = Field(default_factory=lambda: ZeroPotential(kind="zero"))
    remote: List[PotentialConfig] = Field(min_length=1)
    regions: List[Interval] = Field(min_length=1)
    convergence_dts: List[float] = Field(default_factory=list)
    check_factorization: bool = True


class BlowupSection(StrictModel):
    expect_blowup: bool = True


class ExperimentConfig(StrictModel):
    kind: ExperimentKind
    name: str = "experiment"
    seed: int = 0
    grid: GridConfig
    state: StateConfig
    potential: PotentialConfig = Field(default_factory=lambda: ZeroPotential(kind="zero"))
    coefficients: CoefficientsConfig = Field(default_factory=CoefficientsConfig)
    gauge: Optional[GaugeConfig] = None
    time: TimeConfig
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    linearizability: Optional[LinearizabilitySection] = None
    momentum: Optional[MomentumSection] = None
    mixture: Optional[MixtureSection] = None
    signaling: Optional[SignalingSection] = None
    blowup: Optional[BlowupSection] = None

    @model_validator(mode="after")
    def check_kind(self):
        two_particle = isinstance(self.state, TwoParticleState)
        if (self.kind == "gisin_signaling") != two_particle:
            raise ValueError("gisin_signaling runs exactly the two_particle state family")
        if two_particle != (len(self.grid.points) == 2):
            raise ValueError("two_particle states need a 2D grid; other families a 1D grid")
        if self.kind == "linearizability" and self.gauge is None:
            raise ValueError("linearizability needs a [gauge] section")
        if self.kind == "momentum_cone" and self.momentum is None:
            raise ValueError("momentum_cone needs a [momentum] section")
        if self.kind == "gisin_signaling" and self.signaling is None:
            raise ValueError("gisin_signaling needs a [signaling] section")
        return self

    @property
    def stem(self) -> str:
        return self.output.stem or self.name


class ResultRecord(BaseModel):
    """Machine-readable result of one run."""
    name: str
    kind: str
    verdict: Literal["pass", "fail", "blowup"]
    config_hash: str
    input_digest: str
    seed: int
    metrics: Dict[str, float] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    blowup: Optional[Dict[str, Any]] = None
    series_file: Optional[str] = None
    series_columns: List[str] = Field(default_factory=list)
    duration_seconds: float = 0.0
    created_at: str = ""
    version: str = ""


# === Parsing, canonical form and digests ===

class ConfigFileError(ConfigurationError):
    """Config file could not be parsed or validated."""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        self.diagnostics = diagnostics or []
        super().__init__(message)


def _to_plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_plain(v) for v in value]
    return value


def canonical_dict(config: ExperimentConfig) -> Dict[str, Any]:
    """Fully populated config with defaults, None fields dropped."""
    return _to_plain(config.model_dump(exclude_none=True))


def to_toml(config: ExperimentConfig) -> str:
    return tomli_w.dumps(canonical_dict(config))


def config_hash(config: ExperimentConfig) -> str:
    payload = json.dumps(canonical_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def content_digest(raw: bytes) -> str:
    """Git-style blob digest of the raw config bytes."""
    header = f"blob {len(raw)}\0".encode()
    return hashlib.sha1(header + raw).hexdigest()


def _locate(text: str, loc: Tuple[Any, ...]) -> Optional[int]:
    """Best-effort line number of the key a validation error points at."""
    names = [str(part) for part in loc if isinstance(part, str)]
    lines = text.splitlines()
    for name in reversed(names):
        key = re.compile(rf"^\s*{re.escape(name)}\s*=")
        header = re.compile(rf"^\s*\[+[^\]]*\b{re.escape(name)}\]+")
        for number, line in enumerate(lines, start=1):
            if key.match(line) or header.match(line):
                return number
    return None


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse and validate TOML config text.

    Raises:
        ConfigFileError: With one diagnostic per problem (field path and,
            where it can be found, the line)
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigFileError(f"Invalid TOML: {e}", [str(e)]) from e
    return validate_config(data, text)


def validate_config(data: Dict[str, Any], text: str = "") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        diagnostics = []
        for error in e.errors():
            path = ".".join(str(part) for part in error["loc"]) or "<root>"
            line = _locate(text, error["loc"]) if text else None
            where = f"line {line}: " if line else ""
            diagnostics.append(f"{where}{path}: {error['msg']}")
        raise ConfigFileError(f"{len(diagnostics)} config error(s)", diagnostics) from e


def load_config(path: Path) -> Tuple[ExperimentConfig, bytes]:
    """Read a config file; returns the validated config and the raw bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ConfigFileError(f"Cannot read config {path}: {e}") from e
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ConfigFileError(f"Config {path} is not UTF-8 text") from e
    return parse_config(text), raw
