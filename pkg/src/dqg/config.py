"""Simulation configuration and the flat ``key = value`` config format."""
from dataclasses import dataclass, field, fields, replace
import hashlib
import json

from .errors import ConfigurationError
from .spectral import GridSpec

REGIMES = ("supercritical", "critical", "subcritical-low", "subcritical-high")


def regime(alpha):
    """Classify the dissipation exponent against the scaling of the nonlinearity."""
    if alpha < 0.5:
        return "supercritical"
    if alpha == 0.5:
        return "critical"
    if alpha < 0.75:
        return "subcritical-low"
    return "subcritical-high"


def in_hypothesis(alpha):
    """True when alpha lies in the range (1/2, 1) covered by the global bound."""
    return 0.5 < alpha < 1.0


@dataclass(frozen=True)
class InitialDataSpec:
    """Initial profile descriptor.

    ``kind`` is one of single_mode, one_dimensional, two_mode,
    random_spectrum or snapshot.  ``beta=None`` means ``s0 + 1``.
    ``normalize`` is ``besov``, ``lp_crit`` or ``none``.
    """

    kind: str = "random_spectrum"
    beta: float | None = None
    k_lo: float = 1.0
    k_hi: float = 8.0
    normalize: str = "besov"
    target: float = 5.0
    seed: int = 0
    path: str | None = None

    def __post_init__(self):
        kinds = ("single_mode", "one_dimensional", "two_mode", "random_spectrum", "snapshot")
        if self.kind not in kinds:
            raise ConfigurationError(f"initial_data must be one of {kinds}, got {self.kind!r}")
        if self.normalize not in ("besov", "lp_crit", "none"):
            raise ConfigurationError(f"normalize must be besov, lp_crit or none, got {self.normalize!r}")
        if self.kind == "random_spectrum" and not 0 < self.k_lo <= self.k_hi:
            raise ConfigurationError(f"empty band [{self.k_lo}, {self.k_hi}]")
        if self.kind == "snapshot" and not self.path:
            raise ConfigurationError("snapshot initial data needs snapshot_path")
        if self.target <= 0:
            raise ConfigurationError("target norm must be positive")


@dataclass(frozen=True)
class SimConfig:
    alpha: float = 0.75
    kappa: float = 1.0
    n: int = 128
    dealias_fraction: float = 2.0 / 3.0
    t_end: float = 5.0
    dt_policy: str = "cfl"
    dt: float = 2.5e-3
    cfl_number: float = 0.5
    dt_max: float = 2.5e-3
    diagnostic_stride: int = 1
    snapshot_stride: int = 0
    initial_data: InitialDataSpec = field(default_factory=InitialDataSpec)
    allow_out_of_hypothesis: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.kappa < 0:
            raise ConfigurationError(f"kappa must be positive, got {self.kappa}")
        if self.t_end < 0:
            raise ConfigurationError(f"t_end must be positive, got {self.t_end}")
        if self.dt <= 0 or self.dt_max <= 0 or self.cfl_number <= 0:
            raise ConfigurationError("dt, dt_max and cfl_number must be positive")
        if self.dt_policy not in ("fixed", "cfl"):
            raise ConfigurationError(f"dt_policy must be fixed or cfl, got {self.dt_policy!r}")
        if self.diagnostic_stride < 1:
            raise ConfigurationError("diagnostic_stride must be >= 1")
        GridSpec(self.n, self.dealias_fraction)

    @property
    def grid(self):
        return GridSpec(self.n, self.dealias_fraction)

    @property
    def regime(self):
        return regime(self.alpha)

    @property
    def out_of_hypothesis(self):
        return not in_hypothesis(self.alpha) or self.kappa == 0

    def with_(self, **kw):
        return replace(self, **kw)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "initial_data"}
        d["initial_data"] = {f.name: getattr(self.initial_data, f.name)
                             for f in fields(self.initial_data)}
        return d

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# key -> (target, converter); target "init" routes into InitialDataSpec
_KEYS = {
    "alpha": ("sim", float),
    "kappa": ("sim", float),
    "n": ("sim", int),
    "dealias_fraction": ("sim", float),
    "t_end": ("sim", float),
    "dt_policy": ("sim", str),
    "dt": ("sim", float),
    "cfl_number": ("sim", float),
    "dt_max": ("sim", float),
    "diagnostic_stride": ("sim", int),
    "snapshot_stride": ("sim", int),
    "initial_data": ("init", str),
    "beta": ("init", float),
    "k_lo": ("init", float),
    "k_hi": ("init", float),
    "normalize": ("init", str),
    "target": ("init", float),
    "seed": ("init", int),
    "snapshot_path": ("init", str),
}
_INIT_NAMES = {"initial_data": "kind", "snapshot_path": "path"}


def parse_config(text, **overrides):
    """Parse ``key = value`` lines into a validated :class:`SimConfig`.

    ``#`` starts a comment.  Unknown keys, unparsable values and out-of-range
    parameters raise :class:`ConfigurationError` naming the key and line.
    ``overrides`` (already typed, ``None`` ignored) win over the text.
    """
    sim, init = {}, {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        target, conv = _KEYS[key]
        try:
            parsed = conv(value)
        except ValueError:
            raise ConfigurationError(
                f"line {lineno}: cannot parse {key} = {value!r} as {conv.__name__}") from None
        (sim if target == "sim" else init)[_INIT_NAMES.get(key, key)] = parsed
        lines[key] = lineno
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _KEYS:
            raise ConfigurationError(f"unknown override {key!r}")
        target, _ = _KEYS[key]
        (sim if target == "sim" else init)[_INIT_NAMES.get(key, key)] = value
        lines[key] = "override"
    try:
        spec = InitialDataSpec(**init)
        cfg = SimConfig(initial_data=spec, **sim)
    except ConfigurationError as exc:
        where = _blame(str(exc), lines)
        raise ConfigurationError(f"{where}{exc}") from None
    if cfg.out_of_hypothesis:
        cfg = replace(cfg, allow_out_of_hypothesis=True)
    return cfg


def _blame(message, lines):
    for key, lineno in lines.items():
        if message.startswith(key) or f" {key} " in message or message.startswith(_INIT_NAMES.get(key, key)):
            return f"line {lineno} ({key}): " if lineno != "override" else f"{key}: "
    return ""
