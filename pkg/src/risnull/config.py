"""Declarative experiment configuration (YAML) with dotted-key overrides.

Resolution order: built-in defaults, the command preset, the config file,
then ``--set`` overrides. Overrides use ``section.key=value`` or a bare
``key=value`` when the key name is unique across sections. Values are
parsed as YAML scalars, so ``-.inf``, ``null`` and ``[1, 2]`` all work.
"""

from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .channel import ChannelError, ChannelModelSpec, RisGeometry
from .units import dbm_to_watt
from .utility import LinkBudget

__all__ = [
    "ConfigError",
    "NetworkConfig",
    "SolverConfig",
    "SweepSpec",
    "ExperimentConfig",
    "ResolvedConfig",
    "PRESETS",
    "SCHEMES",
    "NULL_SCHEMES",
    "MINRATE_SCHEMES",
    "jsonable",
    "parse_config",
]

SCHEMES = ("ap-random", "ap-eigen", "rcg-random", "ap-random+rcg", "ap-eigen+rcg")
NULL_SCHEMES = ("ap-random", "ap-eigen", "pgd-random")
MINRATE_SCHEMES = ("zf", "subgradient")


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class NetworkConfig:
    """Network geometry, link budget and channel model. Units as named."""

    K: int = 8
    n1: int = 12
    n2: int = 12
    d1: float = 0.05
    d2: float = 0.05
    wavelength: float = 0.1
    tx_power_dbm: float = 30.0
    noise_psd_dbm_hz: float = -170.0
    bandwidth_hz: float = 10e6
    ris_position: typing.List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    tx_region: typing.List[typing.List[float]] = field(default_factory=lambda: [[5.0, 45.0], [-45.0, -5.0]])
    rx_region: typing.List[typing.List[float]] = field(default_factory=lambda: [[5.0, 45.0], [5.0, 45.0]])
    user_z: float = -20.0
    kind: str = "rician"
    rician_factor: float = 10.0
    path_count: int = 5
    direct_pathloss_db: typing.Optional[float] = None

    @property
    def N(self) -> int:
        return self.n1 * self.n2

    @property
    def noise_power_w(self) -> float:
        return float(dbm_to_watt(self.noise_psd_dbm_hz + 10 * math.log10(self.bandwidth_hz)))

    @property
    def noise_power_dbm(self) -> float:
        return self.noise_psd_dbm_hz + 10 * math.log10(self.bandwidth_hz)

    @property
    def power_w(self) -> float:
        return float(dbm_to_watt(self.tx_power_dbm))

    def geometry(self, n1=None, n2=None) -> RisGeometry:
        return RisGeometry(n1 or self.n1, n2 or self.n2, self.d1, self.d2, self.wavelength)

    def channel_spec(self) -> ChannelModelSpec:
        return ChannelModelSpec(self.kind, self.rician_factor, self.path_count)

    def budget(self, K=None, tx_power_dbm=None) -> LinkBudget:
        p = dbm_to_watt(self.tx_power_dbm if tx_power_dbm is None else tx_power_dbm)
        return LinkBudget.uniform(K or self.K, p, self.noise_power_w, self.bandwidth_hz)

    def placement_kwargs(self) -> dict:
        return {
            "tx_region": self.tx_region,
            "rx_region": self.rx_region,
            "user_z": self.user_z,
            "ris_position": self.ris_position,
        }


@dataclass
class SolverConfig:
    ap_max_iters: int = 5000
    pgd_max_iters: int = 50000
    pgd_alpha: float = 0.3
    pgd_beta: float = 0.8
    isr_threshold_db: float = -60.0
    isr_weighted: bool = True
    rcg_max_iters: int = 1000
    rcg_tol: typing.Optional[float] = None
    subgradient_step: float = 0.05
    subgradient_max_iters: int = 10000
    subgradient_patience: int = 1000
    init_mode: str = "eigen"


@dataclass
class SweepSpec:
    parameter: str = "tx_power_dbm"
    values: typing.List[float] = field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0, 40.0])
    trials: int = 100
    base_seed: int = 0
    schemes: typing.List[str] = field(default_factory=lambda: list(SCHEMES))


@dataclass
class ExperimentConfig:
    """Command-specific knobs."""

    K_list: typing.List[int] = field(default_factory=lambda: [2, 3, 4])
    N_list: typing.List[int] = field(default_factory=lambda: list(range(1, 41)))
    pathloss_list: typing.List[float] = field(default_factory=lambda: [-math.inf, -130.0, -123.0, -120.0])
    sides: typing.List[int] = field(default_factory=lambda: [4, 6])
    methods: typing.List[str] = field(default_factory=lambda: ["ap", "pgd"])
    trace_threshold_db: float = -50.0
    method: str = "two-stage"
    fixture: typing.Optional[str] = None


@dataclass
class ResolvedConfig:
    network: NetworkConfig
    solver: SolverConfig
    sweep: SweepSpec
    experiment: ExperimentConfig

    def to_dict(self) -> dict:
        return {name: dataclasses.asdict(getattr(self, name)) for name in _SECTIONS}


_SECTIONS = {
    "network": NetworkConfig,
    "solver": SolverConfig,
    "sweep": SweepSpec,
    "experiment": ExperimentConfig,
}

_ladder = [-120.0 + 10 * math.log10(x / 10) for x in range(1, 21)]

PRESETS = {
    "null": {
        "sweep.parameter": "N",
        "sweep.values": [96.0, 120.0, 144.0],
        "sweep.schemes": ["ap-random", "ap-eigen"],
    },
    "solve-one": {},
    "sumrate": {
        "sweep.parameter": "tx_power_dbm",
        "sweep.values": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
    },
    "minrate": {
        "network.K": 4,
        "sweep.parameter": "tx_power_dbm",
        "sweep.values": [0.0, 10.0, 20.0, 30.0, 40.0],
        "sweep.schemes": ["zf", "subgradient"],
    },
    "phase-transition": {"experiment.K_list": [2, 3, 4], "experiment.N_list": list(range(1, 41))},
    "convergence": {"network.K": 8, "network.n1": 12, "network.n2": 12},
    "direct-study": {
        "network.K": 8,
        "experiment.N_list": [135],
        "experiment.pathloss_list": _ladder,
    },
}

_SWEEP_PARAMETERS = ("N", "K", "tx_power_dbm", "direct_pathloss_db")


def _key_index():
    index = {}
    for section, cls in _SECTIONS.items():
        for f in dataclasses.fields(cls):
            index.setdefault(f.name, []).append(section)
    return index


def _resolve_key(key):
    if "." in key:
        section, name = key.split(".", 1)
        cls = _SECTIONS.get(section)
        if cls is None or name not in {f.name for f in dataclasses.fields(cls)}:
            raise ConfigError(key, "unknown configuration key")
        return section, name
    owners = _key_index().get(key)
    if not owners:
        raise ConfigError(key, "unknown configuration key")
    if len(owners) > 1:
        raise ConfigError(key, f"ambiguous key; use one of {[o + '.' + key for o in owners]}")
    return owners[0], key


def _coerce(value, hint, key):
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is typing.Union:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)][0]
        return _coerce(value, inner, key)
    if origin in (list, typing.List):
        if isinstance(value, (str, bytes)) or not isinstance(value, (list, tuple)):
            raise ConfigError(key, f"expected a list, got {value!r}")
        return [_coerce(v, args[0], key) for v in value]
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    if hint is float:
        if isinstance(value, str):
            # YAML 1.1 reads "1e6" and "inf" as strings
            try:
                return float(value)
            except ValueError:
                raise ConfigError(key, f"expected a number, got {value!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    raise ConfigError(key, f"unsupported type {hint}")


def _parse_override(item):
    if "=" not in item:
        raise ConfigError(item, "override must look like key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    try:
        value = yaml.safe_load(raw) if raw.strip() else ""
    except yaml.YAMLError:
        value = raw
    return key, value


def _apply(sections, key, value):
    section, name = _resolve_key(key)
    hints = typing.get_type_hints(_SECTIONS[section])
    sections[section][name] = _coerce(value, hints[name], f"{section}.{name}")


def _validate(cfg: ResolvedConfig):
    net, sol, sw, ex = cfg.network, cfg.solver, cfg.sweep, cfg.experiment
    checks = [
        ("network.K", net.K >= 1, "must be >= 1"),
        ("network.n1", net.n1 >= 1, "must be >= 1"),
        ("network.n2", net.n2 >= 1, "must be >= 1"),
        ("network.d1", net.d1 > 0, "must be positive"),
        ("network.d2", net.d2 > 0, "must be positive"),
        ("network.wavelength", net.wavelength > 0, "must be positive"),
        ("network.bandwidth_hz", net.bandwidth_hz > 0, "must be positive"),
        ("network.ris_position", len(net.ris_position) == 3, "needs 3 coordinates"),
        ("network.rician_factor", net.rician_factor >= 0, "must be >= 0"),
        ("network.path_count", net.path_count >= 1, "must be >= 1"),
        ("solver.ap_max_iters", sol.ap_max_iters >= 1, "must be >= 1"),
        ("solver.pgd_alpha", 0 < sol.pgd_alpha < 0.5, "must lie in (0, 0.5)"),
        ("solver.pgd_beta", 0 < sol.pgd_beta < 1, "must lie in (0, 1)"),
        ("solver.subgradient_step", sol.subgradient_step > 0, "must be positive"),
        ("solver.init_mode", sol.init_mode in ("random", "eigen"), "must be 'random' or 'eigen'"),
        ("sweep.parameter", sw.parameter in _SWEEP_PARAMETERS, f"must be one of {_SWEEP_PARAMETERS}"),
        ("sweep.values", len(sw.values) > 0, "must be non-empty"),
        ("sweep.trials", sw.trials >= 1, "must be >= 1"),
        ("sweep.base_seed", sw.base_seed >= 0, "must be >= 0"),
        ("experiment.K_list", len(ex.K_list) > 0 and min(ex.K_list) >= 1, "needs values >= 1"),
        ("experiment.N_list", len(ex.N_list) > 0 and min(ex.N_list) >= 1, "needs values >= 1"),
        ("experiment.method", ex.method in ("ap", "pgd", "two-stage", "minrate"), "unknown solve-one method"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(key, msg)
    for region in ("tx_region", "rx_region"):
        r = getattr(net, region)
        if len(r) != 2 or any(len(iv) != 2 or iv[0] > iv[1] for iv in r):
            raise ConfigError(f"network.{region}", "expected [[xmin, xmax], [ymin, ymax]]")
    try:
        net.channel_spec()
    except ChannelError as exc:
        raise ConfigError("network.kind", str(exc)) from None
    for s in sw.schemes:
        if s not in SCHEMES + NULL_SCHEMES + MINRATE_SCHEMES:
            raise ConfigError("sweep.schemes", f"unknown scheme {s!r}")
    for m in ex.methods:
        if m not in ("ap", "pgd"):
            raise ConfigError("experiment.methods", f"unknown method {m!r}")


def parse_config(path=None, overrides=(), command=None) -> ResolvedConfig:
    """Load ``path`` (YAML mapping of sections), apply preset and overrides, validate."""
    sections = {name: {} for name in _SECTIONS}
    for key, value in PRESETS.get(command, {}).items():
        _apply(sections, key, value)
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(str(path), f"invalid YAML: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(str(path), "top level must be a mapping of sections")
        for section, body in data.items():
            if section not in _SECTIONS:
                # allow flat files: treat as bare key
                _apply(sections, section, body)
                continue
            if not isinstance(body, dict):
                raise ConfigError(section, "section must be a mapping")
            for name, value in body.items():
                _apply(sections, f"{section}.{name}", value)
    for item in overrides:
        _apply(sections, *_parse_override(item))
    cfg = ResolvedConfig(**{name: cls(**sections[name]) for name, cls in _SECTIONS.items()})
    _validate(cfg)
    return cfg


def jsonable(obj):
    """Recursively convert numpy types and non-finite floats for JSON output."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
