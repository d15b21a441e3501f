import copy
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import structlog
import toml

from microgarch import exc, presets
from microgarch.context import RunContext
from microgarch.params import MicroParams

LOG = structlog.get_logger(__name__)

# the type each leaf key must have, by section
_SCHEMA: dict[str, dict[str, type | tuple[type, ...]]] = {
    "market": {
        "rho": (int, float),
        "k": (int, float),
        "s_liquidity": (int, float),
        "p1": (int, float),
        "p2": (int, float),
        "lambda": (int, float),
        "gamma": (int, float),
        "g_fn": str,
        "h_fn": str,
    },
    "simulation": {
        "length": int,
        "burn_in": int,
        "seeds": list,
        "workers": int,
    },
    "stats": {
        "significance": (int, float),
        "lags": list,
        "ljung_box_lags": int,
    },
    "output": {
        "directory": str,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment: the market and how to simulate, test and store it."""

    market: MicroParams
    length: int
    burn_in: int
    seeds: tuple[int, ...]
    workers: int
    significance: float
    lags: tuple[int, ...]
    ljung_box_lags: int
    output_dir: Path

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from a merged configuration. The dictionary must already follow the
        schema, see :func:`check_schema`.

        :raises InvalidParameter: If a value is out of range.
        :raises NonStationaryParams: If the market is not stationary.
        """
        sim = raw["simulation"]
        stats = raw["stats"]

        def require(ok: bool, name: str, value: Any, reason: str) -> None:
            if not ok:
                raise exc.InvalidParameter(name=name, value=value, reason=reason)

        require(sim["length"] >= 1, "length", sim["length"], "must be >= 1")
        require(sim["burn_in"] >= 0, "burn_in", sim["burn_in"], "must be >= 0")
        require(sim["workers"] >= 1, "workers", sim["workers"], "must be >= 1")
        require(
            bool(sim["seeds"])
            and all(isinstance(s, int) and s >= 0 for s in sim["seeds"]),
            "seeds",
            sim["seeds"],
            "must be a non-empty list of non-negative integers",
        )
        require(
            0 < stats["significance"] < 1,
            "significance",
            stats["significance"],
            "must be in (0, 1)",
        )
        require(
            all(isinstance(lag, int) and lag >= 1 for lag in stats["lags"]),
            "lags",
            stats["lags"],
            "must be positive integers",
        )
        require(
            stats["ljung_box_lags"] >= 1,
            "ljung_box_lags",
            stats["ljung_box_lags"],
            "must be >= 1",
        )

        return cls(
            market=MicroParams.from_dict(raw["market"]),
            length=sim["length"],
            burn_in=sim["burn_in"],
            seeds=tuple(sim["seeds"]),
            workers=sim["workers"],
            significance=float(stats["significance"]),
            lags=tuple(stats["lags"]),
            ljung_box_lags=stats["ljung_box_lags"],
            output_dir=Path(raw["output"]["directory"]),
        )


def check_schema(raw: Mapping[str, Any], *, path: Optional[str] = None) -> None:
    """Reject unknown sections, unknown keys and values of the wrong type.

    :raises ConfigError: Naming the first offending key.
    """
    ctx = RunContext(path=path)
    for section, values in raw.items():
        if section not in _SCHEMA:
            raise exc.ConfigError(reason="unknown section", key=section, ctx=ctx)
        if not isinstance(values, dict):
            raise exc.ConfigError(reason="expected a table", key=section, ctx=ctx)
        for key, value in values.items():
            dotted = f"{section}.{key}"
            if key not in _SCHEMA[section]:
                raise exc.ConfigError(reason="unknown key", key=dotted, ctx=ctx)
            expected = _SCHEMA[section][key]
            # bool is an int to isinstance, but never a valid number here
            if isinstance(value, bool) or not isinstance(value, expected):
                raise exc.ConfigError(
                    reason=f"wrong type {type(value).__name__}", key=dotted, ctx=ctx
                )


def _merge(base: dict[str, Any], layer: Mapping[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for section, values in layer.items():
        merged.setdefault(section, {}).update(values)
    return merged


def config_path(
    explicit: Optional[str], environ: Mapping[str, str] = os.environ
) -> Optional[str]:
    """The config file to read: the explicit one, else the one named by the
    ``MICROGARCH_CONFIG`` environment variable, else none."""
    if explicit is not None:
        return explicit
    return environ.get(presets.config_env_var) or None


def load_raw(path: Optional[str]) -> dict[str, Any]:
    """The built-in defaults overlaid with a config file.

    :param path: The TOML file, or None for the defaults alone.
    :raises ConfigError: If the file is missing, unparsable, or off-schema.
    """
    raw = copy.deepcopy(presets.DEFAULT_CONFIG)
    if path is None:
        return raw

    ctx = RunContext(path=path)
    try:
        with open(path, "r") as h:
            layer = toml.load(h)
    except FileNotFoundError as e:
        raise exc.ConfigError(reason=f"no such file {path}", ctx=ctx) from e
    except OSError as e:
        raise exc.ConfigError(reason=f"cannot read {path}", ctx=ctx) from e
    except toml.TomlDecodeError as e:
        raise exc.ConfigError(reason=f"not valid TOML: {e}", ctx=ctx) from e

    check_schema(layer, path=path)
    LOG.debug("Loaded config file", path=path)
    return _merge(raw, layer)


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
) -> ExperimentConfig:
    """Resolve an experiment: defaults, then the config file, then the overrides.

    :param path: The TOML file, or None for the defaults alone.
    :param overrides: Values by section and key, e.g. ``{"market": {"p1": 0.0}}``.
    :raises ConfigError: If the file or an override is off-schema.
    :raises InvalidParameter: If a value is out of range.
    :raises NonStationaryParams: If the market is not stationary.
    """
    raw = load_raw(path)
    if overrides:
        check_schema(overrides)
        raw = _merge(raw, overrides)
    return ExperimentConfig.from_dict(raw)
