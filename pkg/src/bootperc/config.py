"""TOML experiment files -> validated ExperimentConfig.

Layout::

    [graph]     n = 20000, p = 0.01  (or c = 200), method = "auto"
    [init]      exactly one of a0 / theta / q
    [rule]      variant = "majority" | "proportional" | "classical", alpha, r, strict
    [ensemble]  runs, base_seed = 0, almost = 0.99, eps = 0.1, budget
    [sweep]     param = "q", values = [...]  or  start / stop / step
"""

from __future__ import annotations

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import ActivationRule
from .graph import InvalidParameter
from .harness import DEFAULT_BUDGET, ExperimentConfig

SECTIONS = {
    "graph": {"n", "p", "c", "method"},
    "init": {"a0", "theta", "q"},
    "rule": {"variant", "alpha", "r", "strict"},
    "ensemble": {"runs", "base_seed", "almost", "eps", "budget"},
    "sweep": {"param", "values", "start", "stop", "step"},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _typed(sec: dict, key: str, kind, where: str, default=None):
    if key not in sec:
        return default
    v = sec[key]
    if kind is float and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    if kind is int and isinstance(v, float) and v.is_integer():
        v = int(v)
    if not isinstance(v, kind) or (kind is not bool and isinstance(v, bool)):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {type(v).__name__}")
    return v


def _require(sec, key, kind, where):
    if key not in sec:
        raise ConfigError(f"{where}.{key}: required key missing")
    return _typed(sec, key, kind, where)


def _grid(sw: dict) -> tuple[float, ...]:
    if "values" in sw:
        vals = sw["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("sweep.values: expected a non-empty list")
        try:
            return tuple(float(v) for v in vals)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"sweep.values: {e}") from None
    start = _require(sw, "start", float, "sweep")
    stop = _require(sw, "stop", float, "sweep")
    step = _require(sw, "step", float, "sweep")
    if step <= 0 or stop < start:
        raise ConfigError("sweep.step: need step > 0 and stop >= start")
    k = int(round((stop - start) / step))
    return tuple(round(start + i * step, 12) for i in range(k + 1))


def config_from_mapping(doc: dict, need_sweep: bool = False) -> ExperimentConfig:
    for sec, val in doc.items():
        if sec not in SECTIONS:
            raise ConfigError(f"{sec}: unknown section")
        if not isinstance(val, dict):
            raise ConfigError(f"{sec}: expected a table")
        for key in val:
            if key not in SECTIONS[sec]:
                raise ConfigError(f"{sec}.{key}: unknown key")
    graph = doc.get("graph", {})
    init = doc.get("init", {})
    rule = doc.get("rule", {})
    ens = doc.get("ensemble", {})
    sweep = doc.get("sweep")

    n = _require(graph, "n", int, "graph")
    if n < 1:
        raise ConfigError("graph.n: must be >= 1")
    if ("p" in graph) == ("c" in graph):
        raise ConfigError("graph.p: give exactly one of p or c")
    p = _typed(graph, "p", float, "graph")
    if p is None:
        p = _typed(graph, "c", float, "graph") / n
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"graph.p: {p} outside [0, 1]")

    init_keys = [k for k in ("a0", "theta", "q") if k in init]
    if len(init_keys) > 1:
        raise ConfigError(f"init.{init_keys[1]}: mutually exclusive with init.{init_keys[0]}")
    sweep_param = sweep.get("param") if sweep else None
    if not init_keys and sweep_param not in ("a0", "theta", "q"):
        raise ConfigError("init.a0: one of a0 / theta / q is required")
    init_kw = {}
    if init_keys:
        k = init_keys[0]
        init_kw[k] = _typed(init, k, int if k == "a0" else float, "init")

    variant = _typed(rule, "variant", str, "rule", "majority")
    strict = _typed(rule, "strict", bool, "rule", False)
    try:
        if variant == "majority":
            act = ActivationRule.majority(strict)
        elif variant == "proportional":
            act = ActivationRule.proportional(_require(rule, "alpha", float, "rule"), strict)
        elif variant == "classical":
            act = ActivationRule.classical(_require(rule, "r", int, "rule"))
        else:
            raise ConfigError(f"rule.variant: unknown variant {variant!r}")
    except InvalidParameter as e:
        raise ConfigError(f"rule: {e}") from None

    sweep_kw = {}
    if sweep is not None:
        if sweep_param not in ("a0", "theta", "q", "p", "c"):
            raise ConfigError(f"sweep.param: cannot sweep {sweep_param!r}")
        sweep_kw = {"sweep_param": sweep_param, "sweep_values": _grid(sweep)}
        if not init_kw:
            first = sweep_kw["sweep_values"][0]
            init_kw[sweep_param] = int(first) if sweep_param == "a0" else first
    elif need_sweep:
        raise ConfigError("sweep: section required for sweep")

    try:
        return ExperimentConfig(
            n=n, p=p,
            runs=_require(ens, "runs", int, "ensemble"),
            rule=act,
            base_seed=_typed(ens, "base_seed", int, "ensemble", 0),
            almost_percolation_fraction=_typed(ens, "almost", float, "ensemble", 0.99),
            eps=_typed(ens, "eps", float, "ensemble", 0.1),
            budget=_typed(ens, "budget", int, "ensemble", DEFAULT_BUDGET),
            method=_typed(graph, "method", str, "graph", "auto"),
            **init_kw, **sweep_kw,
        )
    except InvalidParameter as e:
        raise ConfigError(str(e)) from None


def load_config(path, need_sweep: bool = False) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None
    return config_from_mapping(doc, need_sweep)


def config_from_dict(d: dict) -> ExperimentConfig:
    """Inverse of ``ExperimentConfig.to_dict`` (used to re-read JSON summaries)."""
    d = dict(d)
    r = d.pop("rule")
    if r["variant"] == "classical":
        rule = ActivationRule.classical(r["r"])
    elif r["variant"] == "proportional":
        from fractions import Fraction
        rule = ActivationRule.proportional(Fraction(r["alpha"]), r["strict_majority"])
    else:
        rule = ActivationRule.majority(r["strict_majority"])
    if d.get("sweep_values") is not None:
        d["sweep_values"] = tuple(d["sweep_values"])
    return ExperimentConfig(rule=rule, **d)
