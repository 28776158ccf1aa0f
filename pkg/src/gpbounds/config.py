"""Experiment configuration: JSON loading, strict validation, canonical hashing."""

from __future__ import annotations

import hashlib
import json

from .errors import ConfigError

KINDS = ("greedy", "gp-concentration", "chi2", "spheres", "bound-table")

_KERNEL_FAMILIES = ("matern", "gaussian")
_WEIGHT_FAMILIES = ("geometric", "polynomial", "explicit", "explicit-random")
_DECAY_MODELS = ("polynomial", "exponential")


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def _type(cfg, key, types, what=None):
    v = cfg[key]
    if isinstance(v, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ConfigError(f"{what or key} must not be a boolean")
    if not isinstance(v, types):
        raise ConfigError(f"{what or key} has wrong type {type(v).__name__}")
    return v


def _require(cfg, key, types, what=None):
    if key not in cfg:
        raise ConfigError(f"missing required config key {key!r}")
    return _type(cfg, key, types, what)


def _default(cfg, key, value):
    cfg.setdefault(key, value)
    return cfg[key]


def _positive_list(cfg, key, *, integer=False, minimum=None):
    vals = _require(cfg, key, list)
    if not vals:
        raise ConfigError(f"{key} must be a nonempty list")
    out = []
    for v in vals:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key} entries must be numbers")
        if integer and int(v) != v:
            raise ConfigError(f"{key} entries must be integers")
        if minimum is not None and v < minimum:
            raise ConfigError(f"{key} entries must be >= {minimum}")
        out.append(int(v) if integer else float(v))
    cfg[key] = out
    return out


def _check_keys(cfg: dict, allowed: set, where: str):
    extra = set(cfg) - allowed
    if extra:
        raise ConfigError(f"unknown {where} key(s): {', '.join(sorted(extra))}")


def _validate_kernel(k) -> dict:
    if not isinstance(k, dict):
        raise ConfigError("kernel must be an object")
    fam = k.get("family")
    if fam not in _KERNEL_FAMILIES:
        raise ConfigError(f"kernel family must be one of {_KERNEL_FAMILIES}")
    if fam == "matern":
        _check_keys(k, {"family", "s", "d"}, "kernel")
        _default(k, "d", 1)
        _require(k, "s", (int, float))
        _type(k, "d", int)
        if k["d"] < 1 or k["s"] <= k["d"]:
            raise ConfigError("matern kernel needs d >= 1 and s > d")
        k["s"] = float(k["s"])
    else:
        _check_keys(k, {"family", "d"}, "kernel")
        _default(k, "d", 1)
        _type(k, "d", int)
        if k["d"] < 1:
            raise ConfigError("gaussian kernel needs d >= 1")
    return k


def _validate_weight_family(f) -> dict:
    if not isinstance(f, dict):
        raise ConfigError("weight family must be an object")
    fam = f.get("family")
    if fam not in _WEIGHT_FAMILIES:
        raise ConfigError(f"weight family must be one of {_WEIGHT_FAMILIES}")
    if fam == "geometric":
        _check_keys(f, {"family", "ratio", "scale"}, "weight family")
        _require(f, "ratio", (int, float))
        _default(f, "scale", 1.0)
        if not 0 < f["ratio"] < 1:
            raise ConfigError("geometric ratio must be in (0,1)")
    elif fam == "polynomial":
        _check_keys(f, {"family", "power", "scale"}, "weight family")
        _require(f, "power", (int, float))
        _default(f, "scale", 1.0)
        if f["power"] <= 1:
            raise ConfigError("polynomial weight power must be > 1")
    elif fam == "explicit":
        _check_keys(f, {"family", "values"}, "weight family")
        vals = _require(f, "values", list)
        if not vals or any(isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0
                           for v in vals):
            raise ConfigError("explicit weights must be a nonempty list of numbers >= 0")
        f["values"] = [float(v) for v in vals]
    else:  # explicit-random
        _check_keys(f, {"family", "size"}, "weight family")
        _require(f, "size", int)
        if f["size"] < 1:
            raise ConfigError("explicit-random size must be >= 1")
    return f


def _validate_decay(dk) -> dict:
    if not isinstance(dk, dict):
        raise ConfigError("decay entry must be an object")
    model = dk.get("model")
    if model == "polynomial":
        _check_keys(dk, {"model", "C", "alpha"}, "decay")
        if _require(dk, "C", (int, float)) <= 0 or _require(dk, "alpha", (int, float)) <= 1:
            raise ConfigError("polynomial decay needs C > 0, alpha > 1")
    elif model == "polynomial-multi":
        _check_keys(dk, {"model", "C", "alpha", "C_d", "beta"}, "decay")
        for key in ("C", "alpha", "C_d", "beta"):
            _require(dk, key, (int, float))
        if dk["C"] <= 0 or dk["C_d"] <= 0 or dk["beta"] < 0 or dk["alpha"] <= 1 + dk["beta"]:
            raise ConfigError("polynomial-multi decay needs C, C_d > 0, beta >= 0, alpha > 1+beta")
    elif model == "exponential":
        _check_keys(dk, {"model", "C1", "C2", "alpha"}, "decay")
        _default(dk, "alpha", 1.0)
        for key in ("C1", "C2", "alpha"):
            _require(dk, key, (int, float))
        if dk["C1"] <= 0 or dk["C2"] <= 0 or dk["alpha"] < 1:
            raise ConfigError("exponential decay needs C1, C2 > 0, alpha >= 1")
    else:
        raise ConfigError("decay model must be polynomial | polynomial-multi | exponential")
    return dk


def validate_config(cfg: dict) -> dict:
    """Validate and normalize a raw config dict (strict: unknown keys fail)."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be an object")
    cfg = json.loads(json.dumps(cfg))  # deep copy, JSON-clean
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}")
    _require(cfg, "seed", int)
    if not 0 <= cfg["seed"] < 2**64:
        raise ConfigError("seed must fit in u64")

    common = {"kind", "seed", "out"}
    if kind == "greedy":
        _check_keys(cfg, common | {"kernel", "grid_size", "n_max", "decay_model", "fit_floor"},
                    "greedy")
        cfg["kernel"] = _validate_kernel(_require(cfg, "kernel", dict))
        _default(cfg, "grid_size", 513)
        _default(cfg, "n_max", cfg["grid_size"])
        _default(cfg, "fit_floor", 1.0e-12)
    elif kind == "gp-concentration":
        _check_keys(cfg, common | {"kernel", "grid_size", "n_schedule", "taus", "M",
                                   "decay_model", "tail_budget", "fit_floor"}, "gp-concentration")
        cfg["kernel"] = _validate_kernel(_require(cfg, "kernel", dict))
        _default(cfg, "grid_size", 513)
        _positive_list(cfg, "n_schedule", integer=True, minimum=1)
        _positive_list(cfg, "taus", minimum=1e-12)
        _require(cfg, "M", int)
        if cfg["M"] < 0:
            raise ConfigError("M must be >= 0")
        _default(cfg, "tail_budget", 1.0e-9)
        _default(cfg, "fit_floor", 1.0e-12)
    elif kind == "chi2":
        _check_keys(cfg, common | {"families", "taus", "M"}, "chi2")
        fams = _require(cfg, "families", list)
        if not fams:
            raise ConfigError("families must be nonempty")
        cfg["families"] = [_validate_weight_family(f) for f in fams]
        _positive_list(cfg, "taus", minimum=1e-12)
        _require(cfg, "M", int)
        if cfg["M"] < 1000:
            raise ConfigError("chi2 needs M >= 1000")
    elif kind == "spheres":
        _check_keys(cfg, common | {"d1", "d2", "C", "alpha", "J_max", "tail_budget",
                                   "n_schedule", "taus", "M", "opnorm_check"}, "spheres")
        for key, dflt in (("d1", 1), ("d2", 1), ("C", 1.0), ("alpha", 1.0), ("J_max", 64)):
            _default(cfg, key, dflt)
        if cfg["d1"] not in (1, 2) or cfg["d2"] not in (1, 2):
            raise ConfigError("d1, d2 must be 1 or 2")
        if cfg["C"] <= 0 or cfg["alpha"] <= 0:
            raise ConfigError("need C > 0 and alpha > 0")
        _type(cfg, "J_max", int)
        _default(cfg, "tail_budget", 5.0e-3)
        _default(cfg, "n_schedule", [2, 4, 8, 16])
        _positive_list(cfg, "n_schedule", integer=True, minimum=0)
        _default(cfg, "taus", [1.0, 2.0])
        _positive_list(cfg, "taus", minimum=1e-12)
        _default(cfg, "M", 2000)
        _require(cfg, "M", int)
        if cfg["M"] < 0:
            raise ConfigError("M must be >= 0")
        _default(cfg, "opnorm_check", True)
        _type(cfg, "opnorm_check", bool)
    else:  # bound-table
        _check_keys(cfg, common | {"decays", "n_schedule", "taus"}, "bound-table")
        decays = _require(cfg, "decays", list)
        if not decays:
            raise ConfigError("decays must be nonempty")
        cfg["decays"] = [_validate_decay(d) for d in decays]
        _positive_list(cfg, "n_schedule", integer=True, minimum=1)
        _positive_list(cfg, "taus", minimum=1e-12)

    if "decay_model" in cfg and kind in ("greedy", "gp-concentration"):
        if cfg["decay_model"] not in _DECAY_MODELS:
            raise ConfigError(f"decay_model must be one of {_DECAY_MODELS}")
    elif kind in ("greedy", "gp-concentration"):
        cfg["decay_model"] = ("polynomial" if cfg["kernel"]["family"] == "matern"
                              else "exponential")
    if "fit_floor" in cfg:
        _type(cfg, "fit_floor", (int, float))
        if not 0 < cfg["fit_floor"] < 1:
            raise ConfigError("fit_floor must be in (0,1)")
    if "tail_budget" in cfg:
        _type(cfg, "tail_budget", (int, float))
        if not 0 < cfg["tail_budget"] <= 0.05:
            raise ConfigError("tail_budget must be in (0, 0.05]")
    if "out" in cfg:
        _type(cfg, "out", str)
    return cfg


def canonical_json(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_sha256(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()
