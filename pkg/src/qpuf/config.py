"""Experiment configuration: TOML in, validated and defaults filled."""

import copy
import json
import sys
from importlib import resources

import jsonschema

from qpuf.polar.code import log4
from qpuf.profile import sha256_hex

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TABLE_ROWS = [
    {"p0": 0.25, "r": 0, "s": 64, "blocks": 1},
    {"p0": 0.265, "r": 15, "s": 49, "blocks": 2},
    {"p0": 0.268, "r": 15, "s": 49, "blocks": 2},
    {"p0": 0.271, "r": 15, "s": 49, "blocks": 2},
    {"p0": 0.274, "r": 15, "s": 49, "blocks": 2},
    {"p0": 0.277, "r": 15, "s": 49, "blocks": 2},
    {"p0": 0.28, "r": 15, "s": 49, "blocks": 2},
    {"p0": 0.28, "r": 16, "s": 48, "blocks": 2},
]

DEFAULTS = {
    "puf": {"lambda1": 0.1213, "lambda2": 0.0210, "trials": 1000},
    "quantizer": {"masses": [0.25, 0.25, 0.25, 0.25]},
    "channel": {"estimator": "quadrature", "cells": 1_000_000},
    "code": {"n": 256, "r": 15, "s": 49, "blocks": 1, "list_size": 4, "llr_clamp": 500.0, "key_bits": 128},
    "budgets": {"construction_frames": 100_000, "fer_frames": 10_000, "enumeration_cap": 16},
    "leakage": {"rows": TABLE_ROWS},
    "output": {"dir": "qpuf-out"},
}

# fields that change the construction profile
CONSTRUCTION_KEYS = (("seed",), ("puf",), ("quantizer",), ("channel",), ("code", "n"),
                     ("code", "llr_clamp"), ("budgets", "construction_frames"))


class ConfigError(ValueError):
    pass


def _schema():
    text = resources.files("qpuf").joinpath("schemas/config.schema.json").read_text()
    return json.loads(text)


def load_schema(name):
    return json.loads(resources.files("qpuf").joinpath(f"schemas/{name}.schema.json").read_text())


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate(raw):
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {e.message}") from None
    cfg = _merge(DEFAULTS, raw)
    if "thresholds" in raw.get("quantizer", {}):
        cfg["quantizer"].pop("masses", None)
    code = cfg["code"]
    try:
        log4(code["n"])
    except ValueError as e:
        raise ConfigError(f"code/n: {e}") from None
    if code["r"] + code["s"] > code["n"]:
        raise ConfigError(f"code: r + s = {code['r'] + code['s']} exceeds N = {code['n']}")
    q = cfg["quantizer"]
    if "masses" in q and abs(sum(q["masses"]) - 1.0) > 1e-9:
        raise ConfigError("quantizer/masses must sum to 1")
    if "thresholds" in q:
        a, b, c = q["thresholds"]
        if not 0 < a < b < c < 1:
            raise ConfigError("quantizer/thresholds must satisfy 0 < a < b < c < 1")
    for i, row in enumerate(cfg["leakage"]["rows"]):
        if ("p0" in row) == ("masses" in row):
            raise ConfigError(f"leakage/rows/{i}: give exactly one of p0 or masses")
    return cfg


def loads(text):
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML: {e}") from None
    return validate(raw)


def load(path):
    with open(path, "rb") as fh:
        text = fh.read().decode()
    return loads(text)


def config_hash(cfg):
    return sha256_hex(cfg)


def construction_config_hash(cfg):
    sub = {}
    for path in CONSTRUCTION_KEYS:
        v = cfg
        for k in path:
            v = v[k]
        sub["/".join(path)] = v
    return sha256_hex(sub)
