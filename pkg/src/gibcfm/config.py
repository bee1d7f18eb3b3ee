"""Run configuration: JSON schema, defaults and conversion to library objects."""

import copy
import hashlib
import json

import jsonschema

from .errors import ConfigError
from .factorization import ALT_THETAS, DEFAULT_THETAS, GridSpec
from .forward import ScatteringConfig
from .geometry import curve_from_dict
from .surface import ImpedanceParams

DEFAULTS = {
    "geometry": {"kind": "kite"},
    "impedance": {"mu": {"re": 0.1, "im": 0.0}, "lambda": {"re": 0.0, "im": 0.0}},
    "k": 2.0,
    "n": 50,
    "m": 128,
    "coupling": None,
    "noise": {"eta": 0.01, "seed": 0},
    "inversion": {
        "bounds": [-3.0, 3.0, -3.0, 3.0],
        "resolution": 80,
        "delta": "auto",
        "theta_set": "paper",
        "imag_abs": True,
    },
    "output": {
        "dir": "out",
        "farfield": "farfield.txt",
        "farfield_noisy": "farfield_noisy.txt",
        "csv": "indicator.csv",
        "pgm": "indicator.pgm",
        "manifest": "manifest.json",
    },
}

_number_list = {"type": "array", "items": {"type": "number"}}
_coefficient = {
    "oneOf": [
        {"type": "number"},
        {"type": "object", "additionalProperties": False,
         "properties": {"re": {"type": "number"}, "im": {"type": "number"}}},
        {"type": "object", "additionalProperties": False, "minProperties": 1,
         "properties": {"cos_re": _number_list, "cos_im": _number_list,
                        "sin_re": _number_list, "sin_im": _number_list}},
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "geometry": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["kite", "circle", "ellipse", "custom"]},
                "R": {"type": "number", "exclusiveMinimum": 0},
                "a": {"type": "number", "exclusiveMinimum": 0},
                "b": {"type": "number", "exclusiveMinimum": 0},
                "cos_x": _number_list, "sin_x": _number_list,
                "cos_y": _number_list, "sin_y": _number_list,
            },
            "additionalProperties": False,
        },
        "impedance": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"mu": _coefficient, "lambda": _coefficient},
        },
        "k": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 8},
        "m": {"type": "integer", "minimum": 64, "multipleOf": 2},
        "coupling": {"type": ["number", "null"]},
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eta": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
            },
        },
        "inversion": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bounds": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
                "resolution": {"type": "integer", "minimum": 2},
                "delta": {"oneOf": [{"const": "auto"}, {"type": "number", "exclusiveMinimum": 0}]},
                "theta_set": {"oneOf": [{"enum": ["paper", "alt"]},
                                        {"type": "array", "items": {"type": "number"}, "minItems": 1}]},
                "imag_abs": {"type": "boolean"},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {key: {"type": "string"} for key in DEFAULTS["output"]},
        },
    },
}


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict) and key != "geometry":
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def validate(doc):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = [f"{_pointer(e.absolute_path)}: {e.message}" for e in errors]
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(msgs))


def resolve(doc=None):
    """Validate a (partial) config document and fill in defaults."""
    doc = {} if doc is None else doc
    if not isinstance(doc, dict):
        raise ConfigError("/: configuration must be a JSON object")
    validate(doc)
    cfg = _merge(DEFAULTS, doc)
    validate(cfg)
    b = cfg["inversion"]["bounds"]
    if not (b[1] > b[0] and b[3] > b[2]):
        raise ConfigError("/inversion/bounds: need xmin < xmax and ymin < ymax")
    return cfg


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return resolve(doc)


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def scattering_config(cfg):
    try:
        curve = curve_from_dict(cfg["geometry"])
        imp = ImpedanceParams.from_json(cfg["impedance"])
        return ScatteringConfig(curve, imp, float(cfg["k"]), int(cfg["n"]), int(cfg["m"]),
                                cfg.get("coupling"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def theta_set(cfg):
    spec = cfg["inversion"]["theta_set"]
    if spec == "paper":
        return DEFAULT_THETAS
    if spec == "alt":
        return ALT_THETAS
    return tuple(float(t) for t in spec)


def grid_spec(cfg):
    inv = cfg["inversion"]
    x0, x1, y0, y1 = inv["bounds"]
    return GridSpec(x0, x1, y0, y1, int(inv["resolution"]))


def delta_value(cfg):
    d = cfg["inversion"]["delta"]
    return d if d == "auto" else float(d)

