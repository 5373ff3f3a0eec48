"""Scenario files: strict line-oriented ``key = value`` format.

Sections in square brackets, ``#`` comments, decimal numbers with optional
exponent, expressions from the fixed catalog (``Const(c)``, ``Affine(a,b)``,
``SineMode(A,k)``, ``Poly(c0,c1,...)``).  Unknown keys are errors and every
error names its line.  Defaults below are part of the format contract:

    [scenario] kind = wave
    [motion]   kind = identity, reference = interval, length = 1.0,
               dim = 2, horizon = 1.0, level = 1.0, level_kind = radial
    [data]     u0 = SineMode(1.0, 1), u1 = Const(0.0), f = Const(0.0),
               kappa = Const(1.0); optional: u0_prime (coupled slope),
               f_time, w and w_time (boundary load and its time profile)
    [coupled]  l0 = 1.0, R = 2.0, rho0 = 0.5
    [numerics] solver = spectral, modes = 32, grid = 400, dt = 1e-3,
               partitions = 32, quad_nodes = 10, store_every = 1,
               front_grid = 1024, taper = 0.5, cfl = 0.45
    [output]   directory = out, series = ledger

The special token ``u1 = Compatible`` requests the initial velocity that
makes the transformed problem start at rest, u1 = -Phi_dot(0,.) . grad u0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MissingRequired, TypeMismatch, UnknownKey
from .expressions import Const, parse_expression

_FLOAT = "float"
_INT = "int"
_STR = "str"
_EXPR = "expr"
_LIST = "floatlist"

_SCHEMA = {
    "scenario": {"name": (_STR, None), "kind": (_STR, "wave")},
    "motion": {
        "kind": (_STR, "identity"),
        "reference": (_STR, "interval"),
        "length": (_FLOAT, 1.0),
        "radius": (_FLOAT, 1.0),
        "extents": (_LIST, (1.0,)),
        "normal": (_LIST, None),
        "dim": (_INT, 2),
        "profile": (_EXPR, None),
        "level": (_FLOAT, 1.0),
        "level_kind": (_STR, "radial"),
        "horizon": (_FLOAT, 1.0),
    },
    "data": {
        "u0": (_EXPR, "SineMode(1.0, 1)"),
        "u1": (_EXPR, "Const(0.0)"),
        "u0_prime": (_EXPR, None),
        "f": (_EXPR, "Const(0.0)"),
        "f_time": (_EXPR, None),
        "w": (_EXPR, None),
        "w_time": (_EXPR, None),
        "kappa": (_EXPR, "Const(1.0)"),
    },
    "coupled": {"l0": (_FLOAT, 1.0), "R": (_FLOAT, 2.0), "rho0": (_FLOAT, 0.5)},
    "numerics": {
        "solver": (_STR, "spectral"),
        "modes": (_INT, 32),
        "grid": (_INT, 400),
        "dt": (_FLOAT, 1.0e-3),
        "partitions": (_INT, 32),
        "quad_nodes": (_INT, 10),
        "store_every": (_INT, 1),
        "front_grid": (_INT, 1024),
        "taper": (_FLOAT, 0.5),
        "cfl": (_FLOAT, 0.45),
    },
    "output": {"directory": (_STR, "out"), "series": (_STR, "ledger")},
}

_ENUMS = {
    ("scenario", "kind"): {"wave", "coupled", "coupled_radial"},
    ("motion", "kind"): {"identity", "one_d_scaling", "homothetic", "sublevel_flow"},
    ("motion", "reference"): {"interval", "ball", "box", "tetrahedron"},
    ("motion", "level_kind"): {"radial", "reflected"},
    ("numerics", "solver"): {"spectral", "grid"},
}


@dataclass
class Scenario:
    """Fully resolved scenario: every schema key is present."""

    name: str
    kind: str
    motion: dict
    data: dict
    coupled: dict
    numerics: dict
    output: dict
    source: str = ""

    def manifest(self):
        from . import __version__
        from .backend import backend_name

        def _enc(v):
            if hasattr(v, "spec"):
                return v.spec()
            if isinstance(v, tuple):
                return list(v)
            return v

        return {
            "scenario": {"name": self.name, "kind": self.kind},
            "motion": {k: _enc(v) for k, v in self.motion.items()},
            "data": {k: _enc(v) for k, v in self.data.items()},
            "coupled": {k: _enc(v) for k, v in self.coupled.items()},
            "numerics": {k: _enc(v) for k, v in self.numerics.items()},
            "output": {k: _enc(v) for k, v in self.output.items()},
            "version": __version__,
            "backend": backend_name(),
        }


def _convert(section, key, raw, lineno):
    typ, _ = _SCHEMA[section][key]
    if typ == _STR:
        val = raw.strip()
        allowed = _ENUMS.get((section, key))
        if allowed and val not in allowed:
            raise TypeMismatch(f"{key} must be one of {sorted(allowed)}, got {val!r}", lineno)
        return val
    if typ == _FLOAT:
        try:
            v = float(raw)
        except ValueError:
            raise TypeMismatch(f"{key} expects a number, got {raw!r}", lineno) from None
        if not np.isfinite(v):
            raise TypeMismatch(f"{key} must be finite", lineno)
        return v
    if typ == _INT:
        try:
            return int(raw)
        except ValueError:
            raise TypeMismatch(f"{key} expects an integer, got {raw!r}", lineno) from None
    if typ == _LIST:
        try:
            return tuple(float(p) for p in raw.split(",") if p.strip())
        except ValueError:
            raise TypeMismatch(f"{key} expects comma-separated numbers, got {raw!r}", lineno) from None
    if typ == _EXPR:
        if raw.strip().lower() == "compatible" and key == "u1":
            return "compatible"
        return parse_expression(raw, lineno)
    raise AssertionError(typ)


def parse_scenario(path):
    """Parse and fully resolve a scenario file; strict about unknown keys."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()

    raw = {s: {} for s in _SCHEMA}
    section = None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if name not in _SCHEMA:
                raise UnknownKey(f"unknown section [{name}]", lineno)
            section = name
            continue
        if "=" not in stripped:
            raise TypeMismatch(f"expected 'key = value', got {stripped!r}", lineno)
        if section is None:
            raise UnknownKey("key outside any section", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _SCHEMA[section]:
            raise UnknownKey(f"unknown key {key!r} in section [{section}]", lineno)
        if key in raw[section]:
            raise TypeMismatch(f"duplicate key {key!r}", lineno)
        raw[section][key] = _convert(section, key, value.strip(), lineno)

    resolved = {}
    for section, keys in _SCHEMA.items():
        out = {}
        for key, (typ, default) in keys.items():
            if key in raw[section]:
                out[key] = raw[section][key]
            elif typ == _EXPR and isinstance(default, str):
                out[key] = parse_expression(default)
            else:
                out[key] = default
        resolved[section] = out

    if resolved["scenario"]["name"] is None:
        raise MissingRequired("scenario requires a name ([scenario] name = ...)")
    kind = resolved["scenario"]["kind"]
    if kind == "wave":
        if resolved["motion"]["kind"] != "identity" and resolved["motion"]["profile"] is None:
            raise MissingRequired("non-identity motion requires a profile expression")
    elif kind == "coupled":
        if resolved["data"]["u0_prime"] is None:
            raise MissingRequired("coupled scenarios require data u0_prime")
    _validate_numerics(resolved["numerics"])

    sc = Scenario(
        name=resolved["scenario"]["name"],
        kind=kind,
        motion=resolved["motion"],
        data=resolved["data"],
        coupled=resolved["coupled"],
        numerics=resolved["numerics"],
        output=resolved["output"],
        source=str(path),
    )
    _early_checks(sc)
    return sc


def _validate_numerics(num):
    for key in ("modes", "grid", "partitions", "quad_nodes", "store_every", "front_grid"):
        if num[key] <= 0:
            raise TypeMismatch(f"numerics {key} must be positive")
    for key in ("dt", "cfl"):
        if num[key] <= 0:
            raise TypeMismatch(f"numerics {key} must be positive")
    if not (0.0 <= num["taper"] < 1.0):
        raise TypeMismatch("numerics taper must lie in [0, 1)")


def _early_checks(sc):
    """Checks promised at parse time (e.g. coupled compatibility)."""
    if sc.kind not in ("coupled", "coupled_radial"):
        return
    from .errors import CompatibilityViolated
    from .griffith import Verdict, compatibility_check

    u1 = sc.data["u1"]
    kap = sc.data["kappa"]
    if sc.kind == "coupled":
        front = sc.coupled["l0"]
        p0 = float(sc.data["u0_prime"](front))
    else:
        front = sc.coupled["R"] - sc.coupled["rho0"]
        p0 = -float(sc.data["u0"].deriv(front))
    u1v = 0.0 if u1 == "compatible" else float(u1(front))
    verdict = compatibility_check(p0, u1v, float(kap(front)))
    if verdict is Verdict.INCOMPATIBLE:
        raise CompatibilityViolated(
            "coupled scenario data fails the front compatibility conditions")
    sc.coupled["verdict"] = verdict.value


class SlopeField:
    """u0 reconstructed from its slope expression with u0(anchor) = 0."""

    def __init__(self, slope, anchor):
        self.slope = slope
        self.anchor = float(anchor)

    def __call__(self, x):
        return self.slope.antiderivative(x) - self.slope.antiderivative(self.anchor)

    def deriv(self, x):
        return self.slope(x)

    def spec(self):
        return f"integral of {self.slope.spec()} anchored at {self.anchor:g}"
