"""Run configuration: flat ``key = value`` files overridden by CLI flags."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields


@dataclass
class Config:
    R: float = 1.0
    H: float = 1.0
    c: float = 0.3
    C: float | None = None
    seed: complex = 1.0 + 0j
    direction: int = 1
    steps: int = 4000
    ds: float = 1e-3
    project: bool = True
    quad_order: int = 64
    curve_order: int = 256
    n_caps: int = 20
    levels: tuple[float, ...] = ()
    nu: int = 200
    nv: int = 100
    out: str = "out"
    obj: str | None = None
    scenarios: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seed"] = [self.seed.real, self.seed.imag]
        d["levels"] = list(self.levels)
        d["scenarios"] = list(self.scenarios)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def update(self, **kw) -> Config:
        names = {f.name for f in fields(self)}
        for k, v in kw.items():
            if v is None:
                continue
            if k not in names:
                raise KeyError(f"unknown config key {k!r}")
            setattr(self, k, coerce(k, v))
        return self


def parse_seed(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        return complex(float(text[0]), float(text[1]))
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    if len(parts) == 1:
        return complex(parts[0].replace("i", "j"))
    return complex(float(parts[0]), float(parts[1]))


def _floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _bool(text):
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_COERCE = {
    "R": float, "H": float, "c": float, "C": float, "ds": float,
    "seed": parse_seed, "direction": int, "steps": int, "quad_order": int,
    "curve_order": int, "n_caps": int, "nu": int, "nv": int,
    "project": _bool, "levels": _floats, "out": str, "obj": str,
    "scenarios": lambda t: tuple(t) if isinstance(t, (list, tuple)) else tuple(x.strip() for x in str(t).split(",") if x.strip()),
}


def coerce(key, value):
    return _COERCE[key](value)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            if k not in _COERCE:
                raise ValueError(f"{path}:{lineno}: unknown key {k!r}")
            out[k] = v
    return out
