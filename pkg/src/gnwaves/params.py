"""Dimensionless parameter set, experiment configuration, and the flat
``key = value`` config format.

Everything downstream works in the nondimensional variables: gamma is the
density ratio (upper/lower, < 1 for stable stratification), epsilon the
amplitude parameter, mu the shallowness parameter, delta the depth ratio,
and inv_bond the inverse Bond number scaling surface tension. Configs are
flat on purpose: one key per line diffs cleanly across run records.
"""

from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import ConfigError, ValidationError

__all__ = [
    "PhysParams",
    "ExperimentConfig",
    "DEFAULT_CONFIG_TEXT",
    "parse_config",
    "serialize_config",
    "instability_parameter",
]


@dataclass(frozen=True)
class PhysParams:
    """The dimensionless parameter tuple (gamma, epsilon, mu, delta, Bo^-1)."""

    gamma: float = 0.95
    epsilon: float = 0.5
    mu: float = 0.1
    delta: float = 0.5
    inv_bond: float = 5e-4

    def __post_init__(self):
        if not (0.0 <= self.gamma < 1.0):
            raise ValidationError("gamma", f"requires 0 <= gamma < 1, got {self.gamma}")
        if self.epsilon < 0.0:
            raise ValidationError("epsilon", f"must be nonnegative, got {self.epsilon}")
        if self.mu < 0.0:
            raise ValidationError("mu", f"must be nonnegative, got {self.mu}")
        if not self.delta > 0.0:
            raise ValidationError("delta", f"must be positive, got {self.delta}")
        if self.inv_bond < 0.0:
            raise ValidationError("inv_bond", f"must be nonnegative, got {self.inv_bond}")
        for name in ("gamma", "epsilon", "mu", "delta", "inv_bond"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(name, "must be finite")


def instability_parameter(params, kf1, kf2, sigma):
    """Kelvin-Helmholtz smallness parameter
    eps^2 * (1 + (gamma*K_F1 + K_F2) * (mu*Bo)^(1-sigma)).

    kf1, kf2 are the decay constants of the two layer multipliers and sigma
    their common decay exponent in [0, 1]. With zero surface tension
    (inv_bond = 0) and sigma < 1 the quantity is unbounded and the +inf
    sentinel is returned; sigma = 1 is the regularized case meant for that
    regime.
    """
    if not (0.0 <= sigma <= 1.0):
        raise ValidationError("sigma", f"must lie in [0, 1], got {sigma}")
    if kf1 < 0 or kf2 < 0:
        raise ValidationError("kf", f"decay constants must be nonnegative, got {kf1}, {kf2}")
    if params.epsilon == 0.0:
        return 0.0
    if sigma == 1.0:
        factor = 1.0
    elif params.inv_bond == 0.0:
        return float("inf")
    else:
        factor = (params.mu / params.inv_bond) ** (1.0 - sigma)
    return params.epsilon**2 * (1.0 + (params.gamma * kf1 + kf2) * factor)


# Defaults reproduce the reference experiment: 512-point grid on [-4, 4],
# zeta0 = -exp(-4 x^2), w0 = 0, integrated to t = 2 at tolerances 1e-10/1e-12.
@dataclass(frozen=True)
class ExperimentConfig:
    params: PhysParams = PhysParams()
    model: str = "gn"                 # gn | sv
    multiplier: str = "regularized"   # identity | regularized | improved | custom:<path>
    theta1: float | None = None       # default 1/(15*delta_1^2) resolved at build time
    theta2: float | None = None
    grid_n: int = 512
    domain_half_length: float = 4.0
    t_end: float = 2.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    initial_condition: str = "gaussian"   # gaussian | rest
    ic_amplitude: float = -1.0
    ic_width: float = 4.0
    snapshot_times: tuple = ()            # empty -> snapshot at t_end only
    write_spectra: bool = True
    diag_stride: int = 1
    dealias: bool = False
    k_band: float | None = None           # None -> half-Nyquist
    cg_tol: float = 1e-12
    cg_max_iter: int = 200

    def __post_init__(self):
        if self.model not in ("gn", "sv"):
            raise ValidationError("model", f"must be 'gn' or 'sv', got {self.model!r}")
        mult = self.multiplier
        if mult not in ("identity", "regularized", "improved") and not mult.startswith("custom:"):
            raise ValidationError(
                "multiplier",
                f"must be identity|regularized|improved|custom:<path>, got {mult!r}",
            )
        if not isinstance(self.grid_n, int) or self.grid_n < 8 or (self.grid_n & (self.grid_n - 1)):
            raise ValidationError("grid_n", f"must be a power of two >= 8, got {self.grid_n}")
        if not self.domain_half_length > 0:
            raise ValidationError("domain_half_length", "must be positive")
        if not self.t_end > 0:
            raise ValidationError("t_end", f"must be positive, got {self.t_end}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol/abs_tol", "tolerances must be positive")
        for name in ("theta1", "theta2"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValidationError(name, f"must be positive, got {value}")
        if self.initial_condition not in ("gaussian", "rest"):
            raise ValidationError(
                "initial_condition", f"must be 'gaussian' or 'rest', got {self.initial_condition!r}"
            )
        if not self.ic_width > 0:
            raise ValidationError("ic_width", f"must be positive, got {self.ic_width}")
        if any(t < 0 for t in self.snapshot_times):
            raise ValidationError("snapshot_times", "times must be nonnegative")
        if self.diag_stride < 1:
            raise ValidationError("diag_stride", "must be >= 1")
        if self.k_band is not None and self.k_band < 0:
            raise ValidationError("k_band", "must be nonnegative")
        if not self.cg_tol > 0:
            raise ValidationError("cg_tol", "must be positive")
        if self.cg_max_iter < 1:
            raise ValidationError("cg_max_iter", "must be >= 1")


# key -> (target, parser tag); targets named "params.x" land in PhysParams
_SCHEMA = {
    "gamma": ("params.gamma", "float"),
    "epsilon": ("params.epsilon", "float"),
    "mu": ("params.mu", "float"),
    "delta": ("params.delta", "float"),
    "inv_bond": ("params.inv_bond", "float"),
    "model": ("model", "str"),
    "multiplier": ("multiplier", "str"),
    "theta1": ("theta1", "optfloat"),
    "theta2": ("theta2", "optfloat"),
    "grid_n": ("grid_n", "int"),
    "domain_half_length": ("domain_half_length", "float"),
    "t_end": ("t_end", "float"),
    "rel_tol": ("rel_tol", "float"),
    "abs_tol": ("abs_tol", "float"),
    "initial_condition": ("initial_condition", "str"),
    "ic_amplitude": ("ic_amplitude", "float"),
    "ic_width": ("ic_width", "float"),
    "snapshot_times": ("snapshot_times", "floatlist"),
    "write_spectra": ("write_spectra", "bool"),
    "diag_stride": ("diag_stride", "int"),
    "dealias": ("dealias", "bool"),
    "k_band": ("k_band", "optfloat"),
    "cg_tol": ("cg_tol", "float"),
    "cg_max_iter": ("cg_max_iter", "int"),
}

_BOOL_WORDS = {"true": True, "on": True, "1": True, "false": False, "off": False, "0": False}


def _parse_value(tag, raw, key, line_no):
    raw = raw.strip()
    try:
        if tag == "float":
            return float(raw)
        if tag == "int":
            return int(raw)
        if tag == "str":
            return raw
        if tag == "bool":
            word = raw.lower()
            if word not in _BOOL_WORDS:
                raise ValueError(raw)
            return _BOOL_WORDS[word]
        if tag == "optfloat":
            if raw.lower() in ("", "auto", "none"):
                return None
            return float(raw)
        if tag == "floatlist":
            if raw == "":
                return ()
            return tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r} for key {key!r}", line=line_no) from None
    raise AssertionError(f"unknown schema tag {tag}")


def parse_config(text):
    """Parse a flat ``key = value`` document into an :class:`ExperimentConfig`.

    Lines are either blank, ``# comment``, or ``key = value``. Unknown keys
    are a hard error (they are almost always typos), and every missing key
    takes its reference-experiment default.
    """
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", line=line_no)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", line=line_no)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=line_no)
        target, tag = _SCHEMA[key]
        values[key] = (target, _parse_value(tag, raw, key, line_no))

    param_kwargs = {}
    config_kwargs = {}
    for target, value in values.values():
        if target.startswith("params."):
            param_kwargs[target.split(".", 1)[1]] = value
        else:
            config_kwargs[target] = value
    params = PhysParams(**param_kwargs)
    return ExperimentConfig(params=params, **config_kwargs)


def _format_value(key, value):
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(float(t)) for t in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config):
    """Inverse of :func:`parse_config`: emits every key explicitly so a run
    record is self-contained. parse(serialize(c)) == c for valid configs."""
    lines = []
    for key, (target, _tag) in _SCHEMA.items():
        if target.startswith("params."):
            value = getattr(config.params, target.split(".", 1)[1])
        else:
            value = getattr(config, target)
        lines.append(f"{key} = {_format_value(key, value)}")
    return "\n".join(lines) + "\n"


DEFAULT_CONFIG_TEXT = serialize_config(ExperimentConfig())


def with_overrides(config, **changes):
    """Functional update helper mirroring dataclasses.replace, with nested
    params.* keys accepted as gamma=..., mu=..., etc."""
    param_fields = {f.name for f in fields(PhysParams)}
    param_changes = {k: v for k, v in changes.items() if k in param_fields}
    other = {k: v for k, v in changes.items() if k not in param_fields}
    if param_changes:
        other["params"] = replace(config.params, **param_changes)
    return replace(config, **other)
