"""Run configuration: flat ``key = value`` text with ``[params]`` and ``[run]`` sections.

Every key is spelled exactly like the corresponding ModelParams / RunConfig field.
"""
import configparser
from dataclasses import dataclass, field, fields
import math
import re

from .errors import ZenoLabError
from .model import ModelParams

EXPERIMENTS = ("spectrum", "survival", "zeno-scan", "interrupted", "oracle-compare", "bound-states")

PRESETS = {
    "paper-figure-3": """
[params]
E_A = 2.00
E_B = 2.10
Omega = 0.04
sigma = 0.11
mu = 0.30
omega_0 = 2.10

[run]
initial = A
t_max = 150
n_times = 301
tau_zeno = 1.0
tau_antizeno = 46.0
""",
    "paper-figure-4": """
[params]
E_A = 2.00
E_B = 2.10
Omega = 0.0
sigma = 0.11
mu = 0.30
omega_0 = 2.10

[run]
initial = B
t_max = 40
n_times = 201
tau_zeno = 1.0
""",
    "stable": """
[params]
E_A = -1.0
E_B = -1.0
Omega = 0.04
sigma = 0.11
mu = 0.30
omega_0 = 2.10

[run]
initial = A
t_max = 200
n_times = 401
""",
}


class ConfigError(ZenoLabError, ValueError):
    pass


@dataclass
class RunConfig:
    params: ModelParams
    experiment: str
    initial: str = "A"
    t_max: float = 50.0
    n_times: int = 201
    tau: float = 1.0
    tau_zeno: float = None
    tau_antizeno: float = None
    tau_min: float = 1e-2
    tau_max: float = None
    n_tau: int = 50
    horizon: float = None
    lambda_min: float = None
    lambda_max: float = None
    n_lambda: int = 1001
    N: int = 4000
    out: str = "."
    plot: bool = False
    log_p: bool = False
    source: dict = field(default_factory=dict, repr=False)

    def resolved(self):
        """Ordered (section, key, value) triples of every setting, params first."""
        items = [("params", k, v) for k, v in self.params.as_dict().items()]
        for f in fields(self):
            if f.name in ("params", "source"):
                continue
            items.append(("run", f.name, getattr(self, f.name)))
        return items


_RUN_TYPES = {
    f.name: f.type for f in fields(RunConfig) if f.name not in ("params", "source", "experiment")
}
_PARAM_KEYS = [f.name for f in fields(ModelParams)]


def _parser():
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    return cp


def _line_of(text, section, key):
    current = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return no
    return None


def _convert(name, raw, typ, where):
    raw = raw.strip()
    try:
        if typ is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if typ is int:
            return int(raw)
        if typ is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        return raw
    except ValueError:
        raise ConfigError(f"{where}: {name} = {raw!r} is not a valid {typ.__name__}")


def load(experiment, sources):
    """Merge ``sources`` (list of (label, text)) in order and validate.

    Diagnostics name the source, line and field of the offending entry.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    values = {"params": {}, "run": {}}
    where = {}
    for label, text in sources:
        cp = _parser()
        try:
            cp.read_string(text, source=label)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        for section in cp.sections():
            if section not in values:
                raise ConfigError(f"{label}: unknown section [{section}] (use [params] and [run])")
            for key, raw in cp.items(section):
                loc = f"{label}:{_line_of(text, section, key) or '?'} [{section}] {key}"
                known = _PARAM_KEYS if section == "params" else list(_RUN_TYPES) + ["experiment"]
                if key not in known:
                    raise ConfigError(f"{loc}: unknown key")
                values[section][key] = raw
                where[(section, key)] = loc

    if "experiment" in values["run"]:
        named = values["run"].pop("experiment").strip()
        if named != experiment:
            raise ConfigError(
                f"{where[('run', 'experiment')]}: config names experiment {named!r} "
                f"but {experiment!r} was requested"
            )

    missing = [k for k in ("E_A", "E_B", "Omega", "sigma", "mu", "omega_0") if k not in values["params"]]
    if missing:
        raise ConfigError(f"[params] missing required keys: {', '.join(missing)}")
    pkw = {k: _convert(k, v, float, where[("params", k)]) for k, v in values["params"].items()}
    try:
        params = ModelParams(**pkw)
    except ZenoLabError as exc:
        name = str(exc).split()[0]
        loc = where.get(("params", name), "[params]")
        raise ConfigError(f"{loc}: {exc}") from None

    rkw = {}
    for k, v in values["run"].items():
        rkw[k] = _convert(k, v, _RUN_TYPES[k], where[("run", k)])
    cfg = RunConfig(params=params, experiment=experiment, **rkw)
    _validate(cfg, where)
    cfg.source = dict(where)
    return cfg


def _validate(cfg, where):
    def bad(key, msg):
        loc = where.get(("run", key), f"[run] {key}")
        raise ConfigError(f"{loc}: {msg}")

    if cfg.initial not in ("A", "B"):
        bad("initial", "must be A or B")
    if cfg.t_max <= 0:
        bad("t_max", "must be > 0")
    if cfg.n_times < 2:
        bad("n_times", "must be >= 2")
    for key in ("tau", "tau_zeno", "tau_antizeno", "tau_min", "tau_max", "horizon"):
        v = getattr(cfg, key)
        if v is not None and v <= 0:
            bad(key, "must be > 0")
    if cfg.n_tau < 1:
        bad("n_tau", "must be >= 1")
    if cfg.n_lambda < 2:
        bad("n_lambda", "must be >= 2")
    if cfg.N < 2:
        bad("N", "must be >= 2")
