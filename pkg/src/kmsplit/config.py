"""Flat key-value run configurations.

The format is line-oriented ``key = value`` with dotted section prefixes and
``#`` comments.  Schedule values use an inline grammar, e.g.::

    problem.kind = sfp
    problem.start = t
    grid.n = 4096
    schedules.beta = kind=harmonic-approach limit=1 coeff=1 first=0.25
    schedules.lambda = kind=constant value=0.4
    schedules.gamma = kind=constant value=0.5
    stop.rule = residual
    stop.tolerance = 1e-3

Unknown keys are rejected.  ``parse_config`` and ``RunConfig.to_text`` round
trip: re-parsing a serialized config yields an equal RunConfig.
"""

from dataclasses import dataclass, replace

from .errors import ConfigError
from .schedules import (
    SequenceDescriptor,
    constant,
    harmonic_approach,
    oscillating,
    table,
)

__all__ = ["RunConfig", "parse_config", "parse_config_text", "parse_descriptor"]

_PROBLEM_KINDS = ("reconstruction", "sfp", "custom-finite-dim")
_STOP_RULES = ("step-norm", "residual", "max-iterations", "wall-clock")
_FINITE_DIM_NAMES = ("line-projection", "constant-map", "identity", "box-fb")

_KNOWN_KEYS = {
    "problem.kind", "problem.start", "problem.q", "problem.data",
    "problem.weight", "problem.mode", "problem.name", "problem.dim",
    "problem.x0", "problem.point",
    "grid.n",
    "schedules.beta", "schedules.lambda", "schedules.gamma",
    "stop.rule", "stop.tolerance", "stop.max_iterations", "stop.seconds",
    "output.dir", "force", "workers",
    "sweep.starts", "sweep.gammas", "sweep.lambdas",
}


@dataclass(frozen=True)
class RunConfig:
    kind: str
    start: str | None = None
    q_set: str = "zero"
    data: str | None = None
    weight: float = 1.0
    mode: str = "prox-gradient"
    fd_name: str | None = None
    dim: int = 2
    x0: tuple = ()
    point: tuple = ()
    grid_n: int = 4096
    beta: SequenceDescriptor | None = None
    lam: SequenceDescriptor | None = None
    gamma: SequenceDescriptor | None = None
    stop_rule: str | None = None
    stop_tolerance: float | None = None
    stop_max_iterations: int = 100_000
    stop_seconds: float | None = None
    output_dir: str | None = None
    force: bool = False
    workers: int = 1
    sweep_starts: tuple = ()
    sweep_gammas: tuple = ()
    sweep_lambdas: tuple = ()

    def to_text(self):
        """Serialize back to the flat grammar (canonical key order)."""
        lines = [f"problem.kind = {self.kind}"]
        if self.kind == "sfp":
            lines += [f"problem.start = {self.start}",
                      f"problem.q = {self.q_set}"]
        elif self.kind == "reconstruction":
            lines += [f"problem.data = {self.data}",
                      f"problem.start = {self.start}",
                      f"problem.weight = {self.weight:.17g}",
                      f"problem.mode = {self.mode}"]
        else:
            lines += [f"problem.name = {self.fd_name}",
                      f"problem.dim = {self.dim}",
                      "problem.x0 = " + ",".join(f"{v:.17g}" for v in self.x0)]
            if self.point:
                lines.append(
                    "problem.point = " + ",".join(f"{v:.17g}" for v in self.point))
        if self.kind != "custom-finite-dim":
            lines.append(f"grid.n = {self.grid_n}")
        for name, seq in (("beta", self.beta), ("lambda", self.lam),
                          ("gamma", self.gamma)):
            if seq is not None:
                lines.append(f"schedules.{name} = {_descriptor_text(seq)}")
        if self.stop_rule:
            lines.append(f"stop.rule = {self.stop_rule}")
        if self.stop_tolerance is not None:
            lines.append(f"stop.tolerance = {self.stop_tolerance:.17g}")
        lines.append(f"stop.max_iterations = {self.stop_max_iterations}")
        if self.stop_seconds is not None:
            lines.append(f"stop.seconds = {self.stop_seconds:.17g}")
        if self.output_dir:
            lines.append(f"output.dir = {self.output_dir}")
        lines.append(f"force = {'true' if self.force else 'false'}")
        lines.append(f"workers = {self.workers}")
        if self.sweep_starts:
            lines.append("sweep.starts = " + ", ".join(self.sweep_starts))
        if self.sweep_gammas:
            lines.append("sweep.gammas = " + " | ".join(
                _descriptor_text(s) for s in self.sweep_gammas))
        if self.sweep_lambdas:
            lines.append("sweep.lambdas = " + " | ".join(
                _descriptor_text(s) for s in self.sweep_lambdas))
        return "\n".join(lines) + "\n"


def _descriptor_text(seq):
    if seq.kind == "constant":
        body = f"value={seq.value:.17g}"
    elif seq.kind == "harmonic-approach":
        body = f"limit={seq.limit:.17g} coeff={seq.coeff:.17g}"
        if seq.offset != 1.0:
            body += f" offset={seq.offset:.17g}"
    elif seq.kind == "oscillating":
        body = f"center={seq.center:.17g} amplitude={seq.amplitude:.17g}"
    elif seq.kind == "table":
        body = "values=" + ",".join(f"{v:.17g}" for v in seq.values)
    else:
        raise ConfigError(f"descriptor kind {seq.kind!r} has no config form")
    out = f"kind={seq.kind} {body}"
    if seq.first is not None:
        out += f" first={seq.first:.17g}"
    return out


def parse_descriptor(text):
    """Parse the inline grammar 'kind=... key=value ...' into a descriptor."""
    fields = {}
    for token in text.split():
        if "=" not in token:
            raise ConfigError(f"bad descriptor token {token!r} in {text!r}")
        key, _, value = token.partition("=")
        if key in fields:
            raise ConfigError(f"duplicate descriptor key {key!r} in {text!r}")
        fields[key] = value
    kind = fields.pop("kind", None)
    if kind is None:
        raise ConfigError(f"descriptor {text!r} is missing kind=")
    first = _float(fields.pop("first")) if "first" in fields else None
    try:
        if kind == "constant":
            seq = constant(_float(fields.pop("value")), first=first)
        elif kind == "harmonic-approach":
            seq = harmonic_approach(
                _float(fields.pop("limit")), _float(fields.pop("coeff")),
                offset=_float(fields.pop("offset", "1")), first=first)
        elif kind == "oscillating":
            seq = oscillating(_float(fields.pop("center")),
                              _float(fields.pop("amplitude")), first=first)
        elif kind == "table":
            values = [_float(v) for v in fields.pop("values").split(",") if v]
            seq = table(values, first=first)
        else:
            raise ConfigError(f"unknown descriptor kind {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"descriptor {text!r} is missing {exc.args[0]}=") from None
    if fields:
        raise ConfigError(f"unknown descriptor keys {sorted(fields)} in {text!r}")
    return seq


def _float(text, key="value"):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {text!r}") from None


def _int(text):
    try:
        return int(text)
    except (TypeError, ValueError):
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _floats(text):
    return tuple(_float(v) for v in text.split(",") if v.strip())


def parse_config_text(text, source="<config>"):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        entries[key] = value

    if "problem.kind" not in entries:
        raise ConfigError(f"{source}: missing problem.kind")
    kind = entries.pop("problem.kind")
    if kind not in _PROBLEM_KINDS:
        raise ConfigError(f"{source}: unknown problem kind {kind!r}")

    cfg = RunConfig(kind=kind)
    take = entries.pop

    if kind == "sfp":
        cfg = replace(cfg, start=take("problem.start", "t"),
                      q_set=take("problem.q", "zero"))
        if cfg.q_set not in ("zero", "ray"):
            raise ConfigError(f"{source}: problem.q must be zero or ray")
    elif kind == "reconstruction":
        if "problem.data" not in entries:
            raise ConfigError(f"{source}: reconstruction needs problem.data")
        cfg = replace(cfg, data=take("problem.data"),
                      start=take("problem.start", "t^2/10"),
                      weight=_float(take("problem.weight", "1")),
                      mode=take("problem.mode", "prox-gradient"))
        if cfg.mode not in ("prox-gradient", "full-gradient"):
            raise ConfigError(f"{source}: unknown problem.mode {cfg.mode!r}")
        if not cfg.weight > 0:
            raise ConfigError(f"{source}: problem.weight must be positive")
    else:
        name = take("problem.name", None)
        if name not in _FINITE_DIM_NAMES:
            raise ConfigError(
                f"{source}: problem.name must be one of {_FINITE_DIM_NAMES}")
        if "problem.x0" not in entries:
            raise ConfigError(f"{source}: custom-finite-dim needs problem.x0")
        cfg = replace(cfg, fd_name=name, dim=_int(take("problem.dim", "2")),
                      x0=_floats(take("problem.x0")),
                      point=_floats(take("problem.point", "")))

    cfg = replace(cfg, grid_n=_int(take("grid.n", "4096")))
    if cfg.grid_n < 2:
        raise ConfigError(f"{source}: grid.n must be at least 2")

    for attr, key in (("beta", "schedules.beta"), ("lam", "schedules.lambda"),
                      ("gamma", "schedules.gamma")):
        if key in entries:
            cfg = replace(cfg, **{attr: parse_descriptor(take(key))})

    if "stop.rule" in entries:
        rule = take("stop.rule")
        if rule not in _STOP_RULES:
            raise ConfigError(f"{source}: unknown stop.rule {rule!r}")
        cfg = replace(cfg, stop_rule=rule)
    if "stop.tolerance" in entries:
        cfg = replace(cfg, stop_tolerance=_float(take("stop.tolerance")))
    cfg = replace(cfg,
                  stop_max_iterations=_int(take("stop.max_iterations", "100000")))
    if "stop.seconds" in entries:
        cfg = replace(cfg, stop_seconds=_float(take("stop.seconds")))
    if "output.dir" in entries:
        cfg = replace(cfg, output_dir=take("output.dir"))
    cfg = replace(cfg, force=_bool(take("force", "false")),
                  workers=_int(take("workers", "1")))
    if cfg.workers < 1:
        raise ConfigError(f"{source}: workers must be at least 1")

    if "sweep.starts" in entries:
        cfg = replace(cfg, sweep_starts=tuple(
            s.strip() for s in take("sweep.starts").split(",") if s.strip()))
    if "sweep.gammas" in entries:
        cfg = replace(cfg, sweep_gammas=tuple(
            parse_descriptor(part) for part in take("sweep.gammas").split("|")))
    if "sweep.lambdas" in entries:
        cfg = replace(cfg, sweep_lambdas=tuple(
            parse_descriptor(part) for part in take("sweep.lambdas").split("|")))

    if entries:
        raise ConfigError(
            f"{source}: keys {sorted(entries)} are not valid for "
            f"problem kind {kind!r}")
    return cfg


def parse_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, source=str(path))
