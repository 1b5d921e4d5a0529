"""Plain-text ``key = value`` run configurations."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path

from ymhk.algebra import get_group
from ymhk.flow import FlowConfig, FlowState, stability_cap
from ymhk.lattice import LatticeGeom, SeededSpectrum, random_field

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config", "with_overrides", "bundled_configs"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run.

    ``t_end`` and ``dt_init`` accept either a number or a multiple of the
    stability cap written ``"20*dt_max"``.  The Higgs field is drawn with
    ``seed``, the connection with ``seed + 1``.
    """

    group: str = "U1"
    N: int = 8
    L: float = 1.0
    k: int = 1
    seed: int = 0
    alpha: float = 4.0
    amplitude: float = 1.0
    a_amplitude: float = 1.0
    zero_mean: bool = False
    t_end: str = "20*dt_max"
    dt_init: str = "dt_max"
    tol: float = 1e-8
    monitor_every: int = 1
    snapshot_every: int = 0
    p: tuple = (4.0,)
    out_dir: str = ""

    @property
    def geom(self) -> LatticeGeom:
        return LatticeGeom(self.N, self.L)

    @property
    def dt_max(self) -> float:
        return stability_cap(self.geom, self.k)

    def _time(self, text: str) -> float:
        s = str(text).replace(" ", "")
        if s.endswith("dt_max"):
            factor = s[: -len("dt_max")].rstrip("*") or "1"
            return float(factor) * self.dt_max
        return float(s)

    def flow_config(self) -> FlowConfig:
        dt_max = self.dt_max
        return FlowConfig(
            t_end=self._time(self.t_end),
            dt_init=min(self._time(self.dt_init), dt_max),
            dt_max=dt_max,
            tol=self.tol,
            monitor_every=self.monitor_every,
            snapshot_every=self.snapshot_every,
            p_list=tuple(self.p),
        )

    def initial_state(self) -> FlowState:
        geom, group = self.geom, get_group(self.group)
        u = random_field(geom, 0, group, SeededSpectrum(self.seed, self.alpha, self.amplitude, self.zero_mean))
        A = random_field(geom, 1, group, SeededSpectrum(self.seed + 1, self.alpha, self.a_amplitude))
        return FlowState(0.0, A, u, self.k)

    def validate(self) -> RunConfig:
        try:
            get_group(self.group)
            self.flow_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        return self

    def as_dict(self) -> dict:
        d = asdict(self)
        d["p"] = list(self.p)
        return d


_CASTS = {
    int: int,
    float: float,
    str: str,
    bool: lambda s: {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}[
        s.lower()
    ],
    tuple: lambda s: tuple(float(x) for x in s.replace(",", " ").split()),
}


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    types = {f.name: f.type for f in fields(RunConfig)}
    type_of = {"int": int, "float": float, "str": str, "bool": bool, "tuple": tuple}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CASTS[type_of[types[key]]](val)
        except (ValueError, KeyError):
            raise ConfigError(f"{source}:{lineno}: bad value {val!r} for {key}") from None
    try:
        cfg = RunConfig(**values)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cfg.validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(), str(path))


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw).validate() if kw else cfg


def bundled_configs() -> dict[str, Path]:
    """Example configurations shipped with the package, keyed by stem."""
    root = resources.files("ymhk") / "configs"
    return {Path(p.name).stem: Path(str(p)) for p in root.iterdir() if p.name.endswith(".cfg")}
