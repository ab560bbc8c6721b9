"""Configuration-driven sweeps that regenerate the figure data and cross-checks.

A config is an INI file (see ``mixphase/configs/*.cfg``)::

    [experiment]
    name = fig1_kitaev

    [model]
    m = 0.6
    c = 1.0
    M_tau = 1.0

    [grid]
    variable = T
    start = 0.01
    stop = 50
    points = 200
    scale = log
    include = 0, inf

    [numeric]
    enable = true
    n_samples = 4096

    [output]
    path = fig1_kitaev.csv
    format = csv

Numbers may be written as ``inf`` or with a ``pi`` suffix (``4pi``,
``0.5pi``).  Temperatures ``0`` and ``inf`` are handled by the closed forms
only; the numeric column is left empty there.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Callable, Optional

import numpy as np

from .dynamics import incompatibility_witness
from .errors import ConfigInvalid, MixPhaseError, NumericFailure
from .linalg import angle_distance, dagger
from .models import (
    GAP_TOL,
    KitaevSpec,
    OscillatorSpec,
    SSHSpec,
    continuum_theta_d,
    kitaev_theta_d,
    oscillator_theta_d,
    oscillator_theta_d_numeric,
    ssh_theta_d,
    two_band_theta_d_numeric,
    two_band_theta_d_unordered,
)
from .states import DensityMatrix

EXPERIMENTS = (
    "fig1_kitaev",
    "fig1_ssh",
    "fig2_kitaev",
    "fig2_ssh",
    "fig3_oscillator_T",
    "fig3_oscillator_tau",
    "continuum",
    "witness",
    "crossval",
)

SWEEP_COLUMNS = ("grid_var", "grid_value", "theta_closed", "theta_numeric", "abs_error", "branch")
SERIES_COLUMNS = SWEEP_COLUMNS + ("temperature",)
WITNESS_COLUMNS = (
    "kind",
    "dim",
    "trial",
    "anticommutator_norm",
    "sylvester_bound",
    "similarity_max_real",
    "trace_drift",
)
SERIES_EXPERIMENTS = ("fig2_kitaev", "fig2_ssh", "fig3_oscillator_tau", "crossval")

COLUMN_HELP = """\
output columns per experiment:
  fig1_kitaev, fig1_ssh, fig3_oscillator_T, continuum:
      grid_var,grid_value,theta_closed,theta_numeric,abs_error,branch
  fig2_kitaev, fig2_ssh, fig3_oscillator_tau, crossval:
      grid_var,grid_value,theta_closed,theta_numeric,abs_error,branch,temperature
  witness:
      kind,dim,trial,anticommutator_norm,sylvester_bound,similarity_max_real,trace_drift
angles are in radians on (-pi, pi]; abs_error is the 2pi-wrapped difference;
empty cells mean 'not computed' (T = 0 or T = inf, or numerics disabled).
"""


def parse_number(text: str) -> float:
    """Parse ``inf``, plain floats and multiples of pi such as ``4pi``."""
    s = text.strip().lower()
    try:
        if s.endswith("pi"):
            head = s[:-2].strip().rstrip("*")
            return (float(head) if head else 1.0) * math.pi
        return float(s)
    except ValueError:
        raise ConfigInvalid(f"not a number: {text!r}") from None


def parse_list(text: str) -> list[float]:
    return [parse_number(p) for p in text.split(",") if p.strip()]


@dataclass(frozen=True)
class GridSpec:
    variable: str
    start: float = 0.0
    stop: float = 1.0
    points: int = 2
    scale: str = "linear"
    endpoint: bool = True
    include: tuple = ()
    values: Optional[tuple] = None

    def validate(self) -> None:
        if self.values is not None:
            if len(self.values) < 1:
                raise ConfigInvalid("grid.values is empty")
            return
        if self.points < 2:
            raise ConfigInvalid("grid.points must be at least 2")
        if not self.start < self.stop:
            raise ConfigInvalid("grid.start must be below grid.stop")
        if self.scale not in ("linear", "log"):
            raise ConfigInvalid(f"grid.scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and self.start <= 0:
            raise ConfigInvalid("log grids need a positive start")

    def grid(self) -> list[float]:
        self.validate()
        if self.values is not None:
            pts = list(self.values)
        elif self.scale == "log":
            pts = list(np.geomspace(self.start, self.stop, self.points, endpoint=self.endpoint))
        else:
            pts = list(np.linspace(self.start, self.stop, self.points, endpoint=self.endpoint))
        pts = [float(p) for p in pts]
        # an included value replaces a grid point it coincides with up to rounding
        for extra in map(float, self.include):
            close = [
                i for i, p in enumerate(pts) if math.isfinite(extra) and abs(p - extra) <= 1e-12 * max(1.0, abs(extra))
            ]
            for i in reversed(close):
                del pts[i]
            pts.append(extra)
        return sorted(set(pts))


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    model: dict = field(default_factory=dict)
    grid: Optional[GridSpec] = None
    n_samples: int = 4096
    enable_numeric: bool = True
    ordering: str = "time"
    out_path: Optional[str] = None
    out_format: str = "csv"
    seed: int = 0
    threads: int = 0

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.out_format not in ("csv", "json"):
            raise ConfigInvalid("output.format must be csv or json")
        if self.n_samples < 2:
            raise ConfigInvalid("numeric.n_samples must be at least 2")
        if self.ordering not in ("time", "unordered"):
            raise ConfigInvalid("numeric.ordering must be time or unordered")
        if self.experiment != "witness":
            if self.grid is None:
                raise ConfigInvalid("a [grid] section is required")
            self.grid.validate()


def load_config(text: str) -> SweepConfig:
    """Parse config text into a :class:`SweepConfig`."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigInvalid(str(exc)) from exc
    try:
        name = cp.get("experiment", "name")
        model = dict(cp["model"]) if cp.has_section("model") else {}
        grid = None
        if cp.has_section("grid"):
            g = cp["grid"]
            grid = GridSpec(
                variable=g.get("variable", "x"),
                start=parse_number(g.get("start", "0")),
                stop=parse_number(g.get("stop", "1")),
                points=g.getint("points", 2),
                scale=g.get("scale", "linear"),
                endpoint=g.getboolean("endpoint", True),
                include=tuple(parse_list(g.get("include", ""))),
                values=tuple(parse_list(g["values"])) if "values" in g else None,
            )
        num = cp["numeric"] if cp.has_section("numeric") else {}
        out = cp["output"] if cp.has_section("output") else {}
        run_s = cp["run"] if cp.has_section("run") else {}
        cfg = SweepConfig(
            experiment=name,
            model=model,
            grid=grid,
            n_samples=int(num.get("n_samples", 4096)),
            enable_numeric=str(num.get("enable", "true")).lower() in ("1", "true", "yes", "on"),
            ordering=num.get("ordering", "time"),
            out_path=out.get("path"),
            out_format=out.get("format", "csv"),
            seed=int(run_s.get("seed", 0)),
            threads=int(run_s.get("threads", 0)),
        )
    except (configparser.Error, KeyError, ValueError) as exc:
        raise ConfigInvalid(str(exc)) from exc
    cfg.validate()
    return cfg


def bundled_config_names() -> list[str]:
    root = resources.files("mixphase") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cfg"))


def bundled_config_text(name: str) -> str:
    fname = name if name.endswith(".cfg") else name + ".cfg"
    path = resources.files("mixphase") / "configs" / fname
    if not path.is_file():
        raise ConfigInvalid(f"no bundled config named {fname!r}")
    return path.read_text()


def default_config(experiment: str) -> SweepConfig:
    name = "crossval_kitaev" if experiment == "crossval" else experiment
    return load_config(bundled_config_text(name))


@dataclass(frozen=True)
class ResultRow:
    grid_var: str
    grid_value: float
    theta_closed: float
    theta_numeric: Optional[float]
    abs_error: Optional[float]
    branch: str
    temperature: Optional[float] = None

    def as_dict(self, columns) -> dict:
        return {c: getattr(self, c) for c in columns}


@dataclass
class ResultTable:
    experiment: str
    columns: tuple
    rows: list


def _mparam(cfg: SweepConfig, key: str, default: float) -> float:
    raw = cfg.model.get(key)
    return default if raw is None else parse_number(raw)


def _temperatures(cfg: SweepConfig, default: str) -> list[float]:
    temps = parse_list(cfg.model.get("temperatures", default))
    if not temps or any(t < 0 or math.isnan(t) for t in temps):
        raise ConfigInvalid("model.temperatures must be non-negative")
    return temps


def _inv(t: float) -> float:
    """Inverse temperature with ``T = 0 -> inf`` and ``T = inf -> 0``."""
    if t == 0.0:
        return math.inf
    return 0.0 if math.isinf(t) else 1.0 / t


def _finite_positive(t: float) -> bool:
    return 0.0 < t < math.inf


# Each evaluator maps (grid value, temperature) to (closed, branch, numeric-or-None).
Evaluator = Callable[[float, float], tuple]


def _two_band_evaluator(cfg: SweepConfig, kind: str, grid_is_temperature: bool) -> Evaluator:
    if kind == "kitaev":
        m, c = _mparam(cfg, "m", 0.6), _mparam(cfg, "c", 1.0)
        if not (math.isfinite(m) and math.isfinite(c)) or m <= 0 or abs(c - m) <= GAP_TOL:
            raise ConfigInvalid("Kitaev parameters need finite m > 0 and m != c")
        spec = KitaevSpec(m, c, 1.0)
    else:
        r = _mparam(cfg, "j2_over_j1", 1.2)
        if not math.isfinite(r) or r <= 0 or abs(r - 1.0) <= GAP_TOL:
            raise ConfigInvalid("SSH needs finite j2_over_j1 > 0 and != 1")
        spec = SSHSpec(1.0, r)
    numeric_fn = two_band_theta_d_numeric if cfg.ordering == "time" else two_band_theta_d_unordered
    fixed_tau = _mparam(cfg, "M_tau" if kind == "kitaev" else "J1_tau", 1.0)

    def evaluate(x: float, temp: float):
        if grid_is_temperature:
            temp, tau = x, fixed_tau
        elif cfg.experiment == "fig2_kitaev":
            tau = x / spec.m  # the axis is m M tau / hbar, the argument of the closed form
        else:
            tau = x  # M tau / hbar or J1 tau / hbar
        beta = _inv(temp)
        if kind == "kitaev":
            theta, branch = kitaev_theta_d(spec.m, spec.c, spec.m * tau, beta)
        else:
            theta, branch = ssh_theta_d(tau, beta, spec.j2)
        num = None
        if cfg.enable_numeric and _finite_positive(temp) and tau > 0:
            num = numeric_fn(spec, tau, beta, cfg.n_samples)
        return theta, branch, num

    return evaluate


def _oscillator_evaluator(cfg: SweepConfig, grid_is_temperature: bool) -> Evaluator:
    fixed_wt = _mparam(cfg, "omega_tau", 1.0)

    def evaluate(x: float, temp: float):
        if grid_is_temperature:
            temp, wt = x, fixed_wt
        else:
            wt = x
        spec = OscillatorSpec(wt, _inv(temp))
        theta, branch = oscillator_theta_d(spec)
        num = None
        if cfg.enable_numeric and _finite_positive(temp):
            num = oscillator_theta_d_numeric(spec)
        return theta, branch, num

    return evaluate


def _continuum_evaluator(cfg: SweepConfig) -> Evaluator:
    def evaluate(x: float, temp: float):
        return continuum_theta_d(x), "continuum", None

    return evaluate


def _plan(cfg: SweepConfig) -> tuple[Evaluator, list[tuple[float, float]], bool]:
    """Evaluator, ordered (grid value, temperature) points, and whether rows carry a temperature."""
    exp = cfg.experiment
    grid = cfg.grid.grid()
    if exp in ("fig1_kitaev", "fig1_ssh"):
        ev = _two_band_evaluator(cfg, exp.split("_")[1], True)
        return ev, [(x, x) for x in grid], False
    if exp == "fig3_oscillator_T":
        return _oscillator_evaluator(cfg, True), [(x, x) for x in grid], False
    if exp == "continuum":
        return _continuum_evaluator(cfg), [(x, math.nan) for x in grid], False
    if exp == "fig2_kitaev":
        ev, temps = _two_band_evaluator(cfg, "kitaev", False), _temperatures(cfg, "0, 5, inf")
    elif exp == "fig2_ssh":
        ev, temps = _two_band_evaluator(cfg, "ssh", False), _temperatures(cfg, "0, 20, inf")
    elif exp == "fig3_oscillator_tau":
        ev, temps = _oscillator_evaluator(cfg, False), _temperatures(cfg, "0, 5, inf")
    else:  # crossval
        kind = cfg.model.get("model", "kitaev").strip().lower()
        if kind not in ("kitaev", "ssh"):
            raise ConfigInvalid("crossval model must be kitaev or ssh")
        ev, temps = _two_band_evaluator(cfg, kind, False), _temperatures(cfg, "0.2")
    return ev, [(x, t) for t in temps for x in grid], True


def run(config: SweepConfig) -> ResultTable:
    """Evaluate every grid point of ``config`` and return the rows in grid order.

    Raises:
        ConfigInvalid: bad configuration.
        NumericFailure: a grid point could not be evaluated; the message
            names the point.
    """
    config.validate()
    if config.experiment == "witness":
        return _run_witness(config)
    evaluate, points, series = _plan(config)
    var = config.grid.variable

    def one(point):
        x, temp = point
        try:
            theta, branch, num = evaluate(x, temp)
        except (MixPhaseError, ArithmeticError, ValueError) as exc:
            raise NumericFailure(f"{var}={x!r} T={temp!r}: {type(exc).__name__}: {exc}") from exc
        err = None if num is None else angle_distance(num, theta)
        return ResultRow(var, x, theta, num, err, branch, temp if series else None)

    workers = config.threads or os.cpu_count() or 1
    if workers == 1 or len(points) < 2:
        rows = [one(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, points))
    return ResultTable(config.experiment, SERIES_COLUMNS if series else SWEEP_COLUMNS, rows)


def random_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    """Full-rank state from a complex Ginibre matrix ``G G^dag / Tr``."""
    while True:
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        r = g @ dagger(g)
        rho = DensityMatrix(r / np.trace(r).real)
        if rho.values[0] > 1e-6:
            return rho


def random_antihermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5j * (g + dagger(g))


@dataclass
class WitnessSummary:
    dim: int
    trials: int
    min_anticommutator_norm: float
    fraction_nonzero: float
    rows: list


def witness_demo(dim: int, trials: int, seed: int, threshold: float = 1e-8) -> WitnessSummary:
    """Random full-rank states and nonzero anti-Hermitian ``H~``: is ``{H~, rho}`` ever zero?

    The first two rows are controls: ``H~ = 0`` (all witnesses vanish) and
    ``rho = 1/2`` with ``H~ = i sigma_z`` (anti-commutator norm equals ``||H~||``).
    """
    if dim < 2 or trials < 1:
        raise ConfigInvalid("witness needs dim >= 2 and trials >= 1")
    rng = np.random.default_rng([seed, dim])
    rows = []
    zero = incompatibility_witness(random_density(rng, dim), np.zeros((dim, dim), complex))
    rows.append(("control_zero", dim, -1, zero))
    sz = 1j * np.diag([1.0, -1.0]).astype(complex)
    rows.append(("control_mixed", 2, -1, incompatibility_witness(np.eye(2) / 2, sz)))
    norms = []
    for trial in range(trials):
        rho = random_density(rng, dim)
        h = random_antihermitian(rng, dim)
        rep = incompatibility_witness(rho, h)
        norms.append(rep.anticommutator_norm)
        rows.append(("random", dim, trial, rep, float(np.linalg.norm(h))))
    norms = np.asarray(norms)
    return WitnessSummary(dim, trials, float(norms.min()), float(np.mean(norms > threshold)), rows)


def _run_witness(config: SweepConfig) -> ResultTable:
    dims = [int(d) for d in parse_list(config.model.get("dims", "2, 4, 8"))]
    trials = int(_mparam(config, "trials", 100))
    rows = []
    for dim in dims:
        summary = witness_demo(dim, trials, config.seed)
        for entry in summary.rows:
            kind, d, trial, rep = entry[:4]
            h_norm = entry[4] if len(entry) > 4 else (2.0 ** 0.5 if kind == "control_mixed" else 0.0)
            rows.append(
                {
                    "kind": kind,
                    "dim": d,
                    "trial": trial,
                    "anticommutator_norm": rep.anticommutator_norm,
                    "sylvester_bound": rep.sylvester_gain * h_norm,
                    "similarity_max_real": rep.similarity_max_real,
                    "trace_drift": rep.trace_drift,
                }
            )
    return ResultTable("witness", WITNESS_COLUMNS, rows)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v + 0.0)  # no negative zero
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v + 0.0
    return v


def _records(table: ResultTable) -> list[dict]:
    return [r if isinstance(r, dict) else r.as_dict(table.columns) for r in table.rows]


def render(table: ResultTable, fmt: str) -> str:
    """Serialise a table as CSV (header row, shortest round-trip floats) or JSON."""
    recs = _records(table)
    if fmt == "json":
        data = [{c: _json_value(r[c]) for c in table.columns} for r in recs]
        return json.dumps(data, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for r in recs:
        writer.writerow([_cell(r[c]) for c in table.columns])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".mixphase-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def with_overrides(cfg: SweepConfig, **kw) -> SweepConfig:
    """Copy of ``cfg`` with the non-``None`` keyword arguments replaced."""
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
