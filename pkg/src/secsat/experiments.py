"""Scenario description, seeded execution and CSV output of SOP curves.

A :class:`Scenario` lists the swept parameters of one figure-style study.
:func:`run_scenario` groups the sweep by channel statistics (antenna
counts, satellite Rician factor, relay-link model); every group draws one
set of channel realizations and evaluates all powers, rates and schemes on
it, so schemes and grid points share common random numbers.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel
from .errors import ScenarioError
from .power_allocation import TraversalConfig, alpha_optimal_array, alpha_statistical
from .relay_selection import select_instantaneous_batch, select_statistical
from .secrecy import (
    LinkModel,
    SecrecyParams,
    binomial_half_width,
    capacity_at_split,
    chunk_sizes,
    sample_residuals,
    sample_sat_gain,
)
from .streams import Streams

__all__ = [
    "Scenario",
    "SopCurve",
    "PRESETS",
    "preset",
    "load_scenario",
    "scenario_from_dict",
    "run_scenario",
    "emit_csv",
    "format_csv",
    "read_csv",
]

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "custom")
STUDY_SCHEMES = {
    "relay_selection": ("instantaneous", "statistical"),
    "power_allocation": ("uniform", "statistical", "optimal"),
}
CSV_HEADER = ("curve_label", "x_name", "x", "sop", "ci95_half_width", "trials")


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


@dataclass(frozen=True)
class Scenario:
    """One experiment: swept parameters, link statistics and Monte-Carlo budget.

    Fields accepting a single value or a list (a sweep): ``n_s``, ``n_r``,
    ``k_sd``, ``relay_link_model`` and ``delta_alpha``.  ``n_s = None``
    means "same as ``n_r``".  ``mean_powers`` holds ``E||h||^2`` for the
    ``"sd"``, ``"rd"`` and ``"re"`` links; ``relay_mean_powers_re`` (one per
    relay) overrides ``"re"`` in relay-selection studies.
    """

    figure_id: str = "custom"
    study: str = "power_allocation"
    schemes: tuple = ()
    n_s: object = None
    n_r: object = 4
    rate_thresholds: tuple = (1.0,)
    power_grid_db: tuple = (10.0,)
    k_sd: object = 10.0
    k_re: float = 1.0
    relay_link_model: object = "rayleigh"
    relay_count: int = 1
    relay_mean_powers_re: tuple | None = None
    mean_powers: dict = field(default_factory=lambda: {"sd": 1.0, "rd": 1.0, "re": 1.0})
    residual_law: str = "projection"
    trials: int = 100_000
    seed: int = 42
    delta_alpha: object = 0.05

    def __post_init__(self):
        self._validate()

    # ---------------------------------------------------------------- sweeps
    @property
    def n_r_values(self):
        return [int(v) for v in _as_list(self.n_r)]

    def n_s_for(self, n_r):
        if self.n_s is None:
            return n_r
        values = _as_list(self.n_s)
        if len(values) == 1:
            return int(values[0])
        return int(values[self.n_r_values.index(n_r)])

    @property
    def k_sd_values(self):
        return [float(v) for v in _as_list(self.k_sd)]

    @property
    def relay_models(self):
        return [ChannelModel.parse(v) for v in _as_list(self.relay_link_model)]

    @property
    def delta_alphas(self):
        return [float(v) for v in _as_list(self.delta_alpha)]

    @property
    def scheme_list(self):
        return list(self.schemes) if self.schemes else list(STUDY_SCHEMES[self.study])

    @property
    def x_name(self):
        if len(self.power_grid_db) == 1 and len(self.k_sd_values) > 1:
            return "K_sd"
        return "P_dB"

    @property
    def re_powers(self):
        if self.relay_mean_powers_re is not None:
            return [float(p) for p in self.relay_mean_powers_re]
        return [float(self.mean_powers["re"])] * self.relay_count

    # ------------------------------------------------------------ validation
    def _fail(self, msg):
        raise ScenarioError(f"invalid scenario: {msg}")

    def _validate(self):
        if self.figure_id not in FIGURES:
            self._fail(f"figure_id must be one of {FIGURES}, got {self.figure_id!r}")
        if self.study not in STUDY_SCHEMES:
            self._fail(f"study must be one of {tuple(STUDY_SCHEMES)}, got {self.study!r}")
        for s in self.schemes:
            if s not in STUDY_SCHEMES[self.study]:
                self._fail(f"scheme {s!r} not available in study {self.study!r}")
        for name in ("n_r", "k_sd", "relay_link_model", "delta_alpha", "rate_thresholds", "power_grid_db"):
            if len(_as_list(getattr(self, name))) == 0:
                self._fail(f"sweep list {name} must be non-empty")
        if self.n_s is not None:
            n_s = _as_list(self.n_s)
            if len(n_s) not in (1, len(self.n_r_values)):
                self._fail("n_s must be a single value or match the n_r list")
            if any(int(v) != v or v < 1 for v in n_s):
                self._fail("n_s must be positive integers")
        if any(int(v) != v or v < 2 for v in _as_list(self.n_r)):
            self._fail("n_r values must be integers >= 2 (null-space jamming)")
        if any(not (r > 0 and math.isfinite(r)) for r in self.rate_thresholds):
            self._fail("rate_thresholds must be positive")
        if any(not math.isfinite(p) for p in self.power_grid_db):
            self._fail("power_grid_db must be finite")
        if any(k < 0 for k in self.k_sd_values) or self.k_re < 0:
            self._fail("Rician factors must be >= 0")
        try:
            models = self.relay_models
        except Exception as exc:
            self._fail(str(exc))
        if ChannelModel.GAUSSIAN_APPROX in models:
            self._fail("relay_link_model must be rayleigh or rician")
        if any(not 0 < d < 0.5 for d in self.delta_alphas):
            self._fail("delta_alpha values must lie in (0, 0.5)")
        if int(self.relay_count) != self.relay_count or self.relay_count < 1:
            self._fail("relay_count must be a positive integer")
        if set(self.mean_powers) != {"sd", "rd", "re"}:
            self._fail("mean_powers needs exactly the keys sd, rd, re")
        if any(not v > 0 for v in self.mean_powers.values()):
            self._fail("mean_powers must be positive")
        if self.relay_mean_powers_re is not None:
            if len(self.relay_mean_powers_re) != self.relay_count:
                self._fail("relay_mean_powers_re must have relay_count entries")
            if any(not p > 0 for p in self.relay_mean_powers_re):
                self._fail("relay_mean_powers_re must be positive")
        if self.study == "power_allocation" and self.relay_count != 1:
            self._fail("power-allocation studies use a single relay (relay_count = 1)")
        if self.residual_law not in ("projection", "nominal"):
            self._fail("residual_law must be 'projection' or 'nominal'")
        if int(self.trials) != self.trials or self.trials < 1000:
            self._fail(f"trials must be an integer >= 1000, got {self.trials!r}")
        if self.figure_id != "custom" and self.trials < 10_000:
            self._fail("published-figure presets need trials >= 10000")
        if not 0 <= int(self.seed) < 2**64:
            self._fail("seed must be a 64-bit unsigned integer")
        x_sweeps = len(self.power_grid_db) > 1 and len(self.k_sd_values) > 1
        if x_sweeps:
            self._fail("sweep either power_grid_db or k_sd, not both")
        axis = self.power_grid_db if self.x_name == "P_dB" else self.k_sd_values
        if any(b <= a for a, b in zip(axis, axis[1:])):
            self._fail(f"{self.x_name} grid must be strictly increasing")

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


@dataclass
class SopCurve:
    label: str
    x_name: str
    points: list = field(default_factory=list)  # (x, sop, half_width_95)
    trials: int = 0

    def check(self):
        xs = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ScenarioError(f"curve {self.label!r}: x must be strictly increasing")
        if any(not 0 <= p[1] <= 1 for p in self.points):
            raise ScenarioError(f"curve {self.label!r}: SOP outside [0, 1]")


# ---------------------------------------------------------------------------
# Presets

_P_5_15 = tuple(float(p) for p in range(5, 16))
_P_5_20 = tuple(float(p) for p in range(5, 21))

PRESETS = {
    "fig2": dict(
        figure_id="fig2", study="relay_selection", n_r=[2, 4, 8], rate_thresholds=(2.0,),
        power_grid_db=_P_5_15, k_sd=10.0, relay_link_model="rayleigh", relay_count=4,
        relay_mean_powers_re=(0.7, 0.9, 1.1, 1.3), residual_law="projection",
    ),
    "fig3": dict(
        figure_id="fig3", study="relay_selection", n_r=4, rate_thresholds=(1.0, 1.5, 2.0),
        power_grid_db=_P_5_15, k_sd=10.0, relay_link_model="rayleigh", relay_count=4,
        relay_mean_powers_re=(0.7, 0.9, 1.1, 1.3), residual_law="projection",
    ),
    "fig4": dict(
        figure_id="fig4", study="power_allocation", n_r=4, rate_thresholds=(1.0,),
        power_grid_db=(10.0,), k_sd=[float(k) for k in range(0, 21, 2)], k_re=1.0,
        relay_link_model=["rayleigh", "rician"], residual_law="nominal", delta_alpha=0.05,
    ),
    "fig5": dict(
        figure_id="fig5", study="power_allocation", schemes=("statistical",), n_r=4,
        rate_thresholds=(1.0,), power_grid_db=_P_5_15, k_sd=10.0, k_re=1.0,
        relay_link_model=["rayleigh", "rician"], residual_law="nominal",
        delta_alpha=[0.001, 0.005, 0.01, 0.05, 0.1],
    ),
    "fig6": dict(
        figure_id="fig6", study="power_allocation", n_r=[2, 4, 8], rate_thresholds=(1.0,),
        power_grid_db=_P_5_20, k_sd=5.0, k_re=1.0, relay_link_model=["rayleigh", "rician"],
        residual_law="nominal", delta_alpha=0.05,
    ),
    "fig7": dict(
        figure_id="fig7", study="power_allocation", n_r=4, rate_thresholds=(1.0, 1.5, 2.0),
        power_grid_db=_P_5_20, k_sd=5.0, k_re=1.0, relay_link_model=["rayleigh", "rician"],
        residual_law="nominal", delta_alpha=0.05,
    ),
}


def preset(name: str, **overrides) -> Scenario:
    """Scenario reproducing one of the published figures (``"fig2"`` ... ``"fig7"``)."""
    key = name.lower()
    if key not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return scenario_from_dict({**PRESETS[key], **overrides})


_FIELDS = {f.name for f in dataclasses.fields(Scenario)}
_TUPLE_FIELDS = ("schemes", "rate_thresholds", "power_grid_db", "relay_mean_powers_re")


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ScenarioError(f"unknown scenario key(s): {', '.join(unknown)}")
    kwargs = dict(data)
    for name in _TUPLE_FIELDS:
        if name in kwargs and kwargs[name] is not None:
            kwargs[name] = tuple(_as_list(kwargs[name]))
    if "mean_powers" in kwargs:
        kwargs["mean_powers"] = {"sd": 1.0, "rd": 1.0, "re": 1.0, **kwargs["mean_powers"]}
    try:
        return Scenario(**kwargs)
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc


def load_scenario(path) -> Scenario:
    """Read a JSON scenario file, or build a preset when given a preset name."""
    if isinstance(path, str) and path.lower() in PRESETS and not os.path.exists(path):
        return preset(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read scenario {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return scenario_from_dict(data)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Execution


def _fmt(v):
    return f"{v:g}"


def _curve_specs(s: Scenario, n_r, k_sd, model):
    """Yield ``(label, scheme, rate, delta_alpha)`` for one channel group.

    Labels carry the scheme plus every parameter that is swept in the
    scenario, except the x axis.
    """
    multi = {
        "model": len(s.relay_models) > 1,
        "n_r": len(s.n_r_values) > 1,
        "k_sd": len(s.k_sd_values) > 1 and s.x_name != "K_sd",
        "rate": len(s.rate_thresholds) > 1,
        "da": len(s.delta_alphas) > 1,
    }
    for scheme in s.scheme_list:
        steps = s.delta_alphas if (s.study == "power_allocation" and scheme == "statistical") else [None]
        for rate, da in itertools.product(s.rate_thresholds, steps):
            parts = [scheme]
            if multi["model"]:
                parts.append(model.value)
            if multi["n_r"]:
                parts.append(f"N_r={n_r}")
            if multi["k_sd"]:
                parts.append(f"K_sd={_fmt(k_sd)}")
            if multi["rate"]:
                parts.append(f"R_s={_fmt(rate)}")
            if multi["da"] and da is not None:
                parts.append(f"dalpha={_fmt(da)}")
            yield " ".join(parts), scheme, rate, da


def _group_links(s: Scenario, n_r, k_sd, model, re_power):
    return LinkModel.build(
        n_s=s.n_s_for(n_r),
        n_r=n_r,
        sat_model="rician",
        k_sd=k_sd,
        mean_power_sd=s.mean_powers["sd"],
        relay_model=model,
        k_re=s.k_re if model is ChannelModel.RICIAN else 0.0,
        mean_power_re=re_power,
        mean_power_rd=s.mean_powers["rd"],
        residual_law=s.residual_law,
    )


def _run_group(s: Scenario, n_r, k_sd, model):
    """Outage counts ``{(label, P_dB): events}`` for one channel group."""
    powers_db = list(s.power_grid_db)
    specs = list(_curve_specs(s, n_r, k_sd, model))
    relays = [_group_links(s, n_r, k_sd, model, p) for p in s.re_powers]
    stat_relay = select_statistical(s.re_powers) - 1
    # Keyed by the dimensions only: K_sd and relay-model sweeps reuse the
    # same normals, so curves along those axes share random numbers too.
    streams = Streams(s.seed, "group", n_r, s.n_s_for(n_r))

    stat_alpha = {}
    if s.study == "power_allocation":
        for (label, scheme, rate, da), p_db in itertools.product(specs, powers_db):
            if scheme == "statistical":
                cfg = TraversalConfig(
                    step=da,
                    big_p=10 ** (p_db / 10),
                    n_r=n_r,
                    params=SecrecyParams(rate),
                    relay_link_model=model,
                    mean_power_sd=s.mean_powers["sd"],
                    mean_power_re=s.re_powers[0],
                    rician_k_re=s.k_re if model is ChannelModel.RICIAN else 0.0,
                )
                stat_alpha[label, p_db] = alpha_statistical(cfg).alpha

    events = {(label, p): 0 for (label, *_), p in itertools.product(specs, powers_db)}
    for i, n in enumerate(chunk_sizes(s.trials)):
        x = sample_sat_gain(relays[0], streams.generator("chunk", i, "h_sd"), n)
        res = np.stack(
            [
                sample_residuals(
                    links,
                    streams.generator("chunk", i, "relay", k, "h_rd"),
                    streams.generator("chunk", i, "relay", k, "h_re"),
                    n,
                )
                for k, links in enumerate(relays)
            ]
        )
        if s.study == "relay_selection":
            chosen = {
                "instantaneous": select_instantaneous_batch(res) - 1,
                "statistical": np.full(n, stat_relay),
            }
            r_by_scheme = {k: res[v, np.arange(n)] for k, v in chosen.items()}
        for p_db in powers_db:
            big_p = 10 ** (p_db / 10)
            g_sd = big_p * x  # noise normalized to 1
            for label, scheme, rate, _ in specs:
                if s.study == "relay_selection":
                    g_re = big_p * r_by_scheme[scheme]
                    alpha = 0.5
                else:
                    g_re = big_p * res[0]
                    if scheme == "uniform":
                        alpha = 0.5
                    elif scheme == "optimal":
                        alpha = alpha_optimal_array(g_sd, g_re)
                    else:
                        alpha = stat_alpha[label, p_db]
                cap = capacity_at_split(alpha, g_sd, g_sd, g_re)
                events[label, p_db] += int(np.count_nonzero(cap < rate))
    return specs, events


def run_scenario(s: Scenario, threads: int | None = None) -> list[SopCurve]:
    """Simulate every curve of the scenario.

    Output order follows the scenario definition (relay model, ``N_r``,
    ``K_sd``, then scheme/rate/step), never completion order.  Identical
    scenarios (including seed) give identical results.
    """
    k_groups = s.k_sd_values
    groups = [
        (n_r, k, m) for m in s.relay_models for n_r in s.n_r_values for k in k_groups
    ]
    workers = max(1, threads or os.cpu_count() or 1)
    if workers == 1:
        results = [_run_group(s, *g) for g in groups]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda g: _run_group(s, *g), groups))

    curves: dict[str, SopCurve] = {}
    for (n_r, k_sd, model), (specs, events) in zip(groups, results):
        for label, *_ in specs:
            curve = curves.setdefault(label, SopCurve(label, s.x_name, trials=s.trials))
            if s.x_name == "K_sd":
                xs = [(k_sd, s.power_grid_db[0])]
            else:
                xs = [(p, p) for p in s.power_grid_db]
            for x, p_db in xs:
                e = events[label, p_db]
                curve.points.append((float(x), e / s.trials, binomial_half_width(e, s.trials)))
    out = list(curves.values())
    for c in out:
        c.points.sort(key=lambda p: p[0])
        c.check()
    return out


# ---------------------------------------------------------------------------
# CSV


def _rows(curves):
    for c in curves:
        for x, sop, hw in c.points:
            yield [c.label, c.x_name, f"{x:.9g}", f"{sop:.9g}", f"{hw:.9g}", str(c.trials)]


def format_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(_rows(curves))
    return buf.getvalue()


def emit_csv(curves, out) -> None:
    """Write curves as CSV to a path (or a text stream such as ``sys.stdout``)."""
    text = format_csv(curves)
    if hasattr(out, "write"):
        out.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {out}: {exc.strerror or exc}") from exc


def read_csv(path) -> list[SopCurve]:
    """Parse a file written by :func:`emit_csv` back into curves."""
    curves: dict[str, SopCurve] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ScenarioError(f"{path}: unexpected header {header}")
        for label, x_name, x, sop, hw, trials in reader:
            c = curves.setdefault(label, SopCurve(label, x_name, trials=int(trials)))
            c.points.append((float(x), float(sop), float(hw)))
    return list(curves.values())
