"""The coupled GDP/capital flow system and its fixed-step integrator.

State is the pair (Y, K): GDP as a flow in billions per year and the
total financial capital stock in billions.  Growth is driven by the net
business rate p_n(t) = p_v0 * (1 - 2*p_rel(t)), the effective exchange
rate between the capital sphere and the real economy: negative while
direct lending dominates (p_rel > 1/2), positive once banks' own
business does.

    dY/dt = b0(t) + (p_B(t) + p_P(t)) * Y - p_n(t) * K
    dK/dt = a0(t) + p_s(t) * Y + p_n(t) * K

All rates are annual (1/year); time is measured in years since the
start year t0, and trajectories are recorded at whole years.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .errors import ParameterError

_VALID_METHODS = ("rk4", "euler")


@dataclass(frozen=True)
class RateFn:
    """A time-parameterized annual rate.

    Three shapes: a constant; a per-year table (keys are whole years
    since t0, values hold for [year, year+1), flat extrapolation beyond
    both ends); or the decaying-lending-share law
    p_rel(t) = (p_rel0/e) * exp(-(t - T_h)/T_h), which starts at p_rel0
    for t = 0 and halves the surplus over the 1/2 line on the scale of
    T_h years.
    """

    kind: str
    value: float = 0.0
    entries: tuple[tuple[int, float], ...] = ()
    p_rel0: float = 1.0
    T_h: float = 80.0

    @classmethod
    def constant(cls, value: float) -> "RateFn":
        return cls(kind="constant", value=float(value))

    @classmethod
    def table(cls, values: Mapping[int, float]) -> "RateFn":
        if not values:
            raise ParameterError("rate table must not be empty")
        entries = tuple(sorted((int(k), float(v)) for k, v in values.items()))
        years = [k for k, _ in entries]
        for prev, cur in zip(years, years[1:]):
            if cur != prev + 1:
                raise ParameterError(
                    f"rate table years not contiguous between {prev} and {cur}"
                )
        return cls(kind="table", entries=entries)

    @classmethod
    def table_from_years(cls, values: Mapping[int, float], t0: int) -> "RateFn":
        """Build a table keyed by calendar years, rebased to offsets from t0."""
        return cls.table({int(k) - t0: v for k, v in values.items()})

    @classmethod
    def exponential_prel(cls, p_rel0: float = 1.0, T_h: float = 80.0) -> "RateFn":
        if not 0 < p_rel0 <= 1:
            raise ParameterError(f"p_rel0 must lie in (0, 1], got {p_rel0}")
        if not T_h > 0:
            raise ParameterError(f"T_h must be > 0, got {T_h}")
        return cls(kind="exponential_prel", p_rel0=float(p_rel0), T_h=float(T_h))

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "table":
            idx = math.floor(t)
            first, last = self.entries[0][0], self.entries[-1][0]
            idx = min(max(idx, first), last)
            return self.entries[idx - first][1]
        if self.kind == "exponential_prel":
            return (self.p_rel0 / math.e) * math.exp(-(t - self.T_h) / self.T_h)
        raise ParameterError(f"unknown rate kind {self.kind!r}")


def _as_rate(value) -> RateFn:
    if isinstance(value, RateFn):
        return value
    if isinstance(value, (int, float)):
        return RateFn.constant(value)
    raise ParameterError(f"expected a rate or number, got {type(value).__name__}")


@dataclass(frozen=True)
class ModelParams:
    """All rates and constants of one economy's flow system.

    p_v0 is the average nominal interest rate over all assets; prel_fn
    gives the direct-lending share p_rel(t); p_s the savings rate; p_B
    the population-growth rate; p_P the effective productivity rate;
    a0 and b0 are external capital/GDP inflows in billions per year.
    Y0, K0 set the initial state at the start year t0.  Numbers passed
    for any rate field are wrapped as constants.
    """

    Y0: float
    K0: float
    p_v0: float = 0.055
    prel_fn: RateFn = field(default_factory=lambda: RateFn.exponential_prel(1.0, 80.0))
    p_s: RateFn = field(default_factory=lambda: RateFn.constant(0.1))
    p_B: RateFn = field(default_factory=lambda: RateFn.constant(0.0))
    p_P: RateFn = field(default_factory=lambda: RateFn.constant(0.0))
    a0: RateFn = field(default_factory=lambda: RateFn.constant(0.0))
    b0: RateFn = field(default_factory=lambda: RateFn.constant(0.0))
    t0: int = 0

    def __post_init__(self) -> None:
        for name in ("prel_fn", "p_s", "p_B", "p_P", "a0", "b0"):
            object.__setattr__(self, name, _as_rate(getattr(self, name)))
        if self.p_v0 < 0:
            raise ParameterError(f"p_v0 must be >= 0, got {self.p_v0}")
        if not self.Y0 > 0:
            raise ParameterError(f"Y0 must be > 0, got {self.Y0}")
        if not self.K0 > 0:
            raise ParameterError(f"K0 must be > 0, got {self.K0}")

    def scaled(self, factor: float) -> "ModelParams":
        """Scale the initial state and both external inflows by one factor."""
        return replace(
            self,
            Y0=self.Y0 * factor,
            K0=self.K0 * factor,
            a0=RateFn.constant(0.0) if factor == 0 else _scale_rate(self.a0, factor),
            b0=RateFn.constant(0.0) if factor == 0 else _scale_rate(self.b0, factor),
        )


def _scale_rate(rate: RateFn, factor: float) -> RateFn:
    if rate.kind == "constant":
        return RateFn.constant(rate.value * factor)
    if rate.kind == "table":
        return RateFn.table({k: v * factor for k, v in rate.entries})
    raise ParameterError("cannot scale an exponential lending-share rate")


@dataclass(frozen=True)
class Trajectory:
    """Whole-year samples of one integration run.

    ``years`` holds calendar years (t0 + offset).  ``dY`` and ``dK``
    are the instantaneous right-hand sides evaluated at each recorded
    state.  stop_reason is 'horizon', 'gdp_nonpositive', or 'diverged'.
    """

    years: np.ndarray
    Y: np.ndarray
    K: np.ndarray
    p_n: np.ndarray
    p_s: np.ndarray
    p_B: np.ndarray
    dY: np.ndarray
    dK: np.ndarray
    stop_reason: str
    t0: int
    step: float
    method: str

    def __len__(self) -> int:
        return len(self.years)

    def peak_year(self) -> int:
        return int(self.years[int(np.argmax(self.Y))])

    def collapse_year(self) -> Optional[int]:
        """First recorded year with Y <= 0, or None."""
        idx = np.nonzero(self.Y <= 0.0)[0]
        return int(self.years[idx[0]]) if idx.size else None

    def value_at(self, year: int, column: str = "Y") -> float:
        idx = np.nonzero(self.years == year)[0]
        if not idx.size:
            raise ParameterError(f"year {year} not recorded")
        return float(getattr(self, column)[idx[0]])


def net_business_rate(params: ModelParams, t: float) -> float:
    """p_n(t) = p_v0 * (1 - 2 * p_rel(t)), in 1/year.

    With the decaying lending-share law and p_rel0 = 1 this starts at
    -p_v0, crosses zero at t = T_h * ln 2 (where GDP growth stops), and
    saturates toward +p_v0.
    """
    return params.p_v0 * (1.0 - 2.0 * params.prel_fn(t))


def rhs(params: ModelParams, t: float, Y: float, K: float) -> tuple[float, float]:
    """Instantaneous (dY/dt, dK/dt) at state (Y, K), time t since t0."""
    p_n = net_business_rate(params, t)
    dY = params.b0(t) + (params.p_B(t) + params.p_P(t)) * Y - p_n * K
    dK = params.a0(t) + params.p_s(t) * Y + p_n * K
    return dY, dK


def _advance(params: ModelParams, t: float, y: np.ndarray, h: float, method: str) -> np.ndarray:
    if method == "euler":
        dY, dK = rhs(params, t, y[0], y[1])
        return y + h * np.array([dY, dK])
    k1 = np.array(rhs(params, t, y[0], y[1]))
    y2 = y + 0.5 * h * k1
    k2 = np.array(rhs(params, t + 0.5 * h, y2[0], y2[1]))
    y3 = y + 0.5 * h * k2
    k3 = np.array(rhs(params, t + 0.5 * h, y3[0], y3[1]))
    y4 = y + h * k3
    k4 = np.array(rhs(params, t + h, y4[0], y4[1]))
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    params: ModelParams,
    horizon: float,
    step: float = 0.25,
    method: str = "rk4",
    allow_negative: bool = False,
) -> Trajectory:
    """Fixed-step integration from (Y0, K0), recorded at whole years.

    The step is snapped to the nearest integer division of a year so
    records land exactly on year boundaries.  Integration stops early
    with 'gdp_nonpositive' when a recorded year has Y <= 0 (unless
    allow_negative), or with 'diverged' when the state stops being
    finite; otherwise it runs to the horizon.
    """
    if not horizon > 0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")
    if not 0 < step <= 1:
        raise ParameterError(f"step must lie in (0, 1], got {step}")
    if method not in _VALID_METHODS:
        raise ParameterError(f"method must be one of {_VALID_METHODS}, got {method!r}")

    per_year = max(1, round(1.0 / step))
    h = 1.0 / per_year
    n_years = int(math.floor(horizon + 1e-12))

    rows = []
    y = np.array([params.Y0, params.K0], dtype=float)
    stop = "horizon"
    for year in range(n_years + 1):
        t = float(year)
        if not np.all(np.isfinite(y)):
            stop = "diverged"
            break
        dY, dK = rhs(params, t, y[0], y[1])
        rows.append(
            (
                params.t0 + year,
                y[0],
                y[1],
                net_business_rate(params, t),
                params.p_s(t),
                params.p_B(t),
                dY,
                dK,
            )
        )
        if y[0] <= 0.0 and not allow_negative:
            stop = "gdp_nonpositive"
            break
        if year == n_years:
            break
        for k in range(per_year):
            y = _advance(params, t + k * h, y, h, method)
            if not np.all(np.isfinite(y)):
                break

    cols = np.array(rows, dtype=float).T
    return Trajectory(
        years=cols[0],
        Y=cols[1],
        K=cols[2],
        p_n=cols[3],
        p_s=cols[4],
        p_B=cols[5],
        dY=cols[6],
        dK=cols[7],
        stop_reason=stop,
        t0=params.t0,
        step=h,
        method=method,
    )


def rate_from_config(value, t0: int = 0) -> RateFn:
    """Decode a rate from config: a number, {"table": {year: v}}, or
    {"exponential_prel": {"p_rel0": ..., "T_h": ...}}.  Table keys are
    calendar years, rebased against t0."""
    if isinstance(value, (int, float)):
        return RateFn.constant(value)
    if isinstance(value, Mapping):
        if set(value) == {"table"}:
            return RateFn.table_from_years(
                {int(k): float(v) for k, v in value["table"].items()}, t0
            )
        if set(value) == {"exponential_prel"}:
            spec = dict(value["exponential_prel"])
            unknown = set(spec) - {"p_rel0", "T_h"}
            if unknown:
                raise ParameterError(f"unknown exponential_prel keys {sorted(unknown)}")
            return RateFn.exponential_prel(
                spec.get("p_rel0", 1.0), spec.get("T_h", 80.0)
            )
        raise ParameterError(f"unknown rate spec {sorted(value)}")
    raise ParameterError(f"cannot decode rate from {value!r}")


_RATE_KEYS = ("prel_fn", "p_s", "p_B", "p_P", "a0", "b0")
_SCALAR_KEYS = ("Y0", "K0", "p_v0", "t0")


def params_from_config(cfg: Mapping) -> ModelParams:
    """Build ModelParams from a config mapping; unknown keys are rejected."""
    unknown = set(cfg) - set(_RATE_KEYS) - set(_SCALAR_KEYS)
    if unknown:
        raise ParameterError(f"unknown config keys {sorted(unknown)}")
    if "Y0" not in cfg or "K0" not in cfg:
        raise ParameterError("config must set Y0 and K0")
    t0 = int(cfg.get("t0", 0))
    kwargs: dict = {
        "Y0": float(cfg["Y0"]),
        "K0": float(cfg["K0"]),
        "p_v0": float(cfg.get("p_v0", 0.055)),
        "t0": t0,
    }
    for key in _RATE_KEYS:
        if key in cfg:
            kwargs[key] = rate_from_config(cfg[key], t0)
    return ModelParams(**kwargs)
