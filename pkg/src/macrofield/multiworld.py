"""Coupled economies: N flow systems linked by transfer matrices.

Each economy follows its own GDP/capital system; the coupling adds a
GDP-transfer matrix B0 and a capital-transfer matrix A0, both in
billions per year.  In a closed world the matrices are antisymmetric,
M[i][j] = -M[j][i]: whatever one economy exports the partner imports,
so the transfer terms cancel in the world sum.  Rows may be declared
exogenous to represent money creation or depreciation with no trading
partner; only such declared rows may break antisymmetry.

Cross-economy flows settle on an annual basis, so state-dependent
transfers (the capital-export experiment) are refreshed once per whole
year and held constant in between, a one-year retardation buffer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ParameterError
from .model import (
    ModelParams,
    RateFn,
    Trajectory,
    _as_rate,
    net_business_rate,
    params_from_config,
    rate_from_config,
    rhs,
)

_VALID_METHODS = ("rk4", "euler")
# Sample times for the construction-time antisymmetry check of
# time-dependent matrix entries.
_CHECK_TIMES = (0.0, 0.5, 1.0, 2.0, 5.0, 13.0, 41.0, 97.0)


def _zero_matrix(n: int) -> tuple[tuple[RateFn, ...], ...]:
    zero = RateFn.constant(0.0)
    return tuple(tuple(zero for _ in range(n)) for _ in range(n))


@dataclass(frozen=True)
class WorldParams:
    """N economies plus the two transfer matrices.

    A0[i][j] is the net capital inflow to economy i from economy j,
    B0[i][j] the net GDP (demand) inflow; entries are rates (numbers
    are wrapped as constants).  Antisymmetry is verified at a fixed
    sample of times for every pair whose rows are both non-exogenous;
    diagonals must be zero.
    """

    economies: tuple[ModelParams, ...]
    A0: Optional[tuple[tuple[RateFn, ...], ...]] = None
    B0: Optional[tuple[tuple[RateFn, ...], ...]] = None
    exogenous_rows: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        economies = tuple(self.economies)
        if not economies:
            raise ParameterError("world needs at least one economy")
        object.__setattr__(self, "economies", economies)
        n = len(economies)
        for name in ("A0", "B0"):
            mat = getattr(self, name)
            if mat is None:
                mat = _zero_matrix(n)
            else:
                mat = tuple(tuple(_as_rate(v) for v in row) for row in mat)
                if len(mat) != n or any(len(row) != n for row in mat):
                    raise ParameterError(
                        f"{name} must be {n}x{n} to match the economies"
                    )
            object.__setattr__(self, name, mat)
        exo = frozenset(int(i) for i in self.exogenous_rows)
        if any(i < 0 or i >= n for i in exo):
            raise ParameterError(f"exogenous_rows out of range: {sorted(exo)}")
        object.__setattr__(self, "exogenous_rows", exo)
        self._check_antisymmetry()

    def _check_antisymmetry(self) -> None:
        n = len(self.economies)
        for name in ("A0", "B0"):
            mat = getattr(self, name)
            for i in range(n):
                for t in _CHECK_TIMES:
                    if mat[i][i](t) != 0.0:
                        raise ParameterError(f"{name}[{i}][{i}] must be zero")
                if i in self.exogenous_rows:
                    continue
                for j in range(i + 1, n):
                    if j in self.exogenous_rows:
                        continue
                    for t in _CHECK_TIMES:
                        a, b = mat[i][j](t), mat[j][i](t)
                        if abs(a + b) > 1e-12 * max(1.0, abs(a)):
                            raise ParameterError(
                                f"{name}[{i}][{j}] and {name}[{j}][{i}] are not "
                                f"antisymmetric at t={t}: {a} vs {b}; declare an "
                                "exogenous row if the imbalance is intentional"
                            )

    @property
    def n_economies(self) -> int:
        return len(self.economies)


def transfer_balance(world: WorldParams, t: float) -> tuple[float, float]:
    """World sums of all capital and GDP transfer entries at time t.

    Both are zero for a fully antisymmetric world (closed-world
    conservation); a nonzero value measures declared exogenous
    creation or depreciation.
    """
    n = world.n_economies
    cap = sum(world.A0[i][j](t) for i in range(n) for j in range(n))
    gdp = sum(world.B0[i][j](t) for i in range(n) for j in range(n))
    return cap, gdp


def world_rhs(
    world: WorldParams,
    t: float,
    states,
    *,
    local_times: Optional[Sequence[float]] = None,
    active: Optional[Sequence[bool]] = None,
) -> np.ndarray:
    """Per-economy (dY/dt, dK/dt) including the transfer row sums.

    states has one (Y, K) row per economy.  Each economy's own rates
    are evaluated at its local time (default: t for all); transfer
    matrix entries are evaluated at world time t and applied only
    between active economies.  Inactive economies are frozen: both
    derivatives zero.
    """
    n = world.n_economies
    arr = np.asarray(states, dtype=float)
    if arr.shape != (n, 2):
        raise ParameterError(
            f"states must have shape ({n}, 2), got {arr.shape}"
        )
    if local_times is None:
        local_times = [t] * n
    if active is None:
        active = [True] * n

    out = np.zeros((n, 2), dtype=float)
    for i, econ in enumerate(world.economies):
        if not active[i]:
            continue
        dY, dK = rhs(econ, local_times[i], arr[i, 0], arr[i, 1])
        dY += sum(
            world.B0[i][j](t) for j in range(n) if j != i and active[j]
        )
        dK += sum(
            world.A0[i][j](t) for j in range(n) if j != i and active[j]
        )
        out[i, 0] = dY
        out[i, 1] = dK
    return out


@dataclass(frozen=True)
class WorldTrajectory:
    """Whole-year samples of a coupled run.

    years are world-clock offsets from 0; all state and rate arrays
    have shape (N, len(years)).  Recorded derivatives include the
    transfer terms.  Rows of a not-yet-started economy hold the frozen
    initial state with zero rates and derivatives.
    """

    years: np.ndarray
    Y: np.ndarray
    K: np.ndarray
    p_n: np.ndarray
    p_s: np.ndarray
    p_B: np.ndarray
    dY: np.ndarray
    dK: np.ndarray
    starts: tuple[float, ...]
    stop_reason: str
    step: float
    method: str

    def __len__(self) -> int:
        return len(self.years)

    @property
    def n_economies(self) -> int:
        return self.Y.shape[0]

    def peak_year(self, i: int) -> int:
        mask = self.years >= self.starts[i]
        idx = int(np.argmax(self.Y[i][mask]))
        return int(self.years[mask][idx])

    def collapse_year(self, i: int) -> Optional[int]:
        """First recorded year at or after economy i's start with Y <= 0."""
        mask = (self.years >= self.starts[i]) & (self.Y[i] <= 0.0)
        idx = np.nonzero(mask)[0]
        return int(self.years[idx[0]]) if idx.size else None

    def economy(self, i: int) -> Trajectory:
        """Single-economy view, usable by the per-trajectory diagnostics."""
        return Trajectory(
            years=self.years.copy(),
            Y=self.Y[i].copy(),
            K=self.K[i].copy(),
            p_n=self.p_n[i].copy(),
            p_s=self.p_s[i].copy(),
            p_B=self.p_B[i].copy(),
            dY=self.dY[i].copy(),
            dK=self.dK[i].copy(),
            stop_reason=self.stop_reason,
            t0=0,
            step=self.step,
            method=self.method,
        )


def _advance_vec(f, t: float, y: np.ndarray, h: float, method: str) -> np.ndarray:
    if method == "euler":
        return y + h * f(t, y)
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _validate_run(horizon: float, step: float, method: str) -> tuple[int, float, int]:
    if not horizon > 0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")
    if not 0 < step <= 1:
        raise ParameterError(f"step must lie in (0, 1], got {step}")
    if method not in _VALID_METHODS:
        raise ParameterError(f"method must be one of {_VALID_METHODS}, got {method!r}")
    per_year = max(1, round(1.0 / step))
    return per_year, 1.0 / per_year, int(math.floor(horizon + 1e-12))


def _run_world(
    world: WorldParams,
    horizon: float,
    step: float,
    method: str,
    starts: tuple[float, ...],
    transfer_hook=None,
) -> WorldTrajectory:
    """Shared whole-year recording loop.

    transfer_hook(year, states) -> (n, 2) array of extra derivative
    terms, refreshed once per whole year and held constant through it
    (the annual retardation buffer); None means no state-dependent
    transfers.
    """
    per_year, h, n_years = _validate_run(horizon, step, method)
    n = world.n_economies
    state = np.array([(e.Y0, e.K0) for e in world.economies], dtype=float)
    held = np.zeros((n, 2), dtype=float)

    def f(t_eval: float, y: np.ndarray) -> np.ndarray:
        active = [t_eval >= s - 1e-9 for s in starts]
        local = [t_eval - s for s in starts]
        out = world_rhs(world, t_eval, y, local_times=local, active=active)
        if transfer_hook is not None:
            for i in range(n):
                if active[i]:
                    out[i] += held[i]
        return out

    rows_years, rows = [], {k: [] for k in ("Y", "K", "p_n", "p_s", "p_B", "dY", "dK")}
    stop = "horizon"
    for year in range(n_years + 1):
        t = float(year)
        if not np.all(np.isfinite(state)):
            stop = "diverged"
            break
        if transfer_hook is not None:
            held = np.asarray(transfer_hook(t, state), dtype=float)
        active_now = [t >= s - 1e-9 for s in starts]
        deriv = f(t, state)
        rows_years.append(year)
        rows["Y"].append(state[:, 0].copy())
        rows["K"].append(state[:, 1].copy())
        rows["dY"].append(deriv[:, 0].copy())
        rows["dK"].append(deriv[:, 1].copy())
        for key, fn in (
            ("p_n", lambda e, tau: net_business_rate(e, tau)),
            ("p_s", lambda e, tau: e.p_s(tau)),
            ("p_B", lambda e, tau: e.p_B(tau)),
        ):
            rows[key].append(
                np.array(
                    [
                        fn(world.economies[i], t - starts[i]) if active_now[i] else 0.0
                        for i in range(n)
                    ]
                )
            )
        if year == n_years:
            break
        for k in range(per_year):
            state = _advance_vec(f, t + k * h, state, h, method)
            if not np.all(np.isfinite(state)):
                break

    return WorldTrajectory(
        years=np.array(rows_years, dtype=float),
        Y=np.array(rows["Y"]).T,
        K=np.array(rows["K"]).T,
        p_n=np.array(rows["p_n"]).T,
        p_s=np.array(rows["p_s"]).T,
        p_B=np.array(rows["p_B"]).T,
        dY=np.array(rows["dY"]).T,
        dK=np.array(rows["dK"]).T,
        starts=starts,
        stop_reason=stop,
        step=h,
        method=method,
    )


def integrate_world(
    world: WorldParams,
    horizon: float,
    step: float = 0.25,
    method: str = "rk4",
    *,
    starts: Optional[Sequence[float]] = None,
) -> WorldTrajectory:
    """Fixed-step integration of the coupled world, recorded at whole
    years.  starts gives each economy's activation time on the world
    clock (default 0 for all); an economy is frozen before its start
    and its rate functions then run on local time t - start.  Unlike
    the single-economy integrator the world run does not stop at a GDP
    collapse: partners keep evolving, and per-economy collapse years
    are read off the recorded samples.
    """
    if starts is None:
        starts_t = tuple(0.0 for _ in world.economies)
    else:
        starts_t = tuple(float(s) for s in starts)
        if len(starts_t) != world.n_economies:
            raise ParameterError(
                f"starts must have {world.n_economies} entries, got {len(starts_t)}"
            )
        if any(s < 0 for s in starts_t):
            raise ParameterError("starts must be >= 0")
    return _run_world(world, horizon, step, method, starts_t)


@dataclass(frozen=True)
class CapitalExportResult:
    """Coupled and decoupled runs of the capital-export scenario."""

    coupled: WorldTrajectory
    standalone: WorldTrajectory
    export_fraction: float
    start_lag_years: float

    def summary(self) -> dict:
        out = {}
        for label, traj in (("coupled", self.coupled), ("standalone", self.standalone)):
            for i, econ in enumerate(("strong", "weak")):
                out[f"{label}_{econ}_peak_gdp"] = float(
                    np.max(traj.Y[i][traj.years >= traj.starts[i]])
                )
                out[f"{label}_{econ}_peak_year"] = traj.peak_year(i)
                out[f"{label}_{econ}_collapse_year"] = traj.collapse_year(i)
        return out


def capital_export_experiment(
    strong: ModelParams,
    weak: ModelParams,
    export_fraction: float,
    start_lag_years: float,
    *,
    horizon: float = 140.0,
    step: float = 0.25,
    method: str = "rk4",
) -> CapitalExportResult:
    """Two-economy run where the strong economy exports capital.

    The weak economy activates start_lag_years into the run with its
    own rate clock.  From then on a capital flow of export_fraction
    times the strong economy's GDP leaves the strong capital stock and
    enters the weak one; the amount is refreshed at each whole year
    from the year-start GDP (floored at zero once the exporter has
    collapsed) and held constant through the year.  The standalone run
    is the identical world with the flow switched off.
    """
    if export_fraction < 0:
        raise ParameterError(f"export_fraction must be >= 0, got {export_fraction}")
    if start_lag_years < 0:
        raise ParameterError(f"start_lag_years must be >= 0, got {start_lag_years}")

    world = WorldParams(economies=(strong, weak))
    starts = (0.0, float(start_lag_years))

    def hook_for(frac: float):
        def hook(t: float, state: np.ndarray) -> np.ndarray:
            extra = np.zeros((2, 2))
            if frac > 0 and t >= start_lag_years - 1e-9:
                flow = frac * max(state[0, 0], 0.0)
                extra[0, 1] = -flow
                extra[1, 1] = +flow
            return extra

        return hook

    coupled = _run_world(world, horizon, step, method, starts, hook_for(export_fraction))
    standalone = _run_world(world, horizon, step, method, starts, hook_for(0.0))
    return CapitalExportResult(
        coupled=coupled,
        standalone=standalone,
        export_fraction=float(export_fraction),
        start_lag_years=float(start_lag_years),
    )


@dataclass(frozen=True)
class AmplificationReport:
    """Nominal vs retarded effect of a derivative sale of size B
    against assets A: the simultaneous bookkeeping triples the impact
    on the buyer (GDP falls by 3B, capital rises by 3A), while annual
    retardation softens the multiplier to about 2."""

    nominal_dY: float
    nominal_dK: float
    retarded_dY: float
    retarded_dK: float
    nominal_factor: float = 3.0
    retarded_factor: float = 2.0


def derivative_sales_amplification(B: float, A: float) -> AmplificationReport:
    """Multipliers for an equal-amount derivative sale (|B| = |A|)."""
    if not math.isclose(abs(B), abs(A), rel_tol=1e-12, abs_tol=1e-300):
        raise ParameterError(
            f"the equal-amount case needs |B| = |A|, got |{B}| vs |{A}|"
        )
    return AmplificationReport(
        nominal_dY=-3.0 * B,
        nominal_dK=3.0 * A,
        retarded_dY=-2.0 * B,
        retarded_dK=2.0 * A,
    )


def world_from_config(cfg: Mapping) -> WorldParams:
    """Build a world from config: a list of economies plus sparse
    directed transfer entries {from, to, kind: capital|gdp, rate}.

    Each entry adds rate to the receiver's row and the negated rate to
    the sender's, so the matrices are antisymmetric by construction.
    Economies may carry a "name" used by from/to; otherwise indices.
    Money creation is not a transfer: give the economy itself an a0
    or b0 inflow instead.
    """
    unknown = set(cfg) - {"economies", "transfers"}
    if unknown:
        raise ParameterError(f"unknown world config keys {sorted(unknown)}")
    if "economies" not in cfg or not cfg["economies"]:
        raise ParameterError("world config must list economies")

    names: dict[str, int] = {}
    economies = []
    for idx, entry in enumerate(cfg["economies"]):
        entry = dict(entry)
        name = entry.pop("name", None)
        if name is not None:
            if name in names:
                raise ParameterError(f"duplicate economy name {name!r}")
            names[str(name)] = idx
        economies.append(params_from_config(entry))
    n = len(economies)

    def resolve(ref) -> int:
        if isinstance(ref, str):
            if ref not in names:
                raise ParameterError(f"unknown economy {ref!r}")
            return names[ref]
        idx = int(ref)
        if not 0 <= idx < n:
            raise ParameterError(f"economy index {idx} out of range")
        return idx

    a0 = [[RateFn.constant(0.0)] * n for _ in range(n)]
    b0 = [[RateFn.constant(0.0)] * n for _ in range(n)]
    seen = set()
    for entry in cfg.get("transfers", ()):
        unknown = set(entry) - {"from", "to", "kind", "rate"}
        if unknown:
            raise ParameterError(f"unknown transfer keys {sorted(unknown)}")
        missing = {"from", "to", "kind", "rate"} - set(entry)
        if missing:
            raise ParameterError(f"transfer entry missing {sorted(missing)}")
        src, dst = resolve(entry["from"]), resolve(entry["to"])
        if src == dst:
            raise ParameterError("transfer source and target must differ")
        kind = entry["kind"]
        if kind not in ("capital", "gdp"):
            raise ParameterError(f"transfer kind must be capital or gdp, got {kind!r}")
        key = (kind, frozenset((src, dst)))
        if key in seen:
            raise ParameterError(
                f"duplicate {kind} transfer between economies {src} and {dst}"
            )
        seen.add(key)
        rate = rate_from_config(entry["rate"])
        mat = a0 if kind == "capital" else b0
        mat[dst][src] = rate
        mat[src][dst] = _negate_rate(rate)

    return WorldParams(
        economies=tuple(economies),
        A0=tuple(tuple(row) for row in a0),
        B0=tuple(tuple(row) for row in b0),
    )


def _negate_rate(rate: RateFn) -> RateFn:
    if rate.kind == "constant":
        return RateFn.constant(-rate.value)
    if rate.kind == "table":
        return RateFn.table({k: -v for k, v in rate.entries})
    raise ParameterError(f"cannot negate a rate of kind {rate.kind!r}")
