"""Closed-form solutions of the flow system with frozen rates.

With constant p_n and p_s and no external inflows, the two-field system
decouples into a second-order problem whose character is set by the
growth discriminant

    Phi = p_n * (4 * p_s - p_n)      [1/year^2]

Phi < 0 gives the growing (cosh/sinh) branch, Phi > 0 the oscillating
(cos/sin) branch, and Phi = 0 two algebraic border cases.  Note the
orientation: *negative* discriminant means growth, so the hyperbolic
functions carry a real argument sqrt(-Phi)*t/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ImaginaryTimeError, ParameterError, PoleError

# Discriminant window treated as zero: below double-precision
# discrimination the algebraic limit formulas are the correct branch.
EPS_PHI = 1e-12
# Division guard for the closed-form capital coefficient's denominator.
EPS_DIV = 1e-9


def phi(p_n: float, p_s: float) -> float:
    """Growth discriminant p_n * (4*p_s - p_n), in 1/year^2."""
    return p_n * (4.0 * p_s - p_n)


@dataclass(frozen=True)
class AnalyticBranch:
    """One frozen-rate solution segment.

    kind is 'hyperbolic' (Phi < 0), 'harmonic' (Phi > 0), or one of the
    border cases 'degenerate_pn0' / 'degenerate_pn4ps'.  Both state
    components share the envelope exp(p_n*t/2); ``by`` and ``bk`` are
    the sinh/sin coefficients of Y and K, ``root`` is sqrt(|Phi|).
    alpha0 = Y0/K0 and beta_s = p_s/p_n (None when p_n = 0) are the
    conventional shorthand ratios.
    """

    p_n: float
    p_s: float
    Y0: float
    K0: float
    phi: float
    kind: str
    root: float
    by: float
    bk: float
    alpha0: float
    beta_s: Optional[float]

    @classmethod
    def from_rates(cls, p_n: float, p_s: float, Y0: float, K0: float) -> "AnalyticBranch":
        d = phi(p_n, p_s)
        if d < -EPS_PHI:
            kind = "hyperbolic"
            root = math.sqrt(-d)
        elif d > EPS_PHI:
            kind = "harmonic"
            root = math.sqrt(d)
        else:
            # Phi ~ 0 through one of its two factors; p_n = 0 is its own
            # branch even when p_s = 0 makes the factors coincide.
            kind = "degenerate_pn0" if abs(p_n) <= abs(4.0 * p_s - p_n) else "degenerate_pn4ps"
            root = 0.0
        if root > 0.0:
            by = -p_n * (Y0 + 2.0 * K0) / root
            bk = (2.0 * p_s * Y0 + p_n * K0) / root
        else:
            # Linear-in-t limit coefficients (root*S -> t).
            by = -p_n * (Y0 + 2.0 * K0) / 2.0
            bk = (2.0 * p_s * Y0 + p_n * K0) / 2.0
        return cls(
            p_n=p_n,
            p_s=p_s,
            Y0=Y0,
            K0=K0,
            phi=d,
            kind=kind,
            root=root,
            by=by,
            bk=bk,
            alpha0=Y0 / K0,
            beta_s=(p_s / p_n) if p_n != 0.0 else None,
        )


def _envelope_parts(branch: AnalyticBranch, t):
    """(C, S, envelope) such that X(t) = envelope * (X0*C + bx*S)."""
    t = np.asarray(t, dtype=float)
    env = np.exp(0.5 * branch.p_n * t)
    if branch.kind == "hyperbolic":
        arg = 0.5 * branch.root * t
        return np.cosh(arg), np.sinh(arg), env
    if branch.kind == "harmonic":
        arg = 0.5 * branch.root * t
        return np.cos(arg), np.sin(arg), env
    # Degenerate limit: C -> 1 and root*S -> t, with by/bk already
    # carrying the halved coefficients.
    return np.ones_like(t), t, env


def basis_solution(branch: AnalyticBranch, t):
    """Evaluate (Y, K) of the branch at t years (scalar or array).

    At t = 0 every branch returns (Y0, K0) exactly; the p_n = 0 border
    case reduces to Y = Y0, K = K0 + p_s*Y0*t.
    """
    C, S, env = _envelope_parts(branch, t)
    Y = env * (branch.Y0 * C + branch.by * S)
    K = env * (branch.K0 * C + branch.bk * S)
    if np.ndim(t) == 0:
        return float(Y), float(K)
    return Y, K


def capital_coefficient_closed(branch: AnalyticBranch, t) -> float:
    """K/Y from the closed form; the shared envelope cancels.

    Raises PoleError when the unexponentiated GDP factor falls below
    the division guard -- the coefficient diverges where GDP vanishes.
    """
    C, S, _ = _envelope_parts(branch, t)
    den = branch.Y0 * C + branch.by * S
    num = branch.K0 * C + branch.bk * S
    if np.any(np.abs(den) < EPS_DIV):
        raise PoleError(
            f"GDP factor below {EPS_DIV} at t={t}; capital coefficient diverges"
        )
    out = num / den
    return float(out) if np.ndim(t) == 0 else out


def characteristic_time(p_n: float, p_s: float) -> float:
    """Full-cycle horizon 4*pi/sqrt(-Phi), in years; requires Phi < 0."""
    d = phi(p_n, p_s)
    if d >= 0.0:
        raise ImaginaryTimeError(
            f"discriminant {d} is >= 0; the characteristic time is imaginary"
        )
    return 4.0 * math.pi / math.sqrt(-d)


def characteristic_frequency(p_n: float, p_s: float) -> float:
    """sqrt(-Phi)/(4*pi), in 1/year; requires Phi < 0."""
    return 1.0 / characteristic_time(p_n, p_s)


def t_max(T_h: float) -> float:
    """Years until GDP growth stops under the decaying lending share.

    The net business rate crosses zero when p_rel falls to 1/2, which
    happens at T_h * ln 2 after the (virtual) start with p_rel0 = 1.
    """
    if not T_h > 0:
        raise ParameterError(f"T_h must be > 0, got {T_h}")
    return T_h * math.log(2.0)


@dataclass(frozen=True)
class RegimeReport:
    """Growth-regime classification at given (p_v, p_rel, p_s).

    regime is 'growth' (Phi < 0), 'crisis' (Phi > 0), or 'boundary'.
    For growth, ``condition`` names the active disjunct: 'p_n_negative'
    (direct lending dominates, p_rel on the far side of 1/2 for the
    sign of p_v) or 'p_n_above_4ps' (the rate outruns four times the
    savings rate).  p_arel = p_rel - 1/2 is the adjusted lending share.
    """

    p_n: float
    phi: float
    regime: str
    condition: Optional[str]
    p_arel: float


def classify_regime(p_v: float, p_rel: float, p_s: float) -> RegimeReport:
    p_n = p_v * (1.0 - 2.0 * p_rel)
    d = phi(p_n, p_s)
    if d < -EPS_PHI:
        regime = "growth"
        condition = "p_n_negative" if p_n < 0 else "p_n_above_4ps"
    elif d > EPS_PHI:
        regime = "crisis"
        condition = None
    else:
        regime = "boundary"
        condition = None
    return RegimeReport(p_n=p_n, phi=d, regime=regime, condition=condition, p_arel=p_rel - 0.5)


def iwf_comparison(g: float, Y0: float, t) -> float:
    """Single-exponential benchmark Y0 * exp(g*t).

    International projections grow GDP at one rate g; the two-field
    hyperbolic branch agrees with exp(|p_n|*t) only near the start.
    """
    t = np.asarray(t, dtype=float)
    out = Y0 * np.exp(g * t)
    return float(out) if out.ndim == 0 else out


def piecewise_chain(params, horizon: float):
    """Chain one-year frozen-rate branches over a time-varying run.

    Each year's p_n and p_s are frozen at the year's start, the branch
    is evaluated for one year, and its endpoint seeds the next branch.
    External inflows cannot be represented by the closed forms, so any
    nonzero a0/b0/p_B/p_P at a sampled year is rejected.  GDP hitting
    zero ends the chain.  Returns (years, Y, K) arrays.
    """
    from .model import net_business_rate  # local import to avoid a cycle

    if not horizon > 0:
        raise ParameterError(f"horizon must be > 0, got {horizon}")
    n_years = int(math.floor(horizon + 1e-12))
    years = [params.t0]
    Y, K = [params.Y0], [params.K0]
    y, k = params.Y0, params.K0
    for year in range(n_years):
        t = float(year)
        for name in ("a0", "b0", "p_B", "p_P"):
            if getattr(params, name)(t) != 0.0:
                raise ParameterError(
                    f"piecewise chaining requires zero {name}, got "
                    f"{getattr(params, name)(t)} at year offset {year}"
                )
        branch = AnalyticBranch.from_rates(
            net_business_rate(params, t), params.p_s(t), y, k
        )
        y, k = basis_solution(branch, 1.0)
        years.append(params.t0 + year + 1)
        Y.append(y)
        K.append(k)
        if y <= 0.0:
            break
    return np.array(years, dtype=float), np.array(Y), np.array(K)
