"""Field-style macroeconomics toolkit.

GDP and financial capital as two coupled flows: simulation of the flow
system, closed-form frozen-rate solutions, indicator derivation from
national accounting series (a German 1950-2012 table is bundled),
calibration, monetary diagnostics, crisis-phase classification, and
coupled-economy experiments.
"""

from .errors import (
    DegenerateError,
    DomainError,
    FitError,
    GapError,
    ImaginaryTimeError,
    InputError,
    MacrofieldError,
    NoMaximumError,
    NumericError,
    ParameterError,
    PoleError,
    SchemaError,
    SingularityError,
    ValidationError,
)
from .dataset import (
    COLUMNS,
    DERIVED_COLUMNS,
    DerivedSeries,
    EconRecord,
    EconSeries,
    derive_indicators,
    derive_p_n,
    find_crossing,
    frg_dataset,
    frg_table_checksum,
    frg_table_path,
    parse_series,
    serialize_series,
)
from .model import (
    ModelParams,
    RateFn,
    Trajectory,
    integrate,
    net_business_rate,
    params_from_config,
    rate_from_config,
    rhs,
)
from .analytic import (
    AnalyticBranch,
    RegimeReport,
    basis_solution,
    capital_coefficient_closed,
    characteristic_frequency,
    characteristic_time,
    classify_regime,
    iwf_comparison,
    phi,
    piecewise_chain,
    t_max,
)
from .calibrate import (
    CapitalExtremes,
    ChainCorrection,
    PrelFit,
    QuadraticFit,
    apply_chain,
    basket_inflation,
    basket_price,
    capital_extremes,
    chain_correction,
    fit_prel_exponential,
    fit_quadratic_yk,
    frg_baseline_params,
    frg_chained_trajectory,
    frg_points_params,
    frg_quadratic_fit,
    normalized_start,
    population_growth_table,
)
from .diagnostics import (
    PURCHASES_PER_PERSON_YEAR,
    BalanceRow,
    DebtRatioRow,
    InterestEstimates,
    LotkaVolterraMap,
    PhaseReport,
    QEState,
    SavingsIdentity,
    balance_report,
    core_inflation_simplified,
    crisis_trade_volume,
    debt_path,
    debt_ratio,
    house_number_inflation,
    inflation_series,
    interest_estimators,
    lotka_volterra_map,
    naive_velocity,
    phase_classify,
    price_level,
    quantity_check,
    quantity_check_series,
    savings_identity,
    substitution_trajectory,
    systemic_importance,
    velocity,
)
from .multiworld import (
    AmplificationReport,
    CapitalExportResult,
    WorldParams,
    WorldTrajectory,
    capital_export_experiment,
    derivative_sales_amplification,
    integrate_world,
    transfer_balance,
    world_from_config,
    world_rhs,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
