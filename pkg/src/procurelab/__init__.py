"""Numerical laboratory for the average-bid procurement auction game.

A constant-sum bidding game where the award goes to the bid closest to a
reference price from below.  The package holds the exact payoff kernels, the
closed-form mixed equilibria with their verification machinery, brute-force
grid oracles, seeded experiment drivers, and a CLI front end.
"""

from procurelab.equilibria import (
    ClosedFormCurve,
    CurveKind,
    FunctionalSystem,
    ValueReport,
    closed_form_curves,
    critical_regime_strategy,
    functional_residual,
    log_equilibrium,
    regime_partition,
    uniform_equilibrium,
    value_weighted,
    weighted_equilibrium,
)
from procurelab.experiments import (
    DynamicsTrajectory,
    RegionKind,
    TournamentResult,
    VerificationReport,
    battery_passed,
    br_dynamics,
    make_report,
    mc_tournament,
    region_grid,
    region_grid_csv,
    run_battery,
    write_reports,
)
from procurelab.game_core import (
    AffineMaps,
    BoundaryError,
    Cutpoints3,
    DiscontinuityClass,
    DomainError,
    HYPERSURFACE_TOL,
    Interval,
    MarketConfig,
    OrderingCell,
    Regime,
    Side,
    UnsupportedError,
    WeightedKernel,
    best_deviation,
    classify_discontinuity,
    critical_p,
    cutpoints3,
    default_config,
    jump_signs,
    low_p_m,
    maps_p,
    ordering_cell,
    payoff_2,
    payoff_3,
    payoff_3_batch,
    payoff_n,
    payoff_n_batch,
    payoff_n_combinatorial,
    payoff_n_tilde,
    payoff_weighted,
    reference_price,
    regime,
    strict_win_regions,
    sym_sequence_A,
    symmetric_kernel,
    threshold_t,
    weighted_sequences,
)
from procurelab.oracle_solver import (
    Grid,
    MatrixGameSolution,
    SelfplayReport,
    ddpm_probe,
    exploitability,
    grid_sup_inf,
    make_grid,
    payoff_matrix,
    project_to_grid,
    pure_ne_scan,
    regime_breakpoints,
    solve_matrix_game,
    symmetric_selfplay,
    value_curve_csv,
    value_curve_oracle,
)
from procurelab.strategy import (
    Atom,
    JointExpectation,
    MixedStrategy,
    Piece,
    PieceKind,
    QuadratureError,
    QuadratureSpec,
    expect_joint,
    expect_vs,
    point_mass,
)

__all__ = [
    # game_core
    "MarketConfig",
    "default_config",
    "DomainError",
    "UnsupportedError",
    "BoundaryError",
    "HYPERSURFACE_TOL",
    "reference_price",
    "payoff_weighted",
    "payoff_2",
    "payoff_n",
    "payoff_n_tilde",
    "payoff_n_batch",
    "payoff_n_combinatorial",
    "payoff_3",
    "payoff_3_batch",
    "best_deviation",
    "threshold_t",
    "Interval",
    "strict_win_regions",
    "WeightedKernel",
    "symmetric_kernel",
    "Side",
    "AffineMaps",
    "maps_p",
    "Regime",
    "regime",
    "critical_p",
    "low_p_m",
    "sym_sequence_A",
    "weighted_sequences",
    "Cutpoints3",
    "cutpoints3",
    "OrderingCell",
    "ordering_cell",
    "jump_signs",
    "DiscontinuityClass",
    "classify_discontinuity",
    # strategy
    "Piece",
    "PieceKind",
    "Atom",
    "MixedStrategy",
    "point_mass",
    "expect_vs",
    "expect_joint",
    "JointExpectation",
    "QuadratureError",
    "QuadratureSpec",
    # equilibria
    "uniform_equilibrium",
    "log_equilibrium",
    "weighted_equilibrium",
    "critical_regime_strategy",
    "regime_partition",
    "ValueReport",
    "value_weighted",
    "CurveKind",
    "ClosedFormCurve",
    "closed_form_curves",
    "FunctionalSystem",
    "functional_residual",
    # oracle_solver
    "Grid",
    "make_grid",
    "regime_breakpoints",
    "payoff_matrix",
    "exploitability",
    "MatrixGameSolution",
    "solve_matrix_game",
    "project_to_grid",
    "grid_sup_inf",
    "pure_ne_scan",
    "value_curve_oracle",
    "value_curve_csv",
    "SelfplayReport",
    "symmetric_selfplay",
    "ddpm_probe",
    # experiments
    "VerificationReport",
    "make_report",
    "write_reports",
    "TournamentResult",
    "mc_tournament",
    "DynamicsTrajectory",
    "br_dynamics",
    "RegionKind",
    "region_grid",
    "region_grid_csv",
    "run_battery",
    "battery_passed",
]
