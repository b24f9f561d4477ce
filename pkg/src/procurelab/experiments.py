"""Seeded experiment drivers and the machine-readable verification battery."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from ._report import VerificationReport, make_report, write_reports
from ._rng import derive_seed, uniform_stream
from .game_core import (
    DomainError,
    MarketConfig,
    Side,
    UnsupportedError,
    WeightedKernel,
    best_deviation,
    critical_p,
    cutpoints3,
    default_config,
    jump_signs,
    maps_p,
    ordering_cell,
    payoff_3,
    payoff_3_batch,
    payoff_n,
    payoff_n_batch,
    payoff_n_combinatorial,
    sym_sequence_A,
    symmetric_kernel,
    weighted_sequences,
    BoundaryError,
)
from .equilibria import (
    CurveKind,
    FunctionalSystem,
    closed_form_curves,
    critical_regime_strategy,
    functional_residual,
    log_equilibrium,
    uniform_equilibrium,
    value_weighted,
    weighted_equilibrium,
)
from .oracle_solver import (
    exploitability,
    grid_sup_inf,
    make_grid,
    payoff_matrix,
    project_to_grid,
    pure_ne_scan,
    solve_matrix_game,
    value_curve_oracle,
    ddpm_probe,
)
from .strategy import MixedStrategy, Piece, PieceKind, expect_joint, expect_vs

__all__ = [
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


# ---------------------------------------------------------------------------
# Monte Carlo tournaments


@dataclass(frozen=True)
class TournamentResult:
    means: tuple[float, ...]
    stderrs: tuple[float, ...]
    samples: int
    seed: int


def _mean_stderr(draws: np.ndarray) -> tuple[float, float]:
    n = len(draws)
    se = float(draws.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return float(draws.mean()), se


def mc_tournament(
    strategies: Sequence[MixedStrategy],
    kernel: Optional[WeightedKernel],
    samples: int,
    seed: int,
) -> TournamentResult:
    """Empirical per-player payoffs of a strategy profile.

    With a two-player kernel the column player's payoff is the exact
    complement of the row draw.  kernel=None plays the N-player
    equal-weight game instead.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    bids = np.column_stack(
        [
            s.sample(derive_seed(seed, "tournament", i), samples)
            for i, s in enumerate(strategies)
        ]
    )
    if kernel is not None:
        if len(strategies) != 2:
            raise DomainError("a two-player kernel needs exactly two strategies")
        row = kernel.batch(bids[:, 0], bids[:, 1])
        stats = [_mean_stderr(row), _mean_stderr(1.0 - row)]
    else:
        if len(strategies) < 2:
            raise DomainError("need at least two players")
        pays = payoff_n_batch(bids, strategies[0].cfg)
        stats = [_mean_stderr(pays[:, i]) for i in range(len(strategies))]
    return TournamentResult(
        means=tuple(m for m, _ in stats),
        stderrs=tuple(s for _, s in stats),
        samples=samples,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Best-response dynamics


@dataclass(frozen=True)
class DynamicsTrajectory:
    profiles: tuple[tuple[float, ...], ...]
    fixed_point_step: Optional[int]
    min_winner_payoff: float


def _secured_move(current: list[float], i: int, cfg: MarketConfig, eps: float) -> float:
    """Winning bid for player i, verified in i's actual slot.

    The verification must use the mover's real position: float summation
    order shifts the reference price by an ulp between slot orders, and a
    bid sitting exactly on the price surface can win in one order and lose
    in the other.
    """
    others = current[:i] + current[i + 1 :]
    star = best_deviation(others, cfg)
    trial = list(current)
    trial[i] = star
    if payoff_n(tuple(trial), cfg)[i] == 1.0:
        return star
    # star ties an opponent or sits an ulp off the price; undercut just
    # enough to win outright.  Halving handles the rare opponent inside
    # the first epsilon window.
    e = eps
    for _ in range(80):
        cand = max(cfg.A, star - e)
        trial[i] = cand
        if payoff_n(tuple(trial), cfg)[i] == 1.0:
            return cand
        e *= 0.5
    raise DomainError(f"no winning undercut below {star} against {others}")


def br_dynamics(start: Sequence[float], steps: int, cfg: MarketConfig) -> DynamicsTrajectory:
    """Round-robin best-response play from a starting profile.

    Each move secures the award (payoff 1), undercutting by eps on exact
    ties.  A fixed point would need every player to keep its bid through a
    full round; the trajectory records one if that ever happens.
    """
    if len(start) < 2:
        raise DomainError("need at least two players")
    if steps < 1:
        raise DomainError("steps must be positive")
    current = [cfg.require_bid(b) for b in start]
    n = len(current)
    eps = 1e-6 * (cfg.E - cfg.A)
    profiles = [tuple(current)]
    unchanged = 0
    fixed_at: Optional[int] = None
    min_winner = 1.0
    for t in range(steps):
        i = t % n
        bid = _secured_move(current, i, cfg, eps)
        unchanged = unchanged + 1 if bid == current[i] else 0
        current[i] = bid
        min_winner = min(min_winner, payoff_n(tuple(current), cfg)[i])
        profiles.append(tuple(current))
        if unchanged >= n:
            fixed_at = t
            break
    return DynamicsTrajectory(
        profiles=tuple(profiles),
        fixed_point_step=fixed_at,
        min_winner_payoff=min_winner,
    )


# ---------------------------------------------------------------------------
# Region grids


class RegionKind(Enum):
    TWO_PLAYER = "TwoPlayer"
    WEIGHTED_P = "WeightedP"
    THREE_PLAYER_SLICE = "ThreePlayerSlice"


def region_grid(
    kind: RegionKind,
    resolution: int,
    cfg: MarketConfig,
    p: Optional[float] = None,
    x: Optional[float] = None,
) -> np.ndarray:
    """Dense payoff matrix over a bid-plane grid, for plotting.

    TwoPlayer/WeightedP: entry [i, j] is the row payoff at bids
    (axis[i], axis[j]).  ThreePlayerSlice: player 1's payoff at fixed own
    bid x over opponent bids (axis[i], axis[j]).
    """
    if resolution > 4096:
        raise UnsupportedError(f"resolution {resolution} exceeds 4096")
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    axis = np.linspace(cfg.A, cfg.B, resolution)
    if kind is RegionKind.TWO_PLAYER:
        if p is not None or x is not None:
            raise DomainError("TwoPlayer takes no p or x parameter")
        return symmetric_kernel(cfg).matrix(axis, axis)
    if kind is RegionKind.WEIGHTED_P:
        if p is None or x is not None:
            raise DomainError("WeightedP takes p and no x")
        return WeightedKernel(p=p, cfg=cfg).matrix(axis, axis)
    if kind is RegionKind.THREE_PLAYER_SLICE:
        if x is None or p is not None:
            raise DomainError("ThreePlayerSlice takes x and no p")
        own = cfg.require_bid(x)
        return payoff_3_batch(own, axis[:, None], axis[None, :], cfg)
    raise DomainError(f"unknown region kind {kind!r}")


def region_grid_csv(
    matrix: np.ndarray,
    kind: RegionKind,
    resolution: int,
    cfg: MarketConfig,
    p: Optional[float] = None,
    x: Optional[float] = None,
) -> str:
    fields = [f"kind={kind.value}"]
    if p is not None:
        fields.append(f"p={p:.12g}")
    if x is not None:
        fields.append(f"x={x:.12g}")
    fields += [
        f"resolution={resolution}",
        f"A={cfg.A:.12g}",
        f"B={cfg.B:.12g}",
        f"E={cfg.E:.12g}",
    ]
    lines = [",".join(fields)]
    for row in matrix:
        lines.append(",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# The verification battery


def battery_passed(reports: Sequence[VerificationReport]) -> bool:
    return all(r.passed for r in reports)


def _corrupted_strategy(cfg: MarketConfig) -> MixedStrategy:
    # mass 0.9 on purpose; skips .validate() so only the battery's
    # normalization check can object
    return MixedStrategy(
        (Piece(PieceKind.UNIFORM, cfg.A, cfg.A + 0.5 * (cfg.E - cfg.A), 0.9),),
        (),
        cfg,
    )


def run_battery(
    cfg: Optional[MarketConfig] = None,
    seed: int = 42,
    inject_fault: bool = False,
) -> list[VerificationReport]:
    """Every module invariant at desk scale, one report per named check.

    Checks are isolated: a raising check records an infinite violation and
    the rest still run.  All sampling derives from `seed`, so two runs
    produce identical report payloads.
    """
    cfg = cfg or default_config()
    span = cfg.B - cfg.A
    reports: list[VerificationReport] = []

    def run(name: str, params: dict, tol: float, fn: Callable[[], tuple[float, list]]):
        t0 = time.perf_counter()
        try:
            violation, worst = fn()
        except Exception as exc:  # isolation is the contract here
            reports.append(
                VerificationReport(
                    name,
                    {**params, "error": repr(exc)},
                    math.inf,
                    tol,
                    False,
                    (),
                    time.perf_counter() - t0,
                )
            )
            return
        reports.append(
            make_report(name, params, violation, tol, worst, time.perf_counter() - t0)
        )

    def draw_bids(tag: str, rows: int, cols: int) -> np.ndarray:
        u = uniform_stream(derive_seed(seed, tag, cols), rows * cols)
        return cfg.A + span * u.reshape(rows, cols)

    # --- game_core ---------------------------------------------------------

    def conservation():
        worst, top = [], 0.0
        for n_players in (2, 3, 5):
            bids = draw_bids("conserve", 10_000, n_players)
            dev = np.abs(payoff_n_batch(bids, cfg).sum(axis=1) - 1.0)
            k = int(dev.argmax())
            if dev[k] > top:
                top, worst = float(dev[k]), [tuple(bids[k])]
        return top, worst

    run("payoff-conservation", {"profiles": 10_000, "N": [2, 3, 5]}, 1e-12, conservation)

    def combinatorial():
        bad, worst = 0, []
        for n_players in (2, 3, 4):
            bids = draw_bids("comb", 3_334, n_players)
            ties = len(bids) // 4
            bids[:ties, 1] = bids[:ties, 0]
            for row in bids:
                prof = tuple(row)
                if payoff_n(prof, cfg) != payoff_n_combinatorial(prof, cfg):
                    bad += 1
                    if len(worst) < 5:
                        worst.append(prof)
        return float(bad), worst

    run("combinatorial-agreement", {"profiles": 3 * 3_334, "tie_share": 0.25}, 0.0, combinatorial)

    def three_way():
        bids = draw_bids("three", 100_000, 3)
        direct = payoff_3_batch(bids[:, 0], bids[:, 1], bids[:, 2], cfg)
        general = payoff_n_batch(bids, cfg)[:, 0]
        dev = np.abs(direct - general)
        k = int(dev.argmax())
        return float(dev[k]), [tuple(bids[k])] if dev[k] > 0 else []

    run("three-player-agreement", {"profiles": 100_000}, 0.0, three_way)

    def deviation_wins():
        bad, worst = 0, []
        for n_players in (2, 3, 5):
            others = draw_bids("deviate", 3_334, n_players - 1)
            for row in others:
                star = best_deviation(list(row), cfg)
                if payoff_n((star, *row), cfg)[0] != 1.0:
                    bad += 1
                    if len(worst) < 5:
                        worst.append(tuple(row))
        return float(bad), worst

    run("deviation-optimality", {"profiles": 3 * 3_334, "N": [2, 3, 5]}, 0.0, deviation_wins)

    def relations():
        pairs = draw_bids("relations", 10_000, 2)
        top, worst = 0.0, []
        for y, z in pairs:
            c = cutpoints3(float(y), float(z), cfg)
            r = max(
                abs((c.p_y - y) - 5.0 * (y - c.t)),
                abs((c.p_z - z) - 5.0 * (z - c.t)),
                abs((c.p_y - c.p_z) - 6.0 * (y - z)),
            )
            if r > top:
                top, worst = r, [(float(y), float(z))]
        return top, worst

    run("cutpoint-relations", {"pairs": 10_000}, 1e-12, relations)

    def ordering_exhaustive():
        axis = np.linspace(cfg.A, cfg.B, 202)[1:-1]
        bad, worst, seen = 0, [], set()
        for y in axis:
            for z in axis:
                try:
                    cell = ordering_cell(float(y), float(z), cfg)
                except BoundaryError:
                    continue
                seen.add(cell.tag)
                cut = cutpoints3(float(y), float(z), cfg)
                a, b = (y, z) if not cell.mirrored else (z, y)
                p_a = 5.0 * a - 3.0 * cfg.E - b
                p_b = 5.0 * b - 3.0 * cfg.E - a
                pattern = {
                    "O1": [p_a, p_b, a, b, cut.t],
                    "O2": [p_a, a, p_b, b, cut.t],
                    "O3": [p_a, a, cut.t, b, p_b],
                    "O4": [cut.t, a, b, p_a, p_b],
                    "O5": [cut.t, a, p_a, b, p_b],
                }[cell.tag]
                if not all(u < v for u, v in zip(pattern, pattern[1:])):
                    bad += 1
                    if len(worst) < 5:
                        worst.append((float(y), float(z), cell.tag))
        if seen != {"O1", "O2", "O3", "O4", "O5"}:
            bad += 1
            worst.append(("cells-seen", sorted(seen)))
        return float(bad), worst

    run("ordering-cells-exhaustive", {"grid": "200x200"}, 0.0, ordering_exhaustive)

    def jump_sign_scan():
        delta = 1e-7 * span
        per_cell = 1_000
        filled = {tag: 0 for tag in ("O1", "O2", "O3", "O4", "O5")}
        bad, worst = 0, []
        stream = uniform_stream(derive_seed(seed, "jumps"), 2_000_000).reshape(-1, 2)
        for u, v in stream:
            if min(filled.values()) >= per_cell:
                break
            y = cfg.A + span * float(u)
            z = cfg.A + span * float(v)
            try:
                cell = ordering_cell(y, z, cfg)
            except BoundaryError:
                continue
            if filled[cell.tag] >= per_cell:
                continue
            cut = cutpoints3(y, z, cfg)
            values = {"y": y, "z": z, "t": cut.t, "p_y": cut.p_y, "p_z": cut.p_z}
            pts = sorted(values.values())
            if min(b - a for a, b in zip(pts, pts[1:])) <= 3 * delta:
                continue
            filled[cell.tag] += 1
            signs = jump_signs(cell)
            for key, v0 in values.items():
                if not (cfg.A + delta < v0 < cfg.B - delta):
                    continue
                jump = payoff_3(v0 + delta, y, z, cfg) - payoff_3(v0 - delta, y, z, cfg)
                got = (jump > 0) - (jump < 0)
                if got != signs[key]:
                    bad += 1
                    if len(worst) < 5:
                        worst.append((y, z, key, signs[key], got))
        if min(filled.values()) < per_cell:
            bad += 1
            worst.append(("under-filled", filled))
        return float(bad), worst

    run("jump-sign-scan", {"per_cell": 1_000, "delta": 1e-7 * span}, 0.0, jump_sign_scan)

    def maps_roundtrip():
        draws = draw_bids("maps", 1_000, 1)[:, 0]
        ps = 0.01 + 0.49 * uniform_stream(derive_seed(seed, "maps-p"), 1_000)
        top, worst = 0.0, []
        for p, x in zip(ps, draws):
            m = maps_p(float(p), cfg)
            r = max(
                abs(m.h2(m.f1(x)) - x),
                abs(m.h1(m.f2(x)) - x),
                abs(m.f1(m.f2(x)) - m.f2(m.f1(x))),
                abs(m.f1(cfg.E) - cfg.E),
                abs(m.f2(cfg.E) - cfg.E),
            )
            if r > top:
                top, worst = r, [(float(p), float(x))]
        return top, worst

    run("map-roundtrips", {"samples": 1_000}, 1e-12, maps_roundtrip)

    # --- strategy / equilibria ---------------------------------------------

    p_star = critical_p()

    def normalization():
        named = {
            "uniform": uniform_equilibrium(cfg),
            "log": log_equilibrium(cfg),
            "weighted-0.3": weighted_equilibrium(0.3, cfg),
            "critical": critical_regime_strategy(cfg),
        }
        if inject_fault:
            named["corrupted"] = _corrupted_strategy(cfg)
        top, worst = 0.0, []
        for name, s in named.items():
            dev = abs(s.total_mass - 1.0)
            if dev > top:
                top, worst = dev, [name]
        return top, worst

    run(
        "strategy-normalization",
        {"strategies": 4 + int(inject_fault), "fault_injected": inject_fault},
        1e-12,
        normalization,
    )

    def equilibrium_inequalities():
        grid = np.linspace(cfg.A, cfg.B, 2_000)
        top, worst = 0.0, []

        def note(v: float, where) -> None:
            nonlocal top, worst
            if v > top:
                top, worst = v, [where]

        sym = symmetric_kernel(cfg)
        a2 = sym_sequence_A(2, cfg)
        for name, s in (("uniform", uniform_equilibrium(cfg)), ("log", log_equilibrium(cfg))):
            for xx in grid:
                g = expect_vs(float(xx), s, sym, method="exact")
                note(g - 0.5, (name, "over", float(xx)))
                if xx < a2 - 1e-9:
                    note(abs(g - 0.5), (name, "flat", float(xx)))
        crit = critical_regime_strategy(cfg)
        kc = WeightedKernel(p=p_star, cfg=cfg)
        for xx in grid:
            row = expect_vs(float(xx), crit, kc, method="exact", side=Side.AS_ROW)
            col = expect_vs(float(xx), crit, kc, method="exact", side=Side.AS_COLUMN)
            note(row - 1.0 / 3.0, ("critical", "row-over", float(xx)))
            note(1.0 / 3.0 - col, ("critical", "col-under", float(xx)))
        w = weighted_equilibrium(0.3, cfg)
        kw = WeightedKernel(p=0.3, cfg=cfg)
        v3 = value_weighted(0.3).v
        for xx in grid:
            row = expect_vs(float(xx), w, kw, method="exact", side=Side.AS_ROW)
            col = expect_vs(float(xx), w, kw, method="exact", side=Side.AS_COLUMN)
            note(row - v3, ("weighted", "row-over", float(xx)))
            note(v3 - col, ("weighted", "col-under", float(xx)))
        return top, worst

    run("equilibrium-inequalities", {"grid": 2_000, "p": [0.5, p_star, 0.3]}, 1e-6,
        equilibrium_inequalities)

    def curve_quadrature():
        cases = [
            (CurveKind.SYM_UNIFORM, 0.5, uniform_equilibrium(cfg), Side.AS_ROW),
            (CurveKind.SYM_UNIFORM, 0.5, uniform_equilibrium(cfg), Side.AS_COLUMN),
            (CurveKind.SYM_LOG, 0.5, log_equilibrium(cfg), Side.AS_ROW),
            (CurveKind.SYM_LOG, 0.5, log_equilibrium(cfg), Side.AS_COLUMN),
            (CurveKind.WEIGHTED_ROW, 0.3, weighted_equilibrium(0.3, cfg), Side.AS_ROW),
            (CurveKind.WEIGHTED_COLUMN, 0.3, weighted_equilibrium(0.3, cfg), Side.AS_COLUMN),
        ]
        top, worst = 0.0, []
        for which, p, s, side in cases:
            curve = closed_form_curves(which, p, cfg, side=side)
            kern = WeightedKernel(p=p, cfg=cfg)
            us = uniform_stream(derive_seed(seed, "curves", which.value, side.value), 500)
            for u in us:
                xx = cfg.A + span * float(u)
                ref = expect_vs(xx, s, kern, side=side, method="quadrature")
                dev = abs(curve(xx) - ref)
                if dev > top:
                    top, worst = dev, [(which.value, side.value, xx)]
        return top, worst

    run("curve-quadrature-agreement", {"curves": 6, "points": 500}, 1e-6, curve_quadrature)

    def residuals():
        seq = weighted_sequences(0.3, 1, cfg)
        cases = [
            (FunctionalSystem.SYMMETRIC, log_equilibrium(cfg), 0.5,
             sym_sequence_A(2, cfg), (sym_sequence_A(1, cfg),)),
            (FunctionalSystem.WEIGHTED_ROW, weighted_equilibrium(0.3, cfg), 0.3,
             seq.d_check[1], (seq.a_check[1],)),
            (FunctionalSystem.WEIGHTED_COLUMN, weighted_equilibrium(0.3, cfg), 0.3,
             seq.d_check[1], (seq.a_hat[1],)),
        ]
        top, worst = 0.0, []
        for system, s, p, hi, avoid in cases:
            xs = np.linspace(cfg.A, hi - 1e-9, 1_000)
            for a in avoid:
                xs = xs[np.abs(xs - a) > 1e-9]
            for xx in xs:
                r = abs(functional_residual(system, s, float(xx), p, cfg))
                if r > top:
                    top, worst = r, [(system.value, float(xx))]
        return top, worst

    run("functional-residuals", {"systems": 3, "points": 1_000}, 1e-9, residuals)

    def value_anchor_half():
        return abs(value_weighted(0.5).v - 0.5), []

    run("value-at-half", {}, 1e-12, value_anchor_half)

    def value_anchor_critical():
        return abs(value_weighted(p_star).v - 1.0 / 3.0), []

    run("value-at-critical", {}, 1e-10, value_anchor_critical)

    def critical_identity():
        top, worst = 0.0, []
        for c in (cfg, MarketConfig(A=0.2, B=2.0, E=1.1)):
            seq = weighted_sequences(p_star, 2, c)
            m = maps_p(p_star, c)
            dev = abs(m.h2(seq.a_check[2]) - c.A)
            if dev > top:
                top, worst = dev, [(c.A, c.B, c.E)]
        return top, worst

    run("critical-map-identity", {"configs": 2}, 1e-9, critical_identity)

    def joint_values():
        cases = [
            (0.5, log_equilibrium(cfg)),
            (0.3, weighted_equilibrium(0.3, cfg)),
            (p_star, weighted_equilibrium(p_star, cfg)),
        ]
        top, worst = 0.0, []
        for p, s in cases:
            j = expect_joint(s, s, WeightedKernel(p=p, cfg=cfg))
            dev = abs(j.value - value_weighted(p).v)
            if dev > top:
                top, worst = dev, [p]
        return top, worst

    run("joint-value-consistency", {"p": [0.5, 0.3, p_star]}, 1e-6, joint_values)

    def mc_consistency():
        cases = [
            ("log", log_equilibrium(cfg), 0.5, 0.5),
            ("weighted-0.3", weighted_equilibrium(0.3, cfg), 0.3, value_weighted(0.3).v),
        ]
        top, worst = 0.0, []
        for name, s, p, v in cases:
            kern = WeightedKernel(p=p, cfg=cfg)
            res = mc_tournament([s, s], kern, 1_000_000, derive_seed(seed, "mc", name))
            again = mc_tournament([s, s], kern, 1_000_000, derive_seed(seed, "mc", name))
            if res != again:
                return math.inf, [(name, "rerun-mismatch")]
            ratio = abs(res.means[0] - v) / (4.0 * res.stderrs[0])
            if ratio > top:
                top, worst = ratio, [(name, res.means[0], res.stderrs[0])]
        return top, worst

    run("mc-consistency", {"samples": 1_000_000, "band": "4 stderr"}, 1.0, mc_consistency)

    # --- oracle_solver ------------------------------------------------------

    def constant_sum_matrices():
        g = make_grid(201, cfg)
        top = 0.0
        M = payoff_matrix(symmetric_kernel(cfg), g, g)
        top = max(top, float(np.abs(M + M.T - 1.0).max()))
        top = max(top, float(np.abs(np.diag(M) - 0.5).max()))
        Mw = payoff_matrix(WeightedKernel(p=0.3, cfg=cfg), g, g)
        Mo = payoff_matrix(WeightedKernel(p=0.7, cfg=cfg), g, g)
        top = max(top, float(np.abs(Mw + Mo.T - 1.0).max()))
        top = max(top, float(np.abs(np.diag(Mw) - 0.3).max()))
        return top, []

    run("matrix-constant-sum", {"n": 201}, 0.0, constant_sum_matrices)

    def solver_certificates():
        top, worst = 0.0, []
        for p in (0.5, 0.3):
            g = make_grid(101, cfg)
            M = payoff_matrix(WeightedKernel(p=p, cfg=cfg), g, g)
            sol = solve_matrix_game(M)
            dev = abs(exploitability(M, sol.row_mix, sol.col_mix, aggregate="max")
                      - sol.exploitability)
            if not sol.converged:
                return math.inf, [(p, "non-convergence")]
            if dev > top:
                top, worst = dev, [p]
        return top, worst

    run("solver-certificate-recompute", {"n": 101, "p": [0.5, 0.3]}, 1e-12,
        solver_certificates)

    def projection_ladder():
        s = log_equilibrium(cfg)
        kern = symmetric_kernel(cfg)
        gaps = []
        for n in (101, 201, 401, 801):
            g = make_grid(n, cfg)
            w = project_to_grid(s, g)
            gaps.append(exploitability(payoff_matrix(kern, g, g), w, w, aggregate="max"))
        worst = [tuple(gaps)]
        increase = max(
            [b - a for a, b in zip(gaps, gaps[1:])] + [0.0]
        )
        return max(increase, gaps[-1] - 0.02), worst

    run("projection-gap-ladder", {"n": [101, 201, 401, 801], "cap": 0.02}, 1e-12,
        projection_ladder)

    def scans():
        bad = 0.0
        found2 = pure_ne_scan(payoff_n, 2, make_grid(101, cfg))
        found3 = pure_ne_scan(payoff_n, 3, make_grid(21, cfg))
        bad += len(found2) + len(found3)
        g = make_grid(101, cfg)
        si, is_ = grid_sup_inf(payoff_matrix(symmetric_kernel(cfg), g, g))
        bad += abs(si - 0.0) + abs(is_ - 1.0)
        return bad, [("found", found2 + found3), ("guarantees", (si, is_))]

    run("pure-ne-scan", {"N2_n": 101, "N3_n": 21}, 0.0, scans)

    def dynamics():
        fp, low = 0, 1.0
        for n_players in (2, 3):
            for run_idx in range(10):
                u = uniform_stream(derive_seed(seed, "br", n_players, run_idx), n_players)
                start = [cfg.A + span * float(x) for x in u]
                traj = br_dynamics(start, 10_000, cfg)
                if traj.fixed_point_step is not None:
                    fp += 1
                low = min(low, traj.min_winner_payoff)
        return float(fp) + max(0.0, 1.0 - low), [("min_winner_payoff", low)]

    run("br-dynamics-no-fixed-point", {"starts": 10, "steps": 10_000, "N": [2, 3]},
        0.0, dynamics)

    def desk_value_ladder():
        rows = value_curve_oracle([0.3, p_star], cfg, [101, 201])
        bad = 0.0
        for p in (0.3, p_star):
            gaps = [r["gap"] for r in rows if r["p"] == p]
            bad += max(0.0, gaps[1] - gaps[0])
        bad += sum(0.0 if r["converged"] else 1.0 for r in rows)
        return bad, [(r["p"], r["n"], r["gap"]) for r in rows]

    run("value-ladder-desk", {"p": [0.3, p_star], "n": [101, 201]}, 1e-12,
        desk_value_ladder)

    reports.append(ddpm_probe(1_000, derive_seed(seed, "ddpm"), cfg))
    return reports
