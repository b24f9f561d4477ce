"""Brute-force oracles: grids, matrix games, scans, and hypersurface probes.

Everything here cross-checks the closed forms by independent means: discretize
the bid interval, solve the induced finite constant-sum game behind an
exploitability certificate, project analytic strategies onto grids, enumerate
pure profiles, and probe the payoff's one-sided limits on its discontinuity
surfaces.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from ._report import VerificationReport, make_report
from ._rng import derive_seed, uniform_stream
from .game_core import (
    DiscontinuityClass,
    DomainError,
    MarketConfig,
    Regime,
    UnsupportedError,
    WeightedKernel,
    best_deviation,
    classify_discontinuity,
    payoff_n,
    payoff_n_batch,
    payoff_n_tilde,
    regime,
    sym_sequence_A,
    threshold_t,
    weighted_sequences,
)
from .equilibria import regime_partition, value_weighted
from .strategy import MixedStrategy

__all__ = [
    "Grid",
    "make_grid",
    "regime_breakpoints",
    "payoff_matrix",
    "MatrixGameSolution",
    "solve_matrix_game",
    "exploitability",
    "project_to_grid",
    "grid_sup_inf",
    "pure_ne_scan",
    "value_curve_oracle",
    "value_curve_csv",
    "SelfplayReport",
    "symmetric_selfplay",
    "ddpm_probe",
]


# ---------------------------------------------------------------------------
# Grids


@dataclass(frozen=True)
class Grid:
    """Sorted bid grid over [A, B] with guaranteed landmark points.

    n is the nominal uniform resolution; points also carry E and any
    caller-supplied mandatory landmarks, deduplicated, so len(points) can
    exceed n.
    """

    n: int
    points: tuple[float, ...]
    cfg: MarketConfig

    def __post_init__(self) -> None:
        pts = self.points
        if len(pts) < 2:
            raise DomainError("grid needs at least two points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise DomainError("grid points must be strictly increasing")
        for landmark in (self.cfg.A, self.cfg.B, self.cfg.E):
            if landmark not in pts:
                raise DomainError(f"grid is missing landmark {landmark}")

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)


def make_grid(
    n: int, cfg: MarketConfig, mandatory: Sequence[float] = ()
) -> Grid:
    if n < 2:
        raise DomainError(f"grid resolution {n} < 2")
    for x in mandatory:
        cfg.require_bid(x)
    base = np.linspace(cfg.A, cfg.B, n)
    pts = np.unique(np.concatenate([base, [cfg.E], np.asarray(mandatory, dtype=np.float64)]))
    return Grid(n=n, points=tuple(float(x) for x in pts), cfg=cfg)


def regime_breakpoints(p: float, cfg: MarketConfig) -> tuple[float, ...]:
    """Interior landmarks of the regime's equilibrium support, for grids."""
    reg = regime(p)
    if reg is Regime.DEGENERATE:
        raise DomainError("no breakpoints in the degenerate regime")
    if reg is Regime.SYMMETRIC:
        return tuple(sym_sequence_A(i, cfg) for i in (1, 2, 3))
    if reg is Regime.CRITICAL:
        seq = weighted_sequences(p, 3, cfg)
        return tuple(seq.a_check[1:4]) + (seq.d_check[1],)
    bounds = sorted({b for cell in regime_partition(p, cfg) for b in cell})
    return tuple(b for b in bounds if b != cfg.A)


# ---------------------------------------------------------------------------
# Matrix games


def payoff_matrix(kernel: WeightedKernel, gridX: Grid, gridY: Grid) -> np.ndarray:
    """M[i, j] = kernel(x_i, y_j) over the two grids."""
    if not (kernel.cfg == gridX.cfg == gridY.cfg):
        raise DomainError("kernel and grids disagree on the market config")
    return kernel.matrix(gridX.array, gridY.array)


def _check_mix(v, size: int, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (size,):
        raise DomainError(f"{name} has shape {arr.shape}, expected ({size},)")
    if arr.min() < -1e-12 or abs(arr.sum() - 1.0) > 1e-9:
        raise DomainError(f"{name} is not a probability vector")
    return np.maximum(arr, 0.0)


def exploitability(M, row_mix, col_mix, aggregate: str = "mean") -> float:
    """Best-response gap of a mix pair: row maximizes M, column minimizes it.

    "mean" averages the two players' gains (the standard gap normalization);
    "max" takes the worse one and is the certificate bound stored in
    MatrixGameSolution.
    """
    M = np.asarray(M, dtype=np.float64)
    r = _check_mix(row_mix, M.shape[0], "row_mix")
    c = _check_mix(col_mix, M.shape[1], "col_mix")
    g = float(r @ M @ c)
    row_gain = max(float((M @ c).max()) - g, 0.0)
    col_gain = max(g - float((r @ M).min()), 0.0)
    if aggregate == "mean":
        return 0.5 * (row_gain + col_gain)
    if aggregate == "max":
        return max(row_gain, col_gain)
    raise DomainError(f"unknown aggregate {aggregate!r}")


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    row_mix: tuple[float, ...]
    col_mix: tuple[float, ...]
    exploitability: float  # certified max best-response gain of either player
    converged: bool
    method: str

    def __post_init__(self) -> None:
        for mix in (self.row_mix, self.col_mix):
            if min(mix) < 0.0 or abs(sum(mix) - 1.0) > 1e-12:
                raise DomainError("solution mixes must be distributions")
        if self.exploitability < 0.0:
            raise DomainError("exploitability must be nonnegative")


def _lp_solve(M: np.ndarray) -> Optional[tuple[np.ndarray, np.ndarray]]:
    n, m = M.shape
    # row player: max v subject to v <= (r^T M)_j, sum r = 1
    c_obj = np.zeros(n + 1)
    c_obj[-1] = -1.0
    A_ub = np.hstack([-M.T, np.ones((m, 1))])
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    bounds = [(0.0, None)] * n + [(None, None)]
    row = linprog(c_obj, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=[1.0],
                  bounds=bounds, method="highs")
    # column player: min u subject to (M c)_i <= u, sum c = 1
    c_obj = np.zeros(m + 1)
    c_obj[-1] = 1.0
    A_ub = np.hstack([M, -np.ones((n, 1))])
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    bounds = [(0.0, None)] * m + [(None, None)]
    col = linprog(c_obj, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0],
                  bounds=bounds, method="highs")
    if not (row.success and col.success):
        return None
    return row.x[:-1], col.x[:-1]


def _regret_matching(M: np.ndarray, iters: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic regret-matching+ self-play with linear averaging."""
    n, m = M.shape
    Rr = np.zeros(n)
    Rc = np.zeros(m)
    r = np.full(n, 1.0 / n)
    c = np.full(m, 1.0 / m)
    r_acc = np.zeros(n)
    c_acc = np.zeros(m)
    wsum = 0.0
    for t in range(1, iters + 1):
        u_r = M @ c
        u_c = -(r @ M)
        Rr = np.maximum(Rr + u_r - float(r @ u_r), 0.0)
        Rc = np.maximum(Rc + u_c - float(c @ u_c), 0.0)
        r_acc += t * r
        c_acc += t * c
        wsum += t
        sr, sc = Rr.sum(), Rc.sum()
        r = Rr / sr if sr > 0 else np.full(n, 1.0 / n)
        c = Rc / sc if sc > 0 else np.full(m, 1.0 / m)
    return r_acc / wsum, c_acc / wsum


def _normalize(mix: np.ndarray) -> np.ndarray:
    mix = np.maximum(mix, 0.0)
    return mix / mix.sum()


def solve_matrix_game(M, tol: float = 1e-9, max_iter: int = 100_000) -> MatrixGameSolution:
    """Solve a finite constant-sum game behind an exploitability certificate.

    The primary engine is one LP per player; if the LP fails the solver
    falls back to regret-matching self-play for max_iter rounds.  Either
    way the certificate is recomputed from the final mixes, and a result
    that misses tol is returned with converged=False rather than hidden.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.size == 0:
        raise DomainError("payoff matrix must be a nonempty 2-D array")
    if not np.isfinite(M).all():
        raise DomainError("payoff matrix must be finite")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    pair = _lp_solve(M)
    method = "lp"
    if pair is None:
        pair = _regret_matching(M, max_iter)
        method = "regret-matching"
    r, c = (_normalize(v) for v in pair)
    value = float(r @ M @ c)
    cert = exploitability(M, r, c, aggregate="max")
    return MatrixGameSolution(
        value=value,
        row_mix=tuple(float(x) for x in r),
        col_mix=tuple(float(x) for x in c),
        exploitability=cert,
        converged=cert <= tol,
        method=method,
    )


def project_to_grid(s: MixedStrategy, g: Grid) -> np.ndarray:
    """Point masses on g assigned by exact CDF differences over cell midpoints."""
    pts = g.array
    mids = 0.5 * (pts[1:] + pts[:-1])
    F = np.atleast_1d(s.cdf(mids))
    w = np.empty(len(pts))
    w[0] = F[0]
    w[1:-1] = np.diff(F)
    w[-1] = 1.0 - F[-1]
    if abs(w.sum() - 1.0) > 1e-12:
        raise DomainError("projected masses fail to sum to 1")
    return np.maximum(w, 0.0)


def grid_sup_inf(M) -> tuple[float, float]:
    """(max_i min_j M[i,j], min_j max_i M[i,j]): the pure guarantee pair."""
    M = np.asarray(M, dtype=np.float64)
    return float(M.min(axis=1).max()), float(M.max(axis=0).min())


# ---------------------------------------------------------------------------
# Pure-profile enumeration

_SCAN_CAPS = {2: 201, 3: 41}


def _profile_payoffs(
    kernel_n: Callable, profiles: np.ndarray, cfg: MarketConfig
) -> np.ndarray:
    if kernel_n is payoff_n:
        return payoff_n_batch(profiles, cfg)
    return np.asarray([kernel_n(tuple(row), cfg) for row in profiles])


def pure_ne_scan(kernel_n: Callable, N: int, g: Grid) -> list[tuple[float, ...]]:
    """Exhaustive pure-equilibrium scan over grid profiles.

    A profile survives only if no player can improve by any grid deviation,
    nor by the continuum best_deviation against the others, nor by an
    epsilon-undercut of it (the undercut settles exact ties).  The theory
    says the returned list is empty; the scan does not assume it.
    """
    cap = _SCAN_CAPS.get(N)
    if cap is None:
        raise UnsupportedError(f"pure scan supports N in {sorted(_SCAN_CAPS)}, got {N}")
    if g.n > cap:
        raise UnsupportedError(f"N={N} scan capped at n <= {cap}, got n={g.n}")
    cfg = g.cfg
    pts = g.array
    s = len(pts)
    idx = np.indices((s,) * N).reshape(N, -1).T
    profiles = pts[idx]
    pay = _profile_payoffs(kernel_n, profiles, cfg)
    mask = np.ones(len(profiles), dtype=bool)
    for player in range(N):
        tensor = pay[:, player].reshape((s,) * N)
        best = tensor.max(axis=player, keepdims=True)
        mask &= (tensor == best).reshape(-1)
    eps = 1e-6 * (cfg.E - cfg.A)
    out = []
    for flat in np.nonzero(mask)[0]:
        prof = [float(v) for v in profiles[flat]]
        if not _continuum_deviation_improves(kernel_n, prof, cfg, eps):
            out.append(tuple(prof))
    return out


def _continuum_deviation_improves(
    kernel_n: Callable, prof: list[float], cfg: MarketConfig, eps: float
) -> bool:
    current = kernel_n(tuple(prof), cfg)
    for i in range(len(prof)):
        others = prof[:i] + prof[i + 1 :]
        star = best_deviation(others, cfg)
        for cand in (star, max(cfg.A, star - eps)):
            trial = list(prof)
            trial[i] = cand
            if kernel_n(tuple(trial), cfg)[i] > current[i]:
                return True
    return False


# ---------------------------------------------------------------------------
# Value curve


def value_curve_oracle(
    p_list: Sequence[float],
    cfg: MarketConfig,
    n_list: Sequence[int],
    tol: float = 1e-9,
) -> list[dict]:
    """Grid-game values against the analytic value and the regime benchmark.

    One row per (p, n) pair: the solved finite-game value, the closed-form
    value with its gap, the regime's coarse benchmark with its gap, and
    which of the two predictions the finite value sits closer to.
    """
    if list(n_list) != sorted(n_list):
        raise DomainError("n_list must be ascending")
    rows = []
    for p in p_list:
        rep = value_weighted(p)
        kernel = WeightedKernel(p=p, cfg=cfg)
        marks = regime_breakpoints(p, cfg)
        for n in n_list:
            g = make_grid(n, cfg, mandatory=marks)
            sol = solve_matrix_game(payoff_matrix(kernel, g, g), tol=tol)
            gap = abs(sol.value - rep.v)
            bench_gap = abs(sol.value - rep.benchmark)
            if math.isclose(gap, bench_gap, rel_tol=0.0, abs_tol=1e-12):
                closer = "tie"
            else:
                closer = "formula" if gap < bench_gap else "benchmark"
            rows.append(
                {
                    "p": p,
                    "n": n,
                    "value_n": sol.value,
                    "v_formula": rep.v,
                    "gap": gap,
                    "regime": rep.regime.value,
                    "benchmark": rep.benchmark,
                    "benchmark_gap": bench_gap,
                    "closer": closer,
                    "converged": sol.converged,
                }
            )
    return rows


_CSV_COLUMNS = (
    "p", "n", "value_n", "v_formula", "gap",
    "regime", "benchmark", "benchmark_gap", "closer", "converged",
)


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def value_curve_csv(rows: Sequence[dict]) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[k]) for k in _CSV_COLUMNS))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Symmetric self-play


@dataclass(frozen=True)
class SelfplayReport:
    N: int
    n: int
    iters: int
    seed: int
    checkpoints: tuple[int, ...]
    exploitability: tuple[float, ...]
    value_estimate: float
    final_mix: tuple[float, ...]


def _selfplay_payoff_fn(
    kernel_n: Callable, N: int, pts: np.ndarray, cfg: MarketConfig
) -> Callable[[np.ndarray], np.ndarray]:
    """Returns u(sigma): expected payoff of each pure bid vs N-1 copies of sigma."""
    s = len(pts)
    idx = np.indices((s,) * N).reshape(N, -1).T
    profiles = pts[idx]
    tensor = _profile_payoffs(kernel_n, profiles, cfg)[:, 0].reshape((s,) * N)
    if N == 2:
        return lambda sigma: tensor @ sigma
    flat = tensor.reshape(s * s, s)

    def u(sigma: np.ndarray) -> np.ndarray:
        return (flat @ sigma).reshape(s, s) @ sigma

    return u


def symmetric_selfplay(
    kernel_n: Callable, N: int, g: Grid, iters: int, seed: int
) -> SelfplayReport:
    """Regret-matching self-play with one shared strategy for all players.

    Diagnostic: reports the exploitability of the time-averaged strategy at
    power-of-two checkpoints.  Convergence is only a gate for the N=2
    sanity mode; for N=3 the trajectory is informative output.
    """
    if N not in (2, 3):
        raise UnsupportedError(f"selfplay supports N in (2, 3), got {N}")
    if g.n > 201:
        raise UnsupportedError(f"selfplay capped at n <= 201, got {g.n}")
    if iters < 1:
        raise DomainError("iters must be positive")
    pts = g.array
    s = len(pts)
    u_of = _selfplay_payoff_fn(kernel_n, N, pts, g.cfg)
    jitter = uniform_stream(derive_seed(seed, "selfplay-init"), s)
    sigma = _normalize(1.0 + 0.01 * jitter)
    regret = np.zeros(s)
    acc = np.zeros(s)
    wsum = 0.0
    marks = sorted({min(2**k, iters) for k in range(1, 64) if 2**k <= iters} | {iters})
    checkpoints = []
    gaps = []
    for t in range(1, iters + 1):
        u = u_of(sigma)
        regret = np.maximum(regret + u - float(sigma @ u), 0.0)
        acc += t * sigma
        wsum += t
        total = regret.sum()
        sigma = regret / total if total > 0 else np.full(s, 1.0 / s)
        if t in marks:
            avg = acc / wsum
            u_avg = u_of(avg)
            checkpoints.append(t)
            gaps.append(max(float(u_avg.max()) - float(avg @ u_avg), 0.0))
    avg = acc / wsum
    u_avg = u_of(avg)
    return SelfplayReport(
        N=N,
        n=g.n,
        iters=iters,
        seed=seed,
        checkpoints=tuple(checkpoints),
        exploitability=tuple(gaps),
        value_estimate=float(avg @ u_avg),
        final_mix=tuple(float(x) for x in avg),
    )


# ---------------------------------------------------------------------------
# Hypersurface probes


def _probe_deltas(cfg: MarketConfig) -> tuple[float, ...]:
    span = cfg.B - cfg.A
    return (1e-6 * span, 1e-7 * span, 1e-8 * span)


def _tilde_first(bids: Sequence[float], cfg: MarketConfig) -> float:
    return payoff_n_tilde(tuple(bids), cfg)[0]


def ddpm_probe(samples: int, seed: int, cfg: MarketConfig) -> VerificationReport:
    """One-sided limit checks of the tie-zeroed payoff on each surface class.

    Constructs seeded profiles sitting exactly on the Tie, FixedPoint,
    and Transition hypersurfaces (confirmed via classify_discontinuity),
    then evaluates the deviator's payoff along approach ladders:

    - FixedPoint / Transition: approaching from below never drops the
      payoff under its surface value.
    - Tie below E: stepping just above the shared bid pays 1 (the tie
      itself pays 0); at or above E the payoff is 1 below the shared
      bid and 0 at or above it.

    Returns a violation-count report (expected 0).
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    t0 = time.perf_counter()
    margin = 1e-3 * (cfg.B - cfg.A)
    deltas = _probe_deltas(cfg)
    worst: list[tuple] = []
    counts = {"FixedPoint": 0, "Transition": 0, "Tie": 0}
    violations = 0

    def record(cls: str, profile: tuple, note: str) -> None:
        nonlocal violations
        violations += 1
        if len(worst) < 5:
            worst.append((cls, profile, note))

    def classified_as(want: DiscontinuityClass, profile: tuple) -> bool:
        return classify_discontinuity(0, profile, cfg) is want

    # FixedPoint: deviator bids the threshold of the others and wins there.
    k = 0
    attempts = 0
    while counts["FixedPoint"] < samples and attempts < 50 * samples:
        attempts += 1
        n_players = 2 + (k % 2)
        draw = uniform_stream(derive_seed(seed, "fp", k), n_players - 1)
        k += 1
        others = [cfg.A + (cfg.B - cfg.A) * u for u in draw]
        t = threshold_t(others, cfg)
        if not (cfg.A + margin < t < cfg.B - margin):
            continue
        if min(abs(t - b) for b in others) <= margin:
            continue
        profile = (t, *others)
        counts["FixedPoint"] += 1
        if not classified_as(DiscontinuityClass.FIXED_POINT, profile):
            record("FixedPoint", profile, "misclassified")
            continue
        current = _tilde_first(profile, cfg)
        for d in deltas:
            pay = _tilde_first((t - d, *others), cfg)
            if pay < current - 1e-12:
                record("FixedPoint", profile, f"payoff {pay} < {current} at -{d}")

    # Transition: an opponent sits exactly on the price the profile induces.
    k = 0
    attempts = 0
    while counts["Transition"] < samples and attempts < 50 * samples:
        attempts += 1
        n_players = 2 + (k % 2)
        draw = uniform_stream(derive_seed(seed, "tr", k), n_players)
        k += 1
        if n_players == 2:
            lo = (cfg.A + 2.0 * cfg.E) / 3.0 + margin
            hi = cfg.E - margin
            if lo >= hi:
                continue
            b_low = lo + (hi - lo) * draw[0]
            others = [b_low]
        else:
            z = cfg.A + (cfg.E - cfg.A) * draw[0]
            lo = z + margin
            hi = (z + 3.0 * cfg.E) / 4.0 - margin
            if lo >= hi:
                continue
            b_low = lo + (hi - lo) * draw[1]
            others = [b_low, z]
        n = n_players
        x_surf = (2.0 * n - 1.0) * b_low - (sum(others) - b_low) - n * cfg.E
        if not (cfg.A + margin < x_surf < cfg.B - margin):
            continue
        if min(abs(x_surf - b) for b in others) <= margin:
            continue
        profile = (x_surf, *others)
        counts["Transition"] += 1
        if not classified_as(DiscontinuityClass.TRANSITION, profile):
            record("Transition", profile, "misclassified")
            continue
        current = _tilde_first(profile, cfg)
        for d in deltas:
            pay = _tilde_first((x_surf - d, *others), cfg)
            if pay < current - 1e-12:
                record("Transition", profile, f"payoff {pay} < {current} at -{d}")

    # Tie: two players share a bid; branch on which side of E it sits.
    k = 0
    attempts = 0
    while counts["Tie"] < samples and attempts < 50 * samples:
        attempts += 1
        branch = k % 3
        draw = uniform_stream(derive_seed(seed, "tie", k), 2)
        k += 1
        if branch == 2:
            lo, hi = cfg.E + margin, cfg.B - margin
            if lo >= hi:
                continue
            c = lo + (hi - lo) * draw[0]
            profile = (c, c)
        else:
            lo, hi = cfg.A + margin, cfg.E - margin
            if lo >= hi:
                continue
            c = lo + (hi - lo) * draw[0]
            if branch == 0:
                profile = (c, c)
            else:
                z_lo = (2.0 * c + 3.0 * cfg.E) / 5.0 + margin
                if z_lo >= cfg.B - margin:
                    continue
                z = z_lo + (cfg.B - margin - z_lo) * draw[1]
                profile = (c, c, z)
        counts["Tie"] += 1
        if not classified_as(DiscontinuityClass.TIE, profile):
            record("Tie", profile, "misclassified")
            continue
        rest = profile[1:]
        at = _tilde_first(profile, cfg)
        if at != 0.0:
            record("Tie", profile, f"tie pays {at}, expected 0")
        if branch == 2:
            for d in deltas:
                below = _tilde_first((c - d, *rest), cfg)
                above = _tilde_first((c + d, *rest), cfg)
                if below != 1.0:
                    record("Tie", profile, f"payoff {below} below-at -{d}, expected 1")
                if above != 0.0:
                    record("Tie", profile, f"payoff {above} above-at +{d}, expected 0")
        else:
            for d in deltas:
                above = _tilde_first((c + d, *rest), cfg)
                if above != 1.0:
                    record("Tie", profile, f"payoff {above} at +{d}, expected 1")

    short = {cls: cnt for cls, cnt in counts.items()}
    if min(counts.values()) < samples:
        record("sampling", (), "could not construct enough on-surface profiles")
    return make_report(
        check="ddpm-one-sided-limits",
        parameters={"samples": samples, "seed": seed, "per_class": short},
        max_violation=float(violations),
        tolerance=0.0,
        worst=worst,
        runtime_s=time.perf_counter() - t0,
    )
