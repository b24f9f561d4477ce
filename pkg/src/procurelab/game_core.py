"""Award rules and analytic primitives of the average-bid procurement game.

N bidders submit sealed bids in an admissible interval [A, B].  The reference
price is the average of the engineer's estimate E and the mean bid; the award
goes to the bid closest to the reference price from below (at-or-below counts
as below), or to the lowest bid when everyone is above.  Exact ties split the
award evenly.

This module evaluates those rules exactly and exposes the analytic objects
attached to them: deviation thresholds, the four affine reflection maps of the
weighted two-player game, cutpoint sequences, regime classification, strict
win regions, the N=3 cutpoint geometry, and the discontinuity taxonomy used
by the numeric probes.

Everything here is a pure function of its arguments.  Payoff comparisons are
exact float comparisons (ties happen only for bit-equal bids); a tolerance is
used only to classify points as lying on a discontinuity hypersurface.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

# Absolute tolerance for deciding that a profile sits on a measure-zero
# hypersurface (tie / fixed-point / transition).  Payoff evaluation itself
# never uses it.
HYPERSURFACE_TOL = 1e-12


class DomainError(ValueError):
    """Input outside the domain an operation is defined on."""


class UnsupportedError(ValueError):
    """Input is well-formed but outside the analyzed parameter range."""


class BoundaryError(DomainError):
    """Input sits exactly on a classification boundary."""


@dataclass(frozen=True)
class MarketConfig:
    """Market triple: admissible bid interval [A, B] and estimated cost E."""

    A: float
    B: float
    E: float

    def __post_init__(self) -> None:
        if not (self.A < self.E < self.B):
            raise DomainError(
                f"need A < E < B, got A={self.A}, E={self.E}, B={self.B}"
            )

    def require_bid(self, x: float) -> float:
        if not (self.A <= x <= self.B):
            raise DomainError(f"bid {x} outside [{self.A}, {self.B}]")
        return float(x)


def default_config() -> MarketConfig:
    return MarketConfig(A=0.0, B=1.5, E=1.0)


Profile = Sequence[float]


def check_profile(bids: Profile, cfg: MarketConfig) -> tuple[float, ...]:
    """Validate a bid profile: N >= 2, every bid admissible."""
    out = tuple(float(b) for b in bids)
    if len(out) < 2:
        raise DomainError(f"profile needs at least 2 bids, got {len(out)}")
    for b in out:
        cfg.require_bid(b)
    return out


# ---------------------------------------------------------------------------
# Award rules


def reference_price(bids: Profile, cfg: MarketConfig) -> float:
    """(E + mean bid) / 2, the award benchmark."""
    bids = check_profile(bids, cfg)
    n = len(bids)
    return (sum(bids) + n * cfg.E) / (2.0 * n)


def _winner_set(bids: tuple[float, ...], price: float) -> list[int]:
    below = [b for b in bids if b <= price]
    target = max(below) if below else min(bids)
    return [i for i, b in enumerate(bids) if b == target]


def payoff_n(bids: Profile, cfg: MarketConfig) -> tuple[float, ...]:
    """Payoff vector under the award rules; entries sum to exactly 1."""
    bids = check_profile(bids, cfg)
    winners = _winner_set(bids, reference_price(bids, cfg))
    share = 1.0 / len(winners)
    out = [0.0] * len(bids)
    for i in winners:
        out[i] = share
    return tuple(out)


def payoff_n_tilde(bids: Profile, cfg: MarketConfig) -> tuple[float, ...]:
    """Tie-averse variant: any shared award pays everyone zero."""
    bids = check_profile(bids, cfg)
    winners = _winner_set(bids, reference_price(bids, cfg))
    out = [0.0] * len(bids)
    if len(winners) == 1:
        out[winners[0]] = 1.0
    return tuple(out)


def payoff_n_batch(bids: np.ndarray, cfg: MarketConfig) -> np.ndarray:
    """Vectorized payoff_n over an (m, N) array of profiles."""
    bids = np.asarray(bids, dtype=np.float64)
    if bids.ndim != 2 or bids.shape[1] < 2:
        raise DomainError("expected an (m, N) array with N >= 2")
    if bids.shape[0] == 0:
        return np.empty_like(bids)
    if not (bids.min() >= cfg.A and bids.max() <= cfg.B):
        raise DomainError("bid outside the admissible interval")
    n = bids.shape[1]
    price = (bids.sum(axis=1, keepdims=True) + n * cfg.E) / (2.0 * n)
    below = bids <= price
    any_below = below.any(axis=1, keepdims=True)
    masked = np.where(below, bids, -np.inf)
    target = np.where(
        any_below, masked.max(axis=1, keepdims=True), bids.min(axis=1, keepdims=True)
    )
    winners = bids == target
    return winners / winners.sum(axis=1, keepdims=True)


def payoff_n_combinatorial(bids: Profile, cfg: MarketConfig) -> tuple[float, ...]:
    """Subset-sum form of the payoff vector, used as an oracle for payoff_n.

    Evaluates, for each player, the double sum over tie groups J of

        1/(|J|+1) * prod_{k in J} 1{x_i = x_k} * (below-branch + above-branch)

    where the below branch requires every opponent outside J that bids
    strictly under the reference price to bid strictly under x_i, and the
    above branch requires every opponent outside J to bid strictly over x_i.
    Exponential in N, so refused for N > 6.
    """
    bids = check_profile(bids, cfg)
    n_players = len(bids)
    if n_players > 6:
        raise UnsupportedError(f"subset enumeration refused for N={n_players} > 6")
    price = reference_price(bids, cfg)
    out = []
    for i, xi in enumerate(bids):
        others = [j for j in range(n_players) if j != i]
        total = 0.0
        for size in range(n_players):
            for group in itertools.combinations(others, size):
                if any(bids[k] != xi for k in group):
                    continue
                rest = [j for j in others if j not in group]
                if xi <= price:
                    ok = all(not (bids[j] < price) or bids[j] < xi for j in rest)
                else:
                    ok = all(xi < bids[j] for j in rest)
                if ok:
                    total += 1.0 / (size + 1)
        out.append(total)
    return tuple(out)


def payoff_2(x: float, y: float, cfg: MarketConfig) -> float:
    """Two-player payoff of player 1 (case cascade over the win regions)."""
    x = cfg.require_bid(x)
    y = cfg.require_bid(y)
    price = (x + y + 2.0 * cfg.E) / 4.0
    # The three win cases overlap only where a bid equals the reference
    # price exactly; the cascade resolves those points consistently with
    # the award rules.
    if y < x <= price:
        return 1.0
    if price <= x < y:
        return 1.0
    if x <= price < y:
        return 1.0
    if x == y:
        return 0.5
    return 0.0


def payoff_weighted(x: float, y: float, p: float, cfg: MarketConfig) -> float:
    """Weighted-influence payoff of player 1; ties pay p.

    The reference price weighs player 1's bid by p and player 2's by 1 - p:
    P = (p*x + (1-p)*y + E) / 2.
    """
    x = cfg.require_bid(x)
    y = cfg.require_bid(y)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"weight p={p} outside [0, 1]")
    price = (p * x + (1.0 - p) * y + cfg.E) / 2.0
    if y < x <= price:
        return 1.0
    if price <= x < y:
        return 1.0
    if x <= price < y:
        return 1.0
    if x == y:
        return p
    return 0.0


def payoff_3(x: float, y: float, z: float, cfg: MarketConfig) -> float:
    """Three-player payoff of player 1 as an explicit indicator cascade.

    Spelled out case by case (rather than delegating to payoff_n) so the
    N=3 cutpoint analysis has an independent formulation to test against.
    """
    x = cfg.require_bid(x)
    y = cfg.require_bid(y)
    z = cfg.require_bid(z)
    t = (x + y + z + 3.0 * cfg.E) / 6.0
    if z <= y < x <= t:
        return 1.0
    if y < z < x <= t:
        return 1.0
    if y < x <= t < z:
        return 1.0
    if z < x <= t < y:
        return 1.0
    if x <= t < z <= y:
        return 1.0
    if x <= t < y < z:
        return 1.0
    if t < x < z <= y:
        return 1.0
    if t < x < y < z:
        return 1.0
    if z < y == x <= t:
        return 0.5
    if y < z == x <= t:
        return 0.5
    if y == x <= t < z:
        return 0.5
    if z == x <= t < y:
        return 0.5
    if t <= y == x < z:
        return 0.5
    if t <= z == x < y:
        return 0.5
    if x == y == z:
        return 1.0 / 3.0
    return 0.0


def payoff_3_batch(
    x: np.ndarray, y: np.ndarray, z: np.ndarray, cfg: MarketConfig
) -> np.ndarray:
    """Vectorized player-1 payoff for three-player profiles."""
    bids = np.stack(np.broadcast_arrays(x, y, z), axis=-1).reshape(-1, 3)
    out = payoff_n_batch(bids, cfg)[:, 0]
    return out.reshape(np.broadcast(x, y, z).shape)


# ---------------------------------------------------------------------------
# Deviations and thresholds


def best_deviation(others: Sequence[float], cfg: MarketConfig) -> float:
    """The bid that lands on the reference price it induces.

    Against opponents x_{-i}, bidding (sum(x_{-i}) + N*E) / (2N - 1) makes the
    completed profile's reference price equal the bid itself, securing the
    award unless an opponent matches it exactly (the caller then undercuts by
    a small epsilon).

    The exact quotient has no binary representation, and rounding it up puts
    the bid an ulp above the price it induces, forfeiting the award.  The
    result is therefore nudged down by at most a few ulps until the completed
    profile actually awards to it; threshold_t returns the raw quotient.
    """
    if len(others) < 1:
        raise DomainError("need at least one opponent")
    vals = [cfg.require_bid(b) for b in others]
    n = len(vals) + 1
    star = (sum(vals) + n * cfg.E) / (2.0 * n - 1.0)
    for _ in range(8):
        if payoff_n([star] + vals, cfg)[0] == 1.0 or any(b == star for b in vals):
            break
        star = math.nextafter(star, cfg.A)
    return star


def threshold_t(others: Sequence[float], cfg: MarketConfig) -> float:
    """Opponents-only threshold: own bids at or below it are at or below P.

    Same quotient as best_deviation but without the award-securing nudge
    (the two can differ by a few ulps): a classification threshold must not
    move, while a bid to play must actually win.
    """
    if len(others) < 1:
        raise DomainError("need at least one opponent")
    vals = [cfg.require_bid(b) for b in others]
    n = len(vals) + 1
    return (sum(vals) + n * cfg.E) / (2.0 * n - 1.0)


# ---------------------------------------------------------------------------
# Affine maps, sequences, regimes


@dataclass(frozen=True)
class AffineMaps:
    """The four reflection maps of the weighted two-player game.

    f1 sends own bid x to the reference price it induces when the opponent
    matches it from above; f2 is the opposite-role analogue; h1 and h2 are
    their respective inverses (h2 of f1 = id, h1 of f2 = id).  All four fix E.
    """

    p: float
    E: float

    def f1(self, x: float) -> float:
        return (self.p * x + self.E) / (self.p + 1.0)

    def f2(self, x: float) -> float:
        return ((1.0 - self.p) * x + self.E) / (2.0 - self.p)

    def h1(self, x: float) -> float:
        return ((2.0 - self.p) * x - self.E) / (1.0 - self.p)

    def h2(self, x: float) -> float:
        return ((self.p + 1.0) * x - self.E) / self.p


def maps_p(p: float, cfg: MarketConfig) -> AffineMaps:
    if not (0.0 < p < 1.0):
        raise DomainError(f"maps need 0 < p < 1, got p={p}")
    return AffineMaps(p=float(p), E=cfg.E)


def sym_sequence_A(i: int, cfg: MarketConfig) -> float:
    """A_i = (A + (3^i - 1) E) / 3^i, the symmetric-game cutpoints."""
    if i < 0:
        raise DomainError(f"index must be >= 0, got {i}")
    # E - (E - A)/3^i is the same value in a cancellation-free form.
    return cfg.E - (cfg.E - cfg.A) / 3.0**i


_SEQ_I_MAX = 64


@dataclass(frozen=True)
class WeightedSequences:
    """Cutpoint sequences of the weighted game, indexed by subscript.

    a_hat[i] iterates f1 from A, a_check[i] iterates f2 from A; c_hat[i] is
    h1(a_hat[i]) and c_check[i] is h2(a_check[i+1]).  d_hat iterates f2 and
    d_check iterates f1 from closed-form seeds at index 1; index 0 of both is
    NaN (no seed exists there).  Early d_hat entries may fall below A; they
    are reported as computed, and consumers clip to the admissible interval.
    """

    p: float
    a_hat: tuple[float, ...]
    a_check: tuple[float, ...]
    c_hat: tuple[float, ...]
    c_check: tuple[float, ...]
    d_hat: tuple[float, ...]
    d_check: tuple[float, ...]


def weighted_sequences(p: float, i_max: int, cfg: MarketConfig) -> WeightedSequences:
    if not (1 <= i_max <= _SEQ_I_MAX):
        raise DomainError(f"i_max must be in [1, {_SEQ_I_MAX}], got {i_max}")
    maps = maps_p(p, cfg)
    A, E = cfg.A, cfg.E

    a_hat = [A]
    a_check = [A]
    for _ in range(i_max + 1):
        a_hat.append(maps.f1(a_hat[-1]))
        a_check.append(maps.f2(a_check[-1]))

    d_hat = [math.nan, ((p + 1.0) * (1.0 - p) ** 2 * A + ((5.0 - 3.0 * p) * p - 1.0) * E)
             / (p * (2.0 - p) ** 2)]
    d_check = [math.nan, (2.0 * E + p * (1.0 - p) * A) / ((2.0 - p) * (p + 1.0))]
    for _ in range(i_max - 1):
        d_hat.append(maps.f2(d_hat[-1]))
        d_check.append(maps.f1(d_check[-1]))

    c_hat = tuple(maps.h1(a) for a in a_hat[: i_max + 1])
    c_check = tuple(maps.h2(a_check[i + 1]) for i in range(i_max + 1))
    return WeightedSequences(
        p=float(p),
        a_hat=tuple(a_hat[: i_max + 1]),
        a_check=tuple(a_check[: i_max + 1]),
        c_hat=c_hat,
        c_check=c_check,
        d_hat=tuple(d_hat),
        d_check=tuple(d_check),
    )


def critical_p() -> float:
    """Root of 3p^2 - 5p + 1 in (0, 1/2); where h2(a_check[2]) hits A."""
    return (5.0 - math.sqrt(13.0)) / 6.0


class Regime(Enum):
    SYMMETRIC = "Symmetric"
    INTERMEDIATE = "Intermediate"
    CRITICAL = "Critical"
    LOW_P = "LowP"
    DEGENERATE = "Degenerate"


def regime(p: float) -> Regime:
    """Classify the weight p into the five analyzed parameter ranges."""
    if math.isnan(p) or p < 0.0:
        raise DomainError(f"weight p={p} outside [0, 1/2]")
    if p > 0.5:
        raise UnsupportedError(
            f"p={p} > 1/2 is outside the analyzed range (swap player roles instead)"
        )
    if abs(p - critical_p()) <= HYPERSURFACE_TOL:
        return Regime.CRITICAL
    if p == 0.0:
        return Regime.DEGENERATE
    if p == 0.5:
        return Regime.SYMMETRIC
    return Regime.INTERMEDIATE if p > critical_p() else Regime.LOW_P


def low_p_m(p: float, cfg: MarketConfig) -> int:
    """Largest i with a_check[2+i] <= d_check[1]; >= 1 throughout the regime."""
    if regime(p) is not Regime.LOW_P:
        raise DomainError(f"p={p} is not in the low-p regime")
    maps = maps_p(p, cfg)
    d1 = (2.0 * cfg.E + p * (1.0 - p) * cfg.A) / ((2.0 - p) * (p + 1.0))
    a = cfg.A
    for _ in range(3):
        a = maps.f2(a)
    m = 0
    while a <= d1 and m < _SEQ_I_MAX:
        m += 1
        a = maps.f2(a)
    if m < 1:
        raise DomainError(f"no admissible m at p={p}; regime guarantee violated")
    return m


# ---------------------------------------------------------------------------
# Win regions


class Side(Enum):
    AS_ROW = "AsRow"
    AS_COLUMN = "AsColumn"


@dataclass(frozen=True)
class Interval:
    """Interval with explicit endpoint membership; empty when lo > hi or
    when lo == hi with either end open."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = False

    @property
    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    @property
    def length(self) -> float:
        return max(self.hi - self.lo, 0.0)

    def contains(self, x: float) -> bool:
        if self.is_empty:
            return False
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below


def strict_win_regions(
    bid: float,
    side: Side,
    p: float,
    cfg: MarketConfig,
    alt_row_lower: bool = False,
) -> tuple[Interval, ...]:
    """Opponent bids against which the given bid strictly wins (payoff 1).

    Endpoints are derived from the award rules, not quoted: a weak win at
    the reference price makes the lower row boundary closed and the upper
    one open, and symmetrically for the column side.  For a column bid above
    E every strictly lower row bid wins, so the region collapses to [A, y).

    alt_row_lower swaps the row-side lower boundary map for the steeper
    candidate ((p+1)x - E)/p.  The two candidates agree only at p = 1/2; the
    default is the one consistent with the payoff function, and the
    alternate is kept solely so the verification battery can quantify the
    disagreement.
    """
    bid = cfg.require_bid(bid)
    maps = maps_p(p, cfg)
    A, B, E = cfg.A, cfg.B, cfg.E
    if side is Side.AS_ROW:
        lower_map = maps.h2 if alt_row_lower else maps.h1
        lower = Interval(max(lower_map(bid), A), bid, True, False)
        upper = Interval(max(maps.f1(bid), bid), B, False, True)
    elif side is Side.AS_COLUMN:
        if bid > E:
            lower = Interval(A, bid, True, False)
            upper = Interval(bid, bid, False, False)
        else:
            lower = Interval(A, maps.h2(bid), True, False)
            upper = Interval(bid, maps.f2(bid), False, True)
    else:
        raise DomainError(f"unknown side {side!r}")
    return tuple(r for r in (lower, upper) if not r.is_empty)


# ---------------------------------------------------------------------------
# N=3 cutpoint geometry


@dataclass(frozen=True)
class Cutpoints3:
    """The three opponent-derived cutpoints for N=3: the own-bid threshold t
    and the bids p_y, p_z at which the reference price crosses y and z."""

    t: float
    p_y: float
    p_z: float


def cutpoints3(y: float, z: float, cfg: MarketConfig) -> Cutpoints3:
    y = cfg.require_bid(y)
    z = cfg.require_bid(z)
    E = cfg.E
    return Cutpoints3(
        t=(y + z + 3.0 * E) / 5.0,
        p_y=5.0 * y - 3.0 * E - z,
        p_z=5.0 * z - 3.0 * E - y,
    )


@dataclass(frozen=True)
class OrderingCell:
    """One of the five admissible strict orders of {p_y, p_z, y, z, t};
    mirrored means the pattern holds after swapping y and z."""

    tag: str
    mirrored: bool


_JUMP_SIGNS: dict[str, dict[str, int]] = {
    "O1": {"y": 0, "p_y": -1, "z": 1, "p_z": 0, "t": -1},
    "O2": {"y": 1, "p_y": -1, "z": 1, "p_z": -1, "t": -1},
    "O3": {"y": 1, "p_y": -1, "z": 0, "p_z": 0, "t": -1},
    "O4": {"y": -1, "p_y": 0, "z": 0, "p_z": 0, "t": 0},
    "O5": {"y": -1, "p_y": 0, "z": 0, "p_z": 0, "t": 0},
}


def ordering_cell(
    y: float, z: float, cfg: MarketConfig, tol: float = HYPERSURFACE_TOL
) -> OrderingCell:
    """Classify (y, z) by the strict order of the five N=3 cutpoints.

    Raises BoundaryError when any two of {y, z, t, p_y, p_z} fall within
    tol of each other: there the order is not strict and adjacent cells
    merge.  The tolerance matters: pairs that coincide in exact arithmetic
    can land an ulp apart in floats, and classifying them would report a
    strict order that is pure rounding noise.
    """
    cut = cutpoints3(y, z, cfg)
    values = {"y": y, "z": z, "t": cut.t, "p_y": cut.p_y, "p_z": cut.p_z}
    items = sorted(values.items(), key=lambda kv: kv[1])
    for (na, va), (nb, vb) in zip(items, items[1:]):
        if vb - va <= tol:
            raise BoundaryError(f"cutpoints {na} and {nb} coincide near {va}")

    mirrored = z < y
    a, b = (y, z) if not mirrored else (z, y)  # a < b
    p_a = 5.0 * a - 3.0 * cfg.E - b
    p_b = 5.0 * b - 3.0 * cfg.E - a
    if b < cut.t:
        tag = "O1" if p_b < a else "O2"
    elif a < cut.t:
        tag = "O3"
    else:
        tag = "O4" if p_a > b else "O5"
    return OrderingCell(tag=tag, mirrored=mirrored)


def jump_signs(cell: OrderingCell) -> dict[str, int]:
    """Payoff jump sign of player 1 across each cutpoint, for the cell."""
    base = _JUMP_SIGNS[cell.tag]
    if not cell.mirrored:
        return dict(base)
    swap = {"y": "z", "z": "y", "p_y": "p_z", "p_z": "p_y", "t": "t"}
    return {swap[name]: sign for name, sign in base.items()}


# ---------------------------------------------------------------------------
# Discontinuity taxonomy


class DiscontinuityClass(Enum):
    TIE = "Tie"
    FIXED_POINT = "FixedPoint"
    TRANSITION = "Transition"
    CONTINUITY = "Continuity"


def classify_discontinuity(
    i: int,
    bids: Profile,
    cfg: MarketConfig,
    tol: float = HYPERSURFACE_TOL,
) -> DiscontinuityClass:
    """Locate player i's bid relative to the discontinuity hypersurfaces.

    Tie: i shares its bid with someone and the tied group wins.
    FixedPoint: i's bid equals the threshold induced by the others (there
    the bid coincides with the reference price and wins outright).
    Transition: the highest opponent bid not above the threshold sits
    exactly on the reference price, so an infinitesimal move of x_i
    re-awards the contract away from i.
    Anything else is a continuity point.

    Checks run in that order and the first hit wins.  Membership is decided
    from the defining geometry within tol; the payoff values the surfaces
    carry (1 at a fixed point, 0 at a transition) follow from the geometry
    exactly on the surface, and re-testing them at a float-rounded profile
    would misclassify points an ulp away.
    """
    bids = check_profile(bids, cfg)
    if not (0 <= i < len(bids)):
        raise DomainError(f"player index {i} out of range")
    g = payoff_n(bids, cfg)[i]
    xi = bids[i]
    others = [b for j, b in enumerate(bids) if j != i]

    if g > 0.0 and any(abs(b - xi) <= tol for b in others):
        return DiscontinuityClass.TIE

    t = threshold_t(others, cfg)
    if abs(xi - t) <= tol:
        return DiscontinuityClass.FIXED_POINT

    n = len(bids)
    candidates = [b for b in others if b <= t + tol]
    if candidates:
        b_low = max(candidates)
        surface = (2.0 * n - 1.0) * b_low - (sum(others) - b_low) - n * cfg.E
        if abs(xi - surface) <= tol:
            return DiscontinuityClass.TRANSITION
    return DiscontinuityClass.CONTINUITY


# ---------------------------------------------------------------------------
# Payoff kernels


@dataclass(frozen=True)
class WeightedKernel:
    """Two-player payoff kernel g_p(x, y) with vectorized evaluation."""

    p: float
    cfg: MarketConfig

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise DomainError(f"weight p={self.p} outside [0, 1]")

    @property
    def tie_value(self) -> float:
        return self.p

    @property
    def is_symmetric(self) -> bool:
        return self.p == 0.5

    def __call__(self, x: float, y: float) -> float:
        return payoff_weighted(x, y, self.p, self.cfg)

    def batch(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Elementwise payoff over broadcast arrays of bids."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        p, E = self.p, self.cfg.E
        price = (p * x + (1.0 - p) * y + E) / 2.0
        x_in = x <= price
        y_in = y <= price
        row_wins = np.where(
            x_in & y_in, x > y, np.where(x_in, True, np.where(y_in, False, x < y))
        )
        return np.where(x == y, p, np.where(row_wins, 1.0, 0.0))

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Payoff matrix M[i, j] = g_p(xs[i], ys[j])."""
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        return self.batch(xs[:, None], ys[None, :])


def symmetric_kernel(cfg: MarketConfig) -> WeightedKernel:
    return WeightedKernel(p=0.5, cfg=cfg)
