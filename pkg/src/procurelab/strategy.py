"""Mixed strategies on [A, B] and expected payoffs against them.

A strategy is a finite mixture of uniform pieces, reciprocal pieces (density
proportional to 1/(E - x), the shape every non-uniform equilibrium here
uses), and point masses.  CDF, quantile, interval measure, and the piece
masses inside a win region all have closed forms, so expected payoffs
against the procurement kernels are computed exactly; adaptive quadrature is
kept as an independent cross-check path.

Sampling is inverse-transform driven by the deterministic stream in _rng,
so a seed pins results bit-for-bit across platforms.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from procurelab._rng import uniform_stream
from procurelab.game_core import (
    DomainError,
    Interval,
    MarketConfig,
    Side,
    UnsupportedError,
    WeightedKernel,
    strict_win_regions,
)


class QuadratureError(RuntimeError):
    """Numeric integration failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved_tol: float):
        super().__init__(f"{message} (achieved tolerance {achieved_tol:.3e})")
        self.achieved_tol = achieved_tol


class PieceKind(Enum):
    UNIFORM = "uniform"
    RECIPROCAL = "reciprocal"


@dataclass(frozen=True)
class Piece:
    """Density piece of weight w on [a, b): flat, or proportional to 1/(E-x)."""

    kind: PieceKind
    a: float
    b: float
    w: float


@dataclass(frozen=True)
class Atom:
    x: float
    m: float


@dataclass(frozen=True)
class MixedStrategy:
    """Immutable mixture of pieces and atoms on the admissible interval.

    Construction checks structure only (interval ordering, domain, the
    reciprocal singularity).  Total mass is checked by validate(), which
    every package factory calls; building an unnormalized strategy directly
    is possible on purpose, so verification routines have something broken
    to detect.
    """

    pieces: tuple[Piece, ...]
    atoms: tuple[Atom, ...]
    cfg: MarketConfig

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        A, B, E = self.cfg.A, self.cfg.B, self.cfg.E
        for p in self.pieces:
            if not (A <= p.a < p.b <= B):
                raise DomainError(f"piece [{p.a}, {p.b}) not inside [{A}, {B}]")
            if p.w <= 0.0:
                raise DomainError(f"piece weight {p.w} must be positive")
            if p.kind is PieceKind.RECIPROCAL and p.b >= E:
                raise DomainError(
                    f"reciprocal piece [{p.a}, {p.b}) must end below E={E}: "
                    "the density 1/(E-x) is not integrable there"
                )
        for atom in self.atoms:
            self.cfg.require_bid(atom.x)
            if atom.m <= 0.0:
                raise DomainError(f"atom mass {atom.m} must be positive")

    @property
    def total_mass(self) -> float:
        return sum(p.w for p in self.pieces) + sum(a.m for a in self.atoms)

    def validate(self) -> "MixedStrategy":
        if abs(self.total_mass - 1.0) > 1e-12:
            raise DomainError(f"total mass {self.total_mass} differs from 1")
        return self

    # -- exact measure queries ------------------------------------------

    def _piece_cdf(self, x: np.ndarray) -> np.ndarray:
        """Continuous-part CDF (pieces only), vectorized."""
        E = self.cfg.E
        out = np.zeros_like(x, dtype=np.float64)
        for p in self.pieces:
            xe = np.clip(x, p.a, p.b)
            if p.kind is PieceKind.UNIFORM:
                out += p.w * (xe - p.a) / (p.b - p.a)
            else:
                c = p.w / math.log((E - p.a) / (E - p.b))
                out += c * np.log((E - p.a) / (E - xe))
        return out

    def cdf(self, x) -> float | np.ndarray:
        """P(X <= x); right-continuous, exact."""
        arr = np.asarray(x, dtype=np.float64)
        out = self._piece_cdf(arr)
        for a in self.atoms:
            out = out + a.m * (arr >= a.x)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def _cdf_left(self, x) -> float | np.ndarray:
        """P(X < x)."""
        arr = np.asarray(x, dtype=np.float64)
        out = self._piece_cdf(arr)
        for a in self.atoms:
            out = out + a.m * (arr > a.x)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def atom_mass_at(self, x: float) -> float:
        return sum(a.m for a in self.atoms if a.x == x)

    def measure(self, region: Interval) -> float:
        """Exact probability of an interval, honoring endpoint membership."""
        if region.is_empty:
            return 0.0
        lo = max(region.lo, self.cfg.A)
        hi = min(region.hi, self.cfg.B)
        if lo > hi:
            return 0.0
        cont = float(self._piece_cdf(np.float64(hi)) - self._piece_cdf(np.float64(lo)))
        atoms = sum(a.m for a in self.atoms if region.contains(a.x))
        return cont + atoms

    # -- quantile and sampling ------------------------------------------

    def _ordered_components(self):
        """Pieces and atoms in position order, or None when they overlap."""
        events = []
        for p in self.pieces:
            events.append((p.a, 1, p))
        for a in self.atoms:
            events.append((a.x, 0, a))
        events.sort(key=lambda e: (e[0], e[1]))
        pos = self.cfg.A
        for loc, _, comp in events:
            if isinstance(comp, Piece):
                if comp.a < pos:
                    return None
                pos = comp.b
            else:
                if comp.x < pos:
                    return None
                pos = max(pos, comp.x)
        return [comp for _, _, comp in events]

    def quantile(self, u) -> float | np.ndarray:
        """Generalized inverse of the CDF: inf{x : cdf(x) >= u}."""
        scalar = np.isscalar(u) or np.asarray(u).ndim == 0
        uu = np.atleast_1d(np.asarray(u, dtype=np.float64))
        if ((uu < 0.0) | (uu > 1.0)).any():
            raise DomainError("quantile argument outside [0, 1]")
        comps = self._ordered_components()
        if comps is not None:
            out = self._quantile_ordered(uu, comps)
        else:
            out = self._quantile_bisect(uu)
        return float(out[0]) if scalar else out

    def _quantile_ordered(self, u: np.ndarray, comps) -> np.ndarray:
        E = self.cfg.E
        masses = np.array([c.w if isinstance(c, Piece) else c.m for c in comps])
        edges = np.cumsum(masses)
        u = np.minimum(u, edges[-1])
        idx = np.searchsorted(edges, u, side="left")
        idx = np.minimum(idx, len(comps) - 1)
        out = np.empty_like(u)
        base = edges - masses
        for k, comp in enumerate(comps):
            sel = idx == k
            if not sel.any():
                continue
            if isinstance(comp, Atom):
                out[sel] = comp.x
            else:
                local = u[sel] - base[k]
                if comp.kind is PieceKind.UNIFORM:
                    out[sel] = comp.a + (comp.b - comp.a) * local / comp.w
                else:
                    c = comp.w / math.log((E - comp.a) / (E - comp.b))
                    out[sel] = E - (E - comp.a) * np.exp(-local / c)
        return np.clip(out, self.cfg.A, self.cfg.B)

    def _quantile_bisect(self, u: np.ndarray) -> np.ndarray:
        # overlapping components: fall back to monotone bisection on the CDF
        out = np.full_like(u, np.nan)
        for a in self.atoms:
            lo_mass = self._cdf_left(a.x)
            hi_mass = self.cdf(a.x)
            hit = (u > lo_mass) & (u <= hi_mass)
            out[hit] = a.x
        todo = np.isnan(out)
        lo = np.full(todo.sum(), self.cfg.A)
        hi = np.full(todo.sum(), self.cfg.B)
        target = u[todo]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            ge = self.cdf(mid) >= target
            hi = np.where(ge, mid, hi)
            lo = np.where(ge, lo, mid)
        out[todo] = hi
        return out

    def sample(self, rng_seed: int, n: int) -> np.ndarray:
        """n inverse-transform samples; a seed fixes them bit-for-bit."""
        if n < 1:
            raise DomainError(f"sample count must be >= 1, got {n}")
        return self.quantile(uniform_stream(rng_seed, n))

    # -- JSON round trip -------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "pieces": [
                {"kind": p.kind.value, "a": p.a, "b": p.b, "w": p.w}
                for p in self.pieces
            ],
            "atoms": [{"x": a.x, "m": a.m} for a in self.atoms],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str, cfg: MarketConfig) -> "MixedStrategy":
        doc = json.loads(text)
        if not isinstance(doc, dict) or set(doc) - {"pieces", "atoms"}:
            raise DomainError(f"unknown strategy fields {set(doc) - {'pieces', 'atoms'}}")
        pieces = []
        for entry in doc.get("pieces", []):
            if set(entry) != {"kind", "a", "b", "w"}:
                raise DomainError(f"bad piece fields {sorted(entry)}")
            pieces.append(
                Piece(PieceKind(entry["kind"]), float(entry["a"]),
                      float(entry["b"]), float(entry["w"]))
            )
        atoms = []
        for entry in doc.get("atoms", []):
            if set(entry) != {"x", "m"}:
                raise DomainError(f"bad atom fields {sorted(entry)}")
            atoms.append(Atom(float(entry["x"]), float(entry["m"])))
        return cls(tuple(pieces), tuple(atoms), cfg).validate()


def point_mass(x: float, cfg: MarketConfig) -> MixedStrategy:
    return MixedStrategy((), (Atom(cfg.require_bid(x), 1.0),), cfg).validate()


# ---------------------------------------------------------------------------
# Expected payoffs


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    cutpoints: tuple[float, ...] = ()


@dataclass(frozen=True)
class JointExpectation:
    """Double expectation with the per-form values and their max spread."""

    value: float
    by_form: dict[str, float]
    max_gap: float


def _piece_mass_between(piece: Piece, lo: float, hi: float, E: float) -> float:
    """Mass a single piece assigns to (lo, hi); endpoints carry no mass."""
    lo = max(lo, piece.a)
    hi = min(hi, piece.b)
    if hi <= lo:
        return 0.0
    if piece.kind is PieceKind.UNIFORM:
        return piece.w * (hi - lo) / (piece.b - piece.a)
    c = piece.w / math.log((E - piece.a) / (E - piece.b))
    return c * math.log((E - lo) / (E - hi))


def _region_cutpoints(bid: float, side: Side, kernel: WeightedKernel) -> list[float]:
    """Points where the kernel, as a function of the opponent bid, may jump."""
    cfg = kernel.cfg
    pts = [bid, cfg.E]
    p = kernel.p
    if 0.0 < p < 1.0:
        from procurelab.game_core import maps_p

        maps = maps_p(p, cfg)
        if side is Side.AS_ROW:
            pts += [maps.h1(bid), maps.f1(bid)]
        else:
            pts += [maps.h2(bid), maps.f2(bid)]
    else:
        # limiting boundaries when one bid has no influence on the price
        if p == 0.0:
            pts += [2.0 * bid - cfg.E, (bid + cfg.E) / 2.0]
        else:
            pts += [(bid + cfg.E) / 2.0, 2.0 * bid - cfg.E]
    return [q for q in pts if cfg.A < q < cfg.B]


def _panels(points: Iterable[float], lo: float, hi: float) -> list[tuple[float, float]]:
    cuts = sorted({lo, hi} | {q for q in points if lo < q < hi})
    return list(zip(cuts, cuts[1:]))


def _quad_panel(f: Callable[[float], float], lo: float, hi: float,
                spec: QuadratureSpec) -> tuple[float, float]:
    val, abserr = integrate.quad(
        f, lo, hi, epsrel=spec.rel_tol, epsabs=1e-13, limit=spec.max_subdivisions
    )
    return val, abserr


def expect_vs(
    bid: float,
    s: MixedStrategy,
    kernel: WeightedKernel,
    quad: QuadratureSpec | None = None,
    side: Side = Side.AS_ROW,
    method: str = "auto",
) -> float:
    """Expected payoff of `bid` against an opponent playing `s`.

    side AS_ROW evaluates E[g(bid, Y)], AS_COLUMN evaluates E[g(X, bid)]
    where g is the row player's payoff.  The default method decomposes the
    opponent's pieces over the exact win regions (the kernel is constant on
    each part, so no numeric integration happens at all); "quadrature"
    forces the adaptive panel integrator instead and exists to cross-check
    the closed forms.  Atom ties contribute the kernel's tie payoff.
    """
    quad = quad or QuadratureSpec()
    bid = kernel.cfg.require_bid(bid)
    if method not in ("auto", "exact", "quadrature"):
        raise DomainError(f"unknown method {method!r}")

    if side is Side.AS_ROW:
        atom_part = sum(a.m * kernel(bid, a.x) for a in s.atoms)
    else:
        atom_part = sum(a.m * kernel(a.x, bid) for a in s.atoms)

    use_exact = method in ("auto", "exact") and 0.0 < kernel.p < 1.0
    if method == "exact" and not use_exact:
        raise UnsupportedError("exact win regions need 0 < p < 1")

    if use_exact:
        regions = strict_win_regions(bid, side, kernel.p, kernel.cfg)
        cont = 0.0
        for region in regions:
            for piece in s.pieces:
                cont += _piece_mass_between(piece, region.lo, region.hi, kernel.cfg.E)
        return atom_part + cont

    # quadrature path: integrate the kernel against each piece density
    E = kernel.cfg.E
    cut = list(quad.cutpoints) + _region_cutpoints(bid, side, kernel)
    total = 0.0
    worst = 0.0
    for piece in s.pieces:
        if piece.kind is PieceKind.UNIFORM:
            dens = lambda y, p=piece: p.w / (p.b - p.a)
        else:
            c = piece.w / math.log((E - piece.a) / (E - piece.b))
            dens = lambda y, p=piece, c=c: c / (E - y)
        if side is Side.AS_ROW:
            f = lambda y, d=dens: kernel(bid, y) * d(y)
        else:
            f = lambda y, d=dens: kernel(y, bid) * d(y)
        for lo, hi in _panels(cut, piece.a, piece.b):
            val, err = _quad_panel(f, lo, hi, quad)
            total += val
            worst = max(worst, err)
    if worst > max(quad.rel_tol * max(abs(total), 1.0), 1e-12) * 10.0:
        raise QuadratureError("expected-payoff integration did not converge", worst)
    return atom_part + total


def _sym_maps(cfg: MarketConfig):
    lower = lambda t: 3.0 * t - 2.0 * cfg.E
    upper = lambda t: (t + 2.0 * cfg.E) / 3.0
    return lower, upper


def _outer_cutpoints(inner: MixedStrategy, kernel: WeightedKernel) -> list[float]:
    """Bid values at which the expected payoff against `inner` can kink."""
    cfg = kernel.cfg
    qs = {cfg.E}
    for p in inner.pieces:
        qs |= {p.a, p.b}
    for a in inner.atoms:
        qs.add(a.x)
    out = set()
    if 0.0 < kernel.p < 1.0:
        from procurelab.game_core import maps_p

        maps = maps_p(kernel.p, cfg)
        preimages = (lambda q: q, maps.f2, maps.h2, maps.f1, maps.h1)
    else:
        lower, upper = _sym_maps(cfg)
        preimages = (lambda q: q, lower, upper)
    for q in qs:
        for f in preimages:
            t = f(q)
            if cfg.A < t < cfg.B:
                out.add(t)
    return sorted(out)


def _integrate_against(mu: MixedStrategy, f: Callable[[float], float],
                       cuts: Sequence[float], spec: QuadratureSpec) -> float:
    """∫ f dμ with f piecewise smooth between cuts; atoms added exactly."""
    total = sum(a.m * f(a.x) for a in mu.atoms)
    E = mu.cfg.E
    worst = 0.0
    for piece in mu.pieces:
        if piece.kind is PieceKind.UNIFORM:
            dens = lambda x, p=piece: p.w / (p.b - p.a)
        else:
            c = piece.w / math.log((E - piece.a) / (E - piece.b))
            dens = lambda x, p=piece, c=c: c / (E - x)
        for lo, hi in _panels(cuts, piece.a, piece.b):
            val, err = _quad_panel(lambda x: f(x) * dens(x), lo, hi, spec)
            total += val
            worst = max(worst, err)
    if worst > max(spec.rel_tol * max(abs(total), 1.0), 1e-12) * 10.0:
        raise QuadratureError("outer integration did not converge", worst)
    return total


def _shared_atom_term(mu: MixedStrategy, nu: MixedStrategy, tie_value: float) -> float:
    return sum(
        tie_value * a.m * nu.atom_mass_at(a.x) for a in mu.atoms
    )


def expect_joint(
    mu: MixedStrategy,
    nu: MixedStrategy,
    kernel: WeightedKernel,
    quad: QuadratureSpec | None = None,
    forms: tuple[str, ...] | None = None,
) -> JointExpectation:
    """E[g(X, Y)] for X ~ mu, Y ~ nu, computed several independent ways.

    Forms: "outer" integrates the exact conditional expectation over mu;
    "cdf" evaluates the swapped-order closed form that queries mu-measures
    of the win regions as a function of y; "swapped" does the mirror with
    nu-measures as a function of x.  The last two bake in the symmetric
    price (both bids weighted equally), so they refuse kernels with p != 1/2.
    Defaults: all three for a symmetric kernel, outer only otherwise.
    """
    quad = quad or QuadratureSpec()
    if mu.cfg != kernel.cfg or nu.cfg != kernel.cfg:
        raise DomainError("strategies and kernel use different market configs")
    if forms is None:
        forms = ("outer", "cdf", "swapped") if kernel.is_symmetric else ("outer",)
    if not forms:
        raise DomainError("need at least one form")
    bad = set(forms) - {"outer", "cdf", "swapped"}
    if bad:
        raise DomainError(f"unknown forms {sorted(bad)}")
    if not kernel.is_symmetric and set(forms) & {"cdf", "swapped"}:
        raise UnsupportedError("closed Fubini forms assume the symmetric price")

    cfg = kernel.cfg
    E = cfg.E
    by_form: dict[str, float] = {}

    if "outer" in forms:
        cuts = _outer_cutpoints(nu, kernel)
        f = lambda x: expect_vs(x, nu, kernel, quad, side=Side.AS_ROW)
        by_form["outer"] = _integrate_against(mu, f, cuts, quad)

    if "cdf" in forms:
        lower, upper = _sym_maps(cfg)

        def below(y: float) -> float:
            win_low = mu.measure(Interval(y, upper(y), False, True))
            win_high = mu.measure(Interval(cfg.A, lower(y), True, False))
            return win_low + win_high

        def integrand(y: float) -> float:
            return below(y) if y < E else float(mu.measure(Interval(cfg.A, y, True, False)))

        cuts = _outer_cutpoints(mu, kernel)
        total = 0.0
        worst = 0.0
        for piece in nu.pieces:
            if piece.kind is PieceKind.UNIFORM:
                dens = lambda y, p=piece: p.w / (p.b - p.a)
            else:
                c = piece.w / math.log((E - piece.a) / (E - piece.b))
                dens = lambda y, p=piece, c=c: c / (E - y)
            for lo, hi in _panels(cuts, piece.a, piece.b):
                val, err = _quad_panel(lambda y: integrand(y) * dens(y), lo, hi, quad)
                total += val
                worst = max(worst, err)
        if worst > max(quad.rel_tol * max(abs(total), 1.0), 1e-12) * 10.0:
            raise QuadratureError("swapped-order integration did not converge", worst)
        for a in nu.atoms:
            if a.x < E:
                total += a.m * below(a.x)
            else:
                # at y = E the two split terms coincide; count the region once
                total += a.m * mu.measure(Interval(cfg.A, a.x, True, False))
        total += _shared_atom_term(mu, nu, kernel.tie_value)
        by_form["cdf"] = total

    if "swapped" in forms:
        lower, upper = _sym_maps(cfg)

        def row_win(x: float) -> float:
            if x < E:
                lo_part = nu.measure(Interval(max(lower(x), cfg.A), x, True, False))
                hi_part = nu.measure(Interval(upper(x), cfg.B, False, True))
                return lo_part + hi_part
            return nu.measure(Interval(x, cfg.B, False, True))

        cuts = _outer_cutpoints(nu, kernel)
        total = _integrate_against(mu, row_win, cuts, quad)
        total += _shared_atom_term(mu, nu, kernel.tie_value)
        by_form["swapped"] = total

    vals = [by_form[name] for name in forms]
    max_gap = max(vals) - min(vals) if len(vals) > 1 else 0.0
    return JointExpectation(value=by_form[forms[0]], by_form=by_form, max_gap=max_gap)
