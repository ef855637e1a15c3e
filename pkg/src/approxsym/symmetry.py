"""Approximate Lie generators: prolongation, application, commutators.

A Generator stores the eps-series of its infinitesimals: one series per
independent variable (xi) and one per dependent variable (eta), with
coefficient k depending on (x, u_(0..k)) only.  Prolongation coefficients
are computed by the recursive contact formula with all products as
truncated series, and cached per (dependent, derivative multi-index).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from . import expr as ex
from .errors import CacheMissing
from .jet import JetSpace
from .perturb import (EpsSeries, build_infinitesimals, const_series, series_add,
                      series_mul, series_neg, series_shift, series_sub,
                      series_total_derivative, series_u_partial, validate_triangular)

__all__ = ["Generator", "commutator", "eps_shift"]


def _zero_series(space: JetSpace) -> EpsSeries:
    return const_series(ex.ZERO, space.order)


@dataclass
class Generator:
    space: JetSpace
    xi: tuple[EpsSeries, ...]
    eta: tuple[EpsSeries, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _prolonged: int = field(default=-1, repr=False, compare=False)

    def __post_init__(self):
        sp = self.space
        self.xi = tuple(self.xi)
        self.eta = tuple(self.eta)
        if len(self.xi) != sp.n or len(self.eta) != sp.m:
            raise ValueError("one xi series per independent, one eta per dependent")
        for s in self.xi + self.eta:
            if s.order != sp.order:
                raise ValueError("infinitesimal series order must match the space")
            validate_triangular(s)
            for c in s.coeffs:
                for j in ex.jets_of(c):
                    if j.deriv:
                        raise ValueError(
                            f"point-generator infinitesimals cannot contain {j!r}")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def zero(cls, space: JetSpace) -> "Generator":
        z = _zero_series(space)
        return cls(space, (z,) * space.n, (z,) * space.m)

    @classmethod
    def from_seeds(cls, space: JetSpace, xi_seeds, eta_seeds) -> "Generator":
        """Build from family-function seeds, one list of p+1 seeds per slot."""
        xi = tuple(build_infinitesimals(list(s), space) for s in xi_seeds)
        eta = tuple(build_infinitesimals(list(s), space) for s in eta_seeds)
        return cls(space, xi, eta)

    @classmethod
    def from_components(cls, space: JetSpace, xi_rows, eta_rows) -> "Generator":
        """Build from tilde coefficient matrices indexed [k][i] / [k][alpha]."""
        p = space.order
        xi = tuple(EpsSeries(tuple(xi_rows[k][i] for k in range(p + 1)))
                   for i in range(space.n))
        eta = tuple(EpsSeries(tuple(eta_rows[k][a] for k in range(p + 1)))
                    for a in range(space.m))
        return cls(space, xi, eta)

    def is_zero_generator(self) -> bool:
        return all(ex.is_zero(c) is True for s in self.xi + self.eta for c in s.coeffs)

    # -- prolongation ---------------------------------------------------------

    def prolong(self, order: int) -> "Generator":
        """Fill the prolongation cache up to derivative ``order``."""
        sp = self.space
        if order > sp.max_derivative:
            raise ValueError(f"prolongation order {order} exceeds r={sp.max_derivative}")
        u_first = {}
        for a, base in enumerate(sp.dependent):
            for v in sp.independent:
                u_first[(a, v)] = EpsSeries(tuple(
                    ex.jet(base, k, (v,)) for k in range(sp.order + 1)))
        for a in range(sp.m):
            self._cache.setdefault((a, ()), self.eta[a])
        for q in range(1, order + 1):
            for a, base in enumerate(sp.dependent):
                for deriv in combinations_with_replacement(sp.independent, q):
                    if (a, deriv) in self._cache:
                        continue
                    v = deriv[-1]
                    prev = self._cache[(a, deriv[:-1])]
                    out = series_total_derivative(prev, v, sp)
                    for j, xj in enumerate(sp.independent):
                        term = series_mul(
                            series_total_derivative(self.xi[j], v, sp),
                            self._u_deriv_series(base, deriv[:-1] + (xj,)))
                        out = series_sub(out, term)
                    self._cache[(a, deriv)] = out
        if order > self._prolonged:
            self._prolonged = order
        return self

    def _u_deriv_series(self, base: str, deriv: tuple[str, ...]) -> EpsSeries:
        sp = self.space
        return EpsSeries(tuple(ex.jet(base, k, deriv) for k in range(sp.order + 1)))

    def prolongation_coefficient(self, alpha: int, deriv) -> EpsSeries:
        key = (alpha, tuple(sorted(deriv)))
        if key not in self._cache:
            raise CacheMissing(f"prolongation coefficient {key} not computed")
        return self._cache[key]

    # -- action ---------------------------------------------------------------

    def apply(self, s: EpsSeries, order: int) -> EpsSeries:
        """Act on an expansion-series as a first-order operator.

        Coefficient k of the result is sum_l Xi^(order)_(l)[s_(k-l)], the
        partial derivatives with respect to the unexpanded coordinates being
        extracted through the order-0 slots of the expanded ones.
        """
        sp = self.space
        if order > self._prolonged:
            raise CacheMissing(
                f"generator prolonged to {self._prolonged}, apply needs {order}")
        if s.order != sp.order:
            raise ValueError("series order mismatch")
        out = _zero_series(sp)
        for i, v in enumerate(sp.independent):
            d = EpsSeries(tuple(ex.diff(c, ex.sym(v)) for c in s.coeffs))
            out = series_add(out, series_mul(self.xi[i], d))
        for a, base in enumerate(sp.dependent):
            for q in range(order + 1):
                for deriv in combinations_with_replacement(sp.independent, q):
                    slot = ex.jet(base, 0, deriv)
                    d = series_u_partial(s, slot)
                    if all(c == ex.ZERO for c in d.coeffs):
                        continue
                    out = series_add(out, series_mul(self._cache[(a, deriv)], d))
        return out

    def xi_divergence(self) -> EpsSeries:
        """sum_i D_i xi_i as a series."""
        sp = self.space
        out = _zero_series(sp)
        for i, v in enumerate(sp.independent):
            out = series_add(out, series_total_derivative(self.xi[i], v, sp))
        return out

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        from .lang import to_text
        p = self.space.order
        return {
            "xi": [[to_text(self.xi[i][k]) for i in range(self.space.n)]
                   for k in range(p + 1)],
            "eta": [[to_text(self.eta[a][k]) for a in range(self.space.m)]
                    for k in range(p + 1)],
        }

    @classmethod
    def from_json(cls, space: JetSpace, data: dict, language) -> "Generator":
        p = space.order
        xi_rows = [[language.parse(s) for s in row] for row in data["xi"]]
        eta_rows = [[language.parse(s) for s in row] for row in data["eta"]]
        if len(xi_rows) != p + 1 or len(eta_rows) != p + 1:
            raise ValueError("generator matrices need one row per eps order")
        return cls.from_components(space, xi_rows, eta_rows)


def commutator(g1: Generator, g2: Generator) -> Generator:
    """Approximate Lie bracket, truncated at the space's eps order."""
    if g1.space is not g2.space and g1.space != g2.space:
        raise ValueError("commutator needs generators on the same space")
    sp = g1.space
    g1.prolong(0)
    g2.prolong(0)
    xi = tuple(series_sub(g1.apply(g2.xi[i], 0), g2.apply(g1.xi[i], 0))
               for i in range(sp.n))
    eta = tuple(series_sub(g1.apply(g2.eta[a], 0), g2.apply(g1.eta[a], 0))
                for a in range(sp.m))
    return Generator(sp, xi, eta)


def eps_shift(g: Generator, s: int = 1) -> Generator:
    """Multiply a generator by eps^s (series shift with truncation)."""
    return Generator(g.space,
                     tuple(series_shift(x, s) for x in g.xi),
                     tuple(series_shift(e, s) for e in g.eta))
