"""Lie-algebra-valued curves on compact intervals.

A :class:`Curve` couples an exact evaluator (closed-form terms, or an
interpolant for sampled data) with cached samples on a uniform grid.
Picard terms of the Lax equation are built on that grid with the
sixth-order cumulative rule from :mod:`laxpi.quadrature`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import quadrature as quad
from .algebra import Element, get_algebra
from .errors import DescriptorMismatch, DomainViolation, GridMismatch

DEFAULT_GRID = 256
_EDGE = 1e-12


@dataclass(frozen=True)
class Coefficient:
    """Scalar function ``sum c_k t^k + sum c sin(w t) + sum c cos(w t)``."""

    poly: tuple = ()
    sin: tuple = ()
    cos: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(float(c) for c in self.poly))
        object.__setattr__(self, "sin", tuple((float(c), float(w)) for c, w in self.sin))
        object.__setattr__(self, "cos", tuple((float(c), float(w)) for c, w in self.cos))
        if len(self.poly) > 9:
            raise ValueError("polynomial degree is limited to 8")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c in reversed(self.poly):
            out = out * t + c
        for c, w in self.sin:
            out = out + c * np.sin(w * t)
        for c, w in self.cos:
            out = out + c * np.cos(w * t)
        return out

    def derivative(self):
        poly = tuple(k * c for k, c in enumerate(self.poly))[1:]
        sin = tuple((-c * w, w) for c, w in self.cos)
        cos = tuple((c * w, w) for c, w in self.sin)
        return Coefficient(poly, sin, cos)

    def scaled(self, s):
        return Coefficient(tuple(s * c for c in self.poly),
                           tuple((s * c, w) for c, w in self.sin),
                           tuple((s * c, w) for c, w in self.cos))

    @property
    def is_polynomial(self):
        return not self.sin and not self.cos

    def to_dict(self):
        return {"poly": list(self.poly), "sin": [list(p) for p in self.sin],
                "cos": [list(p) for p in self.cos]}


def affine(t0, t1, s0, s1):
    """Coefficient of the affine map sending ``t0 -> s0`` and ``t1 -> s1``."""
    slope = (s1 - s0) / (t1 - t0)
    return Coefficient((s0 - slope * t0, slope))


class Curve:
    """A curve ``[a, b] -> g`` with samples at ``grid_n + 1`` uniform nodes.

    ``func`` maps a 1-d time array to coordinates of shape ``(m, dim)``.
    ``terms`` is the closed-form term list when there is one.
    """

    def __init__(self, algebra, interval, func, grid_n=DEFAULT_GRID, terms=None,
                 samples=None, diagnostics=None, _allow_odd=False):
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise ValueError(f"need a < b, got [{a}, {b}]")
        grid_n = int(grid_n)
        if grid_n < 1 or (grid_n % 2 and not _allow_odd):
            raise ValueError(f"grid_n must be even and positive, got {grid_n}")
        self.algebra = algebra
        self.a, self.b = a, b
        self.grid_n = grid_n
        self.func = func
        self.terms = tuple(terms) if terms is not None else None
        if samples is None:
            samples = np.asarray(func(self.nodes), dtype=float).reshape(grid_n + 1, algebra.dim)
        else:
            samples = np.array(samples, dtype=float)
        samples.setflags(write=False)
        self.samples = samples
        self.diagnostics = dict(diagnostics or {})
        self._cache = {}

    # construction ------------------------------------------------------
    @classmethod
    def from_terms(cls, algebra, interval, terms, grid_n=DEFAULT_GRID):
        terms = tuple((int(k), c) for k, c in terms)
        for k, _ in terms:
            if not 0 <= k < algebra.dim:
                raise ValueError(f"basis index {k} out of range")

        def func(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros(t.shape + (algebra.dim,))
            for k, c in terms:
                out[..., k] += c(t)
            return out

        return cls(algebra, interval, func, grid_n, terms=terms)

    @classmethod
    def constant(cls, X, interval=(0.0, 1.0), grid_n=DEFAULT_GRID):
        """The constant curve ``t -> X``."""
        terms = [(k, Coefficient((c,))) for k, c in enumerate(X.coords) if c != 0.0]
        return cls.from_terms(X.algebra, interval, terms, grid_n)

    @classmethod
    def zero(cls, algebra, interval=(0.0, 1.0), grid_n=DEFAULT_GRID):
        return cls.from_terms(algebra, interval, [], grid_n)

    @classmethod
    def from_function(cls, algebra, interval, f, grid_n=DEFAULT_GRID):
        """Wrap a vectorised ``f(t) -> (m, dim)`` coordinate function."""
        def func(t):
            return np.asarray(f(np.asarray(t, dtype=float)), dtype=float).reshape(-1, algebra.dim)
        return cls(algebra, interval, func, grid_n)

    @classmethod
    def from_samples(cls, algebra, interval, samples, diagnostics=None):
        """Sampled curve; off-grid values come from local Lagrange interpolation."""
        samples = np.array(samples, dtype=float)
        n = samples.shape[0] - 1
        a, b = float(interval[0]), float(interval[1])
        h = (b - a) / n

        def func(t):
            return quad.lagrange_eval(samples, a, h, t)

        return cls(algebra, (a, b), func, n, samples=samples, diagnostics=diagnostics,
                   _allow_odd=True)

    # basic data --------------------------------------------------------
    @property
    def interval(self):
        return (self.a, self.b)

    @property
    def h(self):
        return (self.b - self.a) / self.grid_n

    @property
    def nodes(self):
        return self.a + self.h * np.arange(self.grid_n + 1)

    @property
    def dim(self):
        return self.algebra.dim

    def __call__(self, t):
        """Coordinates at ``t`` (scalar -> ``(dim,)``, array -> ``(m, dim)``)."""
        t_arr = np.asarray(t, dtype=float)
        vals = self.func(np.atleast_1d(t_arr))
        return vals[0] if t_arr.ndim == 0 else vals

    def value(self, t):
        return Element(self.algebra, self(t))

    def sample(self, j):
        return Element(self.algebra, self.samples[j])

    def sup_norm(self):
        return float(np.max(self.algebra.norm(self.samples)))

    def l1_norm(self):
        """``int_a^b ||phi(s)|| ds`` by Simpson on the grid cells."""
        A = self.algebra
        cells = quad.simpson_cells(lambda t: A.norm(self.func(t)), self.nodes)
        return float(np.sum(cells))

    def node_index(self, t, tol=1e-9):
        """Index of grid node ``t`` or ``None``."""
        u = (t - self.a) / self.h
        j = int(round(u))
        if abs(u - j) <= tol and 0 <= j <= self.grid_n:
            return j
        return None

    def compatible(self, other):
        if other.algebra is not self.algebra:
            raise DescriptorMismatch(f"{self.algebra.name} vs {other.algebra.name}")
        if (other.grid_n != self.grid_n or abs(other.a - self.a) > _EDGE
                or abs(other.b - self.b) > _EDGE):
            raise GridMismatch("curves must share interval and grid")

    # arithmetic ----------------------------------------------------------
    def scale(self, s):
        """The curve ``s * phi`` on the same interval."""
        s = float(s)
        if self.terms is not None:
            terms = [(k, c.scaled(s)) for k, c in self.terms]
            return Curve.from_terms(self.algebra, self.interval, terms, self.grid_n)
        f = self.func
        return Curve(self.algebra, self.interval, lambda t: s * f(t), self.grid_n,
                     samples=s * self.samples, _allow_odd=True)

    __rmul__ = scale

    def __mul__(self, s):
        return self.scale(s)

    def __neg__(self):
        return self.scale(-1.0)

    def __add__(self, other):
        self.compatible(other)
        if self.terms is not None and other.terms is not None:
            return Curve.from_terms(self.algebra, self.interval, self.terms + other.terms,
                                    self.grid_n)
        f, g = self.func, other.func
        return Curve(self.algebra, self.interval, lambda t: f(t) + g(t), self.grid_n,
                     samples=self.samples + other.samples, _allow_odd=True)

    def __sub__(self, other):
        return self + (-other)

    def regrid(self, grid_n):
        """Same curve re-sampled from its evaluator on a new grid."""
        return Curve(self.algebra, self.interval, self.func, grid_n, terms=self.terms,
                     _allow_odd=True)

    def restrict(self, s, t):
        """Restriction to ``[s, t]``; keeps the node spacing when both ends
        are grid nodes, otherwise re-grids at roughly the same spacing."""
        if not (self.a - _EDGE <= s < t <= self.b + _EDGE):
            raise DomainViolation(f"[{s}, {t}] not inside [{self.a}, {self.b}]")
        i, j = self.node_index(s), self.node_index(t)
        if i is not None and j is not None:
            samples = self.samples[i:j + 1]
            lo, hi = self.nodes[i], self.nodes[j]
            return Curve(self.algebra, (lo, hi), self.func, j - i, terms=self.terms,
                         samples=samples, _allow_odd=True)
        n = max(2, 2 * int(np.ceil((t - s) / self.h / 2)))
        return Curve(self.algebra, (s, t), self.func, n, terms=self.terms, _allow_odd=True)

    def __repr__(self):
        kind = "terms" if self.terms is not None else "sampled"
        return f"Curve({self.algebra.name}, [{self.a}, {self.b}], n={self.grid_n}, {kind})"

    # serialization -------------------------------------------------------
    def to_spec(self):
        if self.terms is None:
            raise ValueError("only term-list curves can be serialised")
        merged = {}
        for k, c in self.terms:
            d = merged.setdefault(k, {"basis": k, "poly": [], "sin": [], "cos": []})
            p = list(c.poly)
            d["poly"] = [x + y for x, y in zip(d["poly"] + [0.0] * len(p),
                                               p + [0.0] * len(d["poly"]))]
            d["sin"] += [list(x) for x in c.sin]
            d["cos"] += [list(x) for x in c.cos]
        return {"algebra": self.algebra.name, "interval": [self.a, self.b],
                "grid_n": self.grid_n, "terms": [merged[k] for k in sorted(merged)]}


def curve_from_spec(spec, grid_n=None):
    """Build a curve from the JSON-style dict schema."""
    A = get_algebra(spec["algebra"])
    a, b = spec["interval"]
    n = int(grid_n if grid_n is not None else spec.get("grid_n", DEFAULT_GRID))
    terms = []
    for entry in spec.get("terms", []):
        k = entry["basis"]
        if isinstance(k, str):
            k = A.basis_names.index(k)
        terms.append((k, Coefficient(entry.get("poly", ()), entry.get("sin", ()),
                                     entry.get("cos", ()))))
    return Curve.from_terms(A, (a, b), terms, n)


def load_curve(path, grid_n=None):
    with open(path) as fh:
        return curve_from_spec(json.load(fh), grid_n)


# ------------------------------------------------------------------ surgery

def integrate(phi, s, t):
    """``int_s^t phi`` by Simpson's rule on every grid cell (cell midpoints
    from the evaluator).  Additive across grid nodes and antisymmetric."""
    lo, hi = min(s, t), max(s, t)
    if lo < phi.a - _EDGE or hi > phi.b + _EDGE:
        raise DomainViolation(f"[{s}, {t}] not inside [{phi.a}, {phi.b}]")
    if lo == hi:
        return phi.algebra.zero()
    nodes = phi.nodes
    inner = nodes[(nodes > lo + _EDGE) & (nodes < hi - _EDGE)]
    knots = np.concatenate([[lo], inner, [hi]])
    val = quad.simpson_cells(phi.func, knots).sum(axis=0)
    return Element(phi.algebra, val if t >= s else -val)


def cumulative_integral(phi):
    """Node values ``int_a^{t_j} phi`` from the samples."""
    return quad.cumulative(phi.samples, phi.h)


def reverse(phi):
    """The reversed curve ``t -> -phi(a + b - t)``; an involution on samples."""
    a, b, f = phi.a, phi.b, phi.func
    terms = None
    if phi.terms is not None:
        terms = _reverse_terms(phi.terms, a + b)
    out = Curve(phi.algebra, phi.interval, lambda t: -f(a + b - np.asarray(t)), phi.grid_n,
                samples=-phi.samples[::-1], _allow_odd=True)
    out.terms = terms
    return out


def _reverse_terms(terms, c):
    out = []
    for k, co in terms:
        # -p(c - t) expanded in powers of t
        poly = [0.0] * len(co.poly)
        for j, cj in enumerate(co.poly):
            for i in range(j + 1):
                poly[i] -= cj * comb(j, i) * c ** (j - i) * (-1) ** i
        sin, cos = [], []
        for cc, w in co.sin:
            # -sin(w(c - t)) = -sin(wc)cos(wt) + cos(wc)sin(wt)
            cos.append((-cc * np.sin(w * c), w))
            sin.append((cc * np.cos(w * c), w))
        for cc, w in co.cos:
            # -cos(w(c - t)) = -cos(wc)cos(wt) - sin(wc)sin(wt)
            cos.append((-cc * np.cos(w * c), w))
            sin.append((-cc * np.sin(w * c), w))
        out.append((k, Coefficient(poly, sin, cos)))
    return tuple(out)


def reparametrize(phi, rho, interval, grid_n=None, rho_dot=None):
    """The curve ``rho'(t) * phi(rho(t))`` on ``interval``.

    ``rho`` is a :class:`Coefficient` (its derivative is taken exactly) or a
    callable together with ``rho_dot``.
    """
    a2, b2 = float(interval[0]), float(interval[1])
    n = int(grid_n or phi.grid_n)
    if rho_dot is None:
        rho_dot = rho.derivative()
    probe = rho(np.linspace(a2, b2, 4 * n + 1))
    span = phi.b - phi.a
    if probe.min() < phi.a - 1e-12 * span or probe.max() > phi.b + 1e-12 * span:
        raise DomainViolation("reparametrisation leaves the curve's interval")
    f = phi.func
    lo, hi = phi.a, phi.b

    def func(t):
        t = np.asarray(t, dtype=float)
        return rho_dot(t)[:, None] * f(np.clip(rho(t), lo, hi))

    return Curve(phi.algebra, (a2, b2), func, n, _allow_odd=True)


def random_curve(algebra, rng, interval=(0.0, 1.0), amplitude=1.0, grid_n=DEFAULT_GRID,
                 modes=2):
    """Random smooth term-list curve with sup norm at most ``amplitude``."""
    terms = []
    a, b = interval
    for k in range(algebra.dim):
        poly = rng.uniform(-1, 1, size=2)
        sin = [(rng.uniform(-1, 1), rng.uniform(0.5, 4.0)) for _ in range(modes)]
        cos = [(rng.uniform(-1, 1), rng.uniform(0.5, 4.0)) for _ in range(modes)]
        terms.append((k, Coefficient(poly, sin, cos)))
    c = Curve.from_terms(algebra, interval, terms, grid_n)
    fine = np.linspace(a, b, 8 * grid_n + 1)
    sup = float(np.max(algebra.norm(c(fine))))
    return c.scale(amplitude * rng.uniform(0.5, 1.0) / sup)


# ------------------------------------------------------------- Picard terms

def picard_operators(psi, sign, depth):
    """Operator-level Picard terms, shape ``(depth+1, n+1, dim, dim)``.

    ``T+_l(t) = int_a^t ad psi(s) T+_{l-1}(s) ds`` and
    ``T-_l(t) = -int_a^t T-_{l-1}(s) ad psi(s) ds``, with ``T_0 = id``.
    """
    A = psi.algebra
    n1, d = psi.grid_n + 1, A.dim
    ads = A.ad(psi.samples)
    out = np.empty((depth + 1, n1, d, d))
    out[0] = np.eye(d)
    for ell in range(1, depth + 1):
        if sign > 0:
            integrand = ads @ out[ell - 1]
        else:
            integrand = -(out[ell - 1] @ ads)
        out[ell] = quad.cumulative(integrand, psi.h)
    return out


@dataclass(frozen=True, eq=False)
class PicardTermTable:
    base: Curve
    seed: Element
    sign: int
    depth: int
    values: np.ndarray = field(repr=False)

    def term(self, ell, j):
        return Element(self.base.algebra, self.values[ell, j])

    def partial_sum(self, upto=None):
        upto = self.depth if upto is None else upto
        return self.values[:upto + 1].sum(axis=0)


def picard_terms(psi, X, sign, L):
    """Table of ``T(+/-)_{l,psi}[X](t_j)`` for ``l <= L`` on the curve grid."""
    if L < 0:
        raise ValueError("depth must be non-negative")
    if X.algebra is not psi.algebra:
        raise DescriptorMismatch("seed and curve live in different algebras")
    sign = 1 if sign in (1, "+", "plus") else -1
    ops = picard_operators(psi, sign, L)
    vals = ops @ X.coords
    vals.setflags(write=False)
    return PicardTermTable(psi, X, sign, L, vals)
