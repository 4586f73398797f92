"""Toric test configurations.

Path A describes a degeneration by a convex piecewise linear function f on the
moment polytope.  Path B describes it by a monomial flag ideal
I_0 + t I_1 + ... + (t^N) on X x C and builds the fan of the normalized blow-up
of X x P^1 along it.  `config_to_flag` and `BlowupModel.to_config` go back and
forth between the two.

Monomial generators are Cox exponent vectors (one entry per ray of X): the
vector A stands for the ideal sheaf O(-sum A_rho D_rho).  On projective space
these are the usual homogeneous monomials.
"""

from fractions import Fraction
from itertools import combinations
from math import ceil, comb, factorial, lcm

from .errors import (CeilingTooLow, KstabError, NestingViolation, NonIntegralSlopes,
                     NonSmoothAmbient, TrivialFlag)
from .geometry import (PLConvexFunction, RationalPolytope, affine_rank, denominator_lcm,
                       dot, eval_polynomial, fit_polynomial, frac)
from .toric import (Fan, NewtonPolyhedron, PolarizedToric, ToricDivisor, canonical_divisor,
                    is_ample, is_nef, nef_polytope, nef_shift)


class ToricTestConfig:
    """(X, L^r) degenerated along f, with lifted polytope {0 <= t <= C - f}."""

    def __init__(self, base, f, ceiling, r=1):
        self.base = base
        self.f = f
        self.ceiling = frac(ceiling)
        self.r = int(r)

    @property
    def n(self):
        return self.base.dim

    @property
    def trivial(self):
        return self.f.is_constant()

    def scaled_function(self):
        """F(y) = r f(y / r) on r P."""
        return self.f.scaled(self.r)

    def lifted_polytope(self):
        n = self.n
        hs = [(a + (0,), b) for a, b in self.base.moment_polytope.halfspaces]
        hs.append(((0,) * n + (1,), 0))
        for g, c in self.f.pieces:
            hs.append((tuple(-x for x in g) + (-1,), c - self.ceiling))
        return RationalPolytope(hs, dim_ambient=n + 1)

    def sampling_step(self):
        """m such that the counting functions are polynomial on k in m Z."""
        pts = []
        for y, val in self.scaled_function().graph_vertices():
            pts.extend(y)
            pts.append(val)
        return denominator_lcm(pts)

    def rescaled(self, r):
        return ToricTestConfig(self.base, self.f, self.ceiling, r)

    def __repr__(self):
        return f"ToricTestConfig({self.base!r}, {self.f!r}, C={self.ceiling}, r={self.r})"


def toric_config(X, f, C, r=1):
    """Validated configuration; f is normalized to min f = 0."""
    if isinstance(X, RationalPolytope):
        X = PolarizedToric.from_polytope(X)
    P = X.moment_polytope
    if not isinstance(f, PLConvexFunction):
        f = PLConvexFunction(f, P)
    if f.domain.vertices != P.vertices:
        raise KstabError("f must be defined on the moment polytope")
    if not X.smooth:
        raise NonSmoothAmbient("only smooth (Delzant) moment polytopes are supported")
    r = int(r)
    if r < 1:
        raise KstabError("r must be a positive integer")
    lo = f.minimum()
    if lo != 0:
        f = f.shifted(-lo)
    C = frac(C)
    if C < f.maximum():
        raise CeilingTooLow(f"ceiling {C} is below max f = {f.maximum()}")
    return ToricTestConfig(X, f, C, r)


def central_components(cfg):
    """(a0_j, b0_j, lambda_j) per linearity cell of f.

    lambda_j is the least weight of component j's affine weight function over
    the whole polytope, which is what the intersection formula for the norm sees."""
    n, r = cfg.n, cfg.r
    verts = cfg.f.domain.vertices
    out = []
    for cell, i in cfg.f.cells():
        g, c = cfg.f.pieces[i]
        a0 = cell.volume() * r ** n
        b0 = -cell.integrate_affine(g, c) * r ** (n + 1)
        lam = -r * max(dot(g, v) + c for v in verts)
        out.append((a0, b0, lam))
    return out


# -- flag ideals --------------------------------------------------------------------

class MonomialFlagIdeal:
    """I_0 + t I_1 + ... + t^{N-1} I_{N-1} + (t^N); levels hold Cox exponent vectors."""

    def __init__(self, N, levels):
        self.N = int(N)
        if self.N < 1:
            raise KstabError("N must be positive")
        levels = [sorted(set(tuple(int(x) for x in A) for A in lev)) for lev in levels]
        if len(levels) > self.N:
            raise KstabError("more levels than N")
        levels += [[] for _ in range(self.N - len(levels))]
        for lev in levels:
            for A in lev:
                if any(x < 0 for x in A):
                    raise KstabError("exponents must be nonnegative")
        self.levels = levels

    def generators(self):
        """(A, j) pairs; the t^N generator has A = None (unit ideal of X)."""
        out = [(A, j) for j, lev in enumerate(self.levels) for A in lev]
        out.append((None, self.N))
        return out

    def local_points(self, cone):
        pts = []
        for A, j in self.generators():
            pts.append(tuple(0 for _ in cone) + (j,) if A is None else tuple(A[i] for i in cone) + (j,))
        return pts

    def is_trivial_syntax(self):
        return all(not lev for lev in self.levels)

    def as_dict(self):
        return {"N": self.N, "levels": [[list(A) for A in lev] for lev in self.levels]}

    def __repr__(self):
        return f"MonomialFlagIdeal(N={self.N}, levels={self.levels})"


def _chart_newton(X, I):
    charts = []
    for ci, cone in enumerate(X.fan.cones):
        charts.append((cone, NewtonPolyhedron(I.local_points(cone), dim=len(cone) + 1)))
    return charts


def check_nesting(X, I):
    for cone in X.fan.cones:
        for j in range(I.N - 1):
            upper = NewtonPolyhedron([tuple(A[i] for i in cone) for A in I.levels[j + 1]] or
                                     [(0,) * len(cone)], dim=len(cone)) if I.levels[j + 1] else None
            for A in I.levels[j]:
                loc = tuple(A[i] for i in cone)
                if upper is None or not upper.contains(loc):
                    raise NestingViolation(f"generator {A} of level {j} is not in level {j + 1}")


def cosupport_cones(X, I):
    """Minimal cones tau whose orbit closures make up V(I_0)."""
    gens = I.levels[0]
    faces = set()
    for c in X.fan.cones:
        for k in range(len(c) + 1):
            faces.update(combinations(c, k))
    vanish = [t for t in faces if all(any(A[i] > 0 for i in t) for A in gens)]
    minimal = [t for t in vanish if not any(set(s) < set(t) for s in vanish)]
    return sorted(minimal, key=lambda t: (len(t), t))


def support_dimension(X, I):
    cones = cosupport_cones(X, I)
    if not cones:
        return -1
    return max(X.dim - len(t) for t in cones)


class BlowupModel:
    """Fan of the normalized blow-up B of X x P^1 along a flag ideal, with the
    divisors used in the intersection formulas."""

    def __init__(self, base, ideal, r, fan, ray_data, kinds, charts):
        self.base = base
        self.ideal = ideal
        self.r = r
        self.fan = fan
        self.ray_data = ray_data      # per ray: ({X ray index: coefficient}, w)
        self.kinds = kinds            # base / zero / infinity / exceptional
        self.charts = charts
        self.n = base.dim
        self._ample = None
        self._order = {}
        E = []
        for i, (lam, w) in enumerate(ray_data):
            E.append(self.order(i))
        self.E = ToricDivisor(fan, E)
        self.L1 = self.pullback(base.L)
        self.L = self.L1 * r
        self.KX = self.pullback(canonical_divisor(base.fan))
        self.F = fan.prime(kinds.index("infinity"))
        self.X0 = ToricDivisor(fan, [max(w, 0) for lam, w in ray_data])
        self.Krel = ToricDivisor(fan, [self._discrepancy(i) if k == "exceptional" else 0
                                       for i, k in enumerate(kinds)])
        self.exceptional = []
        for i, k in enumerate(kinds):
            if k == "exceptional":
                lam, w = ray_data[i]
                self.exceptional.append({"ray": fan.rays[i], "a": self._discrepancy(i),
                                         "b": Fraction(w), "c": self.E.coeffs[i]})
        self.semi_ample = is_nef(self.L - self.E + self.F * ideal.N)

    def _discrepancy(self, i):
        lam, w = self.ray_data[i]
        return sum(lam.values()) + w - 1

    def order(self, i):
        """ord of the flag ideal along ray i (0 on the fibre at infinity)."""
        if i not in self._order:
            lam, w = self.ray_data[i]
            if w < 0:
                val = Fraction(0)
            else:
                val = None
                for cone, newt in self.charts:
                    if set(lam) <= set(cone):
                        y = tuple(lam.get(j, 0) for j in cone) + (w,)
                        val = Fraction(newt.order(y))
                        break
            self._order[i] = val
        return self._order[i]

    def pullback(self, D):
        return ToricDivisor(self.fan, [sum(c * D.coeffs[j] for j, c in lam.items())
                                       for lam, w in self.ray_data])

    @property
    def dim(self):
        return self.n + 1

    # -- intersection numbers on B --------------------------------------------------
    def ample(self):
        if self._ample is None:
            A = self.L1 + self.F
            m = 1
            while not is_ample(A * m - self.E):
                m *= 2
                if m > 1 << 20:
                    raise KstabError("could not find an ample class on the blow-up")
            self._ample = A * m - self.E
        return self._ample

    def _nef_power_dot(self, N, G):
        """N^n . G for nef Cartier N: n! times lattice volumes of faces of P_N."""
        P = nef_polytope(N)
        n = self.n
        total = Fraction(0)
        for rho, g in enumerate(G.coeffs):
            if g == 0:
                continue
            u = self.fan.rays[rho]
            face = [v for v in P.vertices if dot(u, v) == -N.coeffs[rho]]
            if len(face) <= n or affine_rank(face) < n:
                continue
            j = next(k for k, x in enumerate(u) if x != 0)
            proj = RationalPolytope.from_vertices([v[:j] + v[j + 1:] for v in face])
            total += g * proj.volume() / abs(u[j])
        return total * factorial(n)

    def power_dot(self, D, G):
        """D^n . G for a Cartier divisor D and a Weil divisor G on B."""
        H = self.ample()
        s0 = nef_shift(D, H)
        n = self.n
        xs = list(range(s0, s0 + n + 1))
        ys = [self._nef_power_dot(D + H * s, G) for s in xs]
        return eval_polynomial(fit_polynomial(xs, ys), 0)

    def top_power(self, D):
        return self.power_dot(D, D)

    def mixed_dot(self, A, B, s, G):
        """A^s . B^(n-s) . G via the polynomial x -> (xA + B)^n . G."""
        n = self.n
        xs = list(range(n + 1))
        ys = [self.power_dot(A * x + B, G) for x in xs]
        coeffs = fit_polynomial(xs, ys)
        return coeffs[s] / comb(n, s)

    # -- back to Path A ----------------------------------------------------------------
    def degeneration_function(self):
        """g on rP with entering level of the section y equal to ceil(k g(y/k))."""
        pieces = []
        for i, (lam, w) in enumerate(self.ray_data):
            if w <= 0:
                continue
            v = self.fan.rays[i][:self.n]
            c = self.E.coeffs[i]
            psi = self.L.coeffs[i]
            pieces.append((tuple(Fraction(-x, w) for x in v), (c - psi) / w))
        return PLConvexFunction(pieces, self.base.moment_polytope.dilate(self.r))

    def to_config(self):
        g = self.degeneration_function()
        r = self.r
        f = PLConvexFunction([(grad, c / r) for grad, c in g.pieces], self.base.moment_polytope)
        f = f.shifted(-f.minimum())
        return ToricTestConfig(self.base, f, f.maximum(), r)

    def sampling_step(self):
        pts = []
        for y, val in self.degeneration_function().graph_vertices():
            pts.extend(y)
            pts.append(val)
        return denominator_lcm(pts)

    def __repr__(self):
        return f"BlowupModel({self.base!r}, {self.ideal!r}, r={self.r}, exceptional={len(self.exceptional)})"


def flag_blowup(X, I, r=1):
    if not X.smooth:
        raise NonSmoothAmbient("flag ideal blow-ups need a smooth X")
    if any(len(A) != len(X.fan.rays) for lev in I.levels for A in lev):
        raise KstabError("exponent vectors must have one entry per ray of X")
    check_nesting(X, I)
    charts = _chart_newton(X, I)
    n = X.dim
    trivial = all(len(newt.vertices()) == 1 and newt.vertices()[0][:n] == (0,) * n
                  for cone, newt in charts)
    if trivial:
        raise TrivialFlag("the flag ideal is (t^N) up to integral closure: trivial configuration")

    rays = {}
    cones = []

    def add(v, lam, w, kind):
        if v not in rays:
            rays[v] = (lam, w, kind)
        return v

    for i, u in enumerate(X.fan.rays):
        add(tuple(u) + (0,), {i: Fraction(1)}, 0, "base")
    add((0,) * n + (1,), {}, 1, "zero")
    inf = add((0,) * n + (-1,), {}, -1, "infinity")
    for cone, newt in charts:
        basis = [X.fan.rays[i] for i in cone]
        for p in newt.vertices():
            cone_rays_ = []
            for y in newt.normal_cone(p):
                v = tuple(sum(y[k] * basis[k][c] for k in range(n)) for c in range(n)) + (y[n],)
                lam = {cone[k]: Fraction(y[k]) for k in range(n) if y[k]}
                kind = "exceptional"
                if y[n] == 0 and sum(1 for x in y if x) == 1:
                    kind = "base"
                elif y[n] == 1 and not any(y[:n]):
                    kind = "zero"
                cone_rays_.append(add(v, lam, y[n], kind))
            cones.append(cone_rays_)
        cones.append([tuple(X.fan.rays[i]) + (0,) for i in cone] + [inf])

    order = sorted(rays)
    index = {v: k for k, v in enumerate(order)}
    fan = Fan(order, [tuple(sorted(index[v] for v in c)) for c in cones])
    ray_data = [(rays[v][0], rays[v][1]) for v in order]
    kinds = [rays[v][2] for v in order]
    return BlowupModel(X, I, int(r), fan, ray_data, kinds, charts)


# -- the bridge from Path A ----------------------------------------------------------

def required_r(cfg):
    """Smallest multiple of cfg.r making the graph of r f and r L integral."""
    q = cfg.sampling_step()
    q = lcm(q, denominator_lcm([x * cfg.r for x in cfg.base.L.coeffs]))
    return cfg.r * q


def cox_exponent(X, y, r):
    return tuple(dot(y, u) + r * l for u, l in zip(X.fan.rays, X.L.coeffs))


def config_to_flag(cfg):
    """Flag ideal whose normalized blow-up is the configuration, polarized by L^r."""
    need = required_r(cfg)
    if need != cfg.r:
        raise NonIntegralSlopes(f"r = {cfg.r} is too small; use r = {need}", need)
    X, r = cfg.base, cfg.r
    if cfg.trivial:
        return MonomialFlagIdeal(max(1, ceil(cfg.ceiling * r)), [])
    F = cfg.scaled_function()
    pts = F.graph_vertices()
    N = int(max(val for _, val in pts))
    levels = []
    for j in range(N):
        lev = []
        for y, val in pts:
            if val <= j:
                A = cox_exponent(X, y, r)
                lev.append(tuple(int(a) for a in A))
        levels.append(lev)
    return MonomialFlagIdeal(N, levels)


def bridge(cfg):
    """(configuration at the required r, its flag ideal, the blow-up model)."""
    cfg2 = cfg.rescaled(required_r(cfg))
    I = config_to_flag(cfg2)
    return cfg2, I, flag_blowup(cfg2.base, I, cfg2.r)
