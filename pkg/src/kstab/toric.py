"""Toric varieties through their fans: divisors, nefness, intersection numbers,
discrepancies and monomial log canonical thresholds."""

from fractions import Fraction
from itertools import combinations, product
from math import factorial, prod

from .errors import (EmptyIdeal, KstabError, NonCompleteFan, NonSmoothAmbient,
                     NotFullDimensional, NotQCartier, RayOutsideCone)
from .geometry import (RationalPolytope, cone_rays, determinant, dot, frac, fvec,
                       mixed_volume, primitive, rank, solve)


class Fan:
    def __init__(self, rays, cones, complete=True):
        self.rays = [tuple(int(x) for x in r) for r in rays]
        self.dim = len(self.rays[0])
        self.cones = [tuple(sorted(c)) for c in cones]
        self.complete = complete
        for r in self.rays:
            if primitive(r) != r:
                raise KstabError(f"ray {r} is not primitive")

    def __eq__(self, other):
        return (isinstance(other, Fan) and self.rays == other.rays
                and sorted(self.cones) == sorted(other.cones))

    def __hash__(self):
        return hash((tuple(self.rays), tuple(sorted(self.cones))))

    def __repr__(self):
        return f"Fan(rays={self.rays}, cones={self.cones})"

    def is_simplicial(self):
        return all(len(c) == self.dim and rank([self.rays[i] for i in c]) == self.dim
                   for c in self.cones)

    def is_smooth(self):
        return all(len(c) == self.dim and abs(determinant([self.rays[i] for i in c])) == 1
                   for c in self.cones)

    def cone_coordinates(self, v):
        """(cone index, {ray index: coefficient}) for a max cone containing v.

        Only meaningful on simplicial fans."""
        v = fvec(v)
        for ci, c in enumerate(self.cones):
            lam = solve([[self.rays[i][k] for i in c] for k in range(self.dim)], v)
            if lam is not None and all(x >= 0 for x in lam):
                return ci, dict(zip(c, lam))
        raise RayOutsideCone(f"{v} lies in no cone of the fan")

    def divisor(self, coeffs):
        return ToricDivisor(self, coeffs)

    def zero(self):
        return ToricDivisor(self, [0] * len(self.rays))

    def prime(self, i):
        return ToricDivisor(self, [int(j == i) for j in range(len(self.rays))])


class ToricDivisor:
    """Torus-invariant Q-divisor sum d_rho D_rho, stored by ray coefficients."""

    def __init__(self, fan, coeffs):
        self.fan = fan
        self.coeffs = fvec(coeffs)
        if len(self.coeffs) != len(fan.rays):
            raise KstabError("divisor length does not match the fan rays")

    def _check(self, other):
        if other.fan is not self.fan and other.fan != self.fan:
            raise KstabError("divisors live on different fans")

    def __add__(self, other):
        self._check(other)
        return ToricDivisor(self.fan, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return ToricDivisor(self.fan, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return ToricDivisor(self.fan, [-a for a in self.coeffs])

    def __mul__(self, s):
        s = frac(s)
        return ToricDivisor(self.fan, [s * a for a in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ToricDivisor) and self.coeffs == other.coeffs and self.fan == other.fan

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"ToricDivisor({[str(c) for c in self.coeffs]})"

    def cartier_data(self):
        """m_sigma per max cone with <m_sigma, u_rho> = -d_rho on the cone's rays."""
        fan = self.fan
        out = []
        for c in fan.cones:
            m = solve([fan.rays[i] for i in c], [-self.coeffs[i] for i in c])
            if m is None:
                raise NotQCartier(f"no linear functional matches {self} on cone {c}")
            out.append(m)
        return out

    def is_cartier(self):
        try:
            ms = self.cartier_data()
        except NotQCartier:
            return False
        return all(x.denominator == 1 for m in ms for x in m)

    def support_value(self, v):
        """Order of the divisor along the valuation v (linear on each cone)."""
        ci, lam = self.fan.cone_coordinates(v)
        return sum(l * self.coeffs[i] for i, l in lam.items())

    def polytope(self):
        fan = self.fan
        hs = [(u, -d) for u, d in zip(fan.rays, self.coeffs)]
        return RationalPolytope(hs, dim_ambient=fan.dim)


def nef_slack(D):
    """min over (cone, ray) of <m_sigma, u_rho> + d_rho; D is nef iff this is >= 0."""
    fan = D.fan
    if not fan.complete:
        raise NonCompleteFan("nefness is only tested on complete fans")
    ms = D.cartier_data()
    return min(dot(m, u) + d for m in ms for u, d in zip(fan.rays, D.coeffs))


def is_nef(D):
    return nef_slack(D) >= 0


def is_ample(D):
    """Support function strictly convex across every wall."""
    fan = D.fan
    if not fan.complete:
        raise NonCompleteFan("ampleness is only tested on complete fans")
    for c, m in zip(fan.cones, D.cartier_data()):
        for j, (u, d) in enumerate(zip(fan.rays, D.coeffs)):
            s = dot(m, u) + d
            if j in c:
                continue
            if s <= 0:
                return False
    return True


def nef_polytope(D):
    """Polytope of a nef divisor; its vertices are the Cartier data."""
    ms = D.cartier_data()
    P = D.polytope()
    P._vertices = sorted(set(ms))
    return P


def canonical_divisor(fan):
    return ToricDivisor(fan, [-1] * len(fan.rays))


def normal_fan(P):
    if not P.is_full_dimensional():
        raise NotFullDimensional("normal fan needs a full-dimensional polytope")
    facets = P.facets()
    order = sorted(range(len(facets)), key=lambda i: facets[i][0])
    rays = [facets[i][0] for i in order]
    cones = []
    for v in P.vertices:
        cones.append(tuple(k for k, i in enumerate(order) if dot(facets[i][0], v) == facets[i][1]))
    return Fan(rays, cones)


class PolarizedToric:
    """(X, L) with X given by a complete fan and L an ample divisor on it."""

    def __init__(self, fan, L, name=None):
        if not isinstance(L, ToricDivisor):
            L = ToricDivisor(fan, L)
        self.fan = fan
        self.L = L
        self.name = name
        if not fan.complete:
            raise NonCompleteFan("X must be complete")
        if not is_ample(L):
            raise KstabError(f"L = {L} is not ample")
        self.moment_polytope = nef_polytope(L)

    @property
    def dim(self):
        return self.fan.dim

    @property
    def smooth(self):
        return self.fan.is_smooth()

    def divisor(self, coeffs):
        return ToricDivisor(self.fan, coeffs)

    def with_polarization(self, L):
        return PolarizedToric(self.fan, L, self.name)

    @classmethod
    def from_polytope(cls, P, name=None):
        fan = normal_fan(P)
        coeffs = []
        facets = dict(P.facets())
        for u in fan.rays:
            coeffs.append(-facets[u])
        X = cls(fan, coeffs, name)
        return X

    def __repr__(self):
        return f"PolarizedToric({self.name or self.fan}, L={self.L})"


# -- standard smooth fans --------------------------------------------------------

def projective_space_fan(n):
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = list(combinations(range(n + 1), n))
    return Fan(rays, cones)


def product_p1_fan():
    rays = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    return Fan(rays, [(0, 1), (1, 2), (2, 3), (0, 3)])


def hirzebruch_fan(a):
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    return Fan(rays, [(0, 1), (1, 2), (2, 3), (0, 3)])


def product_fan(f1, f2):
    rays = [r + (0,) * f2.dim for r in f1.rays] + [(0,) * f1.dim + r for r in f2.rays]
    off = len(f1.rays)
    cones = [c1 + tuple(off + j for j in c2) for c1 in f1.cones for c2 in f2.cones]
    return Fan(rays, cones)


# -- intersection theory -----------------------------------------------------------

def nef_shift(D, A):
    """Least m in Z>=0 with D + mA nef (A ample)."""
    if is_nef(D):
        return 0
    hi = 1
    while not is_nef(D + A * hi):
        hi *= 2
        if hi > 1 << 40:
            raise KstabError("no nef shift found")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if is_nef(D + A * mid):
            hi = mid
        else:
            lo = mid
    return hi


def intersection_number(divisors, X):
    """D_1 ... D_n on the complete toric X (PolarizedToric).

    Each D_i is split as (D_i + m_i L) - m_i L with both parts nef, the
    product is expanded multilinearly and nef products are n! times mixed
    volumes of their polytopes.
    """
    fan = X.fan
    n = fan.dim
    if len(divisors) != n:
        raise KstabError(f"need {n} divisors, got {len(divisors)}")
    if not fan.complete:
        raise NonCompleteFan("intersection numbers need a complete fan")
    L = X.L
    parts = []
    for D in divisors:
        D.cartier_data()
        m = nef_shift(D, L)
        parts.append((nef_polytope(D + L * m), m))
    PL = nef_polytope(L)
    total = Fraction(0)
    cache = {}
    for choice in product((0, 1), repeat=n):
        coef = prod(-parts[i][1] for i in range(n) if choice[i])
        if coef == 0:
            continue
        polys = [PL if choice[i] else parts[i][0] for i in range(n)]
        key = tuple(sorted(tuple(p.vertices) for p in polys))
        if key not in cache:
            cache[key] = mixed_volume(polys)
        total += coef * cache[key]
    return total * factorial(n)


def self_intersection(D, X):
    return intersection_number([D] * X.dim, X)


def twisted_slope(X, T=None):
    """(-K - 2T).L^{n-1} / L^n computed on X."""
    n = X.dim
    K = canonical_divisor(X.fan)
    T = X.fan.zero() if T is None else T
    num = intersection_number([-K - T * 2] + [X.L] * (n - 1), X)
    den = intersection_number([X.L] * n, X)
    return num / den


def slope_constant(X, T=None):
    """The topological constant n * mu."""
    return X.dim * twisted_slope(X, T)


def is_principal(D):
    """D = div(chi^m) for some rational m, i.e. D is Q-linearly trivial."""
    fan = D.fan
    return solve([list(u) for u in fan.rays], list(D.coeffs)) is not None


def linearly_equivalent(D1, D2):
    return is_principal(D1 - D2)


def discrepancy(v, fan, cone=None):
    """a(v) = sum of the coordinates of v in the basis of its smooth cone, minus 1."""
    if not fan.is_smooth():
        raise NonSmoothAmbient("discrepancy needs a smooth ambient fan")
    v = tuple(v)
    if cone is None:
        ci, lam = fan.cone_coordinates(v)
        cone = fan.cones[ci]
    basis = [fan.rays[i] for i in cone]
    lam = solve([[b[k] for b in basis] for k in range(fan.dim)], v)
    if lam is None or any(x < 0 for x in lam):
        raise RayOutsideCone(f"{v} is not in the cone {cone}")
    return sum(lam) - 1


# -- monomial ideals --------------------------------------------------------------

class NewtonPolyhedron:
    """conv(exponents) + positive orthant."""

    def __init__(self, generators, dim=None):
        gens = sorted(set(tuple(int(x) for x in g) for g in generators))
        if not gens:
            raise EmptyIdeal("ideal has no generators")
        self.generators = gens
        self.dim = len(gens[0]) if dim is None else dim
        self._facets = None

    def facets(self):
        """(v, h) with v >= 0 primitive: the facet inequalities <v, x> >= h."""
        if self._facets is None:
            d = self.dim
            rows = [tuple(int(i == j) for j in range(d)) + (0,) for i in range(d)]
            rows += [tuple(p) + (-1,) for p in self.generators]
            out = []
            for r in cone_rays(rows):
                v, h = r[:d], r[d]
                if any(v):
                    out.append((v, h))
            self._facets = sorted(out)
        return self._facets

    def order(self, v):
        return min(dot(v, p) for p in self.generators)

    def contains(self, x):
        return all(dot(v, x) >= h for v, h in self.facets())

    def vertices(self):
        fs = self.facets()
        return [p for p in self.generators
                if rank([v for v, h in fs if dot(v, p) == h]) == self.dim]

    def normal_cone(self, p):
        """Rays of the cone of weights minimized at the vertex p."""
        return [v for v, h in self.facets() if dot(v, p) == h]

    def is_unit(self):
        return (0,) * self.dim in self.generators


def lct_newton(N):
    """sup{c : (1,...,1) in c*N}; None for the unit ideal (no constraint)."""
    best = None
    for v, h in N.facets():
        if h > 0:
            c = Fraction(sum(v), h)
            best = c if best is None or c < best else best
    return best
