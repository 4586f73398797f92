"""Exact rational convex geometry.

Everything here works over `fractions.Fraction` and plain ints.  Polytopes
carry both an H-representation (halfspaces <a, x> >= b) and a V-representation;
whichever is missing is computed by double description.  Sizes are desk scale:
ambient dimension <= 4 and a few dozen halfspaces.
"""

from fractions import Fraction
from functools import reduce
from itertools import combinations, product
from math import ceil, factorial, floor, gcd, lcm

from .errors import DegeneratePiece, DimensionMismatch, UnboundedInput


def frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def fvec(xs):
    return tuple(frac(x) for x in xs)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def denominator_lcm(xs):
    return lcm(1, *(frac(x).denominator for x in xs))


def primitive(vec):
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    den = denominator_lcm(vec)
    ints = [int(frac(c) * den) for c in vec]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(i // g for i in ints)


# -- linear algebra over Q ---------------------------------------------------

def row_reduce(rows):
    """Reduced row echelon form; returns (rref rows, pivot columns)."""
    m = [list(map(frac, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    return len(row_reduce(rows)[1]) if rows else 0


def affine_rank(points):
    if not points:
        return -1
    p0 = points[0]
    return rank([[x - y for x, y in zip(p, p0)] for p in points[1:]]) if len(points) > 1 else 0


def nullspace(rows, ncols):
    """Basis of {x : rows . x = 0}."""
    red, piv = row_reduce(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in zip(red, piv):
            v[pc] = -r[fc]
        basis.append(tuple(v))
    return basis


def solve(rows, rhs):
    """Unique solution of rows . x = rhs, or None if inconsistent or underdetermined."""
    ncols = len(rows[0])
    aug = [list(r) + [frac(b)] for r, b in zip(rows, rhs)]
    red, piv = row_reduce(aug)
    if ncols in piv or len(piv) < ncols:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in zip(red, piv):
        x[pc] = r[-1]
    return tuple(x)


def determinant(rows):
    m = [list(map(frac, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


# -- double description ------------------------------------------------------

def cone_rays(rows):
    """Extreme rays (primitive integer vectors) of the pointed cone {y : <a, y> >= 0}.

    Raises UnboundedInput when the cone contains a line.
    """
    rows = [primitive(r) for r in rows if any(frac(x) != 0 for x in r)]
    rows = list(dict.fromkeys(rows))
    if not rows:
        raise UnboundedInput("no constraints")
    d = len(rows[0])
    basis, rest = [], []
    for i, r in enumerate(rows):
        if len(basis) < d and rank([rows[j] for j in basis] + [r]) == len(basis) + 1:
            basis.append(i)
        else:
            rest.append(i)
    if len(basis) < d:
        raise UnboundedInput("cone has a nontrivial lineality space")

    # columns of B^{-1} are the rays of the simplicial starting cone
    rays = []
    B = [rows[i] for i in basis]
    for j in range(d):
        e = [0] * d
        e[j] = 1
        col = solve(B, e)
        z = 0
        for k in range(d):
            if k != j:
                z |= 1 << basis[k]
        rays.append((primitive(col), z))

    for i in rest:
        a = rows[i]
        bit = 1 << i
        vals = [dot(a, r) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new = [(r, z | bit) if vals[k] == 0 else (r, z)
               for k, (r, z) in enumerate(rays) if vals[k] >= 0]
        for p in pos:
            zp = rays[p][1]
            for q in neg:
                common = zp & rays[q][1]
                if bin(common).count("1") < d - 2:
                    continue
                if any(k != p and k != q and (rays[k][1] & common) == common
                       for k in range(len(rays))):
                    continue
                vp, vq = vals[p], vals[q]
                r = tuple(vp * y - vq * x for x, y in zip(rays[p][0], rays[q][0]))
                new.append((primitive(r), common | bit))
        rays = new
    out = sorted(set(r for r, _ in rays))
    return out


# -- polytopes ----------------------------------------------------------------

class RationalPolytope:
    """Bounded rational polytope {x : <a_i, x> >= b_i} with cached vertices."""

    def __init__(self, halfspaces, vertices=None, dim_ambient=None):
        hs = []
        for a, b in halfspaces:
            a, b = fvec(a), frac(b)
            if all(x == 0 for x in a):
                if b > 0:
                    # infeasible constraint 0 >= b: keep a canonical empty marker
                    hs.append((a, b))
                continue
            hs.append((a, b))
        if dim_ambient is None:
            if hs:
                dim_ambient = len(hs[0][0])
            elif vertices:
                dim_ambient = len(vertices[0])
            else:
                raise DimensionMismatch("cannot infer ambient dimension")
        self.dim_ambient = dim_ambient
        self.halfspaces = hs
        self._vertices = None if vertices is None else sorted(set(fvec(v) for v in vertices))
        self._volcen = None

    # constructors
    @classmethod
    def from_vertices(cls, points):
        points = sorted(set(fvec(p) for p in points))
        if not points:
            raise DimensionMismatch("empty point set")
        hs = hull_halfspaces(points)
        d = len(points[0])
        verts = [p for p in points
                 if rank([a for a, b in hs if dot(a, p) == b]) == d]
        return cls(hs, verts, d)

    @classmethod
    def box(cls, lows, highs):
        d = len(lows)
        hs = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            hs.append((tuple(e), lows[i]))
            hs.append((tuple(-x for x in e), -frac(highs[i])))
        return cls(hs)

    @classmethod
    def simplex(cls, d, scale=1):
        hs = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            hs.append((tuple(e), 0))
        hs.append((tuple([-1] * d), -frac(scale)))
        return cls(hs)

    @property
    def vertices(self):
        if self._vertices is None:
            self._vertices = vertex_enumeration(self)
        return self._vertices

    def is_empty(self):
        return not self.vertices

    def dimension(self):
        return affine_rank(self.vertices)

    def is_full_dimensional(self):
        return self.dimension() == self.dim_ambient

    def contains(self, x):
        x = fvec(x)
        return all(dot(a, x) >= b for a, b in self.halfspaces)

    def dilate(self, k):
        k = frac(k)
        verts = None if self._vertices is None else [tuple(k * c for c in v) for v in self._vertices]
        return RationalPolytope([(a, k * b) for a, b in self.halfspaces], verts, self.dim_ambient)

    def translate(self, t):
        t = fvec(t)
        verts = None if self._vertices is None else [tuple(x + y for x, y in zip(v, t)) for v in self._vertices]
        return RationalPolytope([(a, b + dot(a, t)) for a, b in self.halfspaces], verts, self.dim_ambient)

    def intersect(self, extra):
        return RationalPolytope(list(self.halfspaces) + list(extra), None, self.dim_ambient)

    def facets(self):
        """Irredundant halfspaces, one per facet, as (primitive normal, offset)."""
        verts = self.vertices
        d = self.dim_ambient
        out = {}
        for a, b in self.halfspaces:
            tight = frozenset(i for i, v in enumerate(verts) if dot(a, v) == b)
            if len(tight) < d or tight in out:
                continue
            if affine_rank([verts[i] for i in tight]) != d - 1:
                continue
            den = denominator_lcm(list(a) + [b])
            ai = [int(x * den) for x in a]
            g = reduce(gcd, ai, 0)
            out[tight] = (tuple(x // g for x in ai), b * den / g)
        return sorted(out.values())

    def volume(self):
        return self._volume_centroid()[0]

    def centroid(self):
        return self._volume_centroid()[1]

    def integrate_affine(self, grad, const):
        vol, cen = self._volume_centroid()
        if vol == 0:
            return Fraction(0)
        return vol * (dot(fvec(grad), cen) + frac(const))

    def _volume_centroid(self):
        if self._volcen is None:
            self._volcen = _vol_centroid(self.vertices, self.halfspaces, self.dim_ambient)
        return self._volcen

    def lattice_points(self, k=1):
        return lattice_points(self, k)

    def __eq__(self, other):
        return isinstance(other, RationalPolytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(tuple(self.vertices))

    def __repr__(self):
        return f"RationalPolytope(vertices={[tuple(str(c) for c in v) for v in self.vertices]})"


def vertex_enumeration(p):
    """Exact vertex set of a bounded H-polytope, lexicographically sorted."""
    d = p.dim_ambient
    if any(all(x == 0 for x in a) and b > 0 for a, b in p.halfspaces):
        return []
    rows = [(-b,) + tuple(a) for a, b in p.halfspaces]
    rows.append((1,) + (0,) * d)
    if rank([a for a, _ in p.halfspaces]) < d:
        raise UnboundedInput("polytope has a nontrivial recession cone")
    rays = cone_rays(rows)
    verts = []
    for r in rays:
        if r[0] == 0:
            raise UnboundedInput("polytope is unbounded")
        verts.append(tuple(Fraction(x, r[0]) for x in r[1:]))
    return sorted(set(verts))


def hull_halfspaces(points):
    """Halfspaces of conv(points); equalities appear as opposite pairs."""
    d = len(points[0])
    rows = [tuple(p) + (Fraction(-1),) for p in points]
    eqs = nullspace(rows, d + 1)        # (a, b) with <a,p> = b for all p
    hs = []
    for e in eqs:
        e = primitive(e)
        hs.append((e[:d], e[d]))
        hs.append((tuple(-x for x in e[:d]), -e[d]))
    # restrict (a, b) to the orthogonal complement of the equalities so the
    # cone of valid inequalities is pointed
    comp = nullspace([tuple(e) for e in eqs], d + 1) if eqs else [
        tuple(Fraction(int(i == j)) for j in range(d + 1)) for i in range(d + 1)]
    W = comp
    cone = [tuple(dot(row, w) for w in W) for row in rows]
    for z in cone_rays(cone):
        ab = [sum(z[i] * W[i][c] for i in range(len(W))) for c in range(d + 1)]
        ab = primitive(ab)
        a, b = ab[:d], ab[d]
        if all(x == 0 for x in a):
            continue
        hs.append((a, b))
    return hs


def _vol_centroid(verts, hs, d):
    """(volume, centroid) by pyramids from one vertex over the facets."""
    if not verts:
        return Fraction(0), None
    if d == 0:
        return Fraction(1), ()
    if d == 1:
        lo, hi = min(v[0] for v in verts), max(v[0] for v in verts)
        return hi - lo, ((lo + hi) / 2,)
    if affine_rank(verts) < d:
        return Fraction(0), None
    p0 = verts[0]
    total = Fraction(0)
    moment = [Fraction(0)] * d
    seen = set()
    for a, b in hs:
        h = dot(a, p0) - b
        if h == 0:
            continue
        tight = [v for v in verts if dot(a, v) == b]
        key = frozenset(tight)
        if len(tight) < d or key in seen:
            continue
        seen.add(key)
        j = next(i for i, x in enumerate(a) if x != 0)
        aj = a[j]
        proj = [v[:j] + v[j + 1:] for v in tight]
        phs = []
        for a2, b2 in hs:
            c = a2[j] / aj
            na = tuple(a2[k] - c * a[k] for k in range(d) if k != j)
            if all(x == 0 for x in na):
                continue
            phs.append((na, b2 - c * b))
        fv, fc = _vol_centroid(sorted(set(proj)), phs, d - 1)
        if fv == 0:
            continue
        pyr = h * fv / (d * abs(aj))
        xj = (b - sum(a[k] * fc[k if k < j else k - 1] for k in range(d) if k != j)) / aj
        lifted = fc[:j] + (xj,) + fc[j:]
        cen = [p0[i] + Fraction(d, d + 1) * (lifted[i] - p0[i]) for i in range(d)]
        total += pyr
        for i in range(d):
            moment[i] += pyr * cen[i]
    if total == 0:
        return Fraction(0), None
    return total, tuple(m / total for m in moment)


def volume(p):
    return p.volume()


def minkowski_sum(polys):
    d = polys[0].dim_ambient
    pts = [tuple([Fraction(0)] * d)]
    for q in polys:
        pts = list({tuple(x + y for x, y in zip(a, b)) for a in pts for b in q.vertices})
    return RationalPolytope.from_vertices(pts)


def mixed_volume(ps):
    """Mixed volume normalized so MV(P, ..., P) = vol(P); inclusion-exclusion."""
    n = len(ps)
    if any(p.dim_ambient != n for p in ps):
        raise DimensionMismatch(f"need {n} polytopes in dimension {n}")
    if any(p.is_empty() for p in ps):
        return Fraction(0)
    cache = {}
    total = Fraction(0)
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            key = tuple(sorted(tuple(ps[i].vertices) for i in S))
            if key not in cache:
                cache[key] = minkowski_sum([ps[i] for i in S]).volume()
            total += (-1) ** (n - size) * cache[key]
    return total / factorial(n)


def _integral_halfspaces(p):
    out = []
    for a, b in p.halfspaces:
        den = denominator_lcm(list(a) + [b])
        out.append((tuple(int(x * den) for x in a), b * den))
    return out


def lattice_points(p, k=1):
    """Integer points of k*P in lexicographic order (bounding-box scan)."""
    verts = p.vertices
    if not verts:
        return []
    k = frac(k)
    d = p.dim_ambient
    lo = [ceil(min(v[i] for v in verts) * k) for i in range(d)]
    hi = [floor(max(v[i] for v in verts) * k) for i in range(d)]
    hs = [(a, b * k) for a, b in _integral_halfspaces(p)]
    pts = []
    for x in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        if all(sum(ai * xi for ai, xi in zip(a, x)) >= b for a, b in hs):
            pts.append(x)
    return pts


# -- piecewise linear convex functions ----------------------------------------

class PLConvexFunction:
    """f(x) = max_i (<g_i, x> + c_i) on a polytope domain."""

    def __init__(self, pieces, domain, prune=True):
        self.domain = domain
        pcs = []
        for g, c in pieces:
            g, c = fvec(g), frac(c)
            if len(g) != domain.dim_ambient:
                raise DimensionMismatch("piece gradient has wrong length")
            pcs.append((g, c))
        pcs = sorted(set(pcs))
        if prune:
            pcs = [pc for i, pc in enumerate(pcs) if _cell(pcs, i, domain).is_full_dimensional()]
        if not pcs:
            raise DegeneratePiece("no piece is active on the domain")
        self.pieces = pcs
        self._cells = None

    def __call__(self, x):
        x = fvec(x)
        return max(dot(g, x) + c for g, c in self.pieces)

    def cells(self):
        if self._cells is None:
            self._cells = regular_subdivision(self).cells
        return self._cells

    def is_affine(self):
        return len(self.pieces) == 1

    def is_constant(self):
        return len(self.pieces) == 1 and all(x == 0 for x in self.pieces[0][0])

    def graph_vertices(self):
        """Distinct (x, f(x)) for x a vertex of some linearity cell."""
        pts = set()
        for cell, i in self.cells():
            g, c = self.pieces[i]
            for v in cell.vertices:
                pts.add((v, dot(g, v) + c))
        return sorted(pts)

    def minimum(self):
        return min(val for _, val in self.graph_vertices())

    def maximum(self):
        return max(val for _, val in self.graph_vertices())

    def shifted(self, s):
        s = frac(s)
        return PLConvexFunction([(g, c + s) for g, c in self.pieces], self.domain)

    def normalized(self):
        return self.shifted(-self.minimum())

    def scaled(self, r):
        """y -> r f(y / r) on r * domain."""
        r = frac(r)
        return PLConvexFunction([(g, r * c) for g, c in self.pieces], self.domain.dilate(r))

    def integral(self):
        return sum(cell.integrate_affine(*self.pieces[i]) for cell, i in self.cells())

    @classmethod
    def from_cells(cls, cells, domain):
        """Build from explicit (polytope, (g, c)) cells; checks convexity."""
        from .errors import NotConvex
        pieces = [(fvec(g), frac(c)) for _, (g, c) in cells]
        for cell, (g, c) in zip((c for c, _ in cells), pieces):
            for v in cell.vertices:
                own = dot(g, v) + c
                if any(dot(h, v) + e > own for h, e in pieces):
                    raise NotConvex(f"piece {tuple(map(str, g))} is dominated inside its own cell")
        return cls(pieces, domain)

    def __repr__(self):
        return "PLConvexFunction(max of %s)" % ", ".join(
            f"<{','.join(map(str, g))}>x+{c}" for g, c in self.pieces)


def _cell(pieces, i, domain):
    g, c = pieces[i]
    extra = []
    for j, (h, e) in enumerate(pieces):
        if j != i:
            extra.append((tuple(x - y for x, y in zip(g, h)), e - c))
    return domain.intersect(extra)


class Subdivision:
    def __init__(self, cells):
        self.cells = cells

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


def regular_subdivision(f):
    """Linearity cells of f, one per affine piece."""
    cells = []
    for i in range(len(f.pieces)):
        cell = _cell(f.pieces, i, f.domain)
        if not cell.is_full_dimensional():
            raise DegeneratePiece(f"piece {i} is active only on a measure-zero set")
        cells.append((cell, i))
    return Subdivision(cells)


def fit_polynomial(xs, ys):
    """Coefficients c_0..c_{d} (lowest first) of the polynomial through the points."""
    d = len(xs) - 1
    rows = [[frac(x) ** i for i in range(d + 1)] for x in xs]
    sol = solve(rows, ys)
    if sol is None:
        raise DimensionMismatch("interpolation nodes must be distinct")
    return list(sol)


def eval_polynomial(coeffs, x):
    x = frac(x)
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
