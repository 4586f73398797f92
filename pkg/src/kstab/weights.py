"""Exact equivariant weight counting and polynomial interpolation.

h(k), w(k) and w2(k) are computed by listing the lattice points of k r P and
giving each one its C*-weight.  On the progression k = m, 2m, ... they are
polynomials of degree n, n+1, n+2; the fit is made on the first deg+1 samples
and checked exactly on the rest.
"""

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .errors import KRangeExceeded, KstabError, NotPolynomial
from .geometry import dot, eval_polynomial, fit_polynomial
from .testconfig import BlowupModel, ToricTestConfig
from .toric import intersection_number

DEFAULT_KMAX = 96
EXTRA_SAMPLES = 2


def k_cap():
    env = os.environ.get("KSTAB_KMAX")
    return int(env) if env else DEFAULT_KMAX


@dataclass
class SampledSeries:
    samples: list          # (k, h, w, w2) with k increasing
    n: int
    source: str = ""

    def column(self, i):
        return [s[0] for s in self.samples], [s[i] for s in self.samples]


@dataclass
class CoefficientBundle:
    a0: Fraction
    a1: Fraction
    b0: Fraction
    b1: Fraction
    d0: Fraction
    n: int
    a0_hat: Fraction = None
    b0_hat: Fraction = None
    a0_tilde: Fraction = None
    b0_tilde: Fraction = None
    components: list = field(default_factory=list)
    polynomials: dict = field(default_factory=dict)


def count_weights(cfg: ToricTestConfig, k):
    """(h, w, w2) on H^0 of the central fibre at level k."""
    F = cfg.scaled_function()
    pts = cfg.base.moment_polytope.lattice_points(k * cfg.r)
    h = w = w2 = 0
    for u in pts:
        y = tuple(Fraction(x, k) for x in u)
        wt = -ceil(k * F(y))
        w += wt
        w2 += wt * wt
        h += 1
    return h, w, w2


def weight_list(cfg, k):
    F = cfg.scaled_function()
    return [(u, -ceil(k * F(tuple(Fraction(x, k) for x in u))))
            for u in cfg.base.moment_polytope.lattice_points(k * cfg.r)]


def entering_level(model: BlowupModel, a, k):
    """Least j with (a, j) in k Newt(I) in every chart: the t-level where the
    section with Cox exponent a first lies in the integral closure of I^k."""
    j = 0
    for cone, newt in model.charts:
        loc = [a[i] for i in cone]
        for v, h in newt.facets():
            vt = v[-1]
            if vt <= 0:
                continue
            need = Fraction(k * h - dot(v[:-1], loc), vt)
            j = max(j, ceil(need))
    return j


def count_weights_blowup(model: BlowupModel, k):
    """(h, w, w2) from the t-graded pieces of H^0(B, k(rL - E))."""
    X, r = model.base, model.r
    shift = k * model.degeneration_function().minimum()
    if shift.denominator != 1:
        raise KstabError(f"k = {k} is off the sampling progression")
    h = w = w2 = 0
    for u in X.moment_polytope.lattice_points(k * r):
        a = tuple(dot(u, ray) + k * r * l for ray, l in zip(X.fan.rays, X.L.coeffs))
        wt = -entering_level(model, a, k) + int(shift)
        h += 1
        w += wt
        w2 += wt * wt
    return h, w, w2


def sampling_ks(m, n, extra=EXTRA_SAMPLES, kmax=None):
    """k in {m, 2m, ...}: enough for the degree n+2 fit plus held-out checks."""
    kmax = k_cap() if kmax is None else kmax
    count = n + 3 + extra
    ks = [m * i for i in range(1, count + 1)]
    if ks[-1] > kmax:
        raise KRangeExceeded(f"need k up to {ks[-1]} (step {m}) but the cap is {kmax}")
    return ks


def sample(obj, ks=None, kmax=None):
    """SampledSeries for a ToricTestConfig or a BlowupModel."""
    if isinstance(obj, BlowupModel):
        counter, m, n, src = count_weights_blowup, obj.sampling_step(), obj.n, "blowup"
    else:
        counter, m, n, src = count_weights, obj.sampling_step(), obj.n, "config"
    if ks is None:
        ks = sampling_ks(m, n, kmax=kmax)
    return SampledSeries([(k,) + tuple(counter(obj, k)) for k in ks], n, src)


def fit_checked(xs, ys, degree, label="series"):
    """Fit on the first degree+1 points, verify the others exactly."""
    if len(xs) < degree + 1 + EXTRA_SAMPLES:
        raise NotPolynomial(f"{label}: need {degree + 1 + EXTRA_SAMPLES} samples, got {len(xs)}")
    coeffs = fit_polynomial(xs[:degree + 1], ys[:degree + 1])
    for x, y in zip(xs[degree + 1:], ys[degree + 1:]):
        got = eval_polynomial(coeffs, x)
        if got != y:
            raise NotPolynomial(f"{label}: fitted value {got} != sample {y} at k = {x}")
    return coeffs


def coefficient(coeffs, power):
    return coeffs[power] if 0 <= power < len(coeffs) else Fraction(0)


def interpolate(series: SampledSeries, degrees=None):
    n = series.n
    dh, dw, dw2 = degrees or (n, n + 1, n + 2)
    ks, hs = series.column(1)
    _, ws = series.column(2)
    _, w2s = series.column(3)
    ph = fit_checked(ks, hs, dh, "h")
    pw = fit_checked(ks, ws, dw, "w")
    pw2 = fit_checked(ks, w2s, dw2, "w2")
    bundle = CoefficientBundle(
        a0=coefficient(ph, n), a1=coefficient(ph, n - 1),
        b0=coefficient(pw, n + 1), b1=coefficient(pw, n),
        d0=coefficient(pw2, n + 2), n=n,
        polynomials={"h": ph, "w": pw, "w2": pw2})
    if bundle.a0 <= 0:
        raise NotPolynomial("leading Hilbert coefficient is not positive")
    return bundle


def coefficients(obj, kmax=None):
    return interpolate(sample(obj, kmax=kmax))


# -- per-component series ---------------------------------------------------------

def _shift_poly(coeffs, s):
    """Coefficients of p(k + s)."""
    out = [Fraction(0)] * len(coeffs)
    for i, c in enumerate(coeffs):
        # (k + s)^i
        binom = 1
        for j in range(i + 1):
            out[j] += c * binom * Fraction(s) ** (i - j)
            binom = binom * (i - j) // (j + 1)
    return out


def component_counts(cfg, k):
    """Per closed cell P_j: (lattice points of k r P_j, their weights by the cell's own piece)."""
    F = cfg.scaled_function()
    verts = F.domain.vertices
    out = []
    for cell, i in F.cells():
        g, c = F.pieces[i]
        H = W = 0
        for u in cell.lattice_points(k):
            val = dot(g, u) + k * c
            if val.denominator != 1:
                raise KstabError(f"k = {k} is off the sampling progression")
            H += 1
            W -= int(val)
        out.append((H, W, -max(dot(g, v) + c for v in verts)))
    return out


def component_identity(cfg, kmax=None):
    """Per component (a0j, b0j, lambda_j, b~0j) from lattice counts.

    b~0j is the k^n coefficient of W_j(k) - W_j(k-1) - lambda_j H_j(k-1),
    with W_j, H_j the interpolated counts over the closed cell."""
    n = cfg.n
    ks = sampling_ks(cfg.sampling_step(), n, kmax=kmax)
    rows = [component_counts(cfg, k) for k in ks]
    out = []
    for j in range(len(rows[0])):
        Hs = [row[j][0] for row in rows]
        Ws = [row[j][1] for row in rows]
        lam = rows[0][j][2]
        ph = fit_checked(ks, Hs, n, f"H_{j}")
        pw = fit_checked(ks, Ws, n + 1, f"W_{j}")
        pw_prev = _shift_poly(pw, -1)
        ph_prev = _shift_poly(ph, -1)
        diff = [a - b - lam * c for a, b, c in
                zip(pw, pw_prev, ph_prev + [Fraction(0)] * (len(pw) - len(ph_prev)))]
        out.append((coefficient(ph, n), coefficient(pw, n + 1), lam, coefficient(diff, n)))
    return out


def tilde_a0(series):
    """Leading coefficient of h(k) - h(k-1); equals n a0."""
    ks, hs = series.column(1)
    ph = fit_checked(ks, hs, series.n, "h")
    d = [a - b for a, b in zip(ph, _shift_poly(ph, -1))]
    return coefficient(d, series.n - 1)


# -- Hilbert relation for the twist ---------------------------------------------

def hilbert_relation_check(X, L, T, ks=None):
    """(ok, fitted a0_hat, expected a0_hat) for |kP_L| - |P_{kL-T}|."""
    from math import factorial
    n = X.dim
    XL = X.with_polarization(L)
    ks = ks or list(range(1, n + 3 + EXTRA_SAMPLES))
    diffs = []
    for k in ks:
        big = len(L.polytope().lattice_points(k))
        small = len((L * k - T).polytope().lattice_points(1))
        diffs.append(big - small)
    p = fit_checked(ks, diffs, n - 1, "hilbert difference")
    fitted = coefficient(p, n - 1)
    expected = intersection_number([T] + [L] * (n - 1), XL) / factorial(n - 1)
    return fitted == expected, fitted, expected
