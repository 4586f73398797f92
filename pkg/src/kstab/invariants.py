"""Stability invariants of toric test configurations, computed two ways.

The coefficient route interpolates h, w, w2 from weight counts.  The
intersection route works on the blow-up model B: with the normalization
constant c_n = 2 n!,

    DF = [n/(n+1) mu (L - E)^(n+1) + (L - E)^n (K_X + 2T + K_rel)] / c_n
    ||X||_m = (L - E)^n (L + nE) / ((n+1) n!)

where L is the pulled back polarization L^r and mu is the twisted slope of L^r.
The two routes are reconciled exactly.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import (CrossCheckFailure, KstabError, MissingComponents, NotInLinearSystem,
                     NotInvariant, NotSemiAmple, TrivialConfiguration)
from .testconfig import (BlowupModel, ToricTestConfig, bridge, central_components,
                         cosupport_cones, support_dimension)
from .toric import ToricDivisor, linearly_equivalent, twisted_slope
from .weights import coefficients, component_identity, sample, interpolate, tilde_a0


def dimension_constant(n):
    return 2 * factorial(n)


# -- coefficient route ----------------------------------------------------------------

def df_untwisted(c):
    return (c.b0 * c.a1 - c.b1 * c.a0) / c.a0


def l2_norm(c):
    return c.d0 - c.b0 ** 2 / c.a0


def min_norm_components(components):
    if not components:
        raise MissingComponents("component route needs Path A cell data")
    return sum((b - lam * a for a, b, lam in components), Fraction(0))


def min_norm_identity(a0, b0, a0_tilde, b0_tilde):
    """(b~0 a0 - b0 a~0) / a0."""
    if b0_tilde is None or a0_tilde is None:
        raise MissingComponents("identity route needs b~0 and a~0")
    return (b0_tilde * a0 - b0 * a0_tilde) / a0


def min_norm(source, route="components"):
    """Minimum norm by one route: 'components' (list of (a0j, b0j, lambda_j)),
    'identity' (CoefficientBundle with tilde fields) or 'intersection' / 'J_L'
    (BlowupModel)."""
    if route == "components":
        return min_norm_components(source)
    if route == "identity":
        return min_norm_identity(source.a0, source.b0, source.a0_tilde, source.b0_tilde)
    if route == "intersection":
        return min_norm_intersection(source)
    if route == "J_L":
        return j_functional(source, source.base.L * source.r)
    raise KstabError(f"unknown min_norm route {route!r}")


# -- intersection route ---------------------------------------------------------------

def _require_semi_ample(model):
    if not model.semi_ample:
        raise NotSemiAmple("rL - E is not relatively semi-ample on the blow-up")


def df_intersection_raw(model: BlowupModel, T=None):
    """The intersection expression before dividing by c_n."""
    _require_semi_ample(model)
    X, n = model.base, model.n
    T = X.fan.zero() if T is None else T
    mu = twisted_slope(X.with_polarization(X.L * model.r), T)
    D = model.L - model.E
    G = model.KX + model.pullback(T) * 2 + model.Krel
    return Fraction(n, n + 1) * mu * model.top_power(D) + model.power_dot(D, G)


def df_twisted_intersection(model, T=None):
    return df_intersection_raw(model, T) / dimension_constant(model.n)


def j_functional(model, T):
    return df_twisted_intersection(model, T) - df_twisted_intersection(model, None)


def min_norm_intersection(model):
    _require_semi_ample(model)
    n = model.n
    D = model.L - model.E
    return model.power_dot(D, model.L + model.E * n) / ((n + 1) * factorial(n))


def calibrate_constant(pairs):
    """Common ratio raw / df over pairs with df != 0; CrossCheckFailure if they differ."""
    ratios = set()
    for df, raw in pairs:
        if df == 0:
            if raw != 0:
                raise CrossCheckFailure(f"DF is 0 but the intersection expression is {raw}")
            continue
        ratios.add(raw / df)
    if len(ratios) > 1:
        raise CrossCheckFailure(f"no single normalization constant: {sorted(ratios)}")
    return ratios.pop() if ratios else None


def strict_transform_difference(model, D):
    """pi^* D - (strict transform of D x P^1): lives on exceptional rays only."""
    coeffs = []
    for (lam, w), kind in zip(model.ray_data, model.kinds):
        coeffs.append(sum(c * D.coeffs[j] for j, c in lam.items()) if kind == "exceptional" else 0)
    return ToricDivisor(model.fan, coeffs)


def _check_log_divisor(X, D, T):
    if not isinstance(D, ToricDivisor):
        raise NotInvariant("the log divisor must be torus invariant")
    if any(c < 0 for c in D.coeffs):
        raise NotInLinearSystem("the log divisor must be effective")
    if not linearly_equivalent(D, T * 2):
        raise NotInLinearSystem("the log divisor is not in |2T|")


def df_log(model, T, D):
    """Log DF: twisted DF minus (L - E)^n (2T - strict transform of D x P^1) / c_n."""
    X = model.base
    _check_log_divisor(X, D, T)
    tw = df_twisted_intersection(model, T)
    G = model.pullback(T) * 2 - (model.pullback(D) - strict_transform_difference(model, D))
    return tw - model.power_dot(model.L - model.E, G) / dimension_constant(model.n)


def contained_components(model, D):
    """Components V(tau) of the cosupport of I_0 that lie inside D."""
    out = []
    for tau in cosupport_cones(model.base, model.ideal):
        if any(D.coeffs[i] > 0 for i in tau):
            out.append(tau)
    return out


def s_coefficient(model):
    """L^s . (-E)^(n-s) . K_rel with s the dimension of the support of I_0."""
    s = support_dimension(model.base, model.ideal)
    if not model.exceptional or s < 0:
        return Fraction(0), s
    return model.mixed_dot(model.L, -model.E, s, model.Krel), s


def uniform_margin(df, norm):
    if norm == 0:
        raise TrivialConfiguration("uniform margin is undefined when the minimum norm is 0")
    return df / norm


# -- reports --------------------------------------------------------------------------

@dataclass
class InvariantReport:
    df_untwisted: Fraction
    min_norm: Fraction
    l2_norm: Fraction
    slope: Fraction
    df_twisted: Fraction = None
    df_log: Fraction = None
    min_norm_routes: dict = field(default_factory=dict)
    uniform_margin: Fraction = None
    provenance: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        keys = ["df_untwisted", "df_twisted", "df_log", "min_norm", "min_norm_routes",
                "l2_norm", "slope", "uniform_margin", "provenance", "warnings", "extras"]
        return {k: getattr(self, k) for k in keys}


def _agree(values, what):
    vals = {v for v in values.values() if v is not None}
    if len(vals) > 1:
        raise CrossCheckFailure(f"{what} routes disagree: {values}")
    return vals.pop()


def _finish(rep, T, twisted_given):
    if (rep.min_norm == 0) != (rep.l2_norm == 0):
        raise CrossCheckFailure(f"min_norm = {rep.min_norm} but l2_norm = {rep.l2_norm}")
    if rep.min_norm < 0 or rep.l2_norm < 0:
        raise CrossCheckFailure("negative norm")
    df = rep.df_twisted if twisted_given else rep.df_untwisted
    if rep.min_norm > 0 and df is not None:
        rep.uniform_margin = uniform_margin(df, rep.min_norm)
    else:
        rep.warnings.append("trivial configuration: minimum norm is 0")
    return rep


def _model_block(model, T, D, scale_to, rep):
    """Fill intersection-route values, rescaled from the model's r to scale_to."""
    n = model.n
    s = Fraction(scale_to, model.r)
    raw0 = df_intersection_raw(model, None)
    df0 = raw0 / dimension_constant(n) * s ** n
    if df0 != rep.df_untwisted:
        raise CrossCheckFailure(f"intersection DF {df0} != coefficient DF {rep.df_untwisted}")
    rep.extras["df_intersection_raw"] = raw0 * s ** n
    rep.df_twisted = df_twisted_intersection(model, T) * s ** n
    rep.provenance["df_twisted"] = "intersection"
    rep.min_norm_routes["intersection"] = min_norm_intersection(model) * s ** (n + 1)
    rep.min_norm_routes["J_L"] = j_functional(model, model.base.L * model.r) * s ** (n + 1)
    if D is not None:
        rep.df_log = df_log(model, T, D) * s ** n
        rep.provenance["df_log"] = "intersection"
        rep.extras["log_contained_components"] = [list(t) for t in contained_components(model, D)]


def evaluate_config(cfg: ToricTestConfig, T=None, D=None, kmax=None):
    """Report for a Path A configuration, cross-checked against its bridged blow-up."""
    X, n = cfg.base, cfg.n
    Tz = X.fan.zero() if T is None else T
    series = sample(cfg, kmax=kmax)
    c = interpolate(series)
    comps = central_components(cfg)
    ident = component_identity(cfg, kmax=kmax)
    for (a, b, lam), (a2, b2, lam2, bt) in zip(comps, ident):
        if (a, b, lam) != (a2, b2, lam2):
            raise CrossCheckFailure(f"component data {(a, b, lam)} vs lattice counts {(a2, b2, lam2)}")
        if bt != (n + 1) * b - lam * a:
            raise CrossCheckFailure(f"b~0j = {bt} breaks (n+1) b0j - lambda_j a0j")
    c.components = comps
    c.b0_tilde = sum((row[3] for row in ident), Fraction(0))
    c.a0_tilde = tilde_a0(series)
    if sum(a for a, _, _ in comps) != c.a0 or sum(b for _, b, _ in comps) != c.b0:
        raise CrossCheckFailure("component data does not telescope to a0, b0")
    rep = InvariantReport(df_untwisted=df_untwisted(c), min_norm=None, l2_norm=l2_norm(c),
                          slope=twisted_slope(X, Tz))
    rep.provenance.update(df_untwisted="weights", l2_norm="weights", slope="intersection")
    rep.min_norm_routes["components"] = min_norm_components(comps)
    rep.min_norm_routes["identity"] = min_norm_identity(c.a0, c.b0, c.a0_tilde, c.b0_tilde)
    rep.extras["coefficients"] = {k: getattr(c, k) for k in
                                  ("a0", "a1", "b0", "b1", "d0", "a0_tilde", "b0_tilde")}
    rep.extras["samples"] = [list(s) for s in series.samples]
    if cfg.trivial:
        rep.df_twisted = Fraction(0)
        rep.min_norm_routes["intersection"] = Fraction(0)
        rep.provenance["df_twisted"] = "trivial"
        if D is not None:
            _check_log_divisor(X, D, Tz)
            rep.df_log = Fraction(0)
    else:
        cfg2, I, model = bridge(cfg)
        rep.extras["bridge_r"] = cfg2.r
        rep.extras["flag_ideal"] = I.as_dict()
        _model_block(model, Tz, D, cfg.r, rep)
    rep.min_norm = _agree(rep.min_norm_routes, "min_norm")
    rep.provenance["min_norm"] = "+".join(sorted(rep.min_norm_routes))
    return _finish(rep, Tz, T is not None)


def evaluate_model(model: BlowupModel, T=None, D=None, kmax=None):
    """Report for a Path B flag ideal; Path A data comes from the induced function."""
    X = model.base
    Tz = X.fan.zero() if T is None else T
    _require_semi_ample(model)
    c = coefficients(model, kmax=kmax)
    cfg = model.to_config()
    comps = central_components(cfg)
    rep = InvariantReport(df_untwisted=df_untwisted(c), min_norm=None, l2_norm=l2_norm(c),
                          slope=twisted_slope(X, Tz))
    rep.provenance.update(df_untwisted="weights", l2_norm="weights", slope="intersection")
    rep.min_norm_routes["components"] = min_norm_components(comps)
    rep.extras["coefficients"] = {k: getattr(c, k) for k in ("a0", "a1", "b0", "b1", "d0")}
    _model_block(model, Tz, D, model.r, rep)
    rep.min_norm = _agree(rep.min_norm_routes, "min_norm")
    rep.provenance["min_norm"] = "+".join(sorted(rep.min_norm_routes))
    S, s = s_coefficient(model)
    rep.extras["s_coefficient"] = S
    rep.extras["support_dimension"] = s
    return _finish(rep, Tz, T is not None)
