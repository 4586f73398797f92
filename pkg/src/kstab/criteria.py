"""Sufficient conditions for (uniform, twisted) K-stability on toric (X, L, T).

Verdicts are "certified", "inconclusive" or "violated-hypothesis".  The
intersection inequalities check is a self-test of the blow-up machinery and
reports "failed" when one of them breaks.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NoExceptionalRays
from .geometry import frac
from .toric import canonical_divisor, is_nef, is_principal, nef_slack, twisted_slope

CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"
VIOLATED = "violated-hypothesis"
FAILED = "failed"


@dataclass
class CriterionResult:
    criterion: str
    verdict: str
    witness: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.verdict == CERTIFIED

    def as_dict(self):
        return {"criterion": self.criterion, "verdict": self.verdict, "witness": self.witness}


def _slope(X, L, T):
    return twisted_slope(X.with_polarization(L), T)


def check_general_type(X, L, T):
    """-mu L - K_X - 2T nef, in the regime mu < 0.

    The difference always has degree 0 against L^(n-1), so the condition only
    carries positivity when mu is negative; for mu >= 0 the hypothesis fails."""
    mu = _slope(X, L, T)
    K = canonical_divisor(X.fan)
    slack = L * (-mu) - K - T * 2
    margin = nef_slack(slack)
    w = {"mu": mu, "slack_divisor": list(slack.coeffs), "nef_slack": margin,
         "singularities": "smooth toric, klt"}
    if mu >= 0:
        w["reason"] = "twisted slope is not negative"
        return CriterionResult("general_type", VIOLATED, w)
    return CriterionResult("general_type", CERTIFIED if margin >= 0 else INCONCLUSIVE, w)


def check_calabi_yau(X, L, T):
    """K_X + 2T numerically trivial; toric so klt and the conclusion is uniform."""
    K = canonical_divisor(X.fan)
    D = K + T * 2
    if is_principal(D):
        return CriterionResult("calabi_yau", CERTIFIED, {
            "K_plus_2T": list(D.coeffs), "strength": "uniform",
            "reason": "toric and Q-Gorenstein, hence klt"})
    return CriterionResult("calabi_yau", INCONCLUSIVE, {
        "K_plus_2T": list(D.coeffs), "reason": "K_X + 2T is not numerically trivial"})


def check_alpha(X, L, T, alpha, alpha_kind="lower_bound"):
    """(i) alpha >= n/(n+1) mu and (ii) -(K_X + 2T) - n/(n+1) mu L nef, with T nef.

    alpha_kind "upper_bound" (e.g. from alpha_upper_bound) cannot certify."""
    n = X.dim
    alpha = frac(alpha)
    mu = _slope(X, L, T)
    K = canonical_divisor(X.fan)
    c = Fraction(n, n + 1) * mu
    w = {"mu": mu, "alpha": alpha, "alpha_kind": alpha_kind, "threshold": c}
    if not is_nef(T):
        w["reason"] = "T is not nef"
        w["T_nef_slack"] = nef_slack(T)
        return CriterionResult("alpha", VIOLATED, w)
    cond1 = alpha >= c
    w["condition_i"] = cond1
    w["condition_i_vacuous"] = mu <= 0 and alpha > 0
    slack = -(K + T * 2) - L * c
    w["condition_ii_slack"] = nef_slack(slack)
    cond2 = w["condition_ii_slack"] >= 0
    w["condition_ii"] = cond2
    if alpha_kind != "lower_bound":
        w["reason"] = "alpha is only an upper bound; it cannot certify"
        return CriterionResult("alpha", INCONCLUSIVE, w)
    return CriterionResult("alpha", CERTIFIED if cond1 and cond2 else INCONCLUSIVE, w)


def aubin_twist(X, beta):
    """(L, T) = (-K_X, (1 - beta)/2 (-K_X)) on the Aubin continuity path."""
    beta = frac(beta)
    L = -canonical_divisor(X.fan)
    return L, L * ((1 - beta) / 2)


def check_aubin(X, beta, alpha):
    L, T = aubin_twist(X, beta)
    res = check_alpha(X.with_polarization(L), L, T, alpha)
    res.criterion = "aubin"
    res.witness["beta"] = frac(beta)
    return res


def aubin_threshold(n, alpha):
    """Largest beta the alpha criterion certifies on the Aubin path."""
    return min(frac(alpha) * (n + 1) / n, Fraction(1))


def alpha_upper_bound(model):
    """min over exceptional rays of (a - b + 1)/c."""
    if not model.exceptional:
        raise NoExceptionalRays("no exceptional divisors: the bound is +infinity")
    return min((e["a"] - e["b"] + 1) / e["c"] for e in model.exceptional)


def check_inequalities(model, nef_divisors=None):
    """(L - E)^n R <= 0 for nef pullbacks R, (L - E)^n E > 0, (L - E)^n (L + nE) > 0."""
    n = model.n
    X = model.base
    D = model.L - model.E
    Rs = [("L", X.L), ("0", X.fan.zero())]
    Rs += [(f"R{i}", R) for i, R in enumerate(nef_divisors or [])]
    values = {}
    ok = True
    for name, R in Rs:
        v = model.power_dot(D, model.pullback(R))
        values[f"i[{name}]"] = v
        ok &= v <= 0
    values["ii"] = model.power_dot(D, model.E)
    values["iii"] = model.power_dot(D, model.L + model.E * n)
    ok &= values["ii"] > 0 and values["iii"] > 0
    return CriterionResult("inequalities", CERTIFIED if ok else FAILED, values)


CHECKS = {"general_type": check_general_type, "calabi_yau": check_calabi_yau}
