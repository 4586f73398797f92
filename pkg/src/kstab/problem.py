"""Problem files in, reports out.

A problem file is JSON with rationals written as strings "p/q":

    {"schema_version": 1,
     "variety": {"preset": "P1"} | {"polytope": [[...], ...]} | {"fan": {"rays", "cones"}, "L": [...]},
                plus optional "L", "T", "log_divisor" (ray coefficients) and "r",
     "degeneration": {"pl_function": {"pieces": [{"gradient": [...], "constant": "..."}],
                                      "ceiling": "..."}}
                   | {"flag_ideal": {"N": int, "levels": [[[exponents per ray], ...], ...]}},
     "tasks": subset of TASKS,
     "options": {"k_max": int, "alpha": "p/q", "alpha_kind": "lower_bound",
                 "criteria": [...], "nef_divisors": [[...]]}}
"""

import json
import time
from fractions import Fraction

from . import criteria as crit
from .errors import CrossCheckFailure, KstabError, NotSemiAmple, ProblemError
from .geometry import PLConvexFunction, RationalPolytope, frac
from .invariants import evaluate_config, evaluate_model
from .testconfig import (BlowupModel, MonomialFlagIdeal, bridge, flag_blowup,
                         toric_config)
from .toric import (Fan, PolarizedToric, hirzebruch_fan, product_p1_fan,
                    projective_space_fan)
from .weights import interpolate, sample

SCHEMA_VERSION = 1
TASKS = ("df", "norms", "twisted", "log", "criteria", "oracle")
DEFAULT_TASKS = ("df", "norms", "twisted", "criteria")
CRITERIA = ("general_type", "calabi_yau", "alpha", "alpha_bound", "inequalities")


# -- encoding ------------------------------------------------------------------------

def encode(obj):
    """JSON-ready copy with Fractions as "p/q" strings and tuples as lists."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return str(obj)


def dumps(report):
    return json.dumps(encode(report), indent=2) + "\n"


def _rat(x, where):
    if isinstance(x, bool) or isinstance(x, float):
        raise ProblemError(f"{where}: rationals must be strings or integers, got {x!r}", where)
    try:
        return frac(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ProblemError(f"{where}: cannot read {x!r} as a rational", where)


def _vec(xs, where):
    if not isinstance(xs, list):
        raise ProblemError(f"{where}: expected a list", where)
    return tuple(_rat(x, f"{where}[{i}]") for i, x in enumerate(xs))


# -- parsing -------------------------------------------------------------------------

PRESETS = {
    "P1": lambda: (projective_space_fan(1), [0, 1]),
    "P2": lambda: (projective_space_fan(2), [0, 0, 1]),
    "P3": lambda: (projective_space_fan(3), [0, 0, 0, 1]),
    "P1xP1": lambda: (product_p1_fan(), [0, 0, 1, 1]),
    "F1": lambda: (hirzebruch_fan(1), [0, 0, 1, 1]),
    "F2": lambda: (hirzebruch_fan(2), [0, 0, 1, 1]),
}


def _divisor_coeffs(block, fan, where):
    """Ray coefficients from a list or from [{"ray": [...], "coeff": "..."}]."""
    if isinstance(block, list) and block and isinstance(block[0], dict):
        coeffs = [Fraction(0)] * len(fan.rays)
        for i, entry in enumerate(block):
            ray = tuple(int(x) for x in entry.get("ray", []))
            if ray not in fan.rays:
                raise ProblemError(f"{where}[{i}]: {ray} is not a ray of the fan", where)
            coeffs[fan.rays.index(ray)] = _rat(entry.get("coeff"), f"{where}[{i}].coeff")
        return coeffs
    vec = _vec(block, where)
    if len(vec) != len(fan.rays):
        raise ProblemError(f"{where}: need {len(fan.rays)} coefficients (one per ray)", where)
    return list(vec)


def parse_variety(block):
    if not isinstance(block, dict):
        raise ProblemError("variety: expected an object", "variety")
    kinds = [k for k in ("preset", "polytope", "fan") if k in block]
    if len(kinds) != 1:
        raise ProblemError("variety: give exactly one of preset, polytope, fan", "variety")
    kind = kinds[0]
    if kind == "preset":
        name = block["preset"]
        if name not in PRESETS:
            raise ProblemError(f"variety.preset: unknown preset {name!r}", "variety.preset")
        fan, L = PRESETS[name]()
        if "L" in block:
            L = _divisor_coeffs(block["L"], fan, "variety.L")
        X = PolarizedToric(fan, L, name)
    elif kind == "polytope":
        verts = [_vec(v, f"variety.polytope[{i}]") for i, v in enumerate(block["polytope"])]
        X = PolarizedToric.from_polytope(RationalPolytope.from_vertices(verts),
                                         block.get("name"))
    else:
        f = block["fan"]
        try:
            fan = Fan(f["rays"], f["cones"])
        except (KeyError, TypeError) as e:
            raise ProblemError(f"variety.fan: {e}", "variety.fan")
        if "L" not in block:
            raise ProblemError("variety.L is required with a fan", "variety.L")
        X = PolarizedToric(fan, _divisor_coeffs(block["L"], fan, "variety.L"), block.get("name"))
    T = X.fan.divisor(_divisor_coeffs(block["T"], X.fan, "variety.T")) if "T" in block else None
    D = None
    if "log_divisor" in block:
        D = X.fan.divisor(_divisor_coeffs(block["log_divisor"], X.fan, "variety.log_divisor"))
    r = block.get("r", 1)
    if not isinstance(r, int) or r < 1:
        raise ProblemError("variety.r must be a positive integer", "variety.r")
    return X, T, D, r


def parse_degeneration(block, X, r):
    if not isinstance(block, dict) or len(block) != 1:
        raise ProblemError("degeneration: give exactly one of pl_function, flag_ideal",
                           "degeneration")
    if "pl_function" in block:
        b = block["pl_function"]
        try:
            pieces = [(_vec(p["gradient"], f"degeneration.pl_function.pieces[{i}].gradient"),
                       _rat(p["constant"], f"degeneration.pl_function.pieces[{i}].constant"))
                      for i, p in enumerate(b["pieces"])]
        except (KeyError, TypeError) as e:
            raise ProblemError(f"degeneration.pl_function: missing {e}", "degeneration.pl_function")
        f = PLConvexFunction(pieces, X.moment_polytope)
        C = _rat(b.get("ceiling", f.maximum() - f.minimum()), "degeneration.pl_function.ceiling")
        return toric_config(X, f, C, r)
    if "flag_ideal" in block:
        b = block["flag_ideal"]
        try:
            I = MonomialFlagIdeal(b["N"], b.get("levels", []))
        except (KeyError, TypeError, ValueError) as e:
            raise ProblemError(f"degeneration.flag_ideal: {e}", "degeneration.flag_ideal")
        return flag_blowup(X, I, r)
    raise ProblemError("degeneration: give exactly one of pl_function, flag_ideal", "degeneration")


class Problem:
    def __init__(self, raw, X, T, D, r, degeneration, tasks, options):
        self.raw = raw
        self.X = X
        self.T = T
        self.D = D
        self.r = r
        self.degeneration = degeneration
        self.tasks = tasks
        self.options = options


def parse_problem(raw, tasks=None, k_max=None, alpha=None):
    if not isinstance(raw, dict):
        raise ProblemError("problem: expected a JSON object", "")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ProblemError(f"schema_version must be {SCHEMA_VERSION}", "schema_version")
    for key in ("variety", "degeneration"):
        if key not in raw:
            raise ProblemError(f"missing field {key!r}", key)
    X, T, D, r = parse_variety(raw["variety"])
    tasks = list(tasks or raw.get("tasks") or DEFAULT_TASKS)
    for t in tasks:
        if t not in TASKS:
            raise ProblemError(f"tasks: unknown task {t!r}", "tasks")
    options = dict(raw.get("options", {}))
    if k_max is not None:
        options["k_max"] = k_max
    if alpha is not None:
        options["alpha"] = alpha
    if "alpha" in options:
        options["alpha"] = _rat(options["alpha"], "options.alpha")
    for c in options.get("criteria", []):
        if c not in CRITERIA:
            raise ProblemError(f"options.criteria: unknown criterion {c!r}", "options.criteria")
    degeneration = parse_degeneration(raw["degeneration"], X, r)
    return Problem(raw, X, T, D, r, degeneration, tasks, options)


def load_problem(path, **kw):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise ProblemError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
                           f"line {e.lineno}")
    return parse_problem(raw, **kw)


# -- running -------------------------------------------------------------------------

def oracle_table(obj, kmax=None):
    """Per-k (h, w, w2) by both paths plus the fitted coefficients of each."""
    if isinstance(obj, BlowupModel):
        model, cfg = obj, obj.to_config()
    else:
        if obj.trivial:
            ser = sample(obj, kmax=kmax)
            return {"r": obj.r, "rows": [{"k": s[0], "config": list(s[1:]), "blowup": [s[1], 0, 0]}
                                         for s in ser.samples], "agree": True}
        cfg, _, model = bridge(obj)
    sa = sample(cfg, kmax=kmax)
    ks = [s[0] for s in sa.samples]
    sb = sample(model, ks=ks)
    rows, agree = [], True
    for x, y in zip(sa.samples, sb.samples):
        rows.append({"k": x[0], "config": list(x[1:]), "blowup": list(y[1:])})
        agree &= x == y
    out = {"r": cfg.r, "rows": rows, "agree": agree}
    if not agree:
        raise CrossCheckFailure(f"weight tables differ between paths: {rows}")
    ca, cb = interpolate(sa), interpolate(sb)
    out["coefficients"] = {k: [getattr(ca, k), getattr(cb, k)] for k in ("a0", "a1", "b0", "b1", "d0")}
    return out


def _criteria_block(prob, model, wanted):
    X, L = prob.X, prob.X.L
    T = prob.T if prob.T is not None else X.fan.zero()
    out = []
    if "general_type" in wanted:
        out.append(crit.check_general_type(X, L, T).as_dict())
    if "calabi_yau" in wanted:
        out.append(crit.check_calabi_yau(X, L, T).as_dict())
    if "alpha" in wanted and "alpha" in prob.options:
        out.append(crit.check_alpha(X, L, T, prob.options["alpha"],
                                    prob.options.get("alpha_kind", "lower_bound")).as_dict())
    if model is not None and "alpha_bound" in wanted:
        try:
            out.append({"criterion": "alpha_bound", "verdict": "bound",
                        "witness": {"alpha_upper_bound": crit.alpha_upper_bound(model)}})
        except KstabError as e:
            out.append({"criterion": "alpha_bound", "verdict": "absent", "witness": {"reason": str(e)}})
    if model is not None and "inequalities" in wanted:
        nefs = [X.fan.divisor(_divisor_coeffs(d, X.fan, "options.nef_divisors"))
                for d in prob.options.get("nef_divisors", [])]
        res = crit.check_inequalities(model, nefs)
        if res.verdict == crit.FAILED:
            raise CrossCheckFailure(f"intersection inequalities fail: {res.witness}")
        out.append(res.as_dict())
    return out


def _model_of(prob):
    d = prob.degeneration
    if isinstance(d, BlowupModel):
        return d
    if d.trivial:
        return None
    return bridge(d)[2]


def _describe(prob):
    X = prob.X
    d = prob.degeneration
    out = {"name": X.name, "dimension": X.dim, "rays": X.fan.rays, "L": list(X.L.coeffs),
           "T": None if prob.T is None else list(prob.T.coeffs),
           "log_divisor": None if prob.D is None else list(prob.D.coeffs), "r": prob.r}
    if isinstance(d, BlowupModel):
        out["flag_ideal"] = d.ideal.as_dict()
        out["exceptional"] = d.exceptional
        out["semi_ample"] = d.semi_ample
    else:
        out["pl_function"] = {"pieces": [{"gradient": list(g), "constant": c} for g, c in d.f.pieces],
                              "ceiling": d.ceiling, "normalized": True}
    return out


def run_problem(prob):
    """Report dict (fields in a fixed order); timing is kept under its own key."""
    start = time.perf_counter()
    kmax = prob.options.get("k_max")
    d = prob.degeneration
    report = {"schema_version": SCHEMA_VERSION, "input": _describe(prob)}
    if isinstance(d, BlowupModel) and not d.semi_ample:
        report["status"] = "not-semi-ample"
        report["warnings"] = ["rL - E is not relatively semi-ample; verdicts suppressed"]
        report["diagnostics"] = {"semi_ample": False, "exceptional": d.exceptional}
        raise _ReportedFailure(report, NotSemiAmple("flag ideal blow-up is not semi-ample"))
    T = prob.T if "twisted" in prob.tasks or "log" in prob.tasks or "criteria" in prob.tasks else None
    D = prob.D if "log" in prob.tasks else None
    if isinstance(d, BlowupModel):
        rep = evaluate_model(d, T, D, kmax=kmax)
    else:
        rep = evaluate_config(d, T, D, kmax=kmax)
    inv = {}
    if "df" in prob.tasks:
        inv["df_untwisted"] = rep.df_untwisted
    if "twisted" in prob.tasks:
        inv["df_twisted"] = rep.df_twisted
        inv["slope"] = rep.slope
    if "log" in prob.tasks:
        inv["df_log"] = rep.df_log
        inv["log_contained_components"] = rep.extras.get("log_contained_components", [])
    if "norms" in prob.tasks:
        inv["min_norm"] = rep.min_norm
        inv["min_norm_routes"] = rep.min_norm_routes
        inv["l2_norm"] = rep.l2_norm
        inv["uniform_margin"] = rep.uniform_margin
    inv["coefficients"] = rep.extras.get("coefficients")
    for key in ("bridge_r", "flag_ideal", "s_coefficient", "support_dimension", "df_intersection_raw"):
        if key in rep.extras:
            inv[key] = rep.extras[key]
    inv["provenance"] = {k: v for k, v in rep.provenance.items() if k in inv}
    report["status"] = "ok"
    report["invariants"] = inv
    if "criteria" in prob.tasks:
        wanted = prob.options.get("criteria", list(CRITERIA))
        report["criteria"] = _criteria_block(prob, _model_of(prob), wanted)
    if "oracle" in prob.tasks:
        report["oracle"] = oracle_table(d, kmax)
    report["warnings"] = rep.warnings
    report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return report


class _ReportedFailure(Exception):
    """Carries a partial report alongside the error that stopped the run."""

    def __init__(self, report, error):
        super().__init__(str(error))
        self.report = report
        self.error = error


def strip_timing(report):
    return {k: v for k, v in report.items() if k != "timing"}


def compute(raw, **kw):
    """(exit code, report dict) for a raw problem dict; never raises KstabError."""
    try:
        prob = parse_problem(raw, **kw)
        return 0, run_problem(prob)
    except _ReportedFailure as e:
        e.report["error"] = {"type": type(e.error).__name__, "message": str(e.error)}
        return e.error.exit_code, e.report
    except CrossCheckFailure as e:
        return 3, {"schema_version": SCHEMA_VERSION, "status": "cross-check-failure",
                   "error": {"type": type(e).__name__, "message": str(e)}}
    except KstabError as e:
        err = {"type": type(e).__name__, "message": str(e)}
        if getattr(e, "field", None):
            err["field"] = e.field
        if getattr(e, "required_r", None):
            err["required_r"] = e.required_r
        return e.exit_code, {"schema_version": SCHEMA_VERSION, "status": "error", "error": err}
