"""kstab command line: compute, scan, oracle, validate, corpus.

Exit codes: 0 success, 2 invalid input or failed hypothesis, 3 internal
cross-check failure.
"""

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from math import lcm

import click

from . import criteria as crit
from .errors import KstabError, NotSemiAmple, ProblemError, TrivialFlag
from .invariants import evaluate_model
from .problem import (SCHEMA_VERSION, TASKS, _rat, _vec, compute, dumps, encode, load_problem,
                      oracle_table, parse_variety, strip_timing)
from .testconfig import MonomialFlagIdeal, flag_blowup
from .toric import canonical_divisor, is_ample, twisted_slope

SCAN_CAP = 1000


def threads():
    try:
        return max(1, int(os.environ.get("KSTAB_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ProblemError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
                           f"line {e.lineno}")
    except OSError as e:
        raise ProblemError(f"{path}: {e.strerror}", "file")


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _as_text(report, prefix=""):
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.extend(_as_text(v, f"{prefix}{k}."))
        else:
            lines.append(f"{prefix}{k}: {json.dumps(encode(v))}")
    return lines


def _fail(e):
    click.echo(f"error: {type(e).__name__}: {e}", err=True)
    sys.exit(e.exit_code)


@click.group()
@click.version_option(package_name="kstab")
def main():
    """Exact K-stability invariants of toric test configurations."""


@main.command("compute")
@click.argument("problem", type=click.Path(dir_okay=False))
@click.option("--tasks", help="Comma separated subset of " + ",".join(TASKS))
@click.option("--k-max", type=int, help="Largest k the weight counter may use.")
@click.option("--alpha", help="Lower bound for the alpha invariant, as p/q.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report here.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
def compute_cmd(problem, tasks, k_max, alpha, out, fmt):
    """Evaluate the invariants requested by a problem file."""
    try:
        raw = _read_json(problem)
    except KstabError as e:
        _fail(e)
    kw = {"k_max": k_max, "alpha": alpha}
    if tasks:
        kw["tasks"] = [t.strip() for t in tasks.split(",") if t.strip()]
    code, report = compute(raw, **kw)
    text = dumps(report) if fmt == "json" else "\n".join(_as_text(report)) + "\n"
    _emit(text, out)
    if code:
        click.echo(f"error: {report['error']['type']}: {report['error']['message']}", err=True)
    sys.exit(code)


@main.command("oracle")
@click.argument("problem", type=click.Path(dir_okay=False))
@click.option("--k-max", type=int)
@click.option("--out", type=click.Path(dir_okay=False))
def oracle_cmd(problem, k_max, out):
    """Compare weight counts of both computation paths, k by k."""
    try:
        prob = load_problem(problem, k_max=k_max)
        table = oracle_table(prob.degeneration, prob.options.get("k_max"))
    except KstabError as e:
        _fail(e)
    _emit(dumps({"schema_version": SCHEMA_VERSION, "oracle": table}), out)


@main.command("validate")
@click.argument("problem", type=click.Path(dir_okay=False))
def validate_cmd(problem):
    """Parse a problem file and build its objects without computing."""
    try:
        prob = load_problem(problem)
    except KstabError as e:
        _fail(e)
    click.echo(f"ok: dimension {prob.X.dim}, {type(prob.degeneration).__name__}, "
               f"tasks {','.join(prob.tasks)}")


# -- scan ----------------------------------------------------------------------------

def _grid(grid, where):
    start, stop, step = (_rat(grid[k], f"{where}.{k}") for k in ("start", "stop", "step"))
    if step <= 0:
        raise ProblemError(f"{where}.step must be positive", where)
    count = int((stop - start) / step) + 1
    if count > SCAN_CAP:
        raise ProblemError(f"{where}: {count} grid points exceed the cap of {SCAN_CAP}", where)
    return [start + i * step for i in range(max(count, 0))]


def _family_members(fam, X):
    kind = fam.get("kind")
    if kind == "aubin":
        for beta in _grid(fam["beta"], "family.beta"):
            L = -canonical_divisor(X.fan)
            yield beta, L, L * ((1 - beta) / 2)
    elif kind == "linear":
        fan = X.fan
        L0 = _vec(fam["L"]["base"], "family.L.base") if "L" in fam else tuple(X.L.coeffs)
        L1 = _vec(fam["L"].get("direction", [0] * len(fan.rays)), "family.L.direction") \
            if "L" in fam else (0,) * len(fan.rays)
        T0 = _vec(fam["T"]["base"], "family.T.base") if "T" in fam else (0,) * len(fan.rays)
        T1 = _vec(fam["T"].get("direction", [0] * len(fan.rays)), "family.T.direction") \
            if "T" in fam else (0,) * len(fan.rays)
        for s in _grid(fam["parameter"], "family.parameter"):
            yield (s, fan.divisor([a + s * b for a, b in zip(L0, L1)]),
                   fan.divisor([a + s * b for a, b in zip(T0, T1)]))
    else:
        raise ProblemError("family.kind must be aubin or linear", "family.kind")


def _min_margin(X, L, T, degenerations):
    """Smallest twisted DF / min norm over flag ideal degenerations of (X, L)."""
    r = lcm(1, *(c.denominator for c in L.coeffs))
    XL = X.with_polarization(L * r)
    best = None
    for d in degenerations:
        try:
            model = flag_blowup(XL, MonomialFlagIdeal(d["N"], d.get("levels", [])))
            rep = evaluate_model(model, T * r)
        except (NotSemiAmple, TrivialFlag):
            continue
        if rep.uniform_margin is not None:
            best = rep.uniform_margin if best is None else min(best, rep.uniform_margin)
    return best


def _scan_row(args):
    X, s, L, T, alpha, degenerations = args
    row = {"parameter": s}
    if not is_ample(L):
        row.update(mu=None, general_type="not-ample", calabi_yau="not-ample", alpha="not-ample",
                   min_uniform_margin=None)
        return row
    XL = X.with_polarization(L)
    row["mu"] = twisted_slope(XL, T)
    row["general_type"] = crit.check_general_type(XL, L, T).verdict
    row["calabi_yau"] = crit.check_calabi_yau(XL, L, T).verdict
    row["alpha"] = crit.check_alpha(XL, L, T, alpha).verdict if alpha is not None else None
    row["min_uniform_margin"] = _min_margin(X, L, T, degenerations) if degenerations else None
    return row


SCAN_COLUMNS = ["parameter", "mu", "general_type", "calabi_yau", "alpha", "min_uniform_margin"]


def run_scan(raw):
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ProblemError(f"schema_version must be {SCHEMA_VERSION}", "schema_version")
    X, _, _, _ = parse_variety(raw.get("variety"))
    fam = raw.get("family") or {}
    alpha = _rat(fam["alpha"], "family.alpha") if "alpha" in fam else None
    degs = [d["flag_ideal"] for d in raw.get("degenerations", [])]
    jobs = [(X, s, L, T, alpha, degs) for s, L, T in _family_members(fam, X)]
    return _pmap(_scan_row, jobs)


@main.command("scan")
@click.argument("family", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", type=click.Path(dir_okay=False))
def scan_cmd(family, fmt, out):
    """Sweep L and/or T over a rational grid and tabulate the criteria."""
    try:
        rows = run_scan(_read_json(family))
    except KstabError as e:
        _fail(e)
    if fmt == "json":
        _emit(dumps({"schema_version": SCHEMA_VERSION, "columns": SCAN_COLUMNS, "rows": rows}), out)
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for row in rows:
        w.writerow(["" if row[c] is None else str(row[c]) for c in SCAN_COLUMNS])
    _emit(buf.getvalue(), out)


# -- corpus --------------------------------------------------------------------------

def corpus_dir():
    return resources.files("kstab") / "corpus"


def corpus_fixtures():
    base = corpus_dir() / "problems"
    return sorted((p.name[:-5], p) for p in base.iterdir() if p.name.endswith(".json"))


def run_fixture(item):
    name, path = item
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        err = ProblemError(f"invalid JSON at line {e.lineno}: {e.msg}", f"line {e.lineno}")
        return name, err.exit_code, {"schema_version": SCHEMA_VERSION, "status": "error",
                                     "error": {"type": "ProblemError", "message": str(err),
                                               "field": err.field}}
    code, report = compute(raw)
    return name, code, encode(strip_timing(report))


@main.command("corpus")
@click.option("--freeze", is_flag=True, help="Rewrite the expected reports (maintainers).")
@click.option("--expected-dir", type=click.Path(file_okay=False),
              help="Directory of expected reports (default: bundled).")
def corpus_cmd(freeze, expected_dir):
    """Run the bundled regression corpus against its frozen reports."""
    exp_dir = expected_dir or str(corpus_dir() / "expected")
    results = _pmap(run_fixture, corpus_fixtures())
    failed = 0
    for name, code, report in results:
        path = os.path.join(exp_dir, name + ".json")
        entry = {"exit_code": code, "report": report}
        if freeze:
            with open(path, "w") as fh:
                fh.write(json.dumps(entry, indent=2) + "\n")
            click.echo(f"froze {name} (exit {code})")
            continue
        try:
            with open(path) as fh:
                want = json.load(fh)
        except OSError:
            click.echo(f"FAIL {name}: no expected report")
            failed += 1
            continue
        ok = want == entry
        failed += not ok
        click.echo(f"{'PASS' if ok else 'FAIL'} {name} (exit {code})")
    if not freeze:
        click.echo(f"{len(results) - failed}/{len(results)} fixtures match")
        sys.exit(3 if failed else 0)


if __name__ == "__main__":
    main()
