"""Write the bundled problem fixtures (run from the repo root)."""

import json
import os

OUT = os.path.join("src", "kstab", "corpus", "problems")
ALL = ["df", "norms", "twisted", "log", "criteria", "oracle"]


def pl(pieces, ceiling=None):
    block = {"pieces": [{"gradient": [str(x) for x in g], "constant": str(c)} for g, c in pieces]}
    if ceiling is not None:
        block["ceiling"] = str(ceiling)
    return {"pl_function": block}


def flag(N, levels):
    return {"flag_ideal": {"N": N, "levels": levels}}


def problem(variety, degeneration, tasks=None, options=None):
    out = {"schema_version": 1, "variety": variety, "degeneration": degeneration}
    out["tasks"] = tasks or ["df", "norms", "twisted", "criteria", "oracle"]
    if options:
        out["options"] = options
    return out


SIMPLEX = [["0", "0"], ["1", "0"], ["0", "1"]]
SQUARE = [["0", "0"], ["1", "0"], ["0", "1"], ["1", "1"]]

FIXTURES = {
    # Path A
    "p1_flagship": problem({"polytope": [["0"], ["1"]]}, pl([((0,), 0), ((2,), -1)], 1)),
    "p1_product": problem({"polytope": [["0"], ["1"]]}, pl([((1,), 0)], 1)),
    "p1_trivial": problem({"polytope": [["0"], ["1"]]}, pl([((0,), 0)], 1)),
    "p1_kinked": problem({"polytope": [["0"], ["1"]]},
                         pl([((0,), 0), ((-2,), 1), ((3,), -2)], 1)),
    "p1_twisted_log": problem({"polytope": [["0"], ["1"]], "T": ["1", "0"], "log_divisor": ["2", "0"]},
                              pl([((0,), 0), ((2,), -1)], 1), ALL, {"alpha": "1/2"}),
    "p2_kink": problem({"polytope": SIMPLEX}, pl([((0, 0), 0), ((2, 0), -1)], 1)),
    "p2_product": problem({"polytope": SIMPLEX}, pl([((1, 0), 0)], 1)),
    "p1xp1_product": problem({"polytope": SQUARE}, pl([((1, 0), 0)], 1)),
    "p1xp1_kink": problem({"polytope": SQUARE}, pl([((0, 0), 0), ((1, 1), -1)], 1)),
    "f1_product": problem({"preset": "F1"}, pl([((0, 1), 0)], 1)),
    "f1_kink": problem({"preset": "F1"}, pl([((0, 0), 0), ((1, 0), -1)], 1)),
    # Path B (exponents are per ray of the fan, in the fan's ray order)
    "p1_flag_point": problem({"preset": "P1", "T": ["1", "0"], "log_divisor": ["2", "0"]},
                             flag(1, [[[1, 0]]]), ALL, {"alpha": "1"}),
    "p1_flag_double": problem({"preset": "P1", "r": 2}, flag(2, [[[2, 0]], [[1, 0]]])),
    "p2_flag_point": problem({"preset": "P2", "T": ["1/2", "1/2", "1/2"]},
                             flag(1, [[[1, 0, 0], [0, 1, 0]]])),
    "p2_flag_line": problem({"preset": "P2", "T": ["1", "0", "0"], "log_divisor": ["2", "0", "0"]},
                            flag(1, [[[1, 0, 0]]]), ALL),
    # failure modes
    "fail_not_semi_ample": problem({"preset": "P1"}, flag(1, [[[3, 0]]])),
    "fail_ceiling_too_low": problem({"polytope": [["0"], ["1"]]}, pl([((1,), 0)], "1/2")),
    "fail_unknown_task": problem({"preset": "P1"}, pl([((1,), 0)], 1), ["df", "plot"]),
}


FAMILIES = {
    # beta in [0, 1] on the Aubin path of P^1 (alpha = 1/2), with two flag degenerations
    "p1_aubin": {"schema_version": 1, "variety": {"preset": "P1"},
                 "family": {"kind": "aubin", "alpha": "1/2",
                            "beta": {"start": "0", "stop": "1", "step": "1/8"}},
                 "degenerations": [flag(1, [[[1, 0]]]), flag(2, [[[2, 0]], [[1, 0]]])]},
    "p2_aubin": {"schema_version": 1, "variety": {"preset": "P2"},
                 "family": {"kind": "aubin", "alpha": "1/3",
                            "beta": {"start": "0", "stop": "1", "step": "1/12"}}},
    # F1 with L = -K fixed and T = s (-K): general type once mu < 0
    "f1_general_type": {"schema_version": 1, "variety": {"preset": "F1"},
                        "family": {"kind": "linear", "alpha": "1/3",
                                   "L": {"base": ["1", "1", "1", "1"]},
                                   "T": {"base": ["0", "0", "0", "0"],
                                         "direction": ["1", "1", "1", "1"]},
                                   "parameter": {"start": "0", "stop": "2", "step": "1/4"}}},
}
FAM_OUT = os.path.join("src", "kstab", "corpus", "families")


def main():
    os.makedirs(OUT, exist_ok=True)
    os.makedirs(FAM_OUT, exist_ok=True)
    for name, body in FAMILIES.items():
        with open(os.path.join(FAM_OUT, name + ".json"), "w") as fh:
            fh.write(json.dumps(body, indent=2) + "\n")
    for name, body in FIXTURES.items():
        with open(os.path.join(OUT, name + ".json"), "w") as fh:
            fh.write(json.dumps(body, indent=2) + "\n")
    with open(os.path.join(OUT, "fail_malformed.json"), "w") as fh:
        fh.write('{"schema_version": 1,\n "variety": {"preset": "P1"},\n "degeneration": {\n')


if __name__ == "__main__":
    main()
