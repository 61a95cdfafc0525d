"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 inconsistent evidence, 3 I/O,
parse or usage failure (bad flags, unknown labels, a file of the wrong kind).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import multinet as mn
from . import simnet as sn
from .core import TOL, JointTable, assignment_from_labels, enumerate_joint, free_parameter_count
from .errors import (
    AsymnetError,
    ContractError,
    InconsistentEvidenceError,
    ModelValidationError,
    ParseError,
    SchemaError,
)
from .inference import posterior_chain
from .serialize import Model, kind_of, load_model, serialize_model, validate_model

EXIT_OK, EXIT_INVALID, EXIT_EVIDENCE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def parse_pairs(text: str | None) -> dict[str, str]:
    """``a=x,b=y`` to ``{"a": "x", "b": "y"}``."""
    out: dict[str, str] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"expected var=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k in out:
            raise UsageError(f"{k!r} given twice")
        out[k] = v
    return out


def _variables(model: Model):
    kind = kind_of(model)
    if kind == "network":
        return list(model.variables)
    if kind == "multinet":
        return list(model.locals[0].variables)
    return [model.variable(v) for v in model.variables]


def _hypothesis(model: Model, names: str | None) -> mn.HypothesisSpace:
    kind = kind_of(model)
    if kind != "network":
        return model.hypothesis
    if not names:
        raise UsageError("--hypothesis is required for network files")
    return mn.HypothesisSpace.of(model, [n.strip() for n in names.split(",") if n.strip()])


def as_multinet(model: Model, hyp: mn.HypothesisSpace) -> mn.Multinet:
    kind = kind_of(model)
    if kind == "multinet":
        return model
    if kind == "simnet":
        return sn.convert_to_multinet(model)
    return mn.split_network(model, hyp, [hyp.domain])


def joint_of(model: Model) -> JointTable:
    kind = kind_of(model)
    if kind == "network":
        return enumerate_joint(model)
    if kind == "multinet":
        return mn.multinet_joint(model)
    return sn.reconstruct_joint(model)


def param_count(model: Model) -> int:
    kind = kind_of(model)
    if kind == "network":
        return free_parameter_count(model)
    if kind == "multinet":
        return mn.multinet_param_count(model)
    return sn.simnet_param_count(model)


def run_query(model: Model, evidence: dict[str, int], hyp: mn.HypothesisSpace, prior_net=None, apriori=None):
    kind = kind_of(model)
    if prior_net is not None:
        return mn.staged_posterior(prior_net, as_multinet(model, hyp), apriori or {}, evidence)
    if kind == "network":
        return posterior_chain(model, hyp.ids, evidence)
    if kind == "multinet":
        return mn.posterior(model, evidence)
    return sn.posterior(model, evidence)


# -- commands ----------------------------------------------------------------


def _load(path, validate=True):
    return load_model(path, validate=validate).model


def cmd_validate(args, out) -> int:
    model = _load(args.file, validate=False)
    report = validate_model(model)
    print(f"{kind_of(model)}: {report}", file=out)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_query(args, out) -> int:
    model = _load(args.file)
    hyp = _hypothesis(model, args.hypothesis)
    variables = _variables(model)
    evidence = assignment_from_labels(variables, parse_pairs(args.evidence))
    prior_net, apriori = None, None
    if args.priors:
        prior_net = _load(args.priors)
        if kind_of(prior_net) != "network":
            raise UsageError("--priors must name a network file")
        apriori = assignment_from_labels(prior_net, parse_pairs(args.apriori_evidence))
    elif args.apriori_evidence:
        raise UsageError("--apriori-evidence needs --priors")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        post = run_query(model, evidence, hyp, prior_net, apriori)
    diagnostics = [str(w.message) for w in caught]
    probs = post.factor.transpose(hyp.ids).values
    rows = [(hyp.label(pt), float(probs[pt])) for pt in hyp.domain]
    if args.json:
        doc = {
            "posterior": {k: v for k, v in rows},
            "multiplications": int(post.multiplications),
            "diagnostics": diagnostics,
        }
        print(json.dumps(doc, indent=2), file=out)
    else:
        for k, v in rows:
            print(f"{k}\t{v:.17g}", file=out)
        print(f"multiplications\t{post.multiplications}", file=out)
        for d in diagnostics:
            print(f"warning: {d}", file=out)
    return EXIT_OK


def _write(model, dest, out):
    text = serialize_model(model)
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def cmd_convert(args, out) -> int:
    model = _load(args.file)
    if kind_of(model) != "simnet":
        raise UsageError("convert needs a simnet file")
    _write(sn.convert_to_multinet(model), args.output, out)
    return EXIT_OK


def cmd_union(args, out) -> int:
    model = _load(args.file)
    if kind_of(model) != "multinet":
        raise UsageError("union needs a multinet file")
    _write(mn.union_network(model), args.output, out)
    return EXIT_OK


def cmd_params(args, out) -> int:
    print(param_count(_load(args.file)), file=out)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    a, b = _load(args.a), _load(args.b)
    print(f"params\t{param_count(a)}\t{param_count(b)}", file=out)
    status = EXIT_OK
    if args.evidence is not None:
        ha = _hypothesis(a, args.hypothesis)
        hb = _hypothesis(b, args.hypothesis)
        pa = run_query(a, assignment_from_labels(_variables(a), parse_pairs(args.evidence)), ha)
        pb = run_query(b, assignment_from_labels(_variables(b), parse_pairs(args.evidence)), hb)
        print(f"multiplications\t{pa.multiplications}\t{pb.multiplications}", file=out)
        diff = float(np.max(np.abs(pa.factor.transpose(ha.ids).values - pb.factor.transpose(ha.ids).values)))
        print(f"posterior max difference\t{diff:.3g}", file=out)
        if diff > TOL:
            status = EXIT_INVALID
    if args.oracle:
        ja, jb = joint_of(a), joint_of(b)
        if sorted(ja.scope) != sorted(jb.scope):
            print("joint: different variables", file=out)
            return EXIT_INVALID
        diff = float(np.max(np.abs(ja.probabilities - jb.transpose(ja.scope).probabilities)))
        same = diff <= TOL
        print(f"joint max difference\t{diff:.3g}\t{'equivalent' if same else 'not equivalent'}", file=out)
        if not same:
            status = EXIT_INVALID
    return status


def cmd_priors(args, out) -> int:
    model = _load(args.file)
    if kind_of(model) != "simnet":
        raise UsageError("priors needs a simnet file")
    f = sn.recover_priors(model)
    hyp = model.hypothesis
    for pt in hyp.domain:
        print(f"{hyp.label(pt)}\t{float(f.values[pt]):.17g}", file=out)
    return EXIT_OK


def cmd_redundancy(args, out) -> int:
    model = _load(args.file)
    if kind_of(model) != "simnet":
        raise UsageError("redundancy needs a simnet file")
    entries = sn.redundancy_report(model)
    hyp = model.hypothesis
    for e in entries:
        ctx = ",".join(e.context) or "-"
        flag = "incoherent" if e.incoherent else "ok"
        print(
            f"P({e.variable} | {ctx}, {hyp.label(e.point)})\tedges {e.edges[0]},{e.edges[1]}"
            f"\tmax difference {e.discrepancy:.3g}\t{flag}",
            file=out,
        )
    if not entries:
        print("no shared parameters", file=out)
    return EXIT_INVALID if any(e.incoherent for e in entries) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="asymnet", description="Bayesian networks, multinets and similarity networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a model file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("query", help="posterior over the hypothesis variables")
    s.add_argument("file")
    s.add_argument("--evidence", default="", help="clue evidence, e.g. g=male,b=yes")
    s.add_argument("--apriori-evidence", default="", help="evidence for the --priors network")
    s.add_argument("--priors", help="network of a-priori factors feeding the hypothesis")
    s.add_argument("--hypothesis", help="hypothesis variable ids (network files only)")
    s.add_argument("--json", action="store_true", help="print JSON")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("convert", help="similarity network to multinet")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("union", help="multinet to a single network")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_union)

    s = sub.add_parser("params", help="free parameter count")
    s.add_argument("file")
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("compare", help="compare two models")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--oracle", action="store_true", help="check joint equivalence by enumeration")
    s.add_argument("--evidence", help="also compare posteriors and costs for this evidence")
    s.add_argument("--hypothesis", help="hypothesis variable ids (network files only)")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("priors", help="hypothesis priors recovered from a similarity network")
    s.add_argument("file")
    s.set_defaults(func=cmd_priors)

    s = sub.add_parser("redundancy", help="parameters specified in more than one local network")
    s.add_argument("file")
    s.set_defaults(func=cmd_redundancy)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InconsistentEvidenceError as exc:
        print(f"error: inconsistent evidence: {exc}", file=sys.stderr)
        return EXIT_EVIDENCE
    except (OSError, ParseError, SchemaError, UsageError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ModelValidationError as exc:
        print(f"error: invalid model:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except AsymnetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
