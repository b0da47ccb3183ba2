"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 budget exceeded, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .algebra import MatrixFamily
from .classify import ClassifyConfig, classify, reduce_family
from .entailment import entails
from .errors import BudgetExceeded, ValidationError, WitnessRejected
from .fileformat import dump_instance, dumps, emit_report, parse_input
from .free import generate_free_algebra
from .leibniz import leibniz_congruence
from .reductions import (
    GenCloInstance,
    build_flat,
    build_natural,
    clone_member,
    random_instance,
    validate_genclo_instance,
)
from .terms import format_term, parse_term_groups, var_name

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def _family(args) -> MatrixFamily:
    value = parse_input(args.input)
    if not isinstance(value, MatrixFamily):
        raise ValidationError("expected a file with a 'matrices' key")
    return value


def _instance(args, natural: bool) -> GenCloInstance:
    if args.input is None:
        if args.seed is None:
            raise ValidationError("give an instance file or --seed")
        return random_instance(args.seed, natural=natural)
    value = parse_input(args.input)
    if not isinstance(value, GenCloInstance):
        raise ValidationError("expected a file with 'algebra' and 'h' keys")
    return validate_genclo_instance(value, natural=natural)


def _out(text: str | bytes) -> None:
    if isinstance(text, bytes):
        sys.stdout.buffer.write(text)
    else:
        sys.stdout.write(text)
    sys.stdout.flush()


def cmd_classify(args) -> int:
    family = _family(args)
    config = ClassifyConfig(
        naive_filters=args.naive_filters,
        witness_cap=args.witness_cap,
        fast_paths=args.fast_paths,
    )
    if args.budget_free is not None:
        config.free_budget = args.budget_free
    if args.budget_subuniverses is not None:
        config.subuniverse_budget = args.budget_subuniverses
    report = classify(family, config)
    _out(emit_report(report, args.report, witness_cap=args.witness_cap, timings=args.timings))
    return EXIT_BUDGET if report.any_unknown else EXIT_OK


def cmd_reduce(args) -> int:
    _out(dump_instance(reduce_family(_family(args))))
    return EXIT_OK


def cmd_leibniz(args) -> int:
    members = []
    for m in _family(args).members:
        res = leibniz_congruence(m)
        members.append(
            {
                "class_of": list(res.partition.class_of),
                "blocks": res.partition.blocks(),
                "reduced": res.partition.is_identity(),
                "translations_used": res.translations_used,
            }
        )
    _out(dumps({"members": members}))
    return EXIT_OK


def cmd_free(args) -> int:
    family = _family(args)
    budget = args.budget_free if args.budget_free is not None else 1_000_000
    free = generate_free_algebra(family, args.arity, budget)
    elements = [format_term(free.representative(i)) for i in range(len(free))]
    if args.report == "text":
        lines = [f"arity {args.arity}: {len(free)} elements"] + [f"  {i}: {t}" for i, t in enumerate(elements)]
        _out("\n".join(lines) + "\n")
    else:
        _out(
            dumps(
                {
                    "arity": args.arity,
                    "size": len(free),
                    "generator_indices": list(free.generator_indices),
                    "elements": elements,
                }
            )
        )
    return EXIT_OK


def cmd_entails(args) -> int:
    family = _family(args)
    premises = parse_term_groups(args.premises) if args.premises else []
    conclusion = parse_term_groups(args.conclusion)
    if len(conclusion) != 1:
        raise ValidationError("--conclusion must hold exactly one term")
    res = entails(family, premises, conclusion[0])
    doc = {"holds": res.holds, "counterexample": None}
    if res.counterexample is not None:
        member, assignment = res.counterexample
        doc["counterexample"] = {
            "member": member,
            "assignment": {var_name(i): v for i, v in enumerate(assignment)},
        }
    if args.report == "text":
        if res.holds:
            text = "entails: YES\n"
        else:
            cx = doc["counterexample"]
            vals = ", ".join(f"{k}={v}" for k, v in cx["assignment"].items())
            text = f"entails: NO (member {cx['member']}, {vals})\n"
        _out(text)
    else:
        _out(dumps(doc))
    return EXIT_OK


def cmd_gen(args) -> int:
    natural = args.kind == "natural"
    inst = _instance(args, natural)
    built = build_natural(inst) if natural else build_flat(inst)
    _out(dump_instance(built.matrix))
    return EXIT_OK


def cmd_clone_member(args) -> int:
    inst = _instance(args, natural=False)
    budget = args.budget_free if args.budget_free is not None else 1_000_000
    member = clone_member(inst, budget)
    if args.report == "text":
        _out(f"clone member: {'YES' if member else 'NO'}\n")
    else:
        _out(dumps({"member": member}))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run

    ok = True
    for name, passed, detail in run(args.seed or 0):
        ok &= passed
        _out(f"{'PASS' if passed else 'FAIL'} {name}: {detail}\n")
    return EXIT_OK if ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leibniz-hierarchy",
        description="Place the logic of finite matrices in the Leibniz hierarchy.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("json", "text"), default="json")
    common.add_argument("--budget-free", type=int, default=None, help="element cap for free algebras")
    common.add_argument("--seed", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a matrix family")
    p.add_argument("input", help="instance file, or - for stdin")
    p.add_argument("--budget-subuniverses", type=int, default=None)
    p.add_argument("--naive-filters", action="store_true", help="enumerate filters over all subsets")
    p.add_argument("--witness-cap", type=int, default=8)
    p.add_argument("--fast-paths", action="store_true", help="cross-check closed-form trivial cases")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", parents=[common], help="print the reduced family")
    p.add_argument("input")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("leibniz", parents=[common], help="Leibniz congruence of every member")
    p.add_argument("input")
    p.set_defaults(func=cmd_leibniz)

    p = sub.add_parser("free", parents=[common], help="free algebra on K generators")
    p.add_argument("input")
    p.add_argument("--arity", type=int, required=True)
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("entails", parents=[common], help="decide a consequence")
    p.add_argument("input")
    p.add_argument("--premises", default="", help='e.g. "(x) ((imp x y))"')
    p.add_argument("--conclusion", required=True, help='e.g. "(y)"')
    p.set_defaults(func=cmd_entails)

    p = sub.add_parser("gen", parents=[common], help="build a matrix from a clone instance")
    p.add_argument("kind", choices=("natural", "flat"))
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("clone-member", parents=[common], help="is h a unary term operation?")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_clone_member)

    p = sub.add_parser("selftest", parents=[common], help="run the oracle-equivalence checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (WitnessRejected, AssertionError) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
