"""
Command-line interface: builds, bounded checks, the fullness witness and trace replay.

Every command is a function of its input files and flags. Exit status is 0 when every
verdict passes, 1 when a verdict fails, and 2 on malformed input.
"""
import argparse
import json
import sys
from collections import namedtuple

import numpy as np

from . import ModelException, __version__
from .builder import BuildTrace, build_generic, replay
from .engine import check_ap_bounded, check_closure_axioms, check_fc_bounded, check_jep_bounded
from .registry import class_names, get_class
from .richness import ef_equivalence, homogeneity_check, richness_check
from .structures import dump_structure, load_structure, structure_to_json, write_dot
from .triangles import ConstantsTrianglesSpec, OMEGA, fullness_witness

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_MALFORMED = 2

CHECKS = ("ap", "jep", "fc", "closure", "rich", "homog", "ef")

# Default size bounds of the axiom checks, per class family
DEFAULT_BOUNDS = {"graphs": 3, "autograph": 2, "autograph-cyclefree": 2, "ct": 2}

RunConfig = namedtuple(
    "RunConfig",
    [
        "command",
        "target",
        "class_name",
        "seed",
        "seed_rng",
        "stages",
        "src_bound",
        "size_cap",
        "rounds",
        "k",
        "map_size",
        "legs",
        "anchor_set",
        "core",
        "constants",
        "triangle_floor",
        "structure",
        "other",
        "trace",
        "output",
        "dot",
        "json",
    ],
)
RunConfig.__new__.__defaults__ = (None,) * len(RunConfig._fields)

RunResult = namedtuple("RunResult", ["status", "document", "summary"])


def _positive(name, value, allow_zero=False):
    if value is None:
        return
    if value < 0 or (value == 0 and not allow_zero):
        raise ValueError("{} must be {}, not {}".format(name, "non-negative" if allow_zero else "positive", value))


def validate(config):
    """
    Raises
    ------
    ValueError : if a command, check or bound of ``config`` is invalid.
    """
    if config.command not in ("build", "check", "witness", "replay"):
        raise ValueError("Command must be build, check, witness or replay, not {}".format(config.command))
    if config.command == "check" and config.target not in CHECKS:
        raise ValueError("Check must be one of {}, not {}".format(", ".join(CHECKS), config.target))
    if config.command == "witness" and config.target != "fullness":
        raise ValueError("Witness must be fullness, not {}".format(config.target))
    _positive("stages", config.stages, allow_zero=True)
    _positive("src_bound", config.src_bound)
    _positive("size_cap", config.size_cap)
    _positive("rounds", config.rounds, allow_zero=True)
    _positive("k", config.k)
    _positive("map_size", config.map_size)


def _spec(config):
    kwargs = dict()
    if config.class_name.partition(":")[0] == "ct":
        if config.constants is not None:
            kwargs["constants"] = config.constants
        if config.triangle_floor is not None:
            kwargs["triangle_floor"] = config.triangle_floor
    return get_class(config.class_name, **kwargs)


def _required(config, *fields):
    for field in fields:
        if getattr(config, field) is None:
            raise ValueError("--{} is required for {} {}".format(field.replace("_", "-"), config.command, config.target or ""))


def _seed(spec, config):
    if config.seed is not None:
        return load_structure(config.seed)
    if config.seed_rng is not None:
        return spec.random_seed(np.random.default_rng(config.seed_rng))
    return spec.default_seed()


def _write(path, document):
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")


def run_build(config):
    _required(config, "class_name")
    spec = _spec(config)
    seed = _seed(spec, config)
    U, trace = build_generic(
        spec, seed, config.stages if config.stages is not None else 40, config.src_bound or 3, config.size_cap
    )
    if config.output is not None:
        dump_structure(U, config.output)
    if config.trace is not None:
        trace.dump(config.trace)
    if config.dot is not None:
        write_dot(U, config.dot)

    document = {
        "command": "build",
        "class": spec.name,
        "stages": trace.stages,
        "size": spec.size(U),
        "realized": trace.realized,
        "pending": trace.pending,
        "skipped": len(trace.skipped),
        "stop_reason": trace.stop_reason,
        "passed": trace.conforming,
        "structure": structure_to_json(U),
    }
    summary = [
        "Built {} in {} stages: {} elements, stopped on {}".format(spec.name, trace.stages, len(U), trace.stop_reason),
        "{} tasks already realized, {} pending, {} skipped".format(trace.realized, trace.pending, len(trace.skipped)),
    ]
    return RunResult(EXIT_PASS if trace.conforming else EXIT_FAIL, document, summary)


def run_check(config):
    target = config.target

    if target == "ef":
        _required(config, "structure", "other", "rounds")
        U, V = load_structure(config.structure), load_structure(config.other)
        equivalent = ef_equivalence(U, V, config.rounds)
        document = {"command": "check", "target": "ef", "rounds": config.rounds, "passed": equivalent}
        summary = ["Structures are {}equivalent up to {} rounds".format("" if equivalent else "not ", config.rounds)]
        return RunResult(EXIT_PASS if equivalent else EXIT_FAIL, document, summary)

    _required(config, "class_name")
    spec = _spec(config)

    if target in ("ap", "jep", "fc", "closure"):
        k = config.k if config.k is not None else DEFAULT_BOUNDS[spec.name.partition(":")[0]]
        if target == "closure":
            reports = list(check_closure_axioms(spec, k))
        elif target == "ap":
            reports = [check_ap_bounded(spec, k, config.legs or 2)]
        else:
            reports = [{"jep": check_jep_bounded, "fc": check_fc_bounded}[target](spec, k)]
        passed = all(report.passed for report in reports)
        document = {
            "command": "check",
            "target": target,
            "class": spec.name,
            "reports": [report.to_json() for report in reports],
            "passed": passed,
        }
        summary = [
            "{}: {} at bound {} ({} instances)".format(r.axiom.value, r.verdict.value, r.bound, r.checked) for r in reports
        ]
        summary.extend("  {}".format(r.counterexample) for r in reports if not r.passed)
        return RunResult(EXIT_PASS if passed else EXIT_FAIL, document, summary)

    _required(config, "structure")
    U = load_structure(config.structure)
    for name in ("anchor_set", "core"):
        ids = getattr(config, name) or ()
        if not set(ids) <= set(U.universe):
            flag = name.replace("_", "-")
            raise ValueError("--{} must list elements of the structure, not {}".format(flag, sorted(ids)))
    if target == "rich":
        report = richness_check(spec, U, config.src_bound or 3, config.anchor_set)
        summary = ["Richness coverage {:.3f} of {} tasks".format(report.coverage, report.total)]
    else:
        report = homogeneity_check(spec, U, config.map_size or 1, config.rounds, config.core)
        summary = ["Homogeneity: {:.3f} of {} maps extend over the core".format(report.fraction, report.total)]
    document = {"command": "check", "target": target, "class": spec.name, "report": report.to_json()}
    document["passed"] = report.passed
    return RunResult(EXIT_PASS if report.passed else EXIT_FAIL, document, summary)


def run_witness(config):
    spec = ConstantsTrianglesSpec(
        OMEGA,
        constants=8 if config.constants is None else config.constants,
        triangle_floor=3 if config.triangle_floor is None else config.triangle_floor,
    )
    report = fullness_witness(
        spec, config.stages if config.stages is not None else 150, config.size_cap, config.src_bound or 3
    )
    if config.output is not None:
        dump_structure(report.M, config.output)
    if config.dot is not None:
        write_dot(report.U, config.dot)
    document = dict(command="witness", target="fullness", **report.to_json())
    summary = ["{}: {}".format(clause, "pass" if value else "fail") for clause, value in report.clauses.items()]
    return RunResult(EXIT_PASS if report.passed else EXIT_FAIL, document, summary)


def run_replay(config):
    _required(config, "class_name", "trace")
    spec = _spec(config)
    trace = BuildTrace.load(config.trace)
    U = replay(spec, trace.seed, trace)
    replayed = json.dumps(structure_to_json(U), indent=2, sort_keys=True)

    identical = None
    if config.structure is not None:
        with open(config.structure) as f:
            identical = f.read().strip() == replayed
    if config.output is not None:
        dump_structure(U, config.output)

    document = {"command": "replay", "class": spec.name, "stages": trace.stages, "identical": identical}
    document["passed"] = identical is not False
    summary = ["Replayed {} stages of {}: {} elements".format(trace.stages, spec.name, len(U))]
    if identical is not None:
        summary.append("Replayed structure is {}identical to {}".format("" if identical else "not ", config.structure))
    return RunResult(EXIT_PASS if document["passed"] else EXIT_FAIL, document, summary)


def run(config):
    """
    Execute a run.

    Parameters
    ----------
    config : RunConfig

    Returns
    -------
    result : RunResult
        Exit status, JSON document and human-readable summary.

    Raises
    ------
    ValueError : if the configuration is invalid.
    ModelException : if an input file is malformed.
    OSError : if an input file cannot be read or an output file cannot be written.
    """
    validate(config)
    runner = {"build": run_build, "check": run_check, "witness": run_witness, "replay": run_replay}[config.command]
    result = runner(config)
    if config.command == "check" and config.output is not None:
        _write(config.output, result.document)
    return result


def _id_list(value):
    """ Comma-separated element ids. An empty string is the empty set. """
    try:
        return tuple(int(item) for item in value.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("Element ids must be comma-separated integers, not {}".format(value))


def _parser():
    parser = argparse.ArgumentParser(prog="richgen", description="Build and audit rich models of amalgamation classes.")
    parser.add_argument("--version", action="version", version="%(prog)s {}".format(__version__))
    parser.add_argument("--json", action="store_true", help="Print a JSON document instead of a summary.")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--class", dest="class_name", help="Class name: {}.".format(", ".join(class_names())))
    common.add_argument("--constants", type=int, help="Index of the last numbered constant of ct classes.")
    common.add_argument("--triangle-floor", type=int, help="Triangle floor of ct:omega.")
    common.add_argument("--stages", type=int)
    common.add_argument("--src-bound", type=int)
    common.add_argument("--size-cap", type=int)
    common.add_argument("--output", help="Output file.")
    common.add_argument("--dot", help="DOT export of the resulting structure.")

    commands = parser.add_subparsers(dest="command")
    commands.required = True

    build = commands.add_parser("build", parents=[common], help="Build a stage approximation of a rich model.")
    build.add_argument("--seed", help="Seed structure file. Default is the smallest member of the class.")
    build.add_argument("--seed-rng", type=int, help="Draw a random seed member with this generator seed.")
    build.add_argument("--trace", help="Trace output file.")

    check = commands.add_parser("check", parents=[common], help="Run a bounded check.")
    check.add_argument("target", choices=CHECKS)
    check.add_argument("--k", type=int, help="Size bound of axiom checks.")
    check.add_argument("--legs", type=int, choices=(1, 2), help="Partial legs of each ap instance. Default is 2.")
    check.add_argument("--rounds", type=int)
    check.add_argument("--map-size", type=int)
    check.add_argument("--structure", help="Structure file.")
    check.add_argument("--other", help="Second structure file of the ef check.")
    check.add_argument(
        "--anchor-set", type=_id_list, help="Elements anchoring the tasks of the rich check. Default is every element."
    )
    check.add_argument(
        "--core", type=_id_list, help="Core region of the homog check. Default is the eight least elements."
    )

    witness = commands.add_parser("witness", parents=[common], help="Reproduce a counterexample.")
    witness.add_argument("target", choices=("fullness",))

    replay_ = commands.add_parser("replay", parents=[common], help="Replay a build trace.")
    replay_.add_argument("--trace", required=True, help="Trace file.")
    replay_.add_argument("--structure", help="Structure file the replay must reproduce.")

    return parser


def parse_config(argv=None):
    """ RunConfig from command-line arguments. """
    args = vars(_parser().parse_args(argv))
    return RunConfig(**{field: args.get(field) for field in RunConfig._fields})


def main(argv=None):
    """ Entry point of the ``richgen`` command. Returns the exit status. """
    config = parse_config(argv)
    try:
        result = run(config)
    except (ModelException, ValueError, KeyError, OSError) as e:
        print("richgen: error: {}".format(e), file=sys.stderr)
        return EXIT_MALFORMED

    if config.json:
        print(json.dumps(result.document, indent=2, sort_keys=True))
    else:
        print("\n".join(result.summary))
    return result.status
