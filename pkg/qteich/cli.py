"""
    qteich.cli
    ~~~~~~~~~~

    Command line interface.

    Every command returns a report (a dict) that is printed as json or,
    with --format human, as yaml. Exit codes: 0 success, 1 domain error or
    failed check, 2 malformed input.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import argparse
import pathlib
import sys
from dataclasses import dataclass
from logging.config import dictConfig

import numpy as np
import yaml

from . import holonomy as hol
from .common import InputError, QteichError, logger, relative_residual
from .fixtures import fixture_names, load_triangulation
from .intertwine import (
    compose_path,
    mapping_class_invariant,
    pentagon_check,
    roundtrip_check,
    solve_flip_intertwiner,
    transported_rep,
)
from .qalgebra import QParams, central_element, parse
from .representation import classify, random_rep, rep_from_weights
from .schema import RunConfig, Tolerances, build, build_config, tolerances_from
from .storage import (
    dumps,
    jsonable,
    load_rep,
    load_weights,
    parse_indices,
    parse_weights,
    rep_to_dict,
    store_rep,
    triangulation_to_dict,
    weights_to_dict,
)
from .surface import flip, flip_move, flip_path, punctures, sigma_matrix, validate
from .transport import EdgeWeights, flip_weights, peripheral_load, transport

#: Command name -> callable(args, settings) -> report
COMMANDS = {}


def register(func):
    """Register a command, named after the suffix of the function name.

    e.g. cmd_rep_build is the command rep-build.
    """
    name = func.__name__.split("_", 1)[1].replace("_", "-")
    COMMANDS[name] = func
    return func


@dataclass(frozen=True)
class Settings:
    q: QParams
    format: str
    seed: int
    max_dim: int
    depth: int
    tolerances: Tolerances

    def rng(self):
        return np.random.default_rng(self.seed)


def configure_logging(verbosity):
    level = ["WARNING", "INFO", "DEBUG"][min(verbosity, 2)]
    dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "default": {"format": "[%(asctime)s] %(levelname)s in %(module)s: %(message)s"}
            },
            "handlers": {
                "stderr": {
                    "class": "logging.StreamHandler",
                    "stream": "ext://sys.stderr",
                    "formatter": "default",
                }
            },
            "loggers": {"qteich": {"level": level, "handlers": ["stderr"]}},
        }
    )


def load_settings(args) -> Settings:
    """Merge configuration files and command line flags, flags first."""
    config = build_config(args.config) if args.config else build(RunConfig, {}, "configuration")
    overrides = dict(config.tolerances or {})
    for item in args.tolerance or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"tolerance override {item!r} is not name=value")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"tolerance {key} is not a number")

    def pick(flag, value):
        return value if flag is None else flag

    return Settings(
        q=QParams(pick(args.N, config.N), pick(args.c, config.c)),
        format=pick(args.format, config.format),
        seed=pick(args.seed, config.seed),
        max_dim=pick(args.max_dim, config.max_dim),
        depth=pick(args.depth, config.depth),
        tolerances=tolerances_from(overrides),
    )


def render(report, fmt):
    if fmt == "human":
        return yaml.safe_dump(jsonable(report), sort_keys=True, default_flow_style=None)
    return dumps(report)


def _weights(text) -> EdgeWeights:
    path = pathlib.Path(text)
    if path.suffix in (".json", ".yaml", ".yml") or path.exists():
        return load_weights(path)
    return parse_weights(text)


def _source_rep(args, settings):
    """The representation a command works on: a file, weights or random."""
    if getattr(args, "rep", None):
        t = load_triangulation(args.surface) if args.surface else None
        return load_rep(args.rep, t, settings.max_dim)
    if not args.surface:
        raise InputError("give --rep or --surface")
    t = load_triangulation(args.surface)
    if args.weights:
        return rep_from_weights(t, settings.q, _weights(args.weights).values, args.k, settings.max_dim)
    return random_rep(t, settings.q, settings.rng(), settings.max_dim)


def _check(report, passed):
    report["passed"] = bool(passed)
    report["verdict"] = "PASS" if passed else "FAIL"
    return report


def _side(side):
    return [side[0] + 1, side[1] + 1]


#################
# Commands
#################


@register
def cmd_validate(args, settings):
    t = load_triangulation(args.surface)
    report = jsonable(validate(t))
    report["punctures"] = [
        {
            "corners": [_side(c) for c in p.corners],
            "edges": [e + 1 for e in p.edges],
            "boundary": p.boundary,
        }
        for p in punctures(t)
    ]
    return report


@register
def cmd_sigma(args, settings):
    t = load_triangulation(args.surface)
    sigma = sigma_matrix(t)
    H = central_element(sigma, settings.q)
    return {
        "sigma": sigma.astype(int).tolist(),
        "central": {"exponents": list(H.exponents), "coefficient": str(H.coefficient)},
    }


@register
def cmd_flip(args, settings):
    t = load_triangulation(args.surface)
    report = {}
    if args.edge is not None:
        edge = args.edge - 1
        move = flip_move(t, edge)
        flipped, correspondence = flip(t, edge)
        report.update(
            triangulation=triangulation_to_dict(flipped),
            edge_map={str(a + 1): b + 1 for a, b in correspondence.items()},
            positions={k: v + 1 for k, v in sorted(move.positions.items())},
        )
    if args.to:
        path = flip_path(t, load_triangulation(args.to), settings.depth)
        report["path"] = None if path is None else [e + 1 for e in path]
    if not report:
        raise InputError("give --edge or --to")
    return report


@register
def cmd_transport(args, settings):
    t = load_triangulation(args.surface)
    x = _weights(args.weights)
    result = transport(t, x, parse_indices(args.path), settings.tolerances.singular)
    return {
        "triangulation": triangulation_to_dict(result.triangulation),
        "weights": weights_to_dict(result.weights)["weights"],
        "steps": [
            {
                "step": s.step + 1,
                "edge": s.edge + 1,
                "diagonal": s.diagonal,
                "distance": s.distance,
                "generic": s.generic,
            }
            for s in result.steps
        ],
        "peripheral_load": [peripheral_load(x), peripheral_load(result.weights)],
    }


@register
def cmd_rep_build(args, settings):
    r = _source_rep(args, settings)
    if args.out:
        store_rep(args.out, r)
        logger.info(f"Representation written to {args.out}")
    return rep_to_dict(r)


@register
def cmd_classify(args, settings):
    r = _source_rep(args, settings)
    x, h = classify(r, settings.tolerances.scalar)
    return {"x": list(x), "h": h}


@register
def cmd_intertwine_flip(args, settings):
    r = _source_rep(args, settings)
    edge = args.edge - 1
    move = flip_move(r.triangulation, edge)
    if args.target:
        flipped, _ = flip(r.triangulation, edge)
        target = load_rep(args.target, flipped, settings.max_dim)
    else:
        target = transported_rep(r, move)
    L = solve_flip_intertwiner(r, target, move, settings.tolerances.intertwine)
    x, h = classify(target, settings.tolerances.scalar)
    report = {
        "edge": args.edge,
        "dim": L.dim,
        "residual": L.residual,
        "normalization": L.normalization,
        "target": {"x": list(x), "h": h},
    }
    if args.matrix:
        report["matrix"] = L.matrix
    return report


@register
def cmd_intertwine_path(args, settings):
    r = _source_rep(args, settings)
    path = parse_indices(args.path)
    L = compose_path([r], path, settings.tolerances.intertwine)
    x, h = classify(L.target, settings.tolerances.scalar)
    report = {
        "path": [e + 1 for e in path],
        "dim": L.dim,
        "residual": L.residual,
        "target": {"x": list(x), "h": h},
    }
    if args.matrix:
        report["matrix"] = L.matrix
    return report


@register
def cmd_pentagon_check(args, settings):
    check = pentagon_check(settings.q, settings.rng(), settings.tolerances.scalar_residual)
    report = {"N": check.N, "dim": check.dim, "residual": check.residual}
    return _check(report, check.passed)


def _loop_report(t, x, loop, lift):
    T = hol.holonomy(t, x, loop)
    return {
        "face": loop.start + 1,
        "edges": [t.edge_of((f, s)) + 1 for f, s in _loop_sides(t, loop)],
        "sl2": T.sl2(),
        "trace": T.trace_sl2(),
        "lift": lift,
    }


def _loop_sides(t, loop):
    face = loop.start
    for slot in loop.slots:
        yield face, slot
        face = t.partner((face, slot))[0]


@register
def cmd_holonomy(args, settings):
    t = load_triangulation(args.surface)
    x = _weights(args.weights)
    lift = "principal square root of the determinant"
    tol = settings.tolerances.holonomy
    report = {}
    if args.loop:
        loop = hol.dual_path_from_edges(t, args.face - 1, parse_indices(args.loop))
        report["loop"] = _loop_report(t, x, loop, lift)
        return report

    report["generators"] = {
        str(edge + 1): _loop_report(t, x, loop, lift)
        for edge, loop in hol.generator_loops(t).items()
    }
    eigen = []
    for puncture in punctures(t):
        if puncture.boundary:
            continue
        value = hol.puncture_eigenvalue(t, x, puncture)
        eigen.append(dict(jsonable(value), corner=_side(puncture.corners[0])))
    report["punctures"] = eigen
    passed = all(e["residual"] <= tol for e in eigen)

    if not t.boundary_edges:
        tree = hol.dual_tree(t)
        signs = dict(zip(tree.generators, parse_signs(args.signs, len(tree.generators))))
        load = hol.total_load_check(t, x, signs, settings.tolerances.load)
        report["total_load"] = dict(
            jsonable(load), signs={str(k + 1): v for k, v in load.signs.items()}
        )
        passed = passed and load.residual <= settings.tolerances.load
    return _check(report, passed)


def parse_signs(text, count):
    if not text:
        return [1] * count
    try:
        values = [int(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"cannot read lift signs {text!r}")
    if len(values) != count or any(v not in (1, -1) for v in values):
        raise InputError(f"give {count} lift signs, each 1 or -1")
    return values


@register
def cmd_roundtrip(args, settings):
    t = load_triangulation(args.surface)
    tol = settings.tolerances.holonomy
    x = _weights(args.weights)
    back = hol.roundtrip_weights(t, x)
    report = {"weights": back.values, "residual": relative_residual(back.as_array(), x.as_array())}
    # boundary edges carry no geometry
    interior = [e for e in range(t.edge_count) if t.is_interior(e)]
    flips = {}
    for edge in interior:
        if t.is_self_folded(edge):
            continue
        geometric = hol.flipped_weights(t, x, edge)
        algebraic = flip_weights(x, flip_move(t, edge), settings.tolerances.singular)
        flips[str(edge + 1)] = relative_residual(
            geometric.as_array()[interior], algebraic.as_array()[interior]
        )
    report["flips"] = flips
    passed = report["residual"] <= tol and all(v <= tol for v in flips.values())

    if args.edge is not None:
        r = rep_from_weights(t, settings.q, x.values, args.k, settings.max_dim)
        check = roundtrip_check(r, args.edge - 1, settings.tolerances.scalar_residual)
        report["intertwiner"] = {"edge": args.edge, "dim": check.dim, "residual": check.residual}
        passed = passed and check.passed
    return _check(report, passed)


@register
def cmd_invariant(args, settings):
    t = load_triangulation(args.surface)
    x = _weights(args.weights)
    perm = parse_indices(args.perm)
    if len(perm) != t.edge_count:
        raise InputError(f"the relabeling lists {len(perm)} edges, expected {t.edge_count}")
    report = mapping_class_invariant(
        t,
        settings.q,
        x,
        parse_indices(args.path),
        perm,
        args.k,
        settings.tolerances.intertwine,
        settings.tolerances.holonomy,
    )
    return jsonable(report)


@register
def cmd_normal_form(args, settings):
    t = load_triangulation(args.surface)
    sigma = sigma_matrix(t)
    p = parse(args.expr, t.edge_count, sigma, settings.q)
    return {
        "normal_form": p.format(),
        "terms": [
            {"exponents": list(exponents), "coefficient": str(coef)}
            for exponents, coef in p.terms
        ],
    }


#################
# Parser
#################


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--config", action="append", help="yaml run configuration")
    common.add_argument("--format", choices=("json", "human"))
    common.add_argument("--N", type=int, help="order of q^2")
    common.add_argument("--c", type=int, help="q = -exp(i pi c / N)")
    common.add_argument("--seed", type=int)
    common.add_argument("--max-dim", type=int, dest="max_dim")
    common.add_argument("--depth", type=int, help="flip path search depth")
    common.add_argument("--tolerance", action="append", metavar="NAME=VALUE")

    parser = argparse.ArgumentParser(
        prog="qteich",
        description="Local representations of the quantum Teichmueller space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    weights_help = (
        "weights file or comma separated values (--weights=-1,2 when the first is negative)"
    )
    surface_help = f"fixture ({', '.join(fixture_names())}) or triangulation file"

    def rep_source(p):
        p.add_argument("--rep", help="representation file")
        p.add_argument("--surface", help=surface_help)
        p.add_argument("--weights", help=weights_help)
        p.add_argument("--k", type=int, default=0, help="load q^(2k) of the standard rep")

    p = add("validate", "counts, Euler characteristic and punctures")
    p.add_argument("--surface", required=True, help=surface_help)

    p = add("sigma", "sigma matrix and central element")
    p.add_argument("--surface", required=True, help=surface_help)

    p = add("flip", "diagonal exchange or flip path search")
    p.add_argument("--surface", required=True, help=surface_help)
    p.add_argument("--edge", type=int)
    p.add_argument("--to", help="target triangulation for a flip path search")

    p = add("transport", "edge weights along a flip path")
    p.add_argument("--surface", required=True, help=surface_help)
    p.add_argument("--weights", required=True, help=weights_help)
    p.add_argument("--path", default="")

    p = add("rep-build", "build a local representation")
    rep_source(p)
    p.add_argument("--out", help="write the representation file")

    p = add("classify", "edge weights and central load of a representation")
    rep_source(p)

    p = add("intertwine-flip", "intertwiner of one diagonal exchange")
    rep_source(p)
    p.add_argument("--edge", type=int, required=True)
    p.add_argument("--target", help="target representation file")
    p.add_argument("--matrix", action="store_true", help="include the matrix")

    p = add("intertwine-path", "intertwiner along a flip path")
    rep_source(p)
    p.add_argument("--path", required=True)
    p.add_argument("--matrix", action="store_true", help="include the matrix")

    add("pentagon-check", "five flips of the pentagon compose to a scalar")

    p = add("holonomy", "holonomy of dual loops and peripheral data")
    p.add_argument("--surface", required=True, help=surface_help)
    p.add_argument("--weights", required=True, help=weights_help)
    p.add_argument("--loop", help="edges crossed, comma separated")
    p.add_argument("--face", type=int, default=1, help="start face of --loop")
    p.add_argument("--signs", help="lift sign per generator, comma separated")

    p = add("roundtrip", "weights from the developed surface and flip consistency")
    p.add_argument("--surface", required=True, help=surface_help)
    p.add_argument("--weights", required=True, help=weights_help)
    p.add_argument("--edge", type=int, help="also check the flip-back intertwiner")
    p.add_argument("--k", type=int, default=0)

    p = add("invariant", "invariants of a mapping class intertwiner")
    p.add_argument("--surface", required=True, help=surface_help)
    p.add_argument("--weights", required=True, help=weights_help)
    p.add_argument("--path", required=True)
    p.add_argument("--perm", required=True, help="image of every edge, comma separated")
    p.add_argument("--k", type=int, default=0)

    p = add("normal-form", "normal form of a polynomial literal")
    p.add_argument("--surface", required=True, help=surface_help)
    p.add_argument("--expr", required=True)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        settings = load_settings(args)
        report = COMMANDS[args.command](args, settings)
    except QteichError as ex:
        logger.error(str(ex))
        error = {"error": type(ex).__name__, "message": str(ex), "problems": ex.problems}
        if getattr(ex, "code", None):
            error["code"] = ex.code
        sys.stderr.write(dumps(error))
        return ex.exit_code

    sys.stdout.write(render(report, settings.format))
    return 0 if report.get("passed", True) else 1


if __name__ == "__main__":
    sys.exit(main())
