"""Command-line front end for lipgeo.

Every command reads JSON inputs, writes one report and exits with

* ``0`` yes / valid,
* ``1`` no / invalid,
* ``2`` input error (unparsable file, schema violation, non-admissible input),
* ``3`` inconclusive: a series comparison did not resolve within the bound.

JSON reports carry the full effective configuration and are serialized
canonically (sorted keys, fixed indentation) so identical runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .complexes import (
    HolderComplex,
    canonicalize,
    complex_from_json,
    complex_to_json,
    equivalent as complexes_equivalent,
    horn_exponent,
    is_canonical,
    realize_model,
    to_dot,
    to_svg,
)
from .exponents import (
    Arc,
    LipgeoError,
    ResolutionBoundExceeded,
    arc_from_json,
    arc_tord,
    expr_from_json,
    expr_to_json,
    format_exponent,
    max_exponent_bound,
    rational,
)
from .metriclab import (
    PROJECTION_PLAN,
    GermModel,
    ModelArc,
    PancakeDecomposition,
    ScaleSamplePlan,
    horn_exponent_numeric,
    link_svg,
    lne_report,
    meridian_arcs,
    model_from_json,
    model_to_json,
    pancake_check,
    projection_experiment,
    tangent_cone_sample,
)
from .pizza import (
    DEFAULT_DEPTH,
    equivalent as pizza_equivalent,
    extraction,
    pizza_from_json,
    validate,
)

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3

#: horn realizations use a deeper, coarser plan; see ``horn --numeric``
HORN_PLAN = ScaleSamplePlan(tmin_exp=-60, tmax_exp=-20, resolution=16)


class InputError(Exception):
    """Raised for anything the user has to fix in the inputs."""


class Outcome:
    """Result of one command: exit code, JSON body and optional rendered text."""

    def __init__(self, code: int, body: dict, text: str | None = None) -> None:
        self.code = code
        self.body = body
        self.text = text


# ---------------------------------------------------------------------------
# input helpers


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _unwrap(data: Any, key: str) -> Any:
    """Accept a bare object or a lipgeo report whose result holds ``key``."""
    if isinstance(data, dict) and isinstance(data.get("result"), dict) and key in data["result"]:
        return data["result"][key]
    return data


def load_complex(path: str) -> HolderComplex:
    return complex_from_json(_unwrap(_load_json(path), "complex"))


def load_model(path: str) -> GermModel:
    return model_from_json(_unwrap(_load_json(path), "model"))


def load_pizza(path: str):
    return pizza_from_json(_unwrap(_load_json(path), "pizza"))


def load_function(path: str):
    data = _load_json(path)
    if isinstance(data, dict) and "function" in data:
        data = data["function"]
    return expr_from_json(data)


def load_arcs(path: str) -> list[Arc | ModelArc]:
    """A JSON list (or ``{"arcs": [...]}``) of symbolic arcs or ``{"patch", "s"}`` handles."""
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("arcs")
    if not isinstance(data, list) or not data:
        raise InputError(f"{path}: expected a non-empty list of arcs")
    out: list[Arc | ModelArc] = []
    for item in data:
        if not isinstance(item, dict):
            raise InputError(f"{path}: arc entries must be objects")
        if "patch" in item:
            out.append(ModelArc(int(item["patch"]), float(item["s"])))
        else:
            try:
                out.append(arc_from_json(item))
            except (KeyError, TypeError) as exc:
                raise InputError(f"{path}: malformed arc {item!r}") from exc
    return out


def load_decomposition(path: str) -> PancakeDecomposition:
    data = _load_json(path)
    try:
        groups = tuple(tuple(int(p) for p in g) for g in data["groups"])
        betas = tuple(rational(b) for b in data["betas"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: decomposition needs 'groups' and 'betas'") from exc
    return PancakeDecomposition(groups, betas)


def _plan(args: argparse.Namespace, base: ScaleSamplePlan) -> ScaleSamplePlan:
    changes = {}
    for flag, name in (("tmin", "tmin_exp"), ("tmax", "tmax_exp"), ("levels", "levels"),
                       ("resolution", "resolution"), ("seed", "seed"), ("tol", "tol")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    return replace(base, **changes)


def _arc_json(g: Arc | ModelArc) -> Any:
    if isinstance(g, ModelArc):
        return {"patch": g.patch, "s": g.s}
    return {"coords": [str(s) for s in g.coords], "param": g.param}


# ---------------------------------------------------------------------------
# commands


def cmd_canonicalize(args: argparse.Namespace) -> Outcome:
    c = load_complex(args.complex)
    canon = canonicalize(c)
    ok, violations = is_canonical(canon)
    body = {
        "complex": complex_to_json(canon),
        "canonical": ok,
        "violations": [{"kind": v.kind, "vertex": v.vertex, "edges": list(v.edges)} for v in violations],
        "input_vertices": len(c.vertices),
        "input_edges": len(c.edges),
    }
    text = None
    if args.format == "dot":
        text = to_dot(canon)
    elif args.format == "svg":
        text = to_svg(canon)
    elif args.format == "text":
        text = "\n".join(f"{e.id}: {e.ends[0]} -- {e.ends[1]}  beta={format_exponent(e.beta)}"
                         for e in canon.edges)
    return Outcome(EXIT_YES, body, text)


def cmd_compare_inner(args: argparse.Namespace) -> Outcome:
    c1, c2 = load_complex(args.first), load_complex(args.second)
    same, witness = complexes_equivalent(c1, c2)
    body = {"equivalent": same, "witness": witness,
            "canonical": [complex_to_json(canonicalize(c1)), complex_to_json(canonicalize(c2))]}
    return Outcome(EXIT_YES if same else EXIT_NO, body,
                   "equivalent" if same else "not equivalent")


def cmd_horn(args: argparse.Namespace) -> Outcome:
    c = load_complex(args.complex)
    canon = canonicalize(c)
    try:
        beta = horn_exponent(canon)
    except LipgeoError as exc:
        body = {"horn": False, "reason": str(exc), "canonical": complex_to_json(canon)}
        return Outcome(EXIT_NO, body, f"not a horn: {exc}")
    body: dict = {"horn": True, "exponent": format_exponent(beta), "canonical": complex_to_json(canon)}
    text = f"horn exponent {format_exponent(beta)}"
    code = EXIT_YES
    if args.numeric:
        plan = _plan(args, HORN_PLAN)
        est = horn_exponent_numeric(realize_model(c).model, plan)
        agree = abs(est - float(beta)) <= plan.tol
        body["numeric"] = {"estimate": est, "agrees": agree, "plan": plan.to_dict()}
        text += f"; numeric estimate {est:.4f}"
        code = EXIT_YES if agree else EXIT_NO
    return Outcome(code, body, text)


def cmd_realize(args: argparse.Namespace) -> Outcome:
    r = realize_model(load_complex(args.complex))
    body = {"model": model_to_json(r.model), "realization": r.to_dict()}
    text = None
    if args.format == "svg":
        text = link_svg(r.model, 0.1, ScaleSamplePlan(), axes=(1, 2))
    return Outcome(EXIT_YES, body, text)


def cmd_pizza_extract(args: argparse.Namespace) -> Outcome:
    f = load_function(args.function)
    ex = extraction(f, args.beta, args.depth)
    body = {
        "function": expr_to_json(f),
        "pizza": ex.pizza.to_json(),
        "valid": not validate(ex.pizza),
        "special_arcs": [str(s) for s in ex.special],
        "scanned": [{"arc": str(s.arc.coords[1]), "order": format_exponent(s.order),
                     "depth": format_exponent(s.depth)} for s in ex.scanned],
    }
    lines = [f"triangle beta {format_exponent(ex.beta)}"]
    for i, s in enumerate(ex.pizza.slices):
        mu = "point" if s.mu is None else f"mu(q) = {format_exponent(s.mu.a)} q + {format_exponent(s.mu.b)}"
        lines.append(f"slice {i}: q {format_exponent(s.q_in)} -> {format_exponent(s.q_out)}, "
                     f"beta {format_exponent(s.beta)}, {mu}")
    return Outcome(EXIT_YES, body, "\n".join(lines))


def cmd_pizza_compare(args: argparse.Namespace) -> Outcome:
    p1, p2 = load_pizza(args.first), load_pizza(args.second)
    for name, p in (("first", p1), ("second", p2)):
        bad = validate(p)
        if bad:
            raise InputError(f"{name} pizza is invalid: slice {bad[0].slice}: {bad[0].clause}")
    same = pizza_equivalent(p1, p2, oriented=not args.unoriented)
    body = {"equivalent": same, "oriented": not args.unoriented}
    return Outcome(EXIT_YES if same else EXIT_NO, body, "equivalent" if same else "not equivalent")


def cmd_verify(args: argparse.Namespace) -> Outcome:
    model = load_model(args.model)
    plan = _plan(args, ScaleSamplePlan())
    if args.decomposition:
        rep = pancake_check(model, load_decomposition(args.decomposition), plan)
        return Outcome(EXIT_YES if rep.valid else EXIT_NO, {"pancake": rep.to_dict()}, rep.label)
    arcs = load_arcs(args.arcs) if args.arcs else meridian_arcs(model, args.arcs_per_patch)
    mode = "weak" if args.weak else "full"
    if mode == "weak" and args.beta is None:
        raise InputError("--weak needs --beta")
    rep = lne_report(model, arcs, mode, args.beta, plan)
    body = {"lne": rep.to_dict(), "arcs": [_arc_json(a) for a in arcs]}
    if rep.violations:
        w = max(rep.violations, key=lambda p: p.tord - p.itord)
        body["witness"] = w.to_dict()
        text = f"violation: arcs {w.i}, {w.j} have tord {w.tord:.3f} but itord {w.itord:.3f}"
    else:
        text = body["lne"]["verdict"]
    return Outcome(EXIT_YES if rep.ok else EXIT_NO, body, text)


def cmd_project(args: argparse.Namespace) -> Outcome:
    model = load_model(args.model)
    plan = _plan(args, PROJECTION_PLAN)
    rep = projection_experiment(model, args.planes, plan.seed, plan, args.beta, args.arcs_per_patch)
    ok = rep.fraction_within >= args.min_fraction
    body = {"projection": rep.to_dict(), "min_fraction": args.min_fraction, "passes": ok}
    text = f"{rep.fraction_within:.2%} of {args.planes} planes within {plan.tol} of {rep.beta:.4f}"
    return Outcome(EXIT_YES if ok else EXIT_NO, body, text)


def cmd_tangent(args: argparse.Namespace) -> Outcome:
    model = load_model(args.model)
    plan = _plan(args, ScaleSamplePlan())
    rep = tangent_cone_sample(model, plan)
    body: dict = {"tangent_cone": rep.to_dict()}
    converged = rep.hausdorff[-1] <= rep.mesh_tolerance or (rep.decay is not None and rep.decay > plan.tol)
    code = EXIT_YES if converged else EXIT_NO
    if args.beta is not None:
        expected = float(rational(args.beta)) - 1
        if expected == 0:
            ok = rep.hausdorff[-1] <= rep.mesh_tolerance
        else:
            ok = rep.decay is not None and abs(rep.decay - expected) <= plan.tol
        body["expected_decay"] = expected
        body["matches_expected"] = ok
        code = EXIT_YES if ok else EXIT_NO
    body["converged"] = converged
    text = (f"final Hausdorff distance {rep.hausdorff[-1]:.3g} (mesh tolerance {rep.mesh_tolerance:.3g}), "
            f"decay exponent {'n/a' if rep.decay is None else format(rep.decay, '.4f')}")
    if args.format == "svg":
        text = link_svg(model, float(plan.t_levels()[-1]), plan)
    return Outcome(code, body, text)


def cmd_tord(args: argparse.Namespace) -> Outcome:
    arcs = load_arcs(args.arcs)
    if any(isinstance(a, ModelArc) for a in arcs):
        raise InputError("tord needs symbolic arcs, not model handles")
    table = [{"i": i, "j": j, "tord": format_exponent(arc_tord(arcs[i], arcs[j]))}
             for i, j in itertools.combinations(range(len(arcs)), 2)]
    body = {"arcs": [_arc_json(a) for a in arcs], "pairs": table}
    text = "\n".join(f"{r['i']} {r['j']} {r['tord']}" for r in table)
    return Outcome(EXIT_YES, body, text)


# ---------------------------------------------------------------------------
# parser


def _add_plan_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scale plan (defaults depend on the command and are echoed in the report)")
    g.add_argument("--tmin", type=int, help="finest scale as a power of two, e.g. -18")
    g.add_argument("--tmax", type=int, help="coarsest scale as a power of two, e.g. -6")
    g.add_argument("--levels", type=int, help="number of scale levels")
    g.add_argument("--resolution", type=int, help="link samples per patch")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("--tol", type=float, help="exponent tolerance (default 0.05)")


def _beta(text: str):
    try:
        return rational(text)
    except (ValueError, ZeroDivisionError, LipgeoError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipgeo", description="Bi-Lipschitz invariants of surface germs.")
    parser.add_argument("--version", action="version", version=f"lipgeo {__version__}")
    parser.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, fn: Callable, help_text: str, formats=("json", "text")) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--format", choices=formats, default="json")
        return p

    p = command("canonicalize", cmd_canonicalize, "canonical form of a Hölder complex",
                ("json", "dot", "svg", "text"))
    p.add_argument("complex")

    p = command("compare-inner", cmd_compare_inner, "are two complexes inner equivalent?")
    p.add_argument("first")
    p.add_argument("second")

    p = command("horn", cmd_horn, "horn exponent of a cycle complex")
    p.add_argument("complex")
    p.add_argument("--numeric", action="store_true", help="also estimate it on the realized model")
    _add_plan_flags(p)

    p = command("realize", cmd_realize, "germ model realizing a complex", ("json", "svg"))
    p.add_argument("complex")

    p = command("pizza-extract", cmd_pizza_extract, "minimal pizza of a function on T_beta")
    p.add_argument("function")
    p.add_argument("--beta", type=_beta, default=rational(1), help="triangle exponent (default 1)")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="cancellation-arc recursion depth")

    p = command("pizza-compare", cmd_pizza_compare, "are two pizzas equivalent?")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--unoriented", action="store_true", help="also accept the reversed pizza")

    p = command("verify", cmd_verify, "LNE, weak LNE or pancake check on a germ model")
    p.add_argument("model")
    p.add_argument("--arcs", help="arc file (default: meridian arcs of the model)")
    p.add_argument("--arcs-per-patch", type=int, default=4)
    p.add_argument("--decomposition", help="pancake decomposition file")
    p.add_argument("--weak", action="store_true", help="weak LNE: tolerate itord = beta")
    p.add_argument("--beta", type=_beta, help="exponent for the weak check")
    _add_plan_flags(p)

    p = command("project", cmd_project, "generic projection experiment on a horn model")
    p.add_argument("model")
    p.add_argument("--planes", type=int, default=100)
    p.add_argument("--beta", type=_beta, help="expected exponent (default: estimated)")
    p.add_argument("--min-fraction", type=float, default=0.95)
    p.add_argument("--arcs-per-patch", type=int, default=4)
    _add_plan_flags(p)

    p = command("tangent", cmd_tangent, "tangent cone by Hausdorff limits of rescaled links", ("json", "svg", "text"))
    p.add_argument("model")
    p.add_argument("--beta", type=_beta, help="horn exponent; checks decay beta - 1")
    _add_plan_flags(p)

    p = command("tord", cmd_tord, "pairwise tangency orders of symbolic arcs")
    p.add_argument("arcs")
    return parser


def effective_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("fn", "output", "command")}
    for k, v in list(cfg.items()):
        if not isinstance(v, (str, int, float, bool, type(None))):
            cfg[k] = format_exponent(v)
    cfg["max_exp"] = format_exponent(max_exponent_bound())
    cfg["version"] = __version__
    return cfg


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Run a command; returns the exit code, the report text and the output path."""
    parser = build_parser()
    args = parser.parse_args(argv)
    config = effective_config(args)
    try:
        out = args.fn(args)
    except ResolutionBoundExceeded as exc:
        return EXIT_INCONCLUSIVE, dumps({"command": args.command, "config": config,
                                         "inconclusive": True, "reason": str(exc)}), args.output
    except (InputError, LipgeoError) as exc:
        return EXIT_INPUT, dumps({"command": args.command, "config": config, "error": str(exc)}), args.output
    if args.format != "json" and out.text is not None:
        text = out.text if out.text.endswith("\n") else out.text + "\n"
    else:
        text = dumps({"command": args.command, "config": config, "result": out.body})
    return out.code, text, args.output


def main(argv: list[str] | None = None) -> int:
    code, text, output = run(argv)
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_INPUT:
        sys.stderr.write("lipgeo: " + json.loads(text)["error"] + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
