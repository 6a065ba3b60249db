"""Command-line front end.  Reads JSON, prints JSON (or a plain text rendering).

Exit codes: 0 success, 2 input error, 3 concentration stuck,
4 internal-consistency violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .hirzebruch import (
    HirzebruchClass,
    ModelError,
    SmoothingSet,
    count_rational_smoothings,
    default_model,
    dual_graph,
    genus_max,
    matrix_tree_count,
    max_edges_from_env,
    parse_node,
    section_count,
    smoothing_analysis,
    spanning_trees,
)
from .monodromy import (
    ConcentrationStuck,
    MonodromyError,
    base_group,
    concentrate,
    full_monodromy,
    tree_orbit_representatives,
)
from .nodal import ConsistencyError, CurveGerm, GermError, curve_delta, equisingular_codim
from .patterns import MultiplicityPattern, codimension, pattern_of, strict_degenerations
from .polyalg import (
    PolyError,
    RationalPoly,
    WeierstrassPoly,
    discriminant,
    factor_vertical,
    linear_factor_split,
    squarefree_part,
)

EXIT_OK, EXIT_INPUT, EXIT_STUCK, EXIT_CONSISTENCY = 0, 2, 3, 4


class InputError(ValueError):
    pass


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _load_json(args):
    if args.json is not None:
        text = args.json
    elif args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def _klass(args) -> HirzebruchClass:
    return HirzebruchClass(args.k, args.d, args.f)


def _parse_tree(text: str):
    return frozenset(parse_node(tok + (")" if not tok.endswith(")") else ""))
                     for tok in text.replace("),", ")|").split("|") if tok.strip())


# ---------------------------------------------------------------------------
# subcommands


def cmd_dscr(args) -> dict:
    P = WeierstrassPoly.from_json(_load_json(args))
    vertical, rest = factor_vertical(P)
    D = discriminant(P)
    report = {
        "d": P.d,
        "discriminant": D.to_json(),
        "discriminant_text": str(D),
        "vertical_factor": vertical.to_json(),
        "non_vertical": rest.to_json(),
    }
    if D.is_zero:
        report["orders"] = None
        report["unresolved"] = None
        return report
    roots, leftover = linear_factor_split(D)
    report["orders"] = {_fmt(r): e for r, e in sorted(roots)}
    report["unresolved"] = squarefree_part(leftover).to_json() if leftover.degree >= 1 else None
    return report


def cmd_delta(args) -> dict:
    germ = CurveGerm.from_json(_load_json(args))
    report = curve_delta(germ, args.d_total).to_json()
    if args.codim:
        report["equisingular"] = equisingular_codim(germ, args.d_total).to_json()
    return report


def cmd_patterns(args) -> dict:
    if args.poly is not None:
        try:
            coeffs = json.loads(args.poly)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid --poly JSON: {exc}") from None
        return pattern_of(RationalPoly.from_json(coeffs)).to_json()
    if args.pattern is None:
        raise InputError("give --poly or --pattern")
    try:
        m = MultiplicityPattern.of(int(x) for x in args.pattern.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"bad --pattern: {exc}") from None
    degs = sorted(strict_degenerations(m), reverse=True)
    return {
        "pattern": m.to_json(),
        "codimension": codimension(m),
        "strict_degenerations": [p.to_json() for p in degs],
    }


def _model(args):
    return default_model(_klass(args), args.seed)


def cmd_model(args) -> dict:
    model = _model(args)
    return {
        "model": model.to_json(),
        "node_count": len(model.nodes),
        "genus_max": genus_max(model.klass),
        "spanning_trees": count_rational_smoothings(model),
        "dual_graph": dual_graph(model).to_json()["adjacency"],
    }


def cmd_smoothings(args) -> dict:
    model = _model(args)
    out = {
        "klass": model.klass.to_json(),
        "spanning_trees": count_rational_smoothings(model),
        "matrix_tree": matrix_tree_count(model),
    }
    if args.chosen is not None:
        chosen = _parse_tree(args.chosen)
        out["analysis"] = smoothing_analysis(SmoothingSet(model, chosen)).to_json()
    elif args.list:
        limit = max_edges_from_env()
        if len(model.nodes) > limit:
            raise InputError(f"{len(model.nodes)} edges exceed SEVERI_MAX_EDGES={limit}")
        out["trees"] = [[n.label for n in sorted(T)] for T in spanning_trees(model)]
    return out


def cmd_monodromy(args) -> dict:
    model = _model(args)
    limit = max_edges_from_env()
    if len(model.nodes) > limit:
        raise InputError(f"{len(model.nodes)} nodes exceed SEVERI_MAX_EDGES={limit}")
    if args.tree is not None:
        trees = [_parse_tree(args.tree)]
    elif args.all_trees:
        trees = list(spanning_trees(model))
    else:
        trees = tree_orbit_representatives(model)
    bg = base_group(model)
    results = []
    for T in trees:
        r = full_monodromy(model, T)
        if r.is_full_symmetric and not r.transitive and len(r.free_nodes) > 1:
            raise ConsistencyError("full symmetric group reported but orbit check failed")
        entry = r.to_json()
        if args.trace:
            tilde, trace = concentrate(model, T)
            entry["concentrated"] = [n.label for n in sorted(tilde)]
            entry["trace"] = trace.to_json()
        results.append(entry)
    return {
        "klass": model.klass.to_json(),
        "base_group": bg.to_json() | {"expected_order": bg.expected_order(model)},
        "trees": results,
        "all_full_symmetric": all(r["is_full_symmetric"] for r in results),
    }


def cmd_sections(args) -> dict:
    return section_count(args.genus).to_json()


def cmd_selftest(args) -> dict:
    """Seeded sweep over the identities; exit code 4 on any failure."""
    from .nodal import BranchGerm

    rng = random.Random(args.seed)
    failures = []
    for _ in range(args.count):
        vm = rng.randint(0, 2)
        branches = []
        used = set()
        for _b in range(rng.randint(1, 3)):
            m = rng.randint(1, 3)
            coeffs = [Fraction(rng.randint(-2, 2)) for _ in range(rng.randint(1, 5) + 1)]
            coeffs[0] = Fraction(rng.randint(-1, 1))
            phi = RationalPoly(coeffs)
            b = BranchGerm(0, m, phi)
            if not b.is_reduced() or (m, phi) in used:
                continue
            used.add((m, phi))
            branches.append(b)
        germ = CurveGerm(0, vm, tuple(branches))
        try:
            r = curve_delta(germ, strict=False)
        except GermError:
            continue
        if not (r.euler_identity and r.branching_identity) and r.d:
            failures.append(germ.to_json())
    for k in range(3):
        for d in range(1, 4):
            for f in range(4):
                try:
                    klass = HirzebruchClass(k, d, f)
                except ModelError:
                    continue
                model = default_model(klass, args.seed)
                if genus_max(klass) != len(model.nodes) - (d + f) + 1:
                    failures.append({"genus_check": klass.to_json()})
                if count_rational_smoothings(model) != matrix_tree_count(model):
                    failures.append({"tree_count": klass.to_json()})
    report = {"seed": args.seed, "germs": args.count, "failures": failures, "ok": not failures}
    if failures:
        raise ConsistencyError(json.dumps(report))
    return report


# ---------------------------------------------------------------------------


def _render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and not _is_flat(val):
                lines.append(f"{pad}{key}:")
                lines.append(_render_text(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_inline(val)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            (f"{pad}-\n" + _render_text(v, indent + 1)) if isinstance(v, (dict, list)) and not _is_flat(v)
            else f"{pad}- {_inline(v)}"
            for v in obj
        )
    return pad + _inline(obj)


def _is_flat(val) -> bool:
    if isinstance(val, list):
        return all(not isinstance(v, (dict, list)) or (isinstance(v, list) and _is_flat(v)) for v in val)
    return False


def _inline(val) -> str:
    if isinstance(val, list):
        return "[" + ", ".join(_inline(v) for v in val) + "]"
    if val is None:
        return "-"
    return str(val)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--trace", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(
        prog="severi",
        description="Exact computations with nodal curves on Hirzebruch surfaces.",
        parents=[common],
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def json_input(sp):
        sp.add_argument("input", nargs="?", help="JSON file ('-' or omitted: stdin)")
        sp.add_argument("--json", help="inline JSON instead of a file")

    def klass_flags(sp):
        sp.add_argument("--k", type=int, required=True, help="Hirzebruch index")
        sp.add_argument("--d", type=int, required=True, help="number of sections")
        sp.add_argument("--f", type=int, required=True, help="number of fibres")

    sp = sub.add_parser("dscr", parents=[common], help="discriminant of a Weierstrass polynomial")
    json_input(sp)
    sp.set_defaults(func=cmd_dscr)

    sp = sub.add_parser("delta", parents=[common], help="delta invariant of a curve germ")
    json_input(sp)
    sp.add_argument("--d-total", type=int, default=None, help="fibre degree of the whole curve")
    sp.add_argument("--codim", action="store_true", help="also report the equisingular codimension")
    sp.set_defaults(func=cmd_delta)

    sp = sub.add_parser("patterns", parents=[common], help="root multiplicity patterns")
    sp.add_argument("--poly", help='monic polynomial as JSON list, e.g. ["0/1","0/1","1/1"]')
    sp.add_argument("--pattern", help="comma separated pattern, e.g. 2,1,1")
    sp.set_defaults(func=cmd_patterns)

    sp = sub.add_parser("model", parents=[common], help="degenerate model of a class")
    klass_flags(sp)
    sp.set_defaults(func=cmd_model)

    sp = sub.add_parser("smoothings", parents=[common], help="smoothing sets and spanning trees")
    klass_flags(sp)
    sp.add_argument("--chosen", help="comma separated node labels, e.g. 'fs(1,1),ss(1,2,1)'")
    sp.add_argument("--list", action="store_true", help="list all spanning trees")
    sp.set_defaults(func=cmd_smoothings)

    sp = sub.add_parser("monodromy", parents=[common], help="monodromy on the free nodes")
    klass_flags(sp)
    sp.add_argument("--tree", help="spanning tree as comma separated node labels")
    sp.add_argument("--all-trees", action="store_true", help="every tree, not one per symmetry class")
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("sections", parents=[common], help="subbundle counts for small genus")
    sp.add_argument("--genus", type=int, required=True)
    sp.set_defaults(func=cmd_sections)

    sp = sub.add_parser("selftest", parents=[common], help="seeded identity sweep")
    sp.add_argument("--count", type=int, default=200, help="number of random germs")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = getattr(args, "format", "json")
    args.seed = getattr(args, "seed", 0)
    args.trace = getattr(args, "trace", False)
    try:
        result = args.func(args)
        code = EXIT_OK
    except ConcentrationStuck as exc:
        result = {"error": str(exc), "state": exc.state}
        code = EXIT_STUCK
    except (ConsistencyError, AssertionError) as exc:
        result = {"error": f"internal consistency violation: {exc}"}
        code = EXIT_CONSISTENCY
    except (InputError, PolyError, GermError, ModelError, MonodromyError) as exc:
        result = {"error": str(exc)}
        code = EXIT_INPUT
    if args.format == "json":
        text = json.dumps(result, indent=2, ensure_ascii=False)
    else:
        text = _render_text(result)
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
