"""Command-line interface.

    locc-lab generate --family t1 --d 3 --out t1.json
    locc-lab verify t1.json
    locc-lab simulate t1.json --protocol ghz-c6 --resource ghz
    locc-lab render t1.json --out t1.svg
    locc-lab sweep --family t1 --d 3,5,7 --out sweep.csv

Exit codes: 0 success; 1 bad input or incompatible request; verify exits 2
when orthogonality fails and 3 when a nontrivial solution exists; simulate
exits 2 when discrimination is not perfect.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import sys
import time
from itertools import product

import click

from ._parallel import ordered_map
from .families import Family, check_orthogonality, expected_count, generate
from .protocol import ProtocolError, run_protocol, verify_perfect
from .protocols import BUILTIN_NAMES, builtin_for
from .render import RenderError, figure_spec, render_ascii, render_svg
from .tensor import ORTHO_TOL
from .validation import check_state_set, check_tolerance, parse_resource
from .verifier import RANK_RTOL, build_constraints, hermitian_nullspace

logger = logging.getLogger("locc_lab")

FAMILIES = [f.value for f in Family if f is not Family.CUSTOM]
SWEEP_COLUMNS = ["family", "params", "count", "expected_count", "orthogonal", "max_overlap",
                 "dim_A", "dim_B", "dim_C", "verdict", "wall_time_s"]
EXIT_OK, EXIT_INPUT, EXIT_ORTHO, EXIT_NONTRIVIAL = 0, 1, 2, 3
EXIT_IMPERFECT = 2


def g17(x) -> str:
    return "%.17g" % x


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _load_set(path):
    try:
        return check_state_set(path)
    except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        click.echo("error: cannot read state set %s: %s" % (path, exc), err=True)
        sys.exit(EXIT_INPUT)


def _family_params(family, d, k, l, m):
    f = Family(family)
    if f in (Family.T1, Family.T2):
        return {"d": d}
    if f in (Family.T3, Family.T4, Family.T5, Family.T6):
        return {"k": k, "l": l, "m": m}
    return {}


@click.group()
@click.option("--seed", type=int, default=None, help="Reserved; every operation is deterministic.")
@click.option("-v", "--verbose", count=True, help="More logging.")
def cli(seed, verbose):
    """Orthogonal product state sets: generation, local-triviality checks,
    entanglement-assisted discrimination protocols."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command("generate")
@click.option("--family", required=True, type=click.Choice(FAMILIES))
@click.option("--d", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--l", "l_", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output JSON (stdout if omitted).")
def cmd_generate(family, d, k, l_, m, out):
    """Write a state set as JSON."""
    try:
        states = generate(family, _family_params(family, d, k, l_, m))
    except ValueError as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(EXIT_INPUT)
    _emit(states.to_json(indent=1) + "\n", out)
    click.echo("%d states, dims %s" % (len(states), "x".join(map(str, states.dims))), err=out is None)


@cli.command("verify")
@click.argument("set_path", type=click.Path())
@click.option("--tol", type=float, default=ORTHO_TOL, show_default=True, help="Orthogonality tolerance.")
@click.option("--rel-tol", type=float, default=RANK_RTOL, show_default=True, help="Relative SVD rank cutoff.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_verify(set_path, tol, rel_tol, fmt, out):
    """Check whether any party can start with a nontrivial
    orthogonality-preserving measurement."""
    states = _load_set(set_path)
    try:
        tol, rel_tol = check_tolerance(tol, "tol"), check_tolerance(rel_tol, "rel-tol")
    except ValueError as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(EXIT_INPUT)
    if len(states) == 0:
        click.echo("error: empty state set", err=True)
        sys.exit(EXIT_INPUT)
    ortho = check_orthogonality(states, tol)
    doc = {"family": states.family.value, "params": dict(states.params), "count": len(states),
           "orthogonality": ortho.to_dict()}
    if not ortho.passed:
        doc["verdict"] = "not-orthogonal"
        doc["per_party"] = []
        code = EXIT_ORTHO
    else:
        spaces = [hermitian_nullspace(build_constraints(states, p), rel_tol) for p in "ABC"]
        doc["per_party"] = [
            {"party": sp.party, "dim": sp.dim, "trivial": sp.trivial,
             "identity_residual": None if sp.dim != 1 else sp.identity_residual} for sp in spaces
        ]
        trivial = all(sp.trivial for sp in spaces)
        doc["verdict"] = "locally-trivial" if trivial else "nontrivial"
        code = EXIT_OK if trivial else EXIT_NONTRIVIAL
    if fmt == "json":
        _emit(json.dumps(doc, indent=1) + "\n", out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["party", "dim", "trivial", "identity_residual", "verdict"])
        for row in doc["per_party"]:
            res = row["identity_residual"]
            w.writerow([row["party"], row["dim"], row["trivial"], "" if res is None else g17(res), doc["verdict"]])
        _emit(buf.getvalue(), out)
    sys.exit(code)


def _resource_kind(resources) -> str:
    kinds = {r.kind for r in resources}
    return kinds.pop() if len(kinds) == 1 else ("none" if not kinds else "mixed")


@cli.command("simulate")
@click.argument("set_path", type=click.Path())
@click.option("--protocol", "proto", required=True, type=click.Choice(BUILTIN_NAMES))
@click.option("--resource", default=None,
              help="ghz, bell:AB|BC|CA, bell2:AB, or none (default: the protocol's own resource).")
@click.option("--strict", is_flag=True, help="Fail on branches that reach a leaf without a guess.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_simulate(set_path, proto, resource, strict, fmt, out):
    """Run a built-in protocol on every state and report success probabilities."""
    states = _load_set(set_path)
    try:
        b = builtin_for(proto, states)
        res = b.resource if resource is None else parse_resource(resource)
    except (ProtocolError, ValueError) as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(EXIT_INPUT)
    want, got = _resource_kind(b.resource), _resource_kind(res)
    if got not in ("none", want):
        click.echo("error: resource mismatch: protocol %s consumes %s, got %s"
                   % (proto, want, ", ".join(r.describe() for r in res)), err=True)
        sys.exit(EXIT_INPUT)
    try:
        report = run_protocol(states, res, b.tree, name=proto, strict=strict)
    except ProtocolError as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(EXIT_INPUT)
    if proto == "bell2-odd":
        report.notes.append("failure with fewer copies shows only that this protocol needs them, "
                            "not that no other protocol could succeed")
    for wmsg in report.warnings:
        logger.warning(wmsg)
    _emit(report.to_json(indent=1) + "\n" if fmt == "json" else report.to_csv(), out)
    ok = verify_perfect(report)
    click.echo("perfect=%s overall=%s" % (str(ok).lower(), g17(report.overall)), err=True)
    sys.exit(EXIT_OK if ok else EXIT_IMPERFECT)


@cli.command("render")
@click.argument("set_path", type=click.Path())
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output file; .svg gives SVG, anything else ASCII.")
@click.option("--format", "fmt", type=click.Choice(["svg", "ascii"]), default=None)
def cmd_render(set_path, out, fmt):
    """Draw the set as C-level slices of A x B grids."""
    states = _load_set(set_path)
    try:
        spec = figure_spec(states)
    except RenderError as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(EXIT_INPUT)
    if len(states) == 0:
        click.echo("warning: empty state set, blank grid", err=True)
    if fmt is None:
        fmt = "svg" if out and out.lower().endswith(".svg") else "ascii"
    _emit(render_svg(spec) if fmt == "svg" else render_ascii(spec), out)


def _int_list(text):
    if text is None:
        return None
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated integers, got %r" % text) from None


def _sweep_row(job):
    family, params, tol, rel_tol = job
    t0 = time.perf_counter()
    row = {"family": family, "params": ";".join("%s=%d" % kv for kv in params.items()),
           "expected_count": expected_count(family, params)}
    states = generate(family, params)
    ortho = check_orthogonality(states, tol)
    row.update(count=len(states), orthogonal=ortho.passed, max_overlap=g17(ortho.max_overlap))
    if ortho.passed:
        spaces = [hermitian_nullspace(build_constraints(states, p), rel_tol) for p in "ABC"]
        row.update(dim_A=spaces[0].dim, dim_B=spaces[1].dim, dim_C=spaces[2].dim,
                   verdict="locally-trivial" if all(s.trivial for s in spaces) else "nontrivial")
    else:
        row.update(dim_A="", dim_B="", dim_C="", verdict="not-orthogonal")
    row["wall_time_s"] = g17(time.perf_counter() - t0)
    return row


@cli.command("sweep")
@click.option("--family", required=True, type=click.Choice(FAMILIES))
@click.option("--d", "d_list", default=None, help="Comma list of d values (t1, t2).")
@click.option("--klm", default=None, help="Comma list; sets k = l = m to each value.")
@click.option("--k", "k_list", default=None)
@click.option("--l", "l_list", default=None)
@click.option("--m", "m_list", default=None)
@click.option("--tol", type=float, default=ORTHO_TOL, show_default=True)
@click.option("--rel-tol", type=float, default=RANK_RTOL, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_sweep(family, d_list, klm, k_list, l_list, m_list, tol, rel_tol, out):
    """Generate, check orthogonality and verify a range of parameters; one CSV row each."""
    f = Family(family)
    try:
        tol, rel_tol = check_tolerance(tol, "tol"), check_tolerance(rel_tol, "rel-tol")
        if f in (Family.T1, Family.T2):
            points = [{"d": d} for d in (_int_list(d_list) or [])]
        elif f in (Family.EXAMPLE1, Family.EXAMPLE2):
            points = [{}]
        else:
            if klm is not None:
                points = [{"k": x, "l": x, "m": x} for x in _int_list(klm)]
            else:
                ks, ls, ms = _int_list(k_list), _int_list(l_list), _int_list(m_list)
                if not (ks and ls and ms):
                    raise ValueError("give --klm or all of --k, --l, --m")
                points = [{"k": a, "l": b, "m": c} for a, b, c in product(ks, ls, ms)]
        if not points:
            raise ValueError("no parameter points given")
        rows = ordered_map(_sweep_row, [(family, p, tol, rel_tol) for p in points])
    except (ValueError, click.BadParameter) as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(EXIT_INPUT)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    _emit(buf.getvalue(), out)


def main():
    cli(prog_name="locc-lab")


if __name__ == "__main__":
    main()
