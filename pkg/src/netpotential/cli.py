"""Command-line front end.

Exit codes: 0 success, 1 identity violation, 2 usage error, 3 file, parse
or data error, 4 solver did not converge. Errors are reported on stderr as a
single JSON object ``{"error": ..., "message": ...}``.
"""

import json
import os
import sys

import click
import numpy as np

from . import errors
from .balayage import Schedule, run_balayage, sweep_report, write_trace_csv
from .calculus import (
    check_divergence_theorem,
    check_integration_by_parts,
    divergence,
    gradient,
    laplacian,
    product_rule_sides,
)
from .generators import random_domain
from .graph import boundary_of, build_graph
from .oracle import DirichletProblem, dirichlet_solve
from .perron import perron_solve
from .potential import fundamental_solution, green_matrix

IDENTITY_THRESHOLD = 1e-10
SEED_ENV = "NETPOTENTIAL_SEED"

VARIANTS = click.Choice(["normalized", "unnormalized"])


class IdentityViolation(Exception):
    pass


class FileProblem(Exception):
    pass


def dumps(obj):
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, allow_nan=False)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileProblem(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise FileProblem(f"{path} is not valid JSON: {exc}") from None


def load_graph(path):
    """Graph description file, or a problem file with an embedded ``"graph"``."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise FileProblem(f"{path}: expected a JSON object")
    if "graph" in doc:
        doc = doc["graph"]
    try:
        return build_graph(doc)
    except KeyError as exc:
        raise FileProblem(f"{path}: {exc.args[0]}") from None


def load_problem(path):
    """Parse a problem file into ``(graph, domain, measure, boundary_values, variant)``."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise FileProblem(f"{path}: expected a JSON object")
    for key in ("graph", "domain"):
        if key not in doc:
            raise FileProblem(f"{path}: missing field {key!r}")
    try:
        G = build_graph(doc["graph"])
    except KeyError as exc:
        raise FileProblem(f"{path}: {exc.args[0]}") from None
    D = G.domain(doc["domain"])
    measure = doc.get("measure") or {}
    if not isinstance(measure, dict):
        raise FileProblem(f"{path}: 'measure' must be an object")
    for v, m in measure.items():
        if v not in G.index:
            raise errors.UnknownVertex(f"measure given at unknown vertex {v!r}")
        if not isinstance(m, (int, float)) or m < 0:
            raise errors.NegativeMass(f"measure at {v!r} must be a nonnegative number")
        if v not in D.members and m != 0:
            raise errors.SupportOutsideDomain(f"measure charges {v!r}, outside the domain")
    bd = boundary_of(G, D).vertices
    given = doc.get("boundary_values") or {}
    if not isinstance(given, dict):
        raise FileProblem(f"{path}: 'boundary_values' must be an object")
    extra = [v for v in given if v not in bd]
    if extra:
        raise errors.InconsistentData(f"boundary_values keys off the boundary: {extra}")
    g = {v: float(given.get(v, 0.0)) for v in bd}
    variant = doc.get("variant", "normalized")
    if variant not in ("normalized", "unnormalized"):
        raise FileProblem(f"{path}: unknown variant {variant!r}")
    return G, D, measure, g, variant


def _vertex_json(G, arr):
    return {v: float(x) for v, x in zip(G.vertices, arr)}


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


@click.group()
def cli():
    """Discrete potential theory on graphs: solvers and identity checks."""


@cli.group()
def solve():
    """Solve Poisson or Dirichlet problems stored in problem files."""


@solve.command("poisson")
@click.argument("file")
@click.option("--method", type=click.Choice(["balayage", "direct"]), default="balayage",
              show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True,
              help="Stop sweeping once the interior mass is below this.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False, writable=True),
              help="Write the per-step sweep trace CSV here.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False, writable=True),
              help="Write the sweep report JSON here instead of stderr.")
@click.option("--schedule", type=click.Choice(["round_robin", "greedy_max_mass", "random"]),
              default="round_robin", show_default=True)
@click.option("--seed", type=int, default=None, help="Seed for the random schedule.")
@click.option("--max-steps", type=int, default=None)
def solve_poisson(file, method, tol, trace_path, report_path, schedule, seed, max_steps):
    """Solve -L u = measure on the domain with u = 0 on its boundary."""
    if tol <= 0:
        raise click.UsageError("--tol must be positive")
    G, D, measure, g, variant = load_problem(file)
    if any(x != 0 for x in g.values()):
        raise errors.InconsistentData("the Poisson problem needs zero boundary values")
    if method == "direct":
        u = dirichlet_solve(DirichletProblem(G, D, rhs=measure, variant=variant))
        click.echo(dumps(_vertex_json(G, u)))
        return
    if seed is None:
        seed = _default_seed()
    u, state = run_balayage(G, D, measure, variant, Schedule(schedule, seed), tol=tol,
                            max_steps=max_steps, record_trace=trace_path is not None)
    if trace_path:
        with open(trace_path, "w", encoding="utf-8", newline="") as fh:
            write_trace_csv(state.trace, fh)
    report = dumps(sweep_report(state).to_dict())
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(report + "\n")
    else:
        click.echo(f"sweep report: {report}", err=True)
    click.echo(dumps(_vertex_json(G, u)))


@solve.command("dirichlet")
@click.argument("file")
@click.option("--method", type=click.Choice(["perron", "direct"]), default="direct",
              show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--max-passes", type=int, default=10**6, show_default=True)
@click.option("--log", "log_path", type=click.Path(dir_okay=False, writable=True),
              help="Write the Perron convergence log CSV here.")
def solve_dirichlet(file, method, tol, max_passes, log_path):
    """Solve the Dirichlet problem with the file's boundary values."""
    if tol <= 0:
        raise click.UsageError("--tol must be positive")
    G, D, measure, g, variant = load_problem(file)
    if method == "direct":
        u = dirichlet_solve(DirichletProblem(G, D, rhs=measure, boundary_values=g,
                                             variant=variant))
        click.echo(dumps(_vertex_json(G, u)))
        return
    if any(m != 0 for m in measure.values()):
        raise errors.InconsistentData("Perron's method solves the homogeneous equation; "
                                      "drop the measure or use --method direct")
    passes = []
    try:
        u = perron_solve(G, D, g, tol=tol, max_passes=max_passes, log=passes)
    finally:
        if log_path:
            with open(log_path, "w", encoding="utf-8") as fh:
                fh.write("pass,last_delta\n")
                for k, delta in passes:
                    fh.write(f"{k},{delta!r}\n")
    click.echo(dumps(_vertex_json(G, u)))


@cli.command()
@click.argument("graphfile")
@click.option("--pole", required=True, help="Vertex carrying the unit mass.")
@click.option("--variant", type=VARIANTS, default="normalized", show_default=True)
def fundamental(graphfile, pole, variant):
    """Fundamental solution with pole at the given vertex, zero at infinity."""
    G = load_graph(graphfile)
    if pole not in G.index:
        raise click.UsageError(f"--pole {pole!r} is not a vertex")
    if pole == G.infinity:
        raise click.UsageError(f"--pole {pole!r} is the infinity vertex")
    phi = fundamental_solution(G, pole, variant)
    click.echo(dumps(_vertex_json(G, phi.values)))


@cli.group()
def check():
    """Numerical checks of the calculus identities and symmetry."""


def identity_discrepancies(G, trials, seed):
    """Largest absolute discrepancy of each identity over random fields."""
    if G.n < 2:
        raise errors.EmptyDomain("graph has no vertex besides infinity")
    rng = np.random.default_rng(seed)
    worst = {"divergence_theorem": 0.0, "integration_by_parts": 0.0,
             "product_rule": 0.0, "div_grad_is_laplacian": 0.0}
    for _ in range(trials):
        U = rng.standard_normal(G.n)
        i = rng.standard_normal(G.m)
        D = random_domain(G, rng)
        lhs, rhs = check_divergence_theorem(G, i, D)
        worst["divergence_theorem"] = max(worst["divergence_theorem"], abs(lhs - rhs))
        lhs, bterm, vterm = check_integration_by_parts(G, U, i, D)
        worst["integration_by_parts"] = max(worst["integration_by_parts"],
                                            abs(lhs - (bterm - vterm)))
        a, b = product_rule_sides(G, U, i)
        worst["product_rule"] = max(worst["product_rule"], float(np.max(np.abs(a - b))))
        d = divergence(G, gradient(G, U)) - laplacian(G, U)
        worst["div_grad_is_laplacian"] = max(worst["div_grad_is_laplacian"],
                                             float(np.max(np.abs(d))))
    return worst


@check.command("identities")
@click.argument("graphfile")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=None, help=f"Defaults to ${SEED_ENV} or 0.")
def check_identities(graphfile, trials, seed):
    """Divergence theorem, integration by parts, product rule, div grad = Laplacian."""
    G = load_graph(graphfile)
    if seed is None:
        seed = _default_seed()
    worst = identity_discrepancies(G, trials, seed)
    ok = all(x <= IDENTITY_THRESHOLD for x in worst.values())
    click.echo(dumps({"max_abs_discrepancy": worst, "trials": trials, "seed": seed,
                      "threshold": IDENTITY_THRESHOLD, "ok": ok}))
    if not ok:
        raise IdentityViolation("identity discrepancy above threshold")


def symmetry_discrepancies(G, variant):
    M = green_matrix(G, variant)  # row x holds Phi_x
    idx = np.array([k for k in range(G.n) if k != G.infinity_index], dtype=np.intp)
    sub = M[np.ix_(idx, idx)]
    plain = float(np.max(np.abs(sub - sub.T))) if len(idx) > 1 else 0.0
    deg = G.degrees[idx].astype(float)
    # deg(v) Phi_x(v) against deg(x) Phi_v(x)
    weighted_m = sub * deg[None, :]
    weighted = float(np.max(np.abs(weighted_m - weighted_m.T))) if len(idx) > 1 else 0.0
    return plain, weighted


@check.command("symmetry")
@click.argument("graphfile")
@click.option("--variant", type=VARIANTS, default="normalized", show_default=True)
def check_symmetry(graphfile, variant):
    """All-pairs reciprocity of the fundamental solutions."""
    G = load_graph(graphfile)
    plain, weighted = symmetry_discrepancies(G, variant)
    # the degree weights cancel for the unnormalized operator's identity
    governing = plain if variant == "unnormalized" else weighted
    ok = governing <= IDENTITY_THRESHOLD
    click.echo(dumps({
        "variant": variant,
        "identity": "plain" if variant == "unnormalized" else "degree_weighted",
        "max_plain_discrepancy": plain,
        "max_degree_weighted_discrepancy": weighted,
        "regular": G.is_regular(),
        "threshold": IDENTITY_THRESHOLD,
        "ok": ok,
    }))
    if not ok:
        raise IdentityViolation("symmetry discrepancy above threshold")


DATA_ERRORS = (FileProblem, errors.GraphError, errors.DomainError, errors.FieldError,
               errors.InconsistentData, errors.SupportOutsideDomain, errors.NegativeMass,
               errors.MassAtInfinity, errors.EmptyBoundary, errors.SingularSystem)


def _fail(kind, message, code):
    click.echo(dumps({"error": kind, "message": str(message)}), err=True)
    return code


def main(argv=None):
    """Entry point; returns the process exit status."""
    try:
        cli.main(args=argv, prog_name="netpotential", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        return _fail("UsageError", exc.format_message(), 2)
    except click.Abort:
        return _fail("Aborted", "aborted", 2)
    except IdentityViolation as exc:
        return _fail("IdentityViolation", exc, 1)
    except errors.NotConverged as exc:
        return _fail("NotConverged", exc, 4)
    except DATA_ERRORS as exc:
        return _fail(type(exc).__name__, exc, 3)
    except OSError as exc:
        return _fail("FileError", exc, 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
