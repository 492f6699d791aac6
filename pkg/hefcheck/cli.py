import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import click

from .depgraph import build_dep_graph, is_hcf, to_dot
from .elementary import is_elementary_bruteforce
from .errors import CapExceededError, DeadlineExceeded
from .hef import HefStatus, is_hef, verify_certificate
from .io import (
    certificate_from_json,
    certificate_to_dict,
    certificate_to_json,
    load_cnf,
    load_program,
    program_sha256,
    render_program,
    render_rule,
    save_program,
)
from .program import check_capacity
from .reduction import build_reduction, cross_validate
from .semantics import shift, stable_models
from .settings import MAX_ATOM_CAP, MAX_SUBSET_CAP, Limits, config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_RESOURCE_LIMIT = 2
EXIT_INPUT_ERROR = 3

OUTPUT_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """One command invocation: what to run, on which inputs, under which caps."""

    command: str
    paths: tuple
    limits: Limits
    output_format: str = "text"
    certificate: str | None = None

    def emit(self, document, lines):
        """Print the JSON document or the text lines, depending on the format."""
        if self.output_format == "json":
            body = {"version": OUTPUT_VERSION, "command": self.command, **document}
            click.echo(json.dumps(body, indent=2))
        else:
            for line in lines:
                click.echo(line)


@contextmanager
def reading(path=None):
    """Turn input errors into a `path:line:col: message` diagnostic and exit 3."""
    try:
        yield
    except (ValueError, OSError) as e:
        where = f"{path}:" if path is not None else ""
        if getattr(e, "span", None) is None:
            where += " " if where else ""
        click.echo(f"error: {where}{e}", err=True)
        raise click.exceptions.Exit(EXIT_INPUT_ERROR)


def _braces(names):
    return "{" + ", ".join(names) + "}"


def limit_options(func):
    func = click.option(
        "--time-budget",
        type=click.FloatRange(min=0, min_open=True),
        default=None,
        help="Seconds allowed for the search; unlimited by default.",
    )(func)
    func = click.option(
        "--max-subset",
        type=click.IntRange(1, MAX_SUBSET_CAP),
        default=None,
        help="Largest set given to the brute-force elementary-set check.",
    )(func)
    func = click.option(
        "--max-atoms",
        type=click.IntRange(1, MAX_ATOM_CAP),
        default=None,
        help="Largest atom table an analysis accepts.",
    )(func)
    return func


format_option = click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
)

input_path = click.Path(dir_okay=False)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log debug records to stderr.")
def main(verbose):
    """Structural analyses of propositional disjunctive logic programs."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else config["log_level"],
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.argument("file", type=input_path)
@click.option(
    "--mode", type=click.Choice(["hcf", "hef"]), default="hef", show_default=True
)
@click.option(
    "--certificate",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the non-HEF certificate to this JSON file.",
)
@click.option("--dot", type=click.Path(dir_okay=False), help="Export the dependency graph in DOT.")
@click.option("--plot", type=click.Path(dir_okay=False), help="Save a dependency graph figure.")
@format_option
@limit_options
def check(file, mode, certificate, dot, plot, output_format, max_atoms, max_subset, time_budget):
    """Decide whether FILE is head-cycle-free (hcf) or head-elementary-set-free (hef)."""
    with reading(file):
        program = load_program(file)
        limits = Limits.from_config(
            max_atoms=max_atoms, max_subset=max_subset, time_budget=time_budget
        )
    run = RunConfig("check", (file,), limits, output_format, certificate)
    ctx = click.get_current_context()

    if dot or plot:
        graph = build_dep_graph(program)
        if dot:
            Path(dot).write_text(to_dot(graph, program), encoding="utf-8")
        if plot:
            import matplotlib.pyplot as plt

            from .plotting import plot_dep_graph

            fig = plot_dep_graph(graph, program)
            fig.savefig(plot)
            plt.close(fig)

    if mode == "hcf":
        try:
            check_capacity(program, limits.max_atoms)
        except CapExceededError as e:
            run.emit({"mode": mode, "status": "resource_limit", "reason": str(e)}, [f"resource_limit: {e}"])
            ctx.exit(EXIT_RESOURCE_LIMIT)
        verdict = is_hcf(program)
        if verdict:
            run.emit({"mode": mode, "status": "hcf"}, ["hcf"])
            ctx.exit(EXIT_OK)
        pair = [program.atoms[i] for i in verdict.pair]
        rule = render_rule(program[verdict.rule], program.atoms)
        run.emit(
            {"mode": mode, "status": "not_hcf", "rule": verdict.rule, "pair": pair},
            [f"not_hcf: rule {verdict.rule} ({rule}) has {pair[0]} and {pair[1]} in one SCC"],
        )
        ctx.exit(EXIT_VIOLATED)

    verdict = is_hef(program, limits)
    document = {"mode": mode, "status": verdict.status.value, "stats": verdict.stats.to_dict()}
    if verdict.status is HefStatus.HEF:
        run.emit(document, ["hef"])
        ctx.exit(EXIT_OK)
    if verdict.status is HefStatus.RESOURCE_LIMIT:
        document["reason"] = verdict.reason
        run.emit(document, [f"resource_limit: {verdict.reason}"])
        ctx.exit(EXIT_RESOURCE_LIMIT)

    cert = verdict.certificate
    document["elementary_set"] = program.names(verdict.elementary_set)
    document["certificate"] = certificate_to_dict(program, cert)
    if certificate:
        Path(certificate).write_text(certificate_to_json(program, cert) + "\n", encoding="utf-8")
    violating = render_rule(program[cert.violating_rule], program.atoms)
    lines = [
        f"not_hef: E={_braces(program.names(verdict.elementary_set))}",
        f"violating rule {cert.violating_rule}: {violating}",
        f"certificate set: {_braces(program.names(cert.elementary_set))}",
        "witness:",
        *(f"  {render_rule(r, cert.witness.atoms)}" for r in cert.witness.rules),
    ]
    run.emit(document, lines)
    ctx.exit(EXIT_VIOLATED)


@main.command()
@click.argument("file", type=input_path)
@click.option("--set", "atoms", required=True, help="Comma-separated atom names, e.g. a,b,c.")
@format_option
@limit_options
def elementary(file, atoms, output_format, max_atoms, max_subset, time_budget):
    """Decide whether a set of atoms is elementary for FILE."""
    with reading(file):
        program = load_program(file)
        limits = Limits.from_config(
            max_atoms=max_atoms, max_subset=max_subset, time_budget=time_budget
        )
        y = program.atom_set(name.strip() for name in atoms.split(",") if name.strip())
        names = program.names(y)
        try:
            verdict = is_elementary_bruteforce(
                y,
                program,
                max_subset=limits.max_subset,
                threads=limits.threads,
                deadline=limits.deadline(),
            )
        except (CapExceededError, DeadlineExceeded) as e:
            verdict = e
    run = RunConfig("elementary", (file,), limits, output_format)
    ctx = click.get_current_context()

    if isinstance(verdict, Exception):
        run.emit({"set": names, "status": "resource_limit", "reason": str(verdict)}, [f"resource_limit: {verdict}"])
        ctx.exit(EXIT_RESOURCE_LIMIT)
    if verdict:
        run.emit({"set": names, "status": "elementary"}, [f"elementary: {_braces(names)}"])
        ctx.exit(EXIT_OK)
    failing = program.names(verdict.failing)
    run.emit(
        {"set": names, "status": "not_elementary", "failing_subset": failing},
        [f"not elementary: {_braces(failing)} is not outbound in {_braces(names)}"],
    )
    ctx.exit(EXIT_VIOLATED)


@main.command()
@click.argument("file", type=input_path)
@click.argument("cert", type=input_path)
@format_option
def verify(file, cert, output_format):
    """Check the non-HEF certificate CERT against FILE."""
    with reading(file):
        program = load_program(file)
    with reading(cert):
        certificate, digest = certificate_from_json(
            Path(cert).read_text(encoding="utf-8"), program
        )
    run = RunConfig("verify", (file, cert), Limits.from_config(), output_format)
    ctx = click.get_current_context()

    if digest != program_sha256(program):
        reason = "the certificate was issued for another program"
        run.emit({"valid": False, "reason": reason}, [f"invalid: {reason}"])
        ctx.exit(EXIT_VIOLATED)
    try:
        check = verify_certificate(program, certificate, max_subset=run.limits.max_subset)
    except CapExceededError as e:
        run.emit({"valid": None, "reason": str(e)}, [f"resource_limit: {e}"])
        ctx.exit(EXIT_RESOURCE_LIMIT)
    if check:
        run.emit({"valid": True}, ["valid"])
        ctx.exit(EXIT_OK)
    run.emit({"valid": False, "reason": check.reason}, [f"invalid: {check.reason}"])
    ctx.exit(EXIT_VIOLATED)


@main.command()
@click.argument("file", type=input_path)
@format_option
@click.option("--time-budget", type=click.FloatRange(min=0, min_open=True), default=None)
def stable(file, output_format, time_budget):
    """Print the stable models of FILE, one per line."""
    with reading(file):
        program = load_program(file)
        limits = Limits.from_config(time_budget=time_budget)
    run = RunConfig("stable", (file,), limits, output_format)
    ctx = click.get_current_context()
    try:
        models = stable_models(
            program, max_atoms=limits.max_stable_atoms, deadline=limits.deadline()
        )
    except (CapExceededError, DeadlineExceeded) as e:
        run.emit({"status": "resource_limit", "reason": str(e)}, [f"resource_limit: {e}"])
        ctx.exit(EXIT_RESOURCE_LIMIT)
    rows = [sorted(program.names(m)) for m in models]
    run.emit({"models": rows}, [" ".join(row) for row in rows])
    ctx.exit(EXIT_OK)


@main.command("shift")
@click.argument("file", type=input_path)
@format_option
def shift_command(file, output_format):
    """Print the shifted, nondisjunctive version of FILE."""
    with reading(file):
        program = load_program(file)
    run = RunConfig("shift", (file,), Limits.from_config(), output_format)
    text = render_program(shift(program))
    run.emit({"program": text.splitlines()}, [text] if text else [])


@main.command()
@click.argument("cnf", type=input_path)
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the program here.")
@format_option
def reduce(cnf, output, output_format):
    """Build the disjunctive program of the 3-CNF formula CNF."""
    with reading(cnf):
        formula = load_cnf(cnf)
    program, _ = build_reduction(formula)
    run = RunConfig("reduce", (cnf,), Limits.from_config(), output_format)
    if output:
        save_program(program, output)
        run.emit(
            {"output": output, "rules": len(program), "atoms": program.num_atoms},
            [f"wrote {len(program)} rules over {program.num_atoms} atoms to {output}"],
        )
    else:
        text = render_program(program)
        run.emit({"program": text.splitlines()}, [text])


@main.command()
@click.argument("cnfs", nargs=-1, required=True, type=input_path)
@click.option("--report", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@format_option
@limit_options
def xvalidate(cnfs, report, output_format, max_atoms, max_subset, time_budget):
    """Check satisfiability against the HEF verdict of each formula's reduction."""
    with reading():
        limits = Limits.from_config(
            max_atoms=max_atoms, max_subset=max_subset, time_budget=time_budget
        )
    formulas = []
    for path in cnfs:
        with reading(path):
            formulas.append(load_cnf(path))
    run = RunConfig("xvalidate", tuple(cnfs), limits, output_format)

    entries, lines = [], []
    for path, formula in zip(cnfs, formulas):
        result = cross_validate(formula, limits)
        entries.append({"file": path, **result.to_dict()})
        sat = {True: "sat", False: "unsat", None: "unknown"}[result.satisfiable]
        status = result.hef_status.value if result.hef_status else "unknown"
        lines.append(f"{path}: {result.equivalence} ({sat}, {status})")
    document = {"formulas": entries}
    if report:
        body = {"version": OUTPUT_VERSION, "command": "xvalidate", **document}
        Path(report).write_text(json.dumps(body, indent=2) + "\n", encoding="utf-8")
    run.emit(document, lines)

    outcomes = {entry["equivalence"] for entry in entries}
    ctx = click.get_current_context()
    if "inconsistent" in outcomes:
        ctx.exit(EXIT_VIOLATED)
    if "inconclusive" in outcomes:
        ctx.exit(EXIT_RESOURCE_LIMIT)
    ctx.exit(EXIT_OK)
