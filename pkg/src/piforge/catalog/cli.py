"""Command-line surface.

Subcommands mirror the library: compute pi (``pi``), verify catalog
formulas numerically (``verify``, ``verify-all``), derive rows exactly
(``transform``), check structural identities (``check-identity``),
sweep congruence claims (``congruence``), evaluate modular quantities
(``modular``), inspect the catalog (``catalog``), and run report suites
(``suite``).  Configuration comes from built-in defaults, then a file
named by the ``PIFORGE_CONFIG`` environment variable, then ``--config``.
"""
from __future__ import annotations

import sys
from fractions import Fraction
from typing import Optional

import click

from .. import congruence as congruence_mod
from .. import families, modular, series
from ..families import FamilySpec
from ..numeric import (
    BigFloat,
    PrecisionExhausted,
    bits_for_digits,
    pi_decimal,
    prop2_numeric_check,
    slow_series_sum,
    sum_formula,
    surd_to_bigfloat,
    verify_formula,
)
from ..surd import to_literal
from ..transforms import (
    Formula,
    appendix_hat_transform,
    prop1_transform,
    prop4_transform,
    prop5_transform,
    prop7_transform,
)
from . import Catalog, has_note, load_default, note_value, record_text
from .config import ConfigError, load_config
from .suites import SUITES, appendix_bundle_check, run_suite


class _RationalType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number", param, ctx)


RATIONAL = _RationalType()


def _formula_or_fail(cat: Catalog, formula_id: str) -> Formula:
    try:
        return cat.formula(formula_id)
    except KeyError:
        raise click.ClickException(f"no catalog formula with id {formula_id!r}")


def _certified_decimal(value: BigFloat, digits: int) -> str:
    if value.error_bound() > Fraction(1, 10 ** (digits + 2)):
        raise click.ClickException(
            f"could not certify {digits} decimal places at this precision"
        )
    return value.decimal(digits)


@click.group()
@click.option(
    "--config",
    "config_path",
    metavar="PATH",
    default=None,
    help="Flat key=value configuration file (applied over PIFORGE_CONFIG).",
)
@click.pass_context
def main(ctx: click.Context, config_path: Optional[str]) -> None:
    """Exact transformations and certified numeric verification for the
    embedded catalog of series for 1/pi."""
    try:
        ctx.obj = load_config(config_path)
    except (ConfigError, OSError) as exc:
        raise click.ClickException(str(exc))


@main.command("pi")
@click.option("--digits", type=click.IntRange(1), default=50, show_default=True)
@click.option(
    "--engine",
    default="chudnovsky",
    show_default=True,
    metavar="{chudnovsky|catalog:<id>}",
    help="Binary-splitting engine, or any convergent catalog formula.",
)
@click.pass_obj
def pi_command(cfg, digits: int, engine: str) -> None:
    """Print pi to DIGITS certified decimal places."""
    if engine == "chudnovsky":
        try:
            click.echo(pi_decimal(digits, leaf=cfg.bs_leaf))
        except PrecisionExhausted as exc:
            raise click.ClickException(str(exc))
        return
    kind, _, formula_id = engine.partition(":")
    if kind != "catalog" or not formula_id:
        raise click.ClickException(
            f"unknown engine {engine!r}; use chudnovsky or catalog:<id>"
        )
    f = _formula_or_fail(load_default(), formula_id)
    if not f.convergent:
        raise click.ClickException(f"{f.id} does not converge; pick another id")
    bits = bits_for_digits(digits + 9)
    try:
        total, _ = sum_formula(f, digits + 9, max_terms=cfg.max_terms, bits=bits)
        value = surd_to_bigfloat(f.rhs, bits) / total
    except PrecisionExhausted as exc:
        raise click.ClickException(str(exc))
    click.echo(_certified_decimal(value, digits))


def _verify_one(cfg, f: Formula, digits: Optional[int]):
    """Companion rows run capped; everything else runs the standard
    verifier.  Explicit digits win over notes targets and config."""
    if note_value(f.notes, "companion-of") is not None:
        target = digits or int(
            note_value(f.notes, "target-digits") or cfg.companion_digits
        )
        cap = int(note_value(f.notes, "term-cap") or cfg.slow_term_cap)
        return slow_series_sum(f, target, max_terms=cap)
    return verify_formula(f, digits or cfg.numeric_digits, max_terms=cfg.max_terms)


@main.command("verify")
@click.option("--id", "formula_id", required=True, metavar="ID")
@click.option(
    "--digits",
    type=click.IntRange(1),
    default=None,
    help="Certified digits to demand [default: from configuration].",
)
@click.pass_obj
def verify_command(cfg, formula_id: str, digits: Optional[int]) -> None:
    """Numerically verify one catalog formula; print its report line."""
    f = _formula_or_fail(load_default(), formula_id)
    if not f.convergent:
        raise click.ClickException(f"{f.id} does not converge; nothing to verify")
    rep = _verify_one(cfg, f, digits)
    click.echo(rep.line)
    sys.exit(0 if rep.ok else 1)


@main.command("verify-all")
@click.option(
    "--digits",
    type=click.IntRange(1),
    default=None,
    help="Certified digits for ordinary rows [default: from configuration].",
)
@click.pass_obj
def verify_all_command(cfg, digits: Optional[int]) -> None:
    """Verify every convergent catalog formula.

    One tab-separated line per formula: id, status, digits, terms,
    seconds.  Exits nonzero iff a verification fails unexpectedly; the
    capped companion known to be infeasible reports expected-fail.
    """
    cat = load_default()
    failures = 0
    for f in cat.formulas:
        if has_note(f.notes, "suspect-w0"):
            click.echo(f"{f.id}\tskip\t-\t-\t-")
            continue
        if not f.convergent:
            click.echo(f"{f.id}\tskip\t-\t-\t-")
            continue
        rep = _verify_one(cfg, f, digits if note_value(f.notes, "companion-of") is None else None)
        if rep.ok:
            status = "pass"
        elif has_note(f.notes, "infeasible-under-cap"):
            status = "expected-fail"
        else:
            status = "fail"
            failures += 1
        click.echo(
            f"{f.id}\t{status}\t{rep.digits_achieved}\t{rep.terms}\t{rep.seconds:.3f}"
        )
    click.echo(f"# unexpected failures: {failures}")
    sys.exit(0 if failures == 0 else 1)


@main.command("transform")
@click.option(
    "--prop",
    "which",
    type=click.Choice(["1", "4", "5", "7", "hat"]),
    required=True,
    help="Which transformation to apply.",
)
@click.option("--id", "formula_id", required=True, metavar="ID")
@click.pass_obj
def transform_command(cfg, which: str, formula_id: str) -> None:
    """Apply a transformation to a catalog row; print the derived row."""
    f = _formula_or_fail(load_default(), formula_id)

    def echo_derived(d: Formula) -> None:
        click.echo(f"family={d.family.kind}")
        click.echo(f"s={d.s}")
        click.echo(f"arg={to_literal(d.arg)}")
        click.echo(f"lin0={to_literal(d.lin0)}")
        click.echo(f"lin1={to_literal(d.lin1)}")
        click.echo(f"rhs={to_literal(d.rhs)}")
        click.echo(f"convergent={'true' if d.convergent else 'false'}")

    try:
        if which == "1":
            echo_derived(prop1_transform(f))
        elif which == "4":
            for sign, label in ((+1, "+"), (-1, "-")):
                click.echo(f"sign={label}")
                echo_derived(prop4_transform(f, sign))
        elif which == "5":
            echo_derived(prop5_transform(f))
        elif which == "7":
            echo_derived(prop7_transform(f))
        else:
            echo_derived(appendix_hat_transform(f))
    except (ValueError, ArithmeticError) as exc:
        raise click.ClickException(str(exc))


@main.command("check-identity")
@click.option(
    "--prop",
    "which",
    type=click.Choice(
        ["2", "3", "5", "6", "involution", "clausen", "euler", "pfaff", "quad"]
    ),
    required=True,
)
@click.option("--s", "s_value", type=RATIONAL, required=True, metavar="RAT")
@click.option(
    "--order",
    type=click.IntRange(1),
    default=None,
    help="Series order (certified digits for --prop 2) "
    "[default: from configuration].",
)
@click.pass_obj
def check_identity_command(cfg, which: str, s_value: Fraction, order: Optional[int]) -> None:
    """Check one structural identity at exponent s; print pass/fail."""
    try:
        if which == "2":
            digits = order or cfg.prop2_digits
            ok, achieved, terms = prop2_numeric_check(s_value, digits)
            detail = f"digits={achieved} terms={terms}"
        elif which in ("3", "5", "6"):
            n = order or cfg.series_order
            ok = families.series_identity_holds(which, s_value, n)
            detail = f"order={n}"
        elif which == "involution":
            n = order or cfg.involution_order
            ok = families.involution_check(FamilySpec("HYP", s_value), n)
            detail = f"order={n}"
        else:
            n = order or cfg.transformation_order
            if which == "clausen":
                ok = series.clausen_identity_holds(s_value / 2, (1 - s_value) / 2, n)
            elif which == "euler":
                ok = series.euler_identity_holds(s_value, 1 - s_value, Fraction(1), n)
            elif which == "pfaff":
                ok = series.pfaff_identity_holds(s_value, 1 - s_value, Fraction(1), n)
            else:
                ok = series.quadratic_identity_holds(s_value / 2, (1 - s_value) / 2, n)
            detail = f"order={n}"
    except (ValueError, KeyError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{'pass' if ok else 'fail'} {detail}")
    sys.exit(0 if ok else 1)


@main.command("congruence")
@click.option(
    "--claim",
    "claim_key",
    type=click.Choice(["s13", "s14"]),
    required=True,
    help="Which congruence claim to sweep.",
)
@click.option(
    "--pmax",
    type=click.IntRange(5),
    default=None,
    help="Largest prime to test [default: from configuration].",
)
@click.pass_obj
def congruence_command(cfg, claim_key: str, pmax: Optional[int]) -> None:
    """Sweep a congruence claim over odd primes; one p<TAB>pass|fail line
    per prime."""
    cat = load_default()
    rec = cat.get(f"claim-{claim_key}")
    if rec is None:
        raise click.ClickException(f"no claim record for {claim_key!r}")
    limit = pmax or cfg.congruence_pmax
    results = congruence_mod.sweep(rec.to_claim(), limit)
    bad = 0
    for p, ok in results:
        click.echo(f"{p}\t{'pass' if ok else 'fail'}")
        if not ok:
            bad += 1
    click.echo(
        f"# {len(results)} odd primes checked up to {limit} "
        f"(2, 3, and divisors of the base are outside the claim)"
    )
    sys.exit(0 if bad == 0 else 1)


@main.command("modular")
@click.option(
    "--fn",
    "fn_name",
    type=click.Choice(["eta", "j", "t1", "t2", "t3", "t4"]),
    default=None,
    help="Quantity to evaluate at tau = i*sqrt(TAU-IM-SQ).",
)
@click.option("--tau-im-sq", "im_sq", type=RATIONAL, default=None, metavar="RAT")
@click.option(
    "--digits",
    type=click.IntRange(1),
    default=None,
    help="Decimal places to print [default: from configuration].",
)
@click.option(
    "--check-example",
    "example",
    type=click.IntRange(1, 4),
    default=None,
    help="Run one worked verification bundle end to end instead.",
)
@click.pass_obj
def modular_command(cfg, fn_name, im_sq, digits, example) -> None:
    """Evaluate modular quantities, or run a worked bundle end to end."""
    if (example is None) == (fn_name is None):
        raise click.UsageError("give exactly one of --fn or --check-example")
    if example is not None:
        try:
            line = appendix_bundle_check(example, cfg)
        except modular.TooSlowAtBoundary as exc:
            raise click.ClickException(str(exc))
        click.echo(line.text)
        sys.exit(0 if line.status == "ok" else 1)
    if im_sq is None or im_sq <= 0:
        raise click.UsageError("--fn needs --tau-im-sq, a positive rational")
    prec = digits or cfg.modular_digits
    tau = modular.TauPoint(im_sq)
    try:
        if fn_name == "eta":
            value = modular.eta(tau, prec + 9)
        elif fn_name == "j":
            value = modular.j_invariant(tau, prec + 9)
        else:
            value = modular.t_level(int(fn_name[1]), tau, prec + 9)
    except (modular.OutsideDomain, modular.OutOfDisk, PrecisionExhausted) as exc:
        raise click.ClickException(str(exc))
    click.echo(_certified_decimal(value, prec))


@main.command("catalog")
@click.option("--list", "list_all", is_flag=True, help="List every record id.")
@click.option("--show", "show_id", metavar="ID", default=None, help="Print one record.")
def catalog_command(list_all: bool, show_id: Optional[str]) -> None:
    """Inspect the embedded catalog."""
    if list_all == (show_id is not None):
        raise click.UsageError("give exactly one of --list or --show ID")
    cat = load_default()
    if list_all:
        for f in cat.formulas:
            click.echo(
                f"{f.id}\tformula\ts={f.s}\t{f.family.kind}\t{f.provenance}"
            )
        for c in cat.claims:
            click.echo(f"{c.id}\tclaim\ts={c.s}\t{c.family}\tsource={c.source}")
        for ident in cat.identities:
            click.echo(
                f"{ident.id}\tidentity\ts={ident.s}\tcheck={ident.check}"
                f"\torder={ident.order}"
            )
        return
    rec = cat.get(show_id)
    if rec is None:
        raise click.ClickException(f"no catalog record with id {show_id!r}")
    click.echo(record_text(rec), nl=False)


@main.command("suite")
@click.argument("which", type=click.Choice(SUITES + ("all",)))
@click.pass_obj
def suite_command(cfg, which: str) -> None:
    """Run one report suite (or all of them); exit nonzero on failure."""
    sys.exit(run_suite(which, cfg))


if __name__ == "__main__":
    main()
