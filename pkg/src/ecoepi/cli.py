"""Command-line front end.

Exit status: 0 on success, 2 on configuration errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path

from . import svg
from .config import ScenarioConfig, bundled_config, load_config
from .dynamics import integrate, total_population, verify_bound
from .equilibria import all_equilibria, feasibility_report
from .errors import ConfigError, EcoepiError, NoExchange
from .experiments import format_point, reproduce_figure, sweep_mortality
from .model import Variant
from .stability import (
    classify_equilibrium,
    locate_transcritical,
    predator_free_discrepancy,
    thresholds,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def fmt(x) -> str:
    """Locale-independent, round-trippable decimal (17 significant digits)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8", newline="")


def trajectory_rows(traj):
    if traj.variant is Variant.CLASSICAL:
        header = ["t", "P", "Q", "T"]
        rows = [(t, *x, x[0] + x[1]) for t, x in zip(traj.t, traj.states)]
        return header, rows
    header = ["t", "P", "S", "U", "I", "T", "bound"]
    T = total_population(traj.states)
    bound = traj.bound.bound if traj.bound is not None else float("nan")
    rows = [(t, x[0], x[1], x[2], x[2] ** 2, Ti, bound) for t, x, Ti in zip(traj.t, traj.states, T)]
    return header, rows


def trajectory_svg(traj, title=""):
    return svg.stacked_plot(traj.t, traj.states.T, traj.columns, title=title)


# -- reports ----------------------------------------------------------------

def equilibria_report(cfg: ScenarioConfig, with_stability: bool = False) -> str:
    p = cfg.params
    human, values = [], [("variant", p.variant.value)]
    values += [(f"param.{k}", v) for k, v in p.as_dict().items()]
    human.append(f"{p.variant.value} variant: " + ", ".join(f"{k}={v:g}" for k, v in p.as_dict().items()))
    human.append("")
    keys = {"origin": "E0", "predator_free": "E1", "coexistence": "coexistence"}
    for eq in all_equilibria(p):
        key = keys[eq.label.value]
        state = "feasible" if eq.feasible else "infeasible"
        if eq.marginal:
            state += " (marginal)"
        line = f"{eq.symbol} = {format_point(eq.point)}  {state}"
        if with_stability:
            verdict = classify_equilibrium(p, eq)
            line += f", {verdict.classification.value}"
        human.append(line)
        for name, v in zip(("P", "Q") if p.dim == 2 else ("P", "S", "U"), eq.point):
            values.append((f"{key}.{name}", v))
        values += [(f"{key}.feasible", eq.feasible), (f"{key}.marginal", eq.marginal),
                   (f"{key}.residual", eq.residual)]
        if with_stability:
            human.append("    eigenvalues: " + ", ".join(f"{z.real:.6g}{z.imag:+.6g}i" for z in verdict.eigenvalues))
            for i, z in enumerate(verdict.eigenvalues, start=1):
                values += [(f"{key}.eig{i}.re", z.real), (f"{key}.eig{i}.im", z.imag)]
            values.append((f"{key}.classification", verdict.classification.value))
            if verdict.rh is not None:
                a0, a1, a2, h = verdict.rh.as_tuple()
                human.append(f"    Routh-Hurwitz: a0 = {a0:.6g}, a1 = {a1:.6g}, a2 = {a2:.6g}, "
                             f"a2*a1 - a0 = {h:.6g}; hopf_possible = {verdict.hopf_possible}")
                values += [(f"{key}.rh.a0", a0), (f"{key}.rh.a1", a1), (f"{key}.rh.a2", a2),
                           (f"{key}.rh.a2a1_minus_a0", h), (f"{key}.hopf_possible", verdict.hopf_possible)]
    human.append("")
    human.append("feasibility conditions of the coexistence point:")
    for i, c in enumerate(feasibility_report(p), start=1):
        group = f"[{c.group}] " if c.group != "all" else ""
        human.append(f"  {group}{c}")
        values += [(f"condition{i}.id", c.id.replace(" ", "")), (f"condition{i}.group", c.group),
                   (f"condition{i}.lhs", c.lhs), (f"condition{i}.rhs", c.rhs),
                   (f"condition{i}.satisfied", c.satisfied)]
    th = thresholds(p)
    human.append("")
    human.append(f"m* = aK = {th.m_star:.6g}")
    human.append(f"m† = {th.m_dagger:.3f}")
    human.append(f"m‡ = {th.m_ddagger:.3f}")
    if p.variant is Variant.TOXIC:
        human.append(f"a S1 - b U1 = {th.m_ddagger_toxic:.3f}  (E1 threshold of the toxic Jacobian)")
    values += [("threshold.m_star", th.m_star), ("threshold.m_dagger", th.m_dagger),
               ("threshold.m_ddagger", th.m_ddagger), ("threshold.m_ddagger_toxic", th.m_ddagger_toxic)]
    if with_stability:
        human.append("")
        disc = predator_free_discrepancy(p)
        human += disc.lines()
        values.append(("E1.stated_vs_jacobian_agree", disc.agree))
        try:
            human += locate_transcritical(p).lines()
        except NoExchange as exc:
            human.append(f"transcritical: {exc}")
    block = ["", "[values]"] + [f"{k}={fmt(v)}" for k, v in values]
    return "\n".join(human + block) + "\n"


# -- commands ---------------------------------------------------------------

def _load(args, require=()):
    return load_config(args.config, require=require)


def cmd_simulate(args):
    cfg = _load(args, require=("initial", "integrate"))
    if args.dump_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    traj = integrate(cfg.params, cfg.initial, cfg.integrate)
    out = args.out or cfg.output.get("csv")
    header, rows = trajectory_rows(traj)
    write_csv(out, header, rows)
    if cfg.output.get("svg"):
        Path(cfg.output["svg"]).write_text(trajectory_svg(traj, f"{cfg.variant.value} model"), encoding="utf-8")
    if out and out != "-":
        msg = f"wrote {len(traj.t)} samples to {out} ({traj.accepted} steps, {traj.rejected} rejected)"
        if traj.bound is not None:
            msg += f"; {verify_bound(traj, traj.bound)}"
        print(msg)
    return EXIT_OK


def cmd_equilibria(args, with_stability=False):
    cfg = _load(args)
    if args.dump_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    text = equilibria_report(cfg, with_stability=with_stability)
    sys.stdout.write(text)
    if cfg.output.get("report"):
        Path(cfg.output["report"]).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load(args)
    if args.dump_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    if args.param != "m":
        raise ConfigError(f"only the predator mortality 'm' can be swept, got {args.param!r}")
    res = sweep_mortality(cfg.params, args.m_from, args.m_to, args.steps)
    names = ["P", "Q", ""] if cfg.params.dim == 2 else ["P", "S", "U"]
    rows = []
    for row in res.rows():
        comps = list(row[4:]) + [""] * (3 - len(row[4:]))
        rows.append((*row[:4], *comps))
    write_csv(args.out, ["m", "label", "feasible", "classification", "P", "S", "U"], rows)
    m_tc = thresholds(cfg.params).transcritical(cfg.params.variant)
    found = "none" if res.detected_m is None else f"{res.detected_m:.6g}"
    target = sys.stderr if not args.out or args.out == "-" else sys.stdout
    print(f"stability exchange detected at m = {found} (analytic {m_tc:.6g}, "
          f"grid spacing {res.spacing:.3g}); columns {','.join(n for n in names if n)}", file=target)
    return EXIT_OK


def cmd_figure(args):
    cfg = bundled_config(args.figure)
    if args.dump_config:
        sys.stdout.write(cfg.dump())
        return EXIT_OK
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    res = reproduce_figure(args.figure, cfg)
    header, rows = trajectory_rows(res.trajectory)
    write_csv(outdir / cfg.output.get("csv", f"fig{args.figure}.csv"), header, rows)
    (outdir / cfg.output.get("svg", f"fig{args.figure}.svg")).write_text(
        trajectory_svg(res.trajectory, f"Figure {args.figure}: P, S, U vs t (toxic infected)"),
        encoding="utf-8")
    text = "\n".join(res.report) + "\n"
    (outdir / cfg.output.get("report", f"fig{args.figure}_report.txt")).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecoepi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, needs_config=True):
        sp = sub.add_parser(name, help=help_)
        if needs_config:
            sp.add_argument("--config", required=True, help="scenario configuration file")
        sp.add_argument("--dump-config", action="store_true",
                        help="print the parsed configuration in canonical form and exit")
        return sp

    sp = add("simulate", "integrate a trajectory and write CSV")
    sp.add_argument("--out", help="CSV output path ('-' for stdout)")
    sp.set_defaults(func=cmd_simulate)

    sp = add("equilibria", "list equilibria, feasibility and thresholds")
    sp.set_defaults(func=cmd_equilibria)

    sp = add("stability", "equilibria with eigenvalues, Routh-Hurwitz data and the transcritical check")
    sp.set_defaults(func=lambda a: cmd_equilibria(a, with_stability=True))

    sp = add("sweep", "scan the predator mortality and classify equilibria")
    sp.add_argument("--param", default="m")
    sp.add_argument("--from", dest="m_from", type=float, required=True)
    sp.add_argument("--to", dest="m_to", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--out", help="CSV output path ('-' for stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = add("figure", "reproduce one of the three toxic-variant figures", needs_config=False)
    sp.add_argument("figure", type=int, choices=(1, 2, 3))
    sp.add_argument("--outdir", default=".")
    sp.set_defaults(func=cmd_figure)
    return parser


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EcoepiError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv=None):
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
