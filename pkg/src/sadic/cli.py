"""Command-line front end: orbits, sweeps, coding, certification, rendering.

Exit codes: 0 success, 2 certification failure, 3 inconclusive interval
comparison, 4 domain error.  All randomness is seeded; fixed seeds give
byte-identical CSV/JSON artifacts.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from fractions import Fraction

import click
import numpy as np

from . import automaton as automaton_mod
from . import fractal as fractal_mod
from . import lyapunov as lyapunov_mod
from . import presets as presets_mod
from . import raster, torus
from .algorithms import (
    Direction,
    DomainError,
    InconclusiveError,
    directive_sequence,
    get_algorithm,
    interval_orbit,
    step,
)
from .words import DirectiveSequence, complexity, fixed_point_prefix

EXIT_CERT_FAIL = 2
EXIT_INCONCLUSIVE = 3
EXIT_DOMAIN = 4


def _fail(code: int, message: str) -> None:
    click.echo(json.dumps({"error": message}), err=True)
    sys.exit(code)


def _parse_components(spec: str) -> list[Fraction]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        out.append(Fraction(part))
    return out


def _decimal_ulp(part: str) -> Fraction:
    """Half-width uncertainty of a decimal literal: one unit in the last place."""
    part = part.strip()
    if "/" in part or "." not in part:
        return Fraction(0)
    digits = len(part.split(".")[1])
    return Fraction(1, 10**digits)


@click.group()
def main() -> None:
    """Extended continued fraction algorithms and their fractal geometry."""


@main.command()
@click.option("--algo", required=True)
@click.option("--x", "xspec", required=True, help="comma-separated rationals or decimals")
@click.option("--steps", default=20, show_default=True)
@click.option(
    "--mode",
    type=click.Choice(["exact", "interval", "float"]),
    default="exact",
    show_default=True,
)
def orbit(algo: str, xspec: str, steps: int, mode: str) -> None:
    """Run the algorithm orbit; one JSON line per step."""
    alg = get_algorithm(algo)
    try:
        comps = _parse_components(xspec)
    except ValueError as exc:
        _fail(EXIT_DOMAIN, f"bad direction spec: {exc}")
    if mode == "interval":
        ulps = [_decimal_ulp(p) for p in xspec.split(",")]
        lo = [c - u for c, u in zip(comps, ulps)]
        hi = [c + u for c, u in zip(comps, ulps)]
        acc_lo, acc_hi = tuple(lo), tuple(hi)
        try:
            from .algorithms import interval_step

            for k in range(steps):
                name, acc_lo, acc_hi = interval_step(alg, acc_lo, acc_hi)
                click.echo(
                    json.dumps(
                        {
                            "k": k,
                            "substitution": name,
                            "x_lo": [str(c) for c in acc_lo],
                            "x_hi": [str(c) for c in acc_hi],
                        }
                    )
                )
        except InconclusiveError as exc:
            _fail(EXIT_INCONCLUSIVE, str(exc))
        except DomainError as exc:
            _fail(EXIT_DOMAIN, str(exc))
        return
    try:
        x = Direction(comps, mode="exact" if mode == "exact" else "float")
        for k in range(steps):
            name, x, tie = step(alg, x)
            payload = {
                "k": k,
                "substitution": name,
                "x": [str(c) if mode == "exact" else float(c) for c in x.components],
            }
            if tie:
                payload["tie"] = True
            click.echo(json.dumps(payload))
    except DomainError as exc:
        _fail(EXIT_DOMAIN, str(exc))


@main.command()
@click.option("--algo", default="cassaigne", show_default=True)
@click.option("--trials", default=20, show_default=True)
@click.option("--steps", default=10000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="CSV output path (a PNG report goes next to it)")
def lyapunov(algo: str, trials: int, steps: int, seed: int, out: str | None) -> None:
    """Monte-Carlo Lyapunov sweep; CSV rows (seed, theta1, theta2)."""
    alg = get_algorithm(algo)
    report = lyapunov_mod.pisot_report(alg, trials, steps, seed=seed)
    if out:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["seed", "theta1", "theta2"])
            for row in report.rows:
                writer.writerow([row[0], repr(row[1]), repr(row[2])])
        _scatter_figure(report, os.path.splitext(out)[0] + ".png")
    click.echo(
        json.dumps(
            {
                "algorithm": report.algorithm,
                "n_steps": report.n_steps,
                "trials": len(report.rows),
                "skipped": report.skipped,
                "theta1_mean": report.theta1_mean,
                "theta1_std": report.theta1_std,
                "theta2_mean": report.theta2_mean,
                "theta2_std": report.theta2_std,
                "verdict": report.verdict,
            }
        )
    )


def _scatter_figure(report, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t1 = [r[1] for r in report.rows]
    t2 = [r[2] for r in report.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(t1, t2, s=12, color="#2f4b7c")
    ax.axhline(0.0, color="grey", lw=0.8)
    ax.axvline(0.0, color="grey", lw=0.8)
    ax.set_xlabel("theta1")
    ax.set_ylabel("theta2")
    ax.set_title(f"{report.algorithm}: {len(report.rows)} trials, N={report.n_steps}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@main.command()
@click.option("--algo", default="cassaigne", show_default=True)
@click.option("--x", "xspec", default=None, help="direction; omit for the certified periodic seed")
@click.option("--steps", default=1000, show_default=True)
@click.option("--depth", default=30, show_default=True)
def code(algo: str, xspec: str | None, steps: int, depth: int) -> None:
    """Code the torus orbit; JSON lines (n, letter, certainty)."""
    alg = get_algorithm(algo)
    try:
        if xspec is None:
            if algo != "cassaigne":
                _fail(EXIT_DOMAIN, "certified coding requires --algo cassaigne")
            preset = presets_mod.load("cassaigne-c0c1")
            emb = fractal_mod.ComplexEmbedding()
            sub = alg.substitutions["c0"].compose(alg.substitutions["c1"])
            balls = tuple(
                fractal_mod.Ball.of(b["center_re"], b["center_im"], b["radius"])
                for b in preset["balls"]
            )
            cert = fractal_mod.certify_balls(emb, sub, balls, preset["depth"])
            if not cert.ok:
                _fail(EXIT_CERT_FAIL, "ball certification failed")
            s = DirectiveSequence.periodic(alg.substitutions, preset["block"])
            x = Direction.eigen(sub.matrix)
            part = torus.certified_partition(
                alg.substitutions, s, x, depth, emb, cert, sub.matrix
            )
            trans = torus.TorusTranslation.from_direction(x)
            rep = torus.code_orbit_certified(part, trans, steps)
        else:
            comps = _parse_components(xspec)
            x = Direction(comps)
            s, record = directive_sequence(alg, x, depth)
            if record.exit_index is not None:
                _fail(EXIT_DOMAIN, f"orbit left the domain at step {record.exit_index}")
            f = fractal_mod.approximate(s, x, depth)
            trans = torus.TorusTranslation.from_direction(x)
            rep = torus.code_orbit(f, trans, steps)
    except DomainError as exc:
        _fail(EXIT_DOMAIN, str(exc))
    for n in range(rep.n_steps):
        click.echo(
            json.dumps(
                {
                    "n": n,
                    "letter": int(rep.letters[n]),
                    "certainty": "certain" if bool(rep.certain[n]) else "ambiguous",
                }
            )
        )


@main.command()
@click.option("--preset", "preset_name", default="renormalization", show_default=True)
@click.option("--steps", default=2, show_default=True)
@click.option("--render", "render_dir", default=None, help="directory for step images")
@click.option("--depth", default=None, type=int)
def renormalize(preset_name: str, steps: int, render_dir: str | None, depth: int | None) -> None:
    """Run induction/renormalization steps; JSON report per step."""
    preset = presets_mod.load(preset_name)
    alg = get_algorithm(preset["algorithm"])
    comps = [Fraction(c) for c in preset["direction"]]
    x = Direction(comps, mode="float")
    depth = depth if depth is not None else preset.get("depth", 20)
    try:
        s, record = directive_sequence(alg, x, depth + steps)
        if record.exit_index is not None:
            _fail(EXIT_DOMAIN, f"orbit left the domain at step {record.exit_index}")
        f = fractal_mod.approximate(s, x, depth)
        if render_dir:
            os.makedirs(render_dir, exist_ok=True)
            fractal_mod.render(
                f,
                width=preset.get("width", 420),
                height=preset.get("height", 420),
                out=os.path.join(render_dir, "step0.png"),
            )
        seq = s
        for k in range(steps):
            rstep = torus.renormalize(alg, x, f, seq)
            click.echo(
                json.dumps(
                    {
                        "step": k + 1,
                        "type": rstep.kind,
                        "substitution": rstep.sub_name,
                        "removed": rstep.removed,
                        "det_N": rstep.det_n,
                        "det_identity_error": rstep.det_identity_error,
                        "decomposition_exact": rstep.decomposition_exact,
                        "hausdorff_error": rstep.hausdorff_error,
                        "next_direction": list(rstep.next_direction.v_floats()),
                    }
                )
            )
            x, f, seq = rstep.next_direction, rstep.next_fractal, seq.shifted(1)
            if render_dir:
                fractal_mod.render(
                    f,
                    width=preset.get("width", 420),
                    height=preset.get("height", 420),
                    out=os.path.join(render_dir, f"step{k + 1}.png"),
                )
    except DomainError as exc:
        _fail(EXIT_DOMAIN, str(exc))


@main.command("certify-seed")
@click.option("--preset", "preset_name", default="cassaigne-c0c1", show_default=True)
def certify_seed(preset_name: str) -> None:
    """Certify the ball enclosures and the lattice separation conditions."""
    preset = presets_mod.load(preset_name)
    alg = get_algorithm(preset["algorithm"])
    sub = alg.substitutions[preset["block"][0]]
    for name in preset["block"][1:]:
        sub = sub.compose(alg.substitutions[name])
    emb = fractal_mod.ComplexEmbedding()
    balls = tuple(
        fractal_mod.Ball.of(b["center_re"], b["center_im"], b["radius"])
        for b in preset["balls"]
    )
    cert = fractal_mod.certify_balls(emb, sub, balls, preset["depth"])
    report = fractal_mod.seed_certificate(emb, cert) if cert.ok else None
    payload = {
        "balls_certified": cert.ok,
        "depth": cert.depth,
        "margin": cert.margin,
        "failures": len(cert.failures),
    }
    if report is not None:
        payload.update(
            {
                "origin_outside": report.origin_outside,
                "exceptional_lattice_points": [list(t) for t in report.exceptional],
                "below_threshold": [list(t) for t in report.below_threshold],
                "inconclusive": [list(t) for t in report.inconclusive],
                "min_margin": report.min_margin,
                "enumeration_bound": report.enumeration_bound,
                "seed_ok": report.ok,
            }
        )
    click.echo(json.dumps(payload))
    if report is not None and report.inconclusive:
        sys.exit(EXIT_INCONCLUSIVE)
    if not cert.ok or report is None or not report.ok:
        sys.exit(EXIT_CERT_FAIL)


@main.command()
@click.option("--preset", "preset_name", default=None)
@click.option("--algo", default="cassaigne", show_default=True)
@click.option("--seed", default=None, type=int, help="seeded directive sequence")
@click.option("--n", "n_max", default=None, type=int, help="max factor length (default 200 or preset value)")
@click.option("--out", default=None, help="CSV output path (a PNG plot goes next to it)")
def complexity_cmd(preset_name: str | None, algo: str, seed: int | None, n_max: int | None, out: str | None) -> None:
    """Factor complexity table p(n); CSV columns (sequence, n, p_n, prefix_length)."""
    rows = []
    if preset_name:
        preset = presets_mod.load(preset_name)
        alg = get_algorithm(preset["algorithm"])
        base = preset.get("seed", 0)
        count = preset.get("count", 1)
        n_max = n_max if n_max is not None else preset.get("n_max", 200)
        min_prefix = preset.get("min_prefix", 100000)
        seqs = [
            (f"seed{base + i}", DirectiveSequence.seeded(alg.substitutions, base + i))
            for i in range(count)
        ]
    else:
        alg = get_algorithm(algo)
        min_prefix = 100000
        n_max = n_max if n_max is not None else 200
        if seed is not None:
            seqs = [(f"seed{seed}", DirectiveSequence.seeded(alg.substitutions, seed))]
        else:
            names = sorted(alg.substitutions)
            seqs = [("periodic", DirectiveSequence.periodic(alg.substitutions, names))]
    for label, s in seqs:
        prefix_obj = fixed_point_prefix(s, 1, min_prefix)
        prefix = prefix_obj.rows[0]
        table = complexity(prefix, n_max)
        for n in range(1, n_max + 1):
            rows.append((label, n, table[n], len(prefix)))
    lines = [("sequence", "n", "p_n", "prefix_length")] + rows
    if out:
        with open(out, "w", newline="") as fh:
            csv.writer(fh).writerows(lines)
        _complexity_figure(rows, os.path.splitext(out)[0] + ".png")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerows(lines)


def _complexity_figure(rows, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    by_label: dict[str, list[tuple[int, int]]] = {}
    for label, n, p_n, _ in rows:
        by_label.setdefault(label, []).append((n, p_n))
    for label, pts in by_label.items():
        ax.plot([p[0] for p in pts], [p[1] for p in pts], lw=1, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("p(n)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


main.add_command(complexity_cmd, name="complexity")


@main.command("fractal")
@click.option("--preset", "preset_name", default="rauzy-example", show_default=True)
@click.option("--out", required=True, help="image path (.png or .ppm)")
@click.option("--csv", "csv_out", default=None, help="point-cloud CSV path")
@click.option("--depth", default=None, type=int)
def fractal_cmd(preset_name: str, out: str, csv_out: str | None, depth: int | None) -> None:
    """Render a Rauzy-fractal approximation from a preset."""
    preset = presets_mod.load(preset_name)
    alg = get_algorithm(preset["algorithm"])
    sorted_names = sorted(alg.substitutions)
    names = [sorted_names[int(c)] for c in preset["directive_prefix"]]
    s = DirectiveSequence.explicit(alg.substitutions, names)
    v = [Fraction(c) for c in preset["direction"]]
    depth = depth if depth is not None else preset.get("depth", 20)
    if depth > len(names):
        _fail(EXIT_DOMAIN, "depth exceeds the preset directive prefix")
    f = fractal_mod.approximate(s, v, depth)
    fractal_mod.render(
        f,
        width=preset.get("width", 480),
        height=preset.get("height", 480),
        out=out,
    )
    if csv_out:
        with open(csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["letter", "coord1", "coord2"])
            for a in sorted(f.points):
                for p in f.points[a]:
                    writer.writerow([a, repr(float(p[0])), repr(float(p[1]))])
    click.echo(
        json.dumps(
            {
                "preset": preset_name,
                "depth": depth,
                "points": {str(a): len(f.points[a]) for a in sorted(f.points)},
                "tail_radius": f.tail_radius,
                "tail_rigorous": f.tail_rigorous,
                "image": out,
            }
        )
    )


@main.command("automaton")
@click.option("--algo", required=True)
@click.option("--out", default=None, help="DOT output path (default stdout)")
def automaton_cmd(algo: str, out: str | None) -> None:
    """Export the abelianized prefix automaton in DOT format."""
    alg = get_algorithm(algo)
    aut = automaton_mod.build(alg.substitutions)
    dot = aut.to_dot()
    if out:
        with open(out, "w") as fh:
            fh.write(dot + "\n")
    else:
        click.echo(dot)


if __name__ == "__main__":
    main()
