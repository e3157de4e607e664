"""Command-line front end: every table this package can compute, as data.

The subcommands mirror the physics pipeline: `ideal` for the unperturbed
ladder, `reflect` for the quantum-reflection amplitude (optionally fitted
to the effective-range expansion), `resonances` and `poles` for the real
and complex spectra on both the wave-equation and effective-range routes,
`scan` for the cavity response function with per-peak Lorentzian fits,
and `langer-dump` for the transformed-coordinate grids behind it all.

Energies are printed in units of eps_g by default (--si switches the
human-readable output to peV); emitted CSV files keep their fixed schemas
and full repr precision so that re-parsing reproduces the in-memory
values bit for bit.  Exit codes: 0 on success, 2 for usage errors, 3 for
numerical failures, with the error class name on stderr.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import cavity, effrange, scatter
from .airy import airy_zero
from .errors import QlevNumericalError, QlevUsageError
from .liouville import LangerProblem, write_langer_csv
from .potential import (
    ELECTRON_VOLT,
    HBAR,
    PhysicalSetup,
    PotentialModel,
    SurfacePreset,
    builtin_preset_names,
    load_preset,
    read_potential_table,
)

PEV = 1e-12 * ELECTRON_VOLT  # joules per peV

#: Reflection-scan sample count (geometric spacing across the window).
REFLECT_SAMPLES = 120


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved inputs shared by every subcommand."""

    setup: PhysicalSetup
    preset: SurfacePreset | None
    model: PotentialModel | None
    coeffs: effrange.EffectiveRangeCoefficients | None
    label: str


def _resolve_surface(
    preset_name: str | None,
    config_path: str | None,
    model_variant: str | None,
    table_path: str | None,
    mass: float,
    gravity: float,
    need_surface: bool = True,
) -> RunConfig:
    """Build the RunConfig, enforcing the exactly-one-surface rule."""
    setup = PhysicalSetup(mass=mass, gravity=gravity)
    chosen = [x for x in (preset_name, config_path, table_path) if x is not None]
    if len(chosen) > 1:
        raise QlevUsageError(
            "choose exactly one of --preset, --config, --table"
        )
    if not chosen:
        if need_surface:
            raise QlevUsageError(
                "no surface selected; use --preset "
                f"({', '.join(builtin_preset_names())}), --config, or --table"
            )
        return RunConfig(setup, None, None, None, "ideal")

    if table_path is not None:
        if model_variant not in (None, "table"):
            raise QlevUsageError(
                f"--table provides the potential; --model {model_variant} "
                "conflicts with it"
            )
        model = read_potential_table(table_path, label=Path(table_path).stem)
        return RunConfig(setup, None, model, None, model.label)

    if model_variant == "table":
        raise QlevUsageError("--model table requires --table <csv>")
    surface = load_preset(preset_name or config_path)
    model = surface.model(model_variant or "v4")
    coeffs = effrange.preset_coefficients(surface)
    return RunConfig(setup, surface, model, coeffs, surface.name)


def surface_options(fn):
    fn = click.option(
        "--table", "table_path", type=click.Path(exists=True, dir_okay=False),
        default=None, help="Tabulated potential CSV (z_m,V_eV).",
    )(fn)
    fn = click.option(
        "--model", "model_variant", type=click.Choice(["v4", "v3v4", "table"]),
        default=None, help="Potential model variant (default v4).",
    )(fn)
    fn = click.option(
        "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
        default=None, help="Custom surface JSON (same schema as presets).",
    )(fn)
    fn = click.option(
        "--preset", "preset_name", default=None,
        help=f"Built-in surface: {', '.join(builtin_preset_names())}.",
    )(fn)
    return fn


def physics_options(fn):
    fn = click.option(
        "--gravity", type=float, default=9.81, show_default=True,
        help="Gravitational acceleration in m/s^2.",
    )(fn)
    fn = click.option(
        "--mass", type=float, default=1.6735328e-27, show_default=True,
        help="Atom mass in kg (default: hydrogen).",
    )(fn)
    return fn


def output_options(fn):
    fn = click.option("--si", is_flag=True, help="Print energies in peV instead of eps_g.")(fn)
    fn = click.option(
        "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
        show_default=True, help="File format for --out.",
    )(fn)
    fn = click.option(
        "--out", "out_path", type=click.Path(dir_okay=False, writable=True),
        default=None, help="Write the table to this file.",
    )(fn)
    return fn


def run_guarded(body):
    """Run a command body, mapping usage errors to exit 2, numerics to 3."""
    try:
        body()
    except QlevUsageError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    except QlevNumericalError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(3)


def _energy_label(si: bool) -> str:
    return "E_peV" if si else "E_over_epsg"


def _energy_out(setup: PhysicalSetup, bold_e: float, si: bool) -> float:
    return bold_e * setup.eps_g / PEV if si else bold_e


def _print_table(headers: list[str], rows: list[list]) -> None:
    widths = [
        max(len(h), max((len(_cell(r[i])) for r in rows), default=0))
        for i, h in enumerate(headers)
    ]
    click.echo("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in rows:
        click.echo("  ".join(_cell(v).ljust(w) for v, w in zip(row, widths)))


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _write_generic(headers: list[str], rows: list[list], path: str, fmt: str) -> None:
    if fmt == "json":
        doc = [dict(zip(headers, row)) for row in rows]
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
        return
    import csv as _csv

    with open(path, "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(headers)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


@click.group()
def main() -> None:
    """Spectra, shifts, widths, and lifetimes of quantum levitation states."""


# ---------------------------------------------------------------------------
# ideal
# ---------------------------------------------------------------------------


@main.command()
@click.option("--nmax", type=int, default=10, show_default=True)
@physics_options
@output_options
def ideal(nmax, mass, gravity, out_path, fmt, si) -> None:
    """Unperturbed bouncer ladder: E_n0 = lambda_n eps_g."""

    def body() -> None:
        setup = PhysicalSetup(mass=mass, gravity=gravity)
        levels = cavity.ideal_levels(setup, nmax)
        headers = ["n", "lambda_n", "E0_peV", "omega_n1_rad_s"]
        rows = []
        for n, level in enumerate(levels, start=1):
            rows.append(
                [
                    n,
                    airy_zero(n),
                    level / PEV,
                    (level - levels[0]) / HBAR,
                ]
            )
        if out_path:
            _write_generic(headers, rows, out_path, fmt)
            click.echo(f"wrote {len(rows)} levels to {out_path}")
        else:
            _print_table(headers, rows)

    run_guarded(body)


# ---------------------------------------------------------------------------
# reflect
# ---------------------------------------------------------------------------


@main.command()
@surface_options
@physics_options
@output_options
@click.option(
    "--window", nargs=2, type=float, default=(0.5, 500.0), show_default=True,
    help="Energy window in eps_g for the scan.",
)
@click.option("--fit", is_flag=True, help="Fit effective-range coefficients to the scan.")
@click.option(
    "--synthetic", is_flag=True,
    help="Generate the scan from the preset's own r(k) model instead of the wave equation.",
)
def reflect(
    preset_name, config_path, model_variant, table_path, mass, gravity,
    out_path, fmt, si, window, fit, synthetic,
) -> None:
    """Quantum-reflection amplitude r(k) over an energy window."""

    def body() -> None:
        lo, hi = window
        if not (0.0 < lo < hi):
            raise QlevUsageError(f"empty reflection window ({lo:g}, {hi:g}] eps_g")
        cfg = _resolve_surface(
            preset_name, config_path, model_variant, table_path, mass, gravity
        )
        if synthetic:
            if cfg.coeffs is None:
                raise QlevUsageError(
                    "--synthetic needs preset/config coefficients, not a table"
                )
            coeffs = dataclasses.replace(cfg.coeffs, window=(lo, hi))
            rows = effrange.synthetic_reflection(coeffs, cfg.setup, 400)
        else:
            rows = [
                scatter.reflection_amplitude(
                    cfg.setup, cfg.model, energy=cfg.setup.from_eps_g(bold_e)
                )
                for bold_e in np.geomspace(lo, hi, REFLECT_SAMPLES)
            ]
        if out_path:
            if fmt == "json":
                doc = [
                    {"k_per_m": row.k, "re_r": row.r.real, "im_r": row.r.imag}
                    for row in rows
                ]
                Path(out_path).write_text(json.dumps(doc, indent=2) + "\n")
            else:
                scatter.write_reflection_csv(rows, out_path)
            click.echo(f"wrote {len(rows)} samples to {out_path}")
        else:
            headers = ["k_per_m", "|r|", "arg_r"]
            _print_table(
                headers,
                [[row.k, abs(row.r), math.atan2(row.r.imag, row.r.real)] for row in rows],
            )
        if fit:
            ell = cfg.coeffs.ell if cfg.coeffs is not None else cfg.model.ell_cp(cfg.setup)
            fitted = effrange.fit_coefficients(
                rows, ell, window=(lo, hi), setup=cfg.setup, label=cfg.label
            )
            click.echo(effrange.format_coefficients(fitted))

    run_guarded(body)


# ---------------------------------------------------------------------------
# resonances
# ---------------------------------------------------------------------------


@main.command()
@surface_options
@physics_options
@output_options
@click.option("--nmax", type=int, default=10, show_default=True)
def resonances(
    preset_name, config_path, model_variant, table_path, mass, gravity,
    out_path, fmt, si, nmax,
) -> None:
    """Real resonance energies: wave-equation and effective-range routes."""

    def body() -> None:
        cfg = _resolve_surface(
            preset_name, config_path, model_variant, table_path, mass, gravity
        )
        setup = cfg.setup
        eps_g = setup.eps_g
        rec_num = (
            cavity.resonances_numeric(setup, cfg.model, nmax)
            if cfg.model is not None
            else []
        )
        rec_ana = (
            cavity.resonances_effective_range(setup, cfg.coeffs, nmax)
            if cfg.coeffs is not None
            else []
        )
        levels1 = (
            cavity.scattering_length_levels(setup, cfg.coeffs.a, nmax)
            if cfg.coeffs is not None
            else None
        )
        unit = PEV if si else eps_g
        headers = ["n", "E0_" + ("peV" if si else "epsg")]
        if rec_num:
            headers += ["E_num", "shift_num"]
        if rec_ana:
            headers += ["E_ana", "shift_ana", "E_ana_minus_reE1"]
        if rec_num and rec_ana:
            headers += ["dE_ana_num"]
        rows = []
        for i in range(nmax):
            n = i + 1
            e0 = airy_zero(n) * eps_g
            row: list = [n, e0 / unit]
            if rec_num:
                e_num = rec_num[i].e_real
                row += [e_num / unit, (e_num - e0) / unit]
            if rec_ana:
                e_ana = rec_ana[i].e_real
                row += [e_ana / unit, (e_ana - e0) / unit]
                row += [(e_ana - levels1[i].real) / unit]
            if rec_num and rec_ana:
                row += [(rec_ana[i].e_real - rec_num[i].e_real) / unit]
            rows.append(row)
        _print_table(headers, rows)
        if out_path:
            if fmt == "json":
                _write_generic(headers, rows, out_path, fmt)
            else:
                cavity.write_resonance_csv(
                    setup, rec_num + rec_ana, out_path, surface=cfg.label
                )
            click.echo(f"wrote {out_path}")

    run_guarded(body)


# ---------------------------------------------------------------------------
# poles
# ---------------------------------------------------------------------------


@main.command()
@surface_options
@physics_options
@output_options
@click.option("--nmax", type=int, default=5, show_default=True)
def poles(
    preset_name, config_path, model_variant, table_path, mass, gravity,
    out_path, fmt, si, nmax,
) -> None:
    """Complex poles of the cavity response, with lifetimes."""

    def body() -> None:
        cfg = _resolve_surface(
            preset_name, config_path, model_variant, table_path, mass, gravity
        )
        setup = cfg.setup
        eps_g = setup.eps_g
        unit = PEV if si else eps_g
        poles_ana = (
            cavity.complex_poles(setup, cfg.coeffs, nmax)
            if cfg.coeffs is not None
            else []
        )
        poles_num = (
            cavity.complex_poles(setup, cfg.model, nmax)
            if cfg.model is not None
            else []
        )
        levels1 = (
            cavity.scattering_length_levels(setup, cfg.coeffs.a, nmax)
            if cfg.coeffs is not None
            else None
        )
        headers = ["n"]
        if poles_ana:
            headers += ["reE_ana", "imE_ana", "tau_ana_s", "dE1_ana"]
        if poles_num:
            headers += ["reE_num", "imE_num", "tau_num_s"]
        if poles_ana and poles_num:
            headers += ["re_dE_ana_num", "im_dE_ana_num"]
        rows = []
        for i in range(nmax):
            row: list = [i + 1]
            if poles_ana:
                pa = poles_ana[i]
                row += [
                    pa.real / unit,
                    pa.imag / unit,
                    cavity.pole_lifetime(pa),
                    abs(pa - levels1[i]) / unit,
                ]
            if poles_num:
                pn = poles_num[i]
                row += [pn.real / unit, pn.imag / unit, cavity.pole_lifetime(pn)]
            if poles_ana and poles_num:
                diff = poles_ana[i] - poles_num[i]
                row += [diff.real / unit, diff.imag / unit]
            rows.append(row)
        _print_table(headers, rows)
        if cfg.coeffs is not None:
            _, b = effrange.scattering_length(cfg.coeffs)
            tau = cavity.scattering_length_lifetime(setup, b)
            click.echo(f"scattering-length lifetime hbar/(2 m g b) = {tau:.6g} s")
        if out_path:
            if fmt == "json":
                _write_generic(headers, rows, out_path, fmt)
            else:
                records = cavity.pole_records(
                    setup, poles_ana, cavity.METHOD_EFFECTIVE_RANGE
                ) + cavity.pole_records(setup, poles_num, cavity.METHOD_NUMERIC)
                cavity.write_resonance_csv(setup, records, out_path, surface=cfg.label)
            click.echo(f"wrote {out_path}")

    run_guarded(body)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


@main.command()
@surface_options
@physics_options
@output_options
@click.option(
    "--window", nargs=2, type=float, default=(1.0, 15.0), show_default=True,
    help="Energy window in eps_g.",
)
@click.option(
    "--nmax", type=int, default=5, show_default=True,
    help="Fit Lorentzians to peaks n = 1..nmax that fall inside the window.",
)
def scan(
    preset_name, config_path, model_variant, table_path, mass, gravity,
    out_path, fmt, si, window, nmax,
) -> None:
    """Cavity response |f(E)|^2 over a grid, plus per-peak Lorentzian fits."""

    def body() -> None:
        lo, hi = window
        if not (0.0 < lo < hi):
            raise QlevUsageError(f"empty scan window ({lo:g}, {hi:g}] eps_g")
        cfg = _resolve_surface(
            preset_name, config_path, model_variant, table_path, mass, gravity
        )
        setup = cfg.setup
        eps_g = setup.eps_g
        source = cfg.coeffs if cfg.coeffs is not None else cfg.model
        n_grid = int(max(200, min(4000, 50 * (hi - lo))))
        rows = cavity.response_scan(setup, source, np.linspace(lo, hi, n_grid))

        markers = [
            (n, airy_zero(n))
            for n in range(1, nmax + 1)
            if lo <= airy_zero(n) <= hi
        ]
        peaks = []
        if markers:
            poles = cavity.complex_poles(setup, source, markers[-1][0])
            for n, _ in markers:
                pole = poles[n - 1] / eps_g
                c0, w0 = pole.real, abs(pole.imag)
                if not (lo <= c0 - 1.7 * w0 and c0 + 1.7 * w0 <= hi):
                    continue
                grid = np.concatenate(
                    [
                        [c0 - 1.7 * w0],
                        np.linspace(c0 - 0.9 * w0, c0 + 0.9 * w0, 79),
                        [c0 + 1.7 * w0],
                    ]
                )
                peak = cavity.lorentzian_fit(
                    cavity.response_scan(setup, source, grid)
                )
                peaks.append((n, peak, pole))

        if peaks:
            click.echo("peak fits (eps_g units):")
            _print_table(
                ["n", "center", "half_width", "amplitude", "residual", "E0_marker"],
                [
                    [n, p.center, p.half_width, p.amplitude, p.residual, airy_zero(n)]
                    for n, p, _ in peaks
                ],
            )
        else:
            click.echo("no resonance peaks inside the window")

        if out_path:
            if fmt == "json":
                doc = {
                    "window_epsg": [lo, hi],
                    "surface": cfg.label,
                    "ideal_markers_epsg": {str(n): m for n, m in markers},
                    "grid": [{"E_over_epsg": e, "abs_f_sq": f} for e, f in rows],
                    "peaks": [
                        {
                            "n": n,
                            "center_epsg": p.center,
                            "half_width_epsg": p.half_width,
                            "amplitude": p.amplitude,
                            "residual": p.residual,
                        }
                        for n, p, _ in peaks
                    ],
                }
                Path(out_path).write_text(json.dumps(doc, indent=2) + "\n")
            else:
                cavity.write_response_csv(rows, out_path)
            click.echo(f"wrote {len(rows)} grid points to {out_path}")

    run_guarded(body)


# ---------------------------------------------------------------------------
# langer-dump
# ---------------------------------------------------------------------------


@main.command("langer-dump")
@surface_options
@physics_options
@click.option(
    "--energy", "bold_e", type=float, required=True,
    help="Energy in eps_g at which to dump the transform grids.",
)
@click.option(
    "--out", "out_path", type=click.Path(dir_okay=False, writable=True),
    required=True, help="CSV output path (z_m,bold_z,bold_f,q).",
)
@click.option("--points", type=int, default=400, show_default=True)
def langer_dump(
    preset_name, config_path, model_variant, table_path, mass, gravity,
    bold_e, out_path, points,
) -> None:
    """Langer-transform grids (z, bold_z, bold_f, Q) at one energy."""

    def body() -> None:
        cfg = _resolve_surface(
            preset_name, config_path, model_variant, table_path, mass, gravity,
            need_surface=False,
        )
        problem = LangerProblem(
            cfg.setup, cfg.model, cfg.setup.from_eps_g(bold_e)
        )
        write_langer_csv(problem, out_path, n_points=points)
        click.echo(f"wrote {points} rows to {out_path}")

    run_guarded(body)


if __name__ == "__main__":
    main()
