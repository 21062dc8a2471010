"""Command-line front end.

Subcommands: qfun | levels | branch | figure | excite | units.
Outputs are deterministic: CSV with '#'-prefixed metadata lines (no
timestamps), floats printed with 17 significant digits, and a JSON
mirror behind --json.  Exit codes: 0 ok, 2 usage/config, 3 solver,
4 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, krein, spectrum
from .errors import ConfigError, ConvergenceError, DomainError, PoleError, QdotError

POLE_MARK = "pole"
POLE_WINDOW = 1e-6      # sweep points this close to a pole are flagged, not errored


def _fmt(x):
    return f"{x:.16e}"


def _parse_range(text):
    """lo:hi:n -> n evenly spaced points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be lo:hi:n, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    n = int(parts[2])
    if not (lo < hi) or n < 2:
        raise ConfigError(f"range needs lo < hi and n >= 2, got {text!r}")
    return np.linspace(lo, hi, n)


def _emit(path, meta, header, rows, as_json):
    lines = [f"# qdotspec {__version__}"]
    lines += [f"# {m}" for m in meta]
    if as_json:
        payload = {"meta": list(meta),
                   "columns": header,
                   "rows": [list(r) for r in rows]}
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        body = [",".join(header)]
        body += [",".join(str(c) for c in r) for r in rows]
        text = "\n".join(lines + body) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _near_pole(zeta, q):
    return krein._nearest_pole_distance(zeta, q) < POLE_WINDOW


def cmd_qfun(args):
    zeta_is_range = ":" in args.zeta
    q_is_range = ":" in args.q
    if zeta_is_range == q_is_range:
        raise ConfigError("exactly one of --zeta/--q must be a lo:hi:n range")
    if zeta_is_range:
        zetas = _parse_range(args.zeta)
        qs = np.full_like(zetas, float(args.q))
    else:
        qs = _parse_range(args.q)
        zetas = np.full_like(qs, float(args.zeta))
    rows = []
    for zeta, q in zip(zetas, qs):
        zeta, q = float(zeta), float(q)
        if _near_pole(zeta, q):
            rows.append((_fmt(zeta), _fmt(q), POLE_MARK, POLE_MARK, POLE_MARK))
            continue
        ev = krein.q_center(zeta) if q == 0.0 else krein.q_iso(zeta, q)
        dq = krein.q_dzeta(zeta, q)
        rows.append((_fmt(zeta), _fmt(q), _fmt(ev.value), _fmt(dq), ev.method))
    meta = [f"command: qfun --zeta {args.zeta} --q {args.q}",
            "units: dimensionless (energies in hbar*Omega, lengths in L)"]
    _emit(args.out, meta, ["zeta", "q", "Q", "dQ_dzeta", "method"], rows, args.json)
    return 0


_REGIME = {(True, True): "alpha>0, q=0", (True, False): "alpha>0, q!=0",
           (False, True): "alpha<0, q=0", (False, False): "alpha<0, q!=0"}


def cmd_levels(args):
    q, alpha, n_max = args.q, args.alpha, args.nmax
    desc = spectrum.classify_spectrum(q, alpha, n_max)
    rows = []
    for d in desc:
        idx = d.branch_index if d.branch_index is not None else int(round(d.value - 1.5))
        rows.append((idx, d.part, _fmt(d.value), d.multiplicity))
    if alpha == 0.0:
        regime = "alpha=0, q=0" if q == 0.0 else "alpha=0, q!=0"
    else:
        regime = _REGIME[(alpha > 0, q == 0.0)]
    meta = [f"command: levels --q {args.q} --alpha {args.alpha} --nmax {args.nmax}",
            f"regime: {regime}"]
    _emit(args.out, meta, ["n", "part", "energy", "multiplicity"], rows, args.json)
    return 0


def cmd_branch(args):
    q_is_range = ":" in args.q
    a_is_range = ":" in args.alpha
    if q_is_range == a_is_range:
        raise ConfigError("exactly one of --q/--alpha must be a lo:hi:n range")
    if q_is_range:
        qs = _parse_range(args.q)
        alphas = np.full_like(qs, float(args.alpha))
    else:
        alphas = _parse_range(args.alpha)
        qs = np.full_like(alphas, float(args.q))
    rows = []
    guess = None
    for q, alpha in zip(qs, alphas):
        bp = spectrum.solve_branch(args.n, float(q), float(alpha), guess=guess)
        guess = bp.energy
        rows.append((args.n, _fmt(float(q)), _fmt(float(alpha)), _fmt(bp.energy),
                     _fmt(bp.residual), bp.iterations))
    meta = [f"command: branch --n {args.n} --q {args.q} --alpha {args.alpha}"]
    _emit(args.out, meta, ["n", "q", "alpha", "energy", "residual", "iterations"],
          rows, args.json)
    return 0


# figure parameter sets follow the plotted families: alpha in units of
# alpha0 for the strength sweeps, q in oscillator lengths for position
# sweeps.  Plotted ranges are reconstructions (documented defaults),
# not reproductions.
_FIG_ALPHAS = [("a", -1.0), ("b", 0.0), ("c", 1.0)]
_FIG_QS = [("a", 0.0), ("b", 0.1), ("c", 1.0), ("d", 3.0)]


def _figure_rows_q_sweep(alpha_ratio, n_branches, points):
    level_alpha = spectrum.alpha_ratio_to_q_level(alpha_ratio)
    qs = np.linspace(0.0, 5.0, points)
    guesses = [None] * n_branches
    rows = []
    for q in qs:
        row = [_fmt(float(q))]
        for n in range(n_branches):
            bp = spectrum.solve_branch(n, float(q), level_alpha, guess=guesses[n])
            guesses[n] = bp.energy
            row.append(_fmt(bp.energy))
        rows.append(tuple(row))
    return rows


def _figure_rows_alpha_sweep(q, n_branches, points):
    ratios = np.linspace(-3.0, 3.0, points)
    guesses = [None] * n_branches
    rows = []
    for ratio in ratios:
        row = [_fmt(float(ratio))]
        for n in range(n_branches):
            bp = spectrum.solve_branch(n, q, spectrum.alpha_ratio_to_q_level(float(ratio)),
                                       guess=guesses[n])
            guesses[n] = bp.energy
            row.append(_fmt(bp.energy))
        rows.append(tuple(row))
    return rows


def cmd_figure(args):
    import os
    fid = args.id
    points = args.points
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    written = []

    def emit(name, meta, header, rows):
        path = os.path.join(outdir, name)
        _emit(path, meta, header, rows, args.json)
        written.append(path)

    if fid == 1:           # Q vs zeta at several q
        for tag, q in _FIG_QS:
            zetas = np.linspace(-5.0, 6.0, points)
            rows = []
            for z in zetas:
                z = float(z)
                if _near_pole(z, q):
                    rows.append((_fmt(z), POLE_MARK))
                else:
                    rows.append((_fmt(z), _fmt(krein.q_value(z, q))))
            emit(f"fig1{tag}.csv", [f"figure 1({tag}): Q vs zeta at q={q}"],
                 ["zeta", "Q"], rows)
    elif fid == 2:         # Q vs q at several zeta
        for tag, zeta in [("a", 0.0), ("b", 1.0), ("c", 2.0), ("d", 3.0), ("e", 4.0)]:
            qs = np.linspace(1e-6, 5.0, points)
            rows = [(_fmt(float(q)), _fmt(krein.q_iso(zeta, float(q)).value)) for q in qs]
            emit(f"fig2{tag}.csv", [f"figure 2({tag}): Q vs q at zeta={zeta}"],
                 ["q", "Q"], rows)
    elif fid == 3:         # E_n vs q at alpha/alpha0 in {-1, 0, 1}
        nb = args.nmax + 1
        for tag, ratio in _FIG_ALPHAS:
            rows = _figure_rows_q_sweep(ratio, nb, points)
            emit(f"fig3{tag}.csv",
                 [f"figure 3({tag}): E_n vs q at alpha/alpha0={ratio}"],
                 ["q"] + [f"E{n}" for n in range(nb)], rows)
    elif fid == 4:         # E_n vs alpha at q in {0, 0.1, 1, 3}
        nb = args.nmax + 1
        for tag, q in _FIG_QS:
            rows = _figure_rows_alpha_sweep(q, nb, points)
            emit(f"fig4{tag}.csv",
                 [f"figure 4({tag}): E_n vs alpha/alpha0 at q={q}"],
                 ["alpha_over_alpha0"] + [f"E{n}" for n in range(nb)], rows)
    elif fid == 5:         # excitation energies vs q
        for tag, ratio in _FIG_ALPHAS:
            level_alpha = spectrum.alpha_ratio_to_q_level(ratio)
            qs = np.linspace(0.0, 5.0, points)
            g0 = g1 = None
            rows = []
            for q in qs:
                b0 = spectrum.solve_branch(0, float(q), level_alpha, guess=g0)
                b1 = spectrum.solve_branch(1, float(q), level_alpha, guess=g1)
                g0, g1 = b0.energy, b1.energy
                rows.append((_fmt(float(q)), _fmt(b1.energy - b0.energy),
                             _fmt(krein.level(1) - b1.energy)))
            emit(f"fig5{tag}.csv",
                 [f"figure 5({tag}): excitation energies vs q at alpha/alpha0={ratio}"],
                 ["q", "E1_minus_E0", "lambda1_minus_E1"], rows)
    elif fid == 6:         # excitation energies vs alpha
        for tag, q in [("a", 0.0), ("b", 1.0), ("c", 3.0)]:
            ratios = np.linspace(-3.0, 3.0, points)
            g0 = g1 = None
            rows = []
            for ratio in ratios:
                la = spectrum.alpha_ratio_to_q_level(float(ratio))
                b0 = spectrum.solve_branch(0, q, la, guess=g0)
                b1 = spectrum.solve_branch(1, q, la, guess=g1)
                g0, g1 = b0.energy, b1.energy
                rows.append((_fmt(float(ratio)), _fmt(b1.energy - b0.energy),
                             _fmt(krein.level(1) - b1.energy)))
            emit(f"fig6{tag}.csv",
                 [f"figure 6({tag}): excitation energies vs alpha/alpha0 at q={q}"],
                 ["alpha_over_alpha0", "E1_minus_E0", "lambda1_minus_E1"], rows)
    else:
        raise ConfigError("figure id must be 1..6")
    sys.stdout.write("\n".join(written) + "\n")
    return 0


def cmd_excite(args):
    ex = spectrum.excitation_energies(args.q, args.alpha, args.nmax)
    rows = [(n, _fmt(gap_below), _fmt(gap_above))
            for (n, gap_below, gap_above) in ex.rows]
    meta = [f"command: excite --q {args.q} --alpha {args.alpha} --nmax {args.nmax}",
            f"E1_minus_E0: {_fmt(ex.e1_minus_e0)}"]
    _emit(args.out, meta, ["n", "lambda_n_minus_E_n", "E_np1_minus_lambda_n"],
          rows, args.json)
    return 0


def _load_config(path):
    keys = {}
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" in line:
                    key, val = line.split("=", 1)
                else:
                    parts = line.split(None, 1)
                    if len(parts) != 2:
                        raise ConfigError(f"cannot parse config line {raw!r}")
                    key, val = parts
                keys[key.strip()] = float(val.strip())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad value in config {path}: {exc}") from None
    omega = (keys.pop("omega1", 1.0), keys.pop("omega2", 1.0), keys.pop("omega3", 1.0))
    phys = None
    if {"mu", "hbar", "Omega"} <= set(keys):
        phys = spectrum.PhysicalScales(keys["mu"], keys["hbar"], keys["Omega"],
                                       keys.get("alpha"))
    elif {"mu", "hbar", "Omega"} & set(keys):
        raise ConfigError("physical block needs all of mu, hbar, Omega")
    return spectrum.OscillatorConfig(omega=omega, physical=phys)


def cmd_units(args):
    cfg = _load_config(args.config)
    out = {
        "omega": list(cfg.omega),
        "isotropic": cfg.isotropic,
    }
    if cfg.physical is not None:
        p = cfg.physical
        out["physical"] = {"mu": p.mu, "hbar": p.hbar, "Omega": p.Omega,
                           "alpha": p.alpha}
        out["derived"] = {
            "length_unit_L": cfg.length_unit,
            "energy_unit": p.hbar * p.Omega,
            "alpha_unit_alpha0": cfg.alpha_unit,
        }
        if p.alpha is not None and p.alpha != 0.0:
            out["derived"]["scattering_length"] = cfg.scattering_length
            out["derived"]["alpha_over_alpha0"] = spectrum.alpha_scaling(p.alpha, cfg)
    text = json.dumps(out, indent=1, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _build_parser():
    ap = argparse.ArgumentParser(prog="qdotspec",
                                 description="Spectra of a parabolic quantum dot "
                                             "with a point impurity")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfun", help="tabulate the Q-function along a sweep")
    p.add_argument("--zeta", required=True, help="value or lo:hi:n range")
    p.add_argument("--q", required=True, help="value or lo:hi:n range")
    p.add_argument("--out"), p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_qfun)

    p = sub.add_parser("levels", help="classified spectrum at (q, alpha)")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--out"), p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("branch", help="sweep one eigenvalue branch")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", required=True, help="value or lo:hi:n range")
    p.add_argument("--alpha", required=True, help="value or lo:hi:n range")
    p.add_argument("--out"), p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("figure", help="regenerate figure data as CSV")
    p.add_argument("--id", type=int, required=True, choices=range(1, 7))
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("excite", help="excitation-energy gaps at (q, alpha)")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--out"), p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_excite)

    p = sub.add_parser("units", help="echo an oscillator config with derived scales")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_units)
    return ap


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, DomainError, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, QdotError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
