"""Command-line front end: ``mzsim <command> --config FILE --out FILE``.

Commands
--------
field-profile   |psi|^2 at the second or third grating
fringe-scan     transmission against the third-grating shift, with fit
contrast-curve  relative contrast against d_p / lambda_i
validate        numerical self-checks, exit status 1 on any failure
"""

from __future__ import annotations

import argparse
import configparser
import io
import sys
import warnings

import numpy as np

from . import __version__
from .interferometer import contrast_curve, default_shifts, fit_fringe, pipeline
from .physics import make_config
from .propagate import beam_region
from .scattering import make_event, p1_quadrature
from .validation import run_all

#: config-file key -> make_config keyword
CONFIG_KEYS = {
    "mass_kg": "mass",
    "v_mps": "v",
    "k_i_per_m": "k_i",
    "d_m": "d",
    "delta_m": "delta",
    "n_slits": "n_slits",
    "y12_m": "y12",
    "y23_m": "y23",
}
OPTIONAL_KEYS = ("amplitude", "kick_y12prime_m", "kick_dkx_per_m")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _number(key, text):
    try:
        if key == "amplitude":
            return complex(text.replace(" ", ""))
        if key == "n_slits":
            return int(text)
        return float(text)
    except ValueError:
        raise UsageError(f"{key}: cannot parse {text!r} as a number") from None


def read_pairs(path) -> dict:
    """Raw key/value strings from an INI-style file without section headers."""
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[run]\n" + fh.read(), source=str(path))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from None
    return dict(parser["run"])


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        out[key.strip().lower()] = value.strip()
    return out


def parse_config(path, overrides=None):
    """Config and optional kick parameters from ``path``; ``overrides`` win.

    Returns
    -------
    config : PhysicalConfig
    kick : dict
        ``y12_prime`` and ``dk_x`` when present in the file.
    """
    raw = read_pairs(path)
    raw.update(overrides or {})
    unknown = sorted(set(raw) - set(CONFIG_KEYS) - set(OPTIONAL_KEYS))
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    missing = [key for key in CONFIG_KEYS if key not in raw]
    if missing:
        raise UsageError(f"missing config key(s): {', '.join(missing)}")
    values = {key: _number(key, text) for key, text in raw.items()}
    kwargs = {CONFIG_KEYS[key]: values[key] for key in CONFIG_KEYS}
    if "amplitude" in values:
        kwargs["amplitude"] = values["amplitude"]
    config = make_config(**kwargs)
    kick = {}
    if "kick_y12prime_m" in values:
        kick["y12_prime"] = values["kick_y12prime_m"]
    if "kick_dkx_per_m" in values:
        if "y12_prime" not in kick:
            raise UsageError("kick_dkx_per_m needs kick_y12prime_m")
        kick["dk_x"] = values["kick_dkx_per_m"]
    if kick:
        # validate early so a bad kick is reported as a config error
        make_event(config, kick["y12_prime"], kick.get("dk_x", 0.0))
    return config, kick


def fmt(value) -> str:
    if isinstance(value, complex):
        if value.imag == 0:
            return f"{value.real:.17g}"
        return f"{value.real:.17g}{value.imag:+.17g}j"
    if isinstance(value, (int, np.integer)):
        return str(value)
    return f"{value:.17g}"


def header(command, config, kick, extra=()) -> list:
    lines = [f"# mzsim {__version__}", f"# command: {command}"]
    for key, value in config.as_dict().items():
        lines.append(f"# {key} = {fmt(value)}")
    lines.append(f"# k_per_m = {fmt(config.k)}")
    for key, value in kick.items():
        lines.append(f"# kick_{key} = {fmt(value)}")
    for key, value in extra:
        lines.append(f"# {key} = {value}")
    return lines


def write_csv(path, lines, columns, rows, footer=()):
    buf = io.StringIO()
    for line in lines:
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    for line in footer:
        buf.write(line + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def _kick_mode(kick, nodes):
    if not kick:
        return "laser off"
    if "dk_x" in kick:
        return "single kick"
    return f"photon-averaged ({nodes} nodes)"


def cmd_field_profile(args, config, kick):
    ifm = pipeline(config, args.oversample)
    at_g3 = args.plane == "g3"
    y = config.y12 + config.y23 if at_g3 else config.y12

    def intensity(event):
        wave = ifm.field_at_g3(event) if at_g3 else ifm.field_at_g2(event)
        return wave.intensity

    if not kick:
        values = intensity(None)
    elif "dk_x" in kick:
        values = intensity(make_event(config, kick["y12_prime"], kick["dk_x"]))
    else:
        nodes, weights = p1_quadrature(config.k_i, args.nodes)
        values = np.zeros(ifm.sgrid.count)
        for dk, w in zip(nodes, weights):
            values += w * intensity(make_event(config, kick["y12_prime"], dk))
    region = beam_region(config, y, ifm.sgrid)
    x = ifm.sgrid.x[region]
    extra = [("plane", args.plane), ("y_m", fmt(y)), ("mode", _kick_mode(kick, args.nodes)), ("oversample", args.oversample)]
    write_csv(args.out, header("field-profile", config, kick, extra), ["x_m", "intensity"], zip(x, values[region]))
    return EXIT_OK


def cmd_fringe_scan(args, config, kick):
    ifm = pipeline(config, args.oversample)
    dx3 = default_shifts(config.d, args.per_period, args.periods)
    if not kick:
        t = ifm.transmission_scan(None, dx3)
    elif "dk_x" in kick:
        t = ifm.transmission_scan(make_event(config, kick["y12_prime"], kick["dk_x"]), dx3)
    else:
        t = ifm.averaged_scan(kick["y12_prime"], dx3, args.nodes)
    fit = fit_fringe(np.column_stack([dx3, t]), config.d)
    extra = [("mode", _kick_mode(kick, args.nodes)), ("oversample", args.oversample)]
    footer = [
        f"# fit_a = {fmt(fit.a)}",
        f"# fit_b = {fmt(fit.b)}",
        f"# fit_phi_rad = {fmt(fit.phi)}",
        f"# fit_residual_rms = {fmt(fit.residual_rms)}",
    ]
    rows = zip(dx3, t, fit(dx3))
    write_csv(args.out, header("fringe-scan", config, kick, extra), ["dx3_m", "T", "T_fit"], rows, footer)
    return EXIT_OK


def _r_values(text):
    if text is None:
        return [round(0.1 * i, 10) for i in range(1, 16)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--r-values: cannot parse {text!r}") from None


def cmd_contrast_curve(args, config, kick):
    r_values = _r_values(args.r_values)
    try:
        off, points = contrast_curve(config, r_values, args.nodes, args.oversample, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    extra = [("nodes", args.nodes), ("oversample", args.oversample), ("C0", fmt(off.contrast))]
    rows = [(p.r, p.B_numeric_abs, p.B_analytic_abs, p.phase_shift) for p in points]
    columns = ["dp_over_lambda_i", "B_numeric_abs", "B_analytic_abs", "phase_shift_rad"]
    write_csv(args.out, header("contrast-curve", config, kick, extra), columns, rows)
    return EXIT_OK


def cmd_validate(args, config, kick):
    checks = run_all(config, args.nodes)
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK if failed == 0 else EXIT_FAILED


COMMANDS = {
    "field-profile": cmd_field_profile,
    "fringe-scan": cmd_fringe_scan,
    "contrast-curve": cmd_contrast_curve,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="mzsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mzsim {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="INI-style parameter file")
    parser.add_argument("--out", help="output file (required except for validate)")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    parser.add_argument("--nodes", type=int, default=64, help="quadrature nodes over the photon kick (default 64)")
    parser.add_argument("--oversample", type=int, default=1, help="spatial grid refinement (default 1)")
    parser.add_argument("--plane", choices=("g2", "g3"), default="g2", help="field-profile plane")
    parser.add_argument("--per-period", type=int, default=16, help="fringe-scan samples per period")
    parser.add_argument("--periods", type=int, default=2, help="fringe-scan periods")
    parser.add_argument("--r-values", help="comma-separated d_p/lambda_i values (default 0.1..1.5)")
    parser.add_argument("--workers", type=int, default=1, help="threads for contrast-curve")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command != "validate" and not args.out:
            raise UsageError("--out is required")
        if args.nodes < 2 or args.oversample < 1 or args.per_period < 8 or args.periods < 1 or args.workers < 1:
            raise UsageError("--nodes >= 2, --oversample >= 1, --per-period >= 8, --periods >= 1, --workers >= 1")
        config, kick = parse_config(args.config, parse_overrides(args.set))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return COMMANDS[args.command](args, config, kick)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"mzsim: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
