"""``superlab``: reproduce the figures and run single computations.

Every command writes CSV (the canonical output) and, on request, SVG line
plots, plus a ``.meta.txt`` sidecar listing the resolved parameters.  Data
files carry no timestamps, so repeated runs with the same flags are
byte-identical.

Exit codes: 0 success, 1 check failed, 2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .energy_analysis import energy_bound, mimicry_sweep, spectral_energy, windowed_energy
from .numerics import (
    DomainError,
    NumericalError,
    PreconditionError,
    SingularityError,
    composite_rule,
    default_quad_order,
)
from .oscillator import (
    OscillatorConfig,
    Scaling,
    build_sequence_state,
    hN_closed,
    hermite_identity,
    local_energy_profile,
    scaled_local_energy,
)
from .rotor import RotorState, as_band_limited, local_L2_profile, theta_grid
from .time_evolution import fig5_trace, hN_time, local_time_energy
from .weak_value import (
    angular_momentum_sq_operator,
    evaluator,
    momentum_operator,
    oscillator_hamiltonian,
    oscillator_state,
    sum_rule_check,
    superoscillating_state,
    weak_value_field,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

FIG_DEFAULTS = {
    1: dict(g=0.5, scale=1.0, N_list=(2, 5, 10, 20, 50), x_min=-8.0, x_max=8.0, num=401),
    2: dict(g=0.5, scale=1.0, N_list=(2, 5, 10, 20, 50), x_min=-10.0, x_max=10.0, num=801),
    3: dict(g_list=(0.3, 0.5, 1.0), N_max=200, scale=1.0),
    4: dict(g_list=(0.5, 0.75, 1.0), N_max=500, L=2.0, scale=1.0),
    5: dict(g=0.5, scale=1.0, N_list=(10, 50, 100, 300, 1000), t_min=-1.5, t_max=1.5, t_num=121),
}


class UsageError(Exception):
    pass


# -- parameter parsing ---------------------------------------------------------

def _positive_int(s):
    v = int(s)
    if v < 1:
        raise ValueError("must be a positive integer")
    return v


def _finite(s):
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _positive(s):
    v = _finite(s)
    if v <= 0:
        raise ValueError("must be positive")
    return v


def _nonnegative(s):
    v = _finite(s)
    if v < 0:
        raise ValueError("must be nonnegative")
    return v


def _int_list(s):
    if isinstance(s, tuple):
        return s
    vals = tuple(_positive_int(p) for p in str(s).split(",") if p.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _float_list(s):
    if isinstance(s, tuple):
        return s
    vals = tuple(_positive(p) for p in str(s).split(",") if p.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _scaling(s):
    return Scaling(s).value if not isinstance(s, Scaling) else s.value


def _precision(s):
    v = int(s)
    if not 1 <= v <= 17:
        raise ValueError("must lie in 1..17")
    return v


def _choice(*options):
    def parse(s):
        if s not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return s
    return parse


PARAMS = {
    "id": _positive_int,
    "N": _positive_int,
    "g": _positive,
    "scaling": _scaling,
    "scale": _positive,
    "L": _positive,
    "c": _nonnegative,
    "a": _finite,
    "b": _finite,
    "x": _finite,
    "x_min": _finite,
    "x_max": _finite,
    "num": _positive_int,
    "t_min": _finite,
    "t_max": _finite,
    "t_num": _positive_int,
    "N_list": _int_list,
    "g_list": _float_list,
    "N_max": _positive_int,
    "basis": _choice("oscillator", "plane_wave", "legendre_m0"),
    "tol": _positive,
    "output_dir": str,
    "format": _choice("csv", "svg", "both"),
    "precision": _precision,
}

COMMON = ("output_dir", "format", "precision")

COMMANDS = {
    "fig": dict(keys=("id", "g", "scale", "N_list", "g_list", "N_max", "L", "x_min", "x_max",
                      "num", "t_min", "t_max", "t_num"),
                defaults={}),
    "local-energy": dict(keys=("N", "g", "scaling", "scale", "x_min", "x_max", "num"),
                         defaults=dict(N=20, g=0.5, scaling="inverse_N", scale=1.0,
                                       x_min=-8.0, x_max=8.0, num=401)),
    "spectral-energy": dict(keys=("N", "g", "scaling", "scale"),
                            defaults=dict(N=100, g=0.5, scaling="inverse_N2", scale=1.0)),
    "windowed-energy": dict(keys=("N", "g", "scaling", "scale", "L"),
                            defaults=dict(N=500, g=0.5, scaling="inverse_N2", scale=1.0, L=2.0)),
    "time-evolve": dict(keys=("N", "g", "scaling", "scale", "x", "t_min", "t_max", "t_num"),
                        defaults=dict(N=100, g=0.5, scaling="inverse_N2", scale=1.0, x=0.0,
                                      t_min=-1.0, t_max=1.0, t_num=41)),
    "rotor": dict(keys=("c", "num"), defaults=dict(c=0.5, num=180)),
    "check-identity": dict(keys=("N", "a", "b", "tol"),
                           defaults=dict(N=8, a=1.3, b=-0.7, tol=1e-9)),
    "sum-rule": dict(keys=("basis", "N", "g", "a", "c", "tol"),
                     defaults=dict(basis="oscillator", N=5, g=0.5, a=2.0, c=0.5, tol=1e-6)),
}


def _flag(key):
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"superlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, spec in COMMANDS.items():
        p = sub.add_parser(name)
        for key in spec["keys"] + COMMON:
            # raw strings; parsed after merging with the config file
            p.add_argument(_flag(key), dest=key, default=None, metavar=key.upper())
        p.add_argument("--config", default=None, help="flat 'key = value' file")
    return parser


def read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(command: str, flags: dict, config: dict | None = None) -> dict:
    """Merge defaults < config file < flags and validate every value."""
    spec = COMMANDS[command]
    allowed = set(spec["keys"]) | set(COMMON)
    params = dict(output_dir=".", format="csv", precision=12)
    params.update(spec["defaults"])
    if command == "fig":
        fig_id = (flags.get("id") if flags.get("id") is not None else (config or {}).get("id"))
        if fig_id is None:
            raise UsageError("fig requires --id")
        try:
            fig_id = int(fig_id)
        except ValueError:
            raise UsageError(f"invalid fig id {fig_id!r}") from None
        if fig_id not in FIG_DEFAULTS:
            raise UsageError(f"fig id must be 1..5, got {fig_id}")
        params.update(FIG_DEFAULTS[fig_id])
        params["id"] = fig_id
    for source in (config or {}, flags):
        for key, value in source.items():
            if value is None:
                continue
            if key not in allowed:
                raise UsageError(f"unknown key {key!r} for command {command}")
            params[key] = value
    for key, value in list(params.items()):
        try:
            params[key] = PARAMS[key](value) if isinstance(value, str) else value
        except ValueError as exc:
            raise UsageError(f"invalid value for {key}: {value!r} ({exc})") from None
    for lo, hi in (("x_min", "x_max"), ("t_min", "t_max")):
        if lo in params and hi in params and not params[lo] < params[hi]:
            raise UsageError(f"{lo} must be less than {hi}")
    for key in ("num", "t_num"):
        if key in params and params[key] < 2:
            raise UsageError(f"{key} must be at least 2")
    return params


# -- output writers -----------------------------------------------------------

def format_value(v, precision: int) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"
    return f"{v:.{precision}g}"


def write_csv(path: Path, columns: dict, precision: int) -> Path:
    names = list(columns)
    cols = [np.atleast_1d(np.asarray(columns[k])) if not isinstance(columns[k], list)
            else columns[k] for k in names]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("columns differ in length")
    lines = [",".join(names)]
    for i in range(n):
        lines.append(",".join(format_value(c[i], precision) for c in cols))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_meta(path: Path, command: str, params: dict, extra: dict | None = None) -> Path:
    lines = [f"superlab {__version__}", f"command = {command}",
             f"quad_order = {default_quad_order()}"]
    for key in sorted(params):
        if key in ("output_dir",):
            continue
        v = params[key]
        if isinstance(v, tuple):
            v = ",".join(str(e) for e in v)
        lines.append(f"{key} = {v}")
    for key, v in (extra or {}).items():
        lines.append(f"{key} = {v}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")
REFERENCE_COLOR = "#999999"
WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 170, 40, 55


def _nice(v):
    return f"{v:.3g}" if v != 0 else "0"


def write_svg(path: Path, x, series, *, title="", xlabel="", ylabel="", references=(),
              ylim=None) -> Path:
    """Static polyline plot.  ``series`` is an ordered list of (label, y)."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in series]
    if ylim is None:
        finite = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([])
        lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    else:
        lo, hi = ylim
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    x0, x1 = float(x.min()), float(x.max())
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_T + (hi - v) / (hi - lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
           'fill="none" stroke="black"/>']
    for k in range(5):
        xv = x0 + k * (x1 - x0) / 4
        yv = lo + k * (hi - lo) / 4
        out.append(f'<text x="{sx(xv):.2f}" y="{HEIGHT - MARGIN_B + 18}" '
                   f'text-anchor="middle">{_nice(xv)}</text>')
        out.append(f'<text x="{MARGIN_L - 6}" y="{sy(yv) + 4:.2f}" '
                   f'text-anchor="end">{_nice(yv)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{MARGIN_T - 14}" '
               f'text-anchor="middle" font-size="14">{title}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="16" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.2f})">{ylabel}</text>')
    color_index = 0
    for i, ((label, _), y) in enumerate(zip(series, ys)):
        if label in references:
            color, dash = REFERENCE_COLOR, ' stroke-dasharray="6,4"'
        else:
            color, dash = PALETTE[color_index % len(PALETTE)], ""
            color_index += 1
        ok = np.isfinite(y) & (y >= lo) & (y <= hi)
        # break the line at non-finite or clipped points
        segment = []
        for xi, yi, good in zip(x, y, ok):
            if good:
                segment.append(f"{sx(xi):.2f},{sy(yi):.2f}")
            elif segment:
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                           f'points="{" ".join(segment)}"/>')
                segment = []
        if segment:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                       f'points="{" ".join(segment)}"/>')
        ly = MARGIN_T + 10 + 18 * i
        lx = WIDTH - MARGIN_R + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{label}</text>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


class Output:
    """Collects the files written by one command invocation."""

    def __init__(self, params: dict, stem: str, command: str):
        self.dir = Path(params["output_dir"])
        self.dir.mkdir(parents=True, exist_ok=True)
        self.params = params
        self.stem = stem
        self.command = command
        self.files: list[Path] = []

    @property
    def want_csv(self):
        return self.params["format"] in ("csv", "both")

    @property
    def want_svg(self):
        return self.params["format"] in ("svg", "both")

    def csv(self, columns: dict, suffix=""):
        if self.want_csv:
            path = self.dir / f"{self.stem}{suffix}.csv"
            self.files.append(write_csv(path, columns, self.params["precision"]))

    def svg(self, x, series, suffix="", **kw):
        if self.want_svg:
            path = self.dir / f"{self.stem}{suffix}.svg"
            self.files.append(write_svg(path, x, series, **kw))

    def meta(self, extra=None):
        path = self.dir / f"{self.stem}.meta.txt"
        self.files.append(write_meta(path, self.command, self.params, extra))


# -- figures -------------------------------------------------------------------

def _grid(p, lo="x_min", hi="x_max", num="num"):
    return np.linspace(p[lo], p[hi], p[num])


def fig1(p, out: Output):
    x = _grid(p)
    cols = {"x": x}
    for N in p["N_list"]:
        cfg = OscillatorConfig(N, p["g"], Scaling.INVERSE_N, p["scale"])
        cols[f"scaled_local_energy_Re_N{N}"] = scaled_local_energy(cfg, x)
    out.csv(cols)
    series = [(f"N = {N}", cols[f"scaled_local_energy_Re_N{N}"]) for N in p["N_list"]]
    series.append(("bound", np.ones_like(x)))
    out.svg(x, series, title="Re scaled local energy, omega_N = omega_0/N",
            xlabel="x", ylabel="Re E(x) / E_N", references=("bound",))


def _h_ratio(cfg, x):
    h = hN_closed(cfg, x)
    return np.exp(np.asarray(h.log_mag) - cfg.N * math.log(2 * cfg.g) + 1j * np.asarray(h.phase))


def fig2(p, out: Output):
    x = _grid(p)
    cols = {"x": x}
    for N in p["N_list"]:
        cfg = OscillatorConfig(N, p["g"], Scaling.INVERSE_N2, p["scale"])
        r = _h_ratio(cfg, x)
        cols[f"Re_N{N}"] = r.real
        cols[f"Im_N{N}"] = r.imag
    limit = np.exp(1j * math.sqrt(p["scale"]) / p["g"] * x)
    cols["limit_Re"] = limit.real
    cols["limit_Im"] = limit.imag
    out.csv(cols)
    for part in ("Re", "Im"):
        series = [(f"N = {N}", cols[f"{part}_N{N}"]) for N in p["N_list"]]
        series.append(("limit", cols[f"limit_{part}"]))
        out.svg(x, series, suffix=f"_{part.lower()}", references=("limit",),
                title=f"{part} h_N(x) / (2g)^N, omega_N = omega_0/N^2", xlabel="x",
                ylabel=part)


def fig3(p, out: Output):
    Ns, gs, vals, bounds = [], [], [], []
    for g in p["g_list"]:
        for N in range(1, p["N_max"] + 1):
            cfg = OscillatorConfig(N, g, Scaling.INVERSE_N2, p["scale"])
            Ns.append(N)
            gs.append(g)
            vals.append(spectral_energy(build_sequence_state(cfg)) / (cfg.hbar * cfg.omega0))
            bounds.append(energy_bound(cfg))
    out.csv({"N": Ns, "g": gs, "E_N_over_hw0": vals, "bound": bounds})
    n = np.arange(1, p["N_max"] + 1)
    series = [(f"g = {g}", vals[k * len(n):(k + 1) * len(n)]) for k, g in enumerate(p["g_list"])]
    series.append(("(N+1/2)/N^2", bounds[:len(n)]))
    out.svg(n, series, title="Spectral energy, omega_N = omega_0/N^2", xlabel="N",
            ylabel="E_N / (hbar omega_0)", references=("(N+1/2)/N^2",))


def fig4(p, out: Output):
    reports = mimicry_sweep(p["g_list"], p["N_max"], p["L"], scale=p["scale"])
    out.csv({
        "N": [r.N for r in reports],
        "g": [r.g for r in reports],
        "E_mim_over_hw0": [r.windowed_energy for r in reports],
        "superenergy_over_hw0": [1 / (2 * r.g ** 2) for r in reports],
        "spectral_over_hw0": [r.spectral_energy for r in reports],
        "log_postselection_prob": [r.log_postselection_prob for r in reports],
        "quad_change": [r.quad_change for r in reports],
    })
    n = np.arange(1, p["N_max"] + 1)
    series, refs = [], []
    for k, g in enumerate(p["g_list"]):
        chunk = reports[k * len(n):(k + 1) * len(n)]
        series.append((f"g = {g}", [r.windowed_energy for r in chunk]))
    for g in p["g_list"]:
        label = f"1/(2g^2), g = {g}"
        refs.append(label)
        series.append((label, np.full(len(n), 1 / (2 * g * g))))
    top = 1.5 * max(1 / (2 * g * g) for g in p["g_list"])
    out.svg(n, series, references=tuple(refs), ylim=(0.0, top),
            title=f"Windowed energy on (-{p['L']:g}, {p['L']:g})", xlabel="N",
            ylabel="E_mim / (hbar omega_0)")


def fig5(p, out: Output):
    t = _grid(p, "t_min", "t_max", "t_num")
    cols = {"t": t}
    for N in p["N_list"]:
        cfg = OscillatorConfig(N, p["g"], Scaling.INVERSE_N2, p["scale"])
        tr = fig5_trace(cfg, t)
        cols[f"Re_N{N}"] = tr.real
        cols[f"Im_N{N}"] = tr.imag
    ref = np.exp(-1j * t / (2 * p["g"] ** 2))
    cols["reference_Re"] = ref.real
    cols["reference_Im"] = ref.imag
    out.csv(cols)
    label = "exp(-i t/(2g^2))"
    for part in ("Re", "Im"):
        series = [(f"N = {N}", cols[f"{part}_N{N}"]) for N in p["N_list"]]
        series.append((label, cols[f"reference_{part}"]))
        out.svg(t, series, suffix=f"_{part.lower()}", references=(label,), ylim=(-1.5, 1.5),
                title=f"{part} h_N(0, t) / h_N(0, 0)", xlabel="omega_0 t", ylabel=part)


FIGURES = {1: fig1, 2: fig2, 3: fig3, 4: fig4, 5: fig5}


# -- single computations -------------------------------------------------------

def _config(p):
    return OscillatorConfig(p["N"], p["g"], Scaling(p["scaling"]), p["scale"])


def cmd_local_energy(p, out: Output):
    cfg = _config(p)
    prof = local_energy_profile(cfg, _grid(p))
    unit = cfg.hbar * cfg.omega0
    out.csv({"x": prof.grid, "Re_E_over_hw0": prof.real / unit, "Im_E_over_hw0": prof.imag / unit,
             "scaled_Re": prof.real / cfg.E_max, "super": prof.super_flags.tolist(),
             "singular": prof.singular_flags.tolist()})
    out.svg(prof.grid, [("Re E / E_N", prof.real / cfg.E_max), ("bound", np.ones(prof.grid.shape))],
            references=("bound",), title=f"Scaled local energy, N = {cfg.N}", xlabel="x",
            ylabel="Re E(x) / E_N")


def cmd_spectral_energy(p, out: Output):
    cfg = _config(p)
    value = spectral_energy(build_sequence_state(cfg)) / (cfg.hbar * cfg.omega0)
    bound = energy_bound(cfg)
    prec = p["precision"]
    print(f"E_N/(hbar omega_0) = {format_value(value, prec)}  bound = {format_value(bound, prec)}")
    out.csv({"N": [cfg.N], "g": [cfg.g], "scaling": [cfg.scaling.value],
             "E_N_over_hw0": [value], "bound": [bound]})


def cmd_windowed_energy(p, out: Output):
    cfg = _config(p)
    r = windowed_energy(cfg, p["L"])
    prec = p["precision"]
    print(f"E_mim/(hbar omega_0) = {format_value(r.windowed_energy, prec)}  "
          f"log postselection probability = {format_value(r.log_postselection_prob, prec)}")
    out.csv({"N": [r.N], "g": [r.g], "L": [p["L"]], "E_mim_over_hw0": [r.windowed_energy],
             "spectral_over_hw0": [r.spectral_energy], "bound": [r.bound],
             "log_postselection_prob": [r.log_postselection_prob],
             "quad_change": [r.quad_change], "imag_residue": [r.imag_residue]})


def cmd_time_evolve(p, out: Output):
    cfg = _config(p)
    state = build_sequence_state(cfg)
    t = _grid(p, "t_min", "t_max", "t_num")
    ref = hN_closed(cfg, p["x"])
    ratio, energy = [], []
    for tk in t:
        h = hN_time(state, p["x"], float(tk))
        ratio.append(np.exp(float(h.log_mag - ref.log_mag) + 1j * float(h.phase - ref.phase)))
        energy.append(local_time_energy(state, p["x"], float(tk)) / (cfg.hbar * cfg.omega0))
    ratio, energy = np.array(ratio), np.array(energy)
    out.csv({"t": t, "Re_ratio": ratio.real, "Im_ratio": ratio.imag,
             "Re_local_energy_over_hw0": energy.real, "Im_local_energy_over_hw0": energy.imag})
    out.svg(t, [("Re", ratio.real), ("Im", ratio.imag)], title="h_N(x, t) / h_N(x, 0)",
            xlabel="omega_0 t", ylabel="ratio")


def cmd_rotor(p, out: Output):
    theta = theta_grid(p["num"])
    prof = local_L2_profile(RotorState(p["c"]), theta)
    out.csv({"theta": theta, "local_L2": prof.real, "super": prof.super_flags.tolist(),
             "singular": prof.singular_flags.tolist()})
    out.svg(theta, [("local L^2", prof.real), ("0", np.zeros_like(theta)),
                    ("2", np.full_like(theta, 2.0))], references=("0", "2"),
            title=f"Local L^2 / hbar^2, c = {p['c']:g}", xlabel="theta", ylabel="L^2 / hbar^2")


def _complex_str(z, prec):
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{format_value(z.real, prec)}{sign}{format_value(abs(z.imag), prec)}j"


def cmd_check_identity(p, out: Output):
    lhs, rhs, err = hermite_identity(p["N"], p["a"], p["b"])
    prec = p["precision"]
    ok = err < p["tol"]
    kind = "absolute" if abs(rhs) == 0 else "relative"
    print(f"lhs = {_complex_str(lhs, prec)}")
    print(f"rhs = {_complex_str(rhs, prec)}")
    print(f"{kind} error = {format_value(err, prec)}  tol = {format_value(p['tol'], prec)}  "
          f"{'PASS' if ok else 'FAIL'}")
    return ok


def _sum_rule_state(p):
    if p["basis"] == "oscillator":
        cfg = OscillatorConfig(p["N"], p["g"], Scaling.INVERSE_N)
        seq = build_sequence_state(cfg)
        state = oscillator_state(range(cfg.N + 1), [seq.coefficient(n) for n in range(cfg.N + 1)],
                                 omega=cfg.omega_N, mass=cfg.mass, hbar=cfg.hbar)
        a = cfg.alpha
        ymax = math.sqrt(2 * cfg.N + 1) + 10.0
        rule = composite_rule(-ymax / a, ymax / a, default_quad_order(), panel_width=1 / a)
        op = oscillator_hamiltonian(cfg.omega_N, cfg.mass, cfg.hbar)
    elif p["basis"] == "plane_wave":
        state = superoscillating_state(p["a"], p["N"])
        rule = composite_rule(*state.domain, default_quad_order())
        op = momentum_operator()
    else:
        state = as_band_limited(RotorState(p["c"]))
        rule = composite_rule(0.0, math.pi, default_quad_order())
        op = angular_momentum_sq_operator()
    return state, rule, op


def cmd_sum_rule(p, out: Output):
    state, rule, op = _sum_rule_state(p)
    prof = weak_value_field(op, evaluator(state), rule.nodes)
    lhs, rhs = sum_rule_check(state, prof, rule)
    err = abs(lhs - rhs) / max(abs(rhs), 1e-300) if rhs != 0 else abs(lhs)
    ok = err < p["tol"]
    prec = p["precision"]
    print(f"lhs = {format_value(lhs, prec)}")
    print(f"rhs = {format_value(rhs, prec)}")
    print(f"relative error = {format_value(err, prec)}  tol = {format_value(p['tol'], prec)}  "
          f"{'PASS' if ok else 'FAIL'}")
    return ok


COMMAND_FUNCS = {
    "local-energy": cmd_local_energy,
    "spectral-energy": cmd_spectral_energy,
    "windowed-energy": cmd_windowed_energy,
    "time-evolve": cmd_time_evolve,
    "rotor": cmd_rotor,
    "check-identity": cmd_check_identity,
    "sum-rule": cmd_sum_rule,
}

CHECKS = ("check-identity", "sum-rule")


def run(command: str, params: dict) -> int:
    if command in CHECKS:
        ok = COMMAND_FUNCS[command](params, None)
        return EXIT_OK if ok else EXIT_CHECK
    stem = f"fig{params['id']}" if command == "fig" else command.replace("-", "_")
    out = Output(params, stem, command)
    if command == "fig":
        FIGURES[params["id"]](params, out)
    else:
        COMMAND_FUNCS[command](params, out)
    out.meta({"files": ",".join(f.name for f in out.files)})
    for f in out.files:
        print(f)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        config = read_config_file(args.config) if args.config else {}
        params = resolve(args.command, flags, config)
    except UsageError as exc:
        print(f"superlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return run(args.command, params)
    except (PreconditionError, DomainError, ValueError) as exc:
        print(f"superlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, SingularityError, ArithmeticError) as exc:
        print(f"superlab: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
