"""Command-line front end.

Every subcommand accepts ``--config FILE``, a JSON object whose keys are the
long option names with dashes replaced by underscores.  Values given on the
command line override the file, which overrides the built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import devices, validation
from .cv_teleport import (
    CVTeleportConfig,
    bell_completeness_kernel,
    bell_measurement_density,
    epr_state,
    generalized_bell,
    mean_fidelity_closed_form,
    result_record,
    teleport_cv,
)
from .errors import BargmannError, ConfigError
from .gaussian import identity_kernel
from .qubit import BELL_LABELS, QubitState, teleport_qubit

SIG = 12
SWEEP_HEADER = ["g", "q", "gamma_re", "gamma_im", "mean_fidelity", "stderr", "n_samples"]


def fmt(x: float) -> str:
    return format(float(x), f".{SIG}g")


def _round(obj):
    """Round every float to 12 significant digits for output."""
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def parse_complex(s) -> complex:
    if isinstance(s, (int, float, complex)):
        return complex(s)
    if isinstance(s, (list, tuple)) and len(s) == 2:
        return complex(float(s[0]), float(s[1]))
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {s!r}") from None


def parse_list(s, conv=float) -> list:
    if isinstance(s, (list, tuple)):
        return [conv(x) for x in s]
    return [conv(x) for x in str(s).split(",") if x.strip()]


class JSONErrorParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# -- subcommands -------------------------------------------------------------------------------


def _squeezing(cfg) -> float:
    g, q = cfg.get("g"), cfg.get("q")
    if g is not None and q is not None:
        raise ConfigError("give either g or q, not both")
    if q is not None:
        q = float(q)
        if not 0 <= q < 1:
            raise ConfigError("q must lie in [0, 1)")
        return math.atanh(q)
    return float(1.0 if g is None else g)


def cmd_teleport_cv(cfg) -> str:
    g = _squeezing(cfg)
    gamma = parse_complex(cfg["gamma"])
    runs = int(cfg["runs"])
    if runs < 1:
        raise ConfigError("runs must be positive")
    records = []
    if cfg.get("alpha") is not None:
        alpha = parse_complex(cfg["alpha"])
        run_cfgs = [CVTeleportConfig(g, gamma, alpha=alpha)] * runs
    else:
        if cfg.get("seed") is None:
            raise ConfigError("a seed is required when the outcome is sampled")
        seed = int(cfg["seed"])
        run_cfgs = [CVTeleportConfig(g, gamma, seed=seed + k) for k in range(runs)]
    for rc in run_cfgs:
        records.append(result_record(rc, teleport_cv(rc)))
    fid = np.array([r["fidelity"] for r in records])
    summary = {
        "n_runs": runs,
        "mean_fidelity": float(fid.mean()),
        "stderr": float(fid.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0,
        "mean_fidelity_normalized": float(np.mean([r["fidelity_normalized"] for r in records])),
        "expected_mean_fidelity": mean_fidelity_closed_form(math.tanh(g)),
    }
    return json.dumps(_round({"records": records, "summary": summary}), indent=2) + "\n"


def cmd_teleport_qubit(cfg) -> str:
    amps = parse_list(cfg["state"], parse_complex)
    if len(amps) != 2:
        raise ConfigError("state needs two amplitudes")
    nrm = math.sqrt(sum(abs(a) ** 2 for a in amps))
    if nrm == 0:
        raise ConfigError("state must be non-zero")
    psi = QubitState(np.array(amps) / nrm)
    shots = int(cfg["shots"])
    if shots < 1:
        raise ConfigError("shots must be positive")
    if cfg.get("seed") is None:
        raise ConfigError("a seed is required for sampled measurements")
    rng = np.random.default_rng(int(cfg["seed"]))
    counts = {f"{i}{j}": 0 for i, j in BELL_LABELS}
    worst = 0.0
    for _ in range(shots):
        res = teleport_qubit(psi, rng=rng)
        counts["%d%d" % res.outcome] += 1
        worst = max(worst, 1.0 - abs(psi.overlap(res.output)))
    out = {
        "input": [[a.real, a.imag] for a in psi.amplitudes],
        "shots": shots,
        "counts": counts,
        "probabilities": [float(p) for p in res.probabilities],
        "max_infidelity": worst,
    }
    return json.dumps(_round(out), indent=2) + "\n"


def sweep_rows(g_values, gamma: complex, samples: int, seed: int) -> list[list[float]]:
    """One row per g: Monte Carlo mean fidelity over sampled Bell outcomes.

    Point ``k`` draws from its own generator seeded with ``seed + k``.
    """
    rows = []
    for k, g in enumerate(g_values):
        q = math.tanh(g)
        rng = np.random.default_rng(seed + k)
        alphas = bell_measurement_density(gamma, q).sample(rng, samples)
        fid = np.exp(-(1.0 - q) * np.abs(alphas - gamma) ** 2)
        err = fid.std(ddof=1) / math.sqrt(samples) if samples > 1 else 0.0
        rows.append([g, q, gamma.real, gamma.imag, fid.mean(), err, samples])
    return sorted(rows, key=lambda r: r[0])


def cmd_sweep(cfg) -> str:
    if cfg.get("q_values") is not None:
        qs = parse_list(cfg["q_values"])
        if any(not 0 <= q < 1 for q in qs):
            raise ConfigError("q values must lie in [0, 1)")
        g_values = [math.atanh(q) for q in qs]
    else:
        g_values = parse_list(cfg["g_values"])
    if not g_values or any(not math.isfinite(g) or g < 0 for g in g_values):
        raise ConfigError("g values must be finite and non-negative")
    samples = int(cfg["samples"])
    if samples < 1:
        raise ConfigError("samples must be positive")
    if cfg.get("seed") is None:
        raise ConfigError("a seed is required for sweeps")
    rows = sweep_rows(g_values, parse_complex(cfg["gamma"]), samples, int(cfg["seed"]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([fmt(x) for x in r[:-1]] + [str(int(r[-1]))])
    return buf.getvalue()


KERNELS = {
    "displacement": lambda p: devices.displacement_kernel(parse_complex(p.get("alpha", 0))),
    "coherent": lambda p: devices.coherent_state(parse_complex(p.get("alpha", 0))),
    "squeezer": lambda p: devices.squeezer_kernel(float(p.get("g", 0))),
    "squeezed-vacuum": lambda p: devices.squeezed_vacuum(float(p.get("g", 0))),
    "beam-splitter": lambda p: devices.beam_splitter(float(p.get("theta", 0))),
    "half-beam-splitter": lambda p: devices.half_beam_splitter(),
    "phase-shifter": lambda p: devices.phase_shifter(float(p.get("phi", 0))),
    "epr": lambda p: epr_state(float(p.get("q", 0))),
    "bell": lambda p: generalized_bell(parse_complex(p.get("alpha", 0))),
    "identity": lambda p: identity_kernel(int(p.get("modes", 1))),
    "coherent-resolution": lambda p: devices.coherent_resolution(),
    "bell-completeness": lambda p: bell_completeness_kernel(),
}


def cmd_kernel_dump(cfg) -> str:
    name = cfg.get("device")
    if name not in KERNELS:
        raise ConfigError(f"unknown device {name!r}; choose from {sorted(KERNELS)}")
    params = {}
    for item in parse_list(cfg.get("param") or [], str):
        if "=" not in item:
            raise ConfigError(f"parameter {item!r} must look like key=value")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    build = KERNELS[name]
    try:
        form = build(params)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    out = {"device": name, "params": params, "form": form.to_dict()}
    return json.dumps(_round(out), indent=2) + "\n"


def cmd_oracle_check(cfg) -> str:
    N = int(cfg["cutoff"])
    if N < 2:
        raise ConfigError("cutoff must be at least 2")
    report = validation.run_all(N, float(cfg["tolerance"]))
    cfg["_failed"] = not report["pass"]
    return json.dumps(_round(report), indent=2) + "\n"


# -- parser -----------------------------------------------------------------------------------

TELEPORT_CV_EPILOG = """\
output (JSON):
  records[]            one object per run
    gamma              input coherent amplitude as [re, im]
    g                  squeezing parameter
    q                  tanh(g), the resource correlation
    x_minus            real part of the Bell outcome alpha
    p_plus             imaginary part of the Bell outcome alpha
    fidelity           |<gamma|phi>| for the unnormalized conditional state phi
    fidelity_normalized  |<gamma|phi>| / ||phi||
  summary
    n_runs             number of runs
    mean_fidelity      mean of records[].fidelity
    stderr             standard error of that mean (0 for one run)
    mean_fidelity_normalized  mean of records[].fidelity_normalized
    expected_mean_fidelity    (1+q)/(2+q), the average over sampled outcomes
Run k with sampled outcomes uses seed + k.
"""

TELEPORT_QUBIT_EPILOG = """\
output (JSON):
  input            normalized input amplitudes as [[re, im], [re, im]]
  shots            number of teleportation runs
  counts           histogram of Alice's outcomes "00", "01", "10", "11"
  probabilities    outcome probabilities <psi2|M_ij|psi2> of the last run
  max_infidelity   max over runs of 1 - |<psi_in|psi_out>|
"""

SWEEP_EPILOG = """\
output (CSV, header g,q,gamma_re,gamma_im,mean_fidelity,stderr,n_samples):
  g              squeezing parameter of the point
  q              tanh(g)
  gamma_re       real part of the input amplitude
  gamma_im       imaginary part of the input amplitude
  mean_fidelity  Monte Carlo mean of exp(-(1-q)|alpha-gamma|^2) over sampled outcomes
  stderr         standard error of mean_fidelity
  n_samples      number of sampled outcomes
Point k draws outcomes from a generator seeded with seed + k; rows are sorted by g.
"""

KERNEL_DUMP_EPILOG = """\
output (JSON):
  device    device name
  params    parameters as given (strings)
  form      the Gaussian form c exp(1/2 z^T A z + b^T z), z = (v..., ubar...)
    n_in               number of input modes (0 for a state)
    n_out              number of output modes
    A                  matrix of [re, im] pairs
    b                  vector of [re, im] pairs
    c                  prefactor as [re, im]
    delta_normalized   true for generalized (non-normalizable) vectors
devices and parameters:
  displacement alpha | coherent alpha | squeezer g | squeezed-vacuum g |
  beam-splitter theta | half-beam-splitter | phase-shifter phi | epr q |
  bell alpha | identity modes | coherent-resolution | bell-completeness
"""

ORACLE_EPILOG = """\
output (JSON):
  cutoff      Fock cutoff N per mode
  tolerance   pass threshold for every deviation
  checks      one entry per device, the fidelity grid and the state expansions
    max_deviation   max |symbolic - Fock oracle| at cutoff N
    cutoff_change   max change of the oracle value when the cutoff is doubled
                    (halved for the fidelity grid)
    pass            both numbers below tolerance
  pass        all checks passed
Exit status is 3 when any check fails.
"""


def build_parser() -> argparse.ArgumentParser:
    p = JSONErrorParser(
        prog="bargmann",
        description="Gaussian-kernel quantum optics: teleportation experiments and oracle checks.",
        epilog="Errors are written to stderr as JSON {\"error\": name, \"message\": text}. "
               "BARGMANN_STRICT=1 turns cutoff warnings into errors.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=JSONErrorParser)
    S = argparse.SUPPRESS

    def common(sp, seed=True):
        sp.add_argument("--config", help="JSON file with option values", default=S)
        sp.add_argument("--output", "-o", help="write to this file instead of stdout", default=S)
        if seed:
            sp.add_argument("--seed", type=int, default=S, help="random seed (required when sampling)")
        return sp

    raw = argparse.RawDescriptionHelpFormatter
    sp = common(sub.add_parser("teleport-cv", help="continuous-variable teleportation runs",
                               epilog=TELEPORT_CV_EPILOG, formatter_class=raw))
    sp.add_argument("--gamma", default=S, help="input amplitude, e.g. 0.5+0.2j (default 0.5)")
    sp.add_argument("--g", type=float, default=S, help="squeezing parameter (default 1.0)")
    sp.add_argument("--q", type=float, default=S, help="resource correlation tanh(g), instead of --g")
    sp.add_argument("--alpha", default=S, help="fix the Bell outcome instead of sampling it")
    sp.add_argument("--runs", type=int, default=S, help="number of runs (default 1)")

    sp = common(sub.add_parser("teleport-qubit", help="qubit teleportation shots",
                               epilog=TELEPORT_QUBIT_EPILOG, formatter_class=raw))
    sp.add_argument("--state", default=S, help="two amplitudes, e.g. 0.6,0.8 (default)")
    sp.add_argument("--shots", type=int, default=S, help="number of runs (default 1000)")

    sp = common(sub.add_parser("sweep", help="mean fidelity over a grid of squeezing values",
                               epilog=SWEEP_EPILOG, formatter_class=raw))
    sp.add_argument("--g-values", default=S, help="comma-separated g values (default 0.5,1.0,1.5)")
    sp.add_argument("--q-values", default=S, help="comma-separated q values, instead of --g-values")
    sp.add_argument("--gamma", default=S, help="input amplitude (default 0.5)")
    sp.add_argument("--samples", type=int, default=S, help="outcomes per point (default 10000)")

    sp = common(sub.add_parser("kernel-dump", help="serialize a device kernel or state",
                               epilog=KERNEL_DUMP_EPILOG, formatter_class=raw), seed=False)
    sp.add_argument("device", nargs="?", default=S, help="device name")
    sp.add_argument("--param", action="append", default=S, help="key=value, repeatable")

    sp = common(sub.add_parser("oracle-check", help="cross-validate kernels against the Fock oracle",
                               epilog=ORACLE_EPILOG, formatter_class=raw), seed=False)
    sp.add_argument("--cutoff", type=int, default=S, help="Fock cutoff per mode (default 40)")
    sp.add_argument("--tolerance", type=float, default=S, help="pass threshold (default 1e-6)")
    return p


DEFAULTS = {
    "teleport-cv": {"gamma": "0.5", "alpha": None, "runs": 1, "seed": None},
    "teleport-qubit": {"state": "0.6,0.8", "shots": 1000, "seed": None},
    "sweep": {"g_values": "0.5,1.0,1.5", "q_values": None, "gamma": "0.5", "samples": 10000,
              "seed": None},
    "kernel-dump": {"device": None, "param": None},
    "oracle-check": {"cutoff": 40, "tolerance": 1e-6},
}

COMMANDS = {
    "teleport-cv": cmd_teleport_cv,
    "teleport-qubit": cmd_teleport_qubit,
    "sweep": cmd_sweep,
    "kernel-dump": cmd_kernel_dump,
    "oracle-check": cmd_oracle_check,
}


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the JSON config file and explicit flags (in increasing priority)."""
    flags = vars(args).copy()
    command = flags.pop("command")
    cfg = dict(DEFAULTS[command])
    path = flags.pop("config", None)
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        known = set(DEFAULTS[command]) | {"output", "g", "q", "seed"}
        unknown = set(data) - known - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if data.get("command", command) != command:
            raise ConfigError(f"config file is for {data['command']!r}, not {command!r}")
        data.pop("command", None)
        cfg.update(data)
    cfg.update(flags)
    return cfg


def _emit_error(exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        text = COMMANDS[args.command](cfg)
        out = cfg.get("output")
        if out:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except BargmannError as e:
        _emit_error(e)
        return 2 if isinstance(e, ConfigError) else 1
    except (ValueError, OverflowError, TypeError) as e:
        # rejected parameter values
        _emit_error(e)
        return 2
    return 3 if cfg.get("_failed") else 0


if __name__ == "__main__":
    sys.exit(main())
