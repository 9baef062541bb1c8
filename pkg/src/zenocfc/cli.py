"""Command-line experiment runner emitting CSV.

    zenocfc --command theory --n 2,3,4,5,6 --m-range 1:1000
    zenocfc --command sweep --n 6 --m 10,50,320,500 --trials 10000 --seed 7
    zenocfc --command transmit --n 6 --m 320 --trials 100 --in picture.pbm
    zenocfc --command image --n 6 --m 320 --in picture.pbm --out received.pbm

Exit status: 0 success, 2 usage error, 3 input-data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _rng, pbm
from .detection import NoiseParams, TrialRng, click_probabilities, sample_trials
from .messaging import (
    EncodingConfig,
    avg_bit_error,
    expected_fidelity,
    random_message,
    received_message,
    transmit_message,
    violation_probability,
)
from .protocol import ProtocolSpec

COMMANDS = ("theory", "sweep", "transmit", "image")

DEFAULTS = {
    "command": "theory",
    "n": "6",
    "m": None,
    "m-range": None,
    "trials": "1000",
    "seed": "0",
    "heralding": "0.03",
    "det-eff": "0.90",
    "visibility": "0.9994",
    "backscatter": "0.01",
    "dark-prob": "1e-6",
    "p0-err": None,
    "bits": "1024",
    "in": None,
    "out": None,
    "report": None,
}
DEFAULT_M = "10,50,320,500"


class UsageError(Exception):
    pass


class InputDataError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n_list: list[int]
    m_list: list[int]
    noise: NoiseParams
    trials: int
    seed: int
    bits: int = 1024
    input_path: str | None = None
    output_path: str | None = None
    report_path: str | None = None


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def parse_int_list(text: str, what: str) -> list[int]:
    """'2,3,6' or '2-6' (inclusive) or a mix."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part[1:]:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"bad {what} list {text!r}") from None
    if not out:
        raise UsageError(f"empty {what} list")
    return out


def parse_m_range(text: str) -> list[int]:
    """'start:stop[:step]', stop inclusive."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"bad --m-range {text!r}") from None
    if len(parts) not in (2, 3):
        raise UsageError(f"bad --m-range {text!r}, expected start:stop[:step]")
    step = parts[2] if len(parts) == 3 else 1
    if step < 1 or parts[1] < parts[0]:
        raise UsageError(f"bad --m-range {text!r}")
    return list(range(parts[0], parts[1] + 1, step))


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputDataError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputDataError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in DEFAULTS:
            raise InputDataError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="zenocfc",
        description="Chained-MZI counterfactual communication experiments (CSV output).",
    )
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--n", help="beamsplitter counts, e.g. 2,3,6 or 2-6")
    mg = p.add_mutually_exclusive_group()
    mg.add_argument("--m", help=f"photons per bit list (default {DEFAULT_M})")
    mg.add_argument("--m-range", dest="m_range", help="photons per bit as start:stop[:step]")
    p.add_argument("--trials", help="Monte Carlo repetitions per cell")
    p.add_argument("--seed", help="64-bit seed")
    p.add_argument("--heralding", help="heralding efficiency h")
    p.add_argument("--det-eff", dest="det_eff", help="detector efficiency eta")
    p.add_argument("--visibility", help="per-MZI visibility V")
    p.add_argument("--backscatter", help="swap backscatter probability")
    p.add_argument("--dark-prob", dest="dark_prob", help="dark click probability per window")
    p.add_argument("--p0-err", dest="p0_err", help="logic-0 click probability per photon (overrides V)")
    p.add_argument("--bits", help="length of the random message when --in is absent (transmit)")
    p.add_argument("--in", dest="in_path", help="input P1 bitmap")
    p.add_argument("--out", dest="out_path", help="output CSV, or received P1 for 'image'")
    p.add_argument("--report", dest="report_path", help="report CSV for 'image' (default stdout)")
    p.add_argument("--config", help="key=value config file")
    return p


_FLAG_KEYS = {
    "command": "command",
    "n": "n",
    "m": "m",
    "m_range": "m-range",
    "trials": "trials",
    "seed": "seed",
    "heralding": "heralding",
    "det_eff": "det-eff",
    "visibility": "visibility",
    "backscatter": "backscatter",
    "dark_prob": "dark-prob",
    "p0_err": "p0-err",
    "bits": "bits",
    "in_path": "in",
    "out_path": "out",
    "report_path": "report",
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = dict(DEFAULTS)
    if args.config:
        values.update(read_config_file(args.config))
    flags = {key: getattr(args, attr) for attr, key in _FLAG_KEYS.items() if getattr(args, attr) is not None}
    if "m" in flags:
        values["m-range"] = None
    if "m-range" in flags:
        values["m"] = None
    values.update(flags)

    def num(key, cast=float):
        try:
            return cast(values[key])
        except (TypeError, ValueError):
            raise UsageError(f"bad value for {key}: {values[key]!r}") from None

    command = values["command"]
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    n_list = parse_int_list(values["n"], "n")
    if values["m-range"]:
        m_list = parse_m_range(values["m-range"])
    else:
        m_list = parse_int_list(values["m"] or DEFAULT_M, "m")
    if any(n < 2 for n in n_list):
        raise UsageError("every N must be >= 2")
    if any(m < 1 for m in m_list):
        raise UsageError("every M must be >= 1")
    trials = num("trials", int)
    if trials < 1:
        raise UsageError("trials must be >= 1")
    seed = num("seed", int)
    if not 0 <= seed < 1 << 64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    bits = num("bits", int)
    if bits < 1:
        raise UsageError("bits must be >= 1")
    try:
        noise = NoiseParams(
            heralding_efficiency=num("heralding"),
            detector_efficiency=num("det-eff"),
            dark_prob=num("dark-prob"),
            visibility=num("visibility"),
            swap_backscatter=num("backscatter"),
            bit0_click_prob=None if values["p0-err"] is None else num("p0-err"),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if noise.bit0_click_prob is None and not noise.visibility > 0.5:
        raise UsageError("visibility must exceed 0.5 unless --p0-err is given")
    if noise.detector_efficiency <= 0.0:
        raise UsageError("detector efficiency must be > 0")
    return RunConfig(
        command=command,
        n_list=sorted(set(n_list)),
        m_list=sorted(set(m_list)),
        noise=noise,
        trials=trials,
        seed=seed,
        bits=bits,
        input_path=values["in"],
        output_path=values["out"],
        report_path=values["report"],
    )


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _probs(cfg: RunConfig, n: int):
    return click_probabilities(ProtocolSpec(n, 0), cfg.noise)


def cmd_theory(cfg: RunConfig) -> str:
    header = ["n", "m", "p1_err", "p0_err", "avg_err_exact", "avg_err_approx", "violation", "seed"]
    rows = []
    eta = cfg.noise.detector_efficiency
    for n in cfg.n_list:
        probs = _probs(cfg, n)
        p1 = 1.0 - probs.p_click_bit1
        p0 = probs.p_click_bit0
        for m in cfg.m_list:
            rows.append(
                (
                    n,
                    m,
                    p1,
                    p0,
                    avg_bit_error(m, p1, p0, exact=True),
                    avg_bit_error(m, p1, p0, exact=False),
                    violation_probability(m, p0, eta),
                    cfg.seed,
                )
            )
    return _csv(header, rows)


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(errors, trials, alpha=0.05, method="wilson")
    return float(lo), float(hi)


def cmd_sweep(cfg: RunConfig) -> str:
    header = ["n", "m", "bit", "trials", "errors", "err_rate", "wilson_lo", "wilson_hi", "theory_err", "seed"]
    rows = []
    cell = 0
    for n in cfg.n_list:
        probs = _probs(cfg, n)
        for m in cfg.m_list:
            for bit in (0, 1):
                p = probs.click(bit)
                recorded = sample_trials(p, m, cfg.trials, _rng.derive_seed(cfg.seed, cell))
                errors = int(np.count_nonzero(recorded != bit))
                theory = (1.0 - p) ** m if bit else 1.0 - (1.0 - p) ** m
                lo, hi = wilson_interval(errors, cfg.trials)
                rows.append((n, m, bit, cfg.trials, errors, errors / cfg.trials, lo, hi, theory, cfg.seed))
                cell += 1
    return _csv(header, rows)


def _load_message(cfg: RunConfig):
    if cfg.input_path is None:
        return random_message(cfg.bits, 1, 0.5, cfg.seed)
    try:
        return pbm.read(cfg.input_path)
    except OSError as exc:
        raise InputDataError(f"cannot read {cfg.input_path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InputDataError(f"{cfg.input_path}: not an ASCII P1 bitmap") from None
    except pbm.PbmError as exc:
        raise InputDataError(f"{cfg.input_path}: {exc}") from None


def cmd_transmit(cfg: RunConfig) -> str:
    msg = _load_message(cfg)
    header = [
        "n",
        "m",
        "trials",
        "fidelity_mean",
        "fidelity_stderr",
        "fidelity_expected",
        "violation_bit0",
        "violation_total",
        "seed",
    ]
    rows = []
    cell = 0
    for n in cfg.n_list:
        probs = _probs(cfg, n)
        for m in cfg.m_list:
            enc = EncodingConfig(m, n)
            cell_seed = _rng.derive_seed(cfg.seed, cell)
            reports = [
                transmit_message(msg, enc, cfg.noise, TrialRng(cell_seed, t), probs=probs)
                for t in range(cfg.trials)
            ]
            fid = np.array([r.fidelity for r in reports])
            stderr = fid.std(ddof=1) / np.sqrt(len(fid)) if len(fid) > 1 else 0.0
            rows.append(
                (
                    n,
                    m,
                    cfg.trials,
                    fid.mean(),
                    stderr,
                    expected_fidelity(msg, m, probs),
                    np.mean([r.violation_prob_bit0 for r in reports]),
                    np.mean([r.violation_prob_total for r in reports]),
                    cfg.seed,
                )
            )
            cell += 1
    return _csv(header, rows)


def cmd_image(cfg: RunConfig) -> tuple[str, str]:
    """Returns (received P1 text, report CSV)."""
    if cfg.input_path is None or cfg.output_path is None:
        raise UsageError("image needs --in and --out")
    if len(cfg.n_list) != 1 or len(cfg.m_list) != 1:
        raise UsageError("image takes a single --n and a single --m")
    msg = _load_message(cfg)
    n, m = cfg.n_list[0], cfg.m_list[0]
    probs = _probs(cfg, n)
    report = transmit_message(msg, EncodingConfig(m, n), cfg.noise, TrialRng(cfg.seed), probs=probs)
    header = ["n", "m", "fidelity", "violation_bit0", "violation_total", "seed"]
    row = (n, m, report.fidelity, report.violation_prob_bit0, report.violation_prob_total, cfg.seed)
    return pbm.encode(received_message(msg, report)), _csv(header, [row])


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise InputDataError(f"cannot write {path}: {exc.strerror}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.command == "image":
            image, report = cmd_image(cfg)
            _emit(image, cfg.output_path)
            _emit(report, cfg.report_path)
        else:
            handler = {"theory": cmd_theory, "sweep": cmd_sweep, "transmit": cmd_transmit}[cfg.command]
            _emit(handler(cfg), cfg.output_path)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zenocfc: error: {exc}", file=sys.stderr)
        return 2
    except InputDataError as exc:
        print(f"zenocfc: error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
