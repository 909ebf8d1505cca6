"""CSV ingestion/emission and the flat key=value simulation config format.

Dataset CSV layout: column 0 is the label (exactly "0" or "1"), columns
1..p are the feature values; an optional single header row can be skipped.
Floats are written with 17 significant digits, so a save/load round trip
reproduces every value bit-for-bit.

Config files are flat key=value lines (``#`` comments and blank lines
ignored)::

    n=100
    p=4000
    pi=0.5
    seed=7
    placement=grouped_head        # or randomized
    signal_count=400
    signal_kind=fixed             # or uniform
    signal_value=0.5366           # fixed magnitude
    signal_lo=0.0                 # uniform bounds (when signal_kind=uniform)
    signal_hi=0.5366
    noise_kind=iid_standard_normal  # or serial
    noise_rho=0.0
"""

from __future__ import annotations

import csv

import numpy as np

from .data_model import DataError, LabeledMatrix
from .simulate import NoiseSpec, SignalSpec, SimConfig

__all__ = [
    "load_csv",
    "save_csv",
    "parse_sim_config",
    "format_sim_config",
    "load_sim_config",
]


def load_csv(path, has_header: bool = False) -> LabeledMatrix:
    """Read a labeled dataset; parse failures report the 1-based line number."""
    labels: list[int] = []
    rows: list[list[float]] = []
    width = None
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        for lineno, rec in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not rec:
                continue
            if width is None:
                width = len(rec)
                if width < 2:
                    raise DataError(
                        f"line {lineno}: need a label plus at least one feature"
                    )
            elif len(rec) != width:
                raise DataError(
                    f"line {lineno}: ragged row with {len(rec)} fields, expected {width}"
                )
            lab = rec[0].strip()
            if lab not in ("0", "1"):
                raise DataError(f"line {lineno}: label {lab!r} must be 0 or 1")
            labels.append(int(lab))
            try:
                rows.append([float(v) for v in rec[1:]])
            except ValueError as exc:
                raise DataError(f"line {lineno}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return LabeledMatrix(np.asarray(rows), np.asarray(labels))


def save_csv(matrix: LabeledMatrix, path) -> None:
    """Write label,feature... rows at full (17 significant digit) precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for i in range(matrix.n):
            w.writerow(
                [int(matrix.labels[i])] + [f"{v:.17g}" for v in matrix.x[i]]
            )


_CONFIG_KEYS = {
    "n", "p", "pi", "seed", "placement",
    "signal_count", "signal_kind", "signal_value", "signal_lo", "signal_hi",
    "noise_kind", "noise_rho",
}


def parse_sim_config(text: str) -> SimConfig:
    """Parse the key=value config format into a :class:`SimConfig`."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise DataError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise DataError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = val

    def need(key):
        if key not in values:
            raise DataError(f"config missing required key {key!r}")
        return values[key]

    try:
        signal = SignalSpec(
            count=int(need("signal_count")),
            kind=values.get("signal_kind", "fixed"),
            value=float(values.get("signal_value", 0.0)),
            lo=float(values.get("signal_lo", 0.0)),
            hi=float(values.get("signal_hi", 0.0)),
        )
        noise = NoiseSpec(
            kind=values.get("noise_kind", "iid_standard_normal"),
            rho=float(values.get("noise_rho", 0.0)),
        )
        return SimConfig(
            n=int(need("n")),
            p=int(need("p")),
            pi=float(values.get("pi", 0.5)),
            signal=signal,
            noise=noise,
            placement=values.get("placement", "grouped_head"),
            seed=int(values.get("seed", 0)),
        )
    except ValueError as exc:
        raise DataError(f"config value error: {exc}") from exc


def format_sim_config(config: SimConfig) -> str:
    """Inverse of :func:`parse_sim_config` (round-trips exactly)."""
    lines = [
        f"n={config.n}",
        f"p={config.p}",
        f"pi={config.pi:.17g}",
        f"seed={config.seed}",
        f"placement={config.placement}",
        f"signal_count={config.signal.count}",
        f"signal_kind={config.signal.kind}",
        f"signal_value={config.signal.value:.17g}",
        f"signal_lo={config.signal.lo:.17g}",
        f"signal_hi={config.signal.hi:.17g}",
        f"noise_kind={config.noise.kind}",
        f"noise_rho={config.noise.rho:.17g}",
    ]
    return "\n".join(lines) + "\n"


def load_sim_config(path) -> SimConfig:
    try:
        with open(path, "r") as fh:
            return parse_sim_config(fh.read())
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
