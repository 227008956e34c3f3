"""Snapshot files and CSV/JSON output.

Snapshot layout (little-endian)::

    magic    4 bytes   b"SQGS"
    version  u32       1
    n        u32
    alpha    f64
    kappa    f64
    time     f64
    data     n*n pairs of f64 (re, im)

Coefficients follow the package normalisation (``fft2(values) / n**2``) and
are written row-major over frequencies sorted ascending from -n/2 to n/2-1,
xi1 varying fastest.
"""
import csv
import io as _io
import json
import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .spectral import GridSpec, SpectralField

MAGIC = b"SQGS"
VERSION = 1
_HEADER = struct.Struct("<4sIIddd")


def save_snapshot(path, snapshot, alpha, kappa):
    theta = snapshot.theta
    n = theta.grid.n
    data = np.fft.fftshift(theta.coeffs)
    pairs = np.empty((n, n, 2), dtype="<f8")
    pairs[..., 0] = data.real
    pairs[..., 1] = data.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, float(alpha), float(kappa),
                              float(snapshot.time)))
        fh.write(pairs.tobytes(order="C"))


class LoadedSnapshot:
    """Snapshot plus the header parameters stored with it."""

    def __init__(self, snapshot, alpha, kappa):
        self.snapshot = snapshot
        self.alpha = alpha
        self.kappa = kappa

    @property
    def theta(self):
        return self.snapshot.theta

    @property
    def time(self):
        return self.snapshot.time


def load_snapshot(path):
    from .evolution import Snapshot

    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: file too short for header ({len(raw)} bytes)")
    magic, version, n, alpha, kappa, time = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + n * n * 16
    if len(raw) != expected:
        raise SnapshotFormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    pairs = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n, n, 2)
    coeffs = np.fft.ifftshift(pairs[..., 0] + 1j * pairs[..., 1])
    theta = SpectralField(GridSpec(int(n)), coeffs)
    return LoadedSnapshot(Snapshot(time, theta), alpha, kappa)


def series_rows(series):
    """Rows of the fixed NormSeries CSV layout.

    Columns: t, l2, lp_crit, h_alpha, besov_s0, J, shell_0 ... shell_K, where
    shell_k = 2^(k s0) ||P_k theta||_{L2} and h_alpha = ||Lambda^alpha theta||_{L2}.
    """
    shells = series.weighted_shells()
    nsh = shells.shape[1] if shells.size else 0
    header = ["t", "l2", "lp_crit", "h_alpha", "besov_s0", "J"] + [f"shell_{k}" for k in range(nsh)]
    pc = series.p_crit
    lpc = series.lp.get(pc, [float("nan")] * len(series))
    J = series.J
    rows = [header]
    for i, t in enumerate(series.times):
        rows.append([t, series.l2[i], lpc[i], series.h_alpha[i], series.besov[i], J[i]]
                    + list(shells[i]))
    return rows


def series_to_csv(series):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in series_rows(series):
        w.writerow([x if isinstance(x, str) else repr(float(x)) for x in r])
    return buf.getvalue()


def write_reports(reports, out_dir, formats=("json",)):
    """Write each report as ``<name>.json`` / ``<name>.csv``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for label, rep in reports:
        if "json" in formats:
            p = out_dir / f"{label}.json"
            p.write_text(rep.to_json())
            paths.append(p)
        if "csv" in formats:
            p = out_dir / f"{label}.csv"
            p.write_text(rep.to_csv())
            paths.append(p)
    return paths


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, default=str))
