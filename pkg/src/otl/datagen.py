"""Seeded synthetic matrices and the on-disk formats used by the harness.

Random draws use numpy's PCG64 bit generator seeded with the caller's 64-bit
seed, so a (parameters, seed) pair always yields the same matrix.

Matrix files are little-endian::

    offset  size  field
    0       4     magic  b"OTLM"
    4       4     version  uint32 (= 1)
    8       8     n        uint64
    16      4     k        uint32
    20      4*n*k payload  float32, row-major

Matrices are held in memory as float64; saving rounds them to float32.
"""

import csv
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "MatrixFormatError",
    "rng_for",
    "gen_uniform",
    "gen_skewed",
    "gen_blobs",
    "save_matrix",
    "load_matrix",
    "export_csv",
    "load_csv_matrix",
    "MAGIC",
    "VERSION",
    "HEADER",
]

MAGIC = b"OTLM"
VERSION = 1
HEADER = struct.Struct("<4sIQI")


class MatrixFormatError(ValueError):
    """A matrix file is malformed; the message names the byte offset."""


def rng_for(seed):
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must fit in an unsigned 64-bit integer: {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def _check_shape(n, k):
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")


def gen_uniform(n, k, seed):
    """``n x k`` matrix of i.i.d. uniform [0, 1) entries."""
    _check_shape(n, k)
    return rng_for(seed).random((n, k))


def gen_skewed(n, k, seed, bias):
    """Uniform matrix with ``bias`` added to one randomly chosen column.

    A large bias sends nearly every row to the same column, mimicking the
    collapsed assignments of an untrained network.  With ``bias=0`` the
    result equals ``gen_uniform(n, k, seed)``.
    """
    if bias < 0:
        raise ValueError(f"bias must be non-negative, got {bias}")
    _check_shape(n, k)
    rng = rng_for(seed)
    m = rng.random((n, k))
    m[:, rng.integers(k)] += bias
    return m


def gen_blobs(n, dim, n_centers, spread, seed, return_centers=False):
    """Isotropic Gaussian clusters around random unit-norm centers.

    Class sizes differ by at most one.  Returns ``(features, labels)``, plus
    the ``(n_centers, dim)`` center array if ``return_centers`` is set.
    """
    if n_centers < 2:
        raise ValueError("n_centers must be at least 2")
    if not spread > 0:
        raise ValueError("spread must be positive")
    rng = rng_for(seed)
    centers = rng.standard_normal((n_centers, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    labels = rng.permutation(np.arange(n) % n_centers)
    x = centers[labels] + spread * rng.standard_normal((n, dim))
    if return_centers:
        return x, labels, centers
    return x, labels


def save_matrix(path, matrix):
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("matrix must be 2-D")
    with np.errstate(over="ignore"):
        payload = m.astype("<f4")
    if not np.all(np.isfinite(payload)):
        raise ValueError("matrix has entries that are not finite as float32")
    n, k = m.shape
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, n, k))
        fh.write(payload.tobytes(order="C"))


def load_matrix(path):
    """Read a matrix file, validating header, length and finiteness."""
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise MatrixFormatError(
            f"{path}: header truncated at byte {len(data)}, "
            f"expected {HEADER.size} bytes")
    magic, version, n, k = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise MatrixFormatError(
            f"{path}: bad magic {magic!r} at byte 0, expected {MAGIC!r}")
    if version != VERSION:
        raise MatrixFormatError(
            f"{path}: unsupported version {version} at byte 4")
    expected = HEADER.size + 4 * n * k
    if len(data) < expected:
        raise MatrixFormatError(
            f"{path}: payload truncated at byte {len(data)}, "
            f"expected {expected} bytes for {n}x{k}")
    if len(data) > expected:
        raise MatrixFormatError(
            f"{path}: {len(data) - expected} trailing bytes after byte "
            f"{expected}")
    values = np.frombuffer(data, dtype="<f4", count=n * k, offset=HEADER.size)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise MatrixFormatError(
            f"{path}: non-finite value at byte {HEADER.size + 4 * int(bad[0])}")
    return values.astype(np.float64).reshape(n, k)


def _fmt(x):
    return format(float(x), ".9g")


def _rows_for(obj):
    """Header and rows for a matrix, label vector, trace, or record list."""
    if isinstance(obj, np.ndarray) or (
            isinstance(obj, (list, tuple)) and obj
            and isinstance(obj[0], (int, float, np.number))):
        a = np.asarray(obj)
        if a.ndim == 2:
            header = [f"c{i}" for i in range(a.shape[1])]
            return header, ([_fmt(v) for v in row] for row in a)
        if a.ndim == 1:
            if np.issubdtype(a.dtype, np.integer):
                return ["sample", "label"], ([i, int(v)] for i, v in
                                             enumerate(a))
            return ["index", "value"], ([i, _fmt(v)] for i, v in
                                        enumerate(a))
        raise ValueError("arrays must be 1-D or 2-D")
    items = list(obj)
    if not items:
        raise ValueError("nothing to export")
    first = items[0]
    if hasattr(first, "_fields"):
        fields = list(first._fields)
        if "trial_std" in fields:       # trace rows keep the four plot columns
            fields = ["iteration", "alpha", "std", "accepted"]
        return fields, ([_cell(getattr(it, f)) for f in fields] for it in items)
    if hasattr(first, "__dataclass_fields__"):
        fields = list(first.__dataclass_fields__)
        return fields, ([_cell(getattr(it, f)) for f in fields] for it in items)
    if isinstance(first, dict):
        fields = list(first)
        return fields, ([_cell(it[f]) for f in fields] for it in items)
    raise TypeError(f"cannot export objects of type {type(first).__name__}")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return v


def export_csv(path, obj):
    """Write a matrix, label vector, balance trace or record list as CSV.

    Every file starts with a header row.  Reals are written with 9
    significant digits.
    """
    header, rows = _rows_for(obj)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def load_csv_matrix(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
