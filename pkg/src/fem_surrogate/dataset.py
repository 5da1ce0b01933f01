"""Training-data plumbing: response samples, train/test split, feature and
target scaling, and CSV persistence.

Scaling schemes follow the pipeline defaults: driving frequency is min-max
scaled to [0, 1]; displacement targets spanning several decades across
resonance peaks use log10 with a small positive floor.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParams,
    MalformedRow,
    NonPositiveForLog,
    TooFewSamples,
)

# 17 significant digits: lossless round-trip for IEEE doubles.
FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class ResponseSample:
    """One ground-truth record: driving frequency -> output amplitudes.

    ``outputs`` has length 1 for the oscillator (amplitude) and 3 for the
    beam (per-axis maximum displacement).  Values are physical units.
    """

    freq_hz: float
    outputs: np.ndarray

    def __post_init__(self):
        out = np.atleast_1d(np.asarray(self.outputs, dtype=float))
        object.__setattr__(self, "outputs", out)
        if not np.isfinite(self.freq_hz) or self.freq_hz < 0.0:
            raise InvalidParams(f"freq_hz must be finite and >= 0, got {self.freq_hz}")
        if out.ndim != 1 or out.size == 0:
            raise InvalidParams("outputs must be a non-empty 1-D vector")
        if not np.all(np.isfinite(out)) or np.any(out < 0.0):
            raise InvalidParams("outputs must be finite and >= 0")


@dataclass(frozen=True)
class SplitDataset:
    train: list
    test: list
    seed: int


def split(samples, test_fraction: float, seed: int) -> SplitDataset:
    """Random train/test partition by sample, deterministic for a fixed seed.

    |test| = round(test_fraction * N); both partitions keep the original
    sample order.
    """
    samples = list(samples)
    n = len(samples)
    if not 0.0 < test_fraction < 1.0:
        raise InvalidParams(f"test_fraction must be in (0, 1), got {test_fraction}")
    if n < 5:
        raise TooFewSamples(f"need at least 5 samples to split, got {n}")
    n_test = int(round(test_fraction * n))
    if n_test < 1 or n_test > n - 1:
        raise TooFewSamples(
            f"test_fraction {test_fraction} of {n} samples leaves an empty partition")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return SplitDataset(
        train=[samples[i] for i in train_idx],
        test=[samples[i] for i in test_idx],
        seed=seed,
    )


# --- scaling ----------------------------------------------------------------

LINEAR_MINMAX = "linear_minmax"
LOG10 = "log10"


@dataclass
class Scaler:
    """Column-wise transform fitted on training data only.

    linear_minmax maps the train [min, max] of each column to [0, 1] and
    extrapolates linearly outside it (no clamping).  log10 applies
    log10(max(x, floor_eps)) independent of column.
    """

    scheme: str
    col_min: np.ndarray | None = None
    col_max: np.ndarray | None = None
    floor_eps: float | None = None

    def to_dict(self) -> dict:
        d = {"scheme": self.scheme}
        if self.scheme == LINEAR_MINMAX:
            d["col_min"] = [float(v) for v in self.col_min]
            d["col_max"] = [float(v) for v in self.col_max]
        else:
            d["floor_eps"] = self.floor_eps
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        scheme = d["scheme"]
        if scheme == LINEAR_MINMAX:
            return cls(scheme, col_min=np.asarray(d["col_min"], dtype=float),
                       col_max=np.asarray(d["col_max"], dtype=float))
        if scheme == LOG10:
            return cls(scheme, floor_eps=d["floor_eps"])
        raise InvalidParams(f"unknown scaling scheme {scheme!r}")


def _as_columns(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] == 0:
        raise DimensionMismatch(f"expected (n,) or (n, k) values, got shape {np.shape(values)}")
    return v


def scale_fit(values, scheme: str, floor_eps: float | None = 1e-18) -> Scaler:
    """Fit a scaler on training columns only (no test leakage)."""
    v = _as_columns(values)
    if scheme == LINEAR_MINMAX:
        return Scaler(scheme, col_min=v.min(axis=0), col_max=v.max(axis=0))
    if scheme == LOG10:
        if floor_eps is None or floor_eps <= 0.0:
            if np.any(v <= 0.0):
                raise NonPositiveForLog(
                    "log10 scaling without a positive floor requires all values > 0")
            floor_eps = 0.0
        return Scaler(scheme, floor_eps=float(floor_eps))
    raise InvalidParams(f"unknown scaling scheme {scheme!r}")


def scale_apply(scaler: Scaler, values) -> np.ndarray:
    v = _as_columns(values)
    if scaler.scheme == LINEAR_MINMAX:
        if v.shape[1] != scaler.col_min.shape[0]:
            raise DimensionMismatch(
                f"scaler fitted on {scaler.col_min.shape[0]} columns, got {v.shape[1]}")
        span = scaler.col_max - scaler.col_min
        span = np.where(span > 0.0, span, 1.0)  # constant column maps to 0
        return (v - scaler.col_min) / span
    if scaler.floor_eps:
        v = np.maximum(v, scaler.floor_eps)
    return np.log10(v)


def scale_invert(scaler: Scaler, scaled) -> np.ndarray:
    v = _as_columns(scaled)
    if scaler.scheme == LINEAR_MINMAX:
        if v.shape[1] != scaler.col_min.shape[0]:
            raise DimensionMismatch(
                f"scaler fitted on {scaler.col_min.shape[0]} columns, got {v.shape[1]}")
        span = scaler.col_max - scaler.col_min
        span = np.where(span > 0.0, span, 1.0)
        return v * span + scaler.col_min
    return np.power(10.0, v)


# --- CSV persistence ---------------------------------------------------------

def _header_for(k: int) -> str:
    if k == 1:
        return "freq_hz,amplitude"
    if k == 3:
        return "freq_hz,ux_max,uy_max,uz_max"
    return "freq_hz," + ",".join(f"out_{i + 1}" for i in range(k))


def write_csv(samples, path) -> None:
    """Write samples as UTF-8 CSV, '\\n' endings, 17 significant digits."""
    samples = list(samples)
    k = samples[0].outputs.size if samples else 1
    lines = [_header_for(k)]
    for s in samples:
        row = [FLOAT_FMT % s.freq_hz] + [FLOAT_FMT % y for y in s.outputs]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> list:
    """Read samples written by write_csv; raises MalformedRow with the
    offending 1-based data row index."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln != ""]
    if not lines:
        raise MalformedRow("empty file, missing header")
    n_cols = len(lines[0].split(","))
    if n_cols < 2 or not lines[0].startswith("freq_hz"):
        raise MalformedRow(f"unexpected header {lines[0]!r}")
    samples = []
    for i, ln in enumerate(lines[1:], start=1):
        parts = ln.split(",")
        if len(parts) != n_cols:
            raise MalformedRow(f"row {i}: expected {n_cols} columns, got {len(parts)}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise MalformedRow(f"row {i}: {exc}") from exc
        samples.append(ResponseSample(vals[0], np.array(vals[1:])))
    return samples


def samples_to_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    """(freqs (n,), outputs (n, k)) view of a sample list."""
    samples = list(samples)
    freqs = np.array([s.freq_hz for s in samples])
    outputs = np.vstack([s.outputs for s in samples]) if samples else np.zeros((0, 1))
    return freqs, outputs
