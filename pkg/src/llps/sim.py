"""Monte Carlo frame-error-rate simulation for the reference and LLPS-DPC schemes.

Every frame draws its information bits, interferer and noise from a generator
seeded by ``(master_seed, snr_index, frame_index)``. Frames are grouped into
fixed-size chunks that are accumulated strictly in chunk order, and the
stopping rule is checked after each chunk, so the records do not depend on
the number of workers.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import logging
import multiprocessing as mp
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import IO, Callable

import numpy as np

from .bp import decode_bits
from .channel import LLR_CLIP, DpcChannelParams, llr_dpc, llr_int_as_noise, transmit
from .codec import DpcEncoderSpec, dpc_encode, make_dpc_encoder, pas_encode, recover_info
from .gf2 import BitVector
from .ldpc import LinearCodeLayout, load_alist, partition, shorten, wimax_r12

log = logging.getLogger(__name__)

SCHEMES = ("reference", "llps-dpc")
FER_COLUMNS = (
    "snr_db",
    "frames",
    "frame_errors",
    "bit_errors",
    "fer",
    "ber",
    "elapsed_seconds",
    "seed",
    "config_digest",
)


class ConfigError(ValueError):
    pass


@dataclass
class SimConfig:
    scheme: str = "llps-dpc"
    z: int = 44
    alist: str | None = None
    shorten: int = 0
    ell: int = 16
    k_info: int = 496
    sir_db: float = -5.0
    snr_grid: list[float] = field(default_factory=lambda: [3.0])
    q: float = 0.6037
    max_iter: int = 100
    min_frame_errors: int = 100
    max_frames: int = 200_000
    master_seed: int = 0
    code_seed: int = 1
    chunk_frames: int = 50
    workers: int = 1

    @classmethod
    def reference(cls, **overrides) -> "SimConfig":
        """Shortened n=1152 code, interference treated as noise."""
        base = dict(scheme="reference", z=48, shorten=66, ell=0, k_info=510)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def llps_dpc(cls, **overrides) -> "SimConfig":
        """n=1056 code with two SDMs of dimension 16."""
        base = dict(scheme="llps-dpc", z=44, shorten=0, ell=16, k_info=496)
        base.update(overrides)
        return cls(**base)

    def digest(self) -> str:
        """Stable hash of every setting that influences the records."""
        d = asdict(self)
        d.pop("workers")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class FerRecord:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    elapsed_seconds: float
    seed: int
    config_digest: str
    # telemetry, not written to CSV
    match_fraction: float = float("nan")

    def csv_row(self) -> list[str]:
        out = []
        for name in FER_COLUMNS:
            v = getattr(self, name)
            out.append(f"{v:.6g}" if isinstance(v, float) else str(v))
        return out


def parse_snr_grid(text: str) -> list[float]:
    """``"a:step:b"`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        try:
            a, step, b = (float(t) for t in text.split(":"))
        except ValueError:
            raise ConfigError(f"bad SNR range {text!r}, expected start:step:stop") from None
        if step <= 0 or b < a:
            raise ConfigError(f"bad SNR range {text!r}")
        count = int(np.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 10) for i in range(count)]
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ConfigError(f"bad SNR list {text!r}") from None


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(SimConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}")
    t = types[name]
    try:
        if name == "snr_grid":
            return parse_snr_grid(raw)
        if name == "alist":
            return raw or None
        if t == "int":
            return int(raw)
        if t == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def parse_config(text: str, base: SimConfig | None = None) -> SimConfig:
    """Parse ``key = value`` lines (``#`` comments); unset keys keep scheme defaults.

    If ``scheme`` is given, the remaining keys default to that scheme's preset.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string("[sim]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    values = {k.replace("-", "_"): _coerce(k.replace("-", "_"), v) for k, v in cp["sim"].items()}
    if base is None:
        scheme = values.get("scheme", "llps-dpc")
        base = SimConfig.reference() if scheme == "reference" else SimConfig.llps_dpc()
    return replace(base, **values)


def load_config(path: str | Path) -> SimConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def build_layout(config: SimConfig) -> LinearCodeLayout:
    if config.alist:
        try:
            H = load_alist(Path(config.alist).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read alist {config.alist}: {exc}") from None
    else:
        H = wimax_r12(config.z)
    layout = partition(H, config.ell)
    return shorten(layout, config.shorten) if config.shorten else layout


def validate(config: SimConfig, layout: LinearCodeLayout | None = None) -> LinearCodeLayout:
    """Check scheme consistency before any frame is simulated."""
    if config.scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {config.scheme!r}")
    if not config.snr_grid:
        raise ConfigError("snr_grid is empty")
    if config.min_frame_errors < 1 or config.max_frames < 1 or config.chunk_frames < 1:
        raise ConfigError("min_frame_errors, max_frames and chunk_frames must be positive")
    if config.max_iter < 1:
        raise ConfigError("max_iter must be positive")
    if not 0.0 < config.q < 1.0:
        raise ConfigError(f"q must lie in (0, 1), got {config.q}")
    if config.workers < 1:
        raise ConfigError("workers must be positive")
    try:
        layout = layout or build_layout(config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if config.scheme == "reference":
        if config.ell != 0:
            raise ConfigError("reference scheme uses plain systematic encoding (ell = 0)")
        if config.k_info != layout.k - layout.shortened:
            raise ConfigError(f"reference k_info must be k - shorten = {layout.k - layout.shortened}")
    else:
        free = layout.k_sys - layout.shortened
        if not 0 < config.k_info <= free:
            raise ConfigError(f"llps-dpc k_info must lie in [1, {free}]")
    return layout


class _Runner:
    """Frame simulator for one configuration; shared read-only by workers."""

    def __init__(self, config: SimConfig, layout: LinearCodeLayout):
        self.config = config
        self.layout = layout
        self.dpc: DpcEncoderSpec | None = None
        if config.scheme == "llps-dpc":
            self.dpc = make_dpc_encoder(layout, config.k_info, config.code_seed)

    def frame(self, rng: np.random.Generator, params: DpcChannelParams) -> tuple[int, int, float]:
        if self.dpc is None:
            return self._reference_frame(rng, params)
        return self._dpc_frame(rng, params)

    def _reference_frame(self, rng, params):
        lay, cfg = self.layout, self.config
        s = lay.shortened
        info = rng.integers(0, 2, size=cfg.k_info, dtype=np.uint8)
        v = BitVector.from_bits(np.concatenate([np.zeros(s, np.uint8), info]))
        c = pas_encode(lay, v).bits.to_bits()
        z = rng.choice(np.array([-1.0, 1.0]), size=lay.n - s)
        y = transmit(c[s:], z, params, rng)
        llr = np.empty(lay.n)
        llr[:s] = LLR_CLIP
        llr[s:] = llr_int_as_noise(y, params)
        hard, _, _ = decode_bits(lay, llr, cfg.max_iter)
        errs = int(np.count_nonzero(hard[s : lay.k] != info))
        return errs, errs, float(np.mean(c[s:] == (z > 0)))

    def _dpc_frame(self, rng, params):
        lay, cfg, spec = self.layout, self.config, self.dpc
        s = lay.shortened
        u_bits = rng.integers(0, 2, size=cfg.k_info, dtype=np.uint8)
        z = rng.choice(np.array([-1.0, 1.0]), size=lay.n)
        c = dpc_encode(spec, BitVector.from_bits(u_bits), z).bits.to_bits()
        y = transmit(c[s:], z[s:], params, rng)
        llr = np.empty(lay.n)
        llr[:s] = LLR_CLIP
        llr[s:] = llr_dpc(y, params, cfg.q)
        hard, _, _ = decode_bits(lay, llr, cfg.max_iter)
        u_hat = recover_info(spec, BitVector.from_bits(hard[: lay.k_sys])).to_bits()
        errs = int(np.count_nonzero(u_hat != u_bits))
        return errs, errs, float(np.mean(c[s:] == (z[s:] > 0)))

    def chunk(self, snr_index: int, start: int, count: int) -> tuple[int, int, int, float]:
        """Simulate frames ``start .. start+count-1``; return sums."""
        cfg = self.config
        params = DpcChannelParams.from_db(cfg.snr_grid[snr_index], cfg.sir_db)
        frame_errors = bit_errors = 0
        match_sum = 0.0
        for f in range(start, start + count):
            rng = np.random.default_rng([cfg.master_seed, snr_index, f])
            errs, _, frac = self.frame(rng, params)
            frame_errors += errs > 0
            bit_errors += errs
            match_sum += frac
        return count, frame_errors, bit_errors, match_sum


_WORKER_RUNNER: _Runner | None = None


def _worker_chunk(args):
    return _WORKER_RUNNER.chunk(*args)


def _chunks(config: SimConfig):
    start = 0
    while start < config.max_frames:
        count = min(config.chunk_frames, config.max_frames - start)
        yield start, count
        start += count


def _simulate_point(runner: _Runner, snr_index: int, submit: Callable | None, window: int) -> FerRecord:
    cfg = runner.config
    t0 = time.perf_counter()
    frames = frame_errors = bit_errors = 0
    match_sum = 0.0

    def done() -> bool:
        return frame_errors >= cfg.min_frame_errors or frames >= cfg.max_frames

    if submit is None:
        for start, count in _chunks(cfg):
            n, fe, be, ms = runner.chunk(snr_index, start, count)
            frames, frame_errors, bit_errors, match_sum = frames + n, frame_errors + fe, bit_errors + be, match_sum + ms
            if done():
                break
    else:
        pending: deque = deque()
        source = _chunks(cfg)
        for start, count in source:
            pending.append(submit((snr_index, start, count)))
            if len(pending) >= window:
                break
        while pending:
            n, fe, be, ms = pending.popleft().result()
            frames, frame_errors, bit_errors, match_sum = frames + n, frame_errors + fe, bit_errors + be, match_sum + ms
            if done():
                for fut in pending:
                    fut.cancel()
                break
            nxt = next(source, None)
            if nxt is not None:
                pending.append(submit((snr_index, *nxt)))

    elapsed = time.perf_counter() - t0
    rec = FerRecord(
        snr_db=float(cfg.snr_grid[snr_index]),
        frames=frames,
        frame_errors=frame_errors,
        bit_errors=bit_errors,
        fer=frame_errors / frames,
        ber=bit_errors / (frames * cfg.k_info),
        elapsed_seconds=elapsed,
        seed=cfg.master_seed,
        config_digest=cfg.digest(),
        match_fraction=match_sum / frames,
    )
    log.info("snr=%.3f frames=%d errors=%d fer=%.3g (%.1fs)", rec.snr_db, frames, frame_errors, rec.fer, elapsed)
    return rec


def simulate(config: SimConfig, on_record: Callable[[FerRecord], None] | None = None) -> list[FerRecord]:
    """Run every SNR point of ``config`` and return one record per point."""
    global _WORKER_RUNNER
    layout = validate(config)
    runner = _Runner(config, layout)
    records = []
    if config.workers == 1:
        for i in range(len(config.snr_grid)):
            records.append(_simulate_point(runner, i, None, 0))
            if on_record:
                on_record(records[-1])
        return records

    _WORKER_RUNNER = runner  # inherited by forked workers
    try:
        with ProcessPoolExecutor(config.workers, mp_context=mp.get_context("fork")) as pool:
            for i in range(len(config.snr_grid)):
                rec = _simulate_point(runner, i, lambda a: pool.submit(_worker_chunk, a), 2 * config.workers)
                records.append(rec)
                if on_record:
                    on_record(rec)
    finally:
        _WORKER_RUNNER = None
    return records


def run_reference(config: SimConfig, **kw) -> list[FerRecord]:
    if config.scheme != "reference":
        raise ConfigError("run_reference needs scheme = reference")
    return simulate(config, **kw)


def run_llps_dpc(config: SimConfig, **kw) -> list[FerRecord]:
    if config.scheme != "llps-dpc":
        raise ConfigError("run_llps_dpc needs scheme = llps-dpc")
    return simulate(config, **kw)


def write_fer_csv(records: list[FerRecord], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FER_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())


def snr_at_fer(records: list[FerRecord], target: float = 1e-2) -> float:
    """Interpolate log10(FER) linearly in SNR to find where it crosses ``target``.

    Uses the first adjacent pair of points that brackets the target.
    """
    pts = sorted((r.snr_db, r.fer) for r in records)
    for (s0, f0), (s1, f1) in zip(pts, pts[1:]):
        if f0 >= target >= f1 and f0 > 0 and f1 > 0 and f0 != f1:
            l0, l1, lt = np.log10(f0), np.log10(f1), np.log10(target)
            return s0 + (l0 - lt) / (l0 - l1) * (s1 - s0)
    raise ValueError(f"FER curve does not bracket {target}: {pts}")
