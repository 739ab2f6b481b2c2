"""Command line interface: ``llps rates|optimize|fer|sdm-demo|code-info``."""

from __future__ import annotations

import contextlib
import logging
import sys
from dataclasses import replace

import click
import numpy as np

from . import rates as rates_mod
from .channel import DpcChannelParams
from .gf2 import BitMatrix, BitVector, rank
from .ldpc import load_alist, partition, shorten, wimax_r12
from .sdm import CrossEntropy, HammingWeight, PatternMatch, build, eval_cost, match, syndrome_lut
from .sim import ConfigError, SimConfig, load_config, parse_snr_grid, simulate, write_fer_csv


def global_options(f):
    f = click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Key-value config file.")(f)
    f = click.option("--seed", type=int, default=None, help="Master seed.")(f)
    f = click.option("--workers", type=int, default=None, help="Worker processes.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output path (default stdout).")(f)
    return f


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        try:
            fh = open(path, "w", newline="")
        except OSError as exc:
            raise click.ClickException(f"cannot write {path}: {exc}") from None
        with fh:
            yield fh


def _grid(text: str) -> list[float]:
    try:
        return parse_snr_grid(text)
    except ConfigError as exc:
        raise click.BadParameter(str(exc)) from None


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Linear layered probabilistic shaping: rates, SDM and FER simulation."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command()
@click.option("--sir", type=float, default=-5.0, show_default=True, help="Interference strength 10log10(β²/α²) in dB.")
@click.option("--snr", "snr", default="-3:0.5:7", show_default=True, help="SNR grid start:step:stop or list.")
@click.option("--fixed-q", type=float, default=None, help="Also emit the DPC rate at this fixed q.")
@global_options
def rates(sir, snr, fixed_q, config_path, seed, workers, out):
    """Sweep achievable rates and write a CSV."""
    grid = _grid(snr)
    points = rates_mod.rate_curve(grid, sir)
    fixed = None
    if fixed_q is not None:
        fixed = [rates_mod.rate_dpc(DpcChannelParams.from_db(s, sir), fixed_q) for s in grid]
    with _output(out) as fh:
        rates_mod.write_rates_csv(points, fh, fixed)


@main.command()
@click.option("--snr", type=float, default=None, help="SNR in dB (default: the R_dpc crossing of --rate).")
@click.option("--sir", type=float, default=-5.0, show_default=True)
@click.option("--rate", type=float, default=0.4696, show_default=True, help="Target rate for the default SNR.")
@global_options
def optimize(snr, sir, rate, config_path, seed, workers, out):
    """Optimize P_{B|Z} at one operating point."""
    lines = []
    if snr is None:
        ref, snr = rates_mod.crossing_snrs(rate, sir)
        lines.append(f"snr_int_as_noise_db={ref:.6g}")
        lines.append(f"snr_dpc_db={snr:.6g}")
        lines.append(f"gain_db={ref - snr:.6g}")
    q, r = rates_mod.optimize_q(DpcChannelParams.from_db(snr, sir))
    lines += [f"snr_db={snr:.6g}", f"q_opt={q:.6g}", f"r_dpc={r:.6g}"]
    with _output(out) as fh:
        fh.write("\n".join(lines) + "\n")


@main.command()
@click.option("--scheme", type=click.Choice(["reference", "llps-dpc"]), default=None)
@click.option("--snr", default=None, help="Override the SNR grid.")
@click.option("--max-frames", type=int, default=None)
@click.option("--min-errors", type=int, default=None)
@global_options
def fer(scheme, snr, max_frames, min_errors, config_path, seed, workers, out):
    """Monte Carlo FER simulation; writes one CSV row per SNR point."""
    try:
        if config_path:
            cfg = load_config(config_path)
        else:
            cfg = SimConfig.reference() if scheme == "reference" else SimConfig.llps_dpc()
        if scheme and scheme != cfg.scheme:
            base = SimConfig.reference() if scheme == "reference" else SimConfig.llps_dpc()
            cfg = replace(base, snr_grid=cfg.snr_grid, master_seed=cfg.master_seed)
        overrides = {}
        if snr is not None:
            overrides["snr_grid"] = _grid(snr)
        if seed is not None:
            overrides["master_seed"] = seed
        if workers is not None:
            overrides["workers"] = workers
        if max_frames is not None:
            overrides["max_frames"] = max_frames
        if min_errors is not None:
            overrides["min_frame_errors"] = min_errors
        cfg = replace(cfg, **overrides)
        records = simulate(cfg)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from None
    with _output(out) as fh:
        write_fer_csv(records, fh)


def _random_parity_former(m: int, ell: int, rng: np.random.Generator) -> BitMatrix:
    while True:
        M = BitMatrix.from_bits(rng.integers(0, 2, size=(m, m + ell), dtype=np.uint8))
        if rank(M) == m:
            return M


@main.command("sdm-demo")
@click.option("--m", "m", type=int, default=6, show_default=True)
@click.option("--ell", type=int, default=3, show_default=True)
@click.option("--cost", type=click.Choice(["hamming", "cross-entropy", "pattern"]), default="hamming", show_default=True)
@global_options
def sdm_demo(m, ell, cost, config_path, seed, workers, out):
    """Compare the SDM with an exhaustive search on a random small instance."""
    if m < 1 or ell < 0 or m + ell > 20:
        raise click.BadParameter("need m >= 1, ell >= 0 and m + ell <= 20")
    rng = np.random.default_rng(0 if seed is None else seed)
    Hp = _random_parity_former(m, ell, rng)
    costfn = {
        "hamming": HammingWeight(),
        "cross-entropy": CrossEntropy(0.8),
        "pattern": PatternMatch(BitVector.random(m + ell, rng)),
    }[cost]
    spec = build(Hp)
    best, _ = syndrome_lut(Hp, costfn)
    agree = 0
    for i in range(1 << m):
        s = BitVector.from_bits([(i >> j) & 1 for j in range(m)])
        p = match(spec, s, costfn)
        ok = (not (p.to_bits() @ Hp.to_bits().T % 2 != s.to_bits()).any()) and np.isclose(
            eval_cost(costfn, p), best[i]
        )
        agree += ok
    with _output(out) as fh:
        fh.write(f"Hp: {m}x{m + ell}, coset size 2^{ell} = {1 << ell}, cost {cost}\n")
        fh.write(f"oracle agreement: {agree}/{1 << m} syndromes\n")
    if agree != 1 << m:
        sys.exit(1)


@main.command("code-info")
@click.option("--z", type=int, default=44, show_default=True, help="WiMAX expansion factor.")
@click.option("--alist", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ell", type=int, default=0, show_default=True)
@click.option("--shorten", "shorten_by", type=int, default=0, show_default=True)
@global_options
def code_info(z, alist, ell, shorten_by, config_path, seed, workers, out):
    """Print rank and partition diagnostics for a code."""
    try:
        H = load_alist(open(alist).read()) if alist else wimax_r12(z)
        layout = partition(H, ell)
        if shorten_by:
            layout = shorten(layout, shorten_by)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    identity = bool(np.array_equal(layout.parity_perm, np.arange(layout.m + layout.ell)))
    lines = [
        f"n={layout.n} k={layout.k} m={layout.m} ell={layout.ell}",
        f"rank(H)={rank(H)}",
        f"H_s={layout.m}x{layout.k_sys} H_p={layout.m}x{layout.m + layout.ell}",
        f"parity_perm_identity={identity}",
        f"edges={layout.edge_var.size}",
        f"rate_fec={layout.rate_fec:.6g}",
        f"shortened={layout.shortened} effective_rate={layout.effective_rate:.6g}",
    ]
    if ell:
        lines.append(f"sdm_rate={layout.m / (layout.m + ell):.6g}")
    with _output(out) as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
