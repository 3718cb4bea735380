"""
Monte-Carlo simulator of the physical model.

Each trial draws an eavesdropper field on a disk, the estimated main
channel, the precoders and every eavesdropper channel, then checks whether
the strongest eavesdropper beats the redundancy rate. Trials come in fixed
blocks; block b uses the random stream default_rng([seed, b]) and always
draws in the same order (counts, radii, thinning marks, optional Bob gain,
channels), so any trial count reproduces the same leading blocks.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.config import MAX_SINR_FLOOR_PROB, MC_CHUNK_ELEMENTS, MC_MIN_RADIUS, MC_TAIL_PROB
from src.models import Fidelity, McConfig, McEstimate, SystemConfig
from src.optimizers.sop_min import gamma_e_quantile
from src.params import derive
from src.utils import DomainError, setup_logger


logger = setup_logger(__name__)


class EveBlock(NamedTuple):
    """One block of trials, flattened over eavesdroppers."""
    trials: int
    trial_idx: np.ndarray  # owning trial of each Eve, nondecreasing
    radii: np.ndarray
    marks: np.ndarray  # uniform thinning marks
    sinr: np.ndarray
    kappa: np.ndarray  # Bob's SINR per unit ratio, one per trial


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_eves(lambda_e: float, r_max: float, rng: np.random.Generator, trials: Optional[int] = None):
    """
    Distances of a homogeneous PPP on a disk around the transmitter.

    Args:
        lambda_e: Density per unit area
        r_max: Disk radius
        rng: Random stream
        trials: Number of independent fields; None draws a single field

    Returns:
        Radii with density 2r / r_max^2 on (0, r_max]. With `trials`, the
        pair (counts, radii) where radii are flattened in trial order and
        counts[t] of them belong to trial t.

    Raises:
        DomainError: If r_max <= 0
    """
    if not r_max > 0:
        raise DomainError(f"disk radius must be positive, got {r_max}")
    mean = lambda_e * math.pi * r_max ** 2
    if trials is None:
        return r_max * np.sqrt(rng.random(rng.poisson(mean)))

    counts = rng.poisson(mean, trials)
    return counts, r_max * np.sqrt(rng.random(int(counts.sum())))


def sample_bob_channel(h_hat: np.ndarray, tau: float, rng: np.random.Generator) -> np.ndarray:
    """Exact main channel sqrt(1 - tau^2) h_hat + tau h_err with CN(0, I) error."""
    h_hat = np.asarray(h_hat, dtype=complex)
    return math.sqrt(1.0 - tau ** 2) * h_hat + tau * complex_normal(rng, h_hat.shape)


def build_precoders(h_hat: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Beamformer towards the estimated channel and an orthonormal AN basis.

    Args:
        h_hat: Estimated channel of length N, or a (trials, N) stack
        rng: Random stream for the completion columns

    Returns:
        (w, G): w = conj(h_hat) / ||h_hat|| and G with N - 1 orthonormal
        columns orthogonal to w (stacked when the input is)

    Raises:
        DomainError: If any channel vector is zero
    """
    h_hat = np.asarray(h_hat, dtype=complex)
    single = h_hat.ndim == 1
    stack = h_hat[None, :] if single else h_hat

    norms = np.linalg.norm(stack, axis=-1)
    if np.any(norms == 0):
        raise DomainError("cannot beamform towards a zero channel")

    n = stack.shape[-1]
    w = np.conj(stack) / norms[:, None]
    seed_columns = complex_normal(rng, (stack.shape[0], n, n - 1))
    q, _ = np.linalg.qr(np.concatenate([w[:, :, None], seed_columns], axis=2))
    g = q[:, :, 1:]

    if single:
        return w[0], g[0]
    return w, g


def sinr_bob(config: SystemConfig, xi: float) -> float:
    """Bob's SINR under worst-case noise; deterministic given the estimate."""
    return derive(config).kappa * xi


def sinr_eve(h_e: np.ndarray, r_k, w: np.ndarray, g: np.ndarray, config: SystemConfig, xi: float):
    """
    SINR of eavesdroppers at distance r_k with channels h_e.

    Args:
        h_e: Channel of length N, or (..., N) for several Eves sharing (w, G)
        r_k: Distance(s) matching the leading shape of h_e
    """
    h_e = np.asarray(h_e, dtype=complex)
    signal = np.abs(h_e @ w) ** 2
    noise = np.sum(np.abs(h_e @ g) ** 2, axis=-1)
    return _sinr_from_gains(signal, noise, np.asarray(r_k, dtype=float), config, xi)


def _sinr_from_gains(signal, an_gain, radii, config: SystemConfig, xi: float):
    path = config.power * radii ** (-config.alpha)
    return xi * signal * path / ((1.0 - xi) * an_gain * path / (config.n_antennas - 1) + 1.0)


def eve_sinr_cdf(x, r: float, xi: float, config: SystemConfig):
    """CDF of one eavesdropper's SINR at distance r."""
    x = np.asarray(x, dtype=float)
    n = config.n_antennas
    if xi == 0:
        return np.where(x >= 0, 1.0, 0.0)
    phi = (1.0 / xi - 1.0) / (n - 1)
    return 1.0 - np.exp(-r ** config.alpha * x / (config.power * xi)) * (1.0 + phi * x) ** (1 - n)


def _eve_gains(
    config: SystemConfig,
    trial_idx: np.ndarray,
    trials: int,
    fidelity: Fidelity,
    rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Beamformed gain |h_e^T w|^2 and AN gain ||h_e^T G||^2 for every Eve."""
    n = config.n_antennas
    total = trial_idx.size

    if fidelity == Fidelity.SINR_LEVEL:
        return rng.exponential(1.0, total), rng.gamma(n - 1, 1.0, total)

    h_hat = complex_normal(rng, (trials, n))
    w, g = build_precoders(h_hat, rng)
    basis = np.concatenate([w[:, :, None], g], axis=2)

    signal = np.empty(total)
    an_gain = np.empty(total)
    chunk = max(1, MC_CHUNK_ELEMENTS // (n * n))
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        h_e = complex_normal(rng, (stop - start, n))
        proj = np.einsum("kn,knm->km", h_e, basis[trial_idx[start:stop]])
        power = np.abs(proj) ** 2
        signal[start:stop] = power[:, 0]
        an_gain[start:stop] = power[:, 1:].sum(axis=1)

    return signal, an_gain


def _sample_block(
    config: SystemConfig,
    xi: float,
    r_max: float,
    trials: int,
    mc: McConfig,
    rng: np.random.Generator,
    lambda_e: Optional[float] = None
) -> EveBlock:
    lam = config.lambda_e if lambda_e is None else lambda_e
    counts, radii = sample_eves(lam, r_max, rng, trials=trials)
    marks = rng.random(radii.size)

    kappa = derive(config).kappa
    if mc.sample_gamma:
        kappa = kappa * rng.gamma(config.n_antennas, 1.0, trials) / config.gamma_hat
    else:
        kappa = np.full(trials, kappa)

    trial_idx = np.repeat(np.arange(trials), counts)
    signal, an_gain = _eve_gains(config, trial_idx, trials, mc.fidelity, rng)
    sinr = _sinr_from_gains(signal, an_gain, radii, config, xi)

    return EveBlock(trials, trial_idx, radii, marks, sinr, kappa)


def _block(config: SystemConfig, xi: float, r_max: float, mc: McConfig, b: int, lambda_e: Optional[float] = None) -> EveBlock:
    size = min(mc.block_trials, mc.trials - b * mc.block_trials)
    return _sample_block(config, xi, r_max, size, mc, np.random.default_rng([mc.seed, b]), lambda_e)


def _blocks(config: SystemConfig, xi: float, r_max: float, mc: McConfig, lambda_e: Optional[float] = None):
    """Yield the blocks of a run in order."""
    for b in range(math.ceil(mc.trials / mc.block_trials)):
        yield _block(config, xi, r_max, mc, b, lambda_e)


def _outages(block: EveBlock, xi: float, t_pow: float, keep: Optional[np.ndarray] = None) -> int:
    """Number of trials in a block where the strongest kept Eve beats the redundancy rate."""
    threshold = (1.0 + xi * block.kappa) / t_pow - 1.0
    hits = block.sinr > threshold[block.trial_idx]
    if keep is not None:
        hits &= keep
    per_trial = np.bincount(block.trial_idx[hits], minlength=block.trials)
    return int(np.count_nonzero((per_trial > 0) | (threshold <= 0)))


def _block_outages(config: SystemConfig, xi: float, r_max: float, mc: McConfig, t_pow: float, b: int) -> int:
    """Outage count of block b."""
    return _outages(_block(config, xi, r_max, mc, b), xi, t_pow)


def _estimate(outages: int, mc: McConfig) -> McEstimate:
    n = mc.trials
    p = outages / n
    std_err = math.sqrt(p * (1.0 - p) * n / (n - 1)) / math.sqrt(n) if n > 1 else 0.0
    return McEstimate(mean=p, std_err=std_err, trials=n, seed=mc.seed)


def redundancy_threshold(config: SystemConfig, rate: float, xi: float, gamma_hat: Optional[float] = None) -> float:
    """Eavesdropper SINR at which the secrecy rate is just lost."""
    cfg = config if gamma_hat is None else config.model_copy(update={"gamma_hat": gamma_hat})
    return (1.0 + xi * derive(cfg).kappa) / 2.0 ** rate - 1.0


def auto_radius(config: SystemConfig, xi: float, x_threshold: float) -> float:
    """
    Disk radius beyond which one Eve exceeds x_threshold with probability at most MC_TAIL_PROB.

    Raises:
        DomainError: If x_threshold <= 0
    """
    if not x_threshold > 0:
        raise DomainError(f"SINR threshold must be positive, got {x_threshold}")
    if xi == 0:
        return MC_MIN_RADIUS

    n = config.n_antennas
    phi = (1.0 / xi - 1.0) / (n - 1)
    budget = max(0.0, math.log(1.0 / MC_TAIL_PROB) - (n - 1) * math.log1p(phi * x_threshold))
    radius = (config.power * xi / x_threshold * budget) ** (1.0 / config.alpha)
    return max(radius, MC_MIN_RADIUS)


def _radius(config: SystemConfig, rate: float, xi: float, mc: McConfig) -> float:
    if mc.r_max_policy == "fixed":
        return mc.fixed_radius

    if mc.sample_gamma:
        # radius sized for the median Bob gain
        x_ref = max(redundancy_threshold(config, rate, xi, stats.gamma.median(config.n_antennas)), 1e-2)
    else:
        x_ref = redundancy_threshold(config, rate, xi)
    return auto_radius(config, xi, x_ref)


def _check_trials(mc: McConfig) -> None:
    # McConfig enforces trials >= 1; this catches unvalidated instances
    if mc.trials < 1:
        raise DomainError(f"Monte-Carlo needs at least one trial, got {mc.trials}")


def empirical_sop(config: SystemConfig, rate: float, xi: float, mc: McConfig, workers: int = 1) -> McEstimate:
    """
    Monte-Carlo secrecy outage probability.

    Args:
        config: Physical scenario
        rate: Target secrecy rate
        xi: Power allocation ratio
        mc: Trials, seed, radius policy and fidelity
        workers: Processes sharing the blocks; the estimate does not depend on it

    Returns:
        Fraction of trials in outage; a certain outage (xi <= omega) returns
        mean 1 with the certain_outage flag

    Raises:
        DomainError: If mc.trials < 1
    """
    _check_trials(mc)

    if not mc.sample_gamma and redundancy_threshold(config, rate, xi) <= 0:
        logger.warning(f"xi={xi:.6g} does not support rate {rate}: outage is certain")
        return McEstimate(mean=1.0, std_err=0.0, trials=mc.trials, seed=mc.seed, certain_outage=True)

    if config.lambda_e == 0 and not mc.sample_gamma:
        return McEstimate(mean=0.0, std_err=0.0, trials=mc.trials, seed=mc.seed)

    r_max = _radius(config, rate, xi, mc)
    t_pow = 2.0 ** rate
    if workers > 1:
        task = partial(_block_outages, config, xi, r_max, mc, t_pow)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outages = sum(executor.map(task, range(math.ceil(mc.trials / mc.block_trials))))
    else:
        outages = sum(_outages(block, xi, t_pow) for block in _blocks(config, xi, r_max, mc))
    return _estimate(outages, mc)


def empirical_sop_by_density(
    config: SystemConfig,
    rate: float,
    xi: float,
    densities: Sequence[float],
    mc: McConfig
) -> List[McEstimate]:
    """
    Outage estimates for several densities from one coupled realisation.

    The field is drawn at the largest density and thinned with the shared
    marks, so each sparser field is a subset of the denser ones.
    """
    _check_trials(mc)
    lambda_max = max(densities)
    if lambda_max <= 0 or (not mc.sample_gamma and redundancy_threshold(config, rate, xi) <= 0):
        return [empirical_sop(config.model_copy(update={"lambda_e": lam}), rate, xi, mc) for lam in densities]

    r_max = _radius(config, rate, xi, mc)
    t_pow = 2.0 ** rate
    counts = [0] * len(densities)
    for block in _blocks(config, xi, r_max, mc, lambda_e=lambda_max):
        for i, lam in enumerate(densities):
            counts[i] += _outages(block, xi, t_pow, keep=block.marks < lam / lambda_max)

    return [_estimate(k, mc) for k in counts]


def truncation_check(config: SystemConfig, rate: float, xi: float, mc: McConfig) -> Tuple[McEstimate, McEstimate]:
    """
    Outage estimates on the auto radius and on twice that radius.

    Both come from one realisation on the larger disk; the inner estimate
    ignores Eves beyond the auto radius.
    """
    _check_trials(mc)
    r_inner = _radius(config, rate, xi, mc.model_copy(update={"r_max_policy": "auto"}))
    t_pow = 2.0 ** rate

    inner = outer = 0
    for block in _blocks(config, xi, 2.0 * r_inner, mc):
        inner += _outages(block, xi, t_pow, keep=block.radii <= r_inner)
        outer += _outages(block, xi, t_pow)

    return _estimate(inner, mc), _estimate(outer, mc)


def sample_eve_sinrs(
    config: SystemConfig,
    xi: float,
    r: float,
    size: int,
    rng: np.random.Generator,
    fidelity: Fidelity = Fidelity.CHANNEL_LEVEL
) -> np.ndarray:
    """SINR of `size` independent eavesdroppers, each at distance r with its own precoders."""
    trial_idx = np.arange(size)
    signal, an_gain = _eve_gains(config, trial_idx, size, fidelity, rng)
    return _sinr_from_gains(signal, an_gain, np.full(size, float(r)), config, xi)


def sample_max_sinr(config: SystemConfig, xi: float, mc: McConfig, r_max: Optional[float] = None) -> np.ndarray:
    """
    Strongest-eavesdropper SINR per trial (0 for an empty field).

    Without an explicit radius the disk is sized at the MAX_SINR_FLOOR_PROB
    quantile of the closed-form distribution.
    """
    _check_trials(mc)
    if r_max is None:
        if config.lambda_e == 0 or xi == 0:
            r_max = MC_MIN_RADIUS
        else:
            r_max = auto_radius(config, xi, gamma_e_quantile(MAX_SINR_FLOOR_PROB, xi, config))

    maxima = []
    for block in _blocks(config, xi, r_max, mc):
        best = np.zeros(block.trials)
        np.maximum.at(best, block.trial_idx, block.sinr)
        maxima.append(best)
    return np.concatenate(maxima)


def empirical_gamma_e_cdf(config: SystemConfig, xi: float, x_grid: Sequence[float], mc: McConfig) -> List[McEstimate]:
    """
    Empirical P{max SINR < x} at each grid point, from one set of trials.

    Raises:
        DomainError: If any grid point is not positive
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(x_grid <= 0):
        raise DomainError("CDF grid points must be positive")

    r_max = None
    if config.lambda_e > 0 and xi > 0:
        r_max = auto_radius(config, xi, float(x_grid.min()))

    maxima = sample_max_sinr(config, xi, mc, r_max=r_max)
    return [_estimate(int(np.count_nonzero(maxima < x)), mc) for x in x_grid]
