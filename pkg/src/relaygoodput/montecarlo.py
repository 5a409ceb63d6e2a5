"""Trial-by-trial simulation of the AF and DF ARQ protocols.

Each trial delivers one codeword and counts the slots it took. Randomness is
counter based: trial ``i`` under seed ``s`` owns a SplitMix64 stream whose
starting point is a hash of ``(s, i)``, so a batch gives bit-identical
results however it is split across threads.

Outage events come either from fixed link error probabilities (isolating the
retry trees from the channel model) or from freshly sampled Rayleigh gains
every slot, with the AF path SNR formed as ``a*b/(a+b+1)``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple, Union

import numpy as np
from numba import njit

from .analytic import Mode
from .channel import ChannelParams, outage_threshold
from .special import DomainError

__all__ = [
    "SAMPLED_FADING",
    "FixedEps",
    "SimConfig",
    "SimReport",
    "TrialOutcome",
    "uniform_stream",
    "run_af_trial",
    "run_df_trial",
    "run_batch",
]

SAMPLED_FADING = "sampled_fading"
DEFAULT_MAX_SLOTS = 10_000
CHUNK = 1 << 16

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0x6A09E667F3BCC909)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(inline="always")
def _trial_key(seed, trial):
    return _mix64(_mix64(seed ^ _SEED_SALT) + (np.uint64(trial) + _ONE) * _GOLDEN)


@njit(inline="always")
def _next_uniform(state):
    # Returns (u in [0, 1), new_state).
    state = state + _GOLDEN
    return float(_mix64(state) >> _S11) * _INV53, state


@njit(inline="always")
def _fails(state, cut):
    # Bernoulli(cut). In sampled mode ``cut`` is the exponential CDF at the
    # outage threshold, so ``u < cut`` is exactly the event that the gain
    # drawn by inversion, -log(1-u) * mean, lies below threshold.
    u, state = _next_uniform(state)
    return u < cut, state


@njit(inline="always")
def _af_path_fails(state, fixed, eps, sr_cut, snr_sr, snr_rd, thr):
    u, state = _next_uniform(state)
    if fixed:
        return u < eps, state
    if u < sr_cut:
        # first-hop SNR a <= thr, and a*b/(a+b+1) < a whatever b is
        return True, state
    a = snr_sr * -math.log1p(-u)
    u, state = _next_uniform(state)
    b = snr_rd * -math.log1p(-u)
    return a * b / (a + b + 1.0) < thr, state


@njit(nogil=True, cache=True)
def _af_trial(key, fixed, c_sd, c_path, sr_cut, snr_sr, snr_rd, thr, max_slots):
    state = key
    slots = 0
    first = 0
    while True:
        slots += 1
        if slots > max_slots:
            return max_slots, first, True
        sd_fail, state = _fails(state, c_sd)
        if not sd_fail:
            if first == 0:
                first = 1
            return slots, first, False
        slots += 1
        if slots > max_slots:
            return max_slots, (first if first else 3), True
        path_fail, state = _af_path_fails(state, fixed, c_path, sr_cut, snr_sr, snr_rd, thr)
        if first == 0:
            first = 3 if path_fail else 2
        if not path_fail:
            return slots, first, False


@njit(nogil=True, cache=True)
def _df_trial(key, c_sd, c_sr, c_rd, max_slots):
    state = key
    slots = 0
    first = 0
    while True:
        slots += 1
        if slots > max_slots:
            return max_slots, first, True
        sd_fail, state = _fails(state, c_sd)
        if not sd_fail:
            if first == 0:
                first = 1
            return slots, first, False
        sr_fail, state = _fails(state, c_sr)
        if sr_fail:
            if first == 0:
                first = 2
            continue
        # relay holds the codeword: retry on R-D only
        attempts = 0
        while True:
            slots += 1
            attempts += 1
            if slots > max_slots:
                if first == 0:
                    first = 3 if attempts == 1 else 4
                return max_slots, first, True
            rd_fail, state = _fails(state, c_rd)
            if first == 0 and (attempts > 1 or not rd_fail):
                first = 3 if attempts == 1 else 4
            if not rd_fail:
                return slots, first, False


@njit(nogil=True, cache=True)
def _batch_kernel(is_df, seed, start, stop, fixed, c1, c2, c3, sr_cut, snr_sr, snr_rd, thr,
                  max_slots, slots_out, state_out, trunc_out):
    for i in range(start, stop):
        key = _trial_key(seed, i)
        if is_df:
            s, f, t = _df_trial(key, c1, c2, c3, max_slots)
        else:
            s, f, t = _af_trial(key, fixed, c1, c2, sr_cut, snr_sr, snr_rd, thr, max_slots)
        slots_out[i - start] = s
        state_out[i - start] = f
        trunc_out[i - start] = t


@njit(cache=True)
def _stream_prefix(seed, trial, n, out):
    state = _trial_key(seed, trial)
    for j in range(n):
        out[j], state = _next_uniform(state)


def uniform_stream(seed, trial_index, n):
    """First ``n`` uniforms of the stream owned by ``(seed, trial_index)``."""
    out = np.empty(n)
    _stream_prefix(_seed64(seed), int(trial_index), int(n), out)
    return out


@dataclass(frozen=True)
class FixedEps:
    """Outage events drawn as Bernoulli trials with these probabilities.

    ``(eps_sd, eps_relay_path)`` for AF, ``(eps_sd, eps_sr, eps_rd)`` for DF.
    """

    eps: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        for e in self.eps:
            if not (math.isfinite(e) and 0.0 <= e <= 1.0):
                raise DomainError(f"fixed outage probabilities must lie in [0, 1], got {e!r}")


@dataclass(frozen=True)
class SimConfig:
    mode: Mode
    params: Optional[ChannelParams]
    rate: float
    trials: int
    seed: int = 0
    max_slots_per_codeword: int = DEFAULT_MAX_SLOTS
    outage_source: Union[str, FixedEps] = SAMPLED_FADING

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.SINGLE:
            raise DomainError("simulation supports af and df modes only")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError(f"rate must be finite and > 0, got {self.rate!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.max_slots_per_codeword) != self.max_slots_per_codeword or self.max_slots_per_codeword < 2:
            raise DomainError("max_slots_per_codeword must be an integer >= 2")
        _seed64(self.seed)
        if isinstance(self.outage_source, FixedEps):
            need = 2 if self.mode is Mode.AF else 3
            if len(self.outage_source.eps) != need:
                raise DomainError(f"{self.mode.value} needs {need} fixed outage probabilities")
        elif self.outage_source == SAMPLED_FADING:
            if self.params is None:
                raise DomainError("sampled fading needs channel parameters")
        else:
            raise DomainError(f"unknown outage source {self.outage_source!r}")

    @property
    def fixed(self):
        return isinstance(self.outage_source, FixedEps)


@dataclass(frozen=True)
class SimReport:
    """Monte Carlo estimate of the mean slots per delivered codeword.

    ``mean_slots`` and ``std_error`` cover the ``trials_used`` trials that
    finished under the slot cap; truncated trials are counted separately.
    ``per_state_counts`` tallies the first-round network state of every
    trial (1-based, numbered as in :mod:`relaygoodput.analytic`).
    """

    mode: Mode
    rate: float
    seed: int
    trials: int
    mean_slots: float
    std_error: float
    empirical_goodput: float
    trials_used: int
    truncated_trials: int
    per_state_counts: Dict[int, int] = field(default_factory=dict)
    slot_counts: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def z_score(self, expected):
        return (self.mean_slots - expected) / self.std_error


def safe_slot_cap(expected_slots):
    """Slot cap large enough that truncation is practically impossible.

    The slot count has a roughly geometric tail, ``P(X > c) ~ exp(-c / mean)``,
    so 700 means keep the truncation probability below 1e-300.  Never returns
    less than :data:`DEFAULT_MAX_SLOTS`.
    """
    if not math.isfinite(expected_slots):
        return DEFAULT_MAX_SLOTS
    return max(DEFAULT_MAX_SLOTS, int(math.ceil(700 * expected_slots)))


class TrialOutcome(NamedTuple):
    slots: int
    state: int
    truncated: bool


def _seed64(seed):
    if int(seed) != seed or not 0 <= int(seed) < 1 << 64:
        raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return np.uint64(int(seed))


def _exp_cdf(x, mean):
    return -math.expm1(-x / mean)


def _key(seed, trial_index):
    # numba boxes uint64 results as Python ints; re-wrap so they stay unsigned
    return np.uint64(_trial_key(_seed64(seed), int(trial_index)))


def _kernel_args(config):
    # (fixed, c1, c2, c3, sr_cut, snr_sr, snr_rd, thr). c1..c3 are the
    # per-link Bernoulli cutoffs; sampled AF relays form the path SNR instead.
    if config.fixed:
        eps = config.outage_source.eps + (0.0,) * (3 - len(config.outage_source.eps))
        return (True, *eps, 0.0, 1.0, 1.0, 0.0)
    p = config.params
    thr = outage_threshold(config.rate)
    snr_sr, snr_rd = p.gamma * p.sigma2_sr, p.gamma * p.sigma2_rd
    c_sd, c_sr, c_rd = _exp_cdf(thr, p.gamma), _exp_cdf(thr, snr_sr), _exp_cdf(thr, snr_rd)
    if config.mode is Mode.AF:
        return (False, c_sd, 0.0, 0.0, c_sr, snr_sr, snr_rd, thr)
    return (False, c_sd, c_sr, c_rd, 0.0, snr_sr, snr_rd, thr)


def run_af_trial(config: SimConfig, trial_index: int) -> TrialOutcome:
    """Deliver one codeword under AF relaying.

    Each round: the source transmits (1 slot); on failure the relay forwards
    (1 more slot); if that fails too the round restarts.
    """
    if config.mode is not Mode.AF:
        raise DomainError("run_af_trial needs an af config")
    fixed, c1, c2, _, sr_cut, snr_sr, snr_rd, thr = _kernel_args(config)
    s, f, t = _af_trial(_key(config.seed, trial_index), fixed, c1, c2,
                        sr_cut, snr_sr, snr_rd, thr, int(config.max_slots_per_codeword))
    return TrialOutcome(int(s), int(f), bool(t))


def run_df_trial(config: SimConfig, trial_index: int) -> TrialOutcome:
    """Deliver one codeword under DF relaying.

    The source repeats its broadcast while both S-D and S-R fail. Once the
    relay has decoded, it alone retransmits until the R-D link succeeds.
    """
    if config.mode is not Mode.DF:
        raise DomainError("run_df_trial needs a df config")
    _, c1, c2, c3 = _kernel_args(config)[:4]
    s, f, t = _df_trial(_key(config.seed, trial_index), c1, c2, c3,
                        int(config.max_slots_per_codeword))
    return TrialOutcome(int(s), int(f), bool(t))


def run_batch(config: SimConfig, workers: int = 1, keep_slots: bool = False) -> SimReport:
    """Run ``config.trials`` independent trials and summarize them.

    The report depends only on ``config``; ``workers`` changes wall time, not
    results. Set ``keep_slots`` to attach the per-trial slot counts.
    """
    n = int(config.trials)
    slots = np.empty(n, dtype=np.int64)
    states = np.empty(n, dtype=np.int8)
    trunc = np.empty(n, dtype=np.bool_)
    seed = _seed64(config.seed)
    args = _kernel_args(config)
    is_df = config.mode is Mode.DF
    max_slots = int(config.max_slots_per_codeword)

    def work(start):
        stop = min(start + CHUNK, n)
        _batch_kernel(is_df, seed, start, stop, *args, max_slots,
                      slots[start:stop], states[start:stop], trunc[start:stop])

    starts = range(0, n, CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    else:
        for start in starts:
            work(start)

    done = slots[~trunc]
    used = int(done.size)
    if used:
        mean = int(done.sum()) / used
        if used > 1:
            dev = done - mean
            std_error = math.sqrt(float(dev @ dev) / (used - 1) / used)
        else:
            std_error = math.nan
    else:
        mean = std_error = math.nan
    n_states = 3 if config.mode is Mode.AF else 4
    counts = np.bincount(states, minlength=n_states + 1)
    return SimReport(
        mode=config.mode,
        rate=float(config.rate),
        seed=int(config.seed),
        trials=n,
        mean_slots=mean,
        std_error=std_error,
        empirical_goodput=config.rate / mean if used else math.nan,
        trials_used=used,
        truncated_trials=n - used,
        per_state_counts={s: int(counts[s]) for s in range(1, n_states + 1)},
        slot_counts=done if keep_slots else None,
    )
