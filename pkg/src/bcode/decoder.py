"""Bayesian decoder for ensemble outputs under targeted data poisoning.

Generative model, per inference: with probability ``attack_prior`` an attack
is active.  Under an attack, the attacker set is drawn by first drawing its
size from ``count_prior`` and then a uniform subset of users of that size;
every model trained on at least one attacker is forced to the attack target
with probability ``success_rate``, independently per model, and otherwise
predicts like a clean model.  Clean predictions follow the model's confusion
row for the true label.  Targets and true labels are uniform a priori.

Posteriors come from exact enumeration over (attacker set, target, label).
Attacker sets that compromise the same set of models share their likelihood
table, so the enumeration is grouped by compromised-model mask; products
over models are accumulated in log space with max-shift normalization before
exponentiation (plain products over m factors in [0, 1] underflow quickly).
The cost is O(sum_j C(n, j) * m * c^2) over the sizes j in the count prior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .bitmatrix import BitMatrix
from .errors import DegenerateEvidenceError

# Stand-in for log(0) inside masked matrix products: 0 * -inf would be NaN,
# 0 * _LOG_FLOOR is 0, and exp(_LOG_FLOOR - shift) underflows to exactly 0
# for any realistic shift.  Anything below _FLOOR_CUTOFF is restored to -inf.
_LOG_FLOOR = -1.0e30
_FLOOR_CUTOFF = -1.0e29

_PROB_TOL = 1e-9


def _logsumexp(a: np.ndarray, axis: int | None = None):
    """Log of summed exponentials; tolerates -inf entries and all--inf input."""
    amax = np.max(a, axis=axis, keepdims=True)
    shift = np.where(np.isfinite(amax), amax, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - shift), axis=axis))
    out = out + np.squeeze(shift, axis=axis) if axis is not None else out + shift.reshape(())
    if axis is None:
        return float(out)
    return out


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


@dataclass
class DecoderConfig:
    """Everything the decoder needs to know about code, noise and priors.

    ``confusions`` is an (m, c, c) stack, one row-stochastic matrix per
    model; entry (i, j, q) is the probability that clean model i classifies
    class-j data as class q.  ``count_prior`` maps attacker counts to
    probabilities (its keys define which counts are enumerated; they must
    sum to 1 and stay within [0, n]).
    """

    code: BitMatrix
    confusions: np.ndarray
    attack_prior: float
    success_rate: float
    count_prior: dict[int, float]
    num_classes: int

    # Derived enumeration tables, built once and reused across decodes.
    _log_conf: np.ndarray = field(init=False, repr=False)
    _mask_matrix: np.ndarray = field(init=False, repr=False)
    _mask_logw: np.ndarray = field(init=False, repr=False)
    _x_supports: list[tuple[int, ...]] = field(init=False, repr=False)
    _x_counts: np.ndarray = field(init=False, repr=False)
    _x_logw: np.ndarray = field(init=False, repr=False)
    _x_mask_idx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.confusions = np.asarray(self.confusions, dtype=float)
        m, n, c = self.code.m, self.code.n, self.num_classes
        if c < 1:
            raise ValueError("need at least one class")
        if self.confusions.shape != (m, c, c):
            raise ValueError(
                f"confusions must have shape ({m}, {c}, {c}), got {self.confusions.shape}"
            )
        if np.any(self.confusions < -_PROB_TOL) or np.any(self.confusions > 1 + _PROB_TOL):
            raise ValueError("confusion entries must lie in [0, 1]")
        rowsums = self.confusions.sum(axis=2)
        if np.any(np.abs(rowsums - 1.0) > _PROB_TOL):
            raise ValueError("every confusion row must sum to 1")
        if not 0.0 <= self.attack_prior <= 1.0:
            raise ValueError("attack prior must lie in [0, 1]")
        if not 0.0 <= self.success_rate <= 1.0:
            raise ValueError("success rate must lie in [0, 1]")
        if not self.count_prior:
            raise ValueError("count prior must not be empty")
        self.count_prior = {int(k): float(v) for k, v in self.count_prior.items()}
        total = 0.0
        for count, prob in self.count_prior.items():
            if count < 0:
                raise ValueError(f"attacker count {count!r} must be a nonnegative int")
            if count > n:
                raise ValueError(f"attacker count {count} exceeds the {n} users")
            if prob < 0.0:
                raise ValueError("count prior probabilities must be nonnegative")
            total += prob
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"count prior must sum to 1, got {total}")

        with np.errstate(divide="ignore"):
            self._log_conf = np.log(self.confusions)

        cols = self.code.column_masks
        supports: list[tuple[int, ...]] = []
        counts: list[int] = []
        logw: list[float] = []
        mask_idx: list[int] = []
        mask_order: dict[int, int] = {}
        mask_logw_linear: list[float] = []
        for count in sorted(self.count_prior):
            prob = self.count_prior[count]
            if prob <= 0.0:
                continue
            w = prob / math.comb(n, count)
            for combo in combinations(range(n), count):
                mask = 0
                for j in combo:
                    mask |= cols[j]
                idx = mask_order.get(mask)
                if idx is None:
                    idx = len(mask_order)
                    mask_order[mask] = idx
                    mask_logw_linear.append(0.0)
                mask_logw_linear[idx] += w
                supports.append(combo)
                counts.append(count)
                logw.append(_safe_log(w))
                mask_idx.append(idx)
        if not supports:
            raise ValueError("count prior assigns no probability to any count")

        num_masks = len(mask_order)
        mask_matrix = np.zeros((num_masks, m), dtype=float)
        for mask, idx in mask_order.items():
            for i in range(m):
                if (mask >> i) & 1:
                    mask_matrix[idx, i] = 1.0
        self._mask_matrix = mask_matrix
        self._mask_logw = np.array([_safe_log(w) for w in mask_logw_linear])
        self._x_supports = supports
        self._x_counts = np.array(counts, dtype=int)
        self._x_logw = np.array(logw)
        self._x_mask_idx = np.array(mask_idx, dtype=int)

    @property
    def kmax(self) -> int:
        return max(self.count_prior)


@dataclass(frozen=True)
class DecodeResult:
    """All decoder outputs for one ensemble prediction vector.

    ``attacker_posterior`` maps attacker indicator tuples (0/1 per user) to
    probabilities conditioned on an attack being active; it is empty when
    the count prior puts no mass on positive counts or no attacker
    hypothesis has support.  ``decoded_attackers`` is empty unless the
    attack posterior clears the decision threshold.
    """

    attack_posterior: float
    label_posterior: np.ndarray
    decoded_label: int
    attacker_posterior: dict[tuple[int, ...], float]
    decoded_attackers: tuple[int, ...]


@dataclass(frozen=True)
class _Evidence:
    clean_ll: np.ndarray  # (c,)   log prod_i C[i, l, y_i]
    mask_total: np.ndarray  # (B,)   logsumexp over (t, l) per compromised mask
    mask_by_label: np.ndarray  # (B, c) logsumexp over t per compromised mask


def _validate_outputs(outputs: Sequence[int], cfg: DecoderConfig) -> np.ndarray:
    y = np.asarray(outputs, dtype=int)
    if y.shape != (cfg.code.m,):
        raise ValueError(f"expected {cfg.code.m} outputs, got shape {y.shape}")
    if np.any(y < 0) or np.any(y >= cfg.num_classes):
        raise ValueError(f"outputs must be class indices in [0, {cfg.num_classes})")
    return y


def _evidence(y: np.ndarray, cfg: DecoderConfig) -> _Evidence:
    m, c = cfg.code.m, cfg.num_classes
    rows = np.arange(m)
    conf_y = cfg.confusions[rows, :, y]  # (m, c): [i, l] = C[i, l, y_i]
    log_conf_y = cfg._log_conf[rows, :, y]
    clean_ll = log_conf_y.sum(axis=0)

    s = cfg.success_rate
    base = (1.0 - s) * conf_y
    with np.errstate(divide="ignore"):
        log_miss = np.log(base)  # compromised model, target != y_i
        log_hit = np.log(s + base)  # compromised model, target == y_i
    target_is_output = y[:, None] == np.arange(c)[None, :]  # (m, c_t)
    factors = np.where(
        target_is_output[:, :, None], log_hit[:, None, :], log_miss[:, None, :]
    )  # (m, c_t, c_l)

    flat = np.where(np.isneginf(factors), _LOG_FLOOR, factors).reshape(m, c * c)
    clean_flat = np.where(np.isneginf(log_conf_y), _LOG_FLOOR, log_conf_y)
    mb = cfg._mask_matrix  # (B, m)
    compromised = (mb @ flat).reshape(-1, c, c)
    clean_part = (1.0 - mb) @ clean_flat  # (B, c_l)
    ll = compromised + clean_part[:, None, :]
    ll = np.where(ll <= _FLOOR_CUTOFF, -np.inf, ll)

    mask_total = _logsumexp(ll.reshape(ll.shape[0], -1), axis=1)
    mask_by_label = _logsumexp(ll, axis=1)
    return _Evidence(clean_ll, mask_total, mask_by_label)


def joint_weight(
    attackers: Sequence[int],
    outputs: Sequence[int],
    target: int,
    label: int,
    cfg: DecoderConfig,
) -> float:
    """Unnormalized joint term for one (attacker set, outputs, target, label).

    Equals the count prior of the attacker count, split uniformly over the
    C(n, count) supports, times the product over models of the per-model
    output probability (forced-target mixture for compromised models, the
    confusion entry otherwise).
    """
    y = _validate_outputs(outputs, cfg)
    x = tuple(attackers)
    if len(x) != cfg.code.n or any(b not in (0, 1) for b in x):
        raise ValueError(f"attacker indicator must be 0/1 of length {cfg.code.n}")
    if not (0 <= target < cfg.num_classes and 0 <= label < cfg.num_classes):
        raise ValueError("target and label must be valid class indices")
    count = sum(x)
    if count not in cfg.count_prior:
        raise ValueError(f"attacker count {count} is outside the count prior support")
    weight = cfg.count_prior[count] / math.comb(cfg.code.n, count)
    cols = cfg.code.column_masks
    mask = 0
    for j, bit in enumerate(x):
        if bit:
            mask |= cols[j]
    s = cfg.success_rate
    prod = 1.0
    for i in range(cfg.code.m):
        clean = cfg.confusions[i, label, y[i]]
        if (mask >> i) & 1:
            prod *= s * (1.0 if target == y[i] else 0.0) + (1.0 - s) * clean
        else:
            prod *= clean
    return weight * prod


def attack_posterior(outputs: Sequence[int], cfg: DecoderConfig) -> float:
    """Posterior probability that an attack is active given the outputs."""
    y = _validate_outputs(outputs, cfg)
    ev = _evidence(y, cfg)
    return _attack_posterior_from(ev, cfg)


def _attack_posterior_from(ev: _Evidence, cfg: DecoderConfig) -> float:
    log_attack = _safe_log(cfg.attack_prior) + _logsumexp(cfg._mask_logw + ev.mask_total)
    log_clean = (
        _safe_log(1.0 - cfg.attack_prior)
        + math.log(cfg.num_classes)
        + _logsumexp(ev.clean_ll)
    )
    denom = np.logaddexp(log_attack, log_clean)
    if denom == -math.inf:
        raise DegenerateEvidenceError(
            "zero probability under every hypothesis",
            {"attack_prior": cfg.attack_prior, "success_rate": cfg.success_rate},
        )
    return float(math.exp(log_attack - denom))


def label_posterior(outputs: Sequence[int], cfg: DecoderConfig) -> np.ndarray:
    """Posterior over true labels, marginalizing attacks, attackers, targets."""
    y = _validate_outputs(outputs, cfg)
    ev = _evidence(y, cfg)
    return _label_posterior_from(ev, cfg)


def _label_posterior_from(ev: _Evidence, cfg: DecoderConfig) -> np.ndarray:
    attack_by_label = _logsumexp(
        cfg._mask_logw[:, None] + ev.mask_by_label, axis=0
    )  # (c,)
    log_scores = np.logaddexp(
        _safe_log(cfg.attack_prior) + attack_by_label,
        _safe_log(1.0 - cfg.attack_prior) + math.log(cfg.num_classes) + ev.clean_ll,
    )
    norm = _logsumexp(log_scores)
    if norm == -math.inf:
        raise DegenerateEvidenceError("all label scores are zero")
    return np.exp(log_scores - norm)


def attacker_posterior(
    outputs: Sequence[int], cfg: DecoderConfig
) -> dict[tuple[int, ...], float]:
    """Posterior over attacker indicator vectors, conditioned on an attack.

    Requires the count prior to include at least one positive count.
    """
    if cfg.kmax < 1:
        raise ValueError("count prior has no positive attacker count")
    y = _validate_outputs(outputs, cfg)
    ev = _evidence(y, cfg)
    result = _attacker_posterior_from(ev, cfg)
    if not result:
        raise DegenerateEvidenceError("no attacker hypothesis has support")
    return result


def _attacker_posterior_from(
    ev: _Evidence, cfg: DecoderConfig
) -> dict[tuple[int, ...], float]:
    sel = cfg._x_counts >= 1
    if not np.any(sel):
        return {}
    scores = cfg._x_logw[sel] + ev.mask_total[cfg._x_mask_idx[sel]]
    norm = _logsumexp(scores)
    if norm == -math.inf:
        return {}
    probs = np.exp(scores - norm)
    n = cfg.code.n
    out: dict[tuple[int, ...], float] = {}
    supports = [s for s, keep in zip(cfg._x_supports, sel) if keep]
    for support, prob in zip(supports, probs):
        indicator = [0] * n
        for j in support:
            indicator[j] = 1
        out[tuple(indicator)] = float(prob)
    return out


def decode(
    outputs: Sequence[int],
    cfg: DecoderConfig,
    attack_threshold: float = 0.5,
) -> DecodeResult:
    """Full decode: one enumeration pass feeding all three posteriors.

    The decoded label is the argmax of the label posterior (lowest index on
    ties).  Attackers are reported only when the attack posterior exceeds
    ``attack_threshold``; the reported set is the support of the most
    probable attacker hypothesis.
    """
    y = _validate_outputs(outputs, cfg)
    ev = _evidence(y, cfg)
    attack = _attack_posterior_from(ev, cfg)
    labels = _label_posterior_from(ev, cfg)
    decoded_label = int(np.argmax(labels))

    attackers: dict[tuple[int, ...], float] = _attacker_posterior_from(ev, cfg)
    decoded_attackers: tuple[int, ...] = ()
    if attack > attack_threshold and attackers:
        sel = cfg._x_counts >= 1
        scores = cfg._x_logw[sel] + ev.mask_total[cfg._x_mask_idx[sel]]
        best = int(np.argmax(scores))
        supports = [s for s, keep in zip(cfg._x_supports, sel) if keep]
        decoded_attackers = tuple(supports[best])
    return DecodeResult(attack, labels, decoded_label, attackers, decoded_attackers)


def majority_vote(outputs: Sequence[int], num_classes: int) -> int:
    """Modal class of the outputs; ties break toward the lowest index."""
    y = np.asarray(outputs, dtype=int)
    if y.size == 0:
        raise ValueError("need at least one output")
    if np.any(y < 0) or np.any(y >= num_classes):
        raise ValueError(f"outputs must be class indices in [0, {num_classes})")
    return int(np.argmax(np.bincount(y, minlength=num_classes)))


def estimate_confusion(
    pairs: Sequence[tuple[int, int]],
    num_classes: int,
    smoothing: float = 1.0,
) -> np.ndarray:
    """Row-stochastic confusion matrix from (true, predicted) label pairs.

    Additive smoothing keeps rows valid for classes with no samples; with
    zero smoothing an empty row falls back to uniform.
    """
    if num_classes < 1:
        raise ValueError("need at least one class")
    if smoothing < 0:
        raise ValueError("smoothing must be nonnegative")
    counts = np.zeros((num_classes, num_classes), dtype=float)
    for true_label, predicted in pairs:
        if not (0 <= true_label < num_classes and 0 <= predicted < num_classes):
            raise ValueError("labels must lie in [0, num_classes)")
        counts[true_label, predicted] += 1.0
    counts += smoothing
    totals = counts.sum(axis=1, keepdims=True)
    uniform = np.full(num_classes, 1.0 / num_classes)
    out = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), uniform)
    return out


def identity_confusions(num_models: int, num_classes: int) -> np.ndarray:
    """Stack of exact identity confusion matrices (perfectly clean models)."""
    return np.broadcast_to(
        np.eye(num_classes), (num_models, num_classes, num_classes)
    ).copy()


def uniform_count_prior(lo: int, hi: int) -> dict[int, float]:
    """Uniform attacker-count distribution over lo..hi inclusive."""
    if lo < 0 or hi < lo:
        raise ValueError("need 0 <= lo <= hi")
    p = 1.0 / (hi - lo + 1)
    return {count: p for count in range(lo, hi + 1)}
