"""Monte-Carlo evaluation of codes against synthetic model ensembles.

Instead of training real models, each ensemble member gets a synthetic
confusion matrix derived from how much data it sees per class: per-user
class distributions are drawn from a symmetric Dirichlet (small
concentration = strongly non-IID users), and a model's per-class accuracy
grows with its per-class training mass through a saturating curve.  Ensemble
outputs are then sampled from exactly the generative model the decoder
assumes, so decoder performance isolates the code's contribution.

All sampling is deterministic given seeds; each trial derives its own
stream from (seed, trial index), so results do not depend on execution
order and parallel sweeps reproduce serial ones bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bitmatrix import BitMatrix
from .decoder import DecoderConfig, decode, majority_vote
from .errors import DegenerateEvidenceError


def dirichlet_profiles(
    alpha: float, n_users: int, num_classes: int, seed: int
) -> np.ndarray:
    """Per-user class-mass profiles, one row per user, each summing to 1.

    Rows are i.i.d. symmetric Dirichlet(alpha) draws, sampled as normalized
    independent Gamma(alpha, 1) variables (fixing the sampling identity pins
    the stream for reproducibility).  Small alpha concentrates each user on
    few classes.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n_users < 1 or num_classes < 1:
        raise ValueError("need at least one user and one class")
    rng = np.random.default_rng(seed)
    raw = rng.gamma(alpha, 1.0, size=(n_users, num_classes))
    totals = raw.sum(axis=1, keepdims=True)
    uniform = np.full(num_classes, 1.0 / num_classes)
    return np.where(totals > 0, raw / np.where(totals > 0, totals, 1.0), uniform)


def uniform_profile(n_users: int, num_classes: int) -> np.ndarray:
    """Exactly IID profile: every user holds 1/c mass per class."""
    if n_users < 1 or num_classes < 1:
        raise ValueError("need at least one user and one class")
    return np.full((n_users, num_classes), 1.0 / num_classes)


def synth_confusion(
    code: BitMatrix,
    profile: np.ndarray,
    a_max: float = 0.99,
    kappa: float = 0.05,
) -> np.ndarray:
    """Synthetic confusion matrices standing in for trained models.

    Model i sees class-j mass d = sum of profile rows of its users; its
    diagonal accuracy is a_max * d / (d + kappa) (more data, better
    accuracy, saturating at a_max), with the remaining mass spread uniformly
    over the other classes.  A class the model never sees is classified
    uniformly among the rest.
    """
    profile = np.asarray(profile, dtype=float)
    if profile.ndim != 2 or profile.shape[0] != code.n:
        raise ValueError(f"profile must have {code.n} rows (one per user)")
    if np.any(profile < 0):
        raise ValueError("profile masses must be nonnegative")
    if not 0.0 < a_max <= 1.0:
        raise ValueError("a_max must lie in (0, 1]")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    c = profile.shape[1]
    mass = code.to_array().astype(float) @ profile  # (m, c)
    acc = a_max * mass / (mass + kappa)
    out = np.empty((code.m, c, c))
    if c == 1:
        out[:] = 1.0
        return out
    off = (1.0 - acc) / (c - 1)  # (m, c)
    out[:] = off[:, :, None]
    rows = np.arange(c)
    out[:, rows, rows] = acc
    return out


@dataclass(frozen=True)
class Scenario:
    """Ground truth for one simulated inference.

    ``attackers`` is a 0/1 indicator over users.  When anyone attacks, the
    target must differ from the true label (a target equal to the truth
    would make the attack a no-op and silently inflate accuracy).
    """

    attackers: tuple[int, ...]
    target: int
    true_label: int

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.attackers):
            raise ValueError("attacker indicator must be 0/1")
        if self.target < 0 or self.true_label < 0:
            raise ValueError("target and true label must be class indices")
        if any(self.attackers) and self.target == self.true_label:
            raise ValueError("an active attack needs target != true label")

    @classmethod
    def from_support(
        cls, n_users: int, support: Sequence[int], target: int, true_label: int
    ) -> "Scenario":
        flags = [0] * n_users
        for j in support:
            flags[j] = 1
        return cls(tuple(flags), target, true_label)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, b in enumerate(self.attackers) if b)


def _sample_outputs_rng(
    code: BitMatrix,
    scenario: Scenario,
    confusions: np.ndarray,
    success_rate: float,
    rng: np.random.Generator,
) -> np.ndarray:
    cols = code.column_masks
    mask = 0
    for j, bit in enumerate(scenario.attackers):
        if bit:
            mask |= cols[j]
    c = confusions.shape[1]
    y = np.empty(code.m, dtype=int)
    for i in range(code.m):
        if (mask >> i) & 1 and rng.random() < success_rate:
            y[i] = scenario.target
        else:
            y[i] = rng.choice(c, p=confusions[i, scenario.true_label])
    return y


def sample_outputs(
    code: BitMatrix,
    scenario: Scenario,
    confusions: np.ndarray,
    success_rate: float,
    seed: int,
) -> np.ndarray:
    """Draw one ensemble output vector from the decoder's generative model.

    A model is compromised iff it trains on any attacker; a compromised
    model emits the target with probability ``success_rate`` and otherwise
    (like every clean model) draws from its confusion row for the true
    label.  Models are independent; deterministic given the seed.
    """
    confusions = np.asarray(confusions, dtype=float)
    if len(scenario.attackers) != code.n:
        raise ValueError(f"scenario covers {len(scenario.attackers)} users, code has {code.n}")
    if confusions.shape[0] != code.m:
        raise ValueError(f"need one confusion matrix per model ({code.m})")
    if not 0.0 <= success_rate <= 1.0:
        raise ValueError("success rate must lie in [0, 1]")
    return _sample_outputs_rng(
        code, scenario, confusions, success_rate, np.random.default_rng(seed)
    )


@dataclass(frozen=True)
class CountStats:
    """Per-attacker-count slice of an evaluation report."""

    trials: int
    decode_accuracy: float
    majority_accuracy: float
    tp_mean: float
    tp_sd: float
    fp_mean: float
    fp_sd: float
    degenerate: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "decodeAccuracy": self.decode_accuracy,
            "majorityAccuracy": self.majority_accuracy,
            "tpMean": self.tp_mean,
            "tpSd": self.tp_sd,
            "fpMean": self.fp_mean,
            "fpSd": self.fp_sd,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class EvaluationReport:
    """Aggregate statistics over Monte-Carlo trials.

    True/false positives count decoded attackers inside/outside the planted
    set; means and standard deviations are per-trial population statistics.
    ``clean_accuracy`` covers the zero-attacker trials only (None when there
    are none); degenerate-evidence decodes are counted, scored as failures,
    and never fatal.
    """

    trials: int
    decode_accuracy: float
    majority_accuracy: float
    clean_accuracy: float | None
    tp_mean: float
    tp_sd: float
    fp_mean: float
    fp_sd: float
    degenerate: int
    per_count: dict[int, CountStats] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "decodeAccuracy": self.decode_accuracy,
            "majorityAccuracy": self.majority_accuracy,
            "cleanAccuracy": self.clean_accuracy,
            "tpMean": self.tp_mean,
            "tpSd": self.tp_sd,
            "fpMean": self.fp_mean,
            "fpSd": self.fp_sd,
            "degenerate": self.degenerate,
            "perAttackerCount": {
                str(count): stats.to_dict() for count, stats in sorted(self.per_count.items())
            },
        }


def _population_sd(values: np.ndarray) -> float:
    return float(np.std(values)) if values.size else 0.0


def run_trials(
    code: BitMatrix,
    cfg: DecoderConfig,
    attacker_counts: Sequence[int],
    trials: int,
    seed: int,
    attack_threshold: float = 0.5,
) -> EvaluationReport:
    """Sample scenarios, decode them, and aggregate accuracy / tracking stats.

    Per trial: the attacker count is drawn uniformly from
    ``attacker_counts``, the support uniformly among subsets of that size,
    the true label uniformly, and the target uniformly among other classes;
    outputs are sampled from the generative model and decoded.  Each trial
    uses the stream derived from (seed, trial index).
    """
    if code.m != cfg.code.m or code.n != cfg.code.n or code.rows != cfg.code.rows:
        raise ValueError("decoder config was built for a different code")
    if trials < 1:
        raise ValueError("need at least one trial")
    counts = [int(c) for c in attacker_counts]
    if not counts:
        raise ValueError("need at least one attacker count")
    if any(c < 0 or c > code.n for c in counts):
        raise ValueError("attacker counts must lie in [0, n]")
    if any(c not in cfg.count_prior for c in counts):
        raise ValueError("attacker counts must be inside the decoder count prior")
    c = cfg.num_classes
    if c < 2:
        raise ValueError("attack simulation needs at least two classes")

    n = code.n
    count_arr = np.empty(trials, dtype=int)
    decode_ok = np.zeros(trials, dtype=bool)
    majority_ok = np.zeros(trials, dtype=bool)
    tp = np.zeros(trials)
    fp = np.zeros(trials)
    degenerate = np.zeros(trials, dtype=bool)

    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        count = counts[int(rng.integers(len(counts)))]
        support = sorted(int(j) for j in rng.choice(n, size=count, replace=False))
        label = int(rng.integers(c))
        target = int(rng.integers(c - 1))
        if target >= label:
            target += 1
        scenario = Scenario.from_support(n, support, target, label)
        y = _sample_outputs_rng(code, scenario, cfg.confusions, cfg.success_rate, rng)

        count_arr[t] = count
        majority_ok[t] = majority_vote(y, c) == label
        try:
            result = decode(y, cfg, attack_threshold)
        except DegenerateEvidenceError:
            degenerate[t] = True
            fp[t] = 0.0
            continue
        decode_ok[t] = result.decoded_label == label
        found = set(result.decoded_attackers)
        tp[t] = len(found & set(support))
        fp[t] = len(found - set(support))

    clean = count_arr == 0
    per_count: dict[int, CountStats] = {}
    for count in sorted(set(counts)):
        sel = count_arr == count
        if not np.any(sel):
            continue
        per_count[count] = CountStats(
            trials=int(sel.sum()),
            decode_accuracy=float(decode_ok[sel].mean()),
            majority_accuracy=float(majority_ok[sel].mean()),
            tp_mean=float(tp[sel].mean()),
            tp_sd=_population_sd(tp[sel]),
            fp_mean=float(fp[sel].mean()),
            fp_sd=_population_sd(fp[sel]),
            degenerate=int(degenerate[sel].sum()),
        )
    return EvaluationReport(
        trials=trials,
        decode_accuracy=float(decode_ok.mean()),
        majority_accuracy=float(majority_ok.mean()),
        clean_accuracy=float(decode_ok[clean].mean()) if np.any(clean) else None,
        tp_mean=float(tp.mean()),
        tp_sd=_population_sd(tp),
        fp_mean=float(fp.mean()),
        fp_sd=_population_sd(fp),
        degenerate=int(degenerate.sum()),
        per_count=per_count,
    )


@dataclass(frozen=True)
class SweepPoint:
    """One attacker count evaluated over repeated runs.

    Means are averages of per-run means; standard deviations are population
    deviations across the run means (run-to-run variability).
    """

    attacker_count: int
    runs: int
    trials_per_run: int
    decode_acc_mean: float
    decode_acc_sd: float
    majority_acc_mean: float
    majority_acc_sd: float
    tp_mean: float
    tp_sd: float
    fp_mean: float
    fp_sd: float
    degenerate: int

    def to_dict(self) -> dict:
        return {
            "attackerCount": self.attacker_count,
            "runs": self.runs,
            "trialsPerRun": self.trials_per_run,
            "decodeAccuracy": {"mean": self.decode_acc_mean, "sd": self.decode_acc_sd},
            "majorityAccuracy": {"mean": self.majority_acc_mean, "sd": self.majority_acc_sd},
            "tp": {"mean": self.tp_mean, "sd": self.tp_sd},
            "fp": {"mean": self.fp_mean, "sd": self.fp_sd},
            "degenerate": self.degenerate,
        }


def _sweep_task(args) -> EvaluationReport:
    code, cfg, count, trials, run_seed, attack_threshold = args
    return run_trials(code, cfg, [count], trials, run_seed, attack_threshold)


def sweep(
    code: BitMatrix,
    cfg: DecoderConfig,
    attacker_counts: Sequence[int],
    trials: int,
    runs: int,
    seed: int,
    workers: int = 1,
    attack_threshold: float = 0.5,
) -> list[SweepPoint]:
    """Evaluate each attacker count over ``runs`` repeated runs.

    Run seeds derive deterministically from ``seed``; tasks are independent
    and may execute in a process pool (``workers`` > 1) without changing any
    reported number.
    """
    if runs < 1:
        raise ValueError("need at least one run")
    counts = [int(c) for c in attacker_counts]
    rng = np.random.default_rng(seed)
    run_seeds = rng.integers(0, 2**63, size=(len(counts), runs))
    tasks = [
        (code, cfg, count, trials, int(run_seeds[ci, run]), attack_threshold)
        for ci, count in enumerate(counts)
        for run in range(runs)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_sweep_task, tasks))
    else:
        reports = [_sweep_task(t) for t in tasks]

    points = []
    for ci, count in enumerate(counts):
        chunk = reports[ci * runs : (ci + 1) * runs]
        dec = np.array([r.decode_accuracy for r in chunk])
        maj = np.array([r.majority_accuracy for r in chunk])
        tpm = np.array([r.tp_mean for r in chunk])
        fpm = np.array([r.fp_mean for r in chunk])
        points.append(
            SweepPoint(
                attacker_count=count,
                runs=runs,
                trials_per_run=trials,
                decode_acc_mean=float(dec.mean()),
                decode_acc_sd=_population_sd(dec),
                majority_acc_mean=float(maj.mean()),
                majority_acc_sd=_population_sd(maj),
                tp_mean=float(tpm.mean()),
                tp_sd=_population_sd(tpm),
                fp_mean=float(fpm.mean()),
                fp_sd=_population_sd(fpm),
                degenerate=sum(r.degenerate for r in chunk),
            )
        )
    return points
