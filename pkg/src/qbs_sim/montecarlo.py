"""Finite-count coincidence sampling on top of the analytic probabilities.

Each shot is one photon pair / coincidence window: the ideal joint outcome
(corroborative detector, terminal path) is drawn from the evolved state, each
signal click then survives with the detector efficiency, and every detector
can fire spuriously with the dark probability.  Windows are kept only when
exactly one corroborative and exactly one test detector clicked; everything
else is counted as a discard, mirroring hardware XOR gating.

Shots are generated in fixed-size chunks with per-chunk derived RNG streams,
so the totals are bit-identical for any worker count under a fixed seed.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from . import experiment as qdc
from .states import H, V, MixedState

CHUNK_SIZE = 32768

#: detector order used for the click matrix
DETECTORS = ("D_H", "D_V", "D_a", "D_a'", "D_b", "D_b'")
_TEST_DETECTORS = DETECTORS[2:]
#: terminal-path order matching the joint outcome encoding
_PATH_TO_DET = tuple(
    DETECTORS.index(qdc.PATH_DETECTORS[p]) for p in qdc.TERMINAL_PATHS
)
_GROUP_OF_DET = {
    d: (qdc.GROUP_A if qdc.DETECTOR_PATHS[d] in qdc.GROUP_PATHS[qdc.GROUP_A]
        else qdc.GROUP_B)
    for d in _TEST_DETECTORS
}

CATEGORIES = tuple(
    (corr, grp) for corr in qdc.CORROBORATIVE_DETECTORS for grp in qdc.GROUPS
)


@dataclass(frozen=True)
class DetectionModel:
    efficiency: float = 0.25        # per-detector click survival probability
    dark_probability: float = 4.8e-4  # spurious click probability per window
    seed: int = 0
    window_ns: float = 1.0          # coincidence window, metadata only

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency {self.efficiency} outside [0, 1]")
        if not 0.0 <= self.dark_probability <= 1.0:
            raise ValueError(f"dark probability outside [0, 1]")


@dataclass
class CountTable:
    counts: dict = field(default_factory=lambda: {c: 0 for c in CATEGORIES})
    valid: int = 0
    discarded_zero: int = 0   # windows without a two-fold coincidence
    discarded_multi: int = 0  # windows violating the XOR condition
    shots: int = 0

    def merge(self, other: "CountTable") -> "CountTable":
        for c in CATEGORIES:
            self.counts[c] += other.counts[c]
        self.valid += other.valid
        self.discarded_zero += other.discarded_zero
        self.discarded_multi += other.discarded_multi
        self.shots += other.shots
        return self

    def to_json(self, settings=None, model=None, indent=2) -> str:
        obj = {
            "counts": {f"{c}|{g}": n for (c, g), n in self.counts.items()},
            "valid": self.valid,
            "discarded_zero": self.discarded_zero,
            "discarded_multi": self.discarded_multi,
            "shots": self.shots,
        }
        if settings is not None:
            obj["settings"] = {
                "theta": settings.theta,
                "alpha_deg": settings.alpha_deg,
                "basis": settings.basis,
                "input": settings.input,
            }
        if model is not None:
            obj["model"] = {
                "efficiency": model.efficiency,
                "dark_probability": model.dark_probability,
                "window_ns": model.window_ns,
            }
            obj["seed"] = model.seed
        return json.dumps(obj, indent=indent, sort_keys=True)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int
    defined: bool = True


def joint_outcome_probabilities(settings: qdc.ExperimentSettings) -> np.ndarray:
    """Length-8 vector over (corroborative pol x terminal path) outcomes."""
    state = qdc.build_qdc_state(settings)
    if isinstance(state, MixedState):
        components = state.components
    else:
        components = [(1.0, state)]
    probs = np.zeros(8)
    for w, s in components:
        for (cm, tm), a in s.amplitudes.items():
            ci = 0 if cm.pol == H else 1
            ti = qdc.TERMINAL_PATHS.index(tm.path)
            probs[ci * 4 + ti] += w * abs(a) ** 2
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise RuntimeError(f"joint outcome probabilities sum to {total}")
    return probs / total


def _sample_chunk(probs: np.ndarray, model: DetectionModel, n: int,
                  rng: np.random.Generator) -> CountTable:
    outcome = rng.choice(8, size=n, p=probs)
    keep_c = rng.random(n) < model.efficiency
    keep_t = rng.random(n) < model.efficiency
    clicks = rng.random((n, 6)) < model.dark_probability

    c_det = outcome // 4          # 0 = D_H, 1 = D_V
    t_det = np.take(_PATH_TO_DET, outcome % 4)
    rows = np.arange(n)
    # signal clicks survive with the detector efficiency
    clicks[rows[keep_c], c_det[keep_c]] = True
    clicks[rows[keep_t], t_det[keep_t]] = True

    n_corr = clicks[:, :2].sum(axis=1)
    n_test = clicks[:, 2:].sum(axis=1)
    valid = (n_corr == 1) & (n_test == 1)
    zero = (n_corr == 0) | (n_test == 0)

    table = CountTable(shots=n)
    table.valid = int(valid.sum())
    table.discarded_zero = int(zero.sum())
    table.discarded_multi = n - table.valid - table.discarded_zero

    v_corr = clicks[valid, 1]                       # False -> D_H
    v_test = clicks[valid, 2:].argmax(axis=1) + 2   # index of the one click
    for (corr, grp) in CATEGORIES:
        corr_flag = corr == "D_V"
        group_mask = np.array(
            [_GROUP_OF_DET[DETECTORS[i]] == grp for i in range(2, 6)]
        )
        sel = (v_corr == corr_flag) & group_mask[v_test - 2]
        table.counts[(corr, grp)] = int(sel.sum())
    return table


def sample_shot(settings: qdc.ExperimentSettings, model: DetectionModel,
                rng: np.random.Generator) -> frozenset[str]:
    """Single coincidence window; returns the set of detectors that clicked."""
    probs = joint_outcome_probabilities(settings)
    outcome = int(rng.choice(8, p=probs))
    clicked = set()
    if rng.random() < model.efficiency:
        clicked.add(DETECTORS[outcome // 4])
    if rng.random() < model.efficiency:
        clicked.add(DETECTORS[_PATH_TO_DET[outcome % 4]])
    for det in DETECTORS:
        if rng.random() < model.dark_probability:
            clicked.add(det)
    return frozenset(clicked)


def run(settings: qdc.ExperimentSettings, model: DetectionModel, n_shots: int,
        workers: int | None = None, stream: int = 0) -> CountTable:
    """Accumulate a CountTable over ``n_shots`` windows.

    Chunk i always uses the generator derived from (seed, stream, i), so the
    result does not depend on ``workers``; distinct ``stream`` values give
    independent draws under the same seed (used for multi-scan commands).
    ``workers`` defaults to the QBS_SIM_THREADS environment variable, else 1.
    """
    if n_shots <= 0:
        raise ValueError("n_shots must be positive")
    if workers is None:
        workers = int(os.environ.get("QBS_SIM_THREADS", "1"))
    workers = max(1, workers)

    probs = joint_outcome_probabilities(settings)
    sizes = [CHUNK_SIZE] * (n_shots // CHUNK_SIZE)
    if n_shots % CHUNK_SIZE:
        sizes.append(n_shots % CHUNK_SIZE)

    def one(args):
        i, size = args
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=model.seed, spawn_key=(stream, i))
        )
        return _sample_chunk(probs, model, size, rng)

    total = CountTable()
    jobs = list(enumerate(sizes))
    if workers == 1 or len(jobs) == 1:
        results = map(one, jobs)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, jobs))
    for t in results:
        total.merge(t)
    return total


def estimate(table: CountTable, corroborative: str = "D_H",
             group: str = qdc.GROUP_A) -> Estimate:
    """Intensity-correlation estimate N(corr, group) / N(corr, either group)
    with a binomial standard error."""
    n_a = table.counts[(corroborative, group)]
    n_b = table.counts[(corroborative, qdc.GROUP_B if group == qdc.GROUP_A
                        else qdc.GROUP_A)]
    n = n_a + n_b
    if n == 0:
        return Estimate(float("nan"), float("nan"), 0, defined=False)
    p = n_a / n
    return Estimate(p, sqrt(p * (1.0 - p) / n), n)
