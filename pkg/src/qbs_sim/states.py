"""Sparse complex-amplitude algebra for two-photon polarization states.

A state is a normalized map (corroborative mode, test mode) -> amplitude,
where a mode is a (spatial path, polarization) pair.  Only the two-photon
sector is represented: every key is exactly one excitation on each side.
"""
from __future__ import annotations

import json
import math
from typing import Callable, Iterable, NamedTuple

H = "H"
V = "V"
POLARIZATIONS = (H, V)

#: normalization tolerance for Sum |amp|^2 == 1
NORM_TOL = 1e-12
#: amplitudes below this magnitude are dropped from the sparse map
PRUNE_TOL = 1e-15


class Mode(NamedTuple):
    path: str
    pol: str


ModePair = tuple[Mode, Mode]


class StateError(ValueError):
    """Raised for degenerate or invalid state constructions."""


class TwoPhotonState:
    """Immutable normalized amplitude map over (corroborative, test) mode pairs."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: dict[ModePair, complex]):
        norm2 = sum(abs(a) ** 2 for a in amplitudes.values())
        if norm2 <= 0.0:
            raise StateError("all-zero amplitude vector is degenerate")
        scale = 1.0 / math.sqrt(norm2)
        amps = {}
        for key, a in amplitudes.items():
            a = complex(a) * scale
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise StateError(f"non-finite amplitude at {key}")
            if abs(a) > PRUNE_TOL:
                amps[key] = a
        self.amplitudes = amps

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.amplitudes.values())

    def __repr__(self):
        terms = ", ".join(
            f"{_key_str(k)}: {a:.4g}" for k, a in sorted(self.amplitudes.items())
        )
        return f"TwoPhotonState({terms})"


class MixedState:
    """Weighted ensemble of pure TwoPhotonStates (classical mixture)."""

    __slots__ = ("components",)

    def __init__(self, components: list[tuple[float, TwoPhotonState]]):
        if not components:
            raise StateError("empty mixture")
        for w, _ in components:
            if w < 0.0:
                raise StateError(f"negative mixture weight {w}")
        total = sum(w for w, _ in components)
        if abs(total - 1.0) > NORM_TOL:
            raise StateError(f"mixture weights sum to {total}, expected 1")
        self.components = list(components)


def make_state(entries: Iterable[tuple[ModePair, complex]]) -> TwoPhotonState:
    """Build a normalized state; duplicate keys are summed before normalizing."""
    amps: dict[ModePair, complex] = {}
    empty = True
    for key, a in entries:
        empty = False
        amps[key] = amps.get(key, 0j) + complex(a)
    if empty:
        raise StateError("no entries given")
    return TwoPhotonState(amps)


def inner_product(s1: TwoPhotonState, s2: TwoPhotonState) -> complex:
    acc = 0j
    a1 = s1.amplitudes
    for key, a in s2.amplitudes.items():
        b = a1.get(key)
        if b is not None:
            acc += b.conjugate() * a
    return acc


def fidelity(s1: TwoPhotonState, s2: TwoPhotonState) -> float:
    """|<s1|s2>|^2 -- insensitive to global phase."""
    return abs(inner_product(s1, s2)) ** 2


def marginal_probability(
    state: TwoPhotonState, predicate: Callable[[Mode, Mode], bool]
) -> float:
    """Sum of |amplitude|^2 over mode pairs satisfying the predicate."""
    return sum(
        abs(a) ** 2 for (cm, tm), a in state.amplitudes.items() if predicate(cm, tm)
    )


def mix(components: list[tuple[float, TwoPhotonState]]) -> MixedState:
    return MixedState(components)


def ensemble_probability(
    m: MixedState, predicate: Callable[[Mode, Mode], bool]
) -> float:
    return sum(w * marginal_probability(s, predicate) for w, s in m.components)


def _key_str(key: ModePair) -> str:
    cm, tm = key
    return f"{cm.path}.{cm.pol}|{tm.path}.{tm.pol}"


def _key_from_str(s: str) -> ModePair:
    c, t = s.split("|")
    cp, cpol = c.rsplit(".", 1)
    tp, tpol = t.rsplit(".", 1)
    return (Mode(cp, cpol), Mode(tp, tpol))


def dump_state(state: TwoPhotonState) -> str:
    """JSON dump: {"cPath.cPol|tPath.tPol": [re, im], ...}."""
    obj = {
        _key_str(k): [a.real, a.imag] for k, a in sorted(state.amplitudes.items())
    }
    return json.dumps(obj, indent=2)


def load_state(text: str) -> TwoPhotonState:
    obj = json.loads(text)
    return make_state(
        ((_key_from_str(k), complex(re, im)) for k, (re, im) in obj.items())
    )
