"""Single-photon mode-space unitaries and their application to two-photon states.

Conventions (fixed so that the interferometer reproduces the textbook
amplitudes exactly, see tests):
  * all ordinary beam-splitters put a factor i on reflection;
  * a rotated polarizing beam-splitter transmits the cos*H - sin*V component
    and reflects the sin*H + cos*V component, both without extra phase;
  * the bulk polarizing beam-splitters used inside the composite
    polarization-dependent splitter reflect without extra phase.
"""
from __future__ import annotations

import cmath
import math
from typing import Iterable

import numpy as np

from .states import H, V, Mode, MixedState, TwoPhotonState

UNITARITY_TOL = 1e-12

SIDE_TEST = "test"
SIDE_CORROBORATIVE = "corroborative"


class ElementError(ValueError):
    """Raised for invalid element construction or application."""


class OpticalElement:
    """Sparse linear map on one photon's mode space.

    ``columns`` maps each declared input mode to its output amplitudes.
    Modes not declared pass through unchanged, except that a declared input
    path with a missing polarization is treated as a configuration error.
    """

    __slots__ = ("name", "side", "columns", "input_paths", "output_paths")

    def __init__(self, name: str, side: str, columns: dict[Mode, dict[Mode, complex]]):
        if side not in (SIDE_TEST, SIDE_CORROBORATIVE):
            raise ElementError(f"unknown side {side!r}")
        self.name = name
        self.side = side
        self.columns = {
            m: {o: complex(a) for o, a in col.items() if a != 0}
            for m, col in columns.items()
        }
        self.input_paths = {m.path for m in columns}
        self.output_paths = {o.path for col in columns.values() for o in col}
        dev = check_unitary(self)
        if dev > UNITARITY_TOL:
            raise ElementError(f"{name}: not unitary, max deviation {dev:.3g}")

    def map_mode(self, mode: Mode) -> dict[Mode, complex]:
        col = self.columns.get(mode)
        if col is not None:
            return col
        if mode.path in self.input_paths:
            raise ElementError(
                f"{self.name}: mode {mode} on a declared input path has no column"
            )
        return {mode: 1.0 + 0j}


class Circuit:
    """Ordered sequence of optical elements."""

    def __init__(self, elements: Iterable[OpticalElement]):
        self.elements = list(elements)

    def __iter__(self):
        return iter(self.elements)


def check_unitary(element: OpticalElement) -> float:
    """Return max |U^dag U - I| over the element's declared input space.

    For elements whose output space is larger than the input space this is
    an isometry check, which is the invariant ``apply`` relies on.
    """
    inputs = sorted(element.columns)
    outputs = sorted({o for col in element.columns.values() for o in col})
    if not inputs:
        return 0.0
    u = np.zeros((len(outputs), len(inputs)), dtype=complex)
    out_index = {m: i for i, m in enumerate(outputs)}
    for j, m in enumerate(inputs):
        for o, a in element.columns[m].items():
            u[out_index[o], j] = a
    dev = u.conj().T @ u - np.eye(len(inputs))
    return float(np.abs(dev).max())


def apply(element: OpticalElement, state: TwoPhotonState) -> TwoPhotonState:
    """Apply a one-sided element linearly to a two-photon state."""
    acting_test = element.side == SIDE_TEST
    out: dict = {}
    for (cm, tm), amp in state.amplitudes.items():
        col = element.map_mode(tm if acting_test else cm)
        for mode, a in col.items():
            key = (cm, mode) if acting_test else (mode, tm)
            out[key] = out.get(key, 0j) + amp * a
    return TwoPhotonState(out)


def apply_all(
    elements: Iterable[OpticalElement], state: TwoPhotonState
) -> TwoPhotonState:
    for el in elements:
        state = apply(el, state)
    return state


def apply_ensemble(elements: Iterable[OpticalElement], mixed: MixedState) -> MixedState:
    els = list(elements)
    return MixedState([(w, apply_all(els, s)) for w, s in mixed.components])


def _require_distinct(*paths: str):
    if len(set(paths)) != len(paths):
        raise ElementError(f"repeated path labels {paths}")


def beam_splitter_50_50(
    in1: str,
    in2: str,
    out1: str,
    out2: str,
    side: str = SIDE_TEST,
    reflection_phase: complex = 1j,
) -> OpticalElement:
    """Polarization-independent 50/50 splitter, phase ``reflection_phase`` on
    the cross port.  ``reflection_phase`` must be unimodular; it exists as a
    hook for deliberately breaking the convention in self-checks."""
    _require_distinct(in1, in2)
    _require_distinct(out1, out2)
    r = complex(reflection_phase)
    if abs(abs(r) - 1.0) > 1e-12:
        raise ElementError("reflection phase must be unimodular")
    t = 1.0 / math.sqrt(2.0)
    cols = {}
    for pol in (H, V):
        cols[Mode(in1, pol)] = {Mode(out1, pol): t, Mode(out2, pol): r * t}
        cols[Mode(in2, pol)] = {Mode(out2, pol): t, Mode(out1, pol): r * t}
    return OpticalElement(f"BS({in1},{in2}->{out1},{out2})", side, cols)


def phase_shifter(path: str, theta: float, side: str = SIDE_TEST) -> OpticalElement:
    """Multiply both polarizations on ``path`` by exp(i*theta)."""
    ph = cmath.exp(1j * theta)
    cols = {Mode(path, pol): {Mode(path, pol): ph} for pol in (H, V)}
    return OpticalElement(f"phase({path},{theta:.6g})", side, cols)


def pdbs(
    in_a: str,
    in_b: str,
    out_a: str,
    out_b: str,
    side: str = SIDE_TEST,
    reflection_phase: complex = 1j,
) -> OpticalElement:
    """Polarization-dependent splitter: H fully transmitted, V split 50/50."""
    _require_distinct(in_a, in_b)
    _require_distinct(out_a, out_b)
    r = complex(reflection_phase)
    t = 1.0 / math.sqrt(2.0)
    cols = {
        Mode(in_a, H): {Mode(out_a, H): 1.0},
        Mode(in_b, H): {Mode(out_b, H): 1.0},
        Mode(in_a, V): {Mode(out_a, V): t, Mode(out_b, V): r * t},
        Mode(in_b, V): {Mode(out_b, V): t, Mode(out_a, V): r * t},
    }
    return OpticalElement(f"PDBS({in_a},{in_b}->{out_a},{out_b})", side, cols)


def pbs_rotated(
    path_in: str,
    path_t: str,
    path_r: str,
    angle_deg: float,
    side: str = SIDE_TEST,
) -> OpticalElement:
    """Polarizing splitter analyzed at ``angle_deg`` from the H axis.

    Transmits the projection on cos*H - sin*V toward ``path_t`` (relabeled H)
    and reflects the projection on sin*H + cos*V toward ``path_r`` (relabeled
    V).  At 0 deg this is an ordinary H/V splitter; at 45 deg it erases the
    H/V distinction of the incoming photon.
    """
    _require_distinct(path_t, path_r)
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    cols = {
        Mode(path_in, H): {Mode(path_t, H): c, Mode(path_r, V): s},
        Mode(path_in, V): {Mode(path_t, H): -s, Mode(path_r, V): c},
    }
    return OpticalElement(
        f"PBS({path_in}->{path_t},{path_r}@{angle_deg:g}deg)", side, cols
    )


def polarization_rotator(
    path: str, alpha_deg: float, side: str = SIDE_CORROBORATIVE
) -> OpticalElement:
    """Real polarization rotation by ``alpha_deg`` on one path:
    H -> cos*H + sin*V, V -> -sin*H + cos*V."""
    a = math.radians(alpha_deg)
    c, s = math.cos(a), math.sin(a)
    cols = {
        Mode(path, H): {Mode(path, H): c, Mode(path, V): s},
        Mode(path, V): {Mode(path, H): -s, Mode(path, V): c},
    }
    return OpticalElement(f"rot({path},{alpha_deg:g}deg)", side, cols)


def pdbs_composite(
    in_a: str = "a",
    in_b: str = "b",
    out_a: str = "a",
    out_b: str = "b",
    side: str = SIDE_TEST,
) -> Circuit:
    """Bulk realization of the polarization-dependent splitter.

    Four H/V polarizing splitters route the H components around an ordinary
    50/50 splitter while the V components pass through it; a final pair of
    splitters recombines the two polarizations on each output port.
    """
    # splitter stage: H reflected onto bypass rails, V transmitted toward BS
    split_a = OpticalElement(
        "PBS-split-a",
        side,
        {
            Mode(in_a, H): {Mode("_ha", H): 1.0},
            Mode(in_a, V): {Mode("_va", V): 1.0},
        },
    )
    split_b = OpticalElement(
        "PBS-split-b",
        side,
        {
            Mode(in_b, H): {Mode("_hb", H): 1.0},
            Mode(in_b, V): {Mode("_vb", V): 1.0},
        },
    )
    bs = beam_splitter_50_50("_va", "_vb", "_wa", "_wb", side=side)
    merge_a = OpticalElement(
        "PBS-merge-a",
        side,
        {
            Mode("_ha", H): {Mode(out_a, H): 1.0},
            Mode("_wa", V): {Mode(out_a, V): 1.0},
        },
    )
    merge_b = OpticalElement(
        "PBS-merge-b",
        side,
        {
            Mode("_hb", H): {Mode(out_b, H): 1.0},
            Mode("_wb", V): {Mode(out_b, V): 1.0},
        },
    )
    return Circuit([split_a, split_b, bs, merge_a, merge_b])


def circuit_columns(
    circuit: Circuit, input_modes: Iterable[Mode]
) -> dict[Mode, dict[Mode, complex]]:
    """End-to-end action of a circuit on the given basis input modes."""
    result = {}
    for mode in input_modes:
        col = {mode: 1.0 + 0j}
        for el in circuit:
            nxt: dict[Mode, complex] = {}
            for m, a in col.items():
                for o, b in el.map_mode(m).items():
                    nxt[o] = nxt.get(o, 0j) + a * b
            col = nxt
        result[mode] = {m: a for m, a in col.items() if abs(a) > 1e-15}
    return result
