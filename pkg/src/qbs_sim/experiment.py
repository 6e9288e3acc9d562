"""The full quantum-beam-splitter experiment: interferometer with a
polarization-dependent output splitter, 45-degree erasers, and a rotated
corroborative analyzer.

Path labels: the corroborative photon travels on path ``c``; the test photon
enters on path ``a``, the two interferometer arms are ``a`` (upper) and ``b``
(lower), and the eraser outputs are ``a``/``a'`` (from the upper arm) and
``b``/``b'`` (from the lower arm).

Detector naming: the coincidence group gated with the corroborative H
detector that carries the cos^2(theta/2) fringe sits behind the eraser on the
*lower* arm with the reflection conventions used here, so detectors D_a/D_a'
are wired to terminal paths b/b' and D_b/D_b' to a/a'.  The permutation only
renames detectors; all probabilities are unaffected.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from . import elements as el
from .states import H, V, Mode, MixedState, TwoPhotonState, make_state, mix

BASIS_HV = "HV"
BASIS_DA = "DA"

INPUT_ENTANGLED = "entangled"
INPUT_MIXTURE = "mixture"

CORROBORATIVE_DETECTORS = ("D_H", "D_V")
GROUP_A = "A"
GROUP_B = "B"
GROUPS = (GROUP_A, GROUP_B)

#: detector -> terminal path (see module docstring for the wiring choice)
DETECTOR_PATHS = {"D_a": "b", "D_a'": "b'", "D_b": "a", "D_b'": "a'"}
#: XOR coincidence groups over terminal paths
GROUP_PATHS = {
    GROUP_A: frozenset({"b", "b'"}),
    GROUP_B: frozenset({"a", "a'"}),
}
#: terminal path -> detector, fixed order used by the Monte Carlo layer
TERMINAL_PATHS = ("a", "a'", "b", "b'")
PATH_DETECTORS = {p: d for d, p in DETECTOR_PATHS.items()}


@dataclass(frozen=True)
class ExperimentSettings:
    theta: float = 0.0          # interferometer phase, radians
    alpha_deg: float = 0.0      # corroborative rotation, degrees
    basis: str = BASIS_HV
    input: str = INPUT_ENTANGLED
    bs_reflection_phase: complex = 1j  # self-check hook, leave at default

    def __post_init__(self):
        if self.basis not in (BASIS_HV, BASIS_DA):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.input not in (INPUT_ENTANGLED, INPUT_MIXTURE):
            raise ValueError(f"unknown input {self.input!r}")


def bell_state() -> TwoPhotonState:
    """Maximally entangled 1/sqrt(2) (|H>_c|H>_a + |V>_c|V>_a)."""
    return make_state(
        [
            ((Mode("c", H), Mode("a", H)), 1.0),
            ((Mode("c", V), Mode("a", V)), 1.0),
        ]
    )


def mixture_state() -> MixedState:
    """Dephased Bell state: 1/2 |HH><HH| + 1/2 |VV><VV|."""
    hh = make_state([((Mode("c", H), Mode("a", H)), 1.0)])
    vv = make_state([((Mode("c", V), Mode("a", V)), 1.0)])
    return mix([(0.5, hh), (0.5, vv)])


def test_side_circuit(settings: ExperimentSettings) -> list[el.OpticalElement]:
    """Entrance splitter, phase plate, polarization-dependent splitter, and
    the two 45-degree erasers, in propagation order.

    In the diagonal analysis basis the incoming ensemble is expressed in the
    rotated frame by turning the test photon's polarization by -45 degrees
    before the interferometer; for the entangled input this is identical to
    offsetting the corroborative rotation by +45 degrees.
    """
    chain: list[el.OpticalElement] = []
    if settings.basis == BASIS_DA:
        chain.append(el.polarization_rotator("a", -45.0, side=el.SIDE_TEST))
    r = settings.bs_reflection_phase
    chain.append(el.beam_splitter_50_50("a", "b", "a", "b", reflection_phase=r))
    chain.append(el.phase_shifter("b", settings.theta))
    chain.append(el.pdbs("a", "b", "a", "b", reflection_phase=r))
    chain.append(el.pbs_rotated("a", "a", "a'", 45.0))
    chain.append(el.pbs_rotated("b", "b", "b'", 45.0))
    return chain


def corroborative_side_circuit(settings: ExperimentSettings) -> list[el.OpticalElement]:
    return [el.polarization_rotator("c", settings.alpha_deg)]


def build_qdc_state(settings: ExperimentSettings) -> TwoPhotonState | MixedState:
    """Evolve the configured input through the full apparatus."""
    chain = test_side_circuit(settings) + corroborative_side_circuit(settings)
    if settings.input == INPUT_ENTANGLED:
        return el.apply_all(chain, bell_state())
    return el.apply_ensemble(chain, mixture_state())


def _joint(state, corroborative: str, group: str) -> float:
    paths = GROUP_PATHS[group]
    pol = H if corroborative == "D_H" else V
    pred = lambda cm, tm: cm.pol == pol and tm.path in paths
    if isinstance(state, MixedState):
        return sum(
            w * sum(abs(a) ** 2 for k, a in s.amplitudes.items() if pred(*k))
            for w, s in state.components
        )
    return sum(abs(a) ** 2 for k, a in state.amplitudes.items() if pred(*k))


def joint_probability(
    settings: ExperimentSettings, corroborative: str, group: str
) -> float:
    """Probability of the two-fold coincidence (corroborative detector,
    XOR test group).  The four categories partition all coincidences and
    sum to 1."""
    _check_category(corroborative, group)
    return _joint(build_qdc_state(settings), corroborative, group)


def category_probability(
    settings: ExperimentSettings, corroborative: str = "D_H", group: str = GROUP_A
) -> float:
    """Coincidence probability normalized per corroborative click,
    P(group | corroborative detector).  This is the quantity the intensity
    correlation I(theta, alpha) refers to."""
    _check_category(corroborative, group)
    state = build_qdc_state(settings)
    num = _joint(state, corroborative, group)
    den = num + _joint(state, corroborative, _other_group(group))
    return num / den


def complementary_probability(
    settings: ExperimentSettings, corroborative: str = "D_H", group: str = GROUP_A
) -> float:
    """1 - category_probability of the paired category (the other XOR group
    gated with the same corroborative detector)."""
    return 1.0 - category_probability(settings, corroborative, _other_group(group))


def closed_form_ia(theta: float, alpha_deg: float) -> float:
    """Independent closed-form oracle for the (D_H, A-group) correlation:
    cos^2(theta/2) sin^2(alpha) + 1/2 cos^2(alpha)."""
    a = math.radians(alpha_deg)
    return math.cos(theta / 2.0) ** 2 * math.sin(a) ** 2 + 0.5 * math.cos(a) ** 2


def surface(
    settings: ExperimentSettings,
    thetas,
    alphas_deg,
    corroborative: str = "D_H",
    group: str = GROUP_A,
):
    """Analytic correlation surface on the (theta, alpha) grid, row-major in
    theta then alpha.  Returns a CorrelationSurface."""
    from .surfaces import CorrelationSurface, SurfacePoint

    points = []
    for theta in thetas:
        for alpha in alphas_deg:
            s = replace(settings, theta=float(theta), alpha_deg=float(alpha))
            points.append(
                SurfacePoint(float(theta), float(alpha),
                             category_probability(s, corroborative, group), None)
            )
    return CorrelationSurface(points)


def _other_group(group: str) -> str:
    return GROUP_B if group == GROUP_A else GROUP_A


def _check_category(corroborative: str, group: str):
    if corroborative not in CORROBORATIVE_DETECTORS:
        raise ValueError(f"unknown corroborative detector {corroborative!r}")
    if group not in GROUPS:
        raise ValueError(f"unknown test group {group!r}")


# ---------------------------------------------------------------------------
# Hand-expanded reference states for the three apparatus checkpoints.  These
# are written down directly from the ideal-component amplitudes and serve as
# fixed oracles for the circuit evolution.
# ---------------------------------------------------------------------------

def reference_after_pdbs(theta: float) -> TwoPhotonState:
    """State after entrance splitter, phase plate and the polarization-
    dependent splitter, before the erasers."""
    e = cmath.exp(1j * theta)
    s2 = math.sqrt(2.0)
    return make_state(
        [
            ((Mode("c", H), Mode("a", H)), 0.5),
            ((Mode("c", H), Mode("b", H)), 0.5j * e),
            ((Mode("c", V), Mode("b", V)), (1j + 1j * e) / (2 * s2)),
            ((Mode("c", V), Mode("a", V)), (1 - e) / (2 * s2)),
        ]
    )


def _particle_entries(theta: float):
    e = cmath.exp(1j * theta)
    return [
        (Mode("a", H), 0.5),
        (Mode("a'", V), 0.5),
        (Mode("b", H), 0.5j * e),
        (Mode("b'", V), 0.5j * e),
    ]


def _wave_entries(theta: float):
    e = cmath.exp(1j * theta)
    k = 1.0 / (2.0 * math.sqrt(2.0))
    return [
        (Mode("a", H), -k * (1 - e)),
        (Mode("a'", V), k * (1 - e)),
        (Mode("b", H), -k * (1j * e + 1j)),
        (Mode("b'", V), k * (1j * e + 1j)),
    ]


def reference_after_erasers(theta: float) -> TwoPhotonState:
    """State after the erasers: the corroborative H component rides with the
    open-interferometer (particle) amplitudes and the V component with the
    closed-interferometer (wave) amplitudes."""
    w = 1.0 / math.sqrt(2.0)
    entries = []
    for tm, a in _particle_entries(theta):
        entries.append(((Mode("c", H), tm), w * a))
    for tm, a in _wave_entries(theta):
        entries.append(((Mode("c", V), tm), w * a))
    return make_state(entries)


def reference_after_rotator(theta: float, alpha_deg: float) -> TwoPhotonState:
    """Checkpoint state after additionally rotating the corroborative
    polarization by alpha."""
    a = math.radians(alpha_deg)
    c, s = math.cos(a), math.sin(a)
    w = 1.0 / math.sqrt(2.0)
    entries = []
    for tm, amp in _particle_entries(theta):
        entries.append(((Mode("c", H), tm), w * c * amp))
        entries.append(((Mode("c", V), tm), w * s * amp))
    for tm, amp in _wave_entries(theta):
        entries.append(((Mode("c", H), tm), -w * s * amp))
        entries.append(((Mode("c", V), tm), w * c * amp))
    return make_state(entries)
