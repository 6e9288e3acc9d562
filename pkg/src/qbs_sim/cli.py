"""Command-line entry point.

Subcommands:
  sweep      analytic or sampled correlation surface on a (theta, alpha) grid
  bell       Bell parameter from two-basis phase-scan visibilities
  causality  space-like-separation check between the two detection events
  verify     internal consistency checkpoints (checkpoint-state fidelities,
             composite splitter equivalence, closed-form oracle grid)

Grid syntax is start:stop:steps with inclusive endpoints; theta is in
radians, alpha in degrees.  Exit codes: 0 success, 1 validation error,
2 runtime or self-check failure.  QBS_SIM_THREADS caps the worker count.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analysis, experiment as qdc, montecarlo as mc
from . import elements as el
from .states import Mode, H, V, fidelity, dump_state
from .surfaces import CorrelationSurface, SurfacePoint

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(ValueError):
    pass


def parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, steps = spec.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError as exc:
        raise UsageError(f"bad grid spec {spec!r}, expected start:stop:steps") from exc
    if steps < 1:
        raise UsageError(f"grid needs at least 1 step, got {steps}")
    if steps == 1:
        if start != stop:
            raise UsageError("single-step grid requires start == stop")
        return np.array([start])
    return np.linspace(start, stop, steps)


def _settings(args, theta=0.0, alpha=0.0) -> qdc.ExperimentSettings:
    basis = qdc.BASIS_DA if args.basis.lower() == "da" else qdc.BASIS_HV
    return qdc.ExperimentSettings(
        theta=theta, alpha_deg=alpha, basis=basis, input=args.input
    )


def _model(args) -> mc.DetectionModel:
    seed = args.seed if args.seed is not None else np.random.SeedSequence().entropy % 2**63
    return mc.DetectionModel(
        efficiency=args.efficiency, dark_probability=args.dark, seed=int(seed)
    )


def _write(args, text: str):
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc}") from exc
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    thetas = parse_grid(args.theta)
    alphas = parse_grid(args.alpha)
    if args.shots is None:
        surf = qdc.surface(_settings(args), thetas, alphas)
    else:
        if args.shots < 1:
            raise UsageError("--shots must be >= 1")
        model = _model(args)
        print(f"seed: {model.seed}")
        per_point = max(args.shots // (len(thetas) * len(alphas)), 1)
        grid = []
        stream = 0
        for theta in thetas:
            for alpha in alphas:
                s = _settings(args, float(theta), float(alpha))
                grid.append((float(theta), float(alpha),
                             mc.run(s, model, per_point, stream=stream)))
                stream += 1
        surf = analysis.surface_from_counts(grid)
    if args.format == "json":
        import json
        payload = json.dumps(
            [p._asdict() for p in surf.points], indent=2
        )
    else:
        payload = surf.to_csv()
    _write(args, payload)
    print(f"points: {len(surf.points)}  min: {surf.min_value():.6f}  "
          f"max: {surf.max_value():.6f}")
    if args.dump_state:
        state = qdc.build_qdc_state(_settings(args, float(thetas[0]), float(alphas[0])))
        if not hasattr(state, "amplitudes"):
            raise UsageError("--dump-state requires the entangled input")
        with open(args.dump_state, "w") as fh:
            fh.write(dump_state(state))
    return EXIT_OK


def _scan_visibility(args, model, basis, alpha, n_points=17, stream=0):
    thetas = np.linspace(0.0, 2.0 * math.pi, n_points)
    per_point = max(args.shots // (2 * n_points), 1)
    values, errs = [], []
    for theta in thetas:
        s = qdc.ExperimentSettings(theta=float(theta), alpha_deg=alpha,
                                   basis=basis, input=args.input)
        est = mc.estimate(mc.run(s, model, per_point, stream=stream))
        if not est.defined:
            raise analysis.FitError(f"no conditioned counts at theta={theta}")
        values.append(est.value)
        errs.append(max(est.stderr, 1e-6))
    return analysis.fit_visibility(thetas, values, errs)


def cmd_bell(args) -> int:
    model = _model(args)
    print(f"seed: {model.seed}")
    v_hv = _scan_visibility(args, model, qdc.BASIS_HV, 90.0, stream=0)
    v_da = _scan_visibility(args, model, qdc.BASIS_DA, 45.0, stream=1)
    s, sigma = analysis.bell_parameter(v_hv, v_da)
    nsig = analysis.classical_bound_violation(s, sigma) if sigma > 0 else float("inf")
    print(f"V_HV = {v_hv.value:.4f} +/- {v_hv.uncertainty:.4f}")
    print(f"V_DA = {v_da.value:.4f} +/- {v_da.uncertainty:.4f}")
    print(f"S = {s:.4f} +/- {sigma:.4f}  ({nsig:.1f} sigma above 2)")
    return EXIT_OK


def cmd_causality(args) -> int:
    e_test = analysis.SpacetimeEvent(0.0, 0.0)
    e_corr = analysis.SpacetimeEvent(args.delta_x, args.delta_t)
    report = analysis.causality_report(e_test, e_corr)
    if args.fiber_length is not None:
        delay = analysis.propagation_delay(args.fiber_length, args.refractive_index)
        print(f"fiber delay: {delay:.1f} ns "
              f"({args.fiber_length} m, n = {args.refractive_index})")
    _write(args, report + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    phase = {"i": 1j, "-i": -1j}[args.bs_phase]
    failures = 0

    def report(name: str, deviation: float, tol: float):
        nonlocal failures
        ok = deviation < tol
        if not ok:
            failures += 1
        print(f"{'PASS' if ok else 'FAIL'}  {name}: max deviation {deviation:.3e} "
              f"(tolerance {tol:.0e})")

    thetas = np.linspace(0.0, 2.0 * math.pi, max(args.grid, 2))
    # checkpoint fidelities along the apparatus
    dev_pdbs = dev_erasers = dev_rot = 0.0
    for theta in thetas:
        s = qdc.ExperimentSettings(theta=float(theta),
                                   bs_reflection_phase=phase)
        pre = el.apply_all(qdc.test_side_circuit(s)[:3], qdc.bell_state())
        dev_pdbs = max(dev_pdbs,
                       1.0 - fidelity(pre, qdc.reference_after_pdbs(theta)))
        full = el.apply_all(qdc.test_side_circuit(s), qdc.bell_state())
        dev_erasers = max(dev_erasers,
                          1.0 - fidelity(full, qdc.reference_after_erasers(theta)))
        for alpha in (0.0, 30.0, 45.0, 90.0):
            sa = qdc.ExperimentSettings(theta=float(theta), alpha_deg=alpha,
                                        bs_reflection_phase=phase)
            evolved = el.apply_all(
                qdc.test_side_circuit(sa) + qdc.corroborative_side_circuit(sa),
                qdc.bell_state(),
            )
            dev_rot = max(dev_rot,
                          1.0 - fidelity(evolved,
                                         qdc.reference_after_rotator(theta, alpha)))
    report("splitter checkpoint fidelity", dev_pdbs, 1e-10)
    report("eraser checkpoint fidelity", dev_erasers, 1e-10)
    report("rotator checkpoint fidelity", dev_rot, 1e-10)

    # composite splitter vs ideal, up to per-port phases
    ideal = el.pdbs("a", "b", "a", "b")
    comp = el.circuit_columns(
        el.pdbs_composite(), [Mode(p, q) for p in ("a", "b") for q in (H, V)]
    )
    dev_comp = 0.0
    for mode, col in comp.items():
        ref = ideal.columns[mode]
        num = sum(col.get(m, 0j).conjugate() * a for m, a in ref.items())
        dev_comp = max(dev_comp, 1.0 - abs(num) ** 2)
    report("composite splitter equivalence", dev_comp, 1e-10)

    # closed-form oracle over a coarse grid
    dev_oracle = 0.0
    for theta in np.linspace(0.0, 2.0 * math.pi, max(args.grid, 2)):
        for alpha in np.linspace(0.0, 90.0, max(args.grid // 2, 2)):
            s = qdc.ExperimentSettings(theta=float(theta), alpha_deg=float(alpha),
                                       bs_reflection_phase=phase)
            dev_oracle = max(
                dev_oracle,
                abs(qdc.category_probability(s)
                    - qdc.closed_form_ia(float(theta), float(alpha))),
            )
    report("closed-form correlation oracle", dev_oracle, 1e-10)

    return EXIT_OK if failures == 0 else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qbs-sim",
        description="Two-photon quantum-beam-splitter interferometer simulator",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--output", default=None, help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    def add_model(sp):
        sp.add_argument("--shots", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--efficiency", type=float, default=0.25)
        sp.add_argument("--dark", type=float, default=4.8e-4)
        sp.add_argument("--input", choices=(qdc.INPUT_ENTANGLED, qdc.INPUT_MIXTURE),
                        default=qdc.INPUT_ENTANGLED)
        sp.add_argument("--basis", choices=("hv", "da"), default="hv")

    sp = sub.add_parser("sweep", help="correlation surface on a (theta, alpha) grid")
    add_common(sp)
    add_model(sp)
    sp.add_argument("--theta", default="0:6.283185307179586:25",
                    help="theta grid start:stop:steps (radians)")
    sp.add_argument("--alpha", default="0:90:13",
                    help="alpha grid start:stop:steps (degrees)")
    sp.add_argument("--dump-state", default=None,
                    help="also dump the evolved state at the first grid point")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bell", help="Bell parameter from phase-scan visibilities")
    add_common(sp)
    add_model(sp)
    sp.set_defaults(func=cmd_bell)

    sp = sub.add_parser("causality", help="space-like separation check")
    add_common(sp)
    sp.add_argument("--delta-x", type=float, default=20.0,
                    help="spatial separation of the detection events (m)")
    sp.add_argument("--delta-t", type=float, default=20.0,
                    help="time between the detection events (ns)")
    sp.add_argument("--fiber-length", type=float, default=None,
                    help="also print the fiber propagation delay for this length")
    sp.add_argument("--refractive-index", type=float,
                    default=analysis.DEFAULT_FIBER_INDEX)
    sp.set_defaults(func=cmd_causality)

    sp = sub.add_parser("verify", help="run internal consistency checkpoints")
    sp.add_argument("--grid", type=int, default=13, help="oracle grid density")
    sp.add_argument("--bs-phase", choices=("i", "-i"), default="i",
                    help=argparse.SUPPRESS)  # self-check hook
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bell" and args.shots is None:
        args.shots = 200_000
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RuntimeError, analysis.FitError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
