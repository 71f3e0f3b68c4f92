"""Experiment runner: parameter sweeps, compilation passes, PTM extraction.

Subcommands::

    hinv sweep <config.json> [-o out.csv]
    hinv compile <in.circ> <out.circ> --pass hidden|rc|sk1 [--seed N] [--threshold RAD]
    hinv ptm <lindblad-spec.json> <out.csv> [--steps-per-period N]

Sweeps emit deterministic CSV: a seed-stamped header comment echoing the
full effective config, one row per grid point, 12 significant digits.
Grid points can be dispatched to a process pool sized by the
``HINV_WORKERS`` environment variable (default 1); output order is
independent of the worker count.

Exit codes: 0 success, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analytics, channels, circuit, compiler, gates, lindblad
from .gates import NoiseModel


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _theta_grid(cfg) -> np.ndarray:
    lo = cfg.get("theta_min", -math.pi)
    hi = cfg.get("theta_max", math.pi)
    pts = int(cfg.get("theta_points", 41))
    if pts < 1 or lo < -math.pi - 1e-12 or hi > math.pi + 1e-12 or lo > hi:
        raise ConfigError(f"bad theta grid: [{lo}, {hi}] x {pts}")
    return np.linspace(lo, hi, pts)


def _pmap(fn, items):
    workers = int(os.environ.get("HINV_WORKERS", "1"))
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# experiments

def _avg_fidelity_point(args):
    n, theta, nm = args
    ideal = circuit.ideal_parity_unitary(n, theta)
    row = [n, theta]
    for config in (circuit.HIDDEN_INVERSE, gates.STANDARD):
        orientations = [gates.STANDARD] * (n - 1)
        closing = gates.INVERSE if config == circuit.HIDDEN_INVERSE else gates.STANDARD
        orientations += [closing] * (n - 1)
        c = circuit.parity_controlled_z(n, theta, orientations)
        fe = analytics.entanglement_fidelity(ideal, circuit.unitary_of(c, nm))
        row.append(analytics.average_from_entanglement(fe, n))
    return row


def run_overrotation_sweep(cfg):
    nm = NoiseModel(eps_2q=cfg.get("eps_2q", 0.02), eps_1q=cfg.get("eps_1q", 0.002))
    grid = _theta_grid(cfg)
    n_list = cfg.get("n_list", [2, 4, 6])
    tasks = [(int(n), float(t), nm) for n in n_list for t in grid]
    return ["n", "theta", "f_hidden", "f_standard"], _pmap(_avg_fidelity_point, tasks)


def run_phase_sweep(cfg):
    nm = NoiseModel(phi_diff=math.radians(cfg.get("phi_diff_deg", 3.5)))
    grid = _theta_grid(cfg)
    n_list = cfg.get("n_list", [2, 4, 6])
    tasks = [(int(n), float(t), nm) for n in n_list for t in grid]
    return ["n", "theta", "f_hidden", "f_standard"], _pmap(_avg_fidelity_point, tasks)


def _final_state_fidelity(c, nm):
    psi_ideal = circuit.unitary_of(c)[:, 0]
    psi_noisy = circuit.unitary_of(c, nm)[:, 0]
    return float(abs(np.vdot(psi_ideal, psi_noisy)) ** 2)


def run_repeated_2q(cfg):
    # the fitted two-qubit overrotation is an amplitude error; the gate
    # angle picks it up quadratically
    eps_amp = cfg.get("eps_2q_amplitude", 0.0225)
    nm = NoiseModel(eps_2q=gates.amplitude_to_angle_overrotation(eps_amp),
                    phi_diff=math.radians(cfg.get("phi_diff_deg", 0.0)))
    reps = int(cfg.get("reps", 5))
    rows = []
    for theta in _theta_grid(cfg):
        row = [theta]
        for config in (circuit.HIDDEN_INVERSE, gates.STANDARD):
            c = circuit.repeated_block_circuit(2, float(theta), reps, config)
            row.append(_final_state_fidelity(c, nm))
        rows.append(row)
    return ["theta", "f_hidden", "f_standard"], rows


def run_contrast_4q(cfg):
    eps_amp = cfg.get("eps_2q_amplitude", 0.05)
    nm = NoiseModel(eps_2q=gates.amplitude_to_angle_overrotation(eps_amp),
                    phi_diff=math.radians(cfg.get("phi_diff_deg", -8.0)))
    p = cfg.get("p_depol", 0.87)
    depol = channels.depolarizing_ptm(4, p)
    rows = []
    for theta in _theta_grid(cfg):
        row = [theta]
        for config in (circuit.HIDDEN_INVERSE, gates.STANDARD):
            c = circuit.repeated_block_circuit(4, float(theta), 1, config)
            probs = circuit.run_density(c, nm, circuit.channels_after_two_qubit(c, depol))
            row += [probs[0], probs[-1], 1.0 - probs[0] - probs[-1]]
        rows.append(row)
    return ["theta",
            "p0000_hidden", "p1111_hidden", "pother_hidden",
            "p0000_standard", "p1111_standard", "pother_standard"], rows


def _sk1_viability_point(args):
    eps_amp, gamma, delta, steps = args
    kw = dict(delta=delta, gamma_heat=gamma, amp_scale=1.0 + eps_amp)
    ideal = channels.ptm_of_unitary(gates.xx_unitary(math.pi / 4))
    raw = lindblad.ms_gate_channel(lindblad.xx_gate_spec(**kw), steps)
    pulses = [lindblad.ms_gate_channel(s, steps)
              for s in lindblad.sk1_pulse_specs(math.pi / 4, **kw)]
    sk1 = channels.compose_ptms(pulses)
    f_raw = channels.avg_fidelity_from_ptm(raw, ideal)
    f_sk1 = channels.avg_fidelity_from_ptm(sk1, ideal)
    return [eps_amp, gamma, f_raw, f_sk1, f_sk1 - f_raw]


def run_sk1_viability(cfg):
    eps_list = cfg.get("eps_amplitude_list", [0.005, 0.01, 0.02])
    gamma_list = cfg.get("gamma_list", [20.0, 60.0, 200.0, 600.0, 2000.0])
    delta = cfg.get("delta", 2 * math.pi * 200e3)
    steps = int(cfg.get("steps_per_period", 150))
    tasks = [(float(e), float(g), float(delta), steps)
             for e in eps_list for g in gamma_list]
    return (["eps_amplitude", "gamma_heat", "f_raw", "f_sk1", "improvement"],
            _pmap(_sk1_viability_point, tasks))


def _noise_from_cfg(cfg) -> NoiseModel:
    kind = cfg.get("noise", "detuning")
    if kind == "detuning":
        return NoiseModel(delta_detune=cfg.get("delta_detune", 0.01))
    if kind == "overrotation":
        return NoiseModel(eps_2q=cfg.get("eps_2q", 0.02), eps_1q=cfg.get("eps_1q", 0.002))
    if kind == "phase":
        return NoiseModel(phi_diff=math.radians(cfg.get("phi_diff_deg", 3.5)))
    raise ConfigError(f"unknown noise kind {kind!r}")


def _rc_point(args):
    n, theta, nm, seeds, seed0 = args
    ideal = circuit.ideal_parity_unitary(n, theta)

    def favg(c):
        fe = analytics.entanglement_fidelity(ideal, circuit.unitary_of(c, nm))
        return analytics.average_from_entanglement(fe, n)

    base = circuit.parity_controlled_z(n, theta)
    hidden = circuit.parity_controlled_z(
        n, theta, [gates.STANDARD] * (n - 1) + [gates.INVERSE] * (n - 1))
    acc = 0.0
    for s in range(seeds):
        acc += favg(compiler.randomized_compile(base, seed0 + s))
    return [theta, favg(hidden), favg(base), acc / seeds]


def run_rc_compare(cfg):
    nm = _noise_from_cfg(cfg)
    n = int(cfg.get("n", 2))
    seeds = int(cfg.get("seeds", 100))
    seed0 = int(cfg.get("seed", 2024))
    tasks = [(n, float(t), nm, seeds, seed0) for t in _theta_grid(cfg)]
    return ["theta", "f_hidden", "f_standard", "f_rc_mean"], _pmap(_rc_point, tasks)


EXPERIMENTS = {
    "overrotation_sweep": run_overrotation_sweep,
    "phase_sweep": run_phase_sweep,
    "repeated_2q": run_repeated_2q,
    "contrast_4q": run_contrast_4q,
    "sk1_viability": run_sk1_viability,
    "rc_compare": run_rc_compare,
}


def run_sweep(cfg: dict, out_path) -> None:
    name = cfg.get("experiment")
    if name == "ptm_extract":
        spec = lindblad.spec_from_dict(cfg.get("lindblad", {"calibrate": {}}))
        R = lindblad.ms_gate_channel(spec, int(cfg.get("steps_per_period",
                                                       lindblad.DEFAULT_STEPS_PER_PERIOD)))
        channels.write_csv(R, out_path)
        return
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; "
                          f"choose from {sorted(EXPERIMENTS) + ['ptm_extract']}")
    header, rows = EXPERIMENTS[name](cfg)
    for row in rows:
        for col, x in zip(header, row):
            if col.startswith(("f_", "p")) and not (-1e-9 <= float(x) <= 1 + 1e-9):
                raise ValueError(f"emitted fidelity/probability {x} out of [0, 1]")
    with open(out_path, "w") as fh:
        fh.write(f"# hinv sweep experiment={name}\n")
        fh.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# compile pass driver

def run_compile(in_path, out_path, pass_name, seed, threshold) -> None:
    c = circuit.read_file(in_path)
    if pass_name == "hidden":
        sites = compiler.find_hidden_inverse_sites(c)
        rule = compiler.OrientationRule(threshold)
        out = compiler.apply_orientation_rule(c, rule)
        print(f"sites: {len(sites)}")
        for s in sites:
            chosen = "inverse" if rule.pick_inverse(s.enclosed_angle) else "standard"
            print(f"  gates ({s.left_index}, {s.right_index}) "
                  f"angle={s.enclosed_angle:.6g} closing={chosen}")
    elif pass_name == "rc":
        out = compiler.randomized_compile(c, seed)
        print(f"twirled {sum(1 for g in c.gates if g.kind == 'cnot')} composites "
              f"(seed={seed})")
    elif pass_name == "sk1":
        out = compiler.sk1_compile(c)
        print(f"expanded to {len(out.gates)} gates")
    else:
        raise ConfigError(f"unknown pass {pass_name!r}")
    circuit.write_file(out, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hinv", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_sweep = sub.add_parser("sweep", help="run a configured experiment sweep")
    p_sweep.add_argument("config")
    p_sweep.add_argument("-o", "--output", default=None)

    p_comp = sub.add_parser("compile", help="apply a compilation pass to a circuit file")
    p_comp.add_argument("input")
    p_comp.add_argument("output")
    p_comp.add_argument("--pass", dest="pass_name", required=True,
                        choices=["hidden", "rc", "sk1"])
    p_comp.add_argument("--seed", type=int, default=0)
    p_comp.add_argument("--threshold", type=float, default=math.pi / 2)

    p_ptm = sub.add_parser("ptm", help="extract a pulse-level MS gate PTM to CSV")
    p_ptm.add_argument("spec")
    p_ptm.add_argument("output")
    p_ptm.add_argument("--steps-per-period", type=int,
                       default=lindblad.DEFAULT_STEPS_PER_PERIOD)

    args = parser.parse_args(argv)
    try:
        if args.cmd == "sweep":
            try:
                with open(args.config) as fh:
                    cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
            out = args.output or cfg.get("output")
            if not out:
                raise ConfigError("no output path (use -o or config key 'output')")
            run_sweep(cfg, out)
        elif args.cmd == "compile":
            run_compile(args.input, args.output, args.pass_name, args.seed,
                        args.threshold)
        elif args.cmd == "ptm":
            try:
                spec = lindblad.load_spec(args.spec)
            except (OSError, json.JSONDecodeError, TypeError, KeyError) as exc:
                raise ConfigError(f"cannot read spec {args.spec}: {exc}") from exc
            channels.write_csv(lindblad.ms_gate_channel(spec, args.steps_per_period),
                               args.output)
    except (ConfigError, circuit.CircuitParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
