"""Subcommand orchestration and artifact writing.

Every subcommand produces an :class:`Outcome` (CSV header and rows, a JSON
summary, and a pass flag).  :func:`write_outcome` turns it into three files
in the output directory::

    <name>.csv            fixed header, one row per grid point / instance
    <name>.json           {"schema", "subcommand", "passed", "exit_code",
                           "csv", "csv_header", "n_rows", "summary"}
    <name>.manifest.txt   the resolved configuration as key = value lines;
                          feeding it back via --config reproduces the run

Nothing time- or thread-dependent is written, so reruns are byte-identical.
"""
from dataclasses import dataclass, field, replace
import json
import math
import os
import tempfile

import numpy as np

from . import __version__, rng
from .config import format_config
from .hamiltonian import TwoParticleCube, TwoParticleStructure
from .randelette import RandeletteField, ThetaSample, potential_values
from .spectral import eigvalsh_batch
from .stollmann import (check_dm, mean_functional, min_functional, one_particle_eigenvalue,
                        sample_functional, stollmann_from_values, two_particle_eigenvalue)
from .torus import LatticeCube, fit_diophantine, min_spacing
from .wegner import (ConfigError, run_classical_wegner, run_iid_two_particle,
                     run_qp_one_volume, run_qp_two_volume, qp_geometry)

__all__ = ["Outcome", "SUBCOMMANDS", "CONCENTRATION_HEADER", "run_subcommand",
           "write_outcome", "EXIT_PASS", "EXIT_CONFIG", "EXIT_FAIL"]

EXIT_PASS, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2
SCHEMA = "qpwegner-summary/1"

CONCENTRATION_HEADER = ("epsilon", "p_hat", "ci_low", "ci_high", "n_samples",
                        "bound_diagnostic")
SPACING_HEADER = ("L", "delta_L", "L_times_delta_L")
STOLLMANN_HEADER = ("functional", "J_size", "a", "epsilon", "p_hat", "ci_low", "ci_high",
                    "n_samples", "bound")
DM_HEADER = ("functional", "instance", "t", "monotone_margin", "diagonal_margin", "passed")
IDS_HEADER = ("energy", "ids")


@dataclass
class Outcome:
    name: str
    header: tuple
    rows: list
    summary: dict
    passed: bool
    config: object = None
    extra: dict = field(default_factory=dict)


# --------------------------------------------------------------- wegner

WEGNER_MODES = {
    "wegner-classical": ("classical-1p",),
    "wegner-iid2p": ("iid-2p-one-volume", "iid-2p-two-volume"),
    "wegner-qp1": ("qp-one-volume",),
    "wegner-qp2": ("qp-two-volume",),
}


def _with_mode(cfg, name):
    allowed = WEGNER_MODES[name]
    mode = cfg.experiment.mode
    if mode is None:
        mode = allowed[0]
    elif mode not in allowed:
        raise ConfigError(f"subcommand {name} runs mode(s) {', '.join(allowed)}, "
                          f"config asks for {mode!r}")
    exp = replace(cfg.experiment, mode=mode).resolved()
    return replace(cfg, experiment=exp)


def _wegner(name, runner):
    def run(cfg):
        cfg = _with_mode(cfg, name)
        res = runner(cfg.experiment)
        rows = [tuple(row) for row in res.rows()]
        summary = {"mode": res.mode, **res.details}
        return Outcome(name, CONCENTRATION_HEADER, rows, summary, res.passed, cfg)
    return run


# --------------------------------------------------------------- spacing

def run_spacing(cfg):
    exp = cfg.experiment
    h = cfg.harness
    if len(h.spacing_L) < 2 or min(h.spacing_L) < 1:
        raise ConfigError("spacing_L needs at least two radii >= 1")
    action = exp.action()
    rows = []
    for L in h.spacing_L:
        delta = min_spacing(action, np.zeros(exp.nu), LatticeCube((0,) * exp.d, L))
        rows.append((L, delta, L * delta))
    B, C, min_ld = fit_diophantine([r[0] for r in rows], [r[1] for r in rows])
    passed = min_ld > 0 and h.diophantine_B_min <= B <= h.diophantine_B_max
    summary = {"fitted_B": B, "fitted_C": C, "min_L_times_delta": min_ld,
               "B_range": [h.diophantine_B_min, h.diophantine_B_max], "d": exp.d, "nu": exp.nu}
    return Outcome("spacing", SPACING_HEADER, rows, summary, passed, cfg)


# --------------------------------------------------------------- stollmann

STOLLMANN_CENTERS = ((0, 0), (0, 1), (0, 2), (0, 5))


def _median_center(phi, J, seed):
    # pilot from an independent stream; centers the interval where phi is dense
    pilot = np.asarray(phi(rng.keyed_uniform(seed, rng.STREAM_AUX,
                                             np.arange(4096, dtype=np.uint64)[:, None],
                                             np.arange(J, dtype=np.uint64)[None, :])))
    return float(np.median(pilot))


def stollmann_functionals(exp):
    """``(name, J, phi)`` for the mean of two uniforms and two-particle eigenvalue maps."""
    out = [("mean2", 2, mean_functional)]
    for center in STOLLMANN_CENTERS:
        st = TwoParticleStructure(TwoParticleCube(center, 1), exp.interaction())
        J = len(st.shadow_sites)
        for k, label in ((0, "ground"), (st.dimension // 2, "middle")):
            out.append((f"eig{label}_u{center[0]}_{center[1]}", J,
                        two_particle_eigenvalue(st, k)))
    return out


def run_stollmann(cfg):
    exp, h = cfg.experiment, cfg.harness
    if h.stollmann_samples < 1:
        raise ConfigError("stollmann_samples must be positive")
    rows = []
    passed = True
    worst = -math.inf
    for name, J, phi in stollmann_functionals(exp):
        values = sample_functional(phi, J, h.stollmann_samples, exp.seed)
        mid = 0.5 if name == "mean2" else _median_center(phi, J, exp.seed)
        for eps in h.stollmann_epsilons:
            res = stollmann_from_values(values, J, (mid - eps / 2.0, eps))
            e = res.estimate
            rows.append((name, J, res.interval[0], eps, e.p_hat, e.ci_low, e.ci_high,
                         e.n_samples, res.bound))
            passed &= res.passed
            worst = max(worst, e.ci_low / res.bound)
    summary = {"max_ci_low_over_bound": worst, "samples": h.stollmann_samples,
               "epsilons": list(h.stollmann_epsilons)}
    return Outcome("stollmann", STOLLMANN_HEADER, rows, summary, passed, cfg)


# --------------------------------------------------------------- dm-check

def dm_functionals(exp, seed):
    """Functionals spot-checked for diagonal monotonicity, with their coordinate counts."""
    out = [("mean", 4, mean_functional), ("min", 4, min_functional)]
    cube1 = LatticeCube((0,), 2)
    for k in range(len(cube1)):
        out.append((f"anderson_eig{k}", len(cube1), one_particle_eigenvalue(cube1, k)))
    st = TwoParticleStructure(TwoParticleCube((0, 1), 1), exp.interaction())
    # fixed symmetric perturbation H0 for the "H0 + H(q)" check
    g = rng.keyed_uniform(seed, rng.STREAM_AUX, 0xD0, np.arange(st.dimension ** 2,
                                                                dtype=np.uint64))
    H0 = (g.reshape(st.dimension, st.dimension) - 0.5)
    H0 = H0 + H0.T
    for k in range(st.dimension):
        out.append((f"twoparticle_eig{k}", len(st.shadow_sites), two_particle_eigenvalue(st, k)))
        out.append((f"twoparticle_H0_eig{k}", len(st.shadow_sites),
                    two_particle_eigenvalue(st, k, H0)))
    return out, st


def run_dm_check(cfg):
    exp, h = cfg.experiment, cfg.harness
    if h.dm_instances < 1:
        raise ConfigError("dm_instances must be positive")
    funcs, st = dm_functionals(exp, exp.seed)
    rows = []
    margins = {}
    passed = True
    for fi, (name, J, phi) in enumerate(funcs):
        mono_min = diag_min = math.inf
        for i in range(h.dm_instances):
            u = rng.keyed_uniform(exp.seed, rng.STREAM_AUX, fi, i,
                                  np.arange(2 * J, dtype=np.uint64))
            q = 3.0 * u[:J] - 1.0
            r = u[J:] * (u[J:] > 0.5)
            t = h.dm_t_values[i % len(h.dm_t_values)]
            res = check_dm(phi, q, r, t)
            rows.append((name, i, t, res.monotone_margin, res.diagonal_margin, res.passed))
            passed &= res.passed
            mono_min = min(mono_min, res.monotone_margin)
            diag_min = min(diag_min, res.diagonal_margin)
        margins[name] = {"min_monotone_margin": mono_min, "min_diagonal_margin": diag_min}
    # full-diagonal shift of the two-particle spectrum is exactly 2t
    q = rng.keyed_uniform(exp.seed, rng.STREAM_AUX, 0x5A,
                          np.arange(h.dm_instances, dtype=np.uint64)[:, None],
                          np.arange(len(st.shadow_sites), dtype=np.uint64)[None, :])
    shift_err = 0.0
    for t in h.dm_t_values:
        base = eigvalsh_batch(st.matrices(q))
        moved = eigvalsh_batch(st.matrices(q + t))
        shift_err = max(shift_err, float(np.abs(moved - base - 2.0 * t).max()))
    passed &= shift_err <= 1e-9
    summary = {"functionals": margins, "max_two_particle_shift_error": shift_err,
               "instances": h.dm_instances}
    return Outcome("dm-check", DM_HEADER, rows, summary, passed, cfg)


# --------------------------------------------------------------- ids

def run_ids(cfg):
    exp = replace(cfg.experiment, mode="qp-one-volume").resolved()
    h = cfg.harness
    geo = qp_geometry(exp)
    field_ = RandeletteField(exp.schedule(), ThetaSample(exp.theta_seed), exp.nu,
                             geo.truncation_N)
    st = TwoParticleStructure(TwoParticleCube(exp.center, exp.L), exp.interaction())
    i = np.arange(exp.omega_samples, dtype=np.uint64)[:, None]
    omega = rng.keyed_uniform(exp.seed, rng.STREAM_OMEGA, i,
                              np.arange(exp.nu, dtype=np.uint64)[None, :])
    eigs = eigvalsh_batch(st.matrices(potential_values(field_, exp.action(), omega,
                                                       st.shadow_sites)))
    flat = np.sort(eigs.reshape(-1))
    grid = np.linspace(flat[0], flat[-1], h.ids_points)
    ids = np.searchsorted(flat, grid, side="right") / flat.size
    rows = [(float(E), float(n)) for E, n in zip(grid, ids)]
    monotone = bool(np.all(np.diff(ids) >= 0))
    passed = monotone and ids[-1] == 1.0
    summary = {"dimension": st.dimension, "omega_samples": exp.omega_samples,
               "monotone": monotone, "spectrum_min": float(flat[0]),
               "spectrum_max": float(flat[-1])}
    return Outcome("ids", IDS_HEADER, rows, summary, passed,
                   replace(cfg, experiment=exp))


SUBCOMMANDS = {
    "spacing": run_spacing,
    "wegner-classical": _wegner("wegner-classical", run_classical_wegner),
    "wegner-iid2p": _wegner("wegner-iid2p", run_iid_two_particle),
    "wegner-qp1": _wegner("wegner-qp1", run_qp_one_volume),
    "wegner-qp2": _wegner("wegner-qp2", run_qp_two_volume),
    "stollmann": run_stollmann,
    "dm-check": run_dm_check,
    "ids": run_ids,
}


def run_subcommand(name, cfg):
    if name not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    return SUBCOMMANDS[name](cfg)


# --------------------------------------------------------------- output

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outcome(outcome, out_dir):
    """Write CSV, JSON summary and manifest; returns the three paths."""
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, outcome.name)
    csv_text = ",".join(outcome.header) + "\n" + "".join(
        ",".join(_cell(v) for v in row) + "\n" for row in outcome.rows)
    exit_code = EXIT_PASS if outcome.passed else EXIT_FAIL
    doc = {"schema": SCHEMA, "subcommand": outcome.name, "passed": bool(outcome.passed),
           "exit_code": exit_code, "csv": os.path.basename(base + ".csv"),
           "csv_header": list(outcome.header), "n_rows": len(outcome.rows),
           "summary": _clean(outcome.summary)}
    json_text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    manifest = (f"# qpwegner {__version__} numpy {np.__version__}\n"
                f"# subcommand: {outcome.name}\n"
                f"# outputs: {outcome.name}.csv {outcome.name}.json\n")
    if outcome.config is not None:
        manifest += format_config(outcome.config)
    paths = (base + ".csv", base + ".json", base + ".manifest.txt")
    for path, text in zip(paths, (csv_text, json_text, manifest)):
        _atomic_write(path, text)
    return paths
