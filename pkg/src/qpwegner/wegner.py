"""Monte Carlo experiments for eigenvalue concentration (Wegner-type) bounds.

Five modes share one pipeline: draw a stream of samples, compute one
distance per sample (spectrum to energy, or spectrum to spectrum), then
threshold that single array at every ``epsilon`` of the grid.

* ``classical-1p``       IID uniform one-particle Anderson model, bound ``|Lambda| eps``.
* ``iid-2p-one-volume``  IID two-particle model, bound ``|Lambda|^{3/2} s(2 eps)``.
* ``iid-2p-two-volume``  two separated cubes, bound ``|Lambda|^{3/2} |Lambda'| s(2 eps)``.
* ``qp-one-volume``      randelette potential at fixed theta, probability over omega.
* ``qp-two-volume``      same, distance between the spectra of two separated cubes.

Every sample is a pure function of ``(seed, sample index)``, so results do
not depend on the block size or the number of threads.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
import math

import numpy as np

from . import rng
from .hamiltonian import (InteractionSpec, TwoParticleCube, TwoParticleStructure, adjacency,
                          as_pair, cube_distance, exchange, separation_ok)
from .randelette import (CoefficientSchedule, RandeletteField, ThetaSample, coefficient,
                         conditional_density_bound, default_truncation, potential_values,
                         tail_bound)
from .spectral import EigenVerificationError, batch_dist_between, batch_dist_to_energy
from .stats import (ConcentrationEstimate, SlopeFit, estimates_from_distances,
                    fit_epsilon_slope, wilson_interval)
from .stollmann import concentration_uniform_clipped, sample_uniform_params
from .torus import LatticeCube, ShiftAction, min_spacing, separation_level

__all__ = [
    "MODES", "ConfigError", "WegnerExperimentConfig", "ExperimentResult", "Geometry",
    "wilson_interval", "fit_epsilon_slope", "ConcentrationEstimate", "SlopeFit",
    "run_classical_wegner", "run_iid_two_particle", "run_qp_one_volume",
    "run_qp_two_volume", "run_experiment", "qp_geometry", "sample_distances",
]

MODES = ("classical-1p", "iid-2p-one-volume", "iid-2p-two-volume", "qp-one-volume",
         "qp-two-volume")

BLOCK = 2048


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the violated condition."""


def _grid(lo, hi, k):
    return tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), k))


# per-mode defaults applied to fields left as None
MODE_DEFAULTS = {
    "classical-1p": dict(center=(0,), L=2, epsilon_grid=(0.002, 0.005, 0.01, 0.02),
                         omega_samples=100_000),
    "iid-2p-one-volume": dict(center=(0, 0), L=1, epsilon_grid=(0.002, 0.005, 0.01, 0.02),
                              omega_samples=100_000),
    "iid-2p-two-volume": dict(center=(0, 0), center2=(20, 25), L=1,
                              epsilon_grid=(0.0005, 0.001, 0.002, 0.005),
                              omega_samples=100_000),
    "qp-one-volume": dict(center=(0, 1), L=2, r=2.0, epsilon_grid=_grid(1e-3, 1e-1, 9),
                          omega_samples=10_000),
    "qp-two-volume": dict(center=(0, 3), center2=(20, 23), L=2, r=5.0,
                          epsilon_grid=_grid(1e-5, 1e-3, 9), omega_samples=10_000),
}


@dataclass
class WegnerExperimentConfig:
    """All parameters of one experiment.  ``None`` means "mode default"."""

    mode: str = "qp-one-volume"
    d: int = 1
    nu: int = 1
    L: int = None
    center: tuple = None
    center2: tuple = None
    r: float = None
    b: float = 1.0
    E: float = 0.0
    epsilon_grid: tuple = None
    omega_samples: int = None
    seed: int = 1
    theta_seed: int = 1
    frequency: tuple = None
    c_upper: float = 1.0
    c_lower: float = 1.0
    kappa: float = 2.0
    M: float = 2.0
    alternating: bool = False
    truncation_N: int = 0
    interaction_strength: float = 1.0
    interaction_range: int = 1
    enclosing_center: tuple = None
    norm: str = "max"
    threads: int = 1
    verify_eigen: bool = False
    slope_min: float = 0.8
    slope_max: float = 1.2

    def resolved(self):
        """Copy with mode defaults filled in and every invariant checked."""
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        cfg = replace(self)
        for key, val in MODE_DEFAULTS[self.mode].items():
            if getattr(cfg, key) is None:
                setattr(cfg, key, val)
        if cfg.r is None:
            cfg.r = 2.0
        cfg.validate()
        return cfg

    # ------------------------------------------------------------------ checks
    def validate(self):
        if self.d < 1 or self.nu < 1:
            raise ConfigError("d and nu must be positive")
        if self.L is None or self.L < 0:
            raise ConfigError("L must be a nonnegative integer")
        if not self.r > 1.0:
            raise ConfigError(f"r must satisfy r > 1 (enclosing scale L^r), got r={self.r}")
        if not self.b > 0.0:
            raise ConfigError("b must be positive")
        if not self.epsilon_grid or any(e < 0 for e in self.epsilon_grid):
            raise ConfigError("epsilon_grid must be a nonempty list of nonnegative reals")
        if self.omega_samples is None or self.omega_samples < 1:
            raise ConfigError("omega_samples must be a positive integer")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.norm not in ("max", "euclidean"):
            raise ConfigError("norm must be 'max' or 'euclidean'")
        self.schedule()
        if self.frequency is not None and len(self.frequency) != self.nu * self.d:
            raise ConfigError(f"frequency needs nu*d = {self.nu * self.d} entries "
                              "(row-major nu x d matrix)")
        ncenter = self.d if self.mode == "classical-1p" else 2 * self.d
        if len(self.center) != ncenter:
            raise ConfigError(f"center needs {ncenter} integers for mode {self.mode}")
        if self.mode.endswith("two-volume"):
            if self.center2 is None or len(self.center2) != 2 * self.d:
                raise ConfigError(f"center2 needs {2 * self.d} integers for mode {self.mode}")
            if not separation_ok(self.center, self.center2, self.L, self.norm):
                raise ConfigError(
                    "(2.5) separation violated: min(|u'-u''|, |u'-S(u'')|) must exceed 8L = "
                    f"{8 * self.L}")
        if self.mode.startswith("qp"):
            if self.L < 1:
                raise ConfigError("quasi-periodic modes need L >= 1")
            if self.mode == "qp-two-volume":
                dist = cube_distance(self.center, self.center2, self.norm)
                if dist > self.L ** self.r:
                    raise ConfigError(f"|u'-u''| = {dist:g} exceeds L^r = {self.L ** self.r:g}")
            qp_geometry(self)

    def schedule(self):
        try:
            return CoefficientSchedule(self.c_upper, self.c_lower, self.kappa, self.M,
                                       self.alternating)
        except ValueError as exc:
            raise ConfigError(f"(1.4) coefficient decay: {exc}") from None

    def action(self):
        if self.frequency is None:
            if self.d == 1 and self.nu == 1:
                return ShiftAction()
            raise ConfigError("frequency must be given unless d = nu = 1")
        A = np.asarray(self.frequency, dtype=float).reshape(self.nu, self.d)
        return ShiftAction(A, warn=False)

    def interaction(self):
        return InteractionSpec(self.interaction_strength, self.interaction_range)

    def cubes(self):
        out = [TwoParticleCube(self.center, self.L)]
        if self.mode.endswith("two-volume"):
            out.append(TwoParticleCube(self.center2, self.L))
        return out

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Geometry:
    """Enclosing cube ``Lambda_N(v)`` and the resulting separation level."""

    N: int
    v: tuple
    delta_N: float
    n0: int
    truncation_N: int


def _shadow_union(cubes):
    from .hamiltonian import shadow
    return np.unique(np.concatenate([shadow(c) for c in cubes]), axis=0)


def qp_geometry(cfg):
    cubes = cfg.cubes()
    sites = _shadow_union(cubes)
    N = math.ceil(cfg.L ** cfg.r - 1e-12)
    if cfg.enclosing_center is None:
        v = tuple(int(x) for x in np.floor((sites.min(axis=0) + sites.max(axis=0)) / 2))
    else:
        v = tuple(int(x) for x in cfg.enclosing_center)
        if len(v) != cfg.d:
            raise ConfigError(f"enclosing_center needs {cfg.d} integers")
    if np.abs(sites - np.array(v)).max() > N:
        raise ConfigError(f"shadows do not fit inside the enclosing cube Lambda_N(v) with "
                          f"N = ceil(L^r) = {N}, v = {v}")
    delta = min_spacing(cfg.action(), np.zeros(cfg.nu), LatticeCube(v, N))
    n0 = separation_level(delta)
    sched = cfg.schedule()
    if cfg.truncation_N:
        if cfg.truncation_N < n0 + 4:
            raise ConfigError(f"truncation_N = {cfg.truncation_N} must be at least n0(N) + 4 = "
                              f"{n0 + 4} so the separating level is resolved")
        trunc = cfg.truncation_N
    else:
        trunc = default_truncation(sched, n0)
    return Geometry(N, v, float(delta), n0, trunc)


@dataclass
class ExperimentResult:
    mode: str
    estimates: list
    bounds: list
    passed: bool
    details: dict = field(default_factory=dict)

    def rows(self):
        return [(e.epsilon, e.p_hat, e.ci_low, e.ci_high, e.n_samples, b)
                for e, b in zip(self.estimates, self.bounds)]


# ---------------------------------------------------------------- sampling

def _eig(H, verify):
    # verification never changes the returned values, only whether they are trusted
    vals = np.linalg.eigvalsh(H)
    if not verify:
        return vals
    lam, Z = np.linalg.eigh(H)
    res = np.linalg.norm(H @ Z - Z * lam[..., None, :], axis=-2)
    scale = 1.0 + np.abs(H).sum(axis=-1).max(axis=-1)
    if np.any(res > 1e-10 * scale[..., None]):
        raise EigenVerificationError("eigenpair residual check failed")
    if np.any(np.abs(lam - vals) > 1e-10 * scale[..., None]):
        raise EigenVerificationError("eigenvalue routes disagree")
    tr = np.trace(H, axis1=-2, axis2=-1)
    if np.any(np.abs(vals.sum(axis=-1) - tr) > 1e-9 * H.shape[-1]):
        raise EigenVerificationError("eigenvalue sum does not match the trace")
    return vals


def _omega_block(cfg, start, n):
    i = np.arange(start, start + n, dtype=np.uint64)[:, None]
    j = np.arange(cfg.nu, dtype=np.uint64)[None, :]
    return rng.keyed_uniform(cfg.seed, rng.STREAM_OMEGA, i, j)


def _make_sampler(cfg, check=True):
    """Return ``block(start, n) -> distances`` for the configured mode."""
    mode = cfg.mode
    verify = cfg.verify_eigen
    if mode == "classical-1p":
        cube = LatticeCube(cfg.center, cfg.L)
        A = adjacency(cube)
        idx = np.diag_indices(A.shape[0])

        def block(start, n):
            q = sample_uniform_params(cfg.seed, n, A.shape[0], start)
            H = np.broadcast_to(A, (n,) + A.shape).copy()
            H[:, idx[0], idx[1]] = q
            return batch_dist_to_energy(_eig(H, verify), cfg.E)
        return block

    cubes = cfg.cubes()
    union = _shadow_union(cubes)
    structures = [TwoParticleStructure(c, cfg.interaction(), union) for c in cubes]

    if mode.startswith("iid"):
        def potentials(start, n):
            return sample_uniform_params(cfg.seed, n, len(union), start)
    else:
        geo = qp_geometry(cfg) if check else _unchecked_geometry(cfg)
        field_ = RandeletteField(cfg.schedule(), ThetaSample(cfg.theta_seed), cfg.nu,
                                 geo.truncation_N)
        action = cfg.action()

        def potentials(start, n):
            return potential_values(field_, action, _omega_block(cfg, start, n), union)

    def block(start, n):
        v = potentials(start, n)
        spectra = [_eig(st.matrices(v), verify) for st in structures]
        if len(spectra) == 1:
            return batch_dist_to_energy(spectra[0], cfg.E)
        return batch_dist_between(spectra[0], spectra[1])
    return block


def _unchecked_geometry(cfg):
    N = math.ceil(cfg.L ** cfg.r - 1e-12)
    trunc = cfg.truncation_N or default_truncation(cfg.schedule(), 1)
    return Geometry(N, (0,) * cfg.d, float("nan"), 1, trunc)


def sample_distances(cfg, check=True):
    """Per-sample distances for a resolved configuration, in sample order."""
    block = _make_sampler(cfg, check)
    starts = list(range(0, cfg.omega_samples, BLOCK))
    sizes = [min(BLOCK, cfg.omega_samples - s) for s in starts]
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            parts = list(pool.map(block, starts, sizes))
    else:
        parts = [block(s, n) for s, n in zip(starts, sizes)]
    return np.concatenate(parts)


# ---------------------------------------------------------------- runners

def _require(cfg, *modes):
    cfg = cfg.resolved()
    if cfg.mode not in modes:
        raise ConfigError(f"mode {cfg.mode!r} not handled here (expected {', '.join(modes)})")
    return cfg


def _monotone(estimates):
    return all(a.p_hat <= b.p_hat for a, b in
               zip(estimates, estimates[1:]) if a.epsilon <= b.epsilon)


def run_classical_wegner(cfg):
    """One-particle IID model against ``|Lambda| * ||p||_inf * eps`` (here ``||p||_inf = 1``)."""
    cfg = _require(cfg, "classical-1p")
    est = estimates_from_distances(sample_distances(cfg), cfg.epsilon_grid)
    volume = (2 * cfg.L + 1) ** cfg.d
    bounds = [volume * e.epsilon for e in est]
    passed = all(e.ci_low <= b for e, b in zip(est, bounds))
    return ExperimentResult(cfg.mode, est, bounds, passed,
                            {"volume": volume, "density_sup": 1.0, "E": cfg.E})


def run_iid_two_particle(cfg):
    """Two-particle IID model against the one- or two-volume bound."""
    cfg = _require(cfg, "iid-2p-one-volume", "iid-2p-two-volume")
    est = estimates_from_distances(sample_distances(cfg), cfg.epsilon_grid)
    volume = (2 * cfg.L + 1) ** (2 * cfg.d)
    factor = volume ** 1.5 * (volume if cfg.mode == "iid-2p-two-volume" else 1)
    bounds = [factor * concentration_uniform_clipped(2 * e.epsilon) for e in est]
    passed = all(e.ci_low <= b for e, b in zip(est, bounds))
    return ExperimentResult(cfg.mode, est, bounds, passed,
                            {"volume": volume, "bound_prefactor": factor})


def _qp_result(cfg, est, geo, volume_power):
    sched = cfg.schedule()
    logN = max(math.log(geo.N), 1.0)
    shape_log = logN ** cfg.M * cfg.L ** (volume_power * cfg.d)
    shape_statement = cfg.L ** (cfg.M + cfg.b + volume_power * cfg.d + cfg.r)
    usable = [e for e in est if e.epsilon > 0]
    c_log = max((e.p_hat / (shape_log * e.epsilon) for e in usable), default=0.0)
    c_statement = max((e.p_hat / (shape_statement * e.epsilon) for e in usable), default=0.0)
    bounds = [c_log * shape_log * e.epsilon for e in est]
    details = {
        "N": geo.N, "v": list(geo.v), "delta_N": geo.delta_N, "n0": geo.n0,
        "a_n0": coefficient(sched, geo.n0),
        "conditional_density_bound": conditional_density_bound(sched, geo.n0),
        "truncation_N": geo.truncation_N, "tail_bound": tail_bound(sched, geo.truncation_N),
        "shape_log": shape_log, "shape_statement": shape_statement,
        "fitted_C_log": c_log, "fitted_C_statement": c_statement,
        "monotone": _monotone(est),
    }
    try:
        fit = fit_epsilon_slope(est)
    except ValueError as exc:
        details.update(slope=None, slope_stderr=None, fit_error=str(exc))
        passed = False
    else:
        details.update(slope=fit.slope, slope_stderr=fit.slope_stderr,
                       intercept=fit.intercept, fit_points=fit.n_points)
        passed = cfg.slope_min <= fit.slope <= cfg.slope_max and details["monotone"]
    return ExperimentResult(cfg.mode, est, bounds, passed, details)


def run_qp_one_volume(cfg):
    """``P_omega{dist(Sigma(omega; theta), E) <= eps}`` at fixed theta."""
    cfg = _require(cfg, "qp-one-volume")
    geo = qp_geometry(cfg)
    est = estimates_from_distances(sample_distances(cfg), cfg.epsilon_grid)
    return _qp_result(cfg, est, geo, 3)


def run_qp_two_volume(cfg, *, check=True):
    """``P_omega{dist(Sigma', Sigma'') <= eps}`` at fixed theta.

    ``check=False`` skips the separation and enclosure checks; it exists to
    demonstrate what goes wrong when the separation condition fails.
    """
    if check:
        cfg = _require(cfg, "qp-two-volume")
        geo = qp_geometry(cfg)
    else:
        cfg = replace(cfg)
        for key, val in MODE_DEFAULTS["qp-two-volume"].items():
            if getattr(cfg, key) is None:
                setattr(cfg, key, val)
        geo = _unchecked_geometry(cfg)
    est = estimates_from_distances(sample_distances(cfg, check), cfg.epsilon_grid)
    return _qp_result(cfg, est, geo, 5)


RUNNERS = {
    "classical-1p": run_classical_wegner,
    "iid-2p-one-volume": run_iid_two_particle,
    "iid-2p-two-volume": run_iid_two_particle,
    "qp-one-volume": run_qp_one_volume,
    "qp-two-volume": run_qp_two_volume,
}


def run_experiment(cfg):
    if cfg.mode not in RUNNERS:
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    return RUNNERS[cfg.mode](cfg)
