"""Keyed counter-based uniform generator.

Every random number used by the package is a pure function of a key tuple
``(seed, stream, c1, c2, ...)``.  The mixing function is the SplitMix64
finalizer applied along the key, so values never depend on query order or
on how work is split between threads.
"""
import numpy as np

__all__ = ["mix64", "keyed_bits", "keyed_uniform", "STREAM_THETA",
           "STREAM_OMEGA", "STREAM_IID", "STREAM_AUX"]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)

# stream tags keep the different uses of a single seed apart
STREAM_THETA = 0x7468657461          # grand-ensemble parameters
STREAM_OMEGA = 0x6F6D656761          # Haar samples on the torus
STREAM_IID = 0x696964                # IID site potentials
STREAM_AUX = 0x617578                # everything else (test draws, q/r/t)


def _u64(x):
    x = np.asarray(x)
    if x.dtype == np.uint64:
        return x
    if x.dtype.kind == "i":
        return x.astype(np.int64).view(np.uint64) if x.ndim else np.uint64(int(x) & 0xFFFFFFFFFFFFFFFF)
    return np.asarray(x, dtype=np.uint64)


def mix64(z):
    """SplitMix64 output function on a uint64 array (wrapping arithmetic)."""
    z = np.array(z, dtype=np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        z = z ^ (z >> _S31)
    return z


def keyed_bits(seed, stream, *counters):
    """64 random bits for every broadcast combination of the counters."""
    h = mix64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF) + _GAMMA)
    with np.errstate(over="ignore"):
        h = mix64(h ^ mix64(np.uint64(int(stream) & 0xFFFFFFFFFFFFFFFF) + _GAMMA))
        for c in counters:
            c = _u64(c)
            h = mix64((h * _GAMMA) ^ mix64(c + _GAMMA))
    return h


def keyed_uniform(seed, stream, *counters):
    """Uniform doubles in [0, 1) with 53 random bits each."""
    bits = keyed_bits(seed, stream, *counters)
    return (bits >> _S11).astype(np.float64) * (1.0 / 9007199254740992.0)
