"""Monte Carlo trajectory kernels for policy simulation.

Trajectory sampling is the package's one hot loop (10^5..10^6 chains per
level), so the kernel carries a numba @njit implementation with a pure-numpy
fallback.  Selection: numba when importable, unless LEAKRISK_NO_NUMBA=1 forces
the numpy path.

Both paths draw uniforms from the same counter-based generator (a splitmix64
hash of (seed, trajectory, step)), so they produce bit-identical counts, and
runs for different shutdown levels share uniforms (common random numbers).
With the transition rows in leak-state order this couples the sampled chains
monotonically across levels: riskier levels never show fewer ignitions on the
same draw.
"""

from __future__ import annotations

import os

import numpy as np

_MUL_SEED = np.uint64(0x9E3779B97F4A7C15)
_MUL_TRAJ = np.uint64(0xD1B54A32D192ED03)
_MUL_STEP = np.uint64(0x8CB92BA72F3D8DD7)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)
_SH_30 = np.uint64(30)
_SH_27 = np.uint64(27)
_SH_31 = np.uint64(31)
_SH_11 = np.uint64(11)
_ONE = np.uint64(1)
_INV_2_53 = float(2.0**-53)


def use_numba() -> bool:
    if os.environ.get("LEAKRISK_NO_NUMBA", "").strip().lower() in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def backend_name() -> str:
    return "numba" if use_numba() else "numpy"


def _cumulative(matrix: np.ndarray) -> np.ndarray:
    cum = np.cumsum(np.asarray(matrix, dtype=np.float64), axis=-1)
    cum[..., -1] = 1.0  # uniforms are < 1, so lookups never run off the row
    return cum


def _counts_numpy(
    cum: np.ndarray, p0cum: np.ndarray, steps: int, n_traj: int, seed: int
) -> np.ndarray:
    folded = np.uint64((seed * 0x9E3779B97F4A7C15 + 0x5851F42D4C957F2D) & 0xFFFFFFFFFFFFFFFF)
    traj = np.arange(n_traj, dtype=np.uint64) * _MUL_TRAJ

    def uniforms(step: int) -> np.ndarray:
        with np.errstate(over="ignore"):  # uint64 hash arithmetic wraps on purpose
            z = folded * _MUL_SEED + traj + np.uint64(step) * _MUL_STEP
            z = (z ^ (z >> _SH_30)) * _MIX_1
            z = (z ^ (z >> _SH_27)) * _MIX_2
            z = z ^ (z >> _SH_31)
            return (z >> _SH_11).astype(np.float64) * _INV_2_53

    counts = np.zeros((steps + 1, cum.shape[0]), dtype=np.int64)
    states = (uniforms(0)[:, None] >= p0cum[None, :]).sum(axis=1)
    counts[0] = np.bincount(states, minlength=cum.shape[0])
    for j in range(1, steps + 1):
        u = uniforms(j)
        states = (u[:, None] >= cum[states]).sum(axis=1)
        counts[j] = np.bincount(states, minlength=cum.shape[0])
    return counts


def _build_numba_kernel():
    from numba import njit

    mul_seed, mul_traj, mul_step = _MUL_SEED, _MUL_TRAJ, _MUL_STEP
    mix1, mix2 = _MIX_1, _MIX_2
    sh30, sh27, sh31, sh11 = _SH_30, _SH_27, _SH_31, _SH_11
    inv = _INV_2_53

    @njit(cache=True)
    def counts_kernel(cum, p0cum, steps, n_traj, folded):  # pragma: no cover - jit
        n_states = cum.shape[0]
        counts = np.zeros((steps + 1, n_states), dtype=np.int64)
        for i in range(n_traj):
            traj = np.uint64(i) * mul_traj
            z = folded * mul_seed + traj
            z = (z ^ (z >> sh30)) * mix1
            z = (z ^ (z >> sh27)) * mix2
            z = z ^ (z >> sh31)
            u = np.float64(z >> sh11) * inv
            s = 0
            while u >= p0cum[s]:
                s += 1
            counts[0, s] += 1
            for j in range(1, steps + 1):
                z = folded * mul_seed + traj + np.uint64(j) * mul_step
                z = (z ^ (z >> sh30)) * mix1
                z = (z ^ (z >> sh27)) * mix2
                z = z ^ (z >> sh31)
                u = np.float64(z >> sh11) * inv
                t = 0
                row = cum[s]
                while u >= row[t]:
                    t += 1
                s = t
                counts[j, s] += 1
        return counts

    return counts_kernel


_numba_kernel = None


def simulate_state_counts(
    matrix: np.ndarray, initial: np.ndarray, steps: int, n_traj: int, seed: int
) -> np.ndarray:
    """Sample ``n_traj`` Markov chains; return per-step state counts, shape (steps+1, k).

    Identical output on both backends for the same arguments.
    """
    if steps < 0 or n_traj <= 0:
        raise ValueError("steps must be >= 0 and n_traj > 0")
    cum = _cumulative(matrix)
    p0cum = _cumulative(initial)
    if use_numba():
        global _numba_kernel
        if _numba_kernel is None:
            _numba_kernel = _build_numba_kernel()
        folded = np.uint64((seed * 0x9E3779B97F4A7C15 + 0x5851F42D4C957F2D) & 0xFFFFFFFFFFFFFFFF)
        return _numba_kernel(cum, p0cum, steps, n_traj, folded)
    return _counts_numpy(cum, p0cum, steps, n_traj, seed)
