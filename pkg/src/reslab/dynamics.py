"""Effective slow-time dynamics of the three quadratic nonlinearity cases.

Case A (conjugate-squared nonlinearity) has an empty resonance set: every
mode decouples into a complex Ornstein-Uhlenbeck equation

    da = -f(|k|^2) a dtau + b_k dbeta(tau),

solved exactly by the split integrator.  Case B (squared nonlinearity)
couples mode k3 to the ordered pairs of S1(k3):

    da3 = [-f a3 - i mu sum a1 a2] dtau + b3 dbeta3,

and case C (modulus-squared nonlinearity) to the ordered pairs of S2(k3)
with the second factor conjugated:

    da3 = [-f a3 - i mu sum conj(a2) a1] dtau + b3 dbeta3.

The coupling sums run over ordered pairs, so (k1, k2) and (k2, k1) are
visited separately; no hidden factors of 2.

Two integrators: plain Euler-Maruyama, and the default split scheme that
composes an explicit Euler substep for the coupling sum with the exact
damping/noise flow

    a <- a exp(-f h) + b xi sqrt((1 - exp(-2 f h)) / (2 f)),

(limit b sqrt(h) xi at f = 0), which integrates case A exactly in
distribution for any step size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .lattice import Domain, WaveVector
from .rng import complex_normals, path_generator
from .resonance import resonance_set

__all__ = [
    "SCHEMES",
    "CASES",
    "damping_profile",
    "forcing_profile",
    "ModeSystem",
    "StateVector",
    "SimConfig",
    "PathAbort",
    "build_mode_system",
    "drift",
    "step",
    "simulate_ensemble",
    "EnsembleStats",
    "zero_state",
    "constant_state",
]

CASES = ("A", "B", "C")
SCHEMES = ("euler-maruyama", "split-exact")

#: Fixed block width for ensemble reduction; independent of thread count so
#: the floating-point summation tree never changes.
BLOCK_SIZE = 64


def damping_profile(name: str, **kwargs) -> Callable[[int], float]:
    """Built-in damping profiles f(|k|^2), all nonnegative.

    ``constant`` (value), ``viscosity`` (scale * x), ``hyperviscosity``
    (scale * x^2).
    """
    if name == "constant":
        value = float(kwargs.pop("value", 1.0))
        profile = lambda n2: value
    elif name == "viscosity":
        scale = float(kwargs.pop("scale", 1.0))
        profile = lambda n2: scale * n2
    elif name == "hyperviscosity":
        scale = float(kwargs.pop("scale", 1.0))
        profile = lambda n2: scale * n2 * n2
    else:
        raise ValueError(f"unknown damping profile {name!r}")
    if kwargs:
        raise ValueError(f"unknown damping parameters {sorted(kwargs)}")
    return profile


def forcing_profile(name: str, **kwargs) -> Callable[[WaveVector], float]:
    """Built-in forcing amplitudes b_k.

    ``constant`` (value) and ``powerlaw`` (amplitude * (1+|k|^2)^-s).
    """
    if name == "constant":
        value = float(kwargs.pop("value", 1.0))
        profile = lambda k: value
    elif name == "powerlaw":
        s = float(kwargs.pop("s", 1.0))
        amplitude = float(kwargs.pop("amplitude", 1.0))
        profile = lambda k: amplitude * (1.0 + k.norm2) ** (-s)
    else:
        raise ValueError(f"unknown forcing profile {name!r}")
    if kwargs:
        raise ValueError(f"unknown forcing parameters {sorted(kwargs)}")
    return profile


@dataclass(frozen=True)
class _TriplePlan:
    """Scatter-add plan for the coupling sum, grouped by destination mode."""

    src_i: np.ndarray
    src_j: np.ndarray
    starts: np.ndarray
    dst: np.ndarray

    @property
    def n_triples(self) -> int:
        return len(self.src_i)


@dataclass(frozen=True)
class ModeSystem:
    """Finite mode set with per-mode resonant coupling lists.

    ``couplings[m]`` holds ordered index pairs (i, j): the drift at mode m
    gains -i mu a_i a_j (case B) or -i mu conj(a_j) a_i (case C) per pair.
    Case A coupling lists are empty.
    """

    case: str
    modes: tuple[WaveVector, ...]
    couplings: tuple[tuple[tuple[int, int], ...], ...]
    damping: np.ndarray
    forcing: np.ndarray
    mu: float

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @cached_property
    def index(self) -> dict[WaveVector, int]:
        return {k: i for i, k in enumerate(self.modes)}

    @cached_property
    def _plan(self) -> _TriplePlan:
        src_i, src_j, dst_m = [], [], []
        for m, pairs in enumerate(self.couplings):
            for (i, j) in pairs:
                src_i.append(i)
                src_j.append(j)
                dst_m.append(m)
        starts, dst = [], []
        for pos, m in enumerate(dst_m):
            if not dst or dst[-1] != m:
                starts.append(pos)
                dst.append(m)
        return _TriplePlan(
            src_i=np.asarray(src_i, dtype=np.intp),
            src_j=np.asarray(src_j, dtype=np.intp),
            starts=np.asarray(starts, dtype=np.intp),
            dst=np.asarray(dst, dtype=np.intp),
        )

    def nonlinear(self, a: np.ndarray) -> np.ndarray:
        """Coupling-sum drift -i mu sum(...), for (..., M) amplitude arrays."""
        out = np.zeros_like(a)
        plan = self._plan
        if plan.n_triples == 0:
            return out
        if self.case == "B":
            terms = a[..., plan.src_i] * a[..., plan.src_j]
        else:  # case C
            terms = np.conj(a[..., plan.src_j]) * a[..., plan.src_i]
        out[..., plan.dst] = np.add.reduceat(terms, plan.starts, axis=-1)
        return out * (-1j * self.mu)


@dataclass
class StateVector:
    """Interaction-representation amplitudes a_k at slow time tau."""

    amplitudes: np.ndarray
    tau: float = 0.0

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.tau)


@dataclass(frozen=True)
class SimConfig:
    """Numerical parameters of one slow-time ensemble run."""

    step: float
    horizon: float
    seed: int
    ensemble: int = 1
    scheme: str = "split-exact"
    save_stride: int = 1

    def __post_init__(self):
        if self.step <= 0 or self.horizon <= 0:
            raise ValueError("step and horizon must be positive")
        if self.step > self.horizon * (1 + 1e-12):
            raise ValueError("step must not exceed horizon")
        if self.ensemble < 1:
            raise ValueError("ensemble must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.save_stride < 1:
            raise ValueError("save_stride must be >= 1")
        n = round(self.horizon / self.step)
        if n < 1 or abs(n * self.step - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise ValueError("step must divide horizon")

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.step)

    def checkpoint_steps(self) -> list[int]:
        n = self.n_steps
        ck = list(range(0, n + 1, self.save_stride))
        if ck[-1] != n:
            ck.append(n)
        return ck


class PathAbort(RuntimeError):
    """A trajectory left the finite range (possible blow-up)."""

    def __init__(self, path: int, tau: float):
        super().__init__(f"path {path} became nonfinite at tau={tau:.6g}")
        self.path = path
        self.tau = tau


def build_mode_system(
    case: str,
    domain: Domain,
    mu: float,
    f: Callable[[int], float],
    b: Callable[[WaveVector], float],
    modes: list[WaveVector] | None = None,
) -> ModeSystem:
    """Assemble the mode set and resonant coupling lists for one case.

    ``modes`` defaults to every nonzero vector within the domain bound in
    lexicographic order; an explicit subset restricts couplings to pairs
    whose members both survive the truncation.
    """
    case = case.upper()
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}, got {case!r}")
    if modes is None:
        mode_list = list(domain.lattice_points())
    else:
        mode_list = sorted(set(modes), key=WaveVector.as_tuple)
        for k in mode_list:
            if k.is_zero:
                raise ValueError("zero wavevector cannot be a mode")
            if not domain.admits(k):
                raise ValueError(f"mode {k} outside domain")
    index = {k: i for i, k in enumerate(mode_list)}

    couplings: list[tuple[tuple[int, int], ...]] = []
    if case == "A":
        couplings = [() for _ in mode_list]
    else:
        kind = "s1" if case == "B" else "s2"
        for k3 in mode_list:
            pairs = [
                (index[k1], index[k2])
                for k1, k2 in resonance_set(kind, k3, domain)
                if k1 in index and k2 in index
            ]
            couplings.append(tuple(pairs))

    damping = np.array([f(k.norm2) for k in mode_list], dtype=float)
    forcing = np.array([b(k) for k in mode_list], dtype=float)
    if np.any(damping < 0):
        raise ValueError("damping profile must be nonnegative")
    if np.any(forcing < 0):
        raise ValueError("forcing amplitudes must be nonnegative")

    return ModeSystem(
        case=case,
        modes=tuple(mode_list),
        couplings=tuple(couplings),
        damping=damping,
        forcing=forcing,
        mu=float(mu),
    )


def zero_state(sys: ModeSystem, tau: float = 0.0) -> StateVector:
    return StateVector(np.zeros(sys.n_modes, dtype=complex), tau)


def constant_state(sys: ModeSystem, value: complex, tau: float = 0.0) -> StateVector:
    return StateVector(np.full(sys.n_modes, complex(value)), tau)


def drift(sys: ModeSystem, state: StateVector) -> np.ndarray:
    """Deterministic drift -f a + coupling sum, one complex value per mode."""
    a = np.asarray(state.amplitudes)
    if a.shape[-1] != sys.n_modes:
        raise ValueError("state length does not match mode system")
    return -sys.damping * a + sys.nonlinear(a)


def _advance(sys: ModeSystem, a: np.ndarray, h: float, scheme: str,
             xi: np.ndarray) -> np.ndarray:
    """One step on (..., M) amplitudes; ``xi`` are unit complex Gaussians."""
    if scheme == "euler-maruyama":
        da = (-sys.damping * a + sys.nonlinear(a)) * h
        return a + da + sys.forcing * math.sqrt(h) * xi
    # split-exact: explicit coupling substep, then exact damping/noise flow
    a_mid = a + h * sys.nonlinear(a)
    f = sys.damping
    decay = np.exp(-f * h)
    denom = np.where(f > 0, 2.0 * f, 1.0)
    var = np.where(f > 0, -np.expm1(-2.0 * f * h) / denom, h)
    return a_mid * decay + sys.forcing * np.sqrt(var) * xi


def step(sys: ModeSystem, state: StateVector, config: SimConfig,
         rng: np.random.Generator) -> StateVector:
    """Advance one slow-time step; raises :class:`PathAbort` on nonfinite."""
    xi = complex_normals(rng, sys.n_modes)
    with np.errstate(over="ignore", invalid="ignore"):
        a_new = _advance(sys, state.amplitudes, config.step, config.scheme, xi)
    tau_new = state.tau + config.step
    if not np.all(np.isfinite(a_new.view(float))):
        raise PathAbort(path=-1, tau=tau_new)
    return StateVector(a_new, tau_new)


@dataclass(frozen=True)
class EnsembleStats:
    """Per-mode ensemble statistics on the checkpoint grid.

    ``spectrum`` is the mean |a|^2 snapshot at the final time.  Paths that
    aborted are excluded from all statistics and listed in ``aborted``.
    """

    times: np.ndarray
    modes: tuple[WaveVector, ...]
    mean_a: np.ndarray
    mean_abs2: np.ndarray
    var_abs2: np.ndarray
    n_paths: int
    n_completed: int
    aborted: tuple[tuple[int, float], ...]

    @property
    def spectrum(self) -> np.ndarray:
        return self.mean_abs2[-1]

    @property
    def complete(self) -> bool:
        return self.n_completed == self.n_paths


def _run_block(sys, config, initial, p_lo, p_hi, ckpt):
    """Integrate paths [p_lo, p_hi); return per-block sums over completers."""
    B = p_hi - p_lo
    M = sys.n_modes
    gens = [path_generator(config.seed, p) for p in range(p_lo, p_hi)]
    a = np.tile(initial.amplitudes, (B, 1)).astype(complex)
    ck_pos = {s: c for c, s in enumerate(ckpt)}
    series = np.empty((B, len(ckpt), M), dtype=complex)
    alive = np.ones(B, dtype=bool)
    aborted = []
    if 0 in ck_pos:
        series[:, ck_pos[0], :] = a
    h = config.step
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(1, config.n_steps + 1):
            xi = np.empty((B, M), dtype=complex)
            for p in range(B):
                xi[p] = complex_normals(gens[p], M)
            a = _advance(sys, a, h, config.scheme, xi)
            bad = ~np.isfinite(a.view(float)).all(axis=1)
            newly = bad & alive
            if np.any(newly):
                for p in np.nonzero(newly)[0]:
                    aborted.append((p_lo + int(p), initial.tau + s * h))
                alive &= ~bad
                a[~alive] = 0.0  # frozen; excluded from stats below
            if s in ck_pos:
                series[:, ck_pos[s], :] = a
    done = series[alive]
    sums = {
        "a": done.sum(axis=0),
        "abs2": (done.real**2 + done.imag**2).sum(axis=0),
        "abs4": ((done.real**2 + done.imag**2) ** 2).sum(axis=0),
        "n": int(alive.sum()),
    }
    return sums, aborted


def simulate_ensemble(
    sys: ModeSystem,
    config: SimConfig,
    initial: StateVector,
    threads: int = 1,
) -> EnsembleStats:
    """Run independent paths and reduce statistics deterministically.

    Path p draws from a counter-based stream keyed by (seed, p); paths are
    processed in fixed-size blocks reduced in block order, so results are
    bit-identical for every thread count.
    """
    if len(initial.amplitudes) != sys.n_modes:
        raise ValueError("initial state length does not match mode system")
    ckpt = config.checkpoint_steps()
    blocks = [
        (lo, min(lo + BLOCK_SIZE, config.ensemble))
        for lo in range(0, config.ensemble, BLOCK_SIZE)
    ]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(
                ex.map(lambda b: _run_block(sys, config, initial, b[0], b[1], ckpt), blocks)
            )
    else:
        results = [_run_block(sys, config, initial, lo, hi, ckpt) for lo, hi in blocks]

    C, M = len(ckpt), sys.n_modes
    sum_a = np.zeros((C, M), dtype=complex)
    sum_abs2 = np.zeros((C, M))
    sum_abs4 = np.zeros((C, M))
    n_completed = 0
    aborted: list[tuple[int, float]] = []
    for sums, ab in results:  # fixed block order
        sum_a += sums["a"]
        sum_abs2 += sums["abs2"]
        sum_abs4 += sums["abs4"]
        n_completed += sums["n"]
        aborted.extend(ab)
    if n_completed == 0:
        raise PathAbort(path=aborted[0][0], tau=aborted[0][1])

    mean_a = sum_a / n_completed
    mean_abs2 = sum_abs2 / n_completed
    if n_completed > 1:
        var_abs2 = np.maximum(
            (sum_abs4 - n_completed * mean_abs2**2) / (n_completed - 1), 0.0
        )
    else:
        var_abs2 = np.zeros_like(mean_abs2)

    times = initial.tau + np.array(ckpt) * config.step
    return EnsembleStats(
        times=times,
        modes=sys.modes,
        mean_a=mean_a,
        mean_abs2=mean_abs2,
        var_abs2=var_abs2,
        n_paths=config.ensemble,
        n_completed=n_completed,
        aborted=tuple(sorted(aborted)),
    )
