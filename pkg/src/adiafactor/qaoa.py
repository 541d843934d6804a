"""Variational outer loop: cost functions, multi-start optimization, depth sweeps."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import _kernels, analysis
from .hamiltonians import Model, cost_diagonal, problem_diagonal
from .instances import Instance, bitstring
from .simulator import MixerSpec, default_pattern, expectation, initial_state, run_ansatz

log = logging.getLogger(__name__)

FATOL = 1e-8
XATOL = 1e-8
MAXFEV_PER_LAYER = 500
# initial simplex edges: gamma in units of 1/max|E|, beta in radians
GAMMA_STEP = 2.0
BETA_STEP = 0.25
TOP_K = 10


def wrap_angle(x, period: float = 2 * math.pi):
    """Map angles into ``[-period/2, period/2)``."""
    half = period / 2
    return np.mod(np.asarray(x, dtype=np.float64) + half, period) - half


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas):
            raise ValueError("gammas and betas must have equal length")

    @property
    def layers(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "QaoaParams":
        x = np.asarray(x, dtype=np.float64)
        l = x.size // 2
        return cls(tuple(map(float, x[:l])), tuple(map(float, x[l:])))

    def to_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas, dtype=np.float64)

    def extended(self) -> "QaoaParams":
        """Append an identity layer (gamma = beta = 0)."""
        return QaoaParams(self.gammas + (0.0,), self.betas + (0.0,))

    def canonical(self, omega: float = 1.0) -> "QaoaParams":
        # integer diagonals give gamma period 2*pi; the mixer has period 2*pi/omega
        g = wrap_angle(self.gammas)
        b = wrap_angle(self.betas, 2 * math.pi / omega)
        return QaoaParams(tuple(map(float, g)), tuple(map(float, b)))


def cost(state: np.ndarray, inst: Instance, model: Model | str) -> float:
    """C_QP = <H_QP> for PUBO, C_LP = <|H_LP|> for QUBO."""
    return expectation(state, cost_diagonal(inst, model))


class Objective:
    """Cost as a function of the flat parameter vector ``[gammas, betas]``."""

    def __init__(self, inst: Instance, model: Model | str, pattern: str | None = None,
                 mixer: MixerSpec = MixerSpec()):
        self.inst = inst
        self.model = Model(model)
        self.pattern = pattern or default_pattern(self.model)
        self.omega = mixer.omega
        self.energies = problem_diagonal(inst, self.model).energies
        self.costs = cost_diagonal(inst, self.model).energies
        self.psi0 = initial_state(inst.n, self.pattern)
        self.nfev = 0

    def state(self, x: np.ndarray) -> np.ndarray:
        return _kernels.evolve(self.psi0, self.energies, np.asarray(x, dtype=np.float64), self.omega)

    def __call__(self, x: np.ndarray) -> float:
        self.nfev += 1
        return _kernels.qaoa_cost(self.psi0, self.energies, self.costs,
                                  np.asarray(x, dtype=np.float64), self.omega)


@dataclass(frozen=True)
class DepthResult:
    params: QaoaParams
    c_min: float
    converged: bool
    nfev: int
    best_start: int


def _simplex(x0: np.ndarray, energy_scale: float) -> np.ndarray:
    l = x0.size // 2
    steps = np.concatenate([np.full(l, GAMMA_STEP / energy_scale), np.full(l, BETA_STEP)])
    return np.vstack([x0, x0 + np.diag(steps)])


def _start_points(layers: int, seed: int, restarts: int,
                  warm_start: QaoaParams | None) -> list[np.ndarray]:
    if warm_start is not None:
        if warm_start.layers != layers - 1:
            raise ValueError(f"warm start has {warm_start.layers} layers, expected {layers - 1}")
        first = warm_start.extended().to_vector()
    else:
        first = np.zeros(2 * layers)
    points = [first]
    for r in range(1, restarts):
        rng = np.random.default_rng([seed, layers, r])
        points.append(rng.uniform(-math.pi, math.pi, size=2 * layers))
    return points


def _local_search(inst: Instance, model: Model, pattern: str, omega: float,
                  x0: np.ndarray, maxfev: int) -> tuple[np.ndarray, bool, int]:
    f = Objective(inst, model, pattern, MixerSpec(omega))
    res = minimize(
        f, x0, method="Nelder-Mead",
        options={
            "maxfev": maxfev,
            "fatol": FATOL,
            "xatol": XATOL,
            "adaptive": True,
            "initial_simplex": _simplex(x0, float(np.abs(f.energies).max())),
        },
    )
    return np.asarray(res.x), bool(res.success), f.nfev


def _local_search_star(args):
    return _local_search(*args)


def optimize_depth(
    inst: Instance,
    model: Model | str,
    layers: int,
    seed: int = 0,
    restarts: int = 10,
    warm_start: QaoaParams | None = None,
    pattern: str | None = None,
    mixer: MixerSpec = MixerSpec(),
    workers: int = 1,
) -> DepthResult:
    """Best of ``restarts`` Nelder-Mead runs at fixed depth.

    Start 0 is ``warm_start`` extended by an identity layer (or the origin
    when there is none); the rest are uniform draws in ``[-pi, pi]``
    seeded by ``(seed, layers, restart index)``.
    """
    if layers < 1:
        raise ValueError("layers must be at least 1")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    model = Model(model)
    pattern = pattern or default_pattern(model)
    starts = _start_points(layers, seed, restarts, warm_start)
    maxfev = MAXFEV_PER_LAYER * layers
    jobs = [(inst, model, pattern, mixer.omega, x0, maxfev) for x0 in starts]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_local_search_star, jobs))
    else:
        results = [_local_search(*job) for job in jobs]

    f = Objective(inst, model, pattern, mixer)
    candidates = []
    for r, (x, ok, nfev) in enumerate(results):
        p = QaoaParams.from_vector(x).canonical(mixer.omega)
        candidates.append((f(p.to_vector()), r, p, ok))
    if warm_start is not None:
        # the extended warm start is exact, so this pins C_min(l) <= C_min(l-1)
        w = warm_start.extended()
        candidates.append((f(w.to_vector()), -1, w, True))
    c_min, best, params, ok = min(candidates, key=lambda t: (t[0], t[1]))
    total = sum(nfev for _, _, nfev in results)
    if not ok:
        log.info("N=%d %s l=%d: best start hit the evaluation cap", inst.N, model, layers)
    return DepthResult(params, c_min, ok, total, best)


@dataclass
class DepthRecord:
    l: int
    c_min: float
    gammas: list[float]
    betas: list[float]
    fidelity: float
    confidence: float
    populations: list[dict]
    solution_rank: int
    converged: bool
    nfev: int
    c_ratio_prev: float | None
    c_ratio_first: float | None


@dataclass
class RunRecord:
    N: int
    n: int
    model: str
    pattern: str
    seed: int
    restarts: int
    omega: float
    depths: list[DepthRecord] = field(default_factory=list)

    @property
    def c_min(self) -> list[float]:
        return [d.c_min for d in self.depths]

    @property
    def final(self) -> DepthRecord:
        return self.depths[-1]


def _ratio(a: float, b: float) -> float | None:
    return a / b if b > 0 else None


def depth_record(inst: Instance, model: Model, l: int, res: DepthResult, pattern: str,
                 mixer: MixerSpec, first: float | None, prev: float | None,
                 top_k: int = TOP_K) -> DepthRecord:
    psi = run_ansatz(inst, model, res.params.gammas, res.params.betas, pattern, mixer)
    probs = psi.real**2 + psi.imag**2
    rep = analysis.population_report(psi, top_k, inst)
    return DepthRecord(
        l=l,
        c_min=res.c_min,
        gammas=list(res.params.gammas),
        betas=list(res.params.betas),
        fidelity=analysis.fidelity(psi, inst),
        confidence=analysis.confidence(probs / probs.sum()),
        populations=[
            {"bitstring": e.bitstring, "probability": e.probability, "is_solution": e.is_solution}
            for e in rep.entries
        ] + [{"bitstring": "Others", "probability": rep.others, "is_solution": False}],
        solution_rank=rep.solution_rank,
        converged=res.converged,
        nfev=res.nfev,
        c_ratio_prev=_ratio(res.c_min, prev) if prev is not None else None,
        c_ratio_first=_ratio(res.c_min, first) if first is not None else None,
    )


def depth_sweep(
    inst: Instance,
    model: Model | str,
    l_max: int,
    seed: int = 0,
    restarts: int = 10,
    pattern: str | None = None,
    mixer: MixerSpec = MixerSpec(),
    workers: int = 1,
    top_k: int = TOP_K,
) -> RunRecord:
    """Optimize depths ``1..l_max``, warm-starting each from the previous optimum."""
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    model = Model(model)
    pattern = pattern or default_pattern(model)
    rec = RunRecord(inst.N, inst.n, model.value, pattern, seed, restarts, mixer.omega)
    warm = None
    first = prev = None
    for l in range(1, l_max + 1):
        res = optimize_depth(inst, model, l, seed, restarts, warm, pattern, mixer, workers)
        ref = res.c_min if first is None else first
        rec.depths.append(depth_record(inst, model, l, res, pattern, mixer, ref, prev, top_k))
        log.debug("N=%d %s l=%d C_min=%.6g", inst.N, model, l, res.c_min)
        if first is None:
            first = res.c_min
        prev = res.c_min
        warm = res.params
    return rec
