"""Random point sensing and l1 recovery in the orthonormal Haar basis.

A field is observed at ``m`` randomly placed sensors (a row-subsampled
identity). Each real channel is reconstructed by basis pursuit,

    minimize ||c||_1  subject to  (H^T c)[indices] = g,

with ``H`` the orthonormal Haar analysis matrix, and synthesized back to the
full grid. The problem is solved as a linear program in split form
``c = u - v`` with a primal-dual interior-point method; the final support is
then re-solved exactly and certified by the dual variable.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import MTooLarge, NotConverged, PlanMismatch
from .signal_model import ComplexField, Grid1D
from .wavelet import haar_dwt, haar_idwt, is_power_of_two

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "ROGUEWAVE_SEED"


@dataclass(frozen=True, eq=False)
class SensingPlan:
    """Sorted sensor positions drawn from ``[0, n)`` with ``seed``."""

    n: int
    m: int
    indices: np.ndarray
    seed: int

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64)
        if idx.shape != (self.m,):
            raise ValueError(f"expected {self.m} indices, got {idx.size}")
        if self.m > self.n:
            raise MTooLarge(f"m={self.m} exceeds n={self.n}")
        if idx.size and (idx[0] < 0 or idx[-1] >= self.n or np.any(np.diff(idx) <= 0)):
            raise ValueError("indices must be strictly increasing within [0, n)")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __eq__(self, other):
        if not isinstance(other, SensingPlan):
            return NotImplemented
        return (
            (self.n, self.m, self.seed) == (other.n, other.m, other.seed)
            and np.array_equal(self.indices, other.indices)
        )


@dataclass(frozen=True, eq=False)
class Measurements:
    plan: SensingPlan
    values: np.ndarray
    time: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.plan.m,):
            raise PlanMismatch(f"expected {self.plan.m} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("measurements must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time", float(self.time))

    def __eq__(self, other):
        if not isinstance(other, Measurements):
            return NotImplemented
        return (
            self.plan == other.plan
            and self.time == other.time
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class BpConfig:
    """Stopping rules for :func:`basis_pursuit`.

    ``feasibility_tol`` bounds ``||A c - g||_2 / max(1, ||g||_2)``;
    ``gap_tol`` bounds the primal-dual gap relative to ``max(1, ||c||_1)``.
    ``step_fraction`` is how far along the boundary-limited step each
    interior-point update goes.
    """

    feasibility_tol: float = 1e-10
    max_iterations: int = 50_000
    gap_tol: float = 1e-9
    step_fraction: float = 0.995

    def __post_init__(self):
        if not self.feasibility_tol > 0:
            raise ValueError("feasibility_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.gap_tol > 0:
            raise ValueError("gap_tol must be positive")
        if not 0 < self.step_fraction < 1:
            raise ValueError("step_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class BpSolution:
    coefficients: np.ndarray
    iterations: int
    residual: float
    gap: float
    converged: bool


@dataclass(frozen=True)
class RecoveryResult:
    field: ComplexField
    coefficients: tuple[np.ndarray, np.ndarray]  # (real channel, imaginary channel)
    iterations: int
    residual: float
    converged: bool
    channels: tuple[BpSolution, BpSolution] = dc_field(repr=False, default=None)


def resolve_seed(seed: int | None) -> int:
    """Explicit seed, else ``$ROGUEWAVE_SEED``, else 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env not in (None, "") else 0


def make_plan(n: int, m: int, seed: int) -> SensingPlan:
    if m > n:
        raise MTooLarge(f"m={m} exceeds n={n}")
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=m, replace=False))
    return SensingPlan(n=n, m=m, indices=idx, seed=int(seed))


def sample(field: ComplexField, plan: SensingPlan) -> Measurements:
    if plan.n != field.grid.n_points:
        raise PlanMismatch(f"plan is for n={plan.n}, field has {field.grid.n_points} points")
    return Measurements(plan=plan, values=field.values[plan.indices], time=field.time)


# --- constraint operator A = S H^T -----------------------------------------

def sensing_matrix(plan: SensingPlan) -> np.ndarray:
    """Dense ``A`` (m x n): row k is Haar synthesis evaluated at indices[k].

    Its rows are orthonormal, i.e. ``A @ A.T == I``.
    """
    rows = np.zeros((plan.m, plan.n))
    rows[np.arange(plan.m), plan.indices] = 1.0
    return haar_dwt(rows)


def _duality_gap(c: np.ndarray, nu: np.ndarray, g: np.ndarray, A: np.ndarray) -> float:
    """||c||_1 minus the dual objective at ``nu`` scaled into ||A^T nu||_inf <= 1."""
    scale = max(1.0, float(np.max(np.abs(A.T @ nu))))
    return float(np.sum(np.abs(c)) - g @ nu / scale)


def _polish(c, nu, g, A, rel):
    """Re-solve on the support ``|c| > rel * max|c|`` and move ``nu`` onto its
    sign pattern. Returns ``(c, nu)`` or ``None`` when the signs disagree."""
    mag = np.abs(c)
    support = np.flatnonzero(mag > rel * mag.max())
    cols = A[:, support]
    coef, *_ = np.linalg.lstsq(cols, g, rcond=None)
    signs = np.sign(coef)
    if np.any(signs != np.sign(c[support])):
        return None
    out = np.zeros(A.shape[1])
    out[support] = coef
    # smallest correction of nu satisfying A_S^T nu = sign(c_S)
    corr, *_ = np.linalg.lstsq(cols.T, signs - cols.T @ nu, rcond=None)
    return out, nu + corr


def _max_step(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return 1.0
    return min(1.0, float(np.min(-v[neg] / dv[neg])))


def _interior_point(A, g, cfg: BpConfig, g_scale: float):
    """Mehrotra predictor-corrector on min 1'(u+v) s.t. A(u-v) = g, u, v >= 0.

    Yields ``(iteration, c, nu)`` after every update.
    """
    m, n = A.shape

    def apply(w):  # [A, -A] w
        return A @ (w[:n] - w[n:])

    def adjoint(y):  # [A, -A]^T y
        aty = A.T @ y
        return np.concatenate([aty, -aty])

    # Mehrotra's starting point; [A, -A] has rows of norm sqrt(2)
    x = adjoint(g) / 2.0
    y = np.zeros(m)
    s = np.ones(2 * n)
    x += max(-1.5 * x.min(), 0.0)
    xs = x @ s
    x += 0.5 * xs / s.sum()
    s += 0.5 * xs / x.sum()

    for it in range(1, cfg.max_iterations + 1):
        rp = g - apply(x)
        rd = 1.0 - adjoint(y) - s
        mu = x @ s / (2 * n)
        d = x / s
        normal = (A * (d[:n] + d[n:])) @ A.T
        try:
            chol = np.linalg.cholesky(normal)
        except np.linalg.LinAlgError:
            normal[np.diag_indices(m)] += 1e-14 * np.trace(normal) / m
            chol = np.linalg.cholesky(normal)

        def direction(rxs):
            rhs = rp - apply(rxs / s) + apply(d * rd)
            dy = np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))
            ds = rd - adjoint(dy)
            return (rxs - x * ds) / s, dy, ds

        dxa, _, dsa = direction(-x * s)
        mu_aff = (x + _max_step(x, dxa) * dxa) @ (s + _max_step(s, dsa) * dsa) / (2 * n)
        sigma = (mu_aff / mu) ** 3
        dx, dy, ds = direction(-x * s - dxa * dsa + sigma * mu)
        ap = cfg.step_fraction * _max_step(x, dx)
        ad = cfg.step_fraction * _max_step(s, ds)
        x = x + ap * dx
        y = y + ad * dy
        s = s + ad * ds
        yield it, x[:n] - x[n:], y


def basis_pursuit(g, plan: SensingPlan, n: int | None = None, cfg: BpConfig | None = None) -> BpSolution:
    """Equality-constrained l1 minimization for one real channel.

    After each interior-point update the iterate's support is re-solved by
    least squares at a few thresholds; a candidate is accepted once it is
    feasible and its primal-dual gap is small. The iterate itself, projected
    onto ``{c : A c = g}``, is always a candidate too.

    Raises :class:`NotConverged` (carrying the best feasible
    :class:`BpSolution` in ``.result``) when ``cfg.max_iterations`` runs out.
    """
    cfg = cfg or BpConfig()
    n = plan.n if n is None else n
    if n != plan.n:
        raise PlanMismatch(f"plan is for n={plan.n}, asked for n={n}")
    if not is_power_of_two(n):
        raise ValueError("n must be a power of two")
    g = np.asarray(g, dtype=float)
    if g.shape != (plan.m,):
        raise PlanMismatch(f"expected {plan.m} measurements, got {g.size}")
    g_scale = max(1.0, float(np.linalg.norm(g)))

    if not np.any(g):
        return BpSolution(np.zeros(n), 0, 0.0, 0.0, True)
    if plan.m == n:
        # A is square orthogonal: the only feasible point
        A = sensing_matrix(plan)
        c = A.T @ g
        return BpSolution(c, 0, float(np.linalg.norm(A @ c - g)) / g_scale, 0.0, True)

    A = sensing_matrix(plan)

    def residual(c):
        return float(np.linalg.norm(A @ c - g)) / g_scale

    best = None
    for it, c, nu in _interior_point(A, g, cfg, g_scale):
        projected = c + A.T @ (g - A @ c)
        candidates = [(projected, nu)]
        if np.any(c):
            for rel in _POLISH_CUTS:
                polished = _polish(c, nu, g, A, rel)
                if polished is not None:
                    candidates.append(polished)
        for cand, dual in candidates:
            res = residual(cand)
            if res > cfg.feasibility_tol:
                continue
            gap = _duality_gap(cand, dual, g, A)
            l1 = float(np.sum(np.abs(cand)))
            if best is None or l1 < best.l1:
                best = _Best(cand, res, gap, l1)
            if gap <= cfg.gap_tol * max(1.0, l1):
                logger.debug("basis pursuit converged in %d iterations", it)
                return BpSolution(cand, it, res, gap, True)

    if best is None:
        best = _Best(projected, residual(projected), float("inf"), float(np.sum(np.abs(projected))))
    partial = BpSolution(best.c, cfg.max_iterations, best.res, best.gap, False)
    raise NotConverged(cfg.max_iterations, best.res, partial)


_POLISH_CUTS = (1e-9, 1e-6, 1e-3)


@dataclass
class _Best:
    c: np.ndarray
    res: float
    gap: float
    l1: float


def _solve_channel(g, plan, cfg) -> BpSolution:
    try:
        return basis_pursuit(g, plan, plan.n, cfg)
    except NotConverged as exc:
        logger.warning("%s", exc)
        return exc.result


def recover(meas: Measurements, grid: Grid1D | None = None, cfg: BpConfig | None = None) -> RecoveryResult:
    """Rebuild the complex field from point measurements.

    Real and imaginary parts are independent basis-pursuit problems. When a
    channel stalls the partial field is still assembled and a
    :class:`NotConverged` carrying the :class:`RecoveryResult` is raised.
    """
    cfg = cfg or BpConfig()
    plan = meas.plan
    if grid is None:
        grid = Grid1D(plan.n)
    if grid.n_points != plan.n:
        raise PlanMismatch(f"grid has {grid.n_points} points, plan expects {plan.n}")
    re = _solve_channel(meas.values.real, plan, cfg)
    im = _solve_channel(meas.values.imag, plan, cfg)
    values = haar_idwt(re.coefficients) + 1j * haar_idwt(im.coefficients)
    result = RecoveryResult(
        field=ComplexField(grid=grid, time=meas.time, values=values),
        coefficients=(re.coefficients, im.coefficients),
        iterations=max(re.iterations, im.iterations),
        residual=max(re.residual, im.residual),
        converged=re.converged and im.converged,
        channels=(re, im),
    )
    if not result.converged:
        raise NotConverged(result.iterations, result.residual, result)
    return result


def coherence(plan: SensingPlan, n: int | None = None) -> float:
    """sqrt(n) * max |<e_j, h_k>| over sensed rows j and Haar columns k."""
    n = plan.n if n is None else n
    if n != plan.n:
        raise PlanMismatch(f"plan is for n={plan.n}, asked for n={n}")
    return float(np.sqrt(n) * np.max(np.abs(sensing_matrix(plan))))
