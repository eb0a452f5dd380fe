"""Configuration-driven verification campaigns.

Every campaign evaluates one inequality family over a deterministic,
seeded, nested sample plan and fits the existential constants: for each
candidate exponential rate c in the config grid, C(c) is the maximum of
lhs/rhs(c) over the samples; the reported rate minimizes C(c) times a
stability penalty, and the verdict applies the < 5% drift rule to the
per-refinement constants (each refinement doubles the nested sample
count).  Inequalities whose right-hand side carries no exponential rate
(the integrated difference bound, the transform size/smoothness bounds,
and the operator spot checks) ignore the c grid.

Reports are canonical JSON: identical (config, seed) pairs produce byte
identical files.  Wall-clock runtime is therefore excluded from the
report; the CLI writes it to a sidecar instead.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .grids import (
    GridFunction,
    T_GRID_DEFAULT,
    default_grid,
    lp_norm,
    maximal_function,
)
from .heat import (
    NuVector,
    as_nu_vector,
    _bound_rhs_arrays,
    adjoint_power_heat_1d,
    delta_dt_heat_1d,
    delta_dt_heat_nd_arrays,
    eval_delta_heat_1d,
    mixed_partial_delta,
)
from .riesz import (
    CzSamplePlan,
    SubordinationPlan,
    cz_bound_check,
    riesz_apply,
    riesz_difference_matrix,
)
from .sampling import loguniform, make_rng, sample_kernel_points
from .spaces import AtomCandidate, Ball, BallSampler, bmo_norm, multi_indices
from .special import gamma

__all__ = [
    "INEQUALITY_IDS",
    "CampaignConfig",
    "BoundReport",
    "run_campaign",
    "hardy_spot_check",
    "bmo_spot_check",
    "default_config",
    "bundled_config_path",
]

INEQUALITY_IDS = (
    "thm2_1",
    "thm2_4",
    "thm2_5",
    "cor2_6a",
    "cor2_6b",
    "prop2_7",
    "prop2_8",
    "prop2_9",
    "prop2_10",
    "cor2_11",
    "thm1_5_size",
    "thm1_5_smooth",
    "thm1_6i",
    "thm1_6ii",
    "thm4_1",
)


@dataclass(frozen=True)
class CampaignConfig:
    """One campaign: inequality id, parameters, sampling and fitting plan."""

    inequality: str
    nu: tuple[float, ...] = (0.5,)
    k: tuple[int, ...] = (1,)
    ell: tuple[int, ...] = (0,)
    big_m: int = 0
    p: float = 1.0
    s: float = 0.0
    epsilon: float = 0.5
    samples: int = 10000
    seed: int = 0
    refine_levels: int = 3
    c_grid: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0, 32.0)
    t_range: tuple[float, float] = (1e-4, 1e2)
    box: tuple[float, float] = (1e-2, 20.0)
    grid_nodes: int = 384
    plan_t_min: float = 1e-6
    plan_t_max: float = 1e4
    plan_nodes_per_decade: int = 24
    atom_count: int = 50
    corpus_size: int = 10
    min_separation: float = 1e-2

    def __post_init__(self):
        if self.inequality not in INEQUALITY_IDS:
            raise ConfigError(f"unknown inequality id {self.inequality!r}")
        object.__setattr__(self, "nu", tuple(float(v) for v in np.atleast_1d(self.nu)))
        object.__setattr__(self, "k", tuple(int(v) for v in np.atleast_1d(self.k)))
        object.__setattr__(self, "ell", tuple(int(v) for v in np.atleast_1d(self.ell)))
        object.__setattr__(self, "c_grid", tuple(float(c) for c in self.c_grid))
        object.__setattr__(self, "t_range", tuple(float(v) for v in self.t_range))
        object.__setattr__(self, "box", tuple(float(v) for v in self.box))
        if self.samples < 100:
            raise ConfigError("sample count must be at least 100")
        if self.refine_levels < 2:
            raise ConfigError("need at least 2 refinement levels")
        if not self.c_grid:
            raise ConfigError("c grid must be nonempty")

    @property
    def nu_vector(self) -> NuVector:
        return NuVector(self.nu)

    @property
    def plan(self) -> SubordinationPlan:
        return SubordinationPlan(
            self.plan_t_min, self.plan_t_max, self.plan_nodes_per_decade
        )

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, source) -> "CampaignConfig":
        if isinstance(source, str) and source.lstrip().startswith("{"):
            payload = json.loads(source)
        else:
            try:
                with open(source) as fh:
                    payload = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(payload) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**payload)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class BoundReport:
    """Fitted constants and verdict for one inequality campaign."""

    inequality: str
    params: dict
    C_hat: float
    c_hat: float
    worst_sample: dict
    per_refinement_C: list[float]
    refinement_delta: float
    verdict: str
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "params": self.params,
            "C_hat": self.C_hat,
            "c_hat": self.c_hat,
            "worst_sample": self.worst_sample,
            "per_refinement_C": self.per_refinement_C,
            "refinement_delta": self.refinement_delta,
            "verdict": self.verdict,
            "notes": self.notes,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _drift(values) -> float:
    worst = 0.0
    for a, b in zip(values, values[1:]):
        if math.isfinite(a) and a > 0:
            worst = max(worst, abs(b - a) / a)
        elif not math.isfinite(a) or not math.isfinite(b):
            worst = math.inf
    return worst


def _level_maxima(ratios: np.ndarray, base: int, levels: int) -> list[float]:
    return [float(np.max(ratios[: base * 2**lev])) for lev in range(levels)]


def _selection_levels(ratios: np.ndarray, config) -> list[float]:
    """Finer internal refinement ladder used only to pick c.

    Slowly divergent suprema can sneak under the 5% rule on three coarse
    levels; starting the ladder at a quarter of the base count exposes
    them without changing the constants reported on the coarse ladder.
    """
    base = max(100, config.samples // 4)
    counts = []
    cnt = base
    top = config.samples * 2 ** (config.refine_levels - 1)
    while cnt < top:
        counts.append(cnt)
        cnt *= 2
    counts.append(top)
    return [float(np.max(ratios[:c])) for c in counts]


def _fit_c(lhs, rhs_by_c, config):
    """Smallest c in the grid with a refinement-stable C(c).

    Falls back to minimizing C(c) * (1 + drift(c)) when no rate is stable,
    so the report still names the least-bad candidate.
    """
    results = {}
    selection_drift = {}
    for c, rhs in rhs_by_c.items():
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(
                rhs > 0.0, lhs / rhs, np.where(lhs > 0.0, np.inf, 0.0)
            )
        levels = _level_maxima(ratios, config.samples, config.refine_levels)
        results[c] = (levels, _drift(levels), ratios)
        selection_drift[c] = _drift(_selection_levels(ratios, config))
    stable = [
        c
        for c in config.c_grid
        if all(map(math.isfinite, results[c][0])) and selection_drift[c] < 0.05
    ]
    if stable:
        c_hat = min(stable)
    else:
        scores = []
        for c in config.c_grid:
            levels, drift, _ = results[c]
            top = levels[-1]
            scores.append(top * (1.0 + drift) if math.isfinite(top) else math.inf)
        c_hat = config.c_grid[int(np.argmin(scores))]
    levels, drift, ratios = results[c_hat]
    return c_hat, levels, drift, ratios


def _verdict(levels, drift) -> str:
    if not all(map(math.isfinite, levels)):
        return "violated"
    return "stable" if drift < 0.05 else "unstable"


def _params_dict(config: CampaignConfig, **extra) -> dict:
    out = {
        "nu": list(config.nu),
        "k": list(config.k),
        "ell": list(config.ell),
        "big_m": config.big_m,
        "samples": config.samples,
        "seed": config.seed,
        "refine_levels": config.refine_levels,
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# Pointwise kernel-estimate campaigns


def _lhs_pointwise(config: CampaignConfig, t, x, y):
    """|lhs| arrays for the pointwise inequality families."""
    ineq = config.inequality
    nu = config.nu_vector
    if ineq == "thm2_1":
        return np.abs(eval_delta_heat_1d(nu.nu[0], 0, t, x[0], y[0]))
    if ineq == "thm2_4":
        return np.abs(eval_delta_heat_1d(nu.nu[0], config.ell[0], t, x[0], y[0]))
    if ineq == "thm2_5":
        return np.abs(
            mixed_partial_delta(nu.nu[0], config.k[0], config.ell[0], t, x[0], y[0])
        )
    if ineq == "cor2_6a":
        return np.abs(delta_dt_heat_1d(nu.nu[0], config.k[0], config.big_m, t, x[0], y[0]))
    if ineq == "cor2_6b":
        return np.abs(
            adjoint_power_heat_1d(nu.nu[0], config.k[0], config.big_m, t, x[0], y[0])
        )
    if ineq == "prop2_7":
        a = eval_delta_heat_1d(nu.nu[0], config.ell[0], t, x[0], y[0])
        b = eval_delta_heat_1d(nu.nu[0] + 1.0, config.ell[0], t, x[0], y[0])
        return np.abs(a - b)
    if ineq == "prop2_9":
        out = 1.0
        for j in range(nu.n):
            out = out * eval_delta_heat_1d(nu.nu[j], config.ell[j], t, x[j], y[j])
        return np.abs(out)
    if ineq == "prop2_10":
        out = 1.0
        for j in range(nu.n):
            out = out * mixed_partial_delta(
                nu.nu[j], config.k[j], config.ell[j], t, x[j], y[j]
            )
        return np.abs(out)
    if ineq == "cor2_11":
        return np.abs(delta_dt_heat_nd_arrays(nu, config.k, config.big_m, t, x, y))
    raise ConfigError(f"not a pointwise inequality: {ineq}")


def _rhs_kind(config: CampaignConfig):
    """(bound kind, k-slot, ell-slot) for the shared rhs evaluator."""
    ineq = config.inequality
    if ineq == "thm2_1":
        return "thm21", 0, 0
    if ineq == "thm2_4":
        return "thm24", 0, config.ell[0]
    if ineq == "thm2_5":
        return "thm25", config.k[0], config.ell[0]
    if ineq in ("cor2_6a", "cor2_6b"):
        return "cor26", config.k[0], config.big_m
    if ineq == "prop2_7":
        return "prop27", 0, config.ell[0]
    if ineq == "prop2_9":
        return "prop29", 0, config.ell
    if ineq == "prop2_10":
        return "prop210", config.k, config.ell
    if ineq == "cor2_11":
        return "cor211", config.k, config.big_m
    raise ConfigError(f"not a pointwise inequality: {ineq}")


def _sample_pointwise(config: CampaignConfig, count: int):
    nu = config.nu_vector
    rng = make_rng(config.seed)
    if config.inequality == "prop2_7":
        # region: y/2 < x < 2y and x >= sqrt(t)
        x0 = loguniform(rng, config.box[0], config.box[1], count)
        y0 = x0 * 2.0 ** rng.uniform(-1.0, 1.0, count)
        t = (x0 * loguniform(rng, 1e-3, 1.0, count)) ** 2
        return t, x0[None, :], y0[None, :]
    return sample_kernel_points(rng, count, nu.n, config.t_range, config.box)


def _pointwise_campaign(config: CampaignConfig, collect: bool):
    nu = config.nu_vector
    count = config.samples * 2 ** (config.refine_levels - 1)
    t, x, y = _sample_pointwise(config, count)
    lhs = _lhs_pointwise(config, t, x, y)
    kind, k_slot, ell_slot = _rhs_kind(config)
    rhs_by_c = {
        c: _bound_rhs_arrays(kind, nu, k_slot, ell_slot, t, x, y, c)
        for c in config.c_grid
    }
    c_hat, levels, drift, ratios = _fit_c(lhs, rhs_by_c, config)
    worst = int(np.argmax(ratios))
    report = BoundReport(
        inequality=config.inequality,
        params=_params_dict(config, t_range=list(config.t_range), box=list(config.box)),
        C_hat=levels[-1],
        c_hat=c_hat,
        worst_sample={
            "t": float(t[worst]),
            "x": x[:, worst].tolist(),
            "y": y[:, worst].tolist(),
            "lhs": float(lhs[worst]),
            "rhs": float(rhs_by_c[c_hat][worst]),
            "ratio": float(ratios[worst]),
        },
        per_refinement_C=levels,
        refinement_delta=drift,
        verdict=_verdict(levels, drift),
    )
    samples = None
    if collect:
        samples = _sample_rows(t, x, y, lhs, rhs_by_c[c_hat], ratios)
    return report, samples


def _sample_rows(t, x, y, lhs, rhs, ratios):
    header = (
        ["t"]
        + [f"x{j+1}" for j in range(x.shape[0])]
        + [f"y{j+1}" for j in range(y.shape[0])]
        + ["lhs", "rhs", "ratio"]
    )
    rows = [header]
    for i in range(t.size):
        rows.append(
            [repr(float(t[i]))]
            + [repr(float(v)) for v in x[:, i]]
            + [repr(float(v)) for v in y[:, i]]
            + [repr(float(lhs[i])), repr(float(rhs[i])), repr(float(ratios[i]))]
        )
    return rows


# ---------------------------------------------------------------------------
# Integrated difference bound (three-region rhs, no exponential rate)


def _prop2_8_campaign(config: CampaignConfig, collect: bool):
    nu0 = config.nu[0]
    k = config.k[0]
    eps = config.epsilon
    count = config.samples * 2 ** (config.refine_levels - 1)
    rng = make_rng(config.seed)
    x = loguniform(rng, config.box[0], config.box[1], count)
    y = x * 2.0 ** rng.uniform(-3.0, 3.0, count)

    t_nodes, w = config.plan.nodes()
    half = k / 2.0
    lhs = np.zeros(count)
    for t, wi in zip(t_nodes, w):
        diff = eval_delta_heat_1d(nu0, k, t, x, y) - eval_delta_heat_1d(
            nu0 + 1.0, k, t, x, y
        )
        lhs += wi * t**half * np.abs(diff)

    mid = (y / 2.0 < x) & (x < 2.0 * y)
    upper = x >= 2.0 * y
    lower = y >= 2.0 * x
    rhs = np.where(
        mid,
        (1.0 + (x / np.abs(x - y)) ** eps) / x,
        np.where(upper, 1.0 / x, 1.0 / y),
    )
    assert np.all(mid | upper | lower)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    levels = _level_maxima(ratios, config.samples, config.refine_levels)
    drift = _drift(levels)
    worst = int(np.argmax(ratios))
    report = BoundReport(
        inequality="prop2_8",
        params=_params_dict(config, epsilon=eps, box=list(config.box)),
        C_hat=levels[-1],
        c_hat=0.0,
        worst_sample={
            "x": [float(x[worst])],
            "y": [float(y[worst])],
            "lhs": float(lhs[worst]),
            "rhs": float(rhs[worst]),
            "ratio": float(ratios[worst]),
        },
        per_refinement_C=levels,
        refinement_delta=drift,
        verdict=_verdict(levels, drift),
        notes=["rhs carries no exponential rate; c grid unused"],
    )
    samples = None
    if collect:
        t_dummy = np.zeros(count)
        samples = _sample_rows(t_dummy, x[None, :], y[None, :], lhs, rhs, ratios)
    return report, samples


# ---------------------------------------------------------------------------
# Riesz kernel bound campaigns


def _thm1_5_campaign(config: CampaignConfig, collect: bool):
    part = "size" if config.inequality == "thm1_5_size" else "smooth"
    sweep_box = (max(config.box[0], 0.05), min(config.box[1], 10.0))
    sweep = cz_bound_check(
        config.nu_vector,
        config.k,
        CzSamplePlan(
            count=config.samples,
            seed=config.seed,
            levels=config.refine_levels,
            box=sweep_box,
            min_separation=config.min_separation,
        ),
        config.plan,
    )
    side = sweep[part]
    levels = side["per_refinement_C"]
    drift = side["drift"]
    notes = ["rhs carries no exponential rate; c grid unused"]
    if part == "smooth":
        notes.append(
            "holder exponent min(1, nu_min + 1/2) = "
            + repr(side["exponent"])
            + "; unclipped-exponent fit: C_hat = "
            + repr(sweep["smooth_raw_exponent"]["C_hat"])
        )
    report = BoundReport(
        inequality=config.inequality,
        params=_params_dict(config, box=list(sweep_box)),
        C_hat=side["C_hat"],
        c_hat=0.0,
        worst_sample=side["worst_sample"],
        per_refinement_C=levels,
        refinement_delta=drift,
        verdict=_verdict(levels, drift),
        notes=notes,
    )
    return report, None


# ---------------------------------------------------------------------------
# Operator spot checks


def _project_moments(values, grid, mask, omega, center, radius):
    """Remove monomial moments up to omega on the support, keeping support."""
    from .spaces import _scaled_basis, _node_stack

    indices = multi_indices(grid.ndim, omega)
    pts = _node_stack(grid)[:, mask]
    w = grid.weight_array[mask]
    cols = _scaled_basis(pts, center, radius, indices)
    gram = np.array([[float(np.sum(w * ca * cb)) for cb in cols] for ca in cols])
    rhs = np.array([float(np.sum(w * ca * values[mask])) for ca in cols])
    coef = np.linalg.solve(gram, rhs)
    out = values.copy()
    correction = np.zeros(pts.shape[1:])
    for c, col in zip(coef, cols):
        correction += c * col
    out[mask] = values[mask] - correction
    return out


def _random_atom(rng, grid, p: float, center_range=(0.7, 7.0)):
    """One random subcritical atom: supported in B(c, r), r <= rho(c),
    vanishing moments up to floor(n(1/p-1)), sup at 90% of the bound."""
    from .heat import critical_function

    from .errors import UnderResolvedError

    x = grid.axes[0].nodes
    c = float(loguniform(rng, center_range[0], center_range[1], ()))
    rho = critical_function((c,))
    # keep the ball resolvable: at least ~3 local spacings, never above rho
    spacing = c * math.log(grid.axes[0].hi / grid.axes[0].lo) / (grid.axes[0].size - 1)
    r = min(max(rho * (0.3 + 0.7 * float(rng.uniform())), 3.0 * spacing), rho)
    ball = Ball((c,), r)
    dist = np.abs(x - c)
    mask = dist < 0.95 * r
    if int(np.count_nonzero(mask)) < 4:
        mask = dist < r
    u = dist / r
    shape1 = np.cos((1.5 + 2.0 * float(rng.uniform())) * math.pi * u)
    shape2 = np.sin(math.pi * u + float(rng.uniform()))
    prof = np.where(mask, (0.95 - u) * (shape1 + 0.5 * shape2), 0.0)
    omega = math.floor(grid.ndim * (1.0 / p - 1.0))
    if r < rho:
        prof = _project_moments(prof, grid, mask, omega, ball.center, r)
    sup = float(np.max(np.abs(prof)))
    if sup == 0.0:
        raise UnderResolvedError(
            "atom support under-resolved; increase grid_nodes"
        )
    vals = prof * (0.9 * ball.volume ** (-1.0 / p) / sup)
    return AtomCandidate(GridFunction(grid, vals), ball, p)


def hardy_spot_check(
    nu,
    k,
    p: float,
    atom_count: int = 50,
    seed: int = 0,
    grid_nodes: int = 512,
    plan: SubordinationPlan | None = None,
    big_m: int = 0,
    levels: int = 2,
) -> dict:
    """Uniform-boundedness check of the transform on random atoms.

    For each atom a: apply the order-k transform, then the maximal
    function at the shifted order nu + k + 2M, and take the L^p quasi-norm.
    Reports max, median, their ratio (uniform iff <= 10), nested-prefix
    maxima across refinement levels, and the sensitivity of the worst
    quasi-norm to doubling the time-grid density (the finite time grid
    undershoots the true supremum).
    """
    nu = as_nu_vector(nu)
    k = tuple(int(v) for v in np.atleast_1d(k))
    plan = plan or SubordinationPlan(1e-6, 1e4, 12)
    grid = default_grid(nu.n, nodes_per_axis=grid_nodes)
    shift = tuple(kj + 2 * big_m for kj in k)
    nu_shifted = nu.shifted(shift)
    rng = make_rng(seed)
    total = atom_count * 2 ** (levels - 1)
    norms = []
    worst_atom = None
    for _ in range(total):
        atom = _random_atom(rng, grid, p)
        ra = riesz_apply(nu, k, atom.f, plan)
        ma = maximal_function(nu_shifted, ra, T_GRID_DEFAULT)
        val = lp_norm(ma, p)
        norms.append(val)
        if worst_atom is None or val >= max(norms):
            worst_atom = atom
    norms_arr = np.asarray(norms)
    level_max = [float(np.max(norms_arr[: atom_count * 2**lev])) for lev in range(levels)]
    level_ratio = [
        float(
            np.max(norms_arr[: atom_count * 2**lev])
            / np.median(norms_arr[: atom_count * 2**lev])
        )
        for lev in range(levels)
    ]
    med = float(np.median(norms_arr))
    mx = float(np.max(norms_arr))
    # time-grid sensitivity on the worst atom
    dense = tuple(2.0 ** (m / 2.0) for m in range(-20, 13))
    ra = riesz_apply(nu, k, worst_atom.f, plan)
    base = lp_norm(maximal_function(nu_shifted, ra, T_GRID_DEFAULT), p)
    fine = lp_norm(maximal_function(nu_shifted, ra, dense), p)
    return {
        "max": mx,
        "median": med,
        "max_over_median": mx / med if med > 0 else math.inf,
        "uniform": bool(med > 0 and mx / med <= 10.0),
        "per_refinement_max": level_max,
        "per_refinement_ratio": level_ratio,
        "drift": _drift(level_max),
        "worst_atom": {
            "center": list(worst_atom.ball.center),
            "radius": worst_atom.ball.radius,
            "norm": mx,
        },
        "t_grid_refinement_delta": abs(fine - base) / base if base > 0 else 0.0,
    }


def _random_corpus(rng, grid, count: int):
    x = grid.axes[0].nodes
    out = []
    for _ in range(count):
        vals = np.zeros(grid.shape)
        for _ in range(3):
            c = float(loguniform(rng, 0.3, 9.0, ()))
            width = float(loguniform(rng, 0.05, 1.0, ()))
            amp = float(rng.uniform(-1.0, 1.0))
            vals += amp * np.exp(-((x - c) ** 2) / width**2)
        vals[np.abs(x - 3.0) > 8.0] = 0.0  # keep support compact
        out.append(GridFunction(grid, vals))
    return out


def bmo_spot_check(
    nu,
    k,
    s: float = 0.0,
    corpus_size: int = 10,
    seed: int = 0,
    grid_nodes: int = 384,
    plan: SubordinationPlan | None = None,
) -> dict:
    """Advisory ratio table for the transform on the oscillation norm.

    The sampled-supremum norm proxy is sampler dependent, so this check
    reports ratios and their refinement behavior without any hard gate.
    """
    nu = as_nu_vector(nu)
    k = tuple(int(v) for v in np.atleast_1d(k))
    plan = plan or SubordinationPlan(1e-6, 1e4, 12)
    grid = default_grid(nu.n, nodes_per_axis=grid_nodes)
    max_degree = max(0, math.floor(s))
    rng = make_rng(seed)
    corpus = _random_corpus(rng, grid, corpus_size)
    ratios = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for f in corpus:
            denom = bmo_norm(f, s, max_degree, BallSampler(grid, 16, 8))
            if denom == 0.0:
                continue  # 0/0 convention: skipped
            rf = riesz_apply(nu, k, f, plan)
            num = bmo_norm(rf, s, max_degree, BallSampler(grid, 16, 8))
            ratios.append(num / denom)
        coarse = max(ratios) if ratios else 0.0
        fine_ratios = []
        for f in corpus[: max(2, corpus_size // 3)]:
            denom = bmo_norm(f, s, max_degree, BallSampler(grid, 32, 16))
            if denom == 0.0:
                continue
            rf = riesz_apply(nu, k, f, plan)
            fine_ratios.append(bmo_norm(rf, s, max_degree, BallSampler(grid, 32, 16)) / denom)
    return {
        "ratios": ratios,
        "max_ratio": coarse,
        "sampler_refined_max": max(fine_ratios) if fine_ratios else 0.0,
        "advisory": True,
    }


def _thm1_6i_campaign(config: CampaignConfig, collect: bool):
    result = hardy_spot_check(
        config.nu_vector,
        config.k,
        config.p,
        atom_count=config.atom_count,
        seed=config.seed,
        grid_nodes=config.grid_nodes,
        plan=config.plan,
        big_m=config.big_m,
        levels=config.refine_levels,
    )
    levels = result["per_refinement_ratio"]
    drift = _drift(levels)
    # The certified quantity for this id is uniform boundedness over the
    # atom family: the verdict is the uniformity criterion max/median <= 10
    # at every refinement level (the max itself keeps exploring atom space,
    # so the generic drift rule does not apply here).
    if all(map(math.isfinite, levels)) and all(r <= 10.0 for r in levels):
        verdict = "stable"
    else:
        verdict = "violated"
    report = BoundReport(
        inequality="thm1_6i",
        params=_params_dict(config, p=config.p, atom_count=config.atom_count),
        C_hat=result["max_over_median"],
        c_hat=0.0,
        worst_sample=result["worst_atom"],
        per_refinement_C=levels,
        refinement_delta=drift,
        verdict=verdict,
        notes=[
            "C_hat is the uniformity ratio max/median (gate: <= 10)",
            "max quasi-norm: " + repr(result["max"]),
            "per-refinement max quasi-norms: " + repr(result["per_refinement_max"]),
            "time-grid density sensitivity: " + repr(result["t_grid_refinement_delta"]),
        ],
    )
    return report, None


def _thm1_6ii_campaign(config: CampaignConfig, collect: bool):
    result = bmo_spot_check(
        config.nu_vector,
        config.k,
        s=config.s,
        corpus_size=config.corpus_size,
        seed=config.seed,
        grid_nodes=config.grid_nodes,
        plan=config.plan,
    )
    ratios = result["ratios"]
    levels = [result["max_ratio"], result["sampler_refined_max"]]
    drift = _drift([v for v in levels if v > 0] or [0.0])
    report = BoundReport(
        inequality="thm1_6ii",
        params=_params_dict(config, s=config.s, corpus_size=config.corpus_size),
        C_hat=result["max_ratio"],
        c_hat=0.0,
        worst_sample={"ratios": ratios},
        per_refinement_C=levels,
        refinement_delta=drift,
        verdict="stable" if all(map(math.isfinite, ratios)) else "violated",
        notes=["advisory only: sampled oscillation norms are sampler dependent"],
    )
    return report, None


def _thm4_1_campaign(config: CampaignConfig, collect: bool):
    nu = config.nu_vector
    grid = default_grid(1, nodes_per_axis=config.grid_nodes)
    mat = riesz_difference_matrix(nu, config.k, 0, grid, config.plan)
    rng = make_rng(config.seed)
    total = config.corpus_size * 2 ** (config.refine_levels - 1)
    corpus = _random_corpus(rng, grid, total)
    ratios = []
    for f in corpus:
        df = GridFunction(grid, mat @ f.values)
        denom = lp_norm(f, 2.0)
        ratios.append(lp_norm(df, 2.0) / denom if denom > 0 else 0.0)
    ratios_arr = np.asarray(ratios)
    levels = [
        float(np.max(ratios_arr[: config.corpus_size * 2**lev]))
        for lev in range(config.refine_levels)
    ]
    drift = _drift(levels)
    worst = int(np.argmax(ratios_arr))
    report = BoundReport(
        inequality="thm4_1",
        params=_params_dict(config, corpus_size=config.corpus_size),
        C_hat=levels[-1],
        c_hat=0.0,
        worst_sample={"corpus_index": worst, "ratio": float(ratios_arr[worst])},
        per_refinement_C=levels,
        refinement_delta=drift,
        verdict=_verdict(levels, drift),
        notes=["L^2 operator-norm sweep of the order-shift difference"],
    )
    return report, None


_POINTWISE = {
    "thm2_1",
    "thm2_4",
    "thm2_5",
    "cor2_6a",
    "cor2_6b",
    "prop2_7",
    "prop2_9",
    "prop2_10",
    "cor2_11",
}


def run_campaign(config: CampaignConfig, collect_samples: bool = False):
    """Run one campaign; returns (BoundReport, sample rows or None).

    Deterministic for fixed (config, seed): identical inputs produce byte
    identical canonical reports.
    """
    nu = config.nu_vector
    if config.inequality in _POINTWISE:
        if config.inequality in ("prop2_9", "prop2_10", "cor2_11"):
            if len(config.ell) != nu.n and config.inequality == "prop2_9":
                raise ConfigError("ell multi-index must match dimension")
        return _pointwise_campaign(config, collect_samples)
    if config.inequality == "prop2_8":
        return _prop2_8_campaign(config, collect_samples)
    if config.inequality in ("thm1_5_size", "thm1_5_smooth"):
        return _thm1_5_campaign(config, collect_samples)
    if config.inequality == "thm1_6i":
        return _thm1_6i_campaign(config, collect_samples)
    if config.inequality == "thm1_6ii":
        return _thm1_6ii_campaign(config, collect_samples)
    if config.inequality == "thm4_1":
        return _thm4_1_campaign(config, collect_samples)
    raise ConfigError(f"unknown inequality id {config.inequality!r}")


# ---------------------------------------------------------------------------
# Bundled default configs


def default_config(inequality: str) -> CampaignConfig:
    """The bundled default campaign for one inequality id."""
    base = {
        "thm2_1": dict(nu=(0.3,), samples=10000),
        "thm2_4": dict(nu=(0.6,), ell=(2,), samples=10000),
        "thm2_5": dict(nu=(0.6,), k=(1,), ell=(1,), samples=10000),
        "cor2_6a": dict(nu=(0.8,), k=(1,), big_m=1, samples=10000),
        "cor2_6b": dict(nu=(0.8,), k=(1,), big_m=1, samples=10000),
        "prop2_7": dict(nu=(0.6,), ell=(1,), samples=10000),
        "prop2_8": dict(
            nu=(0.6,),
            k=(1,),
            epsilon=0.5,
            samples=2000,
            plan_t_min=1e-8,
            plan_t_max=1e6,
            plan_nodes_per_decade=16,
        ),
        "prop2_9": dict(nu=(0.5, 1.5), k=(0, 0), ell=(1, 1), samples=10000),
        "prop2_10": dict(nu=(0.5, 1.5), k=(1, 0), ell=(0, 1), samples=20000),
        "cor2_11": dict(nu=(0.5, 1.5), k=(1, 1), big_m=1, samples=20000),
        "thm1_5_size": dict(
            nu=(0.7,),
            k=(2,),
            samples=2500,
            box=(0.1, 10.0),
            plan_t_min=1e-8,
            plan_t_max=1e8,
            plan_nodes_per_decade=24,
        ),
        "thm1_5_smooth": dict(
            nu=(0.7,),
            k=(2,),
            samples=2500,
            box=(0.1, 10.0),
            plan_t_min=1e-8,
            plan_t_max=1e8,
            plan_nodes_per_decade=24,
        ),
        "thm1_6i": dict(
            nu=(1.0,),
            k=(1,),
            p=1.0,
            atom_count=50,
            grid_nodes=512,
            refine_levels=2,
            plan_nodes_per_decade=12,
        ),
        "thm1_6ii": dict(
            nu=(1.0,),
            k=(1,),
            s=0.0,
            corpus_size=10,
            grid_nodes=384,
            refine_levels=2,
            plan_nodes_per_decade=12,
        ),
        "thm4_1": dict(
            nu=(0.6,), k=(1,), corpus_size=16, grid_nodes=384, refine_levels=3
        ),
    }
    if inequality not in base:
        raise ConfigError(f"unknown inequality id {inequality!r}")
    return CampaignConfig(inequality=inequality, **base[inequality])


def bundled_config_path(inequality: str):
    """Path of the bundled JSON config for an inequality id."""
    from importlib import resources

    if inequality not in INEQUALITY_IDS:
        raise ConfigError(f"unknown inequality id {inequality!r}")
    return resources.files("besselops") / "configs" / f"{inequality}.json"
