"""Criticality analysis built on the correlator and robustness layers.

Locators (magic pseudocritical point, magic rising point, robustness
peak, sudden-death temperature), scaling fits (power law, logarithmic
divergence, linear onset), finite-size data collapse, and the crossover
map of the quantum critical region at finite temperature.

All fit windows are explicit parameters and are recorded in the returned
objects, numerical derivatives are centered differences with built-in
step-halving checks, and every operation is a pure deterministic
function of its arguments (grid searches, bisections and golden-section
scans only; no stochastic optimizers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .finite_chain import (
    FiniteChainSpec,
    central_site,
    ground_state,
    magnetization_profile,
    order_parameter_derivative_peak,
    reduced_density,
)
from .quantum_state import PauliVector, partial_trace, tensor_product
from .rom_solver import log_robustness, rom_closed_form, rom_lp
from .stabilizer_polytope import enumerate_polytope
from .xy_correlators import (
    BETA_X,
    ChainParams,
    DEFAULT_QUAD_TOL,
    single_site_state,
    symmetric_two_site_state,
    transverse_magnetization,
)

ROM_THRESHOLD = 1e-9  # "nonzero robustness" boundary, matches the LP certificate


class BracketError(ValueError):
    """A bisection bracket or scan window does not contain the feature."""


class FitError(ValueError):
    """Fit window contains too few or invalid samples."""


class MapResolutionError(RuntimeError):
    """Finite-difference grid too coarse: step-halving disagreement."""


class DegenerateCollapseError(RuntimeError):
    """Collapse cost surface is flat; exponents are not identifiable."""


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit y = prefactor * x^exponent (power law) or
    y = offset + exponent * ln x (logarithmic); `window` is the x range
    actually used and r_squared is evaluated in the fit coordinates."""

    exponent: float
    prefactor: float
    offset: float
    window: tuple
    r_squared: float


@dataclass(frozen=True)
class CollapseResult:
    mu: float
    nu: float
    collapse_cost: float
    sizes: tuple
    unrescaled_cost: float


@dataclass(frozen=True)
class LinearOnsetCheck:
    """Linear-onset fit of R just above the pseudocritical point, together
    with the slope predicted from the independently fitted exponents."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple
    predicted_slope: float
    mpp: float
    delta_lam: float


@dataclass(frozen=True, eq=False)
class CrossoverMap:
    gamma: float
    r: int
    lam_values: np.ndarray
    t_values: np.ndarray
    rom: np.ndarray
    d_lam: np.ndarray
    d_t: np.ndarray
    d_mixed: np.ndarray
    gruneisen: np.ndarray
    t_star_points: np.ndarray
    t_m_points: np.ndarray
    t_star_slope: float  # a in T* = a |lam - 1|
    t_m_slope: float     # b in T_M = b |lam - 1|
    consistency: float = field(default=float("nan"))


def _polytope(n):
    return enumerate_polytope(n)


def single_site_rom(lam, gamma, *, temperature=0.0, quad_tol=DEFAULT_QUAD_TOL,
                    method="lp") -> float:
    """Robustness of the one-qubit reduced state at (lam, gamma, T).

    method 'lp' routes through the linear program (default); the
    'closed_form' route is the independent short cut for states with
    <sigma_y> = 0 and is primarily the oracle used in tests.
    """
    params = ChainParams(lam=lam, gamma=gamma, temperature=temperature,
                         quad_tol=quad_tol)
    state = single_site_state(params)
    if method == "closed_form":
        bx, _, bz = state.bloch()
        return rom_closed_form(bx, bz)
    if method == "lp":
        return rom_lp(state, _polytope(1)).value
    raise ValueError(f"unknown method {method!r}")


def two_site_rom(lam, gamma, r, *, temperature=0.0,
                 quad_tol=DEFAULT_QUAD_TOL) -> float:
    """Robustness of the symmetric-sector two-qubit state at distance r."""
    params = ChainParams(lam=lam, gamma=gamma, temperature=temperature,
                         distance=r, quad_tol=quad_tol)
    return rom_lp(symmetric_two_site_state(params), _polytope(2)).value


def fgs_point(gamma: float) -> float:
    """Coupling at which the symmetry-broken ground state factorizes,
    lam = 1/sqrt(1 - gamma^2); requires gamma in [0, 1)."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError("factorization point requires 0 <= gamma < 1")
    return 1.0 / math.sqrt(1.0 - gamma * gamma)


def _bisect_onset(f, lo, hi, resolution, threshold):
    """Smallest x in [lo, hi] with f(x) > threshold, assuming a single
    onset inside the bracket; f(lo) must be <= threshold < f(hi)."""
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo > threshold:
        raise BracketError(f"feature already present at bracket start {lo}")
    if f_hi <= threshold:
        raise BracketError(f"no onset inside bracket ({lo}, {hi})")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if f(mid) > threshold:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def mpp_locate(gamma, *, source="correlator", resolution=1e-6,
               bracket=(1.0, 2.0), quad_tol=DEFAULT_QUAD_TOL,
               method="closed_form", n_sites=None, sb_field=1e-6,
               eig_tol=1e-8) -> float:
    """Magic pseudocritical point: onset of single-site robustness.

    source 'correlator' uses the infinite-chain magnetizations; source
    'ed' diagonalizes finite chains of n_sites and uses the central
    site.  Bisection on R > 1e-9 down to `resolution` in lam.
    """
    if source == "correlator":
        def f(lam):
            return single_site_rom(lam, gamma, quad_tol=quad_tol, method=method)
    elif source == "ed":
        if n_sites is None:
            raise ValueError("source='ed' requires n_sites")

        def f(lam):
            spec = FiniteChainSpec(n_sites=n_sites, lam=lam, gamma=gamma,
                                   sb_field=sb_field, eig_tol=eig_tol)
            rdm = reduced_density(ground_state(spec), central_site(n_sites))
            return rom_closed_form(rdm.coeffs[1], rdm.coeffs[3])
    else:
        raise ValueError(f"unknown source {source!r}")
    return _bisect_onset(f, bracket[0], bracket[1], resolution, ROM_THRESHOLD)


def rom_peak(gamma, *, bracket=None, resolution=1e-5,
             quad_tol=DEFAULT_QUAD_TOL, method="closed_form"):
    """(lam_max, R_max) of the single-site robustness by golden section.

    The default bracket starts just above the pseudocritical point and
    extends to lam = 3; a maximum at a bracket edge raises BracketError.
    """
    if bracket is None:
        mpp = mpp_locate(gamma, resolution=resolution, quad_tol=quad_tol,
                         method=method)
        bracket = (mpp, 3.0)
    lo, hi = bracket

    def f(lam):
        return single_site_rom(lam, gamma, quad_tol=quad_tol, method=method)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > resolution:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    lam_max = 0.5 * (a + b)
    if lam_max - lo < 2.0 * resolution or hi - lam_max < 2.0 * resolution:
        raise BracketError(f"robustness maximum sits at bracket edge ({lam_max})")
    return lam_max, f(lam_max)


def _windowed(x, y, window):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window
    mask = (x >= lo) & (x <= hi)
    if mask.sum() < 5:
        raise FitError(f"fewer than 5 samples inside window {window}")
    return x[mask], y[mask]


def fit_power_law(x, y, window) -> ScalingFit:
    """Least squares of ln y on ln x inside `window`;
    y = prefactor * x^exponent.  Requires positive samples."""
    xs, ys = _windowed(x, y, window)
    if (xs <= 0).any() or (ys <= 0).any():
        raise FitError("power-law fit requires positive x and y inside the window")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(((ly - pred) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(exponent=float(slope), prefactor=float(np.exp(intercept)),
                      offset=0.0, window=(float(window[0]), float(window[1])),
                      r_squared=r2)


def fit_log_divergence(x, y, window) -> ScalingFit:
    """Least squares of y on ln x inside `window`;
    y = offset + exponent * ln x (the slope is the log-divergence
    coefficient).  prefactor is reported as 1."""
    xs, ys = _windowed(x, y, window)
    if (xs <= 0).any():
        raise FitError("logarithmic fit requires positive x inside the window")
    lx = np.log(xs)
    slope, intercept = np.polyfit(lx, ys, 1)
    pred = slope * lx + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(exponent=float(slope), prefactor=1.0, offset=float(intercept),
                      window=(float(window[0]), float(window[1])), r_squared=r2)


def rom_derivative_curve(gamma, deltas, *, h=1e-4, quad_tol=DEFAULT_QUAD_TOL,
                         method="closed_form"):
    """dR/dlam of the single-site robustness at lam = 1 + delta for each
    delta, via centered differences of half-width h."""
    out = np.empty(len(deltas))
    for k, d in enumerate(deltas):
        lam = 1.0 + d
        hi = single_site_rom(lam + h, gamma, quad_tol=quad_tol, method=method)
        lo = single_site_rom(lam - h, gamma, quad_tol=quad_tol, method=method)
        out[k] = (hi - lo) / (2.0 * h)
    return out


def derivative_exponent(gamma, *, window=(1e-3, 1e-1), n_points=25,
                        h=1e-4, quad_tol=DEFAULT_QUAD_TOL,
                        method="closed_form") -> ScalingFit:
    """Power-law exponent of dR/dlam against lam - 1 on a log grid inside
    `window`; the fitted exponent is -mu for an onset R ~ (lam-1)^(1-mu)."""
    deltas = np.geomspace(window[0], window[1], n_points)
    derivs = rom_derivative_curve(gamma, deltas, h=h, quad_tol=quad_tol,
                                  method=method)
    return fit_power_law(deltas, derivs, window)


def magnetization_exponents(gamma, *, window=(1e-3, 1e-1), n_points=25,
                            quad_tol=DEFAULT_QUAD_TOL):
    """(K_x, beta_z fit) near criticality on the ordered side.

    K_x is the prefactor of <sx> = K_x (lam-1)^(1/8) (exponent pinned to
    the known 1/8); the transverse magnetization deviation is fitted as
    |<sz> - <sz>_c| = |K_z| (lam-1)^beta_z and returned as a ScalingFit
    whose offset field carries <sz>_c.  K_z is negative (the
    magnetization decreases with lam).
    """
    deltas = np.geomspace(window[0], window[1], n_points)
    sz_c = transverse_magnetization(ChainParams(lam=1.0, gamma=gamma,
                                                quad_tol=quad_tol))
    sx = np.array([
        math.sqrt(2.0 / (1.0 + gamma)) * (gamma**2 * (1.0 - (1.0 + d) ** -2)) ** BETA_X
        for d in deltas
    ])
    k_x = float(np.exp(np.mean(np.log(sx) - BETA_X * np.log(deltas))))
    dsz = np.array([
        abs(transverse_magnetization(ChainParams(lam=1.0 + d, gamma=gamma,
                                                 quad_tol=quad_tol)) - sz_c)
        for d in deltas
    ])
    fit = fit_power_law(deltas, dsz, window)
    fit = ScalingFit(exponent=fit.exponent, prefactor=fit.prefactor,
                     offset=float(sz_c), window=fit.window,
                     r_squared=fit.r_squared)
    return k_x, fit


def linear_mpp_scaling_check(gamma, *, n_points=12, quad_tol=DEFAULT_QUAD_TOL,
                             exponent_window=(1e-3, 1e-1)) -> LinearOnsetCheck:
    """Fit R against lam - lam_c* on (0, delta_lam/10] and compare the
    slope with the prediction from the independently fitted prefactors:
    K_x b_x d^(b_x-1) + K_z b_z d^(b_z-1) with d = lam_c* - 1, b_x = 1/8.
    """
    mpp = mpp_locate(gamma, resolution=1e-9, quad_tol=quad_tol)
    delta_lam = mpp - 1.0
    k_x, sz_fit = magnetization_exponents(gamma, window=exponent_window,
                                          quad_tol=quad_tol)
    beta_z = sz_fit.exponent
    k_z = -sz_fit.prefactor
    predicted = (k_x * BETA_X * delta_lam ** (BETA_X - 1.0)
                 + k_z * beta_z * delta_lam ** (beta_z - 1.0))
    xs = np.linspace(delta_lam / 10.0 / n_points, delta_lam / 10.0, n_points)
    ys = np.array([
        single_site_rom(mpp + x, gamma, quad_tol=quad_tol, method="closed_form")
        for x in xs
    ])
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LinearOnsetCheck(slope=float(slope), intercept=float(intercept),
                            r_squared=r2, window=(float(xs[0]), float(xs[-1])),
                            predicted_slope=float(predicted), mpp=mpp,
                            delta_lam=delta_lam)


def _collapse_cost(curves, lam_c, mu, nu, n_grid):
    xs, ys = [], []
    for n, (lam, drom) in curves.items():
        xs.append(n ** (1.0 / nu) * (np.asarray(lam) - lam_c[n]))
        ys.append(n ** (-mu / nu) * np.asarray(drom))
    lo = max(x.min() for x in xs)
    hi = min(x.max() for x in xs)
    if hi <= lo:
        return np.inf
    grid = np.linspace(lo, hi, n_grid)
    stack = np.vstack([np.interp(grid, x, y) for x, y in zip(xs, ys)])
    master = stack.mean(axis=0)
    denom = float((master**2).sum())
    if denom == 0.0:
        return np.inf
    return float(((stack - master) ** 2).sum()) / denom


def fss_collapse(curves, lam_c, *, mu_range=(0.5, 1.5), nu_range=(0.5, 1.5),
                 coarse_step=0.01, refine_step=0.001, n_grid=50,
                 flat_tol=1e-6) -> CollapseResult:
    """Collapse per-size derivative curves onto a common master curve.

    curves: {N: (lam_array, drom_array)}; lam_c: {N: finite-size critical
    point}.  The rescaled curves N^(-mu/nu) dR vs N^(1/nu)(lam - lam_c[N])
    are interpolated onto a shared grid over their overlapping range and
    the normalized squared spread about the pointwise mean is minimized
    by coarse grid search followed by one local refinement; entirely
    deterministic.  A flat cost surface raises DegenerateCollapseError.
    """
    if len(curves) < 3:
        raise ValueError("collapse requires at least 3 sizes")
    sizes = tuple(sorted(curves))
    mus = np.arange(mu_range[0], mu_range[1] + 1e-12, coarse_step)
    nus = np.arange(nu_range[0], nu_range[1] + 1e-12, coarse_step)
    costs = np.empty((len(mus), len(nus)))
    for i, mu in enumerate(mus):
        for j, nu in enumerate(nus):
            costs[i, j] = _collapse_cost(curves, lam_c, mu, nu, n_grid)
    finite = costs[np.isfinite(costs)]
    if finite.size == 0:
        raise DegenerateCollapseError("no (mu, nu) candidate produced overlap")
    if finite.max() - finite.min() < flat_tol * max(finite.max(), 1e-300):
        raise DegenerateCollapseError("collapse cost surface is flat")
    i, j = np.unravel_index(np.nanargmin(np.where(np.isfinite(costs), costs, np.nan)),
                            costs.shape)
    mu0, nu0 = mus[i], nus[j]
    best = (mu0, nu0, costs[i, j])
    half = 1.5 * coarse_step
    for mu in np.arange(mu0 - half, mu0 + half + 1e-12, refine_step):
        for nu in np.arange(nu0 - half, nu0 + half + 1e-12, refine_step):
            c = _collapse_cost(curves, lam_c, mu, nu, n_grid)
            if c < best[2]:
                best = (mu, nu, c)
    unrescaled = _collapse_cost(curves, lam_c, 0.0, np.inf, n_grid)
    return CollapseResult(mu=float(best[0]), nu=float(best[1]),
                          collapse_cost=float(best[2]), sizes=sizes,
                          unrescaled_cost=float(unrescaled))


@dataclass(frozen=True, eq=False)
class FssStudy:
    gamma: float
    sizes: tuple
    sb_field: float
    lam_c: dict
    curves: dict
    collapse: CollapseResult


def _finite_size_order_curve(n, gamma, lams, method, sb_field, eig_tol):
    """(sx_N, sz_N) along lams for one chain length.

    method 'correlator': sx_N = sqrt(<sx_c sx_{c+N/2}>) from the plain
    (parity-symmetric) ground state; the long-range correlator is
    parity-even, exponentially small in the disordered phase and carries
    the exact order-parameter scaling dimension at criticality.  Methods
    'pair' and 'field' take the central-site <sigma_x> of the broken
    branch built by the corresponding route in finite_chain.
    """
    if method == "correlator":
        prof = magnetization_profile(n, gamma, lams, sb_field=0.0,
                                     eig_tol=eig_tol, pair_distance=n // 2)
        sx = np.array([math.sqrt(max(p.coeffs[5], 0.0)) for p in prof["pair"]])
        return sx, prof["sz"]
    prof = magnetization_profile(n, gamma, lams, sb_field=sb_field,
                                 eig_tol=eig_tol, method=method)
    return prof["sx"], prof["sz"]


def fss_study(gamma, sizes=(8, 12, 16, 20), *, method="correlator", sb_field=0.0,
              eig_tol=1e-7, peak_grid=None, curve_halfwidth=0.18,
              curve_points=27, mu_range=(0.5, 1.5),
              nu_range=(0.5, 1.5)) -> FssStudy:
    """End-to-end finite-size scaling study of the robustness derivative.

    For each chain length a finite-size order parameter sx_N is swept
    over lam, the finite-size critical point lam_c[N] is located at the
    peak of d sx_N / d lam, the single-site robustness curve
    R_N = max(sx_N + sz_N - 1, 0) is differentiated, and the per-size
    derivative curves are collapsed.

    The default order-parameter estimator is the long-range correlator
    route ('correlator'): open chains of desk-scale length cannot be
    polarized by a field small enough to leave the spectrum unbiased
    (the parity splitting decays only as lam^-N), so the broken-state
    magnetization is estimated from sqrt(<sx_0 sx_r>) at r = N/2, which
    has the exact scaling dimension at criticality.  Alternatives:
    'pair' (two-level combination) and 'field' (explicit sb_field).
    Deterministic throughout.
    """
    curves = {}
    lam_c = {}
    for n in sorted(sizes):
        grid = (np.asarray(peak_grid, dtype=float) if peak_grid is not None
                else np.linspace(0.60, 1.25, 27))
        sx, _ = _finite_size_order_curve(n, gamma, grid, method, sb_field, eig_tol)
        dsx = np.gradient(sx, grid)
        k = int(np.argmax(dsx))
        if k == 0 or k == grid.size - 1:
            raise BracketError("order-parameter derivative peak at grid edge")
        x0, x1, x2 = grid[k - 1:k + 2]
        y0, y1, y2 = dsx[k - 1:k + 2]
        denom = y0 - 2.0 * y1 + y2
        lc = float(x1 + 0.5 * (y0 - y2) / denom * (x1 - x0)) if denom < 0 else float(x1)
        lam_c[n] = lc
        lams = np.linspace(lc - curve_halfwidth, lc + curve_halfwidth, curve_points)
        sx, sz = _finite_size_order_curve(n, gamma, lams, method, sb_field, eig_tol)
        rom = np.maximum(sx + sz - 1.0, 0.0)  # onset form of the single-site magic
        curves[n] = (lams, np.gradient(rom, lams))
    collapse = fss_collapse(curves, lam_c, mu_range=mu_range, nu_range=nu_range)
    return FssStudy(gamma=gamma, sizes=tuple(sorted(sizes)), sb_field=sb_field,
                    lam_c=lam_c, curves=curves, collapse=collapse)


def mrp_locate(gamma, r, *, bracket=(1.0, 3.0), resolution=1e-6,
               temperature=0.0, quad_tol=1e-10) -> float:
    """Magic rising point of the symmetric-sector two-qubit state:
    onset of R along lam inside `bracket` (single crossing assumed)."""

    def f(lam):
        return two_site_rom(lam, gamma, r, temperature=temperature,
                            quad_tol=quad_tol)

    return _bisect_onset(f, bracket[0], bracket[1], resolution, ROM_THRESHOLD)


def mrp_scaling(gamma, r_values, *, bracket=(1.0, 3.0), resolution=1e-6,
                quad_tol=1e-10) -> ScalingFit:
    """Fit lam_MRP - 1 = offset + exponent * ln r over the given distances."""
    drift = [
        mrp_locate(gamma, r, bracket=bracket, resolution=resolution,
                   quad_tol=quad_tol) - 1.0
        for r in r_values
    ]
    rs = np.asarray(r_values, dtype=float)
    return fit_log_divergence(rs, np.asarray(drift), (rs.min(), rs.max()))


def sudden_death_temperature(gamma, r, *, lam=1.0, t_hi=4.0, resolution=1e-6,
                             quad_tol=1e-9) -> float:
    """Temperature above which the two-qubit robustness is exactly zero.

    Bisection on R(T) = 1e-9 between T -> 0 and t_hi; requires magic to
    be present at low temperature and absent at t_hi.
    """
    def f(t):
        return two_site_rom(lam, gamma, r, temperature=t, quad_tol=quad_tol)

    t_lo = 1e-6
    if f(t_lo) <= ROM_THRESHOLD:
        raise BracketError(
            f"no magic at (lam={lam}, r={r}) near T = 0; sudden death undefined"
        )
    if f(t_hi) > ROM_THRESHOLD:
        raise BracketError(f"magic still present at t_hi = {t_hi}")
    lo, hi = t_lo, t_hi
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if f(mid) > ROM_THRESHOLD:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def kappa_fit(gamma, r_values, *, lam=1.0, quad_tol=1e-9,
              resolution=1e-5) -> ScalingFit:
    """Power law T_c ~ r^kappa of the sudden-death temperature."""
    tcs = [
        sudden_death_temperature(gamma, r, lam=lam, quad_tol=quad_tol,
                                 resolution=resolution)
        for r in r_values
    ]
    rs = np.asarray(r_values, dtype=float)
    return fit_power_law(rs, np.asarray(tcs), (rs.min(), rs.max()))


def _rom_grid(gamma, lam_values, t_values, r, quad_tol):
    out = np.empty((len(lam_values), len(t_values)))
    for i, lam in enumerate(lam_values):
        for j, t in enumerate(t_values):
            out[i, j] = two_site_rom(float(lam), gamma, r, temperature=float(t),
                                     quad_tol=quad_tol)
    return out


def _fit_through_origin(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    denom = float((x * x).sum())
    if denom == 0.0:
        raise FitError("cannot fit a line through the origin on zero abscissae")
    return float((x * y).sum() / denom)


def crossover_map(gamma, lam_values, t_values, r, *, quad_tol=1e-9,
                  check_consistency=True, raise_above=0.10,
                  lam_c=1.0) -> CrossoverMap:
    """Finite-temperature map of the two-qubit robustness and its
    derivatives around the critical coupling.

    Grids must exclude lam_c exactly (the crossover temperature vanishes
    there).  First derivatives are centered differences on the grid, the
    mixed derivative uses the four-corner stencil.  Per-column extrema of
    |dR/dT| define T*(lam) and extrema of |d2R/dTdlam| define T_M(lam);
    both are fitted through the origin against |lam - lam_c|.

    With check_consistency the first derivatives are recomputed from
    half-step staggered grids; a relative disagreement above
    `raise_above` (default 10%) raises MapResolutionError.  The achieved
    worst-case disagreement is stored in `consistency`.
    """
    lam_values = np.asarray(lam_values, dtype=float)
    t_values = np.asarray(t_values, dtype=float)
    if np.any(lam_values == lam_c):
        raise ValueError("lam grid must exclude the critical coupling itself")
    if lam_values.size < 5 or t_values.size < 5:
        raise ValueError("grids need at least 5 points per axis")
    d_lam_step = float(np.diff(lam_values).mean())
    d_t_step = float(np.diff(t_values).mean())
    rom = _rom_grid(gamma, lam_values, t_values, r, quad_tol)

    d_lam = np.gradient(rom, lam_values, axis=0)
    d_t = np.gradient(rom, t_values, axis=1)
    d_mixed = np.gradient(np.gradient(rom, lam_values, axis=0), t_values, axis=1)

    # cells whose whole stencil sits inside the well-populated magical
    # region; the sudden-death boundary and its exponentially thin
    # precursor strip carry kink artifacts in the differences rather
    # than crossover structure
    positive = rom > max(ROM_THRESHOLD, 0.05 * float(rom.max()))
    smooth = positive.copy()
    smooth[1:, :] &= positive[:-1, :]
    smooth[:-1, :] &= positive[1:, :]
    smooth[:, 1:] &= positive[:, :-1]
    smooth[:, :-1] &= positive[:, 1:]

    consistency = float("nan")
    if check_consistency:
        stag_lam = np.concatenate([[lam_values[0] - 0.5 * d_lam_step],
                                   lam_values + 0.5 * d_lam_step])
        rom_sl = _rom_grid(gamma, stag_lam, t_values, r, quad_tol)
        d_lam_half = (rom_sl[1:, :] - rom_sl[:-1, :]) / d_lam_step
        stag_t = np.concatenate([[t_values[0] - 0.5 * d_t_step],
                                 t_values + 0.5 * d_t_step])
        if stag_t[0] <= 0.0:
            stag_t[0] = 0.5 * t_values[0]
        rom_st = _rom_grid(gamma, lam_values, stag_t, r, quad_tol)
        d_t_half = (rom_st[:, 1:] - rom_st[:, :-1]) / d_t_step
        # consistency is judged on the cells that carry the map's signal:
        # the derivative must also be a substantial fraction of the field
        # maximum (near the activation floor the magnitudes are
        # exponentially small and only their sign is meaningful)
        rel = []
        for full, half in ((d_lam, d_lam_half), (d_t, d_t_half)):
            floor = 0.25 * np.abs(half).max()
            sel = (np.abs(half) > floor) & smooth
            sel[0, :] = sel[-1, :] = False  # one-sided rows of np.gradient
            sel[:, 0] = sel[:, -1] = False
            if sel.any():
                rel.append(float((np.abs(full - half)[sel] / np.abs(half)[sel]).max()))
        consistency = max(rel) if rel else 0.0
        if consistency > raise_above:
            raise MapResolutionError(
                f"step-halving disagreement {consistency:.1%} exceeds "
                f"{raise_above:.0%}; refine the grid"
            )

    abs_dt = np.where(smooth, np.abs(d_t), 0.0)
    abs_mixed = np.where(smooth, np.abs(d_mixed), 0.0)
    t_star = np.full(lam_values.size, np.nan)
    t_m = np.full(lam_values.size, np.nan)
    dt_floor = 0.02 * abs_dt.max() if abs_dt.max() > 0 else np.inf
    mx_floor = 0.02 * abs_mixed.max() if abs_mixed.max() > 0 else np.inf
    for i in range(lam_values.size):
        j = int(np.argmax(abs_dt[i]))
        if 0 < j < t_values.size - 1 and abs_dt[i, j] > dt_floor:
            t_star[i] = t_values[j]
        j = int(np.argmax(abs_mixed[i]))
        if 0 < j < t_values.size - 1 and abs_mixed[i, j] > mx_floor:
            t_m[i] = t_values[j]
    dist = np.abs(lam_values - lam_c)
    sel_star = np.isfinite(t_star)
    sel_m = np.isfinite(t_m)
    if not sel_star.any() or not sel_m.any():
        raise MapResolutionError("no interior derivative extrema found on the grid")
    a = _fit_through_origin(dist[sel_star], t_star[sel_star])
    b = _fit_through_origin(dist[sel_m], t_m[sel_m])

    with np.errstate(divide="ignore", invalid="ignore"):
        gruneisen = np.abs(d_t) / np.abs(d_lam)

    return CrossoverMap(gamma=gamma, r=r, lam_values=lam_values,
                        t_values=t_values, rom=rom, d_lam=d_lam, d_t=d_t,
                        d_mixed=d_mixed, gruneisen=gruneisen,
                        t_star_points=t_star, t_m_points=t_m,
                        t_star_slope=a, t_m_slope=b, consistency=consistency)


def global_magic_profile(n_sites, gamma, r, lam_values, *, sb_field=1e-6,
                         eig_tol=1e-8):
    """Sweep of the two-site global magic in the symmetry-broken finite
    chain: Q(lam), the joint and product-marginal robustness, and the
    central-site magnetizations, from one warm-started diagonalization
    per grid point."""
    prof = magnetization_profile(n_sites, gamma, lam_values, sb_field=sb_field,
                                 eig_tol=eig_tol, pair_distance=r)
    p2 = _polytope(2)
    q = np.empty(len(lam_values))
    rom_joint = np.empty(len(lam_values))
    rom_product = np.empty(len(lam_values))
    for k, pair in enumerate(prof["pair"]):
        joint = log_robustness(pair, p2)
        product_state = tensor_product(partial_trace(pair, 0),
                                       partial_trace(pair, 1))
        product = log_robustness(product_state, p2)
        q[k] = joint - product
        rom_joint[k] = 2.0**joint - 1.0
        rom_product[k] = 2.0**product - 1.0
    prof.update({"global_magic": q, "rom_joint": rom_joint,
                 "rom_product": rom_product})
    return prof
