"""Nodal solutions and bifurcation branches of the nonlinear problem.

The parameter-dependent problem

    (r^{N-1} phi_p(u'))' + gamma * r^{N-1} * m(r) * f(u) = 0,
    u'(0) = u(1) = 0,

with f continuous, f(s) s > 0 off zero, and finite positive limits
f_0 and f_inf of f(s)/phi_p(s) at 0 and infinity, has for each nodal
class (k zeros minus one, sign near the origin) a solution branch
connecting gamma = mu_k^nu / f_0 at zero amplitude to
gamma = mu_k^nu / f_inf at infinite amplitude, where mu_k^nu are the
eigenvalues of the linearization weight problem.  Nodal solutions exist
exactly when gamma lies between those endpoints.

Everything here drives the shooting integrator:

* find_nodal scans initial amplitudes alpha of one sign over a geometric
  grid, looks for sign changes of the miss u(1; alpha) among shots with
  the requested interior zero count, and bisects.  The homogeneous
  degenerate case f = phi_p at an eigenvalue (every amplitude solves) is
  detected and reported rather than bisected.
* trace_branch walks the amplitude grid solving the scalar equation
  u(1; gamma, alpha) = 0 in gamma at every alpha, warm-starting each
  bracket at the previous point; folds in gamma are handled by the
  bracket, loss of the bracket or a change of the zero count truncates
  the branch with a diagnostic (the continuation beyond a split is not
  traced).
* verify_bifurcation_points checks that small-amplitude solutions of the
  perturbed linear problem localize the parameter near mu_k^nu, the
  numerical shadow of bifurcation from the trivial line.

"Unbounded continuum" is operationalized as: traced up to sup-norm 1e3
without bracket loss.  The topological statement itself is not
machine-checkable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import PreconditionError
from .greens import apply_Gp
from .pfuncs import _pval
from .radial_ivp import DEFAULT_ATOL, DEFAULT_RTOL, Problem, Trajectory, shoot
from .report import CheckReport
from .spectrum import BOUNDARY_MARGIN, Spectrum, find_eigenvalues
from .weights import Weight

BOUNDARY_TOL = 1e-9
HOMOGENEOUS_TOL = 1e-8


# ---------------------------------------------------------------------------
# nonlinearities and perturbations


@dataclass(frozen=True)
class Nonlinearity:
    """Continuous f with declared limits f(s)/phi_p(s) -> f0, finf."""

    fn: object = field(repr=False)
    f0: float
    finf: float
    label: str = ""

    def __call__(self, u: float) -> float:
        return self.fn(u)

    @classmethod
    def rational(cls, p, f0: float = 1.0, finf: float = 2.0, q: float = 2.0):
        """The built-in family phi_p(u) * (f0 + finf |u|^q) / (1 + |u|^q)."""
        pv = _pval(p)
        if f0 <= 0 or finf <= 0 or q <= 0:
            raise PreconditionError("rational family needs f0, finf, q > 0")
        e = pv - 1.0

        def fn(u):
            if u == 0.0:
                return 0.0
            au = abs(u)
            ratio = (f0 + finf * au**q) / (1.0 + au**q)
            return math.copysign(au**e * ratio, u)

        return cls(
            fn=fn,
            f0=float(f0),
            finf=float(finf),
            label=f"rational(p={pv:g}, f0={f0:g}, finf={finf:g}, q={q:g})",
        )

    @classmethod
    def phi(cls, p):
        """The homogeneous map itself (f0 = finf = 1): the eigenvalue problem."""
        pv = _pval(p)
        e = pv - 1.0

        def fn(u):
            if u == 0.0:
                return 0.0
            return math.copysign(abs(u) ** e, u)

        return cls(fn=fn, f0=1.0, finf=1.0, label=f"phi_p(p={pv:g})")

    def validate(self, p, *, limit_rtol: float = 0.05):
        """Numerical checks of sign condition and the two declared limits."""
        pv = _pval(p)
        for s in np.concatenate((-np.logspace(-6, 6, 25), np.logspace(-6, 6, 25))):
            if not self.fn(float(s)) * s > 0.0:
                raise PreconditionError(f"f(s) s > 0 fails at s = {s:g}")
        for s_abs, target, name in ((1e-6, self.f0, "f0"), (1e6, self.finf, "finf")):
            for s in (s_abs, -s_abs):
                ratio = self.fn(s) / math.copysign(abs(s) ** (pv - 1.0), s)
                if abs(ratio - target) > limit_rtol * target:
                    raise PreconditionError(
                        f"declared {name} = {target:g} but f/phi_p = {ratio:g} "
                        f"at s = {s:g}"
                    )
        return self


@dataclass(frozen=True)
class Perturbation:
    """The built-in family g(r, u; mu) = c * m(r) * |u|^{p-1+delta} sign(u).

    With delta > 0 this is o(|u|^{p-1}) near u = 0 uniformly in r and in
    mu on bounded sets, which is what the bifurcation statements need.
    """

    p: float
    c: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "p", _pval(self.p))
        if self.delta <= 0:
            raise PreconditionError("perturbation exponent delta must be > 0")

    def __call__(self, mval, r, u, mu) -> float:
        if u == 0.0:
            return 0.0
        return self.c * mval * math.copysign(abs(u) ** (self.p - 1.0 + self.delta), u)


# ---------------------------------------------------------------------------
# nodal solutions at fixed gamma


@dataclass(frozen=True)
class NodalSolution:
    k: int
    sigma: str
    gamma: float
    alpha: float
    trajectory: Trajectory
    residual: float

    @property
    def sup_norm(self) -> float:
        return self.trajectory.sup_u

    @property
    def zeros(self) -> tuple:
        return tuple(
            z.r for z in self.trajectory.zeros if z.r < 1.0 - BOUNDARY_MARGIN
        )


@dataclass
class NodalSearch:
    """Outcome of one amplitude scan: a solution or the scan evidence."""

    solution: NodalSolution | None
    scanned: tuple
    counts_seen: dict
    degenerate_homogeneous: bool = False
    diagnostics: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.solution is not None


def _sigma_sign(sigma: str) -> int:
    if sigma in ("+", "plus"):
        return 1
    if sigma in ("-", "minus"):
        return -1
    raise PreconditionError("sigma must be '+' or '-'")


def find_nodal(
    p,
    N,
    m: Weight,
    f: Nonlinearity,
    gamma: float,
    k: int,
    sigma: str,
    *,
    alpha_min: float = 1e-4,
    alpha_max: float = 1e4,
    ratio: float = 1.25,
    boundary_tol: float = BOUNDARY_TOL,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    with_residual: bool = True,
) -> NodalSearch:
    """Search the amplitude axis of one sign for a k-class nodal solution."""
    if gamma == 0.0:
        raise PreconditionError("gamma must be nonzero")
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if not m.in_M():
        raise PreconditionError("weight is not admissible: meas{m > 0} = 0")
    f.validate(p)
    sgn = _sigma_sign(sigma)
    problem = Problem.nonlinear(p, N, m, gamma, f)

    n_steps = int(math.ceil(math.log(alpha_max / alpha_min) / math.log(ratio)))
    alphas = sgn * alpha_min * ratio ** np.arange(n_steps + 1)

    probes = []
    for a in alphas:
        traj = shoot(problem, float(a), rtol=rtol, atol=atol, n_samples=65)
        if traj.blowup_radius is not None:
            d = math.copysign(1e12, traj.last_u)
            z = -1  # truncated count, not comparable
        else:
            d = traj.terminal_u
            z = traj.interior_zero_count(BOUNDARY_MARGIN)
        probes.append((float(a), d, z, traj.sup_u))

    counts_seen = {}
    for _, _, z, _ in probes:
        counts_seen[z] = counts_seen.get(z, 0) + 1

    # homogeneous degeneracy: a run of direct hits means every alpha solves
    hits = [abs(d) <= HOMOGENEOUS_TOL * max(1.0, sup) for _, d, _, sup in probes]
    degenerate = any(
        hits[i] and hits[i + 1] and hits[i + 2] for i in range(len(hits) - 2)
    )

    diagnostics = []
    solution = None

    if degenerate:
        diagnostics.append(
            "homogeneous degeneracy: u(1; alpha) vanishes along the whole scan "
            "(gamma is an eigenvalue of the homogeneous problem); returning the "
            "first amplitude with u(1) = 0"
        )
        for a, d, z, sup in probes:
            if abs(d) <= max(boundary_tol, 1e-12 * sup) and z == k - 1:
                traj = shoot(problem, a, rtol=rtol, atol=atol)
                solution = _package_solution(
                    problem, traj, k, sigma, gamma, a, with_residual
                )
                break

    if solution is None:
        # a zero crosses the boundary exactly at the root, so a valid
        # bracket shows count k-1 on one side (k or k-2 on the other)
        for (a1, d1, z1, s1), (a2, d2, z2, s2) in zip(probes, probes[1:]):
            if (z1 != k - 1 and z2 != k - 1) or d1 * d2 >= 0:
                continue
            if z1 < 0 or z2 < 0:  # blow-up probe, counts not comparable
                continue
            root = brentq(
                lambda a: _miss_alpha(problem, a, rtol, atol),
                a1,
                a2,
                xtol=1e-15,
                rtol=8.9e-16,
            )
            traj = shoot(problem, float(root), rtol=rtol, atol=atol)
            z = traj.interior_zero_count(BOUNDARY_MARGIN)
            tol = max(boundary_tol, 1e-12 * traj.sup_u)
            if z == k - 1 and abs(traj.terminal_u) <= tol:
                solution = _package_solution(
                    problem, traj, k, sigma, gamma, float(root), with_residual
                )
                break
            diagnostics.append(
                f"bracket ({a1:g}, {a2:g}) converged to alpha={root:g} but "
                f"zero count {z} or miss {traj.terminal_u:g} disqualified it"
            )

    if solution is None and not degenerate:
        diagnostics.append(
            f"scanned alpha in [{alphas[0]:g}, {alphas[-1]:g}] "
            f"({len(alphas)} shots); interior zero counts seen: "
            f"{sorted(c for c in counts_seen if c >= 0)}"
        )

    return NodalSearch(
        solution=solution,
        scanned=(float(alphas[0]), float(alphas[-1])),
        counts_seen=counts_seen,
        degenerate_homogeneous=degenerate,
        diagnostics=diagnostics,
    )


def _miss_alpha(problem, a, rtol, atol) -> float:
    traj = shoot(problem, float(a), rtol=rtol, atol=atol, n_samples=65)
    if traj.blowup_radius is not None:
        return math.copysign(1e12, traj.last_u)
    return traj.terminal_u


def _package_solution(problem, traj, k, sigma, gamma, alpha, with_residual):
    res = solution_residual(problem, traj) if with_residual else math.nan
    return NodalSolution(
        k=k,
        sigma=sigma,
        gamma=gamma,
        alpha=alpha,
        trajectory=traj,
        residual=res,
    )


def solution_residual(problem: Problem, traj: Trajectory) -> float:
    """Fixed-point residual through the solution operator.

    Rebuilds the source gamma * m(r) * f(u(r)) from the trajectory,
    applies the explicit solution operator and returns the relative
    sup-norm difference.  Independent of the shooting integrator's
    internals, which is the point.
    """
    rhs = problem.rhs
    m = problem.m

    def source(r):
        r_arr = np.asarray(r, dtype=float)
        uu = traj.dense(np.clip(r_arr, traj.r[0], traj.r[-1]))[0]
        fv = np.array([rhs.f(float(x)) for x in np.atleast_1d(uu)])
        return rhs.gamma * m(r_arr) * fv.reshape(np.shape(uu))

    prof = apply_Gp(problem.p, problem.N, source)
    rs = np.linspace(traj.r[0], 1.0, 257)
    diff = np.max(np.abs(traj.dense(rs)[0] - prof(rs)))
    return float(diff / max(1.0, traj.sup_u))


# ---------------------------------------------------------------------------
# branch tracing


@dataclass(frozen=True)
class BranchPoint:
    gamma: float
    alpha: float
    sup_norm: float
    zeros: int


@dataclass
class Branch:
    k: int
    sigma: str
    nu: str
    points: list
    gamma_zero_estimate: float | None = None  # bifurcation end, alpha -> 0
    gamma_inf_estimate: float | None = None  # asymptote end, alpha -> inf
    truncated: bool = False
    diagnostics: list = field(default_factory=list)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([pt.gamma for pt in self.points])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([pt.alpha for pt in self.points])


def trace_branch(
    p,
    N,
    m: Weight,
    f: Nonlinearity,
    k: int,
    sigma: str,
    alpha_range=(1e-3, 1e3),
    nu: str = "+",
    *,
    ratio: float = 1.25,
    spectrum: Spectrum | None = None,
    bracket_width: float = 0.1,
    boundary_tol: float = BOUNDARY_TOL,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> Branch:
    """Trace the (gamma, alpha) curve of one nodal class over an amplitude grid.

    Parametrized by amplitude with a one-dimensional gamma solve per
    point (warm-started from the previous point); this follows folds in
    gamma naturally.  Folds in alpha are not expected for the built-in
    family; they would surface as bracket loss and truncate the branch.
    """
    f.validate(p)
    sgn = _sigma_sign(sigma)
    if spectrum is not None:
        mu_k = spectrum.mu(k, nu)
    else:
        mu_k = find_eigenvalues(
            Problem.linear(p, N, m, math.nan), k, nu, tol_rel=rtol, tol_abs=atol
        ).mu(k)

    a_min, a_max = float(alpha_range[0]), float(alpha_range[1])
    n_steps = int(math.ceil(math.log(a_max / a_min) / math.log(ratio)))
    alphas = sgn * a_min * ratio ** np.arange(n_steps + 1)
    alphas[-1] = sgn * a_max

    branch = Branch(k=k, sigma=sigma, nu=nu, points=[])
    gamma_prev = mu_k / f.f0

    for a in alphas:
        got = _solve_gamma(
            p, N, m, f, float(a), gamma_prev, k, bracket_width,
            boundary_tol, rtol, atol,
        )
        if got is None:
            branch.truncated = True
            branch.diagnostics.append(
                f"gamma bracket lost at alpha = {a:g} "
                f"(last gamma {gamma_prev:.8g}); branch truncated"
            )
            break
        gamma_a, traj, note = got
        if note:
            branch.truncated = True
            branch.diagnostics.append(note + f" at alpha = {a:g}; branch split off")
            break
        branch.points.append(
            BranchPoint(
                gamma=gamma_a,
                alpha=float(a),
                sup_norm=traj.sup_u,
                zeros=traj.interior_zero_count(BOUNDARY_MARGIN),
            )
        )
        gamma_prev = gamma_a

    if branch.points:
        branch.gamma_zero_estimate = branch.points[0].gamma
        branch.gamma_inf_estimate = branch.points[-1].gamma
    return branch


def _solve_gamma(p, N, m, f, alpha, gamma_center, k, width, boundary_tol,
                 rtol, atol):
    """Root of gamma -> u(1; gamma, alpha) near a warm-started center."""

    def miss(gamma):
        prob = Problem.nonlinear(p, N, m, gamma, f)
        traj = shoot(prob, alpha, rtol=rtol, atol=atol, n_samples=65)
        if traj.blowup_radius is not None:
            return math.copysign(1e12, traj.last_u), -1
        return traj.terminal_u, traj.interior_zero_count(BOUNDARY_MARGIN)

    w = width
    while w <= 0.9:
        lo = gamma_center - w * abs(gamma_center)
        hi = gamma_center + w * abs(gamma_center)
        d_lo, z_lo = miss(lo)
        d_hi, z_hi = miss(hi)
        if d_lo * d_hi < 0 and (z_lo == k - 1 or z_hi == k - 1):
            root = brentq(
                lambda g: miss(g)[0], lo, hi, xtol=1e-15, rtol=8.9e-16
            )
            prob = Problem.nonlinear(p, N, m, float(root), f)
            traj = shoot(prob, alpha, rtol=rtol, atol=atol)
            z = traj.interior_zero_count(BOUNDARY_MARGIN)
            if abs(traj.terminal_u) > max(boundary_tol, 1e-12 * traj.sup_u):
                return None
            if z != k - 1:
                return float(root), traj, f"zero count changed to {z}"
            return float(root), traj, ""
        w *= 2.0
    return None


# ---------------------------------------------------------------------------
# bifurcation points of the perturbed linear problem


def verify_bifurcation_points(
    p,
    N,
    m: Weight,
    g: Perturbation,
    ks,
    nus=("+", "-"),
    *,
    alphas=(1e-1, 1e-2, 1e-3),
    offset_rtol: float = 1e-2,
    spectrum: Spectrum | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CheckReport:
    """Small-amplitude solutions of the perturbed problem localize mu_k^nu.

    For each index, sign and amplitude the parameter solving
    u(1; mu, alpha) = 0 with the right zero count is located near
    mu_k^nu; the offsets must be within offset_rtol * |mu_k^nu| at the
    smallest amplitude, shrink monotonically as alpha decreases, and the
    two sub-branches (alpha > 0 and alpha < 0) must both exist.
    """
    ks = list(ks)
    K = max(ks)
    if spectrum is None:
        from .spectrum import compute_spectrum

        spectrum = compute_spectrum(p, N, m, K, nus=nus, tol_rel=rtol, tol_abs=atol)

    rep = CheckReport("bifurcation_points", True)
    alphas = sorted(alphas, reverse=True)  # largest first, offsets must shrink
    for nu in nus:
        for k in ks:
            mu_k = spectrum.mu(k, nu)
            for sgn, sub in ((1, "+"), (-1, "-")):
                offsets = []
                for a in alphas:
                    mu_found = _locate_perturbed_parameter(
                        p, N, m, g, mu_k, k, sgn * a, rtol, atol
                    )
                    if mu_found is None:
                        rep.passed = False
                        rep.add(
                            f"k={k} nu={nu} sub-branch {sub}: no parameter found "
                            f"near mu={mu_k:.6g} at alpha={sgn * a:g}"
                        )
                        offsets = None
                        break
                    offsets.append(abs(mu_found - mu_k))
                if offsets is None:
                    continue
                within = offsets[-1] <= offset_rtol * abs(mu_k)
                # below the floor the offset is root-finder noise, not a
                # bifurcation distance (the g = 0 case sits there entirely)
                floor = 1e-8 * abs(mu_k)
                shrinking = all(
                    b < a or b <= floor for a, b in zip(offsets, offsets[1:])
                )
                rep.passed &= within and shrinking
                rep.add(
                    f"k={k} nu={nu} sub-branch {sub}: offsets "
                    + ", ".join(f"{o:.3e}" for o in offsets)
                    + f" (alpha = {', '.join(f'{a:g}' for a in alphas)});"
                    + f" within {offset_rtol:g}|mu|: {within}, shrinking: {shrinking}"
                )
                rep.data[(k, nu, sub)] = offsets
    return rep


def _locate_perturbed_parameter(p, N, m, g, mu_k, k, alpha, rtol, atol):
    def miss(mu):
        prob = Problem.perturbed(p, N, m, mu, g)
        traj = shoot(prob, alpha, rtol=rtol, atol=atol, n_samples=65)
        if traj.blowup_radius is not None:
            return math.copysign(1e12, traj.last_u), -1
        return traj.terminal_u, traj.interior_zero_count(BOUNDARY_MARGIN)

    w = 0.05
    while w <= 0.45:
        lo, hi = mu_k - w * abs(mu_k), mu_k + w * abs(mu_k)
        d_lo, z_lo = miss(lo)
        d_hi, z_hi = miss(hi)
        if d_lo * d_hi < 0 and (z_lo == k - 1 or z_hi == k - 1):
            root = brentq(lambda x: miss(x)[0], lo, hi, xtol=1e-14, rtol=1e-13)
            d_root, z_root = miss(root)
            if z_root == k - 1:
                return float(root)
        w *= 2.0
    return None


# ---------------------------------------------------------------------------
# admissible gamma intervals


@dataclass(frozen=True)
class GammaInterval:
    """One open interval of the existence statement, kept in stated order.

    lo/hi are reported exactly as the theorem writes them, so lo >= hi is
    possible and flags the interval as empty (a legitimate outcome the
    caller must surface, not an error).
    """

    nu: str
    lo: float
    hi: float
    ordering: str  # 'finf_first' or 'f0_first'

    @property
    def empty(self) -> bool:
        return not self.lo < self.hi

    def contains(self, gamma: float) -> bool:
        return self.lo < gamma < self.hi


def gamma_intervals(spectrum: Spectrum, f0: float, finf: float, k: int,
                    n: int | None = None) -> list:
    """The four admissible-gamma intervals for nodal classes k..n.

    With n = k these are the single-class intervals; with n > k the
    multi-class form, one pair of solutions for every class in between.
    Both orderings of (f0, finf) are always reported; empty intervals
    (including all four when f0 = finf) stay in the list with their
    empty flag set.
    """
    if f0 <= 0 or finf <= 0:
        raise PreconditionError("f0 and finf must be positive")
    if n is None:
        n = k
    if not 1 <= k <= n:
        raise PreconditionError("need 1 <= k <= n")
    mu_k_pos = spectrum.mu(k, "+")
    mu_n_pos = spectrum.mu(n, "+")
    out = [
        GammaInterval("+", mu_n_pos / finf, mu_k_pos / f0, "finf_first"),
        GammaInterval("+", mu_n_pos / f0, mu_k_pos / finf, "f0_first"),
    ]
    if spectrum.negative:
        mu_k_neg = spectrum.mu(k, "-")
        mu_n_neg = spectrum.mu(n, "-")
        out.append(GammaInterval("-", mu_k_neg / f0, mu_n_neg / finf, "finf_first"))
        out.append(GammaInterval("-", mu_k_neg / finf, mu_n_neg / f0, "f0_first"))
    return out
