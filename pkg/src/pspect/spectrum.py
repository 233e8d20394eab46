"""Eigenvalue sequences of the weighted radial p-Laplacian.

The eigenvalue problem on the unit interval (radial variable of the unit
ball in R^N),

    (r^{N-1} phi_p(u'))' + mu * m(r) * r^{N-1} phi_p(u) = 0,
    u'(0) = u(1) = 0,

with a continuous weight m whose positive part has positive measure,
carries two sequences of simple eigenvalues,

    0 < mu_1^+ < mu_2^+ < ...        (always),
    0 > mu_1^- > mu_2^- > ...        (iff the negative part has positive
                                      measure too),

and the eigenfunction of mu_k^nu has exactly k-1 simple interior zeros.
The solver is a shooting scan: with the normalization u(0) = 1 the miss
function D(mu) = u(1; mu) vanishes exactly at eigenvalues, and the
interior zero count Z(mu) of the shot pins the index (an eigenfunction
with z interior zeros belongs to index k = z + 1).  For an indefinite
weight D need not be monotone between eigenvalues, so the scan records
(D, Z) on an expanding grid, splits any gap whose zero count jumps by
more than one, brackets the sign changes of D, polishes each root with
bracketed root finding, and classifies it by the zero count of the
eigenfunction.  The grid marches at a loose integrator tolerance; every
reported eigenvalue is re-bracketed and polished at the tight tolerance,
so the final values are independent of how the scan got there.

A caveat that the scan cannot remove: completeness of the computed list
("no other eigenvalues") is certified only within the scanned range at
the scan resolution.

Also here: the variational cross-check for the first eigenvalue (a
direct minimization of the Rayleigh quotient on a grid, independent of
the shooting machinery), the structural verification operations (weight
monotonicity, continuity in p, Sturm comparison, zero proliferation),
and the degree crossing index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solveh_banded
from scipy.optimize import brentq

from .errors import NegativeSequenceAbsent, PreconditionError
from .pfuncs import pi_p
from .radial_ivp import DEFAULT_ATOL, DEFAULT_RTOL, LinearRHS, Problem, Trajectory, shoot
from .report import CheckReport
from .weights import Weight

SCAN_RTOL = 1e-7
SCAN_ATOL = 1e-9
BOUNDARY_TOL = 1e-9
BOUNDARY_MARGIN = 1e-6
DEFAULT_BUDGET = 4000
BIG_D = 1e12


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class Eigenpair:
    k: int
    nu: str
    mu: float
    trajectory: Trajectory
    zeros: tuple
    boundary_residual: float
    tail_trimmed: int = 0  # mu-resolution tail artifacts removed from zeros


@dataclass
class EigenResult:
    nu: str
    requested: int
    eigenpairs: list
    complete: bool
    probes_used: int
    message: str = ""

    @property
    def values(self) -> list:
        return [ep.mu for ep in self.eigenpairs]

    def mu(self, k: int) -> float:
        for ep in self.eigenpairs:
            if ep.k == k:
                return ep.mu
        raise KeyError(f"eigenvalue k={k} not in result (largest validated: "
                       f"{self.eigenpairs[-1].k if self.eigenpairs else 0})")


CAVEAT = (
    "completeness is certified only within the scanned range at the scan "
    "resolution; the problem's full spectrum claim is not machine-checkable"
)


@dataclass
class Spectrum:
    """Both eigenvalue lists for one (p, N, weight) instance."""

    p: float
    N: int
    weight_hash: str
    positive: list = field(default_factory=list)
    negative: list = field(default_factory=list)
    caveat: str = CAVEAT

    def eigenpairs(self, nu: str) -> list:
        return self.positive if nu == "+" else self.negative

    def values(self, nu: str) -> list:
        return [ep.mu for ep in self.eigenpairs(nu)]

    def mu(self, k: int, nu: str) -> float:
        for ep in self.eigenpairs(nu):
            if ep.k == k:
                return ep.mu
        raise KeyError(f"mu_{k}^{nu} not computed")


def compute_spectrum(p, N, m: Weight, K: int, nus=("+", "-"), **kw) -> Spectrum:
    """Convenience wrapper: run find_eigenvalues for each requested sign."""
    prob = Problem.linear(p, N, m, math.nan)
    spec = Spectrum(p=float(prob.p), N=prob.N, weight_hash=m.fingerprint())
    for nu in nus:
        res = find_eigenvalues(prob, K, nu, **kw)
        if nu == "+":
            spec.positive = res.eigenpairs
        else:
            spec.negative = res.eigenpairs
    return spec


# ---------------------------------------------------------------------------
# miss function


def miss_and_count(problem: Problem, mu: float, *, rtol=DEFAULT_RTOL,
                   atol=DEFAULT_ATOL):
    """Terminal value D = u(1; mu) and interior zero count Z for the alpha=1 shot.

    A shot that blows up reports D as +-1e12 (sign of u at the blow-up
    radius); its zero count covers the traversed range only.
    """
    if not isinstance(problem.rhs, LinearRHS):
        raise PreconditionError("miss_and_count needs a linear right-hand side")
    traj = shoot(problem.with_mu(mu), 1.0, rtol=rtol, atol=atol, n_samples=65)
    if traj.blowup_radius is not None:
        d = math.copysign(BIG_D, traj.last_u)
    else:
        d = traj.terminal_u
    return d, traj.interior_zero_count(BOUNDARY_MARGIN)


# ---------------------------------------------------------------------------
# eigenvalue scan


@dataclass
class _Node:
    x: float  # |mu|
    d: float
    z: int


class _Prober:
    """Memoized (D, Z) probes along one sign axis at two tolerance levels.

    Linear shots cannot blow up at a finite radius, they only grow, and
    through a long one-signed stretch the genuine amplitude can dwarf the
    general-purpose guard of :func:`shoot`; probes therefore run with the
    guard moved out of the way (1e100 keeps the flux far from overflow).
    """

    BLOWUP = 1e100

    def __init__(self, problem, sgn, budget):
        self.problem = problem
        self.sgn = sgn
        self.budget = budget
        self.count = 0
        self.cache_loose = {}
        self.cache_tight = {}

    def _shoot(self, x, rtol, atol, n_samples=65):
        self.count += 1
        if self.count > self.budget:
            raise _BudgetExhausted()
        return shoot(
            self.problem.with_mu(self.sgn * x),
            1.0,
            rtol=rtol,
            atol=atol,
            n_samples=n_samples,
            blowup_limit=self.BLOWUP,
        )

    def loose(self, x) -> _Node:
        node = self.cache_loose.get(x)
        if node is None:
            traj = self._shoot(x, SCAN_RTOL, SCAN_ATOL)
            d = (
                math.copysign(BIG_D, traj.last_u)
                if traj.blowup_radius is not None
                else traj.terminal_u
            )
            node = _Node(x, d, traj.interior_zero_count(BOUNDARY_MARGIN))
            self.cache_loose[x] = node
        return node

    def tight(self, x, rtol, atol) -> float:
        d = self.cache_tight.get(x)
        if d is None:
            traj = self._shoot(x, rtol, atol)
            d = (
                math.copysign(BIG_D, traj.last_u)
                if traj.blowup_radius is not None
                else traj.terminal_u
            )
            self.cache_tight[x] = d
        return d


class _BudgetExhausted(Exception):
    pass


def _seed_scale(problem: Problem, sgn: int) -> float:
    """Order-of-magnitude guess for |mu_1| from the m=1 closed form."""
    p, n = problem.p, problem.N
    lam1 = (p - 1.0) * (0.5 * pi_p(p)) ** p
    rs = np.linspace(0.0, 1.0, 2049)
    mv = problem.m(rs)
    part = np.maximum(sgn * mv, 0.0)
    mass = float(np.trapezoid(part * n * rs ** (n - 1), rs))
    return lam1 / max(mass, 1e-8)


def find_eigenvalues(
    problem: Problem,
    K: int,
    nu: str = "+",
    *,
    tol_rel: float = DEFAULT_RTOL,
    tol_abs: float = DEFAULT_ATOL,
    boundary_tol: float = BOUNDARY_TOL,
    budget: int = DEFAULT_BUDGET,
    scan_ratio: float = 1.8,
) -> EigenResult:
    """First K eigenvalues of one sign, with eigenfunctions and nodal classes.

    Raises NegativeSequenceAbsent when nu='-' is requested but the weight
    has no negative part.  On scan-budget exhaustion the result is
    returned partial, the message naming the largest validated index.
    """
    if K < 1:
        raise PreconditionError("K must be >= 1")
    if nu not in ("+", "-"):
        raise PreconditionError("nu must be '+' or '-'")
    if not isinstance(problem.rhs, LinearRHS):
        problem = Problem.linear(problem.p, problem.N, problem.m, math.nan)
    if not problem.m.in_M():
        raise PreconditionError("weight is not admissible: meas{m > 0} = 0")
    if nu == "-" and problem.m.negated().in_M() is False:
        raise NegativeSequenceAbsent(
            "negative sequence absent: meas{m < 0} = 0 for this weight"
        )

    sgn = 1 if nu == "+" else -1
    prober = _Prober(problem, sgn, budget)
    message = ""
    complete = True
    found: dict[int, tuple[float, Trajectory]] = {}

    try:
        nodes = _scan(prober, K, _seed_scale(problem, sgn), scan_ratio)
        _classify_brackets(
            nodes, prober, found, K, tol_rel, tol_abs, boundary_tol
        )
        # targeted refinement for any missing index
        rounds = 0
        while len([k for k in found if k <= K]) < K and rounds < 12:
            rounds += 1
            missing = [k for k in range(1, K + 1) if k not in found]
            nodes = _refine_for_missing(nodes, prober, missing[0], found)
            _classify_brackets(
                nodes, prober, found, K, tol_rel, tol_abs, boundary_tol
            )
    except _BudgetExhausted:
        complete = False

    ks = sorted(k for k in found if k <= K)
    if ks != list(range(1, K + 1)):
        complete = False
        largest = 0
        for k in range(1, K + 1):
            if k in found:
                largest = k
            else:
                break
        message = (
            f"scan budget exhausted after {prober.count} probes; "
            f"largest validated index {largest}"
        )
        ks = [k for k in ks if k <= largest]

    pairs = []
    for k in ks:
        mu_abs, traj = found[k]
        mu = sgn * mu_abs
        zeros, trimmed = _trim_tail_artifacts(traj, k)
        pairs.append(
            Eigenpair(
                k=k,
                nu=nu,
                mu=mu,
                trajectory=traj,
                zeros=zeros,
                boundary_residual=abs(traj.terminal_u),
                tail_trimmed=trimmed,
            )
        )
    values = [ep.mu * sgn for ep in pairs]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise RuntimeError("eigenvalue ordering violated, scan inconsistent")
    return EigenResult(
        nu=nu,
        requested=K,
        eigenpairs=pairs,
        complete=complete,
        probes_used=prober.count,
        message=message,
    )


def _scan(prober: _Prober, K: int, seed: float, ratio: float = 1.8):
    """Expanding (D, Z) grid until Z >= K, with gap splitting to dZ <= 1."""
    nodes = [_Node(0.0, 1.0, 0)]
    x = 0.25 * seed
    ceiling = 1e4 * (1.0 + seed)
    while True:
        nodes.append(prober.loose(x))
        if nodes[-1].z >= K:
            break
        if x > ceiling:
            raise _BudgetExhausted()
        x *= ratio
        ceiling = 1e4 * (1.0 + _first_root_scale(nodes, seed))
    return _split_gaps(nodes, prober)


def _first_root_scale(nodes, seed):
    for a, b in zip(nodes, nodes[1:]):
        if a.d * b.d < 0:
            return b.x
    return seed


def _midpoint(x1, x2):
    if x1 == 0.0:
        return x2 / 3.0
    if x2 / x1 > 4.0:
        return math.sqrt(x1 * x2)
    return 0.5 * (x1 + x2)


def _split_gaps(nodes, prober, floor_rel: float = 2e-3):
    """Insert probes until adjacent zero counts differ by at most one.

    Splitting stops at a relative gap width floor: an indefinite weight
    can change the count by two at a single parameter (an interior
    tangency of the shot), which no amount of splitting resolves into
    steps of one.  Whatever sign changes exist at the floor resolution
    are still bracketed and classified.
    """
    nodes = sorted(nodes, key=lambda n: n.x)
    done = False
    while not done:
        done = True
        out = [nodes[0]]
        for nxt in nodes[1:]:
            cur = out[-1]
            dz = nxt.z - cur.z
            sign_change = cur.d * nxt.d < 0
            needs_split = abs(dz) >= 2 or (abs(dz) == 1 and not sign_change)
            if needs_split and (nxt.x - cur.x) > floor_rel * max(1.0, nxt.x):
                out.append(prober.loose(_midpoint(cur.x, nxt.x)))
                done = False
            out.append(nxt)
        nodes = sorted(out, key=lambda n: n.x)
    return nodes


def _refine_for_missing(nodes, prober, k_missing, found):
    """Hunt a missing index by count-guided bisection of its gap.

    Indefinite weights produce near-degenerate eigenvalue pairs
    (eigenfunctions localized on different positivity islands) whose
    splitting can be far below any fixed scan resolution; across such a
    pair the zero count jumps by two with no net sign change, so the
    plain splitter leaves the gap unresolved at its floor.  Bisection
    steered by the count homes in on the sliver strictly between the two
    roots (count exactly k_missing) at one probe per bit; a node in that
    sliver brackets both roots against the gap's ends.  Every probe is
    kept as a scan node either way.
    """
    nodes = sorted(nodes, key=lambda n: n.x)
    out = list(nodes)
    a = b = None
    for cur, nxt in zip(nodes, nodes[1:]):
        # gaps that already carry a sign change belong to the classifier
        if cur.z <= k_missing - 1 and nxt.z >= k_missing and cur.d * nxt.d > 0:
            a, b = cur, nxt
            break
    if a is None:
        return out
    for _ in range(60):
        if (b.x - a.x) <= 1e-10 * max(1.0, b.x):
            break
        m = prober.loose(_midpoint(a.x, b.x))
        out.append(m)
        if m.z <= k_missing - 1:
            a = m
        elif m.z >= k_missing + 1:
            b = m
        elif m.d * a.d < 0 or m.d * b.d < 0:
            break  # inside the inter-pair sliver and sign-bracketed: done
        else:
            # the count says sliver but the sign disagrees: right after a
            # boundary entry the new zero hides inside the counting margin
            # (terminal slopes are huge for stiff shots), so the count is
            # unreliable here; the D sign is exact, hunt the bump instead
            out.extend(_hunt_sign_bump(prober, a, b))
            break
    dedup = {n.x: n for n in out}
    return sorted(dedup.values(), key=lambda n: n.x)


def _hunt_sign_bump(prober, a, b):
    """Golden-section extremum hunt for a micro sign bump of D on (a, b).

    A close eigenvalue pair inside the gap shows as a narrow window where
    D takes the sign opposite to both endpoints; locating one point of
    that window hands the classifier two sign-change brackets.  Stops as
    soon as a probe flips sign, or when the window provably cannot be
    resolved at double precision.
    """
    want = -1.0 if a.d > 0 else 1.0  # sign the bump must reach
    inv_gr = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = a.x, b.x
    x1 = hi - inv_gr * (hi - lo)
    x2 = lo + inv_gr * (hi - lo)
    n1, n2 = prober.loose(x1), prober.loose(x2)
    probes = [n1, n2]
    for _ in range(70):
        if want * n1.d > 0 or want * n2.d > 0:
            break
        if hi - lo <= 4e-16 * max(1.0, hi):
            break
        # keep the side with the larger D in the wanted direction
        if want * n1.d > want * n2.d:
            hi = x2
            x2, n2 = x1, n1
            x1 = hi - inv_gr * (hi - lo)
            n1 = prober.loose(x1)
            probes.append(n1)
        else:
            lo = x1
            x1, n1 = x2, n2
            x2 = lo + inv_gr * (hi - lo)
            n2 = prober.loose(x2)
            probes.append(n2)
    return probes


def _classify_brackets(nodes, prober, found, K, tol_rel, tol_abs, boundary_tol):
    """Polish every D sign change at tight tolerance and classify its index.

    The index comes from the bracket endpoints' zero counts: across a
    clean bracket the count steps from k-1 to k (the new zero enters
    through r = 1 exactly at the root), so k is determined by integers
    measured safely away from the root.  Counting at the root itself is
    fragile, the entering zero hovers at the boundary margin; the root
    shot is consulted only when the endpoint counts are ambiguous.
    """
    for a, b in zip(nodes, nodes[1:]):
        if not (a.d * b.d < 0) or a.x == 0.0 and a.d == 0.0:
            continue
        if min(a.z, b.z) > K:  # beyond what was asked for
            continue
        x_loose = brentq(
            lambda x: prober.loose(x).d, a.x, b.x, xtol=1e-15, rtol=8.9e-16
        )
        x_root = _polish_root(prober, x_loose, a.x, b.x, tol_rel, tol_abs)
        if any(abs(x_root - x_seen) <= 1e-9 * x_seen for x_seen, _ in found.values()):
            continue  # same root reached through a second bracket
        traj = prober._shoot(x_root, tol_rel, tol_abs, n_samples=513)
        z_lo, z_hi = min(a.z, b.z), max(a.z, b.z)
        if z_hi - z_lo == 1:
            k = z_hi  # unambiguous: root index = lower count + 1
        else:
            z_root = traj.interior_zero_count(BOUNDARY_MARGIN)
            k = z_root + 1 if z_lo <= z_root <= z_hi else z_lo + 1
        if k in found:
            # keep the smaller |mu| if two roots claim one index
            if x_root < found[k][0]:
                found[k] = (x_root, traj)
        else:
            found[k] = (x_root, traj)


def _trim_tail_artifacts(traj: Trajectory, k: int):
    """Remove trailing mu-resolution artifacts from an eigenfunction's zeros.

    The eigenvalue is known only to the root-finder resolution; through a
    terminal non-oscillatory stretch the tail of the shot is determined
    only to a noise scale of order the terminal miss |u(1)| (its
    parameter sensitivity is exponential there), and that noise can cross
    zero.  With the index k already fixed by the bracket, a surplus
    trailing crossing whose rebound stays within two orders of the
    terminal miss and whose slope has collapsed is that artifact.  Real
    nodal zeros, including weak ones of near-degenerate eigenfunctions,
    rebound far above the terminal noise and survive.
    """
    noise = 100.0 * abs(traj.terminal_u) if traj.terminal is not None else 0.0
    trimmed = 0
    interior = [z for z in traj.zeros if z.r < 1.0 - BOUNDARY_MARGIN]
    while len(interior) > k - 1:
        z = interior[-1]
        idx = int(np.searchsorted(traj.r, z.r))
        tail_max = float(np.max(np.abs(traj.u[idx:]))) if idx < len(traj.u) else 0.0
        if tail_max <= noise and abs(z.uprime) < 1e-3 * traj.sup_uprime:
            interior.pop()
            trimmed += 1
        else:
            break
    return tuple(z.r for z in interior), trimmed


def _polish_root(prober, x0, lo, hi, tol_rel, tol_abs):
    """Re-bracket the loose root at tight tolerance and solve to 1e-12 rel."""
    w = max(1e-6 * x0, 1e-12)
    while w < 0.2 * x0:
        a, b = max(x0 - w, lo), min(x0 + w, hi)
        da = prober.tight(a, tol_rel, tol_abs)
        db = prober.tight(b, tol_rel, tol_abs)
        if da * db < 0:
            return brentq(
                lambda x: prober.tight(x, tol_rel, tol_abs),
                a,
                b,
                xtol=1e-15,
                rtol=8.9e-16,
            )
        w *= 10.0
    # fall back to the full loose bracket at tight tolerance
    da = prober.tight(lo, tol_rel, tol_abs)
    db = prober.tight(hi, tol_rel, tol_abs)
    if da * db < 0:
        return brentq(
            lambda x: prober.tight(x, tol_rel, tol_abs), lo, hi,
            xtol=1e-15, rtol=8.9e-16,
        )
    return x0


# ---------------------------------------------------------------------------
# Rayleigh quotient oracle


@dataclass
class RayleighResult:
    value: float
    converged: bool
    grad_norm: float
    iterations: int
    r: np.ndarray = field(repr=False, default=None)
    u: np.ndarray = field(repr=False, default=None)


def rayleigh_mu1(
    problem: Problem,
    nu: str = "+",
    *,
    n_grid: int = 4096,
    stall_tol: float = 1e-8,
    max_iter: int = 500,
) -> RayleighResult:
    """First eigenvalue by direct minimization of the Rayleigh quotient.

    Minimizes  int r^{N-1} |u'|^p  /  int r^{N-1} m |u|^p  over grid
    functions with u(1) = 0 and positive weighted denominator, by descent
    in an H^1-like metric (each step solves a tridiagonal system, the
    p = 2 stiffness preconditioner) with amplitude renormalization and a
    backtracking line search; stops when the quotient stalls.  Entirely
    independent of the shooting machinery, as a cross-check must be.

    nu='-' is the exact mirror: minus the value for the negated weight.
    """
    if nu == "-":
        res = rayleigh_mu1(
            problem_with_weight(problem, problem.m.negated()),
            "+",
            n_grid=n_grid,
            stall_tol=stall_tol,
            max_iter=max_iter,
        )
        return RayleighResult(
            value=-res.value,
            converged=res.converged,
            grad_norm=res.grad_norm,
            iterations=res.iterations,
            r=res.r,
            u=res.u,
        )
    if not problem.m.in_M():
        raise PreconditionError("weight has no positive part, mu_1^+ undefined")

    p, n_dim = problem.p, problem.N
    m = problem.m
    M = n_grid
    h = 1.0 / M
    r_nodes = np.linspace(0.0, 1.0, M + 1)
    r_mid = 0.5 * (r_nodes[:-1] + r_nodes[1:])

    w_num = h * r_mid ** (n_dim - 1)  # one per difference d_i, i = 1..M
    q = h * r_nodes ** (n_dim - 1)
    q[0] *= 0.5
    q = q[:M]  # nodes 0..M-1 (u_M = 0 fixed)
    mv = m(r_nodes[:M])

    qm = q * mv

    def quotient(u):
        d = np.diff(np.append(u, 0.0)) / h
        num = float(np.dot(w_num, np.abs(d) ** p))
        den = float(np.dot(qm, np.abs(u) ** p))
        return num, den

    def quotient_and_grad(u):
        d = np.diff(np.append(u, 0.0)) / h
        phid = np.sign(d) * np.abs(d) ** (p - 1.0)
        num = float(np.dot(w_num, np.abs(d) ** p))
        den = float(np.dot(qm, np.abs(u) ** p))
        gnum = np.empty_like(u)
        t = w_num * phid / h
        gnum[0] = -p * t[0]
        gnum[1:] = p * (t[:-1] - t[1:])
        gden = p * qm * np.sign(u) * np.abs(u) ** (p - 1.0)
        return num, den, gnum, gden

    # p=2 stiffness in banded (upper) form for the descent metric:
    # B[0,0] = c2[0], B[j,j] = c2[j-1] + c2[j], B[j-1,j] = -c2[j-1]
    c2 = r_mid ** (n_dim - 1) / h
    ab = np.zeros((2, M))
    ab[1, 0] = c2[0]
    ab[1, 1:] = c2[:-1] + c2[1:]
    ab[0, 1:] = -c2[:-1]

    def precondition(g):
        return solveh_banded(ab, g)

    starts = _rayleigh_starts(m, r_nodes[:M])
    best = None
    for u0 in starts:
        res = _descend(
            u0, quotient, quotient_and_grad, precondition, stall_tol,
            max_iter, p,
        )
        if res is not None and (best is None or res[0] < best[0]):
            best = res
    if best is None:
        raise PreconditionError(
            "no admissible start vector (positive weighted denominator)"
        )
    value, u, grad_norm, iters, converged = best
    return RayleighResult(
        value=value,
        converged=converged,
        grad_norm=grad_norm,
        iterations=iters,
        r=r_nodes[:M],
        u=u,
    )


def problem_with_weight(problem: Problem, m: Weight) -> Problem:
    return Problem(problem.p, problem.N, m, problem.rhs)


def _rayleigh_starts(m: Weight, r):
    """One bump per positive island of the weight, plus the combined profile."""
    starts = []
    mv = np.asarray(m(r))
    pos = np.maximum(mv, 0.0)
    if pos.max() > 0:
        combined = pos * (1.0 - r)
        if combined.max() > 0:
            starts.append(combined / combined.max())
    for a, b in m.positive_intervals:
        if b - a < 1e-6:
            continue
        bump = np.maximum(1.0 - np.abs((r - 0.5 * (a + b)) / (0.5 * (b - a))), 0.0)
        bump *= 1.0 - r
        if bump.max() > 0:
            starts.append(bump / bump.max())
    return starts


def _descend(u0, quotient, quotient_and_grad, precondition, stall_tol,
             max_iter, p):
    u = u0.copy()
    num, den = quotient(u)
    if den <= 0:
        return None
    u = u / den ** (1.0 / p)  # amplitude renormalization: D(u) = 1
    num, den, gnum, gden = quotient_and_grad(u)
    rq = num / den
    stalls = 0
    grad_norm = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        grad = (gnum - rq * gden) / den
        z = precondition(grad)
        gz = float(np.dot(grad, z))
        grad_norm = math.sqrt(abs(gz))
        if gz <= 0:
            break

        def psi(t):
            num2, den2 = quotient(u - t * z)
            if den2 <= 0:
                return 1e30
            return num2 / den2

        t_best, rq_try = _line_minimize(psi, rq)
        if t_best is None or rq_try >= rq - 1e-16 * abs(rq):
            break
        u = u - t_best * z
        _, den = quotient(u)
        u = u / den ** (1.0 / p)
        num, den, gnum, gden = quotient_and_grad(u)
        rq_prev, rq = rq, num / den
        if abs(rq_prev - rq) <= stall_tol * max(1.0, abs(rq)):
            stalls += 1
            if stalls >= 2:
                break
        else:
            stalls = 0
    converged = stalls >= 2
    return rq, u, grad_norm, it, converged


def _line_minimize(psi, psi0, t0: float = 1.0):
    """Bracket and parabolically refine min psi(t) for t > 0."""
    # expand or shrink to find t with psi(t) < psi0
    t = t0
    val = psi(t)
    if val >= psi0:
        for _ in range(50):
            t *= 0.5
            val = psi(t)
            if val < psi0:
                break
        else:
            return None, psi0
    else:
        while True:
            t2 = 2.0 * t
            val2 = psi(t2)
            if val2 >= val:
                break
            t, val = t2, val2
    # golden-section refinement on [0, 2t]
    a, b = 0.0, 2.0 * t
    inv_gr = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_gr * (b - a)
    d = a + inv_gr * (b - a)
    fc, fd = psi(c), psi(d)
    for _ in range(40):
        if b - a < 1e-3 * (1.0 + b):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_gr * (b - a)
            fc = psi(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_gr * (b - a)
            fd = psi(d)
    t_best = c if fc < fd else d
    f_best = min(fc, fd)
    if f_best < val:
        return t_best, f_best
    return t, val


# ---------------------------------------------------------------------------
# verification operations


def verify_weight_monotonicity(p, N, m1: Weight, m2: Weight, K: int,
                               *, margin: float = 1e-8, **kw) -> CheckReport:
    """Strict decrease of both eigenvalue sequences when the weight increases."""
    rs = np.linspace(0.0, 1.0, 4096)
    v1, v2 = m1(rs), m2(rs)
    scale = max(1.0, float(np.max(np.abs(v1))), float(np.max(np.abs(v2))))
    if np.max(np.abs(v1 - v2)) <= 1e-15 * scale:
        rep = CheckReport("weight_monotonicity", True, not_applicable=True)
        rep.add("not applicable (equal weights)")
        return rep
    if np.any(v1 > v2 + 1e-12 * scale):
        raise PreconditionError("weight monotonicity requires m1 <= m2 pointwise")
    for m in (m1, m2):
        if not m.in_M():
            raise PreconditionError("both weights must lie in M(I)")

    rep = CheckReport("weight_monotonicity", True)
    for nu in ("+", "-"):
        if nu == "-" and (
            not m1.negated().in_M() or not m2.negated().in_M()
        ):
            rep.add("negative sequences skipped (a weight has no negative part)")
            continue
        r1 = find_eigenvalues(Problem.linear(p, N, m1, math.nan), K, nu, **kw)
        r2 = find_eigenvalues(Problem.linear(p, N, m2, math.nan), K, nu, **kw)
        for k in range(1, K + 1):
            a, b = r1.mu(k), r2.mu(k)
            gap = a - b
            ok = gap > margin
            rep.passed &= ok
            rep.add(
                f"mu_{k}^{nu}: m1 -> {a:.10g}, m2 -> {b:.10g}, "
                f"decrease {gap:.3e} {'>' if ok else '<='} {margin:g}"
            )
            rep.data[f"mu_{k}^{nu}"] = (a, b)
    return rep


def closed_form_mu(p, k: int) -> float:
    """m = 1, N = 1 eigenvalues: (p-1) * ((2k-1) pi_p / 2)^p."""
    return (p - 1.0) * ((2 * k - 1) * pi_p(p) / 2.0) ** p


def verify_p_continuity(N, m: Weight, K: int, p_grid, *, nus=("+",),
                        slope_factor: float = 10.0, **kw) -> CheckReport:
    """Trace mu_k^nu along a p-grid; jumps must behave like a continuous curve.

    Two bounds per curve: (a) each consecutive jump at most a Lipschitz
    bound C * step, with C taken from the unit-weight closed-form slope
    rescaled to the curve's own magnitude and padded by `slope_factor`;
    (b) self-consistency, no jump beyond `slope_factor` times the curve's
    median secant slope.  For the unit weight the traced curve is also
    compared pointwise against the closed form.
    """
    p_grid = [float(p) for p in p_grid]
    if any(p <= 1.0 for p in p_grid):
        raise PreconditionError("p grid must lie in (1, inf)")
    rep = CheckReport("p_continuity", True)
    if len(p_grid) <= 1:
        rep.add("single-point grid: trivially continuous")
        rep.not_applicable = False
        return rep

    is_unit = _is_unit_weight(m)
    for nu in nus:
        if nu == "-" and not m.negated().in_M():
            rep.add("negative sequence skipped (weight has no negative part)")
            continue
        curves = trace_eigenvalues_in_p(N, m, K, p_grid, nu, **kw)
        rep.data[f"curves_{nu}"] = curves
        for k in range(1, K + 1):
            mus = curves[k]
            jumps = [abs(b - a) for a, b in zip(mus, mus[1:])]
            steps = [abs(b - a) for a, b in zip(p_grid, p_grid[1:])]
            # closed-form Lipschitz estimate, rescaled to this curve
            cf = [closed_form_mu(p, k) for p in p_grid]
            cf_slope = max(abs(b - a) / s for a, b, s in zip(cf, cf[1:], steps))
            scale = abs(mus[0]) / cf[0]
            c_bound = slope_factor * cf_slope * scale
            worst = max(j / s for j, s in zip(jumps, steps))
            ok_c = worst <= c_bound
            slopes = sorted(j / s for j, s in zip(jumps, steps))
            median_slope = slopes[len(slopes) // 2]
            ok_med = worst <= slope_factor * median_slope or worst == 0.0
            rep.passed &= ok_c and ok_med
            rep.add(
                f"mu_{k}^{nu}: max secant {worst:.4g} "
                f"{'<=' if ok_c else '>'} C = {c_bound:.4g} (closed-form scaled), "
                f"{'<=' if ok_med else '>'} {slope_factor:g} x median "
                f"{median_slope:.4g}"
            )
            if is_unit and nu == "+":
                dev = max(
                    abs(mu - w) / w for w, mu in zip(cf, mus)
                )
                okc = dev <= 1e-6
                rep.passed &= okc
                rep.add(
                    f"mu_{k} vs closed form: max rel dev {dev:.3e} "
                    f"{'<=' if okc else '>'} 1e-6"
                )
    rep.add(CAVEAT)
    return rep


def _is_unit_weight(m: Weight) -> bool:
    rs = np.linspace(0.0, 1.0, 257)
    return bool(np.max(np.abs(m(rs) - 1.0)) < 1e-14)


def trace_eigenvalues_in_p(N, m: Weight, K: int, p_grid, nu: str, **kw) -> dict:
    """Warm-started continuation of mu_k^nu over a p grid.

    Returns {k: [mu_k(p) for p in grid]}.  The predictor rescales the
    previous value by the closed-form (m = 1) ratio, which is exact for
    the unit weight and an excellent first guess otherwise.
    """
    curves = {k: [] for k in range(1, K + 1)}
    res0 = find_eigenvalues(Problem.linear(p_grid[0], N, m, math.nan), K, nu, **kw)
    if not res0.complete:
        raise RuntimeError("p-continuation failed at the first grid point")
    for k in range(1, K + 1):
        curves[k].append(res0.mu(k))
    for p_prev, p_cur in zip(p_grid, p_grid[1:]):
        for k in range(1, K + 1):
            ratio = closed_form_mu(p_cur, k) / closed_form_mu(p_prev, k)
            pred = curves[k][-1] * ratio
            mu = _continue_eigenvalue(
                Problem.linear(p_cur, N, m, math.nan), k, nu, pred, **kw
            )
            curves[k].append(mu)
    return curves


def _continue_eigenvalue(problem, k, nu, mu_pred, *, tol_rel=DEFAULT_RTOL,
                         tol_abs=DEFAULT_ATOL, budget=DEFAULT_BUDGET):
    """Locate the index-k eigenvalue near a predicted value."""
    sgn = 1 if nu == "+" else -1
    prober = _Prober(problem, sgn, budget)
    x0 = abs(mu_pred)
    for w in (0.04, 0.12, 0.3, 0.6):
        a, b = x0 * (1.0 - w), x0 * (1.0 + w)
        na, nb = prober.loose(a), prober.loose(b)
        if na.z <= k - 1 and nb.z >= k and na.d * nb.d < 0:
            x_loose = brentq(
                lambda x: prober.loose(x).d, a, b, xtol=1e-14, rtol=1e-12
            )
            x_root = _polish_root(prober, x_loose, a, b, tol_rel, tol_abs)
            traj = prober._shoot(x_root, tol_rel, tol_abs, n_samples=129)
            if traj.interior_zero_count(BOUNDARY_MARGIN) == k - 1:
                return sgn * x_root
    # fall back to a fresh scan
    res = find_eigenvalues(
        problem, k, nu, tol_rel=tol_rel, tol_abs=tol_abs, budget=budget
    )
    return res.mu(k)


def verify_sturm(p, N, b1: Weight, b2: Weight, **kw) -> CheckReport:
    """Comparison: a strictly larger positive coefficient forces an extra zero."""
    rs = np.linspace(1e-4, 1.0 - 1e-4, 4096)
    v1, v2 = b1(rs), b2(rs)
    if np.any(v1 <= 0.0) or np.any(v2 <= v1):
        raise PreconditionError(
            "Sturm comparison requires 0 < b1(r) < b2(r) on (0, 1)"
        )
    z1 = _coefficient_zero_count(p, N, b1, **kw)
    z2 = _coefficient_zero_count(p, N, b2, **kw)
    rep = CheckReport("sturm_comparison", z2 >= z1 + 1)
    rep.add(f"zeros(u1) = {z1}, zeros(u2) = {z2}, need zeros(u2) >= zeros(u1) + 1")
    rep.data.update(z1=z1, z2=z2)
    return rep


def _coefficient_zero_count(p, N, b: Weight, *, rtol=DEFAULT_RTOL,
                            atol=DEFAULT_ATOL) -> int:
    traj = shoot(Problem.linear(p, N, b, 1.0), 1.0, rtol=rtol, atol=atol,
                 n_samples=65)
    return traj.interior_zero_count(BOUNDARY_MARGIN)


def verify_zero_proliferation(p, N, m: Weight, interval, multipliers,
                              **kw) -> CheckReport:
    """Zero counts on a positive-weight window grow without bound in t * m."""
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise PreconditionError("window [a, b] must have positive length")
    if m.min_on(a, b) <= 0.0:
        raise PreconditionError("window [a, b] must lie inside {m > 0}")
    ts = [float(t) for t in multipliers]
    if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
        raise PreconditionError("multipliers must be strictly increasing")

    counts = []
    for t in ts:
        traj = shoot(
            Problem.linear(p, N, m, t), 1.0, n_samples=65,
            rtol=kw.get("rtol", DEFAULT_RTOL), atol=kw.get("atol", DEFAULT_ATOL),
        )
        if traj.blowup_radius is not None and traj.blowup_radius < b:
            raise PreconditionError(
                f"shot blew up at r={traj.blowup_radius:.4g} before "
                f"traversing the window"
            )
        # a boundary zero (u(1) = 0 at an eigen-coefficient) is not an
        # interior oscillation; keep the count semantics interior
        counts.append(traj.zeros_in(a, min(b, 1.0 - BOUNDARY_MARGIN)))

    rep = CheckReport("zero_proliferation", True)
    if len(ts) == 1:
        rep.add(f"single multiplier t={ts[0]:g}: count {counts[0]} (degenerate check)")
        rep.data["counts"] = counts
        return rep
    nondec = all(c2 >= c1 for c1, c2 in zip(counts, counts[1:]))
    growth = counts[-1] >= counts[0] + len(ts) / 2.0
    rep.passed = nondec and growth
    rep.add(f"multipliers: {ts}")
    rep.add(f"window counts: {counts} (nondecreasing: {nondec})")
    rep.add(
        f"growth: count[last] = {counts[-1]} needs >= count[first] + J/2 = "
        f"{counts[0] + len(ts) / 2:.1f}: {growth}"
    )
    rep.data["counts"] = counts
    return rep


def crossing_index(spectrum: Spectrum, mu: float, *, tol: float = 1e-8) -> int:
    """Sign (-1)^beta of the topological degree between eigenvalues.

    beta counts the eigenvalues crossed: mu_k^+ < mu for mu > 0, or
    mu_k^- > mu for mu < 0.  Errors out when mu sits within tol of an
    eigenvalue or beyond the validated range of the spectrum.
    """
    if mu >= 0:
        values = spectrum.values("+")
        if not values or mu >= values[-1]:
            raise PreconditionError(
                "mu beyond the validated range of the positive sequence"
            )
        if any(abs(mu - v) <= tol * max(1.0, abs(v)) for v in values):
            raise PreconditionError("mu too close to an eigenvalue")
        beta = sum(1 for v in values if v < mu)
    else:
        values = spectrum.values("-")
        if not values or mu <= values[-1]:
            raise PreconditionError(
                "mu beyond the validated range of the negative sequence"
            )
        if any(abs(mu - v) <= tol * max(1.0, abs(v)) for v in values):
            raise PreconditionError("mu too close to an eigenvalue")
        beta = sum(1 for v in values if v > mu)
    return 1 if beta % 2 == 0 else -1
