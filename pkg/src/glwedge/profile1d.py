"""One-dimensional boundary-layer profiles for surface superconductivity.

Solves the effective variational problems on an interval [0, l] (and the
half-line limit obtained by interval truncation):

    E[f] = int_0^l (1 - e*k*t) { |f'|^2 + V(t) f^2 - (2 f^2 - f^4) / (2b) } dt,

    V(t) = (t + a - e*k*t^2/2)^2 / (1 - e*k*t)^2,

minimized over nonnegative profiles f with natural (Neumann) ends and over
the real phase parameter a.  The curvatureless case k = 0 reduces to the
classical harmonic-shifted well (t + a)^2.

The stationary profile solves

    -f'' + (e*k / (1 - e*k*t)) f' + V f = (1/b) (1 - f^2) f,   f'(0) = f'(l) = 0,

and the optimal phase satisfies the stationarity condition

    S(a) = int_0^l (t + a - e*k*t^2/2) / (1 - e*k*t) * f^2 dt = 0.

Derived quantities: the ground energy identity E = -(1/2b) int w f^4, the
curvature-correction coefficient computed both in integral and closed form,
the potential function F (cumulative vortex energy gain) and the cost
function K = (1 - d_l) f^2 + F with its positivity window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import eigh_tridiagonal, solve_banded

__all__ = [
    "Params1D",
    "Profile1D",
    "CostTables",
    "HalfLineSummary",
    "energy_1d",
    "energy_gradient_1d",
    "el_residual",
    "alpha_stationarity",
    "solve_profile_fixed_alpha",
    "optimize_alpha",
    "half_line_limit",
    "cost_tables",
    "check_cost_positivity",
    "curvature_expansion_check",
    "decay_check",
    "linearized_bottom_eigenvalue",
]

THETA0_DEFAULT = 0.5901


class DegenerateWeightError(ValueError):
    """The measure weight 1 - e*k*t vanishes or changes sign on the grid."""


class ConvergenceError(RuntimeError):
    """Inner nonlinear solve failed; carries the last residual norm."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class BracketingError(RuntimeError):
    """Outer phase minimization could not bracket a minimum."""

    def __init__(self, message: str, scan_table):
        super().__init__(message)
        self.scan_table = scan_table


@dataclass(frozen=True)
class Params1D:
    """Parameters of the 1D variational problem.

    b      : dimensionless coupling; surface regime is 1 < b < 1/theta0.
    k      : rescaled boundary curvature (enters only with eps > 0).
    eps    : curvature scale; the weight is 1 - eps*k*t.
    ell    : interval length (> 0).
    n      : number of grid points (>= 16); spacing h = ell / (n - 1).
    theta0 : universal constant used for admissibility warnings only.
    """

    b: float
    k: float = 0.0
    eps: float = 0.0
    ell: float = 12.0
    n: int = 2401
    theta0: float = THETA0_DEFAULT

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if self.ell <= 0:
            raise ValueError(f"ell must be positive, got {self.ell}")
        if self.n < 16:
            raise ValueError(f"need n >= 16 grid points, got {self.n}")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if self.eps * abs(self.k) * self.ell >= 1.0:
            raise DegenerateWeightError(
                f"weight 1 - eps*k*t degenerates on [0, {self.ell}]: "
                f"eps*|k|*ell = {self.eps * abs(self.k) * self.ell:.3g} >= 1"
            )

    @property
    def h(self) -> float:
        return self.ell / (self.n - 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.ell, self.n)

    def weight(self, t: np.ndarray) -> np.ndarray:
        return 1.0 - self.eps * self.k * t

    def potential(self, t: np.ndarray, alpha: float) -> np.ndarray:
        w = self.weight(t)
        return ((t + alpha - 0.5 * self.eps * self.k * t * t) / w) ** 2

    def in_surface_regime(self) -> bool:
        return 1.0 < self.b < 1.0 / self.theta0


@dataclass(frozen=True)
class Profile1D:
    """A converged nonnegative profile with its phase and energy."""

    params: Params1D
    alpha: float
    values: np.ndarray
    energy: float
    residual: float
    stationarity: float = math.nan
    degenerate: bool = False

    @property
    def grid(self) -> np.ndarray:
        return self.params.grid

    def interior_max(self) -> float:
        return float(np.max(self.values))


def _trapz_weights(n: int, h: float) -> np.ndarray:
    c = np.full(n, h)
    c[0] = c[-1] = 0.5 * h
    return c


def _derivative_matrix_apply(f: np.ndarray, h: float) -> np.ndarray:
    """Nodal derivative: central differences, 2nd-order one-sided at ends."""
    df = np.empty_like(f)
    df[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    df[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return df


def _derivative_matrix_transpose_apply(g: np.ndarray, h: float) -> np.ndarray:
    """Apply D^T for the derivative matrix above."""
    out = np.zeros_like(g)
    # interior central rows i: contributes +g[i]/(2h) at i+1, -g[i]/(2h) at i-1
    out[2:] += g[1:-1] / (2.0 * h)
    out[:-2] -= g[1:-1] / (2.0 * h)
    # one-sided row 0
    out[0] += -3.0 * g[0] / (2.0 * h)
    out[1] += 4.0 * g[0] / (2.0 * h)
    out[2] += -g[0] / (2.0 * h)
    # one-sided row n-1
    out[-1] += 3.0 * g[-1] / (2.0 * h)
    out[-2] += -4.0 * g[-1] / (2.0 * h)
    out[-3] += g[-1] / (2.0 * h)
    return out


def energy_1d(f: np.ndarray, alpha: float, p: Params1D) -> float:
    """Trapezoidal-rule energy of a nodal profile.

    Discretizes int_0^l (1 - e*k*t) { |f'|^2 + V f^2 - (2 f^2 - f^4)/(2b) } dt
    with f' by central differences (one-sided at the endpoints) and the
    trapezoidal rule, on the grid of ``p``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (p.n,):
        raise ValueError(f"profile has shape {f.shape}, expected ({p.n},)")
    t = p.grid
    w = p.weight(t)
    if np.any(w <= 0):
        raise DegenerateWeightError("weight nonpositive on grid")
    df = _derivative_matrix_apply(f, p.h)
    v = p.potential(t, alpha)
    f2 = f * f
    integrand = w * (df * df + v * f2 - (2.0 * f2 - f2 * f2) / (2.0 * p.b))
    return float(np.trapezoid(integrand, dx=p.h))


def energy_gradient_1d(f: np.ndarray, alpha: float, p: Params1D) -> np.ndarray:
    """Exact gradient of :func:`energy_1d` with respect to the nodal values."""
    f = np.asarray(f, dtype=float)
    t = p.grid
    w = p.weight(t)
    c = _trapz_weights(p.n, p.h)
    df = _derivative_matrix_apply(f, p.h)
    v = p.potential(t, alpha)
    grad = 2.0 * _derivative_matrix_transpose_apply(c * w * df, p.h)
    grad += 2.0 * c * w * v * f
    grad -= (2.0 / p.b) * c * w * (f - f ** 3)
    return grad


def _cell_energy(f: np.ndarray, alpha: float, p: Params1D) -> float:
    """Discrete energy whose exact stationary points the solver computes.

    Kinetic term by cell midpoints, potential and nonlinear terms by the
    trapezoidal rule.  Exact stationarity of this functional (under the
    linear Neumann constraints) makes the ground-energy identity
    E = -(1/2b) trapz(w f^4) hold to rounding, by scaling f -> s f.
    """
    t = p.grid
    h = p.h
    w = p.weight(t)
    wm = 0.5 * (w[1:] + w[:-1])
    c = _trapz_weights(p.n, h)
    v = p.potential(t, alpha)
    f2 = f * f
    kin = float(np.sum(wm * (f[1:] - f[:-1]) ** 2) / h)
    pot = float(np.sum(c * w * (v * f2 - (2.0 * f2 - f2 * f2) / (2.0 * p.b))))
    return kin + pot


def _cell_gradient_full(f: np.ndarray, alpha: float, p: Params1D) -> np.ndarray:
    """Gradient of :func:`_cell_energy` with respect to all nodal values."""
    t = p.grid
    h = p.h
    w = p.weight(t)
    wm = 0.5 * (w[1:] + w[:-1])
    c = _trapz_weights(p.n, h)
    v = p.potential(t, alpha)
    g = np.zeros_like(f)
    flux = (2.0 / h) * wm * (f[1:] - f[:-1])
    g[:-1] -= flux
    g[1:] += flux
    g += 2.0 * c * w * v * f - (2.0 / p.b) * c * w * (f - f ** 3)
    return g


# Neumann conditions are imposed as linear constraints eliminating the end
# values: f_0 = (4 f_1 - f_2)/3 and f_{n-1} = (4 f_{n-2} - f_{n-3})/3, which
# make the one-sided 2nd-order derivatives vanish identically.
_R0 = (4.0 / 3.0, -1.0 / 3.0)


def _apply_neumann(f: np.ndarray) -> None:
    f[0] = _R0[0] * f[1] + _R0[1] * f[2]
    f[-1] = _R0[0] * f[-2] + _R0[1] * f[-3]


def _reduced_gradient(f: np.ndarray, alpha: float, p: Params1D) -> np.ndarray:
    """Chain-rule gradient on the interior unknowns f_1 .. f_{n-2}."""
    g = _cell_gradient_full(f, alpha, p)
    gr = g[1:-1].copy()
    gr[0] += _R0[0] * g[0]
    gr[1] += _R0[1] * g[0]
    gr[-1] += _R0[0] * g[-1]
    gr[-2] += _R0[1] * g[-1]
    return gr


def el_residual(f: np.ndarray, alpha: float, p: Params1D) -> np.ndarray:
    """Residual of the discrete Euler-Lagrange system.

    Rows 1 .. n-2: the stationarity equations of the discrete energy under
    the Neumann constraints, scaled by 1/(2 c_i w_i) so they collocate
    -f'' + (e*k/w) f' + V f - (1/b)(1 - f^2) f to second order.  Rows 0 and
    n-1: the one-sided 2nd-order Neumann derivatives at t = 0 and t = l.
    """
    f = np.asarray(f, dtype=float)
    h = p.h
    w = p.weight(p.grid)
    c = _trapz_weights(p.n, h)
    r = np.empty_like(f)
    r[1:-1] = _reduced_gradient(f, alpha, p) / (2.0 * c[1:-1] * w[1:-1])
    r[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    r[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return r


def _full_hessian_diags(f: np.ndarray, alpha: float, p: Params1D):
    """Tridiagonal Hessian of :func:`_cell_energy`: (diag, off)."""
    t = p.grid
    h = p.h
    w = p.weight(t)
    wm = 0.5 * (w[1:] + w[:-1])
    c = _trapz_weights(p.n, h)
    v = p.potential(t, alpha)
    diag = np.zeros(p.n)
    diag[:-1] += (2.0 / h) * wm
    diag[1:] += (2.0 / h) * wm
    diag += 2.0 * c * w * v - (2.0 / p.b) * c * w * (1.0 - 3.0 * f * f)
    off = -(2.0 / h) * wm
    return diag, off


def _reduced_jacobian_banded(f: np.ndarray, alpha: float, p: Params1D) -> np.ndarray:
    """Tridiagonal Jacobian of the reduced gradient, LAPACK (1,1) storage."""
    diag, off = _full_hessian_diags(f, alpha, p)
    m = p.n - 2
    d = diag[1:-1].copy()
    up = off[1:-1].copy()      # up[j] = J(j, j+1) for reduced row j
    lo = off[1:-1].copy()      # lo[j] = J(j+1, j)
    a1, a2 = _R0
    # left end: T[1,0] = T[0,1] = off[0]; T[0,0] = diag[0]
    d[0] += 2.0 * a1 * off[0] + a1 * a1 * diag[0]
    up[0] += a2 * off[0] + a1 * a2 * diag[0]
    lo[0] += a2 * off[0] + a2 * a1 * diag[0]
    d[1] += a2 * a2 * diag[0]
    # right end mirror: T[n-2,n-1] = off[-1]; T[n-1,n-1] = diag[-1]
    d[-1] += 2.0 * a1 * off[-1] + a1 * a1 * diag[-1]
    lo[-1] += a2 * off[-1] + a1 * a2 * diag[-1]
    up[-1] += a2 * off[-1] + a2 * a1 * diag[-1]
    d[-2] += a2 * a2 * diag[-1]

    ab = np.zeros((3, m))
    ab[1, :] = d
    ab[0, 1:] = up
    ab[2, : m - 1] = lo
    return ab


def alpha_stationarity(f: np.ndarray, alpha: float, p: Params1D) -> float:
    """Trapezoidal stationarity integral S(a); zero at the optimal phase."""
    t = p.grid
    w = p.weight(t)
    integrand = (t + alpha - 0.5 * p.eps * p.k * t * t) / w * f * f
    return float(np.trapezoid(integrand, dx=p.h))


def _default_init(alpha: float, p: Params1D, amplitude: float = 0.8) -> np.ndarray:
    t = p.grid
    center = max(0.0, -alpha)
    return amplitude * np.exp(-0.5 * (t - center) ** 2)


def _newton(f0: np.ndarray, alpha: float, p: Params1D,
            tol: float, max_iter: int,
            stall_tol: float = 1e-10) -> tuple[np.ndarray, float, bool]:
    # Newton on the reduced unknowns f_1 .. f_{n-2}; the Neumann constraints
    # hold exactly throughout.  tol is the target for the reported residual;
    # a line-search stall below stall_tol (the spec bound, above the
    # ~eps/h^2 rounding floor of the residual) still counts as converged.
    f = f0.copy()
    _apply_neumann(f)

    def resnorm(fv):
        return float(np.max(np.abs(el_residual(fv, alpha, p))))

    rnorm = resnorm(f)
    for _ in range(max_iter):
        if rnorm < tol:
            return f, rnorm, True
        gr = _reduced_gradient(f, alpha, p)
        ab = _reduced_jacobian_banded(f, alpha, p)
        try:
            step = solve_banded((1, 1), ab, gr)
        except np.linalg.LinAlgError:
            return f, rnorm, rnorm < stall_tol
        lam = 1.0
        while lam > 1e-6:
            f_new = f.copy()
            f_new[1:-1] -= lam * step
            _apply_neumann(f_new)
            rn = resnorm(f_new)
            if rn < rnorm * (1.0 - 0.25 * lam) or rn < tol:
                f, rnorm = f_new, rn
                break
            lam *= 0.5
        else:
            return f, rnorm, rnorm < stall_tol
    return f, rnorm, rnorm < stall_tol


def _gradient_flow(f0: np.ndarray, alpha: float, p: Params1D,
                   steps: int = 4000) -> np.ndarray:
    """Crude descent used only to recover a basin when Newton stalls."""
    f = np.clip(f0, 0.0, 1.0)
    _apply_neumann(f)
    dt = 0.2 * p.h * p.h
    e = _cell_energy(f, alpha, p)
    for _ in range(steps):
        g = _cell_gradient_full(f, alpha, p)
        f_new = np.clip(f - dt / p.h * g, 0.0, 1.5)
        _apply_neumann(f_new)
        e_new = _cell_energy(f_new, alpha, p)
        if e_new > e:
            dt *= 0.5
            if dt < 1e-8 * p.h * p.h:
                break
            continue
        if e - e_new < 1e-14 * (1.0 + abs(e)):
            f = f_new
            break
        f, e = f_new, e_new
        dt *= 1.05
    return f


def solve_profile_fixed_alpha(alpha: float, p: Params1D,
                              f_init: np.ndarray | None = None,
                              tol: float = 1e-11,
                              max_iter: int = 80) -> Profile1D:
    """Solve the profile equation at fixed phase parameter.

    Damped Newton on the discrete Euler-Lagrange system; among the zero
    profile and the positive branch, the one with lower energy is returned
    (ties resolved toward f = 0).  Raises :class:`ConvergenceError` when
    neither branch can be certified.
    """
    inits = []
    if f_init is not None and np.max(np.abs(f_init)) > 1e-13:
        inits.append(np.asarray(f_init, dtype=float))
    inits.append(_default_init(alpha, p))
    inits.append(_default_init(alpha, p, amplitude=0.4))

    best = None
    last_rnorm = math.inf
    for f0 in inits:
        f, rnorm, ok = _newton(f0, alpha, p, tol, max_iter)
        if not ok:
            f0b = _gradient_flow(f0, alpha, p)
            f, rnorm, ok = _newton(f0b, alpha, p, tol, max_iter)
        last_rnorm = min(last_rnorm, rnorm)
        if not ok:
            continue
        fmin = float(np.min(f))
        if fmin < -1e-12:
            continue  # converged to a sign-changing branch; try next init
        # branch comparison uses the solver's own variational energy
        e_cell = _cell_energy(f, alpha, p)
        if best is None or e_cell < best[1]:
            best = (f, e_cell, rnorm)
        if e_cell < -1e-12:
            break  # a genuine positive branch found

    if best is None:
        raise ConvergenceError(
            f"profile solve failed at alpha={alpha:.6g} "
            f"(residual {last_rnorm:.3e})", last_rnorm)

    f, e_cell, rnorm = best
    degenerate = e_cell >= -1e-12
    if degenerate:
        f = np.zeros(p.n)
        rnorm = 0.0
    else:
        f = np.where(f < 0.0, 0.0, f)
    e = energy_1d(f, alpha, p)
    return Profile1D(params=p, alpha=float(alpha), values=f, energy=e,
                     residual=rnorm,
                     stationarity=alpha_stationarity(f, alpha, p),
                     degenerate=degenerate)


def linearized_bottom_eigenvalue(alpha: float, p: Params1D) -> float:
    """Smallest eigenvalue of -d^2/dt^2 + V - 1/b with Neumann ends.

    Positivity certifies that f = 0 is the minimizer at this phase.  Uses
    the symmetric finite-element discretization with lumped mass.
    """
    t = p.grid
    h = p.h
    v = p.potential(t, alpha) - 1.0 / p.b
    m = _trapz_weights(p.n, h)  # lumped mass
    # stiffness tridiagonal: (1/h) [1, -1; -1, 2, -1; ...]
    kd = np.full(p.n, 2.0 / h)
    kd[0] = kd[-1] = 1.0 / h
    ko = np.full(p.n - 1, -1.0 / h)
    s = 1.0 / np.sqrt(m)
    d = s * (kd + m * v) * s
    e = s[:-1] * ko * s[1:]
    vals = eigh_tridiagonal(d, e, select="i", select_range=(0, 0),
                            eigvals_only=True)
    return float(vals[0])


def _scan_alphas(p: Params1D, n_scan: int = 61) -> np.ndarray:
    return np.linspace(-(p.ell + 2.0), 1.0, n_scan)


def optimize_alpha(p: Params1D, warn=None,
                   scan_points: int = 61) -> Profile1D:
    """Minimize the 1D energy over the phase parameter.

    Coarse scan over [-(l+2), 1], golden-section refinement of the
    bracketing triple, then a secant iteration on the stationarity integral
    S(a) which serves as the convergence certificate (|S| well below 1e-8).
    """
    if not p.in_surface_regime() and warn is not False:
        import warnings
        warnings.warn(
            f"b={p.b} outside the surface regime (1, {1.0 / p.theta0:.4f}); "
            "running anyway", stacklevel=2)

    alphas = _scan_alphas(p, scan_points)
    energies = np.empty_like(alphas)
    f_warm = None
    profiles: dict[int, Profile1D] = {}
    for i, a in enumerate(alphas):
        prof = solve_profile_fixed_alpha(a, p, f_init=f_warm)
        if not prof.degenerate:
            f_warm = prof.values
        energies[i] = prof.energy
        profiles[i] = prof

    i_min = int(np.argmin(energies))
    if energies[i_min] >= -1e-12:
        # all-zero landscape: degenerate minimizer, any alpha admissible
        zero = np.zeros(p.n)
        return Profile1D(params=p, alpha=float(alphas[i_min]), values=zero,
                         energy=0.0, residual=0.0, stationarity=0.0,
                         degenerate=True)
    # The interval problem is exactly symmetric under a -> -(l + a), so the
    # scan sees a mirror minimum with the well sitting at t = l.  Only the
    # boundary-layer branch (well in the left half, alpha > -l/2) is the
    # physical one; restrict the bracketing minimum to that half.
    left_half = alphas > -(0.5 * p.ell)
    if np.any(left_half & (energies < -1e-12)):
        masked = np.where(left_half, energies, np.inf)
        i_min = int(np.argmin(masked))
    if i_min == 0 or i_min == len(alphas) - 1:
        raise BracketingError(
            "energy minimum at the edge of the phase scan",
            list(zip(alphas.tolist(), energies.tolist())))

    # golden-section on the bracketing triple
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = alphas[i_min - 1], alphas[i_min + 1]
    f_warm = profiles[i_min].values
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    p1 = solve_profile_fixed_alpha(x1, p, f_init=f_warm)
    p2 = solve_profile_fixed_alpha(x2, p, f_init=f_warm)
    e1, e2 = p1.energy, p2.energy
    while hi - lo > 1e-6:
        if e1 < e2:
            hi, x2, e2 = x2, x1, e1
            x1 = hi - inv_phi * (hi - lo)
            p1 = solve_profile_fixed_alpha(x1, p, f_init=f_warm)
            f_warm, e1 = p1.values, p1.energy
        else:
            lo, x1, e1 = x1, x2, e2
            x2 = lo + inv_phi * (hi - lo)
            p2 = solve_profile_fixed_alpha(x2, p, f_init=f_warm)
            f_warm, e2 = p2.values, p2.energy

    # secant refinement of S(a) = 0; S is smooth and increasing near the root
    a0, a1 = lo, hi
    prof0 = solve_profile_fixed_alpha(a0, p, f_init=f_warm)
    prof1 = solve_profile_fixed_alpha(a1, p, f_init=prof0.values)
    s0 = alpha_stationarity(prof0.values, a0, p)
    s1 = alpha_stationarity(prof1.values, a1, p)
    best = prof1 if abs(s1) < abs(s0) else prof0
    for _ in range(60):
        if s1 == s0:
            break
        a2 = a1 - s1 * (a1 - a0) / (s1 - s0)
        if not (lo - 1.0 <= a2 <= hi + 1.0):
            break
        prof2 = solve_profile_fixed_alpha(a2, p, f_init=best.values)
        s2 = alpha_stationarity(prof2.values, a2, p)
        if abs(s2) < abs(alpha_stationarity(best.values, best.alpha, p)):
            best = prof2
        a0, s0, a1, s1 = a1, s1, a2, s2
        if abs(s2) < 1e-15:
            break
    return best


def cost_tables(prof: Profile1D, d_ell_factor: float = 1.0) -> "CostTables":
    """Potential function F and cost function K of a converged profile.

    F(t) = 2 int_0^t (s + a - e*k*s^2/2)/(1 - e*k*s) f^2 ds  (cumulative
    trapezoid) and K = (1 - d_l) f^2 + F with d_l = d_ell_factor / l^4.
    A window [0, l_bar] with l_bar = sup{t : f(t) >= l^3 f(l)} bounds the
    region where K is provably nonnegative.
    """
    p = prof.params
    t = p.grid
    f = prof.values
    w = p.weight(t)
    integrand = 2.0 * (t + prof.alpha - 0.5 * p.eps * p.k * t * t) / w * f * f
    F = cumulative_trapezoid(integrand, dx=p.h, initial=0.0)
    d_ell = d_ell_factor / p.ell ** 4
    K = (1.0 - d_ell) * f * f + F
    if prof.degenerate:
        ell_bar = 0.0
        i_m = 0
    else:
        thresh = p.ell ** 3 * f[-1]
        above = np.nonzero(f >= thresh)[0]
        ell_bar = float(t[above[-1]]) if above.size else 0.0
        i_m = int(np.argmin(K))
    return CostTables(F=F, K=K, d_ell=d_ell, ell_bar=ell_bar,
                      t_m=float(t[i_m]), K_min=float(K[i_m]))


@dataclass(frozen=True)
class CostTables:
    F: np.ndarray
    K: np.ndarray
    d_ell: float
    ell_bar: float
    t_m: float
    K_min: float


@dataclass
class CostViolation:
    check: str
    position: float
    value: float


@dataclass
class CostReport:
    ok: bool
    violations: list
    ell_bar: float
    t_m: float
    K_min: float
    convexity_min: float


def check_cost_positivity(ct: CostTables, prof: Profile1D,
                          half_line: bool = False,
                          k_tol: float = 1e-10,
                          convexity_tol: float = 1e-8) -> CostReport:
    """Scan the cost-function table for the proved sign structure.

    Interval problems: K >= -k_tol on [0, l_bar], discrete convexity for
    b >= 1, and a negative minimum located in (l_bar, l].  Half-line
    surrogates (built without the d_l deduction) must satisfy K >= -k_tol
    on the whole grid.  Violations are returned, not raised.
    """
    p = prof.params
    t = p.grid
    violations: list[CostViolation] = []
    K = ct.K

    window = t <= ct.ell_bar + 1e-12 if not half_line else np.ones_like(t, bool)
    bad = np.nonzero(window & (K < -k_tol))[0]
    for i in bad[:10]:
        violations.append(CostViolation("K_nonnegative", float(t[i]), float(K[i])))

    d2 = K[2:] - 2.0 * K[1:-1] + K[:-2]
    convexity_min = float(np.min(d2)) if d2.size else 0.0
    if p.b >= 1.0 and convexity_min < -convexity_tol:
        i = int(np.argmin(d2)) + 1
        violations.append(CostViolation("K_convex", float(t[i]), convexity_min))

    if not half_line and not prof.degenerate:
        if not (ct.K_min < 0.0):
            violations.append(CostViolation("K_min_negative", ct.t_m, ct.K_min))
        if not (ct.ell_bar < ct.t_m <= p.ell + 1e-12):
            violations.append(CostViolation("t_m_location", ct.t_m, ct.K_min))

    return CostReport(ok=not violations, violations=violations,
                      ell_bar=ct.ell_bar, t_m=ct.t_m, K_min=ct.K_min,
                      convexity_min=convexity_min)


@dataclass(frozen=True)
class HalfLineSummary:
    """Half-line ground state data extracted from interval truncations."""

    e1d_star: float
    alpha_star: float
    f0_at_0: float
    e_corr_integral: float
    e_corr_closed: float
    e_corr_diff: float
    ell_used: float
    profile: Profile1D = field(repr=False, compare=False, default=None)
    monotone: bool = True


def _e_corr_integral(prof: Profile1D) -> float:
    p = prof.params
    t = p.grid
    f = prof.values
    a = prof.alpha
    df = _derivative_matrix_apply(f, p.h)
    f2 = f * f
    integrand = t * (df * df + f2 * (-a * (t + a) - 1.0 / p.b + f2 / (2.0 * p.b)))
    return float(np.trapezoid(integrand, dx=p.h))


def half_line_limit(b: float, ell_schedule=(8.0, 10.0, 12.0, 15.0),
                    h: float = 0.005, theta0: float = THETA0_DEFAULT,
                    conv_tol: float = 1e-10) -> HalfLineSummary:
    """Half-line ground state by interval truncation.

    Runs the phase optimization at each length of the schedule (fixed grid
    spacing h so truncation, not discretization, dominates the differences)
    and declares convergence when successive energies differ by less than
    ``conv_tol``.  The curvature-correction coefficient is evaluated in both
    the integral and the closed form.
    """
    schedule = [float(x) for x in ell_schedule]
    if len(schedule) < 3:
        raise ValueError("schedule needs at least 3 lengths")
    if any(b2 <= a2 for a2, b2 in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing")
    if schedule[0] < 6.0:
        raise ValueError("smallest length must be >= 6")

    monotone = True
    prev_e = None
    prof = None
    ell_used = schedule[-1]
    for ell in schedule:
        n = int(round(ell / h)) + 1
        p = Params1D(b=b, ell=ell, n=n, theta0=theta0)
        prof = optimize_alpha(p)
        if prev_e is not None:
            if prof.energy < prev_e - 1e-11:
                monotone = False  # interval energies should increase to E*
            if abs(prof.energy - prev_e) < conv_tol:
                ell_used = ell
                break
        prev_e = prof.energy
    else:
        ell_used = schedule[-1]

    e_star = prof.energy
    f0 = float(prof.values[0])
    e_int = _e_corr_integral(prof)
    e_closed = f0 * f0 * prof.alpha / 3.0 - e_star
    return HalfLineSummary(
        e1d_star=e_star, alpha_star=prof.alpha, f0_at_0=f0,
        e_corr_integral=e_int, e_corr_closed=e_closed,
        e_corr_diff=abs(e_int - e_closed), ell_used=ell_used,
        profile=prof, monotone=monotone)


def curvature_expansion_check(b: float, k: float, eps_list,
                              c1: float = 5.0, h: float = 0.005,
                              summary: HalfLineSummary | None = None):
    """Check E1D_k(eps) against E1D_star - eps*k*E_corr.

    Returns a dict with per-eps rows (eps, e_k, prediction, difference) and
    the fitted decay exponent of the difference (expected >= 1.4; the
    expansion remainder is O(eps^{3/2}) up to logs).
    """
    eps_list = sorted(float(e) for e in eps_list)
    if not eps_list or eps_list[0] <= 0 or eps_list[-1] > 0.1:
        raise ValueError("eps_list must lie in (0, 0.1]")
    if summary is None:
        summary = half_line_limit(b, h=h)
    e_star = summary.e1d_star
    # the integral form is the defining expansion coefficient
    e_corr = summary.e_corr_integral

    rows = []
    for eps in eps_list:
        ell = c1 * abs(math.log(eps))
        n = int(round(ell / h)) + 1
        p = Params1D(b=b, k=k, eps=eps, ell=ell, n=n)
        prof = optimize_alpha(p)
        prediction = e_star - eps * k * e_corr
        rows.append({"eps": eps, "e_k": prof.energy,
                     "prediction": prediction,
                     "difference": prof.energy - prediction})

    diffs = np.array([abs(r["difference"]) for r in rows])
    exponent = math.nan
    fit_ok = False
    if k != 0.0 and np.all(diffs > 0):
        try:
            coef = np.polyfit(np.log([r["eps"] for r in rows]), np.log(diffs), 1)
            exponent = float(coef[0])
            fit_ok = True
        except Exception:
            pass
    return {"rows": rows, "exponent": exponent, "fit_ok": fit_ok,
            "e_star": e_star, "e_corr": e_corr}


def decay_check(prof: Profile1D, const_cap: float = 100.0) -> dict:
    """Fit Gaussian decay envelopes to a converged positive profile.

    Envelopes: c exp(-(t+1/2)^2/2) <= f <= c' exp(-(t+a)^2/2) and
    |f'| <= C exp(-t^2/4), with the fitted constants capped at
    ``const_cap``.  Fits are done in log space to stay accurate in the tail.
    """
    if prof.degenerate:
        return {"ok": True, "skipped": True,
                "note": "trivial profile, decay check skipped"}
    p = prof.params
    t = p.grid
    f = prof.values
    pos = f > 0
    logf = np.full_like(f, -np.inf)
    logf[pos] = np.log(f[pos])

    # upper envelope: smallest c' with log f <= log c' - (t+a)^2/2
    log_cp = float(np.max(logf + 0.5 * (t + prof.alpha) ** 2))
    # lower envelope: largest c with log c - (t+1/2)^2/2 <= log f
    log_c = float(np.min(logf + 0.5 * (t + 0.5) ** 2))
    df = _derivative_matrix_apply(f, p.h)
    with np.errstate(divide="ignore"):
        log_df = np.where(df != 0.0, np.log(np.abs(df)), -np.inf)
    log_C = float(np.max(log_df + 0.25 * t * t))

    c_upper = math.exp(log_cp)
    c_lower = math.exp(log_c)
    c_deriv = math.exp(log_C)
    worst = float(t[int(np.argmax(logf + 0.5 * (t + prof.alpha) ** 2))])
    ok = (0.0 < c_lower and c_upper <= const_cap and c_deriv <= const_cap)
    return {"ok": ok, "skipped": False, "c_lower": c_lower,
            "c_upper": c_upper, "c_deriv": c_deriv, "worst_t": worst}
