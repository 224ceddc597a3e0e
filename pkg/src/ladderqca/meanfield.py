"""Mean-field band structure and the self-consistent environment spin ``s_B``.

Energies are in units of the cluster coupling ``J`` wherever only the ratio
``gbar = g/J`` appears.  The Nambu spinor is ``(a_k, a_{-k}^dag, b_k, b_{-k}^dag)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

ROOT_TOL = 1e-12
RESIDUAL_TOL = 1e-10
N_BRACKETS = 10_000
QUAD_NODES = 1 << 12


def hmf_matrix(k: float, J: float, g: float, s_B: float) -> np.ndarray:
    """4x4 Bogoliubov-de Gennes matrix ``H_MF(k)``.

    The cluster block is ``-2 (J s_B^2 cos 2k - g s_B) Z - 2 J s_B^2 sin 2k X``
    on the ``a`` spinor; the exchange block couples ``a`` and ``b``.
    """
    diag = -2.0 * J * s_B**2 * np.cos(2 * k) + 2.0 * g * s_B
    off = -2.0 * J * s_B**2 * np.sin(2 * k)
    return np.array(
        [
            [diag, off, -g, -1j * g],
            [off, -diag, -1j * g, g],
            [-g, 1j * g, 0, 0],
            [1j * g, g, 0, 0],
        ],
        dtype=np.complex128,
    )


def dispersion(k, J: float, g: float, s_B: float):
    """Quasiparticle energy ``eps_k >= 0`` (vectorized over ``k``)."""
    rad = (J * s_B - g) ** 2 * s_B**2 + g**2 + 4 * J * s_B**3 * g * np.sin(k) ** 2
    if np.min(rad) < -1e-12:
        raise ValueError(f"negative radicand {np.min(rad):.3e}; invalid s_B")
    return 2.0 * np.sqrt(np.maximum(rad, 0.0))


def d_k(k, J: float, g: float, s_B: float):
    return 2 * g * s_B - 2 * J * s_B**2 * np.exp(2j * k)


def eigen_check(k: float, J: float, g: float, s_B: float) -> float:
    """Max distance between the eigenvalues of ``H_MF(k)`` and ``{-eps, 0, 0, eps}``."""
    ev = np.linalg.eigvalsh(hmf_matrix(k, J, g, s_B))
    e = dispersion(k, J, g, s_B)
    return float(np.max(np.abs(ev - np.array([-e, 0.0, 0.0, e]))))


def bogoliubov_vectors(k: float, J: float, g: float, s_B: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvectors (columns) and their eigenvalues ``(0, 0, +eps, -eps)``."""
    e = float(dispersion(k, J, g, s_B))
    if e <= 1e-12:
        raise ValueError("degenerate spectrum: eps_k vanishes")
    if g == 0:
        raise ValueError("closed-form vectors need g != 0")
    d = complex(d_k(k, J, g, s_B))
    db = d.conjugate()
    if abs(d) == 0:
        raise ValueError("closed-form vectors need d_k != 0")
    nz = abs(d) / np.sqrt(abs(d) ** 2 + 2 * g**2)
    ne = abs(g) / e
    vecs = np.array(
        [
            nz * np.array([1j * g / db, g / db, 0, 1]),
            nz * np.array([g / db, -1j * g / db, 1, 0]),
            ne * np.array([(e + d) / (2j * g), (e - d) / (2 * g), 1j, 1]),
            ne * np.array([-(e - d) / (2j * g), -(e + d) / (2 * g), 1j, 1]),
        ],
        dtype=np.complex128,
    ).T
    return vecs, np.array([0.0, 0.0, e, -e])


@dataclass
class BogoliubovReport:
    """Checks of the closed-form vectors.

    ``orthogonality`` covers pairs with distinct eigenvalues.  The two
    null vectors as written are not mutually orthogonal; their overlap
    modulus ``2 g^2 / (|d_k|^2 + 2 g^2)`` is reported as ``null_overlap``.
    """

    residual: float
    norm_deviation: float
    orthogonality: float
    null_overlap: float


def verify_bogoliubov(k: float, J: float, g: float, s_B: float) -> BogoliubovReport:
    """Check the closed-form eigenvectors against ``H_MF(k)``."""
    vecs, mus = bogoliubov_vectors(k, J, g, s_B)
    h = hmf_matrix(k, J, g, s_B)
    norms = np.linalg.norm(vecs, axis=0)
    res = max(
        float(np.linalg.norm(h @ vecs[:, j] - mus[j] * vecs[:, j]) / norms[j]) for j in range(4)
    )
    gram = np.abs(vecs.conj().T @ vecs)
    distinct = ~np.isclose(mus[:, None], mus[None, :])
    return BogoliubovReport(
        residual=res,
        norm_deviation=float(np.max(np.abs(norms - 1.0))),
        orthogonality=float(np.max(gram[distinct])),
        null_overlap=float(gram[0, 1]),
    )


def selfconsistent_integral(s_B: float, gbar: float, nodes: int = QUAD_NODES) -> float:
    """``int dk/2pi 2 g^2 / (eps_k^2 - 2 g^2)`` with ``J = 1``, by the periodic trapezoid rule."""
    if gbar == 0:
        return 0.0
    k = -np.pi + 2 * np.pi * (np.arange(nodes) + 1) / nodes
    den = dispersion(k, 1.0, gbar, s_B) ** 2 - 2 * gbar**2
    if np.min(np.abs(den)) < 1e-9:
        raise ValueError("self-consistent integrand is singular on the k grid")
    return float(np.mean(2 * gbar**2 / den))


def selfconsistent_residual_integral(s_B: float, gbar: float, nodes: int = QUAD_NODES) -> float:
    """``(integral - 1) - s_B``: zero at a self-consistent ``s_B`` of the negative branch."""
    return selfconsistent_integral(s_B, gbar, nodes) - 1.0 - s_B


def _radicand(s, gbar):
    s2 = s * s
    g2 = gbar * gbar
    return 4 * s2**4 - 8 * g2 * s2**3 + 4 * g2 * (1 + g2) * s2**2 + g2**2 * (4 * s2 + 1)


def closed_form_integral(s_B, gbar):
    """The elementary integral ``gbar^2 / sqrt(D(s_B, gbar))`` (0 where undefined)."""
    D = _radicand(s_B, gbar)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(D > 0, gbar**2 / np.sqrt(np.where(D > 0, D, 1.0)), 0.0)
    return val if np.ndim(val) else float(val)


def branch_function(s, gbar: float, sign: int = 1):
    """``s - sign (1 - gbar^2 / sqrt(D))``; zeros are roots on that sign branch."""
    return s - sign * (1.0 - closed_form_integral(s, gbar))


def algebraic_residual(s_B: float, gbar: float) -> float:
    if s_B == 0:
        return 0.0
    return float(branch_function(s_B, gbar, 1 if s_B > 0 else -1))


@dataclass
class MeanFieldSolution:
    """Roots of the self-consistency equation at one ``gbar`` (``J = 1``)."""

    gbar: float
    roots: list[tuple[float, str]]
    s_B: float
    branch: str
    k: np.ndarray = field(repr=False)
    d_k: np.ndarray = field(repr=False)
    eps_k: np.ndarray = field(repr=False)

    @property
    def gap(self) -> float:
        return float(np.min(self.eps_k))


def _positive_roots(gbar: float, brackets: int, tol: float) -> list[float]:
    s = np.arange(1, brackets + 1) / brackets
    f = branch_function(s, gbar, 1)
    roots = [float(x) for x in s[f == 0.0]]
    change = np.nonzero(f[:-1] * f[1:] < 0)[0]
    for i in change:
        roots.append(optimize.brentq(branch_function, s[i], s[i + 1], args=(gbar, 1), xtol=tol))
    # near-tangent pairs inside one bracket show up as a nonpositive local minimum
    inner = np.nonzero((f[1:-1] < f[:-2]) & (f[1:-1] <= f[2:]) & (f[1:-1] > 0))[0] + 1
    for i in inner:
        res = optimize.minimize_scalar(branch_function, bounds=(s[i - 1], s[i + 1]),
                                       args=(gbar, 1), method="bounded", options={"xatol": tol})
        if res.fun <= 0:
            a = optimize.brentq(branch_function, s[i - 1], res.x, args=(gbar, 1), xtol=tol) if res.fun < 0 else res.x
            b = optimize.brentq(branch_function, res.x, s[i + 1], args=(gbar, 1), xtol=tol) if res.fun < 0 else res.x
            roots.extend([a, b])
    return sorted(set(roots))


def solve_sb(gbar: float, brackets: int = N_BRACKETS, tol: float = ROOT_TOL,
             k_points: int = 256) -> MeanFieldSolution:
    """All real roots in ``[-1, 1]`` and the selected (stable) one.

    The selected root follows the upper nonzero branch while it exists and
    the ``s_B = 0`` branch beyond its endpoint.
    """
    if gbar < 0:
        raise ValueError("gbar must be >= 0")
    pos = _positive_roots(gbar, brackets, tol)
    for r in pos:
        if abs(algebraic_residual(r, gbar)) > RESIDUAL_TOL:
            raise RuntimeError(f"root {r} at gbar={gbar} did not converge")
    roots = [(0.0, "zero")] + [(r, "plus") for r in pos] + [(-r, "minus") for r in pos]
    roots.sort(key=lambda t: t[0])
    if pos:
        sel, branch = pos[-1], "plus"
    else:
        sel, branch = 0.0, "zero"
    k = -np.pi + 2 * np.pi * (np.arange(k_points) + 1) / k_points
    return MeanFieldSolution(gbar, roots, sel, branch, k, d_k(k, 1.0, gbar, sel), dispersion(k, 1.0, gbar, sel))


def min_branch_function(gbar: float, grid: int = 2000) -> tuple[float, float]:
    """Minimum of the positive-branch function over ``s in (0, 1]`` and its location."""
    s = np.arange(1, grid + 1) / grid
    f = branch_function(s, gbar, 1)
    i = int(np.argmin(f))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, grid - 1)]
    res = optimize.minimize_scalar(branch_function, bounds=(lo, hi), args=(gbar, 1),
                                   method="bounded", options={"xatol": 1e-12})
    if res.fun < f[i]:
        return float(res.fun), float(res.x)
    return float(f[i]), float(s[i])


def critical_point(lo: float = 0.1, hi: float = 1.0, tol: float = 1e-6) -> tuple[float, float]:
    """Largest ``gbar`` with a nonzero root, and ``s_B`` there, by bisection on ``gbar``."""
    if min_branch_function(lo)[0] > 0 or min_branch_function(hi)[0] <= 0:
        raise ValueError("critical point not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if min_branch_function(mid)[0] <= 0:
            lo = mid
        else:
            hi = mid
    return lo, min_branch_function(lo)[1]


@dataclass
class BandScan:
    """Rows for ``(gbar, branch, s_B)`` and ``(gbar, branch, k, eps)`` tables."""

    sb_rows: list[tuple[float, str, float]]
    band_rows: list[tuple[float, str, float, float]]
    selected: list[MeanFieldSolution]

    def gaps(self) -> np.ndarray:
        return np.array([sol.gap for sol in self.selected])


def band_scan(gbars, k_points: int = 128) -> BandScan:
    """Solve ``s_B`` on a ``gbar`` grid and tabulate ``eps_k`` for every root."""
    gbars = np.asarray(gbars, dtype=float)
    if gbars.size == 0:
        raise ValueError("empty gbar grid")
    k = -np.pi + 2 * np.pi * (np.arange(k_points) + 1) / k_points
    sb_rows, band_rows, selected = [], [], []
    for gb in gbars:
        sol = solve_sb(float(gb), k_points=k_points)
        selected.append(sol)
        seen = set()
        for s, tag in sol.roots:
            sb_rows.append((float(gb), tag, s))
            key = (tag, round(s, 12))
            if key in seen:
                continue
            seen.add(key)
            for kk, e in zip(k, dispersion(k, 1.0, gb, s)):
                band_rows.append((float(gb), tag, float(kk), float(e)))
    return BandScan(sb_rows, band_rows, selected)
