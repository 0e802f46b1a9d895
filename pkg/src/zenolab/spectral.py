"""Spectral gap analysis and Riesz projectors of interception maps.

The projector onto the eigenvalue-1 part of a gapped map M is computed three
independent ways (contour quadrature of the resolvent, ordered Schur form plus
a Sylvester solve, and the power limit M^(2^k)) so that each can serve as an
oracle for the others.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, GapError, SpectralError, WindowError
from .superop import as_superop, expm_superop, proxy_norm

CLUSTER_RADIUS = 1e-8
ONE_TOL = 1e-10
CONTOUR_CLEARANCE = 1e-6
SYLVESTER_MIN_SEP = 1e-8
DEFAULT_GAP_MIN = 0.05
IDEMPOTENCY_LIMIT = 1e-8


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    delta: float
    peripheral_multiplicity: int
    gap_ok: bool
    gap_min: float = DEFAULT_GAP_MIN

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max(initial=0.0))

    def outer_contour(self, nodes: int = 64) -> "ContourSpec":
        """Circle around 1 of radius (1 - delta)/2."""
        return ContourSpec(1.0, (1 - self.delta) / 2, nodes)

    def inner_contour(self, nodes: int = 64) -> "ContourSpec":
        """Circle around 0 of radius (1 + delta)/2."""
        return ContourSpec(0.0, (1 + self.delta) / 2, nodes)

    def summary(self) -> str:
        lines = [
            f"eigenvalues ({len(self.eigenvalues)}):",
            *(f"  {z.real:+.12f} {z.imag:+.12f}i  |z| = {abs(z):.12f}"
              for z in sorted(self.eigenvalues, key=lambda z: -abs(z))),
            f"delta = {self.delta:.12g}",
            f"peripheral multiplicity = {self.peripheral_multiplicity}",
            f"gap_ok = {self.gap_ok} (gap_min = {self.gap_min})",
        ]
        return "\n".join(lines)


@dataclass(frozen=True)
class ContourSpec:
    center: complex
    radius: float
    nodes: int = 64

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 16:
            raise ValueError("contour needs at least 16 nodes")

    def points(self, nodes: int | None = None, offset: float = 0.0):
        """Nodes z_k and the factors (z_k - center) on the circle."""
        N = self.nodes if nodes is None else nodes
        phi = 2 * np.pi * (np.arange(N) + offset) / N
        w = self.radius * np.exp(1j * phi)
        return self.center + w, w

    def clearance(self, eigenvalues) -> float:
        ev = np.asarray(eigenvalues)
        return float(np.abs(np.abs(ev - self.center) - self.radius).min(initial=np.inf))


@dataclass(frozen=True)
class RieszProjector:
    proj: np.ndarray
    idempotency_defect: float
    method: str
    nodes: int | None = None

    def __post_init__(self):
        if not self.idempotency_defect <= IDEMPOTENCY_LIMIT:
            raise SpectralError(
                f"{self.method} projector is not idempotent (defect {self.idempotency_defect:.3g})")


def _make_projector(P, method, nodes=None) -> RieszProjector:
    return RieszProjector(P, proxy_norm(P @ P - P), method, nodes)


def spectrum_report(M, gap_min: float = DEFAULT_GAP_MIN) -> SpectralReport:
    """Eigenvalue layout of ``M`` and whether 1 is isolated by ``gap_min``."""
    if not 0 < gap_min < 1:
        raise ValueError("gap_min must lie in (0, 1)")
    M = as_superop(M)
    try:
        T, _ = scipy.linalg.schur(M, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralError(f"Schur decomposition failed: {exc}") from exc
    ev = np.diag(T).copy()
    dist = np.abs(ev - 1)
    cluster = dist <= CLUSTER_RADIUS
    rest = np.abs(ev[~cluster])
    delta = float(rest.max(initial=0.0))
    has_one = bool(np.any(dist <= ONE_TOL))
    return SpectralReport(
        eigenvalues=ev,
        delta=delta,
        peripheral_multiplicity=int(cluster.sum()),
        gap_ok=has_one and delta < 1 - gap_min,
        gap_min=gap_min,
    )


def require_gap(M, gap_min: float = DEFAULT_GAP_MIN) -> SpectralReport:
    rep = spectrum_report(M, gap_min)
    if not rep.gap_ok:
        raise GapError(
            f"no isolated eigenvalue 1: delta = {rep.delta:.6g}, need < {1 - gap_min:.6g}"
            f" (peripheral multiplicity {rep.peripheral_multiplicity})")
    return rep


def _contour_sum(A, contour: ContourSpec, nodes: int, offset: float = 0.0, chunk: int = 256):
    """sum_k (z_k - c) (z_k - A)^{-1} over the quadrature nodes."""
    n = A.shape[0]
    eye = np.eye(n)
    z, w = contour.points(nodes, offset)
    acc = np.zeros((n, n), dtype=complex)
    for lo in range(0, len(z), chunk):
        R = np.linalg.inv(z[lo:lo + chunk, None, None] * eye - A)
        acc += np.einsum("k,kij->ij", w[lo:lo + chunk], R)
    return acc


def riesz_contour(A, contour: ContourSpec, tol: float = 1e-10,
                  max_nodes: int = 2 ** 14) -> RieszProjector:
    """(1/2 pi i) times the contour integral of (z - A)^{-1}, trapezoidal rule.

    The node count doubles (reusing previous nodes) until successive results
    agree to ``tol`` in the proxy norm.
    """
    A = as_superop(A)
    ev = np.linalg.eigvals(A)
    if contour.clearance(ev) < CONTOUR_CLEARANCE:
        raise SpectralError(
            f"eigenvalue within {CONTOUR_CLEARANCE:g} of the contour "
            f"(center {contour.center}, radius {contour.radius})")
    if np.array_equal(A @ A, A) and abs(1 - contour.center) < contour.radius < abs(contour.center):
        # an exact idempotent is its own projector onto eigenvalue 1
        return _make_projector(A.copy(), "contour")
    N = contour.nodes
    total = _contour_sum(A, contour, N)
    P = total / N
    while N < max_nodes:
        # odd nodes of the doubled grid sit halfway between the current ones
        total = total + _contour_sum(A, contour, N, offset=0.5)
        N *= 2
        P_new = total / N
        if proxy_norm(P_new - P) < tol:
            return _make_projector(P_new, "contour", N)
        P = P_new
    raise ConvergenceError(f"contour quadrature not converged at {max_nodes} nodes")


def riesz_schur(A, cluster_center: complex = 1.0, cluster_radius: float = 0.5) -> RieszProjector:
    """Spectral projector from an ordered Schur form.

    With A = Z [[T11, T12], [0, T22]] Z^H and the cluster in T11, the
    projector is Z [[I, X], [0, 0]] Z^H where T11 X - X T22 = T12.
    """
    A = as_superop(A)
    n = A.shape[0]
    try:
        T, Z, k = scipy.linalg.schur(
            A, output="complex", sort=lambda z: abs(z - cluster_center) < cluster_radius)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralError(f"ordered Schur decomposition failed: {exc}") from exc
    if k == 0:
        return _make_projector(np.zeros_like(A), "schur")
    if k == n:
        return _make_projector(np.eye(n, dtype=complex), "schur")
    ev = np.diag(T)
    sep = np.abs(ev[:k, None] - ev[None, k:]).min()
    if sep < SYLVESTER_MIN_SEP:
        raise SpectralError(f"cluster and remaining spectrum only {sep:.3g} apart")
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    X = scipy.linalg.solve_sylvester(T11, -T22, T12)
    Ps = np.zeros((n, n), dtype=complex)
    Ps[:k, :k] = np.eye(k)
    Ps[:k, k:] = X
    return _make_projector(Z @ Ps @ Z.conj().T, "schur")


def power_limit_projector(M, tol: float = 1e-12, max_iter: int = 64) -> RieszProjector:
    """lim M^n by repeated squaring."""
    M = as_superop(M)
    X = M
    for _ in range(max_iter):
        X2 = X @ X
        if proxy_norm(X2 - X) < tol:
            # M^(2^k) can settle on a periodic orbit (e.g. eigenvalue -1); the limit must be fixed by M
            if proxy_norm(M @ X2 - X2) > np.sqrt(tol):
                raise ConvergenceError("M^n has no limit: peripheral eigenvalues other than 1")
            return _make_projector(X2, "power")
        X = X2
    raise ConvergenceError(
        f"M^(2^k) did not settle in {max_iter} squarings; gap or peripheral spectrum problem")


def eigenprojector(M, gap_min: float = DEFAULT_GAP_MIN) -> RieszProjector:
    """Default route to P for a gapped map: contour integral over the outer circle."""
    rep = require_gap(M, gap_min)
    return riesz_contour(M, rep.outer_contour())


def _separated(ev, outer: ContourSpec, inner: ContourSpec) -> bool:
    d_out = np.abs(ev - outer.center)
    d_in = np.abs(ev - inner.center)
    clear = (np.abs(d_out - outer.radius) > CONTOUR_CLEARANCE) & \
            (np.abs(d_in - inner.radius) > CONTOUR_CLEARANCE)
    inside = (d_out < outer.radius) | (d_in < inner.radius)
    return bool(np.all(clear & inside))


def epsilon_window(M, L, t_max: float, grid: int = 64,
                   gap_min: float = DEFAULT_GAP_MIN) -> float:
    """Largest grid time up to which both circles keep separating the spectrum of M e^{tL}.

    A lower estimate of the true window: only the grid times k*t_max/grid are
    inspected, and the first failure ends the scan.
    """
    M = as_superop(M)
    rep = spectrum_report(M, gap_min)
    if not rep.gap_ok:
        return 0.0
    outer, inner = rep.outer_contour(), rep.inner_contour()
    ts = t_max * np.arange(grid + 1) / grid
    stack = M @ expm_superop(np.asarray(L, dtype=complex)[None] * ts[:, None, None])
    eigs = np.linalg.eigvals(stack)
    good = 0.0
    for k, ev in enumerate(eigs):
        if not _separated(ev, outer, inner):
            return good if k > 0 else 0.0
        good = ts[k]
    return float(t_max)


def projector_at(M, L, t: float, rep: SpectralReport | None = None) -> RieszProjector:
    """P_t: the contour projector of M e^{tL} over the outer circle of M."""
    if rep is None:
        rep = require_gap(M)
    A = as_superop(M) @ expm_superop(L, t)
    if not _separated(np.linalg.eigvals(A), rep.outer_contour(), rep.inner_contour()):
        raise WindowError(f"t = {t:g} lies outside the separation window")
    return riesz_contour(A, rep.outer_contour())


def projector_derivative(M, L, h: float = 1e-4, gap_min: float = DEFAULT_GAP_MIN) -> np.ndarray:
    """Central difference (P_h - P_{-h}) / 2h of the projector family at t = 0."""
    if h <= 0:
        raise ValueError("h must be positive")
    rep = require_gap(M, gap_min)
    if epsilon_window(M, L, 2 * h, grid=2, gap_min=gap_min) < 2 * h:
        raise WindowError(f"separation window is shorter than 2h = {2 * h:g}")
    P_plus = projector_at(M, L, h, rep).proj
    P_minus = projector_at(M, L, -h, rep).proj
    return (P_plus - P_minus) / (2 * h)


def resolvent_sup(M, L, contour: ContourSpec, t_grid: int, n: int) -> float:
    """Max of sigma_max((z - M e^{tau L})^{-1}) over contour nodes and tau in [0, 1/n]."""
    if t_grid < 1 or n < 1:
        raise ValueError("t_grid and n must be >= 1")
    M = as_superop(M)
    eye = np.eye(M.shape[0])
    z, _ = contour.points()
    taus = np.linspace(0.0, 1.0 / n, t_grid) if t_grid > 1 else np.zeros(1)
    best = 0.0
    for tau in taus:
        A = M @ expm_superop(L, tau)
        smin = np.linalg.svd(z[:, None, None] * eye - A, compute_uv=False)[:, -1].min()
        if smin < 1e-14:
            raise SpectralError(f"resolvent singular on the contour at tau = {tau:g}")
        best = max(best, 1.0 / smin)
    return float(best)
