"""Structure analysis of a moment -> matrix map.

Given an algebra of traceless symmetric images with reciprocity, this
module validates it, computes the Gram matrix of basis images and its top
eigenpair, detects invariant planes (2D subspaces closed under the
induced product), builds the orthonormal frame attached to a plane, and
constructs the one-parameter family of splits of the map into a part
equivariant under rotations about the coupling vector and a part mapping
everything into the plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dipoles import MagneticAlgebra
from .linalg3 import canonical_sign, cross_matrices, cross_matrix, unit
from .sphere import fibonacci_sphere, golden_min, sphere_descent, tangent_basis

PLANARITY_TOL = 1e-8  # relative to the largest basis-image Frobenius norm
_FRAME_TOL = 1e-12  # below this (relative), the coupling vector is treated as zero


class TrivialAlgebraError(ValueError):
    """All basis images vanish; structure analysis is undefined."""


class NotInvariantPlaneError(ValueError):
    """Candidate normal fails the planarity residual test."""

    def __init__(self, residual, threshold):
        super().__init__(
            f"not an invariant plane (residual {residual:.3e} > tol {threshold:.3e})"
        )
        self.residual = float(residual)
        self.threshold = float(threshold)


@dataclass(frozen=True)
class AlgebraCheck:
    reciprocity_residual: float
    trace_residual: float
    det_residual: float
    nontrivial: bool


def check_algebra(alg: MagneticAlgebra) -> AlgebraCheck:
    """Report-style validation; never raises."""
    return AlgebraCheck(
        reciprocity_residual=alg.reciprocity_residual(),
        trace_residual=alg.trace_residual(),
        det_residual=alg.det_residual(),
        nontrivial=not alg.is_trivial(),
    )


@dataclass(frozen=True, eq=False)
class GramSpectrum:
    """Gram matrix of the basis images with its full eigendecomposition.

    lambda_F is the largest eigenvalue (max of tr F_M^2 over unit M) and
    M_F an associated unit eigenvector.  When the top eigenvalue is
    degenerate the whole eigenbasis is available and multiplicity > 1
    flags that M_F is only one representative of an eigenspace.
    """

    gram: np.ndarray
    lambda_F: float
    M_F: np.ndarray
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns, matching eigenvalues
    multiplicity: int


def gram_spectrum(alg: MagneticAlgebra, degeneracy_rtol=1e-9) -> GramSpectrum:
    g = alg.gram
    w, v = np.linalg.eigh(g)
    lam = float(max(w[-1], 0.0))
    tol = degeneracy_rtol * max(lam, 1e-300)
    mult = int(np.sum(w >= lam - tol))
    return GramSpectrum(
        gram=g,
        lambda_F=lam,
        M_F=canonical_sign(v[:, -1]),
        eigenvalues=w,
        eigenvectors=v,
        multiplicity=mult,
    )


def plane_residual(alg: MagneticAlgebra, n_hat) -> float:
    """Frobenius norm of [n] F_n [n]; zero exactly on invariant-plane normals."""
    n = unit(n_hat)
    k = cross_matrix(n)
    return float(np.linalg.norm(k @ alg.matrix(n) @ k))


def plane_residual_batch(alg: MagneticAlgebra, ns) -> np.ndarray:
    ns = np.asarray(ns, dtype=float)
    ns = ns / np.linalg.norm(ns, axis=-1, keepdims=True)
    k = cross_matrices(ns)
    f = alg.matrices(ns)
    r = np.einsum("nab,nbc,ncd->nad", k, f, k)
    return np.sqrt(np.einsum("nab,nab->n", r, r))


@dataclass(frozen=True, eq=False)
class PlanarStructure:
    """Frame data of one invariant plane.

    n_hat is the unit normal, P = F_n n the coupling vector (always
    perpendicular to n_hat), and when P is nonzero (P_hat, Q_hat)
    complete n_hat to an orthonormal frame with Q_hat spanning the kernel
    of F_n.  degenerate marks members of a continuous family of planes.
    """

    n_hat: np.ndarray
    P: np.ndarray
    norm_P: float
    P_hat: np.ndarray | None
    Q_hat: np.ndarray | None
    residual: float
    gram_eigenvalue: float
    degenerate: bool = False

    def frame(self):
        """In-plane orthonormal pair, synthesized when P vanishes."""
        if self.P_hat is not None:
            return self.P_hat, self.Q_hat
        return tangent_basis(self.n_hat)


def planar_structure(alg: MagneticAlgebra, n_hat, tol=PLANARITY_TOL, degenerate=False) -> PlanarStructure:
    """Validate a normal candidate and build the attached frame.

    Raises NotInvariantPlaneError (carrying the residual) if [n] F_n [n]
    is not negligible against the algebra scale.
    """
    scale = alg.scale
    if scale == 0.0:
        raise TrivialAlgebraError("trivial algebra")
    n = unit(n_hat)
    res = plane_residual(alg, n)
    threshold = tol * scale
    if res > threshold:
        raise NotInvariantPlaneError(res, threshold)
    fn = alg.matrix(n)
    P = fn @ n
    norm_p = float(np.linalg.norm(P))
    if norm_p > _FRAME_TOL * scale:
        p_hat = P / norm_p
        q_hat = np.cross(n, p_hat)
    else:
        p_hat = None
        q_hat = None
    # cheap consistency check of the frame's defining action: in-plane
    # moments must send n to multiples of itself with factor P . M
    e1, e2 = (p_hat, q_hat) if p_hat is not None else tangent_basis(n)
    for m in (e1, e2):
        err = np.linalg.norm(alg.matrix(m) @ n - float(P @ m) * n)
        if err > 10.0 * max(threshold, 1e-13 * scale):
            raise NotInvariantPlaneError(float(err), threshold)
    g = alg.gram
    return PlanarStructure(
        n_hat=canonical_sign(n),
        P=P,
        norm_P=norm_p,
        P_hat=p_hat,
        Q_hat=q_hat,
        residual=res,
        gram_eigenvalue=float(n @ g @ n),
        degenerate=degenerate,
    )


def _group_eigenvalues(w, rtol):
    """Indices of eigh output grouped by near-equality."""
    groups = [[0]]
    tol = rtol * max(abs(w[-1]), 1e-300)
    for i in range(1, len(w)):
        if w[i] - w[groups[-1][0]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _refine_angle(alg, v1, v2, theta, width):
    f = lambda t: plane_residual_batch(alg, [np.cos(t) * v1 + np.sin(t) * v2])[0]
    t, _ = golden_min(f, theta - width, theta + width, iters=70)
    return np.cos(t) * v1 + np.sin(t) * v2


def _local_minima_periodic(res):
    """Indices that are minima of a periodic residual profile."""
    left = np.roll(res, 1)
    right = np.roll(res, -1)
    return np.flatnonzero((res <= left) & (res <= right))


def _separated_seeds(points, res, max_seeds, min_dot=0.98):
    """Lowest-residual points, greedily kept angularly apart (mod sign)."""
    seeds = []
    for i in np.argsort(res):
        p = points[i]
        if all(abs(float(p @ q)) < min_dot for q in seeds):
            seeds.append(p)
            if len(seeds) >= max_seeds:
                break
    return seeds


def _dedupe_normals(normals):
    out = []
    for n in normals:
        n = canonical_sign(unit(n))
        if all(abs(float(n @ m)) < 1.0 - 1e-9 for m in out):
            out.append(n)
    return out


def find_invariant_planes(
    alg: MagneticAlgebra,
    tol=PLANARITY_TOL,
    global_scan=False,
    n_scan=720,
    max_family=8,
) -> list[PlanarStructure]:
    """All invariant-plane normals of the algebra.

    Candidates are restricted to eigenvectors of the Gram matrix, which
    is exhaustive for exact planes; degenerate Gram eigenspaces are
    scanned densely and continuous families come back as max_family
    representatives flagged degenerate.  global_scan additionally sweeps
    the whole sphere (Fibonacci lattice plus local descent) to catch
    near-planes of slightly perturbed configurations.
    """
    scale = alg.scale
    if scale == 0.0:
        raise TrivialAlgebraError("trivial algebra")
    threshold = tol * scale
    gs = gram_spectrum(alg)
    w, v = gs.eigenvalues, gs.eigenvectors

    accepted: list[np.ndarray] = []
    family: list[np.ndarray] = []

    for group in _group_eigenvalues(w, 1e-7):
        if len(group) == 1:
            n = v[:, group[0]]
            if plane_residual(alg, n) <= threshold:
                accepted.append(n)
        elif len(group) == 2:
            v1, v2 = v[:, group[0]], v[:, group[1]]
            thetas = np.linspace(0.0, np.pi, n_scan, endpoint=False)
            ns = np.cos(thetas)[:, None] * v1 + np.sin(thetas)[:, None] * v2
            res = plane_residual_batch(alg, ns)
            if np.mean(res <= threshold) > 0.9:
                step = max(1, n_scan // max_family)
                family.extend(ns[::step][:max_family])
            else:
                # isolated planes show up as sharp local minima of the
                # angular profile; refine each and keep those that pass
                width = np.pi / n_scan
                minima = _local_minima_periodic(res)
                for i in minima[np.argsort(res[minima])][:16]:
                    n = _refine_angle(alg, v1, v2, thetas[i], 2 * width)
                    if plane_residual(alg, n) <= threshold:
                        accepted.append(n)
        else:
            pts = fibonacci_sphere(10_000)
            res = plane_residual_batch(alg, pts)
            if np.mean(res <= threshold) > 0.9:
                step = max(1, len(pts) // max_family)
                family.extend(pts[::step][:max_family])
            else:
                for p in _separated_seeds(pts, res, max_seeds=24):
                    n, r = sphere_descent(
                        lambda x: plane_residual_batch(alg, [x])[0], p, steps=80
                    )
                    if r <= threshold:
                        accepted.append(n)

    if global_scan:
        pts = fibonacci_sphere(10_000)
        res = plane_residual_batch(alg, pts)
        for p in _separated_seeds(pts, res, max_seeds=16):
            n, r = sphere_descent(
                lambda x: plane_residual_batch(alg, [x])[0], p, steps=80
            )
            if r <= threshold:
                accepted.append(n)

    out = [planar_structure(alg, n, tol=tol) for n in _dedupe_normals(accepted)]
    seen = [p.n_hat for p in out]
    for n in _dedupe_normals(family):
        if all(abs(float(n @ m)) < 1.0 - 1e-9 for m in seen):
            out.append(planar_structure(alg, n, tol=tol, degenerate=True))
            seen.append(n)
    out.sort(key=lambda p: (-p.gram_eigenvalue, p.n_hat[0], p.n_hat[1], p.n_hat[2]))
    return out


@dataclass(frozen=True, eq=False)
class Decomposition:
    """One member of the family of splits F = E - Pi attached to a plane.

    E is equivariant under rotations fixing the coupling vector P and is
    affine in the free parameter gamma through -gamma * P P^T; the
    remainder Pi maps all of R^3 into the plane.
    """

    algebra: MagneticAlgebra
    plane: PlanarStructure
    gamma: float

    def equivariant_part(self, M) -> np.ndarray:
        M = np.asarray(M, dtype=float)
        P = self.plane.P
        return (
            np.outer(P, M)
            + np.outer(M, P)
            + float(M @ P) * np.eye(3)
            - self.gamma * np.outer(P, P)
        )

    def plane_part(self, M) -> np.ndarray:
        return self.equivariant_part(M) - self.algebra.matrix(M)


def decompose(alg: MagneticAlgebra, plane: PlanarStructure, gamma=0.0) -> Decomposition:
    return Decomposition(algebra=alg, plane=plane, gamma=float(gamma))
