"""Small fixed-size 3D linear algebra kernel.

Vectors are plain numpy arrays of shape (3,), matrices of shape (3, 3);
no wrapper classes.  The one nontrivial routine is the closed-form
spectrum of a traceless symmetric matrix, obtained from the trigonometric
solution of its depressed characteristic cubic

    t^3 - (tr A^2 / 2) t - (tr A^3 / 3) = 0,

which is exact up to rounding even at degenerate spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Vec3 = np.ndarray
Mat3 = np.ndarray


def vec3(x, y, z) -> Vec3:
    return np.array([x, y, z], dtype=float)


def unit(v) -> Vec3:
    """v / ||v||, rejecting the zero vector."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def canonical_sign(v) -> Vec3:
    """Flip v so its largest-magnitude component is positive.

    Gives a deterministic representative for quantities defined only up
    to sign (eigenvectors, plane normals).
    """
    v = np.asarray(v, dtype=float)
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0.0 else v


def cross_matrix(n) -> Mat3:
    """Antisymmetric matrix [n] with [n] @ v == np.cross(n, v)."""
    n1, n2, n3 = np.asarray(n, dtype=float)
    return np.array([
        [0.0, -n3, n2],
        [n3, 0.0, -n1],
        [-n2, n1, 0.0],
    ])


def cross_matrices(ns) -> np.ndarray:
    """Batched cross_matrix: (..., 3) -> (..., 3, 3)."""
    ns = np.asarray(ns, dtype=float)
    out = np.zeros(ns.shape[:-1] + (3, 3))
    n1, n2, n3 = ns[..., 0], ns[..., 1], ns[..., 2]
    out[..., 0, 1] = -n3
    out[..., 0, 2] = n2
    out[..., 1, 0] = n3
    out[..., 1, 2] = -n1
    out[..., 2, 0] = -n2
    out[..., 2, 1] = n1
    return out


def rot_about(axis, angle) -> Mat3:
    """Proper rotation by `angle` radians fixing `axis` (Rodrigues form)."""
    axis = np.asarray(axis, dtype=float)
    na = float(np.linalg.norm(axis))
    if na == 0.0 or not np.isfinite(na):
        raise ValueError("degenerate axis")
    k = cross_matrix(axis / na)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def det3(a) -> np.ndarray:
    """Determinant of (..., 3, 3) arrays, expanded explicitly."""
    a = np.asarray(a, dtype=float)
    return (
        a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
        - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
        + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0])
    )


def symmetric_residual(A) -> float:
    A = np.asarray(A, dtype=float)
    return float(np.abs(A - A.T).max())


def traceless_residual(A):
    """(|tr A|, |det A - tr(A^3)/3|); both vanish on traceless symmetric input."""
    A = np.asarray(A, dtype=float)
    tr = float(np.trace(A))
    det = float(det3(A))
    tr3 = float(np.trace(A @ A @ A))
    return abs(tr), abs(det - tr3 / 3.0)


def assert_traceless_symmetric(A, rtol=1e-12):
    """Validate the traceless-symmetric contract (entry-scale relative)."""
    A = np.asarray(A, dtype=float)
    scale = max(float(np.abs(A).max()), 1.0)
    if symmetric_residual(A) > rtol * scale:
        raise ValueError("matrix is not symmetric")
    tr_res, det_res = traceless_residual(A)
    if tr_res > rtol * scale:
        raise ValueError("matrix is not traceless")
    if det_res > rtol * scale ** 3:
        raise ValueError("det(A) is inconsistent with tr(A^3)/3")


@dataclass(frozen=True)
class EigenTriple:
    """Spectrum summary of a traceless symmetric matrix.

    lam is the principal eigenvalue (largest magnitude; a magnitude tie
    between a positive and a negative eigenvalue resolves to the positive
    one).  The remaining pair is -lam/2 +- delta with delta >= 0, and
    r = 2*delta/|lam| in [0, 1], with r = 0 at lam = 0 by convention.
    """

    lam: float
    delta: float
    r: float

    @property
    def eigenvalues(self):
        return (self.lam, -0.5 * self.lam + self.delta, -0.5 * self.lam - self.delta)


def principal_split(j2, j3):
    """Principal eigenvalue and pair half-spread of t^3 - j2*t - j3 = 0.

    j2 = tr(A^2)/2 >= 0 and j3 = det(A) for traceless symmetric A.
    Accepts scalars or arrays.  The arccos argument is clamped to [-1, 1]
    against floating-point drift near degenerate spectra.
    """
    j2 = np.asarray(j2, dtype=float)
    j3 = np.asarray(j3, dtype=float)
    m = 2.0 * np.sqrt(np.maximum(j2, 0.0) / 3.0)
    # |det| <= m^3/4 for real spectra, so wherever m^3 underflows to zero
    # the determinant has underflowed first and the ratio is exactly 0
    m3 = m * m * m
    safe = np.where(m3 > 0.0, m3, 1.0)
    arg = np.clip(np.where(m3 > 0.0, 4.0 * j3 / safe, 0.0), -1.0, 1.0)
    phi = np.arccos(arg) / 3.0  # in [0, pi/3]
    e1 = m * np.cos(phi)
    e2 = m * np.cos(phi - 2.0 * np.pi / 3.0)
    e3 = m * np.cos(phi - 4.0 * np.pi / 3.0)
    # e1 >= e2 >= e3 and e1 >= 0 >= e3; a magnitude tie resolves to the
    # positive root, with an ulp-scale band so exact +-pairs that round
    # apart still count as tied
    take_low = -e3 > e1 + 32.0 * np.finfo(float).eps * m
    lam = np.where(take_low, e3, e1)
    delta = np.maximum(np.where(take_low, 0.5 * (e1 - e2), 0.5 * (e2 - e3)), 0.0)
    lam = np.where(m > 0.0, lam, 0.0)
    delta = np.where(m > 0.0, delta, 0.0)
    return lam, delta


def spread_ratio(lam, delta):
    """r = 2*delta/|lam| clipped to [0, 1]; 0 where lam == 0."""
    lam = np.asarray(lam, dtype=float)
    delta = np.asarray(delta, dtype=float)
    safe = np.where(lam == 0.0, 1.0, np.abs(lam))
    return np.where(lam == 0.0, 0.0, np.clip(2.0 * delta / safe, 0.0, 1.0))


def eig_traceless(A) -> EigenTriple:
    """Closed-form spectrum of a traceless symmetric 3x3 matrix."""
    A = np.asarray(A, dtype=float)
    j2 = 0.5 * float(np.trace(A @ A))
    j3 = float(det3(A))
    lam, delta = principal_split(j2, j3)
    lam = float(lam)
    delta = float(delta)
    return EigenTriple(lam, delta, float(spread_ratio(lam, delta)))


def principal_axis(A):
    """(principal eigenvalue, unit eigenvector) of a symmetric matrix.

    Principal means largest magnitude; a tie resolves to the positive
    eigenvalue, and the eigenvector sign is canonical.
    """
    A = np.asarray(A, dtype=float)
    w, v = np.linalg.eigh(A)
    i = 0 if -w[0] > w[-1] else len(w) - 1
    return float(w[i]), canonical_sign(v[:, i])
