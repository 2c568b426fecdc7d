"""Dense complex matrix kernel.

Matrices are plain 2-D numpy arrays (complex128 after ``as_cmatrix``).
The Hermitian eigensolver is a cyclic complex Jacobi method, which is
unconditionally convergent and fast enough for the small dimensions
(at most a few dozen) used throughout the package.
"""

import numpy as np

from . import tolerances as tol


class ValidationError(ValueError):
    """Raised when an input violates a mathematical precondition."""


def as_cmatrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def adjoint(a):
    return as_cmatrix(a).conj().T


def max_asymmetry(a):
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        return np.inf
    return float(np.abs(a - a.conj().T).max(initial=0.0))


def is_hermitian(a, atol=tol.HERMITIAN_STRICT):
    return max_asymmetry(a) <= atol


def _require_hermitian(a, atol=tol.HERMITIAN_ATOL):
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix is not square: shape {a.shape}")
    asym = max_asymmetry(a)
    if asym > atol:
        raise ValidationError(f"matrix is not Hermitian: max |A - A^H| = {asym:.3e}")
    return 0.5 * (a + a.conj().T)


def _jacobi_rotate(a, v, p, q):
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # unitary acting on columns (p, q); the phase makes the pivot real first
    g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    v[:, idx] = v[:, idx] @ g


def _fix_phases(vecs):
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > tol.EIGVEC_PHASE_ATOL)
        if nz.size:
            z = col[nz[0]]
            vecs[:, k] = col * (abs(z) / z)
    return vecs


def hermitian_eig(a):
    """Eigendecomposition ``A = V diag(w) V^H`` of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` real and sorted in descending order and
    the eigenvectors as orthonormal columns of ``V``.  Each eigenvector is
    phase-fixed so that its first nonzero component is real and positive.
    """
    a = _require_hermitian(a).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(tol.JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol.JACOBI_OFFDIAG * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], _fix_phases(v[:, order])


def eigvalsh(a):
    return hermitian_eig(a)[0]


def trace_norm(a):
    """Schatten 1-norm of a Hermitian matrix (sum of |eigenvalues|)."""
    return float(np.sum(np.abs(eigvalsh(a))))


def top_eigpair(a):
    w, v = hermitian_eig(a)
    return float(w[0]), v[:, 0].copy()


def psd_sqrt(a):
    w, v = hermitian_eig(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def psd_inv_sqrt(a, floor=tol.REGULARIZER):
    w, v = hermitian_eig(a)
    return (v / np.sqrt(np.maximum(w, floor))) @ v.conj().T


def projector(vec):
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(vec, vec.conj())


def kron(a, b):
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def partial_trace(a, traced, dims):
    """Trace out subsystem ``traced`` (0-based) of an operator on a tensor product.

    ``dims`` lists the subsystem dimensions in tensor order.
    """
    a = as_cmatrix(a)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise ValidationError(f"operator shape {a.shape} does not match dims {dims}")
    if not 0 <= traced < len(dims):
        raise ValidationError(f"subsystem index {traced} out of range for {len(dims)} subsystems")
    k = len(dims)
    t = a.reshape(dims + dims)
    t = np.trace(t, axis1=traced, axis2=traced + k)
    keep = int(total // dims[traced])
    return t.reshape(keep, keep)


def basis_vector(i, d):
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + z.conj().T)


def random_density_matrix(d, rng, rank=None):
    rank = d if rank is None else rank
    z = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
