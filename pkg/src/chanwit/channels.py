"""Quantum channels in Kraus form, plus the named families used by the closed forms.

A :class:`Channel` stores its Kraus operators (``dout x din`` each) and a
``label`` recording the constructor and its parameters.  The CLI dispatches
closed-form formulas on that label and never tries to recognise a channel
from its Kraus data.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import tolerances as tol
from .matcore import (
    PAULIS,
    ValidationError,
    as_cmatrix,
    basis_vector,
    hermitian_eig,
    max_asymmetry,
    projector,
    psd_sqrt,
    random_density_matrix,
)


class ChannelError(ValidationError):
    pass


@dataclass(frozen=True)
class Channel:
    din: int
    dout: int
    kraus: tuple
    label: dict = field(default_factory=lambda: {"kind": "kraus", "params": {}})

    def __post_init__(self):
        ops = []
        for k in self.kraus:
            k = as_cmatrix(k).copy()
            if k.shape != (self.dout, self.din):
                raise ChannelError(f"Kraus operator of shape {k.shape}, expected {(self.dout, self.din)}")
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        object.__setattr__(self, "kraus", tuple(ops))

    @property
    def kind(self):
        return self.label.get("kind", "kraus")

    @property
    def params(self):
        return self.label.get("params", {})

    def __call__(self, rho):
        return apply(self, rho)


@dataclass
class CptpReport:
    tp_residual: float
    choi_min_eig: float

    @property
    def trace_preserving(self):
        return self.tp_residual <= tol.TP_ATOL

    @property
    def completely_positive(self):
        return self.choi_min_eig >= tol.CP_FLOOR

    @property
    def ok(self):
        return self.trace_preserving and self.completely_positive

    def raise_if_invalid(self):
        if not self.trace_preserving:
            raise ChannelError(f"not trace preserving: max |sum K^H K - I| = {self.tp_residual:.3e}")
        if not self.completely_positive:
            raise ChannelError(f"not completely positive: min Choi eigenvalue = {self.choi_min_eig:.3e}")


# -- states and measurements ------------------------------------------------

def check_state(rho, atol=tol.STATE_ATOL):
    """Validate a density matrix and return it as a complex array."""
    rho = as_cmatrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    asym = max_asymmetry(rho)
    if asym > atol:
        raise ValidationError(f"density matrix is not Hermitian (asymmetry {asym:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValidationError(f"density matrix trace is {tr:.15g}, expected 1")
    wmin = hermitian_eig(rho)[0][-1]
    if wmin < -atol:
        raise ValidationError(f"density matrix has negative eigenvalue {wmin:.3e}")
    return rho


def check_povm(elements, atol=tol.POVM_ATOL):
    elements = [as_cmatrix(e) for e in elements]
    if not elements:
        raise ValidationError("POVM needs at least one element")
    d = elements[0].shape[0]
    for y, e in enumerate(elements):
        if e.shape != (d, d):
            raise ValidationError(f"POVM element {y} has shape {e.shape}, expected {(d, d)}")
        if max_asymmetry(e) > atol:
            raise ValidationError(f"POVM element {y} is not Hermitian")
        wmin = hermitian_eig(e)[0][-1]
        if wmin < -atol:
            raise ValidationError(f"POVM element {y} has negative eigenvalue {wmin:.3e}")
    resid = float(np.abs(sum(elements) - np.eye(d)).max())
    if resid > atol:
        raise ValidationError(f"POVM elements do not sum to identity (residual {resid:.3e})")
    return elements


# -- action ---------------------------------------------------------------

def apply(ch, rho):
    rho = as_cmatrix(rho)
    if rho.shape != (ch.din, ch.din):
        raise ChannelError(f"input of shape {rho.shape} for a channel with din = {ch.din}")
    return sum(k @ rho @ k.conj().T for k in ch.kraus)


def adjoint_apply(ch, x):
    """Heisenberg-picture action, ``Tr[C(rho) X] == Tr[rho C^dag(X)]``."""
    x = as_cmatrix(x)
    if x.shape != (ch.dout, ch.dout):
        raise ChannelError(f"observable of shape {x.shape} for a channel with dout = {ch.dout}")
    return sum(k.conj().T @ x @ k for k in ch.kraus)


def choi(ch):
    """``sum_ij |i><j| (x) C(|i><j|)``, input factor first."""
    vecs = np.array([k.T.reshape(-1) for k in ch.kraus])
    return vecs.T @ vecs.conj()


def choi_distance(c1, c2):
    a, b = choi(c1), choi(c2)
    if a.shape != b.shape:
        raise ChannelError(f"Choi shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def kraus_from_choi(j, din, dout, drop=tol.KRAUS_DROP):
    w, v = hermitian_eig(j)
    ops = [np.sqrt(wk) * v[:, k].reshape(din, dout).T for k, wk in enumerate(w) if wk > drop]
    return ops


def validate_cptp(ch):
    tp = sum(k.conj().T @ k for k in ch.kraus)
    resid = float(np.abs(tp - np.eye(ch.din)).max())
    wmin = float(hermitian_eig(choi(ch))[0][-1])
    return CptpReport(tp_residual=resid, choi_min_eig=wmin)


def compose(second, first):
    """Channel ``second o first``."""
    if first.dout != second.din:
        raise ChannelError(f"cannot compose: dout {first.dout} != din {second.din}")
    ops = [b @ a for b in second.kraus for a in first.kraus]
    label = {"kind": "composite", "params": {"first": first.label, "second": second.label}}
    return Channel(first.din, second.dout, tuple(ops), label)


def trace_out(ch, dims, traced):
    """Follow ``ch`` by a partial trace over subsystem ``traced`` of its output."""
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != ch.dout:
        raise ChannelError(f"output dims {dims} do not multiply to dout = {ch.dout}")
    ops = []
    for j in range(dims[traced]):
        factors = [np.eye(d) for d in dims]
        factors[traced] = basis_vector(j, dims[traced]).reshape(1, -1)
        sel = factors[0]
        for f in factors[1:]:
            sel = np.kron(sel, f)
        ops.extend(sel @ k for k in ch.kraus)
    label = {"kind": "partial_trace", "params": {"inner": ch.label, "dims": dims, "traced": traced}}
    return Channel(ch.din, ch.dout // dims[traced], tuple(ops), label)


def check_covariance(ch, u, v, samples=20, rng=None):
    """Max entrywise deviation of ``C(U rho U^H)`` from ``V C(rho) V^H`` over random states."""
    rng = np.random.default_rng(0) if rng is None else rng
    u, v = as_cmatrix(u), as_cmatrix(v)
    worst = 0.0
    for _ in range(samples):
        rho = random_density_matrix(ch.din, rng)
        lhs = apply(ch, u @ rho @ u.conj().T)
        rhs = v @ apply(ch, rho) @ v.conj().T
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


# -- named constructors ---------------------------------------------------

def _check_prob(name, x):
    if not 0.0 <= x <= 1.0:
        raise ChannelError(f"{name} must lie in [0, 1], got {x}")


def _state_spectrum(sigma):
    sigma = check_state(sigma)
    w, v = hermitian_eig(sigma)
    return np.clip(w, 0.0, None), v


def identity(d):
    return Channel(d, d, (np.eye(d),), {"kind": "identity", "params": {"d": d}})


def unitary(u):
    u = as_cmatrix(u)
    d = u.shape[0]
    err = float(np.abs(u.conj().T @ u - np.eye(d)).max()) if u.shape == (d, d) else np.inf
    if err > tol.TP_ATOL:
        raise ChannelError(f"matrix is not unitary (|U^H U - I| = {err:.3e})")
    return Channel(d, d, (u,), {"kind": "unitary", "params": {"d": d}})


def dephasing(lam, d=None, basis=None):
    """``lam * rho + (1 - lam) * sum_k <k|rho|k> |k><k|``; ``basis`` holds the |k> as columns."""
    _check_prob("lambda", lam)
    basis = np.eye(d) if basis is None else as_cmatrix(basis)
    d = basis.shape[0]
    if float(np.abs(basis.conj().T @ basis - np.eye(d)).max()) > tol.TP_ATOL:
        raise ChannelError("dephasing basis must be orthonormal")
    ops = [np.sqrt(lam) * np.eye(d)]
    ops += [np.sqrt(1.0 - lam) * projector(basis[:, k]) for k in range(d)]
    return Channel(d, d, tuple(ops), {"kind": "dephasing", "params": {"lambda": lam, "d": d}, "basis": basis})


def trace_class(sigma, din=None):
    """``Tr[rho] * sigma``; ``din`` defaults to the dimension of ``sigma``."""
    s, v = _state_spectrum(sigma)
    dout = v.shape[0]
    din = dout if din is None else din
    ops = [np.sqrt(s[i]) * np.outer(v[:, i], basis_vector(j, din)) for i in range(dout) for j in range(din) if s[i] > 0]
    return Channel(din, dout, tuple(ops), {"kind": "trace_class", "params": {"d": din}, "sigma": as_cmatrix(sigma)})


def erasure(lam, d):
    """``lam * rho (+) (1 - lam) Tr[rho] |phi><phi|`` with the flag |phi> = |d> in dimension d + 1."""
    _check_prob("lambda", lam)
    embed = np.vstack([np.eye(d), np.zeros((1, d))])
    ops = [np.sqrt(lam) * embed]
    ops += [np.sqrt(1.0 - lam) * np.outer(basis_vector(d, d + 1), basis_vector(j, d)) for j in range(d)]
    return Channel(d, d + 1, tuple(ops), {"kind": "erasure", "params": {"lambda": lam, "d": d}})


def qc(povm):
    """Measure ``povm`` and write the outcome into an orthonormal register."""
    povm = check_povm(povm)
    d, k = povm[0].shape[0], len(povm)
    ops = []
    for y, e in enumerate(povm):
        root = psd_sqrt(e)
        ops += [np.outer(basis_vector(y, k), root[w, :]) for w in range(d)]
    return Channel(d, k, tuple(ops), {"kind": "qc", "params": {"d": d, "k": k}, "povm": povm})


def weyl_operators(d):
    """The d^2 shift-and-clock unitaries X^a Z^b."""
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a, b in product(range(d), repeat=2)]


def depolarizing(lam, d):
    """``lam * rho + (1 - lam) Tr[rho] I/d``, as a uniform Weyl mixture."""
    _check_prob("lambda", lam)
    ws = weyl_operators(d)
    wt = (1.0 - lam) / d**2
    ops = [np.sqrt(lam + wt) * ws[0]] + [np.sqrt(wt) * w for w in ws[1:]]
    return Channel(d, d, tuple(ops), {"kind": "depolarizing", "params": {"lambda": lam, "d": d}})


def pauli(lam):
    """``lam0 rho + sum_k lam_k sigma_k rho sigma_k`` on a qubit."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4,) or np.any(lam < 0) or abs(lam.sum() - 1.0) > tol.PROB_ATOL:
        raise ChannelError(f"Pauli weights must be a probability vector of length 4, got {lam}")
    ops = [np.sqrt(l) * s for l, s in zip(lam, PAULIS)]
    return Channel(2, 2, tuple(ops), {"kind": "pauli", "params": {"lambda": lam.tolist()}})


def amplitude_damping(eta):
    _check_prob("eta", eta)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(eta)]])
    k1 = np.array([[0.0, np.sqrt(1.0 - eta)], [0.0, 0.0]])
    return Channel(2, 2, (k0, k1), {"kind": "amplitude_damping", "params": {"eta": eta}})


def shifted_depolarizing(lam, sigma):
    """``lam * rho + (1 - lam) Tr[rho] sigma``."""
    _check_prob("lambda", lam)
    s, v = _state_spectrum(sigma)
    d = v.shape[0]
    ops = [np.sqrt(lam) * np.eye(d)]
    ops += [np.sqrt((1.0 - lam) * s[i]) * np.outer(v[:, i], basis_vector(j, d)) for i in range(d) for j in range(d) if s[i] > 0]
    return Channel(d, d, tuple(ops), {"kind": "shifted_depolarizing", "params": {"lambda": lam, "d": d}, "sigma": as_cmatrix(sigma)})


def symmetric_projector(d):
    """Projector onto the symmetric subspace of C^d (x) C^d."""
    swap = np.zeros((d * d, d * d))
    for i, j in product(range(d), repeat=2):
        swap[j * d + i, i * d + j] = 1.0
    return 0.5 * (np.eye(d * d) + swap)


def cloning_1to2(d):
    """Optimal universal 1 -> 2 cloner, ``2/(d+1) P_s (rho (x) I) P_s``.

    Kraus operators are read off the eigendecomposition of the Choi matrix.
    """
    ps = symmetric_projector(d)
    scale = 2.0 / (d + 1)
    j = np.zeros((d * d * d, d * d * d), dtype=complex)
    for a, b in product(range(d), repeat=2):
        out = scale * ps @ np.kron(np.outer(basis_vector(a, d), basis_vector(b, d)), np.eye(d)) @ ps
        j[a * d * d:(a + 1) * d * d, b * d * d:(b + 1) * d * d] = out
    ops = kraus_from_choi(j, d, d * d)
    return Channel(d, d * d, tuple(ops), {"kind": "cloning_1to2", "params": {"d": d}})


# -- JSON -------------------------------------------------------------------

def _cmat_from_json(m):
    a = np.asarray(m, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a.astype(complex)


def _cmat_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def channel_from_json(obj):
    kind = obj.get("kind")
    p = obj.get("params", {})
    try:
        if kind == "kraus":
            ops = [_cmat_from_json(k) for k in obj["ops"]]
            ch = Channel(int(obj["din"]), int(obj["dout"]), tuple(ops))
            validate_cptp(ch).raise_if_invalid()
            return ch
        if kind == "identity":
            return identity(int(p["d"]))
        if kind == "unitary":
            return unitary(_cmat_from_json(p["u"]))
        if kind == "dephasing":
            basis = _cmat_from_json(p["basis"]) if "basis" in p else None
            return dephasing(float(p["lambda"]), p.get("d"), basis)
        if kind == "trace_class":
            return trace_class(_cmat_from_json(p["sigma"]), p.get("din"))
        if kind == "erasure":
            return erasure(float(p["lambda"]), int(p["d"]))
        if kind == "qc":
            return qc([_cmat_from_json(e) for e in p["povm"]])
        if kind == "depolarizing":
            return depolarizing(float(p["lambda"]), int(p["d"]))
        if kind == "pauli":
            return pauli(p["lambda"])
        if kind in ("amplitude_damping", "ampdamp"):
            return amplitude_damping(float(p["eta"]))
        if kind == "shifted_depolarizing":
            return shifted_depolarizing(float(p["lambda"]), _cmat_from_json(p["sigma"]))
        if kind == "cloning_1to2":
            return cloning_1to2(int(p["d"]))
    except KeyError as exc:
        raise ChannelError(f"channel '{kind}' is missing parameter {exc}") from None
    raise ChannelError(f"unknown channel kind {kind!r}")


def channel_to_json(ch):
    return {
        "kind": "kraus",
        "din": ch.din,
        "dout": ch.dout,
        "ops": [_cmat_to_json(k) for k in ch.kraus],
    }
