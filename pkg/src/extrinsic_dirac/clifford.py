"""Complex Clifford algebra representations and spinor modules of direct sums.

Conventions: generators satisfy ``g_i g_j + g_j g_i = -2 delta_ij I`` and are
unitary and skew-adjoint. The complex volume element is
``i^{n/2} g_1...g_n`` for even ``n`` and ``i^{(n+1)/2} g_1...g_n`` for odd
``n``; for odd ``n`` the module with index ``j`` is the one on which the
volume element acts as ``(-1)^j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations

import numpy as np

from .errors import CapacityError

DIM_CAP = 16

_I2 = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=np.complex128))


def volume_element(generators):
    """Complex volume element of a list of generators."""
    gens = list(generators)
    n = len(gens)
    if n == 0:
        return np.eye(1, dtype=np.complex128)
    d = gens[0].shape[0]
    prod = reduce(np.matmul, gens, np.eye(d, dtype=np.complex128))
    power = n // 2 if n % 2 == 0 else (n + 1) // 2
    return (1j**power) * prod


@dataclass(frozen=True)
class CliffordRep:
    """A matrix representation of Cl(R^n) by ``n`` generators."""

    n: int
    generators: tuple
    module_index: int = 0
    volume: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=np.complex128) for g in self.generators)
        for g in gens:
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        vol = volume_element(gens) if gens else np.eye(self.dim, dtype=np.complex128)
        vol.setflags(write=False)
        object.__setattr__(self, "volume", vol)

    @property
    def dim(self):
        return 2 ** (self.n // 2)

    def gamma(self, v):
        """Clifford multiplication by the vector ``v`` (length ``n``)."""
        v = np.asarray(v)
        return np.tensordot(v, np.stack(self.generators), axes=1)

    def half_spinor_projectors(self):
        """(P+, P-) for even ``n``: the +-1 eigenspaces of the volume element."""
        if self.n % 2:
            raise ValueError("half-spinor splitting needs even dimension")
        eye = np.eye(self.dim, dtype=np.complex128)
        return 0.5 * (eye + self.volume), 0.5 * (eye - self.volume)


def _even_generators(k):
    """2k skew-adjoint generators on C^(2^k) via the Jordan-Wigner pattern."""
    gens = []
    for a in range(k):
        left = [_Z] * a
        right = [_I2] * (k - a - 1)
        gens.append(1j * _kron_all(left + [_X] + right))
        gens.append(1j * _kron_all(left + [_Y] + right))
    return gens


def _check_cap(n):
    if n > DIM_CAP:
        raise CapacityError(f"dimension {n} exceeds the cap {DIM_CAP}")


def irreducible_rep(n, j=0):
    """Irreducible representation of Cl(R^n); ``j`` selects the module for odd n."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_cap(n)
    if n % 2 == 0:
        return CliffordRep(n, tuple(_even_generators(n // 2)), 0)
    if j not in (0, 1):
        raise ValueError("module index must be 0 or 1")
    gens = _even_generators((n - 1) // 2)
    d = 2 ** ((n - 1) // 2)
    chir = volume_element(gens) if gens else np.eye(d, dtype=np.complex128)
    last = 1j * chir
    target = (-1) ** j
    vol = volume_element(gens + [last])
    # vol is exactly +-I here; pick the sign of the last generator accordingly
    if np.real(vol[0, 0]) * target < 0:
        last = -last
    return CliffordRep(n, tuple(gens + [last]), j)


def swap_module(rep):
    """Pass between the two odd-dimensional modules by negating every generator."""
    if rep.n % 2 == 0:
        raise ValueError("swap_module needs odd dimension")
    return CliffordRep(rep.n, tuple(-g for g in rep.generators), 1 - rep.module_index)


@dataclass(frozen=True)
class SumDecomposition:
    """Spinor module of E + F assembled from modules of E and F.

    ``rep`` is the representation of Cl(E + F); ``modules`` holds both
    odd-dimensional modules when ``n + m`` is odd. ``grading`` is the pair of
    projectors (P+, P-) for even total dimension, else ``None``.
    """

    rep: CliffordRep
    case: int
    n: int
    m: int
    grading: tuple | None
    swap_iso: np.ndarray | None = None
    modules: tuple = ()
    blocks: tuple | None = None  # (dim of first block, dim of second block), Case 4


def _case1_gens(repE, repF):
    dE, dF = repE.dim, repF.dim
    IE, IF = np.eye(dE), np.eye(dF)
    gens = [np.kron(g, IF) for g in repE.generators]
    gens += [np.kron(repE.volume, g) for g in repF.generators]
    return gens


def _case3_gens(repE, repF):
    dE, dF = repE.dim, repF.dim
    IE = np.eye(dE)
    gens = [np.kron(g, repF.volume) for g in repE.generators]
    gens += [np.kron(IE, g) for g in repF.generators]
    return gens


def direct_sum_rep(repE, repF):
    """Spinor module of E + F from modules of E (dim n) and F (dim m)."""
    n, m = repE.n, repF.n
    _check_cap(n + m)
    if n % 2 == 0 and m % 2 == 0:
        rep = CliffordRep(n + m, tuple(_case1_gens(repE, repF)), 0)
        return SumDecomposition(rep, 1, n, m, rep.half_spinor_projectors())
    if n % 2 == 0:
        mods = []
        for j in (0, 1):
            Fj = repF if repF.module_index == j else swap_module(repF)
            mods.append(CliffordRep(n + m, tuple(_case1_gens(repE, Fj)), j))
        return SumDecomposition(mods[repF.module_index], 2, n, m, None, modules=tuple(mods))
    if m % 2 == 0:
        mods = []
        for j in (0, 1):
            Ej = repE if repE.module_index == j else swap_module(repE)
            mods.append(CliffordRep(n + m, tuple(_case3_gens(Ej, repF)), j))
        return SumDecomposition(mods[repE.module_index], 3, n, m, None, modules=tuple(mods))
    return _case4(repE, repF)


def _case4(repE, repF):
    E0 = repE if repE.module_index == 0 else swap_module(repE)
    F0 = repF if repF.module_index == 0 else swap_module(repF)
    F1 = swap_module(F0)
    # Sigma^1 F is realized on the same space as Sigma^0 F, so the
    # intertwiner with phi g0 = -g1 phi is the identity.
    phi = np.eye(F0.dim, dtype=np.complex128)
    phi_inv = np.linalg.inv(phi)
    dE = E0.dim
    IE = np.eye(dE)
    zero = np.zeros((dE * F0.dim,) * 2, dtype=np.complex128)
    gens = []
    # Prefactor -i (not +i) so that the volume element is +1 on the first
    # block Sigma^0 E (x) Sigma^0 F with the orientation e_1..e_n, f_1..f_m.
    for g in E0.generators:
        gens.append(-1j * np.block([[zero, np.kron(g, phi_inv)], [-np.kron(g, phi), zero]]))
    for g0, g1 in zip(F0.generators, F1.generators):
        gens.append(np.block([[zero, np.kron(IE, phi_inv @ g1)], [-np.kron(IE, phi @ g0), zero]]))
    rep = CliffordRep(repE.n + repF.n, tuple(gens), 0)
    half = dE * F0.dim
    d = 2 * half
    pplus = np.zeros((d, d), dtype=np.complex128)
    pplus[:half, :half] = np.eye(half)
    pminus = np.eye(d, dtype=np.complex128) - pplus
    return SumDecomposition(rep, 4, repE.n, repF.n, (pplus, pminus), swap_iso=phi, blocks=(half, half))


def nested_rep(dims):
    """Representation of R^(sum dims) built by iterated direct sums (left fold)."""
    rep = irreducible_rep(dims[0])
    for m in dims[1:]:
        rep = direct_sum_rep(rep, irreducible_rep(m)).rep
    return rep


def verify_clifford(rep, tol=1e-12):
    """Residuals of the Clifford relations, unitarity and the volume grading.

    ``rep`` may be a CliffordRep or a SumDecomposition (whose grading and
    swap isomorphism are then checked as well).
    """
    decomp = rep if isinstance(rep, SumDecomposition) else None
    r = decomp.rep if decomp else rep
    gens = r.generators
    d = r.dim
    eye = np.eye(d)
    rel = 0.0
    for a, ga in enumerate(gens):
        for b in range(a, len(gens)):
            gb = gens[b]
            target = -2.0 * eye if a == b else 0.0
            rel = max(rel, float(np.max(np.abs(ga @ gb + gb @ ga - target))))
    unit = max((float(np.max(np.abs(g.conj().T @ g - eye))) for g in gens), default=0.0)
    skew = max((float(np.max(np.abs(g.conj().T + g))) for g in gens), default=0.0)
    vol = r.volume
    grading = float(np.max(np.abs(vol @ vol - eye)))
    if r.n % 2:
        grading = max(grading, float(np.max(np.abs(vol - (-1) ** r.module_index * eye))))
    else:
        ev = np.linalg.eigvalsh(0.5 * (vol + vol.conj().T))
        if np.sum(ev > 0) != d // 2:
            grading = max(grading, 1.0)
    extra = {}
    if decomp is not None and decomp.grading is not None:
        pp, pm = decomp.grading
        proj = max(
            float(np.max(np.abs(pp @ pp - pp))),
            float(np.max(np.abs(pm @ pm - pm))),
            float(np.max(np.abs(pp @ pm))),
            float(np.max(np.abs(pp + pm - eye))),
        )
        grading = max(grading, proj, float(np.max(np.abs(vol @ pp - pp))), float(np.max(np.abs(vol @ pm + pm))))
        if decomp.case == 4:
            off = 0.0
            for g in gens:
                off = max(off, float(np.max(np.abs(pp @ g @ pp))), float(np.max(np.abs(pm @ g @ pm))))
            extra["block_offdiag"] = off
            F0 = irreducible_rep(decomp.m, 0)
            F1 = swap_module(F0)
            phi = decomp.swap_iso
            extra["swap_iso"] = max(
                float(np.max(np.abs(phi @ g0 + g1 @ phi))) for g0, g1 in zip(F0.generators, F1.generators)
            )
    if decomp is not None and decomp.modules:
        for mod in decomp.modules:
            grading = max(grading, float(np.max(np.abs(mod.volume - (-1) ** mod.module_index * eye))))
            sub = verify_clifford(mod, tol)
            rel = max(rel, sub["relation"])
            unit = max(unit, sub["unitarity"])
    report = {
        "n": r.n,
        "dim": d,
        "relation": rel,
        "unitarity": max(unit, skew),
        "grading": grading,
        **extra,
    }
    report["max_residual"] = max(v for k, v in report.items() if k not in ("n", "dim"))
    report["passed"] = report["max_residual"] <= tol
    return report


def trace_products(rep, max_k=None):
    """Largest |trace| over products of k distinct generators, 1 <= k < n."""
    worst = 0.0
    gens = rep.generators
    top = rep.n if max_k is None else min(max_k + 1, rep.n)
    for k in range(1, top):
        for idx in combinations(range(rep.n), k):
            prod = reduce(np.matmul, (gens[i] for i in idx))
            worst = max(worst, abs(np.trace(prod)))
    return worst
