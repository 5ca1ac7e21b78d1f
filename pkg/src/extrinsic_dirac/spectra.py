"""Dirac and Laplace-Beltrami spectra of closed curves and surfaces.

Closed forms cover the model hypersurfaces. Plane curves are discretized by
the Fourier spectral method; rotationally symmetric surfaces are split into
Fourier modes around the axis and each mode is discretized on a staggered
grid along the profile.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import linalg as sla

from .clifford import irreducible_rep
from .errors import GeometryError, IncompleteWindowError
from .linalg import check_hermitian, hermitian_eigs

__all__ = [
    "Spectrum",
    "SpinStructureLabel",
    "DiscreteOperator",
    "model_dirac_spectrum",
    "model_laplace_spectrum",
    "induced_spin_structure",
    "curve_dirac",
    "revolution_dirac",
    "laplace_spectrum",
    "dirac_spectrum",
    "hermitian_eigs",
]

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"
DIRAC = "dirac"
LAPLACE = "laplace"
MERGE_RTOL = 1e-9

# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, complete up to ``window``.

    Dirac entries are ordered by |lambda| with the negative value first on
    ties; Laplace entries ascend.
    """

    entries: tuple
    operator_kind: str
    window: float
    source: str
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_values(cls, values, operator_kind, window, source, meta=None, rtol=MERGE_RTOL):
        """Cluster nearly equal values into multiplicities and clip to the window."""
        if not window > 0:
            raise ValueError("window must be positive")
        vals = np.sort(np.asarray(values, dtype=float).ravel())
        edge = window * (1 + 1e-12)
        vals = vals[np.abs(vals) <= edge] if operator_kind == DIRAC else vals[vals <= edge]
        entries = []
        for v in vals:
            if entries and abs(v - entries[-1][0]) <= rtol * max(1.0, abs(v)):
                lam, mult, tot = entries[-1]
                entries[-1] = (lam, mult + 1, tot + v)
            else:
                entries.append((v, 1, v))
        merged = [(tot / mult, mult) for _, mult, tot in entries]
        return cls(_sorted_entries(merged, operator_kind), operator_kind, float(window), source, dict(meta or {}))

    def __post_init__(self):
        if self.operator_kind not in (DIRAC, LAPLACE):
            raise ValueError(f"unknown operator kind {self.operator_kind!r}")
        ents = tuple((float(lam), int(m)) for lam, m in self.entries)
        if any(m < 1 for _, m in ents):
            raise ValueError("multiplicities must be positive")
        if self.operator_kind == LAPLACE and any(lam < -1e-9 for lam, _ in ents):
            raise ValueError("Laplace eigenvalues must be nonnegative")
        object.__setattr__(self, "entries", _sorted_entries(ents, self.operator_kind))

    def values(self):
        """Eigenvalues repeated by multiplicity, in entry order."""
        return np.array([lam for lam, m in self.entries for _ in range(m)], dtype=float)

    def squares(self):
        return self.values() ** 2

    def __len__(self):
        return sum(m for _, m in self.entries)

    def smallest_abs(self):
        return min((abs(lam) for lam, _ in self.entries), default=math.inf)

    def multiplicity(self, lam, tol=1e-6):
        return sum(m for v, m in self.entries if abs(v - lam) <= tol * max(1.0, abs(lam)))

    def nth(self, j):
        """The j-th eigenvalue (1-based) in the ordering, counted with multiplicity."""
        vals = self.values()
        if not 1 <= j <= len(vals):
            raise IncompleteWindowError(f"eigenvalue #{j} lies beyond the window {self.window}")
        return float(vals[j - 1])

    def scaled(self, c):
        """Spectrum of the immersion scaled by c > 0."""
        p = 1 if self.operator_kind == DIRAC else 2
        f = c ** (-p)
        return Spectrum(tuple((lam * f, m) for lam, m in self.entries), self.operator_kind,
                        self.window * f, self.source, dict(self.meta))

    def to_dict(self):
        return {
            "operator": self.operator_kind,
            "source": self.source,
            "window": self.window,
            "entries": [[lam, m] for lam, m in self.entries],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "lambda", "mult"])
        for i, (lam, m) in enumerate(self.entries):
            w.writerow([i, repr(lam), m])
        return buf.getvalue()


def _sorted_entries(entries, kind):
    # magnitudes equal to ~12 digits count as ties so roundoff cannot reorder +-lambda
    key = (lambda e: (float(f"{abs(e[0]):.11e}"), e[0])) if kind == DIRAC else (lambda e: e[0])
    return tuple(sorted(((float(a), int(b)) for a, b in entries), key=key))


@dataclass(frozen=True)
class SpinStructureLabel:
    """(Anti)periodicity flag for each periodic parameter direction.

    ``directions`` are the indices of those directions in the chart domain;
    ``rotation_numbers`` record the frame winding (an integer for curves in
    the plane, the parity 0/1 otherwise).
    """

    flags: tuple
    directions: tuple = ()
    rotation_numbers: tuple = ()

    def __post_init__(self):
        if any(f not in (PERIODIC, ANTIPERIODIC) for f in self.flags):
            raise ValueError(f"flags must be {PERIODIC!r} or {ANTIPERIODIC!r}")
        if self.directions and len(self.directions) != len(self.flags):
            raise ValueError("one flag per periodic direction")

    @property
    def offsets(self):
        """Half-integer shift (1 for antiperiodic, 0 for periodic) per direction."""
        return tuple(1 if f == ANTIPERIODIC else 0 for f in self.flags)

    def flag_for(self, direction):
        if direction not in self.directions:
            raise KeyError(direction)
        return self.flags[self.directions.index(direction)]


def _label(x, count):
    """Normalize a user-supplied label (string, tuple or SpinStructureLabel)."""
    if isinstance(x, SpinStructureLabel):
        flags = x.flags
    elif isinstance(x, str):
        flags = (x,) * count
    else:
        flags = tuple(x)
    if len(flags) != count:
        raise ValueError(f"expected {count} spin-structure flags, got {len(flags)}")
    return SpinStructureLabel(tuple(flags))


@dataclass(frozen=True)
class DiscreteOperator:
    """A Hermitian matrix produced by a discretization, with its grid data."""

    matrix: np.ndarray
    grid: dict
    mode: float | None = None

    def __post_init__(self):
        a = np.asarray(self.matrix)
        check_hermitian(a, tol=1e-12)
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def eigenvalues(self):
        return hermitian_eigs(self.matrix)


# ----------------------------------------------------------- closed forms


def _binom(a, b):
    return math.comb(a, b) if a >= b >= 0 else 0


def _dual_lattice(lattice):
    a = np.asarray(lattice, dtype=float)
    if a.shape != (2, 2) or abs(np.linalg.det(a)) < 1e-14:
        raise ValueError("lattice must be two independent vectors in the plane")
    return a, np.linalg.inv(a).T  # rows b_j with a_i . b_j = delta_ij


def _lattice_range(a, radius):
    """Coefficient bounds covering every dual-lattice vector of norm <= radius."""
    return [int(math.ceil(np.linalg.norm(ai) * radius)) + 1 for ai in a]


def model_dirac_spectrum(model, window, **params):
    """Closed-form Dirac spectrum of a model, complete for |lambda| <= window."""
    if not window or window <= 0 or not math.isfinite(window):
        raise ValueError("a finite positive window is required")
    vals = []
    if model == "circle":
        L = float(params.get("L", 2 * math.pi))
        delta = _label(params.get("label", ANTIPERIODIC), 1).offsets[0]
        kmax = int(math.ceil(window * L / (2 * math.pi))) + 1
        vals = [(2 * math.pi / L) * (k + delta / 2) for k in range(-kmax - 1, kmax + 1)]
    elif model in ("round-sphere", "geodesic-sphere-hyperbolic"):
        n = int(params.get("n", 2))
        if n < 1:
            raise ValueError("n must be positive")
        rho = float(params["rho"]) if model == "round-sphere" else math.sinh(float(params["r"]))
        if rho <= 0:
            raise ValueError("radius must be positive")
        if n == 1:
            return model_dirac_spectrum("circle", window, L=2 * math.pi * rho, label=ANTIPERIODIC)
        entries = []
        k = 0
        while (n / 2 + k) / rho <= window * (1 + 1e-12):
            mult = 2 ** (n // 2) * _binom(k + n - 1, k)
            lam = (n / 2 + k) / rho
            entries += [(-lam, mult), (lam, mult)]
            k += 1
        return Spectrum(tuple(entries), DIRAC, window, "closed-form", {"model": model, **params})
    elif model == "flat-torus":
        a, b = _dual_lattice(params.get("lattice", ((1.0, 0.0), (0.0, 1.0))))
        delta = np.array(_label(params.get("label", PERIODIC), 2).offsets) / 2
        k0, k1 = _lattice_range(a, window / (2 * math.pi))
        for i, j in product(range(-k0, k0 + 1), range(-k1, k1 + 1)):
            lam = 2 * math.pi * np.linalg.norm((i + delta[0]) * b[0] + (j + delta[1]) * b[1])
            vals += [lam, -lam]
    else:
        raise ValueError(f"unknown model {model!r}")
    return Spectrum.from_values(vals, DIRAC, window, "closed-form", {"model": model, **params})


def model_laplace_spectrum(model, window, **params):
    """Closed-form Laplace-Beltrami spectrum, complete for lambda <= window."""
    if not window or window <= 0 or not math.isfinite(window):
        raise ValueError("a finite positive window is required")
    entries = []
    if model == "circle":
        L = float(params.get("L", 2 * math.pi))
        k = 0
        while (2 * math.pi * k / L) ** 2 <= window * (1 + 1e-12):
            entries.append(((2 * math.pi * k / L) ** 2, 1 if k == 0 else 2))
            k += 1
    elif model in ("round-sphere", "geodesic-sphere-hyperbolic"):
        n = int(params.get("n", 2))
        rho = float(params["rho"]) if model == "round-sphere" else math.sinh(float(params["r"]))
        if n == 1:
            return model_laplace_spectrum("circle", window, L=2 * math.pi * rho)
        k = 0
        while k * (k + n - 1) / rho**2 <= window * (1 + 1e-12):
            mult = _binom(k + n, n) - _binom(k + n - 2, n)
            entries.append((k * (k + n - 1) / rho**2, mult))
            k += 1
    elif model == "flat-torus":
        a, b = _dual_lattice(params.get("lattice", ((1.0, 0.0), (0.0, 1.0))))
        k0, k1 = _lattice_range(a, math.sqrt(window) / (2 * math.pi))
        vals = [4 * math.pi**2 * float(np.sum((i * b[0] + j * b[1]) ** 2))
                for i, j in product(range(-k0, k0 + 1), range(-k1, k1 + 1))]
        return Spectrum.from_values(vals, LAPLACE, window, "closed-form", {"model": model, **params})
    else:
        raise ValueError(f"unknown model {model!r}")
    return Spectrum(tuple(entries), LAPLACE, window, "closed-form", {"model": model, **params})


# --------------------------------------------------------- spin structure

LOOP_SAMPLES = 360


def _tangent_frame(imm, u):
    """Ambient-orthonormal frame (tangents then normals) along the points u.

    Returns (P, K, K) matrices whose columns are the frame in ambient
    orthonormal coordinates (K = N, or N + 1 with the position appended for
    the sphere).
    """
    from .geometry import _orthonormalize, fundamental_forms

    amb = imm.ambient
    x, dx, _ = imm.chart(u)
    tan = _orthonormalize(dx, lambda a, b: amb.inner(x, a, b))
    nor = fundamental_forms(imm, u).normal
    if nor.shape[1] != 1 and nor.shape[1] != 0:
        raise GeometryError("frame holonomy is implemented for codimension one")
    # the normal from an SVD may flip sign between samples; make it continuous
    for p in range(1, len(nor)):
        if amb.inner(x[p], nor[p, 0], nor[p - 1, 0]) < 0:
            nor[p:, 0] *= -1
    cols = np.concatenate([tan, nor], axis=1)
    if amb.kind == "hyperbolic":
        cols = cols / x[:, -1][:, None, None]
    if amb.kind == "sphere":
        cols = np.concatenate([cols, x[:, None, :]], axis=1)
    frames = np.transpose(cols, (0, 2, 1))
    if np.linalg.det(frames[0]) < 0:
        frames[:, :, imm.n] *= -1
    return frames


def _loop_points(imm, direction, samples):
    base = []
    for iv in imm.domain:
        base.append(iv.lo + (0.37 if iv.periodic else 0.5) * iv.length)
    iv = imm.domain[direction]
    t = np.linspace(iv.lo, iv.hi, samples + 1)
    u = np.tile(base, (samples + 1, 1))
    u[:, direction] = t
    return u


def _series_log(rel, terms=12):
    """Matrix logarithm of a batch of near-identity matrices."""
    x = rel - np.eye(rel.shape[-1])
    if np.max(np.abs(x)) > 0.2:
        raise GeometryError("frame loop sampled too coarsely")
    out = np.zeros_like(x)
    power = np.broadcast_to(np.eye(rel.shape[-1]), x.shape).copy()
    for k in range(1, terms + 1):
        power = power @ x
        out += ((-1) ** (k + 1) / k) * power
    return out


def _series_exp(a, terms=14):
    """Matrix exponential of a batch of small matrices by Taylor series."""
    out = np.broadcast_to(np.eye(a.shape[-1], dtype=a.dtype), a.shape).copy()
    term = out.copy()
    for k in range(1, terms + 1):
        term = term @ a / k
        out += term
    return out


def _spin_holonomy(frames):
    """Lift the closed frame loop to Spin(K) and return the sign of the endpoint."""
    K = frames.shape[1]
    rep = irreducible_rep(K)
    gens = np.stack(rep.generators)
    d = rep.dim
    rel = np.einsum("pij,pkj->pik", frames[1:], frames[:-1])
    gen = _series_log(rel)
    gen = 0.5 * (gen - np.transpose(gen, (0, 2, 1)))
    steps = _series_exp(0.25 * np.einsum("pij,iab,jbc->pac", gen, gens, gens))
    spin = np.eye(d, dtype=np.complex128)
    for step in steps:
        spin = step @ spin
    close = frames[-1] @ frames[0].T
    if np.max(np.abs(close - np.eye(K))) > 1e-8:
        raise GeometryError("frame loop does not close")
    tr = np.trace(spin).real / d
    if abs(abs(tr) - 1) > 1e-6:
        raise GeometryError(f"frame holonomy is not +-1 (trace ratio {tr:.3e})")
    return 0 if tr > 0 else 1


def _planar_winding(imm, direction, samples):
    u = _loop_points(imm, direction, samples)
    _, dx, _ = imm.chart(u)
    v = dx[:, 0, :]
    ang = np.unwrap(np.arctan2(v[:, 1], v[:, 0]))
    w = (ang[-1] - ang[0]) / (2 * math.pi)
    if abs(w - round(w)) > 1e-6:
        raise GeometryError(f"non-integral rotation number {w:.9f}")
    return int(round(w))


def induced_spin_structure(imm, samples=LOOP_SAMPLES):
    """Spin structure induced from the ambient space, one flag per periodic direction.

    Each generating loop carries the adapted frame (orthonormalized chart
    tangents, then the normal); the loop is lifted through the spin double
    cover and the direction is antiperiodic exactly when the lift does not
    close, i.e. when the rotation number is odd.
    """
    dirs = tuple(i for i, iv in enumerate(imm.domain) if iv.periodic)
    flags, wins = [], []
    for d in dirs:
        u = _loop_points(imm, d, samples)
        parity = _spin_holonomy(_tangent_frame(imm, u))
        w = parity
        if imm.n == 1 and imm.ambient.kind == "euclidean" and imm.ambient.dim == 2:
            w = _planar_winding(imm, d, samples)
            if w % 2 != parity:
                raise GeometryError("winding number and spin lift disagree")
        flags.append(ANTIPERIODIC if parity else PERIODIC)
        wins.append(w)
    return SpinStructureLabel(tuple(flags), dirs, tuple(wins))


# ------------------------------------------------------------------ curves


def _metric_diag(imm, u):
    """Diagonal of the induced metric at points u, shape (P, n)."""
    x, dx, _ = imm.chart(u)
    g = np.einsum("pie,pie->pi", dx, dx)
    if imm.ambient.kind == "hyperbolic":
        g = g / x[:, -1, None] ** 2
    return g


def _fourier_derivative(N, period, shift):
    """Dense spectral d/du on N equispaced nodes; shift=1 for antiperiodic functions."""
    k = np.fft.fftfreq(N, d=1.0 / N)
    if shift:
        k = k + 0.5
    elif N % 2 == 0:
        k[N // 2] = 0.0
    kappa = 2 * math.pi / period * k
    u = np.arange(N) * period / N
    phase = np.exp(1j * math.pi * shift * u / period)
    eye = np.eye(N) * phase.conj()[None, :]
    d = np.fft.ifft(1j * kappa[:, None] * np.fft.fft(eye, axis=0), axis=0)
    return phase[:, None] * d


def curve_dirac(imm, N=512, label=None, window=None):
    """Spectrum of -i d/ds on a closed curve by the Fourier spectral method."""
    if imm.n != 1:
        raise GeometryError("curve_dirac needs a curve")
    if N < 16:
        raise ValueError("N must be at least 16")
    iv = imm.domain[0]
    if not iv.periodic:
        raise GeometryError("curve is not closed")
    ends = imm.chart(np.array([[iv.lo], [iv.hi]]))[0]
    if np.max(np.abs(ends[0] - ends[1])) > 1e-9:
        raise GeometryError("curve is not closed")
    lab = induced_spin_structure(imm) if label is None else _label(label, 1)
    u = iv.lo + np.arange(N)[:, None] * iv.length / N
    speed = np.sqrt(_metric_diag(imm, u)[:, 0])
    if np.min(speed) <= 1e-12 * max(1.0, np.max(speed)):
        raise GeometryError("degenerate parametrization (vanishing speed)")
    D = _fourier_derivative(N, iv.length, lab.offsets[0])
    s = 1.0 / np.sqrt(speed)
    mat = -1j * (s[:, None] * D * s[None, :])
    mat = 0.5 * (mat + mat.conj().T)
    op = DiscreteOperator(mat, {"N": N, "period": iv.length})
    length = float(np.sum(speed) * iv.length / N)
    if window is None:
        window = 2 * math.pi / length * N / 8
    vals = op.eigenvalues()
    return Spectrum.from_values(vals, DIRAC, window, f"discretized(N={N})",
                                {"N": N, "label": lab.flags, "length": length})


# ----------------------------------------------------------- revolution

BETA_SAMPLES = 4001


@dataclass(frozen=True)
class _Profile:
    """Rotational metric w(s)^2 ds^2 + R(s)^2 dth^2 sampled for discretization."""

    lo: float
    hi: float
    periodic: bool
    w: callable
    R: callable
    r_max: float
    beta: float  # max |dR/dt| along arclength t


def _rotational_profile(imm):
    if imm.n != 2 or not imm.meta.get("rotational"):
        raise GeometryError("expected a rotationally symmetric surface")
    iv = imm.domain[0]

    def diag(s):
        u = np.stack([np.asarray(s, dtype=float), np.zeros(np.size(s))], -1)
        g = _metric_diag(imm, u)
        return np.sqrt(g[:, 0]), np.sqrt(g[:, 1])

    s = np.linspace(iv.lo, iv.hi, BETA_SAMPLES)
    w, R = diag(s)
    if np.min(w) <= 0:
        raise GeometryError("degenerate profile parametrization")
    interior = R[1:-1] if not iv.periodic else R
    if np.min(interior) <= 0:
        raise GeometryError("profile radius must be positive in the interior")
    dR = np.gradient(R, s) / w
    beta = float(np.max(np.abs(dR))) * 1.01 + 1e-9
    return _Profile(iv.lo, iv.hi, iv.periodic, lambda t: diag(t)[0], lambda t: diag(t)[1],
                    float(np.max(R)) * (1 + 1e-9), beta)


def _mode_floor(nu, prof):
    """Certified lower bound on |lambda| for the Fourier mode with offset nu."""
    q = nu * nu - abs(nu) * prof.beta
    return math.sqrt(q) / prof.r_max if q > 0 else 0.0


def _needed_modes(prof, window, delta, mode_max):
    """Largest mode index k (|nu| = k + delta/2) needed for completeness up to window."""
    k = 0
    while _mode_floor(k + 1 + delta / 2, prof) <= window:
        k += 1
        if k > 100000:
            raise IncompleteWindowError("mode count diverges for this window")
    if mode_max is not None and mode_max < k:
        raise IncompleteWindowError(
            f"mode_max={mode_max} too small: modes up to |k|={k} may reach the window {window}")
    return k if mode_max is None else mode_max


def _staggered_dirac_block(prof, nu, N, wrap_sign):
    """B = W2^(1/2) A W1^(-1/2) for A = -(1/w) d/ds - nu/R on a periodic staggered grid.

    The first component sits on nodes, the second on half nodes; ``wrap_sign``
    is -1 when the profile direction is antiperiodic.
    """
    h = (prof.hi - prof.lo) / N
    nodes = prof.lo + h * np.arange(N)
    half = nodes + 0.5 * h
    w1 = prof.w(nodes)
    w2, R2 = prof.w(half), prof.R(half)
    diff = 1.0 / (w2 * h)
    pot = 0.5 * nu / R2
    A = np.diag(diff - pot)
    right = -diff - pot
    A[np.arange(N - 1), np.arange(1, N)] = right[:-1]
    A[N - 1, 0] = wrap_sign * right[-1]
    return np.sqrt(w2 * h)[:, None] * A / np.sqrt(w1 * h)[None, :]


def _block_squares(B, cap):
    """Eigenvalues of B^T B not exceeding cap."""
    ev = np.linalg.eigvalsh(B.T @ B)
    return ev[ev <= cap]


_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)
_FLUX_X, _FLUX_W = np.polynomial.legendre.leggauss(8)


def _gauge_potential(prof):
    """Psi(s) with Psi' = w/R, normalized to vanish mid-profile.

    Psi = log tan(pi x/2) + rest, x the relative position in the profile
    interval; the logarithm carries both pole singularities and ``rest``
    is a regular integral evaluated by Gauss-Legendre from the midpoint.
    """
    lo, hi = prof.lo, prof.hi
    L = hi - lo
    mid = 0.5 * (lo + hi)

    def singular_part(s):
        return (math.pi / L) / np.sin(math.pi * (s - lo) / L)

    def psi(s):
        s = np.asarray(s, dtype=float)
        half = 0.5 * (s - mid)
        pts = mid + half[:, None] * (1 + _GL_X[None, :])
        flat = pts.ravel()
        g = prof.w(flat) / prof.R(flat) - singular_part(flat)
        rest = np.sum(g.reshape(pts.shape) * _GL_W[None, :], axis=1) * half
        return np.log(np.tan(0.5 * math.pi * (s - lo) / L)) + rest

    return psi


def _logsumexp(a, axis):
    m = np.max(a, axis=axis, keepdims=True)
    return np.squeeze(m, axis) + np.log(np.sum(np.exp(a - m), axis=axis))


@dataclass(frozen=True)
class _PoleGrid:
    """Quantities of the gauge-transformed mode problem independent of nu."""

    h: float
    log_w_c: np.ndarray  # log w at cell centers
    psi_c: np.ndarray  # Psi at cell centers
    flux_log_w: np.ndarray  # (N + 1, q) log(w * quadrature weight) between centers / poles
    flux_psi: np.ndarray  # (N + 1, q) Psi at those quadrature points


def _pole_grid(prof, N):
    h = (prof.hi - prof.lo) / N
    psi = _gauge_potential(prof)
    centers = prof.lo + h * (np.arange(N) + 0.5)
    # face j lies between center j-1 and center j; faces 0 and N span pole to center
    a = np.concatenate([[prof.lo], centers])
    b = np.concatenate([centers, [prof.hi]])
    half = 0.5 * (b - a)
    pts = 0.5 * (a + b)[:, None] + half[:, None] * _FLUX_X[None, :]
    flat = pts.ravel()
    lw = np.log(prof.w(flat) * np.repeat(half, len(_FLUX_X)) * np.tile(_FLUX_W, N + 1))
    return _PoleGrid(h, np.log(prof.w(centers)), psi(centers),
                     lw.reshape(pts.shape), psi(flat).reshape(pts.shape))


def _gauge_dirac_block(grid, nu):
    """Tridiagonal (d, e) whose eigenvalues are the squared |lambda| of mode nu.

    With f = exp(nu Psi) chi, the component chi solves a Sturm-Liouville
    problem -(p f')' = lambda^2 q f with p = exp(-2 nu Psi)/w and
    q = w exp(-2 nu Psi). Fluxes between cell centers use the exact
    conductance 1/int(1/p); at a pole the conductance is either finite
    (the pole value of f is forced to zero) or zero (f is left free),
    which selects the regular solution without a separate closure.
    """
    N = len(grid.psi_c)
    log_m = grid.log_w_c - 2 * nu * grid.psi_c + math.log(grid.h)
    log_g = -_logsumexp(grid.flux_log_w + 2 * nu * grid.flux_psi, axis=1)
    # the pole integral of exp(2 nu Psi) diverges when the exponent is <= -1
    if nu <= -0.5:
        log_g[0] = -np.inf
    if nu >= 0.5:
        log_g[-1] = -np.inf
    g_over_m_left = np.exp(log_g[:-1] - log_m)
    g_over_m_right = np.exp(log_g[1:] - log_m)
    d = g_over_m_left + g_over_m_right
    e = -np.exp(log_g[1:-1] - 0.5 * (log_m[:-1] + log_m[1:]))
    return d, e


def revolution_dirac(imm, N=400, mode_max=None, label=None, window=4.0):
    """Dirac spectrum of a rotationally symmetric surface, mode by mode.

    With the half-density substitution chi = R^(1/2) psi each Fourier mode
    exp(i nu th) reduces to the pair (A, A*) with A = -(1/w) d/ds - nu/R,
    and the eigenvalues are +-sqrt of the spectrum of A*A. Sphere-like
    profiles use the gauge-transformed Sturm-Liouville form of A*A;
    torus-like profiles use a staggered grid with (anti)periodic wrap.

    The result is complete for |lambda| <= window: every Fourier mode left
    out has |lambda| >= sqrt(nu^2 - |nu| beta) / max R with beta bounding
    |dR/dt|, and that floor exceeds the window.
    """
    prof = _rotational_profile(imm)
    lab = induced_spin_structure(imm) if label is None else _label(label, 2 if prof.periodic else 1)
    if prof.periodic:
        s_flag, th_flag = lab.flags[0], lab.flags[-1]
    else:
        s_flag, th_flag = None, lab.flags[-1]
    delta = 1 if th_flag == ANTIPERIODIC else 0
    kmax = _needed_modes(prof, window, delta, mode_max)
    wrap = -1.0 if s_flag == ANTIPERIODIC else 1.0
    cap = (window * (1 + 1e-9)) ** 2
    vals = []
    grid = None if prof.periodic else _pole_grid(prof, N)
    for k in range(-kmax - delta, kmax + 1):
        nu = k + delta / 2
        if prof.periodic:
            sq = _block_squares(_staggered_dirac_block(prof, nu, N, wrap), cap)
        else:
            d, e = _gauge_dirac_block(grid, nu)
            sq = sla.eigh_tridiagonal(d, e, eigvals_only=True, select="v", select_range=(-1.0, cap))
        sig = np.sqrt(np.clip(sq, 0.0, None))
        vals += list(sig) + list(-sig)
    return Spectrum.from_values(vals, DIRAC, window, f"discretized(N={N}, modes={kmax})",
                                {"N": N, "modes": kmax, "label": lab.flags, "beta": prof.beta,
                                 "r_max": prof.r_max, "accuracy": _accuracy(N)}, rtol=_merge_rtol(N))


def _merge_rtol(N):
    """Values from different modes within the O(h^2) discretization error count as one."""
    return max(MERGE_RTOL, 4.0 / N**2)


def _accuracy(N):
    """Relative accuracy claimed for second-order mode solvers (1.6e-4 at N = 400)."""
    return 25.0 / N**2


def _fv_laplace_block(prof, k, N):
    """Symmetrized finite-volume matrix of the mode-k Laplacian, cell centered."""
    h = (prof.hi - prof.lo) / N
    centers = prof.lo + h * (np.arange(N) + 0.5)
    faces = prof.lo + h * np.arange(N + 1)
    wc, Rc = prof.w(centers), prof.R(centers)
    cf = prof.R(faces) / prof.w(faces)
    if not prof.periodic:
        cf[0] = cf[-1] = 0.0
    mass = wc * Rc * h
    diag = (cf[:-1] + cf[1:]) / h + k * k * wc * h / Rc
    off = -cf[1:-1] / h
    scale = 1.0 / np.sqrt(mass)
    if not prof.periodic:
        return diag * scale**2, off * scale[:-1] * scale[1:], None
    K = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    K[0, -1] += -cf[0] / h
    K[-1, 0] += -cf[0] / h
    return None, None, scale[:, None] * K * scale[None, :]


def _laplace_revolution(imm, window, N):
    prof = _rotational_profile(imm)
    kmax = 0
    while ((kmax + 1) / prof.r_max) ** 2 <= window:
        kmax += 1
    vals = []
    for k in range(-kmax, kmax + 1):
        d, e, full = _fv_laplace_block(prof, k, N)
        if full is None:
            ev = sla.eigh_tridiagonal(d, e, eigvals_only=True, select="v",
                                      select_range=(-1.0, window * (1 + 1e-9)))
        else:
            ev = np.linalg.eigvalsh(full)
        vals += list(np.clip(ev, 0.0, None))
    return Spectrum.from_values(vals, LAPLACE, window, f"discretized(N={N}, modes={kmax})",
                                {"N": N, "modes": kmax, "accuracy": _accuracy(N)}, rtol=_merge_rtol(N))


# ---------------------------------------------------------------- dispatch


def _curve_length(imm, N=2048):
    iv = imm.domain[0]
    u = iv.lo + np.arange(N)[:, None] * iv.length / N
    return float(np.sum(np.sqrt(_metric_diag(imm, u)[:, 0])) * iv.length / N)


def _closed_model(imm):
    """(model, params) when the intrinsic geometry of imm is a closed-form model."""
    p = imm.params
    name = imm.name
    if name == "circle" or (name == "sphere" and p.get("n") == 1):
        return "circle", {"L": 2 * math.pi * p.get("r", p.get("rho", 1.0)) * p.get("scale", 1.0)}
    if name == "sphere":
        return "round-sphere", {"n": 2, "rho": p["rho"] * p.get("scale", 1.0)}
    if name in ("small-sphere-in-sphere", "equatorial-sphere"):
        rho = math.sin(p["a"])
        if p["n"] == 1:
            return "circle", {"L": 2 * math.pi * rho}
        return "round-sphere", {"n": p["n"], "rho": rho}
    if name == "geodesic-sphere-hyperbolic":
        return "round-sphere", {"n": p["n"], "rho": math.sinh(p["r"])}
    if name in ("flat-subtorus", "clifford-torus"):
        return "flat-torus", {"lattice": imm.meta["lattice"]}
    return None, None


def dirac_spectrum(imm, window, N=None, mode_max=None, label=None):
    """Dirac spectrum of a catalog immersion with its induced spin structure."""
    model, params = _closed_model(imm)
    if model is not None:
        if model == "circle":
            params["label"] = label or induced_spin_structure(imm)
        elif model == "flat-torus":
            params["label"] = label or induced_spin_structure(imm)
        return model_dirac_spectrum(model, window, **params)
    if imm.n == 1:
        return curve_dirac(imm, N or 512, label=label, window=window)
    return revolution_dirac(imm, N or 400, mode_max=mode_max, label=label, window=window)


def laplace_spectrum(target, window, N=400, **params):
    """Laplace-Beltrami spectrum of a named model or of a catalog immersion."""
    if isinstance(target, str):
        return model_laplace_spectrum(target, window, **params)
    imm = target
    model, mparams = _closed_model(imm)
    if model is not None:
        return model_laplace_spectrum(model, window, **mparams)
    if imm.n == 1:
        return model_laplace_spectrum("circle", window, L=_curve_length(imm))
    return _laplace_revolution(imm, window, N)


