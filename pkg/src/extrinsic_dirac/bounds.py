"""Extrinsic upper bounds for Dirac eigenvalues and the checks built on them.

Bounds are tagged by what they use:

``real-killing``          C = n^2 a^2 + n^2 W / (4 vol)          on lambda^2
``imaginary-killing``     C = n (|a| + H_inf / 2)                 on |lambda|
``imaginary-radius``      C = n (|a| + e^(|a| rad) / 2 sqrt(W/vol)) on |lambda|
``higher``                C_k = n^2 H_inf^2/4 + n^2 a^2 + lambda_k(Lap)

where W is the Willmore integral of |H|^2 and vol the volume of M.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, GeometryError, IncompleteWindowError
from .linalg import check_hermitian, hermitian_eigs

__all__ = [
    "SurfaceSummary",
    "BoundSpec",
    "CheckReport",
    "summary_from_geometry",
    "nu_mu",
    "bound_real",
    "bound_imag",
    "bound_imag_radius",
    "check_spectrum",
    "pairing_verify",
    "random_pairing_instance",
    "pairing_bound_hypersurface",
    "higher_bound",
    "comparison_bounds",
    "lower_bounds",
    "willmore_inequalities",
    "EQUALITY_RTOL",
]

EQUALITY_RTOL = 1e-6
LAMBDA_SQ = "lambda^2"
LAMBDA_ABS = "|lambda|"
_KINDS = ("euclidean", "sphere", "hyperbolic")


# ---------------------------------------------------------------- summary


@dataclass(frozen=True)
class SurfaceSummary:
    n: int
    m: int
    vol: float
    willmore: float
    H_inf: float
    ambient: str = "euclidean"
    rad: float | None = None
    S0: float | None = None
    genus: int | None = None
    kmax: float | None = None
    II_inf: float | None = None
    bounding: bool = True
    name: str = ""
    ambient_periodic: bool = False

    def __post_init__(self):
        if self.ambient not in _KINDS:
            raise ConfigError(f"unknown ambient kind {self.ambient!r}")
        if not self.vol > 0:
            raise GeometryError("volume must be positive")
        if self.willmore < 0:
            raise GeometryError("Willmore integral must be nonnegative")
        if self.H_inf**2 * self.vol < self.willmore * (1 - 1e-9) - 1e-12:
            raise GeometryError("sup |H|^2 vol must dominate the Willmore integral")

    @property
    def area(self):
        if self.n != 2:
            raise AttributeError("area is defined for surfaces")
        return self.vol

    def to_dict(self):
        return asdict(self)


def summary_from_geometry(imm, grid=None, radius=True):
    """Collect the extrinsic quantities of an immersion by quadrature."""
    from .geometry import build_grid, extrinsic_radius, integrate, volume

    grid = grid or build_grid(imm)
    smp = grid.sample
    vol = volume(imm, grid)
    will = integrate(imm, grid, smp.H_norm**2)
    curv = imm.ambient.curvature
    S0 = float(np.min(smp.scalar_curvature(curv))) if imm.n >= 2 else 0.0
    kmax = float(np.max(np.abs(smp.principal_curvatures(0)))) if imm.m == 1 else None
    rad = None
    if radius and not imm.ambient.periodic:
        rad = extrinsic_radius(imm, grid)
    return SurfaceSummary(
        n=imm.n, m=imm.m, vol=vol, willmore=will, H_inf=float(np.max(smp.H_norm)),
        ambient=imm.ambient.kind, rad=rad, S0=S0, genus=imm.genus if imm.n == 2 else None,
        kmax=kmax, II_inf=float(np.sqrt(np.max(smp.second_form_norm2()))), bounding=imm.bounding,
        name=imm.name, ambient_periodic=imm.ambient.periodic,
    )


# --------------------------------------------------------------- counting


def _check_pair(kind, alpha):
    alpha = complex(alpha)
    ok = (
        (kind == "euclidean" and alpha == 0)
        or (kind == "sphere" and alpha.imag == 0 and abs(alpha.real) == 0.5)
        or (kind == "hyperbolic" and alpha.real == 0 and abs(alpha.imag) == 0.5)
    )
    if not ok:
        raise ConfigError(f"unsupported (ambient, alpha) pair ({kind}, {alpha})")
    return alpha


def _kind(ambient):
    return getattr(ambient, "kind", ambient)


def nu_mu(ambient, n, m, alpha):
    """(nu, mu): Killing spinor count and the guaranteed number of small eigenvalues."""
    _check_pair(_kind(ambient), alpha)
    if n < 1 or m < 1:
        raise ConfigError("dimension and codimension must be positive")
    nu = 2 ** ((n + m) // 2)
    mu = (nu + 1) // 2 if (n % 2 and m % 2) else nu
    return nu, mu


# ----------------------------------------------------------------- bounds


@dataclass(frozen=True)
class BoundSpec:
    theorem: str
    ambient: str
    n: int
    m: int
    alpha: complex
    mu: int
    nu: int
    bound: float
    mode: str
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.mode not in (LAMBDA_SQ, LAMBDA_ABS):
            raise ValueError(f"unknown bound mode {self.mode!r}")
        if self.bound < 0:
            raise ValueError("bound must be nonnegative")
        if self.mu > self.nu:
            raise ValueError("mu cannot exceed nu")

    @property
    def threshold(self):
        """The bound expressed on |lambda|."""
        return math.sqrt(self.bound) if self.mode == LAMBDA_SQ else self.bound


def _spec(tag, summary, alpha, value, mode, **extra):
    nu, mu = nu_mu(summary.ambient, summary.n, summary.m, alpha)
    return BoundSpec(tag, summary.ambient, summary.n, summary.m, complex(alpha), mu, nu, float(value), mode, extra)


def bound_real(n, alpha, summary):
    """Killing bound for real alpha, on lambda^2."""
    if complex(alpha).imag != 0:
        raise ConfigError("bound_real needs real alpha")
    if not summary.vol > 0:
        raise GeometryError("volume must be positive")
    a = float(complex(alpha).real)
    C = n * n * a * a + n * n * summary.willmore / (4 * summary.vol)
    return _spec("real-killing", summary, a, C, LAMBDA_SQ)


def bound_imag(n, alpha, summary):
    """Killing bound for imaginary alpha using sup |H|, on |lambda|."""
    alpha = complex(alpha)
    if alpha.real != 0:
        raise ConfigError("bound_imag needs purely imaginary alpha")
    C = n * (abs(alpha) + summary.H_inf / 2)
    return _spec("imaginary-killing", summary, alpha, C, LAMBDA_ABS)


def bound_imag_radius(n, alpha, summary):
    """Variant of the imaginary bound with the L^2 norm of H and the extrinsic radius."""
    alpha = complex(alpha)
    if alpha.real != 0:
        raise ConfigError("bound_imag_radius needs purely imaginary alpha")
    if summary.rad is None:
        raise ConfigError("extrinsic radius is missing from the summary")
    a = abs(alpha)
    l2 = math.sqrt(summary.willmore / summary.vol)
    C = n * (a + 0.5 * math.exp(a * summary.rad) * l2)
    h3 = 0.5 * n * (1 + math.exp(summary.rad / 2) * l2)
    return _spec("imaginary-radius", summary, alpha, C, LAMBDA_ABS, h3_form=h3)


# ------------------------------------------------------------------ checks


@dataclass
class CheckReport:
    spec: BoundSpec
    spectrum: dict
    eigenvalues: list
    margins: list
    verdict: str
    tolerance: float
    note: str = ""

    def to_dict(self):
        s = self.spec
        return {
            "theorem": s.theorem,
            "ambient": s.ambient,
            "n": s.n,
            "m": s.m,
            "alpha": [s.alpha.real, s.alpha.imag],
            "mu": s.mu,
            "nu": s.nu,
            "bound": s.bound,
            "mode": s.mode,
            "eigenvalues": list(self.eigenvalues),
            "margins": list(self.margins),
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "spectrum_window": self.spectrum.get("window"),
            "note": self.note,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def csv_rows(self):
        d = self.to_dict()
        for i, (lam, mg) in enumerate(zip(self.eigenvalues, self.margins), start=1):
            yield [d["theorem"], d["ambient"], d["n"], d["m"], d["mu"], d["bound"], d["mode"], i, lam, mg,
                   d["verdict"], d["tolerance"]]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem", "ambient", "n", "m", "mu", "bound", "mode", "index", "lambda", "margin",
                    "verdict", "tolerance"])
        for row in self.csv_rows():
            w.writerow(row)
        return buf.getvalue()


def default_tolerance(spectrum):
    """Equality tolerance: 1e-6 for closed forms, the discretization accuracy otherwise."""
    return max(EQUALITY_RTOL, float(spectrum.meta.get("accuracy", 0.0)))


def check_spectrum(spectrum, spec, tol=None):
    """Check that at least mu eigenvalues (with multiplicity) obey the bound.

    Margins are C - lambda^2 (or C - |lambda|) for the first mu entries in
    |lambda| order. Equality is flagged when the mu-th margin is within
    tol * max(1, C) of zero.
    """
    tol = default_tolerance(spectrum) if tol is None else float(tol)
    scale = tol * max(1.0, spec.bound)
    ref = {"source": spectrum.source, "window": spectrum.window, "operator": spectrum.operator_kind}
    if spectrum.operator_kind != "dirac":
        raise ConfigError("bound checks need a Dirac spectrum")
    if spectrum.window < spec.threshold * (1 - 1e-12):
        return CheckReport(spec, ref, [], [], "inapplicable", tol,
                           f"spectrum window {spectrum.window:.6g} is below the bound threshold "
                           f"{spec.threshold:.6g}; completeness is not certified")
    vals = spectrum.values()[: spec.mu]
    if spec.mode == LAMBDA_SQ:
        margins = [spec.bound - v * v for v in vals]
    else:
        margins = [spec.bound - abs(v) for v in vals]
    if len(vals) < spec.mu:
        return CheckReport(spec, ref, [float(v) for v in vals], margins, "fail", tol,
                           f"only {len(vals)} eigenvalues inside the complete window")
    last = margins[-1]
    if last < -scale:
        verdict = "fail"
    elif abs(last) <= scale:
        verdict = "pass-with-equality"
    else:
        verdict = "pass"
    return CheckReport(spec, ref, [float(v) for v in vals], [float(x) for x in margins], verdict, tol)


# ---------------------------------------------------------------- pairing


def _orthonormal(basis):
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    q, r = np.linalg.qr(b)
    if np.min(np.abs(np.diag(r))) < 1e-12 * max(1.0, np.max(np.abs(r))):
        raise ValueError("subspace basis is rank deficient")
    return q


def _compressed_max(a, q):
    return float(np.max(np.linalg.eigvalsh(q.conj().T @ a @ q)))


def pairing_verify(A, H1, H2, C, tol=1e-9, extra_pairs=()):
    """Check the paired min-max hypotheses on (A, H1, H2, C) and then its conclusion.

    ``H1``, ``H2`` are column bases. Conclusion: (lambda_j + lambda_(2 nu - j + 1))/2
    <= C for j = 1..nu. ``extra_pairs`` lists further (i, k) index pairs whose
    averages are only reported.
    """
    a = np.asarray(A, dtype=np.complex128)
    check_hermitian(a)
    q1, q2 = _orthonormal(H1), _orthonormal(H2)
    nu = q1.shape[1]
    if q2.shape[1] != nu:
        raise ValueError("H1 and H2 must have the same dimension")
    if a.shape[0] < 2 * nu:
        raise ValueError("ambient space is too small for two orthogonal subspaces")
    lam = hermitian_eigs(a)
    scale = tol * max(1.0, abs(C))
    hyp = {
        "nonnegative": float(lam[0]) >= -scale,
        "orthogonality": float(np.max(np.abs(q1.conj().T @ q2))),
        "rayleigh_H1": _compressed_max(a, q1),
        "rayleigh_H2": _compressed_max(a, q2),
    }
    failures = []
    if not hyp["nonnegative"]:
        failures.append("A is not nonnegative")
    if hyp["orthogonality"] > tol:
        failures.append("H1 and H2 are not orthogonal")
    for key in ("rayleigh_H1", "rayleigh_H2"):
        if hyp[key] > C + scale:
            failures.append(f"{key} exceeds C")
    pairs = []
    for j in range(1, nu + 1):
        avg = 0.5 * (lam[j - 1] + lam[2 * nu - j])
        pairs.append({"j": j, "pair": (j, 2 * nu - j + 1), "average": float(avg), "margin": float(C - avg),
                      "holds": bool(avg <= C + scale), "equality": bool(abs(C - avg) <= scale)})
    extras = []
    for i, k in extra_pairs:
        avg = 0.5 * (lam[i - 1] + lam[k - 1])
        extras.append({"pair": (i, k), "average": float(avg), "margin": float(C - avg),
                       "holds": bool(avg <= C + scale), "covered_by_conclusion": False})
    violations = [p for p in pairs if not p["holds"]]
    return {
        "nu": nu,
        "C": float(C),
        "eigenvalues": [float(x) for x in lam],
        "hypotheses": hyp,
        "hypothesis_failures": failures,
        "hypotheses_hold": not failures,
        "pairs": pairs,
        "conclusion_violations": len(violations) if not failures else None,
        "unchecked_violations": len(violations) if failures else 0,
        "extra": extras,
    }


def random_pairing_instance(rng, dim=8, nu=2):
    """Random nonnegative Hermitian A with orthogonal nu-dimensional H1, H2 and a valid C."""
    if dim < 2 * nu:
        raise ValueError("dim must be at least 2 nu")
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a = z @ z.conj().T / dim
    u = np.linalg.qr(rng.normal(size=(dim, 2 * nu)) + 1j * rng.normal(size=(dim, 2 * nu)))[0]
    h1, h2 = u[:, :nu], u[:, nu:]
    C = max(_compressed_max(a, h1), _compressed_max(a, h2))
    return a, h1, h2, C


def pairing_bound_hypersurface(spectrum, C, mu, tol=None, bounding=True):
    """Paired estimate (lambda_j^2 + lambda_(2mu-j+1)^2)/2 <= C for a bounding hypersurface."""
    tol = default_tolerance(spectrum) if tol is None else float(tol)
    need = math.sqrt(2 * C)
    vals = spectrum.values()
    if len(vals) < 2 * mu and spectrum.window < need * (1 - 1e-12):
        raise IncompleteWindowError(
            f"window {spectrum.window:.6g} does not cover sqrt(2C) = {need:.6g}")
    if len(vals) < 2 * mu:
        # complete window beyond sqrt(2C) with too few eigenvalues: the pair sum exceeds C
        vals = np.concatenate([vals, np.full(2 * mu - len(vals), spectrum.window)])
    sq = vals[: 2 * mu] ** 2
    scale = tol * max(1.0, C)
    pairs = []
    for j in range(1, mu + 1):
        avg = 0.5 * (sq[j - 1] + sq[2 * mu - j])
        pairs.append({"j": j, "average": float(avg), "margin": float(C - avg), "holds": bool(avg <= C + scale),
                      "equality": bool(abs(C - avg) <= scale)})
    kernel = sum(m for lam, m in spectrum.entries if abs(lam) <= scale)
    ok = all(p["holds"] for p in pairs)
    if bounding:
        label = "pass" if ok else "fail"
    else:
        label = "hypothesis-violated demonstration"
    return {"C": float(C), "mu": mu, "pairs": pairs, "holds": ok, "bounding": bool(bounding),
            "kernel_multiplicity": int(kernel), "verdict": label, "tolerance": tol}


# ------------------------------------------------------------ higher bound


def higher_bound(n, alpha, summary, laplace, k, dirac=None, mu=None):
    """C_k from the test space of Laplace eigenfunctions times Killing spinors.

    Only k = 0 is asserted; for k >= 1 the comparison with the (k+1) mu-th
    Dirac eigenvalue is reported without a verdict.
    """
    lap = laplace.values()
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k >= len(lap):
        raise IncompleteWindowError(f"Laplace spectrum has only {len(lap)} eigenvalues; need index {k}")
    a2 = abs(complex(alpha)) ** 2
    Ck = n * n * summary.H_inf**2 / 4 + n * n * a2 + float(lap[k])
    row = {"k": k, "C_k": Ck, "lambda_k_laplace": float(lap[k]),
           "status": "asserted" if k == 0 else "reported-only"}
    if dirac is not None:
        if mu is None:
            mu = nu_mu(summary.ambient, summary.n, summary.m, alpha)[1]
        idx = (k + 1) * mu
        vals = dirac.values()
        row["index"] = idx
        if idx <= len(vals):
            lam2 = float(vals[idx - 1] ** 2)
            row["lambda_sq"] = lam2
            row["holds"] = lam2 <= Ck * (1 + 1e-12)
            row["exceedance"] = max(0.0, lam2 - Ck)
        else:
            row["lambda_sq"] = None
            row["holds"] = None
    return row


# ------------------------------------------------------- comparison tables

BAUM_FACTOR = {0: 1, 2: 3, 3: 3}


def _baum_factor(g):
    if g is None or g == 1 or g < 0:
        return None
    return BAUM_FACTOR.get(g, 2)


def _own_bound(summary):
    if summary.ambient == "euclidean":
        return bound_real(summary.n, 0, summary)
    if summary.ambient == "sphere":
        return bound_real(summary.n, 0.5, summary)
    return bound_imag(summary.n, 0.5j, summary)


def comparison_bounds(summary, spectrum=None, gaps=10):
    """Rows comparing our bound with the classical upper bounds.

    Every row carries ``value`` on lambda^2 (``None`` when unavailable).
    Bunke's row uses the pointwise Frobenius norm of the second
    fundamental form. For curves the scalar curvature is taken as 0.
    """
    n = summary.n
    rows = []
    own = _own_bound(summary)
    own_sq = own.bound if own.mode == LAMBDA_SQ else own.bound**2
    rows.append({"name": "extrinsic (ours)", "value": own_sq, "available": True, "note": own.theorem})
    flat = summary.ambient == "euclidean" and not summary.ambient_periodic
    c = _baum_factor(summary.genus) if n == 2 else None
    if flat and c is not None and summary.kmax is not None:
        rows.append({"name": "Baum", "value": (c * summary.kmax) ** 2, "available": True,
                     "abs_value": c * summary.kmax, "note": f"c(g)={c}, |lambda| <= c(g) max principal curvature"})
    else:
        rows.append({"name": "Baum", "value": None, "available": False,
                     "note": "needs a surface in R^3 with genus != 1"})
    if flat and summary.II_inf is not None:
        rows.append({"name": "Bunke", "value": 2 ** (n // 2) * summary.II_inf**2, "available": True,
                     "note": "Frobenius norm of II"})
    else:
        rows.append({"name": "Bunke", "value": None, "available": False, "note": "needs R^N and the II norm"})
    if flat:
        rows.append({"name": "Anghel (kernel case)", "value": n * summary.willmore / summary.vol,
                     "available": True, "note": "applies when 0 is an eigenvalue"})
    else:
        rows.append({"name": "Anghel (kernel case)", "value": None, "available": False, "note": "needs R^N"})
    S0 = summary.S0 if summary.S0 is not None else (0.0 if n == 1 else None)
    gap_rows = []
    if flat and spectrum is not None and S0 is not None:
        sq = spectrum.squares()
        if len(sq) < gaps + 1:
            raise IncompleteWindowError(f"need {gaps + 1} eigenvalues for the gap check, have {len(sq)}")
        for m in range(1, gaps + 1):
            gap = float(sq[m] - sq[m - 1])
            rhs = n * summary.H_inf**2 + 4.0 / (m * n) * float(np.sum(sq[:m])) - S0 / n
            gap_rows.append({"m": m, "gap": gap, "bound": rhs, "holds": gap <= rhs * (1 + 1e-12) + 1e-12})
    rows.append({"name": "Anghel (gaps)", "value": None, "available": bool(gap_rows),
                 "gaps": gap_rows, "note": "scalar curvature of a curve taken as 0" if n == 1 else ""})
    return rows


def lower_bounds(summary, upper=None):
    """Friedrich's and the genus-0 area lower bounds on lambda^2, with an optional sandwich."""
    out = {}
    n = summary.n
    if n >= 2 and summary.S0 is not None:
        out["Friedrich"] = {"value": n * summary.S0 / (4 * (n - 1)), "applicable": True}
    else:
        out["Friedrich"] = {"value": None, "applicable": False, "note": "needs n >= 2"}
    if n == 2 and summary.genus == 0:
        out["genus-0 area"] = {"value": 4 * math.pi / summary.vol, "applicable": True}
    else:
        out["genus-0 area"] = {"value": None, "applicable": False, "note": "needs a genus-0 surface"}
    if upper is not None:
        lows = [v["value"] for v in out.values() if v["applicable"]]
        out["sandwich"] = {"upper": float(upper), "lower": max(lows) if lows else None,
                           "consistent": (max(lows) <= upper * (1 + 1e-9)) if lows else None}
    return out


def willmore_inequalities(summary):
    """Willmore-type inequalities that apply to the summary, each with its margin."""
    if summary.n != 2:
        return []
    rows = []
    W, A, g = summary.willmore, summary.vol, summary.genus
    if summary.ambient == "euclidean" and g == 0:
        rows.append({"name": "R3 genus 0", "lhs": W, "rhs": 4 * math.pi, "margin": W - 4 * math.pi, "kind": "theorem"})
    if summary.ambient == "euclidean" and g == 1 and not summary.ambient_periodic:
        rows.append({"name": "torus monitor", "lhs": W, "rhs": 2 * math.pi**2, "margin": W - 2 * math.pi**2,
                     "kind": "conjecture"})
    if summary.ambient == "sphere" and g == 0:
        rows.append({"name": "S3 genus 0", "lhs": A + W, "rhs": 4 * math.pi, "margin": A + W - 4 * math.pi,
                     "kind": "theorem"})
    if summary.ambient == "hyperbolic" and g == 0:
        lhs = (1 + summary.H_inf) ** 2 * A
        rows.append({"name": "H3 genus 0", "lhs": lhs, "rhs": 4 * math.pi, "margin": lhs - 4 * math.pi,
                     "kind": "theorem"})
    for r in rows:
        r["holds"] = r["margin"] >= -1e-8
    return rows
