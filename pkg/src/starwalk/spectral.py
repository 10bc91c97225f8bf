"""
Spectral analysis of the reduced two-step matrices.

Eigenvalues are computed two independent ways. The generic route calls
LAPACK through :func:`numpy.linalg.eig`. The closed-form route builds the
characteristic polynomial by Faddeev-LeVerrier, divides out the root at -1
and solves the remaining palindromic quartic as two quadratics through the
substitution ``z = lam + 1/lam``. :func:`exact_spectrum` runs both and
records how far apart they land.

Asymptotic quantities (the two frequencies ``gamma_plus``/``gamma_minus``,
leading-order eigenvector components and their normalizations) are closed
formulas in ``m`` valid to lowest order in ``1/N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "CharPoly",
    "SpectralReport",
    "AsymptoticEigenvector",
    "PPlus",
    "char_poly",
    "faddeev_leverrier",
    "closed_form_eigenvalues",
    "gamma_pm",
    "asymptotic_eigenvectors",
    "exact_spectrum",
    "p_plus",
    "p_plus_asymptotic",
]


@dataclass(frozen=True)
class CharPoly:
    """Monic quintic ``lam^5 + ... + 1``, coefficients highest power first."""

    m: int
    t: float
    coefficients: np.ndarray = field(compare=False)

    def __call__(self, lam):
        return np.polyval(self.coefficients, lam)

    def roots(self):
        return np.roots(self.coefficients)


def char_poly(m, t):
    """Characteristic polynomial of the three-star two-step matrix.

    >>> char_poly(2, 0.2).coefficients.round(12).tolist()
    [1.0, -2.0, 1.16, 1.16, -2.0, 1.0]
    """
    c4 = 3 - (3 * m - 1) * t
    c3 = 2 - (3 * m - 1) * t + 4 * (m - 1) * t**2
    return CharPoly(m, t, np.array([1.0, -c4, c3, c3, -c4, 1.0]))


def faddeev_leverrier(A):
    """Characteristic polynomial ``det(lam I - A)``, highest power first."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * eye
        coeffs.append(-np.trace(A @ Mk) / k)
    return np.array(coeffs)


def _quadratic(b, c):
    """Both roots of ``x^2 + b x + c``."""
    d = np.sqrt(complex(b * b - 4 * c))
    return [(-b + d) / 2, (-b - d) / 2]


def closed_form_eigenvalues(A):
    """Eigenvalues of a 2x2 or 5x5 reduced matrix without a general eigensolver."""
    A = np.asarray(A, dtype=complex)
    k = A.shape[0]
    coeffs = faddeev_leverrier(A)
    if k == 2:
        return np.array(_quadratic(coeffs[1], coeffs[2]))
    if k != 5:
        raise ValueError(f"closed form only for 2x2 and 5x5 matrices, got {k}x{k}")
    # synthetic division by (lam + 1)
    q = [coeffs[0]]
    for c in coeffs[1:-1]:
        q.append(c - q[-1])
    _, a, b, _, _ = q
    # lam^4 + a lam^3 + b lam^2 + a lam + 1 = lam^2 (z^2 + a z + b - 2)
    roots = [-1.0 + 0j]
    for z in _quadratic(a, b - 2):
        roots.extend(_quadratic(-z, 1.0))
    return np.array(roots)


def gamma_pm(m):
    """The two frequencies ``(gamma_plus, gamma_minus)`` for sharing parameter ``m``."""
    if m < 2:
        raise InvalidParameterError(f"m must be >= 2, got {m}")
    a = 3 * m - 1
    d = np.sqrt(a * a - 16 * (m - 1))
    return a + d, a - d


@dataclass(frozen=True)
class AsymptoticEigenvector:
    label: str
    x: np.ndarray = field(compare=False)
    w: float

    @property
    def normalized(self):
        return self.w * self.x


def _components(gamma, m, sign):
    sg = np.sqrt(gamma)
    x3 = sign * 1j * (gamma - 4) / (2 * np.sqrt(gamma * (m - 1)))
    return np.array(
        [1.0, sign * 2j / sg, x3, -x3, -np.sqrt(2) / gamma * (gamma - 4)],
        dtype=complex,
    )


def _w(gamma, m):
    w2 = (2 * (3 * m - 1) * gamma - 16 * (m - 1)) / (
        4 * (9 * m - 11) * gamma - 32 * (3 * m - 5)
    )
    return np.sqrt(w2)


def asymptotic_eigenvectors(m):
    """Leading-order eigenvectors ``u_jk`` keyed ``"++"``, ``"+-"``, ``"-+"``, ``"--"``.

    The first sign picks the frequency branch, the second the sign of the
    eigenphase. Components are unnormalized with ``x[0] == 1``; ``w`` scales
    them to unit length.
    """
    if m < 2:
        raise InvalidParameterError("components divide by sqrt(m - 1); need m >= 2")
    gp, gm = gamma_pm(m)
    out = {}
    for branch, gamma in (("+", gp), ("-", gm)):
        for phase, sign in (("+", 1), ("-", -1)):
            label = branch + phase
            out[label] = AsymptoticEigenvector(
                label, _components(gamma, m, sign), _w(gamma, m)
            )
    return out


def p_plus_asymptotic(m):
    """Weight of the initial state on the ``gamma_plus`` pair, lowest order in 1/N."""
    gp, _ = gamma_pm(m)
    amp = np.sqrt(2 / 3) + np.sqrt(1 / 3) * np.sqrt(2) / gp * (gp - 4)
    return float(2 * (_w(gp, m) * amp) ** 2)


@dataclass
class SpectralReport:
    """Exact eigenpairs of a reduced matrix next to their asymptotic forms.

    Eigenvalues are keyed by branch label: ``"-1"``, ``"++"``, ``"+-"``,
    ``"-+"``, ``"--"`` for the 5x5 three-star matrix and ``"+"``, ``"-"`` for
    the 2x2 two-star block.
    """

    N: int
    m: int
    t: float
    eigenvalues: dict
    eigenvectors: dict
    asymptotic: dict
    phase_errors: dict
    closed_form_gap: float
    gamma_plus: float | None = None
    gamma_minus: float | None = None
    w_plus: float | None = None
    w_minus: float | None = None
    components: dict | None = None
    p_plus: float | None = None
    p_plus_asymptotic: float | None = None

    def to_dict(self):
        def c(z):
            return [float(np.real(z)), float(np.imag(z))]

        out = {
            "N": self.N,
            "m": self.m,
            "t": self.t,
            "closed_form_gap": self.closed_form_gap,
            "eigenvalues": {
                k: {
                    "exact": c(v),
                    "exact_phase": float(np.angle(v)),
                    "asymptotic": c(self.asymptotic[k]),
                    "asymptotic_phase": float(np.angle(self.asymptotic[k])),
                    "phase_error": self.phase_errors[k],
                }
                for k, v in self.eigenvalues.items()
            },
            "eigenvectors": {
                k: [c(z) for z in v] for k, v in self.eigenvectors.items()
            },
        }
        for name in ("gamma_plus", "gamma_minus", "w_plus", "w_minus",
                     "p_plus", "p_plus_asymptotic"):
            val = getattr(self, name)
            if val is not None:
                out[name] = float(val)
        if self.components is not None:
            out["asymptotic_components"] = {
                k: [c(z) for z in v.x] for k, v in self.components.items()
            }
        return out


def _label_spectrum(vals):
    """Assign branch labels to eigenvalues by their phases."""
    phases = np.angle(vals)
    if len(vals) == 2:
        i_pos = int(np.argmax(phases))
        return {"+": i_pos, "-": 1 - i_pos}
    i_neg1 = int(np.argmin(np.abs(vals + 1)))
    rest = [i for i in range(len(vals)) if i != i_neg1]
    rest.sort(key=lambda i: phases[i])
    return {"-1": i_neg1, "+-": rest[0], "--": rest[1], "-+": rest[2], "++": rest[3]}


def _align(v):
    """Unit vector rotated so its first component is real and positive."""
    v = v / np.linalg.norm(v)
    if abs(v[0]) > 0:
        v = v * np.exp(-1j * np.angle(v[0]))
    return v


def exact_spectrum(model):
    """Eigen-decomposition of ``model.matrix`` with asymptotic comparison.

    Accepts the 2x2 two-star block ``{psi2, psi3}`` or the 5x5 three-star
    matrix.
    """
    A = np.asarray(model.matrix)
    k = A.shape[0]
    if k not in (2, 5):
        raise ValueError("exact_spectrum needs a 2x2 or 5x5 reduced matrix")
    vals, vecs = np.linalg.eig(A)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("eigensolver returned non-finite values")

    closed = closed_form_eigenvalues(A)
    gap = max(float(np.min(np.abs(closed - v))) for v in vals)
    gap = max(gap, max(float(np.min(np.abs(vals - c))) for c in closed))

    labels = _label_spectrum(vals)
    eigenvalues = {lab: complex(vals[i]) for lab, i in labels.items()}
    eigenvectors = {lab: _align(vecs[:, i]) for lab, i in labels.items()}

    N, m, t = model.N, model.m, model.t
    report = dict(N=N, m=m, t=t, eigenvalues=eigenvalues,
                  eigenvectors=eigenvectors, closed_form_gap=gap)
    if k == 2:
        gamma = t * np.sqrt(3 * (N - 3))
        asym = {"+": np.exp(1j * gamma), "-": np.exp(-1j * gamma)}
    else:
        gp, gm = gamma_pm(m)
        tp, tm = np.sqrt(gp * t / 2), np.sqrt(gm * t / 2)
        asym = {
            "-1": -1.0 + 0j,
            "++": np.exp(1j * tp),
            "+-": np.exp(-1j * tp),
            "-+": np.exp(1j * tm),
            "--": np.exp(-1j * tm),
        }
        comps = asymptotic_eigenvectors(m)
        report.update(
            gamma_plus=gp,
            gamma_minus=gm,
            w_plus=comps["++"].w,
            w_minus=comps["-+"].w,
            components=comps,
            p_plus=_p_plus_from(model, vecs, labels),
            p_plus_asymptotic=p_plus_asymptotic(m),
        )
    phase_errors = {
        lab: float(abs(np.angle(eigenvalues[lab] / asym[lab]))) for lab in asym
    }
    return SpectralReport(asymptotic=asym, phase_errors=phase_errors, **report)


def _p_plus_from(model, vecs, labels):
    from .graph import build_three_star
    from .reduced import project
    from .walk import initial_state_three_star

    graph = build_three_star(model.N, model.m)
    coords, _ = project(model.basis, initial_state_three_star(graph))
    # M is unitary with a simple spectrum, so its eigenvectors are orthonormal
    return float(sum(
        abs(np.vdot(vecs[:, labels[lab]], coords)) ** 2 for lab in ("++", "+-")
    ))


@dataclass(frozen=True)
class PPlus:
    m: int
    N: int
    numeric: float
    asymptotic: float


def p_plus(m, N=None):
    """Weight of the three-star initial state on the ``gamma_plus`` eigenvector pair.

    ``numeric`` is the overlap with exact eigenvectors of the derived matrix
    at ``N`` prongs (default ``max(4000, 40 m)``); ``asymptotic`` is the
    lowest-order closed form.
    """
    from .graph import build_three_star
    from .reduced import reduced_model

    if N is None:
        N = max(4000, 40 * m)
    model = reduced_model(build_three_star(N, m))
    report = exact_spectrum(model)
    return PPlus(m=m, N=N, numeric=report.p_plus, asymptotic=report.p_plus_asymptotic)
