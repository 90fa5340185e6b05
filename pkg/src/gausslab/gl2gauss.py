"""Conjugacy data of GL2(F_q), its cuspidal characters, and matrix Gauss sums.

Conjugacy classes are parametrized by the tower F_q inside F_{q^2}:
central and non-semisimple classes by a base unit, split classes by an
unordered pair of distinct base units, elliptic classes by a non-base
element up to the Galois flip x -> x^q.  The cuspidal character attached to
a primitive index j takes the standard values

    central a          (q-1) chi_j(a)
    non-semisimple a   -chi_j(a)
    split {a,b}        0
    elliptic x         -(chi_j(x) + chi_j(x^q))

and is validated here by three independent invariants: the class equation,
the character norm, and the reduction of its matrix Gauss sum to the torus
Gauss sum.  The matrix Gauss sum itself is recovered from traces alone: the
full matrix sum is scalar for an irreducible character, so the scalar is
the trace-weighted class sum divided by the dimension q-1.

The measured reduction is g(rho_j) = -q * g(chi_j): the alternating sign
attached to the anisotropic torus survives in the scalar.  ``verify_kondo``
checks the signed identity and the magnitude |g(rho)| = q^2, and reports
the residual of the unsigned variant alongside.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chars import Family, enumerate_family, is_primitive, mult_char
from .expsum import gauss_sum_direct
from .ffield import ZERO, GuardError, SubfieldView

__all__ = [
    "ClassKind",
    "ConjClassGL2",
    "CuspidalGL2Char",
    "KondoRow",
    "KondoReport",
    "conj_classes",
    "cuspidal_char",
    "matrix_gauss_sum",
    "verify_kondo",
    "group_order",
]

CLASS_GUARD = 1 << 11  # bound on q; class data is quadratic in q


class ClassKind(enum.Enum):
    CENTRAL = "central"
    NONSEMISIMPLE = "non-semisimple"
    SPLIT = "split"
    ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class ConjClassGL2:
    """One conjugacy class: kind, parameters, size, and matrix trace.

    ``param`` holds base-unit positions t (so the unit is g^{s t}) for the
    central, non-semisimple and split kinds, and the smaller Galois
    representative log for the elliptic kind.  ``trace_log`` is the log of
    the matrix trace in the ambient field, ZERO when the trace vanishes.
    """

    kind: ClassKind
    param: tuple[int, ...]
    size: int
    trace_log: int


def group_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


def conj_classes(view: SubfieldView) -> list[ConjClassGL2]:
    """All conjugacy classes of GL2(F_q), in canonical order.

    Ordering: central, non-semisimple, split, elliptic; within a kind, by
    the parameter tuple.
    """
    if view.d != 2:
        raise ValueError("GL2 class data requires a quadratic tower")
    q = view.base_size
    if q > CLASS_GUARD:
        raise GuardError(f"q = {q} exceeds class guard {CLASS_GUARD}")
    tbl = view.parent
    s = view.stride
    M = tbl.order

    def double(a: int) -> int:
        return tbl.log_of(tbl.add_codes(tbl.code_of(a), tbl.code_of(a)))

    out: list[ConjClassGL2] = []
    for t in range(q - 1):
        out.append(ConjClassGL2(ClassKind.CENTRAL, (t,), 1, double(s * t)))
    for t in range(q - 1):
        out.append(ConjClassGL2(ClassKind.NONSEMISIMPLE, (t,), q * q - 1, double(s * t)))
    for t1 in range(q - 1):
        for t2 in range(t1 + 1, q - 1):
            tr = tbl.log_of(tbl.add_codes(tbl.code_of(s * t1), tbl.code_of(s * t2)))
            out.append(ConjClassGL2(ClassKind.SPLIT, (t1, t2), q * q + q, tr))
    for k in range(M):
        if k % s == 0:
            continue
        if k > (k * q) % M:
            continue
        out.append(ConjClassGL2(ClassKind.ELLIPTIC, (k,), q * q - q, view.trace_rel(k)))
    if sum(c.size for c in out) != group_order(q):
        raise AssertionError("class equation failed")
    return out


@dataclass(frozen=True)
class CuspidalGL2Char:
    """Value table of the cuspidal character attached to a primitive index."""

    j: int
    dim: int
    classes: tuple[ConjClassGL2, ...]
    values: np.ndarray


def cuspidal_char(view: SubfieldView, j: int) -> CuspidalGL2Char:
    if not is_primitive(view, j):
        raise ValueError(f"index {j} is not primitive; no cuspidal character attached")
    q = view.base_size
    tbl = view.parent
    s = view.stride
    M = tbl.order
    classes = conj_classes(view)
    values = np.empty(len(classes), dtype=np.complex128)
    for i, cls in enumerate(classes):
        if cls.kind is ClassKind.CENTRAL:
            values[i] = (q - 1) * mult_char(tbl, j, s * cls.param[0])
        elif cls.kind is ClassKind.NONSEMISIMPLE:
            values[i] = -mult_char(tbl, j, s * cls.param[0])
        elif cls.kind is ClassKind.SPLIT:
            values[i] = 0.0
        else:
            k = cls.param[0]
            values[i] = -(mult_char(tbl, j, k) + mult_char(tbl, j, (k * q) % M))
    return CuspidalGL2Char(j=j, dim=q - 1, classes=tuple(classes), values=values)


def _psi_base(view: SubfieldView, trace_log: int, psi_p_num: np.ndarray) -> complex:
    if trace_log == ZERO:
        return complex(1.0)
    return complex(psi_p_num[view.base_abs_trace(trace_log)])


def matrix_gauss_sum(view: SubfieldView, j: int) -> complex:
    """Scalar of the full matrix sum, recovered from class-function traces."""
    char = cuspidal_char(view, j)
    p = view.parent.p
    roots = np.exp((2j * np.pi / p) * np.arange(p))
    contrib = np.empty(len(char.classes), dtype=np.complex128)
    for i, cls in enumerate(char.classes):
        contrib[i] = cls.size * char.values[i] * _psi_base(view, cls.trace_log, roots)
    return complex(np.sum(contrib) / char.dim)


@dataclass(frozen=True)
class KondoRow:
    j: int
    matrix_sum: complex
    torus_sum: complex
    magnitude_gap: float
    signed_residual: float  # |g(rho) + q g(chi)|
    unsigned_residual: float  # |g(rho) - q g(chi)|


@dataclass(frozen=True)
class KondoReport:
    q: int
    rows: tuple[KondoRow, ...]
    max_magnitude_gap: float
    max_signed_residual: float
    max_unsigned_residual: float
    ok: bool


def verify_kondo(view: SubfieldView, tol: float = 1e-6, threads: int = 1) -> KondoReport:
    """Reduce every primitive matrix Gauss sum to its torus Gauss sum.

    Passes when |g(rho_j)| = q^2 and g(rho_j) = -q g(chi_j) hold for every
    primitive j, within tol * q^2.  The residual of the unsigned variant
    g(rho_j) = +q g(chi_j) is recorded for comparison; it is bounded away
    from zero whenever the torus sum is.
    """
    if view.d != 2:
        raise ValueError("the reduction requires a quadratic tower")
    q = view.base_size
    js = [int(j) for j in enumerate_family(view, Family.PRIMITIVE)]

    def one(j: int) -> KondoRow:
        g_rho = matrix_gauss_sum(view, j)
        g_chi = gauss_sum_direct(view.parent, j)
        return KondoRow(
            j=j,
            matrix_sum=g_rho,
            torus_sum=g_chi,
            magnitude_gap=abs(abs(g_rho) - q * q),
            signed_residual=abs(g_rho + q * g_chi),
            unsigned_residual=abs(g_rho - q * g_chi),
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(one, js))
    else:
        rows = [one(j) for j in js]
    max_mag = max(r.magnitude_gap for r in rows)
    max_signed = max(r.signed_residual for r in rows)
    max_unsigned = max(r.unsigned_residual for r in rows)
    bound = tol * q * q
    return KondoReport(
        q=q,
        rows=tuple(rows),
        max_magnitude_gap=max_mag,
        max_signed_residual=max_signed,
        max_unsigned_residual=max_unsigned,
        ok=max_mag < bound and max_signed < bound,
    )
