"""Gauss sums, Kloosterman sums, and the exact identities tying them together.

Three independent routes compute Kloosterman sums Kl_n(a):

* ``direct``       brute force over (n-1)-tuples, counting exact angle
                   residues mod p before a single complex combination;
* ``convolution``  iterated cyclic convolution of the psi table over the
                   cyclic group of nonzero elements;
* ``inversion``    Fourier inversion of the n-th powers of the batch Gauss
                   sums.

Gauss sums come either one at a time from exact angle numerators or as one
batch DFT of the psi table (chirp transform; the trivial index is pinned to
its exact value -1).  Cross-route agreement is part of the test suite, so
none of the routes may be rewritten in terms of another.

All complex reductions use numpy's fixed-order pairwise summation over log
order, which is deterministic and independent of thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chars import AddChar, Family, char_flags, enumerate_family
from .dft import bluestein_dft, cyclic_convolve, dft
from .ffield import ZERO, FieldTable, GuardError, SubfieldView

__all__ = [
    "WORK_GUARD",
    "GaussRecord",
    "KloostermanTable",
    "AggregateIA",
    "gauss_sum_direct",
    "gauss_sums_all",
    "gauss_records",
    "base_gauss_sum",
    "kloosterman_direct",
    "kloosterman_table",
    "kloosterman_all",
    "kloosterman_via_inversion",
    "aggregate_I",
    "aggregate_A",
    "aggregate_series",
    "round_int",
    "closed_form_sum",
    "closed_form_diff",
    "closed_form_even",
    "check_recurrence",
    "check_deligne_bound",
    "check_parseval",
    "check_hasse_davenport",
    "moment_identity",
    "c0_moment_identity",
    "cross_method_check",
    "gauss_batch_residual",
]

WORK_GUARD = 1 << 26


# ---------------------------------------------------------------------------
# Gauss sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussRecord:
    """One character's Gauss sum with its classification flags."""

    j: int
    value: complex
    normalized: complex
    primitive: bool
    trivial_central: bool
    square_in_c0: bool | None


def gauss_sum_direct(field: FieldTable, j: int, psi: AddChar | None = None) -> complex:
    """Sum of chi_j(x) psi(x) over the nonzero elements.

    Angles are exact integer numerators over lcm(M, p) = M p, converted to
    floating point once.  For j = 0 the sum collapses to exactly -1 (psi is
    nontrivial), which is returned without summation.
    """
    psi = psi or AddChar(field)
    M = field.order
    j %= M
    if j == 0:
        return complex(-1.0)
    ks = np.arange(M, dtype=np.int64)
    num = ((j * ks) % M) * field.p + psi.trace_vec * M
    return complex(np.sum(np.exp((2j * np.pi / (M * field.p)) * num)))


def gauss_sums_all(field: FieldTable, psi: AddChar | None = None) -> np.ndarray:
    """All M Gauss sums as one DFT of the psi table.

    Index j holds the sum for chi_j; the j = 0 entry is pinned to its exact
    value -1.
    """
    psi = psi or AddChar(field)
    g = dft(psi.values, sign=1)
    g[0] = -1.0 + 0.0j
    return g


def gauss_records(
    view: SubfieldView,
    js: np.ndarray | None = None,
    psi: AddChar | None = None,
) -> list[GaussRecord]:
    field = view.parent
    if js is None:
        js = np.arange(field.order, dtype=np.int64)
    g = gauss_sums_all(field, psi)
    scale = np.sqrt(field.q)
    out = []
    for j in js:
        j = int(j)
        flags = char_flags(view, j)
        value = complex(g[j])
        out.append(
            GaussRecord(
                j=j,
                value=value,
                normalized=value / scale,
                primitive=flags["primitive"],
                trivial_central=flags["trivial_central"],
                square_in_c0=flags["square_in_c0"],
            )
        )
    return out


def base_gauss_sum(view: SubfieldView, u: int) -> complex:
    """Gauss sum of the base field F_q, computed intrinsically in the tower.

    The base multiplicative character of index u mod (q-1) acts on the
    subgroup generator g^s; the base additive character uses the absolute
    trace of the subfield, not the trace of the ambient field.
    """
    q = view.base_size
    p = view.parent.p
    s = view.stride
    u %= q - 1
    vals = np.empty(q - 1, dtype=np.complex128)
    for t in range(q - 1):
        ang = u * t / (q - 1) + view.base_abs_trace(s * t) / p
        vals[t] = np.exp(2j * np.pi * ang)
    return complex(np.sum(vals))


# ---------------------------------------------------------------------------
# Kloosterman sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KloostermanTable:
    """Kl_n(a) for every nonzero a, indexed by log(a)."""

    n: int
    values: np.ndarray
    method: str


def _root_combination(counts: np.ndarray, p: int) -> complex:
    roots = np.exp((2j * np.pi / p) * np.arange(p))
    return complex(roots @ counts.astype(np.float64))


def kloosterman_direct(
    field: FieldTable,
    n: int,
    a: int,
    psi: AddChar | None = None,
    max_work: int = WORK_GUARD,
) -> complex:
    """Brute-force Kl_n(a): sum over free tuples with fixed product.

    Tuples are enumerated in log space; the additive character of the total
    is accumulated as exact counts of angle residues mod p, so the only
    floating-point step is the final combination with the p-th roots of
    unity.
    """
    if n < 1:
        raise ValueError("order n must be >= 1")
    if a == ZERO:
        raise ValueError("Kloosterman sums are indexed by nonzero a")
    psi = psi or AddChar(field)
    if n == 1:
        return psi.value(a)
    M, p = field.order, field.p
    if M ** (n - 1) > max_work:
        raise GuardError(f"work {M}^{n - 1} exceeds guard {max_work}")
    tr = np.asarray(psi.trace_vec, dtype=np.int64)
    ks = np.arange(M, dtype=np.int64)
    counts = np.zeros(p, dtype=np.int64)

    def descend(depth: int, logsum: int, trsum: int) -> None:
        nonlocal counts
        if depth == n - 2:
            res = (trsum + tr + tr[(a - logsum - ks) % M]) % p
            counts += np.bincount(res, minlength=p)
            return
        for k in range(M):
            descend(depth + 1, (logsum + k) % M, (trsum + int(tr[k])) % p)

    descend(0, 0, 0)
    return _root_combination(counts, p)


def kloosterman_table(
    field: FieldTable,
    n: int,
    method: str = "convolution",
    psi: AddChar | None = None,
    max_work: int = WORK_GUARD,
) -> KloostermanTable:
    """Kl_n for all nonzero a by the chosen route."""
    if n < 1:
        raise ValueError("order n must be >= 1")
    psi = psi or AddChar(field)
    M = field.order
    if method == "convolution":
        f = psi.values
        vals = f.copy()
        for _ in range(n - 1):
            vals = cyclic_convolve(vals, f)
    elif method == "inversion":
        g = gauss_sums_all(field, psi)
        vals = dft(g**n, sign=-1) / M
    elif method == "direct":
        if M**n > max_work:
            raise GuardError(f"work {M}^{n} exceeds guard {max_work}")
        vals = np.array(
            [kloosterman_direct(field, n, a, psi, max_work) for a in range(M)]
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return KloostermanTable(n=n, values=vals, method=method)


def kloosterman_all(field: FieldTable, n: int, psi: AddChar | None = None) -> KloostermanTable:
    return kloosterman_table(field, n, "convolution", psi)


def kloosterman_via_inversion(
    field: FieldTable, n: int, a: int, psi: AddChar | None = None
) -> complex:
    if a == ZERO:
        raise ValueError("Kloosterman sums are indexed by nonzero a")
    return complex(kloosterman_table(field, n, "inversion", psi).values[a % field.order])


# ---------------------------------------------------------------------------
# aggregates over the base units and over the trace-zero line
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AggregateIA:
    """Invariant / anti-invariant Kloosterman aggregates at one order n."""

    d: int
    n: int
    invariant: complex
    anti_invariant: complex | None


def aggregate_I(
    view: SubfieldView,
    n: int,
    table: KloostermanTable | None = None,
    psi: AddChar | None = None,
) -> complex:
    """Sum of Kl_n(a) over a in the base units F_q^*."""
    table = table or kloosterman_all(view.parent, n, psi)
    return complex(np.sum(table.values[view.base_unit_logs]))


def aggregate_A(
    view: SubfieldView,
    n: int,
    table: KloostermanTable | None = None,
    psi: AddChar | None = None,
) -> complex:
    """Sum of Kl_n(a) over nonzero a of relative trace zero (d = 2 only)."""
    if view.d != 2:
        raise ValueError("anti-invariant aggregate requires a quadratic tower")
    table = table or kloosterman_all(view.parent, n, psi)
    return complex(np.sum(table.values[view.trace_zero_logs]))


def round_int(z: complex, tol: float = 1e-6) -> tuple[int, float]:
    """Round to the nearest rational integer, reporting the residual."""
    value = int(round(z.real))
    residual = max(abs(z.imag), abs(z.real - value))
    return value, residual


def aggregate_series(
    view: SubfieldView,
    n_max: int,
    psi: AddChar | None = None,
    tol: float = 1e-6,
) -> tuple[list[int], list[int], float]:
    """Integer I_n and A_n for 1 <= n <= n_max, with the worst residual."""
    psi = psi or AddChar(view.parent)
    f = psi.values
    vals = f.copy()
    I, A = [], []
    worst = 0.0
    for n in range(1, n_max + 1):
        if n > 1:
            vals = cyclic_convolve(vals, f)
        table = KloostermanTable(n=n, values=vals, method="convolution")
        i_int, r1 = round_int(aggregate_I(view, n, table), tol)
        a_int, r2 = round_int(aggregate_A(view, n, table), tol)
        worst = max(worst, r1, r2)
        I.append(i_int)
        A.append(a_int)
    return I, A, worst


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------


def _geom_term(q: int, n: int) -> int:
    # (1 - (-q)^(n-1)) / (1 + q), an integer for every n >= 1
    return (1 - (-q) ** (n - 1)) // (1 + q)


def closed_form_sum(q: int, n: int) -> int:
    """Closed form of I_n + A_n for odd characteristic."""
    return (q - 2) * q ** (n - 1) + 2 * (-1) ** n * _geom_term(q, n)


def closed_form_diff(q: int, n: int) -> int:
    """Closed form of I_n - A_n for odd characteristic."""
    return (-q) ** n


def closed_form_even(q: int, n: int) -> int:
    """Closed form of I_n in characteristic 2."""
    return (q - 1) * q ** (n - 1) + (-1) ** n * _geom_term(q, n)


@dataclass(frozen=True)
class RecurrenceRow:
    n: int
    invariant: int
    anti_invariant: int
    recurrence_ok: bool
    closed_forms_ok: bool


@dataclass(frozen=True)
class RecurrenceReport:
    q: int
    p: int
    invariants: tuple[int, ...]  # I_1 .. I_n_max
    anti_invariants: tuple[int, ...]  # A_1 .. A_n_max
    rows: tuple[RecurrenceRow, ...]
    max_round_residual: float
    numeric_ok: bool
    identity_ok: bool

    @property
    def ok(self) -> bool:
        return self.numeric_ok and self.identity_ok


def check_recurrence(
    view: SubfieldView,
    n_max: int,
    psi: AddChar | None = None,
    tol: float = 1e-6,
) -> RecurrenceReport:
    """Verify the cross-recurrence and closed forms of I_n, A_n (d = 2).

    A residual above ``tol`` in the integer rounding is a numerical
    failure; an integer mismatch in a recurrence or closed form is an
    identity failure.  The two are reported separately.
    """
    if view.d != 2:
        raise ValueError("the recurrence lives on a quadratic tower")
    q, p = view.base_size, view.parent.p
    I, A, worst = aggregate_series(view, n_max, psi, tol)
    rows = []
    for n in range(2, n_max + 1):
        i_n, a_n = I[n - 1], A[n - 1]
        sign = (-1) ** n
        if p == 2:
            rec_ok = i_n == q * I[n - 2] + sign
            closed_ok = i_n == closed_form_even(q, n)
        else:
            rec_ok = i_n == q * A[n - 2] + sign and a_n == q * I[n - 2] + sign
            closed_ok = (
                i_n + a_n == closed_form_sum(q, n)
                and i_n - a_n == closed_form_diff(q, n)
            )
        rows.append(RecurrenceRow(n, i_n, a_n, rec_ok, closed_ok))
    base_ok = (I[0] == q - 1) if p == 2 else (I[0] == -1 and A[0] == q - 1)
    return RecurrenceReport(
        q=q,
        p=p,
        rows=tuple(rows),
        max_round_residual=worst,
        numeric_ok=worst < tol,
        identity_ok=base_ok and all(r.recurrence_ok and r.closed_forms_ok for r in rows),
    )


@dataclass(frozen=True)
class BoundReport:
    rows: tuple[tuple[int, float, float], ...]  # (n, max_abs, bound)
    max_ratio: float
    ok: bool


def check_deligne_bound(
    field: FieldTable,
    n_max: int,
    psi: AddChar | None = None,
    slack: float = 1e-9,
) -> BoundReport:
    """Entrywise |Kl_n(a)| <= n q^{(n-1)/2} for n <= n_max, all a."""
    psi = psi or AddChar(field)
    f = psi.values
    vals = f.copy()
    rows = []
    worst = 0.0
    for n in range(1, n_max + 1):
        if n > 1:
            vals = cyclic_convolve(vals, f)
        bound = n * field.q ** ((n - 1) / 2)
        max_abs = float(np.max(np.abs(vals)))
        worst = max(worst, max_abs / bound)
        rows.append((n, max_abs, bound))
    return BoundReport(rows=tuple(rows), max_ratio=worst, ok=worst <= 1.0 + slack)


@dataclass(frozen=True)
class ParsevalReport:
    n: int
    empirical: float
    exact: float
    rel_gap: float
    ok: bool


def check_parseval(
    field: FieldTable, n: int, psi: AddChar | None = None, tol: float = 1e-6
) -> ParsevalReport:
    """Sum of |Kl_n(a)|^2 against ((q-2) q^n + 1)/(q-1), exactly an integer."""
    table = kloosterman_all(field, n, psi)
    lhs = float(np.sum(np.abs(table.values) ** 2))
    q = field.q
    rhs = float(((q - 2) * q**n + 1) // (q - 1))
    rel = abs(lhs - rhs) / max(1.0, abs(rhs))
    return ParsevalReport(n=n, empirical=lhs, exact=rhs, rel_gap=rel, ok=rel < tol)


@dataclass(frozen=True)
class HasseDavenportReport:
    u: int
    degree: int
    lifted: complex
    base: complex
    residual: float
    ok: bool


def check_hasse_davenport(
    view: SubfieldView, u: int, tol: float = 1e-7
) -> HasseDavenportReport:
    """-g(lifted chi) against (-g(chi))^d along the tower of degree d.

    The lift of the base character of index u is the character of index
    u * s of the ambient field, s the norm stride.
    """
    d = view.d
    q = view.base_size
    g_base = base_gauss_sum(view, u)
    g_lift = gauss_sum_direct(view.parent, (u % (q - 1)) * view.stride)
    residual = abs((-g_lift) - (-g_base) ** d)
    return HasseDavenportReport(
        u=u % (q - 1),
        degree=d,
        lifted=g_lift,
        base=g_base,
        residual=residual,
        ok=residual < tol * q ** (d / 2),
    )


@dataclass(frozen=True)
class IdentityReport:
    n: int
    lhs: complex
    rhs: complex
    rel_gap: float
    ok: bool


def moment_identity(
    field: FieldTable, n: int, psi: AddChar | None = None, tol: float = 1e-6
) -> IdentityReport:
    """Sum over nontrivial chi of g(chi)^n against (q-1) Kl_n(1) - (-1)^n."""
    psi = psi or AddChar(field)
    g = gauss_sums_all(field, psi)
    lhs = complex(np.sum(g[1:] ** n))
    kl1 = complex(kloosterman_all(field, n, psi).values[0])
    rhs = field.order * kl1 - (-1) ** n
    rel = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return IdentityReport(n=n, lhs=lhs, rhs=rhs, rel_gap=rel, ok=rel < tol)


def c0_moment_identity(
    view: SubfieldView, n: int, psi: AddChar | None = None, tol: float = 1e-6
) -> IdentityReport:
    """Sum over nontrivial chi in C0 of g(chi)^n against |C0| I_n - (-1)^n."""
    psi = psi or AddChar(view.parent)
    g = gauss_sums_all(view.parent, psi)
    js = enumerate_family(view, Family.C0)
    lhs = complex(np.sum(g[js[js != 0]] ** n))
    i_n = aggregate_I(view, n, psi=psi)
    rhs = len(js) * i_n - (-1) ** n
    rel = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return IdentityReport(n=n, lhs=lhs, rhs=rhs, rel_gap=rel, ok=rel < tol)


@dataclass(frozen=True)
class CrossMethodReport:
    n: int
    max_deviation: float
    scale: float
    methods: tuple[str, ...]
    ok: bool


def cross_method_check(
    field: FieldTable,
    n: int,
    psi: AddChar | None = None,
    max_work: int = WORK_GUARD,
    tol: float = 1e-7,
) -> CrossMethodReport:
    """Entrywise agreement of the Kloosterman routes at order n.

    The brute-force route joins only when the work guard permits a full
    table.
    """
    psi = psi or AddChar(field)
    tables = [
        kloosterman_table(field, n, "convolution", psi),
        kloosterman_table(field, n, "inversion", psi),
    ]
    if field.order**n <= max_work:
        tables.append(kloosterman_table(field, n, "direct", psi, max_work))
    dev = 0.0
    for i in range(len(tables)):
        for k in range(i + 1, len(tables)):
            dev = max(dev, float(np.max(np.abs(tables[i].values - tables[k].values))))
    scale = field.q ** (n / 2)
    return CrossMethodReport(
        n=n,
        max_deviation=dev,
        scale=scale,
        methods=tuple(t.method for t in tables),
        ok=dev < tol * scale,
    )


def gauss_batch_residual(field: FieldTable, psi: AddChar | None = None) -> float:
    """Worst |chirp batch - per-index direct sum| over all characters.

    Exercises the chirp path even below the dispatch cutoff, so the two
    routes stay independent.
    """
    psi = psi or AddChar(field)
    batch = bluestein_dft(psi.values, sign=1)
    worst = 0.0
    for j in range(field.order):
        direct = gauss_sum_direct(field, j, psi) if j else complex(np.sum(psi.values))
        worst = max(worst, abs(complex(batch[j]) - direct))
    return worst
