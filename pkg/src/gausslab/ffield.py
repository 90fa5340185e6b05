"""Finite fields F_{p^m} backed by exponent/log tables.

Nonzero elements are handled as discrete logarithms with respect to a
canonical generator g; the additive identity is the sentinel ``ZERO``.
Coordinate "codes" (integers c_0 + c_1 p + ... + c_{m-1} p^{m-1} encoding
polynomials in the modulus root) appear in table construction, in
code<->log conversion and in additive helpers.

Everything is canonical so that numeric output is reproducible without
external polynomial databases:

* the modulus is the lexicographically smallest monic irreducible
  polynomial of degree m over Z/p, coefficients compared low degree first;
* the generator is the smallest code of full multiplicative order.

Cache file layout (little endian), one file per field at
``<cache_dir>/f_<p>_<m>.tbl``:

    magic   5 bytes  b"GFTB1"
    p       uint32
    m       uint32
    modulus uint32 x (m+1), low degree first
    exp     uint32 x (p^m - 1), codes of g^0 .. g^{M-1}
    trace   uint8  x (p^m - 1), absolute traces of g^0 .. g^{M-1}

The 8-bit trace column restricts caching to p <= 255; larger fields are
silently rebuilt.  The cache is an optimization only: loaded tables are
validated against the canonical modulus and rebuilt on any mismatch, so
results are identical with caching disabled.
"""

from __future__ import annotations

import itertools
import logging
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "ZERO",
    "SIZE_GUARD",
    "GuardError",
    "FieldParams",
    "FieldTable",
    "SubfieldView",
    "is_prime",
    "find_irreducible",
    "field_params",
    "build_field",
    "subfield_view",
    "trace_rel",
    "norm_rel",
    "frobenius",
]

log = logging.getLogger(__name__)

ZERO = -1  # log-domain sentinel for the additive identity
SIZE_GUARD = 1 << 22
_CACHE_MAGIC = b"GFTB1"


class GuardError(ValueError):
    """A size or work guard was exceeded."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n (n >= 1), by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomial arithmetic over Z/p, coefficient lists low degree first
# ---------------------------------------------------------------------------


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        ai = a[i] if i < len(a) else 0
        bi = b[i] if i < len(b) else 0
        out[i] = (ai - bi) % p
    return _ptrim(out)


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _ptrim(list(a))
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df and a:
        shift = len(a) - 1 - df
        c = (a[-1] * inv_lead) % p
        for i in range(df + 1):
            a[shift + i] = (a[shift + i] - c * f[i]) % p
        _ptrim(a)
    return a


def _pmulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    return _pmod(_pmul(a, b, p), f, p)


def _ppowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while e > 0:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _code_poly(code: int, p: int) -> list[int]:
    out = []
    while code:
        code, r = divmod(code, p)
        out.append(r)
    return out


def _poly_code(a: list[int], p: int) -> int:
    code = 0
    for c in reversed(a):
        code = code * p + c
    return code


def _is_irreducible(poly: list[int], p: int) -> bool:
    """Check irreducibility of a monic polynomial over Z/p.

    Uses gcd(x^{p^k} - x, poly) = 1 for 0 < k < deg together with
    x^{p^deg} = x mod poly.
    """
    m = len(poly) - 1
    if m == 1:
        return True
    x = [0, 1]
    t = x
    for k in range(1, m + 1):
        t = _ppowmod(t, p, poly, p)  # t = x^(p^k) mod poly
        if k < m:
            if len(_pgcd(_psub(t, x, p), poly, p)) - 1 != 0:
                return False
        elif _psub(t, x, p):
            return False
    return True


# ---------------------------------------------------------------------------
# field construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldParams:
    """Parameters pinning one concrete model of F_{p^m}."""

    p: int
    m: int
    q_power: int
    modulus: tuple[int, ...]  # monic, low degree first, length m+1


def find_irreducible(p: int, m: int, max_size: int = SIZE_GUARD) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m over Z/p.

    Coefficient tuples (c_0, ..., c_{m-1}) are compared low degree first;
    the result includes the leading 1.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if m < 1:
        raise ValueError(f"m = {m} must be >= 1")
    if p**m > max_size:
        raise GuardError(f"field size {p}^{m} exceeds guard {max_size}")
    for tail in itertools.product(range(p), repeat=m):
        poly = list(tail) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial of requested degree")


def field_params(p: int, m: int, max_size: int = SIZE_GUARD) -> FieldParams:
    modulus = find_irreducible(p, m, max_size=max_size)
    return FieldParams(p=p, m=m, q_power=p**m, modulus=modulus)


def _find_generator(params: FieldParams) -> int:
    """Smallest code of full multiplicative order M = q - 1."""
    p, q = params.p, params.q_power
    M = q - 1
    if M == 1:
        return 1
    f = list(params.modulus)
    cofactors = [M // r for r in prime_factors(M)]
    for code in range(2, q):
        a = _code_poly(code, p)
        if all(_ppowmod(a, e, f, p) != [1] for e in cofactors):
            return code
    raise AssertionError("no generator found; modulus is not irreducible")


def _basis_traces(params: FieldParams) -> list[int]:
    """Absolute traces of the basis 1, x, ..., x^{m-1}, as residues mod p."""
    p, m = params.p, params.m
    f = list(params.modulus)
    frobs = [_ppowmod([0, 1], p**e, f, p) for e in range(m)]
    powers = [[1] for _ in range(m)]
    traces = [m % p]
    for _ in range(1, m):
        total: list[int] = []
        for e in range(m):
            powers[e] = _pmulmod(powers[e], frobs[e], f, p)
            total = _psub(total, [(-c) % p for c in powers[e]], p)
        if len(total) > 1:
            raise AssertionError("basis trace left the prime field")
        traces.append(total[0] if total else 0)
    return traces


def _construct_tables(params: FieldParams) -> tuple[np.ndarray, np.ndarray]:
    p, m, q = params.p, params.m, params.q_power
    M = q - 1
    f = list(params.modulus)
    g = _code_poly(_find_generator(params), p)
    exp = np.empty(M, dtype=np.int64)
    cur = [1]
    for k in range(M):
        exp[k] = _poly_code(cur, p)
        cur = _pmulmod(cur, g, f, p)
    if _poly_code(cur, p) != 1:
        raise AssertionError("generator order mismatch")

    traces = _basis_traces(params)
    tr = np.zeros(M, dtype=np.int64)
    codes = exp.copy()
    for i in range(m):
        tr += (codes % p) * traces[i]
        codes //= p
    return exp, tr % p


class FieldTable:
    """Lookup tables for F_{p^m}.

    Attributes
    ----------
    exp : int64[M]
        codes of g^0 .. g^{M-1} for the canonical generator g.
    log : int64[q]
        inverse of ``exp``; entry 0 holds the ``ZERO`` sentinel.
    trace_to_prime : int64[M]
        absolute trace Tr_{F_q/F_p}(g^k), as a residue mod p.
    zech : int64[M]
        log(1 + g^k), with ``ZERO`` where 1 + g^k = 0.

    Instances are immutable after construction and safe for unrestricted
    concurrent reads.
    """

    def __init__(self, params: FieldParams, exp: np.ndarray, trace_to_prime: np.ndarray):
        self.params = params
        self.p = params.p
        self.m = params.m
        self.q = params.q_power
        self.order = self.q - 1
        self.exp = exp
        self.trace_to_prime = trace_to_prime
        lg = np.full(self.q, ZERO, dtype=np.int64)
        lg[exp] = np.arange(self.order, dtype=np.int64)
        self.log = lg
        self.generator = int(exp[1 % self.order])
        c0 = exp % self.p
        self.zech = lg[exp - c0 + (c0 + 1) % self.p]
        for arr in (self.exp, self.log, self.trace_to_prime, self.zech):
            arr.setflags(write=False)

    # -- log-domain arithmetic ---------------------------------------------

    def mul_log(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % self.order

    def inv_log(self, a: int) -> int:
        if a == ZERO:
            raise ZeroDivisionError("inverse of the zero element")
        return (-a) % self.order

    def pow_log(self, a: int, e: int) -> int:
        if a == ZERO:
            if e <= 0:
                raise ZeroDivisionError("0 cannot be raised to a power <= 0")
            return ZERO
        return (a * (e % self.order)) % self.order

    def add_log(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        z = self.zech[(b - a) % self.order]
        return ZERO if z == ZERO else (a + int(z)) % self.order

    def neg_log(self, a: int) -> int:
        if a == ZERO or self.p == 2:
            return a
        return (a + self.order // 2) % self.order

    def trace_of(self, a: int) -> int:
        return 0 if a == ZERO else int(self.trace_to_prime[a])

    # -- code-domain helpers -----------------------------------------------

    def code_of(self, a: int) -> int:
        return 0 if a == ZERO else int(self.exp[a])

    def log_of(self, code: int) -> int:
        return int(self.log[code])

    def add_codes(self, c1: int, c2: int) -> int:
        p = self.p
        out, mult = 0, 1
        while c1 or c2:
            out += ((c1 % p + c2 % p) % p) * mult
            c1 //= p
            c2 //= p
            mult *= p
        return out

    def mul_codes(self, c1: int, c2: int) -> int:
        f = list(self.params.modulus)
        prod = _pmulmod(_code_poly(c1, self.p), _code_poly(c2, self.p), f, self.p)
        return _poly_code(prod, self.p)

    def poly_str(self, code: int) -> str:
        if code == 0:
            return "0"
        terms = []
        for i, c in enumerate(_code_poly(code, self.p)):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else str(c)
                terms.append(f"{head}x" if i == 1 else f"{head}x^{i}")
        return "+".join(terms)

    def __repr__(self) -> str:  # pragma: no cover
        return f"FieldTable(p={self.p}, m={self.m}, q={self.q})"


class SubfieldView:
    """The tower F_q inside F_{q^d}, with q = p^{m/d}.

    The base multiplicative group is the power subgroup {g^{s t}} for the
    stride s = (q^d - 1)/(q - 1); relative trace and norm land in it.
    """

    def __init__(self, parent: FieldTable, d: int):
        if d < 1 or parent.m % d != 0:
            raise ValueError(f"degree {d} does not divide m = {parent.m}")
        self.parent = parent
        self.d = d
        self.base_m = parent.m // d
        self.base_size = parent.p ** self.base_m
        self.stride = parent.order // (self.base_size - 1)

    @cached_property
    def base_unit_logs(self) -> np.ndarray:
        return self.stride * np.arange(self.base_size - 1, dtype=np.int64)

    @cached_property
    def trace_zero_logs(self) -> np.ndarray:
        ks = [k for k in range(self.parent.order) if self.trace_rel(k) == ZERO]
        return np.asarray(ks, dtype=np.int64)

    def in_base(self, a: int) -> bool:
        return a == ZERO or a % self.stride == 0

    def frobenius(self, a: int, e: int) -> int:
        """a^(q^e); the identity on the base subfield when e = 0 mod d."""
        if a == ZERO:
            return ZERO
        return (a * pow(self.base_size, e % self.d, self.parent.order)) % self.parent.order

    def trace_rel(self, a: int) -> int:
        """Relative trace sum_{i<d} a^(q^i), as a log (or ZERO)."""
        if a == ZERO:
            return ZERO
        tbl = self.parent
        acc = 0
        for i in range(self.d):
            acc = tbl.add_codes(acc, tbl.code_of(self.frobenius(a, i)))
        return tbl.log_of(acc)

    def norm_rel(self, a: int) -> int:
        """Relative norm prod_{i<d} a^(q^i) = a^s, as a log (or ZERO)."""
        if a == ZERO:
            return ZERO
        return (a * self.stride) % self.parent.order

    def base_abs_trace(self, a: int) -> int:
        """Absolute trace F_q -> F_p of a base-subfield element, mod p."""
        if a == ZERO:
            return 0
        if not self.in_base(a):
            raise ValueError("element is not in the base subfield")
        tbl = self.parent
        acc = 0
        for i in range(self.base_m):
            acc = tbl.add_codes(acc, tbl.code_of((a * tbl.p**i) % tbl.order))
        if acc >= tbl.p:
            raise AssertionError("subfield trace left the prime field")
        return acc


def trace_rel(x: int, view: SubfieldView) -> int:
    return view.trace_rel(x)


def norm_rel(x: int, view: SubfieldView) -> int:
    return view.norm_rel(x)


def frobenius(x: int, e: int, view: SubfieldView) -> int:
    return view.frobenius(x, e)


def subfield_view(parent: FieldTable, d: int) -> SubfieldView:
    return SubfieldView(parent, d)


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------


def _cache_path(cache_dir: str | Path, p: int, m: int) -> Path:
    return Path(cache_dir) / f"f_{p}_{m}.tbl"


def _save_cache(table: FieldTable, path: Path) -> None:
    params = table.params
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<II", params.p, params.m))
        fh.write(np.asarray(params.modulus, dtype="<u4").tobytes())
        fh.write(table.exp.astype("<u4").tobytes())
        fh.write(table.trace_to_prime.astype("u1").tobytes())
    log.debug("cached field tables at %s", path)


def _load_cache(path: Path, params: FieldParams) -> FieldTable | None:
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    head = len(_CACHE_MAGIC)
    if raw[:head] != _CACHE_MAGIC:
        return None
    try:
        p, m = struct.unpack_from("<II", raw, head)
        if (p, m) != (params.p, params.m):
            return None
        off = head + 8
        modulus = np.frombuffer(raw, dtype="<u4", count=m + 1, offset=off)
        if tuple(int(c) for c in modulus) != params.modulus:
            return None
        off += 4 * (m + 1)
        M = params.q_power - 1
        exp = np.frombuffer(raw, dtype="<u4", count=M, offset=off).astype(np.int64)
        off += 4 * M
        tr = np.frombuffer(raw, dtype="u1", count=M, offset=off).astype(np.int64)
    except (struct.error, ValueError):
        return None
    if exp.shape[0] != M or tr.shape[0] != M:
        return None
    # validate: exp must be a permutation of the nonzero codes, traces in range
    if not (np.sort(exp) == np.arange(1, params.q_power)).all() or (tr >= params.p).any():
        return None
    return FieldTable(params, exp, tr)


def build_field(
    p: int,
    m: int,
    *,
    cache_dir: str | Path | None = None,
    max_size: int = SIZE_GUARD,
) -> FieldTable:
    """Construct (or load from cache) the canonical tables for F_{p^m}."""
    params = field_params(p, m, max_size=max_size)
    path = _cache_path(cache_dir, p, m) if cache_dir is not None else None
    if path is not None and path.exists():
        cached = _load_cache(path, params)
        if cached is not None:
            return cached
        log.warning("stale or corrupt cache at %s; rebuilding", path)
    exp, tr = _construct_tables(params)
    table = FieldTable(params, exp, tr)
    if path is not None and p <= 255:
        _save_cache(table, path)
    return table
