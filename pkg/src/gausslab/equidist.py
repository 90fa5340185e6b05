"""Angle statistics for families of normalized Gauss sums.

A family of character indices becomes a population of points g(chi)/q^{d/2}
on (or, for the trivial character, strictly inside) the unit circle.  Weyl
sums, moment reports with exact finite-size predictions, star discrepancy
and Kolmogorov-Smirnov distances quantify how the population sits against
its limit measure.

Angle convention: principal value in (-pi, pi], cut at pi.  Populations are
closed under complex conjugation, so negative-order moments are conjugates
of positive ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .chars import AddChar, Family, enumerate_family
from .expsum import aggregate_A, aggregate_I, gauss_sums_all, kloosterman_all
from .ffield import SubfieldView

__all__ = [
    "Target",
    "target_moment",
    "target_cdf",
    "AnglePopulation",
    "MomentReport",
    "build_population",
    "weyl_sum",
    "moment_report",
    "star_discrepancy",
    "ks_distance",
]


class Target(enum.Enum):
    """Limit measures on the unit circle."""

    HAAR = "haar"
    DIRAC_1 = "dirac+1"
    DIRAC_MINUS1 = "dirac-1"
    HALF_DIRAC_PAIR = "half-dirac-pair"


def target_moment(target: Target, n: int) -> complex:
    if target is Target.HAAR:
        return complex(1.0 if n == 0 else 0.0)
    if target is Target.DIRAC_1:
        return complex(1.0)
    if target is Target.DIRAC_MINUS1:
        return complex((-1.0) ** n)
    if target is Target.HALF_DIRAC_PAIR:
        return complex((1.0 + (-1.0) ** n) / 2.0)
    raise ValueError(f"unknown target {target!r}")


def _target_atoms(target: Target) -> dict[float, float]:
    if target is Target.HAAR:
        return {}
    if target is Target.DIRAC_1:
        return {0.0: 1.0}
    if target is Target.DIRAC_MINUS1:
        return {np.pi: 1.0}
    if target is Target.HALF_DIRAC_PAIR:
        return {0.0: 0.5, np.pi: 0.5}
    raise ValueError(f"unknown target {target!r}")


def target_cdf(target: Target, theta: float) -> float:
    """Distribution function of the target on angles in (-pi, pi]."""
    if target is Target.HAAR:
        return (theta + np.pi) / (2.0 * np.pi)
    return sum(mass for atom, mass in _target_atoms(target).items() if theta >= atom)


@dataclass(frozen=True)
class AnglePopulation:
    """Normalized Gauss sums of one family, in ascending index order."""

    family: Family
    js: np.ndarray
    points: np.ndarray
    q: int
    d: int

    @property
    def size(self) -> int:
        return int(self.points.shape[0])


def build_population(
    view: SubfieldView,
    family: Family,
    psi: AddChar | None = None,
    gauss: np.ndarray | None = None,
) -> AnglePopulation:
    """Points g(chi_j)/q^{d/2} for j in the family.

    The trivial character contributes -1/q^{d/2} whenever the family
    contains j = 0 (the norm-one square family keeps it by convention).
    """
    js = enumerate_family(view, family)
    if js.size == 0:
        raise ValueError(f"family {family.value} is empty for this tower")
    if gauss is None:
        gauss = gauss_sums_all(view.parent, psi)
    points = gauss[js] / np.sqrt(view.parent.q)
    return AnglePopulation(family=family, js=js, points=points, q=view.base_size, d=view.d)


def weyl_sum(pop: AnglePopulation, n: int) -> complex:
    """Mean of z^n over the population."""
    if n == 0:
        return complex(1.0)
    return complex(np.mean(pop.points ** float(n)))


@dataclass(frozen=True)
class MomentReport:
    family: Family
    n: int
    empirical: complex
    target: complex
    exact_prediction: complex | None
    deviation: float


def _exact_predictions(
    view: SubfieldView, family: Family, n_max: int, psi: AddChar | None
) -> list[complex | None]:
    """Finite-size closed forms for the empirical moments, where they exist."""
    q = view.base_size
    field = view.parent
    preds: list[complex | None] = []
    if family in (Family.C0S, Family.C0NS, Family.C0):
        for n in range(1, n_max + 1):
            table = kloosterman_all(field, n, psi)
            i_n = aggregate_I(view, n, table)
            if family is Family.C0 or field.p == 2:
                preds.append(i_n / field.q ** (n / 2))
            else:
                a_n = aggregate_A(view, n, table)
                combined = i_n + a_n if family is Family.C0S else i_n - a_n
                preds.append((q - 1) * combined / ((q + 1) * q**n))
        return preds
    if family is Family.ALL_NONTRIVIAL:
        M = field.order
        for n in range(1, n_max + 1):
            kl1 = complex(kloosterman_all(field, n, psi).values[0])
            preds.append((M * kl1 - (-1) ** n) / (M * field.q ** (n / 2)))
        return preds
    return [None] * n_max


def moment_report(
    view: SubfieldView,
    family: Family,
    n_max: int,
    target: Target,
    psi: AddChar | None = None,
) -> list[MomentReport]:
    """Empirical moments 1..n_max with targets and exact predictions."""
    if target is not Target.HAAR and view.d != 2:
        raise ValueError(f"target {target.value} applies to quadratic towers only")
    pop = build_population(view, family, psi)
    preds = _exact_predictions(view, family, n_max, psi)
    out = []
    for n in range(1, n_max + 1):
        emp = weyl_sum(pop, n)
        tgt = target_moment(target, n)
        out.append(
            MomentReport(
                family=family,
                n=n,
                empirical=emp,
                target=tgt,
                exact_prediction=preds[n - 1],
                deviation=abs(emp - tgt),
            )
        )
    return out


def star_discrepancy(pop: AnglePopulation) -> float:
    """Sup over circular arcs of |empirical mass - normalized arc length|.

    Computed exactly from sorted angle fractions: with F(t) the centered
    counting function, the sup is (max F - min F)/N over one period.
    """
    u = np.sort(np.angle(pop.points) / (2.0 * np.pi) % 1.0)
    n = u.shape[0]
    i = np.arange(1, n + 1)
    hi = max(0.0, float(np.max(i - n * u)))
    lo = min(0.0, float(np.min(i - 1 - n * u)))
    return (hi - lo) / n


def ks_distance(pop: AnglePopulation, target: Target) -> float:
    """Kolmogorov-Smirnov distance on angles in (-pi, pi], cut at pi."""
    theta = np.sort(np.angle(pop.points))
    n = theta.shape[0]
    atoms = np.asarray(sorted(_target_atoms(target)), dtype=float)
    grid = np.unique(np.concatenate([theta, atoms]))

    def emp(ts: np.ndarray, side: str) -> np.ndarray:
        return np.searchsorted(theta, ts, side=side) / n

    tgt_right = np.asarray([target_cdf(target, t) for t in grid])
    if target is Target.HAAR:
        tgt_left = tgt_right
    else:
        masses = _target_atoms(target)
        tgt_left = tgt_right - np.asarray([masses.get(float(t), 0.0) for t in grid])
    gaps = np.concatenate(
        [np.abs(emp(grid, "right") - tgt_right), np.abs(emp(grid, "left") - tgt_left)]
    )
    return float(np.max(gaps))
