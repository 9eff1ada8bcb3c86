"""Seeded randomised checks of the operator axioms.

Each trial draws (f, g, alpha, x, n) and checks sublinearity,
monotonicity, strong translatability, unitality, the Lipschitz (Krein)
inequality, the constant-homogeneity identity and the Hoelder moment
inequality at the stated tolerances.  The monotone pair is built as
(f, f + |g|) so the ordering holds on every sampling set by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .funcspace import E0, Func1D, make_test_suite
from .operators import (
    DEFAULT_CHOQUET_SAMPLES,
    DEFAULT_SUP_SAMPLES,
    OPERATOR_KINDS,
    OperatorSpec,
    apply,
    operator_moment,
)

AXIOM_TOLERANCES = {
    "sublinearity": 1e-10,
    "positive_homogeneity": 1e-12,
    "monotonicity": 1e-12,
    "strong_translatability": 1e-10,
    "unitality": 1e-12,
    "krein": 1e-10,
    "remark1_identity": 1e-12,
    "holder_moment": 1e-8,
}

AXIOM_NAMES = tuple(AXIOM_TOLERANCES)

DEFAULT_TRIAL_DEGREES = (4, 16, 64)


@dataclass
class AxiomOutcome:
    """Aggregated result of one axiom for one operator kind."""

    axiom: str
    kind: str
    trials: int = 0
    failures: int = 0
    worst: float = 0.0  # largest observed violation beyond tolerance 0

    def record(self, violation: float, tolerance: float):
        self.trials += 1
        self.worst = max(self.worst, violation)
        if violation > tolerance:
            self.failures += 1

    @property
    def ok(self) -> bool:
        return self.failures == 0


def run_axiom_suite(
    seed: int = 0,
    trials: int = 200,
    kinds=OPERATOR_KINDS,
    degrees=DEFAULT_TRIAL_DEGREES,
    suite: list[Func1D] | None = None,
    applier=None,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> list[AxiomOutcome]:
    """Run the full axiom battery; returns one outcome per (axiom, kind).

    ``applier(op, f, x)`` may replace the library operator application
    (used to show that a deliberately broken operator fails).
    """
    suite = make_test_suite() if suite is None else suite
    rng = np.random.default_rng(seed)

    if applier is None:
        def ap(op, f, x):
            return apply(op, f, x, sup_samples=sup_samples, choquet_samples=choquet_samples)

        def moments(op, x):
            m1 = operator_moment(
                op, "abs_first", x, sup_samples=sup_samples, choquet_samples=choquet_samples
            )
            m2 = operator_moment(
                op, "second", x, sup_samples=sup_samples, choquet_samples=choquet_samples
            )
            return m1, m2
    else:
        ap = applier

        def moments(op, x):
            kinks = (x,) if 0.0 < x < 1.0 else ()
            absdev = Func1D("absdev", lambda t: np.abs(np.asarray(t, float) - x), kinks=kinks)
            sqdev = Func1D("sqdev", lambda t: (np.asarray(t, float) - x) ** 2)
            return ap(op, absdev, x), ap(op, sqdev, x)

    outcomes = {
        (name, kind): AxiomOutcome(name, kind) for name in AXIOM_NAMES for kind in kinds
    }

    for _ in range(trials):
        f = suite[rng.integers(len(suite))]
        g = suite[rng.integers(len(suite))]
        alpha = float(rng.uniform(-2.0, 2.0))
        x = float(rng.uniform(0.0, 1.0))
        n = int(degrees[rng.integers(len(degrees))])

        f_plus_g = f + g
        g_mono = f + abs(g)
        abs_fg = abs(f - g)
        scaled = abs(alpha) * f
        shifted = f + alpha
        const = alpha * E0

        for kind in kinds:
            op = OperatorSpec(kind, n)
            tf = ap(op, f, x)
            tg = ap(op, g, x)
            te0 = ap(op, E0, x)

            outcomes["sublinearity", kind].record(
                ap(op, f_plus_g, x) - (tf + tg), AXIOM_TOLERANCES["sublinearity"]
            )
            outcomes["positive_homogeneity", kind].record(
                abs(ap(op, scaled, x) - abs(alpha) * tf),
                AXIOM_TOLERANCES["positive_homogeneity"],
            )
            outcomes["monotonicity", kind].record(
                tf - ap(op, g_mono, x), AXIOM_TOLERANCES["monotonicity"]
            )
            outcomes["strong_translatability", kind].record(
                abs(ap(op, shifted, x) - (tf + alpha * te0)),
                AXIOM_TOLERANCES["strong_translatability"],
            )
            outcomes["unitality", kind].record(
                abs(te0 - 1.0), AXIOM_TOLERANCES["unitality"]
            )
            outcomes["krein", kind].record(
                abs(tf - tg) - ap(op, abs_fg, x), AXIOM_TOLERANCES["krein"]
            )
            outcomes["remark1_identity", kind].record(
                abs(ap(op, const, x) - alpha), AXIOM_TOLERANCES["remark1_identity"]
            )
            m1, m2 = moments(op, x)
            outcomes["holder_moment", kind].record(
                m1 - math.sqrt(max(m2, 0.0) * te0), AXIOM_TOLERANCES["holder_moment"]
            )

    return [outcomes[name, kind] for name in AXIOM_NAMES for kind in kinds]
