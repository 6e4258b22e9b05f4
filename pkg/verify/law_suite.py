# verify/law_suite.py
"""
Randomized exact check of the Koszul complex laws on the symbolic backend:

    tau_F tau_F = 0
    dbar dbar = 0
    tau_F dbar = dbar tau_F
    tau_F(A ^ B) = tau_F A ^ B + (-1)^rA A ^ tau_F B

Zero tolerance: any surviving coefficient is a violation.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Dict, List

import numpy as np
from loguru import logger

from algebra.exterior import HolomorphicMap, KoszulForm, dbar_form, tau, wedge
from algebra.poly_text import format_form, format_poly
from algebra.symbolic import PolyExpr, poly_ring
from config.settings import KOSZUL_THREADS

LAWS = ('tau_squared', 'dbar_squared', 'tau_dbar_commute', 'anti_derivation')
MAX_DEGREE = 4
MAX_MAP_DEGREE = 2
COEFF_RANGE = 3


def random_poly(rng, n, max_degree=MAX_DEGREE, holomorphic=False, max_terms=4):
    """Sparse polynomial with Gaussian-integer coefficients in -3..3."""
    terms = {}
    width = n if holomorphic else 2 * n
    for _ in range(int(rng.integers(1, max_terms + 1))):
        degree = int(rng.integers(0, max_degree + 1))
        exps = [0] * (2 * n)
        for slot in rng.integers(0, width, size=degree):
            exps[int(slot)] += 1
        re_part, im_part = (int(v) for v in rng.integers(-COEFF_RANGE, COEFF_RANGE + 1, size=2))
        terms[tuple(exps)] = complex(re_part, im_part)
    return PolyExpr.from_terms(n, terms)


def random_form(rng, n, r, s, max_degree=MAX_DEGREE):
    """(r,s)-form with each basis component present with probability 1/2."""
    components = {}
    for J in combinations(range(1, n + 1), r):
        for K in combinations(range(1, n + 1), s):
            if rng.random() < 0.5:
                components[(J, K)] = random_poly(rng, n, max_degree)
    return KoszulForm(n, r, s, components)


def random_map(rng, n, zero=False):
    """Holomorphic polynomial F of degree <= 2, or F = 0."""
    if zero:
        return HolomorphicMap(tuple(PolyExpr.zero(n) for _ in range(n)))
    return HolomorphicMap(tuple(random_poly(rng, n, MAX_MAP_DEGREE, holomorphic=True) for _ in range(n)))


@dataclass(frozen=True)
class LawViolation:
    trial: int
    law: str
    n: int
    F: List[str]
    A: str
    B: str
    difference: str


@dataclass
class LawSuiteSummary:
    seed: int
    trials: int
    checks: Dict[str, int] = field(default_factory=lambda: {law: 0 for law in LAWS})
    violations: List[LawViolation] = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def to_dict(self):
        return {
            'seed': self.seed,
            'trials': self.trials,
            'checks': dict(self.checks),
            'violation_count': len(self.violations),
            'violations': [asdict(v) for v in self.violations],
            'passed': self.passed,
        }


def check_laws(F: HolomorphicMap, A: KoszulForm, B: KoszulForm, inject_sign_error=False):
    """
    Evaluate the four laws on one instance.

    Returns:
        dict: law -> difference form (zero when the law holds)
    """
    sign = -1 if A.r % 2 else 1
    if inject_sign_error:
        sign = -sign
    rhs = wedge(tau(F, A), B)
    tail = wedge(A, tau(F, B))
    rhs = rhs + tail if sign > 0 else rhs - tail
    return {
        'tau_squared': tau(F, tau(F, A)),
        'dbar_squared': dbar_form(dbar_form(A)),
        'tau_dbar_commute': tau(F, dbar_form(A)) - dbar_form(tau(F, A)),
        'anti_derivation': tau(F, wedge(A, B)) - rhs,
    }


def _run_trial(trial, seed_seq, inject_sign_error):
    rng = np.random.default_rng(seed_seq)
    n = int(rng.integers(1, 4))
    top = min(2, n)
    F = random_map(rng, n, zero=(trial % 10 == 9))
    A = random_form(rng, n, int(rng.integers(0, top + 1)), int(rng.integers(0, top + 1)))
    B = random_form(rng, n, int(rng.integers(0, top + 1)), int(rng.integers(0, top + 1)))

    violations = []
    for law, difference in check_laws(F, A, B, inject_sign_error).items():
        if not difference.is_zero():
            violations.append(LawViolation(
                trial=trial, law=law, n=n, F=[format_poly(f) for f in F.components],
                A=format_form(A), B=format_form(B), difference=format_form(difference)))
    return violations


def run_law_suite(seed: int, trials: int, inject_sign_error=False, workers=None) -> LawSuiteSummary:
    """
    Check the laws on `trials` random instances.

    Args:
        seed (int): Root seed; trial k uses the k-th spawned child
        trials (int): Number of instances (0 gives a vacuous pass)
        inject_sign_error (bool): Flip the anti-derivation sign (harness self-test)
        workers (int): Threads (default KOSZUL_THREADS); results do not depend on it

    Returns:
        LawSuiteSummary
    """
    if trials < 0:
        raise ValueError(f"trials must be non-negative, got {trials}")
    for n in (1, 2, 3):
        poly_ring(n)

    summary = LawSuiteSummary(seed, trials)
    children = np.random.SeedSequence(seed).spawn(trials)
    with ThreadPoolExecutor(max_workers=workers or KOSZUL_THREADS) as pool:
        outcomes = list(pool.map(lambda k: _run_trial(k, children[k], inject_sign_error), range(trials)))

    for found in outcomes:
        for law in LAWS:
            summary.checks[law] += 1
        summary.violations.extend(found)
    if summary.violations:
        first = summary.violations[0]
        logger.warning(f"{len(summary.violations)} law violations, first: {first.law} in trial {first.trial}")
    else:
        logger.info(f"✅ {trials} trials, all four laws hold exactly")
    return summary
