"""Test the logarithmic-time pointwise eps-subdifferential"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.data_classes import Interval, SearchStats
from src.core.errors import NoCrossingError, NonPositiveEpsilonError, OutOfDomainError
from src.core.plq_function import validate
from src.core.plq_generator import generate_convex_plq, random_domain_points
from src.helpers.epssub_point import (
    LEFT,
    RIGHT,
    conjugate_point,
    eps_subdifferential,
    intersection,
    support_line,
)
from src.helpers.oracle import eps_sub_reference

INF = math.inf

ABS = validate([[0, 0, -1, 0], [INF, 0, 1, 0]])
SQUARE = validate([[INF, 1, 0, 0]])
SQ_RESTRICTED = validate([[0, 0, 0, INF], [INF, 1, 0, 0]])
KINKED = validate([[1, 1, 0, 0], [INF, 0, 2, -1]])
NEEDLE = validate([[0, 0, 0, 0]])


def endpoints(interval: Interval):
    return interval.lo, interval.hi


def test_support_line():
    """Test the support line in slope space"""
    print("Testing support_line...")

    line = support_line(ABS, 0.5, 0.5)
    assert (line.slope, line.intercept) == (0.5, 0.0), f"unexpected line {line}"
    assert line(2) == 1.0, "l(s) = eps - f(xbar) + s xbar"
    assert line.mirrored()(-2) == 1.0, "mirrored line at -s equals the line at s"

    with pytest.raises(OutOfDomainError):
        support_line(SQ_RESTRICTED, -1, 1)
    with pytest.raises(NonPositiveEpsilonError):
        support_line(ABS, 0, 0)

    print("  [PASS] support_line tests passed")


def test_conjugate_point():
    """Test conjugate points read off breakpoints"""
    print("Testing conjugate_point...")

    p = conjugate_point(ABS, 0)
    assert (p.s, p.ystar, p.x) == (-1, 0, 0), f"|x| at breakpoint 0 gave {p}"
    p = conjugate_point(KINKED, 0)
    assert (p.s, p.ystar, p.x) == (2, 1, 1), f"kinked function gave {p}"
    p = conjugate_point(SQ_RESTRICTED, 0)
    assert (p.s, p.ystar, p.x) == (0, 0, 0), f"domain end gave {p}"

    print("  [PASS] conjugate_point tests passed")


def test_eps_subdifferential_examples():
    """Test hand-computed intervals"""
    print("Testing eps_subdifferential examples...")

    cases = [
        (ABS, 0.5, 0.5, (0, 1)),
        (ABS, 0.0, 0.5, (-1, 1)),
        (ABS, -0.5, 0.5, (-1, 0)),
        (SQUARE, 0.0, 1.0, (-2, 2)),
        (SQUARE, 3.0, 1.0, (4, 8)),
        (SQ_RESTRICTED, 0.0, 1.0, (-INF, 2)),
        # lower end left of the first conjugate breakpoint: linear piece 0,
        # quadratic piece 0, and a left-bounded domain away from its end
        (ABS, 0.5, 2.0, (-1, 1)),
        (KINKED, 0.0, 4.0, (-4, 2)),
        (SQ_RESTRICTED, 1.0, 1.0, (0, 4)),
    ]
    for f, xbar, eps, expected in cases:
        got = endpoints(eps_subdifferential(f, xbar, eps))
        assert np.allclose(got, expected, rtol=1e-12, atol=1e-12), \
            f"{f} at xbar={xbar}, eps={eps}: expected {expected}, got {got}"

    assert str(eps_subdifferential(ABS, 0.5, 0.5)) == "[0, 1]"
    assert str(eps_subdifferential(SQ_RESTRICTED, 0.0, 1.0)) == "[-inf, 2]"

    print("  [PASS] eps_subdifferential examples passed")


def test_special_inputs():
    """Test needles, points outside the domain and bad epsilons"""
    print("Testing special inputs...")

    assert endpoints(eps_subdifferential(NEEDLE, 0, 1)) == (-INF, INF), "needle at its point is the line"
    assert eps_subdifferential(NEEDLE, 1, 1).empty, "needle elsewhere is empty"
    assert eps_subdifferential(SQ_RESTRICTED, -1, 1).empty, "outside the domain is empty"
    assert eps_subdifferential(ABS, math.nan, 1).empty
    assert eps_subdifferential(ABS, INF, 1).empty

    right = validate([[0, 1, 0, 0], [INF, 0, 0, INF]])
    assert eps_subdifferential(right, 0, 1).hi == INF, "right domain end has sup = +inf"
    assert eps_subdifferential(right, 0, 1).lo == -2, "x^2 part still bounds the inf"

    line = validate([[INF, 0, 2, 1]])
    assert endpoints(eps_subdifferential(line, 5, 0.1)) == (2, 2), "affine functions give their slope"

    for eps in (0, -1, INF, math.nan):
        with pytest.raises(NonPositiveEpsilonError):
            eps_subdifferential(ABS, 0, eps)

    print("  [PASS] special input tests passed")


def test_intersection():
    """Test the bracket crossing on both sides"""
    print("Testing intersection...")

    line = support_line(ABS, 0.5, 0.5)
    assert intersection(ABS, 0, 1, line, LEFT) == 0, "lower end of |x| at 0.5"
    assert intersection(ABS, -1, 0, line, RIGHT) == 1, "upper end of |x| at 0.5"

    line = support_line(SQUARE, 0.0, 1.0)
    assert intersection(SQUARE, -1, 0, line, LEFT) == -2
    assert intersection(SQUARE, -1, 0, line, RIGHT) == 2

    # With eps = 2 the line already clears f* at s_0 = -1; the crossing would be at -3
    line = support_line(ABS, 0.5, 2.0)
    assert intersection(ABS, 0, 1, line, LEFT) == -1, "a feasible bracket start is the answer"
    assert np.allclose(endpoints(eps_subdifferential(ABS, 0.5, 2.0)), (-1, 1)), "slopes of |x| bound the set"

    with pytest.raises(NoCrossingError):
        intersection(ABS, 0, 2, line)
    with pytest.raises(NoCrossingError):
        intersection(ABS, 1, 1, line)

    print("  [PASS] intersection tests passed")


def test_search_stats():
    """Test that the search probes a logarithmic number of breakpoints"""
    print("Testing SearchStats...")

    for pieces in (10, 1000, 40000):
        f = generate_convex_plq(pieces, 2)
        rng = np.random.default_rng(pieces)
        for xbar in random_domain_points(f, 10, rng):
            stats = SearchStats()
            eps_subdifferential(f, xbar, 1.0, stats=stats)
            bound = 2 * (math.ceil(math.log2(pieces + 1)) + 1)
            assert stats.queries == 2, "one search per endpoint"
            assert stats.probes <= bound, f"{stats.probes} probes for {pieces} pieces exceeds {bound}"

    print("  [PASS] SearchStats tests passed")


def test_matches_reference():
    """Test against the conjugate level-set reference on generated functions"""
    print("Testing agreement with the reference...")

    for seed in range(40):
        f = generate_convex_plq(3 + seed % 20, seed, left_bounded=seed % 3 == 1, right_bounded=seed % 3 == 2)
        rng = np.random.default_rng(seed)
        for xbar in random_domain_points(f, 8, rng):
            for eps in (1e-3, 0.1, 1.0, 10.0):
                fast = eps_subdifferential(f, xbar, eps)
                reference = eps_sub_reference(f, xbar, eps)
                assert fast.deviation(reference) <= 1e-6, \
                    f"seed {seed}, xbar={xbar}, eps={eps}: {fast} vs {reference}"

    print("  [PASS] reference agreement tests passed")


def test_contains_subdifferential():
    """Test d f(x) is inside d_eps f(x) and intervals grow with eps"""
    print("Testing containment...")

    f = generate_convex_plq(15, 9, left_bounded=True)
    rng = np.random.default_rng(9)
    for xbar in random_domain_points(f, 20, rng):
        exact = f.subdifferential(xbar)
        previous = exact
        for eps in (1e-3, 0.1, 1.0, 10.0):
            current = eps_subdifferential(f, xbar, eps)
            assert previous.issubset(current, slack=1e-9), \
                f"xbar={xbar}: {previous} should lie in {current} (eps={eps})"
            previous = current

    print("  [PASS] containment tests passed")


def main():
    """Run all tests"""
    print("\n" + "="*60)
    print("Running Pointwise Tests")
    print("="*60 + "\n")

    test_support_line()
    test_conjugate_point()
    test_eps_subdifferential_examples()
    test_special_inputs()
    test_intersection()
    test_search_stats()
    test_matches_reference()
    test_contains_subdifferential()

    print("\n" + "="*60)
    print("All tests passed!")
    print("="*60 + "\n")


if __name__ == "__main__":
    main()
