from __future__ import annotations

from fractions import Fraction
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from subdivkit.seqalg import FiniteSequence, Mask, convolve

settings.register_profile(
    "default",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile("default")

PROPERTY_CASES = 200

small_fracs = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 8))


@st.composite
def sequences(draw, min_len=1, max_len=6, nonzero=True):
    coeffs = draw(st.lists(small_fracs, min_size=min_len, max_size=max_len))
    if nonzero and all(c == 0 for c in coeffs):
        coeffs[0] = Fraction(1)
    start = draw(st.integers(-4, 3))
    return FiniteSequence(coeffs, start)


def ones(M: int) -> FiniteSequence:
    return FiniteSequence([Fraction(1)] * M, 0)


def with_sum_rules(b: FiniteSequence, M: int, J: int) -> FiniteSequence:
    out = b
    for _ in range(J):
        out = convolve(out, ones(M))
    return out


@st.composite
def masks(draw, dilations=(2, 3, 4), max_J=3, max_b=4, normalized=True):
    """``(mask, J, b)`` with ``a(z) = (1 + ... + z^{M-1})^J b(z)``, ``b(1) != 0``."""
    M = draw(st.sampled_from(dilations))
    J = draw(st.integers(0, max_J))
    b = draw(sequences(1, max_b))
    tot = b.total()
    if tot == 0:
        b = b + FiniteSequence([Fraction(1)], b.start)
        tot = b.total()
    if normalized:
        b = b.scale(Fraction(1, M**J) / tot)
    a = with_sum_rules(b, M, J)
    return Mask(a, M), J, b


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not any(mod.RESULTS.values()):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
