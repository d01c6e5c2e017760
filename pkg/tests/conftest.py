
from hypothesis import strategies as st

from screfine.exactnum import Rat, Vec3, as_rat

small_rats = st.fractions(min_value=-5, max_value=5, max_denominator=48).map(as_rat)
small_ints = st.integers(-6, 6)
vectors = st.builds(Vec3, small_rats, small_rats, small_rats)
int_vectors = st.builds(Vec3, small_ints, small_ints, small_ints)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
