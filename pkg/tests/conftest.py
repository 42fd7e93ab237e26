import random
import sys
from functools import lru_cache
from pathlib import Path


sys.path.insert(0, str(Path(__file__).parent))

from leetor import LEE, build_complex, compute_homology  # noqa: E402
from leetor.cli import bundled_table, entry_diagram, lookup, read_table  # noqa: E402
from leetor.diagram import braid_closure, random_braid_word  # noqa: E402

RIGHT_TREFOIL = "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]"
FIGURE_EIGHT = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]"
TWIST = "X[1,1,2,2]"
R2_UNKNOT = "X[4,3,1,4] X[1,3,2,2]"
HOPF = "X[1,3,2,4] X[3,1,4,2]"




def raw(d):
    """PD tuples and signs, the only inputs the oracles take."""
    return [x.edges for x in d.crossings], [x.sign for x in d.crossings]


def table(extended=False):
    return list(read_table(bundled_table(extended)))


def all_entries():
    return table(False) + table(True)


def knot(name):
    return entry_diagram(lookup(name))


@lru_cache(maxsize=None)
def lee(name):
    """Cached ``(complex, module, basis)`` for a bundled knot."""
    cx = build_complex(knot(name), LEE)
    module, basis = compute_homology(cx)
    return cx, module, basis


def random_knots(count, max_crossings, seed, min_crossings=2):
    """Seeded random braid closures that are knots, with crossing counts in range."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        strands = rng.choice((2, 3, 4))
        n = rng.randint(max(min_crossings, strands - 1), max_crossings)
        if (n - strands + 1) % 2:
            n -= 1
        if n < max(min_crossings, strands - 1):
            continue
        out.append(braid_closure(random_braid_word(rng, n, strands), strands))
    return out


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.RESULTS:
        terminalreporter.write_line(line)
