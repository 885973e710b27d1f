"""Lumped LC ladder approximation of a lossless line.

Used as an independent check on the exact line stamp.
"""

from ..errors import InvalidNetlist
from .netlist import Element


def discretize_line(z0, theta_ref, omega_ref, sections, a="a", b="b", prefix="seg", ground="0"):
    """Return ``(elements, internal_nodes)`` for an ``sections``-stage
    symmetric T ladder between nodes ``a`` and ``b``.

    Total series inductance is ``z0 * theta_ref / omega_ref`` and total
    shunt capacitance ``theta_ref / (z0 * omega_ref)``; each stage is
    L/2N - C/N - L/2N, with adjacent half inductors merged.
    """
    if int(sections) != sections or sections < 1:
        raise InvalidNetlist(f"sections must be a positive integer, got {sections!r}")
    if min(z0, theta_ref, omega_ref) <= 0:
        raise InvalidNetlist("z0, theta_ref and omega_ref must be positive")
    n = int(sections)
    L = z0 * theta_ref / omega_ref
    C = theta_ref / (z0 * omega_ref)
    mids = [f"{prefix}_m{i}" for i in range(n)]
    elements = []
    chain = [a] + [x for m in mids for x in (m,)] + [b]
    # series inductors: half at each end, full between stages
    for i in range(n + 1):
        Ls = L / (2 * n) if i in (0, n) else L / n
        elements.append(Element(f"{prefix}_L{i}", "L", (chain[i], chain[i + 1]), {"L": Ls}))
    for i, m in enumerate(mids):
        elements.append(Element(f"{prefix}_C{i}", "C", (m, ground), {"C": C / n}))
    return elements, mids
