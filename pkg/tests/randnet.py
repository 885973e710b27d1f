"""Seeded random netlists and the property checks shared by the property and
acceptance suites."""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from purcellkit.circuit import Netlist, NetlistBuilder, Port, discretize_line, input_admittance, s_matrix

TWO_PI = 2 * math.pi
SEED = 20240611
CASES = 1000


def random_netlist(rng: np.random.Generator) -> Netlist:
    """A passive network on 2-6 nodes with every node tied to ground.

    Lossy shunts keep the nodal system regular; the rest mixes R, L, C,
    coupled pairs and transmission lines between random node pairs.
    """
    n = int(rng.integers(2, 7))
    nodes = [f"n{i}" for i in range(n)]
    b = NetlistBuilder()
    b.node(*nodes)
    for i, a in enumerate(nodes):
        b.resistor(a, "0", float(10 ** rng.uniform(1, 4)), name=f"Rg{i}")
        b.capacitor(a, "0", float(10 ** rng.uniform(-14, -12)), name=f"Cg{i}")
    everything = nodes + ["0"]
    for j in range(int(rng.integers(1, 3 * n))):
        a, c = rng.choice(everything, size=2, replace=False)
        kind = rng.choice(["R", "L", "C", "TL", "K"])
        if kind == "R":
            b.resistor(a, c, float(10 ** rng.uniform(0, 4)), name=f"R{j}")
        elif kind == "L":
            b.inductor(a, c, float(10 ** rng.uniform(-10, -8)), name=f"L{j}")
        elif kind == "C":
            b.capacitor(a, c, float(10 ** rng.uniform(-15, -12)), name=f"C{j}")
        elif kind == "TL":
            b.line(a, c, float(rng.uniform(20, 100)), float(rng.uniform(0.1, 3.0)), TWO_PI * 5e9, name=f"T{j}")
        else:
            d, e = rng.choice(everything, size=2, replace=False)
            b.coupled_pair(
                a, c, d, e, float(10 ** rng.uniform(-10, -8)), float(10 ** rng.uniform(-10, -8)),
                float(rng.uniform(0.05, 0.95)), name=f"K{j}",
            )
    p, q = rng.choice(nodes, size=2, replace=False)
    b.port(p, z0=float(rng.uniform(25, 100)))
    b.port(q, z0=float(rng.uniform(25, 100)))
    return b.build()


def random_omegas(rng, size=7):
    return np.sort(TWO_PI * 10 ** rng.uniform(8.5, 10.3, size))


def reciprocity_violation(S) -> float:
    """Largest |S - S^T| relative to the matrix norm, over frequencies."""
    return float(max(np.max(np.abs(s - s.T)) / max(1.0, np.linalg.norm(s, 2)) for s in S))


def passivity_violation(S) -> float:
    """Most negative eigenvalue of I - S^H S (zero when passive)."""
    worst = 0.0
    for s in S:
        ev = np.linalg.eigvalsh(np.eye(s.shape[0]) - s.conj().T @ s)
        worst = min(worst, float(ev.min()))
    return -worst


def ladder_orders(rng):
    """Observed convergence order of the LC ladder towards a shorted line
    between 16 and 32 and between 32 and 64 sections."""
    z0 = float(rng.uniform(20, 100))
    theta = float(rng.uniform(0.1, 1.2))
    w = TWO_PI * 5e9
    exact = 1j * z0 * math.tan(theta)
    errs = []
    for n in (16, 32, 64):
        els, mids = discretize_line(z0, theta, w, n, a="p", b="0")
        net = Netlist(("0", "p", *mids), tuple(els), ()).with_ports([Port("p")])
        z = 1 / input_admittance(net, 0, w)
        errs.append(abs(z / exact - 1))
    return math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])


def run_properties(seed=SEED, cases=CASES, workers=8):
    """Count violations of reciprocity, passivity, second-order ladder
    convergence and concurrent/sequential equality over seeded cases."""
    rng = np.random.default_rng(seed)
    jobs = [(random_netlist(rng), random_omegas(rng)) for _ in range(cases)]
    sequential = [s_matrix(n, w) for n, w in jobs]
    with ThreadPoolExecutor(workers) as pool:
        concurrent = list(pool.map(lambda job: s_matrix(*job), jobs))
    orders = [ladder_orders(rng) for _ in range(cases)]
    return {
        "reciprocity": sum(reciprocity_violation(S) > 1e-9 for S in sequential),
        "passivity": sum(passivity_violation(S) > 1e-9 for S in sequential),
        "ladder": sum(not (1.8 <= o <= 2.2) for pair in orders for o in pair),
        "determinism": sum(not np.array_equal(a, b) for a, b in zip(sequential, concurrent)),
        "cases": cases,
    }
