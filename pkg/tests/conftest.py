import random

import pytest

from revlaw.bitstring import BitString
from revlaw.revcircuit import CNOT, FREDKIN, NOT, TOFFOLI, Circuit

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion reported in the summary")


def pytest_runtest_logreport(report):
    label = report.user_properties and dict(report.user_properties).get("acceptance")
    if not label:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _ACCEPTANCE.get(label)
        if prev != "FAIL":
            _ACCEPTANCE[label] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(f"{_ACCEPTANCE[label]}  {label}")


@pytest.fixture(autouse=True)
def _acceptance_label(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker:
        request.node.user_properties.append(("acceptance", marker.args[0]))


def random_bits(rng: random.Random, n: int) -> BitString:
    return BitString.from_int(rng.getrandbits(n), n) if n else BitString()


def random_gate_circuit(rng: random.Random, width: int, gates: int) -> Circuit:
    """Random circuit mixing every gate kind that fits the width."""
    makers = [(NOT, 1), (CNOT, 2), (TOFFOLI, 3), (FREDKIN, 3)]
    usable = [(m, k) for m, k in makers if k <= width]
    out = []
    for _ in range(gates):
        make, k = rng.choice(usable)
        out.append(make(*rng.sample(range(width), k)))
    return Circuit(width, tuple(out))


def random_fredkin_circuit(rng: random.Random, width: int, gates: int) -> Circuit:
    return Circuit(width, tuple(FREDKIN(*rng.sample(range(width), 3)) for _ in range(gates)))
