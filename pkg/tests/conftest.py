from __future__ import annotations

import numpy as np
import pytest

from torusvisc.experiments import example1_problem
from torusvisc.problem import ProblemSpec


def closed_form_linear(x, eps=0.0):
    """Solution of ``-eps u'' + u' + 2u = sin x``; eps = 0 gives the first-order solution."""
    k = 2.0 + eps
    return (k * np.sin(x) - np.cos(x)) / (k * k + 1)


def example1_branches(x, beta=0.1, alpha=0.5):
    """Closed-form U and the two roots of the quadratic substitution (K=10, f=2+sin)."""
    U = 0.2 + (10 * np.sin(x) - np.cos(x)) / 101
    a = beta * (1 + alpha * np.cos(x))
    root = np.sqrt(1 + 2 * a * U)
    return U, (-1 + root) / a, (-1 - root) / a


@pytest.fixture(scope="session")
def linear_problem():
    return ProblemSpec.from_strings(1, "1", "2", "sin(x1)", n=512)


@pytest.fixture(scope="session")
def ex1_problem():
    return example1_problem()


ACCEPTANCE_LINES: dict[int, list[str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Store one PASS/FAIL line; it is printed in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.setdefault(number, []).append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            for line in ACCEPTANCE_LINES[k]:
                terminalreporter.write_line(line)
