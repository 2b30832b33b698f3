import sys
from pathlib import Path

import pytest

# make sibling test helpers (oracle, genprog) importable as plain modules
sys.path.insert(0, str(Path(__file__).parent))

import elan


@pytest.fixture
def build():
    """parse + graph-build helper: build(src) -> (program, sdg)."""
    def _build(src: str, file: str = "test.mc"):
        program = elan.parse_program(src, file)
        return program, elan.build_sdg(program)
    return _build


@pytest.fixture
def likelihood_at(build):
    """likelihood_at(src, line, model=SIMPLE) for the innermost vertex."""
    def _query(src: str, line: int, model=elan.SIMPLE, file: str = "test.mc"):
        _program, sdg = build(src, file)
        vertex = sdg.vertex_at(file, line)
        return elan.LikelihoodEngine(sdg).query(vertex, model=model)
    return _query


def vertex_by_text(sdg, text):
    """The unique vertex whose display text matches exactly."""
    matches = [v for v in sdg.vertices if v.text == text]
    assert len(matches) == 1, f"{text!r} matched {len(matches)} vertices"
    return matches[0]
