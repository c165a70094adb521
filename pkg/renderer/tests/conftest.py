"""Shared paths and the golden-file map used across the renderer tests."""

from pathlib import Path

import pytest

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# template id -> golden CSV produced by the matching simulation scenario
GOLDEN_FOR = {
    "fig2": "expansion.csv",
    "fig4": "eigenstate_quench.csv",
    "fig5": "entanglement.csv",
    "fig6": "pure_thermal.csv",
    "fig7": "entropy_vs_energy.csv",
    "fig8": "s_ex_bins.csv",
    "fig9": "entropy_vs_energy.csv",
}


@pytest.fixture
def golden():
    def _lookup(template_id: str) -> Path:
        return GOLDEN_DIR / GOLDEN_FOR[template_id]
    return _lookup
