import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from core_model import KnowledgeBase
from graph_builder import KnowledgeGraph, WeightMode


@pytest.fixture
def path_graph():
    """a – b – c with unit weights."""
    return KnowledgeGraph.from_edges("abc", [("a", "b", 1.0), ("b", "c", 1.0)])


@pytest.fixture
def triangle_graph():
    return KnowledgeGraph.from_edges("abc", [("a", "b", 1.0), ("a", "c", 2.0), ("b", "c", 1.0)])


@pytest.fixture
def isolated_kb():
    """a and b share g2; c shares nothing."""
    return KnowledgeBase.build({"a": {"g1": 1.0, "g2": 1.0}, "b": {"g2": 1.0, "g3": 1.0}, "c": {"g4": 1.0}})


@pytest.fixture
def two_node_half():
    return KnowledgeGraph.from_edges("ab", [("a", "b", 0.5)], weight_mode=WeightMode.NORMALIZED)


@pytest.fixture
def incidence_csv(tmp_path):
    path = tmp_path / "incidence.csv"
    path.write_text("a1,g1\na1,g2\na2,g2")
    return path
