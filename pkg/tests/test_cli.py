import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import json

from main import EXIT_DATA, EXIT_OK, EXIT_USAGE, run_cli


@pytest.fixture
def pipeline(tmp_path, incidence_csv):
    """Run ingest + graph on the three-row incidence list."""
    kb_path = tmp_path / "kb.json"
    graph_path = tmp_path / "graph.json"
    assert run_cli(["ingest", "--input", str(incidence_csv), "--format", "csv", "--out", str(kb_path)]) == EXIT_OK
    assert run_cli(["graph", "--kb", str(kb_path), "--mode", "intersection",
                    "--threshold", "0", "--out", str(graph_path)]) == EXIT_OK
    return kb_path, graph_path


@pytest.fixture
def path_graph_file(tmp_path):
    kb = tmp_path / "path.csv"
    kb.write_text("a,g1\nb,g1\nb,g2\nc,g2\n")
    kb_path = tmp_path / "path-kb.json"
    graph_path = tmp_path / "path-graph.json"
    assert run_cli(["ingest", "--input", str(kb), "--out", str(kb_path)]) == EXIT_OK
    assert run_cli(["graph", "--kb", str(kb_path), "--out", str(graph_path)]) == EXIT_OK
    return graph_path


def stdout_of(capsysbinary, argv):
    code = run_cli(argv)
    return code, capsysbinary.readouterr().out


# ============================================
# PIPELINE GOLDEN FILES
# ============================================

def test_pipeline_graph_has_one_edge(pipeline, capsysbinary):
    """Verify only the shared g2 produces an edge"""
    _, graph_path = pipeline

    code, out = stdout_of(capsysbinary, ["export", "--graph", str(graph_path), "--format", "csv"])

    assert code == EXIT_OK
    assert out == b"source,target,weight\na1,a2,1\n"


def test_pipeline_graph_artifact(pipeline):
    """Verify the persisted graph bytes"""
    _, graph_path = pipeline

    assert graph_path.read_bytes() == (
        b'{"vertices":["a1","a2"],"edges":[{"source":"a1","target":"a2","weight":1.0}],'
        b'"weight_mode":"intersection","threshold":0.0}\n'
    )


def test_pipeline_edge_json(pipeline, capsysbinary):
    """Verify the default edge-json export"""
    _, graph_path = pipeline

    _, out = stdout_of(capsysbinary, ["export", "--graph", str(graph_path)])

    assert out == b'{"vertices":["a1","a2"],"edges":[{"source":"a1","target":"a2","weight":1.0}]}\n'


def test_pipeline_export_to_file(pipeline, tmp_path):
    """Verify --out writes the export to a file"""
    _, graph_path = pipeline
    out = tmp_path / "graph.dot"

    assert run_cli(["export", "--graph", str(graph_path), "--format", "dot", "--out", str(out)]) == EXIT_OK
    assert out.read_text().count(" -- ") == 1


def test_stats(pipeline, capsysbinary):
    """Verify stats prints the graph statistics as JSON"""
    _, graph_path = pipeline

    code, out = stdout_of(capsysbinary, ["stats", "--graph", str(graph_path)])

    assert code == EXIT_OK
    assert out == (
        b'{"order":2,"size":1,"degree_histogram":[0,2],'
        b'"component_count":1,"largest_component_size":2}\n'
    )


def test_stats_triangle(tmp_path, capsysbinary):
    """Verify the triangle reports order 3 and size 3"""
    kb = tmp_path / "tri.csv"
    kb.write_text("a,g1\nb,g1\nc,g1\n")
    kb_path, graph_path = tmp_path / "kb.json", tmp_path / "g.json"
    run_cli(["ingest", "--input", str(kb), "--out", str(kb_path)])
    run_cli(["graph", "--kb", str(kb_path), "--out", str(graph_path)])

    _, out = stdout_of(capsysbinary, ["stats", "--graph", str(graph_path)])

    assert b'"order":3,"size":3' in out


def test_overlap_command(pipeline, capsysbinary):
    """Verify the overlap csv"""
    kb_path, _ = pipeline

    _, out = stdout_of(capsysbinary, ["overlap", "--kb", str(kb_path)])

    assert out == b"source,target,overlap\na1,a2,1\n"


def test_generator_projection(pipeline, tmp_path, capsysbinary):
    """Verify --project generators links g1 and g2 through a1"""
    kb_path, _ = pipeline
    graph_path = tmp_path / "gens.json"

    assert run_cli(["graph", "--kb", str(kb_path), "--project", "generators", "--out", str(graph_path)]) == EXIT_OK
    _, out = stdout_of(capsysbinary, ["export", "--graph", str(graph_path), "--format", "csv"])

    assert out == b"source,target,weight\ng1,g2,1\n"


# ============================================
# SIMULATION
# ============================================

def test_simulate_trace_csv(path_graph_file, capsysbinary):
    """Verify the path wavefront as a csv trace"""
    code, out = stdout_of(capsysbinary, ["simulate", "--graph", str(path_graph_file), "--model", "si",
                                         "--seeds", "a", "--trace-format", "csv"])

    assert code == EXIT_OK
    assert out == b"round,actor_id\n0,a\n1,b\n2,c\n"


def test_simulate_twice_is_byte_identical(tmp_path, capsysbinary):
    """Verify identical flags write identical trace files"""
    kb = tmp_path / "w.csv"
    kb.write_text("a,g1\na,g2\nb,g1\nc,g2\nc,g3\nd,g3\nd,g4\ne,g4\n")
    kb_path, graph_path = tmp_path / "kb.json", tmp_path / "g.json"
    run_cli(["ingest", "--input", str(kb), "--out", str(kb_path)])
    run_cli(["graph", "--kb", str(kb_path), "--mode", "normalized", "--out", str(graph_path)])
    flags = ["simulate", "--graph", str(graph_path), "--model", "ic", "--seeds", "a",
             "--transmission", "scaled", "--lambda", "0.8", "--rounds", "10", "--rng-seed", "18446744073709551615"]
    first, second = tmp_path / "t1.json", tmp_path / "t2.json"

    assert run_cli(flags + ["--out", str(first)]) == EXIT_OK
    assert run_cli(flags + ["--out", str(second)]) == EXIT_OK

    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_bytes())["config_echo"]["rng_seed"] == 2**64 - 1


def test_simulate_with_trials_prints_estimates(path_graph_file, tmp_path, capsysbinary):
    """Verify --trials adds Monte Carlo estimates on stdout"""
    trace = tmp_path / "t.json"

    code, out = stdout_of(capsysbinary, ["simulate", "--graph", str(path_graph_file), "--seeds", "a",
                                         "--trials", "5", "--workers", "2", "--out", str(trace)])

    assert code == EXIT_OK
    assert json.loads(out) == {"estimates": {"a": 1.0, "b": 1.0, "c": 1.0}, "trials": 5}
    assert json.loads(trace.read_bytes())["final_infected"] == ["a", "b", "c"]


def test_trace_root(path_graph_file, capsysbinary):
    """Verify trace-root ranks candidates as JSON"""
    code, out = stdout_of(capsysbinary, ["trace-root", "--graph", str(path_graph_file),
                                         "--infected", "c,a,b", "--trials", "5", "--rng-seed", "1"])

    assert code == EXIT_OK
    assert json.loads(out) == [
        {"actor": "a", "score": 1.0},
        {"actor": "b", "score": 1.0},
        {"actor": "c", "score": 1.0},
    ]


# ============================================
# KNOWLEDGE QUERIES
# ============================================

def test_mass(pipeline, capsysbinary):
    """Verify the literal mass distribution of a1"""
    kb_path, _ = pipeline

    _, out = stdout_of(capsysbinary, ["mass", "--kb", str(kb_path), "--actor", "a1"])

    assert json.loads(out) == {"g1": 0.5, "g2": 0.5}


def test_shared(pipeline, capsysbinary):
    """Verify the generators a1 and a2 share"""
    kb_path, _ = pipeline

    _, out = stdout_of(capsysbinary, ["shared", "--kb", str(kb_path), "--a", "a1", "--b", "a2"])

    assert json.loads(out) == [{"generator": "g2", "weight": 1.0}]


def test_models(pipeline, tmp_path, capsysbinary):
    """Verify mod(Σ) for an explicit Σ and for an actor"""
    kb_path, _ = pipeline
    universe = tmp_path / "u.json"
    universe.write_text(json.dumps({
        "situations": ["m1", "m2", "m3"],
        "satisfies": {"m1": ["g1", "g2"], "m2": ["g2"]},
    }))

    _, out = stdout_of(capsysbinary, ["models", "--universe", str(universe), "--sigma", "g2"])
    assert json.loads(out) == {"situations": ["m1", "m2"], "size": 2}

    _, out = stdout_of(capsysbinary, ["models", "--universe", str(universe), "--kb", str(kb_path), "--actor", "a1"])
    assert json.loads(out) == {"situations": ["m1"], "size": 1}


# ============================================
# EXIT CODES
# ============================================

@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["stats"],
    ["stats", "--graph", "g.json", "--bogus"],
    ["simulate", "--graph", "g.json", "--seeds", "a", "--rounds", "0"],
    ["simulate", "--graph", "g.json", "--seeds", "a", "--rng-seed", "-1"],
    ["graph", "--kb", "kb.json", "--mode", "sideways", "--out", "g.json"],
])
def test_usage_errors_exit_1(argv, capsys):
    """Verify bad flags and subcommands exit 1 with usage text"""
    assert run_cli(argv) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_models_actor_without_kb(tmp_path, capsys):
    """Verify --actor without --kb is a usage error"""
    universe = tmp_path / "u.json"
    universe.write_text('{"situations":["m1"]}')

    assert run_cli(["models", "--universe", str(universe), "--actor", "a1"]) == EXIT_USAGE


def test_bad_weight_exits_2(tmp_path, caplog):
    """Verify a data error exits 2 and names the offending line"""
    bad = tmp_path / "bad.csv"
    bad.write_text("a1,g1,1.5\n")

    code = run_cli(["ingest", "--input", str(bad), "--out", str(tmp_path / "kb.json")])

    assert code == EXIT_DATA
    assert f"{bad}:1:" in caplog.text


@pytest.mark.parametrize("fmt,payload", [
    ("csv", b"a1,g\xff\n"),
    ("json", b'[{"actor_id": "a1", "generator_id": "g\xff"}]'),
])
def test_invalid_utf8_exits_2(tmp_path, caplog, fmt, payload):
    """Verify undecodable input is a data error naming the file"""
    bad = tmp_path / f"bad.{fmt}"
    bad.write_bytes(payload)

    code = run_cli(["ingest", "--input", str(bad), "--format", fmt, "--out", str(tmp_path / "kb.json")])

    assert code == EXIT_DATA
    assert f"{bad}:1: not valid UTF-8" in caplog.text
    assert not (tmp_path / "kb.json").exists()


def test_simulate_trials_without_out_is_usage_error(path_graph_file, capsys):
    """Verify --trials needs --out so stdout holds a single JSON document"""
    code = run_cli(["simulate", "--graph", str(path_graph_file), "--seeds", "a", "--trials", "5"])

    captured = capsys.readouterr()
    assert code == EXIT_USAGE
    assert captured.out == ""
    assert "--trials requires --out" in captured.err


def test_missing_input_exits_2(tmp_path):
    """Verify a missing file is a data error"""
    assert run_cli(["stats", "--graph", str(tmp_path / "missing.json")]) == EXIT_DATA


def test_unknown_seed_exits_2(path_graph_file, caplog):
    """Verify an unknown seed is a data error naming the seed"""
    code = run_cli(["simulate", "--graph", str(path_graph_file), "--seeds", "zz"])

    assert code == EXIT_DATA
    assert "unknown seed actor" in caplog.text


def test_proportional_on_count_graph_exits_2(path_graph_file):
    """Verify proportional transmission needs a normalized graph"""
    assert run_cli(["simulate", "--graph", str(path_graph_file), "--seeds", "a",
                    "--transmission", "proportional"]) == EXIT_DATA


def test_data_never_reaches_stderr(pipeline, capsysbinary):
    """Verify diagnostics and data use separate streams"""
    _, graph_path = pipeline

    run_cli(["--log-level", "INFO", "export", "--graph", str(graph_path), "--format", "csv"])
    captured = capsysbinary.readouterr()

    assert captured.out == b"source,target,weight\na1,a2,1\n"
    assert b"source,target" not in captured.err
