import json
from pathlib import Path

import pytest

from splitcut.cli import main
from splitcut.graph import benchmark_graph, graph_to_text, load_graph
from splitcut.harness import (
    CSV_HEADER,
    ExperimentSpec,
    overhead,
    read_results,
    run_experiment,
)

SMALL_SPEC = dict(
    graph="cycle4",
    arms=["original", "pruned_only", "split"],
    k=2,
    edges_per_flavor=1,
    p_layers=[1],
    seeds=[0, 1],
    backends=["ideal1", "ideal2"],
    shots=256,
    iterations=8,
)


@pytest.fixture(scope="module")
def small_result(tmp_path_factory):
    out = tmp_path_factory.mktemp("exp")
    spec = ExperimentSpec.from_dict(SMALL_SPEC)
    return run_experiment(spec, out_dir=out), out


class TestSpec:
    def test_from_dict_round_trip(self):
        spec = ExperimentSpec.from_dict(SMALL_SPEC)
        assert spec.graph == "cycle4"
        assert spec.p_layers == (1,)
        assert spec.seeds == (0, 1)

    def test_requires_an_arm(self):
        with pytest.raises(ValueError):
            ExperimentSpec.from_dict(dict(SMALL_SPEC, arms=[]))

    def test_unknown_arm_rejected(self):
        with pytest.raises(ValueError):
            ExperimentSpec.from_dict(dict(SMALL_SPEC, arms=["originale"]))

    def test_requires_seeds(self):
        with pytest.raises(ValueError):
            ExperimentSpec.from_dict(dict(SMALL_SPEC, seeds=[]))

    def test_explicit_removed_sets(self):
        spec = ExperimentSpec.from_dict(
            dict(SMALL_SPEC, removed_sets=[[[0, 1]], [[1, 2]]])
        )
        assert spec.removed_sets == (((0, 1),), ((1, 2),))


class TestRunExperiment:
    def test_row_per_arm_and_layer(self, small_result):
        result, _ = small_result
        assert len(result.rows) == 3
        assert [r["arm"] for r in result.rows] == ["original", "pruned_only", "split"]
        assert all(r["n_seeds"] == 2 for r in result.rows)
        assert all(0.0 <= r["mean_ar"] <= 1.0 for r in result.rows)
        assert result.ok

    def test_traces_cover_all_cells(self, small_result):
        result, _ = small_result
        assert set(result.traces) == {
            (arm, 1, seed) for arm in ("original", "pruned_only", "split") for seed in (0, 1)
        }

    def test_output_files_written(self, small_result):
        _, out = small_result
        assert (out / "results.csv").exists()
        assert (out / "overhead.json").exists()
        assert (out / "adversary.json").exists()
        assert sorted(p.name for p in (out / "traces").iterdir()) == [
            "original_p1_seed0.jsonl", "original_p1_seed1.jsonl",
            "pruned_only_p1_seed0.jsonl", "pruned_only_p1_seed1.jsonl",
            "split_p1_seed0.jsonl", "split_p1_seed1.jsonl",
        ]
        assert sorted(p.name for p in (out / "circuits").iterdir()) == [
            "original_p1.txt", "pruned_only_p1.txt",
            "split_p1_flavor0.txt", "split_p1_flavor1.txt",
        ]

    def test_written_circuits_are_the_wire_artifacts(self, small_result):
        from splitcut.adversary import extract_graph
        from splitcut.circuit import parse

        _, out = small_result
        g = benchmark_graph("cycle4")
        full = (out / "circuits" / "original_p1.txt").read_text()
        assert parse(full).num_qubits == 4
        assert extract_graph(full).recovered_graph == g
        for name in ("split_p1_flavor0.txt", "split_p1_flavor1.txt"):
            flavor_text = (out / "circuits" / name).read_text()
            recovered = extract_graph(flavor_text).recovered_graph
            assert set(recovered.edges) < set(g.edges)
            # width never betrays the pruning
            assert flavor_text.splitlines()[0] == "qubits 4"

    def test_csv_round_trips_through_bundled_reader(self, small_result):
        result, out = small_result
        rows = read_results(out / "results.csv")
        assert len(rows) == len(result.rows)
        for read, orig in zip(rows, result.rows):
            assert read["arm"] == orig["arm"]
            assert read["mean_ar"] == pytest.approx(orig["mean_ar"], abs=1e-6)

    def test_csv_header_schema(self, small_result):
        _, out = small_result
        first = (out / "results.csv").read_text().splitlines()[0]
        assert first == ",".join(CSV_HEADER)

    def test_adversary_report_strict_subsets(self, small_result):
        _, out = small_result
        payload = json.loads((out / "adversary.json").read_text())
        g = benchmark_graph("cycle4")
        for rep in payload["split_p1"]:
            assert len(rep["edges"]) < len(g.edges)

    def test_bit_exact_reproduction(self, tmp_path):
        spec = ExperimentSpec.from_dict(SMALL_SPEC)
        run_experiment(spec, out_dir=tmp_path / "a")
        run_experiment(spec, out_dir=tmp_path / "b")
        for name in ("results.csv", "overhead.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        for sub in ("traces", "circuits"):
            for item in sorted((tmp_path / "a" / sub).iterdir()):
                twin = tmp_path / "b" / sub / item.name
                assert item.read_bytes() == twin.read_bytes()

    def test_graph_file_input(self, tmp_path):
        path = tmp_path / "ring.graph"
        path.write_text(graph_to_text(benchmark_graph("cycle4")))
        spec = ExperimentSpec.from_dict(
            dict(SMALL_SPEC, graph=str(path), arms=["original"], seeds=[0])
        )
        result = run_experiment(spec)
        assert result.graph_label == "ring"
        assert result.rows[0]["n_seeds"] == 1

    def test_invariant_failures_poison_ok_cell_failures_do_not(self, small_result):
        from splitcut.harness import ExperimentResult

        result, _ = small_result
        base = dict(spec=result.spec, graph_label="x", rows=[], traces={},
                    overhead=result.overhead)
        cell = ExperimentResult(**base, failures=[
            {"arm": "split", "p": 1, "seed": 0, "kind": "cell", "error": "boom"}])
        assert cell.ok
        inv = ExperimentResult(**base, failures=[
            {"arm": "split", "p": 1, "seed": 0, "kind": "invariant", "error": "leak"}])
        assert not inv.ok

    def test_noisy_spec_marks_sim_column(self):
        spec = ExperimentSpec.from_dict(dict(
            SMALL_SPEC, arms=["original"], backends=["hw1", "hw2"], seeds=[0],
            iterations=4, shots=128,
        ))
        result = run_experiment(spec)
        assert result.rows[0]["sim"] == "noisy"


class TestOverhead:
    def test_two_layer_doubles_problem_two_qubit_gates(self):
        spec = ExperimentSpec.from_dict(dict(SMALL_SPEC, arms=["original"], p_layers=[1, 2]))
        report = overhead(spec)
        by_p = {entry["p"]: entry for entry in report.arms}
        assert by_p[2]["per_backend"][0]["gates_2q"] == 2 * by_p[1]["per_backend"][0]["gates_2q"]

    def test_split_sees_fewer_gates_per_backend(self):
        spec = ExperimentSpec.from_dict(SMALL_SPEC)
        report = overhead(spec)
        entries = {e["arm"]: e for e in report.arms}
        orig_2q = entries["original"]["per_backend"][0]["gates_2q"]
        for backend_stats in entries["split"]["per_backend"]:
            assert backend_stats["gates_2q"] < orig_2q

    def test_spsa_evaluation_count(self):
        spec = ExperimentSpec.from_dict(dict(SMALL_SPEC, arms=["original"], iterations=50))
        report = overhead(spec)
        assert report.arms[0]["total_shot_evaluations"] == 101  # 2 per iteration + audit

    def test_relative_cost_against_pruned_baseline(self):
        spec = ExperimentSpec.from_dict(dict(SMALL_SPEC, iterations=50))
        report = overhead(spec)
        entries = {e["arm"]: e for e in report.arms}
        assert report.baseline["gates_2q"] == 6  # 3 edges after single-edge prune at p=1
        assert entries["pruned_only"]["relative_cost"] == pytest.approx(1.0)
        assert entries["original"]["relative_cost"] > 1.0

    def test_actual_evaluations_used_after_run(self, small_result):
        result, _ = small_result
        entries = {e["arm"]: e for e in result.overhead.arms}
        # 8 iterations, spsa: 16 evals for single-backend arms, 8+8 for split
        assert entries["original"]["total_shot_evaluations"] == 17
        split_evals = {b["backend"]: b["evaluations"] for b in entries["split"]["per_backend"]}
        assert split_evals == {"ideal1": 8, "ideal2": 8}


class TestCli:
    def test_graph_gen_and_show(self, tmp_path, capsys):
        out = tmp_path / "g.graph"
        assert main(["graph", "gen", "--id", "cycle4", "--out", str(out)]) == 0
        assert load_graph(out) == benchmark_graph("cycle4")
        assert main(["graph", "show", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "max cut: 4" in printed

    def test_adversary_effort_command(self, capsys):
        assert main(["adversary", "effort", "--nodes", "10", "--observed", "9"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["worst_case_trials"] == 2**36

    def test_adversary_extract_and_merge(self, tmp_path, capsys):
        from splitcut.circuit import ParamVector, build_qaoa, serialize
        from splitcut.obfuscation import prune

        g = benchmark_graph("cycle4")
        reports = []
        for i, edge in enumerate([(0, 1), (1, 2)]):
            circ_file = tmp_path / f"c{i}.txt"
            circ_file.write_text(serialize(build_qaoa(prune(g, [edge]), ParamVector((0.3,), (0.2,)))))
            report_file = tmp_path / f"r{i}.json"
            assert main(["adversary", "extract", "--circuit", str(circ_file),
                         "--out", str(report_file)]) == 0
            reports.append(str(report_file))
        payload = json.loads(Path(reports[0]).read_text())
        assert len(payload["edges"]) == 3
        assert "summary" in payload
        assert main(["adversary", "merge", *reports]) == 0
        merged = json.loads(capsys.readouterr().out)
        assert sorted(tuple(e) for e in merged["edges"]) == list(benchmark_graph("cycle4").edges)

    def test_run_command(self, tmp_path, capsys):
        config = tmp_path / "spec.json"
        config.write_text(json.dumps(dict(SMALL_SPEC, seeds=[0], iterations=4, shots=128)))
        out = tmp_path / "results"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "results.csv").exists()

    def test_run_command_seed_override(self, tmp_path, capsys):
        config = tmp_path / "spec.json"
        config.write_text(json.dumps(dict(SMALL_SPEC, arms=["original"], iterations=4, shots=128)))
        assert main(["run", "--config", str(config), "--seed", "3"]) == 0
        assert "(1 seeds)" in capsys.readouterr().out

    def test_overhead_command(self, tmp_path, capsys):
        config = tmp_path / "spec.json"
        config.write_text(json.dumps(SMALL_SPEC))
        assert main(["overhead", "--config", str(config)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert "baseline" in payload

    def test_sweep_command_overrides_p(self, tmp_path, capsys):
        config = tmp_path / "spec.json"
        config.write_text(json.dumps(dict(
            SMALL_SPEC, arms=["split"], seeds=[0], iterations=4, shots=128,
        )))
        assert main(["sweep", "--config", str(config), "--p", "1,2"]) == 0
        printed = capsys.readouterr().out
        assert "p=1" in printed and "p=2" in printed
