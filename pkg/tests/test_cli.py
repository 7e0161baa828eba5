import json
import subprocess
import sys
from pathlib import Path

from sftkit.cli import MACHINE_HEADER, main

DATA = Path(__file__).parent / "data"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def machine_payload(out: str) -> dict:
    header, _, body = out.partition("\n")
    assert header == MACHINE_HEADER
    return json.loads(body)


def test_cz_rotation(capsys):
    code, out, _ = run_cli(capsys, "cz", "--rotation", "1.3")
    assert code == 0 and out == "3\n"


def test_cz_rotation_machine(capsys):
    code, out, _ = run_cli(capsys, "--format", "machine", "cz", "--rotation", "1.3")
    assert code == 0
    assert machine_payload(out) == {"op": "rotation", "value": 3}


def test_cz_degenerate_exit_code(capsys):
    code, _, err = run_cli(capsys, "cz", "--rotation", "2")
    assert code == 2
    assert "DegeneratePath" in err


def test_cz_shear_and_sum(capsys):
    code, out, _ = run_cli(capsys, "cz", "--shear", "3", "2")
    assert code == 0 and out == "11/2\n"
    code, out, _ = run_cli(capsys, "cz", "--sum", "3,2")
    assert code == 0 and out == "5\n"


def test_energy_admissible(capsys):
    code, out, _ = run_cli(capsys, "energy", "--r-plus", "2", "--r-minus", "1",
                           "--energy", "1/2")
    assert code == 0 and out == "true\n"
    code, out, _ = run_cli(capsys, "energy", "--r-plus", "1", "--r-minus", "1",
                           "--energy", "0", "--relaxed")
    assert code == 0 and out == "true\n"


def test_energy_glue_refusal(capsys):
    code, _, err = run_cli(capsys, "energy", "--glue", "0.3", "0.4")
    assert code == 2 and "NotSupported" in err


def test_dga_check_broken_names_generator(capsys):
    code, _, err = run_cli(capsys, "dga", str(DATA / "broken.json"), "--check")
    assert code == 2
    assert "d^2(a)" in err


def test_dga_check_good(capsys):
    code, out, _ = run_cli(capsys, "dga", str(DATA / "orbit_qu.json"),
                           "--check", "--bidegree")
    assert code == 0
    assert "d^2 = 0" in out and "bidegree" in out


def test_dga_homology_window(capsys):
    code, out, _ = run_cli(capsys, "dga", str(DATA / "exact_pair.json"),
                           "--homology", "0..4")
    assert code == 0
    assert out.splitlines() == [
        "H_0: rank 1", "H_1: rank 0", "H_2: rank 0", "H_3: rank 0", "H_4: rank 0",
    ]


def test_dga_linearize_with_homology(capsys):
    code, out, _ = run_cli(capsys, "dga", str(DATA / "exact_pair.json"),
                           "--linearize", "zero", "--homology", "1..2")
    assert code == 0
    assert out.splitlines() == ["H_1: rank 0", "H_2: rank 0"]


def test_dga_set_u_roundtrip(capsys):
    code, out, _ = run_cli(capsys, "--format", "machine", "dga",
                           str(DATA / "orbit_qu.json"), "--set-u", "0")
    assert code == 0
    payload = machine_payload(out)
    assert payload["ring"] == "Q"
    from sftkit.dga import dga_from_doc

    evaluated = dga_from_doc(payload)
    assert evaluated.d_of_generator("r").is_zero()


def test_missing_file_is_io_error(capsys):
    code, _, err = run_cli(capsys, "dga", "/does/not/exist.json", "--check")
    assert code == 1 and err


def test_unknown_flag_is_parse_error(capsys):
    code, _, err = run_cli(capsys, "cz", "--no-such-flag")
    assert code == 1 and err


def test_cyclic_window(capsys):
    code, out, _ = run_cli(capsys, "cyclic", str(DATA / "acyclic_unit.json"),
                           "--window", "1..5")
    assert code == 0
    assert out.splitlines() == [
        "HC_1: rank 1", "HC_2: rank 0", "HC_3: rank 1", "HC_4: rank 0", "HC_5: rank 1",
    ]


def test_model_ranks_table(capsys):
    code, out, _ = run_cli(capsys, "model", "ranks", "--n", "5", "--N", "12")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["k", "rank"]
    table = {int(l.split()[0]): l.split()[1] for l in lines[1:]}
    assert table[6] == "Q+Q" and table[2] == "Q" and table[3] == "0"


def test_model_hc(capsys):
    code, out, _ = run_cli(capsys, "model", "hc", "--n", "4")
    assert code == 0
    assert "rank 1 at bidegree (8, 2)" in out
    assert "class b1*b1" in out


def test_model_odd_dimension_exit(capsys):
    code, _, err = run_cli(capsys, "model", "hc", "--n", "5")
    assert code == 2 and "OddDimension" in err


def test_trees_pipeline(tmp_path, capsys):
    doc = {
        "vertices": [
            {"id": "v1", "level": [0, 0], "s": 2, "representable": True, "ends_in_v": False},
            {"id": "v2", "level": [0, 0], "s": -1, "representable": True, "ends_in_v": True},
        ],
        "edges": [
            {"id": "in", "src": None, "dst": "v1",
             "orbit": {"name": "h", "in_v": False, "p_n": 0, "period": 1.0, "link": None, "level": 0}},
            {"id": "mid", "src": "v1", "dst": "v2",
             "orbit": {"name": "g", "in_v": True, "p_n": 1, "period": 1.0, "link": None, "level": 0}},
            {"id": "out", "src": "v2", "dst": None,
             "orbit": {"name": "g", "in_v": True, "p_n": 1, "period": 1.0, "link": None, "level": 0}},
        ],
    }
    path = tmp_path / "forest.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "trees", "intersection", str(path))
    assert code == 0 and out == "2\n"
    code, out, _ = run_cli(capsys, "trees", "psi", str(path))
    assert code == 0 and out == "U^3\n"
    code, out, _ = run_cli(capsys, "trees", "psi-reduced", str(path))
    assert code == 0 and out == "0\n"
    code, out, _ = run_cli(capsys, "trees", "aut", str(path))
    assert code == 0 and out == "1\n"
    code, out, _ = run_cli(capsys, "--format", "machine", "trees", "contract",
                           str(path), "--edge", "mid")
    assert code == 0
    payload = machine_payload(out)
    assert len(payload["vertices"]) == 1
    assert payload["vertices"][0]["s"] == 2

    # machine round trip: re-parse and re-emit identical bytes
    from sftkit.trees import forest_from_doc, forest_to_doc

    assert forest_to_doc(forest_from_doc(payload)) == payload


def test_trees_psi_mixed_inadmissible(tmp_path, capsys):
    doc = {
        "vertices": [{"id": "v", "level": [0, 0], "s": 0,
                      "representable": True, "ends_in_v": False}],
        "edges": [{"id": "in", "src": None, "dst": "v",
                   "orbit": {"name": "h", "in_v": False, "p_n": 0,
                             "period": 1.0, "link": None, "level": 0}}],
    }
    path = tmp_path / "plane.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "trees", "psi-mixed", str(path),
                           "--r-plus", "1", "--r-minus", "1",
                           "--energy", "0", "--r-min", "10")
    assert code == 2 and "InadmissibleParameters" in err
    code, out, _ = run_cli(capsys, "trees", "psi-mixed", str(path),
                           "--r-plus", "4", "--r-minus", "1",
                           "--energy", "0", "--r-min", "1")
    assert code == 0 and out == "1\n"


def test_cz_crossing_flag(capsys):
    code, out, _ = run_cli(capsys, "cz", "--crossing", "2.4")
    assert code == 0 and out == "5\n"


def test_cz_gamma1_flag(capsys):
    code, out, _ = run_cli(capsys, "cz", "--gamma1", "1", "10", "2")
    assert code == 0 and out == "3\n"


def test_energy_type_a_and_b(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "energy", "--type-a", "7/10", "1/2")
    assert code == 0 and out == "6/5\n"
    samples = tmp_path / "b.json"
    samples.write_text(json.dumps({"samples": [[0, "1/2", 0, 0, "1/2"],
                                               [1, "1/4", 0, 0, "1/4"]]}))
    code, out, _ = run_cli(capsys, "energy", "--type-b", str(samples))
    assert code == 0
    assert out.splitlines()[0] == "1"


def test_dga_linearize_eps_file(tmp_path, capsys):
    doc = {
        "ring": "Q", "mode": "commutative",
        "generators": [
            {"name": "x", "deg": 2, "link": None, "good": True, "kind": "orbit"},
            {"name": "y", "deg": 1, "link": None, "good": True, "kind": "orbit"},
            {"name": "z", "deg": 0, "link": None, "good": True, "kind": "orbit"},
        ],
        "differential": {"x": [{"coeff": "1", "upow": 0, "word": ["y"]},
                               {"coeff": "1", "upow": 0, "word": ["y", "z"]}]},
    }
    algebra = tmp_path / "dga.json"
    algebra.write_text(json.dumps(doc))
    eps = tmp_path / "eps.json"
    eps.write_text(json.dumps({"z": "1"}))
    code, out, _ = run_cli(capsys, "dga", str(algebra),
                           "--linearize", str(eps), "--homology", "1..2")
    assert code == 0
    assert out.splitlines() == ["H_1: rank 0", "H_2: rank 0"]


def test_trees_concat_cli(tmp_path, capsys):
    upper = {
        "vertices": [{"id": "u", "level": [0, 0], "s": 1,
                      "representable": True, "ends_in_v": False}],
        "edges": [
            {"id": "in", "src": None, "dst": "u",
             "orbit": {"name": "h", "in_v": False, "p_n": 0, "period": 1.0,
                       "link": None, "level": 0}},
            {"id": "out", "src": "u", "dst": None,
             "orbit": {"name": "g", "in_v": True, "p_n": 1, "period": 1.0,
                       "link": None, "level": 0}},
        ],
    }
    lower = {
        "vertices": [{"id": "w", "level": [0, 0], "s": 0,
                      "representable": True, "ends_in_v": False}],
        "edges": [
            {"id": "root", "src": None, "dst": "w",
             "orbit": {"name": "g", "in_v": True, "p_n": 1, "period": 1.0,
                       "link": None, "level": 0}},
        ],
    }
    up = tmp_path / "up.json"
    low = tmp_path / "low.json"
    up.write_text(json.dumps(upper))
    low.write_text(json.dumps(lower))
    code, out, _ = run_cli(capsys, "--format", "machine", "trees", "concat",
                           str(up), str(low), "--match", "0:out=1:root")
    assert code == 0
    payload = machine_payload(out)
    assert len(payload["vertices"]) == 2
    srcs = {(e["src"], e["dst"]) for e in payload["edges"]}
    assert ("0:u", "1:w") in srcs


def test_model_orbits_cli(capsys):
    code, out, _ = run_cli(capsys, "model", "orbits", "--n", "5", "--a", "200",
                           "--N", "12")
    assert code == 0
    assert out.splitlines()[0].split() == ["family", "k", "cz", "deg", "link", "name"]
    assert any("ga5" in line for line in out.splitlines())


def test_determinism_across_processes():
    cmd = [sys.executable, "-m", "sftkit.cli", "--format", "machine",
           "model", "ranks", "--n", "5", "--N", "12"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    second = subprocess.run(cmd, capture_output=True, text=True)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
