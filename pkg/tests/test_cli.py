import json

from padicforms.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1]), out


def test_solve(capsys, data_dir):
    code, rec, _ = run(capsys, "solve", data_dir / "pythagoras.form", "--k", 3)
    assert code == 0 and rec["status"] == "zero_found"
    x, y, z = rec["witness_int"]
    assert x * x + y * y == z * z
    code, rec, _ = run(capsys, "solve", data_dir / "two-fourth-powers.form", "--k", 4)
    assert code == 1 and rec["status"] == "exhausted_no_liftable"
    code, rec, _ = run(capsys, "solve", data_dir / "pythagoras.form", "--k", 12, "--max-candidates", 100)
    assert code == 4


def test_bounds_and_verify(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, rec, lines = run(capsys, "bounds", "--r3", 4, "--r2", 10, "--r1", 20, "--prime-class", "p2", "--out", cert)
    assert code == 0 and rec["bound"] == 3191 and "3191" in lines[0]
    code, rec, _ = run(capsys, "verify", cert)
    assert code == 0 and rec["valid"]
    data = json.loads(cert.read_text())
    data["bound"] = 3190
    cert.write_text(json.dumps(data))
    code, rec, _ = run(capsys, "verify", cert)
    assert code == 1 and not rec["valid"]


def test_anisotropy(capsys, data_dir):
    code, rec, lines = run(capsys, "anisotropy", data_dir / "terjanian-block.form", "--k", 2)
    assert code == 1 and "[1]" in lines[0]
    code, rec, _ = run(capsys, "anisotropy", data_dir / "pythagoras.form", "--k", 3, "--json")
    assert code == 0


def test_lift_levels_expand(capsys, data_dir):
    code, rec, _ = run(capsys, "lift", data_dir / "sqrt17.form", "--point", "1 1")
    assert code == 0 and rec["value_valuation"] >= 32
    code, rec, _ = run(capsys, "levels", data_dir / "diag-quartic.form", "--vectors", data_dir / "vectors5.txt")
    assert code == 0 and [r["level"] for r in rec["rows"]] == [0, 1, 2, 3]
    code, rec, _ = run(capsys, "expand", data_dir / "pythagoras.form", "--dir", "0 1 0",
                       "--basis", data_dir / "vectors3.txt")
    assert code == 0 and rec["basis_size"] == 3


def test_construct(capsys, data_dir):
    code, rec, _ = run(capsys, "construct", data_dir / "diag-quartic.form", "--driver", "quartic-q2")
    assert code == 0 and "levels-0123-hensel" in rec["trace"]
    code, rec, _ = run(capsys, "construct", data_dir / "two-fourth-powers.form", "--driver", "quartic-q2")
    assert code == 3 and rec["status"] == "stuck"
    code, rec, _ = run(capsys, "construct", data_dir / "sum-of-cubes.form", "--driver", "cubic-p2mod3")
    assert code == 0 and rec["witness_int"] in ([1, -1], [-1, 1])
    code, rec, _ = run(capsys, "construct", data_dir / "cubic-p3.form", "--driver", "cubic-p3")
    assert code == 0
    code, rec, _ = run(capsys, "construct", data_dir / "sum-of-cubes.form", "--driver", "cubic-p3")
    assert code == 2


def test_input_errors(capsys, data_dir, tmp_path):
    assert run(capsys, "solve", data_dir / "bad.form")[0] == 2
    assert run(capsys, "solve", tmp_path / "missing.form")[0] == 2
    assert run(capsys, "lift", data_dir / "sqrt17.form", "--point", "1 1 1")[0] == 2
    assert main(["--version"]) == 0
    assert main(["frobnicate"]) == 2
    assert main(["bounds", "--r3", "1", "--prime-class", "any"]) == 3


def test_output_is_stable(capsys, data_dir):
    a = run(capsys, "solve", data_dir / "pythagoras.form", "--k", 3, "--json")
    b = run(capsys, "solve", data_dir / "pythagoras.form", "--k", 3, "--json", "--jobs", 4)
    assert a[1] == b[1] and len(a[2]) == 1
