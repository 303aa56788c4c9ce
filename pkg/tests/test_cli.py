import json

import pytest

from permbase.cli import MANIFESTS, main, parse_manifest
from permbase.errors import PermbaseError


@pytest.fixture
def run(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def go(*argv):
        code = main(list(argv))
        return code, capsys.readouterr().out

    return go


def test_order(run):
    code, out = run("order", "M24")
    assert code == 0 and "order 244823040" in out


def test_order_json_with_flags_after_the_verb(run):
    code, out = run("order", "M12", "--subgroup", "M11", "--format", "json", "--seed", "3")
    d = json.loads(out)
    assert code == 0 and d["degree"] == 12 and d["order"] == 95040


def test_base_exact_and_verify_round_trip(run, tmp_path):
    code, out = run("base", "M23", "--exact", "--out", "m23.cert")
    assert code == 0 and "b = 6" in out
    code, out = run("--verify", "m23.cert")
    assert code == 0 and "base certificate valid" in out
    code, out = run("--verify", "m23.cert.lower")
    assert code == 0 and "lower-bound certificate valid" in out


def test_tampered_certificate_fails_verification(run, tmp_path):
    run("base", "S6", "--subgroup", "PGL2_5", "--exact", "--out", "s6.cert")
    text = (tmp_path / "s6.cert").read_text()
    lines = [ln for ln in text.splitlines() if not ln.startswith("points:")]
    (tmp_path / "bad.cert").write_text("\n".join(lines + ["points: 0 1"]) + "\n")
    code, out = run("--verify", "bad.cert")
    assert code == 1 and "INVALID" in out


def test_base_greedy_and_probe(run):
    code, out = run("base", "C7", "--greedy")
    assert code == 0 and "b <= 1" in out
    code, out = run("base", "M24", "--probe", "7", "10000")
    assert code == 0 and "b <= 7" in out


def test_fpr_table(run):
    code, out = run("fpr", "M12", "--subgroup", "M11")
    assert code == 0 and "all equal: True" in out
    assert "11A" in out


def test_qhat(run, tmp_path):
    code, out = run("qhat", "S3", "--c", "2", "--csv", "led.csv")
    assert code == 0 and out.strip().endswith("1/3")
    assert "total,,,1/3" in (tmp_path / "led.csv").read_text()
    code, out = run("qhat", "--table", "f4q2_fragment.csv", "--c", "5")
    assert code == 0 and out.strip().endswith("1/8") and "uncertified" in out


def test_classes_export(run, tmp_path):
    code, out = run("classes", "S4", "--prime-only", "--export", "s4.csv")
    assert code == 0 and out.startswith("3 classes")
    assert (tmp_path / "s4.csv").read_text().startswith("label,element_order,class_size")


def test_weylchar(run):
    code, out = run("weylchar", "a1_borel.query")
    assert code == 0 and "q + 1" in out
    code, out = run("weylchar", "e6_p16_index.query", "--format", "json")
    d = json.loads(out)
    assert d["coefficients"][:4] == [1, 2, 3, 4]


def test_witness(run):
    code, out = run("witness", "S8", "--subgroup", "S4wrS2", "--k", "5")
    assert code == 0 and "intersection order 1 (brute force: 1)" in out


def test_usage_errors_exit_2(run):
    assert run()[0] == 2
    assert run("order")[0] == 2
    assert run("order", "NoSuchGroup")[0] == 2
    assert run("fpr", "M12")[0] == 2
    assert run("base", "S5", "--exact", "--greedy")[0] == 2


def test_bad_manifest_exits_1(run):
    code, out = run("verify", "bad_m24.cases")
    assert code == 1
    assert out.splitlines()[2].startswith("FAIL")


def test_desk_manifest_passes_and_is_deterministic(run, tmp_path):
    text = (MANIFESTS / "theorem1_desk.cases").read_text()
    rows = [ln for ln in text.splitlines() if not ln.startswith("co3")]
    (tmp_path / "desk.cases").write_text("\n".join(rows) + "\n")
    code, first = run("verify", "desk.cases")
    assert code == 0, first
    lines = first.splitlines()
    verdicts = [ln.split()[0] for ln in lines[2:] if ln and not ln.startswith(("summary", " "))]
    assert verdicts and set(verdicts) == {"PASS"}
    assert lines[0].startswith("# generated")
    for cert in sorted((tmp_path / "artifacts" / "desk").iterdir()):
        assert run("--verify", str(cert))[0] == 0, cert.name
    code, second = run("verify", "desk.cases")
    assert second.splitlines()[1:] == lines[1:]


def test_missing_data_is_inconclusive(run, tmp_path):
    (tmp_path / "m.cases").write_text("x | Nope.grp | natural | base_size = | 3 | certified | -\n")
    code, out = run("verify", "m.cases")
    assert code == 0 and "INCONCLUSIVE" in out


@pytest.mark.parametrize("line", [
    "a | b | c | d",
    "a | M12 | natural | base_size ~ | 5 | certified | -",
    "a | M12 | natural | base_size = | five | certified | -",
    "a | M12 | natural | base_size = | 5 | maybe | -",
    "a | M12 | natural | i_r_count | 27639 | certified | -",
])
def test_manifest_parse_errors(line):
    with pytest.raises(PermbaseError):
        parse_manifest(line)
