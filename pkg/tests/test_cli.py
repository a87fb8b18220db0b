import csv
import io
import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from revlaw import __version__
from revlaw.cli import main
from revlaw.revcircuit import format_circuit

from conftest import random_bits, random_fredkin_circuit


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def invoke(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def invoke_json(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    return code, json.loads(out), err


class TestRun:
    def test_toffoli(self, capsys, files):
        code, out, _ = invoke(capsys, "run", files("t.ckt", "bits 3\nTOF 0 1 2\n"), "110")
        assert code == 0 and out == "111\n"

    def test_empty_circuit(self, capsys, files):
        code, out, _ = invoke(capsys, "run", files("e.ckt", "bits 4\n"), "0101")
        assert code == 0 and out.strip() == "0101"

    def test_width_mismatch(self, capsys, files):
        code, out, err = invoke(capsys, "run", files("t.ckt", "bits 3\nTOF 0 1 2\n"), "11")
        assert code == 2 and out == ""
        assert "width mismatch" in err

    def test_trace(self, capsys, files):
        code, out, _ = invoke(capsys, "run", files("n.ckt", "bits 1\nNOT 0\nNOT 0\n"), "0", "--trace")
        assert out.split() == ["0", "1", "0"]

    def test_json(self, capsys, files):
        code, doc, _ = invoke_json(capsys, "--format", "json", "run", files("n.ckt", "bits 1\nNOT 0\n"), "0")
        assert doc["result"]["output"] == "1"

    def test_parse_error_exit(self, capsys, files):
        code, _, err = invoke(capsys, "run", files("bad.ckt", "bits 2\nTOF 0 1 2\n"), "00")
        assert code == 2 and "line 2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "run", tmp_path / "nope.ckt", "0")
        assert code == 2 and err

    def test_unknown_flag(self, capsys, files):
        with pytest.raises(SystemExit) as exc:
            main(["run", files("e.ckt", "bits 1\n"), "0", "--bogus"])
        assert exc.value.code == 2


class TestCheck:
    def test_fredkin_passes(self, capsys, files):
        c = random_fredkin_circuit(random.Random(1), 8, 30)
        code, doc, _ = invoke_json(capsys, "check", files("f.ckt", format_circuit(c)))
        assert code == 0
        assert doc["result"]["bijective"]["passed"] and doc["result"]["conservative"]["passed"]

    def test_not_fails_conservative(self, capsys, files):
        code, doc, _ = invoke_json(capsys, "check", files("n.ckt", "bits 2\nNOT 0\n"), "--conservative")
        assert code == 1
        cons = doc["result"]["conservative"]
        assert not cons["passed"] and cons["counterexample"] == ["00", "10"]
        assert "bijective" not in doc["result"]

    def test_width_24_needs_override(self, capsys, files):
        code, out, err = invoke(capsys, "check", files("w.ckt", "bits 24\n"))
        assert code == 2 and out == "" and "--max-width" in err

    def test_text_format(self, capsys, files):
        code, out, _ = invoke(capsys, "--format", "text", "check", files("n.ckt", "bits 2\nNOT 0\n"))
        assert "bijective: pass" in out and "conservative: FAIL" in out


class TestErase:
    def test_kib_of_zeros_rle(self, capsys, files):
        code, doc, _ = invoke_json(capsys, "erase", files("z.txt", "0" * 1024), "--codec", "RLE")
        assert code == 0
        assert doc["result"]["upper_bits"] <= 45
        assert doc["result"]["naive_bits"] == 1024

    def test_binary_kib_of_zeros(self, capsys, tmp_path):
        p = tmp_path / "z.bin"
        p.write_bytes(bytes(1024))
        code, doc, _ = invoke_json(capsys, "erase", p, "--binary", "--codec", "RLE")
        assert doc["result"]["s_len"] == 8192 and doc["result"]["upper_bits"] <= 45

    def test_self_catalyst(self, capsys, files):
        bits = str(random_bits(random.Random(2), 1024))
        path = files("s.txt", "\n".join(bits[i:i + 64] for i in range(0, 1024, 64)))
        code, doc, _ = invoke_json(capsys, "erase", path, "--catalyst", path, "--codec", "COPYREF")
        r = doc["result"]
        assert r["upper_bits"] <= 44 and r["naive_bits"] == 1024 and r["x_len"] == 1024

    def test_empty_s(self, capsys, files):
        code, doc, _ = invoke_json(capsys, "erase", files("e.txt", ""), "--codec", "RAW")
        assert doc["result"]["upper_bits"] == 1 and doc["result"]["lower_bits"] == 0

    def test_config_echo(self, capsys, files):
        code, doc, _ = invoke_json(capsys, "erase", files("s.txt", "0101"), "--temp", "77", "--seed", "5")
        assert doc["version"] == __version__ and doc["seed"] == 5
        cfg = doc["config"]
        assert cfg["temp"] == 77.0 and cfg["codec"] == "BEST" and cfg["max_width"] == 20
        assert doc["result"]["temperature"] == 77.0

    def test_non_binary_text(self, capsys, files):
        code, _, err = invoke(capsys, "erase", files("s.txt", "01x1"))
        assert code == 2 and "--binary" in err

    def test_bad_codec(self, capsys, files):
        code, _, err = invoke(capsys, "erase", files("s.txt", "01"), "--codec", "zip")
        assert code == 2 and "unknown codec" in err

    def test_bad_temperature(self, capsys, files):
        code, _, _ = invoke(capsys, "erase", files("s.txt", "01"), "--temp", "0")
        assert code == 2


class TestCost:
    def test_both_directions(self, capsys, files):
        a = files("a.txt", str(random_bits(random.Random(3), 1000)))
        z = files("z.txt", "0" * 1000)
        _, fwd, _ = invoke_json(capsys, "cost", "-A", a, "-B", z)
        _, rev, _ = invoke_json(capsys, "cost", "-A", z, "-B", a)
        assert fwd["result"]["clamped_bits"] >= 900
        assert rev["result"]["clamped_bits"] == 0 and rev["result"]["raw_bits"] < -900
        assert fwd["result"]["semantics"] == "estimate"


class TestBounds:
    def rows(self, out):
        return list(csv.DictReader(io.StringIO(out)))

    def test_clausius_point(self, capsys):
        code, out, _ = invoke(capsys, "bounds", "clausius", "-n", 4, "--source", "2,2", "--target", "3,1")
        (row,) = self.rows(out)
        assert code == 0
        assert Fraction(int(row["ratio_num"]), int(row["ratio_den"])) == Fraction(4, 9)
        assert list(row) == ["n", "s1", "s2", "t1", "t2", "ratio_num", "ratio_den", "ratio_float", "rate"]

    def test_clausius_tail(self, capsys):
        _, out, _ = invoke(capsys, "bounds", "clausius", "-n", 4, "--source", "2,2", "--delta", 1)
        (row,) = self.rows(out)
        assert (row["ratio_num"], row["ratio_den"]) == ("17", "36")
        assert (row["t1"], row["t2"]) == ("3", "1")

    def test_kelvin(self, capsys):
        _, out, _ = invoke(capsys, "bounds", "kelvin", "-N", 4, "-n", 2, "-w", 3)
        (row,) = self.rows(out)
        assert (row["ratio_num"], row["ratio_den"]) == ("1", "2")

    def test_kelvin_zero_has_infinite_rate(self, capsys):
        _, out, _ = invoke(capsys, "bounds", "kelvin", "-N", 4, "-n", 3, "-w", 2)
        (row,) = self.rows(out)
        assert row["ratio_num"] == "0" and row["rate"] == "inf"

    def test_clausius_sweep_monotone(self, capsys):
        _, out, _ = invoke(capsys, "bounds", "clausius", "--sweep", "8:64:8")
        rows = self.rows(out)
        assert [int(r["n"]) for r in rows] == list(range(8, 65, 8))
        ratios = [Fraction(int(r["ratio_num"]), int(r["ratio_den"])) for r in rows]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
        assert (rows[0]["t1"], rows[0]["t2"]) == ("8", "0")
        assert all(float(r["rate"]) > 0.1 for r in rows)

    def test_kelvin_sweep(self, capsys):
        _, out, _ = invoke(capsys, "bounds", "kelvin", "-N", 16, "-w", 8, "--sweep", "0:8")
        rows = self.rows(out)
        assert len(rows) == 9 and rows[0]["ratio_float"] == "1.0" and rows[0]["rate"] == ""

    def test_json_format(self, capsys):
        code, doc, _ = invoke_json(capsys, "--format", "json", "bounds", "kelvin", "-N", 4, "-n", 2, "-w", 3)
        assert doc["result"]["rows"][0]["ratio_den"] == 2

    @pytest.mark.parametrize(
        "argv",
        [
            ["bounds", "clausius", "-n", "4", "--source", "2,2", "--target", "3,0"],
            ["bounds", "clausius", "-n", "4", "--source", "5,0", "--target", "5,0"],
            ["bounds", "clausius", "-n", "4"],
            ["bounds", "kelvin", "-N", "4", "-n", "5", "-w", "2"],
        ],
    )
    def test_range_errors(self, capsys, argv):
        code, out, err = invoke(capsys, *argv)
        assert code == 2 and out == "" and err


class TestMc:
    def test_identity_circuit(self, capsys, files):
        path = files("id.ckt", "bits 8\n")
        code, doc, _ = invoke_json(capsys, "mc", "-n", 4, "--source", "3,1", "--circuit", path, "--trials", 500)
        assert code == 0
        per = doc["result"]["per_couple"]
        assert list(per) == ["3,1"] and per["3,1"]["count"] == 500 and per["3,1"]["within_bound"]

    def test_width16_random(self, capsys):
        code, doc, _ = invoke_json(capsys, "mc", "-n", 8, "--source", "4,4", "--trials", 20000)
        assert code == 0 and doc["result"]["all_within_bound"]
        assert sum(v["count"] for v in doc["result"]["per_couple"].values()) == 20000

    def test_kelvin(self, capsys):
        code, doc, _ = invoke_json(capsys, "mc", "--kelvin", "-N", 16, "-n", 4, "-w", 8, "--trials", 20000)
        assert code == 0
        assert Fraction(doc["result"]["bound_num"], doc["result"]["bound_den"]) == Fraction(495, 12870)

    def test_echo_reproduces(self, capsys):
        code, doc, _ = invoke_json(capsys, "mc", "-n", 3, "--source", "2,1", "--trials", 300, "--seed", 17)
        cfg = doc["config"]
        assert doc["seed"] == 17 and cfg["trials"] == 300 and cfg["gates"] == 64
        assert "workers" not in cfg

    def test_non_conservative_aborts(self, capsys, files):
        path = files("n.ckt", "bits 4\nNOT 0\n")
        code, out, err = invoke(capsys, "mc", "-n", 2, "--source", "1,1", "--circuit", path, "--trials", 10)
        assert code == 1 and out == "" and "weight changed" in err

    def test_missing_args(self, capsys):
        code, _, err = invoke(capsys, "mc", "--source", "1,1")
        assert code == 2

    def test_byte_identical_subprocess(self):
        argv = [sys.executable, "-m", "revlaw", "mc", "-n", "5", "--source", "3,2", "--trials", "20000"]
        a = subprocess.run(argv, capture_output=True, check=True).stdout
        b = subprocess.run(argv + ["--workers", "4"], capture_output=True, check=True).stdout
        assert a == b and a


class TestTrace:
    def test_json_report(self, capsys, files):
        path = files("n.ckt", "bits 4\nNOT 0\nCNOT 0 1\n")
        code, doc, _ = invoke_json(capsys, "trace", path, "0000")
        steps = doc["result"]["steps"]
        assert code == 0 and len(steps) == 3 and doc["result"]["flagged_steps"] == []
        assert "heuristic" in doc["result"]["note"]

    def test_text_table(self, capsys, files):
        path = files("n.ckt", "bits 64\n")
        code, out, _ = invoke(capsys, "--format", "text", "trace", path, "1" * 64, "--codec", "RLE")
        lines = out.splitlines()
        assert lines[0].startswith("t\tbits") and lines[-1].startswith("flagged: 0")
