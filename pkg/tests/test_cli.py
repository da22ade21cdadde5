import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from covhomog.cli import COMMANDS, PLOT_COMMANDS, run


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestBoxm:
    def test_iris_text(self):
        code, out, _ = invoke("boxm", "--data", "builtin:iris", "--group", "Species")
        assert code == 0
        assert "chisq 140.94" in out
        assert "df 20" in out

    def test_json(self):
        code, out, _ = invoke("boxm", "--data", "builtin:skulls", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["df"] == 40
        assert doc["p_value"] == pytest.approx(0.248, abs=0.01)

    def test_missing_file(self, tmp_path):
        target = tmp_path / "fig.svg"
        code, out, err = invoke("boxm", "--data", str(tmp_path / "nosuch.csv"), "--group", "g",
                                "--output", str(target))
        assert code == 2
        assert out == ""
        assert "nosuch.csv" in err
        assert not target.exists()

    def test_ci_level(self):
        _, out, _ = invoke("boxm", "--data", "builtin:iris", "--ci-level", "0.5", "--format", "json")
        assert json.loads(out)["ci_level"] == 0.5
        code, _, _ = invoke("boxm", "--data", "builtin:iris", "--ci-level", "1.5")
        assert code == 2


class TestLevene:
    def test_median_json(self):
        code, out, _ = invoke("levene", "--data", "builtin:iris", "--group", "Species",
                              "--center", "median", "--format", "json")
        assert code == 0
        tests = json.loads(out)["tests"]
        assert [t["statistic"] for t in tests] == ["Pillai", "Wilks", "Hotelling-Lawley", "Roy"]

    def test_trimmed(self):
        code, _, _ = invoke("levene", "--data", "builtin:skulls", "--center", "trimmed:0.2")
        assert code == 0
        code, _, err = invoke("levene", "--data", "builtin:skulls", "--center", "mode")
        assert code == 2 and "center" in err


class TestManova:
    def test_skulls(self):
        code, out, _ = invoke("manova", "--data", "builtin:skulls", "--format", "json")
        pillai = json.loads(out)["tests"][0]
        assert code == 0
        assert pillai["value"] == pytest.approx(0.3533, abs=1e-3)

    def test_no_svg_format(self):
        code, _, _ = invoke("manova", "--data", "builtin:skulls", "--format", "svg")
        assert code == 2


class TestPlots:
    @pytest.mark.parametrize("cmd", sorted(PLOT_COMMANDS))
    def test_svg_written(self, cmd, tmp_path):
        target = tmp_path / f"{cmd}.svg"
        code, out, _ = invoke(cmd, "--data", "builtin:iris", "--format", "svg", "--output", str(target))
        assert code == 0
        assert out == ""
        ET.parse(target)

    def test_svg_needs_output(self):
        code, _, err = invoke("scree", "--data", "builtin:wine", "--format", "svg")
        assert code == 2
        assert "--output" in err

    def test_text_and_output(self, tmp_path):
        target = tmp_path / "e.svg"
        code, out, _ = invoke("ellipses", "--data", "builtin:iris", "--vars",
                              "Sepal.Length,Sepal.Width", "--output", str(target))
        assert code == 0
        assert "radius" in out
        assert target.read_text().count('class="panel"') == 1

    def test_pca_components(self):
        code, out, _ = invoke("pca", "--data", "builtin:iris", "--components", "3,4", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["components"] == [3, 4]
        assert sum(doc["variance_proportions"]) == pytest.approx(1.0)
        code, _, _ = invoke("pca", "--data", "builtin:iris", "--components", "4,5")
        assert code == 2

    def test_scree_split(self, tmp_path):
        target = tmp_path / "s.svg"
        code, _, _ = invoke("scree", "--data", "builtin:wine", "--split", "6", "--output", str(target))
        assert code == 0
        assert target.read_text().count('class="panel"') == 2


class TestErrors:
    def test_parse_error_exit_1(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("g,x,y\na,1,2\na,2,oops\nb,3,4\nb,5,7\n")
        code, _, err = invoke("boxm", "--data", str(f), "--group", "g", "--vars", "x,y")
        assert code == 1
        assert "ParseError" in err and "row 3" in err

    def test_singular_exit_1(self, tmp_path):
        f = tmp_path / "flat.csv"
        f.write_text("g,x,y\na,1,2\na,2,4\na,3,6\nb,1,1\nb,2,5\nb,4,2\n")
        code, _, err = invoke("boxm", "--data", str(f), "--group", "g")
        assert code == 1
        assert "NotPositiveDefinite" in err and "'a'" in err

    def test_missing_column_exit_1(self):
        code, _, err = invoke("boxm", "--data", "builtin:iris", "--vars", "Petal.Area")
        assert code == 1
        assert "Petal.Area" in err

    def test_unknown_builtin(self):
        code, _, _ = invoke("boxm", "--data", "builtin:mtcars")
        assert code == 1

    def test_no_subcommand(self):
        assert invoke()[0] == 2
        assert invoke("boxm")[0] == 2


class TestHelpAndDeterminism:
    @pytest.mark.parametrize("cmd", COMMANDS)
    def test_help(self, cmd, capsys):
        code = run([cmd, "--help"])
        text = capsys.readouterr().out
        assert code == 0
        for flag in ("--data", "--group", "--vars", "--format"):
            assert flag in text
        if cmd in PLOT_COMMANDS:
            assert "--output" in text

    @pytest.mark.parametrize("cmd", COMMANDS)
    def test_byte_identical(self, cmd, tmp_path):
        extra = ["--output", str(tmp_path / "a.svg")] if cmd in PLOT_COMMANDS else []
        first = invoke(cmd, "--data", "builtin:wine", "--format", "json", *extra)
        svg_a = (tmp_path / "a.svg").read_bytes() if extra else b""
        second = invoke(cmd, "--data", "builtin:wine", "--format", "json", *extra)
        svg_b = (tmp_path / "a.svg").read_bytes() if extra else b""
        assert first == second
        assert svg_a == svg_b

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "covhomog", "boxm", "--data", "builtin:iris"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert "chisq 140.94" in proc.stdout
