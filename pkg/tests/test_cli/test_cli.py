"""Command line interface."""
import json

import pytest
from click.testing import CliRunner

from radixtiles import config
from radixtiles.cli import main
from radixtiles.constants import EXIT_INPUT_ERROR

SAMPLING = ["--samples", "2000", "--depth", "12", "--seed", "20050228"]


@pytest.fixture
def runner():
    """Click test runner."""
    return CliRunner()


def run_json(runner, args):
    """Invoke and parse the JSON printed on success."""
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


class TestRadixCommands:
    """digits, expand, decide and beta."""

    def test_decide_binary(self, runner):
        """-1 is the only witness for A = 2, D = {0, 1}."""
        data = run_json(runner, ["decide", "-m", "[[2]]", "-d", "[[0],[1]]"])
        assert data["yields"] is False
        assert [w["start"] for w in data["witnesses"]] == [["-1"]]

    def test_decide_canonical(self, runner):
        """3 I_2 with canonical digits."""
        assert run_json(runner, ["decide", "-m", "[[3,0],[0,3]]", "--canonical"])["yields"] is True

    def test_expand(self, runner):
        """5 = 101 in binary."""
        data = run_json(runner, ["expand", "5", "-m", "[[2]]", "-d", "[[0],[1]]"])
        assert data["digits"] == [["1"], ["0"], ["1"]]
        assert data["reconstructed"] == ["5"]

    def test_digits(self, runner):
        """Canonical twin dragon digits with the Smith form."""
        data = run_json(runner, ["digits", "-m", "[[1,1],[-1,1]]", "--canonical"])
        assert data["digits"] == [["-1", "0"], ["0", "0"]]
        assert data["invariant_factors"] == ["1", "2"]
        assert data["in_fundamental_domain"] == [True, True]

    def test_beta(self, runner):
        """A = 2 needs its square."""
        data = run_json(runner, ["beta", "-m", "[[2]]", "--ladder", "1"])
        assert data["result"]["beta"] == 2
        assert data["ladder"] == [{"k": 2, "yields": True}, {"k": 3, "yields": True}]


class TestInputErrors:
    """Invalid input exits with code 1 and one diagnostic line."""

    @pytest.mark.parametrize(
        "args, error_class",
        [
            (["decide", "-m", "[[2"], "SpecSyntaxError"),
            (["decide", "-m", "[[2]]", "-d", "[[0],[2]]"], "DuplicateCoset"),
            (["decide", "-m", "[[2]]", "-d", "[[1],[2]]"], "MissingZero"),
            (["decide", "-m", "[[1,2],[2,4]]", "--canonical"], "SingularMatrix"),
            (["decide", "-d", "[[0],[1]]"], "SpecValueError"),
            (["decide", "-m", "[[2]]", "-d", "[[0],[1]]", "--canonical"], "SpecValueError"),
        ],
    )
    def test_exit_code(self, runner, args, error_class):
        """The error class leads the diagnostic."""
        result = runner.invoke(main, args)
        assert result.exit_code == EXIT_INPUT_ERROR
        assert error_class in result.output

    def test_not_dilation(self, runner):
        """analyze refuses non-expanding matrices."""
        result = runner.invoke(main, ["analyze", "-m", "[[1,0],[0,2]]", "--canonical", *SAMPLING])
        assert result.exit_code == EXIT_INPUT_ERROR


class TestTileCommands:
    """tile and wavelet subcommands."""

    def test_contains(self, runner):
        """1/2 lies in [0, 1], 2 does not."""
        args = ["-m", "[[2]]", "-d", "[[0],[1]]"]
        assert run_json(runner, ["tile", "contains", '["1/2"]', *args])["verdict"] == "Candidate"
        assert run_json(runner, ["tile", "contains", "[2]", *args])["verdict"] == "Outside"

    def test_multiplicity(self, runner):
        """[0, 1] tiles the line."""
        data = run_json(runner, ["tile", "multiplicity", "-m", "[[2]]", "-d", "[[0],[1]]", *SAMPLING])
        assert abs(data["mean_multiplicity"] - 1) <= 0.05

    def test_render(self, runner, tmp_path):
        """A planar tile raster."""
        out = tmp_path / "dragon.png"
        args = ["tile", "render", "-m", "[[1,1],[-1,1]]", "-d", "[[0,0],[1,0]]", "--depth", "8"]
        data = run_json(runner, [*args, "--size", "50", "50", "-o", str(out)])
        assert out.exists()
        assert 0 < data["filled_fraction"] < 1

    def test_symbol(self, runner):
        """m_0(1/2) = 0 for D = {0, 1} and the mirror sum is 1."""
        data = run_json(runner, ["wavelet", "symbol", "[0.5]", "-m", "[[2]]", "-d", "[[0],[1]]"])
        assert data["abs2"] == pytest.approx(0, abs=1e-12)
        assert data["qmf_sum"] == pytest.approx(1)

    def test_phi(self, runner):
        """chi_T at a point of T."""
        data = run_json(runner, ["wavelet", "phi", '["1/4"]', "-m", "[[3]]", "--canonical", "--depth", "10"])
        assert data["value"] == 1


class TestAnalyze:
    """Full analysis of a problem."""

    def test_three_i2(self, runner, tmp_path):
        """Theorem-backed interior and a positive MRA verdict."""
        out = tmp_path / "report.json"
        result = runner.invoke(main, ["analyze", "-m", "[[3,0],[0,3]]", "--canonical", *SAMPLING, "-o", str(out)])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["interior"] == "InteriorByTheorem"
        assert data["mra"]["verdict"] is True
        assert data["cross_check"] is True

    def test_problem_file(self, runner, tmp_path):
        """Problems can come from a document with comments."""
        problem = tmp_path / "problem.json"
        problem.write_text('# A = 3\n{"matrix": [[3]], "digits": "canonical", "samples": 1000}\n')
        out = tmp_path / "report.json"
        result = runner.invoke(main, ["analyze", str(problem), "--no-mra", "--depth", "10", "-o", str(out)])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["samples"] == 1000
        assert data["mra"] is None

    def test_deterministic(self, runner, tmp_path):
        """The same problem and seed give byte-identical reports."""
        paths = [tmp_path / "one.json", tmp_path / "two.json"]
        for path in paths:
            args = ["analyze", "-m", "[[3]]", "--canonical", "--no-mra", *SAMPLING, "-o", str(path)]
            assert runner.invoke(main, args).exit_code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestFigure:
    """The twin dragon raster."""

    def test_deterministic(self, runner, tmp_path):
        """Two runs give identical bytes."""
        first, second = tmp_path / "one.pgm", tmp_path / "two.pgm"
        for path in (first, second):
            result = runner.invoke(main, ["figure1", "--depth", "4", "--size", "64", "48", "-o", str(path)])
            assert result.exit_code == 0, result.output
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes().startswith(b"P5")

    def test_other_matrix(self, runner, tmp_path):
        """2 I_2 with D = {0, 1}^2 renders the unit square."""
        out = tmp_path / "square.png"
        args = ["figure1", "-m", "[[2,0],[0,2]]", "-d", "[[0,0],[1,0],[0,1],[1,1]]", "--depth", "3", "-o", str(out)]
        data = run_json(runner, [*args, "--size", "64", "64"])
        assert data["filled_pixels"] > 0.9 * 64 * 64
        assert out.exists()


class TestSuite:
    """Suites, reports and the store."""

    def test_empty(self, runner, tmp_path):
        """Nothing to check passes."""
        suite = tmp_path / "suite.json"
        suite.write_text("[]")
        result = runner.invoke(main, ["suite", str(suite), *SAMPLING])
        assert result.exit_code == 0, result.output

    def test_capped_case(self, runner, tmp_path):
        """A case over its cap is recorded as error, the others complete, reports and store are written."""
        config.set_configuration(sqlalchemy_connection_string=f"sqlite:///{tmp_path / 'runs.db'}")
        suite = tmp_path / "suite.json"
        suite.write_text(
            json.dumps(
                {
                    "name": "capped",
                    "cases": [
                        {"name": "tiny cap", "matrix": [[3]], "digits": "canonical", "cap": 1},
                        {"name": "three", "matrix": [[3]], "digits": "canonical"},
                    ],
                }
            )
        )
        out, report = tmp_path / "result.json", tmp_path / "summary.md"
        args = ["suite", str(suite), *SAMPLING, "-o", str(out), "-r", str(report), "--store"]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output

        data = json.loads(out.read_text())
        assert [e["error_class"] for e in data["errors"]] == ["ResourceLimit"]
        assert data["cases"][1]["decision"]["yields"] is True
        assert data["ledger"] == []
        assert report.read_text().splitlines()[1].startswith("---|")

        history = runner.invoke(main, ["history"])
        assert history.exit_code == 0
        assert "capped" in history.output

    def test_malformed_case(self, runner, tmp_path):
        """A case with an unreadable matrix is reported, the suite still runs and stores a null matrix."""
        config.set_configuration(sqlalchemy_connection_string=f"sqlite:///{tmp_path / 'runs.db'}")
        suite = tmp_path / "suite.json"
        suite.write_text(json.dumps([{"name": "typo", "matrix": [[3, "x"]]}, {"name": "three", "matrix": [[3]]}]))
        out = tmp_path / "result.json"
        result = runner.invoke(main, ["suite", str(suite), *SAMPLING, "-o", str(out), "--store"])
        assert result.exit_code == 0, result.output

        data = json.loads(out.read_text())
        assert [(e["case"], e["error_class"]) for e in data["errors"]] == [("typo", "SpecValueError")]
        assert data["cases"][0]["matrix"] is None
        assert data["cases"][1]["decision"]["yields"] is True


class TestSettings:
    """Configuration from the command line."""

    def test_settings(self, runner):
        """Values are written and echoed."""
        data = run_json(runner, ["settings", "--cap", "123", "--seed", "7"])
        assert data["LIMITS"] == {"point_cap": "123"}
        assert data["SAMPLING"] == {"seed": "7"}
        assert config.get_point_cap() == 123
