import json
import subprocess
import sys

import pytest

from sadic.cli import EXIT_AMBIGUOUS, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, EXIT_RESOURCE, main
from sadic.config import ConfigError, config_from_dict, load_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_json(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


class TestAnalyze:
    def test_fibonacci_summary(self, capsys):
        code, out, _ = run(capsys, "analyze", "--preset", "fibonacci", "--depth", "10")
        assert code == EXIT_OK
        assert "certified-growing; all levels invertible (det -1); c_n ≡ 1; thin; n₀ = 0; e(X) ∈ [1, 2]" in out

    def test_two_copies(self, capsys):
        code, out, _ = run(capsys, "analyze", "--preset", "two-copies", "--depth", "8")
        assert code == EXIT_OK and "c_n ≡ 2" in out

    def test_merge_not_thin(self, capsys):
        code, out, _ = run(capsys, "analyze", "--preset", "merge-two-copies", "--depth", "8",
                           "--format", "structured")
        assert code == EXIT_OK
        assert "thin=not-thin-witness" in out
        assert "stabilization_level=1" in out

    def test_structured_is_deterministic(self, capsys):
        outs = [run(capsys, "analyze", "--preset", "thue-morse", "--depth", "8", "--format", "structured")[1]
                for _ in range(2)]
        assert outs[0] == outs[1]
        assert outs[0].startswith("[sequence]")
        assert all("=" in line or line.startswith("[") or not line for line in outs[0].splitlines())

    def test_config_file(self, capsys, tmp_path):
        path = write_json(tmp_path, {"type": "periodic", "morphisms": ["a -> ab; b -> a"], "depth": 6})
        code, out, _ = run(capsys, "analyze", path)
        assert code == EXIT_OK and "certified-growing" in out

    def test_explicit_config(self, capsys, tmp_path):
        path = write_json(tmp_path, {"type": "explicit", "morphisms": ["a -> ab; b -> a"] * 12, "depth": 4})
        code, out, _ = run(capsys, "analyze", path)
        assert code == EXIT_OK


class TestCommands:
    def test_letters(self, capsys):
        code, out, _ = run(capsys, "letters", "--preset", "tribonacci", "--depth", "10")
        assert code == EXIT_OK
        assert "rays: 1" in out and "source: column" in out

    def test_cylinder_default_vector(self, capsys):
        code, out, _ = run(capsys, "cylinder", "aa", "--preset", "thue-morse", "--depth", "6",
                           "--format", "structured")
        assert code == EXIT_OK
        assert "[depth 6]" in out and "[oracle]" in out
        assert "v0=1/2,1/2" in out

    def test_cylinder_budget_stops_table(self, capsys):
        code, out, _ = run(capsys, "cylinder", "ab", "--preset", "thue-morse", "--budget", "100")
        assert code == EXIT_OK and "stopped: level 6" in out

    def test_frequencies(self, capsys):
        code, out, _ = run(capsys, "frequencies", "ab", "--preset", "fibonacci", "--depth", "10")
        assert code == EXIT_OK
        assert "occurrences: 55" in out and "length: 144" in out

    def test_pushforward(self, capsys, tmp_path):
        a = tmp_path / "s1.txt"
        b = tmp_path / "s2.txt"
        a.write_text("a -> aa\nb -> ab\n")
        b.write_text("a -> b\nb -> ab\n")
        code, out, _ = run(capsys, "pushforward", str(a), str(b), "--preset", "fibonacci", "--depth", "6")
        assert code == EXIT_OK
        assert "functoriality: (σσ')_ℳ = σ_ℳ σ'_ℳ: OK" in out
        assert "caveat" in out

    def test_pushforward_fibonacci_mass(self, capsys, tmp_path):
        a = tmp_path / "fib.txt"
        a.write_text("a -> ab\nb -> a\n")
        code, out, _ = run(capsys, "pushforward", str(a), "--preset", "fibonacci", "--format", "structured")
        assert code == EXIT_OK
        assert "new_mass.decimal=1.618033988" in out


class TestExitCodes:
    def test_missing_source(self, capsys):
        code, _, err = run(capsys, "analyze")
        assert code == EXIT_CONFIG and "--preset" in err

    def test_bad_json_reports_position(self, capsys, tmp_path):
        path = write_json(tmp_path, '{"type": "periodic",\n "morphisms": [}')
        code, _, err = run(capsys, "analyze", path)
        assert code == EXIT_CONFIG and "line 2" in err

    def test_nonpositive_depth(self, capsys):
        code, _, err = run(capsys, "analyze", "--preset", "fibonacci", "--depth", "0")
        assert code == EXIT_CONFIG and "depth" in err

    def test_erasing_pushforward(self, capsys, tmp_path):
        e = tmp_path / "e.txt"
        e.write_text("a -> \nb -> a\n")
        code, _, err = run(capsys, "pushforward", str(e), "--preset", "fibonacci")
        assert code == EXIT_CONFIG and "erasing" in err

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "cylinder", "aa", "--preset", "fibonacci", "--v0", "1,0")
        assert code == EXIT_INFEASIBLE and "level 2" in err

    def test_ambiguous(self, capsys):
        code, _, err = run(capsys, "cylinder", "aa", "--preset", "merge-two-copies", "--depth", "10")
        assert code == EXIT_AMBIGUOUS and "dimension 1" in err

    def test_resource(self, capsys):
        code, _, err = run(capsys, "frequencies", "ab", "--preset", "fibonacci", "--budget", "1")
        assert code == EXIT_RESOURCE

    def test_bad_v0(self, capsys):
        code, _, err = run(capsys, "cylinder", "a", "--preset", "fibonacci", "--v0", "1,x")
        assert code == EXIT_CONFIG

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "sadic", "analyze", "--preset", "identity", "--depth", "3"],
                              capture_output=True, text=True)
        assert proc.returncode == EXIT_OK
        assert "not-growing-witness" in proc.stdout


class TestConfig:
    def test_unknown_field(self):
        with pytest.raises(ConfigError, match="unknown fields"):
            config_from_dict({"morphisms": ["a -> a"], "colour": 1})

    def test_wrong_type(self):
        with pytest.raises(ConfigError, match="depth"):
            config_from_dict({"morphisms": ["a -> ab; b -> a"], "depth": "ten"})

    def test_period_index_range(self):
        with pytest.raises(ConfigError, match="out of range"):
            config_from_dict({"type": "periodic", "morphisms": ["a -> ab; b -> a"], "period": [1]})

    def test_codomain_block(self):
        cfg = config_from_dict({"type": "periodic", "morphisms": [
            {"rules": "a -> a; b -> b; c -> a; d -> b", "codomain": "a b"},
            "a -> ab; b -> a; c -> cd; d -> c"], "prefix": [0], "period": [1]})
        assert cfg.sequence.alphabet(0).letters == ("a", "b")
        assert cfg.sequence.alphabet(1).size == 4

    def test_depth_beyond_explicit(self):
        cfg = config_from_dict({"morphisms": ["a -> ab; b -> a"] * 3, "depth": 5})
        with pytest.raises(ConfigError, match="exceeds"):
            cfg.validate()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "nope.json"))
