import json
import math

import pytest

from slantlab.cli import main
from slantlab.fixtures import load_fixture
from slantlab.runner import run_suite


class TestRunSuite:
    def test_slant_alpha_suite(self, fixture_manifests):
        report = run_suite(fixture_manifests["slant-alpha"])
        assert report.exit_code == 0
        scan = report.by_name("slant-scan")
        assert scan.extras["classification"] == "ProperSlant"
        assert scan.extras["angle"] == pytest.approx(1.047198, abs=1e-6)

    def test_slant_pi4_suite(self, fixture_manifests):
        report = run_suite(fixture_manifests["slant-pi4"])
        assert report.exit_code == 0
        assert report.by_name("slant-scan").extras["angle"] == pytest.approx(
            0.785398, abs=1e-6)
        assert report.by_name("phi-squared").extras["lambda_fitted"] == \
            pytest.approx(-0.5, abs=1e-9)

    def test_curved_fixture_statuses(self, fixture_manifests):
        report = run_suite(fixture_manifests["curved-non-kahler"])
        assert report.by_name("almost-hermitian").status == "pass"
        assert report.by_name("kaehler").status == "fail"
        assert report.by_name("submersion-axioms").status == "pass"
        for name in ("phi-omega-identities", "harmonicity",
                     "parallel-omega-identities", "vertical-foliation",
                     "horizontal-foliation", "totally-geodesic",
                     "product-structure"):
            assert report.by_name(name).status == "hypothesis-not-met", name
        assert report.exit_code == 1

    def test_rank_deficient_statuses(self, fixture_manifests):
        report = run_suite(fixture_manifests["rank-deficient"])
        assert report.by_name("submersion-axioms").status == "fail"
        assert report.by_name("slant-scan").status == "skipped"
        assert report.by_name("kaehler").status == "pass"
        assert report.exit_code == 1

    def test_check_subset_selection(self):
        man = load_fixture("slant-pi4", {"points": 10})
        man.checks = ("metric-positive-definite", "almost-hermitian")
        report = run_suite(man)
        assert [c.name for c in report.checks] == list(man.checks)

    def test_subset_without_prerequisites_still_gated_correctly(self):
        """Selecting only a downstream check must not skip it: gating checks
        compute silently and the selected check reports its real outcome."""
        man = load_fixture("slant-pi4", {"points": 8})
        man.checks = ("slant-scan",)
        report = run_suite(man)
        assert [c.name for c in report.checks] == ["slant-scan"]
        assert report.by_name("slant-scan").status == "pass"
        assert report.by_name("slant-scan").extras["classification"] == "ProperSlant"
        man2 = load_fixture("slant-pi4", {"points": 8})
        man2.checks = ("harmonicity",)
        report2 = run_suite(man2)
        assert report2.by_name("harmonicity").status == "pass"

    def test_unknown_check_rejected(self):
        man = load_fixture("slant-pi4", {"points": 5})
        man.checks = ("no-such-check",)
        with pytest.raises(ValueError, match="no-such-check"):
            run_suite(man)

    def test_domain_error_in_metric_becomes_check_failure(self):
        """A metric expression that is undefined somewhere in the region
        must surface as a failed check, not as a crash."""
        from slantlab.manifest import load_manifest_dict
        data = {
            "name": "domain-error",
            "seed": 1,
            "total": {
                "dim": 4,
                "coords": ["x1", "x2", "x3", "x4"],
                "metric": [["sqrt(x1)", "0", "0", "0"], ["0", "1", "0", "0"],
                           ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
                "J": [["0", "-1", "0", "0"], ["1", "0", "0", "0"],
                      ["0", "0", "0", "-1"], ["0", "0", "1", "0"]],
            },
            "base": {"dim": 2, "coords": ["y1", "y2"], "metric": "identity"},
            "map": {"components": ["x1", "x2"]},
            "region": {"min": [-1, -1, -1, -1], "max": [1, 1, 1, 1]},
            "sampling": {"points": 10},
        }
        report = run_suite(load_manifest_dict(data))
        pd = report.by_name("metric-positive-definite")
        assert pd.status == "fail"
        assert "DomainError" in pd.detail
        assert report.exit_code == 1


class TestDeterminism:
    def test_json_byte_identical(self):
        blobs = []
        for _ in range(2):
            man = load_fixture("slant-alpha", {"points": 25})
            blobs.append(run_suite(man).to_json().encode())
        assert blobs[0] == blobs[1]

    def test_seed_changes_report(self):
        man1 = load_fixture("slant-alpha", {"points": 25, "seed": 1})
        man2 = load_fixture("slant-alpha", {"points": 25, "seed": 2})
        j1, j2 = run_suite(man1).to_json(), run_suite(man2).to_json()
        assert j1 != j2

    def test_thread_cap_does_not_change_report(self, monkeypatch):
        man = load_fixture("slant-pi4", {"points": 12})
        base = run_suite(man).to_json()
        monkeypatch.setenv("SLANTLAB_THREADS", "4")
        man2 = load_fixture("slant-pi4", {"points": 12})
        assert run_suite(man2).to_json() == base


class TestCli:
    def test_fixtures_listing(self, capsys):
        assert main(["fixtures"]) == 0
        out = capsys.readouterr().out
        assert "slant-pi4" in out and "rank-deficient" in out
        assert len(out.strip().splitlines()) == 6

    def test_run_fixture_text(self, capsys):
        code = main(["run", "--fixture", "slant-pi4", "--points", "10"])
        out = capsys.readouterr().out
        assert code == 0
        assert "ProperSlant" in out
        assert "[PASS]" in out

    def test_run_fixture_json_to_file(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code = main(["run", "--fixture", "slant-alpha", "--points", "10",
                     "--format", "json", "--out", str(out_path),
                     "--param", "alpha=pi/6"])
        assert code == 0
        data = json.loads(out_path.read_text())
        assert data["schema_version"] == 1
        assert data["instance"] == "slant-alpha"
        assert data["metadata"]["params"]["alpha"] == pytest.approx(math.pi / 6)
        assert data["summary"]["exit_code"] == 0
        names = [c["name"] for c in data["checks"]]
        assert "slant-scan" in names

    def test_cli_double_run_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            code = main(["run", "--fixture", "slant-pi4", "--points", "15",
                         "--format", "json", "--out", str(path)])
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_run_manifest_file(self, tmp_path, capsys):
        manifest = tmp_path / "inst.toml"
        manifest.write_text("""
name = "file-instance"
seed = 5
[total]
dim = 4
coords = ["x1", "x2", "x3", "x4"]
metric = "identity"
J = [["0","-1","0","0"],["1","0","0","0"],["0","0","0","-1"],["0","0","1","0"]]
[base]
dim = 2
coords = ["y1", "y2"]
metric = "identity"
[map]
components = ["x1", "x2"]
[region]
min = [-1.0, -1.0, -1.0, -1.0]
max = [1.0, 1.0, 1.0, 1.0]
""")
        code = main(["run", str(manifest), "--points", "8"])
        out = capsys.readouterr().out
        assert code == 0
        assert "file-instance" in out

    def test_exit_code_fail(self, capsys):
        code = main(["run", "--fixture", "rank-deficient", "--points", "5"])
        capsys.readouterr()
        assert code == 1

    def test_exit_code_manifest_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text('name = "x"\n')
        assert main(["run", str(bad)]) == 2
        assert "error" in capsys.readouterr().err

    def test_exit_code_missing_file(self, capsys):
        assert main(["run", "/nonexistent/path.toml"]) == 2
        capsys.readouterr()

    def test_bad_param_syntax(self, capsys):
        code = main(["run", "--fixture", "slant-alpha", "--param", "alpha"])
        assert code == 2
        capsys.readouterr()

    def test_run_requires_target(self, capsys):
        assert main(["run"]) == 2
        capsys.readouterr()
