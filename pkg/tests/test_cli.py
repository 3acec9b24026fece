import csv
import json
import subprocess
import sys

import pytest

from kfgm.cli.config import Scenario, load_scenario
from kfgm.cli.main import main
from kfgm.cli.report import InvariantReport, ReportRow
from kfgm.errors import ConfigError, InputParseError


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


def report(out):
    return json.loads((out / "report.json").read_text())


def rows_by_name(rep):
    return {r["name"]: r for r in rep["rows"]}


class TestConfig:
    def test_defaults(self):
        sc = load_scenario(None)
        assert sc.seed == 42 and sc.bc.kind == "antiperiodic" and sc.grid.n == 129

    def test_overrides(self, tmp_path):
        sc = load_scenario(None, seed=7, grid_n=65, tol_scale=2.0, out=tmp_path)
        assert (sc.seed, sc.grid.n, sc.tol_scale, sc.output) == (7, 65, 2.0, str(tmp_path))

    def test_unknown_key_rejected(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"solver": {"dt_factr": 0.1}})
        with pytest.raises(ConfigError):
            load_scenario(cfg)

    def test_bad_json(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        with pytest.raises(InputParseError):
            load_scenario(cfg)

    def test_validation(self, tmp_path):
        for bad in ({"tol_scale": 0}, {"bc": {"kind": "flux_balanced"}}, {"majorana_sign": "up"},
                    {"bc": {"kind": "robin"}}):
            with pytest.raises(ConfigError):
                load_scenario(write_json(tmp_path / "c.json", bad))

    def test_hash_ignores_output(self):
        assert Scenario(output="a").config_hash() == Scenario(output="b").config_hash()
        assert Scenario(seed=1).config_hash() != Scenario(seed=2).config_hash()


class TestReport:
    def test_overall_flag(self):
        rep = InvariantReport("x")
        rep.add(ReportRow.upper("a", "anchor", 1e-14, 1e-12))
        assert rep.passed
        rep.add(ReportRow.lower("b", "anchor", 1.5, 1.9))
        assert not rep.passed
        assert rep.summary_lines()[1].startswith("[FAIL] b")

    def test_timestamp_optional(self):
        rep = InvariantReport("x")
        assert "timestamp" in rep.to_dict()
        assert "timestamp" not in rep.to_dict(timestamp=False)


class TestCommands:
    def test_constrain(self, tmp_path, capsys):
        assert main(["constrain", "--out", str(tmp_path)]) == 0
        rep = report(tmp_path)
        assert rep["details"]["final_bc_set"] == ["Antiperiodic", "Periodic"]
        rows = rows_by_name(rep)
        assert rows["m3=0"]["residual"] < 1e-12
        assert rows["separated branch impenetrable"]["pass"]
        assert "[PASS]" in capsys.readouterr().out

    def test_deterministic_reports(self, tmp_path):
        outs = [tmp_path / "a", tmp_path / "b"]
        for o in outs:
            assert main(["verify", "--out", str(o), "--seed", "5"]) == 0
        a, b = (report(o) for o in outs)
        a.pop("timestamp"), b.pop("timestamp")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
        assert a["provenance"]["seed"] == 5

    def test_spectrum_periodic(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"bc": {"kind": "periodic"}})
        assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        with (tmp_path / "spectrum.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [int(r["n"]) for r in rows] == list(range(6))
        assert all(float(r["flux_residual"]) < 1e-9 and float(r["domain_residual"]) < 1e-9 for r in rows)

    def test_spectrum_antiperiodic_has_no_rest_mode(self, tmp_path):
        assert main(["spectrum", "--out", str(tmp_path)]) == 0
        with (tmp_path / "spectrum.csv").open() as fh:
            assert all(float(r["k"]) > 0 for r in csv.DictReader(fh))

    def test_spectrum_family(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"bc": {"kind": "flux_balanced", "mu": 1.0, "branch": "upper"}})
        assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        assert report(tmp_path)["command"] == "spectrum"

    def test_evolve_minus_sign(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"majorana_sign": "minus", "solver": {"crossings": 2}})
        assert main(["evolve", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        for snap in sorted(tmp_path.glob("snapshot_*.csv")):
            with snap.open() as fh:
                rows = list(csv.DictReader(fh))
            assert max(abs(float(r["re_phi"])) for r in rows) == 0.0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["bc"] == "antiperiodic" and manifest["seed"] == 42

    def test_evolve_cfl_refusal(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"solver": {"dt_factor": 0.9}})
        assert main(["evolve", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_verify_negative_control(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"bc": {"kind": "transfer", "matrix": [[2, 0], [0, 1]]}})
        assert main(["verify", "--config", str(cfg), "--out", str(tmp_path)]) == 1
        assert not rows_by_name(report(tmp_path))["f[Phi,Phi]=0"]["pass"]

    def test_nrlimit(self, tmp_path):
        assert main(["nrlimit", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "nrlimit.csv").exists()

    def test_nrlimit_short_list(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {"solver": {"k_list": [0.01, 0.02]}})
        assert main(["nrlimit", "--config", str(cfg), "--out", str(tmp_path)]) == 2


class TestClassify:
    @pytest.mark.parametrize("data,label,member", [
        ({"transfer": [[1, 0], [0, 1]]}, "Periodic", True),
        ({"named": "antiperiodic"}, "Antiperiodic", True),
        ({"separated": {"m0_sign": -1}}, "ConfiningSeparated(m0_sign=-1)", False),
        ({"named": "dirichlet_and_neumann"}, "ConfiningSeparated(m0_sign=-1)", False),
        ({"transfer": [[1.3, 0.2], [0.1, 0.9]]}, "NotPseudoSelfAdjoint", False),
        ({"kfg_subspace": [[0, 0, 1, 0], [0, 0, 0, 1]]}, "GeneralPseudoSelfAdjoint", True),
    ])
    def test_inputs(self, tmp_path, data, label, member):
        inp = write_json(tmp_path / "bc.json", data)
        assert main(["classify", str(inp), "--out", str(tmp_path)]) == 0
        det = report(tmp_path)["details"]
        assert det["label"] == label
        assert (det["member"] is not None) == member
        if member:
            assert abs(det["member"]["n2"]) <= 1e-10

    def test_flux_balanced_transfer(self, tmp_path):
        inp = write_json(tmp_path / "bc.json", {"n_params": {"mu": 0.7, "m0": -0.7648421872844885,
                                                             "m1": -0.644217687237691, "m3": 0.0}})
        assert main(["classify", str(inp), "--out", str(tmp_path)]) == 0
        assert report(tmp_path)["details"]["class"]["kind"] == "FluxBalanced"

    @pytest.mark.parametrize("text", ["{oops", json.dumps({"transfer": [[1, 0]]}),
                                      json.dumps({"mystery": 1}), json.dumps([1, 2])])
    def test_malformed_input(self, tmp_path, text):
        inp = tmp_path / "bc.json"
        inp.write_text(text)
        assert main(["classify", str(inp), "--out", str(tmp_path)]) == 3

    def test_missing_file(self, tmp_path):
        assert main(["classify", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 3


class TestEntryPoint:
    def test_bad_flag_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["spectrum", "--grid", "many"])
        assert exc.value.code == 3

    def test_module_invocation(self, tmp_path):
        res = subprocess.run([sys.executable, "-m", "kfgm", "constrain", "--out", str(tmp_path)],
                             capture_output=True, text=True)
        assert res.returncode == 0
        assert "report:" in res.stdout
