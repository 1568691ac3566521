import csv

import numpy as np
import pytest

from prebuf import (AdmissionConfig, ConfigError, ScenarioConfig,
                    ShadowingConfig, load_config, run_buffer_sweep,
                    run_multiuser, run_single_user)
from prebuf.cli import main

V = 250_000.0


class TestConfig:
    def test_defaults_match_two_cell_setup(self):
        cfg = ScenarioConfig()
        assert cfg.bs_positions_m == (0.0, 550.0)
        assert cfg.video.num_slots == 96
        assert cfg.video.bits_per_slot == V
        assert cfg.video.avg_rate_bps == 1.5e6
        assert cfg.video.max_carryover_bits == 5 * V
        assert cfg.link.total_power_dbm == 46.0
        assert cfg.link.num_system_prbs == 50
        assert cfg.shadowing.sigma_db == 10.0

    def test_trajectory_spans_lookahead(self):
        cfg = ScenarioConfig()
        traj = cfg.trajectory_m()
        assert traj[0] == 35.0
        assert traj.size == 96
        assert traj[-1] == pytest.approx(35.0 + 30.0 * 95 / 6)

    def test_empty_file_reproduces_defaults(self, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("")
        assert load_config(path) == ScenarioConfig()

    def test_overrides(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("""
[scenario]
seed = 7
user_speed_mps = 20
bs_positions_m = 0 400
[video]
num_slots = 48
[link]
snr_gap_db = 3
[shadowing]
sigma_db = 0
""")
        cfg = load_config(path)
        assert cfg.seed == 7
        assert cfg.user_speed_mps == 20.0
        assert cfg.bs_positions_m == (0.0, 400.0)
        assert cfg.video.num_slots == 48
        assert cfg.link.snr_gap_db == 3.0
        assert cfg.shadowing.sigma_db == 0.0

    def test_unknown_key_named_in_error(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[video]\nbitz = 3\n")
        with pytest.raises(ConfigError, match="bitz"):
            load_config(path)

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[nonsense]\nx = 1\n")
        with pytest.raises(ConfigError, match="nonsense"):
            load_config(path)

    def test_unparsable_value_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[scenario]\nseed = soon\n")
        with pytest.raises(ConfigError, match="seed"):
            load_config(path)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestSingleUser:
    def test_four_phases_without_shadowing(self, tmp_path):
        cfg = ScenarioConfig(shadowing=ShadowingConfig(sigma_db=0.0))
        run_single_user(cfg, tmp_path)
        rows = [r for r in read_csv(tmp_path / "trace.csv")
                if r["case"] == "anticipatory"]
        r_bits = np.array([float(r["r_bits"]) for r in rows])
        gain = np.array([float(r["gain_db"]) for r in rows])
        worst = int(np.argmin(gain))
        # early slots pre-load above V, the handover region drops below V
        # (down to zero), the tail settles at exactly V
        assert r_bits[0] > V
        drain = np.flatnonzero(r_bits < V - 1e-3)
        assert drain.size > 0
        assert drain[0] <= worst <= drain[-1]
        assert np.min(r_bits[drain]) == pytest.approx(0.0, abs=1e-3)
        assert r_bits[drain[-1] + 1:] == pytest.approx(
            np.full(96 - drain[-1] - 1, V), rel=1e-9)

    def test_zero_buffer_case_constant_rate(self, tmp_path):
        cfg = ScenarioConfig(shadowing=ShadowingConfig(sigma_db=0.0))
        run_single_user(cfg, tmp_path)
        rows = [r for r in read_csv(tmp_path / "trace.csv")
                if r["case"] == "zero_buffer"]
        r_bits = np.array([float(r["r_bits"]) for r in rows])
        w = np.array([float(r["w_prbs"]) for r in rows])
        gain = np.array([float(r["gain_db"]) for r in rows])
        assert r_bits == pytest.approx(np.full(96, V), rel=1e-9)
        assert int(np.argmax(w)) == int(np.argmin(gain))

    def test_summary_totals_ordered(self, tmp_path):
        cfg = ScenarioConfig()
        summary = run_single_user(cfg, tmp_path)
        assert summary["anticipatory_total_prb_slots"] \
            < summary["zero_buffer_total_prb_slots"]
        assert summary["anticipatory_outages"] == 0

    def test_byte_identical_reruns(self, tmp_path):
        cfg = ScenarioConfig(seed=5)
        run_single_user(cfg, tmp_path / "a")
        run_single_user(cfg, tmp_path / "b")
        assert (tmp_path / "a" / "trace.csv").read_bytes() \
            == (tmp_path / "b" / "trace.csv").read_bytes()


class TestBufferSweep:
    def test_monotone_and_z0_closed_form(self, tmp_path):
        cfg = ScenarioConfig(seed=2)
        result = run_buffer_sweep(cfg, [k * V for k in range(6)], tmp_path)
        totals = result["total_prb_slots"]
        assert np.all(np.diff(totals) <= 1e-9)
        trace = cfg.make_trace()
        assert totals[0] == pytest.approx(
            float(np.sum(V / trace.bits_per_prb)), rel=1e-9)

    def test_normalization_columns(self, tmp_path):
        cfg = ScenarioConfig(seed=2)
        run_buffer_sweep(cfg, [0.0, V], tmp_path, available_prbs=15)
        rows = read_csv(tmp_path / "sweep.csv")
        for row in rows:
            total = float(row["total_prb_slots"])
            assert float(row["frac_of_system_prbs"]) \
                == pytest.approx(total / (96 * 50), rel=1e-6)
            assert float(row["frac_of_available_prbs"]) \
                == pytest.approx(total / (96 * 15), rel=1e-6)

    def test_empty_z_values_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            run_buffer_sweep(ScenarioConfig(), [], tmp_path)


class TestMultiUser:
    def test_csv_and_dominance(self, tmp_path):
        cfg = ScenarioConfig(seed=0)
        admission = AdmissionConfig(total_requests=5, available_prbs=15,
                                    seed=0)
        means = run_multiuser(cfg, admission, [3, 6], tmp_path, num_seeds=2)
        rows = read_csv(tmp_path / "service_curve.csv")
        assert {r["planner"] for r in rows} == {"anticipatory", "baseline"}
        by_key = {(r["kv"], r["planner"]): r["mean_served"] for r in means}
        for kv in (3, 6):
            assert by_key[(kv, "anticipatory")] >= by_key[(kv, "baseline")]


class TestCli:
    def test_single_user_runs(self, tmp_path, capsys):
        rc = main(["single-user", "--sigma-db", "0",
                   "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "trace.csv").exists()
        assert "total_prb_slots" in capsys.readouterr().out

    def test_buffer_sweep_runs(self, tmp_path, capsys):
        rc = main(["buffer-sweep", "--z-max-multiple", "3",
                   "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "sweep.csv").exists()

    def test_multi_user_runs(self, tmp_path, capsys):
        rc = main(["multi-user", "--kv", "2", "4", "--num-seeds", "1",
                   "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "service_curve.csv").exists()

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[video]\nbitz = 3\n")
        rc = main(["single-user", "--config", str(bad),
                   "--out", str(tmp_path)])
        assert rc == 1

    def test_missing_config_file_exit_code(self, tmp_path):
        rc = main(["single-user", "--config", str(tmp_path / "none.ini"),
                   "--out", str(tmp_path)])
        assert rc == 1

    def test_seed_override_changes_output(self, tmp_path):
        main(["single-user", "--seed", "1", "--out", str(tmp_path / "a")])
        main(["single-user", "--seed", "2", "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "trace.csv").read_bytes() \
            != (tmp_path / "b" / "trace.csv").read_bytes()
