"""Flat-key configuration: parsing, layering, seed derivation."""

import pytest

from skidtrack.config import (
    ENV_PREFIX,
    PRESETS,
    SCHEMA,
    HarnessConfig,
    derive_seeds,
    load_config,
    parse_config_text,
    parse_spikes,
)
from skidtrack.controller import ControllerGains
from skidtrack.errors import ConfigError
from skidtrack.simulate import DEFAULT_X0_TRUE
from skidtrack.terrain import SlipSpike
from skidtrack.trajectories import DEFAULT_DURATIONS


class TestParsing:
    def test_key_value_lines(self):
        values = parse_config_text("run.seed = 7\ncontroller.k1 = 3.5\n")
        assert values == {"run.seed": 7, "controller.k1": 3.5}

    def test_comments_and_blanks_ignored(self):
        text = "# header\n\nrun.seed = 7\n  # indented comment\n"
        assert parse_config_text(text) == {"run.seed": 7}

    def test_unknown_key_rejected_with_line_number(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config_text("run.seed = 7\nrun.sede = 8\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("run.seed 7\n")

    def test_type_errors_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("run.seed = soon\n")
        with pytest.raises(ConfigError):
            parse_config_text("controller.use_sat = maybe\n")

    def test_bool_spellings(self):
        assert parse_config_text("controller.use_sat = on\n") == {
            "controller.use_sat": True
        }
        assert parse_config_text("plant.nominal = FALSE\n") == {
            "plant.nominal": False
        }

    def test_list_values(self):
        values = parse_config_text(
            "run.trajectories = straight, bow\nrun.counts = 2, 1\n"
        )
        assert values["run.trajectories"] == ["straight", "bow"]
        assert values["run.counts"] == [2, 1]


class TestSpikes:
    def test_single_quadruple(self):
        assert parse_spikes("0:2:0.7:0") == (SlipSpike(0.0, 2.0, 0.7, 0.0),)

    def test_multiple(self):
        spikes = parse_spikes("0:2:0.7:0, 10:1:0.5:0.01")
        assert len(spikes) == 2
        assert spikes[1].t_start == 10.0
        assert spikes[1].sigma_v == 0.01

    def test_empty_means_no_spikes(self):
        assert parse_spikes("") == ()

    def test_malformed_rejected(self):
        with pytest.raises(ConfigError):
            parse_spikes("0:2:0.7")
        with pytest.raises(ConfigError):
            parse_spikes("a:b:c:d")


class TestDefaults:
    def test_defaults_materialize_known_objects(self):
        conf = load_config()
        assert conf.gains() == ControllerGains()
        assert conf.envelope().fraction == 0.25
        assert conf["plant.x0_true"] == DEFAULT_X0_TRUE
        assert conf["run.seed"] == 12345

    def test_durations_follow_trajectory_defaults(self):
        conf = load_config()
        for kind, duration in DEFAULT_DURATIONS.items():
            assert conf.get_duration(kind) == duration

    def test_plan_counts(self):
        conf = load_config()
        plan = conf.trajectory_plan()
        assert [(spec.kind, count) for spec, count in plan] == [
            ("straight", 3),
            ("circular", 3),
            ("bow", 2),
        ]
        assert conf.controllers() == ["smc", "smc-ss"]

    def test_paper_preset_loads(self):
        assert PRESETS == ("paper",)
        conf = load_config(preset="paper")
        assert conf.gains() == ControllerGains()

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError):
            load_config(preset="journal")

    def test_getitem_falls_back_to_schema(self):
        conf = HarnessConfig({})
        assert conf["controller.lambda1"] == SCHEMA["controller.lambda1"][1]


class TestLayering:
    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "conf.txt"
        path.write_text("controller.k1 = 3.0\n")
        conf = load_config(path=str(path))
        assert conf.gains().k1 == 3.0

    def test_env_overrides_file(self, tmp_path):
        path = tmp_path / "conf.txt"
        path.write_text("controller.k1 = 3.0\n")
        environ = {ENV_PREFIX + "CONTROLLER__K1": "4.0"}
        conf = load_config(path=str(path), environ=environ)
        assert conf.gains().k1 == 4.0

    def test_cli_overrides_env(self, tmp_path):
        path = tmp_path / "conf.txt"
        path.write_text("controller.k1 = 3.0\n")
        environ = {ENV_PREFIX + "CONTROLLER__K1": "4.0"}
        conf = load_config(
            path=str(path), environ=environ, cli_overrides={"controller.k1": 5.0}
        )
        assert conf.gains().k1 == 5.0

    def test_unknown_env_key_rejected(self):
        environ = {ENV_PREFIX + "CONTROLLER__K9": "4.0"}
        with pytest.raises(ConfigError):
            load_config(environ=environ)

    def test_foreign_env_vars_ignored(self):
        conf = load_config(environ={"PATH": "/usr/bin", "HOME": "/root"})
        assert conf["run.seed"] == 12345

    def test_unknown_cli_key_rejected(self):
        with pytest.raises(ConfigError):
            load_config(cli_overrides={"run.sede": 1})

    def test_with_overrides_returns_new_config(self):
        conf = load_config()
        other = conf.with_overrides({"run.seed": 1})
        assert other["run.seed"] == 1
        assert conf["run.seed"] == 12345


class TestFactories:
    def test_slip_config_carries_seed_and_spikes(self):
        conf = load_config()
        sc = conf.slip_config(seed=99)
        assert sc.kind == "smooth-random"
        assert sc.seed == 99
        assert sc.spikes == (SlipSpike(0.0, 2.0, 0.7, 0.0),)

    def test_estimator_config_carries_seed(self):
        conf = load_config()
        ec = conf.estimator_config(seed=5)
        assert ec.kind == "oracle"
        assert ec.seed == 5

    def test_mismatched_plan_lengths_rejected(self):
        conf = load_config(cli_overrides={"run.counts": [1, 2]})
        with pytest.raises(ConfigError):
            conf.trajectory_plan()

    def test_unknown_controller_rejected(self):
        conf = load_config(cli_overrides={"run.controllers": ["pid"]})
        with pytest.raises(ConfigError):
            conf.controllers()


class TestSeedDerivation:
    def test_three_distinct_streams(self):
        slip, plant, est = derive_seeds(42, 0, 0)
        assert (slip, plant, est) == (43, 44, 45)

    def test_runs_and_trajectories_do_not_collide(self):
        seen = set()
        for traj in range(3):
            for run in range(20):
                seeds = derive_seeds(42, traj, run)
                assert len(set(seeds)) == 3
                assert not (set(seeds) & seen)
                seen.update(seeds)

    def test_paired_across_variants(self):
        # both controller variants derive from the same (traj, run) slot
        assert derive_seeds(7, 2, 5) == derive_seeds(7, 2, 5)
