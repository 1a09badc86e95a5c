import json
import math

import numpy as np
import pytest

from gridrecovery.config.presets import (
    DEFAULT_FRAGILITY,
    DESK,
    GILROY,
    REPAIR_TIME_TABLE,
    UNDAMAGED_FRAGILITY,
)
from gridrecovery.domain import (
    ComponentKind,
    DamageScenario,
    DamageState,
    FragilityProfile,
    RepairTimeTable,
)
from gridrecovery.hazard.damage import (
    sample_repair_time,
    sample_scenario,
    sample_scenarios,
    scenario_seeds,
)
from gridrecovery.hazard.scenarios import (
    ScenarioFileError,
    load_scenarios,
    save_scenarios,
)
from gridrecovery.network.topology import network_from_preset
from gridrecovery.validation.validator import ValidationError


@pytest.fixture(scope="module")
def desk():
    return network_from_preset(DESK)


class TestRepairTimeTable:
    def test_default_means(self):
        """Expected repair times per kind and damage state, in days"""
        assert REPAIR_TIME_TABLE.mean_days[ComponentKind.SUBSTATION] == (
            0.0,
            1.0,
            3.0,
            7.0,
            30.0,
        )
        assert REPAIR_TIME_TABLE.mean_days[ComponentKind.TRANSMISSION] == (
            0.0,
            0.5,
            1.0,
            1.0,
            2.0,
        )
        assert REPAIR_TIME_TABLE.mean_days[ComponentKind.DISTRIBUTION] == (
            0.0,
            0.5,
            1.0,
            1.0,
            1.0,
        )

    def test_undamaged_mean_must_be_zero(self):
        means = dict.fromkeys(ComponentKind, (1.0, 1.0, 1.0, 1.0, 1.0))
        with pytest.raises(ValueError, match="Undamaged repair mean"):
            RepairTimeTable(means)

    def test_missing_kind(self):
        with pytest.raises(ValueError, match="missing kind"):
            RepairTimeTable({ComponentKind.SUBSTATION: (0.0, 1.0, 1.0, 1.0, 1.0)})


class TestFragilityProfile:
    def test_default_damages_sixty_percent(self):
        for kind in ComponentKind:
            assert DEFAULT_FRAGILITY.damaged_fraction(kind) == pytest.approx(0.6)

    def test_mass_must_sum_to_one(self):
        masses = dict.fromkeys(ComponentKind, (0.5, 0.1, 0.1, 0.1, 0.1))
        with pytest.raises(ValueError, match="not a probability mass"):
            FragilityProfile(masses)

    def test_mass_needs_five_states(self):
        masses = dict.fromkeys(ComponentKind, (0.5, 0.5))
        with pytest.raises(ValueError, match="needs 5 entries"):
            FragilityProfile(masses)


class TestSampling:
    def test_undamaged_repair_time_is_zero(self):
        rng = np.random.default_rng(0)
        duration = sample_repair_time(
            ComponentKind.SUBSTATION, DamageState.UNDAMAGED, REPAIR_TIME_TABLE, rng
        )
        assert duration == 0

    @staticmethod
    def _draws(kind, state, seed, count=100_000):
        rng = np.random.default_rng(seed)
        return np.fromiter(
            (
                sample_repair_time(kind, state, REPAIR_TIME_TABLE, rng)
                for _ in range(count)
            ),
            dtype=np.float64,
            count=count,
        )

    def test_substation_complete_mean(self):
        """30-day mean, standard error about 0.095"""
        draws = self._draws(ComponentKind.SUBSTATION, DamageState.COMPLETE, 1)

        assert np.mean(draws) == pytest.approx(30.0, abs=0.5)
        assert draws.min() > 0

    def test_distribution_minor_mean(self):
        draws = self._draws(ComponentKind.DISTRIBUTION, DamageState.MINOR, 2)

        assert np.mean(draws) == pytest.approx(0.5, abs=0.02)

    @pytest.mark.parametrize("kind", list(ComponentKind))
    @pytest.mark.parametrize("state", list(DamageState)[1:])
    def test_exponential_moments(self, kind, state):
        """Mean within five standard errors, variance within 10% of m^2"""
        mean = REPAIR_TIME_TABLE.mean(kind, state)
        draws = self._draws(kind, state, seed=int(state))

        standard_error = mean / math.sqrt(draws.size)
        assert abs(np.mean(draws) - mean) <= 5 * standard_error
        assert np.var(draws) == pytest.approx(mean**2, rel=0.1)

    def test_all_mass_on_undamaged(self, desk):
        scenario = sample_scenario(desk, UNDAMAGED_FRAGILITY, seed=4)

        assert scenario.damaged_count == 0
        assert all(d == 0 for d in scenario.realized_duration)

    def test_damaged_components_have_positive_duration(self, desk):
        scenario = sample_scenario(desk, seed=9)

        for state, duration in zip(
            scenario.initial_state, scenario.realized_duration, strict=True
        ):
            assert (state == DamageState.UNDAMAGED) == (duration == 0)

    def test_fixed_seed_replays(self, desk):
        assert sample_scenario(desk, seed=42) == sample_scenario(desk, seed=42)

    def test_different_seeds_differ(self, desk):
        assert sample_scenario(desk, seed=1) != sample_scenario(desk, seed=2)

    def test_sixty_percent_damage_on_gilroy(self):
        """About 196 of 327 components damaged on average"""
        net = network_from_preset(GILROY)
        scenarios = sample_scenarios(net, 20, master_seed=5)

        counts = [s.damaged_count for s in scenarios]
        expected = 0.6 * net.size
        standard_error = math.sqrt(net.size * 0.6 * 0.4 / len(counts))
        assert abs(np.mean(counts) - expected) < 3 * standard_error

    def test_scenario_seeds_are_stable_and_distinct(self):
        seeds = scenario_seeds(7, 25)

        assert seeds == scenario_seeds(7, 25)
        assert len(set(seeds)) == 25
        assert scenario_seeds(8, 25) != seeds

    def test_scenario_seeds_extend_as_prefix(self):
        """Asking for more scenarios keeps the first ones"""
        assert scenario_seeds(7, 30)[:25] == scenario_seeds(7, 25)


class TestScenarioFiles:
    def test_empty_file(self, tmp_path, desk):
        path = tmp_path / "scenarios.jsonl"
        path.write_text("", encoding="utf-8")

        assert load_scenarios(path, desk) == []

    def test_save_and_load(self, tmp_path, desk):
        scenarios = sample_scenarios(desk, 3, master_seed=0)
        path = tmp_path / "scenarios.jsonl"

        save_scenarios(path, scenarios)

        assert load_scenarios(path, desk) == scenarios

    def test_blank_lines_are_skipped(self, tmp_path, desk):
        scenarios = sample_scenarios(desk, 2, master_seed=0)
        path = tmp_path / "scenarios.jsonl"
        save_scenarios(path, scenarios)
        path.write_text(path.read_text(encoding="utf-8") + "\n\n", encoding="utf-8")

        assert len(load_scenarios(path, desk)) == 2

    def test_duration_for_undamaged_component(self, tmp_path, desk):
        scenario = DamageScenario(
            seed=1,
            initial_state=(DamageState.UNDAMAGED,) * desk.size,
            realized_duration=(0.5,) + (0.0,) * (desk.size - 1),
        )
        path = tmp_path / "scenarios.jsonl"
        save_scenarios(path, [scenario])

        with pytest.raises(ValidationError, match="UNDAMAGED with duration 0.5"):
            load_scenarios(path, desk)

    def test_wrong_size(self, tmp_path, desk):
        scenario = DamageScenario(1, (DamageState.UNDAMAGED,), (0.0,))
        path = tmp_path / "scenarios.jsonl"
        save_scenarios(path, [scenario])

        with pytest.raises(ValidationError, match="1 states"):
            load_scenarios(path, desk)

    def test_invalid_json_names_the_line(self, tmp_path, desk):
        path = tmp_path / "scenarios.jsonl"
        good = json.dumps(
            {"seed": 0, "states": [0] * desk.size, "durations": [0.0] * desk.size}
        )
        path.write_text(f"{good}\n{{not json\n", encoding="utf-8")

        with pytest.raises(ScenarioFileError, match=r"scenarios.jsonl:2: invalid JSON"):
            load_scenarios(path, desk)

    def test_missing_field(self, tmp_path, desk):
        path = tmp_path / "scenarios.jsonl"
        path.write_text('{"seed": 0, "states": []}\n', encoding="utf-8")

        with pytest.raises(ScenarioFileError, match="Malformed scenario"):
            load_scenarios(path, desk)

    def test_unknown_state_code(self, tmp_path, desk):
        path = tmp_path / "scenarios.jsonl"
        path.write_text(
            json.dumps({"seed": 0, "states": [7], "durations": [1.0]}) + "\n",
            encoding="utf-8",
        )

        with pytest.raises(ScenarioFileError, match=":1:"):
            load_scenarios(path, desk)
