import pytest

from wptrelay.config import DEFAULTS, build_spec, dump_settings, load_config, parse_text
from wptrelay.errors import ParseError, ValidationError


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_config_gives_default_sweep(tmp_path):
    spec = load_config(write(tmp_path, ""))
    assert spec.sweep_n == tuple(range(11))
    assert spec.sweep_alpha == (0.1, 0.2, 0.3, 0.4)
    assert spec.sweep_gamma == (0.2, 0.6, 1.0, 1.4)
    assert spec.base.n_trials == 10_000
    assert spec.base.a_r == pytest.approx(1e-4)
    assert spec.base.budget.p_max == pytest.approx(0.1)
    assert spec.base.los_params.pl_exponent == 2.5
    assert spec.base.nlos_params.pl_intercept_db == -25.0
    assert len(spec.cells) == 11 * 4 * 4


def test_comments_and_blank_lines(tmp_path):
    spec = load_config(write(tmp_path, "# header\n\nsim.n_trials = 100  # trailing\n"))
    assert spec.base.n_trials == 100


def test_override_trials(tmp_path):
    assert load_config(write(tmp_path, "sim.n_trials = 100\n")).base.n_trials == 100


def test_alpha_out_of_range(tmp_path):
    with pytest.raises(ValidationError, match=r"alpha ∈ \[0,1\]"):
        load_config(write(tmp_path, "wpt.alpha = 1.5\n"))
    with pytest.raises(ValidationError, match=r"alpha ∈ \[0,1\]"):
        load_config(write(tmp_path, "sweep.alpha = 0.2, 1.5\n"))


@pytest.mark.parametrize("text,line,key", [
    ("sim.n_trials = 10\nbogus.key = 3\n", 2, "bogus.key"),
    ("\n\nsim.seed = 1\nsim.seed = 2\n", 4, "sim.seed"),
    ("sim.n_trials = ten\n", 1, "sim.n_trials"),
    ("link.noise_dbm = nan\n", 1, "link.noise_dbm"),
    ("geometry.positions = 1,2,3\n", 1, "geometry.positions"),
    ("just words\n", 1, None),
])
def test_parse_errors_carry_location(text, line, key):
    with pytest.raises(ParseError) as info:
        parse_text(text)
    assert info.value.line == line and info.value.key == key
    assert f"line {line}" in str(info.value)


def test_range_syntax():
    assert parse_text("sweep.n = 0..3, 8\n")["sweep.n"] == (0, 1, 2, 3, 8)


@pytest.mark.parametrize("text", [
    "run.mode = plot\n", "sweep.gamma = 0\n", "sweep.n = -1\n", "wpt.a_r_cm2 = 0\n",
    "link.p_max_mw = -1\n", "sim.n_trials = 0\n", "geometry.radius_m = 0\n",
    "geometry.placement = fixed\nsweep.n = 0..5\n",
    "sweep.max_total_trials = 1000\n",
])
def test_invalid_values(text):
    with pytest.raises(ValidationError):
        build_spec(parse_text(text))


def test_manifest_round_trip(tmp_path):
    spec = load_config(write(tmp_path, "sim.n_trials = 37\nwpt.alpha = 0.1\nsweep.gamma = 0.3\n"
                                       "channel.los.sigma_db = 7.123456789012345\n"))
    again = load_config(write(tmp_path, dump_settings(spec), "manifest.cfg"))
    assert again == spec


def test_dump_covers_every_key():
    text = dump_settings(build_spec({}))
    assert {line.split(" = ")[0] for line in text.splitlines()} == set(DEFAULTS)


def test_selection_mode_uses_fixed_positions():
    spec = build_spec({"run.mode": "selection-freq"})
    assert spec.base.placement.kind == "fixed"
    assert spec.base.n_candidates == 4
    assert {n for n, _, _ in spec.cells} == {4}


def test_with_overrides():
    spec = build_spec({}).with_overrides(**{"sim.seed": 5})
    assert spec.base.seed == 5
