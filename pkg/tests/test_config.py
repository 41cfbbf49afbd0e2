import pytest

from lgwave import config as config_mod
from lgwave.config import RunConfig, emit_config, parse_config
from lgwave.errors import DomainError, ParseError, ValidationError
from lgwave.model import ModelKind

FIG1 = """
[model]
kind = holling2
a = 1.4
e1 = 2
mu = 1.2
d = 1
s = 0.5
"""


def test_parse_figure_one():
    config = parse_config(FIG1, subcommand="analyze")
    assert config.subcommand == "analyze"
    assert config.model.kind == "holling2"
    assert config.model.a == 1.4
    assert config.model.e1 == 2.0
    model = config.model.build()
    assert model.kind is ModelKind.HOLLING_II
    assert model.q1 == pytest.approx(2.2)
    # untouched blocks keep their defaults
    assert config.sim == config_mod.SimBlock()
    assert config.output.formats == ("csv", "svg")


def test_empty_text_needs_a_model():
    with pytest.raises(ValidationError, match="model.kind required"):
        parse_config("")


def test_negative_parameter():
    text = "[model]\nkind = holling2\na = -1\ne1 = 2\nmu = 1.2"
    with pytest.raises(ValidationError, match="model.a must be positive"):
        parse_config(text)


def test_unknown_keys_and_sections():
    with pytest.raises(ValidationError, match="model.alpha"):
        parse_config(FIG1 + "alpha = 3\n")
    with pytest.raises(ValidationError, match="plots"):
        parse_config(FIG1 + "[plots]\ncolor = red\n")


def test_unknown_model_kind():
    with pytest.raises(DomainError):
        parse_config("[model]\nkind = beddington\na = 1")


def test_parse_error_has_a_line_number():
    with pytest.raises(ParseError) as info:
        parse_config("kind = lv\n[model]\n")
    assert info.value.lineno == 1
    assert str(info.value).startswith("line 1:")


def test_numbers_are_checked():
    with pytest.raises(ValidationError, match="wave.c must be a number"):
        parse_config(FIG1 + "[wave]\nc = fast\n")
    with pytest.raises(ValidationError, match="output.reproducible"):
        parse_config(FIG1 + "[output]\nreproducible = maybe\n")


def test_speed_is_required_for_waves():
    for subcommand in ("bounds", "wave", "lyapunov"):
        with pytest.raises(ValidationError, match="wave.c required"):
            parse_config(FIG1, subcommand=subcommand)
    parse_config(FIG1, subcommand="simulate")


def test_choices_are_checked():
    with pytest.raises(ValidationError, match="wave.method"):
        parse_config(FIG1 + "[wave]\nmethod = newton\n")
    with pytest.raises(ValidationError, match="output.formats"):
        parse_config(FIG1 + "[output]\nformats = csv, png\n")
    with pytest.raises(ValidationError, match="sim.field"):
        parse_config(FIG1 + "[sim]\nfield = w\n")
    with pytest.raises(ValidationError, match="output.verbosity"):
        parse_config(FIG1 + "[output]\nverbosity = LOUD\n")
    with pytest.raises(ValidationError, match="run.subcommand"):
        parse_config(FIG1, subcommand="plot")


def test_overrides_win():
    config = parse_config(
        FIG1,
        ["model.a=1.2", "wave.c=2", "sim.snapshot_times=10, 20,30"],
        subcommand="wave",
    )
    assert config.model.a == 1.2
    assert config.wave.c == 2.0
    assert config.sim.snapshot_times == (10.0, 20.0, 30.0)

    with pytest.raises(ValidationError, match="section.key=value"):
        parse_config(FIG1, ["a=1.2"])
    with pytest.raises(ValidationError, match="is not a known section"):
        parse_config(FIG1, ["plot.a=1.2"])


def test_reproduce_needs_a_known_figure():
    config = parse_config("", subcommand="reproduce", figure="fig3")
    assert config.run.figure == "fig3"
    with pytest.raises(ValidationError, match="unknown figure 'fig9'"):
        parse_config("", subcommand="reproduce", figure="fig9")


def test_emit_and_parse_round_trip():
    config = parse_config(
        FIG1,
        [
            "wave.c=1.5",
            "wave.delta=1e-7",
            "sim.snapshot_times=10,20",
            "output.formats=csv",
            "output.reproducible=true",
        ],
        subcommand="wave",
    )
    text = emit_config(config)
    assert "[wave]" in text
    assert "delta = 1e-07" in text
    assert "sigma" not in text
    again = parse_config(text)
    assert again == config
    assert isinstance(again, RunConfig)


def test_default_config_round_trip():
    config = parse_config("[model]\nkind = lv\na = 4.5\n")
    assert parse_config(emit_config(config)) == config
