"""Model-file parsing: determinism, rejection of unknown keys, and the
symmetrized-entry conventions."""

import importlib.resources

import pytest

from geosym.modelfile import ModelError, parse_model


MINIMAL = """
[chart]
coordinates = x, y

[metric g]
g[x,x] = 1
g[y,y] = 1
"""


def test_minimal_model_parses():
    model = parse_model(MINIMAL)
    assert model.chart.coordinates == ["x", "y"]
    assert "g" in model.metrics


def test_chart_must_come_first():
    with pytest.raises(ModelError, match="first section"):
        parse_model("[metric g]\ng[x,x] = 1\n")


def test_unknown_section_kind_rejected():
    with pytest.raises(ModelError, match="unknown section kind"):
        parse_model("[chart]\ncoordinates = x\n\n[widget w]\nfoo = 1\n")


def test_unknown_chart_key_rejected():
    with pytest.raises(ModelError, match="unknown chart key"):
        parse_model("[chart]\ncoordinates = x\nextra = 1\n")


def test_parse_error_carries_line_number():
    text = "[chart]\ncoordinates = x\n\n[metric g]\ng[x,x] = +\n"
    with pytest.raises(ModelError) as exc:
        parse_model(text)
    assert exc.value.line == 5


def test_missing_trig_relation_is_named():
    text = "[chart]\ncoordinates = x\n\n[metric g]\ng[x,x] = sin(x)^2\n"
    with pytest.raises(ModelError, match="sin"):
        parse_model(text)


def test_trig_pair_requires_coordinate():
    text = "[chart]\ncoordinates = x\ntrig_pair = t\n"
    with pytest.raises(ModelError, match=r"sin\(t\)\^2 \+ cos\(t\)\^2 = 1"):
        parse_model(text)


def test_metric_symmetrized_convention_warning():
    text = (MINIMAL + "\n[metric h]\n"
            "h[x,y] = x\nh[y,x] = x\nh[x,x] = 1\nh[y,y] = 1\n")
    model = parse_model(text)
    assert any("symmetrized convention" in w for w in model.warnings)
    assert (model.metrics["h"].comp(0, 1) - model.metrics["h"].comp(1, 0)).is_zero()


def test_metric_conflicting_entries_rejected():
    text = (MINIMAL + "\n[metric h]\n" "h[x,y] = x\nh[y,x] = y\n")
    with pytest.raises(ModelError, match="conflicting"):
        parse_model(text)


def test_connection_symmetrization():
    text = """
[chart]
coordinates = x, y

[connection D]
D[x; x, y] = x
"""
    model = parse_model(text)
    D = model.connections["D"]
    assert (D.comp(0, 0, 1) - D.comp(0, 1, 0)).is_zero()
    assert D.is_torsion_free()


def test_duplicate_names_rejected():
    text = MINIMAL + "\n[vector g]\ng[x] = 1\n"
    with pytest.raises(ModelError, match="duplicate name"):
        parse_model(text)


def test_task_unknown_kind_rejected():
    text = MINIMAL + "\n[task t]\nkind = frobnicate\n"
    with pytest.raises(ModelError, match="unknown task kind"):
        parse_model(text)


def test_task_unknown_parameter_rejected():
    text = MINIMAL + "\n[task t]\nkind = closure\nbogus = 1\n"
    with pytest.raises(ModelError, match="not valid for task kind"):
        parse_model(text)


def test_task_reference_validation():
    text = MINIMAL + "\n[task t]\nkind = symmetry-bound\nstructure = killing\nmetric = missing\n"
    with pytest.raises(ModelError, match="not declared"):
        parse_model(text)


def test_matrix_rows():
    text = MINIMAL + "\n[matrix M]\nrow = 1, 1/2\nrow = -1, 0\n"
    model = parse_model(text)
    assert model.matrices["M"][0][1] == 0.5


def test_ragged_matrix_rejected():
    text = MINIMAL + "\n[matrix M]\nrow = 1, 2\nrow = 3\n"
    with pytest.raises(ModelError, match="unequal"):
        parse_model(text)


@pytest.mark.parametrize("name", [
    "flat2", "flat4", "eguchi_hanson", "submax_cprojective_n2", "blocks_v"])
def test_bundled_models_parse(name):
    ref = importlib.resources.files("geosym") / "models" / f"{name}.model"
    model = parse_model(ref.read_text(), str(ref))
    assert model.tasks
    assert not model.warnings
