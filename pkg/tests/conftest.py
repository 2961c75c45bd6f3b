"""Shared fixtures: charts, metrics, and fields reused across the suite.

The Eguchi-Hanson objects are session-scoped because building the
symmetry systems is the expensive part of the suite.
"""

import pytest

from geosym import geometry as G
from geosym import symsys as S
from geosym.exprfield import Chart, parse_expr


EH_METRIC_COMPONENTS = {
    ("rho", "rho"): "rho/(4*(rho^2-1))",
    ("phi", "phi"): "(rho^2-cos(psi)^2)/rho",
    ("phi", "psi"): "cos(psi)*cos(phi)*sin(psi)*sin(phi)/rho",
    ("phi", "theta"): "-sin(psi)^2*sin(phi)^2*cos(psi)/rho",
    ("psi", "psi"): "sin(phi)^2*(cos(psi)^2*cos(phi)^2+rho^2-cos(phi)^2)/rho",
    ("psi", "theta"): "sin(phi)^3*sin(psi)^3*cos(phi)/rho",
    ("theta", "theta"):
        "-sin(psi)^2*sin(phi)^2*(cos(psi)^2*cos(phi)^2-rho^2+1"
        "-cos(psi)^2-cos(phi)^2)/rho",
}

EH_KILLING_FIELDS = {
    "v1": {
        "phi": "cos(psi)",
        "psi": "-sin(psi)*cos(phi)/sin(phi)",
        "theta": "1",
    },
    "v2": {
        "phi": "sin(psi)*cos(theta)",
        "psi": "sin(phi)*sin(psi)^2*(cos(theta)*cos(psi)*cos(phi)"
               "+sin(phi)*sin(theta))"
               "/(cos(psi)^2*cos(phi)^2-cos(psi)^2-cos(phi)^2+1)",
        "theta": "(sin(phi)*cos(theta)*cos(psi)-sin(theta)*cos(phi))"
                 "/(sin(phi)*sin(psi))",
    },
    "v3": {
        "phi": "sin(psi)*sin(theta)",
        "psi": "-sin(phi)*sin(psi)^2*(sin(phi)*cos(theta)"
               "-sin(theta)*cos(phi)*cos(psi))"
               "/(cos(psi)^2*cos(phi)^2-cos(psi)^2-cos(phi)^2+1)",
        "theta": "(sin(phi)*sin(theta)*cos(psi)+cos(theta)*cos(phi))"
                 "/(sin(phi)*sin(psi))",
    },
    "v4": {
        "phi": "cos(psi)",
        "psi": "sin(psi)*sin(phi)*cos(phi)/(cos(phi)^2-1)",
        "theta": "-(cos(psi)^2*cos(phi)^2-cos(psi)^2-cos(phi)^2+1)"
                 "/(sin(phi)^2*sin(psi)^2)",
    },
}


def build_eh_chart() -> Chart:
    chart = Chart(["rho", "phi", "psi", "theta"])
    chart.add_trig_pair("phi")
    chart.add_trig_pair("psi")
    chart.add_trig_pair("theta")
    return chart


def build_eh_metric(chart: Chart) -> G.TensorField:
    coords = chart.coordinates
    comps = {}
    for (a, b), src in EH_METRIC_COMPONENTS.items():
        i, j = coords.index(a), coords.index(b)
        e = parse_expr(chart, src)
        comps[(i, j)] = e
        comps[(j, i)] = e
    return G.TensorField(chart, ("d", "d"), comps)


def build_eh_fields(chart: Chart):
    coords = chart.coordinates
    fields = []
    for name in ("v1", "v2", "v3", "v4"):
        comps = [chart.zero()] * 4
        for coord, src in EH_KILLING_FIELDS[name].items():
            comps[coords.index(coord)] = parse_expr(chart, src)
        fields.append(G.vector(chart, comps))
    return fields


@pytest.fixture(scope="session")
def eh_chart():
    return build_eh_chart()


@pytest.fixture(scope="session")
def eh_metric(eh_chart):
    return build_eh_metric(eh_chart)


@pytest.fixture(scope="session")
def eh_fields(eh_chart):
    return build_eh_fields(eh_chart)


@pytest.fixture(scope="session")
def eh_quaternionic_system(eh_metric):
    span = G.asd_span(eh_metric, orientation=1)
    return S.quaternionic_symmetry_system(span, eh_metric)


@pytest.fixture(scope="session")
def sphere():
    chart = Chart(["th", "ph"])
    chart.add_trig_pair("th")
    g = G.TensorField(chart, ("d", "d"), {
        (0, 0): chart.one(),
        (1, 1): parse_expr(chart, "sin(th)^2"),
    })
    return chart, g


@pytest.fixture()
def flat2():
    chart = Chart(["x", "y"])
    g = G.TensorField(chart, ("d", "d"),
                      {(0, 0): chart.one(), (1, 1): chart.one()})
    return chart, g


def standard_triple(chart: Chart):
    """The constant hypercomplex triple on a 4-dimensional chart."""
    def endo(mat):
        return G.endomorphism(
            chart, [[chart.const(v) for v in row] for row in mat])
    I = endo([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    J = endo([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
    K = G.endo_mul(I, J)
    return I, J, K


@pytest.fixture()
def flat4():
    chart = Chart(["x0", "x1", "x2", "x3"])
    g = G.TensorField(chart, ("d", "d"),
                      {(i, i): chart.one() for i in range(4)})
    return chart, g
