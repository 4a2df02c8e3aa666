import json

import pytest

from blochlab.config import ConfigError, load_config, parse_config


MINIMAL = {
    "lattice": {"n_cells": 8, "cell_length": 1.0, "points_per_cell": 32},
    "potential": {"harmonics": [[1, 2.0, 0.0]]},
}


def full_config():
    return {
        "lattice": {"n_cells": 8, "cell_length": 1.0, "points_per_cell": 32,
                    "mass": 1.0, "hbar": 1.0},
        "potential": {"constant": 0.0, "harmonics": [[1, 2.0, 0.0]]},
        "bands": 4,
        "observables": [
            {"name": "site0", "kind": "wannier_projector", "band": 0, "site": 0},
            {"name": "ring1", "kind": "series", "terms": [[1, 0, 1.0, 0.0]]},
            {"name": "h", "kind": "hamiltonian"},
            {"name": "shift", "kind": "translation"},
        ],
        "dynamics": {"epsilons": [1e-4, 2e-4], "source_cell": 6, "target_cell": 2,
                     "kinetic_scheme": "fd4", "perturbation": "site0"},
        "output_dir": "results",
    }


def test_minimal_config_fills_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.bands == 1
    assert cfg.mass == 1.0
    assert cfg.hbar == 1.0
    assert cfg.constant == 0.0
    assert cfg.observables == ()
    assert cfg.dynamics is None
    assert cfg.output_dir == "out"
    grid = cfg.grid()
    assert grid.total_points == 256
    assert cfg.potential().fourier_coefficient(1) == 1.0


def test_full_config_round_trip():
    cfg = parse_config(full_config())
    assert cfg.bands == 4
    assert len(cfg.observables) == 4
    assert cfg.observable("ring1").kind == "series"
    assert cfg.dynamics.kinetic_scheme == "fd4"
    assert cfg.dynamics.perturbation == "site0"
    resolved = cfg.resolved()
    assert resolved["lattice"]["mass"] == 1.0
    assert resolved["dynamics"]["epsilons"] == [1e-4, 2e-4]
    # resolved() must be plain JSON.
    json.dumps(resolved)


@pytest.mark.parametrize(
    "mutate,expected_key",
    [
        (lambda d: d["lattice"].pop("n_cells"), "lattice.n_cells"),
        (lambda d: d["lattice"].pop("cell_length"), "lattice.cell_length"),
        (lambda d: d["lattice"].pop("points_per_cell"), "lattice.points_per_cell"),
        (lambda d: d.pop("lattice"), "lattice"),
        (lambda d: d.pop("potential"), "potential"),
        (lambda d: d["lattice"].__setitem__("n_cells", 1), "lattice.n_cells"),
        (lambda d: d["lattice"].__setitem__("points_per_cell", 4), "lattice.points_per_cell"),
        (lambda d: d["lattice"].__setitem__("cell_length", -2.0), "lattice.cell_length"),
        (lambda d: d["lattice"].__setitem__("mass", 0.0), "lattice.mass"),
        (lambda d: d.__setitem__("bands", 0), "bands"),
        (lambda d: d.__setitem__("bands", 33), "bands"),
        (lambda d: d["potential"].__setitem__("harmonics", [[1, 1.0, 0.0], [1, 2.0, 0.0]]),
         "potential.harmonics[1]"),
        (lambda d: d["potential"].__setitem__("harmonics", [[0, 1.0, 0.0]]),
         "potential.harmonics[0]"),
        (lambda d: d.__setitem__("output_dir", ""), "output_dir"),
    ],
)
def test_errors_name_the_offending_key(mutate, expected_key):
    data = json.loads(json.dumps(full_config()))
    mutate(data)
    with pytest.raises(ConfigError) as err:
        parse_config(data)
    assert expected_key in str(err.value)


@pytest.mark.parametrize(
    "mutate,expected_key",
    [
        (lambda d: d["observables"][1].__setitem__("terms", []), "observables[1].terms"),
        (lambda d: d["observables"][1].__setitem__("scheme", "fd3"), "observables[1].scheme"),
        (lambda d: d["observables"][0].__setitem__("band", 4), "observables[0].band"),
        (lambda d: d["observables"][0].__setitem__("site", 8), "observables[0].site"),
        (lambda d: d["observables"][0].__setitem__("kind", "spin"), "observables[0].kind"),
        (lambda d: d["observables"][2].__setitem__("name", "site0"), "observables[2].name"),
        (lambda d: d["dynamics"].__setitem__("epsilons", []), "dynamics.epsilons"),
        (lambda d: d["dynamics"].__setitem__("epsilons", [0.0]), "dynamics.epsilons[0]"),
        (lambda d: d["dynamics"].__setitem__("source_cell", 8), "dynamics.source_cell"),
        (lambda d: d["dynamics"].__setitem__("perturbation", "ghost"), "dynamics.perturbation"),
        (lambda d: d["dynamics"].pop("target_cell"), "dynamics.target_cell"),
    ],
)
def test_observable_and_dynamics_errors_name_keys(mutate, expected_key):
    data = json.loads(json.dumps(full_config()))
    mutate(data)
    with pytest.raises(ConfigError) as err:
        parse_config(data)
    assert expected_key in str(err.value)


def test_observable_lookup_failure():
    cfg = parse_config(full_config())
    with pytest.raises(ConfigError, match="ghost"):
        cfg.observable("ghost")


def test_root_must_be_object():
    with pytest.raises(ConfigError):
        parse_config([1, 2, 3])


def test_load_config_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(full_config()))
    cfg = load_config(path)
    assert cfg.n_cells == 8
    assert cfg.dynamics.epsilons == (1e-4, 2e-4)
