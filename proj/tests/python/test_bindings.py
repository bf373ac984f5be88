import pytest

import bergman


def test_closed_form_matches_engine_on_random_jet():
    jet = bergman.random_jet(2, 1, 2, 5)
    closed = bergman.b1_closed_form(jet)
    engine = bergman.b1_engine(jet)
    for key in ("endo", "trace", "jet_id"):
        assert closed[key] == engine[key]


def test_flat_model_trace_is_n_minus_2q():
    assert bergman.b1_trace(bergman.flat_jet(3, 1)) == "0"
    assert bergman.b1_trace(bergman.flat_jet(3, 0)) == "0"


def test_jet_round_trips_through_potential():
    potential = {"z1 z̄1": "1/2", "z2 z̄2": "1/2", "z1^2 z̄1": "1/3", "z1 z̄1^2": "1/3"}
    jet = bergman.jet_from_potential(potential, 2, 0)
    assert all(check["ok"] for check in bergman.validate_jet(jet))
    assert all(row["equal"] for row in bergman.identities(jet)["identities"])


def test_rrh_is_consistent():
    assert bergman.rrh(2, 1, 2)["consistent"]


def test_oracle_suite_green():
    assert all(check["ok"] for check in bergman.selftest())


def test_invalid_inputs_raise_value_error():
    with pytest.raises(ValueError):
        bergman.b1_closed_form({"n": 2})
    with pytest.raises(ValueError):
        bergman.jet_from_potential({"z1 z̄1": "1/2", "z1^2": "1"}, 1, 0)
