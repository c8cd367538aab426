import dataclasses

import numpy as np
import pytest

from mimo_uplink.errors import ConfigurationError, DomainError
from mimo_uplink.geometry import Placement, place_colocated, place_uniform_disk
from mimo_uplink.propagation import (PRESETS, LinkBudget, compute_rho_u, draw_beta,
                                     get_preset, in_model_range, path_loss_db)

URBAN = PRESETS["urban"]


def test_presets_match_table():
    expected = {
        "urban": (20, 20, 20, 50, 1.5, 2, 6, 0.5),
        "suburban": (20, 10, 20, 50, 1.5, 2, 8, 1),
        "rural": (20, 5, 40, 50, 1.5, 0.45, 8, 4),
    }
    for name, vals in expected.items():
        p = get_preset(name)
        got = (p.street_width, p.building_height, p.ap_height, p.bs_height,
               p.user_height, p.carrier_ghz, p.shadow_sigma_db, p.radius_km)
        assert got == vals
    with pytest.raises(ConfigurationError):
        get_preset("downtown")


def test_path_loss_urban_1km():
    # frozen from a term-by-term evaluation with the math module
    assert path_loss_db(1000.0, URBAN) == pytest.approx(140.6896409481252, abs=1e-9)
    assert path_loss_db(1000.0, URBAN) == pytest.approx(140.7, abs=0.05)


def test_path_loss_slope_per_decade():
    diff = path_loss_db(1000.0, URBAN) - path_loss_db(100.0, URBAN)
    assert diff == pytest.approx(43.42 - 3.1 * np.log10(20.0), abs=1e-9)
    assert diff == pytest.approx(39.39, abs=0.01)


def test_other_presets_frozen():
    assert path_loss_db(1000.0, PRESETS["suburban"]) == pytest.approx(134.8215577426778)
    assert path_loss_db(1000.0, PRESETS["rural"]) == pytest.approx(111.16054849035346)
    cell = URBAN.for_deployment("cellular")
    assert path_loss_db(502.3467427982389, cell) == pytest.approx(115.7761544872483)


@pytest.mark.parametrize("d", [20.0, 300.0, 1000.0, 4000.0])
def test_rural_below_urban(d):
    assert path_loss_db(d, PRESETS["rural"]) < path_loss_db(d, URBAN)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_path_loss_increasing(name):
    d = np.geomspace(10, 8000, 500)
    assert np.all(np.diff(path_loss_db(d, PRESETS[name])) > 0)


def test_path_loss_domain():
    with pytest.raises(DomainError):
        path_loss_db(0.0, URBAN)
    with pytest.raises(DomainError):
        path_loss_db([10.0, -1.0], URBAN)


def test_validity_range():
    np.testing.assert_array_equal(in_model_range([5, 10, 4999, 5000, 6000]),
                                  [False, True, True, True, False])


def test_rho_u_reference_budget():
    rho = compute_rho_u(LinkBudget())
    assert 10 * np.log10(rho) == pytest.approx(125.0, abs=1e-9)
    assert rho == pytest.approx(3.16e12, rel=1e-3)
    assert LinkBudget().rho_u == rho


def test_rho_u_scaling():
    base = LinkBudget()
    assert compute_rho_u(dataclasses.replace(base, tx_power_w=4.0)) == pytest.approx(2 * base.rho_u)
    ratio = compute_rho_u(dataclasses.replace(base, noise_figure_db=0.0)) / base.rho_u
    assert ratio == pytest.approx(10**0.9)
    with pytest.raises(ConfigurationError):
        compute_rho_u(dataclasses.replace(base, tx_power_w=0.0))


def _cellfree(M, K, params, rng):
    return Placement(place_uniform_disk(M, params.radius_m, rng),
                     place_uniform_disk(K, params.radius_m, rng),
                     params.ap_height, params.user_height, params.radius_m)


def test_beta_shape_fig1_configuration(rng):
    lsf = draw_beta(_cellfree(64, 18, URBAN, rng), URBAN, rng)
    assert lsf.beta.shape == (64, 18)
    assert np.all(lsf.beta > 0) and np.all(np.isfinite(lsf.beta))


def test_colocated_without_shadowing_has_equal_rows(rng):
    params = dataclasses.replace(URBAN.for_deployment("cellular"), shadow_sigma_db=0.0)
    ue = place_uniform_disk(18, params.radius_m, rng)
    pl = Placement(place_colocated(5), ue, params.ap_height, params.user_height,
                   params.radius_m, colocated=True)
    beta = draw_beta(pl, params, rng).beta
    assert beta.shape == (5, 18)
    assert np.all(beta == beta[0])


def test_colocated_shares_shadowing_across_rows(rng):
    params = URBAN.for_deployment("cellular")
    ue = place_uniform_disk(18, params.radius_m, rng)
    pl = Placement(place_colocated(4), ue, params.ap_height, params.user_height,
                   params.radius_m, colocated=True)
    beta = draw_beta(pl, params, rng).beta
    assert np.all(beta == beta[0])


def test_shadow_std():
    params = dataclasses.replace(URBAN, shadow_sigma_db=8.0)
    rng = np.random.default_rng(5)
    pl = _cellfree(400, 100, params, rng)
    lsf = draw_beta(pl, params, rng)
    from mimo_uplink.geometry import link_distances
    x = 10 * np.log10(lsf.beta) + path_loss_db(link_distances(pl), params)
    assert x.std() == pytest.approx(8.0, abs=0.2)
    assert abs(x.mean()) < 0.1


def test_beta_deterministic_and_user_permutation():
    params = URBAN
    rng = np.random.default_rng(1)
    ap = place_uniform_disk(30, params.radius_m, rng)
    ue = place_uniform_disk(6, params.radius_m, rng)
    pl = Placement(ap, ue, params.ap_height, params.user_height, params.radius_m)
    a = draw_beta(pl, dataclasses.replace(params, shadow_sigma_db=0.0), np.random.default_rng(2)).beta
    perm = np.array([3, 0, 5, 1, 4, 2])
    pl2 = Placement(ap, ue[perm], params.ap_height, params.user_height, params.radius_m)
    b = draw_beta(pl2, dataclasses.replace(params, shadow_sigma_db=0.0), np.random.default_rng(2)).beta
    np.testing.assert_allclose(b, a[:, perm], rtol=1e-14)
    c = draw_beta(pl, params, np.random.default_rng(2)).beta
    d = draw_beta(pl, params, np.random.default_rng(2)).beta
    np.testing.assert_array_equal(c, d)


def test_rural_links_beyond_5km_are_flagged():
    params = PRESETS["rural"]
    ap = np.array([[-3900.0, 0.0], [0.0, 0.0]])
    ue = np.array([[3900.0, 0.0]])
    lsf = draw_beta(Placement(ap, ue, params.ap_height, params.user_height,
                              params.radius_m), params, np.random.default_rng(0))
    np.testing.assert_array_equal(lsf.validity_flags[:, 0], [False, True])
    assert lsf.any_out_of_range
    assert np.all(lsf.beta > 0)


def test_height_mismatch_rejected(rng):
    pl = _cellfree(3, 2, URBAN, rng)
    with pytest.raises(ConfigurationError):
        draw_beta(pl, URBAN.for_deployment("cellular"), rng)
