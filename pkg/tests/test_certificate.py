import json

import numpy as np
import pytest

from radsym.certificate import (CertificateReport, SearchExhausted, certify_composite,
                                certify_general, certify_prototype, epsilon0,
                                proof_chain_bounds, search_alpha_beta, simplex_energy_prototype,
                                sup_ball_average)
from radsym.potential import PowerLawPotential, TabulatedPotential
from radsym.radial_energy import radial_lower_bound

from conftest import CERTIFIED


@pytest.fixture(scope="module")
def bound_2d():
    return radial_lower_bound(0.05, 2, "numeric")


@pytest.fixture(scope="module")
def composite_report(bound_2d):
    return certify_composite(**CERTIFIED, bound=bound_2d)


def test_epsilon0_values():
    assert epsilon0(2) == pytest.approx(0.063724, abs=1e-6)
    assert epsilon0(3) == pytest.approx(1 / 24, rel=1e-12)
    with pytest.raises(ValueError):
        epsilon0(1)


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_simplex_energy(dim):
    assert simplex_energy_prototype(dim) == -dim / (2 * (dim + 1))


def test_prototype_margin_planar():
    rep = certify_prototype(0.05, 2, "analytic")
    assert rep.passed
    assert rep.margin == pytest.approx(0.012224183, abs=1e-8)
    assert rep.radial_lower_bound == pytest.approx(-0.32110915, abs=1e-8)
    assert all(rep.checks.values())


def test_prototype_numeric_bound_is_sharper():
    a = certify_prototype(0.05, 2, "analytic")
    n = certify_prototype(0.05, 2, "numeric")
    assert n.margin > a.margin and n.passed


@pytest.mark.parametrize("dim,eps", [(3, 0.04), (4, 0.03), (6, 0.02)])
def test_prototype_passes_below_epsilon0(dim, eps):
    assert eps < epsilon0(dim)
    assert certify_prototype(eps, dim, "analytic").passed


def test_prototype_can_fail():
    # with a wide well the radial bound drops below the simplex energy
    rep = certify_prototype(0.4, 2, "numeric")
    assert not rep.passed and rep.margin <= rep.slack
    assert rep.recompute_passed() is False


def test_report_json_round_trip():
    rep = certify_prototype(0.05, 2, "analytic")
    back = CertificateReport.from_dict(json.loads(rep.to_json()))
    assert back.margin == rep.margin and back.passed == rep.passed
    assert back.recompute_passed()


def test_tampered_report_detected():
    d = certify_prototype(0.05, 2, "analytic").to_dict()
    d["competitor_energy"] = -0.3
    assert not CertificateReport.from_dict(d).recompute_passed()


def test_unknown_schema_rejected():
    d = certify_prototype(0.05, 2, "analytic").to_dict()
    d["schema_version"] = 99
    with pytest.raises(ValueError):
        CertificateReport.from_dict(d)


def test_zero_excess_reduces_to_prototype(bound_2d):
    # W1 = 0: the competitor energy is the Dirac simplex energy and the
    # condition margin equals the prototype margin
    rep = certify_general(TabulatedPotential.constant(0.0), 0.05, 2, bound=bound_2d)
    proto = certify_prototype(0.05, 2, "numeric")
    assert rep.condition_lhs == 0.0
    assert rep.margin == pytest.approx(proto.margin, abs=1e-12)
    assert rep.competitor_energy == simplex_energy_prototype(2)


def test_general_rejects_negative_excess(bound_2d):
    with pytest.raises(ValueError):
        certify_general(TabulatedPotential.constant(-0.1), 0.05, 2, bound=bound_2d)


def test_general_rejects_wide_eps():
    with pytest.raises(ValueError):
        certify_general(TabulatedPotential.constant(0.0), 0.07, 2)


def test_sup_ball_average_power_law_is_at_origin():
    res = sup_ball_average(PowerLawPotential(1.0, 0.5), 0.025, 2, grid_step=0.01)
    assert res["argmax"] == pytest.approx(0.0, abs=1e-3)
    assert res["value"] >= 2 * 0.025 ** -0.5 / 1.5


def test_composite_certified_pair(composite_report):
    rep = composite_report
    assert rep.passed and rep.recompute_passed()
    assert rep.condition_lhs == pytest.approx(0.052705, abs=2e-5)
    assert rep.condition_rhs == pytest.approx(0.083147, abs=2e-5)
    assert rep.audit["shape"]["r0"] == pytest.approx(1.049916, abs=1e-5)


def test_proof_chain_dominates_numeric_sup(composite_report):
    chain = proof_chain_bounds(0.05, 0.00625, 0.0015625, 0.5, 2, 0.025)
    assert chain["total"] >= composite_report.condition_lhs
    assert composite_report.audit["proof_chain"] == chain


def test_composite_large_alpha_fails(bound_2d):
    rep = certify_composite(0.05, 0.1, 0.025, 0.5, 2, bound=bound_2d, grid_step=5e-3)
    assert not rep.passed
    assert rep.condition_lhs > rep.condition_rhs


def test_search_finds_certified_pair():
    alpha, beta, rep = search_alpha_beta(0.05, 0.5, 2)
    assert (alpha, beta) == (0.00625, 0.0015625)
    assert rep.passed
    assert [a for a, _, _ in rep.audit["search"]["tried"]] == [0.1, 0.05, 0.025, 0.0125, 0.00625]


def test_search_rejects_bad_inputs():
    with pytest.raises(ValueError):
        search_alpha_beta(0.2, 0.5, 2)
    with pytest.raises(ValueError):
        search_alpha_beta(0.05, 2.5, 2)


def test_search_exhausted_when_budget_too_small():
    with pytest.raises(SearchExhausted):
        search_alpha_beta(0.05, 0.5, 2, max_halvings=1)
