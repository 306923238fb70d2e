"""Exit-criteria suite: one test per criterion, one pass/fail line each.

Run as ``pytest tests/test_acceptance.py -v -s`` (or via the CLI's
``acceptance`` subcommand, which drives the same engine).  Expensive
artifacts are shared through a module-scoped lab; the whole module takes
roughly ten minutes at the desk scale.
"""

import pytest

from hartree4d.acceptance import AcceptanceLab


@pytest.fixture(scope="module")
def lab():
    return AcceptanceLab()


def _run(result):
    print()
    print(result.line())
    for detail in result.details:
        print("      " + detail)
    assert result.passed, "\n".join([result.line(), *result.details])


@pytest.mark.slow
def test_criterion_01_ground_state_identities(lab):
    _run(lab.criterion_1_ground_state_identities())


@pytest.mark.slow
def test_criterion_02_sharp_inequality(lab):
    _run(lab.criterion_2_sharp_inequality())


@pytest.mark.slow
def test_criterion_03_stationarity(lab):
    _run(lab.criterion_3_stationarity())


@pytest.mark.slow
def test_criterion_04_virial_law(lab):
    _run(lab.criterion_4_virial_law())


@pytest.mark.slow
def test_criterion_05_free_flow(lab):
    _run(lab.criterion_5_free_flow())


@pytest.mark.slow
def test_criterion_06_subthreshold_bound(lab):
    _run(lab.criterion_6_subthreshold_bound())


@pytest.mark.slow
def test_criterion_07_blowup(lab):
    _run(lab.criterion_7_blowup())


@pytest.mark.slow
def test_criterion_08_concentration(lab):
    _run(lab.criterion_8_concentration())


@pytest.mark.slow
def test_criterion_09_oracle(lab):
    _run(lab.criterion_9_oracle())


@pytest.mark.slow
def test_criterion_10_resolution(lab):
    _run(lab.criterion_10_resolution())


@pytest.mark.slow
def test_criterion_11_symmetries(lab):
    _run(lab.criterion_11_symmetries())
