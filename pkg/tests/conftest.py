import pytest

from dopplerkb.fitting import FitConfig, search_g
from dopplerkb.synth import CampaignConfig, synth_campaign

CAMPAIGN_SEED = 2024


@pytest.fixture(scope="session")
def default_cfg():
    return CampaignConfig()


@pytest.fixture(scope="session")
def fit_cfg(default_cfg):
    return FitConfig.from_campaign(default_cfg)


@pytest.fixture(scope="session")
def campaign(default_cfg):
    # 8 pressures x 25 = 200 spectra, Galatry truth, SNR 1e3
    return synth_campaign(default_cfg, CAMPAIGN_SEED)


@pytest.fixture(scope="session")
def galatry_result(campaign, fit_cfg):
    return search_g(campaign, "galatry", (60e3, 200e3), fit_cfg)


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
