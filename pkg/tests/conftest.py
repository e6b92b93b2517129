import dataclasses

import pytest

from sbhsim.config import CampaignConfig, DeploymentConfig, LayoutConfig


def desk_config(**over) -> CampaignConfig:
    """7-site layout for test-sized runs; field overrides by dotted name."""
    cfg = CampaignConfig(layout=LayoutConfig(n_sites=7))
    for key, val in over.items():
        head, _, tail = key.partition("__")
        if tail:
            section = dataclasses.replace(getattr(cfg, head), **{tail: val})
            cfg = dataclasses.replace(cfg, **{head: section})
        else:
            cfg = dataclasses.replace(cfg, **{head: val})
    return cfg


def adhoc_config(**over) -> CampaignConfig:
    base = desk_config(**over)
    return dataclasses.replace(
        base, deployment=dataclasses.replace(base.deployment, kind="sbh_adhoc"))


@pytest.fixture
def cfg7() -> CampaignConfig:
    return desk_config()
