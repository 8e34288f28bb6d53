"""Shared fixtures: the synthetic test font and renderers."""

from __future__ import annotations

import pytest

from glyphadv import FontRenderer, RenderConfig
from glyphadv import devfont


@pytest.fixture(scope="session")
def font_path(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("font") / "test.ttf"
    devfont.build_font(path)
    return str(path)


@pytest.fixture(scope="session")
def renderer(font_path) -> FontRenderer:
    return FontRenderer(RenderConfig(font_file=font_path))


@pytest.fixture(scope="session")
def rendered_db(renderer):
    """Small rendered database: four consonant groups plus the twin pair."""
    from glyphadv import build_db

    groups = devfont.consonant_groups()
    inventory = [c for grp in groups[:4] for c in grp] + [
        chr(devfont.IDENTICAL_PAIR[0]),
        chr(devfont.IDENTICAL_PAIR[1]),
    ]
    return build_db(inventory, renderer)
