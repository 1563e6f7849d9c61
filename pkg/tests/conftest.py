# Import fixtures define under .tests/fixtures
pytest_plugins = [
    "fixtures.fxtr_spaces",
    "fixtures.fxtr_oracles",
]
