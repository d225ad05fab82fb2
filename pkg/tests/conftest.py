from hypothesis import settings

# Derandomized so the whole suite, property tests included, is reproducible
# run to run; no deadline because a few properties train tiny models.
settings.register_profile("deterministic", deadline=None, derandomize=True)
settings.load_profile("deterministic")
