"""Programming-by-example synthesis over noisy data.

Thin dict-friendly wrappers over the native ``_noisynth`` module; structured
arguments cross the boundary as JSON.
"""

import json as _json

try:
    from . import _noisynth as _native  # packaged layout
except ImportError:  # in-tree layout: module next to the package on sys.path
    import _noisynth as _native

ConfigError = _native.ConfigError
EvalError = _native.EvalError

dl = _native.dl


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def _spec(obj):
    # Loss/noise/distance specs: bare names are JSON-encoded strings.
    return _json.dumps(obj)


def enumerate_programs(grammar, depth):
    """All programs of height <= depth as s-expression strings."""
    return _native.enumerate_programs(_dump(grammar), depth)


def evaluate(grammar, program, env):
    """Run a program (s-expression) on one input environment."""
    return _json.loads(_native.evaluate(_dump(grammar), program, _dump(env)))


def synthesize(grammar, data, loss, depth, costs=None, oracle=False):
    """Synthesize from {"inputs": [...], "outputs": [...]} data."""
    out = _native.synthesize(_dump(grammar), _dump(data), _spec(loss), depth,
                             "" if costs is None else _spec(costs), oracle)
    return _json.loads(out)


def loss(loss_spec, z, y):
    """Evaluate a loss; returns float('inf') where the catalog says so."""
    return _native.loss(_spec(loss_spec), _dump(z), _dump(y))


def noise_pmf(noise, y, z):
    return _native.noise_pmf(_spec(noise), _dump(y), _dump(z))


def noise_corrupt(noise, z, seed=0):
    return _json.loads(_native.noise_corrupt(_spec(noise), _dump(z), seed))


def converge(config, jobs=1):
    """Run a convergence experiment; returns {"csv": ..., "metadata": ...}."""
    return _json.loads(_native.converge(_dump(config), jobs))


def expected_reward(grammar, depth, noise, inputs, y, c):
    return _native.expected_reward(_dump(grammar), depth, _spec(noise),
                                   _dump(inputs), _dump(y), _dump(c))


__all__ = [
    "ConfigError",
    "EvalError",
    "dl",
    "enumerate_programs",
    "evaluate",
    "synthesize",
    "loss",
    "noise_pmf",
    "noise_corrupt",
    "converge",
    "expected_reward",
]
