"""Variable-exponent norms, operators and a nonsmooth mountain-pass solver."""

import json

from ._core import (  # noqa: F401
    ConfigError,
    ConstructionError,
    Error,
    ExponentField,
    Grid,
    GridFunction,
    Potential,
    apply_A,
    energy_J,
    estimate_lambda_star,
    eval_R,
    holder_pairing,
    luxemburg_norm,
    make_j1,
    make_j2,
    make_quartic,
    modular,
    norm_bundle,
    phi_luxemburg_norm,
    run_scenario,
    sobolev_norm,
)


def run(config, command):
    """Run a scenario given as a dict or JSON text.

    Returns ``(exit_code, summary_dict, csv_text)``.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    code, summary, csv = run_scenario(text, command)
    return code, json.loads(summary), csv
