"""Burbea-Rao divergences, Bhattacharyya centroids and Gaussian mixture simplification."""

from ._brcentroid import (
    BrcError,
    bhattacharyya,
    bregman,
    burbea_rao,
    centroid,
    chernoff_coefficient,
    compare,
    fit_mixture,
    gaussian_centroid,
    hellinger,
    jeffreys_bregman,
    kl_divergence,
    run_cli,
    simplify,
    skew_burbea_rao,
    to_natural,
)

__all__ = [
    "BrcError",
    "bhattacharyya",
    "bregman",
    "burbea_rao",
    "centroid",
    "chernoff_coefficient",
    "compare",
    "fit_mixture",
    "gaussian_centroid",
    "hellinger",
    "jeffreys_bregman",
    "kl_divergence",
    "run_cli",
    "simplify",
    "skew_burbea_rao",
    "to_natural",
]
