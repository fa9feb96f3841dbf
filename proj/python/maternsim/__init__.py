"""Dependent thinning and extremal point process toolkit."""

from ._core import (
    accumulate_surface,
    ball_volume,
    envelope_buffer_radius,
    fidi_prob,
    first_order_intensity_mc,
    frechet_cdf_distance,
    matern1_intensity,
    matern2_intensity,
    matern2_retaining_prob,
    pair_correlation,
    sample_lgcp,
    sample_poisson,
    simulate_m3,
    thin_preset,
    thin_visible_centres,
    visible_centre_intensity,
    window_volume,
)

__version__ = "0.1.0"

__all__ = [
    "accumulate_surface",
    "ball_volume",
    "envelope_buffer_radius",
    "fidi_prob",
    "first_order_intensity_mc",
    "frechet_cdf_distance",
    "matern1_intensity",
    "matern2_intensity",
    "matern2_retaining_prob",
    "pair_correlation",
    "sample_lgcp",
    "sample_poisson",
    "simulate_m3",
    "thin_preset",
    "thin_visible_centres",
    "visible_centre_intensity",
    "window_volume",
]
