"""Spectral boundary layer finite elements for eps^2-perturbed fourth-order problems."""

from ._core import (
    StudyRow,
    bessel_exact_u,
    catalog_1d_names,
    dump_mesh_1d,
    dump_mesh_2d,
    fit_exponential,
    gauss_rule,
    run_case_1d,
    run_case_2d,
    run_study,
    scaled_bessel_i,
    solve_1d,
    verify,
)

__all__ = [
    "StudyRow",
    "bessel_exact_u",
    "catalog_1d_names",
    "dump_mesh_1d",
    "dump_mesh_2d",
    "fit_exponential",
    "gauss_rule",
    "run_case_1d",
    "run_case_2d",
    "run_study",
    "scaled_bessel_i",
    "solve_1d",
    "verify",
]
