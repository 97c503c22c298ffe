"""Numerical laboratory for a reduced Willmore energy on asymptotically
flat conformal metrics.

The package studies large coordinate spheres ``S_lam(lam*xi)`` in metrics
``u**4 * delta`` that approach Schwarzschild of mass 2 at infinity.  The
central object is the reduced energy ``G = G1 + G2``: a closed-form
translation part plus a scalar-curvature part evaluated by exterior
quadrature.  Solvers locate its critical points; flux integrals give the
mass and center of mass to compare against the critical sphere's
barycenter.

Submodules are imported lazily so the command line can pin thread-pool
environment variables before anything numerical loads.
"""

import importlib

__version__ = "0.1.0"

_API = {
    # errors
    "DomainError": "errors",
    "SingularityError": "errors",
    "NonConvergenceError": "errors",
    "OutOfPlateauError": "errors",
    "BracketingError": "errors",
    "HypothesisViolation": "errors",
    # legendre
    "SeriesTruncation": "legendre",
    "legendre_table": "legendre",
    "legendre_eval": "legendre",
    "graph_profile": "legendre",
    "willmore_operator_sphere": "legendre",
    "lagrange_multiplier_estimate": "legendre",
    # quadrature
    "compensated_sum": "quadrature",
    "octave_ladder": "quadrature",
    "polar_breaks_for_radii": "quadrature",
    "SphereRule": "quadrature",
    "build_sphere_rule": "quadrature",
    "integrate_sphere": "quadrature",
    "integrate_hemisphere": "quadrature",
    "ExteriorRule": "quadrature",
    "build_exterior_rule": "quadrature",
    "integrate_exterior": "quadrature",
    # metrics
    "BumpProfile": "metrics",
    "bump_eval": "metrics",
    "ShellPerturbation": "metrics",
    "shell_laplacian_closed_form": "metrics",
    "ConformalMetricModel": "metrics",
    "SchwarzschildModel": "metrics",
    "OscillatorModel": "metrics",
    "ShellModel": "metrics",
    "ShellSumModel": "metrics",
    "GluedModel": "metrics",
    "CustomModel": "metrics",
    "scalar_curvature": "metrics",
    "MetricDeviation": "metrics",
    "metric_deviation": "metrics",
    "mean_curvature_sphere": "metrics",
    "ricci_schwarzschild_leading": "metrics",
    "make_model": "metrics",
    "MODEL_NAMES": "metrics",
    # reduced
    "SERIES_RADIUS": "reduced",
    "g1": "reduced",
    "grad_g1": "reduced",
    "g1_boundary_form": "reduced",
    "offset_sphere_moment": "reduced",
    "g2": "reduced",
    "grad_g2": "reduced",
    "ClosedFormGradient": "reduced",
    "shell_gradient_closed_form": "reduced",
    "ReducedEnergyEval": "reduced",
    "g_total": "reduced",
    "hawking_from_g": "reduced",
    # flux
    "ExtrapolationResult": "flux",
    "extrapolate_limit": "flux",
    "adm_mass": "flux",
    "hamiltonian_com": "flux",
    "hawking_mass": "flux",
    "willmore_energy_sphere": "flux",
    "FluxReport": "flux",
    "flux_report": "flux",
    # solver
    "HESSIAN_STEP": "solver",
    "fd_hessian": "solver",
    "CriticalPoint": "solver",
    "BranchTrace": "solver",
    "ComComparison": "solver",
    "ScanResult": "solver",
    "find_critical_point": "solver",
    "trace_branch": "solver",
    "com_compare": "solver",
    "stationary_scan": "solver",
    "convexity_check": "solver",
    "ray_map": "solver",
    # experiments
    "ExperimentConfig": "experiments",
    "ExperimentResult": "experiments",
    "Assertion": "experiments",
    "run_experiment": "experiments",
    "emit_report": "experiments",
    "default_config": "experiments",
    "EXPERIMENT_IDS": "experiments",
}

__all__ = sorted(_API)


def __getattr__(name):
    try:
        modname = _API[name]
    except KeyError:
        raise AttributeError(
            f"module {__name__!r} has no attribute {name!r}") from None
    module = importlib.import_module(f".{modname}", __name__)
    value = getattr(module, name)
    globals()[name] = value
    return value


def __dir__():
    return sorted(set(globals()) | set(_API))
