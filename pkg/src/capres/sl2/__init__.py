"""The SL2(R) side of the pair ``(Sp_2(R), O_{p,p})``: groups, test functions, orbital integrals, spectra."""

from .capelli import (CapelliReport, DifferentialOperator, OscillatorModel, capelli_identity_check,
                      casimir_operator, make_trial_functions, opp_casimir, positive_capelli_eigenvalue)
from .group import IwasawaCoords, PrincipalSeriesLabel, SL2Element, SubquotientLabel
from .m2p import KFilter, TestFunctionM2p, make_gram_test_function
from .orbital import (OrbitalGrid, OrbitalProfile, block_project, f_epsilon, ktype_project, orbital_integral,
                      orbital_profile, projection_compatibility, psi_direct, psi_from_pair, residue_form)
from .spectral import (ContinuedModelResolvent, PlancherelDensity, Resonance, continued_model_resolvent,
                       locate_resonances, model_resolvent, model_resolvent_partial_fractions, plancherel_density)
from .tables import StableRangeRow, stable_range_table

__all__ = [
    "CapelliReport", "DifferentialOperator", "OscillatorModel", "capelli_identity_check", "casimir_operator",
    "make_trial_functions", "opp_casimir", "positive_capelli_eigenvalue",
    "IwasawaCoords", "PrincipalSeriesLabel", "SL2Element", "SubquotientLabel",
    "KFilter", "TestFunctionM2p", "make_gram_test_function",
    "OrbitalGrid", "OrbitalProfile", "block_project", "f_epsilon", "ktype_project", "orbital_integral",
    "orbital_profile", "projection_compatibility", "psi_direct", "psi_from_pair", "residue_form",
    "ContinuedModelResolvent", "PlancherelDensity", "Resonance", "continued_model_resolvent",
    "locate_resonances", "model_resolvent", "model_resolvent_partial_fractions", "plancherel_density",
    "StableRangeRow", "stable_range_table",
]
