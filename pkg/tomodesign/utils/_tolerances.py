"""Default numerical tolerances. Every public function accepting a tolerance uses these as defaults."""

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-10
RANK_ONE_TOL = 1e-8
SINGULAR_TOL = 1e-12
QUASI_ORTH_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10
DEGENERATE_DET_TOL = 1e-14
PROBABILITY_TOL = 1e-12
