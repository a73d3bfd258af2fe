"""Numerical tolerances and defaults, kept in one table."""

# Newton iterations (wave curves, Riemann solver, compression data)
NEWTON_STEP_TOL = 1e-15
NEWTON_RES_TOL = 1e-14
NEWTON_MAXIT = 50

# Rankine-Hugoniot acceptance, relative to the jump size
RH_REL_TOL = 1e-7

# eigenvalue separation below which r2 is declared degenerate
DEGENERATE_GAP = 1e-8

# integral-curve RK4 step cap
RK4_MAX_STEP = 1e-3
RK4_MIN_STEPS = 16

# waves (and non-physical residuals) at or below this size are roundoff
# and are not emitted as fronts; the absorbed amount is accounted for
WAVE_FLOOR = 1e-14

# front tracking defaults
LAMBDA_HAT = 7.0
TIE_EPS = 1e-12
EVENT_CAP = 10_000_000
CHAIN_TOL = 1e-7

# hyperbolicity window for eta
ETA_MAX = 0.25

# census: the ledger constant is the t=0 ratio times this slack (the
# interaction estimates allow O(omega) growth of the A total)
LEDGER_K_SLACK = 2.0
# a merged 2-shock counts as big once its strength reaches this fraction of omega
BIG2_FRACTION = 0.5
