import os


class Config:
    # Quadrature along the rectangle contours. Each segment is split into
    # panels of QUADRATURE_ORDER Gauss-Legendre nodes; a refinement doubles
    # the panel count until the relative change drops below the tolerance.
    QUADRATURE_NODES = 256
    QUADRATURE_ORDER = 16
    QUADRATURE_MAX_REFINEMENTS = 8
    QUADRATURE_RTOL = 1e-8
    # Absolute floor so integrals that are exactly zero (E = 0, or a contour
    # that encloses nothing) still count as converged
    QUADRATURE_ATOL = 1e-13

    # Slack allowed when checking "measured <= bound" style inequalities.
    # Closed-form bounds only get arithmetic slack; anything that went
    # through a quadrature gets the looser one.
    DOMINANCE_SLACK = 1e-9
    QUADRATURE_SLACK = 1e-6

    # Trial harness defaults. The JSON config file and the command-line
    # flags override these
    DEFAULT_TRIALS = 10
    DEFAULT_SEED_BASE = 0
    DEFAULT_WORKERS = min(4, os.cpu_count() or 1)
    DEFAULT_OUTPUT_FORMAT = 'csv'
    CSV_SIGNIFICANT_DIGITS = 17

    # Bump when the JSON config layout changes. Files carrying another
    # version are rejected
    CONFIG_SCHEMA_VERSION = 1

    LOG_LEVEL = 'INFO'


class TestingConfig(Config):
    # Smaller pools and quieter logs for the test suite
    DEFAULT_WORKERS = 1
    DEFAULT_TRIALS = 3
    LOG_LEVEL = 'WARNING'
    TESTING = True
