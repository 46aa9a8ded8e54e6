class Config:
    # Grid Configuration
    GRID_CONFIG = {
        'n_intervals': 400,
        'min_intervals': 2,
        'spacing_eps_factor': 4  # node spacing must match step within this many machine epsilons
    }

    # Resolvent Configuration
    RESOLVENT_CONFIG = {
        'tol': 1e-12,
        'max_terms': 60,
        'pivot_floor': 1e-14,
        'cross_check': False,  # build_greens also runs the direct solver and compares
        'agreement_floor': 1e-8,
        'agreement_h4_factor': 100.0
    }

    # Polynomial Root Configuration (Durand-Kerner)
    ROOTS_CONFIG = {
        'tol': 1e-13,
        'max_sweeps': 500,
        'seed': complex(0.4, 0.9)
    }

    # Green's Function Configuration
    GREENS_CONFIG = {
        'imag_residue_ratio': 1e-9,
        'exp_limit': 709.0,  # largest exponent np.exp accepts in float64
        'riccati_step': 1e-4,
        'residual_min_nodes_per_degree': 8
    }

    # Initial Value Problem Configuration
    IVP_CONFIG = {
        'wronskian_skip_ratio': 1e-10
    }

    # Boundary Value Problem Configuration
    BVP_CONFIG = {
        'resonance_ratio': 1e-12,
        'resonance_refinement_factor': 10.0
    }

    # Output Configuration
    OUTPUT_CONFIG = {
        'float_format': '%.17g',
        'default_format': 'json',
        'formats': ['csv', 'json'],
        'line_terminator': '\n'
    }

    # Logging Configuration
    LOGGING_CONFIG = {
        'level': 'WARNING',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    }

    # Acceptance Suite Configuration
    ACCEPTANCE_CONFIG = {
        'suite_name': 'paper',
        'property_cases': 50,
        'property_seed': 20240611,
        'property_n_intervals': 128,
        'oracle_rtol': 1e-12,
        'oracle_atol': 1e-14
    }
