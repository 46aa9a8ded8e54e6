# Tests package for the causal Green's function toolkit
