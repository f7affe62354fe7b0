# Exact lattice, cone and polytope modules
