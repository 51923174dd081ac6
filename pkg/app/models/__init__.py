# Domain models: tolerances, rank-one functionals, recovered preservers
