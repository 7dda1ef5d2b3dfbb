# Bayesian networks with decision-tree local structures
