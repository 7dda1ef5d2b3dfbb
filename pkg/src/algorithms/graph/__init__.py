# Variable-distance computations
