# Benchmark problem families
