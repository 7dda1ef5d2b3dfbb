# Experiment harness: population sizing, transfer experiments, reports and the CLI
