"""Policy execution, exact oracles and benchmark aggregation."""
