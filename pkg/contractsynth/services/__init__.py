"""Pipeline services: front end, realizability, Skolem extraction, code generation, harness."""
