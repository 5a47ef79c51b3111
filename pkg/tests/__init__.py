# rng_audit test suite
