//! Criterion benchmarks for the quadrature, continuum and Fock kernels; see `benches/`.
