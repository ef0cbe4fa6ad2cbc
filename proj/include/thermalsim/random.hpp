// random.hpp
// Seeded randomness: a splittable counter-based substream scheme feeding
// std::mt19937_64, plus random Hermitian / density-matrix generators used
// by the small-universe experiments and the property tests.

#pragma once

#include <cstdint>
#include <random>

#include "thermalsim/quantum.hpp"

namespace thermalsim {

// SplitMix64 output mix (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent substream seed for (master, index); counter-based, so any
// subset of streams can be generated in any order or in parallel.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index * 0xD1B54A32D192ED03ULL + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t index = 0) {
    return std::mt19937_64(substream_seed(master, index));
}

// GUE-style random Hermitian matrix: independent complex Gaussian entries,
// symmetrized, scaled by `scale`.
inline HermitianOperator random_hermitian(Eigen::Index dim, std::mt19937_64& rng,
                                          double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index k = 0; k < dim; ++k)
            g(j, k) = complexd(gauss(rng), gauss(rng));
    return HermitianOperator(scale * 0.5 * (g + g.adjoint()));
}

// Full-rank random density operator (normalized complex Wishart).
inline DensityOperator random_density(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index k = 0; k < dim; ++k)
            g(j, k) = complexd(gauss(rng), gauss(rng));
    Matrix w = g * g.adjoint();
    w /= w.trace().real();
    return DensityOperator(std::move(w));
}

// Haar-ish random pure state (Gaussian amplitudes, normalized).
inline PureState random_pure_state(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) v(j) = complexd(gauss(rng), gauss(rng));
    v /= v.norm();
    return PureState(std::move(v));
}

}  // namespace thermalsim
