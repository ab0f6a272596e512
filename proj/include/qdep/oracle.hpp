#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qdep/models.hpp"

namespace qdep {

// Counter-based generator: the splitmix64 output function applied to
// seed + (counter+1)*GAMMA. Stateless, so any sample index can be
// regenerated independently and streams are trivially splittable.
// Frozen by test vectors in tests/test_oracle.cpp.
namespace rng {

std::uint64_t value(std::uint64_t seed, std::uint64_t counter);

// Uniform double in the open interval (0, 1).
double uniform01(std::uint64_t seed, std::uint64_t counter);

// Decorrelated sub-stream seed for partitioned runs.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

} // namespace rng

struct SampleSpec {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
};

// Deterministic i-th draw from the joint model: V from the first counter
// slot, U by conditional-cdf inversion of dC/dv, component picks for
// mixtures from further slots, then the marginal transforms.
std::pair<double, double> sample_pair(const JointModel& jm, std::uint64_t seed,
                                      std::uint64_t index);

std::vector<std::pair<double, double>> sample(const JointModel& jm, const SampleSpec& spec);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Plug-in covariance estimate of (X, beta(Y)) with the asymptotic standard
// error of the covariance estimator.
Estimate estimate_cov(const JointModel& jm, const Distortion& beta, const SampleSpec& spec);

// Same for (X, 1{Y > y}).
Estimate estimate_threshold_cov(const JointModel& jm, double y, const SampleSpec& spec);

} // namespace qdep
