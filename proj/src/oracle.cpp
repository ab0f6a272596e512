#include "qdep/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qdep/numerics.hpp"

namespace qdep {

namespace rng {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamTweak = 0x5851F42D4C957F2DULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace

std::uint64_t value(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * kGamma);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    // (k + 1/2) / 2^53: strictly inside (0, 1).
    return (static_cast<double>(value(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64((seed ^ kStreamTweak) + (index + 1) * kGamma);
}

} // namespace rng

namespace {

// Counter slots per sample; slot 0 is V, slot 1 is W, further slots feed
// mixture component picks.
constexpr std::uint64_t kSlots = 8;

struct SlotDraw {
    std::uint64_t seed;
    std::uint64_t base;
    std::uint64_t next;

    double operator()() {
        if (next >= kSlots) throw InversionFailure("sample: counter slots exhausted");
        return rng::uniform01(seed, base + next++);
    }
};

double invert_fgm(double theta, double v, double w) {
    // dC/dv = u(1 + A(1-u)) with A = theta(1-2v); solve the quadratic for u.
    const double A = theta * (1.0 - 2.0 * v);
    if (std::abs(A) < 1e-12) return w;
    const double disc = (1.0 + A) * (1.0 + A) - 4.0 * A * w;
    const double u = (1.0 + A - std::sqrt(std::max(0.0, disc))) / (2.0 * A);
    return std::clamp(u, 0.0, 1.0);
}

double conditional_u(const Copula& c, double v, double w, SlotDraw& draw) {
    switch (c.family()) {
    case Copula::Family::FrechetUpper: return v;
    case Copula::Family::FrechetLower: return 1.0 - v;
    case Copula::Family::Independence: return w;
    case Copula::Family::Fgm: return invert_fgm(c.parameter(), v, w);
    case Copula::Family::Mix: {
        const double pick = draw();
        double acc = 0.0;
        for (std::size_t i = 0; i < c.weights().size(); ++i) {
            acc += c.weights()[i];
            if (pick <= acc || i + 1 == c.weights().size())
                return conditional_u(c.parts()[i], v, w, draw);
        }
        return conditional_u(c.parts().back(), v, w, draw);
    }
    case Copula::Family::GgArchimedean: {
        // dC/dv(., v) is 0 up to the seam, then climbs to 1; bracket from
        // the seam so the kink never sits inside the root interval.
        const auto kinks = c.kink_points_u(v);
        const double seam = kinks.empty() ? 0.0 : kinks.front();
        auto h = [&](double u) { return c.partial_v(u, v) - w; };
        double lo = std::clamp(seam, 0.0, 1.0);
        if (h(lo) > 0.0) lo = 0.0; // below the seam the conditional is 0 <= w
        try {
            return find_root(h, lo, 1.0, Tolerance{1e-10, 0.0, 60});
        } catch (const NoSignChange&) {
            throw InversionFailure("sample: conditional cdf not invertible");
        }
    }
    }
    throw InversionFailure("sample: unsupported family");
}

double quantile(const Marginal& m, double v) {
    if (m.is_uniform()) return v;
    const auto& cum = m.cumulative();
    const auto it = std::lower_bound(cum.begin(), cum.end(), v);
    const std::size_t idx =
        std::min(static_cast<std::size_t>(it - cum.begin()), m.points().size() - 1);
    return m.points()[idx];
}

Estimate covariance_of(const std::vector<std::pair<double, double>>& zs) {
    const double n = static_cast<double>(zs.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [a, b] : zs) {
        mx += a;
        my += b;
    }
    mx /= n;
    my /= n;

    double cov = 0.0;
    for (const auto& [a, b] : zs) cov += (a - mx) * (b - my);
    cov /= n;

    // SE of the plug-in covariance: sd of the centered products over sqrt(n).
    double var_z = 0.0;
    for (const auto& [a, b] : zs) {
        const double z = (a - mx) * (b - my) - cov;
        var_z += z * z;
    }
    var_z /= n;
    return {cov, std::sqrt(var_z / n)};
}

} // namespace

std::pair<double, double> sample_pair(const JointModel& jm, std::uint64_t seed,
                                      std::uint64_t index) {
    const std::uint64_t base = index * kSlots;
    const double v = rng::uniform01(seed, base);
    const double w = rng::uniform01(seed, base + 1);
    SlotDraw draw{seed, base, 2};
    const double u = conditional_u(jm.copula, v, w, draw);
    return {quantile(jm.marginal_x, u), quantile(jm.marginal_y, v)};
}

std::vector<std::pair<double, double>> sample(const JointModel& jm, const SampleSpec& spec) {
    std::vector<std::pair<double, double>> out;
    out.reserve(spec.n);
    for (std::uint64_t i = 0; i < spec.n; ++i) out.push_back(sample_pair(jm, spec.seed, i));
    return out;
}

Estimate estimate_cov(const JointModel& jm, const Distortion& beta, const SampleSpec& spec) {
    if (spec.n < 2) throw DomainError("estimate_cov: need n >= 2");
    std::vector<std::pair<double, double>> zs;
    zs.reserve(spec.n);
    for (std::uint64_t i = 0; i < spec.n; ++i) {
        const auto [x, y] = sample_pair(jm, spec.seed, i);
        zs.emplace_back(x, beta(y));
    }
    return covariance_of(zs);
}

Estimate estimate_threshold_cov(const JointModel& jm, double y, const SampleSpec& spec) {
    if (spec.n < 2) throw DomainError("estimate_threshold_cov: need n >= 2");
    std::vector<std::pair<double, double>> zs;
    zs.reserve(spec.n);
    for (std::uint64_t i = 0; i < spec.n; ++i) {
        const auto [xi, yi] = sample_pair(jm, spec.seed, i);
        zs.emplace_back(xi, yi > y ? 1.0 : 0.0);
    }
    return covariance_of(zs);
}

} // namespace qdep
