#pragma once

#include <cmath>
#include <cstdint>

namespace gmrf::rng {

// Counter-based generator "ctr-icdf-v1": every variate is a pure function
// of (seed, stream, counter), so draws are reproducible across platforms,
// thread counts and call orders. Streams key independent sample columns.

constexpr const char* kGeneratorId = "ctr-icdf-v1";

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
    h = mix64(h ^ (stream + 0xD1B54A32D192ED03ull));
    h = mix64(h ^ (counter + 0x8CB92BA72F3D8DD7ull));
    return h;
}

/// Uniform draw strictly inside (0, 1): 53 mantissa bits, offset keeps the
/// endpoints out so the normal quantile below stays finite.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(counter_word(seed, stream, counter) >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Standard normal quantile function, Wichura's PPND16 rational
/// approximation (relative error below 1e-15 over (0, 1)).
inline double normal_quantile(double p) {
    const double q = p - 0.5;
    if (q > -0.425 && q < 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) *
                        r +
                    4.5921953931549871457e4) *
                       r +
                   1.3731693765509461125e4) *
                      r +
                  1.9715909503065514427e3) *
                     r +
                 1.3314166789178437745e2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) *
                        r +
                    2.1213794301586595867e4) *
                       r +
                   5.3941960214247511077e3) *
                      r +
                  6.8718700749205790830e2) *
                     r +
                 4.2313330701600911252e1) *
                    r +
                1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) *
                       r +
                   1.27045825245236838258e0) *
                      r +
                  3.64784832476320460504e0) *
                     r +
                 5.76949722146069140550e0) *
                    r +
                4.63033784615654529590e0) *
                   r +
               1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) *
                       r +
                   1.48103976427480074590e-1) *
                      r +
                  6.89767334985100004550e-1) *
                     r +
                 1.67638483018380384940e0) *
                    r +
                2.05319162663775882187e0) *
                   r +
               1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) *
                       r +
                   2.65321895265761230930e-2) *
                      r +
                  2.96560571828504891230e-1) *
                     r +
                 1.78482653991729133580e0) *
                    r +
                5.46378491116411436990e0) *
                   r +
               6.65790464350110377720e0) /
              (((((((1.42151175831644588870e-15 * r + 1.84631831751005468180e-6) * r +
                    7.86869131145613259100e-4) *
                       r +
                   1.48753612908506148525e-2) *
                      r +
                  1.36929880922735805310e-1) *
                     r +
                 5.99832206555887937690e-1) *
                    r +
               1.0);
    }
    return q < 0.0 ? -val : val;
}

inline double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return normal_quantile(uniform01(seed, stream, counter));
}

}  // namespace gmrf::rng
