#ifndef TWOMODE_RNG_HPP
#define TWOMODE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace twomode {

// Seeded mt19937_64 with hand-rolled variate transforms so that streams are
// bit-identical across platforms and standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe as a log argument.
    double uniform_pos() { return (double(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double t = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Exponential inter-arrival gap for a Poisson process of the given rate.
    double exponential_gap(double rate) { return -std::log(uniform_pos()) / rate; }

    std::uint64_t raw() { return engine_(); }

    // Independent child stream (for per-trace seeding from a scenario seed).
    Rng spawn() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ull); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace twomode

#endif
