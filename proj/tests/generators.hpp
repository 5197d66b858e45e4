#pragma once
// Small seeded generators for the property tests. Every case derives its own
// stream from a fixed seed so failures replay exactly.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "levykernel/levy_measure.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
  std::uint64_t seed() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline levykernel::LevyMeasure truncated(Rng& g) {
  using namespace levykernel;
  return LevyMeasure(1, RadialProfile(TruncatedStable{g.uniform(0.3, 1.9), g.uniform(0.5, 3.0), g.uniform(0.5, 2.0)}),
                     AngularMeasure::uniform(1, 2.0));
}

inline levykernel::LevyMeasure tempered(Rng& g) {
  using namespace levykernel;
  return LevyMeasure(1,
                     RadialProfile(TemperedStable{g.uniform(0.3, 1.8), g.uniform(0.0, 1.0), g.uniform(0.5, 2.0),
                                                  g.uniform(0.5, 1.0), g.uniform(0.5, 2.0)}),
                     AngularMeasure::uniform(1, 2.0));
}

inline levykernel::LevyMeasure high_intensity(Rng& g) {
  using namespace levykernel;
  return LevyMeasure(1, RadialProfile(HighIntensity{g.uniform(1.2, 3.0), g.uniform(0.5, 2.0), Continuation::Zero}),
                     AngularMeasure::uniform(1, 2.0));
}

/// One of the three parametric families, chosen by the stream.
inline levykernel::LevyMeasure any_family(Rng& g) {
  switch (g.integer(0, 2)) {
    case 0: return truncated(g);
    case 1: return tempered(g);
    default: return high_intensity(g);
  }
}

}  // namespace gen
