#include "lrcast/rng.hpp"

namespace lrcast {

double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

bool bernoulli(Engine& engine, double p) {
  return uniform01(engine) < p;
}

}  // namespace lrcast
