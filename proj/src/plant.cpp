#include "mgsta/plant.hpp"

#include <stdexcept>

#include "mgsta/errors.hpp"

namespace mgsta {

UncertainPlant constant_plant(const Mat& g0) {
  const std::size_t n = g0.dim();
  UncertainPlant plant;
  plant.n = n;
  plant.ctx_dim = n;
  plant.ctx_names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    plant.ctx_names.push_back("x" + std::to_string(i + 1));
  }
  plant.at = [g0, n](double, const Vec& ctx) {
    if (ctx.size() != n) {
      throw input_error("constant_plant: context dimension mismatch");
    }
    PlantEval e;
    e.G0 = g0;
    e.DeltaG = Mat(n);
    e.Delta1 = Mat(n);
    e.Delta2 = Mat(n);
    e.Delta3 = Mat(n);
    e.f2 = Vec(n);
    e.x = ctx;
    return e;
  };
  plant.ctx_for_state = [n](double, const Vec& x) {
    if (x.size() != n) {
      throw input_error("constant_plant: state dimension mismatch");
    }
    return x;
  };
  return plant;
}

UncertainPlant identity_plant(std::size_t n) {
  return constant_plant(Mat::identity(n));
}

}  // namespace mgsta
