#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mgsta/errors.hpp"
#include "mgsta/plant.hpp"
#include "support/oracles.hpp"

using namespace mgsta;

TEST_CASE("constant plant carries its matrix and nothing else") {
  const Mat g0{{2.0, 0.5}, {-0.5, 1.0}};
  const UncertainPlant plant = constant_plant(g0);
  CHECK(plant.n == 2);
  CHECK(plant.ctx_dim == 2);
  REQUIRE(plant.ctx_names.size() == 2);
  CHECK(plant.ctx_names[0] == "x1");

  const Vec ctx{0.3, -0.8};
  const PlantEval e = plant.at(1.5, ctx);
  CHECK(oracles::rel_err(e.G0, g0) == 0.0);
  CHECK(max_abs(e.DeltaG) == 0.0);
  CHECK(max_abs(e.Delta1) == 0.0);
  CHECK(max_abs(e.Delta2) == 0.0);
  CHECK(max_abs(e.Delta3) == 0.0);
  CHECK(norm(e.f2) == 0.0);
  CHECK(e.x[0] == ctx[0]);
  CHECK(e.x[1] == ctx[1]);

  // with no input uncertainty G == G0 and the context is the state
  CHECK(oracles::rel_err(plant.G(0.0, ctx), g0) == 0.0);
  const Vec back = plant.ctx_for_state(0.0, ctx);
  CHECK(back[0] == ctx[0]);

  CHECK_THROWS_AS((void)plant.at(0.0, Vec{1.0}), input_error);
  CHECK_THROWS_AS((void)plant.ctx_for_state(0.0, Vec{1.0, 2.0, 3.0}),
                  input_error);
}

TEST_CASE("identity plant is the dimension-n baseline") {
  const UncertainPlant plant = identity_plant(3);
  CHECK(plant.n == 3);
  const PlantEval e = plant.at(0.0, Vec{1.0, 2.0, 3.0});
  CHECK(oracles::rel_err(e.G0, Mat::identity(3)) == 0.0);
  CHECK(e.x[2] == 3.0);

  // convenience accessors route through the same evaluation
  CHECK(max_abs(plant.DeltaG(0.0, Vec{1.0, 0.0, 0.0})) == 0.0);
  CHECK(norm(plant.f2(0.0, Vec{1.0, 0.0, 0.0})) == 0.0);
}
