#include "doctest.h"
#include "vfv/initdata.hpp"

#include <cmath>

using namespace vfv;

TEST_CASE("SplitMix64 reference sequence") {
  // Published outputs of splitmix64 seeded with 0.
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
  SplitMix64 r2(0);
  r2.next();
  CHECK(r2.uniform() == double(0x6E789E6AA1B965F4ULL >> 11) * 0x1.0p-53);
}

TEST_CASE("coefficient draws are normalised and reproducible") {
  const auto a = draw_coefficients(42, 10), b = draw_coefficients(42, 10);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
  for (int j = 0; j < 2; ++j) {
    double sum = 0;
    for (double x : a.a[j]) {
      CHECK(x >= 0);
      CHECK(x <= 1);
      sum += x;
    }
    CHECK(std::abs(sum - 1) <= 1e-15);
    for (double x : a.b[j]) {
      CHECK(x >= 0);
      CHECK(x < 2 * std::numbers::pi);
    }
  }
  CHECK(draw_coefficients(43, 10).a != a.a);
  CHECK_THROWS(draw_coefficients(1, 0));
}

TEST_CASE("interface profile") {
  KhSpec spec;
  spec.amplitude = 0;
  CHECK(kh_interface(spec, 0, 0.3) == 0.25);
  CHECK(kh_interface(spec, 1, 0.3) == 0.75);

  KhSpec one;
  one.modes = 1;
  one.coeffs = KhCoefficients{{std::vector<double>{1.0}, std::vector<double>{1.0}},
                              {std::vector<double>{0.0}, std::vector<double>{0.0}}};
  for (double x : {0.0, 0.1, 0.37, 0.5, 1.0})
    CHECK(kh_interface(one, 0, x) == doctest::Approx(0.25 + 0.01 * std::cos(2 * std::numbers::pi * x)));

  const KhSpec def;
  const auto c = def.coefficients();
  for (int k = 0; k <= 10000; ++k) {
    const double x = k / 10000.0;
    for (int j = 0; j < 2; ++j) CHECK(std::abs(kh_profile(c, j, x)) <= 1.0);
  }
  CHECK(kh_interface(def, 0, 0.0) == doctest::Approx(kh_interface(def, 0, 1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(kh_interface(def, 2, 0.5), std::out_of_range);
}

TEST_CASE("KH field samples cell centres") {
  const GasParams<double> gas;
  KhSpec flat;
  flat.amplitude = 0;
  const Mesh m(8);
  const auto f = kh_initial_field(flat, m, gas);
  // cell (4, 4) has centre (0.5625, 0.5625): inner strip
  CHECK(f.cell(4, 4)(kDensity) == 2.0);
  CHECK(f.cell(4, 4)(kMomentumX) == -1.0);
  CHECK(f.cell(4, 4)(kEnergy) == doctest::Approx(6.5));
  // cell (4, 0) has centre y = 0.0625: outer
  CHECK(f.cell(4, 0)(kDensity) == 1.0);
  CHECK(f.cell(4, 0)(kEnergy) == doctest::Approx(6.375));
  CHECK(f.totals()(kDensity) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.totals()(kEnergy) == doctest::Approx(6.4375).epsilon(1e-12));
  CHECK(f.time == 0.0);

  const auto g1 = kh_initial_field(KhSpec{}, Mesh(64), gas);
  const auto g2 = kh_initial_field(KhSpec{}, Mesh(64), gas);
  CHECK(g1.cells == g2.cells);
}

TEST_CASE("explicit coefficients bypass the generator") {
  KhSpec spec;
  spec.seed = 1;
  spec.coeffs = draw_coefficients(99, 10);
  const auto c = spec.coefficients();
  CHECK(c.a == draw_coefficients(99, 10).a);
}
