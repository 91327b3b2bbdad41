#include "boltzlab/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace boltzlab;
constexpr double pi = std::numbers::pi;

TEST_CASE("kernel evaluation") {
  const CollisionKernel hs = hard_sphere(2);
  CHECK(eval_B(hs, 2.0, 0.3) == doctest::Approx(1.0 / pi).epsilon(1e-14));
  CHECK(eval_B(hs, 2.0, -0.9) == doctest::Approx(1.0 / pi).epsilon(1e-14));
  CHECK(eval_B(hs, 0.0, 0.3) == 0.0);
  KineticPart soft;
  soft.gamma = 0.5;
  CHECK(eval_B(make_kernel(3, soft, AngularPart{}), 0.0, 0.1) == 0.0);

  const MollifiedSplit sp = split_kernel(hs, 8, 8);
  const CollisionKernel S = kernel_piece(hs, sp, "SS");
  CHECK(S.b(0.5) == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-12));
}

TEST_CASE("kernel validation") {
  KineticPart phi;
  phi.gamma = 0.0;
  CHECK_THROWS(make_kernel(2, phi, AngularPart{}));
  CHECK_NOTHROW(make_kernel(2, phi, AngularPart{}, true));
  phi.gamma = 2.0;
  CHECK_THROWS(make_kernel(2, phi, AngularPart{}));
  KernelDescriptor d;
  d.angular = "nope";
  CHECK_THROWS(build_kernel(2, d));
}

TEST_CASE("angular mass") {
  CHECK(angular_mass(hard_sphere(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(angular_mass(hard_sphere(3)) == doctest::Approx(1.0).epsilon(1e-12));
  AngularPart raw;
  raw.cb = 1.0 / (4 * pi);
  CHECK(angular_mass(make_kernel(3, KineticPart{}, raw)) == doctest::Approx(1.0).epsilon(1e-12));

  for (int N : {2, 3}) {
    const CollisionKernel K = hard_sphere(N);
    const MollifiedSplit sp = split_kernel(K, 8, 8);
    const double s = angular_mass(kernel_piece(K, sp, "SS")), r = angular_mass(kernel_piece(K, sp, "SR"));
    CHECK(std::abs(s + r - angular_mass(K)) < 1e-10);
  }

  SUBCASE("non-cutoff power law has no finite mass") {
    KernelDescriptor d;
    d.angular = "power";
    d.alpha = 2.5;
    d.normalization = "value";
    d.cb = 1.0;
    CHECK_THROWS(angular_mass(build_kernel(2, d)));
  }
}

TEST_CASE("angular tail rate") {
  const std::vector<double> eps{0.01, 0.02, 0.04, 0.08};
  SUBCASE("constant b on the circle: defect = eps / pi") {
    const TailFit t = angular_tail_rate(hard_sphere(2), eps);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(t.defects[i] == doctest::Approx(eps[i] / pi).epsilon(1e-10));
    CHECK(std::abs(t.delta - 1.0) <= 0.05);
  }
  SUBCASE("constant b on the sphere: defect ~ eps^2") {
    // two polar caps of int_0^eps b sin t dt with b = 1/(4 pi), no azimuthal factor (as for N = 2)
    const TailFit t = angular_tail_rate(hard_sphere(3), eps);
    for (std::size_t i = 0; i < eps.size(); ++i)
      CHECK(t.defects[i] == doctest::Approx((1.0 - std::cos(eps[i])) / (2 * pi)).epsilon(1e-8));
    CHECK(std::abs(t.delta - 2.0) <= 0.1);
  }
  SUBCASE("band support gives the infinite sentinel") {
    KernelDescriptor d;
    d.angular = "band";
    d.theta_b = 0.3;
    const TailFit t = angular_tail_rate(build_kernel(2, d), eps);
    CHECK(std::isinf(t.delta));
  }
}

TEST_CASE("Holder constant") {
  const auto pairs = holder_samples(10.0);
  CHECK(holder_constant(hard_sphere(2), pairs) == doctest::Approx(1.0).epsilon(1e-9));
  KernelDescriptor d;
  d.gamma = 0.5;
  const double h = holder_constant(build_kernel(2, d), pairs);
  CHECK(h <= 1.0 + 1e-12);
  CHECK(h > 0.999);
  d.gamma = 1.0;
  d.phi_scale = 2.0;
  CHECK(holder_constant(build_kernel(2, d), pairs) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("mollified split") {
  const CollisionKernel K = hard_sphere(2);
  SUBCASE("kinetic smooth piece vanishes near the origin") {
    const MollifiedSplit sp = split_kernel(K, 8, 4);
    for (double r = 0.0; r <= 0.25; r += 0.01) CHECK(sp.phi_smooth(r) == 0.0);
    CHECK(sp.phi_smooth(0.5) > 0.0);
  }
  SUBCASE("angular smooth piece is the constant in the interior") {
    const MollifiedSplit sp = split_kernel(K, 8, 8);
    for (double x = -0.625; x <= 0.625; x += 0.025) CHECK(sp.b_smooth(x) == doctest::Approx(1 / (2 * pi)).epsilon(1e-12));
    CHECK(sp.b_smooth(0.99) == 0.0);
    for (double x = -1; x <= 1; x += 0.01) CHECK(std::abs(sp.b_smooth(x) + sp.b_rem(x) - K.b(x)) < 1e-14);
  }
  SUBCASE("kinetic remainder shrinks on [1, n/2]") {
    const MollifiedSplit sp = split_kernel(K, 8, 32);
    double worst = 0;
    for (double r = 1.0; r <= 16.0; r += 0.01) worst = std::max(worst, std::abs(sp.phi_rem(r)));
    CHECK(worst <= 1e-2);
    for (double r = 0.0; r <= 20; r += 0.05) CHECK(std::abs(sp.phi_smooth(r) + sp.phi_rem(r) - K.phi(r)) < 1e-12);
  }
  CHECK_THROWS(split_kernel(K, 2, 8));
}

TEST_CASE("gain exponents") {
  CHECK(gain_exponent(2, 3, ExponentRule::corollary) == 6.0);
  CHECK(gain_exponent(2, 2, ExponentRule::corollary) == 4.0);
  CHECK(gain_exponent(2, 2, ExponentRule::theorem) == 1.5);
  CHECK(gain_exponent(1.999999, 2, ExponentRule::corollary) == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(gain_exponent(3, 2, ExponentRule::corollary) > gain_exponent(2.5, 2, ExponentRule::corollary));
  CHECK_THROWS(gain_exponent(1.0, 2, ExponentRule::theorem));
}

TEST_CASE("fold keeps the angular mass") {
  KernelDescriptor d;
  d.angular = "band";
  d.theta_b = 0.2;
  const CollisionKernel K = build_kernel(3, d);
  const CollisionKernel F = fold(K);
  CHECK(angular_mass(F) == doctest::Approx(angular_mass(K)).epsilon(1e-8));
  CHECK(F.b(-0.5) == 0.0);
}
