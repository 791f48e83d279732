#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fragwave/errors.hpp"
#include "fragwave/levy.hpp"
#include "helpers.hpp"

using namespace fragwave;
using testhelp::binary_half;
using testhelp::half_quarter;

TEST_CASE("tagged law of the binary split is one merged jump") {
  SubordinatorLaw law = tagged_law(binary_half());
  REQUIRE(law.jumps.size() == 1);
  CHECK(law.jumps[0].size == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(law.jumps[0].rate == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(law.killing_rate == 0.0);
}

TEST_CASE("tagged law of the dissipative split keeps killing mass") {
  SubordinatorLaw law = tagged_law(half_quarter());
  REQUIRE(law.jumps.size() == 2);
  CHECK(law.jumps[0].size == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(law.jumps[0].rate == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(law.jumps[1].size == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(law.jumps[1].rate == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(law.killing_rate == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(law.total_jump_rate() == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("tagged law reproduces phi") {
  for (const auto& nu : testhelp::random_measures(55, 10)) {
    SubordinatorLaw law = tagged_law(nu);
    for (double p : {0.2, 0.7, 1.5, 3.0}) {
      double from_law = law.killing_rate;
      for (const auto& j : law.jumps)
        from_law += j.rate * (1.0 - std::exp(-p * j.size));
      CHECK(from_law == doctest::Approx(phi(nu, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("laplace exponent of the drift-minus-subordinator process") {
  DislocationMeasure bin = binary_half();
  CHECK(laplace_exponent_psi(bin, 1.0, 0.0) == 0.0);
  CHECK(laplace_exponent_psi(bin, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  DislocationMeasure q = half_quarter();
  CHECK(laplace_exponent_psi(q, 1.0, 0.0) == doctest::Approx(-0.25).epsilon(1e-15));
  for (double beta : {0.5, 1.0, 4.0})
    CHECK(laplace_exponent_psi(q, 2.0, beta) < 2.0 * beta);  // subordinator part > 0
  CHECK_THROWS_AS(laplace_exponent_psi(bin, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("largest psi root by convexity") {
  DislocationMeasure bin = binary_half();
  CHECK(largest_psi_root(bin, 1.0) == 0.0);  // conservative, c > mean drift

  // Conservative but slow drift: psi dips negative, root is positive.
  double root_slow = largest_psi_root(bin, 0.5);
  CHECK(root_slow > 0.0);
  CHECK(std::abs(laplace_exponent_psi(bin, 0.5, root_slow)) <= 1e-10);

  DislocationMeasure q = half_quarter();
  double c = 2.0 * critical_speed(q);
  double root = largest_psi_root(q, c);
  CHECK(root > 0.9);
  CHECK(root < 1.0);
  CHECK(std::abs(laplace_exponent_psi(q, c, root)) <= 1e-10);
}

TEST_CASE("scale table marches from 1/c and refines cleanly") {
  for (const auto& [nu, c] :
       {std::pair{binary_half(), 1.0},
        std::pair{half_quarter(), 2.0 * critical_speed(half_quarter())}}) {
    const double dx = std::log(2.0) / 512.0;
    ScaleTable coarse = scale_function(nu, c, 12.0, dx);
    CHECK(coarse.values().front() == 1.0 / c);  // exact by construction
    CHECK(coarse.drift() == c);

    ScaleTable fine = scale_function(nu, c, 12.0, dx / 2.0);
    double at = coarse.x_max();
    double rel = std::abs(fine(at) - coarse(at)) / fine(at);
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("two-sided exit identities") {
  DislocationMeasure nu = binary_half();
  ScaleTable w = scale_function(nu, 1.0, 12.0, std::log(2.0) / 512.0);
  CHECK(two_sided_exit(w, 1.0, 0.0) == 1.0);
  double p11 = two_sided_exit(w, 1.0, 1.0);
  CHECK(p11 > 0.0);
  CHECK(p11 < 1.0);
  // Chain rule through an intermediate level.
  CHECK(two_sided_exit(w, 1.0, 2.0) ==
        doctest::Approx(p11 * two_sided_exit(w, 2.0, 1.0)).epsilon(1e-12));
  // Frozen from an independent quadrature of the same renewal equation.
  CHECK(p11 == doctest::Approx(0.791146).epsilon(2e-4));
  CHECK_THROWS_AS(two_sided_exit(w, 10.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(two_sided_exit(w, -1.0, 1.0), std::invalid_argument);

  DislocationMeasure q = half_quarter();
  double c = 2.0 * critical_speed(q);
  ScaleTable wq = scale_function(q, c, 12.0, std::log(2.0) / 512.0);
  CHECK(two_sided_exit(wq, 1.0, 1.0) == doctest::Approx(0.348182).epsilon(5e-4));
}

TEST_CASE("monte carlo first passage agrees with the scale ratio") {
  DislocationMeasure nu = binary_half();
  ScaleTable w = scale_function(nu, 1.0, 12.0, std::log(2.0) / 512.0);
  EstimateCI mc = mc_first_passage(nu, 1.0, 1.0, 1.0, 20000, 1234, 2);
  CHECK(std::abs(mc.point - two_sided_exit(w, 1.0, 1.0)) <= 3.0 * mc.se);

  EstimateCI trivial = mc_first_passage(nu, 1.0, 1.0, 0.0, 100, 1, 1);
  CHECK(trivial.point == 1.0);
  CHECK(trivial.se == 0.0);

  EstimateCI again = mc_first_passage(nu, 1.0, 1.0, 1.0, 2000, 77, 1);
  EstimateCI again2 = mc_first_passage(nu, 1.0, 1.0, 1.0, 2000, 77, 4);
  CHECK(again.point == again2.point);
}

TEST_CASE("laplace transform of the table matches 1/psi") {
  for (const auto& [nu, c] :
       {std::pair{binary_half(), 1.0},
        std::pair{half_quarter(), 2.0 * critical_speed(half_quarter())}}) {
    ScaleTable w = scale_function(nu, c, 12.0, std::log(2.0) / 1024.0);
    double root = largest_psi_root(nu, c);
    for (double beta : {root + 1.0, root + 2.0}) {
      double lhs = scale_laplace_transform(w, beta, root);
      double rhs = 1.0 / laplace_exponent_psi(nu, c, beta);
      CHECK(std::abs(lhs - rhs) / rhs <= 0.01);
    }
    CHECK_THROWS_AS(scale_laplace_transform(w, root - 0.1, root),
                    std::invalid_argument);
  }
}

TEST_CASE("scale function rejects bad parameters") {
  DislocationMeasure nu = binary_half();
  CHECK_THROWS_AS(scale_function(nu, 0.0, 12.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(scale_function(nu, 1.0, 12.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_function(nu, 1.0, 0.001, 0.01), std::invalid_argument);
  // dx so coarse that the implicit step loses positivity.
  CHECK_THROWS_AS(scale_function(nu, 0.01, 12.0, 3.0), std::invalid_argument);
}
