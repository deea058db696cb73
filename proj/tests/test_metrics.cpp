#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "sparsedyn/metrics.hpp"

using namespace sparsedyn;

TEST_SUITE("metrics") {

TEST_CASE("rnmse hand-checked values") {
  CHECK(rnmse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  // ||(1,0) - (0,1)|| / ||(0,1)|| = sqrt(2)
  CHECK(rnmse({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // zero estimate scores exactly 1
  CHECK(rnmse({0.0, 0.0, 0.0}, {3.0, 0.0, 4.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rnmse is scale invariant in the truth") {
  const Vector est = {0.5, -1.0, 2.0};
  const Vector truth = {1.0, -1.0, 2.5};
  const double base = rnmse(est, truth);
  Vector est4(3), truth4(3);
  for (int i = 0; i < 3; ++i) {
    est4[i] = 4.0 * est[i];  // powers of two keep the scaling exact
    truth4[i] = 4.0 * truth[i];
  }
  CHECK(rnmse(est4, truth4) == base);
}

TEST_CASE("rnmse argument validation") {
  CHECK_THROWS_AS(rnmse({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(rnmse({1.0, 2.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("support metrics on disjoint, equal and overlapping supports") {
  SupportScore s = support_metrics({1.0, 0.0, 2.0}, {1.0, 0.0, 2.0});
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.exact);
  CHECK(s.true_positives == 2);

  s = support_metrics({0.0, 5.0, 0.0}, {1.0, 0.0, 1.0});
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK_FALSE(s.exact);

  // estimate {0,1,2} vs truth {0,2}: precision 2/3, recall 1
  s = support_metrics({1.0, 1.0, 1.0}, {1.0, 0.0, 1.0});
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == 1.0);
  CHECK_FALSE(s.exact);

  // estimate {0} vs truth {0,1}: precision 1, recall 1/2
  s = support_metrics({1.0, 0.0}, {1.0, 1.0});
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 0.5);
}

TEST_CASE("empty estimate has precision 1 by convention") {
  const SupportScore s = support_metrics({0.0, 0.0}, {1.0, 0.0});
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 0.0);
  CHECK(s.estimated_size == 0);
  CHECK_FALSE(s.exact);
}

TEST_CASE("support uses the relative energy rule") {
  // second entry holds 1e-6 of the energy, below the 1e-4 default cut
  const SupportScore s = support_metrics({1.0, 1e-3}, {1.0, 0.0});
  CHECK(s.estimated_size == 1);
  CHECK(s.exact);

  // at 1e-2 of the total energy it counts
  const SupportScore s2 = support_metrics({1.0, 0.1}, {1.0, 0.0});
  CHECK(s2.estimated_size == 2);
  CHECK_FALSE(s2.exact);

  // a looser threshold flips the verdict
  const SupportScore s3 = support_metrics({1.0, 0.1}, {1.0, 0.0}, 0.5);
  CHECK(s3.estimated_size == 1);
  CHECK(s3.exact);
}

TEST_CASE("support metrics argument validation") {
  CHECK_THROWS_AS(support_metrics({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(support_metrics({1.0}, {1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(support_metrics({1.0}, {1.0}, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
