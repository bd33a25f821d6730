#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/QR>

#include "oracles.hpp"
#include "q4f/mechanisms.hpp"
#include "support.hpp"

using namespace q4f;
using test::code_of;
using test::profile;
using test::vec;

namespace {

MechanismParams params_with(double a, double r, double b, double q, int d = 2) {
  MechanismParams p;
  p.d = d;
  p.a = a;
  p.r = r;
  p.b = b;
  p.q = q;
  return p;
}

}  // namespace

TEST_CASE("weight and lever examples") {
  CHECK(weight(16.0, params_with(1, 4, 1, 4)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(weight(0.0, params_with(1, 4, 1, 4)) == 0.0);
  CHECK(weight(1.0, params_with(1, 4, 0.5, 2)) == 0.5);
  CHECK(code_of([] { weight(-1.0, MechanismParams{}); }) == ErrorCode::NegativeContribution);

  CHECK(lever(2.0, params_with(0.5, 4, 1, 4)) == 8.0);
  CHECK(lever(0.0, params_with(0.5, 4, 1, 4)) == 0.0);
  for (double a : {0.1, 0.5, 3.0}) CHECK(lever(1.0, params_with(a, 4, 1, 4)) == a);
  CHECK(code_of([] { lever(-0.5, MechanismParams{}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("profiles reject negative and non-finite entries") {
  CHECK(code_of([] { profile({1.0, -0.1}); }) == ErrorCode::NegativeContribution);
  CHECK(code_of([] { profile({1.0, NAN}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { profile({INFINITY}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("calibration predicate") {
  for (int d : {1, 2, 3, 8, 1000}) {
    CHECK(MechanismParams::calibrated_for(d).calibrated());
    CHECK(MechanismParams::calibrated_for(d, 1.7).calibrated());
  }
  auto p = MechanismParams::calibrated_for(2);
  p.a *= 1.001;
  CHECK_FALSE(p.calibrated());
  p = MechanismParams::calibrated_for(2);
  p.q = 2;
  CHECK_FALSE(p.calibrated());
  CHECK(code_of([] { MechanismParams::calibrated_for(0); }) == ErrorCode::InvalidDimension);
}

TEST_CASE("qf_funding examples") {
  CHECK(qf_funding(profile({1, 1, 1, 1})) == 16.0);
  CHECK(qf_funding(profile({4})) == 4.0);
  CHECK(qf_funding(profile({1, 4, 9})) == 36.0);
  CHECK(qf_funding(profile({})) == 0.0);
  CHECK(qf_funding(Eigen::Vector3f(1.0f, 4.0f, 9.0f)) == 36.0f);
}

TEST_CASE("deterministic_funding examples") {
  CHECK(deterministic_funding(profile({1, 4, 9}), params_with(1, 2, 1, 2)) == 36.0);
  CHECK(deterministic_funding(profile({16}), params_with(0.5, 4, 1, 4)) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(deterministic_funding(profile({}), MechanismParams{}) == 0.0);
}

TEST_CASE("QF properties on random profiles") {
  oracle::ProfileGen gen(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = gen.size(1, 60);
    const auto c = gen.profile(n, 1e-3, 1e3);
    const ContributionProfile p = profile(c);
    const double qf = qf_funding(p);

    const double lambda = gen.log_uniform(1e-3, 1e3);
    CHECK(qf_funding(p.scaled(lambda)) == doctest::Approx(lambda * qf).epsilon(1e-12));
    CHECK(qf_funding(p.scaled(0.0)) == 0.0);

    const std::size_t i = gen.size(0, n - 1);
    Eigen::VectorXd bumped = p.contributions();
    bumped[static_cast<Eigen::Index>(i)] *= 1.01;
    CHECK(qf_funding(ContributionProfile(bumped)) > qf);
    const auto qf_params = params_with(1, 2, 1, 2);
    CHECK(deterministic_funding(ContributionProfile(bumped), qf_params) > deterministic_funding(p, qf_params));
    CHECK(deterministic_funding(p, qf_params) == doctest::Approx(qf).epsilon(1e-13));

    const double total = std::accumulate(c.begin(), c.end(), 0.0);
    if (n > 1) {
      CHECK(qf > total);
    } else {
      CHECK(qf == doctest::Approx(total).epsilon(1e-15));
    }
  }
  // equality with several entries as long as at most one is positive
  CHECK(qf_funding(profile({0, 0, 5, 0})) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("q4f_realized examples") {
  const auto calibrated2 = MechanismParams::calibrated_for(2);
  RngStream rng(4, 0);
  for (int k = 0; k < 20; ++k) {
    const std::vector<Direction> w{sample_direction(2, rng)};
    CHECK(q4f_realized(profile({16}), w, calibrated2) == doctest::Approx(8.0).epsilon(1e-14));
  }

  const std::vector<Direction> signs{Direction::from_coords(vec({1.0})), Direction::from_coords(vec({-1.0}))};
  CHECK(q4f_realized(profile({1, 1}), signs, MechanismParams::calibrated_for(1)) == 0.0);

  const std::vector<Direction> axes{Direction::from_coords(vec({1.0, 0.0})), Direction::from_coords(vec({0.0, 1.0}))};
  CHECK(q4f_realized(profile({1, 1}), axes, calibrated2) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(code_of([&] { q4f_realized(profile({1, 1, 1}), axes, calibrated2); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { q4f_realized(profile({1, 1}), axes, MechanismParams::calibrated_for(3)); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("q4f_realized is invariant under a common rotation") {
  const int d = 3;
  oracle::ProfileGen gen(17);
  std::normal_distribution<double> normal;
  RngStream rng(9, 1);
  const auto params = MechanismParams::calibrated_for(d);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(gen.engine());
    const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const auto c = gen.profile(12);
    std::vector<Direction> w;
    std::vector<Direction> w_rot;
    for (std::size_t i = 0; i < c.size(); ++i) {
      w.push_back(sample_direction(d, rng));
      Eigen::VectorXd v = rot * w.back().coords();
      v.normalize();
      w_rot.push_back(Direction::from_coords(v));
    }
    CHECK(q4f_realized(profile(c), w_rot, params) == doctest::Approx(q4f_realized(profile(c), w, params)).epsilon(1e-12));
  }
}

TEST_CASE("q4f_sample_distribution: single contributor is deterministic") {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const FundingStats s = q4f_sample_distribution(profile({16}), MechanismParams::calibrated_for(2), 1000, seed);
    CHECK(s.mean == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(s.std_dev == doctest::Approx(0.0));
    CHECK(s.std_dev < 1e-12);
    CHECK(s.seed == seed);
  }
}

TEST_CASE("q4f_sample_distribution matches the unit-phase oracle 2n^2 - n") {
  const ContributionProfile ones(Eigen::VectorXd::Ones(1000));
  const FundingStats s = q4f_sample_distribution(ones, params_with(1, 4, 1, 4, 2), 100000, 314);
  CAPTURE(s.mean);
  CAPTURE(s.std_error);
  CHECK(std::abs(s.mean - 1999000.0) <= 4.0 * s.std_error);
}

TEST_CASE("q4f_sample_distribution is deterministic and worker-independent") {
  const auto p = profile(oracle::ProfileGen(1).profile(30));
  const auto params = MechanismParams::calibrated_for(3);
  const FundingStats a = q4f_sample_distribution(p, params, 5000, 42, 1);
  const FundingStats b = q4f_sample_distribution(p, params, 5000, 42, 1);
  const FundingStats c = q4f_sample_distribution(p, params, 5000, 42, 8);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(q4f_sample_distribution(p, params, 5000, 43, 1) != a);
  CHECK(code_of([&] { q4f_sample_distribution(p, params, 0, 42); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("FundingStats invariants") {
  const auto p = profile(oracle::ProfileGen(2).profile(25));
  const FundingStats s = q4f_sample_distribution(p, MechanismParams::calibrated_for(2), 3001, 5);
  CHECK(s.n_samples == 3001);
  CHECK(s.std_dev >= 0.0);
  CHECK(s.std_error == doctest::Approx(s.std_dev / std::sqrt(3001.0)).epsilon(1e-12));
  REQUIRE(s.quantiles.size() == 5);
  for (std::size_t k = 1; k < s.quantiles.size(); ++k) {
    CHECK(s.quantiles[k].first > s.quantiles[k - 1].first);
    CHECK(s.quantiles[k].second >= s.quantiles[k - 1].second);
  }

  const std::vector<double> values{4.0, 1.0, 3.0, 2.0, 5.0};
  const FundingStats t = summarize(values, 0);
  CHECK(t.mean == 3.0);
  CHECK(t.std_dev == doctest::Approx(std::sqrt(2.5)));
  CHECK(t.quantiles[2].second == 3.0);
  CHECK(t.quantiles[0].second == doctest::Approx(1.2));
}

TEST_CASE("calibrated Q4F mean converges to QF") {
  oracle::ProfileGen gen(77);
  for (int d : {1, 2, 3}) {
    const auto p = profile(gen.profile(200));
    const FundingStats s = q4f_sample_distribution(p, MechanismParams::calibrated_for(d), 100000, 1000 + d);
    CAPTURE(d);
    CHECK(std::abs(s.mean - qf_funding(p)) <= 4.0 * s.std_error);
  }
}

TEST_CASE("raising a contribution raises the Q4F mean beyond Monte Carlo error") {
  const auto params = MechanismParams::calibrated_for(2);
  const ContributionProfile base = profile(oracle::ProfileGen(8).profile(40));
  Eigen::VectorXd raised = base.contributions();
  raised[0] += 25.0;
  const FundingStats lo = q4f_sample_distribution(base, params, 40000, 1);
  const FundingStats hi = q4f_sample_distribution(ContributionProfile(raised), params, 40000, 2);
  CHECK(hi.mean - lo.mean > 4.0 * std::hypot(lo.std_error, hi.std_error));
}
