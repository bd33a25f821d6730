#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "q4f/analytics.hpp"
#include "support.hpp"

using namespace q4f;
using test::code_of;
using test::profile;

namespace {

MechanismParams unit_quartic(int d) {
  MechanismParams p;
  p.d = d;
  p.a = 1.0;
  p.b = 1.0;
  p.r = 4.0;
  p.q = 4.0;
  return p;
}

struct Moments {
  double mean;
  double std_error;
};

Moments fourth_moment(const std::vector<double>& norms) {
  std::vector<double> x4(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) x4[i] = std::pow(norms[i], 4);
  const FundingStats s = summarize(x4, 0, {});
  return {s.mean, s.std_error};
}

}  // namespace

TEST_CASE("oracles agree with each other") {
  // sign enumeration (d = 1) and phase quadrature (d = 2) against the expansion formula
  oracle::ProfileGen gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = gen.profile(gen.size(1, 12), 0.2, 5.0);
    CHECK(oracle::norm4_signs_enumerated(h) == doctest::Approx(oracle::norm4_exact(h, 1)).epsilon(1e-12));
  }
  CHECK(oracle::norm4_phases_quadrature({1.0, 1.0, 1.0}, 16) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(oracle::norm4_phases_quadrature({1.0, 2.0, 0.5, 3.0}, 12) ==
        doctest::Approx(oracle::norm4_exact({1.0, 2.0, 0.5, 3.0}, 2)).epsilon(1e-12));
  for (std::size_t n : {1U, 3U, 10U, 1000U}) {
    CHECK(oracle::norm4_exact(std::vector<double>(n, 1.0), 2) == 2.0 * n * n - n);
  }
}

TEST_CASE("radial_model examples") {
  CHECK(radial_model(std::vector<double>{1, 1}, 2).sigma == 1.0);
  CHECK(radial_model(std::vector<double>{3, 4}, 1).sigma == 5.0);
  CHECK(radial_model(std::vector<double>(100, 1.0), 4).sigma == 5.0);
  CHECK(code_of([] { radial_model(std::vector<double>{0, 0}, 2); }) == ErrorCode::DegenerateModel);
  CHECK(code_of([] { radial_model(std::vector<double>{}, 2); }) == ErrorCode::DegenerateModel);

  oracle::ProfileGen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = gen.profile(gen.size(1, 50));
    const int d = static_cast<int>(gen.size(1, 64));
    const RadialModel m = radial_model(h, d);
    double s2 = 0.0;
    for (double x : h) s2 += x * x;
    CHECK(m.sigma * m.sigma * d == doctest::Approx(s2).epsilon(1e-12));
  }
}

TEST_CASE("expected_norm4_asymmetric examples") {
  std::vector<double> lone(9, 0.0);
  lone.push_back(1.7);
  CHECK(expected_norm4_asymmetric(lone, 9, 3) == doctest::Approx(std::pow(1.7, 4)).epsilon(1e-15));

  CHECK(expected_norm4_asymmetric(std::vector<double>{1, 1, 1}, 2, 2) == 17.0);
  CHECK(oracle::norm4_exact({1, 1, 1}, 2) == 15.0);

  const std::vector<double> ones(1000, 1.0);
  const double formula = expected_norm4_asymmetric(ones, 999, 2);
  CHECK(formula == 1999999.0);
  CHECK(std::abs(formula - 1999000.0) / 1999000.0 <= 0.0005);

  CHECK(code_of([] { expected_norm4_asymmetric(std::vector<double>{1, 1}, 2, 2); }) == ErrorCode::InvalidIndex);
}

TEST_CASE("expected_funding_closed_form examples") {
  CHECK(expected_funding_closed_form(profile({16}), MechanismParams::calibrated_for(2), 0) ==
        doctest::Approx(8.0).epsilon(1e-14));
  CHECK(expected_funding_closed_form(profile({1, 1, 1}), unit_quartic(2), 2) == 17.0);

  const auto params = MechanismParams::calibrated_for(2);
  const Eigen::VectorXd c = test::vec({1.0, 1e6});
  const Eigen::VectorXd h = weights(c, params);
  const Norm4Terms t = expected_norm4_terms({h.data(), 2}, 1, 2);
  CHECK((t.bulk + t.cross) / t.total() < 0.01);
  CHECK(expected_funding_closed_form(ContributionProfile(c), params, 1) == doctest::Approx(params.a * t.total()));

  auto quadratic = params;
  quadratic.r = 2.0;
  CHECK(code_of([&] { expected_funding_closed_form(profile({1}), quadratic, 0); }) == ErrorCode::UnsupportedExponent);
}

TEST_CASE("expected_funding_symmetric examples") {
  for (int d : {1, 2, 3, 8, 100}) {
    CHECK(expected_funding_symmetric(profile({1, 4, 9}), MechanismParams::calibrated_for(d)) ==
          doctest::Approx(36.0).epsilon(1e-14));
  }
  for (std::size_t n : {1U, 10U, 500U}) {
    const ContributionProfile ones(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
    const double value = expected_funding_symmetric(ones, unit_quartic(2));
    CHECK(value == doctest::Approx(2.0 * n * n).epsilon(1e-14));
    const double exact = oracle::norm4_exact(std::vector<double>(n, 1.0), 2);
    CHECK((value - exact) / value == doctest::Approx(1.0 / (2.0 * n)).epsilon(1e-12));
  }
  CHECK(expected_funding_symmetric(profile({0, 0}), MechanismParams::calibrated_for(2)) == 0.0);
  auto cubic = unit_quartic(2);
  cubic.r = 3;
  CHECK(code_of([&] { expected_funding_symmetric(profile({1}), cubic); }) == ErrorCode::UnsupportedExponent);
}

TEST_CASE("calibrated symmetric expectation equals QF on random profiles") {
  oracle::ProfileGen gen(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = profile(gen.profile(gen.size(1, 80)));
    const int d = static_cast<int>(gen.size(1, 40));
    const double b = gen.log_uniform(0.1, 10.0);
    CHECK(expected_funding_symmetric(p, MechanismParams::calibrated_for(d, b)) ==
          doctest::Approx(qf_funding(p)).epsilon(1e-12));
  }
}

TEST_CASE("singling out an appended zero reproduces the symmetric formula") {
  oracle::ProfileGen gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = gen.profile(gen.size(1, 40));
    const int d = static_cast<int>(gen.size(1, 10));
    const auto params = MechanismParams::calibrated_for(d);
    const double symmetric = expected_funding_symmetric(profile(c), params);
    c.push_back(0.0);
    CHECK(expected_funding_closed_form(profile(c), params, c.size() - 1) == doctest::Approx(symmetric).epsilon(1e-13));
  }
}

TEST_CASE("a * chi_moment(4) equals the symmetric expectation") {
  oracle::ProfileGen gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = profile(gen.profile(gen.size(1, 40)));
    const int d = static_cast<int>(gen.size(1, 30));
    MechanismParams params = unit_quartic(d);
    params.a = gen.log_uniform(0.1, 3.0);
    params.b = gen.log_uniform(0.5, 2.0);
    const Eigen::VectorXd h = weights(p.contributions(), params);
    const RadialModel m = radial_model({h.data(), static_cast<std::size_t>(h.size())}, d);
    CHECK(params.a * chi_moment(4, m) == doctest::Approx(expected_funding_symmetric(p, params)).epsilon(1e-12));
  }
}

TEST_CASE("chi_pdf examples") {
  CHECK(chi_pdf(1.0, {1.0, 2}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(chi_pdf(0.5, {1.0, 1}) == doctest::Approx(2.0 / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.125)).epsilon(1e-14));
  CHECK(chi_pdf(0.0, {1.0, 1}) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
  CHECK(chi_pdf(0.0, {1.0, 3}) == 0.0);
  CHECK(code_of([] { chi_pdf(-1e-9, {1.0, 2}); }) == ErrorCode::InvalidArgument);

  // Maxwell density for d = 3
  const double r = 1.3;
  const double sigma = 0.7;
  const double maxwell = std::sqrt(2.0 / std::numbers::pi) * r * r / std::pow(sigma, 3) * std::exp(-r * r / (2 * sigma * sigma));
  CHECK(chi_pdf(r, {sigma, 3}) == doctest::Approx(maxwell).epsilon(1e-13));
}

TEST_CASE("chi_pdf is normalized and its moments match chi_moment") {
  for (int d : {1, 2, 3, 8, 50}) {
    const RadialModel m{1.3, d};
    const double hi = m.sigma * (std::sqrt(static_cast<double>(d)) + 12.0);
    const double mass = oracle::simpson([&](double r) { return chi_pdf(r, m); }, 0.0, hi, 20000);
    CAPTURE(d);
    CHECK(std::abs(mass - 1.0) <= 1e-6);
    for (int k : {2, 4, 6}) {
      const double q = oracle::simpson([&](double r) { return std::pow(r, k) * chi_pdf(r, m); }, 0.0, hi, 20000);
      CHECK(chi_moment(k, m) == doctest::Approx(q).epsilon(1e-8));
    }
    for (double order : {1.0, 3.0, 2.5}) {
      const double q = oracle::simpson([&](double r) { return std::pow(r, order) * chi_pdf(r, m); }, 0.0, hi, 20000);
      CHECK(radial_moment(order, m) == doctest::Approx(q).epsilon(1e-7));
    }
  }
}

TEST_CASE("chi_moment examples") {
  CHECK(chi_moment(2, {2.0, 3}) == 12.0);
  CHECK(chi_moment(4, {1.0, 2}) == 8.0);
  // kurtosis route: d kappa sigma^4 + d(d-1) sigma^4 with kappa = 3
  for (int d : {1, 2, 5, 40}) CHECK(chi_moment(4, {1.0, d}) == 3.0 * d + d * (d - 1.0));
  CHECK(chi_moment(0, {3.0, 7}) == 1.0);
  CHECK(code_of([] { chi_moment(3, {1.0, 2}); }) == ErrorCode::UnsupportedMoment);
  CHECK(code_of([] { chi_moment(-2, {1.0, 2}); }) == ErrorCode::UnsupportedMoment);

  oracle::ProfileGen gen(9);
  for (int trial = 0; trial < 50; ++trial) {
    const RadialModel m{gen.log_uniform(0.1, 10.0), static_cast<int>(gen.size(1, 100))};
    CHECK(chi_moment(2, m) == doctest::Approx(m.d * m.sigma * m.sigma).epsilon(1e-15));
    CHECK(chi_moment(4, m) == doctest::Approx(m.d * (m.d + 2.0) * std::pow(m.sigma, 4)).epsilon(1e-15));
  }
}

TEST_CASE("radial_moment agrees with the even-moment product and is accurate at large d") {
  for (int d : {1, 2, 9, 1000, 1000000}) {
    const RadialModel m{1.0, d};
    CHECK(radial_moment(4.0, m) == chi_moment(4, m));
    // E[R^(k+2)] = sigma^2 (d + k) E[R^k] holds for every real k
    for (double k : {1.0, 3.0, 0.5}) {
      CAPTURE(d);
      CAPTURE(k);
      CHECK(radial_moment(k + 2.0, m) / radial_moment(k, m) == doctest::Approx(d + k).epsilon(1e-12));
    }
  }
}

TEST_CASE("concentration_ratio") {
  CHECK(std::abs(concentration_ratio(2, 4) - std::sqrt(5.0)) <= 1e-12);
  CHECK(concentration_ratio(1000, 4) < 0.1);
  CHECK(concentration_ratio(1000, 4) == doctest::Approx(0.0895).epsilon(0.001));
  double previous = INFINITY;
  for (int d = 1; d <= 1000000; ++d) {
    const double c = concentration_ratio(d, 4);
    REQUIRE(c < previous);
    previous = c;
  }
  CHECK(previous < 0.003);
  for (int d : {1, 2, 7, 64}) {
    const RadialModel m{1.0, d};
    const double m4 = chi_moment(4, m);
    CHECK(concentration_ratio(d, 4) == doctest::Approx(std::sqrt(chi_moment(8, m) / (m4 * m4) - 1.0)).epsilon(1e-13));
  }
  CHECK(code_of([] { concentration_ratio(2, 2); }) == ErrorCode::UnsupportedExponent);
}

TEST_CASE("asymmetric formula matches Monte Carlo for near-uniform weights") {
  oracle::ProfileGen gen(10);
  for (int d : {1, 2, 3, 8}) {
    std::vector<double> h(500);
    for (auto& x : h) x = gen.uniform(0.9, 1.1);
    const double formula = expected_norm4_asymmetric(h, h.size() - 1, d);
    const Moments mc = fourth_moment(sample_phase_sum_norms(h, d, 20000, 50 + d));
    CAPTURE(d);
    CHECK(std::abs(mc.mean - formula) <= std::max(4.0 * mc.std_error, 0.01 * formula));
  }
}

TEST_CASE("asymmetric formula in the large-contributor regime") {
  std::vector<double> h(999, 1.0);
  h.push_back(30.0);
  const double formula = expected_norm4_asymmetric(h, 999, 2);
  CHECK(formula == 6402402.0);
  CHECK(oracle::norm4_exact(h, 2) == 6401403.0);
  const Moments mc = fourth_moment(sample_phase_sum_norms(h, 2, 30000, 11));
  CHECK(std::abs(mc.mean - formula) <= 4.0 * mc.std_error);
}

TEST_CASE("chi_pdf matches a histogram of phase-sum norms") {
  const std::vector<double> h(200, 1.0);
  for (int d : {2, 3}) {
    const RadialModel m = radial_model(h, d);
    const auto norms = sample_phase_sum_norms(h, d, 100000, 12 + d);
    const double width = m.sigma / 4.0;
    const int bins = 48;  // covers up to 12 sigma
    std::vector<double> counts(bins, 0.0);
    double outside = 0.0;
    for (double r : norms) {
      const auto k = static_cast<int>(r / width);
      if (k < bins) {
        counts[static_cast<std::size_t>(k)] += 1.0;
      } else {
        outside += 1.0;
      }
    }
    double l1 = outside / static_cast<double>(norms.size());
    for (int k = 0; k < bins; ++k) {
      const double expected = oracle::simpson([&](double r) { return chi_pdf(r, m); }, k * width, (k + 1) * width, 64);
      l1 += std::abs(counts[static_cast<std::size_t>(k)] / static_cast<double>(norms.size()) - expected);
    }
    CAPTURE(d);
    CHECK(l1 < 0.03);
  }
}
