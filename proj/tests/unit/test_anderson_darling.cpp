#include <doctest.h>

#include <algorithm>
#include <array>

#include "mothbench/anderson_darling.hpp"
#include "mothbench/errors.hpp"
#include "mothbench/random.hpp"

using namespace mothbench;

namespace {

const std::vector<double> kX{0.12, 0.45, 0.33, 0.91, 0.27, 0.64, 0.58, 0.05};
const std::vector<double> kY{0.72, 0.81, 0.39, 1.10, 0.95, 0.66, 0.88};
const std::vector<double> kZ{0.33, 0.45, 0.50, 0.21, 0.77, 0.64};

}  // namespace

TEST_SUITE("anderson_darling") {
  TEST_CASE("two samples against scipy") {
    const std::vector<std::vector<double>> s{kX, kY};
    const ADResult r = ad_k_sample(s);
    CHECK(r.statistic == doctest::Approx(3.081858393111152).epsilon(1e-12));
    CHECK(r.normalized == doctest::Approx(3.0782634135997986).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.01815303638404971).epsilon(1e-9));
    const std::array<double, 7> crit{0.325, 1.226, 1.961, 2.718, 3.752, 4.592, 6.546};
    for (std::size_t i = 0; i < 7; ++i) CHECK(r.critical_values[i] == doctest::Approx(crit[i]).epsilon(1e-12));
  }

  TEST_CASE("three samples with ties against scipy") {
    const std::vector<std::vector<double>> s{kX, kY, kZ};
    const ADResult r = ad_k_sample(s);
    CHECK(r.statistic == doctest::Approx(4.332666152110022).epsilon(1e-12));
    CHECK(r.normalized == doctest::Approx(2.4239184049139304).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.029550174628396292).epsilon(1e-9));
    CHECK(r.critical_values[0] == doctest::Approx(0.44925883860929594).epsilon(1e-12));
    CHECK(r.critical_values[6] == doctest::Approx(5.564191013989369).epsilon(1e-12));
  }

  TEST_CASE("disjoint supports") {
    std::vector<double> a, b;
    for (int i = 0; i < 50; ++i) {
      a.push_back(i / 49.0);
      b.push_back(10.0 + i / 49.0);
    }
    const std::vector<std::vector<double>> s{a, b};
    const ADResult r = ad_k_sample(s);
    CHECK(r.normalized == doctest::Approx(50.51847642037711).epsilon(1e-10));
    CHECK(r.p_value < 0.001);
  }

  TEST_CASE("sample order does not matter") {
    const std::vector<std::vector<double>> s1{kX, kY, kZ};
    const std::vector<std::vector<double>> s2{kZ, kX, kY};
    CHECK(ad_k_sample(s1).statistic == doctest::Approx(ad_k_sample(s2).statistic).epsilon(1e-14));
    std::vector<double> x = kX;
    std::ranges::reverse(x);
    const std::vector<std::vector<double>> s3{x, kY, kZ};
    CHECK(ad_k_sample(s3).statistic == doctest::Approx(ad_k_sample(s1).statistic).epsilon(1e-14));
  }

  TEST_CASE("same distribution rarely rejects") {
    int kept = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng = make_rng(t, 5);
      std::normal_distribution<double> g;
      std::vector<double> a(200), b(200);
      for (auto& v : a) v = g(rng);
      for (auto& v : b) v = g(rng);
      const std::vector<std::vector<double>> s{a, b};
      kept += ad_k_sample(s).p_value > 0.05 ? 1 : 0;
    }
    CHECK(kept >= 90);
  }

  TEST_CASE("p value is monotone and bounded") {
    double prev = 2.0;
    for (double shift = 0.0; shift < 3.0; shift += 0.25) {
      std::vector<double> b;
      for (double v : kX) b.push_back(v + shift);
      const std::vector<std::vector<double>> s{kX, b};
      const double p = ad_k_sample(s).p_value;
      CHECK(p <= 1.0);
      CHECK(p > 0.0);
      CHECK(p <= prev + 1e-12);
      prev = p;
    }
  }

  TEST_CASE("invalid input") {
    const std::vector<std::vector<double>> one{kX};
    CHECK_THROWS_AS(ad_k_sample(one), InvalidInput);
    const std::vector<std::vector<double>> tiny{kX, {1, 2, 3, 4}};
    CHECK_THROWS_AS(ad_k_sample(tiny), InvalidInput);
    const std::vector<std::vector<double>> flat{std::vector<double>(6, 1.0), std::vector<double>(5, 1.0)};
    CHECK_THROWS_AS(ad_k_sample(flat), InvalidInput);
  }
}
