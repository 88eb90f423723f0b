#include <doctest.h>

#include <cmath>

#include "mothbench/analysis.hpp"
#include "mothbench/errors.hpp"

using namespace mothbench;

namespace {

constexpr Phase S = Phase::Exploration;
constexpr Phase O = Phase::Exploitation;

Trajectory wave(std::size_t n, double amp, double shift = 0.0) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * 0.1;
    pts.push_back({t, amp * std::sin(t + shift), 0.5 + 0.1 * t});
  }
  return Trajectory(std::move(pts), 0.1);
}

// Straight flight along x towards a target at x = 1.
FlightRecord line_record(std::size_t n) {
  FlightRecord r;
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({0.1 * static_cast<double>(i), 0, 0});
  r.trajectory = Trajectory(std::move(pts), 0.1);
  r.true_labels.assign(n, S);
  r.success = true;
  return r;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("dtw identities") {
    const Trajectory a = wave(30, 0.2);
    CHECK(dtw_mae(a, a) == 0.0);
    const Trajectory p({{0, 0, 0}}, 1.0);
    const Trajectory q({{0.6, 0, 0}}, 1.0);
    CHECK(dtw_mae(p, q) == doctest::Approx(0.2));
    CHECK_THROWS_AS(dtw_mae(Trajectory{}, a), InvalidInput);
  }

  TEST_CASE("dtw three points against two") {
    const Trajectory a({{0, 0, 0}, {1, 1, 0}, {3, 1, 2}}, 1.0);
    const Trajectory b({{0, 1, 0}, {2, 2, 2}}, 1.0);
    const DtwAlignment al = dtw_align(a, b);
    CHECK(al.cost == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    REQUIRE(al.path.size() == 3);
    CHECK(al.path[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(al.path[1] == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(al.path[2] == std::pair<std::size_t, std::size_t>{2, 1});
    CHECK(dtw_mae(a, b) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  }

  TEST_CASE("dtw is symmetric and non-negative") {
    for (int s = 0; s < 5; ++s) {
      const Trajectory a = wave(20 + s, 0.3, 0.1 * s);
      const Trajectory b = wave(27 - s, 0.25, -0.2 * s);
      CHECK(dtw_mae(a, b) >= 0.0);
      CHECK(dtw_mae(a, b) == doctest::Approx(dtw_mae(b, a)).epsilon(1e-14));
    }
  }

  TEST_CASE("dtw is zero for a time-warped copy") {
    const Trajectory a({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 1.0);
    const Trajectory b({{0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 1.0);
    CHECK(dtw_mae(a, b) == 0.0);
  }

  TEST_CASE("r squared") {
    const Trajectory ref = wave(40, 0.3);
    CHECK(r_squared(ref, ref) == 1.0);

    Vec3 mean;
    for (const auto& p : ref.samples()) mean += p / static_cast<double>(ref.size());
    const Trajectory flat(std::vector<Vec3>(ref.size(), mean), ref.dt());
    CHECK(r_squared(ref, flat) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<Vec3> anti;
    for (const auto& p : ref.samples()) anti.push_back(mean * 2.0 - p);
    CHECK(r_squared(ref, Trajectory(anti, ref.dt())) == 0.0);

    const Trajectory still(std::vector<Vec3>(ref.size(), Vec3{0.5, 0.25, 0.5}), ref.dt());
    CHECK_THROWS_AS(r_squared(still, ref), InvalidInput);
    const FitReport f = fit_report(ref, wave(40, 0.31));
    CHECK(f.r_squared > 0.9);
    CHECK(f.r_squared <= 1.0);
    CHECK(f.mae > 0.0);
  }

  TEST_CASE("distance bins") {
    DistanceBins bins;
    CHECK(bins.count() == 17);
    CHECK(bins.center(0) == doctest::Approx(0.06));
    CHECK(bins.center(1) == doctest::Approx(0.18));
    CHECK(bins.bin_of(0.0) == 0u);
    CHECK(bins.bin_of(0.119) == 0u);
    CHECK(bins.bin_of(0.121) == 1u);
    CHECK_FALSE(bins.bin_of(2.05).has_value());
    CHECK_FALSE(bins.bin_of(-0.1).has_value());
  }

  TEST_CASE("bin counts, fraction and ratio") {
    FlightBinCounts c{{6, 0, 4, 0}, {3, 5, 0, 0}};
    CHECK(*c.ratio(0) == doctest::Approx(2.0));
    CHECK(*c.fraction(0) == doctest::Approx(2.0 / 3.0));
    CHECK(*c.fraction(1) == 0.0);
    CHECK(*c.ratio(1) == 0.0);
    CHECK(*c.fraction(2) == 1.0);
    CHECK_FALSE(c.ratio(2).has_value());
    CHECK_FALSE(c.fraction(3).has_value());
    const double f = *c.fraction(0);
    CHECK(*c.ratio(0) == doctest::Approx(f / (1.0 - f)));
  }

  TEST_CASE("eer profile of one flight") {
    const FlightRecord r = line_record(14);  // 10 velocity steps at x = 0.2 .. 1.1
    const Vec3 target{0, 0, 0};
    const Segmentation all_s{{}, {S}, 10};
    const EERProfile p = eer_profile(r, all_s, target, 0.06);
    for (std::size_t b : p.occupied()) {
      CHECK(p.mean_eer[b] == 1.0);
      CHECK_FALSE(p.mean_ratio[b].has_value());
    }
    const Segmentation all_o{{}, {O}, 10};
    const EERProfile q = eer_profile(r, all_o, target, 0.06);
    for (std::size_t b : q.occupied()) {
      CHECK(q.mean_eer[b] == 0.0);
      CHECK(*q.mean_ratio[b] == 0.0);
    }
    std::size_t total = 0;
    for (std::size_t s : p.steps) total += s;
    CHECK(total == 10);
    CHECK_THROWS_AS(eer_profile(r, Segmentation{{}, {S}, 9}, target), InvalidInput);
  }

  TEST_CASE("aggregate eer uses flights as samples") {
    DistanceBins bins;
    bins.bin_radius = 0.5;
    bins.max_distance = 2.0;
    const std::vector<FlightBinCounts> flights{{{1, 0}, {1, 0}}, {{3, 2}, {0, 2}}};
    const EERProfile p = aggregate_eer(flights, bins);
    CHECK(p.counts[0] == 2);
    CHECK(p.mean_eer[0] == doctest::Approx(0.75));
    CHECK(p.std_eer[0] == doctest::Approx(0.25));
    CHECK(p.counts[1] == 1);
    CHECK(p.mean_eer[1] == doctest::Approx(0.5));
    CHECK(p.steps[0] == 5);
  }

  TEST_CASE("mean eer") {
    const FlightRecord r = line_record(104);
    CHECK(mean_eer(r, Segmentation{{}, {S}, 100}) == 1.0);
    CHECK(mean_eer(r, Segmentation{{}, {O}, 100}) == 0.0);
    CHECK(mean_eer(r, Segmentation{{40}, {S, O}, 100}) == doctest::Approx(0.4));
  }

  TEST_CASE("plane projection") {
    const Trajectory t({{1, 2, 3}}, 1.0);
    CHECK(project_plane(t, Plane::XY)[0] == Vec3{1, 2, 0});
    CHECK(project_plane(t, Plane::XZ)[0] == Vec3{1, 0, 3});
    CHECK(project_plane(t, Plane::YZ)[0] == Vec3{0, 2, 3});
    const Trajectory w = wave(10, 0.4);
    CHECK(project_plane(project_plane(w, Plane::XZ), Plane::XZ) == project_plane(w, Plane::XZ));
  }

  TEST_CASE("axis variance fractions") {
    const std::vector<Trajectory> line{Trajectory({{0, 0, 0}, {1, 0, 0}, {5, 0, 0}}, 1.0)};
    const auto f = axis_variance_fractions(line);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == 0.0);
    CHECK(f[2] == 0.0);

    const std::vector<Trajectory> pts{
        Trajectory({{0, 0, 0}, {2, 1, 0}, {4, 1, 1}}, 1.0), Trajectory({{1, 3, 0}, {3, 0, 2}, {0, 2, 1}}, 1.0)};
    const auto a = axis_variance_fractions(pts);
    CHECK(a[0] == doctest::Approx(0.5673758865248227).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.2907801418439717).epsilon(1e-12));
    CHECK(a[2] == doctest::Approx(0.1418439716312057).epsilon(1e-12));
    CHECK(std::abs(a[0] + a[1] + a[2] - 1.0) <= 1e-12);
    const auto e = axis_variance_fractions(pts, true);
    CHECK(e[0] == doctest::Approx(0.656244527029091).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(0.2521893806706318).epsilon(1e-12));
    CHECK(e[2] == doctest::Approx(0.09156609230027721).epsilon(1e-12));

    std::vector<Trajectory> moved;
    for (const auto& t : pts) {
      std::vector<Vec3> s;
      for (const auto& p : t.samples()) s.push_back(p + Vec3{10, -4, 7});
      moved.emplace_back(s, 1.0);
    }
    const auto m = axis_variance_fractions(moved);
    for (int i = 0; i < 3; ++i) CHECK(m[i] == doctest::Approx(a[i]).epsilon(1e-12));

    const std::vector<Trajectory> same{Trajectory({{1, 1, 1}, {1, 1, 1}}, 1.0)};
    CHECK_THROWS_AS(axis_variance_fractions(same), InvalidInput);
    const std::vector<Trajectory> single{Trajectory({{1, 1, 1}}, 1.0)};
    CHECK_THROWS_AS(axis_variance_fractions(single), InvalidInput);
  }

  TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{10, 20, 25, 100};
    const std::vector<double> z{4, 3, 2, 1};
    CHECK(spearman(x, y) == doctest::Approx(1.0));
    CHECK(spearman(x, z) == doctest::Approx(-1.0));
    const std::vector<double> tx{1, 2, 2, 3, 5, 4};
    const std::vector<double> ty{0.3, 0.1, 0.4, 0.4, 0.9, 0.2};
    CHECK(spearman(tx, ty) == doctest::Approx(0.42647058823529416).epsilon(1e-12));
  }

  TEST_CASE("histogram") {
    const std::vector<double> v{0.0, 0.05, 0.5, 0.99, 1.0, 1.5, -0.2};
    const Histogram h = histogram(v, 4, 0.0, 1.0);
    CHECK(h.counts == std::vector<std::size_t>{3, 0, 1, 3});
  }
}
