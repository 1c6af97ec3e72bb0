#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/qualifier.hpp"

using namespace schedlaw;

namespace {

ScheduleFamily family_of(Kind kind) {
  ScheduleFamily f;
  f.kind = kind;
  return f;
}

}  // namespace

TEST_CASE("the default exam grid covers four decades") {
  const auto grid = default_exam_grid();
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 1000);
  CHECK(grid.back() == 10000000);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] == 10 * grid[i - 1]);
  }
}

TEST_CASE("decay-to-zero families pass the exam with exponent one half") {
  for (Kind kind : {Kind::LinearDecay, Kind::CosineDecay, Kind::WSD}) {
    const QualifyReport report = qualify(family_of(kind));
    CAPTURE(to_string(kind));
    CHECK(report.verdict == Verdict::Qualified);
    CHECK(report.alpha == doctest::Approx(0.5).epsilon(2e-3));
    CHECK_FALSE(report.log_growth_detected);
    CHECK_FALSE(report.singular);
    CHECK_FALSE(report.no_closed_form_reference);
  }
}

TEST_CASE("exam values land on their known constants at T = 1e4") {
  // value * sqrt(T) at T = 1e4, i.e. the sqrt-normalized level.
  auto level = [](Kind kind) {
    const QualifyReport r = qualify(family_of(kind));
    return r.values[1] * 100.0;
  };
  CHECK(level(Kind::LinearDecay) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(level(Kind::CosineDecay) == doctest::Approx(2.0611).epsilon(1e-3));
  ScheduleFamily wsd = family_of(Kind::WSD);
  wsd.wsd_c = 0.8;
  const QualifyReport wr = qualify(wsd);
  CHECK(wr.values[1] * 100.0 == doctest::Approx(2.6537).epsilon(1e-3));
}

TEST_CASE("the constant schedule fails the exam on log growth") {
  const QualifyReport report = qualify(family_of(Kind::Constant));
  CHECK(report.verdict == Verdict::NotQualified);
  // The normalized level is exactly (1 + ln T)/2, so the fitted growth
  // slope against ln T is exactly one half.
  CHECK(report.values[1] * 100.0 ==
        doctest::Approx((1.0 + std::log(1e4)) / 2.0).epsilon(1e-6));
  CHECK(report.log_growth_slope == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(report.log_growth_detected);
  CHECK(report.alpha == doctest::Approx(0.4168).epsilon(1e-3));
}

TEST_CASE("sqrt_inverse fails the exam outright") {
  const QualifyReport report = qualify(family_of(Kind::SqrtInverse));
  CHECK(report.verdict == Verdict::NotQualified);
  // Its suffix area collapses, so the value barely decays with T at all.
  CHECK(report.alpha < 0.1);
  CHECK(report.log_growth_detected);
}

TEST_CASE("cyclic families have no reference form but still sit the exam") {
  ScheduleFamily cyc = family_of(Kind::Cyclic);
  cyc.cycles = 8;
  const QualifyReport report = qualify(cyc);
  CHECK(report.no_closed_form_reference);
  CHECK_FALSE(report.singular);
  CHECK(report.verdict == Verdict::Qualified);
  CHECK(report.alpha == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("warmup sets the no-reference flag without changing the verdict") {
  ScheduleFamily warm = family_of(Kind::CosineDecay);
  warm.warmup_frac = 0.05;
  const QualifyReport report = qualify(warm);
  CHECK(report.no_closed_form_reference);
  CHECK(report.verdict == Verdict::Qualified);
  CHECK(report.alpha == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("the verdict is invariant to joint D and G rescaling") {
  const QualifyReport base = qualify(family_of(Kind::LinearDecay));
  const QualifyReport scaled =
      qualify(family_of(Kind::LinearDecay), default_exam_grid(), 0.02, 7.0,
              7.0);
  CHECK(scaled.verdict == base.verdict);
  CHECK(scaled.alpha == doctest::Approx(base.alpha).epsilon(1e-12));
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    CHECK(scaled.values[i] ==
          doctest::Approx(49.0 * base.values[i]).epsilon(1e-10));
  }
}

TEST_CASE("a horizon that cannot fit the family goes singular, not fatal") {
  ScheduleFamily cyc = family_of(Kind::Cyclic);
  cyc.cycles = 600;  // needs 1200 steps; fails only at T = 1000
  const QualifyReport report =
      qualify(cyc, {1000, 10000, 100000, 1000000, 10000000});
  CHECK(report.singular);
  CHECK(std::isnan(report.values[0]));
  CHECK(std::isfinite(report.values[1]));
  CHECK(report.verdict == Verdict::NotQualified);
}

TEST_CASE("exam grids are validated") {
  const ScheduleFamily fam = family_of(Kind::LinearDecay);
  CHECK_THROWS_AS(qualify(fam, {1000, 10000, 100000}), validation_error);
  CHECK_THROWS_AS(qualify(fam, {5, 100, 1000, 10000}), validation_error);
  CHECK_THROWS_AS(qualify(fam, {1000, 1000, 10000, 100000}),
                  validation_error);
  CHECK_THROWS_AS(qualify(fam, default_exam_grid(), 0.7), validation_error);
  CHECK_THROWS_AS(qualify(fam, default_exam_grid(), 0.02, -1.0, 1.0),
                  validation_error);
}

TEST_CASE("qualify reports serialize with the family and verdict") {
  ScheduleFamily wsd = family_of(Kind::WSD);
  wsd.wsd_c = 0.6;
  const QualifyReport report = qualify(wsd);
  const nlohmann::json j = nlohmann::json::parse(qualify_report_to_json(report));
  CHECK(j.at("family").at("kind") == "wsd");
  CHECK(j.at("family").at("c") == doctest::Approx(0.6));
  CHECK(j.at("verdict") == "qualified");
  CHECK(j.at("alpha").get<double>() == doctest::Approx(report.alpha));
  CHECK(j.at("values").size() == report.values.size());
  CHECK(j.contains("log_growth_slope"));
  CHECK(j.contains("log_growth_threshold"));
}
