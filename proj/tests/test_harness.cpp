#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclap/harness.hpp"

using namespace fraclap;

TEST(FitRate, ExactPowerLaw) {
  const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  EXPECT_NEAR(fit_rate(h, e), 2.0, 1e-12);
  EXPECT_THROW(fit_rate({0.1, 0.05}, {1.0, 0.5}), PreconditionError);
}

TEST(FitRate, SaturatedRowsExcluded) {
  ConvergenceReport rep;
  const double floor_err = 3.0 * std::pow(0.2 / 64.0, 1.3);
  for (double h = 0.2; h > 1e-4; h /= 2) {
    ConvergenceRow r;
    r.series = "s";
    r.alpha = 0.5;
    r.order = "quad";
    r.L = 1.0;
    r.h = h;
    r.error = std::max(3.0 * std::pow(h, 1.3), floor_err);
    rep.rows.push_back(r);
  }
  finalize_report(rep);
  const auto* f = rep.fit("s");
  ASSERT_NE(f, nullptr);
  ASSERT_TRUE(f->rate.has_value());
  EXPECT_NEAR(*f->rate, 1.3, 1e-10);
  EXPECT_EQ(f->rows_used, 7);
  EXPECT_TRUE(f->saturated);
  EXPECT_TRUE(rep.rows.back().saturated);
  EXPECT_FALSE(rep.rows.front().saturated);
}

TEST(Saturation, OnlyTrailingRun) {
  const std::vector<double> h{0.8, 0.4, 0.2, 0.1, 0.05, 0.025};
  const std::vector<double> e{1.0, 0.95, 0.3, 0.1, 0.099, 0.0985};
  const auto flags = saturation_flags(h, e);
  EXPECT_EQ(flags, (std::vector<bool>{false, false, false, false, true, true}));
}

TEST(Report, CsvDeterministicAndFullPrecision) {
  ExperimentSpec s;
  s.function = "algebraic";
  s.alphas = {0.4};
  s.Ls = {2.0};
  s.hs = {0.2, 0.1, 0.05};
  s.methods = {Method::weights(Interpolation::Tent), Method::weights(Interpolation::Quad)};
  s.threads = 2;
  const auto a = run_accuracy(s);
  s.threads = 1;
  const auto b = run_accuracy(s);
  std::ostringstream oa, ob;
  write_csv(a, oa);
  write_csv(b, ob);
  EXPECT_EQ(oa.str(), ob.str());
  EXPECT_NE(oa.str().find("e-"), std::string::npos);
  EXPECT_EQ(format_real(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(a.rows.size(), 6u);
  for (const auto& r : a.rows) EXPECT_TRUE(r.note.empty()) << r.note;
}

TEST(Report, CsvFieldEscaping) { EXPECT_EQ(csv_field("a,b\nc").find_first_of(",\n"), std::string::npos); }

TEST(Spec, Validation) {
  ExperimentSpec s;
  s.hs = {0.1, 0.2};
  EXPECT_THROW(run_accuracy(s), PreconditionError);
  EXPECT_EQ(far_field_mode_from_string("zero"), FarFieldMode::Zero);
  EXPECT_THROW(far_field_mode_from_string("bogus"), PreconditionError);
}

TEST(Experiment, FailuresRecordedPerRow) {
  ExperimentSpec s;
  s.function = "algebraic";
  s.alphas = {1.5};
  s.hs = {0.2, 0.1, 0.05};
  const auto rep = run_accuracy(s);
  for (const auto& r : rep.rows) EXPECT_EQ(r.note.rfind("failed", 0), 0u);
}

TEST(ParallelFor, PropagatesException) {
  EXPECT_THROW(parallel_for(10, 4,
                            [](std::size_t i) {
                              if (i == 7) throw NumericalError("boom");
                            }),
               NumericalError);
}

TEST(Properties, SuitePasses) {
  PropertyOptions opt;
  opt.supersolution_h = 0.02;
  opt.max_principle_trials = 20;
  for (const auto& r : run_property_suite(opt)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}
