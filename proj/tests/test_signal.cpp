#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "tfec/rng.hpp"
#include "tfec/signal.hpp"

using namespace tfec;

namespace {

SignalRecord make_record(const MatrixXd& samples, double fs) {
  SignalRecord rec;
  rec.samples = samples;
  rec.fs = fs;
  rec.channel_names.resize(static_cast<std::size_t>(samples.rows()));
  for (Eigen::Index c = 0; c < samples.rows(); ++c)
    rec.channel_names[static_cast<std::size_t>(c)] = "ch" + std::to_string(c);
  rec.resected.assign(static_cast<std::size_t>(samples.rows()), false);
  return rec;
}

VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  auto rng = seeded_engine(seed);
  GaussianDraw gauss;
  VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = gauss(rng);
  return x;
}

double tone_amplitude(const VectorXd& x, double fs, double f_hz) {
  // Project onto the quadrature pair at f; ignore a fs-proportional margin at
  // each end so filter edge effects do not bias the estimate.
  const Eigen::Index n = x.size();
  const Eigen::Index margin = n / 8;
  double c = 0.0, s = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = margin; i < n - margin; ++i) {
    const double t = static_cast<double>(i) / fs;
    c += x[i] * std::cos(2.0 * M_PI * f_hz * t);
    s += x[i] * std::sin(2.0 * M_PI * f_hz * t);
    ++count;
  }
  return 2.0 * std::sqrt(c * c + s * s) / static_cast<double>(count);
}

}  // namespace

TEST_CASE("epoch grid: 2 min at 2048 Hz gives 239 epochs") {
  auto rec = make_record(MatrixXd::Zero(1, 2048 * 120), 2048.0);
  auto epochs = epoch_signal(rec, 0, 1.0, 0.5);
  CHECK(epochs.size() == 239);
  CHECK(epochs.front().start_sample == 0);
  CHECK(epochs.front().samples.size() == 2048);
  CHECK(epochs.back().start_sample == 2048 * 119);
}

TEST_CASE("epoch grid: exact window gives one epoch, short tail dropped") {
  auto one = epoch_signal(make_record(MatrixXd::Zero(1, 1000), 1000.0), 0);
  CHECK(one.size() == 1);
  auto padded = epoch_signal(make_record(MatrixXd::Zero(1, 1200), 1000.0), 0);
  CHECK(padded.size() == 1);  // trailing 0.2 s partial window dropped
  auto none = epoch_signal(make_record(MatrixXd::Zero(1, 999), 1000.0), 0);
  CHECK(none.empty());
}

TEST_CASE("epoch grid: full coverage and exact overlap") {
  const double fs = 512.0;
  auto rec = make_record(MatrixXd::Zero(1, 512 * 7 + 300), fs);
  auto epochs = epoch_signal(rec, 0, 1.0, 0.5);
  REQUIRE(!epochs.empty());
  const std::int64_t window = epochs.front().samples.size();
  const std::int64_t step = epochs[1].start_sample - epochs[0].start_sample;
  CHECK(window == 512);
  CHECK(step == 256);
  // every sample before the last epoch's end is inside >= 1 epoch
  std::int64_t covered_end = 0;
  for (const auto& e : epochs) {
    CHECK(e.start_sample <= covered_end);  // no gap
    covered_end = std::max(covered_end, e.start_sample + window);
  }
  CHECK(covered_end == epochs.back().start_sample + window);
  // consecutive epochs overlap by window - step
  for (std::size_t i = 1; i < epochs.size(); ++i)
    CHECK(epochs[i].start_sample - epochs[i - 1].start_sample == step);
}

TEST_CASE("epoch samples copy the channel verbatim") {
  MatrixXd samples = MatrixXd::Zero(2, 3000);
  for (Eigen::Index i = 0; i < 3000; ++i) {
    samples(0, i) = std::sin(0.01 * static_cast<double>(i));
    samples(1, i) = static_cast<double>(i);
  }
  auto rec = make_record(samples, 1000.0);
  auto per_channel = epoch_signal(rec, 1.0, 0.5);
  REQUIRE(per_channel.size() == 2);
  for (const auto& e : per_channel[1]) {
    CHECK(e.channel == 1);
    for (Eigen::Index i = 0; i < e.samples.size(); ++i)
      CHECK(e.samples[i] == samples(1, e.start_sample + i));
  }
}

TEST_CASE("tkeo: constant signal gives zeros") {
  VectorXd x = VectorXd::Constant(50, 3.7);
  VectorXd y = tkeo(x);
  REQUIRE(y.size() == 50);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tkeo: direct arithmetic example") {
  VectorXd x(5);
  x << 1, 2, 3, 2, 1;
  VectorXd y = tkeo(x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 2.0 * 2.0 - 1.0 * 3.0);
  CHECK(y[2] == 5.0);  // 3^2 - 2*2
  CHECK(y[3] == 2.0 * 2.0 - 3.0 * 1.0);
  CHECK(y[4] == 0.0);
}

TEST_CASE("tkeo: sinusoid law A^2 sin^2(Omega)") {
  const double A = 2.5, omega = 0.3, phase = 0.8;
  VectorXd x(200);
  for (Eigen::Index i = 0; i < 200; ++i)
    x[i] = A * std::sin(omega * static_cast<double>(i) + phase);
  VectorXd y = tkeo(x);
  const double expected = A * A * std::sin(omega) * std::sin(omega);
  for (Eigen::Index i = 1; i < 199; ++i)
    CHECK(std::abs(y[i] - expected) < 1e-9);
}

TEST_CASE("tkeo: shift equivariance and quadratic scaling") {
  VectorXd x = random_vector(64, 11);
  VectorXd shifted(64);
  shifted.head(61) = x.tail(61);
  shifted.tail(3) = x.head(3);
  VectorXd yx = tkeo(x);
  VectorXd ys = tkeo(shifted);
  for (Eigen::Index i = 1; i < 58; ++i)
    CHECK(ys[i] == doctest::Approx(yx[i + 3]).epsilon(1e-12));
  VectorXd ya = tkeo((4.0 * x).eval());
  for (Eigen::Index i = 0; i < 64; ++i)
    CHECK(ya[i] == doctest::Approx(16.0 * yx[i]).epsilon(1e-12));
}

TEST_CASE("tkeo: too-short input rejected") {
  VectorXd x(2);
  x << 1, 2;
  CHECK_THROWS_AS(tkeo(x), ConfigError);
}

TEST_CASE("bandpass: in-band tone preserved within 5%") {
  const double fs = 2048.0;
  VectorXd x(8192);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * M_PI * 200.0 * static_cast<double>(i) / fs);
  VectorXd y = bandpass(x, fs, 80.0, 250.0);
  REQUIRE(y.size() == x.size());
  CHECK(tone_amplitude(y, fs, 200.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bandpass: out-of-band tone attenuated below 1%") {
  const double fs = 2048.0;
  VectorXd x(8192);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * M_PI * 30.0 * static_cast<double>(i) / fs);
  VectorXd y = bandpass(x, fs, 80.0, 250.0);
  CHECK(tone_amplitude(y, fs, 30.0) < 0.01);
}

TEST_CASE("bandpass: >= 40 dB one octave outside the passband") {
  const double fs = 2048.0;
  VectorXd x(16384);
  for (double f : {40.0, 500.0}) {  // one octave below 80 and above 250
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs);
    VectorXd y = bandpass(x, fs, 80.0, 250.0);
    CHECK(tone_amplitude(y, fs, f) < 0.01);  // -40 dB
  }
}

TEST_CASE("bandpass: zero-phase (no group delay) on an in-band tone") {
  const double fs = 2048.0;
  const double f = 150.0;
  VectorXd x(8192);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs);
  VectorXd y = bandpass(x, fs, 80.0, 250.0);
  // correlate against the input away from the edges: max at zero lag
  const Eigen::Index lo = 2048, hi = 6144;
  double best = -1e30;
  int best_lag = -99;
  for (int lag = -8; lag <= 8; ++lag) {
    double dot = 0;
    for (Eigen::Index i = lo; i < hi; ++i) dot += y[i] * x[i + lag];
    if (dot > best) {
      best = dot;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("bandpass: zero in, zero out; linearity") {
  const double fs = 1024.0;
  CHECK(bandpass(VectorXd::Zero(2048).eval(), fs, 80.0, 250.0).cwiseAbs().maxCoeff() == 0.0);
  VectorXd a = random_vector(2048, 5);
  VectorXd b = random_vector(2048, 6);
  VectorXd lhs = bandpass((2.0 * a + 3.0 * b).eval(), fs, 80.0, 250.0);
  VectorXd rhs = 2.0 * bandpass(a, fs, 80.0, 250.0) + 3.0 * bandpass(b, fs, 80.0, 250.0);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("bandpass: idempotent within 2% on in-band tones") {
  const double fs = 2048.0;
  for (double f : {120.0, 165.0, 220.0}) {
    VectorXd x(8192);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs);
    VectorXd once = bandpass(x, fs, 80.0, 250.0);
    VectorXd twice = bandpass(once, fs, 80.0, 250.0);
    const double a1 = tone_amplitude(once, fs, f);
    const double a2 = tone_amplitude(twice, fs, f);
    CHECK(std::abs(a2 - a1) / a1 < 0.02);
  }
}

TEST_CASE("bandpass: invalid band rejected") {
  VectorXd x = VectorXd::Zero(1024);
  CHECK_THROWS_AS(bandpass(x, 1000.0, 0.0, 250.0), ConfigError);
  CHECK_THROWS_AS(bandpass(x, 1000.0, 250.0, 80.0), ConfigError);
  CHECK_THROWS_AS(bandpass(x, 1000.0, 80.0, 600.0), ConfigError);  // >= fs/2
}

TEST_CASE("record validation: fs and shape") {
  auto rec = make_record(MatrixXd::Zero(2, 1000), 1000.0);
  CHECK_NOTHROW(rec.validate());
  rec.fs = 0.0;
  CHECK_THROWS_AS(rec.validate(), DataError);
  rec.fs = 1000.0;
  rec.channel_names.pop_back();
  CHECK_THROWS_AS(rec.validate(), DataError);
}
