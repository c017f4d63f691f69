#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "tfec/rng.hpp"
#include "tfec/stockwell.hpp"

using namespace tfec;

namespace {

VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  auto rng = seeded_engine(seed);
  GaussianDraw gauss;
  VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = gauss(rng);
  return x;
}

// Full-width-half-maximum of a sampled bump, linearly interpolated.
double fwhm_samples(const VectorXd& row) {
  Eigen::Index peak = 0;
  row.maxCoeff(&peak);
  const double half = row[peak] / 2.0;
  double left = static_cast<double>(peak), right = static_cast<double>(peak);
  for (Eigen::Index i = peak; i-- > 0;) {
    if (row[i] <= half) {
      left = static_cast<double>(i) +
             (half - row[i]) / (row[i + 1] - row[i]);
      break;
    }
  }
  for (Eigen::Index i = peak + 1; i < row.size(); ++i) {
    if (row[i] <= half) {
      right = static_cast<double>(i) -
              (half - row[i]) / (row[i - 1] - row[i]);
      break;
    }
  }
  return right - left;
}

}  // namespace

TEST_CASE("fft path matches direct quadrature to 1e-9 over 20 seeds") {
  const int n = 256;
  const double fs = 256.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    VectorXd x = random_vector(n, seed);
    std::vector<int> bins;
    MatrixXcd rows = stransform_rows(x, fs, 20.0, 120.0, &bins);
    REQUIRE(!bins.empty());
    // spot frequencies spread over the band (full cross-check is O(N^2) each)
    for (std::size_t idx : {std::size_t{0}, bins.size() / 2, bins.size() - 1}) {
      const double f_hz = bins[idx] * fs / n;
      VectorXcd direct = stransform_direct(x, fs, f_hz);
      double scale = direct.cwiseAbs().maxCoeff();
      double err = (rows.row(static_cast<Eigen::Index>(idx)).transpose() - direct)
                       .cwiseAbs()
                       .maxCoeff();
      CHECK(err / scale < 1e-9);
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(elapsed < 10.0);
}

TEST_CASE("zero epoch gives an all-zero transform") {
  TfdMatrix tfd = stransform(VectorXd::Zero(256).eval(), 256.0, 20.0, 100.0);
  CHECK(tfd.mag.maxCoeff() == 0.0);
  CHECK(tfd.mag.minCoeff() == 0.0);
}

TEST_CASE("pure tone at a bin frequency peaks on its own row") {
  const int n = 512;
  const double fs = 512.0;
  const double f0 = 80.0;  // bin 80
  VectorXd x(n);
  for (int i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
  TfdMatrix tfd = stransform(x, fs, 20.0, 200.0);
  VectorXd row_mean = tfd.mag.rowwise().mean();
  Eigen::Index argmax = 0;
  row_mean.maxCoeff(&argmax);
  CHECK(tfd.f_axis[argmax] == doctest::Approx(f0));
}

TEST_CASE("single tone row magnitude is near constant away from edges") {
  const int n = 512;
  const double fs = 512.0;
  const double f0 = 100.0;
  VectorXd x(n);
  for (int i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
  VectorXcd row = stransform_direct(x, fs, f0);
  VectorXd mag = row.cwiseAbs();
  // circular realization: no edges to taper; whole row should be flat
  const double mean = mag.mean();
  CHECK(mean > 0.0);
  CHECK((mag.array() - mean).abs().maxCoeff() / mean < 1e-6);
}

TEST_CASE("frequency marginal equals the DFT coefficient") {
  const int n = 256;
  const double fs = 512.0;
  for (std::uint64_t seed : {3u, 4u}) {
    VectorXd x = random_vector(n, seed);
    std::vector<int> bins;
    MatrixXcd rows = stransform_rows(x, fs, 30.0, 200.0, &bins);
    VectorXcd spectrum = Fft::forward(x);
    for (std::size_t r = 0; r < bins.size(); ++r) {
      std::complex<double> marginal = rows.row(static_cast<Eigen::Index>(r)).sum();
      std::complex<double> dft = spectrum[bins[r]];
      CHECK(std::abs(marginal - dft) / std::abs(dft) < 1e-6);
    }
  }
}

TEST_CASE("linearity on complex values") {
  const int n = 128;
  const double fs = 256.0;
  VectorXd x = random_vector(n, 7);
  VectorXd y = random_vector(n, 8);
  const double a = 2.0, b = -0.5;
  MatrixXcd lhs = stransform_rows((a * x + b * y).eval(), fs, 20.0, 100.0);
  MatrixXcd rhs = a * stransform_rows(x, fs, 20.0, 100.0) +
                  b * stransform_rows(y, fs, 20.0, 100.0);
  double scale = lhs.cwiseAbs().maxCoeff();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-9);
}

TEST_CASE("circular shift of the epoch circularly shifts magnitude rows") {
  const int n = 128;
  const double fs = 256.0;
  const int shift = 17;
  VectorXd x = random_vector(n, 9);
  VectorXd xs(n);
  for (int i = 0; i < n; ++i) xs[(i + shift) % n] = x[i];
  TfdMatrix base = stransform(x, fs, 20.0, 100.0);
  TfdMatrix moved = stransform(xs, fs, 20.0, 100.0);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < base.mag.rows(); ++r)
    for (int j = 0; j < n; ++j)
      worst = std::max(worst,
                       std::abs(moved.mag(r, (j + shift) % n) - base.mag(r, j)));
  CHECK(worst < 1e-9 * base.mag.maxCoeff());
}

TEST_CASE("impulse row width follows the 1/f law within 10%") {
  const int n = 1024;
  const double fs = 1024.0;
  VectorXd x = VectorXd::Zero(n);
  x[n / 2] = 1.0;
  TfdMatrix tfd = stransform(x, fs, 80.0, 480.0);
  // FWHM of a Gaussian with sigma_t = 1/f is 2 sqrt(2 ln 2)/f seconds
  for (Eigen::Index r = 0; r < tfd.mag.rows(); ++r) {
    const double f = tfd.f_axis[r];
    const double width = fwhm_samples(tfd.mag.row(r).transpose()) / fs;
    const double expected = 2.0 * std::sqrt(2.0 * std::log(2.0)) / f;
    CHECK(std::abs(width - expected) / expected < 0.10);
  }
  // and the bump is centered at the impulse
  for (Eigen::Index r : {Eigen::Index{0}, tfd.mag.rows() - 1}) {
    Eigen::Index peak = 0;
    tfd.mag.row(r).maxCoeff(&peak);
    CHECK(peak == n / 2);
  }
}

TEST_CASE("axes and shape") {
  const int n = 256;
  const double fs = 512.0;
  TfdMatrix tfd = stransform(random_vector(n, 10), fs, 30.0, 200.0);
  CHECK(tfd.mag.cols() == n);
  CHECK(tfd.mag.rows() == tfd.f_axis.size());
  CHECK(tfd.t_axis.size() == n);
  CHECK(tfd.mag.minCoeff() >= 0.0);
  const double df = fs / n;
  for (Eigen::Index r = 1; r < tfd.f_axis.size(); ++r)
    CHECK(tfd.f_axis[r] - tfd.f_axis[r - 1] == doctest::Approx(df));
  CHECK(tfd.f_axis.minCoeff() >= 30.0);
  CHECK(tfd.f_axis.maxCoeff() <= 200.0);
  CHECK(tfd.t_axis[0] == 0.0);
  CHECK(tfd.t_axis[n - 1] == doctest::Approx((n - 1) / fs));
}

TEST_CASE("parameter errors") {
  VectorXd ok = random_vector(256, 11);
  CHECK_THROWS_AS(stransform(random_vector(32, 1), 256.0, 20.0, 100.0), ConfigError);
  CHECK_THROWS_AS(stransform(ok, 256.0, 0.0, 100.0), ConfigError);
  CHECK_THROWS_AS(stransform(ok, 256.0, 100.0, 20.0), ConfigError);
  CHECK_THROWS_AS(stransform(ok, 256.0, 20.0, 128.0), ConfigError);  // >= fs/2
  CHECK_THROWS_AS(stransform(ok, 256.0, 0.5, 100.0), ConfigError);   // below one bin
  CHECK_THROWS_AS(stransform_direct(ok, 256.0, 0.0), ConfigError);
  CHECK_THROWS_AS(stransform_direct(ok, 256.0, 128.0), ConfigError);
}

TEST_CASE("epoch overload carries provenance") {
  Epoch e;
  e.channel = 3;
  e.start_sample = 4096;
  e.fs = 512.0;
  e.samples = random_vector(256, 12);
  TfdMatrix tfd = stransform(e, 30.0, 200.0);
  CHECK(tfd.channel == 3);
  CHECK(tfd.start_sample == 4096);
  CHECK(tfd.fs == 512.0);
}
