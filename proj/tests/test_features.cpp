#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "tfec/features.hpp"
#include "tfec/rng.hpp"

using namespace tfec;

namespace {

VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  auto rng = seeded_engine(seed);
  GaussianDraw gauss;
  VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = gauss(rng);
  return x;
}

MatrixXd random_patch(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  auto rng = seeded_engine(seed);
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform01(rng);
  return m;
}

struct Moments {
  double mean, var, skew, kurt;
};

Moments moments_oracle(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {mean, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

}  // namespace

TEST_CASE("catalog: 43 unique names resolvable by index") {
  const auto& names = feature_names();
  CHECK(names.size() == 43);
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == 43);
  for (std::size_t i = 0; i < names.size(); ++i)
    CHECK(feature_index(names[i]) == static_cast<int>(i));
  CHECK_THROWS_AS(feature_index("no_such_feature"), ConfigError);
}

TEST_CASE("time features match direct summation to 1e-10") {
  VectorXd crop = random_vector(410, 21);
  VectorXd f = time_features(crop);
  std::vector<double> v(crop.data(), crop.data() + crop.size());
  const auto m = moments_oracle(v);
  const double n = static_cast<double>(crop.size());

  CHECK(f[0] == doctest::Approx(m.mean).epsilon(1e-10));
  CHECK(f[1] == doctest::Approx(m.var).epsilon(1e-10));
  CHECK(f[2] == doctest::Approx(m.skew).epsilon(1e-10));
  CHECK(f[3] == doctest::Approx(m.kurt).epsilon(1e-10));
  CHECK(f[4] == doctest::Approx(std::sqrt(m.var) / m.mean).epsilon(1e-10));

  double power = 0;
  for (double x : v) power += x * x;
  power /= n;
  CHECK(f[5] == doctest::Approx(std::sqrt(power)).epsilon(1e-10));
  CHECK(f[6] == doctest::Approx(power).epsilon(1e-10));

  double line = 0;
  for (std::size_t i = 1; i < v.size(); ++i) line += std::abs(v[i] - v[i - 1]);
  CHECK(f[7] == doctest::Approx(line).epsilon(1e-10));

  double num = 0, den = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - m.mean;
    den += d * d;
    if (i + 1 < v.size()) num += d * (v[i + 1] - m.mean);
  }
  CHECK(f[8] == doctest::Approx(num / den).epsilon(1e-10));

  double teager = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    teager += v[i] * v[i] - v[i - 1] * v[i + 1];
  CHECK(f[9] == doctest::Approx(teager / (n - 2)).epsilon(1e-10));

  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(f[11] == doctest::Approx(hi - lo).epsilon(1e-10));
}

TEST_CASE("time features: arithmetic on a tiny crop") {
  VectorXd crop(4);
  crop << 1, 2, 4, 1;
  VectorXd f = time_features(crop);
  CHECK(f[0] == 2.0);                                // mean
  CHECK(f[1] == doctest::Approx(1.5));               // population variance
  CHECK(f[6] == doctest::Approx(22.0 / 4.0));        // mean square
  CHECK(f[7] == doctest::Approx(1.0 + 2.0 + 3.0));   // line length
  CHECK(f[11] == 3.0);                               // peak to peak
  // teager: interior samples 2,4 -> (4 - 1*4) + (16 - 2*1) = 0 + 14, / 2
  CHECK(f[9] == doctest::Approx(7.0));
}

TEST_CASE("time features: degeneracy flags") {
  std::vector<std::string> flags;
  time_features(VectorXd::Constant(16, 2.0), &flags);
  CHECK(std::count(flags.begin(), flags.end(), "t_skewness") == 1);
  CHECK(std::count(flags.begin(), flags.end(), "t_kurtosis") == 1);
  CHECK(std::count(flags.begin(), flags.end(), "t_autocorr_lag1") == 1);

  flags.clear();
  VectorXd balanced(4);
  balanced << -1, 1, -1, 1;  // zero mean: cv guard
  time_features(balanced, &flags);
  CHECK(std::count(flags.begin(), flags.end(), "t_coeff_variation") == 1);

  CHECK_THROWS_AS(time_features(VectorXd::Zero(2)), ConfigError);
}

TEST_CASE("fractal dimension: smooth ramp near 1, rough path above it") {
  VectorXd ramp = VectorXd::LinSpaced(512, 0.0, 1.0);
  const double d_ramp = detail::box_counting_dimension(ramp);
  CHECK(d_ramp == doctest::Approx(1.0).epsilon(0.10));

  VectorXd rough = random_vector(512, 3);
  const double d_rough = detail::box_counting_dimension(rough);
  CHECK(d_rough > d_ramp + 0.2);
  CHECK(d_rough <= 2.1);

  // affine amplitude changes rescale the grid with the data
  const double d_scaled = detail::box_counting_dimension((5.0 * rough.array() + 3.0).eval());
  CHECK(d_scaled == doctest::Approx(d_rough).epsilon(0.02));
}

TEST_CASE("welch psd: tone peaks at its own bin, density integrates to power") {
  const double fs = 2048.0;
  const Eigen::Index n = 2048;
  VectorXd x(n);
  const double f0 = 200.0;
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
  Psd psd = welch_psd(x, fs, 0.25);  // 8 segments of 512
  Eigen::Index peak = 0;
  psd.power.maxCoeff(&peak);
  CHECK(psd.f_axis[peak] == doctest::Approx(f0).epsilon(0.01));

  // integrated density approximates the mean square (Hamming leakage aside)
  const double df = psd.f_axis[1] - psd.f_axis[0];
  const double integral = psd.power.sum() * df;
  const double ms = x.squaredNorm() / static_cast<double>(n);
  CHECK(integral == doctest::Approx(ms).epsilon(0.05));
}

TEST_CASE("welch psd: axis and shape for a short crop") {
  VectorXd crop = random_vector(410, 5);
  Psd psd = welch_psd(crop, 2048.0, 1.0);  // single (whole-signal) segment
  CHECK(psd.f_axis[0] == 0.0);
  CHECK(psd.f_axis[1] == doctest::Approx(2048.0 / 410.0));
  CHECK(psd.power.size() == psd.f_axis.size());
  CHECK(psd.power.size() == 410 / 2 + 1);
  CHECK(psd.power.minCoeff() >= 0.0);
}

TEST_CASE("spectral features match direct computation") {
  Psd psd;
  psd.power = random_patch(9, 1, 31).col(0).array() + 0.01;
  psd.f_axis = VectorXd::LinSpaced(9, 0.0, 400.0);
  VectorXd f = spectral_features(psd);

  const double total = psd.power.sum();
  double geo = 0, entropy = 0, mean_f = 0;
  for (int k = 0; k < 9; ++k) {
    geo += std::log(psd.power[k]);
    const double q = psd.power[k] / total;
    entropy -= q * std::log2(q);
    mean_f += psd.f_axis[k] * psd.power[k];
  }
  mean_f /= total;
  double bw = 0;
  for (int k = 0; k < 9; ++k)
    bw += (psd.f_axis[k] - mean_f) * (psd.f_axis[k] - mean_f) * psd.power[k];

  CHECK(f[0] == doctest::Approx(std::exp(geo / 9.0) / (total / 9.0)).epsilon(1e-10));
  CHECK(f[1] == doctest::Approx(entropy).epsilon(1e-10));
  CHECK(f[2] == doctest::Approx(mean_f).epsilon(1e-10));
  CHECK(f[3] == doctest::Approx(std::sqrt(bw / total)).epsilon(1e-10));
  CHECK(f[4] == doctest::Approx(psd.power.maxCoeff()).epsilon(1e-10));
}

TEST_CASE("freq features: flux compares the two half-crops") {
  VectorXd crop = random_vector(400, 8);
  VectorXd f = freq_features(crop, 2048.0, 1.0);
  Psd first = welch_psd(crop.head(200), 2048.0, 1.0);
  Psd second = welch_psd(crop.tail(200), 2048.0, 1.0);
  CHECK(f[0] == doctest::Approx((second.power - first.power).cwiseAbs().sum()).epsilon(1e-10));
  VectorXd spec = spectral_features(welch_psd(crop, 2048.0, 1.0));
  for (int k = 0; k < 5; ++k)
    CHECK(f[1 + k] == doctest::Approx(spec[k]).epsilon(1e-12));
}

TEST_CASE("tf features match direct summation to 1e-10") {
  MatrixXd patch = random_patch(20, 30, 40);
  VectorXd f = tf_features(patch);

  std::vector<double> v;
  for (Eigen::Index j = 0; j < patch.cols(); ++j)
    for (Eigen::Index i = 0; i < patch.rows(); ++i) v.push_back(patch(i, j));
  const auto m = moments_oracle(v);
  CHECK(f[0] == doctest::Approx(m.mean).epsilon(1e-10));
  CHECK(f[1] == doctest::Approx(m.var).epsilon(1e-10));
  CHECK(f[2] == doctest::Approx(m.skew).epsilon(1e-10));
  CHECK(f[3] == doctest::Approx(m.kurt).epsilon(1e-10));
  CHECK(f[4] == doctest::Approx(std::sqrt(m.var) / m.mean).epsilon(1e-10));

  const double total = patch.sum();
  double shannon = 0, cubes = 0, sqrt_sum = 0, geo = 0;
  for (double x : v) {
    const double p = x / total;
    shannon -= p * std::log2(p);
    cubes += p * p * p;
    sqrt_sum += std::sqrt(p);
    geo += std::log(x);
  }
  const double n = static_cast<double>(v.size());
  CHECK(f[5] == doctest::Approx(shannon).epsilon(1e-10));
  CHECK(f[6] == doctest::Approx(-0.5 * std::log2(cubes)).epsilon(1e-10));
  CHECK(f[7] == doctest::Approx(std::exp(geo / n) / (total / n)).epsilon(1e-10));
  CHECK(f[9] == doctest::Approx(sqrt_sum * sqrt_sum).epsilon(1e-10));

  double flux = 0;
  for (Eigen::Index j = 0; j + 1 < patch.cols(); ++j)
    for (Eigen::Index i = 0; i + 1 < patch.rows(); ++i)
      flux += std::abs(patch(i + 1, j + 1) - patch(i, j));
  CHECK(f[8] == doctest::Approx(flux / n).epsilon(1e-10));
}

TEST_CASE("tf entropies: uniform and point-mass identities") {
  MatrixXd uniform = MatrixXd::Constant(16, 16, 0.7);
  VectorXd fu = tf_features(uniform);
  CHECK(fu[5] == doctest::Approx(8.0).epsilon(1e-12));  // log2(256)
  CHECK(fu[6] == doctest::Approx(8.0).epsilon(1e-12));  // Renyi alpha=3 of uniform
  CHECK(fu[7] == doctest::Approx(1.0).epsilon(1e-12));  // flatness of constant
  CHECK(fu[9] == doctest::Approx(256.0).epsilon(1e-12));  // (sum 1/sqrt(256))^2

  MatrixXd point = MatrixXd::Zero(16, 16);
  point(3, 5) = 2.0;
  VectorXd fp = tf_features(point);
  CHECK(fp[5] == 0.0);  // point mass has zero entropy
  CHECK(fp[6] == 0.0);
  CHECK(fp[9] == doctest::Approx(1.0).epsilon(1e-12));  // fully concentrated
}

TEST_CASE("image features on a hand-built blob") {
  MatrixXd patch = MatrixXd::Zero(12, 12);
  // bright 3x4 rectangle at rows 2-4, cols 3-6 against a faint background
  for (int r = 2; r <= 4; ++r)
    for (int c = 3; c <= 6; ++c) patch(r, c) = 10.0 + 0.1 * r + 0.01 * c;
  VectorXd f = image_features(patch);
  CHECK(f[0] == 12.0);  // area
  CHECK(f[1] == doctest::Approx(3.0));  // centroid row
  CHECK(f[2] == doctest::Approx(4.5));  // centroid col

  double mu20 = 0, mu02 = 0, mu11 = 0;
  std::int64_t boundary = 0;
  for (int r = 2; r <= 4; ++r)
    for (int c = 3; c <= 6; ++c) {
      mu20 += (r - 3.0) * (r - 3.0);
      mu02 += (c - 4.5) * (c - 4.5);
      mu11 += (r - 3.0) * (c - 4.5);
      if (r == 2 || r == 4 || c == 3 || c == 6) ++boundary;
    }
  CHECK(f[3] == doctest::Approx(mu20).epsilon(1e-12));
  CHECK(f[4] == doctest::Approx(mu02).epsilon(1e-12));
  CHECK(f[5] == doctest::Approx(mu11).epsilon(1e-12));

  double m30 = 0, m12 = 0, m03 = 0, m21 = 0;
  for (int r = 2; r <= 4; ++r)
    for (int c = 3; c <= 6; ++c) {
      m30 += static_cast<double>(r) * r * r;
      m12 += static_cast<double>(r) * c * c;
      m03 += static_cast<double>(c) * c * c;
      m21 += static_cast<double>(c) * r * r;
    }
  const double perimeter = (m30 + m12) * (m30 + m12) + (m03 + m21) * (m03 + m21);
  CHECK(f[6] == doctest::Approx(perimeter).epsilon(1e-12));
  CHECK(f[7] == doctest::Approx(perimeter / 12.0).epsilon(1e-12));
  CHECK(f[8] == doctest::Approx(static_cast<double>(boundary)));
  CHECK(f[9] == 3.0);   // bbox height
  CHECK(f[10] == 4.0);  // bbox width
}

TEST_CASE("image features: largest blob wins; moments match direct sums") {
  MatrixXd patch = random_patch(24, 32, 50);
  patch.block(4, 5, 6, 7).array() += 3.0;  // dominant bright region
  VectorXd f = image_features(patch);

  const OtsuResult otsu = otsu_threshold(patch);
  const BinaryMatrix binary = binarize(patch, otsu);
  auto regions = label_components(binary, 8, 1);
  REQUIRE(!regions.empty());
  const BlobRegion* blob = &regions[0];
  for (const auto& r : regions)
    if (r.pixel_count > blob->pixel_count) blob = &r;

  CHECK(f[0] == static_cast<double>(blob->pixel_count));
  double mu20 = 0;
  for (auto [r, c] : blob->pixels)
    mu20 += (r - blob->centroid_row) * (r - blob->centroid_row);
  CHECK(f[3] == doctest::Approx(mu20).epsilon(1e-10));
  CHECK(f[9] == static_cast<double>(blob->row_max - blob->row_min + 1));
  CHECK(f[10] == static_cast<double>(blob->col_max - blob->col_min + 1));
}

TEST_CASE("lbp codes: hand example and moment agreement") {
  // 3x3 patch has exactly one interior cell; code read clockwise from the
  // top-left neighbor, a neighbor >= center sets the bit
  MatrixXd patch(3, 3);
  patch << 5, 1, 7,
           2, 4, 9,
           8, 3, 4;
  // neighbors clockwise from top-left: 5,1,7,9,4,3,8,2 vs center 4
  // bits: 1,0,1,1,1,0,1,0 -> 0b10111010 = 186
  VectorXd f = image_features(patch);
  CHECK(f[11] == 186.0);  // single code: mean = the code
  CHECK(f[12] == 0.0);

  MatrixXd big = random_patch(10, 14, 60);
  VectorXd fb = image_features(big);
  std::vector<double> codes;
  for (Eigen::Index c = 1; c + 1 < big.cols(); ++c)
    for (Eigen::Index r = 1; r + 1 < big.rows(); ++r) {
      static constexpr int off[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1},
                                        {1, 1},   {1, 0},  {1, -1}, {0, -1}};
      int code = 0;
      for (int b = 0; b < 8; ++b)
        code = (code << 1) |
               (big(r + off[b][0], c + off[b][1]) >= big(r, c) ? 1 : 0);
      codes.push_back(static_cast<double>(code));
    }
  const auto m = moments_oracle(codes);
  CHECK(fb[11] == doctest::Approx(m.mean).epsilon(1e-10));
  CHECK(fb[12] == doctest::Approx(m.var).epsilon(1e-10));
  CHECK(fb[13] == doctest::Approx(m.skew).epsilon(1e-10));
  CHECK(fb[14] == doctest::Approx(m.kurt).epsilon(1e-10));
}

TEST_CASE("assemble: groups land in their catalog segments") {
  Event ev;
  ev.crop = random_vector(410, 70);
  ev.tfd_patch = random_patch(85, 410, 71);
  FeatureVector fv = assemble_features(ev, 2048.0, 1.0);
  REQUIRE(fv.values.size() == 43);
  CHECK(fv.values.segment(0, 12) == time_features(ev.crop));
  CHECK(fv.values.segment(12, 6) == freq_features(ev.crop, 2048.0, 1.0));
  CHECK(fv.values.segment(18, 10) == tf_features(ev.tfd_patch));
  CHECK(fv.values.segment(28, 15) == image_features(ev.tfd_patch));
  CHECK(fv.degenerate.empty());
}

TEST_CASE("assemble: degenerate names collect across groups") {
  Event ev;
  ev.crop = VectorXd::Zero(410);
  ev.tfd_patch = MatrixXd::Zero(16, 410);
  FeatureVector fv = assemble_features(ev, 2048.0, 1.0);
  for (const char* name : {"t_skewness", "tf_shannon_entropy", "img_area", "lbp_skewness"})
    CHECK(std::count(fv.degenerate.begin(), fv.degenerate.end(), name) == 1);
  // imputed values are zeros, not NaNs
  CHECK(fv.values.allFinite());
}

TEST_CASE("zscore: unit columns, constant columns map to zero") {
  MatrixXd x = random_patch(50, 4, 80);
  x.col(2).setConstant(3.3);
  ZScore z = zscore(x);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(std::abs(z.z.col(j).mean()) < 1e-12);
    const double sd = std::sqrt(z.z.col(j).squaredNorm() / 50.0 -
                                z.z.col(j).mean() * z.z.col(j).mean());
    if (j == 2)
      CHECK(z.z.col(j).cwiseAbs().maxCoeff() == 0.0);
    else
      CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(zscore(MatrixXd::Zero(1, 3)), ConfigError);
}

TEST_CASE("moment conventions: population variance, non-excess kurtosis") {
  // N(0,1) draws: kurtosis should approach 3 (not 0)
  VectorXd x = random_vector(200000, 90);
  std::vector<double> v(x.data(), x.data() + x.size());
  const auto m = moments_oracle(v);
  VectorXd f = time_features(x);
  CHECK(f[3] == doctest::Approx(m.kurt).epsilon(1e-10));
  CHECK(f[3] == doctest::Approx(3.0).epsilon(0.05));
  CHECK(f[1] == doctest::Approx(1.0).epsilon(0.05));
}
