// Unit conversions and deterministic random sampling shared by all modules.
//
// Everything internal is SI (watts, joules, seconds); dBm/dBi appear only at
// the configuration boundary. Random draws avoid std::<distribution> types on
// purpose: their output is implementation-defined, and experiment replay
// requires bit-identical streams for a given seed on any standard library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace wpcn {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double dbi_to_linear(double dbi) { return std::pow(10.0, dbi / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline constexpr double speed_of_light = 299792458.0;

// SplitMix64 step; used to derive statistically independent child seeds from a
// master seed. The derivation rule (documented, stable):
//   child(seed, tag) = splitmix64(seed ^ (0x9E3779B97F4A7C15 * (tag + 1)))
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1)));
}

// Deterministic RNG: mt19937_64 engine + explicit Box-Muller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0, 1]: the +1 keeps log() finite in Box-Muller.
  double uniform01() {
    const std::uint64_t r = eng_();
    return static_cast<double>((r >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  // Standard circularly-symmetric complex Gaussian, E|x|^2 = 1.
  cxd cnormal() { return cxd(normal(), normal()) * M_SQRT1_2; }

  MatC cnormal_matrix(Eigen::Index rows, Eigen::Index cols) {
    MatC m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cnormal();
    return m;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Numerically safe logistic sigmoid (no overflow for |x| up to ~1e308).
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline bool is_hermitian(const MatC& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * (1.0 + a.cwiseAbs().maxCoeff());
}

// Smallest eigenvalue of a Hermitian matrix (self-adjoint path).
inline double min_eigenvalue(const MatC& a) {
  Eigen::SelfAdjointEigenSolver<MatC> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace wpcn
