// Small conic-optimization layer: linear objectives over scalar variables,
// Hermitian-PSD matrix variables, linear (in)equalities, linear matrix
// inequalities, and convex power bounds t >= c * x^q.
//
// Matrix inequalities are stored as F0 + sum_i y_i * F_i >= 0 over the packed
// real coordinates y. Complex Hermitian blocks are embedded as real symmetric
// blocks of twice the dimension at solve time; exactly-real blocks skip the
// embedding. Power bounds are enforced through an adaptively refined tangent
// outer approximation, tightened until the optimizer satisfies the true curve.
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wpcn/types.hpp"
#include "wpcn/util.hpp"

namespace wpcn::conic {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

// c0 + sum_i coef_i * y_i
struct LinExpr {
  double c0 = 0.0;
  std::vector<LinTerm> terms;

  LinExpr() = default;
  LinExpr(double constant) : c0(constant) {}  // NOLINT: implicit by design
  static LinExpr variable(int var, double coef = 1.0) {
    LinExpr e;
    e.terms.push_back({var, coef});
    return e;
  }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  void compress();  // merge duplicate vars, drop exact zeros
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);

// Handle to a Hermitian PSD matrix variable. Coordinates are packed per upper
// column (j), row i <= j: the diagonal coordinate holds X_ii; off-diagonal
// pairs hold (Re X_ij, Im X_ij).
struct MatVar {
  int dim = 0;
  int base = -1;  // first scalar coordinate
  bool complex_valued = true;

  int coords() const { return complex_valued ? dim * dim : dim * (dim + 1) / 2; }
  // part: 0 = real, 1 = imaginary (i < j only)
  int coord(int i, int j, int part) const;

  LinExpr entry_re(int i, int j) const;
  LinExpr entry_im(int i, int j) const;
  LinExpr diag(int i) const { return entry_re(i, i); }
  LinExpr trace() const;
  // Tr(A X) for Hermitian A (real result, linear in the coordinates).
  LinExpr trace_product(const MatC& a) const;
};

// Hermitian-matrix-valued affine expression F0 + sum_i y_i F_i.
struct MatExpr {
  int dim = 0;
  MatC f0;                  // dim x dim Hermitian
  std::map<int, MatC> coef; // scalar var -> Hermitian coefficient

  static MatExpr zero(int dim);
  static MatExpr constant(const MatC& a);
  static MatExpr from_var(const MatVar& v);
  // expr * I_dim for a scalar affine expression
  static MatExpr scaled_identity(int dim, const LinExpr& e);

  MatExpr& operator+=(const MatExpr& o);
  MatExpr& operator-=(const MatExpr& o);
  MatExpr& operator*=(double s);
  // R^H (this) R; result dimension = R.cols()
  MatExpr congruence(const MatC& r) const;
  static MatExpr blkdiag(const MatExpr& a, const MatExpr& b);
};

MatExpr operator+(MatExpr a, const MatExpr& b);
MatExpr operator-(MatExpr a, const MatExpr& b);
MatExpr operator*(double s, MatExpr a);

struct SolverOptions {
  double tol = 1e-8;          // relative gap and residual target
  int max_iter = 200;
  double step_fraction = 0.98;
  int cut_rounds = 40;        // power-bound refinement cap
  double cut_tol = 1e-9;      // acceptable relative curve violation
  bool verbose = false;
};

struct Solution {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;
  VecR y;                      // packed coordinate values
  int iterations = 0;          // total interior-point iterations
  int cut_rounds = 0;          // tangent-refinement rounds used
  double max_psd_violation = 0.0;    // most negative LMI eigenvalue at y
  double max_linear_violation = 0.0; // largest linear-constraint violation
  double max_power_violation = 0.0;  // residual curve violation t - c x^q
  double solve_ms = 0.0;
};

class Program {
 public:
  int add_scalar(const std::string& name, bool nonneg);
  MatVar add_hermitian_psd(const std::string& name, int dim, bool complex_valued = true);
  // Same coordinate packing without the PSD membership constraint.
  MatVar add_hermitian_free(const std::string& name, int dim, bool complex_valued = true);

  // lo <= expr <= hi (use -inf / inf for one-sided; lo == hi pins the value)
  void add_linear(const LinExpr& expr, double lo, double hi);
  // expr >= 0 in the PSD order
  void add_psd(const MatExpr& expr);
  // t >= c * x^q with x >= 0, q >= 1; x_hi bounds the refinement range
  void add_power_bound(const LinExpr& t, const LinExpr& x, double c, double q,
                       double x_hi);
  void set_objective(const LinExpr& e) { objective_ = e; }

  int num_scalars() const { return static_cast<int>(nonneg_.size()); }
  const LinExpr& objective() const { return objective_; }

  Solution solve(const SolverOptions& opts = {}) const;

  // Value reconstruction at a coordinate vector.
  double value_of(const LinExpr& e, const VecR& y) const;
  MatC value_of(const MatVar& v, const VecR& y) const;

  // Serialization (bit-exact round trip; used by tests and the debug CLI).
  nlohmann::json dump() const;
  static Program restore(const nlohmann::json& j);

  // Introspection for the serializer and tests.
  struct LinCon {
    LinExpr expr;
    double lo = -inf;
    double hi = inf;
  };
  struct PsdCon {
    MatExpr expr;
  };
  struct PowerBound {
    LinExpr t;
    LinExpr x;
    double c = 0.0;
    double q = 1.0;
    double x_hi = 1.0;
  };
  const std::vector<LinCon>& linear_constraints() const { return linear_; }
  const std::vector<PsdCon>& psd_constraints() const { return psd_; }
  const std::vector<PowerBound>& power_bounds() const { return power_; }
  const std::vector<std::string>& names() const { return names_; }
  bool scalar_nonneg(int i) const { return nonneg_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<std::string> names_;
  std::vector<bool> nonneg_;
  LinExpr objective_;
  std::vector<LinCon> linear_;
  std::vector<PsdCon> psd_;
  std::vector<PowerBound> power_;
};

// One interior-point run on the current relaxation (no tangent refinement);
// exposed for the solver's own tests.
Solution solve_once(const Program& p, const std::vector<LinExpr>& extra_rows,
                    const SolverOptions& opts);

}  // namespace wpcn::conic
