#include "wpcn/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace wpcn::conic {

// ---------------------------------------------------------------------------
// LinExpr

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  c0 += o.c0;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  c0 -= o.c0;
  for (const auto& t : o.terms) terms.push_back({t.var, -t.coef});
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  c0 *= s;
  for (auto& t : terms) t.coef *= s;
  return *this;
}

void LinExpr::compress() {
  std::sort(terms.begin(), terms.end(),
            [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
  std::vector<LinTerm> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().var == t.var)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const LinTerm& t) { return t.coef == 0.0; }),
            out.end());
  terms = std::move(out);
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }

// ---------------------------------------------------------------------------
// MatVar

int MatVar::coord(int i, int j, int part) const {
  if (i > j) throw std::logic_error("coordinate addressed below the diagonal");
  if (i == j && part != 0) throw std::logic_error("diagonal has no imaginary part");
  if (!complex_valued && part != 0)
    throw std::logic_error("real block has no imaginary coordinates");
  // Column-major packing over the upper triangle; column j holds j off-diagonal
  // rows before its diagonal entry.
  const int per_off = complex_valued ? 2 : 1;
  const int before_col = j * (j - 1) / 2 * per_off + j;  // coords in columns < j
  if (i == j) return base + before_col + j * per_off;
  return base + before_col + i * per_off + part;
}

LinExpr MatVar::entry_re(int i, int j) const {
  if (i > j) std::swap(i, j);
  return LinExpr::variable(coord(i, j, 0));
}

LinExpr MatVar::entry_im(int i, int j) const {
  if (!complex_valued) return LinExpr(0.0);
  if (i == j) return LinExpr(0.0);
  if (i > j) return -1.0 * LinExpr::variable(coord(j, i, 1)) + LinExpr(0.0);
  return LinExpr::variable(coord(i, j, 1));
}

LinExpr MatVar::trace() const {
  LinExpr e;
  for (int i = 0; i < dim; ++i) e += LinExpr::variable(coord(i, i, 0));
  return e;
}

LinExpr MatVar::trace_product(const MatC& a) const {
  if (a.rows() != dim || a.cols() != dim)
    throw std::invalid_argument("trace_product dimension mismatch");
  LinExpr e;
  for (int j = 0; j < dim; ++j) {
    e += a(j, j).real() * LinExpr::variable(coord(j, j, 0));
    for (int i = 0; i < j; ++i) {
      const cxd aij = a(i, j);
      if (aij.real() != 0.0)
        e += 2.0 * aij.real() * LinExpr::variable(coord(i, j, 0));
      if (complex_valued && aij.imag() != 0.0)
        e += 2.0 * aij.imag() * LinExpr::variable(coord(i, j, 1));
    }
  }
  e.compress();
  return e;
}

// ---------------------------------------------------------------------------
// MatExpr

MatExpr MatExpr::zero(int dim) {
  MatExpr e;
  e.dim = dim;
  e.f0 = MatC::Zero(dim, dim);
  return e;
}

MatExpr MatExpr::constant(const MatC& a) {
  MatExpr e;
  e.dim = static_cast<int>(a.rows());
  e.f0 = a;
  return e;
}

MatExpr MatExpr::from_var(const MatVar& v) {
  MatExpr e = zero(v.dim);
  for (int j = 0; j < v.dim; ++j) {
    {
      MatC b = MatC::Zero(v.dim, v.dim);
      b(j, j) = 1.0;
      e.coef[v.coord(j, j, 0)] = b;
    }
    for (int i = 0; i < j; ++i) {
      MatC br = MatC::Zero(v.dim, v.dim);
      br(i, j) = 1.0;
      br(j, i) = 1.0;
      e.coef[v.coord(i, j, 0)] = br;
      if (v.complex_valued) {
        MatC bi = MatC::Zero(v.dim, v.dim);
        bi(i, j) = cxd(0.0, 1.0);
        bi(j, i) = cxd(0.0, -1.0);
        e.coef[v.coord(i, j, 1)] = bi;
      }
    }
  }
  return e;
}

MatExpr MatExpr::scaled_identity(int dim, const LinExpr& e) {
  MatExpr m = zero(dim);
  m.f0 = e.c0 * MatC::Identity(dim, dim);
  for (const auto& t : e.terms) {
    auto it = m.coef.find(t.var);
    if (it == m.coef.end())
      m.coef[t.var] = t.coef * MatC::Identity(dim, dim);
    else
      it->second += t.coef * MatC::Identity(dim, dim);
  }
  return m;
}

MatExpr& MatExpr::operator+=(const MatExpr& o) {
  if (dim != o.dim) throw std::invalid_argument("matrix expression dimension mismatch");
  f0 += o.f0;
  for (const auto& [v, m] : o.coef) {
    auto it = coef.find(v);
    if (it == coef.end())
      coef[v] = m;
    else
      it->second += m;
  }
  return *this;
}

MatExpr& MatExpr::operator-=(const MatExpr& o) {
  if (dim != o.dim) throw std::invalid_argument("matrix expression dimension mismatch");
  f0 -= o.f0;
  for (const auto& [v, m] : o.coef) {
    auto it = coef.find(v);
    if (it == coef.end())
      coef[v] = -m;
    else
      it->second -= m;
  }
  return *this;
}

MatExpr& MatExpr::operator*=(double s) {
  f0 *= s;
  for (auto& [v, m] : coef) m *= s;
  return *this;
}

MatExpr MatExpr::congruence(const MatC& r) const {
  if (r.rows() != dim) throw std::invalid_argument("congruence dimension mismatch");
  MatExpr e;
  e.dim = static_cast<int>(r.cols());
  e.f0 = r.adjoint() * f0 * r;
  for (const auto& [v, m] : coef) e.coef[v] = r.adjoint() * m * r;
  return e;
}

MatExpr MatExpr::blkdiag(const MatExpr& a, const MatExpr& b) {
  MatExpr e = zero(a.dim + b.dim);
  e.f0.topLeftCorner(a.dim, a.dim) = a.f0;
  e.f0.bottomRightCorner(b.dim, b.dim) = b.f0;
  auto place = [&](const std::map<int, MatC>& src, int row0, int d) {
    for (const auto& [v, m] : src) {
      auto it = e.coef.find(v);
      if (it == e.coef.end()) it = e.coef.emplace(v, MatC::Zero(e.dim, e.dim)).first;
      it->second.block(row0, row0, d, d) += m;
    }
  };
  place(a.coef, 0, a.dim);
  place(b.coef, a.dim, b.dim);
  return e;
}

MatExpr operator+(MatExpr a, const MatExpr& b) { return a += b; }
MatExpr operator-(MatExpr a, const MatExpr& b) { return a -= b; }
MatExpr operator*(double s, MatExpr a) { return a *= s; }

// ---------------------------------------------------------------------------
// Program

int Program::add_scalar(const std::string& name, bool nonneg) {
  names_.push_back(name);
  nonneg_.push_back(nonneg);
  return static_cast<int>(names_.size()) - 1;
}

MatVar Program::add_hermitian_psd(const std::string& name, int dim, bool complex_valued) {
  const MatVar v = add_hermitian_free(name, dim, complex_valued);
  add_psd(MatExpr::from_var(v));
  return v;
}

MatVar Program::add_hermitian_free(const std::string& name, int dim, bool complex_valued) {
  if (dim < 1) throw std::invalid_argument("matrix variable needs positive dimension");
  MatVar v;
  v.dim = dim;
  v.complex_valued = complex_valued;
  v.base = static_cast<int>(names_.size());
  for (int c = 0; c < v.coords(); ++c)
    add_scalar(name + "[" + std::to_string(c) + "]", false);
  return v;
}

void Program::add_linear(const LinExpr& expr, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("empty linear constraint interval");
  LinCon c;
  c.expr = expr;
  c.expr.compress();
  c.lo = lo;
  c.hi = hi;
  linear_.push_back(std::move(c));
}

void Program::add_psd(const MatExpr& expr) {
  if (expr.dim < 1) throw std::invalid_argument("empty matrix inequality");
  psd_.push_back({expr});
}

void Program::add_power_bound(const LinExpr& t, const LinExpr& x, double c, double q,
                              double x_hi) {
  if (c < 0.0) throw std::invalid_argument("power bound needs nonnegative coefficient");
  if (q < 1.0) throw std::invalid_argument("power bound needs exponent >= 1");
  if (!(x_hi > 0.0)) throw std::invalid_argument("power bound needs a positive range");
  // Domain rows shared by every outer approximation of the curve.
  add_linear(x, 0.0, inf);
  if (c == 0.0) {
    add_linear(t, 0.0, inf);
    return;
  }
  if (q == 1.0) {
    add_linear(t - c * x, 0.0, inf);  // exact: the curve is already linear
    return;
  }
  add_linear(t, 0.0, inf);
  PowerBound b;
  b.t = t;
  b.t.compress();
  b.x = x;
  b.x.compress();
  b.c = c;
  b.q = q;
  b.x_hi = x_hi;
  power_.push_back(std::move(b));
}

double Program::value_of(const LinExpr& e, const VecR& y) const {
  double v = e.c0;
  for (const auto& t : e.terms) v += t.coef * y[t.var];
  return v;
}

MatC Program::value_of(const MatVar& v, const VecR& y) const {
  MatC m(v.dim, v.dim);
  for (int j = 0; j < v.dim; ++j) {
    m(j, j) = y[v.coord(j, j, 0)];
    for (int i = 0; i < j; ++i) {
      const double re = y[v.coord(i, j, 0)];
      const double im = v.complex_valued ? y[v.coord(i, j, 1)] : 0.0;
      m(i, j) = cxd(re, im);
      m(j, i) = cxd(re, -im);
    }
  }
  return m;
}

namespace {

// Tangent of c*x^q at x0: c*x0^q + c*q*x0^(q-1) * (x - x0) <= t.
LinExpr tangent_row(const Program::PowerBound& b, double x0) {
  const double slope = b.c * b.q * std::pow(x0, b.q - 1.0);
  const double offset = b.c * std::pow(x0, b.q) - slope * x0;
  LinExpr row = b.t;
  row -= slope * LinExpr(b.x);
  row.c0 -= offset;
  row.compress();
  return row;  // row >= 0
}

}  // namespace

Solution Program::solve(const SolverOptions& opts) const {
  const auto t_start = std::chrono::steady_clock::now();

  // Seed each curve with a handful of log-spaced tangents across its range.
  std::vector<LinExpr> rows;
  for (const auto& b : power_) {
    const double lo = b.x_hi * 1e-6;
    const int n0 = 8;
    for (int i = 0; i < n0; ++i) {
      const double x0 = lo * std::pow(b.x_hi / lo, static_cast<double>(i) / (n0 - 1));
      rows.push_back(tangent_row(b, x0));
    }
  }

  Solution sol;
  int total_iters = 0;
  for (int round = 0;; ++round) {
    sol = solve_once(*this, rows, opts);
    total_iters += sol.iterations;
    sol.cut_rounds = round;
    if (sol.status != SolveStatus::optimal || power_.empty()) break;

    // Refine each violated curve at (and bracketing) the current optimizer.
    double worst = 0.0;
    std::size_t added = 0;
    for (const auto& b : power_) {
      const double xv = std::max(0.0, value_of(b.x, sol.y));
      const double tv = value_of(b.t, sol.y);
      const double curve = b.c * std::pow(xv, b.q);
      const double viol = curve - tv;
      const double scale = 1.0 + std::abs(curve) + std::abs(tv);
      worst = std::max(worst, viol / scale);
      if (viol > opts.cut_tol * scale) {
        rows.push_back(tangent_row(b, xv));
        // A flanking cut accelerates convergence when the optimum slides.
        rows.push_back(tangent_row(b, std::min(b.x_hi, xv * 1.12 + 1e-12)));
        added += 2;
      }
    }
    sol.max_power_violation = std::max(0.0, worst);
    if (added == 0 || round >= opts.cut_rounds) {
      if (added != 0 && worst > 1e-4) sol.status = SolveStatus::numerical_failure;
      break;
    }
  }
  sol.iterations = total_iters;
  sol.solve_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t_start)
                     .count();
  return sol;
}

}  // namespace wpcn::conic
