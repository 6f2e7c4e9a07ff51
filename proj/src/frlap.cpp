#include "fracdiff/frlap.hpp"

#include <cmath>
#include <future>
#include <thread>
#include <vector>

#include "fracdiff/gammafn.hpp"
#include "fracdiff/quadrature.hpp"

namespace fracdiff {

double power_constant(double alpha, FracOrder s) {
  if (alpha <= 0.0) throw OutOfRange("power_constant: alpha must be positive");
  if (alpha == 2.0 * s.s) throw OutOfRange("power_constant: alpha = 2s excluded");
  const double num[] = {0.5 * (1.0 + alpha), 0.5 * (2.0 * s.s - alpha)};
  const double den[] = {0.5 * (1.0 + alpha - 2.0 * s.s), -0.5 * alpha};
  return std::pow(2.0, 2.0 * s.s) * gammafn::gamma_ratio(num, den);
}

double log_constant(FracOrder s) {
  const double num[] = {0.5, s.s};
  const double den[] = {0.5 * (3.0 - 2.0 * s.s)};
  return std::pow(2.0, 2.0 * s.s - 2.0) * (2.0 * s.s - 1.0) *
         gammafn::gamma_ratio(num, den);
}

VssConstants vss_constant(FracOrder s, double n) {
  if (!(s.s > 0.5 && n >= 0.0 && n < 2.0 * s.s - 1.0)) {
    throw OutOfRange("vss_constant: requires s > 1/2 and 0 <= n < 2s - 1");
  }
  VssConstants out;
  out.K = (n > 0.0) ? power_constant(2.0 * s.s * n / (1.0 + n), s) : log_constant(s);
  out.C = std::pow((1.0 + n) * out.K, 1.0 / (1.0 + n));
  return out;
}

double kernel_normalization(FracOrder s) {
  // c(1, s) = 4^s s Gamma(1/2 + s) / (sqrt(pi) Gamma(1 - s))
  return std::pow(4.0, s.s) * s.s * std::tgamma(0.5 + s.s) /
         (std::sqrt(M_PI) * std::tgamma(1.0 - s.s));
}

namespace {

// integral of z^(-1-2s) over [k h, (k+1) h]
double cell_a(double h, double k, double two_s) {
  return (std::pow(k, -two_s) - std::pow(k + 1.0, -two_s)) *
         std::pow(h, -two_s) / two_s;
}

// integral of z^(-2s) over [k h, (k+1) h]
double cell_b(double h, double k, double two_s) {
  if (two_s == 1.0) return std::log((k + 1.0) / k);
  return std::pow(h, 1.0 - two_s) *
         (std::pow(k + 1.0, 1.0 - two_s) - std::pow(k, 1.0 - two_s)) /
         (1.0 - two_s);
}

}  // namespace

FrLapOperator::FrLapOperator(const Grid1D& grid, FracOrder s)
    : grid_(grid), s_(s), c_(kernel_normalization(s)) {
  const int n = grid_.n_points;
  const double h = grid_.spacing;
  const double two_s = 2.0 * s_.s;

  // per-distance cell integrals for the piecewise-linear part
  Vector a(n), j1(n);
  for (int k = 1; k < n; ++k) {
    const double ak = cell_a(h, k, two_s);
    const double bk = cell_b(h, k, two_s);
    a[k] = ak;
    j1[k] = (bk - k * h * ak) / h;  // weight of the right node of cell k
  }

  w_ = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // right-hand cells [x_{i+k}, x_{i+k+1}], k = 1 .. n-2-i
    for (int k = 1; k + i + 1 < n; ++k) {
      w_(i, i) += a[k];
      w_(i, i + k) -= a[k] - j1[k];
      w_(i, i + k + 1) -= j1[k];
    }
    // left-hand cells, mirrored
    for (int k = 1; k + 1 <= i; ++k) {
      w_(i, i) += a[k];
      w_(i, i - k) -= a[k] - j1[k];
      w_(i, i - k - 1) -= j1[k];
    }
  }

  // principal-value cell: quadratic interpolation through the three
  // central nodes; the odd term vanishes, the even term integrates to
  // -v'' h^(2-2s)/(2-2s)
  const double corr = std::pow(h, -two_s) / (2.0 - two_s);
  for (int i = 0; i < n; ++i) {
    w_(i, i) += 2.0 * corr;
    if (i > 0) w_(i, i - 1) -= corr;
    if (i + 1 < n) w_(i, i + 1) -= corr;
  }
  edge_lo_ = -c_ * corr;  // multiplies tail(-L-h) in row 0
  edge_hi_ = -c_ * corr;  // multiplies tail(+L+h) in row n-1

  w_ *= c_;

  // zeroth exterior moments; rows 0 and n-1 have their singular cell
  // protruding past the window, so their near-side exterior region starts
  // one spacing further out
  const double L = grid_.half_width;
  z0_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double dl = (i == 0) ? h : grid_.x(i) + L;
    const double dr = (i == n - 1) ? h : L - grid_.x(i);
    z0_[i] = c_ * (std::pow(dl, -two_s) + std::pow(dr, -two_s)) / two_s;
  }

  // symmetrize (the truncated interpolation is asymmetric only in the
  // last column of each row, at kernel values of size O(L^(-1-2s))), then
  // restore exact annihilation of constants through the diagonal
  w_ = 0.5 * (w_ + w_.transpose()).eval();
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += w_(i, j);
    double edge = 0.0;
    if (i == 0) edge = edge_lo_;
    if (i == n - 1) edge += edge_hi_;
    w_(i, i) = -off - edge;
  }
}

Matrix FrLapOperator::dense_matrix() const {
  Matrix m = w_;
  m.diagonal() += z0_;
  return m;
}

double FrLapOperator::exterior_integral(
    int row, const std::function<double(double)>& tail) const {
  const double L = grid_.half_width;
  const double h = grid_.spacing;
  const double x = grid_.x(row);
  const double p = 1.0 + 2.0 * s_.s;

  // Each side is int_d^inf g(w) w^(-p) dw in the distance variable
  // w = |y - x|, where d can be as small as h for rows near the boundary.
  // Octave panels from the singular end, each integrated to a tolerance
  // scaled by its own kernel mass, keep the cost bounded; the remainder is
  // mapped to a bounded interval by w = W t^(-3).
  auto side = [&](double d, const std::function<double(double)>& g) {
    double total = 0.0;
    double a = d;
    const double w_far = std::max(8.0 * d, 16.0 * L);
    while (a < w_far) {
      const double b = std::min(8.0 * a, w_far);
      const double mass =
          (std::pow(a, 1.0 - p) - std::pow(b, 1.0 - p)) / (p - 1.0);
      const double scale =
          std::max(1.0, std::fabs(g(std::sqrt(a * b))) * mass);
      total += quad::integrate(
                   [&](double w) { return g(w) * std::pow(w, -p); }, a, b,
                   tail_tol_ * scale)
                   .value;
      a = b;
    }
    auto far = [&](double t) {
      const double w = a * std::pow(t, -3.0);
      return g(w) * std::pow(w, -p) * 3.0 * a * std::pow(t, -4.0);
    };
    total += quad::integrate(far, 0.0, 1.0, tail_tol_).value;
    return total;
  };

  const double yr = (row == grid_.n_points - 1) ? L + h : L;
  const double yl = (row == 0) ? L + h : L;
  double out = side(yr - x, [&](double w) { return tail(x + w); });
  out += side(yl + x, [&](double w) { return tail(x - w); });
  return c_ * out;
}

Vector FrLapOperator::tail_contribution(
    const std::function<double(double)>& tail) const {
  const int n = grid_.n_points;
  const double L = grid_.half_width;
  const double h = grid_.spacing;
  Vector out = Vector::Zero(n);
  if (!tail) return out;
  // rows are independent adaptive quadratures; split them across threads
  const int workers = std::max(
      1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < n; i += workers)
        out[i] = -exterior_integral(i, tail);
    }));
  }
  for (auto& j : jobs) j.get();
  out[0] += edge_lo_ * tail(-L - h);
  out[n - 1] += edge_hi_ * tail(L + h);
  return out;
}

Vector FrLapOperator::apply_values(
    const Vector& v, const std::function<double(double)>& tail) const {
  if (v.size() != grid_.n_points) throw GridMismatch("apply_values: size mismatch");
  Vector out = w_ * v;
  out.array() += z0_.array() * v.array();
  if (tail) out += tail_contribution(tail);
  return out;
}

Field FrLapOperator::apply(const Field& f) const {
  if (f.grid != grid_) throw GridMismatch("apply: field grid differs from operator grid");
  std::function<double(double)> tail;
  if (f.tail) {
    const TailModel t = *f.tail;
    tail = [t](double y) { return t.value(y); };
  }
  return Field(grid_, apply_values(f.values, tail));
}

}  // namespace fracdiff
