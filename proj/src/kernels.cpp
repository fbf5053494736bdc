#include "nsmc/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace nsmc {

namespace {

ConvectionTensor::Csr group_by(const std::vector<ConvectionTerm>& terms, int n, int ConvectionTerm::*key) {
  ConvectionTensor::Csr csr;
  csr.ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& t : terms) ++csr.ptr[static_cast<std::size_t>(t.*key) + 1];
  for (int k = 0; k < n; ++k) csr.ptr[k + 1] += csr.ptr[k];
  csr.terms.resize(terms.size());
  std::vector<int> fill(csr.ptr.begin(), csr.ptr.end() - 1);
  // Stable: terms keep their construction order within each group.
  for (const auto& t : terms) csr.terms[fill[t.*key]++] = t;
  return csr;
}

std::atomic<kernels::Backend> g_backend{kernels::Backend::omp};

}  // namespace

ConvectionTensor::ConvectionTensor(int n_dofs, std::vector<ConvectionTerm> terms)
    : n_dofs_(n_dofs), by_out_(std::move(terms)) {
  for (const auto& t : by_out_) {
    if (t.out < 0 || t.out >= n_dofs || t.adv < 0 || t.adv >= n_dofs || t.val < 0 || t.val >= n_dofs) {
      throw std::invalid_argument("ConvectionTensor: term index out of range");
    }
  }
  by_out_csr_ = group_by(by_out_, n_dofs, &ConvectionTerm::out);
  by_adv_csr_ = group_by(by_out_, n_dofs, &ConvectionTerm::adv);
  by_val_csr_ = group_by(by_out_, n_dofs, &ConvectionTerm::val);
}

namespace kernels {

void set_backend(Backend backend) { g_backend.store(backend); }
Backend backend() { return g_backend.load(); }

namespace {

// Row bodies shared by both backends so the per-row arithmetic is identical.
inline double convect_row(const ConvectionTensor::Csr& c, int row, const double* w, const double* y) {
  double s = 0.0;
  for (int k = c.ptr[row]; k < c.ptr[row + 1]; ++k) {
    const ConvectionTerm& t = c.terms[k];
    s += t.coef * w[t.adv] * y[t.val];
  }
  return s;
}

inline double jacobian_row(const ConvectionTensor::Csr& c, int row, const double* ybar, const double* z) {
  double s = 0.0;
  for (int k = c.ptr[row]; k < c.ptr[row + 1]; ++k) {
    const ConvectionTerm& t = c.terms[k];
    s += t.coef * (z[t.adv] * ybar[t.val] + ybar[t.adv] * z[t.val]);
  }
  return s;
}

inline double jacobian_transpose_row(const ConvectionTensor& tensor, int row, const double* ybar,
                                     const double* x) {
  const auto& ba = tensor.by_adv();
  const auto& bv = tensor.by_val();
  double s = 0.0;
  for (int k = ba.ptr[row]; k < ba.ptr[row + 1]; ++k) {
    const ConvectionTerm& t = ba.terms[k];
    s += t.coef * ybar[t.val] * x[t.out];
  }
  for (int k = bv.ptr[row]; k < bv.ptr[row + 1]; ++k) {
    const ConvectionTerm& t = bv.terms[k];
    s += t.coef * ybar[t.adv] * x[t.out];
  }
  return s;
}

void check_sizes(const ConvectionTensor& t, std::size_t a, std::size_t b, std::size_t out) {
  const auto n = static_cast<std::size_t>(t.n_dofs());
  if (a != n || b != n || out != n) throw std::invalid_argument("convection kernel: size mismatch");
}

}  // namespace

namespace serial {

void convect(const ConvectionTensor& t, std::span<const double> w, std::span<const double> y,
             std::span<double> out) {
  check_sizes(t, w.size(), y.size(), out.size());
  for (int r = 0; r < t.n_dofs(); ++r) out[r] = convect_row(t.by_out(), r, w.data(), y.data());
}

void convect_jacobian(const ConvectionTensor& t, std::span<const double> ybar, std::span<const double> z,
                      std::span<double> out) {
  check_sizes(t, ybar.size(), z.size(), out.size());
  for (int r = 0; r < t.n_dofs(); ++r) out[r] = jacobian_row(t.by_out(), r, ybar.data(), z.data());
}

void convect_jacobian_transpose(const ConvectionTensor& t, std::span<const double> ybar,
                                std::span<const double> x, std::span<double> out) {
  check_sizes(t, ybar.size(), x.size(), out.size());
  for (int r = 0; r < t.n_dofs(); ++r) out[r] = jacobian_transpose_row(t, r, ybar.data(), x.data());
}

}  // namespace serial

namespace omp {

void convect(const ConvectionTensor& t, std::span<const double> w, std::span<const double> y,
             std::span<double> out) {
  check_sizes(t, w.size(), y.size(), out.size());
  const int n = t.n_dofs();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) out[r] = convect_row(t.by_out(), r, w.data(), y.data());
}

void convect_jacobian(const ConvectionTensor& t, std::span<const double> ybar, std::span<const double> z,
                      std::span<double> out) {
  check_sizes(t, ybar.size(), z.size(), out.size());
  const int n = t.n_dofs();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) out[r] = jacobian_row(t.by_out(), r, ybar.data(), z.data());
}

void convect_jacobian_transpose(const ConvectionTensor& t, std::span<const double> ybar,
                                std::span<const double> x, std::span<double> out) {
  check_sizes(t, ybar.size(), x.size(), out.size());
  const int n = t.n_dofs();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) out[r] = jacobian_transpose_row(t, r, ybar.data(), x.data());
}

}  // namespace omp

void convect(const ConvectionTensor& t, std::span<const double> w, std::span<const double> y,
             std::span<double> out) {
  backend() == Backend::omp ? omp::convect(t, w, y, out) : serial::convect(t, w, y, out);
}

void convect_jacobian(const ConvectionTensor& t, std::span<const double> ybar, std::span<const double> z,
                      std::span<double> out) {
  backend() == Backend::omp ? omp::convect_jacobian(t, ybar, z, out)
                            : serial::convect_jacobian(t, ybar, z, out);
}

void convect_jacobian_transpose(const ConvectionTensor& t, std::span<const double> ybar,
                                std::span<const double> x, std::span<double> out) {
  backend() == Backend::omp ? omp::convect_jacobian_transpose(t, ybar, x, out)
                            : serial::convect_jacobian_transpose(t, ybar, x, out);
}

namespace {
std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view_out(Eigen::VectorXd& v, Eigen::Index n) {
  v.resize(n);
  return {v.data(), static_cast<std::size_t>(n)};
}
}  // namespace

void convect(const ConvectionTensor& t, const Eigen::VectorXd& w, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
  convect(t, view(w), view(y), view_out(out, t.n_dofs()));
}

void convect_jacobian(const ConvectionTensor& t, const Eigen::VectorXd& ybar, const Eigen::VectorXd& z,
                      Eigen::VectorXd& out) {
  convect_jacobian(t, view(ybar), view(z), view_out(out, t.n_dofs()));
}

void convect_jacobian_transpose(const ConvectionTensor& t, const Eigen::VectorXd& ybar, const Eigen::VectorXd& x,
                                Eigen::VectorXd& out) {
  convect_jacobian_transpose(t, view(ybar), view(x), view_out(out, t.n_dofs()));
}

ArgMax abs_argmax(std::span<const double> values, std::span<const int> indices) {
  ArgMax best;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double v = std::abs(values[indices[k]]);
    if (v > best.value) best = {v, static_cast<int>(k)};
  }
  return best;
}

}  // namespace kernels
}  // namespace nsmc
