#pragma once

/// @file kernels.hpp
/// @brief Data-parallel inner loops. Every kernel has a serial reference
/// implementation and an OpenMP one; both visit each output in the same
/// term order, so their results are bitwise identical for any thread count.

#include <Eigen/Core>

#include <span>
#include <vector>

namespace nsmc {

/// One product term of the discrete convection N(w; y):
///   N(w; y)[out] += coef * w[adv] * y[val].
struct ConvectionTerm {
  int out = 0;
  int adv = 0;
  int val = 0;
  double coef = 0.0;
};

/// Bilinear convection operator of the MAC grid in divergence form, stored
/// three times: grouped by output, by advecting index and by advected index.
/// The grouped copies make the Jacobian and its transpose row-parallel.
class ConvectionTensor {
 public:
  ConvectionTensor(int n_dofs, std::vector<ConvectionTerm> terms);

  int n_dofs() const { return n_dofs_; }
  std::size_t n_terms() const { return by_out_.size(); }

  struct Csr {
    std::vector<int> ptr;
    std::vector<ConvectionTerm> terms;
  };
  const Csr& by_out() const { return by_out_csr_; }
  const Csr& by_adv() const { return by_adv_csr_; }
  const Csr& by_val() const { return by_val_csr_; }

 private:
  int n_dofs_ = 0;
  std::vector<ConvectionTerm> by_out_;
  Csr by_out_csr_;
  Csr by_adv_csr_;
  Csr by_val_csr_;
};

namespace kernels {

enum class Backend { serial, omp };

/// Process-wide backend used by the solvers; defaults to omp.
void set_backend(Backend backend);
Backend backend();

/// out = N(w; y)
void convect(const ConvectionTensor& t, std::span<const double> w, std::span<const double> y,
             std::span<double> out);
/// out = N(z; ybar) + N(ybar; z)
void convect_jacobian(const ConvectionTensor& t, std::span<const double> ybar,
                      std::span<const double> z, std::span<double> out);
/// out = (d/dz [N(z; ybar) + N(ybar; z)])^T x
void convect_jacobian_transpose(const ConvectionTensor& t, std::span<const double> ybar,
                                std::span<const double> x, std::span<double> out);

/// Eigen overloads of the dispatching kernels; `out` is resized.
void convect(const ConvectionTensor& t, const Eigen::VectorXd& w, const Eigen::VectorXd& y, Eigen::VectorXd& out);
void convect_jacobian(const ConvectionTensor& t, const Eigen::VectorXd& ybar, const Eigen::VectorXd& z,
                      Eigen::VectorXd& out);
void convect_jacobian_transpose(const ConvectionTensor& t, const Eigen::VectorXd& ybar, const Eigen::VectorXd& x,
                                Eigen::VectorXd& out);

/// Index of the first maximum of |values[k]| over the listed indices, plus the value.
struct ArgMax {
  double value = 0.0;
  int position = 0;  ///< position within `indices`
};
ArgMax abs_argmax(std::span<const double> values, std::span<const int> indices);

namespace serial {
void convect(const ConvectionTensor& t, std::span<const double> w, std::span<const double> y,
             std::span<double> out);
void convect_jacobian(const ConvectionTensor& t, std::span<const double> ybar,
                      std::span<const double> z, std::span<double> out);
void convect_jacobian_transpose(const ConvectionTensor& t, std::span<const double> ybar,
                                std::span<const double> x, std::span<double> out);
}  // namespace serial

namespace omp {
void convect(const ConvectionTensor& t, std::span<const double> w, std::span<const double> y,
             std::span<double> out);
void convect_jacobian(const ConvectionTensor& t, std::span<const double> ybar,
                      std::span<const double> z, std::span<double> out);
void convect_jacobian_transpose(const ConvectionTensor& t, std::span<const double> ybar,
                                std::span<const double> x, std::span<double> out);
}  // namespace omp

}  // namespace kernels
}  // namespace nsmc
