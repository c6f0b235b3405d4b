#pragma once

#include <cstddef>
#include <vector>

namespace harness {

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);  // unbiased, n-1

// Standard error of the sample variance by delete-one jackknife.
double variance_stderr_jackknife(const std::vector<double>& xs);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

// Sample covariance matrix (rows = replicas, cols = coordinates) plus
// delete-one jackknife standard errors per entry. Both outputs are P x P,
// row-major.
struct CovMatrix {
  std::size_t dim = 0;
  std::vector<double> cov;
  std::vector<double> stderr_;
  double& at(std::vector<double>& m, std::size_t i, std::size_t j) { return m[i * dim + j]; }
  double cov_at(std::size_t i, std::size_t j) const { return cov[i * dim + j]; }
  double stderr_at(std::size_t i, std::size_t j) const { return stderr_[i * dim + j]; }
};

CovMatrix covariance_jackknife(const std::vector<std::vector<double>>& rows);

// Eigenvalues of a small dense symmetric matrix (cyclic Jacobi).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

}  // namespace harness
