#pragma once

// From-scratch PCA (direct covariance or snapshot/Gram) and a linear
// soft-margin SVM trained by SMO-style dual coordinate ascent.

#include <array>
#include <span>
#include <string>
#include <vector>

namespace faup {

using Vector = std::vector<double>;

// Dense row-major matrix, only as much as the solvers need.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct SymmetricEigen {
    Vector values;                // descending
    std::vector<Vector> vectors;  // vectors[i] pairs with values[i], unit length
};

// Cyclic Jacobi rotations; `sym` must be symmetric.
SymmetricEigen jacobi_eigen(const Matrix& sym);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

struct PcaModel {
    Vector mean;
    std::vector<Vector> components;  // orthonormal, descending eigenvalue
    Vector eigenvalues;              // covariance eigenvalues (divided by n - 1)
    // Fewer than the requested number of non-zero-variance directions existed.
    bool truncated = false;

    std::size_t dims() const { return mean.size(); }
    std::size_t k() const { return components.size(); }
    bool operator==(const PcaModel&) const = default;
};

enum class PcaMethod {
    automatic,   // covariance when d <= n, Gram matrix otherwise
    covariance,  // d x d covariance eigenproblem
    gram,        // n x n snapshot method
};

PcaModel pca_fit(std::span<const Vector> samples, std::size_t k, PcaMethod method = PcaMethod::automatic);
Vector pca_project(const PcaModel& m, std::span<const double> x);
Vector pca_reconstruct(const PcaModel& m, std::span<const double> z);

struct SvmSample {
    Vector x;
    int y = 1;  // +1 or -1
};

struct SvmOptions {
    double tolerance = 1e-6;  // maximal KKT violation at convergence
    std::size_t max_epochs = 10000;
};

struct SvmModel {
    Vector weights;
    double bias = 0.0;
    double C = 1.0;
    int sv_count = 0;
    double margin = 0.0;  // 2 / ||w||
    std::array<std::string, 2> label_map{"+1", "-1"};  // {positive, negative}
    bool operator==(const SvmModel&) const = default;
};

struct SvmTrainResult {
    SvmModel model;
    Vector alphas;
    double kkt_residual = 0.0;
    double dual_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct SvmPrediction {
    int label = 1;
    double score = 0.0;
};

SvmTrainResult svm_train_detailed(std::span<const SvmSample> samples, double C, const SvmOptions& opts = {});
SvmModel svm_train(std::span<const SvmSample> samples, double C, const SvmOptions& opts = {});

// score = w.x + b; an exact zero goes to +1.
SvmPrediction svm_predict(const SvmModel& m, std::span<const double> x);

// 0.5 ||w||^2 + C * sum of hinge losses.
double svm_primal_objective(std::span<const double> w, double b, std::span<const SvmSample> samples, double C);

// Largest violation of the soft-margin KKT conditions for the given dual
// variables and bias, measured on y * f(x).
double svm_kkt_residual(std::span<const SvmSample> samples, std::span<const double> alphas,
                        std::span<const double> w, double b, double C);

}  // namespace faup
