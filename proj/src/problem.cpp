// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsvrg {
namespace {

// log(1 + exp(-z)) without overflow for large |z|.
inline double log1p_exp_neg(double z) {
    if (z >= 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

// sigma(-z) = 1 / (1 + exp(z))
inline double sigma_neg(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

QuadraticProblem::QuadraticProblem(std::size_t dim, Vec center, double noise_bound)
    : dim_(dim), center_(std::move(center)), noise_bound_(noise_bound) {
    if (dim_ == 0) throw std::invalid_argument("quadratic: dimension must be positive");
    if (noise_bound_ < 0.0) throw std::invalid_argument("quadratic: noise bound must be >= 0");
    if (center_.empty()) center_.assign(dim_, 0.0);
    check_dimension(center_, dim_, "quadratic center");
}

double QuadraticProblem::objective(const Vec& x) const {
    check_dimension(x, dim_, "objective");
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double t = x[i] - center_[i];
        s += t * t;
    }
    return 0.5 * s;
}

Vec QuadraticProblem::full_gradient(const Vec& x) const {
    check_dimension(x, dim_, "full_gradient");
    return sub(x, center_);
}

Sample QuadraticProblem::draw(RngStream& rng) const {
    Sample s;
    s.noise = rng.unit_sphere(dim_);
    // Shaved slightly inside the sphere so rounding in downstream gradient
    // arithmetic cannot push a measured deviation past the hard bound V.
    const double radius = noise_bound_ * (1.0 - 1e-12);
    for (auto& v : s.noise) v *= radius;
    return s;
}

Vec QuadraticProblem::sample_gradient_at(const Vec& x, const Sample& xi) const {
    check_dimension(x, dim_, "sample_gradient");
    check_dimension(xi.noise, dim_, "sample noise");
    Vec g = sub(x, center_);
    for (std::size_t i = 0; i < dim_; ++i) g[i] += xi.noise[i];
    return g;
}

LogisticProblem::LogisticProblem(std::vector<Vec> rows, std::vector<int> labels, double lambda)
    : rows_(std::move(rows)), labels_(std::move(labels)), lambda_(lambda) {
    if (rows_.empty()) throw std::invalid_argument("logistic: dataset must be non-empty");
    if (rows_.size() != labels_.size())
        throw std::invalid_argument("logistic: rows/labels size mismatch");
    if (lambda_ < 0.0) throw std::invalid_argument("logistic: lambda must be >= 0");
    dim_ = rows_.front().size();
    double max_row_norm_sq = 0.0;
    for (const auto& r : rows_) {
        check_dimension(r, dim_, "logistic row");
        max_row_norm_sq = std::max(max_row_norm_sq, norm_sq(r));
    }
    for (int y : labels_) {
        if (y != 1 && y != -1) throw std::invalid_argument("logistic: labels must be +-1");
    }
    smoothness_ = 0.25 * max_row_norm_sq + 2.0 * lambda_;
    deviation_bound_ = 2.0 * std::sqrt(max_row_norm_sq);
}

LogisticProblem LogisticProblem::generate(std::size_t m, std::size_t dim, double lambda,
                                          double label_noise, std::uint64_t dataset_seed,
                                          double row_scale) {
    if (m == 0 || dim == 0) throw std::invalid_argument("logistic: m and d must be positive");
    if (label_noise < 0.0 || label_noise > 1.0)
        throw std::invalid_argument("logistic: label_noise must be in [0,1]");
    RngStream rng = derive_stream(dataset_seed, StreamKind::dataset);
    const Vec separator = rng.unit_sphere(dim);
    std::vector<Vec> rows;
    std::vector<int> labels;
    rows.reserve(m);
    labels.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec row = rng.unit_sphere(dim);
        const double radius = row_scale * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
        for (auto& v : row) v *= radius;
        int y = dot(row, separator) >= 0.0 ? 1 : -1;
        if (rng.uniform01() < label_noise) y = -y;
        rows.push_back(std::move(row));
        labels.push_back(y);
    }
    return LogisticProblem(std::move(rows), std::move(labels), lambda);
}

double LogisticProblem::objective(const Vec& x) const {
    check_dimension(x, dim_, "objective");
    double loss = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        loss += log1p_exp_neg(static_cast<double>(labels_[i]) * dot(rows_[i], x));
    }
    loss /= static_cast<double>(rows_.size());
    double reg = 0.0;
    for (double xj : x) {
        const double s = xj * xj;
        reg += s / (1.0 + s);
    }
    return loss + lambda_ * reg;
}

Vec LogisticProblem::full_gradient(const Vec& x) const {
    check_dimension(x, dim_, "full_gradient");
    Vec g(dim_, 0.0);
    const double inv_m = 1.0 / static_cast<double>(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double y = static_cast<double>(labels_[i]);
        const double coeff = -sigma_neg(y * dot(rows_[i], x)) * y * inv_m;
        axpy(coeff, rows_[i], g);
    }
    for (std::size_t j = 0; j < dim_; ++j) {
        const double q = 1.0 + x[j] * x[j];
        g[j] += lambda_ * 2.0 * x[j] / (q * q);
    }
    return g;
}

Sample LogisticProblem::draw(RngStream& rng) const {
    return Sample{static_cast<std::size_t>(rng.uniform_below(rows_.size())), {}};
}

Vec LogisticProblem::sample_gradient_at(const Vec& x, const Sample& xi) const {
    check_dimension(x, dim_, "sample_gradient");
    if (xi.index >= rows_.size()) throw std::invalid_argument("logistic: sample index out of range");
    const double y = static_cast<double>(labels_[xi.index]);
    const double coeff = -sigma_neg(y * dot(rows_[xi.index], x)) * y;
    Vec g(dim_, 0.0);
    axpy(coeff, rows_[xi.index], g);
    for (std::size_t j = 0; j < dim_; ++j) {
        const double q = 1.0 + x[j] * x[j];
        g[j] += lambda_ * 2.0 * x[j] / (q * q);
    }
    return g;
}

}  // namespace bsvrg
