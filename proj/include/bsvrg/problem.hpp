// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "bsvrg/rng.hpp"
#include "bsvrg/vec.hpp"

namespace bsvrg {

// One draw of the stochastic index xi.  Finite-dataset problems use `index`,
// continuous-noise problems use `noise`.
struct Sample {
    std::size_t index = 0;
    Vec noise;
};

// A stochastic objective f(x) = E_xi f(x; xi) with analytically known full
// gradient, smoothness constant L and a hard deviation bound V on
// ||grad f(x; xi) - grad f(x)||.  The constants are advertised, not
// estimated: the aggregation rule consumes V as an input.
class StochasticProblem {
public:
    virtual ~StochasticProblem() = default;

    virtual std::size_t dimension() const = 0;
    virtual double smoothness() const = 0;             // L
    virtual double deviation_bound() const = 0;        // V
    virtual double optimum_value_lower_bound() const = 0;
    virtual std::string_view kind() const = 0;

    // Exact f(x); deterministic.
    virtual double objective(const Vec& x) const = 0;
    // Exact grad f(x); deterministic.
    virtual Vec full_gradient(const Vec& x) const = 0;

    virtual Sample draw(RngStream& rng) const = 0;
    // grad f(x; xi) for a fixed xi; the SVRG step evaluates this at two
    // points with the same xi.
    virtual Vec sample_gradient_at(const Vec& x, const Sample& xi) const = 0;

    Vec sample_gradient(const Vec& x, RngStream& rng) const {
        return sample_gradient_at(x, draw(rng));
    }

    // Finite sample spaces can be enumerated exactly (0 = continuous).
    virtual std::size_t sample_space_size() const { return 0; }
    virtual Sample sample_at(std::size_t) const { return {}; }
};

// f(x; xi) = 1/2 ||x - a||^2 + <xi, x>, xi uniform on the radius-V sphere.
// The noise enters additively, so grad f(x; xi) - grad f(x) = xi and the
// deviation bound holds with equality on every draw.  L = 1.
class QuadraticProblem final : public StochasticProblem {
public:
    QuadraticProblem(std::size_t dim, Vec center, double noise_bound);

    std::size_t dimension() const override { return dim_; }
    double smoothness() const override { return 1.0; }
    double deviation_bound() const override { return noise_bound_; }
    double optimum_value_lower_bound() const override { return 0.0; }
    std::string_view kind() const override { return "bounded-noise-quadratic"; }

    double objective(const Vec& x) const override;
    Vec full_gradient(const Vec& x) const override;
    Sample draw(RngStream& rng) const override;
    Vec sample_gradient_at(const Vec& x, const Sample& xi) const override;

    const Vec& center() const { return center_; }

private:
    std::size_t dim_;
    Vec center_;
    double noise_bound_;
};

// f(x; i) = log(1 + exp(-y_i <a_i, x>)) + lambda * sum_j x_j^2 / (1 + x_j^2)
// over a finite dataset; non-convex through the regularizer.
// L = max_i ||a_i||^2 / 4 + 2 lambda,  V = 2 max_i ||a_i||.
class LogisticProblem final : public StochasticProblem {
public:
    LogisticProblem(std::vector<Vec> rows, std::vector<int> labels, double lambda);

    // Seeded synthetic dataset: rows from a unit ball scaled to max norm
    // `row_scale`, labels from a random linear separator with `label_noise`
    // flip probability.
    static LogisticProblem generate(std::size_t m, std::size_t dim, double lambda,
                                    double label_noise, std::uint64_t dataset_seed,
                                    double row_scale = 2.0);

    std::size_t dimension() const override { return dim_; }
    double smoothness() const override { return smoothness_; }
    double deviation_bound() const override { return deviation_bound_; }
    double optimum_value_lower_bound() const override { return 0.0; }
    std::string_view kind() const override { return "nonconvex-regularized-logistic"; }

    double objective(const Vec& x) const override;
    Vec full_gradient(const Vec& x) const override;
    Sample draw(RngStream& rng) const override;
    Vec sample_gradient_at(const Vec& x, const Sample& xi) const override;

    std::size_t sample_space_size() const override { return rows_.size(); }
    Sample sample_at(std::size_t i) const override { return Sample{i, {}}; }

private:
    std::vector<Vec> rows_;
    std::vector<int> labels_;  // +1 / -1
    double lambda_;
    std::size_t dim_;
    double smoothness_;
    double deviation_bound_;
};

}  // namespace bsvrg
