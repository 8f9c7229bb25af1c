#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fimstar {

/// Adam with bias correction.
struct Adam {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;

    Adam() = default;
    Adam(double learning_rate, std::size_t params) : lr(learning_rate), m(params, 0.0), v(params, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad);
};

}  // namespace fimstar
