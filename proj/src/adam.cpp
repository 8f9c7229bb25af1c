#include "fimstar/adam.hpp"

#include <cmath>

#include "fimstar/numerics.hpp"

namespace fimstar {

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size() || params.size() != m.size()) {
        throw DomainError("Adam::step: parameter, gradient and moment sizes differ");
    }
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    const double step_size = lr / c1;
    const double inv_c2 = 1.0 / c2;
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        params[i] -= step_size * m[i] / (std::sqrt(v[i] * inv_c2) + epsilon);
    }
}

}  // namespace fimstar
