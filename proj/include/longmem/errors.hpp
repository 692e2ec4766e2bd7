#pragma once

#include <stdexcept>

namespace longmem {

// Numerical failures (non-convergence, loss of positive definiteness,
// singular systems). Domain/configuration misuse throws std::invalid_argument.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace longmem
