#ifndef FOCKLIFT_ERRORS_HPP
#define FOCKLIFT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace focklift {

// Malformed or out-of-domain input (bad shapes, letters out of range,
// violated preconditions).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// The computation itself broke down: non-convergence, ill-conditioning, a
// Douglas majorization failure that signals inconsistent data.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace focklift

#endif // FOCKLIFT_ERRORS_HPP
