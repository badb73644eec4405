#pragma once

#include <stdexcept>
#include <string>

namespace hotspot {

// Invalid grid construction or mismatched grids between objects.
class grid_error : public std::invalid_argument {
public:
    explicit grid_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Operation called with an unsupported dimension.
class dimension_error : public std::invalid_argument {
public:
    explicit dimension_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Grid too coarse to resolve the requested feature.
class resolution_error : public std::runtime_error {
public:
    explicit resolution_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An iteration (bisection, Newton, power iteration, time step) failed to converge.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& msg, double last = 0.0)
        : std::runtime_error(msg), last_value(last) {}
    double last_value;
};

// Shifted solve hit a (near-)singular pivot: the shift sits at the discrete spectrum.
class shift_at_spectrum : public std::runtime_error {
public:
    explicit shift_at_spectrum(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation requested too close to a pole of the characteristic function.
class pole_error : public std::runtime_error {
public:
    explicit pole_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A sign-change bracket required by a bisection does not exist.
class bracket_error : public std::runtime_error {
public:
    explicit bracket_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hotspot
