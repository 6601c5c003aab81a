#pragma once

#include <stdexcept>
#include <string>

namespace fractal_contents {

// Re(s) on the wrong side of a convergence abscissa.
struct divergence_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A lazily generated object cannot answer without enumerating infinitely much.
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two independent evaluations of the same quantity disagree.
struct consistency_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Grid too coarse or too large for the request.
struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fractal_contents
