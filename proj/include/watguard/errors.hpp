#ifndef WATGUARD_ERRORS_HPP
#define WATGUARD_ERRORS_HPP

#include <stdexcept>

namespace watguard {

// A file could not be opened, read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A data file exists but its header or rows are not in the expected format.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The training input contains no usable hits.
struct EmptyTrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Neighbor count out of range for the point set (k < 1 or k >= n).
struct InvalidKError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A flag value that cannot be honored (unparsable window bound, inverted
// window, and similar) — distinct from broken input files.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A flood target that is not a page of the site graph.
struct UnknownTargetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Frequency requested over an empty window.
struct ZeroDenominatorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace watguard

#endif
