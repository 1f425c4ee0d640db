#pragma once

#include <stdexcept>

namespace forage {

/// Raised when a caller breaks a documented precondition (stepping a
/// finished episode, mismatched dimensions, stale caches).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Thrown when logits, losses or parameters stop being finite.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace forage
