#pragma once

#include "ppgbp/error.hpp"

#include <optional>
#include <utility>

namespace testutil {

/// Error code thrown by f(), or nullopt when it returns normally.
template <class F>
std::optional<ppgbp::ErrorCode> code_of(F&& f) {
    try {
        std::forward<F>(f)();
    } catch (const ppgbp::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace testutil
