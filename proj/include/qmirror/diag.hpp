// diag.hpp — process-wide warning sink for numerical diagnostics.
//
// Library routines stay pure; conditions that are suspicious but not fatal
// (purity marginally above 1, perturbative validity exceeded, ...) are
// reported here instead of being thrown.

#pragma once

#include <atomic>
#include <cstdio>
#include <string>
#include <string_view>

namespace qmirror::diag {

using Handler = void (*)(std::string_view);

inline void stderr_handler(std::string_view msg) {
    std::fprintf(stderr, "qmirror: warning: %.*s\n", static_cast<int>(msg.size()), msg.data());
}

inline std::atomic<Handler>& handler_slot() {
    static std::atomic<Handler> h{&stderr_handler};
    return h;
}

inline void set_handler(Handler h) {
    handler_slot().store(h ? h : &stderr_handler);
}

inline void warn(const std::string& msg) {
    handler_slot().load()(msg);
}

} // namespace qmirror::diag
