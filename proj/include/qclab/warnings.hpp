#pragma once

#include <string>
#include <vector>

namespace qclab {

// Collector for non-fatal diagnostics surfaced by inner operations.
// Callers pass a pointer where they want warnings captured; nullptr
// drops them. Reports deduplicate messages, preserving first-seen order.
struct WarningLog {
    std::vector<std::string> messages;

    void add(std::string msg) { messages.push_back(std::move(msg)); }

    std::vector<std::string> unique() const {
        std::vector<std::string> out;
        for (const auto& m : messages) {
            bool seen = false;
            for (const auto& u : out)
                if (u == m) {
                    seen = true;
                    break;
                }
            if (!seen)
                out.push_back(m);
        }
        return out;
    }

    void merge(const WarningLog& other) {
        messages.insert(messages.end(), other.messages.begin(), other.messages.end());
    }
};

inline void warn(WarningLog* log, std::string msg) {
    if (log)
        log->add(std::move(msg));
}

}  // namespace qclab
