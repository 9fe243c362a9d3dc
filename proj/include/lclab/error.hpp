#pragma once

#include <stdexcept>
#include <string>

namespace lclab {

// Every failure carries a short kebab-case code so callers and tests can
// match on the kind of failure without parsing prose.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail = {})
        : std::runtime_error(detail.empty() ? code : code + ": " + detail),
          code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace lclab
