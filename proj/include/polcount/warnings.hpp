#pragma once

#include <string>
#include <vector>

namespace polcount {

/// Diagnostic annotation attached to a computation. Warnings never change
/// numeric results; they flag parameter regimes where a formula or model
/// is outside its domain of validity.
struct Warning {
  std::string code;     // stable machine-readable tag
  std::string message;  // human-readable explanation
};

using WarningLog = std::vector<Warning>;

/// Append a warning if `log` is non-null; no-op otherwise.
inline void warn(WarningLog* log, std::string code, std::string message) {
  if (log != nullptr) {
    log->push_back(Warning{std::move(code), std::move(message)});
  }
}

}  // namespace polcount
