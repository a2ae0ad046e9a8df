#pragma once

#include <stdexcept>
#include <string>

namespace landau {

enum class ErrorKind {
    config,
    grid_mismatch,
    subcritical_exponent,
    off_lattice,
    under_resolved,
    non_convergent,
    inadmissible,
    unresolved_critical_point,
    instability,
    resolution_alarm,
    numerical_failure,
    not_decayed,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::subcritical_exponent: return "subcritical_exponent";
    case ErrorKind::off_lattice: return "off_lattice";
    case ErrorKind::under_resolved: return "under_resolved";
    case ErrorKind::non_convergent: return "non_convergent";
    case ErrorKind::inadmissible: return "inadmissible";
    case ErrorKind::unresolved_critical_point: return "unresolved_critical_point";
    case ErrorKind::instability: return "instability";
    case ErrorKind::resolution_alarm: return "resolution_alarm";
    case ErrorKind::numerical_failure: return "numerical_failure";
    case ErrorKind::not_decayed: return "not_decayed";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
    if (!ok) fail(kind, what);
}

} // namespace landau
