#ifndef AGGPOL_ERRORS_HPP
#define AGGPOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aggpol {

// ============================================================================
//  Error taxonomy
//
//  error                 — library root; everything below derives from it
//   ├─ parameter_error   — caller passed values outside the documented domain
//   │   └─ unsupported_range_error — valid maths, but outside the range this
//   │                                implementation certifies
//   ├─ config_error      — malformed or inconsistent configuration input
//   ├─ numeric_error     — runtime numerical failure
//   │   ├─ moment_divergence_error — requested moment does not exist
//   │   ├─ singular_error         — degenerate linear system / zero pivot
//   │   ├─ stiffness_error        — step-size control collapsed
//   │   └─ leakage_error          — spectral record not decayed at the end
//   └─ io_error          — filesystem / stream failure
//
//  The CLI maps these onto process exit codes: config/parameter issues → 2,
//  numeric failures → 3, I/O failures → 4.
// ============================================================================

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class parameter_error : public error {
public:
    explicit parameter_error(const std::string& what) : error(what) {}
};

class unsupported_range_error : public parameter_error {
public:
    explicit unsupported_range_error(const std::string& what) : parameter_error(what) {}
};

class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

class numeric_error : public error {
public:
    explicit numeric_error(const std::string& what) : error(what) {}
};

class moment_divergence_error : public numeric_error {
public:
    explicit moment_divergence_error(const std::string& what) : numeric_error(what) {}
};

class singular_error : public numeric_error {
public:
    explicit singular_error(const std::string& what) : numeric_error(what) {}
};

class stiffness_error : public numeric_error {
public:
    explicit stiffness_error(const std::string& what) : numeric_error(what) {}
};

class leakage_error : public numeric_error {
public:
    explicit leakage_error(const std::string& what) : numeric_error(what) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

} // namespace aggpol

#endif // AGGPOL_ERRORS_HPP
