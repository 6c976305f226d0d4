#pragma once

#include <stdexcept>
#include <string>

namespace qbessel {

enum class errc {
    domain,      // argument outside the operation's domain
    singular,    // inverse requested of a numerically singular matrix
    truncation,  // series/product/lattice failed to converge within max_terms
    overflow,    // input norm above the configured bound
    nonfinite,   // NaN/Inf encountered
    config,      // invalid configuration
};

class NumericError : public std::runtime_error {
  public:
    NumericError(errc kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    errc kind() const { return kind_; }

  private:
    errc kind_;
};

inline const char* errc_name(errc k) {
    switch (k) {
    case errc::domain: return "domain";
    case errc::singular: return "singular";
    case errc::truncation: return "truncation";
    case errc::overflow: return "overflow";
    case errc::nonfinite: return "nonfinite";
    case errc::config: return "config";
    }
    return "?";
}

} // namespace qbessel
