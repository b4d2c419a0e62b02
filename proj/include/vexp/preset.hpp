#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vexp {

/// A parsed "name(arg, arg, ...)" preset string with numeric arguments.
struct PresetCall {
    std::string name;
    std::vector<double> args;

    /// Throws ConstructionError unless exactly `n` arguments were given.
    void expect_arity(std::size_t n) const;
    void expect_arity(std::size_t min_n, std::size_t max_n) const;
};

/// Accepts "name" and "name(a,b,...)"; whitespace is ignored. Throws
/// ConstructionError on malformed input.
PresetCall parse_preset(std::string_view text);

} // namespace vexp
