#include "vexp/preset.hpp"

#include "vexp/common.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace vexp {

void PresetCall::expect_arity(std::size_t n) const { expect_arity(n, n); }

void PresetCall::expect_arity(std::size_t min_n, std::size_t max_n) const
{
    if (args.size() < min_n || args.size() > max_n) {
        throw ConstructionError("preset '" + name + "' takes " + std::to_string(min_n)
                                + (min_n == max_n ? "" : "-" + std::to_string(max_n)) + " argument(s), got "
                                + std::to_string(args.size()));
    }
}

PresetCall parse_preset(std::string_view text)
{
    std::string compact;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            compact.push_back(c);
        }
    }
    PresetCall call;
    const auto open = compact.find('(');
    if (open == std::string::npos) {
        call.name = compact;
    } else {
        if (compact.back() != ')') {
            throw ConstructionError("malformed preset '" + std::string(text) + "': missing ')'");
        }
        call.name = compact.substr(0, open);
        const std::string inner = compact.substr(open + 1, compact.size() - open - 2);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            std::size_t comma = inner.find(',', pos);
            if (comma == std::string::npos) {
                comma = inner.size();
            }
            const std::string token = inner.substr(pos, comma - pos);
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (token.empty() || end != token.c_str() + token.size()) {
                throw ConstructionError("malformed preset argument '" + token + "' in '" + std::string(text) + "'");
            }
            call.args.push_back(v);
            pos = comma + 1;
        }
    }
    if (call.name.empty()) {
        throw ConstructionError("empty preset name");
    }
    return call;
}

} // namespace vexp
