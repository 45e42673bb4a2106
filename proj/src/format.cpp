#include "lambda_decouple/format.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace lambda_decouple {

std::string format_significant(double value, int digits) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, digits);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("format_significant: buffer too small");
    }
    return std::string(buf.data(), res.ptr);
}

} // namespace lambda_decouple
