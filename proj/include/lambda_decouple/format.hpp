// format.hpp: locale-independent number formatting for dumps and CSV output

#pragma once

#include <string>

namespace lambda_decouple {

// Shortest %g-style rendering with the given number of significant digits.
std::string format_significant(double value, int digits);

} // namespace lambda_decouple
