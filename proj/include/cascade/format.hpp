#ifndef CASCADE_FORMAT_HPP
#define CASCADE_FORMAT_HPP

#include <cstdio>
#include <string>

namespace cascade {

// Decimal formatting with 15 significant digits (CSV contract asks >= 12).
inline std::string fmt_g(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

}  // namespace cascade

#endif
