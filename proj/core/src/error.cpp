#include "liouville/error.hpp"

namespace liouville {

UnsupportedRegime::UnsupportedRegime(const std::string& what)
    : Error(what) {}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : Error("parse error at offset " + std::to_string(offset) + ": " + message),
      message_(message),
      offset_(offset) {}

QuadratureError::QuadratureError(const std::string& what, double where)
    : Error(what), where_(where) {}

MonotonicityError::MonotonicityError(const std::string& what, double lo, double hi)
    : Error(what), lo_(lo), hi_(hi) {}

} // namespace liouville
