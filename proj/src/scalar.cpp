#include "kissing/scalar.hpp"

#include "kissing/errors.hpp"

namespace kissing {

Precision parse_precision(const std::string& s)
{
    if (s == "double" || s == "standard") return Precision::Double;
    if (s == "extended") return Precision::Extended;
    if (s == "auto") return Precision::Auto;
    throw ValidationError("unknown precision mode '" + s + "' (expected double, extended or auto)");
}

std::string to_string(Precision p)
{
    switch (p) {
    case Precision::Double: return "double";
    case Precision::Extended: return "extended";
    case Precision::Auto: return "auto";
    }
    return "auto";
}

}  // namespace kissing
