#include "json_out.h"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ckn::cli {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // keep it a JSON number that reads back as floating point
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

void emit(const Json& j, std::ostringstream& os, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << Json(it.key()).dump() << ": ";
            emit(it.value(), os, depth + 1);
        }
        os << '\n' << close << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            emit(j[i], os, depth + 1);
        }
        os << '\n' << close << ']';
        return;
    }
    case Json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
    }
}

} // namespace

std::string dump(const Json& j) {
    std::ostringstream os;
    emit(j, os, 0);
    os << '\n';
    return os.str();
}

} // namespace ckn::cli
