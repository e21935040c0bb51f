#pragma once

#include <json.hpp>

#include <string>

namespace ckn::cli {

using Json = nlohmann::ordered_json;

// doubles at 17 significant digits, non-finite as null, two-space indent
std::string dump(const Json& j);
std::string format_double(double v);

} // namespace ckn::cli
