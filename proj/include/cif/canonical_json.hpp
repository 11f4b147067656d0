#pragma once

#include <string>

#include <json.hpp>

namespace cif {

inline constexpr int kSchemaVersion = 1;

// Keys sorted, no whitespace, floating-point numbers with 12 significant
// digits, non-finite numbers as null. Equal documents serialize to equal bytes.
std::string canonical_dump(const nlohmann::json& value);

}  // namespace cif
