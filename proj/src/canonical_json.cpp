#include "cif/canonical_json.hpp"

#include <cmath>
#include <cstdio>

namespace cif {

namespace {

void write(const nlohmann::json& v, std::string& out) {
    using value_t = nlohmann::json::value_t;
    switch (v.type()) {
        case value_t::object: {
            out.push_back('{');
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out.push_back(',');
                first = false;
                out += nlohmann::json(key).dump();
                out.push_back(':');
                write(item, out);
            }
            out.push_back('}');
            break;
        }
        case value_t::array: {
            out.push_back('[');
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out.push_back(',');
                write(v[i], out);
            }
            out.push_back(']');
            break;
        }
        case value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) {
                out += "null";
                break;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", d == 0.0 ? 0.0 : d);
            out += buf;
            break;
        }
        default:
            out += v.dump();
    }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& value) {
    std::string out;
    write(value, out);
    return out;
}

}  // namespace cif
