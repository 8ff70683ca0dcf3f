#ifndef LEAFSPACE_REPORT_HPP
#define LEAFSPACE_REPORT_HPP

#include <iostream>
#include <string>

#include "json.hpp"
#include "leafspace/version.hpp"

namespace leafspace {

using Json = nlohmann::json;

inline Json make_report(const std::string& scenario, const std::string& command) {
    Json j;
    j["engine_version"] = kEngineVersion;
    j["scenario"] = scenario;
    j["command"] = command;
    j["status"] = "pass";
    return j;
}

// The table view is derived from the JSON document, never built separately.
inline void print_table(const Json& j, std::ostream& os, int indent = 0) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || (value.is_array() && !value.empty() && value[0].is_object())) {
                os << pad << key << ":\n";
                print_table(value, os, indent + 1);
            } else {
                os << pad << key << ": " << value.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& item : j) {
            print_table(item, os, indent);
            os << pad << "-\n";
        }
    } else {
        os << pad << j.dump() << "\n";
    }
}

}  // namespace leafspace

#endif
