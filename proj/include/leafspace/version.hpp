#ifndef LEAFSPACE_VERSION_HPP
#define LEAFSPACE_VERSION_HPP

namespace leafspace {
inline constexpr const char* kEngineVersion = "0.1.0";
}

#endif
