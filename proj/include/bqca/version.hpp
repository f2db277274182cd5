#ifndef BQCA_VERSION_HPP
#define BQCA_VERSION_HPP

namespace bqca {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
