#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

// Little-endian binary helpers shared by the sidecar file formats.
static_assert(std::endian::native == std::endian::little,
              "sidecar formats are little-endian; big-endian hosts are unsupported");

namespace loopdet::binio {

template <typename T>
inline void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
inline T read_pod(std::istream& in, const char* what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error(std::string("unexpected end of file while reading ") + what);
    return value;
}

inline void write_magic(std::ostream& out, const std::string& magic) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void expect_magic(std::istream& in, const std::string& magic, const char* format_name) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in || got != magic)
        throw std::runtime_error(std::string("bad magic: not a ") + format_name + " file");
}

}  // namespace loopdet::binio
