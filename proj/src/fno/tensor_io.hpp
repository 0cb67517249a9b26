#pragma once

#include <string>

#include "fno/field.hpp"

namespace fno {

/// One named tensor in a container file. dtype 1 = f64 (row-major,
/// little-endian), dtype 2 = u8 (raw bytes, used for embedded text).
struct TensorEntry {
    std::string name;
    uint8_t dtype = 1;
    Shape extents;
    std::vector<double> f64;
    std::vector<uint8_t> bytes;
};

/// The on-disk tensor container ("FNOT"): magic, u16 version, u32 entry
/// count, then per entry a length-prefixed UTF-8 name, dtype byte, ndim byte,
/// u64 extents and the raw little-endian payload. Writes are atomic
/// (temp file + rename) and reads validate structure and payload sizes.
class TensorContainer {
public:
    static constexpr uint16_t kVersion = 1;

    void add(std::string name, Shape extents, std::vector<double> data);
    void add_field(std::string name, const Field& f);
    void add_scalar(std::string name, double value);
    void add_text(std::string name, std::string_view text);

    bool has(std::string_view name) const;
    const TensorEntry& get(std::string_view name) const;
    Field field(std::string_view name) const;
    double scalar(std::string_view name) const;
    std::string text(std::string_view name) const;
    const std::vector<TensorEntry>& entries() const { return entries_; }

    void write(const std::string& path) const;
    static TensorContainer read(const std::string& path);

private:
    std::vector<TensorEntry> entries_;
};

} // namespace fno
