#include "fno/tensor_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace fno {

namespace {

constexpr char kMagic[4] = {'F', 'N', 'O', 'T'};

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
    const std::string& buf;
    size_t pos = 0;
    const std::string& path;

    void need(size_t n) const {
        FNO_REQUIRE(pos + n <= buf.size(), DataError, "tensor container '", path,
                    "' truncated at byte ", pos);
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint16_t u16() {
        need(2);
        uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

void TensorContainer::add(std::string name, Shape extents, std::vector<double> data) {
    FNO_REQUIRE(!has(name), DataError, "tensor container: duplicate entry '", name, "'");
    FNO_REQUIRE(static_cast<int64_t>(data.size()) == shape_size(extents), DataError,
                "tensor container: entry '", name, "' payload length ", data.size(),
                " does not match extents ", shape_str(extents));
    TensorEntry e;
    e.name = std::move(name);
    e.dtype = 1;
    e.extents = std::move(extents);
    e.f64 = std::move(data);
    entries_.push_back(std::move(e));
}

void TensorContainer::add_field(std::string name, const Field& f) {
    add(std::move(name), f.shape(), f.values());
}

void TensorContainer::add_scalar(std::string name, double value) {
    add(std::move(name), Shape{1}, {value});
}

void TensorContainer::add_text(std::string name, std::string_view text) {
    FNO_REQUIRE(!has(name), DataError, "tensor container: duplicate entry '", name, "'");
    TensorEntry e;
    e.name = std::move(name);
    e.dtype = 2;
    e.extents = {static_cast<int64_t>(text.size())};
    e.bytes.assign(text.begin(), text.end());
    entries_.push_back(std::move(e));
}

bool TensorContainer::has(std::string_view name) const {
    for (const auto& e : entries_)
        if (e.name == name) return true;
    return false;
}

const TensorEntry& TensorContainer::get(std::string_view name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e;
    throw DataError(concat("tensor container: missing entry '", name, "'"));
}

Field TensorContainer::field(std::string_view name) const {
    const TensorEntry& e = get(name);
    FNO_REQUIRE(e.dtype == 1, DataError, "tensor container: entry '", name, "' is not f64");
    return Field(e.extents, e.f64);
}

double TensorContainer::scalar(std::string_view name) const {
    const TensorEntry& e = get(name);
    FNO_REQUIRE(e.dtype == 1 && e.f64.size() == 1, DataError, "tensor container: entry '", name,
                "' is not a scalar");
    return e.f64[0];
}

std::string TensorContainer::text(std::string_view name) const {
    const TensorEntry& e = get(name);
    FNO_REQUIRE(e.dtype == 2, DataError, "tensor container: entry '", name, "' is not text");
    return std::string(e.bytes.begin(), e.bytes.end());
}

void TensorContainer::write(const std::string& path) const {
    std::string out;
    out.append(kMagic, 4);
    put_u16(out, kVersion);
    put_u32(out, static_cast<uint32_t>(entries_.size()));
    for (const auto& e : entries_) {
        put_u32(out, static_cast<uint32_t>(e.name.size()));
        out.append(e.name);
        out.push_back(static_cast<char>(e.dtype));
        out.push_back(static_cast<char>(e.extents.size()));
        for (int64_t ext : e.extents) put_u64(out, static_cast<uint64_t>(ext));
        if (e.dtype == 1) {
            for (double v : e.f64) put_f64(out, v);
        } else {
            out.append(reinterpret_cast<const char*>(e.bytes.data()), e.bytes.size());
        }
    }

    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        FNO_REQUIRE(f.good(), DataError, "cannot open '", tmp, "' for writing");
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        FNO_REQUIRE(f.good(), DataError, "write failed for '", tmp, "'");
    }
    FNO_REQUIRE(std::rename(tmp.c_str(), path.c_str()) == 0, DataError,
                "atomic rename to '", path, "' failed");
}

TensorContainer TensorContainer::read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    FNO_REQUIRE(f.good(), DataError, "cannot open tensor container '", path, "'");
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf, 0, path};
    FNO_REQUIRE(r.str(4) == std::string(kMagic, 4), DataError, "'", path,
                "' is not a tensor container (bad magic)");
    uint16_t version = r.u16();
    FNO_REQUIRE(version == kVersion, DataError, "'", path, "' has unsupported version ", version);
    uint32_t count = r.u32();

    TensorContainer out;
    for (uint32_t i = 0; i < count; ++i) {
        TensorEntry e;
        uint32_t name_len = r.u32();
        e.name = r.str(name_len);
        FNO_REQUIRE(!out.has(e.name), DataError, "'", path, "': duplicate entry '", e.name, "'");
        e.dtype = r.u8();
        FNO_REQUIRE(e.dtype == 1 || e.dtype == 2, DataError, "'", path, "': entry '", e.name,
                    "' has unknown dtype ", static_cast<int>(e.dtype));
        uint8_t ndim = r.u8();
        for (uint8_t a = 0; a < ndim; ++a) e.extents.push_back(static_cast<int64_t>(r.u64()));
        int64_t n = shape_size(e.extents);
        FNO_REQUIRE(n >= 0, DataError, "'", path, "': bad extents for '", e.name, "'");
        if (e.dtype == 1) {
            e.f64.resize(static_cast<size_t>(n));
            for (int64_t j = 0; j < n; ++j) e.f64[static_cast<size_t>(j)] = r.f64();
        } else {
            std::string payload = r.str(static_cast<size_t>(n));
            e.bytes.assign(payload.begin(), payload.end());
        }
        out.entries_.push_back(std::move(e));
    }
    FNO_REQUIRE(r.pos == buf.size(), DataError, "'", path, "': trailing bytes after last entry");
    return out;
}

} // namespace fno
