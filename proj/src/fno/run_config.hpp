#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fno/common.hpp"

namespace fno {

/// Plain-text key=value configuration with [sections]. Every key has a
/// schema default; unknown sections or keys are rejected with line/column
/// diagnostics. Environment variables FNO_<SECTION>_<KEY> override file
/// values; explicit set() calls override both.
class RunConfig {
public:
    RunConfig(); // fully defaulted

    /// All known keys ("section.key") with their defaults.
    static const std::map<std::string, std::string>& schema();

    void load_file(const std::string& path);
    void load_text(const std::string& text, const std::string& origin = "<config>");
    void apply_env(const char* prefix = "FNO_");
    void set(const std::string& key, const std::string& value);

    /// Problem-kind presets (burgers / darcy / ns) for the GRF measure, the
    /// generation resolutions and the model defaults. Applied before file and
    /// environment overrides.
    void apply_kind_preset(const std::string& kind);

    const std::string& get(const std::string& key) const;
    int64_t get_i64(const std::string& key) const;
    double get_f64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<int64_t> get_i64_list(const std::string& key) const; // comma separated

    /// Canonical sorted text rendering and its FNV-1a hash; used by the
    /// provenance sidecars to detect train/test contamination.
    std::string canonical_text() const;
    uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace fno
