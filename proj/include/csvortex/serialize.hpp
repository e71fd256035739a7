#ifndef CSVORTEX_SERIALIZE_HPP
#define CSVORTEX_SERIALIZE_HPP

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace csvortex {

/// Fixed 17-significant-digit rendering so identical runs emit identical bytes.
std::string format_g17(double v);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Minimal ordered JSON emitter. nlohmann/json is used for parsing inputs;
/// outputs go through this writer to pin key order and float formatting.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& s);
    JsonWriter& value(const char* s);
    JsonWriter& value_array(const std::vector<double>& vs);
    /// Splice a pre-rendered JSON fragment as a value.
    JsonWriter& raw(const std::string& json_fragment);

    std::string str() const { return os_.str(); }

private:
    void prefix();
    std::ostringstream os_;
    std::vector<bool> first_in_scope_;
    bool pending_key_ = false;
};

std::string json_escape(const std::string& s);

/// Everything needed to reproduce a run. Embedded in (or referenced by) every
/// output file. wall_ms is 0 unless wall-clock timing was explicitly enabled,
/// so outputs stay byte-identical across reruns.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string config_json;  // pre-rendered JSON object
    std::string input_hash;
    double wall_ms = 0.0;

    std::string to_json() const;
};

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace csvortex

#endif
