#include "csvortex/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace csvortex {

std::string format_g17(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void JsonWriter::prefix() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_in_scope_.empty()) {
        if (!first_in_scope_.back()) os_ << ", ";
        first_in_scope_.back() = false;
    }
}

JsonWriter& JsonWriter::begin_object() {
    prefix();
    os_ << "{";
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    if (first_in_scope_.empty()) throw std::logic_error("unbalanced end_object");
    first_in_scope_.pop_back();
    os_ << "}";
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    prefix();
    os_ << "[";
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    if (first_in_scope_.empty()) throw std::logic_error("unbalanced end_array");
    first_in_scope_.pop_back();
    os_ << "]";
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    prefix();
    os_ << "\"" << json_escape(k) << "\": ";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    prefix();
    os_ << format_g17(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    prefix();
    os_ << v;
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
    prefix();
    os_ << v;
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    prefix();
    os_ << (v ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
    prefix();
    os_ << "\"" << json_escape(s) << "\"";
    return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value_array(const std::vector<double>& vs) {
    begin_array();
    for (double v : vs) value(v);
    return end_array();
}

JsonWriter& JsonWriter::raw(const std::string& json_fragment) {
    prefix();
    os_ << json_fragment;
    return *this;
}

std::string RunManifest::to_json() const {
    JsonWriter w;
    w.begin_object();
    w.key("command").value(command);
    w.key("tool_version").value(tool_version);
    w.key("seed").value(seed);
    w.key("config").raw(config_json.empty() ? "{}" : config_json);
    w.key("input_hash").value(input_hash);
    w.key("wall_ms").value(wall_ms);
    w.end_object();
    return w.str();
}

} // namespace csvortex
