#pragma once

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "optquad/real.hpp"

namespace optquad::cli {

// Minimal JSON value with insertion-ordered objects and fixed numeric
// formatting: every real serializes in scientific form with 18 significant
// digits, so documents are byte-identical across runs and round-trip doubles.
class JsonValue {
public:
    using Array = std::vector<JsonValue>;
    using Object = std::vector<std::pair<std::string, JsonValue>>;

    JsonValue() : data_(nullptr) {}
    JsonValue(std::nullptr_t) : data_(nullptr) {}
    JsonValue(bool b) : data_(b) {}
    JsonValue(int v) : data_(static_cast<long long>(v)) {}
    JsonValue(long long v) : data_(v) {}
    JsonValue(const real_t& v) : data_(v) {}
    JsonValue(const char* s) : data_(std::string(s)) {}
    JsonValue(std::string s) : data_(std::move(s)) {}
    JsonValue(Array a) : data_(std::move(a)) {}

    static JsonValue object() { return JsonValue(Object{}); }

    JsonValue& set(const std::string& key, JsonValue v)
    {
        std::get<Object>(data_).emplace_back(key, std::move(v));
        return *this;
    }

    static std::string format_real(const real_t& v)
    {
        std::ostringstream os;
        os << std::scientific << std::setprecision(17) << v;
        return os.str();
    }

    void dump(std::ostream& os, int indent = 0) const
    {
        struct Visitor {
            std::ostream& os;
            int indent;
            void operator()(std::nullptr_t) const { os << "null"; }
            void operator()(bool b) const { os << (b ? "true" : "false"); }
            void operator()(long long v) const { os << v; }
            void operator()(const real_t& v) const { os << format_real(v); }
            void operator()(const std::string& s) const
            {
                os << '"';
                for (char c : s) {
                    switch (c) {
                    case '"': os << "\\\""; break;
                    case '\\': os << "\\\\"; break;
                    case '\n': os << "\\n"; break;
                    case '\t': os << "\\t"; break;
                    default:
                        if (static_cast<unsigned char>(c) < 0x20) {
                            std::ostringstream esc;
                            esc << "\\u" << std::hex << std::setw(4) << std::setfill('0')
                                << static_cast<int>(c);
                            os << esc.str();
                        } else {
                            os << c;
                        }
                    }
                }
                os << '"';
            }
            void operator()(const Array& a) const
            {
                if (a.empty()) {
                    os << "[]";
                    return;
                }
                os << "[";
                for (std::size_t i = 0; i < a.size(); ++i) {
                    if (i > 0) os << ", ";
                    a[i].dump(os, indent);
                }
                os << "]";
            }
            void operator()(const Object& o) const
            {
                if (o.empty()) {
                    os << "{}";
                    return;
                }
                const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
                os << "{\n";
                for (std::size_t i = 0; i < o.size(); ++i) {
                    os << pad << '"' << o[i].first << "\": ";
                    o[i].second.dump(os, indent + 2);
                    if (i + 1 < o.size()) os << ',';
                    os << '\n';
                }
                os << std::string(static_cast<std::size_t>(indent), ' ') << '}';
            }
        };
        std::visit(Visitor{os, indent}, data_);
    }

    std::string dump() const
    {
        std::ostringstream os;
        dump(os);
        os << '\n';
        return os.str();
    }

private:
    explicit JsonValue(Object o) : data_(std::move(o)) {}

    std::variant<std::nullptr_t, bool, long long, real_t, std::string, Array, Object> data_;
};

} // namespace optquad::cli
