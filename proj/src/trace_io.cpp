#include "hgdo/trace_io.hpp"

#include "hgdo/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace hgdo::io {

namespace {

using sim::SimSample;

struct Column {
    std::string name;
    std::function<double*(SimSample&)> field;  // null for the flags column
};

void add_vec(std::vector<Column>& cols, const std::string& base, Vec3 SimSample::*member,
             std::array<const char*, 3> axes) {
    for (int i = 0; i < 3; ++i)
        cols.push_back({base + "_" + axes[i], [member, i](SimSample& s) { return &(s.*member)[i]; }});
}

void add_state(std::vector<Column>& cols, const std::string& base, Vec3 model::RigidState::*member,
               std::array<const char*, 3> axes) {
    for (int i = 0; i < 3; ++i)
        cols.push_back({base + "_" + axes[i], [member, i](SimSample& s) { return &(s.state.*member)[i]; }});
}

const std::vector<Column>& columns() {
    static const std::vector<Column> cols = [] {
        constexpr std::array<const char*, 3> xyz = {"x", "y", "z"};
        constexpr std::array<const char*, 3> ang = {"phi", "theta", "psi"};
        std::vector<Column> c;
        c.push_back({"t", [](SimSample& s) { return &s.t; }});
        add_state(c, "x1", &model::RigidState::x1, xyz);
        add_state(c, "x2", &model::RigidState::x2, xyz);
        add_state(c, "x3", &model::RigidState::x3, ang);
        add_state(c, "x4", &model::RigidState::x4, ang);
        add_vec(c, "x2m", &SimSample::x2_meas, xyz);
        add_vec(c, "x4m", &SimSample::x4_meas, ang);
        add_vec(c, "ref", &SimSample::ref_pos, xyz);
        add_vec(c, "att_ref", &SimSample::att_ref, ang);
        add_vec(c, "e1", &SimSample::e1, xyz);
        add_vec(c, "e2", &SimSample::e2, ang);
        add_vec(c, "s1", &SimSample::s1, xyz);
        add_vec(c, "s2", &SimSample::s2, ang);
        add_vec(c, "u1vec", &SimSample::u1vec, xyz);
        c.push_back({"u1", [](SimSample& s) { return &s.u1; }});
        add_vec(c, "tau", &SimSample::torque, xyz);
        for (int i = 0; i < 4; ++i)
            c.push_back({"omega_" + std::to_string(i + 1), [i](SimSample& s) { return &s.omega[i]; }});
        c.push_back({"flags", nullptr});
        add_vec(c, "d1", &SimSample::d1, xyz);
        add_vec(c, "d2", &SimSample::d2, ang);
        add_vec(c, "d1_hat", &SimSample::d1_hat, xyz);
        add_vec(c, "d2_hat", &SimSample::d2_hat, ang);
        add_vec(c, "d1_tilde", &SimSample::d1_tilde, xyz);
        add_vec(c, "d2_tilde", &SimSample::d2_tilde, ang);
        c.push_back({"V", [](SimSample& s) { return &s.V; }});
        return c;
    }();
    return cols;
}

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    // from_chars rejects a leading '+', which to_chars never writes.
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw IoError(where, "not a number: '" + s + "'");
    return v;
}

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ';';
        out += labels[i];
    }
    return out;
}

std::vector<std::string> split_labels(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::string cur;
    for (char c : s) {
        if (c == ';') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

const std::vector<std::string>& trace_columns() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& c : columns()) n.push_back(c.name);
        n.push_back("labels");
        return n;
    }();
    return names;
}

std::string trace_header() {
    std::string h;
    for (const auto& n : trace_columns()) {
        if (!h.empty()) h += ',';
        h += n;
    }
    return h;
}

std::string quote_csv_field(const std::string& field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw IoError("<csv>", "unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

void write_trace_csv(const sim::SimTrace& trace, std::ostream& out) {
    out << trace_header() << "\r\n";
    const std::string labels = quote_csv_field(join_labels(trace.labels));
    const auto& cols = columns();
    std::string line;
    for (const auto& sample : trace.samples) {
        SimSample s = sample;
        line.clear();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) line += ',';
            if (cols[c].field)
                append_double(line, *cols[c].field(s));
            else
                line += std::to_string(s.flags);
        }
        line += ',';
        line += labels;
        line += "\r\n";
        out << line;
    }
}

void write_trace_csv(const sim::SimTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    write_trace_csv(trace, out);
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

sim::SimTrace read_trace_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw IoError(source, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != trace_header()) throw IoError(source, "unexpected header");

    const auto& cols = columns();
    sim::SimTrace trace;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(row);
        std::vector<std::string> f;
        try {
            f = split_csv_record(line);
        } catch (const IoError&) {
            throw IoError(where, "unterminated quoted field");
        }
        if (f.size() != cols.size() + 1) throw IoError(where, "wrong number of fields");
        SimSample s;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].field) {
                *cols[c].field(s) = parse_double(f[c], where);
            } else {
                std::uint32_t flags = 0;
                auto [ptr, ec] = std::from_chars(f[c].data(), f[c].data() + f[c].size(), flags);
                if (ec != std::errc{} || ptr != f[c].data() + f[c].size())
                    throw IoError(where, "bad flags field '" + f[c] + "'");
                s.flags = flags;
            }
        }
        if (trace.samples.empty()) trace.labels = split_labels(f.back());
        trace.samples.push_back(s);
    }
    if (trace.samples.size() >= 2) trace.dt = trace.samples[1].t - trace.samples[0].t;
    return trace;
}

sim::SimTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    return read_trace_csv(in, path.string());
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace hgdo::io
