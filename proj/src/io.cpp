#include "sqzsync/io.hpp"

#include "sqzsync/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sqzsync {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    return quoted + '"';
}

void flatten(const json& node, const std::string& prefix, std::string& out) {
    if (node.is_object() && !node.empty()) {
        for (const auto& [key, value] : node.items()) {
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
        }
        return;
    }
    out += "# " + prefix + "=" + node.dump() + "\n";
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

Cell parse_cell(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (!s.empty() && res.ec == std::errc() && res.ptr == last) return v;
    return s;
}

json cell_to_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    return std::get<std::string>(c);
}

} // namespace

std::string to_csv(const ResultEnvelope& env) {
    std::string out;
    if (!env.meta.empty()) flatten(env.meta, "", out);
    for (std::size_t k = 0; k < env.data.columns.size(); ++k) {
        if (k != 0) out += ',';
        out += env.data.columns[k];
    }
    out += '\n';
    for (const auto& row : env.data.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k != 0) out += ',';
            out += format_cell(row[k]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const ResultEnvelope& env) {
    json data = json::object();
    for (std::size_t k = 0; k < env.data.columns.size(); ++k) {
        json column = json::array();
        for (const auto& row : env.data.rows) column.push_back(cell_to_json(row.at(k)));
        data[env.data.columns[k]] = std::move(column);
    }
    json doc = json::object();
    doc["meta"] = env.meta;
    doc["data"] = std::move(data);
    return doc.dump(2) + "\n";
}

ResultEnvelope parse_csv(std::string_view text) {
    ResultEnvelope env;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (!header_seen && line.starts_with("# ")) {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) continue;
            std::string pointer = "/" + std::string(line.substr(2, eq - 2));
            for (char& ch : pointer) {
                if (ch == '.') ch = '/';
            }
            env.meta[json::json_pointer(pointer)] = json::parse(line.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            env.data.columns = split_csv_line(line);
            header_seen = true;
            continue;
        }
        std::vector<Cell> row;
        for (const auto& field : split_csv_line(line)) row.push_back(parse_cell(field));
        env.data.rows.push_back(std::move(row));
    }
    return env;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.flush();
    if (!os) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

json params_meta(const SystemParams& p) {
    json j = json::object();
    j["n"] = p.n;
    j["r"] = p.r;
    j["Phi"] = p.Phi;
    j["Delta"] = p.Delta;
    j["eps"] = p.eps;
    j["gamma0"] = p.gamma0;
    return j;
}

json derived_meta(const SystemParams& p) {
    const DerivedReservoir d = derive_reservoir(p);
    const double theta_s = steady_theta(d.N);
    json j = json::object();
    j["N"] = d.N;
    j["M_re"] = d.M.real();
    j["M_im"] = d.M.imag();
    j["gamma"] = d.gamma;
    j["theta_s"] = theta_s;
    j["r_s"] = limit_cycle_radius(theta_s);
    j["squeeze_db"] = squeeze_db(p.r);
    return j;
}

Table grid_table(const SweepGrid& g) {
    Table t;
    t.columns = {g.x_axis.name, g.y_axis.name, "value"};
    t.rows.reserve(g.values.size());
    for (std::size_t iy = 0; iy < g.y_axis.values.size(); ++iy) {
        for (std::size_t ix = 0; ix < g.x_axis.values.size(); ++ix) {
            t.rows.push_back({g.x_axis.values[ix], g.y_axis.values[iy], g.at(iy, ix)});
        }
    }
    return t;
}

Table trajectory_table(const EnsembleRun& run) {
    Table t;
    t.columns = {"path_id", "t", "theta", "phi", "x", "y"};
    for (std::size_t id = 0; id < run.paths.size(); ++id) {
        for (const PathSample& s : run.paths[id].samples) {
            t.rows.push_back({static_cast<std::int64_t>(id), s.t, s.s.theta, s.s.phi, s.xy.x, s.xy.y});
        }
    }
    return t;
}

Table q_table(const PhaseGrid& g) {
    Table t;
    t.columns = {"theta", "phi", "q"};
    t.rows.reserve(g.values.size());
    for (std::size_t i = 0; i < g.theta_axis.size(); ++i) {
        for (std::size_t j = 0; j < g.phi_axis.size(); ++j) {
            t.rows.push_back({g.theta_axis[i], g.phi_axis[j], g.at(i, j)});
        }
    }
    return t;
}

} // namespace sqzsync
