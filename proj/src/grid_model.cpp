#include "gridsim/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "gridsim/errors.hpp"
#include "json_io.hpp"

namespace gridsim {

namespace {

using detail::json;

LineConfigMatrix make_config(int id, const std::array<std::array<Complex, 3>, 3>& z, double b) {
    LineConfigMatrix cfg;
    cfg.config_id = id;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            cfg.z_phase(r, c) = z[r][c];
        }
        cfg.b_shunt(r, r) = b;
    }
    return cfg;
}

const char* kind_name(BusKind kind) { return kind == BusKind::slack ? "slack" : "load"; }

BusKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "slack") return BusKind::slack;
    if (s == "load") return BusKind::load;
    throw ParseError(where, 0, "unknown bus kind '" + s + "'");
}

Eigen::Matrix3d read_matrix3(const json& obj, const char* key, const std::string& where) {
    auto rows = detail::require<std::vector<std::vector<double>>>(obj, key, where);
    if (rows.size() != 3 || std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.size() != 3; })) {
        throw ParseError(where, 0, std::string("'") + key + "' must be 3x3");
    }
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = rows[r][c];
    return m;
}

json matrix_to_json(const Eigen::Matrix3d& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
    return rows;
}

}  // namespace

void LineConfigMatrix::validate() const {
    const std::string tag = "config " + std::to_string(config_id);
    for (int k = 0; k < 3; ++k) {
        if (!(z_phase(k, k).real() > 0.0)) {
            throw ValidationError(tag + ": self resistance must be positive");
        }
    }
    const double d = b_shunt(0, 0);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double expect = r == c ? d : 0.0;
            if (b_shunt(r, c) != expect) {
                throw ValidationError(tag + ": shunt susceptance must be diagonal with equal entries");
            }
        }
    }
    if (d < 0.0) {
        throw ValidationError(tag + ": shunt susceptance must be nonnegative");
    }
}

std::map<int, LineConfigMatrix> standard_line_configs() {
    using C = Complex;
    std::map<int, LineConfigMatrix> out;
    out[721] = make_config(721,
                           {{{C(0.2926, 0.1973), C(0.0673, -0.0368), C(0.0337, -0.0417)},
                             {C(0.0673, -0.0368), C(0.2646, 0.1900), C(0.0673, -0.0368)},
                             {C(0.0337, -0.0417), C(0.0673, -0.0368), C(0.2926, 0.1973)}}},
                           159.7919);
    out[722] = make_config(722,
                           {{{C(0.4751, 0.2973), C(0.1629, -0.0326), C(0.1234, -0.0607)},
                             {C(0.1629, -0.0326), C(0.4488, 0.2678), C(0.1629, -0.0326)},
                             {C(0.1234, -0.0607), C(0.1629, -0.0326), C(0.4751, 0.2973)}}},
                           127.8306);
    // The (2,3)/(3,2) entries carry the opposite reactance sign to (1,2); kept as tabulated.
    out[723] = make_config(723,
                           {{{C(1.2936, 0.6713), C(0.4871, 0.2111), C(0.4585, 0.1521)},
                             {C(0.4871, 0.2111), C(1.3022, 0.6326), C(0.4871, -0.2111)},
                             {C(0.4585, 0.1521), C(0.4871, -0.2111), C(1.2936, 0.6713)}}},
                           74.8405);
    out[724] = make_config(724,
                           {{{C(2.0952, 0.7758), C(0.5204, 0.2738), C(0.4926, 0.2123)},
                             {C(0.5204, 0.2738), C(2.1068, 0.7398), C(0.5204, 0.2738)},
                             {C(0.4926, 0.2123), C(0.5204, 0.2738), C(2.0952, 0.7758)}}},
                           60.2483);
    return out;
}

BaseSystem make_base(double v_base, double s_base) {
    if (!(v_base > 0.0) || !(s_base > 0.0)) {
        throw DomainError("base voltage and power must be positive");
    }
    BaseSystem b;
    b.v_base = v_base;
    b.s_base = s_base;
    b.z_base = v_base * v_base / s_base;
    b.y_base = 1.0 / b.z_base;
    return b;
}

BaseSystem default_base() { return make_base(4800.0 / std::sqrt(3.0), 2.5e6); }

const Bus& NetworkModel::bus(int id) const {
    auto it = std::find_if(buses.begin(), buses.end(), [id](const Bus& b) { return b.id == id; });
    if (it == buses.end()) {
        throw DomainError("no bus " + std::to_string(id));
    }
    return *it;
}

bool NetworkModel::contains(int bus_id) const {
    return std::any_of(buses.begin(), buses.end(), [bus_id](const Bus& b) { return b.id == bus_id; });
}

int NetworkModel::slack_id() const {
    for (const auto& b : buses) {
        if (b.kind == BusKind::slack) return b.id;
    }
    throw ValidationError("network has no slack bus");
}

void NetworkModel::validate() const {
    if (buses.empty()) {
        throw ValidationError("network has no buses");
    }
    std::set<int> ids;
    int slack_count = 0;
    for (const auto& b : buses) {
        if (!ids.insert(b.id).second) {
            throw ValidationError("duplicate bus " + std::to_string(b.id));
        }
        if (b.kind == BusKind::slack) ++slack_count;
        if (b.pv_arrays < 0) {
            throw ValidationError("bus " + std::to_string(b.id) + ": negative pv array count");
        }
    }
    if (slack_count != 1) {
        throw ValidationError("exactly one slack bus required, found " + std::to_string(slack_count));
    }
    if (!(base.v_base > 0.0) || !(base.s_base > 0.0)) {
        throw ValidationError("base voltage and power must be positive");
    }
    for (const auto& [id, cfg] : configs) {
        if (id != cfg.config_id) {
            throw ValidationError("config key " + std::to_string(id) + " does not match its id");
        }
        cfg.validate();
    }

    std::map<int, std::vector<int>> adjacency;
    auto link = [&](int a, int b, const std::string& what) {
        if (!ids.count(a) || !ids.count(b)) {
            throw ValidationError(what + " references unknown bus");
        }
        if (a == b) {
            throw ValidationError(what + " is a self loop");
        }
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };
    for (const auto& s : segments) {
        const std::string what = "segment " + std::to_string(s.from_bus) + "-" + std::to_string(s.to_bus);
        if (!(s.length_ft > 0.0)) {
            throw ValidationError(what + ": length must be positive");
        }
        if (!configs.count(s.config_id)) {
            throw ValidationError(what + ": unknown config " + std::to_string(s.config_id));
        }
        link(s.from_bus, s.to_bus, what);
    }
    for (const auto& t : transformers) {
        const std::string what = "transformer " + std::to_string(t.from_bus) + "-" + std::to_string(t.to_bus);
        if (!(t.r_pu > 0.0)) {
            throw ValidationError(what + ": resistance must be positive");
        }
        link(t.from_bus, t.to_bus, what);
    }

    if (segments.size() + transformers.size() != buses.size() - 1) {
        throw ValidationError("feeder is not radial: " + std::to_string(segments.size() + transformers.size()) +
                              " branches for " + std::to_string(buses.size()) + " buses");
    }
    std::set<int> seen{slack_id()};
    std::queue<int> frontier;
    frontier.push(slack_id());
    while (!frontier.empty()) {
        int at = frontier.front();
        frontier.pop();
        for (int next : adjacency[at]) {
            if (seen.insert(next).second) frontier.push(next);
        }
    }
    if (seen.size() != buses.size()) {
        for (int id : ids) {
            if (!seen.count(id)) {
                throw ValidationError("bus " + std::to_string(id) + " is disconnected from the slack bus");
            }
        }
    }
}

NetworkModel parse_network(const std::string& text, const std::string& source) {
    json doc = detail::parse_json(text, source);
    if (!doc.is_object()) {
        throw ParseError(source, 1, "network document must be an object");
    }
    NetworkModel net;
    net.name = detail::optional<std::string>(doc, "name", "", source);

    if (doc.contains("base")) {
        const auto& b = doc["base"];
        double v = detail::require<double>(b, "v_base_v", source + " base");
        double s = detail::require<double>(b, "s_base_va", source + " base");
        try {
            net.base = make_base(v, s);
        } catch (const DomainError& e) {
            throw ValidationError(std::string("base: ") + e.what());
        }
    } else {
        net.base = default_base();
    }

    for (const auto& jb : detail::require<json>(doc, "buses", source)) {
        Bus b;
        b.id = detail::require<int>(jb, "id", source + " bus");
        b.kind = parse_kind(detail::optional<std::string>(jb, "kind", "load", source), source);
        b.pv_arrays = detail::optional<int>(jb, "pv_arrays", 0, source);
        net.buses.push_back(b);
    }
    for (const auto& js : detail::require<json>(doc, "segments", source)) {
        Segment s;
        s.from_bus = detail::require<int>(js, "from", source + " segment");
        s.to_bus = detail::require<int>(js, "to", source + " segment");
        s.length_ft = detail::require<double>(js, "length_ft", source + " segment");
        s.config_id = detail::require<int>(js, "config", source + " segment");
        net.segments.push_back(s);
    }
    if (doc.contains("transformers")) {
        for (const auto& jt : doc["transformers"]) {
            TransformerLink t;
            t.from_bus = detail::require<int>(jt, "from", source + " transformer");
            t.to_bus = detail::require<int>(jt, "to", source + " transformer");
            t.r_pu = detail::optional<double>(jt, "r_pu", 1e-6, source);
            net.transformers.push_back(t);
        }
    }
    if (doc.contains("configs")) {
        for (const auto& jc : doc["configs"]) {
            LineConfigMatrix cfg;
            cfg.config_id = detail::require<int>(jc, "id", source + " config");
            const std::string where = source + " config " + std::to_string(cfg.config_id);
            Eigen::Matrix3d r = read_matrix3(jc, "r_ohm_per_mile", where);
            Eigen::Matrix3d x = read_matrix3(jc, "x_ohm_per_mile", where);
            cfg.z_phase.real() = r;
            cfg.z_phase.imag() = x;
            cfg.b_shunt = read_matrix3(jc, "b_us_per_mile", where);
            net.configs[cfg.config_id] = cfg;
        }
    } else {
        net.configs = standard_line_configs();
    }

    net.validate();
    return net;
}

NetworkModel load_network(const std::filesystem::path& path) {
    return parse_network(detail::read_text_file(path), path.string());
}

std::string serialize_network(const NetworkModel& model) {
    json doc;
    doc["name"] = model.name;
    doc["base"] = {{"v_base_v", model.base.v_base}, {"s_base_va", model.base.s_base}};
    doc["buses"] = json::array();
    for (const auto& b : model.buses) {
        doc["buses"].push_back({{"id", b.id}, {"kind", kind_name(b.kind)}, {"pv_arrays", b.pv_arrays}});
    }
    doc["segments"] = json::array();
    for (const auto& s : model.segments) {
        doc["segments"].push_back(
            {{"from", s.from_bus}, {"to", s.to_bus}, {"length_ft", s.length_ft}, {"config", s.config_id}});
    }
    doc["transformers"] = json::array();
    for (const auto& t : model.transformers) {
        doc["transformers"].push_back({{"from", t.from_bus}, {"to", t.to_bus}, {"r_pu", t.r_pu}});
    }
    doc["configs"] = json::array();
    for (const auto& [id, cfg] : model.configs) {
        doc["configs"].push_back({{"id", id},
                                  {"r_ohm_per_mile", matrix_to_json(cfg.z_phase.real())},
                                  {"x_ohm_per_mile", matrix_to_json(cfg.z_phase.imag())},
                                  {"b_us_per_mile", matrix_to_json(cfg.b_shunt)}});
    }
    return doc.dump(2) + "\n";
}

void save_network(const NetworkModel& model, const std::filesystem::path& path) {
    detail::write_text_file(path, serialize_network(model));
}

}  // namespace gridsim
