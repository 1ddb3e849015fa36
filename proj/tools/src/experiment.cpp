#include "experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sparcas::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTables{"scalability", "comparison", "class_delays", "dynamic", "payments"};

int get_int(const json& obj, const std::string& key, int fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw SpecError(where + "." + key, "expected an integer");
    }
    return v.get<int>();
}

std::vector<int> get_int_list(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) {
        throw SpecError(where + "." + key, "missing");
    }
    const auto& v = obj.at(key);
    if (v.is_number_integer()) {
        return {v.get<int>()};
    }
    if (!v.is_array() || v.empty()) {
        throw SpecError(where + "." + key, "expected an integer or a non-empty array of integers");
    }
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer()) {
            throw SpecError(where + "." + key + "[" + std::to_string(i) + "]", "expected an integer");
        }
        out.push_back(v[i].get<int>());
    }
    return out;
}

std::vector<std::string> get_string_list(const json& obj, const std::string& key, std::vector<std::string> fallback,
        const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (v.is_string()) {
        return {v.get<std::string>()};
    }
    if (!v.is_array() || v.empty()) {
        throw SpecError(where + "." + key, "expected a string or a non-empty array of strings");
    }
    std::vector<std::string> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) {
            throw SpecError(where + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        }
        out.push_back(v[i].get<std::string>());
    }
    return out;
}

void expand(const json& templates, const std::string& key, std::vector<Template>& out) {
    if (!templates.is_array()) {
        throw SpecError(key, "expected an array of templates");
    }
    for (size_t i = 0; i < templates.size(); ++i) {
        const std::string where = key + "[" + std::to_string(i) + "]";
        const auto& t = templates[i];
        if (!t.is_object()) {
            throw SpecError(where, "expected an object");
        }
        SimConfig base;
        if (t.contains("workspace")) {
            const auto& w = t.at("workspace");
            if (!w.is_object()) {
                throw SpecError(where + ".workspace", "expected an object");
            }
            base.workspace.width = get_int(w, "width", base.workspace.width, where + ".workspace");
            base.workspace.height = get_int(w, "height", base.workspace.width, where + ".workspace");
            base.workspace.block_spacing =
                    get_int(w, "block_spacing", base.workspace.block_spacing, where + ".workspace");
            if (base.workspace.width < 8 || base.workspace.height < 8 || base.workspace.block_spacing < 2) {
                throw SpecError(where + ".workspace", "needs width, height >= 8 and block_spacing >= 2");
            }
        }
        if (t.contains("class_mix")) {
            auto mix = get_int_list(t, "class_mix", where);
            if (mix.size() != 3 || mix[0] < 0 || mix[1] < 0 || mix[2] < 0 || mix[0] + mix[1] + mix[2] == 0) {
                throw SpecError(where + ".class_mix", "expected three non-negative weights (economy, regular, premium)");
            }
            base.class_mix = {mix[0], mix[1], mix[2]};
        }
        base.late_percent = get_int(t, "late_percent", 0, where);
        if (base.late_percent < 0 || base.late_percent > 100) {
            throw SpecError(where + ".late_percent", "must be in [0, 100]");
        }
        base.arrival_window = get_int(t, "arrival_window", 0, where);
        base.step_limit = get_int(t, "step_limit", base.step_limit, where);
        base.deadlock_window = get_int(t, "deadlock_window", base.deadlock_window, where);
        base.mini_slot_ms = get_int(t, "mini_slot_ms", base.mini_slot_ms, where);
        if (base.arrival_window < 0 || base.step_limit < 1 || base.deadlock_window < 1 || base.mini_slot_ms < 0) {
            throw SpecError(where, "arrival_window >= 0, step_limit >= 1, deadlock_window >= 1, mini_slot_ms >= 0");
        }
        const auto placement = get_string_list(t, "placement", {"manager"}, where);
        if (placement.size() != 1 || (placement[0] != "manager" && placement[0] != "decentralized")) {
            throw SpecError(where + ".placement", "expected \"manager\" or \"decentralized\"");
        }
        base.placement = placement[0] == "manager" ? AuctionPlacement::IntersectionManager
                                                   : AuctionPlacement::Decentralized;
        const auto robots = get_int_list(t, "robots", where);
        for (int n : robots) {
            if (n < 0) {
                throw SpecError(where + ".robots", "robot counts must be >= 0");
            }
        }
        const auto mechanisms = get_string_list(t, "mechanisms", {"sparcas"}, where);
        std::string label = t.value("label", "");
        if (label.empty()) {
            label = std::to_string(base.workspace.width) + "x" + std::to_string(base.workspace.height);
        }
        for (const auto& m : mechanisms) {
            MechanismKind kind;
            try {
                kind = parse_mechanism(m);
            } catch (const std::invalid_argument& e) {
                throw SpecError(where + ".mechanisms", e.what());
            }
            for (int n : robots) {
                Template tpl{label, base};
                tpl.config.robots = n;
                tpl.config.mechanism = kind;
                out.push_back(std::move(tpl));
            }
        }
    }
}

}  // namespace

TraceMode parse_trace_mode(const std::string& text) {
    if (text == "none") {
        return TraceMode::None;
    }
    if (text == "first-seed" || text == "first_seed") {
        return TraceMode::FirstSeed;
    }
    if (text == "all") {
        return TraceMode::All;
    }
    throw std::invalid_argument("trace mode must be none, first-seed or all");
}

ExperimentSpec parse_experiment(const std::string& json_text, bool full_scale) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SpecError("<document>", "expected a JSON object");
    }
    ExperimentSpec spec;
    if (!doc.contains("name") || !doc.at("name").is_string()) {
        throw SpecError("name", "expected a string");
    }
    spec.name = doc.at("name").get<std::string>();
    spec.seeds = get_int(doc, "seeds", spec.seeds, "spec");
    if (spec.seeds < 1) {
        throw SpecError("seeds", "must be >= 1");
    }
    if (doc.contains("timeout_seconds")) {
        if (!doc.at("timeout_seconds").is_number() || doc.at("timeout_seconds").get<double>() <= 0) {
            throw SpecError("timeout_seconds", "expected a positive number");
        }
        spec.timeout_seconds = doc.at("timeout_seconds").get<double>();
    }
    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) {
            throw SpecError("output", "expected a string");
        }
        spec.output = doc.at("output").get<std::string>();
    } else {
        spec.output = std::filesystem::path("out") / spec.name;
    }
    spec.tables = get_string_list(doc, "tables", {}, "spec");
    for (size_t i = 0; i < spec.tables.size(); ++i) {
        if (!kTables.contains(spec.tables[i])) {
            throw SpecError("tables[" + std::to_string(i) + "]", "unknown table '" + spec.tables[i] + "'");
        }
    }
    if (doc.contains("traces")) {
        try {
            spec.traces = parse_trace_mode(doc.at("traces").get<std::string>());
        } catch (const std::exception& e) {
            throw SpecError("traces", e.what());
        }
    }
    if (!doc.contains("templates")) {
        throw SpecError("templates", "missing");
    }
    expand(doc.at("templates"), "templates", spec.templates);
    if (full_scale && doc.contains("full_scale_templates")) {
        expand(doc.at("full_scale_templates"), "full_scale_templates", spec.templates);
    }
    if (spec.templates.empty()) {
        throw SpecError("templates", "no runs");
    }
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path, bool full_scale) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError("<file>", "cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str(), full_scale);
}

std::filesystem::path preset_path(const std::string& name) {
    std::vector<std::filesystem::path> dirs;
    if (const char* env = std::getenv("SPARCAS_PRESET_DIR")) {
        dirs.emplace_back(env);
    }
    dirs.emplace_back(SPARCAS_SOURCE_PRESET_DIR);
    dirs.emplace_back(SPARCAS_INSTALL_PRESET_DIR);
    for (const auto& dir : dirs) {
        auto candidate = dir / (name + ".json");
        if (std::filesystem::exists(candidate)) {
            return candidate;
        }
    }
    throw SpecError("--preset", "no preset named '" + name + "'");
}

std::vector<std::string> preset_names() {
    std::set<std::string> names;
    for (const auto& dir : {std::filesystem::path(SPARCAS_SOURCE_PRESET_DIR)}) {
        if (!std::filesystem::is_directory(dir)) {
            continue;
        }
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() == ".json") {
                names.insert(entry.path().stem().string());
            }
        }
    }
    return {names.begin(), names.end()};
}

std::uint64_t seed_base() {
    const char* env = std::getenv("SPARCAS_SEED_BASE");
    if (!env || !*env) {
        return 0;
    }
    return std::stoull(env);
}

}  // namespace sparcas::cli
